use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holobound::coherence::{ensemble_members, mc_average_intensity, CoherenceSpec, SimulationWindow};
use holobound::edge::{solve_half_width, EdgeProfile};
use holobound::experiment::{add_detector_noise, error_curve};
use holobound::gauge::{noise_half_width, threshold_eta};
use holobound::io::csv::{curve_csv, profile_csv};
use holobound::io::pfm::{read_pfm, write_pfm_f64};
use holobound::io::report::{to_json, CurveSidecar, GaugeDocument};
use holobound::io::{parse_config, ParsedConfig};
use holobound::propagate::{apply_illumination, make_transfer, sense_and_crop, Propagator};
use holobound::rng::{substream_seed, Domain};
use holobound::{ComplexField, Complex64, Error, GaugeReport, Grid, TransferKind, TransferOptions};

#[derive(Parser)]
#[command(name = "holobound", version, about = "Field-of-view gauge and forward model for lensless in-line holography")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Overrides the experiment seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Half-widths, field of view, bandwidth and resolution of a setup.
    Gauge { config: PathBuf },
    /// Hologram intensity of a sample given as PFM amplitude (and phase).
    Propagate {
        config: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Phase in radians, same size as the amplitude.
        #[arg(long)]
        in_phase: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Add detector noise of the configured level.
        #[arg(long)]
        noisy: bool,
    },
    /// Analytic knife-edge profile with its envelope.
    Edge {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Modelling error versus screen distance. Writes a JSON sidecar next to the CSV.
    Experiment {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidSetup(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ParsedConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut parsed = parse_config(&text)?;
    if let Some(seed) = seed {
        parsed.plan.seed = seed;
    }
    Ok(parsed)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Gauge { config } => {
            let c = load(config, g.seed)?;
            let report = GaugeReport::evaluate(&c.setup, &c.gauge)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            if g.json {
                print!("{}", to_json(&GaugeDocument::new(c.setup.config(), report))?);
            } else {
                print!("{report}");
            }
        }
        Command::Propagate { config, input, in_phase, out, noisy } => {
            let c = load(config, g.seed)?;
            let image = propagate_command(&c, input, in_phase.as_deref(), *noisy)?;
            write_pfm_f64(out, &image)?;
            if g.json {
                let (rows, cols) = image.dim();
                println!("{{\"rows\": {rows}, \"cols\": {cols}, \"out\": {:?}}}", out.display().to_string());
            }
        }
        Command::Edge { config, out, points } => {
            let c = load(config, g.seed)?;
            let s = &c.setup;
            let p = match threshold_eta(s) {
                Ok(eta) => solve_half_width(eta, s)?,
                Err(_) => noise_half_width(s.wavenumber(), s.distance, s.incidence[0], 0.1),
            };
            let profile = EdgeProfile::linspace(-0.25 * p, 4.0 * p, *points, s)?;
            write(out, &profile_csv(&profile))?;
            if g.json {
                println!("{{\"half_width_m\": {p:?}, \"points\": {points}}}");
            }
        }
        Command::Experiment { config, out } => {
            let c = load(config, g.seed)?;
            let curve = error_curve(&c.plan, &c.setup)?;
            write(out, &curve_csv(&curve))?;
            let sidecar = to_json(&CurveSidecar::new(&curve))?;
            write(&out.with_extension("json"), &sidecar)?;
            if g.json {
                print!("{sidecar}");
            } else if let Some(t) = curve.knee(holobound::experiment::KNEE_DB) {
                println!("knee at t = {:.2} um", t * 1e6);
            } else {
                println!("no knee within the sweep");
            }
        }
    }
    Ok(())
}

fn propagate_command(
    c: &ParsedConfig,
    input: &Path,
    phase: Option<&Path>,
    noisy: bool,
) -> Result<ndarray::Array2<f64>, Failure> {
    let setup = &c.setup;
    let read = |p: &Path| read_pfm(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())));
    let amp = read(input)?;
    let phase = phase.map(read).transpose()?;
    if let Some(ph) = &phase {
        if ph.dim() != amp.dim() {
            return Err(Failure::Runtime("amplitude and phase images differ in size".into()));
        }
    }
    let (rows, cols) = amp.dim();
    let d = setup.carrier_displacement();
    let grid = Grid::centered(cols, rows, c.propagation.pitch, [-d[0], -d[1]])?;
    let samples = ndarray::Array2::from_shape_fn((rows, cols), |idx| {
        let a = amp[idx] as f64;
        phase.as_ref().map_or(Complex64::new(a, 0.0), |ph| Complex64::from_polar(a, ph[idx] as f64))
    });
    let object = ComplexField::new(samples, grid, setup.wavelength, setup.refractive_index)?;
    let options = TransferOptions { band_limit: c.propagation.band_limit, output_shift: d };
    let window = SimulationWindow { detector: setup.detector_size, options };
    let coherent = setup.coherence_length.is_none() && setup.source_angular_radius == 0.0;

    let mut image = if coherent {
        let field = match c.propagation.kind {
            TransferKind::ShiftedAngularSpectrum => {
                let tf = make_transfer(TransferKind::ShiftedAngularSpectrum, &grid, setup, options);
                Propagator::new(tf).apply(&object)?
            }
            kind => {
                let tilted = apply_illumination(&object, setup)?;
                Propagator::new(make_transfer(kind, &grid, setup, options)).apply(&tilted)?
            }
        };
        match sense_and_crop(&field, setup.detector_size) {
            Ok(img) => img,
            Err(Error::DetectorLargerThanGrid) => {
                log::warn!("detector exceeds the sample grid; writing the full propagated window");
                field.intensity()
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        if c.propagation.kind != TransferKind::ShiftedAngularSpectrum {
            log::warn!("partially coherent runs always use the shifted angular-spectrum kernel");
        }
        let seed = substream_seed(c.plan.seed, Domain::Temporal, 0);
        let members = ensemble_members(&CoherenceSpec::from_setup(setup, c.plan.ensemble_size, seed)?)?;
        mc_average_intensity(&object, &members, setup, &window)?
    };
    image.mapv_inplace(|v| v * setup.mean_intensity);
    if noisy {
        add_detector_noise(&mut image, setup, c.plan.seed, 0);
    }
    Ok(image)
}
