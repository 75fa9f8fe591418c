use std::fmt;

use thiserror::Error;

/// A single violated setup invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    WavelengthNotPositive,
    IndexBelowOne,
    DistanceNotPositive,
    DistanceTooShort,
    IncidenceOutOfRange,
    DetectorNotPositive,
    MeanIntensityNotPositive,
    NoiseSigmaNegative,
    QuantizationNegative,
    CoherenceLengthNotPositive,
    SourceRadiusOutOfRange,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::WavelengthNotPositive => "wavelength must be positive and finite",
            Violation::IndexBelowOne => "refractive index must be finite and at least 1",
            Violation::DistanceNotPositive => "distance must be positive",
            Violation::DistanceTooShort => "distance too short (z ≤ 10λ)",
            Violation::IncidenceOutOfRange => "incidence out of range",
            Violation::DetectorNotPositive => "detector size must be positive",
            Violation::MeanIntensityNotPositive => "mean intensity must be positive",
            Violation::NoiseSigmaNegative => "noise sigma must be non-negative",
            Violation::QuantizationNegative => "quantization step must be non-negative",
            Violation::CoherenceLengthNotPositive => "coherence length must be positive",
            Violation::SourceRadiusOutOfRange => "source angular radius out of range",
        };
        f.write_str(msg)
    }
}

/// Every invariant a raw setup failed, in field order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn contains(&self, v: Violation) -> bool {
        self.0.contains(&v)
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid setup: {0}")]
    InvalidSetup(Violations),
    #[error("noise bound undefined: noise sigma and quantization are both zero")]
    NoiseBoundUndefined,
    #[error("no active bound; theoretical FoV applies")]
    NoActiveBound,
    #[error("setup outside sampling-argument validity (λ/z ≥ n)")]
    OutsideSamplingValidity,
    #[error("position outside gauged FoV")]
    OutsideFov,
    #[error("outside formula validity: {0}")]
    OutsideFormulaValidity(&'static str),
    #[error("tilted carrier aliased: pitch {pitch:e} m exceeds {limit:e} m")]
    TiltedCarrierAliased { pitch: f64, limit: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("detector larger than grid")]
    DetectorLargerThanGrid,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("error curve undefined: {0}")]
    UndefinedErrorCurve(&'static str),
    #[error("config: {0}")]
    Config(String),
    #[error("pfm: {0}")]
    Pfm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
