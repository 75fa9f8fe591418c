//! CSV tables. Numbers use the shortest representation that parses back to
//! the same `f64`.

use std::fmt::Write;

use crate::coherence::EnsembleMember;
use crate::edge::EdgeProfile;
use crate::experiment::ErrorCurve;

/// `t_m,E_dB,n_reps`
pub fn curve_csv(curve: &ErrorCurve) -> String {
    let mut s = String::from("t_m,E_dB,n_reps\n");
    for p in &curve.points {
        let _ = writeln!(s, "{:?},{:?},{}", p.t, p.e_db, curve.metadata.repetitions);
    }
    s
}

/// `t_m,intensity,envelope`
pub fn profile_csv(profile: &EdgeProfile) -> String {
    let mut s = String::from("t_m,intensity,envelope\n");
    for i in 0..profile.offsets.len() {
        let _ = writeln!(
            s,
            "{:?},{:?},{:?}",
            profile.offsets[i], profile.intensities[i], profile.envelope[i]
        );
    }
    s
}

/// `member,wavelength_m,theta1_rad,theta2_rad`
pub fn ensemble_csv(members: &[EnsembleMember]) -> String {
    let mut s = String::from("member,wavelength_m,theta1_rad,theta2_rad\n");
    for (i, m) in members.iter().enumerate() {
        let _ = writeln!(s, "{i},{:?},{:?},{:?}", m.wavelength, m.incidence[0], m.incidence[1]);
    }
    s
}

/// Parses the first two columns of a curve CSV.
pub fn parse_curve_csv(text: &str) -> Option<Vec<(f64, f64)>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut it = l.split(',');
            Some((it.next()?.parse().ok()?, it.next()?.parse().ok()?))
        })
        .collect()
}
