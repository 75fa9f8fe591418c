//! JSON documents emitted by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::experiment::{BoundMark, CurveMetadata, ErrorCurve};
use crate::gauge::GaugeReport;
use crate::model::SetupConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeDocument {
    pub version: String,
    pub setup: SetupConfig,
    pub report: GaugeReport,
}

impl GaugeDocument {
    pub fn new(setup: &SetupConfig, report: GaugeReport) -> Self {
        GaugeDocument { version: crate::VERSION.to_string(), setup: setup.clone(), report }
    }
}

/// Companion of a curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSidecar {
    pub version: String,
    pub bound_marks: Vec<BoundMark>,
    pub metadata: CurveMetadata,
    pub knee_db: f64,
    pub knee_t: Option<f64>,
}

impl CurveSidecar {
    pub fn new(curve: &ErrorCurve) -> Self {
        CurveSidecar {
            version: crate::VERSION.to_string(),
            bound_marks: curve.bound_marks.clone(),
            metadata: curve.metadata.clone(),
            knee_db: crate::experiment::KNEE_DB,
            knee_t: curve.knee(crate::experiment::KNEE_DB),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> crate::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeOptions;

    #[test]
    fn gauge_document_round_trip() {
        let c = SetupConfig::new(681e-9, 1.0, 1.02e-3, [5.3e-3; 2])
            .with_incidence(9f64.to_radians(), 0.0)
            .with_noise_sigma(0.01)
            .with_coherence_length(1e-3)
            .with_source_radius(1e-3);
        let s = c.clone().validate().unwrap();
        let doc = GaugeDocument::new(&c, GaugeReport::evaluate(&s, &GaugeOptions::default()).unwrap());
        let text = to_json(&doc).unwrap();
        let back: GaugeDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(text.contains("\"fov\""));
        assert!(text.contains("\"binding\""));
    }
}
