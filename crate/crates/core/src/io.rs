//! JSON forms of frames and weight profiles (always `f64`).
//!
//! Complex entries are written as `[re, im]`; a bare number is read as a
//! real entry.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::frame::{Frame, Vector};
use crate::pseudo_boson::MProfile;
use crate::scalar::{cplx, C};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexEntry {
    pub fn value(self) -> C<f64> {
        match self {
            ComplexEntry::Real(re) => cplx(re, 0.0),
            ComplexEntry::Pair([re, im]) => cplx(re, im),
        }
    }
}

impl From<C<f64>> for ComplexEntry {
    fn from(z: C<f64>) -> Self {
        ComplexEntry::Pair([z.re, z.im])
    }
}

/// `{"dim": d, "vectors": [[entry, …], …], "labels": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub dim: usize,
    pub vectors: Vec<Vec<ComplexEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i64>>,
}

impl FrameFile {
    pub fn to_frame(&self) -> Result<Frame<f64>> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                if v.len() != self.dim {
                    return Err(FrameError::DimensionMismatch {
                        expected: self.dim,
                        found: v.len(),
                    });
                }
                Vector::new(v.iter().map(|e| e.value()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.labels {
            Some(labels) => Frame::with_labels(vectors, labels.clone()),
            None => Frame::new(vectors),
        }
    }

    pub fn from_frame(frame: &Frame<f64>) -> Self {
        Self {
            dim: frame.dim(),
            vectors: frame
                .vectors()
                .iter()
                .map(|v| v.coeffs().iter().map(|&z| z.into()).collect())
                .collect(),
            labels: Some(frame.labels().to_vec()),
        }
    }
}

pub fn frame_from_json(text: &str) -> Result<Frame<f64>> {
    let file: FrameFile = serde_json::from_str(text).map_err(|e| FrameError::Format(e.to_string()))?;
    file.to_frame()
}

pub fn frame_to_json(frame: &Frame<f64>) -> String {
    serde_json::to_string_pretty(&FrameFile::from_frame(frame)).expect("frame serializes")
}

/// `{"kind": "constant" | "gaussian_bump" | "tabulated", …}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: ComplexEntry,
    },
    GaussianBump {
        base: ComplexEntry,
        amplitude: ComplexEntry,
        width: f64,
    },
    Tabulated {
        start: f64,
        step: f64,
        values: Vec<ComplexEntry>,
    },
}

impl ProfileSpec {
    pub fn to_profile(&self) -> MProfile<f64> {
        match self {
            ProfileSpec::Constant { value } => MProfile::Constant(value.value()),
            ProfileSpec::GaussianBump { base, amplitude, width } => MProfile::GaussianBump {
                base: base.value(),
                amplitude: amplitude.value(),
                width: *width,
            },
            ProfileSpec::Tabulated { start, step, values } => MProfile::Tabulated {
                start: *start,
                step: *step,
                values: values.iter().map(|v| v.value()).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_round_trip() {
        let text = r#"{"dim": 2, "vectors": [[1, 0], [0, [0.0, 1.0]]]}"#;
        let f = frame_from_json(text).unwrap();
        assert_eq!(f.labels(), &[1, 2]);
        assert_eq!(f.vector(1).coeffs()[1], cplx(0.0, 1.0));
        let back = frame_from_json(&frame_to_json(&f)).unwrap();
        assert_eq!(back.synthesis_matrix(), f.synthesis_matrix());
    }

    #[test]
    fn frame_errors() {
        assert!(matches!(
            frame_from_json(r#"{"dim": 2, "vectors": [[1]]}"#),
            Err(FrameError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            frame_from_json(r#"{"dim": 1, "vectors": [[1]], "extra": 0}"#),
            Err(FrameError::Format(_))
        ));
    }

    #[test]
    fn profile_kinds() {
        let p: ProfileSpec =
            serde_json::from_str(r#"{"kind": "gaussian_bump", "base": 0.5, "amplitude": 0.2, "width": 1}"#).unwrap();
        assert_eq!(p.to_profile().value(0.0), cplx(0.7, 0.0));
        let p: ProfileSpec = serde_json::from_str(r#"{"kind": "constant", "value": [0.3, 0.4]}"#).unwrap();
        assert_eq!(p.to_profile().value(5.0), cplx(0.3, 0.4));
        assert!(serde_json::from_str::<ProfileSpec>(r#"{"kind": "constant", "value": 1, "x": 2}"#).is_err());
    }
}
