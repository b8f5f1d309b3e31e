//! Bit-exact JSON serialization of certificates.
//!
//! Floats travel as C99 hexadecimal literals, so every binary64 value —
//! subnormals, signed zeros, infinities — survives a round trip bitwise.
//! NaN has no syntax on purpose: it cannot appear in a meaningful
//! certificate. The document carries a version tag and rejects unknown
//! fields, unknown versions, and an empty box set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ntacert_interval::{f64_from_hex, f64_to_hex, HexFloatError};

use crate::model::Certificate;

/// Format tag expected in the `version` field.
pub const FORMAT_VERSION: &str = "ntacert/1";

#[derive(Debug, Error)]
pub enum CertError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported certificate version `{found}` (expected `{}`)", FORMAT_VERSION)]
    Version { found: String },
    #[error("certificate has an empty box set")]
    EmptyBeta,
    #[error("bad float for `{context}`: {source}")]
    HexFloat {
        context: String,
        source: HexFloatError,
    },
    #[error("box {index}: interval for `{var}` has lo > hi or is a point at infinity")]
    InvalidInterval { index: usize, var: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertDoc {
    version: String,
    formula_digest: String,
    sigma: Vec<usize>,
    nu: BTreeMap<String, String>,
    beta: Vec<BTreeMap<String, [String; 2]>>,
}

/// Renders a certificate as pretty-printed JSON with a stable field order.
///
/// Panics if a float is NaN; NaN is not representable in the format.
pub fn serialize_certificate(cert: &Certificate) -> String {
    let doc = CertDoc {
        version: FORMAT_VERSION.to_string(),
        formula_digest: cert.formula_digest.clone(),
        sigma: cert.sigma.clone(),
        nu: cert
            .nu
            .iter()
            .map(|(name, &v)| (name.clone(), f64_to_hex(v)))
            .collect(),
        beta: cert
            .beta
            .iter()
            .map(|b| {
                b.iter()
                    .map(|(name, &(lo, hi))| (name.clone(), [f64_to_hex(lo), f64_to_hex(hi)]))
                    .collect()
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("certificate serialization");
    out.push('\n');
    out
}

pub fn deserialize_certificate(text: &str) -> Result<Certificate, CertError> {
    let doc: CertDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(CertError::Version { found: doc.version });
    }
    if doc.beta.is_empty() {
        return Err(CertError::EmptyBeta);
    }
    let mut nu = BTreeMap::new();
    for (name, hex) in doc.nu {
        let v = f64_from_hex(&hex).map_err(|source| CertError::HexFloat {
            context: format!("nu.{name}"),
            source,
        })?;
        nu.insert(name, v);
    }
    let mut beta = Vec::with_capacity(doc.beta.len());
    for (index, doc_box) in doc.beta.into_iter().enumerate() {
        let mut b = BTreeMap::new();
        for (name, [lo_hex, hi_hex]) in doc_box {
            let lo = f64_from_hex(&lo_hex).map_err(|source| CertError::HexFloat {
                context: format!("beta[{index}].{name}[0]"),
                source,
            })?;
            let hi = f64_from_hex(&hi_hex).map_err(|source| CertError::HexFloat {
                context: format!("beta[{index}].{name}[1]"),
                source,
            })?;
            if !(lo <= hi) || (lo == hi && lo.is_infinite()) {
                return Err(CertError::InvalidInterval {
                    index,
                    var: name,
                });
            }
            b.insert(name, (lo, hi));
        }
        beta.push(b);
    }
    Ok(Certificate {
        formula_digest: doc.formula_digest,
        sigma: doc.sigma,
        nu,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Certificate {
        Certificate {
            formula_digest: "ab".repeat(32),
            sigma: vec![1, 1, 0, 0],
            nu: [("z".to_string(), 0.2f64)].into_iter().collect(),
            beta: vec![[
                ("x".to_string(), (-0.1, 0.05)),
                ("y".to_string(), (1.4, 1.9)),
            ]
            .into_iter()
            .collect()],
        }
    }

    #[test]
    fn round_trips_the_reference_certificate() {
        let cert = sample();
        let text = serialize_certificate(&cert);
        let back = deserialize_certificate(&text).unwrap();
        assert_eq!(back, cert);
        // Spot-check the wire format: hex floats, version tag first.
        assert!(text.starts_with("{\n  \"version\": \"ntacert/1\""));
        assert!(text.contains("\"z\": \"0x1.999999999999ap-3\""));
    }

    #[test]
    fn rejects_wrong_version() {
        let text = serialize_certificate(&sample()).replace("ntacert/1", "ntacert/9");
        assert!(matches!(
            deserialize_certificate(&text),
            Err(CertError::Version { .. })
        ));
    }

    #[test]
    fn rejects_empty_box_set() {
        let mut cert = sample();
        cert.beta.clear();
        let text = serialize_certificate(&cert);
        assert!(matches!(
            deserialize_certificate(&text),
            Err(CertError::EmptyBeta)
        ));
    }

    #[test]
    fn rejects_inverted_intervals_and_bad_floats() {
        let good = serialize_certificate(&sample());
        let inverted = good.replace("-0x1.999999999999ap-4", "0x1p+3");
        assert!(matches!(
            deserialize_certificate(&inverted),
            Err(CertError::InvalidInterval { .. })
        ));
        let junk = good.replace("0x1.999999999999ap-3", "0.2");
        assert!(matches!(
            deserialize_certificate(&junk),
            Err(CertError::HexFloat { .. })
        ));
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = serialize_certificate(&sample()).replace(
            "\"sigma\"",
            "\"extra\": 1,\n  \"sigma\"",
        );
        assert!(matches!(
            deserialize_certificate(&text),
            Err(CertError::Json(_))
        ));
    }

    #[test]
    fn zero_dimensional_boxes_are_empty_objects() {
        let cert = Certificate {
            formula_digest: "00".repeat(32),
            sigma: vec![0],
            nu: [("x".to_string(), 1.0f64)].into_iter().collect(),
            beta: vec![BTreeMap::new()],
        };
        let text = serialize_certificate(&cert);
        assert!(text.contains("{}"));
        assert_eq!(deserialize_certificate(&text).unwrap(), cert);
    }
}
