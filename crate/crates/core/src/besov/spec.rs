use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::profile::Flavor;
use crate::error::{Error, Result};

/// Index triple and flavor of a homogeneous Besov norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovSpec {
    pub s: f64,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
    pub flavor: Flavor,
}

impl BesovSpec {
    pub fn spatial(s: f64, p: f64, q: f64) -> Self {
        BesovSpec { s, p, q, flavor: Flavor::IsotropicSpatial }
    }

    pub fn anisotropic(s: f64, p: f64, q: f64) -> Self {
        BesovSpec { s, p, q, flavor: Flavor::AnisotropicSpacetime }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("regularity s must be finite, got {}", self.s)));
        }
        if self.p.is_nan() || self.p <= 1.0 {
            return Err(Error::InvalidParameter(format!("integrability p must lie in (1, inf], got {}", self.p)));
        }
        if self.q.is_nan() || self.q < 1.0 {
            return Err(Error::InvalidParameter(format!("summation index q must lie in [1, inf], got {}", self.q)));
        }
        Ok(())
    }
}

/// `(Σ v^q)^{1/q}`, or the maximum for `q = ∞`.
pub fn lq_sum(values: &[f64], q: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if q.is_infinite() || m == 0.0 || !m.is_finite() {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / m).powf(q)).sum();
    m * s.powf(1.0 / q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub j: i32,
    /// `2^{sj} ‖f * φ_j‖_{L^p}`.
    pub weighted: f64,
    /// `‖f * φ_j‖_{L^p}`.
    pub raw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub spec: BesovSpec,
    pub per_block: Vec<BlockEntry>,
    pub total: f64,
    pub j_min: i32,
    pub j_max: i32,
    /// `"spatial"` or `"E-proxy"` (space-time norm through the extension operator).
    pub label: String,
    pub ext_order: Option<usize>,
}

/// Unweighted block norms `‖f * φ_j‖_{L^p}` for `j_min..=j_max`.
///
/// Computed once per field and exponent `p`, then aggregated for any `(s, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockNorms {
    pub flavor: Flavor,
    pub p: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub raw: Vec<f64>,
    pub ext_order: Option<usize>,
}

impl BlockNorms {
    pub fn report(&self, s: f64, q: f64) -> Result<BesovReport> {
        let spec = BesovSpec { s, p: self.p, q, flavor: self.flavor };
        spec.validate()?;
        let per_block: Vec<BlockEntry> = self
            .raw
            .iter()
            .enumerate()
            .map(|(i, &raw)| {
                let j = self.j_min + i as i32;
                BlockEntry { j, weighted: (s * j as f64).exp2() * raw, raw }
            })
            .collect();
        let w: Vec<f64> = per_block.iter().map(|b| b.weighted).collect();
        let label = match self.flavor {
            Flavor::IsotropicSpatial => "spatial",
            Flavor::AnisotropicSpacetime => "E-proxy",
        };
        Ok(BesovReport {
            spec,
            per_block,
            total: lq_sum(&w, q),
            j_min: self.j_min,
            j_max: self.j_max,
            label: label.to_string(),
            ext_order: self.ext_order,
        })
    }

    pub fn total(&self, s: f64, q: f64) -> Result<f64> {
        Ok(self.report(s, q)?.total)
    }
}

/// Serializes `f64::INFINITY` as the string `"inf"`, accepts numbers or `"inf"`.
pub mod exponent {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lq_limits() {
        let v = [3.0, 4.0];
        assert!((lq_sum(&v, 2.0) - 5.0).abs() < 1e-15);
        assert_eq!(lq_sum(&v, f64::INFINITY), 4.0);
        assert_eq!(lq_sum(&v, 1.0), 7.0);
        assert_eq!(lq_sum(&[0.0, 0.0], 2.0), 0.0);
    }

    #[test]
    fn spec_roundtrip_with_infinity() {
        let s = BesovSpec::spatial(1.0, f64::INFINITY, 2.0);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"inf\""));
        let back: BesovSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
