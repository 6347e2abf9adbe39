//! Run configuration: parameter point, truncation, sample counts,
//! tolerances and the seed. Every field has a default so a config file only
//! needs the entries it changes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QkzError, Result};
use crate::numerics::linalg::c;
use crate::qkzb::BaxterCouplings;
use crate::spin_rep::ParameterSet;
use crate::C64;

/// Environment variable overriding the exact-identity tolerance.
pub const TOL_ENV: &str = "QKZ_TOL";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub q: f64,
    pub kappa: C64,
    pub zeta: C64,
    pub zeta_p: C64,
    pub upsilon: C64,
    pub upsilon_p: C64,
    pub xi: C64,
    /// `(zeta_l, zeta_l', upsilon_l, upsilon_l')` of the left K-matrix in the qKZB suite.
    pub left_pack: [C64; 4],
    pub series: SeriesConfig,
    pub connection: ConnectionConfig,
    pub samples: SampleCounts,
    pub tolerances: Tolerances,
    pub sample_box: SampleBox,
    /// Inclusive height window of the face suite.
    pub face_window: [i64; 2],
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesConfig {
    /// Truncation of the consistency and transport checks.
    pub height: usize,
    /// `q` of the transport decay check.
    pub transport_q: f64,
    /// Common value of `Re(alpha_i, z)` at the transport check.
    pub transport_depth: f64,
    /// Truncation of the cross-route comparison.
    pub cross_route_height: usize,
    pub cross_route_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectionConfig {
    pub q: f64,
    pub height: usize,
    /// Real parts the basis is transported to before the series is summed.
    pub target: Vec<f64>,
    pub points: usize,
    /// Samples closer than this to a resonance are refused.
    pub resonance_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleCounts {
    pub hecke: usize,
    /// Points of the hecke suite that also get the intertwiner cross-check.
    pub hecke_intertwiner: usize,
    pub trig: usize,
    pub dynamical: usize,
    pub face_points: usize,
    pub qkzb_probes: usize,
    pub qkzb_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Exact algebraic identities (Hecke, trigonometric, dynamical, face).
    pub identity: f64,
    pub series_consistency: f64,
    pub series_transport: f64,
    /// Required decay factor of the transport residual from `H` to `H + 2`.
    pub series_decay: f64,
    pub cross_route: f64,
    pub connection: f64,
    pub cocycle: f64,
    pub qkzb: f64,
    /// Minimal residual the sensitivity probe must produce.
    pub sensitivity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleBox {
    /// Half-width of the real part of sampled spectral variables.
    pub spectral_re: f64,
    /// Half-width of the imaginary part of sampled spectral variables.
    pub spectral_im: f64,
    /// Half-width of the jitter of random parameter points around the reference point.
    pub parameter_jitter: f64,
    /// Range of `q` for random parameter points.
    pub q_range: [f64; 2],
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ParameterSet::default_point(2);
        let b = BaxterCouplings::default_point();
        RunConfig {
            n: 2,
            q: p.q,
            kappa: p.kappa,
            zeta: p.zeta,
            zeta_p: p.zeta_p,
            upsilon: p.upsilon,
            upsilon_p: p.upsilon_p,
            xi: p.xi,
            left_pack: b.left,
            series: SeriesConfig::default(),
            connection: ConnectionConfig::default(),
            samples: SampleCounts::default(),
            tolerances: Tolerances::default(),
            sample_box: SampleBox::default(),
            face_window: [-3, 3],
            seed: 1729,
        }
    }
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { height: 6, transport_q: 0.45, transport_depth: -4.0, cross_route_height: 8, cross_route_points: 20 }
    }
}

impl Default for ConnectionConfig {
    fn default() -> Self {
        ConnectionConfig { q: 0.25, height: 8, target: vec![-8.0, -4.0], points: 10, resonance_margin: 0.05 }
    }
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            hecke: 500,
            hecke_intertwiner: 20,
            trig: 200,
            dynamical: 200,
            face_points: 20,
            qkzb_probes: 50,
            qkzb_points: 3,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-11,
            series_consistency: 1e-9,
            series_transport: 1e-7,
            series_decay: 10.0,
            cross_route: 1e-8,
            connection: 1e-5,
            cocycle: 1e-10,
            qkzb: 1e-10,
            sensitivity: 1e-4,
        }
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { spectral_re: 0.5, spectral_im: 0.3, parameter_jitter: 0.08, q_range: [0.2, 0.5] }
    }
}

impl RunConfig {
    /// Parse a JSON config; errors name the file, line and column or field.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QkzError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QkzError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Apply `QKZ_TOL` if it is set.
    pub fn with_env(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var(TOL_ENV) {
            self.tolerances.identity = v
                .trim()
                .parse()
                .map_err(|_| QkzError::Config(format!("{TOL_ENV}={v:?} is not a number")))?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(QkzError::Config(format!("field `{field}`: {why}")));
        if !(2..=4).contains(&self.n) {
            return bad("n", "rank must lie in 2..=4");
        }
        for (field, q) in [("q", self.q), ("series.transport_q", self.series.transport_q), ("connection.q", self.connection.q)] {
            if !(q > 0.0 && q < 1.0) {
                return bad(field, "must lie in (0, 1)");
            }
        }
        let [lo, hi] = self.sample_box.q_range;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return bad("sample_box.q_range", "must satisfy 0 < lo < hi < 1");
        }
        if self.series.height == 0 || self.connection.height == 0 || self.series.cross_route_height == 0 {
            return bad("height", "truncation heights must be positive");
        }
        if self.connection.target.len() != 2 {
            return bad("connection.target", "the connection suite runs at rank 2 and needs two entries");
        }
        if self.face_window[0] > self.face_window[1] {
            return bad("face_window", "lower end exceeds upper end");
        }
        let t = &self.tolerances;
        for (field, v) in [
            ("tolerances.identity", t.identity),
            ("tolerances.series_consistency", t.series_consistency),
            ("tolerances.series_transport", t.series_transport),
            ("tolerances.series_decay", t.series_decay),
            ("tolerances.cross_route", t.cross_route),
            ("tolerances.connection", t.connection),
            ("tolerances.cocycle", t.cocycle),
            ("tolerances.qkzb", t.qkzb),
            ("tolerances.sensitivity", t.sensitivity),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(field, "must be positive and finite");
            }
        }
        for (field, v) in [
            ("sample_box.spectral_re", self.sample_box.spectral_re),
            ("sample_box.spectral_im", self.sample_box.spectral_im),
            ("sample_box.parameter_jitter", self.sample_box.parameter_jitter),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(field, "must be non-negative and finite");
            }
        }
        Ok(())
    }

    /// The configured parameter point at rank `n`.
    pub fn params(&self, n: usize) -> ParameterSet {
        ParameterSet {
            n,
            q: self.q,
            kappa: self.kappa,
            zeta: self.zeta,
            zeta_p: self.zeta_p,
            upsilon: self.upsilon,
            upsilon_p: self.upsilon_p,
            xi: self.xi,
        }
    }

    /// The nine couplings of the qKZB suite: the configured boundary
    /// parameters on the right and `left_pack` on the left.
    pub fn couplings(&self) -> BaxterCouplings {
        BaxterCouplings {
            q: self.q,
            kappa: self.kappa,
            right: [self.zeta, self.zeta_p, self.upsilon, self.upsilon_p],
            left: self.left_pack,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// A sampled complex number in the spectral box.
pub(crate) fn spectral<R: rand::Rng>(b: &SampleBox, rng: &mut R) -> C64 {
    c(rng.gen_range(-b.spectral_re..=b.spectral_re), rng.gen_range(-b.spectral_im..=b.spectral_im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json(), "inline").unwrap(), cfg);
        assert_eq!(RunConfig::from_json("{}", "inline").unwrap(), cfg);
    }

    #[test]
    fn malformed_config_names_position_and_field() {
        let e = RunConfig::from_json("{\n  \"n\": 2,\n  \"q\": ,\n}", "cfg.json").unwrap_err().to_string();
        assert!(e.contains("cfg.json") && e.contains("line 3"), "{e}");
        let e = RunConfig::from_json("{\"kapa\": [0.3, 0.0]}", "cfg.json").unwrap_err().to_string();
        assert!(e.contains("kapa"), "{e}");
        let mut cfg = RunConfig::default();
        cfg.q = 1.5;
        assert!(cfg.validate().unwrap_err().to_string().contains("`q`"));
    }
}
