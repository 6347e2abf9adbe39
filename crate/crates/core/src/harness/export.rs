//! JSON exports: series coefficients, face weights and connection matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::baxter_face::{adjacent, FaceWeightTable};
use crate::elliptic_connection::{extract_connection, m_cm, resonance_margin};
use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c};
use crate::qkz_series::{solve_gamma, CoefficientDoc, SolutionBasis};
use crate::spin_rep::{ParameterSet, SpinRep};
use crate::weylc::WeylElement;
use crate::{CMat, C64};

pub const FACE_SCHEMA: &str = "qkz-face-weights/1";
pub const CONNECTION_SCHEMA: &str = "qkz-connection-matrices/1";

/// Parses `+-+`, `+1,-1,+1` or `1 -1 1` into signs.
pub fn parse_epsilon(s: &str) -> Result<Vec<i8>> {
    let bad = || QkzError::InvalidInput(format!("epsilon `{s}` must be a string of signs such as +-+"));
    let t = s.trim();
    let out: Vec<i8> = if t.chars().all(|ch| ch == '+' || ch == '-') {
        t.chars().map(|ch| if ch == '+' { 1 } else { -1 }).collect()
    } else {
        t.split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| match x.trim_start_matches('+') {
                "1" => Ok(1),
                "-1" => Ok(-1),
                _ => Err(bad()),
            })
            .collect::<Result<_>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Parses `A:B` into an inclusive window.
pub fn parse_window(s: &str) -> Result<[i64; 2]> {
    let bad = || QkzError::InvalidInput(format!("window `{s}` must look like -3:3"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let w = [a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?];
    if w[0] > w[1] {
        return Err(bad());
    }
    Ok(w)
}

/// Parses a word of simple reflections, `1,2,1` or `121`.
pub fn parse_word(s: &str) -> Result<Vec<usize>> {
    let bad = || QkzError::InvalidInput(format!("word `{s}` must list reflection indices such as 1,2,1"));
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if t.chars().all(|ch| ch.is_ascii_digit()) {
        return Ok(t.chars().map(|ch| ch.to_digit(10).unwrap() as usize).collect());
    }
    t.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

/// Coefficients of `Phi_eps` at the configured point, rank `eps.len()`.
pub fn series_coefficients(cfg: &RunConfig, eps: &[i8], height: usize) -> Result<CoefficientDoc> {
    let rep = SpinRep::new(cfg.params(eps.len()))?;
    Ok(solve_gamma(&rep, eps, height)?.to_doc())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub heights: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// `W(a b; c d | z, xi)` keyed by `[a, b, c, d]` and `B(b; c, a | z, xi)`
/// keyed by `[b, c, a]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceWeightDoc {
    pub schema: String,
    pub window: [i64; 2],
    pub params: ParameterSet,
    pub z: [f64; 2],
    pub xi: [f64; 2],
    pub bulk: Vec<WeightEntry>,
    pub boundary: Vec<WeightEntry>,
}

/// Admissible bulk faces `[a, b, c, d]` with every height in the window.
pub fn admissible_faces(window: [i64; 2]) -> Vec<[i64; 4]> {
    let r = window[0]..=window[1];
    let mut out = Vec::new();
    for a in r.clone() {
        for b in [a - 1, a + 1] {
            for cc in [a - 1, a + 1] {
                for d in [b - 1, b + 1] {
                    if r.contains(&b) && r.contains(&cc) && r.contains(&d) && adjacent(cc, d) {
                        out.push([a, b, cc, d]);
                    }
                }
            }
        }
    }
    out
}

/// Admissible boundary triples `[b, c, a]` with every height in the window.
pub fn admissible_boundary(window: [i64; 2]) -> Vec<[i64; 3]> {
    let r = window[0]..=window[1];
    let mut out = Vec::new();
    for b in r.clone() {
        for cc in [b - 1, b + 1] {
            for a in [b - 1, b + 1] {
                if r.contains(&cc) && r.contains(&a) {
                    out.push([b, cc, a]);
                }
            }
        }
    }
    out
}

pub fn face_weights(cfg: &RunConfig, window: [i64; 2], z: C64, xi: C64) -> Result<FaceWeightDoc> {
    let t = FaceWeightTable::new(cfg.params(2));
    let entry = |heights: Vec<i64>, v: C64| WeightEntry { heights, re: v.re, im: v.im };
    let bulk = admissible_faces(window)
        .into_iter()
        .map(|h| Ok(entry(h.to_vec(), t.w(h, z, xi)?)))
        .collect::<Result<_>>()?;
    let boundary = admissible_boundary(window)
        .into_iter()
        .map(|[b, cc, a]| Ok(entry(vec![b, cc, a], t.b(b, cc, a, z, xi)?)))
        .collect::<Result<_>>()?;
    Ok(FaceWeightDoc {
        schema: FACE_SCHEMA.into(),
        window,
        params: t.params.clone(),
        z: [z.re, z.im],
        xi: [xi.re, xi.im],
        bulk,
        boundary,
    })
}

/// A complex matrix as rows of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

fn matrix_doc(m: &CMat) -> MatrixDoc {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// The extracted connection matrix of a Weyl group element at `z` and at
/// `z + e_1`, with the closed-form cocycle for comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionDoc {
    pub schema: String,
    pub word: Vec<usize>,
    pub params: ParameterSet,
    #[serde(rename = "H")]
    pub height: usize,
    pub z: Vec<[f64; 2]>,
    pub extracted: MatrixDoc,
    pub extracted_shifted: MatrixDoc,
    pub closed_form: MatrixDoc,
    /// Largest entrywise gap between `extracted` and `closed_form`.
    pub deviation: f64,
    /// Largest entrywise gap between `extracted` and `extracted_shifted`.
    pub periodicity_gap: f64,
    pub cond: f64,
}

/// Default sample point of the connection export: the configured target
/// plus a fixed offset.
pub fn default_connection_point(cfg: &RunConfig) -> Vec<C64> {
    cfg.connection.target.iter().enumerate().map(|(i, &t)| c(t + 0.13 + 0.1 * i as f64, 0.07 - 0.05 * i as f64)).collect()
}

pub fn connection_matrices(cfg: &RunConfig, word: &[usize], z: &[C64]) -> Result<ConnectionDoc> {
    let p = cfg.params(2).with_q(cfg.connection.q);
    let margin = resonance_margin(&p);
    if margin < cfg.connection.resonance_margin {
        return Err(QkzError::NonGeneric(format!("resonance margin {margin:.3} below {}", cfg.connection.resonance_margin)));
    }
    if z.len() != 2 || word.iter().any(|&j| !(1..=2).contains(&j)) {
        return Err(QkzError::InvalidInput("connection export runs at rank 2 with reflections 1 and 2".into()));
    }
    let basis = SolutionBasis::build(&p, cfg.connection.height)?;
    let v = WeylElement::from_word(2, word);
    let e = extract_connection(&basis, &v, z, &cfg.connection.target)?;
    let mut z1 = z.to_vec();
    z1[0] += 1.0;
    let shifted = extract_connection(&basis, &v, &z1, &cfg.connection.target)?;
    let closed = m_cm(&p, &v, z)?;
    Ok(ConnectionDoc {
        schema: CONNECTION_SCHEMA.into(),
        word: word.to_vec(),
        params: p,
        height: cfg.connection.height,
        z: z.iter().map(|w| [w.re, w.im]).collect(),
        extracted: matrix_doc(&e.matrix),
        extracted_shifted: matrix_doc(&shifted.matrix),
        closed_form: matrix_doc(&closed),
        deviation: linalg::max_abs_diff(&e.matrix, &closed),
        periodicity_gap: linalg::max_abs_diff(&e.matrix, &shifted.matrix),
        cond: e.cond.max(shifted.cond),
    })
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    std::fs::write(path, to_json(doc))
        .map_err(|e| QkzError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkz_series::SeriesSolution;

    #[test]
    fn parses_cli_inputs() {
        assert_eq!(parse_epsilon("+-+").unwrap(), vec![1, -1, 1]);
        assert_eq!(parse_epsilon("+1,-1").unwrap(), vec![1, -1]);
        assert!(parse_epsilon("+0").is_err());
        assert_eq!(parse_window("-3:3").unwrap(), [-3, 3]);
        assert!(parse_window("3:-3").is_err());
        assert_eq!(parse_word("121").unwrap(), vec![1, 2, 1]);
        assert_eq!(parse_word("1, 2").unwrap(), vec![1, 2]);
    }

    #[test]
    fn series_export_round_trips_bit_exactly() {
        let doc = series_coefficients(&RunConfig::default(), &[1, -1], 4).unwrap();
        let text = to_json(&doc);
        let back: CoefficientDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let sol = SeriesSolution::from_doc(&back).unwrap();
        assert_eq!(to_json(&sol.to_doc()), text);
    }

    #[test]
    fn face_export_enumerates_admissible_tuples() {
        // Independent count: a face is a closed walk a-b-d-c-a of unit steps.
        let window = [-3i64, 3];
        let mut expected = 0;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for cc in -3i64..=3 {
                    for d in -3i64..=3 {
                        if (a - b).abs() == 1 && (b - d).abs() == 1 && (d - cc).abs() == 1 && (cc - a).abs() == 1 {
                            expected += 1;
                        }
                    }
                }
            }
        }
        let doc = face_weights(&RunConfig::default(), window, c(0.2, 0.1), c(0.3, -0.1)).unwrap();
        assert_eq!(doc.bulk.len(), expected);
        // Boundary triples: two neighbours of b inside the window, chosen independently.
        let nb = |b: i64| [b - 1, b + 1].iter().filter(|h| (-3..=3).contains(*h)).count();
        assert_eq!(doc.boundary.len(), (-3i64..=3).map(|b| nb(b) * nb(b)).sum::<usize>());
        assert!(doc.bulk.iter().all(|e| e.heights.iter().all(|h| (-3..=3).contains(h))));
    }

    #[test]
    fn connection_export_is_periodic() {
        let cfg = RunConfig::default();
        let doc = connection_matrices(&cfg, &[1], &default_connection_point(&cfg)).unwrap();
        assert!(doc.periodicity_gap < 1e-5, "{}", doc.periodicity_gap);
        assert!(doc.deviation < 1e-5, "{}", doc.deviation);
    }
}
