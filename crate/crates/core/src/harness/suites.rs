//! The check batteries. Each case draws its samples from its own seeded
//! generator, so results do not depend on scheduling, and the cases of a
//! suite run on scoped threads.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::config::{spectral, RunConfig};
use super::report::{CaseResult, CheckReport, Comparison, InputLog, Status};
use crate::baxter_face::{
    beta_decoupling_residual, boundary_inversion_residual, boundary_tuples, boundary_ybe_residual, crossing_residual,
    crossing_residual_coordinates, face_weight, inversion_residual, k_ba, p_symmetry_residual, r_ba, spin_reversal_residual,
    star_triangle_residual, star_triangle_tuples, u_cm_to_ba, FaceWeightTable, IcePair,
};
use crate::elliptic_connection::{
    dynamical_unitarity_residual, dynamical_ybe_residual, extract_connection, ice_rule_residual, k_cm, k_unitarity_residual,
    left_reflection_residual, m_cm, m_cm_from_coefficients, m_cm_word, r_cm, resonance_margin, right_reflection_residual,
};
use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, identity};
use crate::numerics::special::theta_quadruple_identity_residual;
use crate::principal_series::{b_i, proportionality, IntertwinerSolution, W0Basis};
use crate::qkz_series::{solve_gamma, SolutionBasis};
use crate::qkzb::{
    affine_relations, baxter_system, operator_residual, qkzb_cocycle, relation_residual, transport_e1, ProbeFunction,
    QKZBSystem,
};
use crate::spin_rep::{ParameterSet, SpinRep};
use crate::trig_cocycle::{k_unitarity_residuals, reflection_residuals, unitarity_residual, ybe_residual, TrigCocycle};
use crate::weylc::{
    all_eps, bruhat_leq_finite, eps_index, tau_word, translation_word, w0_word, w_epsilon, AffineElement, WeylElement,
};
use crate::{CMat, CVec, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Hecke,
    Trig,
    Series,
    Connection,
    Baxter,
    Face,
    Qkzb,
    All,
}

impl Suite {
    pub const SINGLE: [Suite; 7] =
        [Suite::Hecke, Suite::Trig, Suite::Series, Suite::Connection, Suite::Baxter, Suite::Face, Suite::Qkzb];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hecke => "hecke",
            Suite::Trig => "trig",
            Suite::Series => "series",
            Suite::Connection => "connection",
            Suite::Baxter => "baxter",
            Suite::Face => "face",
            Suite::Qkzb => "qkzb",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = QkzError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::SINGLE
            .iter()
            .chain(std::iter::once(&Suite::All))
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| QkzError::Config(format!("unknown suite `{s}`")))
    }
}

type Telemetry = Vec<(String, f64)>;
type CaseFn = Box<dyn FnOnce(&mut ChaCha8Rng, &mut InputLog, &mut Telemetry) -> Result<f64> + Send>;

struct Case {
    id: String,
    anchor: &'static str,
    tolerance: f64,
    comparison: Comparison,
    run: CaseFn,
}

fn case<F>(suite: &str, id: &str, anchor: &'static str, tolerance: f64, run: F) -> Case
where
    F: FnOnce(&mut ChaCha8Rng, &mut InputLog, &mut Telemetry) -> Result<f64> + Send + 'static,
{
    Case { id: format!("{suite}.{id}"), anchor, tolerance, comparison: Comparison::Below, run: Box::new(run) }
}

fn case_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    let d = h.finalize();
    ChaCha8Rng::from_seed(d.into())
}

fn execute(case: Case, seed: u64) -> (CaseResult, Telemetry) {
    let mut rng = case_rng(seed, &case.id);
    let mut log = InputLog::default();
    let mut tel = Telemetry::new();
    let outcome = (case.run)(&mut rng, &mut log, &mut tel);
    let samples = log.count();
    let (residual, status, note) = match outcome {
        Ok(r) if r.is_finite() => {
            let pass = match case.comparison {
                Comparison::Below => r < case.tolerance,
                Comparison::AtLeast => r >= case.tolerance,
            };
            (Some(r), if pass { Status::Pass } else { Status::Fail }, None)
        }
        Ok(r) => (None, Status::Fail, Some(format!("non-finite residual {r}"))),
        Err(QkzError::NonGeneric(m)) => (None, Status::Skipped, Some(format!("non-generic: {m}"))),
        Err(e) => (None, Status::Fail, Some(e.to_string())),
    };
    let tel = tel.into_iter().map(|(k, v)| (format!("{}.{k}", case.id), v)).collect();
    let result = CaseResult {
        id: case.id,
        anchor: case.anchor.to_string(),
        inputs_digest: log.finish(),
        samples,
        residual,
        tolerance: case.tolerance,
        comparison: case.comparison,
        status,
        note,
    };
    (result, tel)
}

fn execute_all(cases: Vec<Case>, seed: u64) -> (Vec<CaseResult>, BTreeMap<String, f64>) {
    let outputs: Vec<(CaseResult, Telemetry)> = std::thread::scope(|s| {
        let handles: Vec<_> = cases.into_iter().map(|c| s.spawn(move || execute(c, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("check case panicked")).collect()
    });
    let mut tel = BTreeMap::new();
    let mut results = Vec::with_capacity(outputs.len());
    for (r, t) in outputs {
        results.push(r);
        tel.extend(t);
    }
    (results, tel)
}

/// Runs a suite and assembles its report.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let cases = match suite {
        Suite::All => Suite::SINGLE.iter().flat_map(|&s| build_cases(s, cfg)).collect(),
        s => build_cases(s, cfg),
    };
    let (results, tel) = execute_all(cases, cfg.seed);
    Ok(CheckReport::new(suite.name(), cfg.seed, &cfg.to_json(), results, tel))
}

fn build_cases(suite: Suite, cfg: &RunConfig) -> Vec<Case> {
    match suite {
        Suite::Hecke => hecke_cases(cfg),
        Suite::Trig => trig_cases(cfg),
        Suite::Series => series_cases(cfg),
        Suite::Connection => connection_cases(cfg),
        Suite::Baxter => baxter_cases(cfg),
        Suite::Face => face_cases(cfg),
        Suite::Qkzb => qkzb_cases(cfg),
        Suite::All => unreachable!(),
    }
}

/// A random parameter point around the configured one.
fn random_point(cfg: &RunConfig, n: usize, rng: &mut ChaCha8Rng, log: &mut InputLog) -> ParameterSet {
    let w = cfg.sample_box.parameter_jitter;
    let mut jitter = |z: C64| if w > 0.0 { z + c(rng.gen_range(-w..w), rng.gen_range(-w..w)) } else { z };
    let base = cfg.params(n);
    let mut p = ParameterSet {
        n,
        q: base.q,
        kappa: jitter(base.kappa),
        zeta: jitter(base.zeta),
        zeta_p: jitter(base.zeta_p),
        upsilon: jitter(base.upsilon),
        upsilon_p: jitter(base.upsilon_p),
        xi: jitter(base.xi),
    };
    let [lo, hi] = cfg.sample_box.q_range;
    p.q = rng.gen_range(lo..hi);
    log.real(p.q);
    log.complexes(&[p.kappa, p.zeta, p.zeta_p, p.upsilon, p.upsilon_p, p.xi]);
    p
}

fn random_z(cfg: &RunConfig, n: usize, rng: &mut ChaCha8Rng, log: &mut InputLog) -> Vec<C64> {
    let z: Vec<C64> = (0..n).map(|_| spectral(&cfg.sample_box, rng)).collect();
    log.complexes(&z);
    z
}

fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    linalg::max_abs_diff(a, b) / linalg::max_abs(a).max(linalg::max_abs(b)).max(1.0)
}

fn rel_vec_diff(a: &CVec, b: &CVec) -> f64 {
    linalg::max_abs_vec(&(a - b)) / linalg::max_abs_vec(a).max(linalg::max_abs_vec(b)).max(1.0)
}

/// Runs `f` on `count` samples, returning the worst residual.
fn worst<F>(count: usize, log: &mut InputLog, mut f: F) -> Result<f64>
where
    F: FnMut(&mut InputLog) -> Result<f64>,
{
    let mut w = 0.0f64;
    for _ in 0..count {
        let r = f(log)?;
        log.sample();
        if !r.is_finite() {
            return Ok(f64::INFINITY);
        }
        w = w.max(r);
    }
    Ok(w)
}

// ---------------------------------------------------------------- hecke

fn hecke_cases(cfg: &RunConfig) -> Vec<Case> {
    let n = cfg.n;
    let tol = cfg.tolerances.identity;
    let count = cfg.samples.hecke;
    let s = "hecke";
    let mut out = Vec::new();
    let c1 = cfg.clone();
    out.push(case(s, "quadratic", "quadratic Hecke relation of every affine generator", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let rep = SpinRep::new(random_point(&c1, n, rng, log))?;
            let id = identity(rep.dim());
            Ok((0..=n)
                .map(|j| {
                    let k = rep.params.kappa_j(j);
                    let t = rep.pi_t(j);
                    linalg::max_abs(&((t - &id * rep.params.qp(-k)) * (t + &id * rep.params.qp(k))))
                })
                .fold(0.0, f64::max))
        })
    }));
    let c2 = cfg.clone();
    out.push(case(s, "braid", "affine braid relations of the generators in the spin representation", tol, move |rng, log, _| {
        let rels: Vec<_> = affine_relations(n).into_iter().filter(|r| !r.rhs.is_empty()).collect();
        worst(count, log, |log| {
            let rep = SpinRep::new(random_point(&c2, n, rng, log))?;
            Ok(rels.iter().map(|r| rel_diff(&rep.pi_word(&r.lhs), &rep.pi_word(&r.rhs))).fold(0.0, f64::max))
        })
    }));
    let c3 = cfg.clone();
    out.push(case(s, "y_commute", "the operators Y_i commute", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let rep = SpinRep::new(random_point(&c3, n, rng, log))?;
            let ys: Vec<CMat> = (1..=n).map(|i| rep.y_op(i)).collect();
            let mut w = 0.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    w = w.max(rel_diff(&(&ys[i] * &ys[j]), &(&ys[j] * &ys[i])));
                }
            }
            Ok(w)
        })
    }));
    let c4 = cfg.clone();
    out.push(case(s, "y_spectrum", "Y_i b_eps = q^{-(w_eps gamma)_i} b_eps for every eps", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let rep = SpinRep::new(random_point(&c4, n, rng, log))?;
            let mut w = 0.0f64;
            for eps in all_eps(n) {
                let b = rep.b_basis(&eps)?;
                let point = rep.spectral_point(&eps);
                for i in 1..=n {
                    let lhs = rep.y_op(i) * &b;
                    w = w.max(rel_vec_diff(&lhs, &(&b * rep.params.qp(-point[i - 1]))));
                }
            }
            Ok(w)
        })
    }));
    let c5 = cfg.clone();
    let cross = cfg.samples.hecke_intertwiner.min(count);
    out.push(case(
        s,
        "b_triangular",
        "b_eps is supported on the Bruhat interval below w_eps with diagonal coefficient N_eps, and equals the intertwiner construction",
        tol,
        move |rng, log, tel| {
            let mut k = 0usize;
            let mut worst_cross = 0.0f64;
            let r = worst(count, log, |log| {
                let p = random_point(&c5, n, rng, log);
                let rep = SpinRep::new(p.clone())?;
                let mut w = 0.0f64;
                for eps in all_eps(n) {
                    let b = rep.b_basis(&eps)?;
                    let we = w_epsilon(&eps);
                    let scale = linalg::max_abs_vec(&b).max(1.0);
                    for other in all_eps(n) {
                        if !bruhat_leq_finite(&w_epsilon(&other), &we) {
                            w = w.max(b[eps_index(&other)].norm() / scale);
                        }
                    }
                    w = w.max((b[eps_index(&eps)] - rep.n_eps(&eps)?).norm() / scale);
                }
                if k < cross && n <= 3 {
                    let basis = W0Basis::new(n);
                    for eps in all_eps(n) {
                        let d = rel_vec_diff(&b_i(&p, &basis, &w_epsilon(&eps))?, &rep.b_basis(&eps)?);
                        worst_cross = worst_cross.max(d);
                    }
                }
                k += 1;
                Ok(w.max(worst_cross))
            })?;
            tel.push(("intertwiner_cross_check_points".into(), cross.min(k) as f64));
            Ok(r)
        },
    ));
    out
}

// ---------------------------------------------------------------- trig

fn trig_cases(cfg: &RunConfig) -> Vec<Case> {
    let n = cfg.n;
    let tol = cfg.tolerances.identity;
    let count = cfg.samples.trig;
    let s = "trig";
    let mut out = Vec::new();
    let c1 = cfg.clone();
    out.push(case(s, "ybe", "quantum Yang-Baxter equation of the trigonometric R-matrix", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let p = random_point(&c1, 3, rng, log);
            let z = random_z(&c1, 3, rng, log);
            ybe_residual(&p, [z[0], z[1], z[2]])
        })
    }));
    let c2 = cfg.clone();
    out.push(case(s, "reflection", "left and right reflection equations of the trigonometric K-matrices", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let p = random_point(&c2, 2, rng, log);
            let z = random_z(&c2, 2, rng, log);
            let (l, r) = reflection_residuals(&p, z[0], z[1])?;
            Ok(l.max(r))
        })
    }));
    let c3 = cfg.clone();
    out.push(case(s, "unitarity", "unitarity of the trigonometric R- and K-matrices", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let p = random_point(&c3, 2, rng, log);
            let z = random_z(&c3, 1, rng, log)[0];
            let (kr, kl) = k_unitarity_residuals(&p, z)?;
            Ok(unitarity_residual(&p, z)?.max(kr).max(kl))
        })
    }));
    let c4 = cfg.clone();
    out.push(case(s, "cocycle_braid", "quadratic and braid relations of the boundary qKZ cocycle", tol, move |rng, log, _| {
        let rels = affine_relations(n);
        worst(count, log, |log| {
            let cyc = TrigCocycle::new(random_point(&c4, n, rng, log))?;
            let z = random_z(&c4, n, rng, log);
            let mut w = 0.0f64;
            for r in &rels {
                let rhs = if r.rhs.is_empty() { identity(cyc.rep.dim()) } else { cyc.word_value(&r.rhs, &z)? };
                w = w.max(rel_diff(&cyc.word_value(&r.lhs, &z)?, &rhs));
            }
            Ok(w)
        })
    }));
    let c5 = cfg.clone();
    out.push(case(
        s,
        "transport",
        "transport operators compose additively and match the explicit R K R K product",
        tol,
        move |rng, log, _| {
            worst(count, log, |log| {
                let cyc = TrigCocycle::new(random_point(&c5, n, rng, log))?;
                let z = random_z(&c5, n, rng, log);
                let mut zm = z.clone();
                zm[0] -= 1.0;
                let mut lam = vec![0i64; n];
                lam[0] = 1;
                lam[1] = 1;
                let lhs = cyc.transport_e(1, &z)? * cyc.transport_e(2, &zm)?;
                let mut w = rel_diff(&lhs, &cyc.transport(&lam, &z)?);
                for i in 1..=n {
                    let word: Vec<usize> = tau_word(n, i).into_iter().rev().collect();
                    w = w.max(rel_diff(&cyc.transport_minus_e_explicit(i, &z)?, &cyc.word_value(&word, &z)?));
                }
                Ok(w)
            })
        },
    ));
    out
}

// ---------------------------------------------------------------- series

fn series_cases(cfg: &RunConfig) -> Vec<Case> {
    let s = "series";
    let mut out = Vec::new();
    let c1 = cfg.clone();
    out.push(case(
        s,
        "consistency",
        "the overdetermined recursion for the series coefficients is consistent at every height",
        cfg.tolerances.series_consistency,
        move |_, log, tel| {
            let rep = SpinRep::new(c1.params(c1.n))?;
            let mut w = 0.0f64;
            for eps in all_eps(c1.n) {
                log.complexes(&rep.spectral_point(&eps));
                let sol = solve_gamma(&rep, &eps, c1.series.height)?;
                w = sol.residuals.iter().copied().fold(w, f64::max);
                log.sample();
            }
            tel.push(("height".into(), c1.series.height as f64));
            Ok(w)
        },
    ));
    let c2 = cfg.clone();
    let transport = Arc::new(std::sync::OnceLock::<Result<(f64, f64)>>::new());
    let t1 = transport.clone();
    out.push(case(
        s,
        "transport",
        "the truncated series solves every first-order transport equation deep in the negative chamber",
        cfg.tolerances.series_transport,
        move |_, log, tel| {
            let (r, r2) = shared(t1.get_or_init(|| transport_residuals(&c2)))?;
            log_transport_inputs(&c2, log);
            tel.push(("residual_at_height_plus_2".into(), r2));
            Ok(r)
        },
    ));
    let c3 = cfg.clone();
    let t2 = transport.clone();
    let mut decay = case(
        s,
        "transport_decay",
        "the transport residual shrinks when the truncation grows by two",
        1.0 / cfg.tolerances.series_decay,
        move |_, log, _| {
            let (r, r2) = shared(t2.get_or_init(|| transport_residuals(&c3)))?;
            log_transport_inputs(&c3, log);
            Ok(r2 / r)
        },
    );
    decay.comparison = Comparison::Below;
    out.push(decay);
    let c4 = cfg.clone();
    out.push(case(
        s,
        "cross_route",
        "solutions built in the spin representation and through intertwiners of the principal series are proportional with a z-independent ratio",
        cfg.tolerances.cross_route,
        move |rng, log, tel| {
            let p = c4.params(2);
            let rep = SpinRep::new(p.clone())?;
            let h = c4.series.cross_route_height;
            let target = &c4.connection.target;
            let zs: Vec<Vec<C64>> = (0..c4.series.cross_route_points)
                .map(|_| {
                    let z: Vec<C64> = target
                        .iter()
                        .map(|&t| c(t + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)))
                        .collect();
                    log.complexes(&z);
                    log.sample();
                    z
                })
                .collect();
            let mut w = 0.0f64;
            let mut off_one = 0.0f64;
            for eps in all_eps(2) {
                let spin = solve_gamma(&rep, &eps, h)?;
                let other = IntertwinerSolution::build(&p, &eps, h)?;
                let mut first: Option<C64> = None;
                for z in &zs {
                    let (lam, misfit) = proportionality(&other.eval(z)?, &spin.eval(z)?);
                    w = w.max(misfit);
                    let l0 = *first.get_or_insert(lam);
                    w = w.max((lam - l0).norm() / l0.norm());
                    off_one = off_one.max((lam - 1.0).norm());
                }
            }
            tel.push(("max_abs_ratio_minus_one".into(), off_one));
            Ok(w)
        },
    ));
    out
}

/// Re-raises a cached outcome shared between cases.
fn shared<T: Clone>(r: &Result<T>) -> Result<T> {
    match r {
        Ok(v) => Ok(v.clone()),
        Err(QkzError::NonGeneric(m)) => Err(QkzError::NonGeneric(m.clone())),
        Err(e) => Err(QkzError::Singular(e.to_string())),
    }
}

fn transport_point(cfg: &RunConfig, n: usize) -> Vec<C64> {
    // (alpha_i, z) = depth for every simple root; alpha_n = e_n.
    let d = cfg.series.transport_depth;
    let mut re = vec![0.0; n];
    re[n - 1] = d;
    for i in (0..n - 1).rev() {
        re[i] = re[i + 1] + d;
    }
    re.iter().enumerate().map(|(i, &x)| c(x, 0.13 - 0.08 * i as f64)).collect()
}

fn log_transport_inputs(cfg: &RunConfig, log: &mut InputLog) {
    log.complexes(&transport_point(cfg, 2));
    log.real(cfg.series.transport_q);
    log.int(cfg.series.height as i64);
    log.sample();
}

/// Worst relative residual of `C^{tau(e_i)}(z) Phi(z - e_i) = Phi(z)` over all
/// `eps` and `i` at truncations `H` and `H + 2`, at rank 2.
fn transport_residuals(cfg: &RunConfig) -> Result<(f64, f64)> {
    let n = 2;
    let rep = SpinRep::new(cfg.params(n).with_q(cfg.series.transport_q))?;
    let cyc = TrigCocycle { rep: rep.clone() };
    let z = transport_point(cfg, n);
    let res = |h: usize| -> Result<f64> {
        let mut w = 0.0f64;
        for eps in all_eps(n) {
            let sol = solve_gamma(&rep, &eps, h)?;
            let rhs = sol.eval(&z)?;
            for i in 1..=n {
                let mut zm = z.clone();
                zm[i - 1] -= 1.0;
                let lhs = cyc.transport_e(i, &z)? * sol.eval(&zm)?;
                w = w.max(linalg::max_abs_vec(&(lhs - &rhs)) / linalg::max_abs_vec(&rhs));
            }
        }
        Ok(w)
    };
    Ok((res(cfg.series.height)?, res(cfg.series.height + 2)?))
}

// ---------------------------------------------------------------- connection

fn connection_params(cfg: &RunConfig) -> ParameterSet {
    cfg.params(2).with_q(cfg.connection.q)
}

fn connection_cases(cfg: &RunConfig) -> Vec<Case> {
    let s = "connection";
    let tol = cfg.tolerances.connection;
    let p = connection_params(cfg);
    let margin = resonance_margin(&p);
    let generic = if margin < cfg.connection.resonance_margin {
        Err(format!("resonance margin {margin:.3} below {}", cfg.connection.resonance_margin))
    } else {
        Ok(())
    };
    let basis = Arc::new(std::sync::OnceLock::<std::result::Result<Arc<SolutionBasis>, String>>::new());
    let get_basis = {
        let (basis, p, h, generic) = (basis.clone(), p.clone(), cfg.connection.height, generic.clone());
        move || -> Result<Arc<SolutionBasis>> {
            generic.clone().map_err(QkzError::NonGeneric)?;
            basis
                .get_or_init(|| SolutionBasis::build(&p, h).map(Arc::new).map_err(|e| e.to_string()))
                .clone()
                .map_err(QkzError::Singular)
        }
    };
    let points = |cfg: &RunConfig, rng: &mut ChaCha8Rng, log: &mut InputLog| -> Vec<Vec<C64>> {
        (0..cfg.connection.points)
            .map(|_| {
                let z: Vec<C64> = cfg
                    .connection
                    .target
                    .iter()
                    .map(|&t| c(t + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)))
                    .collect();
                log.complexes(&z);
                log.sample();
                z
            })
            .collect()
    };
    let mut out = Vec::new();
    for i in 1..=2usize {
        let (cf, gb, p) = (cfg.clone(), get_basis.clone(), p.clone());
        out.push(case(
            s,
            &format!("extract_s{i}"),
            "numerically extracted connection matrix equals the theta-function cocycle M_cm entrywise",
            tol,
            move |rng, log, tel| {
                let basis = gb()?;
                let v = WeylElement::simple(2, i);
                let mut w = 0.0f64;
                let mut cond = 0.0f64;
                for z in points(&cf, rng, log) {
                    let e = extract_connection(&basis, &v, &z, &cf.connection.target)?;
                    cond = cond.max(e.cond);
                    w = w.max(linalg::max_abs_diff(&e.matrix, &m_cm(&p, &v, &z)?));
                }
                tel.push(("max_condition_number".into(), cond));
                tel.push(("resonance_margin".into(), resonance_margin(&p)));
                Ok(w)
            },
        ));
    }
    let (cf, gb) = (cfg.clone(), get_basis.clone());
    out.push(case(s, "periodicity", "extracted connection matrices are one-periodic in each z_k", tol, move |rng, log, _| {
        let basis = gb()?;
        let mut w = 0.0f64;
        for z in points(&cf, rng, log) {
            for i in 1..=2 {
                let v = WeylElement::simple(2, i);
                let base = extract_connection(&basis, &v, &z, &cf.connection.target)?.matrix;
                for k in 0..2 {
                    let mut zs = z.clone();
                    zs[k] += 1.0;
                    let moved = extract_connection(&basis, &v, &zs, &cf.connection.target)?.matrix;
                    w = w.max(linalg::max_abs_diff(&base, &moved));
                }
            }
        }
        Ok(w)
    }));
    let (cf, p2, g1) = (cfg.clone(), p.clone(), generic.clone());
    let count = cfg.connection.points * 10;
    out.push(case(
        s,
        "cocycle",
        "M_cm satisfies the cocycle law and is independent of the reduced word",
        cfg.tolerances.cocycle,
        move |rng, log, _| {
            g1.clone().map_err(QkzError::NonGeneric)?;
            let rand_elem = |rng: &mut ChaCha8Rng| {
                let len = rng.gen_range(1..=6);
                let word: Vec<usize> = (0..len).map(|_| rng.gen_range(1..=2)).collect();
                WeylElement::from_word(2, &word)
            };
            worst(count, log, |log| {
                let z = random_z(&cf, 2, rng, log);
                let (u, v) = (rand_elem(rng), rand_elem(rng));
                log.int(eps_index(u.signs()) as i64);
                let lhs = m_cm(&p2, &u.mul(&v), &z)?;
                let rhs = m_cm(&p2, &u, &z)? * m_cm(&p2, &v, &u.inverse().act(&z))?;
                let mut r = rel_diff(&lhs, &rhs);
                let other: Vec<usize> = vec![2, 1, 2, 1];
                r = r.max(rel_diff(&m_cm_word(&p2, &w0_word(2), &z)?, &m_cm_word(&p2, &other, &z)?));
                Ok(r)
            })
        },
    ));
    let (cf, p3) = (cfg.clone(), p.clone());
    out.push(case(
        s,
        "coefficients",
        "the general connection coefficients assemble into M_cm",
        cfg.tolerances.cocycle,
        move |rng, log, _| {
            generic.map_err(QkzError::NonGeneric)?;
            worst(cf.connection.points, log, |log| {
                let z = random_z(&cf, 2, rng, log);
                let mut w = 0.0f64;
                for i in 1..=2 {
                    w = w.max(rel_diff(&m_cm_from_coefficients(&p3, i, &z)?, &m_cm(&p3, &WeylElement::simple(2, i), &z)?));
                }
                Ok(w)
            })
        },
    ));
    out
}

// ---------------------------------------------------------------- baxter (dynamical)

fn baxter_cases(cfg: &RunConfig) -> Vec<Case> {
    let s = "baxter";
    let tol = cfg.tolerances.identity;
    let count = cfg.samples.dynamical;
    type Check = fn(&ParameterSet, &[C64], C64) -> Result<f64>;
    let checks: Vec<(&str, &'static str, Check)> = vec![
        ("ybe_cm", "dynamical quantum Yang-Baxter equation of R_cm", |p, z, xi| {
            dynamical_ybe_residual(&|x, s| r_cm(p, x, s), p.kappa, [z[0], z[1], z[2]], xi)
        }),
        ("ybe_ba", "dynamical quantum Yang-Baxter equation of R_Ba", |p, z, xi| {
            dynamical_ybe_residual(&|x, s| r_ba(p, x, s), p.kappa, [z[0], z[1], z[2]], xi)
        }),
        ("reflection_cm", "right dynamical reflection equation of K_cm", |p, z, xi| {
            right_reflection_residual(&|x, s| r_cm(p, x, s), &|x, s| k_cm(p, x, s), p.kappa, z[0], z[1], xi)
        }),
        ("reflection_ba", "right dynamical reflection equation of K_Ba", |p, z, xi| {
            right_reflection_residual(&|x, s| r_ba(p, x, s), &|x, s| k_ba(p, x, s), p.kappa, z[0], z[1], xi)
        }),
        ("left_reflection_ba", "K_Ba(z, -xi) solves the left dynamical reflection equation", |p, z, xi| {
            left_reflection_residual(&|x, s| r_ba(p, x, s), &|x, s: C64| k_ba(p, x, -s), p.kappa, z[0], z[1], xi)
        }),
        ("unitarity", "unitarity of R_cm, K_cm, R_Ba and K_Ba", |p, z, xi| {
            let a = dynamical_unitarity_residual(&|x, s| r_cm(p, x, s), z[0], xi)?;
            let b = dynamical_unitarity_residual(&|x, s| r_ba(p, x, s), z[0], xi)?;
            let c_ = k_unitarity_residual(&|x, s| k_cm(p, x, s), z[0], xi)?;
            let d = k_unitarity_residual(&|x, s| k_ba(p, x, s), z[0], xi)?;
            Ok(a.max(b).max(c_).max(d))
        }),
        ("ice_rule", "R_cm and R_Ba commute with h_1 + h_2", |p, z, xi| {
            Ok(ice_rule_residual(&r_cm(p, z[0], xi)?).max(ice_rule_residual(&r_ba(p, z[0], xi)?)))
        }),
        ("periodicity", "R_cm and K_cm are one-periodic in z and xi", |p, z, xi| {
            let (r, k) = (r_cm(p, z[0], xi)?, k_cm(p, z[0], xi)?);
            let mut w = 0.0f64;
            for (dz, dx) in [(1.0, 0.0), (0.0, 1.0)] {
                w = w.max(rel_diff(&r, &r_cm(p, z[0] + dz, xi + dx)?));
                w = w.max(rel_diff(&k, &k_cm(p, z[0] + dz, xi + dx)?));
            }
            Ok(w)
        }),
        ("gauge", "gauge transformations preserve the dynamical Yang-Baxter and reflection equations and carry the connection pair to Baxter's", |p, z, xi| {
            let pc = p.clone();
            let probes = [c(0.3, 0.1), c(-0.7, 0.2)];
            let to_ba = IcePair::connection(p).gauge_i(Arc::new(move |x| u_cm_to_ba(&pc, x)), &probes)?.gauge_ii(p);
            let ba = IcePair::baxter(p);
            let mut w = rel_diff(&to_ba.r(z[0], xi)?, &ba.r(z[0], xi)?).max(rel_diff(&to_ba.k(z[0], xi)?, &ba.k(z[0], xi)?));
            // A second, generic gauge u(xi) = q^{c xi} with u(xi) u(-xi) = 1.
            let rate = z[2];
            let pq = p.clone();
            let g = IcePair::connection(p).gauge_i(Arc::new(move |x| Ok(pq.qp(rate * x))), &probes)?.gauge_ii(p);
            w = w.max(dynamical_ybe_residual(&|x, s| g.r(x, s), p.kappa, [z[0], z[1], z[2]], xi)?);
            w = w.max(right_reflection_residual(&|x, s| g.r(x, s), &|x, s| g.k(x, s), p.kappa, z[0], z[1], xi)?);
            Ok(w)
        }),
        ("crossing", "crossing symmetry of R_Ba in matrix and coordinate form", |p, z, xi| {
            Ok(crossing_residual(p, z[0], xi)?.max(crossing_residual_coordinates(p, z[0], xi)?))
        }),
        ("spin_reversal", "spin-reversal and P-symmetry of R_Ba", |p, z, xi| {
            Ok(spin_reversal_residual(p, z[0], xi)?.max(p_symmetry_residual(p, z[0], xi)?))
        }),
        ("beta_decoupling", "the off-diagonal coefficient of K_Ba factorizes into a xi-part over a z-part", |p, z, xi| {
            beta_decoupling_residual(p, z[0], xi)
        }),
        ("theta_identity", "four-term theta function identity", |p, z, xi| {
            let e = |w: C64| p.qp(w);
            theta_quadruple_identity_residual(e(z[0]), e(z[1]), e(z[2]), e(xi), p.q)
        }),
    ];
    checks
        .into_iter()
        .map(|(id, anchor, f)| {
            let cf = cfg.clone();
            case(s, id, anchor, tol, move |rng, log, _| {
                worst(count, log, |log| {
                    let p = random_point(&cf, 2, rng, log);
                    let z = random_z(&cf, 3, rng, log);
                    let xi = spectral(&cf.sample_box, rng);
                    log.complex(xi);
                    f(&p, &z, xi)
                })
            })
        })
        .collect()
}

// ---------------------------------------------------------------- face

fn face_cases(cfg: &RunConfig) -> Vec<Case> {
    let s = "face";
    let tol = cfg.tolerances.identity;
    let count = cfg.samples.face_points;
    let window = cfg.face_window[0]..=cfg.face_window[1];
    let mut out = Vec::new();
    let (cf, win) = (cfg.clone(), window.clone());
    out.push(case(s, "star_triangle", "star-triangle relation of the eight-vertex SOS weights over all admissible height tuples", tol, move |rng, log, tel| {
        let tuples = star_triangle_tuples(win.clone());
        tel.push(("tuples".into(), tuples.len() as f64));
        worst(count, log, |log| {
            let t = FaceWeightTable::new(cf.params(2));
            let z = random_z(&cf, 3, rng, log);
            let xi = spectral(&cf.sample_box, rng);
            log.complex(xi);
            let w = |h: [i64; 4], z: C64| t.w(h, z, xi);
            tuples.iter().try_fold(0.0f64, |acc, &h| Ok(acc.max(star_triangle_residual(&w, h, [z[0], z[1], z[2]])?)))
        })
    }));
    let (cf, win) = (cfg.clone(), window.clone());
    out.push(case(s, "boundary_ybe", "boundary Yang-Baxter equation of the SOS bulk and boundary weights over all admissible height tuples", tol, move |rng, log, tel| {
        let tuples = boundary_tuples(win.clone());
        tel.push(("tuples".into(), tuples.len() as f64));
        worst(count, log, |log| {
            let t = FaceWeightTable::new(cf.params(2));
            let z = random_z(&cf, 2, rng, log);
            let xi = spectral(&cf.sample_box, rng);
            log.complex(xi);
            let w = |h: [i64; 4], z: C64| t.w(h, z, xi);
            let b = |b: i64, cc: i64, a: i64, z: C64| t.b(b, cc, a, z, xi);
            tuples.iter().try_fold(0.0f64, |acc, &h| Ok(acc.max(boundary_ybe_residual(&w, &b, h, z[0], z[1])?)))
        })
    }));
    let (cf, win) = (cfg.clone(), window.clone());
    out.push(case(s, "inversion", "bulk and boundary inversion relations of the face weights", tol, move |rng, log, _| {
        worst(count, log, |log| {
            let p = cf.params(2);
            let t = FaceWeightTable::new(p.clone());
            let z = random_z(&cf, 1, rng, log)[0];
            let xi = spectral(&cf.sample_box, rng);
            log.complex(xi);
            let wb = |h: [i64; 4], z: C64| face_weight(&|z, x| r_ba(&p, z, x), p.kappa, h, z, xi);
            let b = |b: i64, cc: i64, a: i64, z: C64| t.b(b, cc, a, z, xi);
            let mut w = 0.0f64;
            for a in win.clone() {
                for (bb, cc, d) in [(a + 1, a, a + 1), (a - 1, a, a + 1), (a + 1, a + 2, a + 1), (a - 1, a - 2, a - 1)] {
                    w = w.max(inversion_residual(&wb, a, bb, cc, d, z)?);
                }
                for (aa, cc) in [(a + 1, a + 1), (a - 1, a + 1), (a + 1, a - 1), (a - 1, a - 1)] {
                    w = w.max(boundary_inversion_residual(&b, aa, a, cc, z)?);
                }
            }
            Ok(w)
        })
    }));
    out
}

// ---------------------------------------------------------------- qkzb

fn qkzb_cases(cfg: &RunConfig) -> Vec<Case> {
    let s = "qkzb";
    let n = cfg.n;
    let sys = baxter_system(&cfg.couplings(), n).map_err(|e| e.to_string());
    let get = {
        let sys = sys.clone();
        move || -> Result<QKZBSystem> { sys.clone().map_err(QkzError::NonGeneric) }
    };
    let probes = |cfg: &RunConfig, rng: &mut ChaCha8Rng| -> Vec<ProbeFunction> {
        (0..cfg.samples.qkzb_probes).map(|_| ProbeFunction::random(cfg.n, cfg.q, rng)).collect()
    };
    let point = |cfg: &RunConfig, rng: &mut ChaCha8Rng, log: &mut InputLog| -> (Vec<C64>, C64) {
        let z = random_z(cfg, cfg.n, rng, log);
        let xi = cfg.xi + spectral(&cfg.sample_box, rng) * 0.2;
        log.complex(xi);
        (z, xi)
    };
    let mut out = Vec::new();
    let (cf, g) = (cfg.clone(), get.clone());
    out.push(case(s, "left_reflection", "the left K-matrix solves the left dynamical reflection equation and is unitary", cfg.tolerances.identity, move |rng, log, _| {
        let sys = g()?;
        worst(cf.samples.qkzb_points * 10, log, |log| {
            let z = random_z(&cf, 2, rng, log);
            let xi = spectral(&cf.sample_box, rng);
            log.complex(xi);
            crate::qkzb::left_k_residual(&sys, z[0], z[1], xi)
        })
    }));
    let (cf, g) = (cfg.clone(), get.clone());
    out.push(case(s, "braid", "the difference-operator cocycle satisfies the quadratic and braid relations of the affine Weyl group on probe functions", cfg.tolerances.qkzb, move |rng, log, tel| {
        let sys = g()?;
        let ps = probes(&cf, rng);
        let rels = affine_relations(cf.n);
        tel.push(("probes".into(), ps.len() as f64));
        worst(cf.samples.qkzb_points, log, |log| {
            let (z, xi) = point(&cf, rng, log);
            rels.iter().try_fold(0.0f64, |acc, r| Ok(acc.max(relation_residual(&sys, r, &z, xi, &ps)?)))
        })
    }));
    let (cf, g) = (cfg.clone(), get.clone());
    out.push(case(s, "two_route", "the explicit first transport operator equals the cocycle value along tau(-e_1)", cfg.tolerances.identity, move |rng, log, _| {
        let sys = g()?;
        let ps = probes(&cf, rng);
        let mut lam = vec![0i64; cf.n];
        lam[0] = -1;
        let tau = AffineElement::translation(&lam);
        worst(cf.samples.qkzb_points, log, |log| {
            let (z, xi) = point(&cf, rng, log);
            let mut z1 = z.clone();
            z1[0] += 1.0;
            let op = qkzb_cocycle(&tau, &z, &sys);
            ps.iter().try_fold(0.0f64, |acc, p| {
                let a = op.apply(p.at(&z1))(xi)?;
                let b = transport_e1(&z, &sys, &p.as_fn())(xi)?;
                Ok(acc.max(rel_vec_diff(&a, &b)))
            })
        })
    }));
    let (cf, g) = (cfg.clone(), get.clone());
    out.push(case(s, "compatibility", "M^{tau(e_1)}(z) M^{tau(e_2)}(z - e_1) = M^{tau(e_1 + e_2)}(z) on probe functions", cfg.tolerances.qkzb, move |rng, log, _| {
        let sys = g()?;
        let ps = probes(&cf, rng);
        let n = cf.n;
        let mut lam = vec![0i64; n];
        lam[0] = 1;
        lam[1] = 1;
        worst(cf.samples.qkzb_points, log, |log| {
            let (z, xi) = point(&cf, rng, log);
            let mut zm = z.clone();
            zm[0] -= 1.0;
            let lhs = sys.cocycle_word(&tau_word(n, 1), &z).compose(&sys.cocycle_word(&tau_word(n, 2), &zm));
            let rhs = sys.cocycle_word(&translation_word(&lam), &z);
            ps.iter().try_fold(0.0f64, |acc, p| Ok(acc.max(operator_residual(&lhs, &rhs, &p.at(&z), xi)?)))
        })
    }));
    let (cf, g) = (cfg.clone(), get);
    let mut sens = case(s, "sensitivity", "perturbing the right K-matrix by 1e-3 breaks a relation of the cocycle", cfg.tolerances.sensitivity, move |rng, log, _| {
        let sys = g()?;
        let k = Arc::new(sys.clone());
        let bad = sys.with_k_right(Arc::new(move |z, xi| {
            let mut m = k.k_right(z, xi)?;
            m[(0, 1)] += c(1e-3, 0.0);
            Ok(m)
        }));
        let ps: Vec<ProbeFunction> = probes(&cf, rng).into_iter().take(5).collect();
        let (z, xi) = point(&cf, rng, log);
        log.sample();
        affine_relations(cf.n).iter().try_fold(0.0f64, |acc, r| Ok(acc.max(relation_residual(&bad, r, &z, xi, &ps)?)))
    });
    sens.comparison = Comparison::AtLeast;
    out.push(sens);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.samples.hecke = 5;
        cfg.samples.hecke_intertwiner = 1;
        cfg.samples.trig = 5;
        cfg.samples.dynamical = 5;
        cfg.samples.face_points = 1;
        cfg.samples.qkzb_probes = 3;
        cfg.samples.qkzb_points = 1;
        cfg.face_window = [-1, 1];
        cfg
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::SINGLE {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in [Suite::Hecke, Suite::Trig, Suite::Baxter, Suite::Face, Suite::Qkzb] {
            let r = run_suite(s, &small()).unwrap();
            assert_eq!(r.exit_code(), 0, "{}", r.to_json());
        }
    }

    #[test]
    fn resonant_connection_point_is_skipped() {
        let mut cfg = small();
        cfg.xi = c(0.5, 0.0);
        let r = run_suite(Suite::Connection, &cfg).unwrap();
        assert_eq!(r.exit_code(), 3, "{}", r.to_json());
        assert!(r.cases.iter().all(|c| c.status == Status::Skipped));
    }

    #[test]
    fn case_seeds_are_independent_of_order() {
        let a: u64 = case_rng(3, "x.y").gen();
        let b: u64 = case_rng(3, "x.y").gen();
        let d: u64 = case_rng(3, "x.z").gen();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }
}
