//! Property tests of the structural invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qkz::baxter_face::adjacent;
use qkz::elliptic_connection::{k_cm, r_cm};
use qkz::harness::export::{admissible_boundary, admissible_faces, parse_epsilon};
use qkz::harness::{run_suite, RunConfig, Suite};
use qkz::numerics::linalg::{self, c, identity};
use qkz::numerics::special::{qpoch, theta};
use qkz::spin_rep::{ParameterSet, SpinRep};
use qkz::trig_cocycle::TrigCocycle;
use qkz::weylc::{finite_group, w0_word, AffineElement, WeylElement};
use qkz::{C32, C64};

fn complex(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = C64> {
    (re, im).prop_map(|(a, b)| c(a, b))
}

fn params(n: usize) -> impl Strategy<Value = ParameterSet> {
    any::<u64>().prop_map(move |s| ParameterSet::random_near_default(n, &mut ChaCha8Rng::seed_from_u64(s)))
}

fn spectral(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(-0.5..0.5, -0.3..0.3), n)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_symmetric_and_quasi_periodic(x in complex(0.3..2.0, -1.0..1.0), q in 0.05f64..0.6) {
        let t = theta(x, q).unwrap();
        prop_assert!(rel(theta(c(q, 0.0) / x, q).unwrap(), t) < 1e-12);
        prop_assert!(rel(theta(x * q, q).unwrap(), -t / x) < 1e-12);
    }

    #[test]
    fn theta_symmetry_holds_in_single_precision(re in 0.5f32..1.5, im in -0.5f32..0.5, q in 0.1f32..0.4) {
        let x = C32::new(re, im);
        let t = theta(x, q).unwrap();
        let s = theta(C32::new(q, 0.0) / x, q).unwrap();
        prop_assert!((t - s).norm() / t.norm() < 1e-4);
    }

    #[test]
    fn qpoch_splits_into_even_and_odd_factors(x in complex(-0.9..0.9, -0.9..0.9), q in 0.05f64..0.7) {
        let lhs = qpoch(x, q);
        let rhs = qpoch(x, q * q) * qpoch(x * q, q * q);
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn weyl_words_multiply_and_invert(n in 2usize..=4, a in prop::collection::vec(1usize..=4, 0..10), b in prop::collection::vec(1usize..=4, 0..10)) {
        let clip = |w: &[usize]| w.iter().map(|&j| (j - 1) % n + 1).collect::<Vec<_>>();
        let (u, v) = (WeylElement::from_word(n, &clip(&a)), WeylElement::from_word(n, &clip(&b)));
        let uv = u.mul(&v);
        prop_assert!(uv.length() <= u.length() + v.length());
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert_eq!(WeylElement::from_word(n, &u.reduced_word()), u.clone());
        prop_assert_eq!(u.reduced_word().len(), u.length());
        let mut both = clip(&a);
        both.extend(clip(&b));
        prop_assert_eq!(WeylElement::from_word(n, &both), uv);
    }

    #[test]
    fn affine_elements_act_as_a_group(n in 2usize..=3, word in prop::collection::vec(0usize..=3, 0..12), z in spectral(3)) {
        let word: Vec<usize> = word.into_iter().map(|j| j % (n + 1)).collect();
        let z = &z[..n];
        let w = AffineElement::from_word(n, &word);
        let back = w.inverse().act(&w.act(z));
        prop_assert!(back.iter().zip(z).all(|(a, b)| (a - b).norm() < 1e-12));
        let r = AffineElement::from_word(n, &w.reduced_word());
        prop_assert_eq!(r, w);
    }

    #[test]
    fn quadratic_relations_hold_in_the_spin_representation(p in params(3)) {
        let rep = SpinRep::new(p).unwrap();
        let id = identity(rep.dim());
        for j in 0..=3 {
            let k = rep.params.kappa_j(j);
            let t = rep.pi_t(j);
            let q = (t - &id * rep.params.qp(-k)) * (t + &id * rep.params.qp(k));
            prop_assert!(linalg::max_abs(&q) < 1e-11);
            prop_assert!(linalg::max_abs_diff(&(t * rep.pi_t_inv(j)), &id) < 1e-11);
        }
    }

    #[test]
    fn b_basis_is_invertible(p in params(2)) {
        let rep = SpinRep::new(p).unwrap();
        prop_assert!(linalg::cond(&rep.b_matrix().unwrap()) < 1e8);
    }

    #[test]
    fn transport_is_additive(p in params(2), z in spectral(2), lam in prop::collection::vec(-2i64..=2, 2), mu in prop::collection::vec(-2i64..=2, 2)) {
        let cyc = TrigCocycle::new(p).unwrap();
        let shifted: Vec<C64> = z.iter().zip(&lam).map(|(&x, &l)| x - l as f64).collect();
        let sum: Vec<i64> = lam.iter().zip(&mu).map(|(a, b)| a + b).collect();
        let lhs = cyc.transport(&lam, &z).unwrap() * cyc.transport(&mu, &shifted).unwrap();
        let rhs = cyc.transport(&sum, &z).unwrap();
        let scale = linalg::max_abs(&rhs).max(1.0);
        prop_assert!(linalg::max_abs_diff(&lhs, &rhs) / scale < 1e-10);
    }

    #[test]
    fn dynamical_matrices_are_one_periodic(p in params(2), z in complex(-0.5..0.5, -0.3..0.3), xi in complex(-0.5..0.5, -0.3..0.3), k in -2i64..=2) {
        let s = k as f64;
        let (r, r1) = (r_cm(&p, z, xi).unwrap(), r_cm(&p, z + s, xi - s).unwrap());
        let (kk, k1) = (k_cm(&p, z, xi).unwrap(), k_cm(&p, z - s, xi + s).unwrap());
        prop_assert!(linalg::max_abs_diff(&r, &r1) / linalg::max_abs(&r) < 1e-11);
        prop_assert!(linalg::max_abs_diff(&kk, &k1) / linalg::max_abs(&kk) < 1e-11);
    }

    #[test]
    fn face_tables_list_exactly_the_admissible_tuples(lo in -5i64..=0, width in 1i64..=6) {
        let window = [lo, lo + width];
        let inside = |h: i64| (window[0]..=window[1]).contains(&h);
        let faces = admissible_faces(window);
        prop_assert!(faces.iter().all(|&[a, b, cc, d]| adjacent(a, b) && adjacent(a, cc) && adjacent(b, d) && adjacent(cc, d)));
        let brute = (window[0]..=window[1])
            .flat_map(|a| (window[0]..=window[1]).map(move |b| (a, b)))
            .filter(|&(a, b)| adjacent(a, b))
            .map(|(a, b)| [a - 1, a + 1].iter().filter(|&&cc| inside(cc)).map(|&cc| [b - 1, b + 1].iter().filter(|&&d| inside(d) && adjacent(cc, d)).count()).sum::<usize>())
            .sum::<usize>();
        prop_assert_eq!(faces.len(), brute);
        let triples = admissible_boundary(window);
        prop_assert!(triples.iter().all(|&[b, cc, a]| adjacent(b, cc) && adjacent(b, a) && inside(a) && inside(cc)));
    }

    #[test]
    fn epsilon_strings_round_trip(eps in prop::collection::vec(prop::bool::ANY, 1..6)) {
        let signs: Vec<i8> = eps.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let text: String = signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        prop_assert_eq!(parse_epsilon(&text).unwrap(), signs.clone());
        let listed = signs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_epsilon(&listed).unwrap(), signs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reports_are_reproducible(seed in any::<u64>()) {
        let mut cfg = RunConfig { seed, ..RunConfig::default() };
        cfg.samples.trig = 10;
        let a = run_suite(Suite::Trig, &cfg).unwrap().to_json();
        let b = run_suite(Suite::Trig, &cfg).unwrap().to_json();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn configs_round_trip(seed in any::<u64>(), n in 2usize..=4, q in 0.05f64..0.95) {
        let cfg = RunConfig { seed, n, q, ..RunConfig::default() };
        prop_assert_eq!(RunConfig::from_json(&cfg.to_json(), "inline").unwrap(), cfg);
    }
}

#[test]
fn longest_element_is_minus_one() {
    for n in 2..=4 {
        let w0 = WeylElement::from_word(n, &w0_word(n));
        let v: Vec<i64> = (1..=n as i64).collect();
        assert_eq!(w0.act_int(&v), v.iter().map(|x| -x).collect::<Vec<_>>());
        assert_eq!(w0.length(), finite_group(n).iter().map(|w| w.length()).max().unwrap());
    }
}
