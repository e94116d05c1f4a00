//! Property tests for the algebraic invariants of each module.

mod common;

use germforge::catalog::{adjacency, finite_classes, u_family, SingularityClass};
use germforge::classify::{classify, classify_prenormal};
use germforge::deform::{apply, miniversal_spec, q_discriminant, QFamily};
use germforge::envelope::{envelope_branches, trace_numeric, TraceBox};
use germforge::germ::{criminant_equation, to_prenormal, validate_tangential, MapGerm, PrenormalForm};
use germforge::puiseux::{branches, param_branch_order, BranchField, PlaneBranch};
use germforge::series::{rat, rat_to_f64, Coefficient, Mono, Series2, Truncation, Var, Weighting};
use germforge::tanspace::{codimension, spans_tangential, VectorMono};
use germforge::univariate::{eval_series2, USeries};
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::*;

const N: Truncation = Truncation::TotalDegree(6);

fn coeff() -> impl Strategy<Value = Coefficient> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn nonzero() -> impl Strategy<Value = Coefficient> {
    coeff().prop_filter("nonzero", |c| !c.is_zero())
}

/// Series with `terms` random monomials inside `tr`.
fn arb_series(tr: Truncation, terms: usize) -> impl Strategy<Value = Series2> {
    let monos = tr.monomials();
    prop::collection::vec((0..monos.len(), coeff()), 0..=terms)
        .prop_map(move |v| Series2::from_terms(v.into_iter().map(|(k, c)| (monos[k], c)), tr))
}

/// Series without constant term.
fn arb_ideal(tr: Truncation, terms: usize) -> impl Strategy<Value = Series2> {
    arb_series(tr, terms).prop_map(move |s| s.sub(&Series2::constant(s.constant_term(), tr)).unwrap())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn series_ring_axioms(a in arb_series(N, 8), b in arb_series(N, 8), c in arb_series(N, 8)) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.sub(&a).unwrap(), Series2::zero(N));
        prop_assert_eq!(a.mul(&Series2::one(N)).unwrap(), a);
    }

    #[test]
    fn substitution_composes(
        f in arb_series(N, 6),
        u1 in arb_ideal(N, 4), v1 in arb_ideal(N, 4),
        u2 in arb_ideal(N, 4), v2 in arb_ideal(N, 4),
    ) {
        let lhs = f.compose(&u1, &v1).compose(&u2, &v2);
        let rhs = f.compose(&u1.compose(&u2, &v2), &v1.compose(&u2, &v2));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_derivatives_commute(f in arb_series(N, 10)) {
        prop_assert_eq!(f.diff(Var::Xi).diff(Var::T), f.diff(Var::T).diff(Var::Xi));
    }

    #[test]
    fn weighted_jet_is_multiplicative(a in arb_series(N, 8), b in arb_series(N, 8), wa in 1u32..4, wb in 1u32..4, d in 0u32..8) {
        prop_assume!(wa == 1 || wb == 1 || wa != wb);
        let w = Weighting::new(wa, wb).unwrap();
        let ja = a.weighted_jet(w, d);
        prop_assert_eq!(ja.weighted_jet(w, d), ja.clone());
        let full = a.mul(&b).unwrap().weighted_jet(w, d);
        let cut = ja.mul(&b.weighted_jet(w, d)).unwrap().weighted_jet(w, d);
        prop_assert_eq!(full, cut);
    }
}

const G: Truncation = Truncation::TotalDegree(8);

/// `phi = t^2 r` with `r` carrying a linear part, so the family is a
/// genuine tangential germ.
fn arb_prenormal() -> impl Strategy<Value = PrenormalForm> {
    (nonzero(), coeff(), arb_series(Truncation::TotalDegree(6), 5)).prop_map(|(a, b, r)| {
        let t2 = Series2::monomial(Mono::new(0, 2), Coefficient::one(), G);
        let lin = Series2::from_terms([(Mono::new(1, 0), a), (Mono::new(0, 1), b)], G);
        let r = Series2::from_terms(r.terms().map(|(m, c)| (m, c.clone())), G);
        let phi = t2.mul(&lin.add(&r.mul(&Series2::monomial(Mono::new(0, 1), Coefficient::one(), G)).unwrap()).unwrap()).unwrap();
        PrenormalForm::from_phi(phi).unwrap()
    })
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn prenormal_form_has_double_tangency(pf in arb_prenormal(), seed in any::<u64>()) {
        let g = random_conjugate(&pf.map_germ(), &mut rng(seed));
        let tf = validate_tangential(&g, G.bound() - 1).unwrap();
        let p = to_prenormal(&tf).unwrap();
        prop_assert!(p.phi().terms().all(|(m, _)| m.t >= 2));
        prop_assert!(criminant_equation(&p).g.terms().all(|(m, _)| m.t >= 1));
    }

    #[test]
    fn prenormal_is_idempotent(pf in arb_prenormal()) {
        let tf = validate_tangential(&pf.map_germ(), G.bound() - 1).unwrap();
        let once = to_prenormal(&tf).unwrap();
        let tf2 = validate_tangential(&once.map_germ(), G.bound() - 1).unwrap();
        let twice = to_prenormal(&tf2).unwrap();
        prop_assert_eq!(twice.phi(), once.phi());
    }

    #[test]
    fn target_change_keeps_tangency(pf in arb_prenormal(), seed in any::<u64>()) {
        let (x, y) = random_left(&mut rng(seed), G);
        let g = pf.map_germ().compose_left(&x, &y);
        prop_assert!(validate_tangential(&g, G.bound() - 1).is_ok());
    }
}

/// `prod (t - r_k(xi))` for distinct polynomial roots without constant term.
fn arb_split() -> impl Strategy<Value = (Series2, usize)> {
    prop::collection::btree_set((1u32..=3, -3i64..=3), 1..=3).prop_filter_map("distinct roots", |set| {
        let tr = Truncation::TotalDegree(10);
        let roots: Vec<(u32, i64)> = set.into_iter().filter(|(_, c)| *c != 0).collect();
        if roots.is_empty() {
            return None;
        }
        let mut g = Series2::one(tr);
        for (k, c) in &roots {
            let f = Series2::from_ints(&[(0, 1, 1), (*k, 0, -c)], tr);
            g = g.mul(&f).unwrap();
        }
        Some((g, roots.len()))
    })
}

fn known_zero(s: &USeries<Coefficient>) -> bool {
    s.coeffs().iter().all(Zero::is_zero)
}

/// Exact branch with random leading orders and a term breaking any common
/// exponent content.
fn arb_plane_branch() -> impl Strategy<Value = (PlaneBranch<Coefficient>, bool)> {
    (1usize..=4, 1usize..=4, nonzero(), nonzero(), coeff()).prop_map(|(ox, oy, a, b, c)| {
        let mut x = vec![Coefficient::zero(); 8];
        let mut y = vec![Coefficient::zero(); 8];
        x[ox] = a;
        x[ox + 1] = Coefficient::one();
        y[oy] = b;
        y[oy + 2] = c;
        let immersed = ox.min(oy) == 1;
        (
            PlaneBranch {
                x: USeries::exact(x),
                y: USeries::exact(y),
            },
            immersed,
        )
    })
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn branches_back_substitute((g, count) in arb_split()) {
        let set = branches(&g, 8, BranchField::Real).unwrap();
        prop_assert!(!set.incomplete);
        prop_assert_eq!(set.branches.len(), count);
        prop_assert_eq!(set.total_multiplicity() as usize, count);
        for b in &set.branches {
            let (xi, t) = b.exact_param().unwrap();
            prop_assert!(known_zero(&eval_series2(&g, &xi, &t)));
        }
    }

    #[test]
    fn order_one_one_iff_immersed((b, immersed) in arb_plane_branch()) {
        let o = param_branch_order(&b).unwrap();
        prop_assert_eq!(o == (1, 1), immersed, "{:?}", o);
    }
}

fn arb_class() -> impl Strategy<Value = SingularityClass> {
    let all = finite_classes(2);
    (0..all.len()).prop_map(move |k| all[k])
}

const C: Truncation = Truncation::TotalDegree(12);

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn class_survives_conjugation(class in arb_class(), seed in any::<u64>()) {
        let f = class.normal_form_germ(C).unwrap();
        let g = random_conjugate(&f, &mut rng(seed));
        let rep = classify(&validate_tangential(&g, C.bound() - 1).unwrap(), C.bound()).unwrap();
        prop_assert_eq!(rep.class, class);
    }

    #[test]
    fn cross_ratio_survives_conjugation(n in 2i64..=9, d in 1i64..=3, seed in any::<u64>()) {
        prop_assume!(n != d);
        let f = u_family(&rat(n, d), C);
        let cr = |f: &MapGerm| classify(&validate_tangential(f, C.bound() - 1).unwrap(), 16).unwrap().cross_ratio.unwrap().value;
        let g = random_conjugate(&f, &mut rng(seed));
        prop_assert!((cr(&f) - cr(&g)).norm() < 1e-9);
    }
}

const T: Truncation = Truncation::TotalDegree(14);

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn codimension_grows_with_degree(class in arb_class()) {
        let f = class.normal_form_germ(T).unwrap();
        let a = codimension(&f, 8).unwrap().0;
        let b = codimension(&f, 10).unwrap().0;
        prop_assert!(a <= b);
    }

    #[test]
    fn codimension_ignores_source_scaling(class in arb_class(), a in nonzero(), b in nonzero()) {
        let f = class.normal_form_germ(T).unwrap();
        let u = Series2::monomial(Mono::new(1, 0), a, T);
        let v = Series2::monomial(Mono::new(0, 1), b, T);
        let g = f.compose_right(&u, &v);
        prop_assert_eq!(codimension(&f, 10).unwrap().0, codimension(&g, 10).unwrap().0);
    }

    #[test]
    fn miniversal_directions_span(class in arb_class()) {
        let f = class.normal_form_germ(T).unwrap();
        let dirs: Vec<VectorMono> = class.miniversal_directions().unwrap().into_iter().map(VectorMono::second).collect();
        prop_assert!(spans_tangential(&f, 10, &dirs).unwrap());
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn support_is_traced(pf in arb_prenormal()) {
        let sk = trace_numeric(&pf, &[], TraceBox::square(0.3), 60).unwrap();
        prop_assert!(!sk.polylines.is_empty());
        prop_assert!(sk.polylines[0].iter().all(|p| p.1 == 0.0));
        let rep = envelope_branches(&pf, 6).unwrap();
        prop_assert!(known_zero(&rep.support.y));
    }

    #[test]
    fn traced_branch_matches_series(k in 1i64..=3) {
        // T1 with a scaled smooth envelope branch
        let tr = Truncation::TotalDegree(16);
        let phi = Series2::from_ints(&[(0, 3, k), (0, 4, 1), (1, 3, 2), (2, 2, 1)], tr);
        let pf = PrenormalForm::from_phi(phi).unwrap();
        let rep = envelope_branches(&pf, 12).unwrap();
        prop_assert_eq!(rep.other.len(), 1);
        let plane = rep.other[0].plane.clone().unwrap();
        let xs: Vec<f64> = plane.x.coeffs().iter().map(rat_to_f64).collect();
        let ys: Vec<f64> = plane.y.coeffs().iter().map(rat_to_f64).collect();
        let eval = |c: &[f64], s: f64| c.iter().rev().fold(0.0, |acc, a| acc * s + a);
        let sk = trace_numeric(&pf, &[], TraceBox::square(0.05), 200).unwrap();
        let mut checked = 0;
        for pl in &sk.polylines[1..] {
            for &(x, y) in pl {
                // invert X(s) = x by Newton from s = x / X'(0)
                let dx: Vec<f64> = xs.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect();
                let mut s = x / xs[1];
                for _ in 0..30 {
                    s -= (eval(&xs, s) - x) / eval(&dx, s);
                }
                prop_assert!((eval(&ys, s) - y).abs() < 1e-6, "x={} y={} series {}", x, y, eval(&ys, s));
                checked += 1;
            }
        }
        prop_assert!(checked > 10);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn small_deformations_stay_below(class in arb_class(), ls in prop::collection::vec(-2i64..=2, 4), scale in 1i64..=4) {
        let spec = miniversal_spec(class).unwrap();
        let lambda: Vec<Coefficient> = ls.iter().take(spec.tau()).map(|&l| rat(l, 8 * scale)).collect();
        let pf = PrenormalForm::from_phi(class.normal_form(Truncation::TotalDegree(14)).unwrap()).unwrap();
        let d = apply(&pf, &spec, &lambda).unwrap();
        let got = classify_prenormal(&d, 14).unwrap().class;
        prop_assert!(got == class || adjacency(class, got), "{} -> {}", class, got);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn discriminant_vanishes_iff_repeated_root(ls in prop::collection::vec(-3i64..=3, 1..=3)) {
        let lambda: Vec<Coefficient> = ls.iter().map(|&l| rat(l, 1)).collect();
        let q = QFamily::new(lambda.clone()).poly();
        let repeated = q.gcd(&q.derivative()).degree().is_some_and(|d| d > 0);
        prop_assert_eq!(q_discriminant(&QFamily::new(lambda)).is_zero(), repeated);
    }
}
