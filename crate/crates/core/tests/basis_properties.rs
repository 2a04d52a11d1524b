mod common;

use common::{corpus, phi_space, running, samples};
use mdspline::basis::oracle::integral_recurrence_oracle;
use mdspline::{BSplineBasis, Side, SplineSpace};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn all_spaces() -> Vec<SplineSpace> {
    let mut v = vec![running(), phi_space()];
    v.extend(corpus(60));
    v
}

#[test]
fn transition_basis_matches_integral_recurrence() {
    for (n, space) in all_spaces().iter().enumerate() {
        let fast = BSplineBasis::new(space).unwrap();
        let oracle = integral_recurrence_oracle(space).unwrap();
        assert_eq!(fast.len(), oracle.len());
        for x in samples(space.a(), space.b(), 500) {
            let (u, v) = (fast.eval_all(x).unwrap(), oracle.eval_all(x).unwrap());
            let dev = common::max_dev(&u, &v);
            assert!(dev <= 1e-10, "space #{n} at x = {x}: deviation {dev}");
        }
    }
}

#[test]
fn unity_positivity_and_support() {
    for space in all_spaces() {
        let basis = BSplineBasis::new(&space).unwrap();
        for x in samples(space.a(), space.b(), 400) {
            let v = basis.eval_all(x).unwrap();
            assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for (i, &ni) in v.iter().enumerate() {
                let (s, t) = basis.support(i);
                if x < s || x > t {
                    assert!(ni.abs() <= 1e-12, "N_{i}({x}) = {ni} outside [{s}, {t}]");
                } else {
                    assert!(ni >= -1e-12, "N_{i}({x}) = {ni}");
                }
                if x > s && x < t {
                    assert!(ni > 0.0, "N_{i}({x}) = {ni} inside ({s}, {t})");
                }
            }
        }
    }
}

/// Derivative of order `rho` at an end of a piece, divided by its largest
/// possible size for unit Bernstein coefficients.
fn scaled_endpoint_derivative(basis: &BSplineBasis, i: usize, j: usize, side: Side, rho: usize) -> f64 {
    let piece = basis.function(i).piece(j);
    let d = piece.degree();
    let falling: f64 = (d + 1 - rho..=d).map(|k| k as f64).product();
    piece.endpoint_derivative(side, rho).unwrap() * piece.width().powi(rho as i32) / falling
}

#[test]
fn endpoint_vanishing_orders() {
    for space in all_spaces() {
        let basis = BSplineBasis::new(&space).unwrap();
        let p = basis.partitions();
        for i in 0..basis.len() {
            let (ks, kt) = (p.k_s(i), p.k_t(i));
            let js = p.ps()[i];
            let jt = p.pt()[i] - 1;
            for rho in 0..=(ks + 1) as usize {
                let v = scaled_endpoint_derivative(&basis, i, js, Side::Left, rho);
                if (rho as isize) <= ks {
                    assert!(v.abs() < 1e-8, "D^{rho} N_{i}(s_i) = {v}, expected zero");
                } else {
                    assert!(v.abs() >= 1e-8, "D^{rho} N_{i}(s_i) vanishes");
                }
            }
            for rho in 0..=(kt + 1) as usize {
                let v = scaled_endpoint_derivative(&basis, i, jt, Side::Right, rho);
                if (rho as isize) <= kt {
                    assert!(v.abs() < 1e-8, "D^{rho} N_{i}(t_i) = {v}, expected zero");
                } else {
                    assert!(v.abs() >= 1e-8, "D^{rho} N_{i}(t_i) vanishes");
                }
            }
        }
    }
}

#[test]
fn derivatives_of_unity_vanish() {
    for space in all_spaces().iter().take(20) {
        let basis = BSplineBasis::new(space).unwrap();
        for order in 1..=2 {
            let ds = basis.derivative(order);
            for x in samples(space.a(), space.b(), 200) {
                let sum: f64 = ds.iter().map(|d| d.eval(x).unwrap()).sum();
                let scale: f64 = ds.iter().map(|d| d.eval(x).unwrap().abs()).sum::<f64>().max(1.0);
                assert!(sum.abs() <= 1e-10 * scale, "sum of D^{order} N at {x} = {sum}");
            }
        }
    }
}

#[test]
fn sign_changes_respect_zero_bound() {
    let mut rng = StdRng::seed_from_u64(11);
    for space in corpus(30) {
        let basis = BSplineBasis::new(&space).unwrap();
        for _ in 0..5 {
            let c: Vec<f64> = common::random_points(&mut rng, basis.len(), 1).concat();
            for p in 0..space.intervals() {
                for r in p + 1..=space.intervals() {
                    let xs = samples(space.x(p), space.x(r), 400);
                    let vals: Vec<f64> = xs
                        .iter()
                        .map(|&x| basis.eval_all(x).unwrap().iter().zip(&c).map(|(n, c)| n * c).sum())
                        .filter(|v: &f64| v.abs() > 1e-9)
                        .collect();
                    let changes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
                    assert!(changes <= space.zero_bound(p, r).unwrap());
                }
            }
        }
    }
}

fn space_strategy() -> impl Strategy<Value = SplineSpace> {
    any::<u64>().prop_map(|seed| common::random_space(&mut StdRng::seed_from_u64(seed), 4, 6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimension_counts_agree(space in space_strategy()) {
        let q = space.q();
        let left: usize = space.degree(0) + 1 + (1..=q).map(|i| space.degree(i) - space.continuity(i)).sum::<usize>();
        let right: usize = space.degree(q) + 1 + (1..=q).map(|i| space.degree(i - 1) - space.continuity(i)).sum::<usize>();
        prop_assert_eq!(left, right);
        prop_assert_eq!(left, space.dim());
        prop_assert_eq!(space.zero_bound(0, q + 1).unwrap(), space.dim() - 1);
    }

    #[test]
    fn partitions_are_consistent(space in space_strategy()) {
        let p = mdspline::ExtendedPartitions::new(&space);
        prop_assert_eq!(p.s().len(), space.dim());
        prop_assert_eq!(p.t().len(), space.dim());
        prop_assert!(p.s().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(p.t().windows(2).all(|w| w[0] <= w[1]));
        for i in 0..p.len() {
            prop_assert_eq!(p.s()[i], space.x(p.ps()[i]));
            prop_assert_eq!(p.t()[i], space.x(p.pt()[i]));
            prop_assert!(p.s()[i] < p.t()[i]);
        }
    }

    #[test]
    fn transition_functions_are_monotone_steps(space in space_strategy()) {
        let ts = mdspline::transition::transitions_of(&space).unwrap();
        for f in ts.functions() {
            prop_assert!(f.residual <= 1e-10);
            for x in samples(space.a(), space.b(), 200) {
                let v = f.eval(x).unwrap();
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
    }
}
