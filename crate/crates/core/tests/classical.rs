mod common;

use common::{boehm_alphas, clamped_knots, cox_de_boor, random_conventional, samples};
use mdspline::{BSplineBasis, ExtendedPartitions, MDCurve, SplineSpace};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn equal_degrees_match_cox_de_boor() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..40 {
        let space = random_conventional(&mut rng);
        let d = space.degree(0);
        let u = clamped_knots(&space);
        let basis = BSplineBasis::new(&space).unwrap();
        assert_eq!(basis.len(), u.len() - d - 1);
        for x in samples(space.a(), space.b(), 300) {
            let dev = common::max_dev(&basis.eval_all(x).unwrap(), &cox_de_boor(&u, d, x));
            assert!(dev <= 1e-12, "d = {d}, x = {x}: deviation {dev}");
        }
    }
}

#[test]
fn cubic_transitions_are_classical_tail_sums() {
    let space = SplineSpace::new([0.0, 3.0], vec![1.0, 2.0], vec![3, 3, 3], vec![2, 2]).unwrap();
    let u = clamped_knots(&space);
    let ts = mdspline::transition::transitions_of(&space).unwrap();
    for x in samples(0.0, 3.0, 50) {
        let n = cox_de_boor(&u, 3, x);
        for (i, f) in ts.functions().iter().enumerate() {
            let tail: f64 = n[i..].iter().sum();
            assert!((f.eval(x).unwrap() - tail).abs() <= 1e-12);
        }
    }
}

#[test]
fn partitions_split_the_clamped_knot_vector() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..30 {
        let space = random_conventional(&mut rng);
        let p = ExtendedPartitions::new(&space);
        assert_eq!(p.classical_knots().unwrap(), clamped_knots(&space));
    }
    let sp = SplineSpace::new([0.0, 3.0], vec![1.0, 2.0], vec![2, 2, 2], vec![1, 1]).unwrap();
    let p = ExtendedPartitions::new(&sp);
    assert_eq!(p.s(), &[0.0, 0.0, 0.0, 1.0, 2.0]);
    assert_eq!(p.t(), &[1.0, 2.0, 3.0, 3.0, 3.0]);
}

#[test]
fn insertion_coefficients_are_boehm_ratios() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..400 {
        let space = random_conventional(&mut rng);
        let d = space.degree(0);
        let u = clamped_knots(&space);
        let pts = common::random_points(&mut rng, space.dim(), 2);
        let curve = MDCurve::new(&space, pts).unwrap();
        let mut targets: Vec<f64> = (0..3).map(|_| rng.random_range(space.a()..space.b())).collect();
        targets.extend((1..=space.q()).filter(|&i| space.continuity(i) > 0).map(|i| space.x(i)));
        for x in targets {
            let r = curve.insert_knot(x).unwrap();
            let expected = boehm_alphas(&u, d, x);
            let dev = common::max_dev(&r.alpha, &expected);
            assert!(dev <= 1e-12, "insert {x} into {u:?}: {:?} vs {expected:?}", r.alpha);
        }
    }
}
