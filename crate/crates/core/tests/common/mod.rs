#![allow(dead_code)]

use mdspline::{ConnectionMatrix, MDCurve, SplineSpace};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn running() -> SplineSpace {
    SplineSpace::new([0.0, 7.0], vec![1.0, 3.0, 6.0], vec![1, 2, 4, 2], vec![0, 1, 2]).unwrap()
}

pub fn phi_space() -> SplineSpace {
    SplineSpace::new([0.0, 5.0], vec![1.0, 2.0, 3.0, 4.0], vec![2, 3, 4, 3, 2], vec![2, 3, 3, 2])
        .unwrap()
}

pub fn turtle() -> MDCurve {
    let pts = vec![
        vec![0.0, 0.0],
        vec![1.0, 2.0],
        vec![3.0, 3.0],
        vec![5.0, 2.5],
        vec![6.0, 0.5],
        vec![4.5, -1.0],
        vec![2.0, -0.5],
    ];
    MDCurve::new(&running(), pts).unwrap()
}

pub fn gc_matrices(alpha: f64, beta: f64, gamma: f64) -> Vec<ConnectionMatrix> {
    let m1 = ConnectionMatrix::from_rows(&[vec![1.0], vec![0.0, alpha], vec![0.0, beta, gamma]]).unwrap();
    let m2 = ConnectionMatrix::from_rows(&[
        vec![1.0],
        vec![0.0, 1.0 / alpha],
        vec![0.0, beta / (alpha * gamma), 1.0 / gamma],
    ])
    .unwrap();
    vec![m1, m2, ConnectionMatrix::identity(1)]
}

pub fn gc_space(alpha: f64, beta: f64, gamma: f64) -> SplineSpace {
    SplineSpace::with_connections(
        [0.0, 3.0],
        vec![0.75, 1.75, 2.5],
        vec![3, 4, 3, 1],
        vec![2, 2, 0],
        gc_matrices(alpha, beta, gamma),
    )
    .unwrap()
}

pub fn gc_parametric() -> SplineSpace {
    SplineSpace::new([0.0, 3.0], vec![0.75, 1.75, 2.5], vec![3, 4, 3, 1], vec![2, 2, 0]).unwrap()
}

pub fn gc_points() -> Vec<Vec<f64>> {
    vec![
        vec![-1.0, -0.8],
        vec![-0.6, 0.4],
        vec![-0.1, 0.9],
        vec![0.4, 0.7],
        vec![0.9, 0.2],
        vec![1.1, -0.4],
        vec![0.6, -0.9],
        vec![0.0, -1.0],
    ]
}

/// A random valid space with `q <= max_q` interior break-points and degrees
/// in `1..=max_d`.
pub fn random_space(rng: &mut StdRng, max_q: usize, max_d: usize) -> SplineSpace {
    let q = rng.random_range(0..=max_q);
    let degrees: Vec<usize> = (0..=q).map(|_| rng.random_range(1..=max_d)).collect();
    let continuities: Vec<usize> = (1..=q)
        .map(|i| {
            let (l, r) = (degrees[i - 1], degrees[i]);
            let max = if l == r { l - 1 } else { l.min(r) };
            rng.random_range(0..=max)
        })
        .collect();
    let a = rng.random_range(-2.0..2.0);
    let mut x = a;
    let mut bps = Vec::with_capacity(q + 1);
    for _ in 0..=q {
        x += rng.random_range(0.25..2.0);
        bps.push(x);
    }
    let b = bps.pop().unwrap();
    SplineSpace::new([a, b], bps, degrees, continuities).unwrap()
}

/// Fixed corpus of random spaces (q <= 4, d <= 6).
pub fn corpus(count: usize) -> Vec<SplineSpace> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0f_5b11e);
    (0..count).map(|_| random_space(&mut rng, 4, 6)).collect()
}

pub fn random_points(rng: &mut StdRng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect()
}

pub fn samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// Textbook Cox-de Boor evaluation of all B-splines of degree `d` on the
/// clamped knot vector `u`, right-continuous except at the last knot.
pub fn cox_de_boor(u: &[f64], d: usize, x: f64) -> Vec<f64> {
    let count = u.len() - d - 1;
    let last = u[u.len() - 1];
    let mut n: Vec<f64> = (0..u.len() - 1)
        .map(|i| {
            let inside = if x == last { u[i] < x && u[i + 1] == last } else { u[i] <= x && x < u[i + 1] };
            if inside { 1.0 } else { 0.0 }
        })
        .collect();
    for p in 1..=d {
        n = (0..u.len() - 1 - p)
            .map(|i| {
                let l = if u[i + p] > u[i] { (x - u[i]) / (u[i + p] - u[i]) * n[i] } else { 0.0 };
                let r = if u[i + p + 1] > u[i + 1] {
                    (u[i + p + 1] - x) / (u[i + p + 1] - u[i + 1]) * n[i + 1]
                } else {
                    0.0
                };
                l + r
            })
            .collect();
    }
    n.truncate(count);
    n
}

/// Clamped knot vector of a conventional space built directly from its break-points.
pub fn clamped_knots(space: &SplineSpace) -> Vec<f64> {
    let d = space.degree(0);
    let mut u = vec![space.a(); d + 1];
    for i in 1..=space.q() {
        u.extend(std::iter::repeat_n(space.x(i), d - space.continuity(i)));
    }
    u.extend(std::iter::repeat_n(space.b(), d + 1));
    u
}

/// Classical Boehm coefficients for inserting `x` into the degree-`d` knot vector `u`.
pub fn boehm_alphas(u: &[f64], d: usize, x: f64) -> Vec<f64> {
    let count = u.len() - d - 1;
    let span = u.partition_point(|&v| v <= x) - 1;
    (0..count)
        .map(|i| {
            if i + d <= span {
                1.0
            } else if i > span {
                0.0
            } else {
                (x - u[i]) / (u[i + d] - u[i])
            }
        })
        .collect()
}

/// Curvature of a planar curve from first and second derivatives.
pub fn curvature(d1: [f64; 2], d2: [f64; 2]) -> f64 {
    (d1[0] * d2[1] - d1[1] * d2[0]) / (d1[0].hypot(d1[1])).powi(3)
}

/// Curvature from one-sided second-order differences with step `h`;
/// `dir` is `1.0` for the right side and `-1.0` for the left.
pub fn one_sided_curvature(curve: &MDCurve, x: f64, h: f64, dir: f64) -> f64 {
    let f: Vec<Vec<f64>> = (0..4).map(|k| curve.eval(x + dir * h * k as f64).unwrap()).collect();
    let d1 = |c: usize| dir * (-3.0 * f[0][c] + 4.0 * f[1][c] - f[2][c]) / (2.0 * h);
    let d2 = |c: usize| (2.0 * f[0][c] - 5.0 * f[1][c] + 4.0 * f[2][c] - f[3][c]) / (h * h);
    curvature([d1(0), d1(1)], [d2(0), d2(1)])
}

pub fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A random all-equal-degree space (d <= 5, up to 6 intervals) on `[0, b]`.
pub fn random_conventional(rng: &mut StdRng) -> SplineSpace {
    let d = rng.random_range(1..=5);
    let intervals = rng.random_range(1..=6);
    let mut x = 0.0;
    let mut bps = Vec::new();
    for _ in 0..intervals {
        x += rng.random_range(0.2..1.5);
        bps.push(x);
    }
    let b = bps.pop().unwrap();
    let ks = (0..intervals - 1).map(|_| rng.random_range(0..d)).collect();
    SplineSpace::new([0.0, b], bps, vec![d; intervals], ks).unwrap()
}

pub type Closed = fn(f64) -> f64;

/// Closed forms of phi_2^3 and phi_3^3 on the phi space as
/// `(0-based index, lo, hi, form)`. The second piece of each carries a
/// corrected numerator.
pub fn phi_closed_forms() -> Vec<(usize, f64, f64, Closed)> {
    vec![
        (1, 0.0, 1.0, |x| (288.0 * x * x - 475.0 * x) / (61.0 * (9.0 * x - 16.0))),
        (1, 1.0, 2.0, |x| {
            (64.0 * x.powi(3) - 297.0 * x * x + 301.0 * x + 119.0) / (61.0 * (3.0 * x * x - 15.0 * x + 19.0))
        }),
        (1, 2.0, 3.0, |x| (16.0 * x + 13.0) / 61.0),
        (2, 0.0, 1.0, |x| 32.0 * x / 99.0),
        (2, 1.0, 2.0, |x| {
            16.0 * (116.0 * x.powi(3) - 285.0 * x * x - 246.0 * x + 181.0)
                / (297.0 * (29.0 * x * x - 97.0 * x + 29.0))
        }),
        (2, 2.0, 3.0, |x| {
            16.0 * (45.0 * x.powi(4) - 278.0 * x.powi(3) + 177.0 * x * x + 1182.0 * x - 1045.0)
                / (297.0 * (15.0 * x.powi(3) - 119.0 * x * x + 277.0 * x - 149.0))
        }),
        (2, 3.0, 4.0, |x| (64.0 * x + 41.0) / 297.0),
    ]
}
