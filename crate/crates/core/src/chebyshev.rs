//! Chebyshev polynomials and the constrained extremal problem: over sorted
//! zero-sum vectors whose monic polynomial stays within `r` on its root
//! interval, the supremum of the sum of squares is `2s (r/2)^{2/s}`,
//! attained by the roots of the rescaled Chebyshev polynomial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::gen_eig;
use crate::matrix::Matrix;
use crate::scalar::{re, Scalar};

/// `T_s(z)`: `cos(s arccos z)` on `[-1, 1]`, three-term recurrence outside.
pub fn cheb_eval<T: Scalar>(s: usize, z: T) -> T {
    if z.abs() <= T::one() {
        return (T::of(s as f64) * z.acos()).cos();
    }
    let mut t0 = T::one();
    let mut t1 = z;
    if s == 0 {
        return t0;
    }
    let two = T::of(2.0);
    for _ in 2..=s {
        let t2 = two * z * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

fn binom(n: usize, k: usize) -> i128 {
    let mut r: i128 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

/// Exact integer coefficients of `T_s`, ascending degree, via the explicit
/// alternating sum `T_s(z) = (1/2) sum_k (-1)^k s/(s-k) C(s-k, k) (2z)^{s-2k}`.
/// Leading coefficient `2^{s-1}`; the `z^{s-2}` coefficient is `-s 2^{s-3}`
/// for `s >= 3`.
pub fn cheb_coefficients(s: usize) -> Vec<i64> {
    if s == 0 {
        return vec![1];
    }
    let mut coeffs = vec![0i64; s + 1];
    for k in 0..=s / 2 {
        let deg = s - 2 * k;
        let core = (s as i128) * binom(s - k, k) / (s - k) as i128;
        let sign = if k % 2 == 0 { 1i128 } else { -1i128 };
        let val = if deg == 0 {
            // the halved constant term: s/(s-k) = 2 here, so it stays integral
            sign * core / 2
        } else {
            sign * core * (1i128 << (deg - 1))
        };
        coeffs[deg] = val as i64;
    }
    coeffs
}

/// First two power sums of the zeros of `T_s` from its coefficients:
/// `(sum z_n, sum z_n^2) = (0, s/2)`.
pub fn cheb_zero_moments<T: Scalar>(s: usize) -> (T, T) {
    let c = cheb_coefficients(s);
    let lead = T::of(c[s] as f64);
    let xi = -T::of(c[s - 1] as f64) / lead;
    let sub = if s >= 2 { T::of(c[s - 2] as f64) } else { T::zero() };
    let eta = xi * xi - T::of(2.0) * sub / lead;
    (xi, eta)
}

/// Closed-form supremum `2s (r/2)^{2/s}` of the sum of squares over
/// `P_s(r)`; zero when `r = 0`.
pub fn extremal_value<T: Scalar>(s: usize, r: T) -> T {
    if r == T::zero() {
        return T::zero();
    }
    let sf = T::of(s as f64);
    T::of(2.0) * sf * (r / T::of(2.0)).powf(T::of(2.0) / sf)
}

/// The extremal configuration: roots of the scaled Chebyshev polynomial,
/// with its observed sum of squares and max modulus on the root interval.
#[derive(Debug, Clone)]
pub struct ExtremalConfig<T: Scalar> {
    pub x: Vec<T>,
    pub sum_squares: T,
    pub max_abs: T,
}

/// Roots `x_n = 2 (r/2)^{1/s} cos(pi (2(s-n)+1) / (2s))`, ascending. For
/// `r = 0` the configuration collapses to all zeros.
pub fn extremal_config<T: Scalar>(s: usize, r: T) -> Result<ExtremalConfig<T>> {
    if s < 2 {
        return Err(Error::InvalidProblem(format!("need s >= 2, got {s}")));
    }
    if r < T::zero() {
        return Err(Error::InvalidProblem("need r >= 0".into()));
    }
    if r == T::zero() {
        return Ok(ExtremalConfig {
            x: vec![T::zero(); s],
            sum_squares: T::zero(),
            max_abs: T::zero(),
        });
    }
    let sf = T::of(s as f64);
    let scale = T::of(2.0) * (r / T::of(2.0)).powf(sf.recip());
    let x: Vec<T> = (1..=s)
        .map(|n| {
            let angle = T::PI() * T::of((2 * (s - n) + 1) as f64) / (T::of(2.0) * sf);
            scale * angle.cos()
        })
        .collect();
    let sum_squares = x.iter().map(|v| *v * *v).sum();
    let max_abs = poly_interval_max(&x, 0);
    Ok(ExtremalConfig {
        x,
        sum_squares,
        max_abs,
    })
}

/// Monic polynomial with the given real roots, coefficients ascending.
pub fn poly_from_roots<T: Scalar>(roots: &[T]) -> Vec<T> {
    let mut c = vec![T::one()];
    for &r in roots {
        let mut next = vec![T::zero(); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] = next[i + 1] + ci;
            next[i] = next[i] - r * ci;
        }
        c = next;
    }
    c
}

/// Evaluate an ascending-coefficient polynomial by Horner's rule.
pub fn poly_eval<T: Scalar>(coeffs: &[T], z: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * z + c)
}

/// Real critical points of the monic polynomial with the given roots,
/// found as eigenvalues of the derivative's companion matrix. The roots
/// are real, so by interlacing all critical points are real.
pub fn critical_points<T: Scalar>(roots: &[T]) -> Vec<T> {
    let s = roots.len();
    if s < 2 {
        return Vec::new();
    }
    let p = poly_from_roots(roots);
    // derivative, ascending, degree s-1
    let dp: Vec<T> = (1..p.len())
        .map(|i| T::of(i as f64) * p[i])
        .collect();
    let d = dp.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = dp[d];
    let mut comp = Matrix::<T>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = re(T::one());
    }
    for i in 0..d {
        comp[(i, d - 1)] = re(-dp[i] / lead);
    }
    match gen_eig(&comp) {
        Ok(eig) => eig.values.iter().map(|v| v.re).collect(),
        Err(_) => Vec::new(),
    }
}

/// Max of `|prod (z - x_n)|` over `[min x, max x]`: evaluated at the
/// endpoints and every real critical point, plus an optional dense-grid
/// cross-check with `dense` extra samples.
pub fn poly_interval_max<T: Scalar>(x: &[T], dense: usize) -> T {
    if x.is_empty() {
        return T::zero();
    }
    let lo = x.iter().copied().fold(T::infinity(), |a, b| a.min(b));
    let hi = x.iter().copied().fold(T::neg_infinity(), |a, b| a.max(b));
    let p = poly_from_roots(x);
    let mut best = poly_eval(&p, lo).abs().max(poly_eval(&p, hi).abs());
    for c in critical_points(x) {
        let z = c.max(lo).min(hi);
        best = best.max(poly_eval(&p, z).abs());
    }
    if dense > 0 && hi > lo {
        let step = (hi - lo) / T::of(dense as f64);
        for i in 0..=dense {
            let z = lo + step * T::of(i as f64);
            best = best.max(poly_eval(&p, z).abs());
        }
    }
    best
}

/// Membership in `P_s(r)`: sorted, zero-sum (within `1e-9 * s * max|x|`),
/// and max modulus on the root interval at most `r`. Returns the verdict
/// together with the slack `max - r`.
pub fn membership<T: Scalar>(x: &[T], r: T) -> (bool, T) {
    let sorted = x.windows(2).all(|w| w[0] <= w[1]);
    let scale = T::of(x.len() as f64)
        * x.iter().map(|v| v.abs()).fold(T::zero(), |a, b| a.max(b));
    let zero_sum = x.iter().copied().sum::<T>().abs() <= T::of(1e-9) * scale;
    let max = poly_interval_max(x, 1000);
    let slack = max - r;
    let member = sorted && zero_sum && slack <= T::of(1e-9) * r.max(T::one());
    (member, slack)
}

/// Randomized multi-start maximizer of the sum of squares over `P_s(r)`:
/// an independent check of [`extremal_value`]. Starts are jittered
/// Chebyshev shapes and random sorted zero-sum vectors; candidates are
/// projected onto the boundary by the exact dilation law
/// `max_abs(t x) = t^s max_abs(x)` and refined by zero-sum-preserving
/// coordinate-pair moves. Deterministic for a fixed seed.
pub fn oracle_max_sum_squares<T: Scalar>(s: usize, r: T, budget: usize, seed: u64) -> T {
    if s < 2 || r <= T::zero() {
        return T::zero();
    }
    let starts = 8.min(budget / 125).max(1);
    let moves = budget / starts;
    let mut best = T::zero();
    for start in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37 * (start as u64 + 1)));
        let mut x = if start % 2 == 0 {
            // jittered Chebyshev shape
            let cfg = extremal_config(s, r).expect("s >= 2, r > 0");
            let jitter = T::of(0.1);
            cfg.x
                .iter()
                .map(|v| *v * (T::one() + jitter * T::of(rng.random::<f64>() * 2.0 - 1.0)))
                .collect::<Vec<T>>()
        } else {
            (0..s)
                .map(|_| T::of(rng.random::<f64>() * 2.0 - 1.0))
                .collect::<Vec<T>>()
        };
        center_sort(&mut x);
        if !project_to_boundary(&mut x, s, r) {
            continue;
        }
        let mut obj: T = x.iter().map(|v| *v * *v).sum();
        let spread = x[s - 1] - x[0];
        let mut eps = T::of(0.2) * spread.max(T::of(1e-3));
        let mut stall = 0usize;
        for _ in 0..moves {
            let i = rng.random_range(0..s);
            let mut jdx = rng.random_range(0..s);
            if jdx == i {
                jdx = (jdx + 1) % s;
            }
            let mut y = x.clone();
            y[i] = y[i] - eps;
            y[jdx] = y[jdx] + eps;
            center_sort(&mut y);
            if !project_to_boundary(&mut y, s, r) {
                continue;
            }
            let obj_y: T = y.iter().map(|v| *v * *v).sum();
            if obj_y > obj {
                x = y;
                obj = obj_y;
                stall = 0;
            } else {
                stall += 1;
                if stall > 2 * s {
                    eps = eps * T::of(0.6);
                    stall = 0;
                    if eps < T::of(1e-9) {
                        break;
                    }
                }
            }
        }
        best = best.max(obj);
    }
    best
}

fn center_sort<T: Scalar>(x: &mut [T]) {
    let mean = x.iter().copied().sum::<T>() / T::of(x.len() as f64);
    for v in x.iter_mut() {
        *v = *v - mean;
    }
    x.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
}

/// Scale so the interval max becomes exactly `r`; scaling all roots by `t`
/// scales the max by `t^s`, so this is a one-dimensional solve.
fn project_to_boundary<T: Scalar>(x: &mut [T], s: usize, r: T) -> bool {
    let max = poly_interval_max(x, 0);
    if !(max > T::zero()) || !max.is_finite() {
        return false;
    }
    let t = (r / max).powf(T::of(s as f64).recip());
    for v in x.iter_mut() {
        *v = *v * t;
    }
    true
}
