//! Dense complex-matrix kernels: Hermitian and general eigenvalues, LU
//! determinant and solve, positive-definite square root, polar decomposition.
//!
//! All kernels are classical dense algorithms (cyclic complex Jacobi for the
//! Hermitian problem, balanced Hessenberg reduction plus shifted complex QR
//! for the general one, partially pivoted LU for determinants and solves).
//! The contract, not the provider, is normative: every result is checked by
//! the property tests at the tolerances below.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, C};

/// Relative Hermiticity tolerance accepted by [`herm_eig`].
pub const TOL_HERM: f64 = 1e-10;

/// Hermiticity guard in the working precision: `TOL_HERM` at f64, scaled
/// up by the machine epsilon for narrower scalars.
pub fn herm_tol<T: Scalar>() -> T {
    T::of(TOL_HERM).max(T::epsilon() * T::of(100.0))
}
/// Relative eigen-residual tolerance guaranteed by [`herm_eig`].
pub const TOL_EIG: f64 = 1e-10;
/// Characteristic-residual tolerance guaranteed by [`gen_eig`].
pub const TOL_GEN: f64 = 1e-8;
/// Relative singularity threshold for [`polar_left`] and [`sqrt_pd`].
pub const TOL_SING: f64 = 1e-12;

/// Full Hermitian eigendecomposition: ascending real values, orthonormal
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermEigResult<T: Scalar> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

/// Eigenvalue multiset of a general square matrix, sorted by (re, im) for
/// reproducibility; the multiset itself is unordered.
#[derive(Debug, Clone)]
pub struct GeneralEigResult<T: Scalar> {
    pub values: Vec<C<T>>,
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn herm_eig<T: Scalar>(a: &Matrix<T>) -> Result<HermEigResult<T>> {
    let (values, vectors) = jacobi_hermitian(a, true)?;
    Ok(HermEigResult {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only; skips eigenvector accumulation.
pub fn herm_eig_values<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    Ok(jacobi_hermitian(a, false)?.0)
}

/// Cyclic complex Jacobi with exact structural cleanup after each rotation.
fn jacobi_hermitian<T: Scalar>(
    a: &Matrix<T>,
    want_vectors: bool,
) -> Result<(Vec<T>, Option<Matrix<T>>)> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let scale = a.fro_norm();
    if scale > T::zero() {
        let res = a.herm_residual();
        if res > herm_tol::<T>() * scale {
            return Err(Error::NotHermitian {
                residual: (res / scale).to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut m = a.hermitized();
    let mut v = want_vectors.then(|| Matrix::<T>::identity(n));
    if n <= 1 || scale == T::zero() {
        let vals = (0..n).map(|i| m[(i, i)].re).collect();
        return Ok((vals, v));
    }

    let flush = scale * T::epsilon() / T::of(n as f64);
    let stop = scale * T::epsilon();
    let mut converged = false;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if (off + off).sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let beta = m[(p, q)];
                let absb = beta.norm();
                if absb <= flush {
                    m[(p, q)] = C::zero();
                    m[(q, p)] = C::zero();
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = beta.unscale(absb);
                let tau = (aqq - app) / (absb + absb);
                let t = if tau.abs() > T::of(1e12) {
                    T::of(0.5) / tau
                } else {
                    let d = (T::one() + tau * tau).sqrt();
                    if tau >= T::zero() {
                        (tau + d).recip()
                    } else {
                        (tau - d).recip()
                    }
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;

                // U differs from I only in the (p, q) plane:
                //   U[p][p] = c*phase, U[p][q] = s*phase, U[q][p] = -s, U[q][q] = c
                let upp = phase.scale(c);
                let upq = phase.scale(s);
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * upp - miq.scale(s);
                    m[(i, q)] = mip * upq + miq.scale(c);
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = upp.conj() * mpj - mqj.scale(s);
                    m[(q, j)] = upq.conj() * mpj + mqj.scale(c);
                }
                m[(p, q)] = C::zero();
                m[(q, p)] = C::zero();
                m[(p, p)] = C::new(app - t * absb, T::zero());
                m[(q, q)] = C::new(aqq + t * absb, T::zero());
                if let Some(v) = v.as_mut() {
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * upp - viq.scale(s);
                        v[(i, q)] = vip * upq + viq.scale(c);
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values: Vec<T> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = v.map(|v| Matrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    Ok((values, vectors))
}

/// Eigenvalue multiset of a general complex square matrix.
pub fn gen_eig<T: Scalar>(a: &Matrix<T>) -> Result<GeneralEigResult<T>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let mut values = match n {
        0 => Vec::new(),
        1 => vec![a[(0, 0)]],
        2 => eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]).to_vec(),
        _ => {
            let mut h = a.clone();
            balance(&mut h);
            hessenberg(&mut h);
            hessenberg_qr_eigenvalues(h)?
        }
    };
    complex_lex_sort(&mut values);
    Ok(GeneralEigResult { values })
}

/// Closed-form eigenvalues of `[[a, b], [c, d]]`, small root via the
/// determinant to avoid cancellation.
fn eig2<T: Scalar>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> [C<T>; 2] {
    let half = T::of(0.5);
    let mid = (a + d).scale(half);
    let det = a * d - b * c;
    let disc = mid * mid - det;
    let sq = disc.sqrt();
    let l1 = mid + sq;
    let l2 = mid - sq;
    if l1.norm() >= l2.norm() {
        if l1.norm() > T::zero() {
            [l1, det / l1]
        } else {
            [l1, l2]
        }
    } else if l2.norm() > T::zero() {
        [det / l2, l2]
    } else {
        [l1, l2]
    }
}

/// `|re| + |im|`, the cheap magnitude used for balancing.
fn mag1<T: Scalar>(z: C<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Parlett-Reinsch balancing (diagonal similarity, powers of two).
fn balance<T: Scalar>(h: &mut Matrix<T>) {
    let n = h.rows();
    let radix = T::of(2.0);
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += mag1(h[(j, i)]);
                    r += mag1(h[(i, j)]);
                }
            }
            if c > T::zero() && r > T::zero() && c.is_finite() && r.is_finite() {
                let mut f = T::one();
                let s = c + r;
                let mut g = r / radix;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < T::of(0.95) * s {
                    done = false;
                    let ginv = f.recip();
                    for j in 0..n {
                        h[(i, j)] = h[(i, j)].scale(ginv);
                    }
                    for j in 0..n {
                        h[(j, i)] = h[(j, i)].scale(f);
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg<T: Scalar>(h: &mut Matrix<T>) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut tail = T::zero();
        for i in k + 2..n {
            tail += h[(i, k)].norm_sqr();
        }
        if tail == T::zero() {
            continue;
        }
        let alpha = h[(k + 1, k)];
        let absa = alpha.norm();
        let sigma = (alpha.norm_sqr() + tail).sqrt();
        let phase = if absa > T::zero() {
            alpha.unscale(absa)
        } else {
            C::one()
        };
        let beta = -phase.scale(sigma);
        // Reflector u = x - beta*e1 with ||u||^2 = 2*(sigma^2 + sigma*|alpha|).
        let mut u: Vec<C<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        u[0] -= beta;
        let unorm2 = (sigma * sigma + sigma * absa) * T::of(2.0);
        if unorm2 == T::zero() {
            continue;
        }
        let two_over = T::of(2.0) / unorm2;
        for j in k..n {
            let mut dot = C::<T>::zero();
            for (idx, i) in (k + 1..n).enumerate() {
                dot += u[idx].conj() * h[(i, j)];
            }
            let f = dot.scale(two_over);
            for (idx, i) in (k + 1..n).enumerate() {
                let w = h[(i, j)] - u[idx] * f;
                h[(i, j)] = w;
            }
        }
        for i in 0..n {
            let mut dot = C::<T>::zero();
            for (idx, j) in (k + 1..n).enumerate() {
                dot += h[(i, j)] * u[idx];
            }
            let f = dot.scale(two_over);
            for (idx, j) in (k + 1..n).enumerate() {
                let w = h[(i, j)] - f * u[idx].conj();
                h[(i, j)] = w;
            }
        }
        h[(k + 1, k)] = beta;
        for i in k + 2..n {
            h[(i, k)] = C::zero();
        }
    }
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with G (a, b)^T = (r, 0)^T.
fn givens<T: Scalar>(a: C<T>, b: C<T>) -> (T, C<T>) {
    let bn = b.norm();
    if bn == T::zero() {
        return (T::one(), C::zero());
    }
    let an = a.norm();
    if an == T::zero() {
        return (T::zero(), b.conj().unscale(bn));
    }
    let t = (an * an + bn * bn).sqrt();
    let c = an / t;
    let s = a.unscale(an) * b.conj().unscale(t);
    (c, s)
}

/// Shifted explicit QR iteration on an upper Hessenberg matrix.
fn hessenberg_qr_eigenvalues<T: Scalar>(mut h: Matrix<T>) -> Result<Vec<C<T>>> {
    let n = h.rows();
    let mut vals = Vec::with_capacity(n);
    let fro = h.fro_norm().max(T::epsilon());
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut block_iters = 0usize;
    let mut total = 0usize;
    let budget = 60 * n;
    loop {
        if hi == 0 {
            vals.push(h[(0, 0)]);
            break;
        }
        // Split at the first negligible subdiagonal above hi.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s > T::zero() { s } else { fro };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = C::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            vals.push(h[(hi, hi)]);
            hi -= 1;
            block_iters = 0;
            continue;
        }
        if lo + 1 == hi {
            let [l1, l2] = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            vals.push(l1);
            vals.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            block_iters = 0;
            continue;
        }

        total += 1;
        block_iters += 1;
        if total > budget {
            return Err(Error::NoConvergence);
        }
        let shift = if block_iters % 12 == 0 {
            let w = h[(hi, hi - 1)].norm() + h[(hi - 1, hi - 2)].norm();
            h[(hi, hi)] + C::new(T::of(0.75) * w, T::zero())
        } else {
            let [m1, m2] = eig2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            let d = h[(hi, hi)];
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(vals)
}

fn qr_step<T: Scalar>(h: &mut Matrix<T>, lo: usize, hi: usize, shift: C<T>) {
    for i in lo..=hi {
        let d = h[(i, i)] - shift;
        h[(i, i)] = d;
    }
    let mut rot: Vec<(T, C<T>)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        rot.push((c, s));
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a.scale(c) + s * b;
            h[(k + 1, j)] = b.scale(c) - s.conj() * a;
        }
        h[(k + 1, k)] = C::zero();
    }
    for (idx, k) in (lo..hi).enumerate() {
        let (c, s) = rot[idx];
        let top = (k + 1).min(hi);
        for i in lo..=top {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a.scale(c) + b * s.conj();
            h[(i, k + 1)] = b.scale(c) - a * s;
        }
    }
    for i in lo..=hi {
        let d = h[(i, i)] + shift;
        h[(i, i)] = d;
    }
}

struct Lu<T: Scalar> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: i8,
    singular: bool,
}

fn lu_factor<T: Scalar>(a: &Matrix<T>) -> Lu<T> {
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1i8;
    let mut singular = false;
    for k in 0..n {
        let mut pmax = lu[(k, k)].norm_sqr();
        let mut prow = k;
        for i in k + 1..n {
            let v = lu[(i, k)].norm_sqr();
            if v > pmax {
                pmax = v;
                prow = i;
            }
        }
        if prow != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(prow, j)];
                lu[(prow, j)] = t;
            }
            perm.swap(k, prow);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        if pivot.is_zero() {
            singular = true;
            continue;
        }
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let w = lu[(i, j)] - f * lu[(k, j)];
                lu[(i, j)] = w;
            }
        }
    }
    Lu {
        lu,
        perm,
        sign,
        singular,
    }
}

/// Determinant via partially pivoted LU.
pub fn det<T: Scalar>(a: &Matrix<T>) -> Result<C<T>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let f = lu_factor(a);
    if f.singular {
        return Ok(C::zero());
    }
    let mut d = C::new(T::of(f.sign as f64), T::zero());
    for i in 0..a.rows() {
        d *= f.lu[(i, i)];
    }
    Ok(d)
}

/// Solve `A X = B` for square `A` (multi-column right-hand side).
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::InvalidDimension(format!(
            "solve shapes {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let f = lu_factor(a);
    if f.singular {
        return Err(Error::Singular);
    }
    let mut x = Matrix::from_fn(n, b.cols(), |i, j| b[(f.perm[i], j)]);
    for col in 0..x.cols() {
        for k in 0..n {
            let xk = x[(k, col)];
            if xk.is_zero() {
                continue;
            }
            for i in k + 1..n {
                let w = x[(i, col)] - f.lu[(i, k)] * xk;
                x[(i, col)] = w;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[(k, col)];
            for j in k + 1..n {
                s -= f.lu[(k, j)] * x[(j, col)];
            }
            x[(k, col)] = s / f.lu[(k, k)];
        }
    }
    Ok(x)
}

fn rebuild_from_eig<T: Scalar>(eig: &HermEigResult<T>, f: impl Fn(T) -> T) -> Matrix<T> {
    let n = eig.values.len();
    let v = &eig.vectors;
    let mut scaled = v.clone();
    for j in 0..n {
        let s = f(eig.values[j]);
        for i in 0..n {
            let w = scaled[(i, j)].scale(s);
            scaled[(i, j)] = w;
        }
    }
    &scaled * &v.adjoint()
}

/// Positive-definite square root via eigendecomposition.
pub fn sqrt_pd<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let eig = herm_eig(a)?;
    let scale = a.fro_norm();
    let min = eig.values.first().copied().unwrap_or(T::zero());
    if min <= T::of(TOL_SING) * scale {
        return Err(Error::NotPositiveDefinite {
            min_eig: min.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(rebuild_from_eig(&eig, |l| l.sqrt()))
}

/// Left polar decomposition `A = H Q` with `H = (A A^*)^{1/2}` positive
/// definite and `Q` unitary. Errors with [`Error::Singular`] when the
/// smallest singular value falls below `TOL_SING * ||A||`.
pub fn polar_left<T: Scalar>(a: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let gram = a * &a.adjoint();
    let eig = herm_eig(&gram)?;
    let smin = eig
        .values
        .first()
        .copied()
        .unwrap_or(T::zero())
        .max(T::zero())
        .sqrt();
    if smin <= T::of(TOL_SING) * a.fro_norm() {
        return Err(Error::Singular);
    }
    let h = rebuild_from_eig(&eig, |l| l.max(T::zero()).sqrt());
    let q = solve(&h, a)?;
    Ok((h, q))
}

/// Sort complex values by (re, im); a deterministic presentation of an
/// unordered multiset.
pub fn complex_lex_sort<T: Scalar>(v: &mut [C<T>]) {
    v.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Greedy minimal-distance matching of two complex multisets after
/// lexicographic sorting; returns the worst matched-pair distance
/// (infinity on length mismatch).
pub fn matched_max_distance<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    complex_lex_sort(&mut xs);
    complex_lex_sort(&mut ys);
    let mut used = vec![false; ys.len()];
    let mut worst = T::zero();
    for x in &xs {
        let mut best = T::infinity();
        let mut bi = usize::MAX;
        for (i, y) in ys.iter().enumerate() {
            if !used[i] {
                let d = (x - y).norm();
                if d < best {
                    best = d;
                    bi = i;
                }
            }
        }
        used[bi] = true;
        worst = worst.max(best);
    }
    worst
}

/// Matched-pair max deviation of two real multisets (sorted pairing is
/// optimal in one dimension).
pub fn matched_max_distance_real<T: Scalar>(a: &[T], b: &[T]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ys.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    xs.iter()
        .zip(&ys)
        .map(|(x, y)| (*x - *y).abs())
        .fold(T::zero(), |m, d| m.max(d))
}
