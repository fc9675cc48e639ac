//! Floquet fiber matrices `K_p(tau)`, their spectra, and the two trace
//! identities with the moment lower bound.
//!
//! On the unit circle `K_p(tau)` is Hermitian: block tridiagonal with `b_n`
//! on the diagonal, `a_n` on the first off-diagonals, and corner blocks
//! `tau^{-1} a_p` (top right), `tau a_p` (bottom left). For `p = 1` the
//! wrap-around collapses onto the diagonal, `K = b_1 + (tau + tau^{-1}) a_1`;
//! for `p = 2` it lands on the off-diagonal blocks, which become
//! `a_1 + tau^{-1} a_2` and `a_1 + tau a_2`.

use crate::error::{Error, Result};
use crate::linalg::herm_eig_values;
use crate::matrix::Matrix;
use crate::operator::{BlockJacobiOperator, GeneralBlockJacobi};
use crate::scalar::{Scalar, C};

/// Fiber matrix at quasimomentum phase `tau`.
#[derive(Debug, Clone)]
pub struct FloquetMatrix<T: Scalar> {
    pub tau: C<T>,
    pub k: Matrix<T>,
}

/// First and second eigenvalue moments of one fiber against their
/// coefficient-side values, plus the moment-bound certificate.
#[derive(Debug, Clone)]
pub struct MomentReport<T: Scalar> {
    pub tau: C<T>,
    /// `sum_n lambda_n(tau)`.
    pub s1: T,
    /// `sum_n lambda_n(tau)^2`, rescaled to the native period when the
    /// small-period extension was applied.
    pub s2: T,
    /// `sum_n Tr b_n`.
    pub rhs1: T,
    /// `sum_n Tr(b_n^2 + 2 a_n^2)`.
    pub rhs2: T,
    /// `s2 - 2pm c^{2/(pm)}`; nonnegative up to roundoff, and zero exactly
    /// on multiples of the free operator.
    pub certificate: T,
    /// Period-extension factor used internally (1 or 3).
    pub extension: usize,
}

/// Assemble `K_p(tau)`. Hermiticity is only guaranteed for `|tau| = 1`, but
/// the matrix itself is defined for any nonzero `tau` (the determinant
/// identity uses it off the circle).
pub fn build_floquet<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    tau: C<T>,
) -> Result<FloquetMatrix<T>> {
    if tau.norm_sqr() == T::zero() {
        return Err(Error::ZeroTau);
    }
    let p = j.p();
    let m = j.m();
    let tinv = tau_inverse(tau);
    let mut k = Matrix::zeros(p * m, p * m);
    for i in 0..p {
        k.set_block(i * m, i * m, j.b(i));
    }
    if p == 1 {
        k.add_block(0, 0, &j.a(0).scaled(tau + tinv));
    } else {
        for i in 0..p - 1 {
            k.add_block(i * m, (i + 1) * m, j.a(i));
            k.add_block((i + 1) * m, i * m, j.a(i));
        }
        k.add_block(0, (p - 1) * m, &j.a(p - 1).scaled(tinv));
        k.add_block((p - 1) * m, 0, &j.a(p - 1).scaled(tau));
    }
    Ok(FloquetMatrix { tau, k })
}

/// On the unit circle `1/tau` equals `conj(tau)` exactly; using the
/// conjugate there keeps the assembled fiber Hermitian to the last bit
/// even when it nearly vanishes.
fn tau_inverse<T: Scalar>(tau: C<T>) -> C<T> {
    let tol = T::of(1e-12).max(T::epsilon() * T::of(10.0));
    if (tau.norm() - T::one()).abs() <= tol {
        tau.conj()
    } else {
        tau.inv()
    }
}

/// Fiber of an operator with merely invertible off-diagonal blocks: the
/// subdiagonal carries the adjoints, the corners `tau^{-1} a_p^*` (top
/// right) and `tau a_p` (bottom left). Reduces to the positive layout when
/// the blocks are Hermitian.
pub fn build_floquet_general<T: Scalar>(
    g: &GeneralBlockJacobi<T>,
    tau: C<T>,
) -> Result<FloquetMatrix<T>> {
    if tau.norm_sqr() == T::zero() {
        return Err(Error::ZeroTau);
    }
    let p = g.p();
    let m = g.m();
    let tinv = tau_inverse(tau);
    let mut k = Matrix::zeros(p * m, p * m);
    for i in 0..p {
        k.set_block(i * m, i * m, g.b(i));
    }
    if p == 1 {
        k.add_block(0, 0, &g.a(0).scaled(tau));
        k.add_block(0, 0, &g.a(0).adjoint().scaled(tinv));
    } else {
        for i in 0..p - 1 {
            k.add_block(i * m, (i + 1) * m, g.a(i));
            k.add_block((i + 1) * m, i * m, &g.a(i).adjoint());
        }
        k.add_block(0, (p - 1) * m, &g.a(p - 1).adjoint().scaled(tinv));
        k.add_block((p - 1) * m, 0, &g.a(p - 1).scaled(tau));
    }
    Ok(FloquetMatrix { tau, k })
}

/// Ascending real spectrum of the general fiber for `|tau| = 1`.
pub fn floquet_eigenvalues_general<T: Scalar>(
    g: &GeneralBlockJacobi<T>,
    tau: C<T>,
) -> Result<Vec<T>> {
    require_unit_circle(tau)?;
    let fiber = build_floquet_general(g, tau)?;
    herm_eig_values(&fiber.k)
}

fn require_unit_circle<T: Scalar>(tau: C<T>) -> Result<()> {
    let modulus = tau.norm();
    let tol = T::of(1e-12).max(T::epsilon() * T::of(10.0));
    if (modulus - T::one()).abs() > tol {
        return Err(Error::OffCircle {
            modulus: modulus.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Ascending real spectrum of `K_p(tau)` for `|tau| = 1`.
pub fn floquet_eigenvalues<T: Scalar>(j: &BlockJacobiOperator<T>, tau: C<T>) -> Result<Vec<T>> {
    require_unit_circle(tau)?;
    let fiber = build_floquet(j, tau)?;
    herm_eig_values(&fiber.k)
}

/// `sum_n Tr(b_n^2 + 2 a_n^2)`.
fn second_moment_rhs<T: Scalar>(j: &BlockJacobiOperator<T>) -> T {
    let two = T::of(2.0);
    (0..j.p())
        .map(|i| {
            let b2 = (j.b(i) * j.b(i)).trace().re;
            let a2 = (j.a(i) * j.a(i)).trace().re;
            b2 + two * a2
        })
        .sum()
}

/// Eigenvalue moments of the fiber at `tau` against the coefficient side.
///
/// The literal fiber has a tau-dependent second moment for `p < 3` (the
/// wrap-around blocks overlap), so the second moment is evaluated on the
/// 3p-periodic extension and divided by the factor; the first moment holds
/// at any period and is taken natively.
pub fn moment_report<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    tau: C<T>,
) -> Result<MomentReport<T>> {
    require_unit_circle(tau)?;
    let (jeff, factor) = if j.p() < 3 {
        (j.extended(3)?, 3usize)
    } else {
        (j.clone(), 1usize)
    };
    let vals = floquet_eigenvalues(&jeff, tau)?;
    let f = T::of(factor as f64);
    let s1 = vals.iter().copied().sum::<T>() / f;
    let s2 = vals.iter().map(|v| *v * *v).sum::<T>() / f;
    let rhs1 = j.trace_sum();
    let rhs2 = second_moment_rhs(j);
    let pm = T::of(j.fiber_dim() as f64);
    let c = j.coupling_constant();
    let bound = T::of(2.0) * pm * c.powf(T::of(2.0) / pm);
    Ok(MomentReport {
        tau,
        s1,
        s2,
        rhs1,
        rhs2,
        certificate: s2 - bound,
        extension: factor,
    })
}

/// Residual pair `(|S1 - sum Tr b_n|, |S2 - sum Tr(b_n^2 + 2 a_n^2)|)`.
pub fn verify_trace_identities<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    tau: C<T>,
) -> Result<(T, T)> {
    let report = moment_report(j, tau)?;
    Ok(((report.s1 - report.rhs1).abs(), (report.s2 - report.rhs2).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cplx, unit_circle};

    type Op = BlockJacobiOperator<f64>;
    type M = Matrix<f64>;

    #[test]
    fn free_fiber_p3_at_one() {
        let j = Op::free(3, 1).unwrap();
        let f = build_floquet(&j, cplx(1.0, 0.0)).unwrap();
        let expected = M::from_real_rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        assert!((&f.k - &expected).fro_norm() < 1e-15);
        let vals = floquet_eigenvalues(&j, cplx(1.0, 0.0)).unwrap();
        for (v, e) in vals.iter().zip([-1.0, -1.0, 2.0]) {
            assert!((v - e).abs() < 1e-13);
        }
    }

    #[test]
    fn free_fiber_p1_is_two_cos() {
        let j = Op::free(1, 1).unwrap();
        for x in [0.0, 0.3, 1.2, 2.7] {
            let f = build_floquet(&j, unit_circle(x)).unwrap();
            assert!((f.k[(0, 0)].re - 2.0 * x.cos()).abs() < 1e-14);
            assert!(f.k[(0, 0)].im.abs() < 1e-14);
        }
    }

    #[test]
    fn free_fiber_p2_cancels_at_minus_one() {
        let j = Op::free(2, 1).unwrap();
        let f = build_floquet(&j, cplx(-1.0, 0.0)).unwrap();
        assert!(f.k.fro_norm() < 1e-14, "a_1 + tau^{{-1}} a_2 must vanish");

        let vals = floquet_eigenvalues(&j, cplx(1.0, 0.0)).unwrap();
        for (v, e) in vals.iter().zip([-2.0, 2.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn fiber_is_hermitian_on_circle() {
        let j = Op::random(4, 3, 21, 0.6).unwrap();
        for x in [0.0, 0.7, 2.1, 4.4, 6.0] {
            let f = build_floquet(&j, unit_circle(x)).unwrap();
            let rel = f.k.herm_residual() / f.k.fro_norm();
            assert!(rel < 1e-12, "x={x}: Hermiticity residual {rel:e}");
        }
    }

    #[test]
    fn zero_tau_and_off_circle_are_rejected() {
        let j = Op::free(2, 1).unwrap();
        assert!(matches!(
            build_floquet(&j, cplx(0.0, 0.0)),
            Err(Error::ZeroTau)
        ));
        assert!(matches!(
            floquet_eigenvalues(&j, cplx(0.5, 0.0)),
            Err(Error::OffCircle { .. })
        ));
    }

    #[test]
    fn moment_report_free_p3() {
        let j = Op::free(3, 1).unwrap();
        let r = moment_report(&j, cplx(1.0, 0.0)).unwrap();
        assert!(r.s1.abs() < 1e-13);
        assert!((r.s2 - 6.0).abs() < 1e-12, "S2 = 2pm = 6 for the free fiber");
        assert!(r.certificate.abs() < 1e-10);
        assert_eq!(r.extension, 1);
    }

    #[test]
    fn moment_report_b_perturbation() {
        // S2 = 2pm + Tr b_1^2 = 12.01 for free(3,2) with b_1 = diag(0.1, 0)
        let mut b = vec![M::zeros(2, 2); 3];
        b[0] = M::from_real_rows(&[&[0.1, 0.0], &[0.0, 0.0]]);
        let j = Op::new(vec![M::identity(2); 3], b).unwrap();
        let r = moment_report(&j, cplx(0.0, 1.0)).unwrap();
        assert!((r.s2 - 12.01).abs() < 1e-12);
        assert!((r.certificate - 0.01).abs() < 1e-10);
    }

    #[test]
    fn trace_identities_random_operator() {
        let j = Op::random(5, 2, 33, 0.5).unwrap();
        for x in [0.0, 0.9, 3.3] {
            let (r1, r2) = verify_trace_identities(&j, unit_circle(x)).unwrap();
            let scale1 = j.trace_sum().abs().max(1.0);
            let scale2 = second_moment_rhs(&j).max(1.0);
            assert!(r1 <= 1e-9 * scale1, "S1 residual {r1:e}");
            assert!(r2 <= 1e-9 * scale2, "S2 residual {r2:e}");
        }
    }

    #[test]
    fn trace_identities_free_p4_m2_at_i() {
        let j = Op::free(4, 2).unwrap();
        let (r1, r2) = verify_trace_identities(&j, cplx(0.0, 1.0)).unwrap();
        assert!(r1 < 1e-10);
        assert!(r2 < 1e-10);
    }

    #[test]
    fn second_identity_needs_extension_for_p1() {
        // Native p = 1 fiber at tau = 1: S2 = 4 while the coefficient side
        // gives 2; the identity only applies after period extension.
        let j = Op::free(1, 1).unwrap();
        let vals = floquet_eigenvalues(&j, cplx(1.0, 0.0)).unwrap();
        let s2_native: f64 = vals.iter().map(|v| v * v).sum();
        assert!((s2_native - 4.0).abs() < 1e-14);
        assert!((second_moment_rhs(&j) - 2.0).abs() < 1e-14);

        let r = moment_report(&j, cplx(1.0, 0.0)).unwrap();
        assert_eq!(r.extension, 3);
        assert!((r.s2 - 2.0).abs() < 1e-12, "extension restores the identity");
    }

    #[test]
    fn moments_are_tau_independent() {
        let j = Op::random(3, 3, 8, 0.4).unwrap();
        let r0 = moment_report(&j, unit_circle(0.0)).unwrap();
        for x in [0.5, 1.9, 4.2] {
            let r = moment_report(&j, unit_circle(x)).unwrap();
            assert!((r.s1 - r0.s1).abs() <= 1e-9 * r0.s1.abs().max(1.0));
            assert!((r.s2 - r0.s2).abs() <= 1e-9 * r0.s2.max(1.0));
        }
    }

    #[test]
    fn shift_covariance() {
        let j = Op::random(4, 2, 13, 0.5).unwrap();
        let tau = unit_circle(1.1);
        let base = floquet_eigenvalues(&j, tau).unwrap();
        let shifted = floquet_eigenvalues(&j.shifted(0.8), tau).unwrap();
        for (v, w) in base.iter().zip(&shifted) {
            assert!((v - 0.8 - w).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_b_perturbation_certificate_is_frobenius_squared() {
        let mut b = vec![M::zeros(2, 2); 4];
        b[1] = M::from_real_rows(&[&[0.03, 0.01], &[0.01, -0.02]]);
        b[3] = M::from_real_rows(&[&[0.0, 0.02], &[0.02, 0.05]]);
        let eps2: f64 = b.iter().map(|m| m.fro_norm().powi(2)).sum();
        let j = Op::new(vec![M::identity(2); 4], b).unwrap();
        let r = moment_report(&j, unit_circle(0.4)).unwrap();
        assert!((r.certificate - eps2).abs() < 1e-9);
    }
}
