//! Fundamental solutions, the monodromy matrix, multipliers, and the
//! determinant identity linking the two spectral pictures.
//!
//! The three-term recursion `a_n y_{n+1} + b_n y_n + a_{n-1} y_{n-1} = z y_n`
//! (coefficients positive definite, so the adjoint on `a_{n-1}` is dropped)
//! propagates the matrix solutions theta and phi with initial data
//! `theta_0 = phi_1 = I`, `theta_1 = phi_0 = 0`. Periodicity identifies
//! `a_0` with `a_p`.

use crate::error::{Error, Result};
use crate::floquet::build_floquet;
use crate::linalg::{det, gen_eig, matched_max_distance, solve};
use crate::matrix::Matrix;
use crate::operator::BlockJacobiOperator;
use crate::scalar::{re, Scalar, C};

/// Matrix solutions theta_0..theta_{p+1} and phi_0..phi_{p+1} at `z`.
#[derive(Debug, Clone)]
pub struct FundamentalPair<T: Scalar> {
    pub z: C<T>,
    pub theta: Vec<Matrix<T>>,
    pub phi: Vec<Matrix<T>>,
}

/// The 2m x 2m one-period propagator and its multiplier multiset.
#[derive(Debug, Clone)]
pub struct MonodromyMatrix<T: Scalar> {
    pub z: C<T>,
    pub m: Matrix<T>,
    pub multipliers: Vec<C<T>>,
}

pub fn fundamental_solutions<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    z: C<T>,
) -> Result<FundamentalPair<T>> {
    let p = j.p();
    let m = j.m();
    let mut theta = vec![Matrix::identity(m), Matrix::zeros(m, m)];
    let mut phi = vec![Matrix::zeros(m, m), Matrix::identity(m)];
    for n in 1..=p {
        let an = j.a(n - 1);
        let aprev = j.a((n + p - 2) % p);
        let zb = &Matrix::scalar(m, z) - j.b(n - 1);
        let t = &(&zb * &theta[n]) - &(aprev * &theta[n - 1]);
        theta.push(solve(an, &t)?);
        let f = &(&zb * &phi[n]) - &(aprev * &phi[n - 1]);
        phi.push(solve(an, &f)?);
    }
    Ok(FundamentalPair { z, theta, phi })
}

/// `M_p(z) = [[theta_p, phi_p], [theta_{p+1}, phi_{p+1}]]` with its
/// multipliers. `det M_p(z) = 1` identically (the one-step determinants
/// telescope over a period).
pub fn monodromy_matrix<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    z: C<T>,
) -> Result<MonodromyMatrix<T>> {
    let mat = assemble_monodromy(j, z)?;
    let multipliers = gen_eig(&mat)?.values;
    Ok(MonodromyMatrix {
        z,
        m: mat,
        multipliers,
    })
}

/// Characteristic function `D_p(z, tau) = det(M_p(z) - tau I)`.
pub fn char_det<T: Scalar>(j: &BlockJacobiOperator<T>, z: C<T>, tau: C<T>) -> Result<C<T>> {
    if tau.norm_sqr() == T::zero() {
        return Err(Error::ZeroTau);
    }
    let mono = assemble_monodromy(j, z)?;
    let shifted = &mono - &Matrix::scalar(mono.rows(), tau);
    det(&shifted)
}

fn assemble_monodromy<T: Scalar>(j: &BlockJacobiOperator<T>, z: C<T>) -> Result<Matrix<T>> {
    let p = j.p();
    let m = j.m();
    let pair = fundamental_solutions(j, z)?;
    let mut mat = Matrix::zeros(2 * m, 2 * m);
    mat.set_block(0, 0, &pair.theta[p]);
    mat.set_block(0, m, &pair.phi[p]);
    mat.set_block(m, 0, &pair.theta[p + 1]);
    mat.set_block(m, m, &pair.phi[p + 1]);
    Ok(mat)
}

/// Relative residual of the identity
/// `D_p(z, tau) = c^{-1} (-tau)^m det(z I - K_p(tau))`, valid for any
/// nonzero `tau` (the fiber matrix is used off the unit circle here).
///
/// With the monodromy normalized by the fundamental solutions — which makes
/// `det M_p = 1` — the coupling constant enters inversely: the leading
/// `z^{pm}` coefficient of `D_p` is `(-tau)^m / c` while `det(zI - K_p)` is
/// monic. The two sides agree identically.
pub fn verify_det_identity<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    z: C<T>,
    tau: C<T>,
) -> Result<T> {
    let lhs = char_det(j, z, tau)?;
    let fiber = build_floquet(j, tau)?;
    let n = fiber.k.rows();
    let zk = &Matrix::scalar(n, z) - &fiber.k;
    let dk = det(&zk)?;
    let c_inv = re(j.coupling_constant().recip());
    let m = j.m() as i32;
    let rhs = c_inv * (-tau).powi(m) * dk;
    Ok((lhs - rhs).norm() / lhs.norm().max(T::one()))
}

/// Spectrum membership of a real `z` through the multiplier criterion:
/// `z` is in the spectrum iff some multiplier is unimodular. Returns the
/// verdict at `tol_circle` together with `min_j ||tau_j(z)| - 1|`.
pub fn spectral_membership<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    z: T,
    tol_circle: T,
) -> Result<(bool, T)> {
    let mono = monodromy_matrix(j, re(z))?;
    let dist = mono
        .multipliers
        .iter()
        .map(|t| (t.norm() - T::one()).abs())
        .fold(T::infinity(), |a, b| a.min(b));
    Ok((dist <= tol_circle, dist))
}

/// Matched-pair deviation between the multipliers of the `pk`-periodic
/// extension and the k-th powers of the original multipliers.
pub fn multiplier_power_check<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    k: usize,
    z: C<T>,
) -> Result<T> {
    if k < 1 {
        return Err(Error::InvalidDimension(
            "power-check factor must be >= 1".into(),
        ));
    }
    let base = monodromy_matrix(j, z)?;
    let extended = monodromy_matrix(&j.extended(k)?, z)?;
    let powers: Vec<C<T>> = base
        .multipliers
        .iter()
        .map(|t| t.powi(k as i32))
        .collect();
    Ok(matched_max_distance(&extended.multipliers, &powers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matched_max_distance;
    use crate::scalar::cplx;

    type Op = BlockJacobiOperator<f64>;
    type M = Matrix<f64>;

    #[test]
    fn initial_conditions_and_scalar_recursion() {
        let j = Op::free(1, 1).unwrap();
        let z = cplx(1.7, 0.0);
        let pair = fundamental_solutions(&j, z).unwrap();
        // theta_1 = 0, phi_1 = I always; free scalar step gives
        // theta_2 = -1, phi_2 = z.
        assert!(pair.theta[1].fro_norm() < 1e-15);
        assert!((&pair.phi[1] - &M::identity(1)).fro_norm() < 1e-15);
        assert!((pair.theta[2][(0, 0)].re + 1.0).abs() < 1e-15);
        assert!((pair.phi[2][(0, 0)] - z).norm() < 1e-15);
    }

    #[test]
    fn free_p2_phi3_is_z_squared_minus_one() {
        let j = Op::free(2, 1).unwrap();
        for zr in [-1.3, 0.4, 2.2] {
            let z = cplx(zr, 0.0);
            let pair = fundamental_solutions(&j, z).unwrap();
            assert!((pair.phi[3][(0, 0)].re - (zr * zr - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn free_scalar_monodromy_block_form() {
        let j = Op::free(1, 1).unwrap();
        let z = cplx(0.6, 0.0);
        let mono = monodromy_matrix(&j, z).unwrap();
        let expected = M::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.6]]);
        assert!((&mono.m - &expected).fro_norm() < 1e-15);
    }

    #[test]
    fn free_multipliers_at_origin_are_imaginary_units() {
        let j = Op::free(1, 1).unwrap();
        let mono = monodromy_matrix(&j, cplx(0.0, 0.0)).unwrap();
        let expected = [cplx::<f64>(0.0, -1.0), cplx(0.0, 1.0)];
        assert!(matched_max_distance(&mono.multipliers, &expected) < 1e-12);
    }

    #[test]
    fn unit_determinant_for_random_operators() {
        let j = Op::random(4, 2, 61, 0.5).unwrap();
        for (zr, zi) in [(0.3, 0.2), (-1.1, 0.9), (2.4, -0.7), (0.0, 0.0)] {
            let mono = monodromy_matrix(&j, cplx(zr, zi)).unwrap();
            let d = det(&mono.m).unwrap();
            assert!(
                (d - cplx(1.0, 0.0)).norm() < 1e-9,
                "det M = {d} at z = {zr}+{zi}i"
            );
        }
    }

    #[test]
    fn char_det_free_scalar_closed_form() {
        // D_1(z, tau) = tau^2 - tau z + 1
        let j = Op::free(1, 1).unwrap();
        for (zr, tr, ti) in [(0.4, 0.8, 0.6), (1.9, -0.3, 1.1), (-2.5, 1.4, 0.0)] {
            let z = cplx(zr, 0.0);
            let tau = cplx(tr, ti);
            let d = char_det(&j, z, tau).unwrap();
            let expected = tau * tau - tau * z + cplx(1.0, 0.0);
            assert!((d - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn char_det_matches_multiplier_product() {
        let j = Op::random(3, 2, 19, 0.4).unwrap();
        let z = cplx(0.7, 0.3);
        let tau = cplx(0.9, -0.5);
        let mono = monodromy_matrix(&j, z).unwrap();
        let product: C<f64> = mono
            .multipliers
            .iter()
            .map(|t| *t - tau)
            .product();
        let d = char_det(&j, z, tau).unwrap();
        assert!(
            (d - product).norm() <= 1e-8 * d.norm().max(1.0),
            "product form {product} vs determinant {d}"
        );
        // D vanishes at a multiplier
        let at_mult = char_det(&j, z, mono.multipliers[0]).unwrap();
        assert!(at_mult.norm() <= 1e-8, "|D(multiplier)| = {:e}", at_mult.norm());
    }

    #[test]
    fn det_identity_free_scalar_all_points() {
        let j = Op::free(1, 1).unwrap();
        for (zr, tr, ti) in [(0.2, 1.0, 0.0), (3.0, 0.5, 0.5), (-1.4, -0.8, 0.3)] {
            let r = verify_det_identity(&j, cplx(zr, 0.0), cplx(tr, ti)).unwrap();
            assert!(r < 1e-12, "residual {r:e} at z={zr}");
        }
    }

    #[test]
    fn det_identity_random_operator() {
        let j = Op::random(4, 2, 91, 0.5).unwrap();
        for (zr, zi, tr, ti) in [
            (0.5, 0.4, 1.2, 0.3),
            (-2.0, 1.0, 0.4, -0.4),
            (2.9, -0.8, -1.5, 0.9),
        ] {
            let r = verify_det_identity(&j, cplx(zr, zi), cplx(tr, ti)).unwrap();
            assert!(r <= 1e-8, "residual {r:e}");
        }
    }

    #[test]
    fn det_identity_far_from_spectrum() {
        let j = Op::free(2, 1).unwrap();
        let lhs = char_det(&j, cplx(10.0, 0.0), cplx(1.0, 0.0)).unwrap();
        assert!(lhs.norm() > 1.0, "no eigenvalue near z = 10");
        let r = verify_det_identity(&j, cplx(10.0, 0.0), cplx(1.0, 0.0)).unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn membership_on_free_operator() {
        let j = Op::free(1, 1).unwrap();
        let (inside, d0) = spectral_membership(&j, 0.0, 1e-6).unwrap();
        assert!(inside, "0 lies in [-2,2], distance {d0:e}");
        let (outside, d3) = spectral_membership(&j, 3.0, 1e-6).unwrap();
        assert!(!outside);
        // multipliers at z=3 are (3 +- sqrt(5))/2
        let expected = ((3.0 + 5.0f64.sqrt()) / 2.0 - 1.0).min(1.0 - (3.0 - 5.0f64.sqrt()) / 2.0);
        assert!((d3 - expected).abs() < 1e-9);
        let (edge, _) = spectral_membership(&j, 2.0, 1e-6).unwrap();
        assert!(edge, "band edge is in the spectrum");
    }

    #[test]
    fn reciprocal_and_conjugation_closure() {
        let j = Op::random(3, 2, 17, 0.5).unwrap();
        for zr in [-1.2, 0.1, 1.8] {
            let mono = monodromy_matrix(&j, cplx(zr, 0.0)).unwrap();
            let inverses: Vec<C<f64>> = mono.multipliers.iter().map(|t| t.inv()).collect();
            let conjugates: Vec<C<f64>> = mono.multipliers.iter().map(|t| t.conj()).collect();
            assert!(
                matched_max_distance(&mono.multipliers, &inverses) < 1e-8,
                "reciprocal pairing at z={zr}"
            );
            assert!(
                matched_max_distance(&mono.multipliers, &conjugates) < 1e-8,
                "conjugation closure at z={zr}"
            );
        }
    }

    #[test]
    fn multiplier_powers_match_extension() {
        let j = Op::free(1, 1).unwrap();
        // k = 2 at z = 0: {i, -i}^2 = {-1, -1}
        let ext = monodromy_matrix(&j.extended(2).unwrap(), cplx(0.0, 0.0)).unwrap();
        let expected = [cplx::<f64>(-1.0, 0.0), cplx(-1.0, 0.0)];
        assert!(matched_max_distance(&ext.multipliers, &expected) < 1e-8);

        assert!(multiplier_power_check(&j, 1, cplx(0.3, 0.0)).unwrap() < 1e-12);

        let j = Op::random(2, 2, 55, 0.4).unwrap();
        let r = multiplier_power_check(&j, 3, cplx(0.9, 0.0)).unwrap();
        assert!(r <= 1e-8, "power law residual {r:e}");
    }

    #[test]
    fn zero_tau_rejected() {
        let j = Op::free(1, 1).unwrap();
        assert!(matches!(
            char_det(&j, cplx(0.1, 0.0), cplx(0.0, 0.0)),
            Err(Error::ZeroTau)
        ));
    }
}
