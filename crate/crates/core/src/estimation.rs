//! Estimation of the displaced-thermal family `ρ_{ζ,N̄}`.
//!
//! Parameters of Fisher matrices and covariances are the displacement
//! quadratures `d = √2 (Re ζ, Im ζ)`. Mean squared errors written as `MSE` are
//! `E|ζ̂ − ζ|²` in amplitude units. Logarithms are natural.

use nalgebra::{DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{ensure, Error, Result};
use crate::ops::heterodyne_sample;
use crate::state::GaussianState;

/// A member of the displaced-thermal family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFamilyPoint {
    pub zeta: Complex64,
    pub nbar: f64,
}

impl GaussianFamilyPoint {
    pub fn new(zeta: Complex64, nbar: f64) -> Result<Self> {
        ensure!(
            zeta.re.is_finite() && zeta.im.is_finite(),
            InvalidArgument,
            "amplitude must be finite"
        );
        check_nbar(nbar)?;
        Ok(Self { zeta, nbar })
    }

    /// Covariance `(2N̄ + 1) I`, displacement `√2 (Re ζ, Im ζ)`.
    pub fn to_state(&self) -> Result<GaussianState> {
        GaussianState::thermal_from_photons(self.nbar)?
            .with_disp(DVector::from_vec(vec![SQRT_2 * self.zeta.re, SQRT_2 * self.zeta.im]))
    }
}

fn check_nbar(nbar: f64) -> Result<()> {
    ensure!(
        nbar.is_finite() && nbar >= 0.0,
        InvalidArgument,
        "thermal photon number {nbar} must be finite and >= 0"
    );
    Ok(())
}

fn check_copies(n: usize) -> Result<()> {
    ensure!(n >= 1, InvalidArgument, "number of copies must be at least 1");
    Ok(())
}

/// Heterodyne MSE `(N̄ + 1)/n` for the amplitude.
pub fn heterodyne_mse(nbar: f64, n_copies: usize) -> Result<f64> {
    check_nbar(nbar)?;
    check_copies(n_copies)?;
    Ok((nbar + 1.0) / n_copies as f64)
}

/// Heterodyne estimator covariance for `d`, `((N̄ + 1)/n) I`.
pub fn heterodyne_covariance(nbar: f64, n_copies: usize) -> Result<Matrix2<f64>> {
    Ok(Matrix2::identity() * heterodyne_mse(nbar, n_copies)?)
}

/// Symmetric logarithmic derivative Fisher matrix, `I/(N̄ + ½)`.
pub fn sld_fisher(nbar: f64) -> Result<Matrix2<f64>> {
    check_nbar(nbar)?;
    Ok(Matrix2::identity() / (nbar + 0.5))
}

/// Kubo–Mori–Bogoliubov Fisher matrix, `ln((1 + N̄)/N̄) I`.
pub fn kmb_fisher(nbar: f64) -> Result<Matrix2<f64>> {
    check_nbar(nbar)?;
    ensure!(
        nbar > 0.0,
        InvalidArgument,
        "KMB Fisher information diverges for a pure state"
    );
    Ok(Matrix2::identity() * (1.0 / nbar).ln_1p())
}

/// Inverse right logarithmic derivative Fisher matrix, `(N̄ + ½) I + (i/2) J`.
pub fn rld_fisher_inverse(nbar: f64) -> Result<Matrix2<Complex64>> {
    check_nbar(nbar)?;
    let diag = Complex64::new(nbar + 0.5, 0.0);
    let off = Complex64::new(0.0, 0.5);
    Ok(Matrix2::new(diag, off, -off, diag))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrices {
    pub sld: Matrix2<f64>,
    pub kmb: Matrix2<f64>,
    pub rld_inverse: Matrix2<Complex64>,
}

pub fn fisher_matrices(nbar: f64) -> Result<FisherMatrices> {
    Ok(FisherMatrices {
        sld: sld_fisher(nbar)?,
        kmb: kmb_fisher(nbar)?,
        rld_inverse: rld_fisher_inverse(nbar)?,
    })
}

fn check_weight(g: &Matrix2<f64>) -> Result<()> {
    ensure!(
        g.iter().all(|v| v.is_finite()),
        InvalidArgument,
        "weight matrix must be finite"
    );
    let scale = 1.0 + g.abs().max();
    ensure!(
        (g[(0, 1)] - g[(1, 0)]).abs() <= 1e-12 * scale,
        InvalidArgument,
        "weight matrix must be symmetric"
    );
    let eig = g.symmetric_eigenvalues();
    ensure!(
        eig.min() >= -1e-12 * scale,
        InvalidArgument,
        "weight matrix must be positive semidefinite"
    );
    Ok(())
}

/// Weighted RLD bound `(N̄ + ½) Tr G + √det G` on `Tr(G V)`.
pub fn rld_weighted_bound(g: &Matrix2<f64>, nbar: f64) -> Result<f64> {
    check_weight(g)?;
    check_nbar(nbar)?;
    Ok((nbar + 0.5) * g.trace() + g.determinant().max(0.0).sqrt())
}

/// Covariance `(N̄ + ½) I + (√det G/2) G⁻¹` that attains the weighted RLD
/// bound with a squeezed ancilla.
pub fn rld_optimal_covariance(g: &Matrix2<f64>, nbar: f64) -> Result<Matrix2<f64>> {
    check_weight(g)?;
    check_nbar(nbar)?;
    let inv = g
        .try_inverse()
        .filter(|_| g.determinant() > 0.0)
        .ok_or_else(|| Error::DegenerateInput("weight matrix is singular".into()))?;
    Ok(Matrix2::identity() * (nbar + 0.5) + inv * (0.5 * g.determinant().sqrt()))
}

fn check_prior(nbar: f64, prior_nbar: f64) -> Result<()> {
    check_nbar(nbar)?;
    ensure!(
        prior_nbar.is_finite() && prior_nbar >= 0.0,
        InvalidArgument,
        "prior width {prior_nbar} must be >= 0"
    );
    ensure!(
        nbar + prior_nbar > 0.0,
        InvalidArgument,
        "thermal and prior photon numbers cannot both vanish"
    );
    Ok(())
}

/// Minimum Bayes MSE under the Gaussian prior `ρ_{0,N̄₁}` on `ζ`:
/// `N̄₁N̄/(N̄₁ + N̄) + N̄₁²/((N̄₁ + N̄ + 1)(N̄₁ + N̄))`.
pub fn bayes_min_mse(nbar: f64, prior_nbar: f64) -> Result<f64> {
    check_prior(nbar, prior_nbar)?;
    let s = prior_nbar + nbar;
    Ok(prior_nbar * nbar / s + prior_nbar * prior_nbar / ((s + 1.0) * s))
}

/// Bayes MSE of the heterodyne outcome shrunk by `N̄₁/(N̄₁ + N̄ + 1)`.
pub fn heterodyne_shrunk_bayes_mse(nbar: f64, prior_nbar: f64) -> Result<f64> {
    check_prior(nbar, prior_nbar)?;
    let k = prior_nbar / (prior_nbar + nbar + 1.0);
    Ok(k * k * (nbar + 1.0) + (1.0 - k).powi(2) * prior_nbar)
}

/// Excess of the unshrunk heterodyne error `N̄ + 1` over the Bayes minimum.
pub fn heterodyne_bayes_gap(nbar: f64, prior_nbar: f64) -> Result<f64> {
    Ok(nbar + 1.0 - bayes_min_mse(nbar, prior_nbar)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonNumberMse {
    /// SLD bound `N̄(N̄ + 1)/n`.
    pub optimal: f64,
    /// Heterodyne value `(N̄ + 1)²/n`.
    pub heterodyne: f64,
}

pub fn photon_number_mse(nbar: f64, n_copies: usize) -> Result<PhotonNumberMse> {
    check_nbar(nbar)?;
    check_copies(n_copies)?;
    let n = n_copies as f64;
    Ok(PhotonNumberMse {
        optimal: nbar * (nbar + 1.0) / n,
        heterodyne: (nbar + 1.0).powi(2) / n,
    })
}

/// `D(ρ_{ζ₀,N̄} ‖ ρ_{ζ₁,N̄}) = |ζ₀ − ζ₁|² ln((N̄ + 1)/N̄)`.
pub fn relative_entropy(zeta0: Complex64, zeta1: Complex64, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    ensure!(
        nbar > 0.0,
        InvalidArgument,
        "relative entropy between distinct pure states diverges"
    );
    Ok((zeta0 - zeta1).norm_sqr() * (1.0 / nbar).ln_1p())
}

/// Root fidelity `exp(−|ζ₀ − ζ₁|²/(2(2N̄ + 1)))`.
pub fn bures_fidelity(zeta0: Complex64, zeta1: Complex64, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    Ok((-(zeta0 - zeta1).norm_sqr() / (2.0 * (2.0 * nbar + 1.0))).exp())
}

/// Optimal error exponent for discriminating `ζ₀` from `ζ₁` with many copies.
pub fn stein_exponent(zeta0: Complex64, zeta1: Complex64, nbar: f64) -> Result<f64> {
    relative_entropy(zeta0, zeta1, nbar)
}

/// The single informative mode `ρ_{√n ζ, N̄}` obtained from `n` copies by a
/// passive interferometer; the other outputs are `ρ_{0,N̄}`.
pub fn concentrate_copies(point: &GaussianFamilyPoint, n_copies: usize) -> Result<GaussianState> {
    check_copies(n_copies)?;
    GaussianFamilyPoint::new(point.zeta * (n_copies as f64).sqrt(), point.nbar)?.to_state()
}

/// Empirical MSE of `α/√n`, with `α` heterodyne on the concentrated mode.
pub fn heterodyne_mse_monte_carlo(
    point: &GaussianFamilyPoint,
    n_copies: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let state = concentrate_copies(point, n_copies)?;
    let scale = 1.0 / (n_copies as f64).sqrt();
    let samples = heterodyne_sample(&state, 0, trials, seed)?;
    Ok(samples.iter().map(|a| (a * scale - point.zeta).norm_sqr()).sum::<f64>() / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn family_point_state() {
        let p = GaussianFamilyPoint::new(c(1.0, -0.5), 2.0).unwrap();
        let s = p.to_state().unwrap();
        assert_eq!(s.cov()[(0, 0)], 5.0);
        assert_relative_eq!(s.disp()[1], -0.5 * SQRT_2);
        assert_relative_eq!(s.mean_photon_number(0).unwrap(), 2.0 + 1.25, epsilon = 1e-12);
        assert!(GaussianFamilyPoint::new(c(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn heterodyne_errors() {
        assert_eq!(heterodyne_mse(0.0, 1).unwrap(), 1.0);
        assert_eq!(heterodyne_mse(1.0, 1).unwrap(), 2.0);
        assert_eq!(heterodyne_mse(1.0, 2).unwrap(), 1.0);
        assert!(heterodyne_mse(1.0, 0).is_err());
        let p = GaussianFamilyPoint::new(c(0.7, 0.2), 1.0).unwrap();
        let mc = heterodyne_mse_monte_carlo(&p, 1, 100_000, 5).unwrap();
        assert!((mc / 2.0 - 1.0).abs() < 0.02, "{mc}");
    }

    #[test]
    fn fisher_information() {
        let f = fisher_matrices(1.0).unwrap();
        assert_relative_eq!(f.sld, Matrix2::identity() * (2.0 / 3.0));
        assert_relative_eq!(f.kmb[(0, 0)], std::f64::consts::LN_2, epsilon = 1e-15);
        assert_eq!(f.rld_inverse[(0, 0)].re, 1.5);
        assert_eq!(f.rld_inverse[(0, 1)], c(0.0, 0.5));
        assert!(kmb_fisher(0.0).is_err());
        for k in 1..=100 {
            let n = 0.1 * k as f64;
            assert!(sld_fisher(n).unwrap()[(0, 0)] <= kmb_fisher(n).unwrap()[(0, 0)]);
        }
    }

    #[test]
    fn rld_bound() {
        let id = Matrix2::identity();
        assert_relative_eq!(rld_weighted_bound(&id, 1.0).unwrap(), 4.0);
        assert_relative_eq!(heterodyne_covariance(1.0, 1).unwrap().trace(), 4.0);
        assert_relative_eq!(rld_weighted_bound(&Matrix2::new(1.0, 0.0, 0.0, 0.0), 1.0).unwrap(), 1.5);
        let g = Matrix2::new(2.0, 0.3, 0.3, 0.5);
        let v = rld_optimal_covariance(&g, 0.7).unwrap();
        assert_relative_eq!(
            (g * v).trace(),
            rld_weighted_bound(&g, 0.7).unwrap(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            rld_weighted_bound(&(g * 3.0), 0.7).unwrap(),
            3.0 * rld_weighted_bound(&g, 0.7).unwrap()
        );
        assert!(rld_weighted_bound(&Matrix2::new(1.0, 0.0, 0.0, -1.0), 1.0).is_err());
        assert!(rld_optimal_covariance(&Matrix2::new(1.0, 0.0, 0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn bayes() {
        assert_relative_eq!(bayes_min_mse(1.0, 1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(bayes_min_mse(1.0, 0.0).unwrap(), 0.0);
        assert!(bayes_min_mse(0.0, 0.0).is_err());
        let mut prev = f64::INFINITY;
        for k in 0..60 {
            let prior = 0.25 * 1.3f64.powi(k);
            let gap = heterodyne_bayes_gap(1.0, prior).unwrap();
            assert!(gap < prev && gap > 0.0);
            prev = gap;
            assert_relative_eq!(
                heterodyne_shrunk_bayes_mse(1.0, prior).unwrap(),
                bayes_min_mse(1.0, prior).unwrap(),
                max_relative = 1e-12
            );
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn photon_number() {
        let m = photon_number_mse(1.0, 1).unwrap();
        assert_eq!((m.optimal, m.heterodyne), (2.0, 4.0));
        assert_eq!(photon_number_mse(0.0, 3).unwrap().optimal, 0.0);
        let m = photon_number_mse(3.0, 7).unwrap();
        assert_relative_eq!(m.heterodyne / m.optimal, 4.0 / 3.0);
    }

    #[test]
    fn distances() {
        let z = c(0.3, 0.4);
        assert_eq!(relative_entropy(z, z, 1.0).unwrap(), 0.0);
        assert_eq!(bures_fidelity(z, z, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            relative_entropy(c(0.0, 0.0), c(1.0, 0.0), 1.0).unwrap(),
            std::f64::consts::LN_2
        );
        assert!(relative_entropy(z, z, 0.0).is_err());
        assert_relative_eq!(
            bures_fidelity(c(0.0, 0.0), c(0.3, 0.0), 0.0).unwrap(),
            0.9559974818331,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            bures_fidelity(c(0.0, 0.0), c(1.0, 0.0), 1.0).unwrap(),
            0.846481724890614,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            bures_fidelity(c(0.0, 0.0), c(1.0, 0.0), 0.5).unwrap(),
            0.7788007830714049,
            epsilon = 1e-12
        );
        assert_eq!(
            stein_exponent(z, c(1.0, 1.0), 0.4).unwrap(),
            relative_entropy(z, c(1.0, 1.0), 0.4).unwrap()
        );
        assert_relative_eq!(
            stein_exponent(c(0.0, 0.0), c(2.0, 0.0), 1.0).unwrap(),
            4.0 * stein_exponent(c(0.0, 0.0), c(1.0, 0.0), 1.0).unwrap()
        );
    }

    #[test]
    fn relative_entropy_curvature() {
        for nbar in [0.2, 1.0, 4.0] {
            let kmb = kmb_fisher(nbar).unwrap()[(0, 0)];
            for h in [1e-3, 1e-2] {
                let d = relative_entropy(c(0.0, 0.0), c(h / SQRT_2, 0.0), nbar).unwrap();
                assert_relative_eq!(d, 0.5 * kmb * h * h, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn concentration() {
        let p = GaussianFamilyPoint::new(c(0.5, -0.25), 0.3).unwrap();
        assert_eq!(concentrate_copies(&p, 1).unwrap(), p.to_state().unwrap());
        let four = concentrate_copies(&p, 4).unwrap();
        assert_relative_eq!(four.disp()[0], 2.0 * p.to_state().unwrap().disp()[0], epsilon = 1e-15);
        assert_eq!(four.cov(), p.to_state().unwrap().cov());
    }
}
