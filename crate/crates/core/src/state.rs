//! Gaussian states: covariance matrix plus displacement.
//!
//! Conventions: interleaved ordering `(x1, p1, …, xn, pn)`, vacuum covariance
//! `I`, quadratures `x = (a + a†)/√2`, so a coherent amplitude `α` sits at
//! displacement `√2 (Re α, Im α)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};
use crate::linalg::{
    self, inf_norm, is_symmetric, min_hermitian_eigenvalue, min_symmetric_eigenvalue, psd_tolerance,
    quadrature_indices, sym_tolerance, symplectic_form, PURITY_TOL,
};

/// Below this argument `g` evaluates to exactly zero.
const G_FLOOR: f64 = 1e-14;

/// Entropy (nats) of a thermal mode with mean photon number `x`:
/// `g(x) = (x+1) ln(x+1) − x ln x`, with `g(x) = 0` for `x ≤ 1e-14`.
pub fn g_function(x: f64) -> f64 {
    if x <= G_FLOOR {
        return 0.0;
    }
    (x + 1.0) * x.ln_1p() - x * x.ln()
}

/// Symplectic eigenvalues, descending, one per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ g((ν_j − 1)/2)`, clamping `ν` into `[1, ∞)` first.
    pub fn entropy(&self) -> f64 {
        self.values
            .iter()
            .map(|&nu| g_function((nu.max(1.0) - 1.0) / 2.0))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateDocument", into = "StateDocument")]
pub struct GaussianState {
    cov: DMatrix<f64>,
    disp: DVector<f64>,
}

impl GaussianState {
    /// Builds a state from a covariance matrix and displacement.
    ///
    /// The covariance must be square with even dimension, symmetric within
    /// `1e-10·(1+‖γ‖_∞)` and positive definite. Physicality (`γ + iJ ⪰ 0`) is
    /// not required here; see [`GaussianState::is_physical`].
    pub fn new(cov: DMatrix<f64>, disp: DVector<f64>) -> Result<Self> {
        let dim = cov.nrows();
        ensure!(
            cov.is_square(),
            InvalidState,
            "covariance is {}x{}",
            cov.nrows(),
            cov.ncols()
        );
        ensure!(
            dim > 0 && dim.is_multiple_of(2),
            InvalidState,
            "covariance dimension {dim} is not 2n with n >= 1"
        );
        ensure!(
            disp.len() == dim,
            InvalidState,
            "displacement length {} != {dim}",
            disp.len()
        );
        ensure!(
            cov.iter().chain(disp.iter()).all(|v| v.is_finite()),
            InvalidState,
            "non-finite entries"
        );
        ensure!(
            is_symmetric(&cov, sym_tolerance(&cov)),
            InvalidState,
            "covariance is not symmetric"
        );
        let cov = linalg::symmetrized(&cov);
        ensure!(
            min_symmetric_eigenvalue(&cov) > 0.0,
            InvalidState,
            "covariance is not positive definite"
        );
        Ok(Self { cov, disp })
    }

    /// Zero-displacement state with the given covariance.
    pub fn centered(cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        Self::new(cov, DVector::zeros(n))
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        ensure!(n_modes >= 1, InvalidArgument, "vacuum needs at least one mode");
        Ok(Self {
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
            disp: DVector::zeros(2 * n_modes),
        })
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            cov: DMatrix::identity(2, 2),
            disp: DVector::from_vec(vec![2f64.sqrt() * alpha.re, 2f64.sqrt() * alpha.im]),
        }
    }

    /// Thermal state with symplectic eigenvalue `ν = 2n̄ + 1`.
    pub fn thermal(nu: f64) -> Result<Self> {
        ensure!(nu.is_finite(), InvalidArgument, "thermal eigenvalue must be finite");
        ensure!(nu >= 1.0, Unphysical, "thermal eigenvalue {nu} < 1");
        Ok(Self {
            cov: DMatrix::identity(2, 2) * nu,
            disp: DVector::zeros(2),
        })
    }

    pub fn thermal_from_photons(nbar: f64) -> Result<Self> {
        ensure!(nbar >= 0.0, InvalidArgument, "mean photon number {nbar} < 0");
        Self::thermal(2.0 * nbar + 1.0)
    }

    /// Squeezed vacuum `diag(e^{−2r}, e^{2r})`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        Self {
            cov: DMatrix::from_diagonal(&DVector::from_vec(vec![(-2.0 * r).exp(), (2.0 * r).exp()])),
            disp: DVector::zeros(2),
        }
    }

    /// Two-mode squeezed vacuum: diagonal blocks `cosh 2r·I`, off-diagonal
    /// blocks `diag(sinh 2r, −sinh 2r)`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        Self {
            cov,
            disp: DVector::zeros(4),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn disp(&self) -> &DVector<f64> {
        &self.disp
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DVector<f64>) {
        (self.cov, self.disp)
    }

    /// Same covariance, new displacement.
    pub fn with_disp(&self, disp: DVector<f64>) -> Result<Self> {
        ensure!(
            disp.len() == self.disp.len(),
            InvalidArgument,
            "displacement length mismatch"
        );
        Ok(Self {
            cov: self.cov.clone(),
            disp,
        })
    }

    /// `γ + iJ ⪰ 0` within `1e-9·(1+‖γ‖_∞)`.
    pub fn is_physical(&self) -> bool {
        let j = symplectic_form(self.n_modes());
        min_hermitian_eigenvalue(&self.cov, &j) >= -psd_tolerance(&self.cov)
    }

    pub fn is_pure(&self) -> bool {
        (self.cov.determinant() - 1.0).abs() <= PURITY_TOL
    }

    pub(crate) fn require_physical(&self) -> Result<()> {
        ensure!(self.is_physical(), Unphysical, "covariance violates gamma + iJ >= 0");
        Ok(())
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        ensure!(
            mode < self.n_modes(),
            InvalidArgument,
            "mode {mode} out of range for {} modes",
            self.n_modes()
        );
        Ok(())
    }

    /// Moduli of the eigenvalues of `Jγ`, which come in `±iν` pairs.
    pub fn symplectic_eigenvalues(&self) -> Result<SymplecticSpectrum> {
        let n = self.n_modes();
        let jg = symplectic_form(n) * &self.cov;
        let eig = jg.complex_eigenvalues();
        let tol = 1e-8 * (1.0 + inf_norm(&self.cov));
        if let Some(bad) = eig.iter().find(|z| z.re.abs() > tol || !z.im.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "eigenvalue {bad} of J*gamma is not purely imaginary"
            )));
        }
        let mut moduli: Vec<f64> = eig.iter().map(|z| z.im.abs()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        let values = moduli.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();
        Ok(SymplecticSpectrum { values })
    }

    /// Von Neumann entropy in nats.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        self.require_physical()?;
        Ok(self.symplectic_eigenvalues()?.entropy())
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        ensure!(
            !keep.is_empty(),
            InvalidArgument,
            "partial trace must keep at least one mode"
        );
        for (i, &m) in keep.iter().enumerate() {
            self.check_mode(m)?;
            ensure!(!keep[..i].contains(&m), InvalidArgument, "mode {m} listed twice");
        }
        let idx = quadrature_indices(keep);
        Ok(Self {
            cov: linalg::submatrix(&self.cov, &idx, &idx),
            disp: linalg::subvector(&self.disp, &idx),
        })
    }

    /// `self ⊗ other`, with the modes of `self` first.
    pub fn tensor(&self, other: &Self) -> Self {
        let disp = DVector::from_iterator(
            self.disp.len() + other.disp.len(),
            self.disp.iter().chain(other.disp.iter()).copied(),
        );
        Self {
            cov: linalg::direct_sum(&self.cov, &other.cov),
            disp,
        }
    }

    /// `⟨a†a⟩` of one mode: `¼(Tr γ_j − 2) + ½(d_x² + d_p²)`.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let (i, j) = (2 * mode, 2 * mode + 1);
        let trace = self.cov[(i, i)] + self.cov[(j, j)];
        Ok(0.25 * (trace - 2.0) + 0.5 * (self.disp[i].powi(2) + self.disp[j].powi(2)))
    }

    /// `W(ξ) = exp[−(ξ−d)ᵀγ⁻¹(ξ−d)] / (πⁿ √det γ)`.
    pub fn wigner(&self, point: &DVector<f64>) -> Result<f64> {
        ensure!(
            point.len() == self.disp.len(),
            InvalidArgument,
            "phase-space point has wrong length"
        );
        let chol = self
            .cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NumericalFailure("covariance is not invertible".into()))?;
        let delta = point - &self.disp;
        let quad = delta.dot(&chol.solve(&delta));
        let det = chol.determinant();
        Ok((-quad).exp() / (PI.powi(self.n_modes() as i32) * det.sqrt()))
    }
}

/// `β` with `e^{−β} = (ν − 1)/(ν + 1)` for a thermal mode.
pub fn thermal_beta(nu: f64) -> Result<f64> {
    ensure!(nu >= 1.0, Unphysical, "thermal eigenvalue {nu} < 1");
    Ok(((nu + 1.0) / (nu - 1.0)).ln())
}

/// JSON layout: `{"n_modes": k, "cov": [[…] × 2k], "disp": [… 2k]}`.
#[derive(Debug, Serialize, Deserialize)]
struct StateDocument {
    n_modes: usize,
    cov: Vec<Vec<f64>>,
    disp: Vec<f64>,
}

impl TryFrom<StateDocument> for GaussianState {
    type Error = Error;

    fn try_from(doc: StateDocument) -> Result<Self> {
        let dim = 2 * doc.n_modes;
        ensure!(
            doc.cov.len() == dim,
            InvalidState,
            "cov has {} rows, expected {dim}",
            doc.cov.len()
        );
        ensure!(
            doc.cov.iter().all(|row| row.len() == dim),
            InvalidState,
            "cov rows must have length {dim}"
        );
        let cov = DMatrix::from_fn(dim, dim, |i, j| doc.cov[i][j]);
        GaussianState::new(cov, DVector::from_vec(doc.disp))
    }
}

impl From<GaussianState> for StateDocument {
    fn from(s: GaussianState) -> Self {
        let dim = s.cov.nrows();
        StateDocument {
            n_modes: dim / 2,
            cov: (0..dim).map(|i| s.cov.row(i).iter().copied().collect()).collect(),
            disp: s.disp.iter().copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Fock-basis oracles, truncated at 200 levels.
    const FOCK_CUTOFF: usize = 200;

    fn fock_thermal_entropy(nbar: f64) -> f64 {
        let lambda = nbar / (nbar + 1.0);
        (0..FOCK_CUTOFF)
            .map(|n| (1.0 - lambda) * lambda.powi(n as i32))
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    fn fock_thermal_mean(nbar: f64) -> f64 {
        let lambda = nbar / (nbar + 1.0);
        (0..FOCK_CUTOFF)
            .map(|n| n as f64 * (1.0 - lambda) * lambda.powi(n as i32))
            .sum()
    }

    fn fock_coherent_mean(alpha: Complex64) -> f64 {
        // Poisson weights built iteratively to avoid factorial overflow.
        let mu = alpha.norm_sqr();
        let mut p = (-mu).exp();
        let mut mean = 0.0;
        for n in 1..FOCK_CUTOFF {
            p *= mu / n as f64;
            mean += n as f64 * p;
        }
        mean
    }

    /// Returns (total probability, mean photon number) of the squeezed
    /// vacuum from its even-number amplitudes.
    fn fock_squeezed_moments(r: f64) -> (f64, f64) {
        let t = r.tanh();
        let mut amp2 = 1.0 / r.cosh();
        let (mut total, mut mean) = (amp2, 0.0);
        for m in 1..FOCK_CUTOFF / 2 {
            // |c_{2m}|² / |c_{2m−2}|² = t² (2m)(2m−1) / (4 m²)
            let mf = m as f64;
            amp2 *= t * t * (2.0 * mf) * (2.0 * mf - 1.0) / (4.0 * mf * mf);
            total += amp2;
            mean += 2.0 * mf * amp2;
        }
        (total, mean)
    }

    #[test]
    fn vacuum_constructor() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.cov(), &DMatrix::identity(2, 2));
        assert_eq!(v.disp(), &DVector::zeros(2));
        assert_eq!(GaussianState::vacuum(2).unwrap().cov(), &DMatrix::identity(4, 4));
        assert_eq!(v.von_neumann_entropy().unwrap(), 0.0);
        assert!(matches!(GaussianState::vacuum(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn coherent_state_displacement() {
        assert_eq!(
            GaussianState::coherent(Complex64::new(0.0, 0.0)),
            GaussianState::vacuum(1).unwrap()
        );
        let s = GaussianState::coherent(Complex64::new(1.0, 0.5));
        assert_relative_eq!(s.disp()[0], std::f64::consts::SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(s.disp()[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(s.mean_photon_number(0).unwrap(), 1.25, epsilon = 1e-14);
    }

    #[test]
    fn thermal_state_properties() {
        assert_eq!(GaussianState::thermal(1.0).unwrap(), GaussianState::vacuum(1).unwrap());
        let reduced = GaussianState::two_mode_squeezed(1.0).partial_trace(&[0]).unwrap();
        let thermal = GaussianState::thermal(2f64.cosh()).unwrap();
        assert!(linalg::max_abs_diff(reduced.cov(), thermal.cov()) < 1e-12);
        assert_relative_eq!(thermal_beta(3.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(matches!(GaussianState::thermal(0.9), Err(Error::Unphysical(_))));
        let t = GaussianState::thermal(4.0).unwrap();
        assert_relative_eq!(t.mean_photon_number(0).unwrap(), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_vacuum_covariance() {
        assert_eq!(GaussianState::squeezed_vacuum(0.0), GaussianState::vacuum(1).unwrap());
        let s = GaussianState::squeezed_vacuum(1.0);
        assert_relative_eq!(s.cov()[(0, 0)], 0.13534, epsilon = 1e-5);
        assert_relative_eq!(s.cov()[(1, 1)], 7.38906, epsilon = 1e-5);
        for r in [-2.0, -0.3, 0.0, 0.7, 1.5, 3.0] {
            let s = GaussianState::squeezed_vacuum(r);
            assert!(s.is_pure());
            assert!(s.is_physical());
        }
    }

    #[test]
    fn two_mode_squeezed_entries_and_correlations() {
        assert_eq!(GaussianState::two_mode_squeezed(0.0), GaussianState::vacuum(2).unwrap());
        let s = GaussianState::two_mode_squeezed(1.0);
        assert_relative_eq!(s.cov()[(0, 0)], 3.76220, epsilon = 1e-5);
        assert_relative_eq!(s.cov()[(0, 2)], 3.62686, epsilon = 1e-5);
        assert_relative_eq!(s.cov()[(1, 3)], -3.62686, epsilon = 1e-5);
        for r in [0.2, 1.0, 2.0] {
            let g = GaussianState::two_mode_squeezed(r);
            let c = g.cov();
            // Var(x1 − x2) and Var(p1 + p2) with vacuum variance ½.
            let var_x = 0.5 * (c[(0, 0)] + c[(2, 2)] - 2.0 * c[(0, 2)]);
            let var_p = 0.5 * (c[(1, 1)] + c[(3, 3)] + 2.0 * c[(1, 3)]);
            assert_relative_eq!(var_x, (-2.0 * r).exp(), max_relative = 1e-10);
            assert_relative_eq!(var_p, (-2.0 * r).exp(), max_relative = 1e-10);
            assert!(g.is_pure());
        }
    }

    #[test]
    fn physicality() {
        assert!(GaussianState::vacuum(1).unwrap().is_physical());
        let half = GaussianState::centered(DMatrix::identity(2, 2) * 0.5).unwrap();
        assert!(!half.is_physical());
        assert_relative_eq!(half.symplectic_eigenvalues().unwrap().min(), 0.5, epsilon = 1e-12);
        assert!(matches!(half.von_neumann_entropy(), Err(Error::Unphysical(_))));
        assert!(GaussianState::two_mode_squeezed(2.0).is_physical());
    }

    #[test]
    fn rejects_malformed_covariances() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(GaussianState::centered(asym), Err(Error::InvalidState(_))));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            GaussianState::centered(indefinite),
            Err(Error::InvalidState(_))
        ));
        let odd = DMatrix::identity(3, 3);
        assert!(GaussianState::centered(odd).is_err());
    }

    #[test]
    fn symplectic_spectra() {
        let v = GaussianState::vacuum(3).unwrap().symplectic_eigenvalues().unwrap();
        assert!(v.values().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let reduced = GaussianState::two_mode_squeezed(1.0).partial_trace(&[1]).unwrap();
        assert_relative_eq!(
            reduced.symplectic_eigenvalues().unwrap().values()[0],
            3.76220,
            epsilon = 1e-5
        );
        let nu = 2.5;
        let prod = GaussianState::thermal(nu)
            .unwrap()
            .tensor(&GaussianState::squeezed_vacuum(0.8));
        let spec = prod.symplectic_eigenvalues().unwrap();
        assert_relative_eq!(spec.values()[0], nu, epsilon = 1e-10);
        assert_relative_eq!(spec.values()[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn reduced_tmss_eigenvalue_is_exact() {
        for r in [0.1, 0.5, 1.0, 2.0] {
            let nu = GaussianState::two_mode_squeezed(r)
                .partial_trace(&[0])
                .unwrap()
                .symplectic_eigenvalues()
                .unwrap()
                .values()[0];
            assert!((nu - (2.0 * r).cosh()).abs() <= 1e-12 * (2.0 * r).cosh());
        }
    }

    #[test]
    fn entropy_against_fock_oracle() {
        let reduced = GaussianState::two_mode_squeezed(1.0).partial_trace(&[0]).unwrap();
        let s = reduced.von_neumann_entropy().unwrap();
        assert_relative_eq!(s, 1.6198, epsilon = 1e-4);
        assert!((s - fock_thermal_entropy(1f64.sinh().powi(2))).abs() < 1e-8);
        assert!((g_function(5.0) - fock_thermal_entropy(5.0)).abs() < 1e-8);
        assert_relative_eq!(g_function(5.0), 2.703367, epsilon = 1e-6);
    }

    #[test]
    fn single_mode_fock_oracles() {
        for nbar in [0.0, 0.3, 1.0, 2.5, 5.0] {
            let t = GaussianState::thermal_from_photons(nbar).unwrap();
            assert!((t.von_neumann_entropy().unwrap() - fock_thermal_entropy(nbar)).abs() < 1e-8);
            assert!((t.mean_photon_number(0).unwrap() - fock_thermal_mean(nbar)).abs() < 1e-8);
        }
        for alpha in [
            Complex64::new(0.5, -1.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(0.0, 2.2),
        ] {
            let c = GaussianState::coherent(alpha);
            assert!((c.mean_photon_number(0).unwrap() - fock_coherent_mean(alpha)).abs() < 1e-8);
            assert_eq!(c.von_neumann_entropy().unwrap(), 0.0);
        }
        for r in [0.2, 0.8, 1.1] {
            let s = GaussianState::squeezed_vacuum(r);
            let (total, mean) = fock_squeezed_moments(r);
            assert!((total - 1.0).abs() < 1e-8);
            assert!((s.mean_photon_number(0).unwrap() - mean).abs() < 1e-8);
            assert!(s.von_neumann_entropy().unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn g_function_shape() {
        assert_eq!(g_function(0.0), 0.0);
        assert_eq!(g_function(1e-15), 0.0);
        assert_relative_eq!(g_function(1.0), 2.0 * 2f64.ln(), epsilon = 1e-15);
        let grid: Vec<f64> = (0..2000).map(|k| k as f64 * 0.01).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| g_function(x)).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in vals.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_and_tensor() {
        let v2 = GaussianState::vacuum(2).unwrap();
        assert_eq!(v2.partial_trace(&[1]).unwrap(), GaussianState::vacuum(1).unwrap());
        assert!(v2.partial_trace(&[]).is_err());
        assert!(v2.partial_trace(&[2]).is_err());
        assert!(v2.partial_trace(&[0, 0]).is_err());
        let a = GaussianState::coherent(Complex64::new(0.3, 0.1)).tensor(&GaussianState::thermal(2.0).unwrap());
        let b = GaussianState::squeezed_vacuum(0.4);
        let ab = a.tensor(&b);
        assert_eq!(ab.partial_trace(&[0, 1]).unwrap(), a);
        assert_eq!(ab.partial_trace(&[2]).unwrap(), b);
        let s = ab.von_neumann_entropy().unwrap();
        assert_relative_eq!(
            s,
            a.von_neumann_entropy().unwrap() + b.von_neumann_entropy().unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn pure_bipartite_entropies_match() {
        let s = GaussianState::two_mode_squeezed(0.9);
        let a = s.partial_trace(&[0]).unwrap().von_neumann_entropy().unwrap();
        let b = s.partial_trace(&[1]).unwrap().von_neumann_entropy().unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn wigner_function() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_relative_eq!(v.wigner(&DVector::zeros(2)).unwrap(), 1.0 / PI, epsilon = 1e-15);
        let c = GaussianState::coherent(Complex64::new(0.7, -0.4));
        let peak = c.wigner(c.disp()).unwrap();
        for (dx, dp) in [(0.01, 0.0), (0.0, -0.01), (0.02, 0.02)] {
            let off = c.disp() + DVector::from_vec(vec![dx, dp]);
            assert!(c.wigner(&off).unwrap() < peak);
        }
    }

    #[test]
    fn wigner_normalization_by_quadrature() {
        let s = GaussianState::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.5]),
            DVector::from_vec(vec![0.4, -0.3]),
        )
        .unwrap();
        let (h, lim) = (0.02, 8.0);
        let steps = (2.0 * lim / h) as i32;
        let mut total = 0.0;
        for i in 0..=steps {
            for j in 0..=steps {
                let pt = DVector::from_vec(vec![-lim + i as f64 * h, -lim + j as f64 * h]);
                total += s.wigner(&pt).unwrap();
            }
        }
        assert!((total * h * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let s = GaussianState::two_mode_squeezed(0.37).tensor(&GaussianState::coherent(Complex64::new(0.1, 2.0)));
        let text = serde_json::to_string(&s).unwrap();
        let back: GaussianState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"n_modes":1,"cov":[[1.0,0.5],[0.0,1.0]],"disp":[0,0]}"#;
        assert!(serde_json::from_str::<GaussianState>(bad).is_err());
    }
}
