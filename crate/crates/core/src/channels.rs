//! Gaussian channels `γ ↦ XᵀγX + Y`, `d ↦ Xᵀd`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{
    self, inf_norm, is_symmetric, min_hermitian_eigenvalue, min_symmetric_eigenvalue, symplectic_form,
};
use crate::state::{g_function, GaussianState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelDocument", into = "MatrixPair")]
pub struct GaussianChannel {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl GaussianChannel {
    /// Checks shapes and symmetry of `Y`; complete positivity is checked on use.
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        let dim = x.nrows();
        ensure!(
            x.is_square() && y.is_square(),
            InvalidArgument,
            "X and Y must be square"
        );
        ensure!(
            dim > 0 && dim.is_multiple_of(2),
            InvalidArgument,
            "channel dimension {dim} is not 2n"
        );
        ensure!(
            y.nrows() == dim,
            InvalidArgument,
            "X is {dim}x{dim} but Y is {}x{}",
            y.nrows(),
            y.ncols()
        );
        ensure!(
            x.iter().chain(y.iter()).all(|v| v.is_finite()),
            InvalidArgument,
            "non-finite channel entries"
        );
        ensure!(
            is_symmetric(&y, linalg::sym_tolerance(&y)),
            InvalidArgument,
            "Y is not symmetric"
        );
        Ok(Self {
            x,
            y: linalg::symmetrized(&y),
        })
    }

    pub fn identity(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        Self {
            x: DMatrix::identity(dim, dim),
            y: DMatrix::zeros(dim, dim),
        }
    }

    /// Additive classical noise `γ ↦ γ + Y`.
    pub fn classical_noise(y: DMatrix<f64>) -> Result<Self> {
        let dim = y.nrows();
        let c = Self::new(DMatrix::identity(dim, dim), y)?;
        ensure!(
            min_symmetric_eigenvalue(&c.y) >= -linalg::psd_tolerance(&c.y),
            InvalidArgument,
            "noise matrix is not positive semidefinite"
        );
        Ok(c)
    }

    /// Beam-splitter coupling of each mode to a thermal reservoir:
    /// `X = ⊕√η_j I`, `Y = ⊕(2n̄_j + 1)(1 − η_j) I`.
    pub fn thermal(etas: &[f64], nbars: &[f64]) -> Result<Self> {
        ensure!(
            !etas.is_empty(),
            InvalidArgument,
            "thermal channel needs at least one mode"
        );
        ensure!(
            etas.len() == nbars.len(),
            InvalidArgument,
            "eta and nbar lists differ in length"
        );
        let dim = 2 * etas.len();
        let mut x = DMatrix::zeros(dim, dim);
        let mut y = DMatrix::zeros(dim, dim);
        for (k, (&eta, &nbar)) in etas.iter().zip(nbars).enumerate() {
            ensure!(
                (0.0..=1.0).contains(&eta),
                InvalidArgument,
                "transmittivity {eta} outside [0, 1]"
            );
            ensure!(
                nbar >= 0.0 && nbar.is_finite(),
                InvalidArgument,
                "reservoir photon number {nbar} invalid"
            );
            for q in [2 * k, 2 * k + 1] {
                x[(q, q)] = eta.sqrt();
                y[(q, q)] = (2.0 * nbar + 1.0) * (1.0 - eta);
            }
        }
        Ok(Self { x, y })
    }

    /// Pure loss on every mode.
    pub fn lossy(etas: &[f64]) -> Result<Self> {
        Self::thermal(etas, &vec![0.0; etas.len()])
    }

    pub fn n_modes(&self) -> usize {
        self.x.nrows() / 2
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// `Y + iJ − iXᵀJX ⪰ 0` within tolerance.
    pub fn is_completely_positive(&self) -> bool {
        let j = symplectic_form(self.n_modes());
        let im = &j - self.x.transpose() * &j * &self.x;
        let tol = linalg::PSD_RTOL * (1.0 + inf_norm(&self.y) + inf_norm(&self.x).powi(2));
        min_hermitian_eigenvalue(&self.y, &im) >= -tol
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        ensure!(
            state.n_modes() == self.n_modes(),
            InvalidArgument,
            "channel acts on {} modes, state has {}",
            self.n_modes(),
            state.n_modes()
        );
        ensure!(
            self.is_completely_positive(),
            InvalidArgument,
            "channel is not completely positive"
        );
        let xt = self.x.transpose();
        GaussianState::new(&xt * state.cov() * &self.x + &self.y, &xt * state.disp())
    }

    /// The channel that applies `self` and then `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        ensure!(
            self.n_modes() == next.n_modes(),
            InvalidArgument,
            "cannot chain channels of different size"
        );
        Ok(Self {
            x: &self.x * &next.x,
            y: next.x.transpose() * &self.y * &next.x + &next.y,
        })
    }
}

/// Largest `Σ g(η_k N_k)` over `N_k ≥ 0` with `Σ N_k = energy`, in nats.
///
/// Stationarity gives `η_k N_k = 1/(e^{λ/η_k} − 1)`; the multiplier `λ` is
/// found by bisection in log space.
pub fn lossy_capacity(etas: &[f64], energy: f64) -> Result<f64> {
    Ok(lossy_capacity_allocation(etas, energy)?
        .iter()
        .zip(etas)
        .map(|(n, eta)| g_function(eta * n))
        .sum())
}

/// Optimal photon allocation for [`lossy_capacity`].
pub fn lossy_capacity_allocation(etas: &[f64], energy: f64) -> Result<Vec<f64>> {
    ensure!(!etas.is_empty(), InvalidArgument, "at least one mode is required");
    ensure!(
        energy >= 0.0 && energy.is_finite(),
        InvalidArgument,
        "energy {energy} must be finite and >= 0"
    );
    ensure!(
        etas.iter().all(|e| (0.0..=1.0).contains(e)),
        InvalidArgument,
        "transmittivities must lie in [0, 1]"
    );
    let active = etas.iter().filter(|&&e| e > 0.0).count();
    if active == 0 || energy == 0.0 {
        return Ok(vec![0.0; etas.len()]);
    }
    if active == 1 {
        return Ok(etas.iter().map(|&e| if e > 0.0 { energy } else { 0.0 }).collect());
    }
    let allocation = |lambda: f64| -> Vec<f64> {
        etas.iter()
            .map(|&eta| {
                if eta > 0.0 {
                    1.0 / (lambda / eta).exp_m1() / eta
                } else {
                    0.0
                }
            })
            .collect()
    };
    let total = |lambda: f64| allocation(lambda).iter().sum::<f64>();
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    ensure!(
        total(lo.exp()) >= energy,
        NumericalFailure,
        "energy budget too large for the multiplier search"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid.exp()) > energy {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    let mut n = allocation((0.5 * (lo + hi)).exp());
    let sum: f64 = n.iter().sum();
    if sum <= 0.0 {
        return Err(Error::NumericalFailure("capacity allocation collapsed to zero".into()));
    }
    n.iter_mut().for_each(|v| *v *= energy / sum);
    Ok(n)
}

/// Holevo quantity of the Gaussian coherent ensemble through a lossy mode.
pub fn holevo_coherent_ensemble(eta: f64, nbar: f64) -> Result<f64> {
    ensure!(
        eta > 0.0 && eta <= 1.0,
        InvalidArgument,
        "transmittivity {eta} outside (0, 1]"
    );
    ensure!(nbar >= 0.0, InvalidArgument, "mean photon number {nbar} < 0");
    Ok(g_function(eta * nbar))
}

#[derive(Serialize, Deserialize)]
struct MatrixPair {
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
enum ThermalKind {
    #[serde(rename = "thermal")]
    Thermal,
}

#[derive(Deserialize)]
struct ThermalSpec {
    #[allow(dead_code)]
    kind: ThermalKind,
    eta: Vec<f64>,
    nbar: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChannelDocument {
    Matrices(MatrixPair),
    Thermal(ThermalSpec),
}

fn matrix_from_rows(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    ensure!(
        rows.iter().all(|r| r.len() == n),
        InvalidArgument,
        "{name} must be a square array of rows"
    );
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl TryFrom<ChannelDocument> for GaussianChannel {
    type Error = Error;

    fn try_from(doc: ChannelDocument) -> Result<Self> {
        match doc {
            ChannelDocument::Matrices(m) => Self::new(matrix_from_rows(&m.x, "X")?, matrix_from_rows(&m.y, "Y")?),
            ChannelDocument::Thermal(t) => Self::thermal(&t.eta, &t.nbar),
        }
    }
}

impl From<GaussianChannel> for MatrixPair {
    fn from(c: GaussianChannel) -> Self {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        MatrixPair {
            x: rows(&c.x),
            y: rows(&c.y),
        }
    }
}
