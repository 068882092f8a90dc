//! Gaussian unitaries and Gaussian measurements.
//!
//! A [`SymplecticTransform`] `(M, d′)` acts on the quadrature operators as
//! `r̂ ↦ M r̂ + d′`, so a state maps as `γ ↦ MγMᵀ`, `d ↦ Md + d′`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{ensure, Error, Result};
use crate::linalg::{inf_norm, max_abs_diff, quadrature_indices, symplectic_form};
use crate::rng::{self, SeededRng};
use crate::state::GaussianState;

/// Absolute tolerance on `MJMᵀ = J`, scaled by `1 + ‖M‖_∞²`.
const SYMPLECTIC_TOL: f64 = 1e-9;

/// Conditioning on a quadrature whose variance is below this fails.
const MIN_MEASURED_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    shift: DVector<f64>,
}

impl SymplecticTransform {
    /// Validates shape and `MJMᵀ = J`.
    pub fn new(matrix: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        ensure!(
            matrix.is_square(),
            InvalidArgument,
            "transform matrix is {}x{}",
            matrix.nrows(),
            matrix.ncols()
        );
        ensure!(
            dim > 0 && dim.is_multiple_of(2),
            InvalidArgument,
            "transform dimension {dim} is not 2n"
        );
        ensure!(
            shift.len() == dim,
            InvalidArgument,
            "shift length {} != {dim}",
            shift.len()
        );
        let t = Self { matrix, shift };
        ensure!(
            t.is_symplectic(),
            InvalidTransform,
            "matrix does not satisfy M J M^T = J"
        );
        Ok(t)
    }

    pub fn identity(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        Self {
            matrix: DMatrix::identity(dim, dim),
            shift: DVector::zeros(dim),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn is_symplectic(&self) -> bool {
        let j = symplectic_form(self.n_modes());
        let scale = 1.0 + inf_norm(&self.matrix).powi(2);
        let mjm = &self.matrix * &j * self.matrix.transpose();
        max_abs_diff(&mjm, &j) <= SYMPLECTIC_TOL * scale
            && (self.matrix.determinant() - 1.0).abs() <= SYMPLECTIC_TOL * scale
    }

    /// Places `block` on the quadratures of `modes`, identity elsewhere.
    fn embedded(n_modes: usize, modes: &[usize], block: DMatrix<f64>) -> Result<Self> {
        for (k, &m) in modes.iter().enumerate() {
            ensure!(
                m < n_modes,
                InvalidArgument,
                "mode {m} out of range for {n_modes} modes"
            );
            ensure!(!modes[..k].contains(&m), InvalidArgument, "modes must be distinct");
        }
        let idx = quadrature_indices(modes);
        let mut t = Self::identity(n_modes);
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                t.matrix[(ia, ib)] = block[(a, b)];
            }
        }
        Ok(t)
    }

    /// Passive transform from a unitary acting on creation operators.
    /// `U = R + iI` contributes the quadrature block `[[R, I], [−I, R]]`.
    fn passive(n_modes: usize, modes: &[usize], u: &DMatrix<Complex64>) -> Result<Self> {
        let k = modes.len();
        let mut block = DMatrix::zeros(2 * k, 2 * k);
        for a in 0..k {
            for b in 0..k {
                let z = u[(a, b)];
                block[(2 * a, 2 * b)] = z.re;
                block[(2 * a, 2 * b + 1)] = z.im;
                block[(2 * a + 1, 2 * b)] = -z.im;
                block[(2 * a + 1, 2 * b + 1)] = z.re;
            }
        }
        Self::embedded(n_modes, modes, block)
    }

    /// General lossless beam splitter on modes `(i, j)`.
    ///
    /// Transmittivity `cos²θ`, reflectivity `sin²θ`. With zero phases the
    /// quadrature matrix on `(x_i, p_i, x_j, p_j)` is
    /// `[[c, 0, s, 0], [0, c, 0, s], [−s, 0, c, 0], [0, −s, 0, c]]`.
    pub fn beam_splitter(n_modes: usize, modes: (usize, usize), theta: f64, phi0: f64, phi1: f64) -> Result<Self> {
        ensure!(
            modes.0 != modes.1,
            InvalidArgument,
            "beam splitter needs two distinct modes"
        );
        let (c, s) = (theta.cos(), theta.sin());
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(c, phi0),
                Complex64::from_polar(s, phi1),
                Complex64::from_polar(-s, -phi1),
                Complex64::from_polar(c, -phi0),
            ],
        );
        Self::passive(n_modes, &[modes.0, modes.1], &u)
    }

    /// Balanced beam splitter without phases.
    pub fn balanced_beam_splitter(n_modes: usize, modes: (usize, usize)) -> Result<Self> {
        Self::beam_splitter(n_modes, modes, std::f64::consts::FRAC_PI_4, 0.0, 0.0)
    }

    /// `diag(e^{−r}, e^{r})` on one mode.
    pub fn squeezer(n_modes: usize, mode: usize, r: f64) -> Result<Self> {
        Self::complex_squeezer(n_modes, mode, r, 0.0)
    }

    /// Squeezing `ζ = r e^{iφ}`; `φ = 0` squeezes `x`.
    pub fn complex_squeezer(n_modes: usize, mode: usize, r: f64, phi: f64) -> Result<Self> {
        let (ch, sh) = (r.cosh(), r.sinh());
        let (c, s) = (phi.cos(), phi.sin());
        let block = DMatrix::from_row_slice(2, 2, &[ch - sh * c, -sh * s, -sh * s, ch + sh * c]);
        Self::embedded(n_modes, &[mode], block)
    }

    /// Rotates the mode's coherent amplitude `α ↦ α e^{iφ}`.
    pub fn phase_shift(n_modes: usize, mode: usize, phi: f64) -> Result<Self> {
        let (c, s) = (phi.cos(), phi.sin());
        Self::embedded(n_modes, &[mode], DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }

    /// Maps `vacuum(2)` on `(i, j)` to the two-mode squeezed vacuum.
    pub fn two_mode_squeezer(n_modes: usize, modes: (usize, usize), r: f64) -> Result<Self> {
        ensure!(
            modes.0 != modes.1,
            InvalidArgument,
            "two-mode squeezer needs two distinct modes"
        );
        let (c, s) = (r.cosh(), r.sinh());
        #[rustfmt::skip]
        let block = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        Self::embedded(n_modes, &[modes.0, modes.1], block)
    }

    /// `x ↦ x + dx`, `p ↦ p + dp` on one mode.
    pub fn displacement(n_modes: usize, mode: usize, dx: f64, dp: f64) -> Result<Self> {
        let mut t = Self::embedded(n_modes, &[mode], DMatrix::identity(2, 2))?;
        t.shift[2 * mode] = dx;
        t.shift[2 * mode + 1] = dp;
        Ok(t)
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        ensure!(
            state.n_modes() == self.n_modes(),
            InvalidArgument,
            "transform acts on {} modes, state has {}",
            self.n_modes(),
            state.n_modes()
        );
        ensure!(
            self.is_symplectic(),
            InvalidTransform,
            "matrix does not satisfy M J M^T = J"
        );
        let cov = &self.matrix * state.cov() * self.matrix.transpose();
        let disp = &self.matrix * state.disp() + &self.shift;
        GaussianState::new(cov, disp)
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        ensure!(
            self.n_modes() == other.n_modes(),
            InvalidArgument,
            "cannot compose transforms of different size"
        );
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            shift: &self.matrix * &other.shift + &self.shift,
        })
    }

    pub fn inverse(&self) -> Self {
        // M⁻¹ = −J Mᵀ J for symplectic M.
        let j = symplectic_form(self.n_modes());
        let inv = -(&j * self.matrix.transpose() * &j);
        let shift = -(&inv * &self.shift);
        Self { matrix: inv, shift }
    }
}

/// Result of a Gaussian measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Homodyne { value: f64 },
    Bell { delta: f64, sigma: f64 },
    Heterodyne { re: f64, im: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    /// State of the unmeasured modes, absent when nothing is left.
    pub conditional_state: Option<GaussianState>,
}

fn quadrature_direction(theta: f64) -> Vector2<f64> {
    Vector2::new(theta.cos(), theta.sin())
}

fn mode_block(state: &GaussianState, mode: usize) -> (Matrix2<f64>, Vector2<f64>) {
    let (i, j) = (2 * mode, 2 * mode + 1);
    let c = state.cov();
    let d = state.disp();
    (
        Matrix2::new(c[(i, i)], c[(i, j)], c[(j, i)], c[(j, j)]),
        Vector2::new(d[i], d[j]),
    )
}

/// Variance of `x̂(θ) = x̂ cos θ + p̂ sin θ` on one mode.
pub fn homodyne_variance(state: &GaussianState, mode: usize, theta: f64) -> Result<f64> {
    state.check_mode(mode)?;
    let (g, _) = mode_block(state, mode);
    let u = quadrature_direction(theta);
    Ok(0.5 * u.dot(&(g * u)))
}

fn homodyne_mean(state: &GaussianState, mode: usize, theta: f64) -> f64 {
    let (_, d) = mode_block(state, mode);
    quadrature_direction(theta).dot(&d)
}

fn draw_homodyne(state: &GaussianState, mode: usize, theta: f64, rng: &mut SeededRng) -> Result<f64> {
    let sd = homodyne_variance(state, mode, theta)?.sqrt();
    Ok(homodyne_mean(state, mode, theta) + sd * rng::normal(rng))
}

/// `count` independent homodyne outcomes of `x̂(θ)` on one mode.
pub fn homodyne_sample(state: &GaussianState, mode: usize, theta: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    ensure!(count >= 1, InvalidArgument, "sample count must be positive");
    state.check_mode(mode)?;
    let mut rng = rng::seeded(seed);
    (0..count)
        .map(|_| draw_homodyne(state, mode, theta, &mut rng))
        .collect()
}

/// State of the other modes given outcome `value` for `x̂(θ)` on `mode`.
pub fn condition_on_homodyne(state: &GaussianState, mode: usize, theta: f64, value: f64) -> Result<GaussianState> {
    ensure!(
        state.n_modes() >= 2,
        InvalidArgument,
        "conditioning needs at least two modes"
    );
    state.check_mode(mode)?;
    let u = quadrature_direction(theta);
    let (i, j) = (2 * mode, 2 * mode + 1);
    let rest: Vec<usize> = (0..state.n_modes()).filter(|&m| m != mode).collect();
    let idx = quadrature_indices(&rest);
    let c = state.cov();
    let d = state.disp();
    let var = u[0] * u[0] * c[(i, i)] + 2.0 * u[0] * u[1] * c[(i, j)] + u[1] * u[1] * c[(j, j)];
    if var < MIN_MEASURED_VARIANCE {
        return Err(Error::NumericalFailure(format!(
            "measured quadrature variance {var:e} is too small"
        )));
    }
    let cross = DVector::from_iterator(idx.len(), idx.iter().map(|&r| u[0] * c[(r, i)] + u[1] * c[(r, j)]));
    let mean = u[0] * d[i] + u[1] * d[j];
    let cov_r = DMatrix::from_fn(idx.len(), idx.len(), |a, b| {
        c[(idx[a], idx[b])] - cross[a] * cross[b] / var
    });
    let disp_r = DVector::from_fn(idx.len(), |a, _| d[idx[a]] + cross[a] * (value - mean) / var);
    GaussianState::new(cov_r, disp_r)
}

/// Samples one homodyne outcome and returns it with the conditioned remainder.
pub fn measure_homodyne(
    state: &GaussianState,
    mode: usize,
    theta: f64,
    rng: &mut SeededRng,
) -> Result<MeasurementRecord> {
    let value = draw_homodyne(state, mode, theta, rng)?;
    let conditional_state = if state.n_modes() > 1 {
        Some(condition_on_homodyne(state, mode, theta, value)?)
    } else {
        None
    };
    Ok(MeasurementRecord {
        outcome: Outcome::Homodyne { value },
        conditional_state,
    })
}

/// Balanced transform taking `(x_i, p_i, x_j, p_j)` to
/// `((x_i+x_j)/√2, (p_i+p_j)/√2, (x_i−x_j)/√2, (p_i−p_j)/√2)`.
fn bell_transform(n_modes: usize, i: usize, j: usize) -> Result<SymplecticTransform> {
    let a = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let block = DMatrix::from_row_slice(4, 4, &[
        a, 0.0, a, 0.0,
        0.0, a, 0.0, a,
        a, 0.0, -a, 0.0,
        0.0, a, 0.0, -a,
    ]);
    SymplecticTransform::embedded(n_modes, &[i, j], block)
}

/// Joint measurement of `Δ = x_i − x_j` and `Σ = p_i + p_j`.
///
/// Mixes the modes on a balanced beam splitter, measures `x` of the
/// difference port, conditions, then measures `p` of the sum port.
pub fn bell_measure_with(
    state: &GaussianState,
    modes: (usize, usize),
    rng: &mut SeededRng,
) -> Result<MeasurementRecord> {
    let (i, j) = modes;
    ensure!(i != j, InvalidArgument, "Bell measurement needs two distinct modes");
    state.check_mode(i)?;
    state.check_mode(j)?;
    let mixed = bell_transform(state.n_modes(), i, j)?.apply(state)?;
    let x = draw_homodyne(&mixed, j, 0.0, rng)?;
    let after_x = condition_on_homodyne(&mixed, j, 0.0, x)?;
    let i_left = if i > j { i - 1 } else { i };
    let p = draw_homodyne(&after_x, i_left, std::f64::consts::FRAC_PI_2, rng)?;
    let conditional_state = if after_x.n_modes() > 1 {
        Some(condition_on_homodyne(&after_x, i_left, std::f64::consts::FRAC_PI_2, p)?)
    } else {
        None
    };
    let root2 = std::f64::consts::SQRT_2;
    Ok(MeasurementRecord {
        outcome: Outcome::Bell {
            delta: root2 * x,
            sigma: root2 * p,
        },
        conditional_state,
    })
}

pub fn bell_measure(state: &GaussianState, modes: (usize, usize), seed: u64) -> Result<MeasurementRecord> {
    bell_measure_with(state, modes, &mut rng::seeded(seed))
}

/// Heterodyne outcomes `α = (x + ip)/√2` with `(x, p) ~ N(d, (γ + I)/2)`.
pub fn heterodyne_sample(state: &GaussianState, mode: usize, count: usize, seed: u64) -> Result<Vec<Complex64>> {
    ensure!(count >= 1, InvalidArgument, "sample count must be positive");
    state.check_mode(mode)?;
    let (g, d) = mode_block(state, mode);
    let chol = ((g + Matrix2::identity()) * 0.5)
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("heterodyne covariance is not positive definite".into()))?;
    let l = chol.l();
    let mut rng = rng::seeded(seed);
    Ok((0..count)
        .map(|_| {
            let z = Vector2::new(rng::normal(&mut rng), rng::normal(&mut rng));
            let q = d + l * z;
            Complex64::new(q[0], q[1]) * FRAC_1_SQRT_2
        })
        .collect())
}
