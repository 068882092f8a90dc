//! Closed-form calculators for continuous-variable protocols, plus a
//! Monte-Carlo cross-check of teleportation built from the measurement layer.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};
use crate::ops::{bell_measure_with, Outcome, SymplecticTransform};
use crate::rng;
use crate::state::{g_function, GaussianState};

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportResult {
    pub output: GaussianState,
    /// Noise `2e^{−2r}` added to each quadrature's covariance entry.
    pub added_noise: f64,
    /// Average fidelity for coherent inputs, `1/(1 + e^{−2r})`.
    pub fidelity_coherent: f64,
}

fn check_squeezing(r: f64) -> Result<()> {
    ensure!(
        r.is_finite() || r == f64::INFINITY,
        InvalidArgument,
        "squeezing must be a number"
    );
    ensure!(r >= 0.0, InvalidArgument, "squeezing {r} must be non-negative");
    Ok(())
}

/// Ensemble output of unit-gain teleportation through a TMSS resource.
pub fn teleport_ensemble(input: &GaussianState, r: f64) -> Result<TeleportResult> {
    ensure!(
        input.n_modes() == 1,
        InvalidArgument,
        "teleportation input must be a single mode"
    );
    check_squeezing(r)?;
    let added_noise = 2.0 * (-2.0 * r).exp();
    let cov = input.cov() + DMatrix::identity(2, 2) * added_noise;
    Ok(TeleportResult {
        output: GaussianState::new(cov, input.disp().clone())?,
        added_noise,
        fidelity_coherent: 1.0 / (1.0 + (-2.0 * r).exp()),
    })
}

/// Empirical against analytic moments of the teleported ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportCheck {
    pub shots: usize,
    pub analytic_cov: [[f64; 2]; 2],
    pub empirical_cov: [[f64; 2]; 2],
    pub analytic_mean: [f64; 2],
    pub empirical_mean: [f64; 2],
    /// Largest standardized deviation over the covariance and mean entries.
    pub max_z_score: f64,
}

/// Simulates teleportation shot by shot: Bell measurement of the input and
/// Alice's half of a TMSS, displacement of Bob's mode by `(Δ, Σ)`, then a
/// phase-space sample of Bob's corrected state.
pub fn teleport_consistency_check(input: &GaussianState, r: f64, shots: usize, seed: u64) -> Result<TeleportCheck> {
    ensure!(shots >= 2, InvalidArgument, "at least two shots are needed");
    let analytic = teleport_ensemble(input, r)?.output;
    let resource = input.tensor(&GaussianState::two_mode_squeezed(r));
    let mut rng = rng::seeded(seed);
    let mut points = Vec::with_capacity(shots);
    for _ in 0..shots {
        let record = bell_measure_with(&resource, (0, 1), &mut rng)?;
        let (delta, sigma) = match record.outcome {
            Outcome::Bell { delta, sigma } => (delta, sigma),
            _ => unreachable!("Bell measurement returns a Bell outcome"),
        };
        let bob = record
            .conditional_state
            .ok_or_else(|| Error::NumericalFailure("Bell measurement left no receiver mode".into()))?;
        let c = bob.cov();
        let chol = Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)])
            .scale(0.5)
            .cholesky()
            .ok_or_else(|| Error::NumericalFailure("receiver covariance is not positive definite".into()))?;
        let mean = Vector2::new(bob.disp()[0] + delta, bob.disp()[1] + sigma);
        let z = Vector2::new(rng::normal(&mut rng), rng::normal(&mut rng));
        points.push(mean + chol.l() * z);
    }
    let n = shots as f64;
    let mean = points.iter().sum::<Vector2<f64>>() / n;
    let mut scatter = Matrix2::zeros();
    for p in &points {
        let d = p - mean;
        scatter += d * d.transpose();
    }
    let emp_cov = scatter * (2.0 / (n - 1.0));
    let g = analytic.cov();
    let d = analytic.disp();
    let mut z: f64 = 0.0;
    for i in 0..2 {
        z = z.max((mean[i] - d[i]).abs() / (0.5 * g[(i, i)] / n).sqrt());
        z = z.max((emp_cov[(i, i)] - g[(i, i)]).abs() / (g[(i, i)] * (2.0 / n).sqrt()));
    }
    z = z.max((emp_cov[(0, 1)] - g[(0, 1)]).abs() / ((g[(0, 0)] * g[(1, 1)] + g[(0, 1)].powi(2)) / n).sqrt());
    Ok(TeleportCheck {
        shots,
        analytic_cov: [[g[(0, 0)], g[(0, 1)]], [g[(1, 0)], g[(1, 1)]]],
        empirical_cov: [[emp_cov[(0, 0)], emp_cov[(0, 1)]], [emp_cov[(1, 0)], emp_cov[(1, 1)]]],
        analytic_mean: [d[0], d[1]],
        empirical_mean: [mean[0], mean[1]],
        max_z_score: z,
    })
}

/// Squeezing of the swapped pair: `tanh r_ab = tanh r_a · tanh r_b`.
pub fn swap_squeezing(r_a: f64, r_b: f64) -> Result<f64> {
    check_squeezing(r_a)?;
    check_squeezing(r_b)?;
    Ok((r_a.tanh() * r_b.tanh()).atanh())
}

/// `ln(1 + σ² e^{2r})` for a Gaussian-modulated signal of variance `σ²`.
pub fn dense_coding_mutual_info(sigma2: f64, r: f64) -> Result<f64> {
    ensure!(sigma2 >= 0.0, InvalidArgument, "signal variance {sigma2} < 0");
    check_squeezing(r)?;
    Ok((sigma2 * (2.0 * r).exp()).ln_1p())
}

/// Signal variance `sinh r cosh r` maximizing the mutual information at
/// fixed mean photon number `e^r sinh r`.
pub fn dense_coding_optimal_variance(r: f64) -> f64 {
    r.sinh() * r.cosh()
}

/// Mean photon number `e^r sinh r` of the dense-coding resource and signal.
pub fn dense_coding_photon_number(r: f64) -> f64 {
    r.exp() * r.sinh()
}

/// `ln(1 + n̄ + n̄²)`.
pub fn dense_coding_capacity(nbar: f64) -> Result<f64> {
    ensure!(nbar >= 0.0, InvalidArgument, "mean photon number {nbar} < 0");
    Ok((nbar + nbar * nbar).ln_1p())
}

/// Noiseless single-mode capacity `g(n̄)`.
pub fn single_mode_capacity(nbar: f64) -> Result<f64> {
    ensure!(nbar >= 0.0, InvalidArgument, "mean photon number {nbar} < 0");
    Ok(g_function(nbar))
}

/// Squeezed vacuum `S(ζ)|0⟩` with `ζ = r e^{iφ}`.
pub fn squeezed_input(zeta: Complex64) -> Result<GaussianState> {
    let (r, phi) = zeta.to_polar();
    SymplecticTransform::complex_squeezer(1, 0, r, phi)?.apply(&GaussianState::vacuum(1)?)
}

/// Entanglement (nats) produced by a beam splitter from two squeezed vacua.
///
/// Returns the entropy of the reduced output mode with symplectic eigenvalue
/// `ν = √det γ_a`: `ln((ν+1)/2) + ((ν−1)/2) ln((ν+1)/(ν−1))`.
pub fn entangler_entanglement(zeta_a: Complex64, zeta_b: Complex64, theta: f64, phi0: f64, phi1: f64) -> Result<f64> {
    let input = squeezed_input(zeta_a)?.tensor(&squeezed_input(zeta_b)?);
    let out = SymplecticTransform::beam_splitter(2, (0, 1), theta, phi0, phi1)?.apply(&input)?;
    let m = out.cov();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let nu = det.max(0.0).sqrt();
    let eps = 1e-9 * (1.0 + m[(0, 0)].abs() + m[(1, 1)].abs());
    if nu < 1.0 - eps {
        return Err(Error::NumericalFailure(format!(
            "reduced symplectic eigenvalue {nu} below 1"
        )));
    }
    if nu <= 1.0 + 1e-12 {
        return Ok(0.0);
    }
    Ok(((nu + 1.0) / 2.0).ln() + 0.5 * (nu - 1.0) * ((nu + 1.0) / (nu - 1.0)).ln())
}

/// Optimal symmetric fidelity of Gaussian 1→2 cloning of coherent states.
pub fn clone_fidelity_coherent() -> f64 {
    2.0 / 3.0
}

fn check_width(delta: f64) -> Result<()> {
    ensure!(
        delta > 0.0 && delta.is_finite(),
        InvalidArgument,
        "squeezing width {delta} must be positive"
    );
    Ok(())
}

/// Shift-code error bound `(2Δ/2) e^{−π/(4Δ²)}`, clamped to `[0, 1]`.
pub fn gkp_error_bound(delta: f64) -> Result<f64> {
    check_width(delta)?;
    Ok((delta * (-PI / (4.0 * delta * delta)).exp()).clamp(0.0, 1.0))
}

/// Bit-flip bound `(2Δ/π) e^{−π/(4Δ²)}` for a squeezed-state source.
pub fn squeezed_source_bitflip_bound(delta: f64) -> Result<f64> {
    check_width(delta)?;
    Ok((2.0 * delta / PI * (-PI / (4.0 * delta * delta)).exp()).clamp(0.0, 1.0))
}
