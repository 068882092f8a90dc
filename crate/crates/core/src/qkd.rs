//! Weak-coherent BB84: detector and channel model, decoy-state bounds on the
//! tagged fraction, key rates, and a few attack and CV-protocol formulas.
//!
//! Binary entropies are in bits and key rates are per sifted bit.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{ensure, Error, Result};
use crate::linalg::binary_entropy;

/// Default multiple of the statistical fluctuation radius `√(1/(sN))`.
pub const FLUCTUATION_SIGMAS: f64 = 10.0;
/// Iteration cap of the finite-size solver.
pub const FINITE_MAX_ITER: usize = 10_000;
const FINITE_RTOL: f64 = 1e-12;

/// Detector and fiber link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Detection efficiency.
    pub eta: f64,
    /// Dark-count probability per gate.
    pub p_dark: f64,
    /// Interference visibility.
    pub visibility: f64,
    /// Fiber attenuation in dB/km.
    pub alpha_db_per_km: f64,
    /// Receiver loss in dB.
    #[serde(default)]
    pub beta_db: f64,
    /// Afterpulse probability per gate.
    #[serde(default, rename = "afterpulse_A")]
    pub afterpulse_a: f64,
    /// Number of gates affected by an afterpulse.
    #[serde(default, rename = "afterpulse_M")]
    pub afterpulse_m: f64,
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.eta > 0.0 && self.eta <= 1.0,
            InvalidArgument,
            "detector efficiency {} outside (0, 1]",
            self.eta
        );
        ensure!(
            (0.0..1.0).contains(&self.p_dark),
            InvalidArgument,
            "dark-count probability {} outside [0, 1)",
            self.p_dark
        );
        ensure!(
            self.visibility > 0.5 && self.visibility <= 1.0,
            InvalidArgument,
            "visibility {} outside (0.5, 1]",
            self.visibility
        );
        ensure!(
            self.alpha_db_per_km >= 0.0,
            InvalidArgument,
            "fiber loss must be non-negative"
        );
        ensure!(
            self.beta_db >= 0.0,
            InvalidArgument,
            "receiver loss must be non-negative"
        );
        ensure!(
            (0.0..=1.0).contains(&self.afterpulse_a),
            InvalidArgument,
            "afterpulse probability outside [0, 1]"
        );
        ensure!(
            self.afterpulse_m >= 0.0,
            InvalidArgument,
            "afterpulse gate count must be non-negative"
        );
        Ok(())
    }

    /// Link transmittance `10^{−(αL + β)/10}`.
    pub fn transmittance(&self, length_km: f64) -> f64 {
        10f64.powf(-(self.alpha_db_per_km * length_km + self.beta_db) / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    SinglePhoton,
    Coherent { mu: f64 },
}

/// Probability that a pulse reaches the detector.
pub fn arrival_probability(model: &DetectorModel, length_km: f64, source: Source) -> Result<f64> {
    model.validate()?;
    ensure!(length_km >= 0.0, InvalidArgument, "fiber length {length_km} < 0");
    let t = model.transmittance(length_km);
    match source {
        Source::SinglePhoton => Ok(t),
        Source::Coherent { mu } => {
            ensure!(mu >= 0.0, InvalidArgument, "mean photon number {mu} < 0");
            Ok(-(-mu * t).exp_m1())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qber {
    /// Bit error rate without afterpulsing.
    pub e_b: f64,
    /// Detection probability `Sη + P_d − SηP_d`.
    pub p_det: f64,
    /// `e_B + AM/2`.
    pub e_b_afterpulse: f64,
}

/// `e_B = ½ (S(1−v)η + P_d) / P_DET`.
pub fn qber(model: &DetectorModel, length_km: f64, source: Source) -> Result<Qber> {
    let s = arrival_probability(model, length_km, source)?;
    let p_det = s * model.eta + model.p_dark - s * model.eta * model.p_dark;
    if p_det <= 0.0 {
        return Err(Error::DegenerateInput("detection probability is zero".into()));
    }
    let e_b = 0.5 * (s * (1.0 - model.visibility) * model.eta + model.p_dark) / p_det;
    Ok(Qber {
        e_b,
        p_det,
        e_b_afterpulse: e_b + 0.5 * model.afterpulse_a * model.afterpulse_m,
    })
}

/// Largest fiber length with afterpulse-corrected `e_B` at or below
/// `threshold`; `0` if already exceeded at the sender, infinite if never.
pub fn max_secure_distance(model: &DetectorModel, threshold: f64, source: Source) -> Result<f64> {
    ensure!(
        threshold > 0.0 && threshold < 0.5,
        InvalidArgument,
        "threshold {threshold} outside (0, 0.5)"
    );
    let err = |l: f64| qber(model, l, source).map(|q| q.e_b_afterpulse);
    if err(0.0)? > threshold {
        return Ok(0.0);
    }
    // Without dark counts the error rate does not depend on the length.
    if model.alpha_db_per_km == 0.0 || model.p_dark == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut hi = 1.0;
    loop {
        match err(hi) {
            Ok(e) if e > threshold => break,
            Ok(_) => {}
            Err(Error::DegenerateInput(_)) => break,
            Err(e) => return Err(e),
        }
        hi *= 2.0;
        if hi > 1e7 {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match err(mid) {
            Ok(e) if e <= threshold => lo = mid,
            Ok(_) | Err(Error::DegenerateInput(_)) => hi = mid,
            Err(e) => return Err(e),
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Photon-number weights of the signal (`μ`) and decoy (`μ′`) sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCoefficients {
    pub a1: f64,
    pub a1_prime: f64,
    /// Multi-photon weight of the signal source, `1 − e^{−μ} − μe^{−μ}`.
    pub a_c: f64,
    /// Multi-photon weight of the decoy source rescaled so its density
    /// matrix matches the signal source's, `c μ′² e^{−μ′}/(μ² e^{−μ})`.
    pub a_c_prime: f64,
}

pub fn poisson_coefficients(mu: f64, mu_prime: f64) -> Result<PoissonCoefficients> {
    ensure!(
        mu > 0.0 && mu_prime > mu,
        InvalidArgument,
        "need 0 < mu < mu', got {mu}, {mu_prime}"
    );
    let a1 = mu * (-mu).exp();
    let a1_prime = mu_prime * (-mu_prime).exp();
    ensure!(a1_prime > a1, InvalidArgument, "need mu' e^-mu' > mu e^-mu");
    let a_c = -(-mu).exp_m1() - a1;
    let a_c_prime = a_c * mu_prime.powi(2) * (-mu_prime).exp() / (mu.powi(2) * (-mu).exp());
    Ok(PoissonCoefficients {
        a1,
        a1_prime,
        a_c,
        a_c_prime,
    })
}

/// Pulses sent and clicks registered for one intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityRecord {
    pub pulses_sent: f64,
    pub clicks: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<f64>,
}

impl IntensityRecord {
    fn rate(&self, name: &str) -> Result<f64> {
        ensure!(
            self.pulses_sent > 0.0,
            InvalidArgument,
            "{name}: pulses_sent must be positive"
        );
        ensure!(
            self.clicks >= 0.0 && self.clicks <= self.pulses_sent,
            InvalidArgument,
            "{name}: clicks must lie in [0, pulses_sent]"
        );
        if let Some(e) = self.errors {
            ensure!(
                e >= 0.0 && e <= self.clicks,
                InvalidArgument,
                "{name}: errors must lie in [0, clicks]"
            );
        }
        Ok(self.clicks / self.pulses_sent)
    }
}

/// Counting rates for vacuum, signal (`μ`) and decoy (`μ′`) pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObservationDocument")]
pub struct DecoyObservation {
    pub mu: f64,
    pub mu_prime: f64,
    pub s0: f64,
    pub s_mu: f64,
    pub s_mu_prime: f64,
    /// Pulse counts for (vacuum, μ, μ′) when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulses: Option<[f64; 3]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ObservationDocument {
    Counts {
        mu: f64,
        mu_prime: f64,
        vacuum: IntensityRecord,
        signal: IntensityRecord,
        decoy: IntensityRecord,
    },
    Rates {
        mu: f64,
        mu_prime: f64,
        s0: f64,
        s_mu: f64,
        s_mu_prime: f64,
        #[serde(default)]
        pulses: Option<[f64; 3]>,
    },
}

impl TryFrom<ObservationDocument> for DecoyObservation {
    type Error = Error;

    fn try_from(doc: ObservationDocument) -> Result<Self> {
        match doc {
            ObservationDocument::Counts {
                mu,
                mu_prime,
                vacuum,
                signal,
                decoy,
            } => Self::from_counts(mu, mu_prime, vacuum, signal, decoy),
            ObservationDocument::Rates {
                mu,
                mu_prime,
                s0,
                s_mu,
                s_mu_prime,
                pulses,
            } => {
                let mut obs = Self::from_rates(mu, mu_prime, s0, s_mu, s_mu_prime)?;
                obs.pulses = pulses;
                Ok(obs)
            }
        }
    }
}

impl DecoyObservation {
    pub fn from_rates(mu: f64, mu_prime: f64, s0: f64, s_mu: f64, s_mu_prime: f64) -> Result<Self> {
        poisson_coefficients(mu, mu_prime)?;
        for (name, v) in [("s0", s0), ("s_mu", s_mu), ("s_mu_prime", s_mu_prime)] {
            ensure!((0.0..=1.0).contains(&v), InvalidArgument, "{name} = {v} outside [0, 1]");
        }
        Ok(Self {
            mu,
            mu_prime,
            s0,
            s_mu,
            s_mu_prime,
            pulses: None,
        })
    }

    pub fn from_counts(
        mu: f64,
        mu_prime: f64,
        vacuum: IntensityRecord,
        signal: IntensityRecord,
        decoy: IntensityRecord,
    ) -> Result<Self> {
        let mut obs = Self::from_rates(
            mu,
            mu_prime,
            vacuum.rate("vacuum")?,
            signal.rate("signal")?,
            decoy.rate("decoy")?,
        )?;
        obs.pulses = Some([vacuum.pulses_sent, signal.pulses_sent, decoy.pulses_sent]);
        Ok(obs)
    }

    /// Eavesdropper-free channel of transmittance `eta` with dark counts:
    /// `S_x = 1 − (1 − P_d) e^{−ηx}`.
    pub fn simulated(mu: f64, mu_prime: f64, eta: f64, p_dark: f64) -> Result<Self> {
        ensure!(
            eta > 0.0 && eta <= 1.0,
            InvalidArgument,
            "transmittance {eta} outside (0, 1]"
        );
        ensure!(
            (0.0..1.0).contains(&p_dark),
            InvalidArgument,
            "dark-count probability {p_dark} outside [0, 1)"
        );
        let rate = |x: f64| 1.0 - (1.0 - p_dark) * (-eta * x).exp();
        Self::from_rates(mu, mu_prime, rate(0.0), rate(mu), rate(mu_prime))
    }

    pub fn with_pulses(mut self, pulses: [f64; 3]) -> Self {
        self.pulses = Some(pulses);
        self
    }
}

/// Exact tagged fraction of signal clicks on the simulated channel.
pub fn true_tagged_fraction(mu: f64, eta: f64, p_dark: f64) -> f64 {
    let s_mu = 1.0 - (1.0 - p_dark) * (-eta * mu).exp();
    let s1 = 1.0 - (1.0 - p_dark) * (1.0 - eta);
    (s_mu - (-mu).exp() * p_dark - mu * (-mu).exp() * s1) / s_mu
}

/// Bounds on the single- and multi-photon contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoyBounds {
    pub s1_lower: f64,
    pub sc_upper: f64,
    /// Tagged (multi-photon) fraction of signal clicks, upper bound.
    pub delta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta_prime: f64,
    pub delta1_prime: f64,
}

fn bounds_from_rates(obs: &DecoyObservation, pc: &PoissonCoefficients, s1: f64, sc: f64) -> DecoyBounds {
    let delta0 = (-obs.mu).exp() * obs.s0 / obs.s_mu;
    let delta = (pc.a_c * sc / obs.s_mu).clamp(0.0, 1.0);
    DecoyBounds {
        s1_lower: s1,
        sc_upper: sc,
        delta,
        delta0,
        delta1: (1.0 - delta - delta0).max(0.0),
        delta_prime: (pc.a_c_prime * sc / obs.s_mu_prime).clamp(0.0, 1.0),
        delta1_prime: (pc.a1_prime * s1 / obs.s_mu_prime).clamp(0.0, 1.0),
    }
}

fn check_rates(obs: &DecoyObservation) -> Result<PoissonCoefficients> {
    let pc = poisson_coefficients(obs.mu, obs.mu_prime)?;
    ensure!(
        obs.s_mu > 0.0 && obs.s_mu_prime > 0.0,
        InvalidArgument,
        "signal and decoy counting rates must be positive"
    );
    Ok(pc)
}

/// Solves both source constraints simultaneously for `s1` and `s_c`.
pub fn decoy_bounds_asymptotic(obs: &DecoyObservation) -> Result<DecoyBounds> {
    let pc = check_rates(obs)?;
    let signal = obs.s_mu - (-obs.mu).exp() * obs.s0;
    let decoy = obs.s_mu_prime - (-obs.mu_prime).exp() * obs.s0;
    let det = pc.a1 * pc.a_c_prime - pc.a1_prime * pc.a_c;
    ensure!(
        det.abs() > f64::EPSILON * pc.a1 * pc.a_c_prime,
        InvalidArgument,
        "degenerate intensities"
    );
    let s1 = (pc.a_c_prime * signal - pc.a_c * decoy) / det;
    let sc = (pc.a1_prime * signal - pc.a1 * decoy) / -det;
    Ok(bounds_from_rates(obs, &pc, s1, sc))
}

/// Tagged-fraction bound `μ² e^{−μ} S_{μ′} / (μ′² e^{−μ′} S_μ)`.
pub fn hwang_bound(obs: &DecoyObservation) -> Result<f64> {
    check_rates(obs)?;
    let (mu, mp) = (obs.mu, obs.mu_prime);
    Ok(mu * mu * (-mu).exp() * obs.s_mu_prime / (mp * mp * (-mp).exp() * obs.s_mu))
}

/// Worst-case bounds when each rate may deviate from its source-specific
/// value by the relative radius `k √(1/(s N))`, with `N` pulses per source.
///
/// The decoy-source rates are taken as `s/(1 + r)`, which maximizes `s_c`.
/// The coupled system is solved by damped fixed-point iteration.
pub fn decoy_bounds_finite(obs: &DecoyObservation, n_pulses: f64, sigmas: f64, max_iter: usize) -> Result<DecoyBounds> {
    let pc = check_rates(obs)?;
    ensure!(n_pulses > 0.0, InvalidArgument, "pulse count must be positive");
    ensure!(
        sigmas >= 0.0,
        InvalidArgument,
        "fluctuation multiple must be non-negative"
    );
    let asym = decoy_bounds_asymptotic(obs)?;
    let (mu, mp) = (obs.mu, obs.mu_prime);
    let k_ratio = mu * mu * (-mu).exp() / (mp * mp * (-mp).exp());
    let radius = |expected: f64| sigmas * (1.0 / (expected * n_pulses)).sqrt();
    let r0 = if obs.s0 > 0.0 {
        radius((-mu).exp() * obs.s0)
    } else {
        0.0
    };
    let rhs0 = obs.s_mu - (-mu).exp() * obs.s0;
    let rhs1 = k_ratio * (obs.s_mu_prime - (-mp).exp() * obs.s0 / (1.0 + r0));

    let (mut s1, mut sc) = (asym.s1_lower, asym.sc_upper);
    for _ in 0..max_iter {
        // A non-positive single-photon rate removes that term from the decoy constraint.
        let w1 = if s1 > 0.0 {
            k_ratio * pc.a1_prime / (1.0 + radius(pc.a1 * s1))
        } else {
            0.0
        };
        let wc = if sc > 0.0 {
            pc.a_c / (1.0 + radius(pc.a_c * sc))
        } else {
            pc.a_c
        };
        let det = pc.a1 * wc - pc.a_c * w1;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NumericalFailure(
                "finite-size constraint system is singular".into(),
            ));
        }
        let next_s1 = 0.5 * (s1 + (rhs0 * wc - pc.a_c * rhs1) / det);
        let next_sc = 0.5 * (sc + (pc.a1 * rhs1 - w1 * rhs0) / det);
        let done = (next_s1 - s1).abs() <= FINITE_RTOL * s1.abs() && (next_sc - sc).abs() <= FINITE_RTOL * sc.abs();
        s1 = next_s1;
        sc = next_sc;
        if done {
            return Ok(bounds_from_rates(obs, &pc, s1, sc));
        }
    }
    Err(Error::NumericalFailure(format!(
        "finite-size bounds did not converge in {max_iter} iterations"
    )))
}

/// `1 − H(t_z) − Δ − (1 − Δ) H(t_x/(1 − Δ))`, bits per sifted bit.
pub fn gllp_key_rate(t_z: f64, t_x: f64, delta: f64) -> Result<f64> {
    for (name, v) in [("t_z", t_z), ("t_x", t_x), ("delta", delta)] {
        ensure!((0.0..=1.0).contains(&v), InvalidArgument, "{name} = {v} outside [0, 1]");
    }
    if delta == 1.0 {
        return Ok(-binary_entropy(t_z));
    }
    let phase = t_x / (1.0 - delta);
    ensure!(
        phase < 1.0,
        InvalidArgument,
        "t_x/(1 - delta) = {phase} must be below 1"
    );
    Ok(1.0 - binary_entropy(t_z) - delta - (1.0 - delta) * binary_entropy(phase))
}

/// `Δ₁ + Δ₀ − H(E) − Δ₁ H(e₁)`.
pub fn decoy_key_rate(delta1: f64, delta0: f64, e_total: f64, e1: f64) -> Result<f64> {
    for (name, v) in [("delta1", delta1), ("delta0", delta0), ("E", e_total), ("e1", e1)] {
        ensure!((0.0..=1.0).contains(&v), InvalidArgument, "{name} = {v} outside [0, 1]");
    }
    Ok(delta1 + delta0 - binary_entropy(e_total) - delta1 * binary_entropy(e1))
}

/// Single-photon error rate `(E − e^{−μ} S0/(2 S_μ)) / Δ₁`.
pub fn single_photon_error(e_total: f64, s0: f64, s_mu: f64, delta1: f64, mu: f64) -> Result<f64> {
    ensure!(delta1 > 0.0, InvalidArgument, "delta1 must be positive");
    ensure!(s_mu > 0.0, InvalidArgument, "signal counting rate must be positive");
    Ok((e_total - (-mu).exp() * s0 / (2.0 * s_mu)) / delta1)
}

/// Information leaked to a beam-splitting eavesdropper, `1 − e^{−Rμ}`.
pub fn bs_attack_info(tap: f64, mu: f64) -> Result<f64> {
    ensure!(
        (0.0..=1.0).contains(&tap),
        InvalidArgument,
        "tap fraction {tap} outside [0, 1]"
    );
    ensure!(mu >= 0.0, InvalidArgument, "mean photon number {mu} < 0");
    Ok(-(-tap * mu).exp_m1())
}

/// Probability that a squeezed-state quadrature lands inside the window
/// `δ`: `erf(δ / (2√ν))` with `ν = e^{−2r}/2`.
pub fn cvqkd_interval_prob(window: f64, r: f64) -> Result<f64> {
    ensure!(window > 0.0, InvalidArgument, "window {window} must be positive");
    let nu = 0.5 * (-2.0 * r).exp();
    Ok(erf(window / (2.0 * nu.sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(ratio: f64) -> DetectorModel {
        DetectorModel {
            eta: 1.0,
            p_dark: ratio,
            visibility: 1.0,
            alpha_db_per_km: 0.2,
            beta_db: 0.0,
            afterpulse_a: 0.0,
            afterpulse_m: 0.0,
        }
    }

    #[test]
    fn arrival() {
        let m = model(0.0);
        assert_eq!(arrival_probability(&m, 0.0, Source::SinglePhoton).unwrap(), 1.0);
        assert_relative_eq!(
            arrival_probability(&m, 100.0, Source::SinglePhoton).unwrap(),
            1e-2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            arrival_probability(&m, 100.0, Source::Coherent { mu: 0.2 }).unwrap(),
            1.998001332666921e-3,
            max_relative = 1e-12
        );
        assert!(arrival_probability(&m, -1.0, Source::SinglePhoton).is_err());
    }

    #[test]
    fn error_rates() {
        let q = qber(&model(6e-6), 100.0, Source::SinglePhoton).unwrap();
        assert_relative_eq!(q.e_b, 2.998219057879619e-4, max_relative = 1e-12);
        let mut noisy = model(6e-6);
        noisy.afterpulse_a = 1e-3;
        noisy.afterpulse_m = 100.0;
        let q2 = qber(&noisy, 100.0, Source::SinglePhoton).unwrap();
        assert_relative_eq!(q2.e_b_afterpulse - q2.e_b, 0.05, epsilon = 1e-15);
        let mut vis = model(0.0);
        vis.visibility = 0.96;
        assert_relative_eq!(
            qber(&vis, 10.0, Source::SinglePhoton).unwrap().e_b,
            0.02,
            epsilon = 1e-15
        );
        let mut bad = model(0.0);
        bad.visibility = 0.4;
        assert!(qber(&bad, 1.0, Source::SinglePhoton).is_err());
    }

    #[test]
    fn secure_distance() {
        let d = max_secure_distance(&model(6e-6), 0.11, Source::SinglePhoton).unwrap();
        assert_relative_eq!(d, 233.60871109866864, max_relative = 1e-9);
        let mut loud = model(6e-6);
        loud.afterpulse_a = 1e-3;
        loud.afterpulse_m = 300.0;
        assert_eq!(max_secure_distance(&loud, 0.11, Source::SinglePhoton).unwrap(), 0.0);
        assert_eq!(
            max_secure_distance(&model(0.0), 0.11, Source::SinglePhoton).unwrap(),
            f64::INFINITY
        );
        let mut prev = f64::INFINITY;
        for ratio in [1e-7, 1e-6, 6e-6, 1e-5, 1e-4] {
            let d = max_secure_distance(&model(ratio), 0.11, Source::SinglePhoton).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn detector_json() {
        let m: DetectorModel = serde_json::from_str(
            r#"{"eta":0.1,"p_dark":1e-6,"visibility":0.98,"alpha_db_per_km":0.2,"beta_db":3,"afterpulse_A":0.001,"afterpulse_M":10}"#,
        )
        .unwrap();
        assert_eq!(m.afterpulse_a, 1e-3);
        let back: DetectorModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn coefficients() {
        let pc = poisson_coefficients(0.3, 0.43).unwrap();
        assert_relative_eq!(pc.a1, 0.22224546620451535, max_relative = 1e-14);
        assert_relative_eq!(pc.a1_prime, 0.2797189107310261, max_relative = 1e-14);
        assert_relative_eq!(pc.a_c, 0.03693631311376677, max_relative = 1e-12);
        assert_relative_eq!(pc.a_c_prime, 0.06663304531742432, max_relative = 1e-12);
        let mp: f64 = 0.43;
        assert!((-mp).exp() + pc.a1_prime + pc.a_c_prime <= 1.0);
        assert!(poisson_coefficients(0.43, 0.3).is_err());
        assert!(poisson_coefficients(0.5, 2.0).is_err());
        for k in 1..100 {
            assert!(poisson_coefficients(0.01 * k as f64, 0.01 * k as f64 + 1e-3).map_or(true, |p| p.a_c > 0.0));
        }
    }

    #[test]
    fn asymptotic_bounds() {
        let obs = DecoyObservation::simulated(0.3, 0.43, 1e-3, 0.0).unwrap();
        let b = decoy_bounds_asymptotic(&obs).unwrap();
        assert_relative_eq!(b.s1_lower, 9.174931685061997e-4, max_relative = 1e-9);
        assert_relative_eq!(b.delta, 0.32020238397335316, max_relative = 1e-9);
        assert!((b.delta + b.delta0 + b.delta1 - 1.0).abs() < 1e-9);
        let truth = true_tagged_fraction(0.3, 1e-3, 0.0);
        assert_relative_eq!(truth, 0.25907065102899085, max_relative = 1e-9);
        let hw = hwang_bound(&obs).unwrap();
        assert_relative_eq!(hw, 0.7944797905035719, max_relative = 1e-9);
        assert!(truth <= b.delta && b.delta <= hw);
        let limit = decoy_bounds_asymptotic(&DecoyObservation::simulated(0.3, 0.3001, 1e-6, 0.0).unwrap()).unwrap();
        assert!((limit.delta - 0.3).abs() < 1e-3);
    }

    #[test]
    fn soundness_grid() {
        for &pd in &[0.0, 1e-6] {
            for i in 0..6 {
                let mu = 0.1 + 0.1 * i as f64;
                for j in 1..=4 {
                    let mp = mu + (0.8 - mu) * j as f64 / 4.0;
                    if mp * (-mp).exp() <= mu * (-mu).exp() {
                        continue;
                    }
                    for eta in [1e-5, 1e-4, 1e-3, 1e-2, 1e-1] {
                        let obs = DecoyObservation::simulated(mu, mp, eta, pd).unwrap();
                        let b = decoy_bounds_asymptotic(&obs).unwrap();
                        let truth = true_tagged_fraction(mu, eta, pd);
                        let hw = hwang_bound(&obs).unwrap();
                        assert!(truth <= b.delta + 1e-9, "mu {mu} mu' {mp} eta {eta}");
                        assert!(b.delta <= hw + 1e-9, "mu {mu} mu' {mp} eta {eta}");
                        assert!((b.delta + b.delta0 + b.delta1 - 1.0).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn finite_size_bounds() {
        let obs = DecoyObservation::simulated(0.3, 0.43, 1e-3, 0.0).unwrap();
        let asym = decoy_bounds_asymptotic(&obs).unwrap();
        let at = |n: f64| {
            decoy_bounds_finite(&obs, n, FLUCTUATION_SIGMAS, FINITE_MAX_ITER)
                .unwrap()
                .delta
        };
        assert_relative_eq!(at(1e10), 0.34199, epsilon = 5e-5);
        assert!(at(1e10) > 0.320 && at(1e10) < 0.604);
        let mut prev = 1.0;
        for n in [1e6, 1e8, 1e10, 1e12, 1e14] {
            let d = at(n);
            assert!(d <= prev + 1e-15 && d >= asym.delta);
            prev = d;
        }
        assert_eq!(at(1e6), 1.0);
        assert!((at(1e24) - asym.delta).abs() < 1e-6);
        let zero_width = decoy_bounds_finite(&obs, 1e8, 0.0, FINITE_MAX_ITER).unwrap();
        assert!((zero_width.delta - asym.delta).abs() < 1e-12);
        assert!(matches!(
            decoy_bounds_finite(&obs, 1e10, 10.0, 1),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn observation_json_forms() {
        let counts = r#"{"mu":0.3,"mu_prime":0.43,
            "vacuum":{"pulses_sent":1e9,"clicks":1000},
            "signal":{"pulses_sent":1e9,"clicks":300000,"errors":3000},
            "decoy":{"pulses_sent":1e9,"clicks":430000}}"#;
        let obs: DecoyObservation = serde_json::from_str(counts).unwrap();
        assert_relative_eq!(obs.s_mu, 3e-4, max_relative = 1e-15);
        assert_eq!(obs.pulses, Some([1e9, 1e9, 1e9]));
        let rates: DecoyObservation =
            serde_json::from_str(r#"{"mu":0.3,"mu_prime":0.43,"s0":0,"s_mu":3e-4,"s_mu_prime":4.3e-4}"#).unwrap();
        assert_eq!(rates.pulses, None);
        let bad = r#"{"mu":0.3,"mu_prime":0.43,"vacuum":{"pulses_sent":10,"clicks":11},
            "signal":{"pulses_sent":10,"clicks":1},"decoy":{"pulses_sent":10,"clicks":1}}"#;
        assert!(serde_json::from_str::<DecoyObservation>(bad).is_err());
    }

    #[test]
    fn key_rates() {
        let rate = |t: f64| gllp_key_rate(t, t, 0.0).unwrap();
        let (mut lo, mut hi) = (0.05, 0.2);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if rate(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.110).abs() < 0.001);
        assert_relative_eq!(
            gllp_key_rate(0.01, 0.01, 0.3202).unwrap(),
            0.5238161650241657,
            max_relative = 1e-12
        );
        assert!(gllp_key_rate(0.01, 0.01, 1.0).unwrap() <= 0.0);
        assert!(gllp_key_rate(0.01, 0.6, 0.5).is_err());
        assert_eq!(decoy_key_rate(1.0, 0.0, 0.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            decoy_key_rate(0.68, 0.01, 0.02, 0.025).unwrap(),
            0.4338700240404436,
            max_relative = 1e-12
        );
        assert!(single_photon_error(0.02, 0.0, 1e-3, 0.0, 0.3).is_err());
    }

    #[test]
    fn decoy_rate_beats_gllp() {
        for &delta0 in &[0.0, 0.005, 0.02] {
            for &delta in &[0.05, 0.2, 0.35] {
                for &e in &[0.005, 0.01, 0.03] {
                    let delta1 = 1.0 - delta - delta0;
                    // Vacuum clicks are errors half the time.
                    let e1 = single_photon_error(e, delta0 * 0.3f64.exp(), 1.0, delta1, 0.3).unwrap();
                    if !(0.0..0.5).contains(&e1) {
                        continue;
                    }
                    let q1 = decoy_key_rate(delta1, delta0, e, e1).unwrap();
                    let g = gllp_key_rate(e, e, delta).unwrap();
                    assert!(q1 >= g - 1e-12, "delta0 {delta0} delta {delta} e {e}: {q1} < {g}");
                }
            }
        }
    }

    #[test]
    fn attack_and_cv_formulas() {
        assert_eq!(bs_attack_info(0.0, 0.3).unwrap(), 0.0);
        assert_relative_eq!(
            bs_attack_info(0.5, 0.2).unwrap(),
            0.09516258196404048,
            max_relative = 1e-14
        );
        assert!(bs_attack_info(0.6, 0.2).unwrap() > bs_attack_info(0.5, 0.2).unwrap());
        assert!(bs_attack_info(0.5, 0.3).unwrap() > bs_attack_info(0.5, 0.2).unwrap());
        let p = cvqkd_interval_prob(0.125, 3.3).unwrap();
        assert!(1.0 - p < 1e-3);
        assert_relative_eq!(1.0 - p, 7.0128e-4, max_relative = 1e-4);
        assert!((cvqkd_interval_prob(1e3, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(cvqkd_interval_prob(0.1, 1.0).unwrap() > cvqkd_interval_prob(0.1, 0.5).unwrap());
    }
}
