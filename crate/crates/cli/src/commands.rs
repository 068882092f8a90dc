//! Maps parsed subcommands onto library calls.

use std::path::Path;

use gqit_core::channels::{lossy_capacity, lossy_capacity_allocation};
use gqit_core::entanglement::{
    classify_tripartite, giedke_separability, is_distillable, is_ppt, simon_separability, standard_form, symmetrize,
    GIEDKE_MAX_ITER,
};
use gqit_core::estimation::{
    bayes_min_mse, fisher_matrices, heterodyne_bayes_gap, heterodyne_mse, heterodyne_mse_monte_carlo,
    photon_number_mse, sld_fisher,
};
use gqit_core::protocols::{
    dense_coding_capacity, dense_coding_optimal_variance, dense_coding_photon_number, single_mode_capacity,
    teleport_consistency_check, teleport_ensemble,
};
use gqit_core::qkd::{
    decoy_bounds_asymptotic, decoy_bounds_finite, decoy_key_rate, hwang_bound, max_secure_distance, qber,
    single_photon_error, Source, FINITE_MAX_ITER, FLUCTUATION_SIGMAS,
};
use gqit_core::{
    DMatrix, DVector, DecoyBounds, DecoyObservation, DetectorModel, GaussianChannel, GaussianFamilyPoint,
    GaussianState, PartySplit, SymplecticTransform,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::literal::{parse_complex, parse_state};
use crate::output::{read_json, Cell, Sink};
use crate::{
    ChannelAction, CliError, Command, DecoyArgs, EntangleAction, Grid, QkdAction, StateAction, StateInput, SweepAction,
};

/// Largest number of rows a sweep may produce.
const MAX_GRID_POINTS: usize = 1_000_000;

pub fn run(command: Command, sink: &Sink) -> Result<(), CliError> {
    // Reject a malformed override even for commands that never iterate.
    max_iter(1)?;
    match command {
        Command::State { action } => state(action, sink),
        Command::Entangle { action } => entangle(action, sink),
        Command::Channel { action } => channel(action, sink),
        Command::Teleport { r, state, shots, seed } => teleport(r, &state, shots, seed, sink),
        Command::Densecode { r } => sink.json(&densecode(r)?),
        Command::Qkd { action } => qkd(action, sink),
        Command::Estimate {
            nbar,
            copies,
            zeta,
            prior,
            trials,
            seed,
        } => estimate(nbar, copies, &zeta, prior, trials, seed, sink),
        Command::Sweep { action } => sweep(action, sink),
    }
}

/// Iteration cap, overridable through `GQIT_MAX_ITER`.
fn max_iter(default: usize) -> Result<usize, CliError> {
    match std::env::var("GQIT_MAX_ITER") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| CliError::Usage(format!("GQIT_MAX_ITER must be a positive integer, got '{v}'"))),
        Err(_) => Ok(default),
    }
}

fn load_state(input: &StateInput) -> Result<GaussianState, CliError> {
    match (&input.path, &input.input) {
        (Some(path), _) => read_json(path),
        (None, Some(literal)) => parse_state(literal),
        (None, None) => Err(CliError::Usage("a state is required (--in or --input)".into())),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn state(action: StateAction, sink: &Sink) -> Result<(), CliError> {
    match action {
        StateAction::Build { literal } => sink.json(&to_value(&parse_state(&literal)?)),
        StateAction::Info { state } => {
            let s = load_state(&state)?;
            let spectrum = s.symplectic_eigenvalues()?;
            let photons = (0..s.n_modes())
                .map(|m| s.mean_photon_number(m))
                .collect::<Result<Vec<_>, _>>()?;
            sink.json(&json!({
                "n_modes": s.n_modes(),
                "physical": s.is_physical(),
                "pure": s.is_pure(),
                "symplectic_eigenvalues": spectrum.values(),
                "entropy": if s.is_physical() { Some(spectrum.entropy()) } else { None },
                "mean_photon_numbers": photons,
            }))
        }
        StateAction::Reduce { state, keep } => sink.json(&to_value(&load_state(&state)?.partial_trace(&keep)?)),
        StateAction::Transform { state, transform } => {
            #[derive(Deserialize)]
            struct TransformDocument {
                matrix: Vec<Vec<f64>>,
                #[serde(default)]
                shift: Option<Vec<f64>>,
            }
            let doc: TransformDocument = read_json(&transform)?;
            let n = doc.matrix.len();
            if doc.matrix.iter().any(|r| r.len() != n) {
                return Err(CliError::Input("transform matrix must be square".into()));
            }
            let matrix = DMatrix::from_row_iterator(n, n, doc.matrix.into_iter().flatten());
            let shift = DVector::from_vec(doc.shift.unwrap_or_else(|| vec![0.0; n]));
            let t = SymplecticTransform::new(matrix, shift)?;
            sink.json(&to_value(&t.apply(&load_state(&state)?)?))
        }
    }
}

fn verdict_name(v: gqit_core::Verdict) -> Value {
    to_value(&v)
}

fn entangle(action: EntangleAction, sink: &Sink) -> Result<(), CliError> {
    match action {
        EntangleAction::Check { state, split } => {
            let s = load_state(&state)?;
            let n = s.n_modes();
            if split == 0 || split >= n {
                return Err(CliError::Usage(format!("--split must lie in 1..{n}")));
            }
            let party_a: Vec<usize> = (0..split).collect();
            let parties = PartySplit::complement(n, &party_a);
            let giedke = giedke_separability(&s, &parties, max_iter(GIEDKE_MAX_ITER)?)?;
            let simon = if n == 2 {
                Some(verdict_name(simon_separability(&s)?.verdict))
            } else {
                None
            };
            sink.json(&json!({
                "ppt": is_ppt(&s, &parties)?,
                "distillable": is_distillable(&s, &parties)?,
                "simon": simon,
                "giedke": verdict_name(giedke.verdict),
                "giedke_iterations": giedke.iterations,
            }))
        }
        EntangleAction::StandardForm { state } => {
            let f = standard_form(&load_state(&state)?)?;
            sink.json(&json!({
                "n_a": f.n_a,
                "n_b": f.n_b,
                "k_x": f.k_x,
                "k_p": f.k_p,
                "ppt_margin": f.ppt_margin(),
                "physical_margin": f.physical_margin(),
                "covariance": rows(&f.covariance()),
            }))
        }
        EntangleAction::Symmetrize { state } => {
            let out = symmetrize(&load_state(&state)?)?;
            sink.json(&json!({ "theta": out.theta, "mixed_mode": out.mixed_mode, "state": to_value(&out.state) }))
        }
        EntangleAction::Classify { state } => sink.json(&to_value(&classify_tripartite(&load_state(&state)?)?)),
    }
}

fn channel(action: ChannelAction, sink: &Sink) -> Result<(), CliError> {
    match action {
        ChannelAction::Apply { state, channel } => {
            let ch: GaussianChannel = read_json(&channel)?;
            sink.json(&to_value(&ch.apply(&load_state(&state)?)?))
        }
        ChannelAction::Capacity { eta, energy } => sink.json(&json!({
            "capacity_nats": lossy_capacity(&eta, energy)?,
            "allocation": lossy_capacity_allocation(&eta, energy)?,
        })),
    }
}

fn teleport(r: f64, input: &StateInput, shots: Option<usize>, seed: Option<u64>, sink: &Sink) -> Result<(), CliError> {
    let s = load_state(input)?;
    let result = teleport_ensemble(&s, r)?;
    let check = match (shots, seed) {
        (Some(shots), Some(seed)) => Some(to_value(&teleport_consistency_check(&s, r, shots, seed)?)),
        _ => None,
    };
    sink.json(&json!({
        "fidelity": result.fidelity_coherent,
        "added_noise": result.added_noise,
        "output": to_value(&result.output),
        "monte_carlo": check,
    }))
}

fn densecode(r: f64) -> Result<Value, CliError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(CliError::Usage(format!("squeezing must be finite and >= 0, got {r}")));
    }
    let nbar = dense_coding_photon_number(r);
    let c_d = dense_coding_capacity(nbar)?;
    let c_hsw = single_mode_capacity(nbar)?;
    Ok(json!({
        "r": r,
        "optimal_variance": dense_coding_optimal_variance(r),
        "mean_photon_number": nbar,
        "dense_coding_capacity_nats": c_d,
        "single_mode_capacity_nats": c_hsw,
        "ratio": if c_hsw > 0.0 { Some(c_d / c_hsw) } else { None },
    }))
}

fn source(mu: Option<f64>) -> Source {
    mu.map_or(Source::SinglePhoton, |mu| Source::Coherent { mu })
}

fn bounds_doc(b: &DecoyBounds) -> Value {
    to_value(b)
}

fn qkd(action: QkdAction, sink: &Sink) -> Result<(), CliError> {
    match action {
        QkdAction::Keyrate {
            decoy,
            detector,
            eta,
            dark,
            visibility,
            length,
        } => {
            let model = match (detector, eta) {
                (Some(path), _) => read_detector(&path)?,
                (None, Some(eta)) => DetectorModel {
                    eta,
                    p_dark: dark,
                    visibility,
                    alpha_db_per_km: 0.0,
                    beta_db: 0.0,
                    afterpulse_a: 0.0,
                    afterpulse_m: 0.0,
                },
                (None, None) => return Err(CliError::Usage("either --detector or --eta is required".into())),
            };
            let row = keyrate_row(&model, length, &decoy)?;
            sink.table(&KEYRATE_HEADER, &[row])
        }
        QkdAction::Bounds { path, pulses } => {
            let obs: DecoyObservation = read_json(&path)?;
            let n = pulses.or_else(|| obs.pulses.map(|p| p[1].min(p[2])));
            let finite = match n {
                Some(n) => Some(bounds_doc(&decoy_bounds_finite(
                    &obs,
                    n,
                    FLUCTUATION_SIGMAS,
                    max_iter(FINITE_MAX_ITER)?,
                )?)),
                None => None,
            };
            sink.json(&json!({
                "asymptotic": bounds_doc(&decoy_bounds_asymptotic(&obs)?),
                "finite": finite,
                "pulses": n,
                "hwang": hwang_bound(&obs)?,
            }))
        }
        QkdAction::Qber { detector, length, mu } => {
            let q = qber(&read_detector(&detector)?, length, source(mu))?;
            sink.json(&to_value(&q))
        }
        QkdAction::Distance {
            detector,
            threshold,
            mu,
        } => {
            let d = max_secure_distance(&read_detector(&detector)?, threshold, source(mu))?;
            sink.json(&json!({ "threshold": threshold, "max_distance_km": if d.is_finite() { Some(d) } else { None } }))
        }
    }
}

fn read_detector(path: &Path) -> Result<DetectorModel, CliError> {
    let model: DetectorModel = read_json(path)?;
    model.validate()?;
    Ok(model)
}

const KEYRATE_HEADER: [&str; 8] = [
    "length_km",
    "s_mu",
    "e_b",
    "delta_asymptotic",
    "delta",
    "delta1",
    "key_rate",
    "key_rate_per_pulse",
];

/// One row of the simulated decoy-state key rate at fiber length `length`.
///
/// Rates come from the no-eavesdropper channel with total transmittance
/// `η·10^{−(αL+β)/10}`; the error rate from the detector model with a
/// coherent source. `delta` is the finite-size bound when a pulse count is
/// given. The key rate per sifted bit is clamped at zero.
fn keyrate_row(model: &DetectorModel, length: f64, decoy: &DecoyArgs) -> Result<Vec<Cell>, CliError> {
    model.validate()?;
    let t = model.eta * model.transmittance(length);
    let obs = DecoyObservation::simulated(decoy.mu, decoy.mu_prime, t, model.p_dark)?;
    let e_b = qber(model, length, Source::Coherent { mu: decoy.mu })?.e_b_afterpulse;
    let asym = decoy_bounds_asymptotic(&obs)?;
    let bounds = match decoy.pulses {
        Some(n) => decoy_bounds_finite(&obs, n, FLUCTUATION_SIGMAS, max_iter(FINITE_MAX_ITER)?)?,
        None => asym,
    };
    let rate = if bounds.delta1 > 0.0 && e_b < 0.5 {
        let e1 = single_photon_error(e_b, obs.s0, obs.s_mu, bounds.delta1, decoy.mu)?.max(0.0);
        if e1 < 0.5 {
            decoy_key_rate(bounds.delta1, bounds.delta0.min(1.0 - bounds.delta1), e_b, e1)?.max(0.0)
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(vec![
        Cell::Number(length),
        Cell::Number(obs.s_mu),
        Cell::Number(e_b),
        Cell::Number(asym.delta),
        Cell::Number(bounds.delta),
        Cell::Number(bounds.delta1),
        Cell::Number(rate),
        Cell::Number(0.5 * obs.s_mu * rate),
    ])
}

#[allow(clippy::too_many_arguments)]
fn estimate(
    nbar: f64,
    copies: usize,
    zeta: &str,
    prior: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    sink: &Sink,
) -> Result<(), CliError> {
    let point = GaussianFamilyPoint::new(parse_complex(zeta)?, nbar)?;
    let fisher = if nbar > 0.0 {
        let f = fisher_matrices(nbar)?;
        json!({
            "sld": f.sld[(0, 0)],
            "kmb": f.kmb[(0, 0)],
            "rld_inverse_real": f.rld_inverse[(0, 0)].re,
            "rld_inverse_imag": f.rld_inverse[(0, 1)].im,
        })
    } else {
        json!({ "sld": sld_fisher(nbar)?[(0, 0)], "kmb": null })
    };
    let bayes = match prior {
        Some(p) => Some(json!({
            "prior_nbar": p,
            "min_mse": bayes_min_mse(nbar, p)?,
            "heterodyne_gap": heterodyne_bayes_gap(nbar, p)?,
        })),
        None => None,
    };
    let monte_carlo = match (trials, seed) {
        (Some(trials), Some(seed)) => Some(json!({
            "trials": trials,
            "seed": seed,
            "mse": heterodyne_mse_monte_carlo(&point, copies, trials, seed)?,
        })),
        _ => None,
    };
    let photon = photon_number_mse(nbar, copies)?;
    sink.json(&json!({
        "nbar": nbar,
        "copies": copies,
        "log_base": "e",
        "heterodyne_mse": heterodyne_mse(nbar, copies)?,
        "photon_number_mse": to_value(&photon),
        "fisher": fisher,
        "bayes": bayes,
        "monte_carlo": monte_carlo,
    }))
}

/// Grid points `from + i·step` for `i ≥ start_row`; empty when `to < from`.
fn grid_points(grid: &Grid) -> Result<Vec<(usize, f64)>, CliError> {
    let Grid {
        from,
        to,
        step,
        start_row,
    } = *grid;
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(
            "grid needs finite --from/--to and a positive --step".into(),
        ));
    }
    if to < from {
        return Ok(Vec::new());
    }
    let span = (to - from) / step;
    if span >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Usage(format!("grid exceeds {MAX_GRID_POINTS} points")));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    Ok((start_row..count).map(|i| (i, from + i as f64 * step)).collect())
}

fn sweep(action: SweepAction, sink: &Sink) -> Result<(), CliError> {
    match action {
        SweepAction::Teleport { grid } => {
            let vacuum = GaussianState::vacuum(1)?;
            let rows = grid_points(&grid)?
                .into_iter()
                .map(|(i, r)| {
                    let t = teleport_ensemble(&vacuum, r)?;
                    Ok(vec![
                        Cell::Index(i),
                        Cell::Number(r),
                        Cell::Number(t.fidelity_coherent),
                        Cell::Number(t.added_noise),
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            sink.table(&["row", "r", "fidelity", "added_noise"], &rows)
        }
        SweepAction::Densecode { grid } => {
            let rows = grid_points(&grid)?
                .into_iter()
                .map(|(i, r)| {
                    let doc = densecode(r)?;
                    let get = |k: &str| Cell::Number(doc[k].as_f64().unwrap_or(f64::NAN));
                    Ok(vec![
                        Cell::Index(i),
                        Cell::Number(r),
                        get("mean_photon_number"),
                        get("dense_coding_capacity_nats"),
                        get("single_mode_capacity_nats"),
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            sink.table(
                &[
                    "row",
                    "r",
                    "mean_photon_number",
                    "dense_coding_capacity",
                    "single_mode_capacity",
                ],
                &rows,
            )
        }
        SweepAction::Keyrate { grid, decoy, detector } => {
            let model = read_detector(&detector)?;
            let rows = grid_points(&grid)?
                .into_iter()
                .map(|(i, l)| {
                    let mut row = vec![Cell::Index(i)];
                    row.extend(keyrate_row(&model, l, &decoy)?);
                    Ok(row)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut header = vec!["row"];
            header.extend(KEYRATE_HEADER);
            sink.table(&header, &rows)
        }
    }
}
