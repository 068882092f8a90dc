//! Fixtures shared by the criterion benches in `benches/`.

use gqit_core::ops::SymplecticTransform;
use gqit_core::GaussianState;

/// An `n`-mode mixed state with correlations between neighbouring modes.
pub fn correlated_state(n_modes: usize) -> GaussianState {
    let mut state = GaussianState::thermal_from_photons(0.4).expect("valid thermal state");
    for _ in 1..n_modes {
        state = state.tensor(&GaussianState::thermal_from_photons(0.4).expect("valid thermal state"));
    }
    (0..n_modes.saturating_sub(1)).fold(state, |s, k| {
        let t = SymplecticTransform::two_mode_squeezer(n_modes, (k, k + 1), 0.6)
            .and_then(|a| {
                a.compose(&SymplecticTransform::beam_splitter(
                    n_modes,
                    (k, k + 1),
                    0.7,
                    0.3,
                    -0.2,
                )?)
            })
            .expect("valid transform");
        t.apply(&s).expect("symplectic image of a physical state")
    })
}
