#![allow(dead_code)]

use gqit_core::ops::SymplecticTransform;
use gqit_core::{DMatrix, DVector, GaussianState};
use proptest::prelude::*;
use rand::Rng;

/// A generator of the symplectic group acting on at most two modes.
#[derive(Debug, Clone, Copy)]
pub enum Gate {
    Squeeze {
        mode: usize,
        r: f64,
        phi: f64,
    },
    Phase {
        mode: usize,
        phi: f64,
    },
    BeamSplitter {
        a: usize,
        b: usize,
        theta: f64,
        phi0: f64,
        phi1: f64,
    },
    TwoModeSqueeze {
        a: usize,
        b: usize,
        r: f64,
    },
    Displace {
        mode: usize,
        dx: f64,
        dp: f64,
    },
}

impl Gate {
    pub fn transform(&self, n: usize) -> SymplecticTransform {
        match *self {
            Gate::Squeeze { mode, r, phi } => SymplecticTransform::complex_squeezer(n, mode, r, phi),
            Gate::Phase { mode, phi } => SymplecticTransform::phase_shift(n, mode, phi),
            Gate::BeamSplitter {
                a,
                b,
                theta,
                phi0,
                phi1,
            } => SymplecticTransform::beam_splitter(n, (a, b), theta, phi0, phi1),
            Gate::TwoModeSqueeze { a, b, r } => SymplecticTransform::two_mode_squeezer(n, (a, b), r),
            Gate::Displace { mode, dx, dp } => SymplecticTransform::displacement(n, mode, dx, dp),
        }
        .expect("generator parameters are valid")
    }

    fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mode = rng.random_range(0..n);
        let (a, b) = (mode, (mode + rng.random_range(1..n.max(2))) % n);
        match rng.random_range(0..if n > 1 { 5 } else { 3 }) {
            0 => Gate::Squeeze {
                mode,
                r: rng.random_range(-0.8..0.8),
                phi: angle(rng),
            },
            1 => Gate::Phase { mode, phi: angle(rng) },
            2 => Gate::Displace {
                mode,
                dx: rng.random_range(-2.0..2.0),
                dp: rng.random_range(-2.0..2.0),
            },
            3 => Gate::BeamSplitter {
                a,
                b,
                theta: angle(rng),
                phi0: angle(rng),
                phi1: angle(rng),
            },
            _ => Gate::TwoModeSqueeze {
                a,
                b,
                r: rng.random_range(-0.8..0.8),
            },
        }
    }
}

fn angle(rng: &mut impl Rng) -> f64 {
    rng.random_range(-3.2..3.2)
}

pub fn compose(gates: &[Gate], n: usize) -> SymplecticTransform {
    gates.iter().fold(SymplecticTransform::identity(n), |acc, g| {
        g.transform(n).compose(&acc).expect("same mode count")
    })
}

pub fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let angle = -3.2..3.2f64;
    let squeeze = (0..n, -0.8..0.8f64, angle.clone()).prop_map(|(mode, r, phi)| Gate::Squeeze { mode, r, phi });
    let phase = (0..n, angle.clone()).prop_map(|(mode, phi)| Gate::Phase { mode, phi });
    let displace = (0..n, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(mode, dx, dp)| Gate::Displace { mode, dx, dp });
    if n == 1 {
        return prop_oneof![squeeze, phase, displace].boxed();
    }
    let pair = (0..n, 1..n).prop_map(move |(a, k)| (a, (a + k) % n));
    let bs = (pair.clone(), angle.clone(), angle.clone(), angle).prop_map(|((a, b), theta, phi0, phi1)| {
        Gate::BeamSplitter {
            a,
            b,
            theta,
            phi0,
            phi1,
        }
    });
    let tms = (pair, -0.8..0.8f64).prop_map(|((a, b), r)| Gate::TwoModeSqueeze { a, b, r });
    prop_oneof![squeeze, phase, displace, bs, tms].boxed()
}

pub fn symplectic_strategy(n: usize, max_gates: usize) -> impl Strategy<Value = SymplecticTransform> {
    prop::collection::vec(gate_strategy(n), 0..=max_gates).prop_map(move |g| compose(&g, n))
}

/// Random symplectic image of a product of thermal states.
pub fn thermal_product(nus: &[f64]) -> GaussianState {
    let diag: Vec<f64> = nus.iter().flat_map(|&nu| [nu, nu]).collect();
    GaussianState::centered(DMatrix::from_diagonal(&DVector::from_vec(diag))).expect("thermal product is valid")
}

pub fn physical_state_strategy(n: usize) -> impl Strategy<Value = GaussianState> {
    (prop::collection::vec(1.0..4.0f64, n), symplectic_strategy(n, 8)).prop_map(|(nus, s)| {
        s.apply(&thermal_product(&nus))
            .expect("symplectic image of a physical state")
    })
}

pub fn random_symplectic(n: usize, gates: usize, rng: &mut impl Rng) -> SymplecticTransform {
    let g: Vec<Gate> = (0..gates).map(|_| Gate::random(n, rng)).collect();
    compose(&g, n)
}

pub fn random_physical_state(n: usize, rng: &mut impl Rng) -> GaussianState {
    let nus: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..4.0)).collect();
    random_symplectic(n, 8, rng)
        .apply(&thermal_product(&nus))
        .expect("symplectic image of a physical state")
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
