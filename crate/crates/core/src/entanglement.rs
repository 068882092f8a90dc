//! Separability and distillability of Gaussian states.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{
    inf_norm, min_hermitian_eigenvalue, operator_norm, quadrature_indices, submatrix, symplectic_form, PSD_RTOL,
};
use crate::ops::{condition_on_homodyne, SymplecticTransform};
use crate::state::GaussianState;

/// Default iteration cap for [`giedke_separability`].
pub const GIEDKE_MAX_ITER: usize = 200;

/// Relative regularization added to a singular `B − iJ`.
const REGULARIZATION: f64 = 1e-12;

/// Bipartition of the modes of a state into two disjoint, covering parties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartySplit {
    pub party_a: Vec<usize>,
    pub party_b: Vec<usize>,
}

impl PartySplit {
    pub fn new(party_a: Vec<usize>, party_b: Vec<usize>) -> Self {
        Self { party_a, party_b }
    }

    /// `party_a` against all remaining modes.
    pub fn complement(n_modes: usize, party_a: &[usize]) -> Self {
        Self {
            party_a: party_a.to_vec(),
            party_b: (0..n_modes).filter(|m| !party_a.contains(m)).collect(),
        }
    }

    /// Mode 0 against mode 1.
    pub fn one_by_one() -> Self {
        Self::new(vec![0], vec![1])
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        ensure!(
            !self.party_a.is_empty() && !self.party_b.is_empty(),
            InvalidArgument,
            "both parties need modes"
        );
        let mut seen = vec![false; n_modes];
        for &m in self.party_a.iter().chain(&self.party_b) {
            ensure!(
                m < n_modes,
                InvalidArgument,
                "mode {m} out of range for {n_modes} modes"
            );
            ensure!(!seen[m], InvalidArgument, "mode {m} appears twice in the split");
            seen[m] = true;
        }
        ensure!(
            seen.iter().all(|&s| s),
            InvalidArgument,
            "split does not cover all {n_modes} modes"
        );
        Ok(())
    }
}

/// Flips the sign of every `p` quadrature of party A: `γ ↦ FγF`.
pub fn partial_transpose(state: &GaussianState, split: &PartySplit) -> Result<GaussianState> {
    split.validate(state.n_modes())?;
    let (mut cov, mut disp) = state.clone().into_parts();
    for &m in &split.party_a {
        let p = 2 * m + 1;
        cov.row_mut(p).neg_mut();
        cov.column_mut(p).neg_mut();
        disp[p] = -disp[p];
    }
    GaussianState::new(cov, disp)
}

fn require_physical(state: &GaussianState) -> Result<()> {
    ensure!(state.is_physical(), InvalidState, "state violates gamma + iJ >= 0");
    Ok(())
}

/// `γ + iJ̃ ⪰ 0` with `J̃ = (−J_A) ⊕ J_B`.
pub fn is_ppt(state: &GaussianState, split: &PartySplit) -> Result<bool> {
    split.validate(state.n_modes())?;
    require_physical(state)?;
    Ok(partial_transpose(state, split)?.is_physical())
}

/// NPPT Gaussian states are exactly the distillable ones.
pub fn is_distillable(state: &GaussianState, split: &PartySplit) -> Result<bool> {
    Ok(!is_ppt(state, split)?)
}

/// Local-symplectic normal form of a two-mode covariance matrix:
/// `A = n_a I`, `B = n_b I`, `C = diag(k_x, k_p)` with `k_x ≥ |k_p|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeStandardForm {
    pub n_a: f64,
    pub n_b: f64,
    pub k_x: f64,
    pub k_p: f64,
    /// Local symplectics `(S_A, S_B)` with `(S_A ⊕ S_B) γ (S_A ⊕ S_B)ᵀ` standard.
    pub local_transforms: (Matrix2<f64>, Matrix2<f64>),
}

impl TwoModeStandardForm {
    pub fn covariance(&self) -> DMatrix<f64> {
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            self.n_a, 0.0, self.k_x, 0.0,
            0.0, self.n_a, 0.0, self.k_p,
            self.k_x, 0.0, self.n_b, 0.0,
            0.0, self.k_p, 0.0, self.n_b,
        ]);
        m
    }

    pub fn d_x(&self) -> f64 {
        self.n_a * self.n_b - self.k_x * self.k_x
    }

    pub fn d_p(&self) -> f64 {
        self.n_a * self.n_b - self.k_p * self.k_p
    }

    /// `d_x d_p + 1 − (n_a² + n_b² − 2 k_x k_p)`; non-negative iff PPT.
    pub fn ppt_margin(&self) -> f64 {
        self.d_x() * self.d_p() + 1.0 - (self.n_a.powi(2) + self.n_b.powi(2) - 2.0 * self.k_x * self.k_p)
    }

    /// `d_x d_p + 1 − (n_a² + n_b² + 2 k_x k_p)`; non-negative iff physical.
    pub fn physical_margin(&self) -> f64 {
        self.d_x() * self.d_p() + 1.0 - (self.n_a.powi(2) + self.n_b.powi(2) + 2.0 * self.k_x * self.k_p)
    }

    fn scale(&self) -> f64 {
        1.0 + (self.n_a.abs() + self.k_x.abs())
            .max(self.n_b.abs() + self.k_x.abs())
            .powi(4)
    }
}

fn block(m: &DMatrix<f64>, r: usize, c: usize) -> Matrix2<f64> {
    Matrix2::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)])
}

/// `det(A)^{1/4} A^{−1/2}`, which maps `A` to `√det A · I`.
fn williamson_scaling(a: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let eig = SymmetricEigen::new(*a);
    let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    if l0.min(l1) <= 0.0 {
        return Err(Error::NumericalFailure(
            "local covariance block is not positive definite".into(),
        ));
    }
    let v = eig.eigenvectors;
    let inv_sqrt = v * Matrix2::new(1.0 / l0.sqrt(), 0.0, 0.0, 1.0 / l1.sqrt()) * v.transpose();
    Ok(inv_sqrt * (l0 * l1).powf(0.25))
}

fn standard_form_of(m: &DMatrix<f64>) -> Result<TwoModeStandardForm> {
    let (a, b, c) = (block(m, 0, 0), block(m, 2, 2), block(m, 0, 2));
    let sa = williamson_scaling(&a)?;
    let sb = williamson_scaling(&b)?;
    let svd = (sa * c * sb.transpose()).svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NumericalFailure("SVD of the correlation block failed".into())),
    };
    let (mut sigma0, mut sigma1) = (svd.singular_values[0], svd.singular_values[1]);
    let (mut u, mut v_t) = (u, v_t);
    if sigma1 > sigma0 {
        std::mem::swap(&mut sigma0, &mut sigma1);
        u.swap_columns(0, 1);
        v_t.swap_rows(0, 1);
    }
    let flip = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let mut rot_a = u.transpose();
    let mut rot_b = v_t;
    let mut k_p = sigma1;
    if rot_a.determinant() < 0.0 {
        rot_a = flip * rot_a;
        k_p = -k_p;
    }
    if rot_b.determinant() < 0.0 {
        rot_b = flip * rot_b;
        k_p = -k_p;
    }
    let (det_a, det_b) = (a.determinant(), b.determinant());
    Ok(TwoModeStandardForm {
        n_a: det_a.sqrt(),
        n_b: det_b.sqrt(),
        k_x: sigma0,
        k_p,
        local_transforms: (rot_a * sa, rot_b * sb),
    })
}

pub fn standard_form(state: &GaussianState) -> Result<TwoModeStandardForm> {
    ensure!(
        state.n_modes() == 2,
        InvalidArgument,
        "standard form needs exactly two modes, got {}",
        state.n_modes()
    );
    standard_form_of(state.cov())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Separable,
    Entangled,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityVerdict {
    pub verdict: Verdict,
    pub iterations: usize,
    /// For the iterative test: the block `A_N` that failed `A_N − iJ ⪰ 0`.
    pub witness: Option<DMatrix<f64>>,
}

/// Exact test for one-by-one-mode states via the standard-form PPT inequality.
pub fn simon_separability(state: &GaussianState) -> Result<SeparabilityVerdict> {
    ensure!(
        state.n_modes() == 2,
        InvalidArgument,
        "Simon test needs exactly two modes"
    );
    require_physical(state)?;
    let sf = standard_form(state)?;
    let verdict = if sf.ppt_margin() >= -PSD_RTOL * sf.scale() {
        Verdict::Separable
    } else {
        Verdict::Entangled
    };
    Ok(SeparabilityVerdict {
        verdict,
        iterations: 0,
        witness: None,
    })
}

fn complex_matrix(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

fn joined(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut g = DMatrix::zeros(na + nb, na + nb);
    g.view_mut((0, 0), (na, na)).copy_from(a);
    g.view_mut((na, na), (nb, nb)).copy_from(b);
    g.view_mut((0, na), (na, nb)).copy_from(c);
    g.view_mut((na, 0), (nb, na)).copy_from(&c.transpose());
    g
}

/// Nonlinear-map separability test for arbitrary bipartitions.
///
/// Iterates `A' = B' = A − Re X`, `C' = −Im X` with
/// `X = C (B − iJ)⁻¹ Cᵀ` until `A − iJ ⋡ 0` (entangled) or both
/// `A − ‖C‖ I − iJ ⪰ 0` and `B − ‖C‖ I − iJ ⪰ 0` (separable). Returns
/// `Undecided` at `max_iter`.
pub fn giedke_separability(state: &GaussianState, split: &PartySplit, max_iter: usize) -> Result<SeparabilityVerdict> {
    split.validate(state.n_modes())?;
    require_physical(state)?;
    let ia = quadrature_indices(&split.party_a);
    let ib = quadrature_indices(&split.party_b);
    let g = state.cov();
    let mut a = submatrix(g, &ia, &ia);
    let mut b = submatrix(g, &ib, &ib);
    let mut c = submatrix(g, &ia, &ib);
    let ja = symplectic_form(split.party_a.len());
    let mut jb = symplectic_form(split.party_b.len());
    let neg_ja = -&ja;
    let dim_a = a.nrows();

    for n in 0..=max_iter {
        let tol = PSD_RTOL * (1.0 + inf_norm(&a));
        if min_hermitian_eigenvalue(&a, &neg_ja) < -tol {
            return Ok(SeparabilityVerdict {
                verdict: Verdict::Entangled,
                iterations: n,
                witness: Some(a),
            });
        }
        let norm_c = operator_norm(&c);
        let shifted_a = &a - DMatrix::identity(dim_a, dim_a) * norm_c;
        let shifted_b = &b - DMatrix::identity(b.nrows(), b.nrows()) * norm_c;
        if min_hermitian_eigenvalue(&shifted_a, &neg_ja) >= -tol && min_hermitian_eigenvalue(&shifted_b, &-&jb) >= -tol
        {
            return Ok(SeparabilityVerdict {
                verdict: Verdict::Separable,
                iterations: n,
                witness: None,
            });
        }
        if n == max_iter {
            break;
        }
        let full = joined(&a, &b, &c);
        let j_full = -crate::linalg::direct_sum(&ja, &jb);
        if min_hermitian_eigenvalue(&full, &j_full) < -PSD_RTOL * (1.0 + inf_norm(&full)) {
            return Ok(SeparabilityVerdict {
                verdict: Verdict::Entangled,
                iterations: n + 1,
                witness: None,
            });
        }
        let inv = invert_regularized(&b, &jb)?;
        let x = to_complex(&c) * inv * to_complex(&c.transpose());
        let next_a = &a - x.map(|z| z.re);
        c = -x.map(|z| z.im);
        a = next_a.clone();
        b = next_a;
        jb = ja.clone();
    }
    Ok(SeparabilityVerdict {
        verdict: Verdict::Undecided,
        iterations: max_iter,
        witness: None,
    })
}

/// `(B − iJ)⁻¹`, retrying once with `B + 1e-12‖B‖ I` if singular.
fn invert_regularized(b: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let m = complex_matrix(b, &(-j));
    if let Some(inv) = m.clone().try_inverse() {
        if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Ok(inv);
        }
    }
    let n = b.nrows();
    let eps = REGULARIZATION * inf_norm(b).max(1.0);
    let reg = complex_matrix(&(b + DMatrix::identity(n, n) * eps), &(-j));
    reg.try_inverse()
        .filter(|inv| inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::NumericalFailure("B - iJ is singular even after regularization".into()))
}

/// Result of [`symmetrize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Symmetrized {
    pub state: GaussianState,
    /// Beam-splitter angle used on the weaker-correlated party.
    pub theta: f64,
    /// Mode that was mixed with the ancilla.
    pub mixed_mode: usize,
}

/// Applies a beam splitter between `mode` and a vacuum ancilla, measures the
/// ancilla's `p` quadrature and discards it.
fn ancilla_reduction(state: &GaussianState, mode: usize, theta: f64) -> Result<GaussianState> {
    let base = state.tensor(&GaussianState::vacuum(1)?);
    let bs = SymplecticTransform::beam_splitter(3, (mode, 2), theta, 0.0, 0.0)?;
    condition_on_homodyne(&bs.apply(&base)?, 2, std::f64::consts::FRAC_PI_2, 0.0)
}

fn local_det_gap(s: &GaussianState) -> f64 {
    let g = s.cov();
    block(g, 0, 0).determinant() - block(g, 2, 2).determinant()
}

/// Equalizes the local determinants of an NPPT two-mode state by mixing the
/// less strongly correlated party with a vacuum ancilla at angle
/// `tan²θ = (N_a² − N_b²)/(N_b − D_x N_a)` and conditioning on the ancilla.
///
/// `N_a ≥ N_b` and `K_x` are the standard-form entries of the Wigner matrix
/// `γ⁻¹` and `D_x = N_a N_b − K_x²`. The output is expressed in the local
/// frame where `γ⁻¹` is in standard form.
pub fn symmetrize(state: &GaussianState) -> Result<Symmetrized> {
    ensure!(
        state.n_modes() == 2,
        InvalidArgument,
        "symmetrization needs exactly two modes"
    );
    require_physical(state)?;
    ensure!(
        !is_ppt(state, &PartySplit::one_by_one())?,
        InvalidArgument,
        "symmetrization is defined for NPPT states"
    );
    let wigner = state
        .cov()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("covariance is singular".into()))?;
    let wf = standard_form_of(&crate::linalg::symmetrized(&wigner))?;
    let (la, lb) = wf.local_transforms;
    // Wigner matrices transform with the inverse transpose of the covariance map.
    let local = {
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&la);
        m.view_mut((2, 2), (2, 2)).copy_from(&lb);
        m
    };
    let inv = local
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("local transform is singular".into()))?;
    let cov_frame = crate::linalg::symmetrized(&(inv.transpose() * state.cov() * &inv));
    let disp_frame = inv.transpose() * state.disp();
    let frame_state = GaussianState::new(cov_frame, disp_frame)?;

    let scale = 1.0 + wf.n_a.max(wf.n_b).powi(2);
    if (wf.n_a - wf.n_b).abs() <= 1e-12 * scale || local_det_gap(&frame_state).abs() <= 1e-10 * scale {
        return Ok(Symmetrized {
            state: state.clone(),
            theta: 0.0,
            mixed_mode: 1,
        });
    }
    let (strong, weak) = if wf.n_a > wf.n_b {
        (wf.n_a, wf.n_b)
    } else {
        (wf.n_b, wf.n_a)
    };
    let mixed_mode = if wf.n_a > wf.n_b { 1 } else { 0 };
    let d_x = strong * weak - wf.k_x * wf.k_x;
    let tan2 = (strong * strong - weak * weak) / (weak - d_x * strong);

    let gap = |theta: f64| ancilla_reduction(&frame_state, mixed_mode, theta).map(|s| local_det_gap(&s));
    let tol = 1e-9 * scale;
    let mut theta = if tan2.is_finite() && tan2 > 0.0 {
        tan2.sqrt().atan()
    } else {
        f64::NAN
    };
    if !(theta.is_finite() && gap(theta)?.abs() <= tol) {
        theta = bisect_angle(&gap, tol)?;
    }
    let reduced = ancilla_reduction(&frame_state, mixed_mode, theta)?;
    Ok(Symmetrized {
        state: reduced,
        theta,
        mixed_mode,
    })
}

fn bisect_angle(gap: &dyn Fn(f64) -> Result<f64>, tol: f64) -> Result<f64> {
    let samples = 512;
    let hi_end = std::f64::consts::FRAC_PI_2 * (1.0 - 1e-9);
    let mut prev = (0.0, gap(0.0)?);
    for k in 1..=samples {
        let t = hi_end * k as f64 / samples as f64;
        let v = gap(t)?;
        if prev.1.signum() != v.signum() {
            let (mut lo, mut hi, mut flo) = (prev.0, t, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = gap(mid)?;
                if fm.abs() <= tol || hi - lo < 1e-16 {
                    return Ok(mid);
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (t, v);
    }
    Err(Error::NumericalFailure(
        "no beam-splitter angle equalizes the local determinants".into(),
    ))
}

/// NPPT status of each single-mode cut of a three-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteCuts {
    #[serde(rename = "A|BC")]
    pub a_bc: bool,
    #[serde(rename = "B|AC")]
    pub b_ac: bool,
    #[serde(rename = "C|AB")]
    pub c_ab: bool,
}

/// Class 1 (NPPT across all three cuts) down to Class 4 (PPT across all).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteClass {
    pub class: u8,
    /// `true` where the cut is NPPT.
    pub cuts: TripartiteCuts,
}

pub fn classify_tripartite(state: &GaussianState) -> Result<TripartiteClass> {
    ensure!(
        state.n_modes() == 3,
        InvalidArgument,
        "tripartite classification needs exactly three modes"
    );
    let nppt = |m: usize| is_ppt(state, &PartySplit::complement(3, &[m])).map(|p| !p);
    let cuts = TripartiteCuts {
        a_bc: nppt(0)?,
        b_ac: nppt(1)?,
        c_ab: nppt(2)?,
    };
    let count = [cuts.a_bc, cuts.b_ac, cuts.c_ab].iter().filter(|&&c| c).count();
    Ok(TripartiteClass {
        class: 4 - count as u8,
        cuts,
    })
}
