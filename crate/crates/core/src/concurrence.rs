//! Two-spin reduced states and their concurrence.
//!
//! Two routes are provided: the closed form for parity-symmetric states,
//! written in terms of the pair correlators, and Wootters' spin-flip
//! construction on a general 4×4 density matrix. The latter is the
//! independent check for the former.
//!
//! Two-spin basis ordering: index `2·a_i + a_j`, where `a = 1` means spin up.
//! So `|↓↓⟩, |↓↑⟩, |↑↓⟩, |↑↑⟩`.

use nalgebra::{Complex, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Concurrences below this are reported as exactly zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Eigenvalues of ρ below this are treated as rounding noise when forming
/// `√ρ`. Without the cut, noise of order 1e-17 on a rank-deficient ρ shows
/// up as ~1e-8 in the concurrence.
const RANK_TOL: f64 = 1e-14;

/// Largest site count accepted by the state-vector kernels.
pub const MAX_VECTOR_SITES: usize = 20;

/// Correlators that fix the reduced state of a pair `(i, j)` in a
/// parity-symmetric state.
///
/// `alpha_plus = ⟨s_+^i s_+^j⟩` (parallel coherence) and
/// `alpha_minus = ⟨s_+^i s_-^j⟩` (antiparallel coherence). Both are real
/// for every state produced in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelators {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub szsz: f64,
    pub sz_i: f64,
    pub sz_j: f64,
}

/// Populations within [`RANK_TOL`] of zero are rounding residue; under the
/// square roots below they would otherwise grow to `~1e-8`.
fn truncate_population(p: f64) -> f64 {
    if p.abs() < RANK_TOL {
        0.0
    } else {
        p
    }
}

impl PairCorrelators {
    /// Correlators of a site-symmetric pair (`⟨s_z^i⟩ = ⟨s_z^j⟩`).
    pub fn symmetric(alpha_plus: f64, alpha_minus: f64, szsz: f64, sz: f64) -> Self {
        PairCorrelators { alpha_plus, alpha_minus, szsz, sz_i: sz, sz_j: sz }
    }

    /// Populations `(ρ_↓↓, ρ_↓↑, ρ_↑↓, ρ_↑↑)`.
    pub fn populations(&self) -> [f64; 4] {
        let sum = 0.5 * (self.sz_i + self.sz_j);
        let diff = 0.5 * (self.sz_i - self.sz_j);
        [
            0.25 - sum + self.szsz,
            0.25 - diff - self.szsz,
            0.25 + diff - self.szsz,
            0.25 + sum + self.szsz,
        ]
    }

    /// `p = √(ρ_↑↓ ρ_↓↑)`, which is `¼ - ⟨s_z^i s_z^j⟩` for site-symmetric pairs.
    pub fn antiparallel_population(&self) -> f64 {
        let [_, ud, du, _] = self.populations().map(truncate_population);
        (ud * du).max(0.0).sqrt()
    }

    /// `q² = ρ_↑↑ ρ_↓↓ = (½ - p)² - ⟨s_z⟩²` for site-symmetric pairs.
    pub fn parallel_population_sq(&self) -> f64 {
        let [dd, _, _, uu] = self.populations().map(truncate_population);
        dd * uu
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &PairCorrelators, w: f64) -> PairCorrelators {
        let m = |a: f64, b: f64| w * a + (1.0 - w) * b;
        PairCorrelators {
            alpha_plus: m(self.alpha_plus, other.alpha_plus),
            alpha_minus: m(self.alpha_minus, other.alpha_minus),
            szsz: m(self.szsz, other.szsz),
            sz_i: m(self.sz_i, other.sz_i),
            sz_j: m(self.sz_j, other.sz_j),
        }
    }
}

/// Which Bell-type correlation carries the entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcurrenceKind {
    /// Even type, as in `|↑↑⟩ + |↓↓⟩`.
    Parallel,
    /// Odd type, as in `|↑↓⟩ + |↓↑⟩`.
    Antiparallel,
    Zero,
    /// Not parity symmetric, so the type is undefined.
    Unclassified,
}

impl ConcurrenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConcurrenceKind::Parallel => "parallel",
            ConcurrenceKind::Antiparallel => "antiparallel",
            ConcurrenceKind::Zero => "zero",
            ConcurrenceKind::Unclassified => "unclassified",
        }
    }
}

impl std::str::FromStr for ConcurrenceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "parallel" => Ok(ConcurrenceKind::Parallel),
            "antiparallel" => Ok(ConcurrenceKind::Antiparallel),
            "zero" => Ok(ConcurrenceKind::Zero),
            "unclassified" => Ok(ConcurrenceKind::Unclassified),
            other => Err(format!("unknown concurrence kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceValue {
    pub value: f64,
    pub kind: ConcurrenceKind,
}

impl ConcurrenceValue {
    pub const ZERO: ConcurrenceValue = ConcurrenceValue { value: 0.0, kind: ConcurrenceKind::Zero };

    fn classified(value: f64, kind: ConcurrenceKind) -> Self {
        if value < ZERO_TOL {
            ConcurrenceValue::ZERO
        } else {
            ConcurrenceValue { value, kind }
        }
    }
}

/// The two branches `(|α⁺| - p, |α⁻| - q)` of the parity-symmetric formula.
pub fn concurrence_branches(c: &PairCorrelators) -> Result<(f64, f64)> {
    let q_sq = c.parallel_population_sq();
    if q_sq < -ZERO_TOL {
        return Err(Error::NegativeDiscriminant { value: q_sq });
    }
    let q = q_sq.max(0.0).sqrt();
    let p = c.antiparallel_population();
    Ok((c.alpha_plus.abs() - p, c.alpha_minus.abs() - q))
}

/// `C = 2 max(|α⁺| - p, |α⁻| - q, 0)`.
pub fn concurrence_from_correlators(c: &PairCorrelators) -> Result<ConcurrenceValue> {
    let (parallel, antiparallel) = concurrence_branches(c)?;
    let value = 2.0 * parallel.max(antiparallel).max(0.0);
    let kind = if parallel > antiparallel {
        ConcurrenceKind::Parallel
    } else {
        ConcurrenceKind::Antiparallel
    };
    Ok(ConcurrenceValue::classified(value, kind))
}

/// A two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpinState {
    rho: Matrix4<Complex64>,
}

impl TwoSpinState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let herm_err = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > 1e-10 {
            return Err(Error::NotADensityMatrix(format!("not Hermitian (error {herm_err:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::NotADensityMatrix(format!("trace {tr}")));
        }
        let min_eig = rho.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-12 {
            return Err(Error::NotADensityMatrix(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(TwoSpinState { rho })
    }

    /// Builds the X-shaped reduced state determined by pair correlators.
    pub fn from_correlators(c: &PairCorrelators) -> Result<Self> {
        let pops = c.populations();
        let mut rho = Matrix4::<Complex64>::zeros();
        for (k, &p) in pops.iter().enumerate() {
            rho[(k, k)] = Complex::new(p, 0.0);
        }
        rho[(0, 3)] = Complex::new(c.alpha_plus, 0.0);
        rho[(3, 0)] = Complex::new(c.alpha_plus, 0.0);
        rho[(1, 2)] = Complex::new(c.alpha_minus, 0.0);
        rho[(2, 1)] = Complex::new(c.alpha_minus, 0.0);
        TwoSpinState::new(rho)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    /// Commutes with the pair parity `e^{iπ(s_z^i + s_z^j + 1)}`, i.e. only
    /// the X-shaped entries are non-zero.
    pub fn is_parity_symmetric(&self, tol: f64) -> bool {
        const OFF_X: [(usize, usize); 4] = [(0, 1), (0, 2), (1, 3), (2, 3)];
        OFF_X.iter().all(|&(a, b)| self.rho[(a, b)].norm() <= tol && self.rho[(b, a)].norm() <= tol)
    }

    /// Reads the correlators back from the matrix elements.
    pub fn correlators(&self) -> PairCorrelators {
        let r = |a: usize| self.rho[(a, a)].re;
        let (dd, du, ud, uu) = (r(0), r(1), r(2), r(3));
        PairCorrelators {
            alpha_plus: self.rho[(0, 3)].re,
            alpha_minus: self.rho[(1, 2)].re,
            szsz: 0.25 * (dd + uu - du - ud),
            sz_i: 0.5 * (uu + ud - dd - du),
            sz_j: 0.5 * (uu + du - dd - ud),
        }
    }

    /// `w·a + (1-w)·b`.
    pub fn mix(a: &TwoSpinState, b: &TwoSpinState, w: f64) -> Result<TwoSpinState> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::WeightOutOfRange { q: w });
        }
        TwoSpinState::new(a.rho * Complex::new(w, 0.0) + b.rho * Complex::new(1.0 - w, 0.0))
    }
}

/// Wootters concurrence `max(0, √λ₁ - √λ₂ - √λ₃ - √λ₄)`.
///
/// The `√λᵢ` are obtained as singular values of `M = √ρ Y √ρ*` with
/// `Y = σ_y ⊗ σ_y`; `M M† = √ρ ρ̃ √ρ` is the Hermitian form of `ρ ρ̃`.
/// Singular values carry absolute rather than relative error, which keeps
/// the small ones from being inflated by a square root.
pub fn wootters_concurrence(state: &TwoSpinState) -> Result<ConcurrenceValue> {
    let rho = state.matrix();
    let eig = rho.symmetric_eigen();
    let mut sqrt_rho = Matrix4::<Complex64>::zeros();
    for k in 0..4 {
        let p = eig.eigenvalues[k];
        if p < RANK_TOL {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        sqrt_rho += v * v.adjoint() * Complex::new(p.sqrt(), 0.0);
    }
    let mut y = Matrix4::<Complex64>::zeros();
    y[(0, 3)] = Complex::new(-1.0, 0.0);
    y[(1, 2)] = Complex::new(1.0, 0.0);
    y[(2, 1)] = Complex::new(1.0, 0.0);
    y[(3, 0)] = Complex::new(-1.0, 0.0);
    let m = sqrt_rho * y * sqrt_rho.map(|z| z.conj());
    let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let value = (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0);

    let kind = if state.is_parity_symmetric(1e-10) {
        let (parallel, antiparallel) = concurrence_branches(&state.correlators())?;
        if parallel > antiparallel {
            ConcurrenceKind::Parallel
        } else {
            ConcurrenceKind::Antiparallel
        }
    } else {
        ConcurrenceKind::Unclassified
    };
    Ok(ConcurrenceValue::classified(value, kind))
}

/// Amplitude types accepted by the state-vector kernels.
pub trait Amplitude: Copy + Send + Sync {
    fn to_complex(self) -> Complex64;
}

impl Amplitude for f64 {
    fn to_complex(self) -> Complex64 {
        Complex::new(self, 0.0)
    }
}

impl Amplitude for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
}

fn check_pair(len: usize, n: usize, i: usize, j: usize) -> Result<()> {
    if n > MAX_VECTOR_SITES {
        return Err(Error::SizeTooLarge { n, max: MAX_VECTOR_SITES });
    }
    if len != 1usize << n {
        return Err(Error::InvalidSpec(format!("state vector has length {len}, expected 2^{n}")));
    }
    if i == j || i >= n || j >= n {
        return Err(Error::BadIndices { i, j, n });
    }
    Ok(())
}

/// Adds `w·Tr_{rest} |ψ⟩⟨ψ|` for sites `(i, j)` into `acc`.
pub(crate) fn accumulate_two_spin<T: Amplitude>(
    amplitudes: &[T],
    i: usize,
    j: usize,
    w: f64,
    acc: &mut Matrix4<Complex64>,
) {
    let (bi, bj) = (1usize << i, 1usize << j);
    let offsets = [0, bj, bi, bi | bj];
    for rest in 0..amplitudes.len() {
        if rest & (bi | bj) != 0 {
            continue;
        }
        let psi = offsets.map(|o| amplitudes[rest | o].to_complex());
        for a in 0..4 {
            if psi[a] == Complex::new(0.0, 0.0) {
                continue;
            }
            for c in 0..4 {
                acc[(a, c)] += psi[a] * psi[c].conj() * w;
            }
        }
    }
}

/// Partial trace of `|ψ⟩⟨ψ|` over every site except `i` and `j`.
///
/// Site `k` is bit `k` of the basis index. The pair is ordered as given,
/// so `(i, j)` and `(j, i)` differ by the swap of tensor factors.
pub fn reduced_two_spin<T: Amplitude>(amplitudes: &[T], n: usize, i: usize, j: usize) -> Result<TwoSpinState> {
    check_pair(amplitudes.len(), n, i, j)?;
    let mut rho = Matrix4::zeros();
    accumulate_two_spin(amplitudes, i, j, 1.0, &mut rho);
    TwoSpinState::new(rho)
}

/// Reduced two-spin state of a mixture `Σ w_k |ψ_k⟩⟨ψ_k|`.
pub fn reduced_two_spin_mixed<T: Amplitude>(
    ensemble: &[(f64, &[T])],
    n: usize,
    i: usize,
    j: usize,
) -> Result<TwoSpinState> {
    let mut rho = Matrix4::zeros();
    for &(w, psi) in ensemble {
        check_pair(psi.len(), n, i, j)?;
        accumulate_two_spin(psi, i, j, w, &mut rho);
    }
    TwoSpinState::new(rho)
}
