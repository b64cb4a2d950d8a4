//! Fully connected chain (`r_l = 2/(n-1)`), solved in the maximum total
//! spin block.
//!
//! With constant range the Hamiltonian reduces to
//! `H = b S_z - Σ_μ v_μ (S_μ² - n/4)/(n-1)`, which commutes with `S²`.
//! The ground state of each parity lives in `S = n/2`, spanned by the
//! normalized states `|k⟩ ∝ S_+^k|0⟩`, `k = 0..n`. The `S_±²` terms couple
//! `k ↔ k±2` only, so even and odd `k` form two independent tridiagonal
//! blocks.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::concurrence::PairCorrelators;
use crate::error::{Error, Result};
use crate::sector::{SectorGround, SectorSolver};
use crate::spec::{ChainSpec, Parity};
use crate::tridiag::SymTridiagonal;

/// `H` restricted to `S = n/2` in the basis `|k⟩`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveBlock {
    n: usize,
    /// Diagonal `⟨k|H|k⟩`.
    diag: Vec<f64>,
    /// `⟨k+2|H|k⟩`.
    skip: Vec<f64>,
}

/// `√((k+1)(n-k))`, the `S_+` matrix element `⟨k+1|S_+|k⟩`.
fn raise(n: usize, k: usize) -> f64 {
    (((k + 1) * (n - k)) as f64).sqrt()
}

/// `⟨k+2|S_+²|k⟩`.
fn raise2(n: usize, k: usize) -> f64 {
    raise(n, k) * raise(n, k + 1)
}

pub fn build_collective_hamiltonian(spec: &ChainSpec) -> Result<CollectiveBlock> {
    if !spec.is_fully_connected() {
        return Err(Error::NotFullyConnected);
    }
    let n = spec.n();
    let nf = n as f64;
    let c = spec.couplings();
    let (vp, vm) = (c.v_plus(), c.v_minus());
    let scale = 1.0 / (nf - 1.0);
    let s_sq = 0.5 * nf * (0.5 * nf + 1.0);
    // v_x S_x² + v_y S_y² = v_+ (S² - S_z²) + ½ v_- (S_+² + S_-²).
    let diag = (0..=n)
        .map(|k| {
            let m = k as f64 - 0.5 * nf;
            spec.b() * m
                - scale * (vp * (s_sq - m * m) + c.vz * m * m - 0.25 * nf * (c.vx + c.vy + c.vz))
        })
        .collect();
    let skip = (0..n.saturating_sub(1)).map(|k| -scale * 0.5 * vm * raise2(n, k)).collect();
    Ok(CollectiveBlock { n, diag, skip })
}

impl CollectiveBlock {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `(n+1)×(n+1)` dense form.
    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.n + 1;
        let mut h = DMatrix::zeros(m, m);
        for k in 0..m {
            h[(k, k)] = self.diag[k];
        }
        for (k, &v) in self.skip.iter().enumerate() {
            h[(k + 2, k)] = v;
            h[(k, k + 2)] = v;
        }
        h
    }

    /// Basis indices `k` of the given parity, `(-1)^k`.
    pub fn sector_indices(&self, parity: Parity) -> Vec<usize> {
        let first = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        (first..=self.n).step_by(2).collect()
    }

    fn sector_block(&self, parity: Parity) -> SymTridiagonal {
        let idx = self.sector_indices(parity);
        let diag = idx.iter().map(|&k| self.diag[k]).collect();
        let off = idx.iter().take(idx.len().saturating_sub(1)).map(|&k| self.skip[k]).collect();
        SymTridiagonal::new(diag, off)
    }

    /// All eigenvalues of the block, ascending (dense solve).
    pub fn spectrum(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix().symmetric_eigenvalues().iter().cloned().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Lowest state of one parity within the collective block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveGroundState {
    pub n: usize,
    pub parity: Parity,
    pub energy: f64,
    /// Coefficients over all `k = 0..=n`; entries of the other parity are zero.
    pub weights: Vec<f64>,
}

pub fn collective_ground_state(block: &CollectiveBlock, parity: Parity) -> CollectiveGroundState {
    let idx = block.sector_indices(parity);
    let (energy, v) = block.sector_block(parity).lowest_eigenpair();
    let mut weights = vec![0.0; block.n + 1];
    for (&k, &w) in idx.iter().zip(&v) {
        weights[k] = w;
    }
    CollectiveGroundState { n: block.n, parity, energy, weights }
}

impl CollectiveGroundState {
    /// `⟨S_z⟩`.
    pub fn magnetization(&self) -> f64 {
        let half = 0.5 * self.n as f64;
        self.weights.iter().enumerate().map(|(k, w)| w * w * (k as f64 - half)).sum()
    }

    /// Amplitudes in the full `2^n` computational basis; `|k⟩` spreads
    /// uniformly over the `C(n, k)` configurations with `k` up spins.
    pub fn to_state_vector(&self) -> Result<Vec<f64>> {
        let n = self.n;
        if n > crate::concurrence::MAX_VECTOR_SITES {
            return Err(Error::SizeTooLarge { n, max: crate::concurrence::MAX_VECTOR_SITES });
        }
        let ln_binom = crate::closed_form::ln_binomials(n);
        let per_config: Vec<f64> = (0..=n).map(|k| self.weights[k] * (-0.5 * ln_binom[k]).exp()).collect();
        Ok((0..1usize << n).map(|x| per_config[x.count_ones() as usize]).collect())
    }
}

/// Pair correlators, identical for every separation:
/// `α⁺ = ⟨S_+²⟩/c_n`, `α⁻ = (n²/4 - ⟨S_z²⟩)/c_n`,
/// `⟨s_z^i s_z^j⟩ = (⟨S_z²⟩ - n/4)/c_n`, `⟨s_z⟩ = ⟨S_z⟩/n`, `c_n = n(n-1)`.
pub fn collective_pair_correlators(gs: &CollectiveGroundState) -> PairCorrelators {
    let n = gs.n;
    let nf = n as f64;
    let cn = nf * (nf - 1.0);
    let w = &gs.weights;
    let mut sz = 0.0;
    let mut sz2 = 0.0;
    for (k, &wk) in w.iter().enumerate() {
        let m = k as f64 - 0.5 * nf;
        sz += wk * wk * m;
        sz2 += wk * wk * m * m;
    }
    let sp2: f64 = (0..n.saturating_sub(1)).map(|k| w[k + 2] * w[k] * raise2(n, k)).sum();
    PairCorrelators::symmetric(sp2 / cn, (0.25 * nf * nf - sz2) / cn, (sz2 - 0.25 * nf) / cn, sz / nf)
}

/// The collective solution as a [`SectorSolver`].
#[derive(Debug, Clone)]
pub struct CollectiveModel {
    spec: ChainSpec,
}

impl CollectiveModel {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        build_collective_hamiltonian(spec)?;
        Ok(CollectiveModel { spec: spec.clone() })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn ground_state(&self, b: f64, parity: Parity) -> Result<CollectiveGroundState> {
        Ok(collective_ground_state(&build_collective_hamiltonian(&self.spec.with_field(b)?)?, parity))
    }
}

impl SectorSolver for CollectiveModel {
    fn size(&self) -> usize {
        self.spec.n()
    }

    fn label(&self) -> &'static str {
        "collective"
    }

    fn sector_energy(&self, b: f64, parity: Parity) -> Result<f64> {
        let block = build_collective_hamiltonian(&self.spec.with_field(b)?)?;
        Ok(block.sector_block(parity).lowest_eigenvalue())
    }

    fn sector_ground(&self, b: f64, parity: Parity, separations: &[usize]) -> Result<SectorGround> {
        let n = self.spec.n();
        let gs = self.ground_state(b, parity)?;
        let c = collective_pair_correlators(&gs);
        let pairs = separations
            .iter()
            .map(|&l| if l == 0 || l >= n { Err(Error::SeparationOutOfRange { l, max: n - 1 }) } else { Ok((l, c)) })
            .collect::<Result<_>>()?;
        Ok(SectorGround { parity, b, energy: gs.energy, magnetization: gs.magnetization(), pairs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{factorization_point, parity_projected_dicke, side_limits};
    use crate::concurrence::concurrence_from_correlators;
    use crate::spec::Couplings;

    fn spec(n: usize, vy: f64, b: f64) -> ChainSpec {
        ChainSpec::fully_connected(n, Couplings::new(1.0, vy, 0.0), b).unwrap()
    }

    #[test]
    fn rejects_other_profiles() {
        let nn = ChainSpec::nearest_neighbor(5, Couplings::new(1.0, 0.5, 0.0), 0.1).unwrap();
        assert_eq!(build_collective_hamiltonian(&nn), Err(Error::NotFullyConnected));
    }

    #[test]
    fn block_is_pentadiagonal_with_decoupled_parities() {
        let h = build_collective_hamiltonian(&spec(7, 0.3, 0.4)).unwrap().matrix();
        for i in 0..8usize {
            for j in 0..8 {
                let d = i.abs_diff(j);
                if d == 1 || d > 2 {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
        assert!((h.clone() - h.transpose()).abs().max() == 0.0);
    }

    #[test]
    fn field_only_is_diagonal() {
        let s = ChainSpec::fully_connected(6, Couplings::new(0.0, 0.0, 0.0), 0.7).unwrap();
        let h = build_collective_hamiltonian(&s).unwrap().matrix();
        for k in 0..=6 {
            assert!((h[(k, k)] - 0.7 * (k as f64 - 3.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn sector_energies_degenerate_at_factorizing_field() {
        let s = spec(10, 0.75, 0.0);
        let fp = factorization_point(&s).unwrap();
        let block = build_collective_hamiltonian(&s.with_field(fp.b_s).unwrap()).unwrap();
        for parity in Parity::BOTH {
            let gs = collective_ground_state(&block, parity);
            assert!((gs.energy - fp.e_s).abs() < 1e-10, "{parity}: {}", gs.energy);
        }
    }

    #[test]
    fn ground_states_at_factorizing_field_are_parity_projections() {
        for &(n, chi) in &[(10usize, 0.75), (50, 0.95), (400, 0.99)] {
            let s = spec(n, chi, 0.0);
            let fp = factorization_point(&s).unwrap();
            let block = build_collective_hamiltonian(&s.with_field(fp.b_s).unwrap()).unwrap();
            let limits = side_limits(chi, n).unwrap();
            for parity in Parity::BOTH {
                let gs = collective_ground_state(&block, parity);
                let exact = parity_projected_dicke(chi, n, parity).unwrap();
                let overlap: f64 = gs.weights.iter().zip(&exact).map(|(a, b)| a * b).sum();
                assert!((overlap - 1.0).abs() < 1e-9, "n={n} {parity}: overlap {overlap}");
                let c = concurrence_from_correlators(&collective_pair_correlators(&gs)).unwrap();
                let expected = match parity {
                    Parity::Even => limits.plus,
                    Parity::Odd => limits.minus,
                };
                assert!((c.value - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn polarized_and_w_limits() {
        let block = build_collective_hamiltonian(&spec(8, 0.5, 50.0)).unwrap();
        let gs = collective_ground_state(&block, Parity::Even);
        assert!((gs.weights[0] - 1.0).abs() < 1e-4);
        let c = collective_pair_correlators(&gs);
        assert!(c.alpha_plus.abs() < 1e-3 && (c.szsz - 0.25).abs() < 1e-3 && (c.sz_i + 0.5).abs() < 1e-3);

        // Close to the XXZ limit, just below b_s, the odd state tends to W.
        let s = spec(8, 1.0 - 1e-6, 0.0);
        let fp = factorization_point(&s).unwrap();
        let block = build_collective_hamiltonian(&s.with_field(fp.b_s - 1e-4).unwrap()).unwrap();
        let gs = collective_ground_state(&block, Parity::Odd);
        assert!(gs.weights[1] > 0.999);
        let c = concurrence_from_correlators(&collective_pair_correlators(&gs)).unwrap();
        assert!((c.value - 2.0 / 8.0).abs() < 1e-3);
    }

    #[test]
    fn w_state_correlators() {
        let n = 6;
        let mut weights = vec![0.0; n + 1];
        weights[1] = 1.0;
        let gs = CollectiveGroundState { n, parity: Parity::Odd, energy: 0.0, weights };
        let c = concurrence_from_correlators(&collective_pair_correlators(&gs)).unwrap();
        assert!((c.value - 2.0 / n as f64).abs() < 1e-14, "{c:?}");
        assert!((gs.magnetization() - (1.0 - 0.5 * n as f64)).abs() < 1e-15);
    }

    #[test]
    fn attractive_ground_state_has_same_signed_weights() {
        let block = build_collective_hamiltonian(&spec(12, 0.4, 0.3)).unwrap();
        for parity in Parity::BOTH {
            let gs = collective_ground_state(&block, parity);
            let idx = block.sector_indices(parity);
            assert!(idx.iter().all(|&k| gs.weights[k] > 0.0));
        }
    }

    #[test]
    fn large_block_is_cheap() {
        let s = spec(10_000, 1.0 - 2.5e-4, 0.0);
        let fp = factorization_point(&s).unwrap();
        let block = build_collective_hamiltonian(&s.with_field(fp.b_s).unwrap()).unwrap();
        let gs = collective_ground_state(&block, Parity::Odd);
        assert!((gs.energy - fp.e_s).abs() < 1e-8 * fp.e_s.abs());
    }
}
