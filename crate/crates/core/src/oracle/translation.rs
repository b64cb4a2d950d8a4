//! Parity blocks split further by lattice momentum.
//!
//! For a representative configuration `a` with period `R_a` under the
//! cyclic shift `T` (site `i → i+1`), the momentum state
//! `|a,k⟩ ∝ Σ_r e^{-ikr} T^r|a⟩` exists when `k R_a ∈ 2πℤ`. If
//! `H|a⟩ = Σ_j h_j T^{l_j}|ρ_j⟩` with representatives `ρ_j`, then
//! `⟨ρ_j,k|H|a,k⟩ += h_j e^{ik l_j} √(R_a/R_{ρ_j})`, and the amplitude
//! of `T^r|a⟩` in `Σ_a c_a|a,k⟩` is `c_a e^{-ikr}/√R_a`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::eigen::{complex_eigen, complex_eigenvalues};
use super::{check_size, degeneracy_flags, fix_phase, Kernel, SectorSolution};
use crate::error::Result;
use crate::spec::{ChainSpec, Parity};

/// Orbit data for every configuration of one parity.
#[derive(Debug, Clone)]
pub struct TranslationBasis {
    n: usize,
    parity: Parity,
    /// Representative (smallest orbit member) and shift `l` with
    /// `a = T^l rep`, indexed by configuration.
    rep: Vec<u32>,
    shift: Vec<u8>,
    /// Representatives of the parity, ascending, with their periods.
    reps: Vec<(usize, usize)>,
}

fn rotate(a: usize, n: usize) -> usize {
    let mask = (1usize << n) - 1;
    ((a << 1) | (a >> (n - 1))) & mask
}

impl TranslationBasis {
    pub fn new(n: usize, parity: Parity) -> Self {
        let dim = 1usize << n;
        let mut rep = vec![u32::MAX; dim];
        let mut shift = vec![0u8; dim];
        let mut reps = Vec::new();
        for a in 0..dim {
            if rep[a] != u32::MAX || Parity::of_count(a.count_ones()) != parity {
                continue;
            }
            // `a` is the smallest member of a new orbit.
            let mut x = a;
            let mut period = 0;
            loop {
                if rep[x] == u32::MAX {
                    rep[x] = a as u32;
                    shift[x] = period as u8;
                }
                x = rotate(x, n);
                period += 1;
                if x == a {
                    break;
                }
            }
            reps.push((a, period));
        }
        TranslationBasis { n, parity, rep, shift, reps }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Number of orbits.
    pub fn orbits(&self) -> usize {
        self.reps.len()
    }

    /// Orbit indices compatible with momentum `m`, i.e. `m R_a ≡ 0 (mod n)`.
    fn allowed(&self, m: usize) -> Vec<usize> {
        (0..self.reps.len()).filter(|&o| (m * self.reps[o].1).is_multiple_of(self.n)).collect()
    }

    fn block(&self, kernel: &Kernel, m: usize, allowed: &[usize]) -> Mat<Complex64> {
        let k = 2.0 * PI * m as f64 / self.n as f64;
        let mut index = vec![usize::MAX; self.reps.len()];
        for (row, &o) in allowed.iter().enumerate() {
            index[o] = row;
        }
        let orbit_of = |rep: usize| self.reps.binary_search_by_key(&rep, |&(r, _)| r).unwrap();
        let mut h = Mat::<Complex64>::zeros(allowed.len(), allowed.len());
        for (col, &o) in allowed.iter().enumerate() {
            let (a, ra) = self.reps[o];
            kernel.row(a, |target, value| {
                let rho = self.rep[target] as usize;
                let ro = orbit_of(rho);
                let row = index[ro];
                if row == usize::MAX {
                    return;
                }
                let l = self.shift[target] as f64;
                let scale = (ra as f64 / self.reps[ro].1 as f64).sqrt();
                h[(row, col)] += Complex64::from_polar(value * scale, k * l);
            });
        }
        h
    }

    fn expand(&self, m: usize, allowed: &[usize], coeffs: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let k = 2.0 * PI * m as f64 / self.n as f64;
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        for (row, &o) in allowed.iter().enumerate() {
            let (a, ra) = self.reps[o];
            let c = coeffs(row) / (ra as f64).sqrt();
            let mut x = a;
            for r in 0..ra {
                v[x] = c * Complex64::from_polar(1.0, -k * r as f64);
                x = rotate(x, self.n);
            }
        }
        v
    }
}

struct Level {
    energy: f64,
    momentum: usize,
    state: Option<Vec<Complex64>>,
}

fn momentum_levels(
    spec: &ChainSpec,
    basis: &TranslationBasis,
    m: usize,
    keep: usize,
    vectors: bool,
    cutoff: f64,
) -> Result<Vec<Level>> {
    let kernel = Kernel::new(spec);
    let allowed = basis.allowed(m);
    if allowed.is_empty() {
        return Ok(Vec::new());
    }
    let h = basis.block(&kernel, m, &allowed);
    if !vectors {
        let mut e = complex_eigenvalues(&h)?;
        e.sort_by(f64::total_cmp);
        e.truncate(keep);
        e.retain(|&x| x <= cutoff);
        return Ok(e.into_iter().map(|energy| Level { energy, momentum: m, state: None }).collect());
    }
    let eig = complex_eigen(&h)?;
    let mut order: Vec<usize> = (0..allowed.len()).collect();
    order.sort_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b]));
    order.truncate(keep);
    Ok(order
        .into_iter()
        .filter(|&col| eig.values[col] <= cutoff)
        .map(|col| {
            let mut v = basis.expand(m, &allowed, |row| eig.vectors[(row, col)]);
            fix_phase(&mut v);
            Level { energy: eig.values[col], momentum: m, state: Some(v) }
        })
        .collect())
}

fn collect_levels(spec: &ChainSpec, parity: Parity, keep: usize, vectors: bool, cutoff: f64) -> Result<Vec<Level>> {
    let n = spec.n();
    check_size(n)?;
    let basis = TranslationBasis::new(n, parity);
    let per_momentum: Vec<Vec<Level>> = (0..n)
        .into_par_iter()
        .map(|m| momentum_levels(spec, &basis, m, keep, vectors, cutoff))
        .collect::<Result<_>>()?;
    let mut levels: Vec<Level> = per_momentum.into_iter().flatten().collect();
    // Stable sort keeps momentum order among exact ties.
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    levels.truncate(keep);
    Ok(levels)
}

/// Lowest `levels` eigenpairs of one parity sector.
pub fn sector_spectrum(spec: &ChainSpec, parity: Parity, levels: usize) -> Result<SectorSolution> {
    // One extra level so that the degeneracy flag of the last one is meaningful.
    let all = collect_levels(spec, parity, levels.max(1) + 1, true, f64::INFINITY)?;
    let energies: Vec<f64> = all.iter().map(|l| l.energy).collect();
    let mut degenerate = degeneracy_flags(&energies);
    let take = levels.max(1).min(all.len());
    degenerate.truncate(take);
    let mut momenta = Vec::with_capacity(take);
    let mut states = Vec::with_capacity(take);
    for level in all.into_iter().take(take) {
        momenta.push(Some(level.momentum));
        states.push(level.state.unwrap());
    }
    Ok(SectorSolution { parity, energies: energies[..take].to_vec(), states, degenerate, momenta })
}

/// Every eigenvalue of one parity sector, ascending.
pub fn sector_eigenvalues(spec: &ChainSpec, parity: Parity) -> Result<Vec<f64>> {
    Ok(collect_levels(spec, parity, usize::MAX, false, f64::INFINITY)?.into_iter().map(|l| l.energy).collect())
}

/// Every eigenpair of one parity sector with energy at most `cutoff`.
pub(crate) fn sector_eigenpairs(spec: &ChainSpec, parity: Parity, cutoff: f64) -> Result<Vec<(f64, Vec<Complex64>)>> {
    Ok(collect_levels(spec, parity, usize::MAX, true, cutoff)?.into_iter().map(|l| (l.energy, l.state.unwrap())).collect())
}

pub(crate) fn sector_ground_energy(spec: &ChainSpec, parity: Parity) -> Result<f64> {
    Ok(collect_levels(spec, parity, 1, false, f64::INFINITY)?[0].energy)
}
