//! Gibbs states `ρ(T) ∝ e^{-H/T}` (units with `k = 1`).

use num_complex::Complex64;

use super::magnetization;
use super::translation::{sector_eigenpairs, sector_ground_energy};
use crate::concurrence::{reduced_two_spin_mixed, TwoSpinState};
use crate::error::{Error, Result};
use crate::spec::{ChainSpec, Parity};

/// Largest chain for thermal states.
pub const MAX_THERMAL_SITES: usize = 12;

/// Levels with `E - E_0 > CUTOFF·T` carry relative weight below `e^{-40}`
/// and are dropped.
const CUTOFF: f64 = 40.0;

/// A Gibbs state held as its weighted eigenstates.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub n: usize,
    pub temperature: f64,
    /// Normalized Boltzmann weights, ascending energy.
    pub weights: Vec<f64>,
    pub energies: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
}

pub fn thermal_state(spec: &ChainSpec, t: f64) -> Result<ThermalState> {
    let n = spec.n();
    if !(t > 0.0) {
        return Err(Error::NonPositiveTemperature { t });
    }
    if n > MAX_THERMAL_SITES {
        return Err(Error::SizeTooLarge { n, max: MAX_THERMAL_SITES });
    }
    let e0 = sector_ground_energy(spec, Parity::Even)?.min(sector_ground_energy(spec, Parity::Odd)?);
    let cutoff = e0 + CUTOFF * t;
    let mut levels = sector_eigenpairs(spec, Parity::Even, cutoff)?;
    levels.extend(sector_eigenpairs(spec, Parity::Odd, cutoff)?);
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let raw: Vec<f64> = levels.iter().map(|(e, _)| (-(e - e0) / t).exp()).collect();
    let z: f64 = raw.iter().sum();
    let (energies, states) = levels.into_iter().unzip();
    Ok(ThermalState { n, temperature: t, weights: raw.iter().map(|w| w / z).collect(), energies, states })
}

impl ThermalState {
    pub fn reduced_two_spin(&self, i: usize, j: usize) -> Result<TwoSpinState> {
        let ensemble: Vec<(f64, &[Complex64])> = self.weights.iter().zip(&self.states).map(|(&w, s)| (w, s.as_slice())).collect();
        reduced_two_spin_mixed(&ensemble, self.n, i, j)
    }

    pub fn magnetization(&self) -> f64 {
        self.weights.iter().zip(&self.states).map(|(w, s)| w * magnetization(s, self.n)).sum()
    }

    pub fn energy(&self) -> f64 {
        self.weights.iter().zip(&self.energies).map(|(w, e)| w * e).sum()
    }
}
