//! Model-independent layer over the two parity sectors: field sweeps with
//! refined ground-state parity transitions, and the low-temperature
//! two-state mixture of the sector ground states.

use serde::{Deserialize, Serialize};

use crate::concurrence::{PairCorrelators, TwoSpinState};
use crate::error::{Error, Result};
use crate::spec::Parity;

/// Sector energies closer than this are treated as degenerate.
pub const GAP_TOL: f64 = 1e-11;

/// Lowest state of one parity sector at one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorGround {
    pub parity: Parity,
    pub b: f64,
    pub energy: f64,
    /// `⟨S_z⟩`.
    pub magnetization: f64,
    /// Pair correlators at the requested separations.
    pub pairs: Vec<(usize, PairCorrelators)>,
}

impl SectorGround {
    pub fn pair(&self, l: usize) -> Option<&PairCorrelators> {
        self.pairs.iter().find(|(k, _)| *k == l).map(|(_, c)| c)
    }
}

/// A model that yields the lowest state of each parity sector.
pub trait SectorSolver: Sync {
    fn size(&self) -> usize;

    fn label(&self) -> &'static str;

    fn sector_ground(&self, b: f64, parity: Parity, separations: &[usize]) -> Result<SectorGround>;

    fn sector_energy(&self, b: f64, parity: Parity) -> Result<f64> {
        Ok(self.sector_ground(b, parity, &[])?.energy)
    }

    /// `E_+ - E_-`.
    fn gap(&self, b: f64) -> Result<f64> {
        Ok(self.sector_energy(b, Parity::Even)? - self.sector_energy(b, Parity::Odd)?)
    }

    /// Separations `1..=⌊n/2⌋`; the others follow from `l → n-l`.
    fn default_separations(&self) -> Vec<usize> {
        (1..=self.size() / 2).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub b: f64,
    pub energy_even: f64,
    pub energy_odd: f64,
    /// `None` when the sectors are degenerate within [`GAP_TOL`].
    pub ground: Option<Parity>,
}

impl SweepPoint {
    pub fn gap(&self) -> f64 {
        self.energy_even - self.energy_odd
    }
}

/// A change of ground-state parity at field `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub b: f64,
    /// Ground parity just below and above `b`.
    pub from: Parity,
    pub to: Parity,
    /// `E_+ - E_-` at the refined field.
    pub residual_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub transitions: Vec<Transition>,
}

fn ground_of(gap: f64) -> Option<Parity> {
    if gap.abs() < GAP_TOL {
        None
    } else if gap < 0.0 {
        Some(Parity::Even)
    } else {
        Some(Parity::Odd)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Bisects a sign change of the gap in `[lo, hi]` down to the last
/// representable field, or until the gap vanishes exactly.
pub fn refine_transition<S: SectorSolver + ?Sized>(solver: &S, mut lo: f64, mut hi: f64) -> Result<Transition> {
    let g_lo = solver.gap(lo)?;
    let from = if g_lo < 0.0 { Parity::Even } else { Parity::Odd };
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = solver.gap(mid)?;
        if g.abs() < best.1.abs() {
            best = (mid, g);
        }
        if g == 0.0 {
            break;
        }
        if (g < 0.0) == (g_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Transition { b: best.0, from, to: from.flip(), residual_gap: best.1 })
}

/// Sector energies on `grid` and every ground-parity change between grid
/// points, refined by bisection. Points where the sectors are degenerate
/// within [`GAP_TOL`] are skipped when bracketing.
pub fn sector_sweep<S: SectorSolver + ?Sized>(solver: &S, grid: &[f64]) -> Result<Sweep> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&b| {
            let (e, o) = (solver.sector_energy(b, Parity::Even)?, solver.sector_energy(b, Parity::Odd)?);
            Ok(sweep_point(b, e, o))
        })
        .collect::<Result<Vec<_>>>()?;
    let transitions = locate_transitions(solver, &points)?;
    Ok(Sweep { points, transitions })
}

pub fn sweep_point(b: f64, energy_even: f64, energy_odd: f64) -> SweepPoint {
    SweepPoint { b, energy_even, energy_odd, ground: ground_of(energy_even - energy_odd) }
}

/// Refined transitions between consecutive non-degenerate points of an
/// ascending sweep.
pub fn locate_transitions<S: SectorSolver + ?Sized>(solver: &S, points: &[SweepPoint]) -> Result<Vec<Transition>> {
    let mut transitions = Vec::new();
    let mut last: Option<&SweepPoint> = None;
    for p in points {
        let Some(parity) = p.ground else { continue };
        if let Some(prev) = last {
            if prev.ground != Some(parity) {
                transitions.push(refine_transition(solver, prev.b, p.b)?);
            }
        }
        last = Some(p);
    }
    Ok(transitions)
}

/// Boltzmann weights `(q, 1-q)` of the even and odd sector ground states
/// when only these two levels are populated.
pub fn two_state_weights(energy_even: f64, energy_odd: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTemperature { t });
    }
    // q = 1/(1 + e^{-(E_- - E_+)/T}), evaluated without overflow.
    let x = (energy_odd - energy_even) / t;
    let q = if x >= 0.0 { 1.0 / (1.0 + (-x).exp()) } else { x.exp() / (1.0 + x.exp()) };
    Ok((q, 1.0 - q))
}

/// Reduced pair states of the two-state mixture `q ρ_+ + (1-q) ρ_-`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateMixture {
    pub b: f64,
    pub q: f64,
    pub energy: f64,
    pub magnetization: f64,
    pub pairs: Vec<(usize, TwoSpinState)>,
}

pub fn two_state_mixture(even: &SectorGround, odd: &SectorGround, t: f64) -> Result<TwoStateMixture> {
    let (q, p) = two_state_weights(even.energy, odd.energy, t)?;
    let pairs = even
        .pairs
        .iter()
        .map(|(l, ce)| {
            let co = odd.pair(*l).ok_or(Error::SeparationOutOfRange { l: *l, max: 0 })?;
            let rho = TwoSpinState::mix(&TwoSpinState::from_correlators(ce)?, &TwoSpinState::from_correlators(co)?, q)?;
            Ok((*l, rho))
        })
        .collect::<Result<_>>()?;
    Ok(TwoStateMixture {
        b: even.b,
        q,
        energy: q * even.energy + p * odd.energy,
        magnetization: q * even.magnetization + p * odd.magnetization,
        pairs,
    })
}
