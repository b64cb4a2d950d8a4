//! Physical specification of a cyclic XYZ chain in a transverse field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking the cyclic symmetry `r_l = r_{n-l}` and
/// when recognising the standard range profiles.
const PROFILE_TOL: f64 = 1e-12;

/// Eigenvalue of the global phase-flip `P_z = exp[iπ(S_z + n/2)]`.
///
/// In the computational basis `P_z = (-1)^{number of up spins}`, so the
/// fully polarized down state belongs to [`Parity::Even`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn of_count(ups: u32) -> Parity {
        if ups.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Parity::Even => "+",
            Parity::Odd => "-",
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Coupling strengths `(v_x, v_y, v_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl Couplings {
    pub fn new(vx: f64, vy: f64, vz: f64) -> Self {
        Couplings { vx, vy, vz }
    }

    /// `v_+ = (v_x + v_y)/2`, the hopping amplitude.
    pub fn v_plus(&self) -> f64 {
        0.5 * (self.vx + self.vy)
    }

    /// `v_- = (v_x - v_y)/2`, the pairing amplitude.
    pub fn v_minus(&self) -> f64 {
        0.5 * (self.vx - self.vy)
    }
}

/// A cyclic chain of `n` spins-1/2 with Hamiltonian
///
/// `H = b S_z - Σ_{i<j} r_{j-i} (v_x s_x^i s_x^j + v_y s_y^i s_y^j + v_z s_z^i s_z^j)`.
///
/// `range[l-1]` holds `r_l` for `l = 1..n-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    n: usize,
    couplings: Couplings,
    range: Vec<f64>,
    b: f64,
}

impl ChainSpec {
    /// Builds a spec in canonical orientation (`v_x ≥ |v_y|`, `b ≥ 0`).
    pub fn new(n: usize, couplings: Couplings, range: Vec<f64>, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("n = {n} < 2")));
        }
        if range.len() != n - 1 {
            return Err(Error::InvalidSpec(format!(
                "range profile has {} entries, expected {}",
                range.len(),
                n - 1
            )));
        }
        let Couplings { vx, vy, vz } = couplings;
        if ![vx, vy, vz, b].iter().chain(range.iter()).all(|x| x.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        for l in 1..n {
            let (a, c) = (range[l - 1], range[n - l - 1]);
            if (a - c).abs() > PROFILE_TOL * (1.0 + a.abs().max(c.abs())) {
                return Err(Error::InvalidSpec(format!(
                    "range profile not cyclic: r_{l} = {a} but r_{} = {c}",
                    n - l
                )));
            }
        }
        if vx < vy.abs() {
            return Err(Error::InvalidSpec(format!(
                "non-canonical couplings: v_x = {vx} < |v_y| = {}",
                vy.abs()
            )));
        }
        if b < 0.0 {
            return Err(Error::InvalidSpec(format!("negative field b = {b}")));
        }
        Ok(ChainSpec { n, couplings, range, b })
    }

    /// Nearest-neighbour profile `r_l = δ_{l,1} + δ_{l,n-1}`.
    pub fn nearest_neighbor(n: usize, couplings: Couplings, b: f64) -> Result<Self> {
        Self::new(n, couplings, nearest_neighbor_profile(n), b)
    }

    /// Fully connected profile `r_l = 2/(n-1)`, normalized so that `r = 1`.
    pub fn fully_connected(n: usize, couplings: Couplings, b: f64) -> Result<Self> {
        Self::new(n, couplings, fully_connected_profile(n), b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> Couplings {
        self.couplings
    }

    pub fn range(&self) -> &[f64] {
        &self.range
    }

    /// `r_l` for `1 ≤ l ≤ n-1`.
    pub fn r(&self, l: usize) -> f64 {
        self.range[l - 1]
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Same chain at a different field.
    pub fn with_field(&self, b: f64) -> Result<Self> {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidSpec(format!("field b = {b} must be finite and ≥ 0")));
        }
        Ok(ChainSpec { b, ..self.clone() })
    }

    /// `r = ½ Σ_l r_l`.
    pub fn half_range_sum(&self) -> f64 {
        0.5 * self.range.iter().sum::<f64>()
    }

    /// All couplings are ferromagnetic (`r_l ≥ 0`).
    pub fn is_attractive(&self) -> bool {
        self.range.iter().all(|&r| r >= 0.0)
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        profile_matches(&self.range, &nearest_neighbor_profile(self.n))
    }

    pub fn is_fully_connected(&self) -> bool {
        profile_matches(&self.range, &fully_connected_profile(self.n))
    }
}

pub fn nearest_neighbor_profile(n: usize) -> Vec<f64> {
    let mut r = vec![0.0; n.saturating_sub(1)];
    if n >= 2 {
        r[0] += 1.0;
        r[n - 2] += 1.0;
    }
    r
}

pub fn fully_connected_profile(n: usize) -> Vec<f64> {
    if n < 2 {
        return Vec::new();
    }
    vec![2.0 / (n as f64 - 1.0); n - 1]
}

fn profile_matches(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= PROFILE_TOL)
}
