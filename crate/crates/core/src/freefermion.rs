//! Nearest-neighbour XY chain (`v_z = 0`) solved exactly through the
//! Jordan-Wigner mapping, separately in each `S_z`-parity sector.
//!
//! Within parity `P`, the boundary bond picks up the sign `-P`, so the
//! fermions obey antiperiodic conditions for `P = +1` (momenta
//! `k ∈ {½, …, n-½}`) and periodic ones for `P = -1` (`k ∈ {0, …, n-1}`),
//! with `ω_k = 2πk/n`. Modes `k` and `n-k` pair up through a BCS rotation
//! with quasiparticle energy `λ_k = √((b - v_+ cos ω_k)² + v_-² sin² ω_k)`.
//! Modes with `ω_k ∈ {0, π}` have no partner; their energy is the signed
//! `b - v_+ cos ω_k` and their occupation is fixed by the sector parity.
//!
//! Sector parity bookkeeping: the BCS vacuum of every pair has even
//! fermion number. In the even sector all unpaired modes are empty. In
//! the odd sector the `ω = 0` mode is occupied, which costs `b - v_+`;
//! since every `λ_k ≥ b - v_+ cos ω_k ≥ b - v_+` and the `ω = π` mode costs
//! `b + v_+`, no other odd-number configuration is cheaper, also when
//! `b > v_+`. Writing `λ_0 = v_+ - b` (signed) gives both sector energies
//! as `-½ Σ_k λ_k`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::concurrence::PairCorrelators;
use crate::error::{Error, Result};
use crate::sector::{SectorGround, SectorSolver};
use crate::spec::{ChainSpec, Parity};

/// One single-particle mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Momentum label `k` (half-integer in the even sector).
    pub k: f64,
    pub omega: f64,
    /// Quasiparticle energy; signed for unpaired modes.
    pub lambda: f64,
    pub u: f64,
    pub v: f64,
    pub paired: bool,
}

impl Mode {
    /// `⟨c'†_k c'_k⟩` in the sector's lowest state.
    pub fn occupation(&self) -> f64 {
        self.v * self.v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub n: usize,
    pub parity: Parity,
    pub b: f64,
    pub modes: Vec<Mode>,
}

fn check_spec(spec: &ChainSpec) -> Result<()> {
    if spec.n() < 3 || !spec.is_nearest_neighbor() {
        return Err(Error::NotNearestNeighbor);
    }
    if spec.couplings().vz != 0.0 {
        return Err(Error::VzUnsupported);
    }
    Ok(())
}

/// `sin` and `cos` of `2πk/n` for `2k = twice_k`, exact at the symmetric
/// points so that unpaired modes are recognised without a tolerance.
fn angle(twice_k: usize, n: usize) -> (f64, f64) {
    let m = twice_k % (2 * n);
    if m == 0 {
        (0.0, 1.0)
    } else if m == n {
        (0.0, -1.0)
    } else {
        (PI * m as f64 / n as f64).sin_cos()
    }
}

pub fn mode_spectrum(spec: &ChainSpec, parity: Parity) -> Result<ModeSet> {
    check_spec(spec)?;
    let n = spec.n();
    let c = spec.couplings();
    let (vp, vm, b) = (c.v_plus(), c.v_minus(), spec.b());
    let modes = (0..n)
        .map(|j| {
            let twice_k = match parity {
                Parity::Even => 2 * j + 1,
                Parity::Odd => 2 * j,
            };
            let (sin, cos) = angle(twice_k, n);
            let omega = PI * twice_k as f64 / n as f64;
            let eps = b - vp * cos;
            if sin == 0.0 {
                // ω = 0 is occupied (odd sector only), ω = π empty.
                let occupied = cos > 0.0;
                let lambda = if occupied { -eps } else { eps };
                let (u, v) = if occupied { (0.0, 1.0) } else { (1.0, 0.0) };
                Mode { k: 0.5 * twice_k as f64, omega, lambda, u, v, paired: false }
            } else {
                let delta = vm * sin;
                let lambda = eps.hypot(delta);
                let (u, v) = if lambda == 0.0 {
                    (1.0, 0.0)
                } else {
                    let u = (0.5 * (1.0 + eps / lambda)).max(0.0).sqrt();
                    let v = (0.5 * (1.0 - eps / lambda)).max(0.0).sqrt();
                    (u, if delta < 0.0 { -v } else { v })
                };
                Mode { k: 0.5 * twice_k as f64, omega, lambda, u, v, paired: true }
            }
        })
        .collect();
    Ok(ModeSet { n, parity, b, modes })
}

/// `E = -½ Σ_k λ_k` with the signed unpaired energies.
pub fn sector_energy(modes: &ModeSet) -> f64 {
    -0.5 * modes.modes.iter().map(|m| m.lambda).sum::<f64>()
}

/// Wick contractions `f_l = ⟨c†_i c_{i+l}⟩ - ½δ_{l0}` and
/// `g_l = ⟨c†_i c†_{i+l}⟩` for `l = 0..n-1`.
///
/// Under `l → n-l` they pick up the boundary sign: `f_{n-l} = -P f_l`,
/// `g_{n-l} = P g_l` with `P` the sector parity. Negative separations obey
/// `f_{-l} = f_l`, `g_{-l} = -g_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionTable {
    pub n: usize,
    pub parity: Parity,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl ContractionTable {
    /// `f_d` for `|d| < n`.
    pub fn f_at(&self, d: isize) -> f64 {
        self.f[d.unsigned_abs()]
    }

    /// `g_d` for `|d| < n`.
    pub fn g_at(&self, d: isize) -> f64 {
        let g = self.g[d.unsigned_abs()];
        if d < 0 {
            -g
        } else {
            g
        }
    }
}

pub fn contractions(modes: &ModeSet) -> ContractionTable {
    let n = modes.n;
    let inv_n = 1.0 / n as f64;
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    for m in &modes.modes {
        let occ = m.occupation();
        let pair = m.u * m.v;
        // Exact angle reduction of ω·l keeps f, g symmetric to rounding.
        let twice_k = (2.0 * m.k).round() as usize;
        for l in 0..n {
            let (s, c) = angle(twice_k * l, n);
            f[l] += c * occ;
            g[l] += s * pair;
        }
    }
    for l in 0..n {
        f[l] *= inv_n;
        g[l] *= inv_n;
    }
    f[0] -= 0.5;
    ContractionTable { n, parity: modes.parity, f, g }
}

/// Pair correlators at separation `l` from the Wick contractions.
///
/// `⟨s_z⟩ = f_0`, `⟨s_z^i s_z^{i+l}⟩ = f_0² - f_l² + g_l²`, and
/// `α^± = ¼[det A⁺ ∓ det A⁻]` with `(A^±)_{ij} = 2(f_{i-j±1} + g_{i-j±1})`.
/// `det A⁺ = ⟨σ_x^i σ_x^{i+l}⟩` and `det A⁻ = ⟨σ_y^i σ_y^{i+l}⟩`.
pub fn pair_correlators_wick(table: &ContractionTable, l: usize) -> Result<PairCorrelators> {
    let n = table.n;
    if l == 0 || l >= n {
        return Err(Error::SeparationOutOfRange { l, max: n - 1 });
    }
    let entry = |d: isize| 2.0 * (table.f_at(d) + table.g_at(d));
    let plus = DMatrix::from_fn(l, l, |i, j| entry(i as isize - j as isize + 1));
    let minus = DMatrix::from_fn(l, l, |i, j| entry(i as isize - j as isize - 1));
    let (det_x, det_y) = (plus.lu().determinant(), minus.lu().determinant());
    let (f0, fl, gl) = (table.f[0], table.f[l], table.g[l]);
    Ok(PairCorrelators::symmetric(
        0.25 * (det_x - det_y),
        0.25 * (det_x + det_y),
        f0 * f0 - fl * fl + gl * gl,
        f0,
    ))
}

/// The free-fermion solution as a [`SectorSolver`].
#[derive(Debug, Clone)]
pub struct FreeFermionModel {
    spec: ChainSpec,
}

impl FreeFermionModel {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        check_spec(spec)?;
        Ok(FreeFermionModel { spec: spec.clone() })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn modes(&self, b: f64, parity: Parity) -> Result<ModeSet> {
        mode_spectrum(&self.spec.with_field(b)?, parity)
    }
}

impl SectorSolver for FreeFermionModel {
    fn size(&self) -> usize {
        self.spec.n()
    }

    fn label(&self) -> &'static str {
        "freefermion"
    }

    fn sector_energy(&self, b: f64, parity: Parity) -> Result<f64> {
        Ok(sector_energy(&self.modes(b, parity)?))
    }

    fn sector_ground(&self, b: f64, parity: Parity, separations: &[usize]) -> Result<SectorGround> {
        let modes = self.modes(b, parity)?;
        let table = contractions(&modes);
        let pairs = separations
            .iter()
            .map(|&l| pair_correlators_wick(&table, l).map(|c| (l, c)))
            .collect::<Result<_>>()?;
        Ok(SectorGround {
            parity,
            b,
            energy: sector_energy(&modes),
            magnetization: self.spec.n() as f64 * table.f[0],
            pairs,
        })
    }
}

/// Sector energies, ground-state parity and refined transition fields
/// over a field grid.
pub fn sector_sweep(spec: &ChainSpec, b_grid: &[f64]) -> Result<crate::sector::Sweep> {
    crate::sector::sector_sweep(&FreeFermionModel::new(spec)?, b_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{factorization_point, side_limits};
    use crate::concurrence::concurrence_from_correlators;
    use crate::spec::Couplings;

    fn nn(n: usize, vx: f64, vy: f64, b: f64) -> ChainSpec {
        ChainSpec::nearest_neighbor(n, Couplings::new(vx, vy, 0.0), b).unwrap()
    }

    #[test]
    fn capability_errors() {
        let full = ChainSpec::fully_connected(5, Couplings::new(1.0, 0.5, 0.0), 0.1).unwrap();
        assert_eq!(mode_spectrum(&full, Parity::Even), Err(Error::NotNearestNeighbor));
        let two = nn(2, 1.0, 0.5, 0.1);
        assert_eq!(mode_spectrum(&two, Parity::Even), Err(Error::NotNearestNeighbor));
        let vz = ChainSpec::nearest_neighbor(5, Couplings::new(1.0, 0.5, 0.2), 0.1).unwrap();
        assert_eq!(mode_spectrum(&vz, Parity::Odd), Err(Error::VzUnsupported));
    }

    #[test]
    fn ising_at_zero_field() {
        // n = 4, v = (1, 0, 0), b = 0: every λ = ½ and E = -n v_+/2 = -1.
        let s = nn(4, 1.0, 0.0, 0.0);
        for parity in Parity::BOTH {
            let m = mode_spectrum(&s, parity).unwrap();
            assert!(m.modes.iter().all(|md| (md.lambda - 0.5).abs() < 1e-15), "{parity}: {:?}", m.modes);
            assert!((sector_energy(&m) + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dispersion_and_bcs_identities() {
        let s = nn(9, 1.0, 0.35, 0.6);
        let c = s.couplings();
        for parity in Parity::BOTH {
            for m in mode_spectrum(&s, parity).unwrap().modes {
                let eps = s.b() - c.v_plus() * m.omega.cos();
                let l2 = eps * eps + (c.v_minus() * m.omega.sin()).powi(2);
                assert!((m.lambda * m.lambda - l2).abs() < 1e-14);
                assert!((m.u * m.u + m.v * m.v - 1.0).abs() < 1e-14);
                if m.paired {
                    assert!(m.lambda >= 0.0);
                }
            }
        }
    }

    #[test]
    fn linear_dispersion_at_factorizing_field() {
        let s = nn(10, 1.0, 0.75, 0.0);
        let fp = factorization_point(&s).unwrap();
        let s = s.with_field(fp.b_s).unwrap();
        let vp = s.couplings().v_plus();
        for parity in Parity::BOTH {
            let m = mode_spectrum(&s, parity).unwrap();
            for md in &m.modes {
                assert!((md.lambda - (vp - fp.b_s * md.omega.cos())).abs() < 1e-14);
            }
            assert!((sector_energy(&m) + 0.5 * 10.0 * vp).abs() < 1e-13);
            assert!((sector_energy(&m) - fp.e_s).abs() < 1e-13);
        }
    }

    #[test]
    fn reference_sector_energies() {
        // Exhaustive diagonalization, computed independently.
        let s = nn(6, 1.0, 0.5, 0.3);
        let even = sector_energy(&mode_spectrum(&s, Parity::Even).unwrap());
        let odd = sector_energy(&mode_spectrum(&s, Parity::Odd).unwrap());
        assert!((even + 1.7194228693872113).abs() < 1e-12);
        assert!((odd + 1.6880011286856833).abs() < 1e-12);
    }

    #[test]
    fn polarized_limit() {
        let s = nn(8, 1.0, 0.5, 200.0);
        let even = mode_spectrum(&s, Parity::Even).unwrap();
        assert!(even.modes.iter().all(|m| (m.lambda - 200.0).abs() < 1.0));
        let t = contractions(&even);
        assert!((t.f[0] + 0.5).abs() < 1e-4);
        assert!(t.g.iter().all(|g| g.abs() < 1e-3));
        let odd = mode_spectrum(&s, Parity::Odd).unwrap();
        assert!(sector_energy(&even) < sector_energy(&odd));
        let c = concurrence_from_correlators(&pair_correlators_wick(&t, 2).unwrap()).unwrap();
        assert!(c.value < 1e-4);
    }

    #[test]
    fn isotropic_xx_has_no_pairing() {
        let s = nn(7, 1.0, 1.0, 0.3);
        for parity in Parity::BOTH {
            let t = contractions(&mode_spectrum(&s, parity).unwrap());
            assert!(t.g.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn contraction_symmetries() {
        let s = nn(9, 1.0, 0.4, 0.5);
        for parity in Parity::BOTH {
            let t = contractions(&mode_spectrum(&s, parity).unwrap());
            let p = parity.sign();
            assert_eq!(t.g[0], 0.0);
            for l in 1..9 {
                assert!((t.f[9 - l] + p * t.f[l]).abs() < 1e-14, "{parity} f_{l}");
                assert!((t.g[9 - l] - p * t.g[l]).abs() < 1e-14, "{parity} g_{l}");
            }
        }
    }

    #[test]
    fn nearest_neighbor_determinants_reduce_to_contractions() {
        let s = nn(8, 1.0, 0.3, 0.45);
        for parity in Parity::BOTH {
            let t = contractions(&mode_spectrum(&s, parity).unwrap());
            let c = pair_correlators_wick(&t, 1).unwrap();
            assert!((c.alpha_plus - t.g[1]).abs() < 1e-14);
            assert!((c.alpha_minus - t.f[1]).abs() < 1e-14);
        }
        assert!(matches!(
            pair_correlators_wick(&contractions(&mode_spectrum(&s, Parity::Odd).unwrap()), 8),
            Err(Error::SeparationOutOfRange { .. })
        ));
    }

    #[test]
    fn universal_side_limits_for_every_separation() {
        let s = nn(10, 1.0, 0.75, 0.0);
        let fp = factorization_point(&s).unwrap();
        let limits = side_limits(fp.chi, 10).unwrap();
        let model = FreeFermionModel::new(&s).unwrap();
        for (parity, expected) in [(Parity::Even, limits.plus), (Parity::Odd, limits.minus)] {
            let g = model.sector_ground(fp.b_s, parity, &[1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
            for (l, c) in &g.pairs {
                let v = concurrence_from_correlators(c).unwrap().value;
                assert!((v - expected).abs() < 1e-12, "{parity} l={l}: {v} vs {expected}");
            }
        }
    }
}
