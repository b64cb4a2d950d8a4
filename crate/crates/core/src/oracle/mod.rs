//! Exhaustive diagonalization in the full `2^n` computational basis.
//!
//! Basis index bit `i` is site `i`, set meaning spin up. The Hamiltonian is
//! assembled from its ladder form: a bond `(i, j)` with weight `r` flips
//! both spins with amplitude `-r v_+/2` when they are antiparallel and
//! `-r v_-/2` when they are parallel, and contributes `-r v_z (a_i-½)(a_j-½)`
//! to the diagonal.
//!
//! Two exact paths are provided: dense parity blocks of dimension
//! `2^{n-1}` ([`sector_ground_states`]), and the same blocks further split
//! by lattice momentum ([`sector_spectrum`]), which is what the scans use.

mod eigen;
mod jw;
mod thermal;
mod translation;

pub use jw::{jw_contractions, JwContractions};
pub use thermal::{thermal_state, ThermalState};
pub use translation::{sector_eigenvalues, sector_spectrum, TranslationBasis};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed_form::{factorization_point, parity_projected_state, separable_state_amplitudes, FactorizationPoint};
use crate::concurrence::{reduced_two_spin, Amplitude};
use crate::error::{Error, Result};
use crate::sector::{SectorGround, SectorSolver};
use crate::spec::{ChainSpec, Parity};

/// Largest chain the oracle accepts.
pub const MAX_SITES: usize = 14;

/// Levels closer than this are flagged as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-11;

/// Levels kept per sector by the ground-state solvers.
pub const SECTOR_LEVELS: usize = 4;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SITES {
        Err(Error::SizeTooLarge { n, max: MAX_SITES })
    } else {
        Ok(())
    }
}

/// Bond list and couplings, precomputed for the bit kernels.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    n: usize,
    b: f64,
    bonds: Vec<(usize, usize, f64)>,
    half_plus: f64,
    half_minus: f64,
    vz: f64,
}

impl Kernel {
    pub(crate) fn new(spec: &ChainSpec) -> Self {
        let n = spec.n();
        let c = spec.couplings();
        let mut bonds = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let r = spec.r(j - i);
                if r != 0.0 {
                    bonds.push((i, j, r));
                }
            }
        }
        Kernel { n, b: spec.b(), bonds, half_plus: 0.5 * c.v_plus(), half_minus: 0.5 * c.v_minus(), vz: c.vz }
    }

    /// Calls `f(target, element)` for every non-zero `⟨target|H|a⟩`; the
    /// diagonal comes first, off-diagonal targets may repeat.
    pub(crate) fn row(&self, a: usize, mut f: impl FnMut(usize, f64)) {
        let mut diag = self.b * (a.count_ones() as f64 - 0.5 * self.n as f64);
        for &(i, j, r) in &self.bonds {
            let (ai, aj) = ((a >> i) & 1, (a >> j) & 1);
            let zz = if ai == aj { 0.25 } else { -0.25 };
            diag -= r * self.vz * zz;
        }
        f(a, diag);
        for &(i, j, r) in &self.bonds {
            let (ai, aj) = ((a >> i) & 1, (a >> j) & 1);
            let h = if ai == aj { -r * self.half_minus } else { -r * self.half_plus };
            if h != 0.0 {
                f(a ^ ((1 << i) | (1 << j)), h);
            }
        }
    }
}

/// `H|ψ⟩` without forming the matrix; any `n ≤ 20`.
pub fn apply_hamiltonian<T: Amplitude>(spec: &ChainSpec, psi: &[T]) -> Result<Vec<Complex64>> {
    let n = spec.n();
    if n > crate::concurrence::MAX_VECTOR_SITES {
        return Err(Error::SizeTooLarge { n, max: crate::concurrence::MAX_VECTOR_SITES });
    }
    if psi.len() != 1 << n {
        return Err(Error::InvalidSpec(format!("state vector has length {}, expected 2^{n}", psi.len())));
    }
    let kernel = Kernel::new(spec);
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (a, &amp) in psi.iter().enumerate() {
        let amp = amp.to_complex();
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        kernel.row(a, |t, h| out[t] += amp * h);
    }
    Ok(out)
}

/// The full Hamiltonian matrix in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<DenseHamiltonian> {
    let n = spec.n();
    check_size(n)?;
    let dim = 1usize << n;
    let kernel = Kernel::new(spec);
    let mut matrix = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        kernel.row(a, |t, h| matrix[(t, a)] += h);
    }
    Ok(DenseHamiltonian { n, matrix })
}

impl DenseHamiltonian {
    /// Basis states with `(-1)^{#up}` equal to `parity`, ascending.
    pub fn sector_basis(&self, parity: Parity) -> Vec<usize> {
        (0..1usize << self.n).filter(|&a| Parity::of_count(a.count_ones()) == parity).collect()
    }

    pub fn parity_block(&self, parity: Parity) -> DMatrix<f64> {
        let basis = self.sector_basis(parity);
        DMatrix::from_fn(basis.len(), basis.len(), |r, c| self.matrix[(basis[r], basis[c])])
    }

    fn parity_block_faer(&self, parity: Parity) -> (Vec<usize>, faer::Mat<f64>) {
        let basis = self.sector_basis(parity);
        let m = faer::Mat::from_fn(basis.len(), basis.len(), |r, c| self.matrix[(basis[r], basis[c])]);
        (basis, m)
    }

    /// Largest `|H_ab|` between states of opposite parity.
    pub fn parity_leak(&self) -> f64 {
        let dim = 1usize << self.n;
        let mut leak = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                if (a.count_ones() + b.count_ones()) % 2 == 1 {
                    leak = leak.max(self.matrix[(a, b)].abs());
                }
            }
        }
        leak
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Full spectrum, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let dim = self.matrix.nrows();
        let m = faer::Mat::from_fn(dim, dim, |r, c| self.matrix[(r, c)]);
        let mut e = eigen::real_eigenvalues(&m)?;
        e.sort_by(f64::total_cmp);
        Ok(e)
    }
}

/// Lowest eigenpairs of one parity sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSolution {
    pub parity: Parity,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Full-space amplitudes; the largest component is real and positive.
    pub states: Vec<Vec<Complex64>>,
    /// `true` when a level lies within [`DEGENERACY_GAP`] of a neighbour.
    pub degenerate: Vec<bool>,
    /// Lattice momentum `m` (`k = 2πm/n`) of each level, when resolved.
    pub momenta: Vec<Option<usize>>,
}

impl SectorSolution {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> &[Complex64] {
        &self.states[0]
    }

    pub fn ground_is_degenerate(&self) -> bool {
        self.degenerate[0]
    }

    /// `max ‖H v - E v‖` over the stored pairs.
    pub fn max_residual(&self, spec: &ChainSpec) -> Result<f64> {
        let mut worst = 0.0f64;
        for (e, v) in self.energies.iter().zip(&self.states) {
            let hv = apply_hamiltonian(spec, v)?;
            let r = hv.iter().zip(v).map(|(h, x)| (h - x * e).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

pub(crate) fn degeneracy_flags(energies: &[f64]) -> Vec<bool> {
    (0..energies.len())
        .map(|k| {
            let below = k > 0 && energies[k] - energies[k - 1] < DEGENERACY_GAP;
            let above = k + 1 < energies.len() && energies[k + 1] - energies[k] < DEGENERACY_GAP;
            below || above
        })
        .collect()
}

/// Rotates `v` so that its first largest-magnitude component is real
/// and positive.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied().unwrap();
    let phase = pivot.conj() / pivot.norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

fn dense_sector(h: &DenseHamiltonian, parity: Parity) -> Result<SectorSolution> {
    let (basis, block) = h.parity_block_faer(parity);
    let eig = eigen::real_eigen(&block)?;
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b]));
    order.truncate(SECTOR_LEVELS);
    let energies: Vec<f64> = order.iter().map(|&k| eig.values[k]).collect();
    let states = order
        .iter()
        .map(|&k| {
            let mut v = vec![Complex64::new(0.0, 0.0); 1 << h.n];
            for (r, &a) in basis.iter().enumerate() {
                v[a] = Complex64::new(eig.vectors[(r, k)], 0.0);
            }
            fix_phase(&mut v);
            v
        })
        .collect();
    Ok(SectorSolution {
        parity,
        degenerate: degeneracy_flags(&energies),
        momenta: vec![None; energies.len()],
        energies,
        states,
    })
}

/// Lowest levels of both parity blocks by dense diagonalization.
pub fn sector_ground_states(h: &DenseHamiltonian) -> Result<(SectorSolution, SectorSolution)> {
    let (even, odd) = rayon::join(|| dense_sector(h, Parity::Even), || dense_sector(h, Parity::Odd));
    Ok((even?, odd?))
}

/// `⟨S_z⟩` of a normalized state.
pub fn magnetization<T: Amplitude>(state: &[T], n: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(a, &z)| z.to_complex().norm_sqr() * (a.count_ones() as f64 - 0.5 * n as f64))
        .sum()
}

/// Outcome of [`verify_factorization`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub point: FactorizationPoint,
    /// `‖H|θ⟩ - E_s|θ⟩‖` at `b = b_s`.
    pub residual: f64,
    /// `⟨-θ|θ⟩`, to compare with `cos^n θ`.
    pub overlap: f64,
    /// `|⟨θ_±|ψ_±⟩|` with the exact sector ground states, even first;
    /// `None` above [`MAX_SITES`].
    pub sector_overlaps: Option<[f64; 2]>,
    /// Exact sector ground energies minus `E_s`, even first.
    pub sector_energy_offsets: Option<[f64; 2]>,
}

impl FactorizationCheck {
    /// Both projected states are the exact sector ground states.
    pub fn sector_grounds_match(&self, tol: f64) -> bool {
        match (self.sector_overlaps, self.sector_energy_offsets) {
            (Some(o), Some(d)) => o.iter().all(|x| (x - 1.0).abs() < tol) && d.iter().all(|x| x.abs() < tol),
            _ => false,
        }
    }
}

/// Checks the separable eigenstate at the factorizing field of `spec`
/// (its own `b` is ignored).
pub fn verify_factorization(spec: &ChainSpec) -> Result<FactorizationCheck> {
    let point = factorization_point(spec)?;
    let at_bs = spec.with_field(point.b_s)?;
    residual_check(&at_bs, point)
}

/// As [`verify_factorization`] but at the field already set in `spec`.
pub fn factorization_residual(spec: &ChainSpec) -> Result<f64> {
    let point = factorization_point(spec)?;
    let theta = separable_state_amplitudes(point.theta, spec.n())?;
    let hv = apply_hamiltonian(spec, &theta)?;
    Ok(hv.iter().zip(&theta).map(|(h, x)| (h - x * point.e_s).norm_sqr()).sum::<f64>().sqrt())
}

fn residual_check(spec: &ChainSpec, point: FactorizationPoint) -> Result<FactorizationCheck> {
    let n = spec.n();
    let residual = factorization_residual(spec)?;
    let plus = separable_state_amplitudes(point.theta, n)?;
    let minus = separable_state_amplitudes(-point.theta, n)?;
    let overlap = plus.iter().zip(&minus).map(|(a, b)| a * b).sum();
    let (sector_overlaps, sector_energy_offsets) = if n <= MAX_SITES {
        let mut overlaps = [0.0; 2];
        let mut offsets = [0.0; 2];
        for (k, parity) in Parity::BOTH.into_iter().enumerate() {
            let sol = sector_spectrum(spec, parity, 1)?;
            let projected = parity_projected_state(point.theta, n, parity)?;
            overlaps[k] = sol.ground_state().iter().zip(&projected).map(|(z, x)| z * x).sum::<Complex64>().norm();
            offsets[k] = sol.ground_energy() - point.e_s;
        }
        (Some(overlaps), Some(offsets))
    } else {
        (None, None)
    };
    Ok(FactorizationCheck { point, residual, overlap, sector_overlaps, sector_energy_offsets })
}

/// The oracle as a [`SectorSolver`], through the momentum-resolved path.
#[derive(Debug, Clone)]
pub struct OracleModel {
    spec: ChainSpec,
}

impl OracleModel {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        check_size(spec.n())?;
        Ok(OracleModel { spec: spec.clone() })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn solve(&self, b: f64, parity: Parity, levels: usize) -> Result<SectorSolution> {
        sector_spectrum(&self.spec.with_field(b)?, parity, levels)
    }
}

impl SectorSolver for OracleModel {
    fn size(&self) -> usize {
        self.spec.n()
    }

    fn label(&self) -> &'static str {
        "oracle"
    }

    fn sector_energy(&self, b: f64, parity: Parity) -> Result<f64> {
        translation::sector_ground_energy(&self.spec.with_field(b)?, parity)
    }

    fn sector_ground(&self, b: f64, parity: Parity, separations: &[usize]) -> Result<SectorGround> {
        let n = self.spec.n();
        let sol = self.solve(b, parity, 1)?;
        let psi = sol.ground_state();
        let pairs = separations
            .iter()
            .map(|&l| {
                if l == 0 || l >= n {
                    return Err(Error::SeparationOutOfRange { l, max: n - 1 });
                }
                Ok((l, reduced_two_spin(psi, n, 0, l)?.correlators()))
            })
            .collect::<Result<_>>()?;
        Ok(SectorGround { parity, b, energy: sol.ground_energy(), magnetization: magnetization(psi, n), pairs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Couplings;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> ChainSpec {
        let half: Vec<f64> = (0..n / 2).map(|_| rng.gen_range(0.0..1.0)).collect();
        let range = (1..n).map(|l| half[l.min(n - l) - 1]).collect();
        let vx = 1.0;
        let vy = rng.gen_range(-0.9..0.9);
        let vz = rng.gen_range(-0.9..0.9);
        ChainSpec::new(n, Couplings::new(vx, vy, vz), range, rng.gen_range(0.0..2.0)).unwrap()
    }

    #[test]
    fn two_site_ising() {
        // n = 2, r_1 = 2: H = -2 s_x s_x, eigenvalues ±½ twice.
        let s = ChainSpec::nearest_neighbor(2, Couplings::new(1.0, 0.0, 0.0), 0.0).unwrap();
        let h = build_hamiltonian(&s).unwrap();
        let e = h.eigenvalues().unwrap();
        for (got, want) in e.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn field_only_spectrum() {
        let s = ChainSpec::nearest_neighbor(5, Couplings::new(0.0, 0.0, 0.0), 0.7).unwrap();
        let e = build_hamiltonian(&s).unwrap().eigenvalues().unwrap();
        let mut want = Vec::new();
        for k in 0..=5usize {
            let count = (1..=5).product::<usize>() / ((1..=k).product::<usize>() * (1..=5 - k).product::<usize>());
            want.extend(std::iter::repeat_n(0.7 * (k as f64 - 2.5), count));
        }
        for (g, w) in e.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn parity_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=7 {
            let h = build_hamiltonian(&random_spec(&mut rng, n)).unwrap();
            assert_eq!(h.parity_leak(), 0.0);
            assert!(h.hermiticity_error() < 1e-13);
        }
    }

    #[test]
    fn size_limit() {
        let s = ChainSpec::nearest_neighbor(15, Couplings::new(1.0, 0.5, 0.0), 0.0).unwrap();
        assert_eq!(build_hamiltonian(&s), Err(Error::SizeTooLarge { n: 15, max: MAX_SITES }));
    }

    #[test]
    fn sparse_action_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_spec(&mut rng, 6);
        let h = build_hamiltonian(&s).unwrap();
        let psi: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dense = &h.matrix * nalgebra::DVector::from_vec(psi.clone());
        let sparse = apply_hamiltonian(&s, &psi).unwrap();
        for (d, z) in dense.iter().zip(&sparse) {
            assert!((d - z.re).abs() < 1e-13 && z.im == 0.0);
        }
    }

    #[test]
    fn reference_sector_energies() {
        let s = ChainSpec::nearest_neighbor(6, Couplings::new(1.0, 0.5, 0.0), 0.3).unwrap();
        let (even, odd) = sector_ground_states(&build_hamiltonian(&s).unwrap()).unwrap();
        assert!((even.ground_energy() + 1.7194228693872113).abs() < 1e-12);
        assert!((odd.ground_energy() + 1.6880011286856833).abs() < 1e-12);
        assert!(even.max_residual(&s).unwrap() < 1e-10);
        assert!(odd.max_residual(&s).unwrap() < 1e-10);
    }

    #[test]
    fn degenerate_sectors_at_factorizing_field() {
        let s = ChainSpec::fully_connected(8, Couplings::new(1.0, 0.6, 0.2), 0.0).unwrap();
        let fp = factorization_point(&s).unwrap();
        let (even, odd) = sector_ground_states(&build_hamiltonian(&s.with_field(fp.b_s).unwrap()).unwrap()).unwrap();
        assert!((even.ground_energy() - odd.ground_energy()).abs() < 1e-10);
        assert!((even.ground_energy() - fp.e_s).abs() < 1e-10);
        for sol in [&even, &odd] {
            let signs: Vec<f64> = sol.ground_state().iter().filter(|z| z.norm() > 1e-12).map(|z| z.re.signum()).collect();
            assert!(signs.iter().all(|&x| x == 1.0));
        }
    }

    #[test]
    fn strong_field_favours_all_down() {
        let s = ChainSpec::nearest_neighbor(5, Couplings::new(1.0, 0.3, 0.1), 50.0).unwrap();
        let (even, odd) = sector_ground_states(&build_hamiltonian(&s).unwrap()).unwrap();
        assert!(even.ground_energy() < odd.ground_energy());
        assert!(even.ground_state()[0].norm() > 0.999);
        assert!((magnetization(even.ground_state(), 5) + 2.5).abs() < 1e-3);
    }

    #[test]
    fn magnetization_of_basis_states() {
        let mut down = vec![0.0; 16];
        down[0] = 1.0;
        assert_eq!(magnetization(&down, 4), -2.0);
        let w: Vec<f64> = (0..16).map(|a: usize| if a.count_ones() == 1 { 0.5 } else { 0.0 }).collect();
        assert!((magnetization(&w, 4) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn factorization_at_and_off_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let half: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
        let range = (1..8).map(|l| half[l.min(8 - l) - 1]).collect();
        let s = ChainSpec::new(8, Couplings::new(1.0, 0.6, 0.2), range, 0.0).unwrap();
        let check = verify_factorization(&s).unwrap();
        assert!(check.residual < 1e-10);
        assert!((check.overlap - check.point.theta.cos().powi(8)).abs() < 1e-14);
        assert!(check.sector_grounds_match(1e-9), "{check:?}");
        let off = s.with_field(check.point.b_s + 0.01).unwrap();
        assert!(factorization_residual(&off).unwrap() > 1e-3);
    }

    #[test]
    fn oracle_model_pairs() {
        let s = ChainSpec::nearest_neighbor(6, Couplings::new(1.0, 0.5, 0.0), 0.3).unwrap();
        let m = OracleModel::new(&s).unwrap();
        let g = m.sector_ground(0.3, Parity::Even, &[1, 2, 3]).unwrap();
        assert!((g.energy + 1.7194228693872113).abs() < 1e-12);
        assert_eq!(g.pairs.len(), 3);
        assert!(m.sector_ground(0.3, Parity::Even, &[6]).is_err());
    }
}
