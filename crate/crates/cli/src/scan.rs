//! Field and temperature scans producing one record per
//! `(b, sector, l)`, plus the rescaled large-n side-limit curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xyzfact::closed_form::{cplus_maximum, factorization_point, mixture_concurrence, rescaled_asymptotics, side_limits};
use xyzfact::collective::CollectiveModel;
use xyzfact::concurrence::{
    concurrence_branches, concurrence_from_correlators, wootters_concurrence, ConcurrenceKind, ConcurrenceValue, TwoSpinState, MAX_VECTOR_SITES,
};
use xyzfact::freefermion::FreeFermionModel;
use xyzfact::oracle::{factorization_residual, thermal_state, OracleModel};
use xyzfact::sector::{locate_transitions, sweep_point, two_state_mixture, SectorGround, SectorSolver, Transition};
use xyzfact::{ChainSpec, Parity};

use crate::config::{ModelKind, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SectorLabel {
    #[serde(rename = "+")]
    Even,
    #[serde(rename = "-")]
    Odd,
    #[serde(rename = "thermal")]
    Thermal,
    #[serde(rename = "global")]
    Global,
}

impl SectorLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SectorLabel::Even => "+",
            SectorLabel::Odd => "-",
            SectorLabel::Thermal => "thermal",
            SectorLabel::Global => "global",
        }
    }

    fn of(parity: Parity) -> Self {
        match parity {
            Parity::Even => SectorLabel::Even,
            Parity::Odd => SectorLabel::Odd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub model: String,
    pub n: usize,
    pub chi: Option<f64>,
    pub delta: Option<f64>,
    pub b: f64,
    pub sector: SectorLabel,
    pub l: usize,
    pub concurrence: f64,
    pub kind: ConcurrenceKind,
    pub energy: f64,
    pub magnetization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Units {
    /// `"v_x"` or `"absolute"`.
    pub energy: String,
    pub vx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairValue {
    pub sector: SectorLabel,
    pub l: usize,
    pub concurrence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormLimits {
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
    pub magnetization_jump: f64,
}

/// Each sector evaluated exactly at `b_s`, next to the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideLimitReport {
    pub b_s: f64,
    pub e_s: f64,
    pub closed_form: ClosedFormLimits,
    pub sectors: Vec<PairValue>,
    pub magnetization_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingField {
    pub l: usize,
    /// `None` when the antiparallel `C_l(T)` survives to the end of the scan.
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalReport {
    pub temperature: f64,
    pub crossing_b: f64,
    pub crossing: Vec<PairValue>,
    pub closed_form_zero: f64,
    pub vanishing: Vec<VanishingField>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub model: String,
    pub n: usize,
    pub chi: Option<f64>,
    pub delta: Option<f64>,
    pub units: Units,
    pub method: String,
    pub transitions: Vec<Transition>,
    pub side_limits: Option<SideLimitReport>,
    pub thermal: Option<ThermalReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub metadata: ScanMetadata,
}

pub const TWO_STATE_LABEL: &str = "two-state low-T approximation";
pub const GIBBS_LABEL: &str = "exact Gibbs state";
pub const GROUND_LABEL: &str = "sector ground states";

pub fn solver(kind: ModelKind, spec: &ChainSpec) -> Result<Box<dyn SectorSolver + Send>, CliError> {
    Ok(match kind {
        ModelKind::Collective => Box::new(CollectiveModel::new(spec)?),
        ModelKind::Freefermion => Box::new(FreeFermionModel::new(spec)?),
        ModelKind::Oracle => Box::new(OracleModel::new(spec)?),
    })
}

/// Shared per-run context: model, chain and unit scaling.
struct Context {
    cfg: RunConfig,
    spec: ChainSpec,
    model: Box<dyn SectorSolver + Send>,
    separations: Vec<usize>,
    chi: Option<f64>,
    delta: Option<f64>,
    unit: f64,
}

impl Context {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let spec = cfg.chain_spec()?;
        let chi = factorization_point(&spec).ok().map(|fp| fp.chi);
        let vx = spec.couplings().vx;
        Ok(Context {
            model: solver(cfg.model, &spec)?,
            separations: cfg.separations()?,
            delta: chi.map(|c| spec.n() as f64 * (1.0 - c)),
            chi,
            unit: if vx != 0.0 { vx } else { 1.0 },
            spec,
            cfg: cfg.clone(),
        })
    }

    fn units(&self) -> Units {
        let vx = self.spec.couplings().vx;
        Units { energy: if vx != 0.0 { "v_x".into() } else { "absolute".into() }, vx }
    }

    fn record(&self, b: f64, sector: SectorLabel, l: usize, c: ConcurrenceValue, energy: f64, m: f64) -> ScanRecord {
        ScanRecord {
            model: self.cfg.model.as_str().to_string(),
            n: self.spec.n(),
            chi: self.chi,
            delta: self.delta,
            b: b / self.unit,
            sector,
            l,
            concurrence: c.value,
            kind: c.kind,
            energy: energy / self.unit,
            magnetization: m,
        }
    }

    fn metadata(&self, method: &str, transitions: Vec<Transition>) -> Result<ScanMetadata, CliError> {
        let transitions = transitions
            .into_iter()
            .map(|t| Transition { b: t.b / self.unit, residual_gap: t.residual_gap / self.unit, ..t })
            .collect();
        Ok(ScanMetadata {
            model: self.cfg.model.as_str().into(),
            n: self.spec.n(),
            chi: self.chi,
            delta: self.delta,
            units: self.units(),
            method: method.into(),
            transitions,
            side_limits: self.side_limit_report()?,
            thermal: None,
        })
    }

    fn side_limit_report(&self) -> Result<Option<SideLimitReport>, CliError> {
        let Ok(fp) = factorization_point(&self.spec) else { return Ok(None) };
        let limits = side_limits(fp.chi, self.spec.n())?;
        let mut sectors = Vec::new();
        let mut mags = [0.0; 2];
        for (k, parity) in Parity::BOTH.into_iter().enumerate() {
            let g = self.model.sector_ground(fp.b_s, parity, &self.separations)?;
            mags[k] = g.magnetization;
            for (l, c) in &g.pairs {
                sectors.push(PairValue {
                    sector: SectorLabel::of(parity),
                    l: *l,
                    concurrence: concurrence_from_correlators(c)?.value,
                });
            }
        }
        Ok(Some(SideLimitReport {
            b_s: fp.b_s / self.unit,
            e_s: fp.e_s / self.unit,
            closed_form: ClosedFormLimits {
                plus: limits.plus,
                minus: limits.minus,
                zero: limits.zero,
                magnetization_jump: limits.magnetization_jump,
            },
            sectors,
            magnetization_jump: mags[1] - mags[0],
        }))
    }

    fn sector_grounds(&self, b: f64) -> Result<(SectorGround, SectorGround), CliError> {
        Ok((
            self.model.sector_ground(b, Parity::Even, &self.separations)?,
            self.model.sector_ground(b, Parity::Odd, &self.separations)?,
        ))
    }
}

fn point_records(ctx: &Context, b: f64) -> Result<(Vec<ScanRecord>, f64, f64), CliError> {
    let (even, odd) = ctx.sector_grounds(b)?;
    let mut out = Vec::new();
    for g in [&even, &odd] {
        for (l, c) in &g.pairs {
            out.push(ctx.record(b, SectorLabel::of(g.parity), *l, concurrence_from_correlators(c)?, g.energy, g.magnetization));
        }
    }
    let point = sweep_point(b, even.energy, odd.energy);
    match point.ground {
        Some(parity) => {
            let g = if parity == Parity::Even { &even } else { &odd };
            for (l, c) in &g.pairs {
                out.push(ctx.record(b, SectorLabel::Global, *l, concurrence_from_correlators(c)?, g.energy, g.magnetization));
            }
        }
        None => {
            // Degenerate sectors: the zero-temperature limit is the equal mixture.
            for ((l, ce), (_, co)) in even.pairs.iter().zip(&odd.pairs) {
                let rho = TwoSpinState::mix(&TwoSpinState::from_correlators(ce)?, &TwoSpinState::from_correlators(co)?, 0.5)?;
                let m = 0.5 * (even.magnetization + odd.magnetization);
                out.push(ctx.record(b, SectorLabel::Global, *l, wootters_concurrence(&rho)?, even.energy.min(odd.energy), m));
            }
        }
    }
    Ok((out, even.energy, odd.energy))
}

/// Ground-state scan: per-sector and global records at every grid field,
/// refined parity transitions, and the side limits at `b_s`.
pub fn run_scan(cfg: &RunConfig) -> Result<ScanOutput, CliError> {
    let ctx = Context::new(cfg)?;
    let grid = cfg.scan()?.grid();
    let per_point: Vec<(Vec<ScanRecord>, f64, f64)> =
        grid.par_iter().map(|&b| point_records(&ctx, b)).collect::<Result<_, _>>()?;
    let points: Vec<_> = grid.iter().zip(&per_point).map(|(&b, (_, e, o))| sweep_point(b, *e, *o)).collect();
    let transitions = locate_transitions(ctx.model.as_ref(), &points)?;
    let records = per_point.into_iter().flat_map(|(r, _, _)| r).collect();
    Ok(ScanOutput { records, metadata: ctx.metadata(GROUND_LABEL, transitions)? })
}

/// Factorization quantities of the configured chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub n: usize,
    pub units: Units,
    pub chi: f64,
    pub delta: f64,
    pub theta: f64,
    pub b_s: f64,
    pub e_s: f64,
    /// `‖H|θ⟩ - E_s|θ⟩‖` at `b_s`; `None` beyond the state-vector limit.
    pub residual: Option<f64>,
    pub side_limits: ClosedFormLimits,
    /// Mixture weight of `|θ_+⟩` at which the pair state is separable.
    pub q_c: f64,
}

pub fn point_report(cfg: &RunConfig) -> Result<PointReport, CliError> {
    let ctx = Context::new(cfg)?;
    let fp = factorization_point(&ctx.spec)?;
    let n = ctx.spec.n();
    let limits = side_limits(fp.chi, n)?;
    let residual = if n <= MAX_VECTOR_SITES {
        Some(factorization_residual(&ctx.spec.with_field(fp.b_s)?)? / ctx.unit.abs())
    } else {
        None
    };
    Ok(PointReport {
        n,
        units: ctx.units(),
        chi: fp.chi,
        delta: n as f64 * (1.0 - fp.chi),
        theta: fp.theta,
        b_s: fp.b_s / ctx.unit,
        e_s: fp.e_s / ctx.unit,
        residual,
        side_limits: ClosedFormLimits {
            plus: limits.plus,
            minus: limits.minus,
            zero: limits.zero,
            magnetization_jump: limits.magnetization_jump,
        },
        q_c: mixture_concurrence(0.5, fp.chi, n)?.q_c,
    })
}

/// Thermal pair states at one field: exact Gibbs for the oracle, the
/// two-state mixture otherwise. Returns `(l, ρ)`, energy, magnetization.
type ThermalPairs = (Vec<(usize, TwoSpinState)>, f64, f64);

fn thermal_pairs(ctx: &Context, b: f64, t: f64, seps: &[usize]) -> Result<ThermalPairs, CliError> {
    if ctx.cfg.model == ModelKind::Oracle {
        let gibbs = thermal_state(&ctx.spec.with_field(b)?, t)?;
        let pairs = seps.iter().map(|&l| Ok((l, gibbs.reduced_two_spin(0, l)?))).collect::<Result<_, CliError>>()?;
        Ok((pairs, gibbs.energy(), gibbs.magnetization()))
    } else {
        let even = ctx.model.sector_ground(b, Parity::Even, seps)?;
        let odd = ctx.model.sector_ground(b, Parity::Odd, seps)?;
        let mix = two_state_mixture(&even, &odd, t)?;
        Ok((mix.pairs, mix.energy, mix.magnetization))
    }
}

/// Signed antiparallel branch `2(|α⁻| - √(ρ↑↑ ρ↓↓))` of the thermal pair state.
fn antiparallel_branch(ctx: &Context, b: f64, t: f64, l: usize) -> Result<f64, CliError> {
    let (pairs, _, _) = thermal_pairs(ctx, b, t, &[l])?;
    Ok(2.0 * concurrence_branches(&pairs[0].1.correlators())?.1)
}

/// Thermal scan at `kT = cfg.temperature`.
pub fn thermal_scan(cfg: &RunConfig) -> Result<ScanOutput, CliError> {
    let t = cfg.temperature.ok_or_else(|| CliError::Config("thermal scan needs a temperature".into()))?;
    let ctx = Context::new(cfg)?;
    let grid = cfg.scan()?.grid();
    let per_point: Vec<Vec<ScanRecord>> = grid
        .par_iter()
        .map(|&b| {
            let (pairs, energy, m) = thermal_pairs(&ctx, b, t, &ctx.separations)?;
            pairs
                .iter()
                .map(|(l, rho)| Ok(ctx.record(b, SectorLabel::Thermal, *l, wootters_concurrence(rho)?, energy, m)))
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    let records: Vec<ScanRecord> = per_point.into_iter().flatten().collect();
    let method = if cfg.model == ModelKind::Oracle { GIBBS_LABEL } else { TWO_STATE_LABEL };
    let mut metadata = ctx.metadata(method, Vec::new())?;
    if let Ok(fp) = factorization_point(&ctx.spec) {
        let (pairs, _, _) = thermal_pairs(&ctx, fp.b_s, t, &ctx.separations)?;
        let crossing = pairs
            .iter()
            .map(|(l, rho)| Ok(PairValue { sector: SectorLabel::Thermal, l: *l, concurrence: wootters_concurrence(rho)?.value }))
            .collect::<Result<_, CliError>>()?;
        let vanishing = ctx
            .separations
            .iter()
            .map(|&l| vanishing_field(&ctx, &grid, &records, fp.b_s, t, l).map(|b| VanishingField { l, b: b.map(|x| x / ctx.unit) }))
            .collect::<Result<_, CliError>>()?;
        metadata.thermal = Some(ThermalReport {
            temperature: t / ctx.unit,
            crossing_b: fp.b_s / ctx.unit,
            crossing,
            closed_form_zero: side_limits(fp.chi, ctx.spec.n())?.zero,
            vanishing,
        });
    }
    Ok(ScanOutput { records, metadata })
}

/// First field above `b_s` where the antiparallel entanglement present at
/// `b_s` dies: bracketed on the grid by a change of kind, then bisected to
/// `1e-10` in `b` on the signed branch.
fn vanishing_field(ctx: &Context, grid: &[f64], records: &[ScanRecord], b_s: f64, t: f64, l: usize) -> Result<Option<f64>, CliError> {
    let kinds = records.iter().filter(|r| r.l == l).map(|r| r.kind);
    let mut lo = b_s;
    let Some(mut hi) = grid.iter().zip(kinds).filter(|(&b, _)| b > b_s).find_map(|(&b, kind)| {
        if kind == ConcurrenceKind::Antiparallel {
            lo = b;
            None
        } else {
            Some(b)
        }
    }) else {
        return Ok(None);
    };
    if antiparallel_branch(ctx, lo, t, l)? <= 0.0 {
        return Ok(None);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if antiparallel_branch(ctx, mid, t, l)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}

/// One row of the rescaled side-limit curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub delta: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub c_zero: f64,
    pub magnetization_jump: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig1Metadata {
    /// Location and value of the `c_+` maximum.
    pub delta_star: f64,
    pub c_plus_max: f64,
}

pub fn fig1_curves(deltas: &[f64]) -> Result<Vec<Fig1Row>, CliError> {
    deltas
        .iter()
        .map(|&d| {
            let r = rescaled_asymptotics(d)?;
            Ok(Fig1Row {
                delta: d,
                c_plus: r.c_plus,
                c_minus: r.c_minus,
                c_zero: r.c_zero,
                magnetization_jump: r.magnetization_jump,
            })
        })
        .collect()
}

pub fn fig1_metadata() -> Fig1Metadata {
    let (delta_star, c_plus_max) = cplus_maximum();
    Fig1Metadata { delta_star, c_plus_max }
}

/// `steps` points evenly spaced on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect()
}
