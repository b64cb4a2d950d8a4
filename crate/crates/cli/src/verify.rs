//! Self-checks for a configured chain: the separable solution at `b_s`
//! and, for small chains, agreement of the chosen model with the oracle.

use serde::Serialize;
use xyzfact::closed_form::factorization_point;
use xyzfact::concurrence::concurrence_from_correlators;
use xyzfact::oracle::{verify_factorization, OracleModel, MAX_SITES};
use xyzfact::sector::SectorSolver;
use xyzfact::Parity;

use crate::config::{ModelKind, RunConfig};
use crate::scan::solver;
use crate::CliError;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const ENERGY_TOL: f64 = 1e-10;
pub const CONCURRENCE_TOL: f64 = 1e-9;
/// Largest chain compared against the oracle.
pub const CROSS_CHECK_SITES: usize = 12;
const CROSS_CHECK_POINTS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let spec = cfg.chain_spec()?;
    let mut checks = Vec::new();

    if factorization_point(&spec).is_ok() {
        let fc = verify_factorization(&spec)?;
        checks.push(Check {
            name: "separable eigenstate at b_s".into(),
            passed: fc.residual < RESIDUAL_TOL,
            detail: format!("residual {:.3e} at b_s = {}", fc.residual, fc.point.b_s),
        });
        if let (Some(o), Some(d)) = (fc.sector_overlaps, fc.sector_energy_offsets) {
            checks.push(Check {
                name: "projected states are sector ground states".into(),
                passed: fc.sector_grounds_match(1e-9),
                detail: format!("overlaps {:.12} {:.12}, energy offsets {:.3e} {:.3e}", o[0], o[1], d[0], d[1]),
            });
        }
    }

    if cfg.model != ModelKind::Oracle && spec.n() <= CROSS_CHECK_SITES.min(MAX_SITES) {
        let model = solver(cfg.model, &spec)?;
        let oracle = OracleModel::new(&spec)?;
        let seps = cfg.separations()?;
        let grid = cfg.scan()?.grid();
        let stride = (grid.len() / CROSS_CHECK_POINTS).max(1);
        let (mut de, mut dc, mut skipped) = (0.0f64, 0.0f64, 0usize);
        for &b in grid.iter().step_by(stride) {
            for parity in Parity::BOTH {
                let exact = oracle.solve(b, parity, 2)?;
                let got = model.sector_ground(b, parity, &seps)?;
                de = de.max((got.energy - exact.ground_energy()).abs() / exact.ground_energy().abs().max(1.0));
                if exact.ground_is_degenerate() {
                    skipped += 1;
                    continue;
                }
                let want = oracle.sector_ground(b, parity, &seps)?;
                for ((_, g), (_, w)) in got.pairs.iter().zip(&want.pairs) {
                    dc = dc.max((concurrence_from_correlators(g)?.value - concurrence_from_correlators(w)?.value).abs());
                }
            }
        }
        checks.push(Check {
            name: format!("{} sector energies match the oracle", cfg.model.as_str()),
            passed: de < ENERGY_TOL,
            detail: format!("max relative deviation {de:.3e}"),
        });
        checks.push(Check {
            name: format!("{} concurrences match the oracle", cfg.model.as_str()),
            passed: dc < CONCURRENCE_TOL,
            detail: format!("max deviation {dc:.3e}, {skipped} degenerate sector grounds skipped"),
        });
    }
    Ok(VerifyReport { checks })
}
