//! Run configuration: one JSON document, every key overridable by a flag.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xyzfact::closed_form::factorization_point;
use xyzfact::{ChainSpec, Couplings};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Collective,
    Freefermion,
    Oracle,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Collective => "collective",
            ModelKind::Freefermion => "freefermion",
            ModelKind::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "collective" => Ok(ModelKind::Collective),
            "freefermion" => Ok(ModelKind::Freefermion),
            "oracle" => Ok(ModelKind::Oracle),
            other => Err(CliError::Config(format!("unknown model {other:?}"))),
        }
    }
}

/// `"nn"`, `"full"`, or the explicit weights `r_1..r_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    Keyword(String),
    Weights(Vec<f64>),
}

impl RangeSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "nn" | "full" => Ok(RangeSpec::Keyword(s.to_string())),
            list => list
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| CliError::Config(format!("range entry {x:?}: {e}"))))
                .collect::<Result<_, _>>()
                .map(RangeSpec::Weights),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub vx: f64,
    /// Either `vy` or one of `chi`, `delta` (which fix `vy` through
    /// `χ = (v_y - v_z)/(v_x - v_z)` and `χ = 1 - δ/n`).
    #[serde(default)]
    pub vy: Option<f64>,
    #[serde(default)]
    pub chi: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub vz: f64,
    #[serde(default)]
    pub b: f64,
    pub range: RangeSpec,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub b_min: f64,
    pub b_max: f64,
    pub steps: usize,
}

impl ScanConfig {
    pub fn grid(&self) -> Vec<f64> {
        let span = self.b_max - self.b_min;
        (0..self.steps).map(|k| self.b_min + span * k as f64 / (self.steps - 1) as f64).collect()
    }
}

/// `"all"` (separations `1..=⌊n/2⌋`) or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSelection {
    Keyword(String),
    List(Vec<usize>),
}

impl Default for PairSelection {
    fn default() -> Self {
        PairSelection::Keyword("all".into())
    }
}

impl PairSelection {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "all" {
            return Ok(PairSelection::default());
        }
        s.split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|e| CliError::Config(format!("pair {x:?}: {e}"))))
            .collect::<Result<_, _>>()
            .map(PairSelection::List)
    }

    pub fn resolve(&self, n: usize) -> Result<Vec<usize>, CliError> {
        match self {
            PairSelection::Keyword(k) if k == "all" => Ok((1..=n / 2).collect()),
            PairSelection::Keyword(k) => Err(CliError::Config(format!("pairs must be \"all\" or a list, got {k:?}"))),
            PairSelection::List(ls) => {
                if ls.is_empty() {
                    return Err(CliError::Config("pairs list is empty".into()));
                }
                if let Some(&l) = ls.iter().find(|&&l| l == 0 || l >= n) {
                    return Err(CliError::Config(format!("separation {l} outside 1..={}", n - 1)));
                }
                Ok(ls.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<Format>,
}

impl OutputSpec {
    pub fn format(&self) -> Result<Format, CliError> {
        self.format
            .or_else(|| Format::from_path(&self.path))
            .ok_or_else(|| CliError::Config(format!("cannot infer format of {}", self.path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chain: ChainConfig,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    /// `kT`, same units as the couplings.
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub pairs: PairSelection,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

fn default_model() -> ModelKind {
    ModelKind::Freefermion
}

/// Command-line values that replace configuration keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub vx: Option<f64>,
    pub vy: Option<f64>,
    pub vz: Option<f64>,
    pub chi: Option<f64>,
    pub delta: Option<f64>,
    pub b: Option<f64>,
    pub range: Option<RangeSpec>,
    pub model: Option<ModelKind>,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
    pub steps: Option<usize>,
    pub temperature: Option<f64>,
    pub pairs: Option<PairSelection>,
    pub out: Vec<OutputSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Starts from `base` (or an empty chain when absent) and applies the
    /// overrides; the result is validated.
    pub fn assemble(base: Option<RunConfig>, o: Overrides) -> Result<Self, CliError> {
        let mut cfg = match base {
            Some(c) => c,
            None => RunConfig {
                chain: ChainConfig {
                    n: o.n.ok_or_else(|| CliError::Config("no config file and no --n".into()))?,
                    vx: 1.0,
                    vy: None,
                    chi: None,
                    delta: None,
                    vz: 0.0,
                    b: 0.0,
                    range: RangeSpec::Keyword("nn".into()),
                },
                model: default_model(),
                scan: None,
                temperature: None,
                pairs: PairSelection::default(),
                outputs: Vec::new(),
            },
        };
        let c = &mut cfg.chain;
        if let Some(n) = o.n {
            c.n = n;
        }
        if let Some(v) = o.vx {
            c.vx = v;
        }
        if let Some(v) = o.vz {
            c.vz = v;
        }
        if let Some(b) = o.b {
            c.b = b;
        }
        // An anisotropy flag replaces whichever form the file used.
        if o.vy.is_some() || o.chi.is_some() || o.delta.is_some() {
            c.vy = o.vy;
            c.chi = o.chi;
            c.delta = o.delta;
        }
        if let Some(r) = o.range {
            c.range = r;
        }
        if let Some(m) = o.model {
            cfg.model = m;
        }
        if o.b_min.is_some() || o.b_max.is_some() || o.steps.is_some() {
            let mut scan = cfg.scan.unwrap_or(ScanConfig { b_min: 0.0, b_max: f64::NAN, steps: 201 });
            if let Some(v) = o.b_min {
                scan.b_min = v;
            }
            if let Some(v) = o.b_max {
                scan.b_max = v;
            }
            if let Some(v) = o.steps {
                scan.steps = v;
            }
            cfg.scan = Some(scan);
        }
        if let Some(t) = o.temperature {
            cfg.temperature = Some(t);
        }
        if let Some(p) = o.pairs {
            cfg.pairs = p;
        }
        if !o.out.is_empty() {
            cfg.outputs = o.out;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn vy(&self) -> Result<f64, CliError> {
        let c = &self.chain;
        let chi = match (c.vy, c.chi, c.delta) {
            (Some(vy), None, None) => return Ok(vy),
            (None, Some(chi), None) => chi,
            (None, None, Some(delta)) => 1.0 - delta / c.n as f64,
            (None, None, None) => return Err(CliError::Config("one of vy, chi, delta is required".into())),
            _ => return Err(CliError::Config("give only one of vy, chi, delta".into())),
        };
        Ok(c.vz + chi * (c.vx - c.vz))
    }

    pub fn chain_spec(&self) -> Result<ChainSpec, CliError> {
        let c = &self.chain;
        let couplings = Couplings::new(c.vx, self.vy()?, c.vz);
        let spec = match &c.range {
            RangeSpec::Keyword(k) if k == "nn" => ChainSpec::nearest_neighbor(c.n, couplings, c.b),
            RangeSpec::Keyword(k) if k == "full" => ChainSpec::fully_connected(c.n, couplings, c.b),
            RangeSpec::Keyword(k) => return Err(CliError::Config(format!("range must be nn, full or a list, got {k:?}"))),
            RangeSpec::Weights(w) => ChainSpec::new(c.n, couplings, w.clone(), c.b),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }

    /// The scan grid; without a `scan` section, `[0, 1.5 b_s]` (or
    /// `[0, 2 v_x]` when there is no factorizing field) with 201 points.
    pub fn scan(&self) -> Result<ScanConfig, CliError> {
        let spec = self.chain_spec()?;
        let default_max = || match factorization_point(&spec) {
            Ok(fp) if fp.b_s > 0.0 => 1.5 * fp.b_s,
            _ => 2.0 * self.chain.vx.abs().max(1.0),
        };
        let mut scan = self.scan.unwrap_or(ScanConfig { b_min: 0.0, b_max: f64::NAN, steps: 201 });
        if scan.b_max.is_nan() {
            scan.b_max = default_max();
        }
        if !(scan.b_min < scan.b_max) || !scan.b_min.is_finite() || !scan.b_max.is_finite() {
            return Err(CliError::Config(format!("need b_min < b_max, got {} and {}", scan.b_min, scan.b_max)));
        }
        if scan.b_min < 0.0 {
            return Err(CliError::Config("b_min must be non-negative".into()));
        }
        if scan.steps < 2 {
            return Err(CliError::Config(format!("need steps >= 2, got {}", scan.steps)));
        }
        Ok(scan)
    }

    pub fn separations(&self) -> Result<Vec<usize>, CliError> {
        self.pairs.resolve(self.chain.n)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let spec = self.chain_spec()?;
        self.scan()?;
        self.separations()?;
        if let Some(t) = self.temperature {
            if !(t > 0.0) {
                return Err(CliError::Config(format!("temperature must be positive, got {t}")));
            }
        }
        let capable = match self.model {
            ModelKind::Freefermion => xyzfact::freefermion::FreeFermionModel::new(&spec).map(|_| ()),
            ModelKind::Collective => xyzfact::collective::CollectiveModel::new(&spec).map(|_| ()),
            ModelKind::Oracle => xyzfact::oracle::OracleModel::new(&spec).map(|_| ()),
        };
        capable.map_err(|e| CliError::Config(format!("model {}: {e}", self.model.as_str())))?;
        for out in &self.outputs {
            out.format()?;
        }
        Ok(())
    }
}
