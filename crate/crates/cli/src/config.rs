//! Flat `key = value` scenario configs: typed parsing with field-level
//! errors and a canonical serializer that round-trips exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};

/// Which engine a scenario drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Flock,
    RasReplay,
    LowerBound,
    Swarm,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Flock => "flock",
            Mode::RasReplay => "ras-replay",
            Mode::LowerBound => "lower-bound",
            Mode::Swarm => "swarm",
        }
    }
}

impl FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flock" => Ok(Mode::Flock),
            "ras-replay" => Ok(Mode::RasReplay),
            "lower-bound" => Ok(Mode::LowerBound),
            "swarm" => Ok(Mode::Swarm),
            other => bail!("unknown mode '{other}' (expected flock, ras-replay, lower-bound, or swarm)"),
        }
    }
}

/// Graph shape for replay and swarm scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphSpec {
    Path(usize),
    Grid(usize, usize),
}

impl GraphSpec {
    pub fn build(self) -> ras_core::WeightedGraph {
        match self {
            GraphSpec::Path(n) => ras_core::WeightedGraph::path(n),
            GraphSpec::Grid(rows, cols) => ras_core::WeightedGraph::grid(rows, cols),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Path(n) => write!(f, "path:{n}"),
            GraphSpec::Grid(r, c) => write!(f, "grid:{r}x{c}"),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) = s
            .split_once(':')
            .ok_or_else(|| anyhow!("expected 'path:N' or 'grid:RxC', got '{s}'"))?;
        match kind {
            "path" => Ok(GraphSpec::Path(size.parse().map_err(|_| {
                anyhow!("path size '{size}' is not a positive integer")
            })?)),
            "grid" => {
                let (r, c) = size
                    .split_once('x')
                    .ok_or_else(|| anyhow!("grid size '{size}' is not of the form RxC"))?;
                Ok(GraphSpec::Grid(
                    r.parse().map_err(|_| anyhow!("grid rows '{r}' is not a positive integer"))?,
                    c.parse().map_err(|_| anyhow!("grid cols '{c}' is not a positive integer"))?,
                ))
            }
            other => bail!("unknown graph kind '{other}' (expected path or grid)"),
        }
    }
}

/// Pin handling for swarm scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinModeSpec {
    Symmetrize,
    ZeroWeight,
}

impl PinModeSpec {
    pub fn as_str(self) -> &'static str {
        match self {
            PinModeSpec::Symmetrize => "symmetrize",
            PinModeSpec::ZeroWeight => "zero-weight",
        }
    }

    pub fn to_core(self) -> ras_core::PinMode {
        match self {
            PinModeSpec::Symmetrize => ras_core::PinMode::Symmetrize,
            PinModeSpec::ZeroWeight => ras_core::PinMode::ZeroWeight,
        }
    }
}

impl FromStr for PinModeSpec {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetrize" => Ok(PinModeSpec::Symmetrize),
            "zero-weight" => Ok(PinModeSpec::ZeroWeight),
            other => bail!("unknown pin mode '{other}' (expected symmetrize or zero-weight)"),
        }
    }
}

/// One parsed scenario; optional fields fall back to per-mode defaults at
/// validation time so the canonical form always spells them out.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub seed: u64,
    pub replicas: usize,
    pub out: Option<String>,
    pub s_values: Vec<f64>,
    pub alphas: Vec<f64>,
    // flock
    pub n: usize,
    pub r: f64,
    pub eps_o: f64,
    pub max_steps: usize,
    pub quiet_tail: usize,
    pub theta: Option<f64>,
    // lower-bound
    pub m: usize,
    pub rho: f64,
    // ras-replay and swarm
    pub graph: Option<GraphSpec>,
    pub weight: Option<f64>,
    pub steps: usize,
    pub p: f64,
    pub pin_mode: PinModeSpec,
    /// Agent counts visited by the `sweep` subcommand.
    pub sweep_n: Vec<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            mode: Mode::RasReplay,
            seed: 0,
            replicas: 1,
            out: None,
            s_values: vec![0.5, 1.0],
            alphas: ras_core::swarm::DEFAULT_ALPHAS.to_vec(),
            n: 8,
            r: 0.5,
            eps_o: 0.05,
            max_steps: 20_000,
            quiet_tail: 200,
            theta: None,
            m: 1,
            rho: 0.1,
            graph: None,
            weight: None,
            steps: 200,
            p: 1.0,
            pin_mode: PinModeSpec::Symmetrize,
            sweep_n: Vec::new(),
        }
    }
}

fn parse_field<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("line {line}: key '{key}': {e} (value '{value}')"))
}

fn parse_list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_field(key, s, line))
        .collect()
}

fn join_list<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl ScenarioConfig {
    /// Parses the flat `key = value` format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line}: expected 'key = value', got '{raw}'"))?;
            let key = key.trim().to_string();
            if fields.insert(key.clone(), (value.trim().to_string(), line)).is_some() {
                bail!("line {line}: key '{key}' given twice");
            }
        }
        let mode_entry = fields
            .remove("mode")
            .ok_or_else(|| anyhow!("missing required key 'mode'"))?;
        let mut config = ScenarioConfig {
            mode: parse_field("mode", &mode_entry.0, mode_entry.1)?,
            ..ScenarioConfig::default()
        };
        for (key, (value, line)) in fields {
            match key.as_str() {
                "seed" => config.seed = parse_field(&key, &value, line)?,
                "replicas" => config.replicas = parse_field(&key, &value, line)?,
                "out" => config.out = Some(value),
                "s_values" => config.s_values = parse_list(&key, &value, line)?,
                "alphas" => config.alphas = parse_list(&key, &value, line)?,
                "n" => config.n = parse_field(&key, &value, line)?,
                "r" => config.r = parse_field(&key, &value, line)?,
                "eps_o" => config.eps_o = parse_field(&key, &value, line)?,
                "max_steps" => config.max_steps = parse_field(&key, &value, line)?,
                "quiet_tail" => config.quiet_tail = parse_field(&key, &value, line)?,
                "theta" => config.theta = Some(parse_field(&key, &value, line)?),
                "m" => config.m = parse_field(&key, &value, line)?,
                "rho" => config.rho = parse_field(&key, &value, line)?,
                "graph" => config.graph = Some(parse_field(&key, &value, line)?),
                "weight" => config.weight = Some(parse_field(&key, &value, line)?),
                "steps" => config.steps = parse_field(&key, &value, line)?,
                "p" => config.p = parse_field(&key, &value, line)?,
                "pin_mode" => config.pin_mode = parse_field(&key, &value, line)?,
                "sweep_n" => config.sweep_n = parse_list(&key, &value, line)?,
                other => bail!("line {line}: unknown key '{other}'"),
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// Cheap structural validation; engine-level range checks happen on
    /// dispatch and also surface as exit code 1.
    // Negated comparisons so that NaN parameters are rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            bail!("key 'replicas': need at least one replica");
        }
        if self.s_values.is_empty() {
            bail!("key 's_values': need at least one exponent");
        }
        for &s in &self.s_values {
            if !(s > 0.0 && s <= 1.0) {
                bail!("key 's_values': exponent {s} outside (0, 1]");
            }
        }
        for &alpha in &self.alphas {
            if !(alpha > 0.0) {
                bail!("key 'alphas': threshold {alpha} must be positive");
            }
        }
        match self.mode {
            Mode::Flock => {
                if self.n == 0 {
                    bail!("key 'n': need at least one bird");
                }
            }
            Mode::RasReplay | Mode::Swarm => {
                if self.graph.is_none() {
                    bail!("key 'graph': required for mode {}", self.mode.as_str());
                }
                if self.steps == 0 {
                    bail!("key 'steps': need at least one step");
                }
            }
            Mode::LowerBound => {
                if self.n < 2 {
                    bail!("key 'n': the construction needs at least two agents");
                }
                if self.m >= 2 && !self.n.is_multiple_of(self.m) {
                    bail!("key 'm': cluster count {} must divide n = {}", self.m, self.n);
                }
            }
        }
        Ok(())
    }

    /// Canonical serialization: fixed key order, only the keys the mode
    /// reads, every default spelled out. parse(serialize(c)) == c.
    pub fn serialize(&self) -> String {
        let mut lines = vec![format!("mode = {}", self.mode.as_str())];
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!("replicas = {}", self.replicas));
        if let Some(out) = &self.out {
            lines.push(format!("out = {out}"));
        }
        match self.mode {
            Mode::Flock => {
                lines.push(format!("n = {}", self.n));
                lines.push(format!("r = {}", self.r));
                lines.push(format!("eps_o = {}", self.eps_o));
                lines.push(format!("max_steps = {}", self.max_steps));
                lines.push(format!("quiet_tail = {}", self.quiet_tail));
                if let Some(theta) = self.theta {
                    lines.push(format!("theta = {theta}"));
                }
            }
            Mode::RasReplay => {
                lines.push(format!("graph = {}", self.graph.expect("validated")));
                if let Some(w) = self.weight {
                    lines.push(format!("weight = {w}"));
                }
                lines.push(format!("steps = {}", self.steps));
                lines.push(format!("s_values = {}", join_list(&self.s_values)));
            }
            Mode::LowerBound => {
                lines.push(format!("n = {}", self.n));
                lines.push(format!("m = {}", self.m));
                lines.push(format!("rho = {}", self.rho));
                lines.push(format!("s_values = {}", join_list(&self.s_values)));
                if !self.sweep_n.is_empty() {
                    lines.push(format!("sweep_n = {}", join_list(&self.sweep_n)));
                }
            }
            Mode::Swarm => {
                lines.push(format!("graph = {}", self.graph.expect("validated")));
                lines.push(format!("p = {}", self.p));
                lines.push(format!("steps = {}", self.steps));
                lines.push(format!("pin_mode = {}", self.pin_mode.as_str()));
                lines.push(format!("alphas = {}", join_list(&self.alphas)));
            }
        }
        lines.push(String::new());
        lines.join("\n")
    }
}
