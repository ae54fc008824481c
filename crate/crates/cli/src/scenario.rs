//! Scenario files: the action of `G`, the subgroups `H ≥ K`, and run settings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use permendo_core::modular::SqrtConvention;
use permendo_core::orbenum::EnumConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::formats::{GroupFile, MatrixGroupFile, WordSpec};

/// A group file given inline or by a path relative to the scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

impl<T: for<'de> Deserialize<'de> + Clone> Source<T> {
    pub fn load(&self, dir: &Path) -> Result<T> {
        match self {
            Source::Inline(t) => Ok(t.clone()),
            Source::Path(p) => crate::formats::read_json(&dir.join(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    /// `G` permutes `1..=degree`; `base` defaults to the least point fixed by `H`.
    Permutation { group: Source<GroupFile>, base: Option<u32> },
    /// `G` acts on row vectors over `F_p`; `O` is the orbit of `base`.
    Linear {
        group: Source<MatrixGroupFile>,
        base: Vec<i64>,
        /// `|O|`, required since the orbit is not enumerated.
        index: u64,
        /// Projection `O → Q` (dim × q) with `K` acting on `Q`; the identity when absent.
        quotient: Option<QuotientSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSpec {
    pub matrix: Vec<Vec<i64>>,
    /// One matrix per `K`-generator.
    pub k_on_q: Vec<Vec<Vec<i64>>>,
}

/// Points fixed by a subgroup given by words in `H`, probed when random
/// search stalls with orbits of length `length` still missing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedProbeSpec {
    pub words: Vec<WordSpec>,
    pub length: u64,
    #[serde(default = "default_tries")]
    pub tries: usize,
}

fn default_tries() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub action: Action,
    /// Generators of `H` as words in the generators of `G`.
    pub h_words: Vec<WordSpec>,
    /// Generators of `K` as words in the generators of `H`.
    #[serde(default)]
    pub k_words: Vec<WordSpec>,
    /// `H` acting faithfully on a small domain, generators parallel to `h_words`.
    #[serde(default)]
    pub faithful: Option<Source<GroupFile>>,
    /// Decimal `|H|`, used when no faithful action is available.
    #[serde(default)]
    pub h_order: Option<String>,
    #[serde(default)]
    pub p: Option<u64>,
    /// Overrides `√n ↦ s (mod p)`, keyed by `n`.
    #[serde(default)]
    pub sqrt: BTreeMap<String, u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub budget_probes: Option<u64>,
    /// Bytes available for stored points.
    #[serde(default)]
    pub budget_memory: Option<u64>,
    #[serde(default)]
    pub complete_up_to: Option<u64>,
    /// Longest orbit whose points are listed when counting.
    #[serde(default)]
    pub cutoff: Option<u64>,
    #[serde(default)]
    pub fixed_probes: Vec<FixedProbeSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_CUTOFF: u64 = 10_000_000;

/// Command-line settings that take precedence over the scenario file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget_probes: Option<u64>,
    pub budget_memory: Option<u64>,
    pub p: Option<u64>,
    pub sqrt: Vec<(i64, u64)>,
}

/// Parses `n=s`.
pub fn parse_sqrt(s: &str) -> std::result::Result<(i64, u64), String> {
    let (n, v) = s.split_once('=').ok_or_else(|| format!("expected n=s, got {s:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("bad n in {s:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("bad s in {s:?}"))?;
    Ok((n, v))
}

impl ScenarioConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.budget_probes.is_some() {
            self.budget_probes = o.budget_probes;
        }
        if o.budget_memory.is_some() {
            self.budget_memory = o.budget_memory;
        }
        if o.p.is_some() {
            self.p = o.p;
        }
        for &(n, s) in &o.sqrt {
            self.sqrt.insert(n.to_string(), s);
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn h_order(&self) -> Result<Option<BigUint>> {
        self.h_order.as_deref().map(|s| s.parse::<BigUint>().map_err(|_| CliError::Input(format!("bad h_order {s:?}")))).transpose()
    }

    /// Enumeration settings; `point_bytes` converts the memory budget into stored points.
    pub fn enum_config(&self, point_bytes: u64) -> EnumConfig {
        let d = EnumConfig::default();
        EnumConfig {
            memory_budget: self.budget_memory.map(|b| (b / (point_bytes + 4).max(1)) as usize).unwrap_or(d.memory_budget),
            complete_up_to: self.complete_up_to.unwrap_or(d.complete_up_to),
            probe_budget: self.budget_probes.unwrap_or(d.probe_budget),
            walk_factor: d.walk_factor,
            seed: self.seed(),
        }
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff.unwrap_or(DEFAULT_CUTOFF)
    }

    pub fn require_p(&self) -> Result<u64> {
        self.p.ok_or_else(|| CliError::Input("no prime given (scenario \"p\" or --p)".into()))
    }
}

/// The square-root convention for `p` with the given overrides.
pub fn convention(p: u64, sqrt: &BTreeMap<String, u64>) -> Result<SqrtConvention> {
    let mut c = SqrtConvention::new(p).map_err(CliError::input)?;
    for (n, &s) in sqrt {
        let n: i64 = n.parse().map_err(|_| CliError::Input(format!("bad sqrt key {n:?}")))?;
        c = c.with_override(n, s).map_err(CliError::input)?;
    }
    Ok(c)
}

pub fn load(path: &Path) -> Result<(ScenarioConfig, PathBuf)> {
    let cfg: ScenarioConfig = crate::formats::read_json(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_permutation_scenario() {
        let text = r#"{
            "action": {"kind": "permutation", "group": {"degree": 5, "generators": [[2,1,3,4,5],[2,3,4,5,1]]}},
            "h_words": [[[1,1]]],
            "p": 5,
            "sqrt": {"5": 0}
        }"#;
        let cfg: ScenarioConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(cfg.action, Action::Permutation { base: None, .. }));
        assert_eq!(cfg.seed(), DEFAULT_SEED);
        assert_eq!(cfg.sqrt.get("5"), Some(&0));
    }

    #[test]
    fn overrides_take_precedence() {
        let text = r#"{"action": {"kind": "permutation", "group": "g.json"}, "h_words": [], "seed": 4}"#;
        let mut cfg: ScenarioConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(&cfg.action, Action::Permutation { group: Source::Path(_), .. }));
        cfg.apply(&Overrides { seed: Some(9), sqrt: vec![(3, 6)], ..Overrides::default() });
        assert_eq!(cfg.seed(), 9);
        assert_eq!(cfg.sqrt.get("3"), Some(&6));
    }

    #[test]
    fn sqrt_flag_syntax() {
        assert_eq!(parse_sqrt("3=6"), Ok((3, 6)));
        assert!(parse_sqrt("3:6").is_err());
    }

    #[test]
    fn memory_budget_in_points() {
        let text = r#"{"action": {"kind": "permutation", "group": "g.json"}, "h_words": [], "budget_memory": 800}"#;
        let cfg: ScenarioConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.enum_config(4).memory_budget, 100);
    }
}
