//! One function per subcommand, each returning its JSON report. Reports
//! with `"passed": false` signal a failed check.

use std::path::{Path, PathBuf};

use permendo_core::candfilter;
use permendo_core::qmat::IntMatrix;
use permendo_core::splitchar::{EndoCharTable, TableReport};
use serde_json::{json, Value};

use crate::corpus::{self, CorpusInstance};
use crate::crosscheck;
use crate::error::{CliError, Result};
use crate::fixtures;
use crate::formats::{self, CharTableFile, IntersectionFile, OrdinaryTableFile};
use crate::pipeline::{self, Instance};
use crate::scenario::{self, Action, Overrides, ScenarioConfig, DEFAULT_SEED};

/// Where a command gets `E`: a full run, stored matrices, or a stored table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableSource {
    Scenario(PathBuf),
    Intersection(PathBuf),
    Chartab(PathBuf),
}

struct Loaded {
    table: EndoCharTable,
    report: Option<TableReport>,
    mats: Option<Vec<IntMatrix>>,
    p: Option<u64>,
    sqrt: std::collections::BTreeMap<String, u64>,
    seed: u64,
}

fn load_scenario(path: &Path, o: &Overrides) -> Result<(ScenarioConfig, PathBuf)> {
    let (mut sc, dir) = scenario::load(path)?;
    sc.apply(o);
    Ok((sc, dir))
}

fn overrides_only(o: &Overrides) -> (Option<u64>, std::collections::BTreeMap<String, u64>, u64) {
    let sqrt = o.sqrt.iter().map(|(n, s)| (n.to_string(), *s)).collect();
    (o.p, sqrt, o.seed.unwrap_or(DEFAULT_SEED))
}

fn load_table(src: &TableSource, o: &Overrides) -> Result<Loaded> {
    match src {
        TableSource::Scenario(path) => {
            let (sc, dir) = load_scenario(path, o)?;
            let mut inst = pipeline::prepare(&sc, &dir)?;
            let (_, m) = pipeline::run_to_matrices(&mut inst)?;
            let (table, report) = pipeline::chartab(&m.mats, &m.sctx.lengths, &m.sctx.pairing)?;
            Ok(Loaded { table, report: Some(report), mats: Some(m.mats), p: sc.p, sqrt: sc.sqrt.clone(), seed: sc.seed() })
        }
        TableSource::Intersection(path) => {
            let f: IntersectionFile = formats::read_json(path)?;
            let mats = f.full()?.ok_or_else(|| CliError::Input("the intersection file must contain every P_j".into()))?;
            let (table, report) = pipeline::chartab(&mats, &f.lengths, &f.pairing0()?)?;
            let (p, sqrt, seed) = overrides_only(o);
            Ok(Loaded { table, report: Some(report), mats: Some(mats), p, sqrt, seed })
        }
        TableSource::Chartab(path) => {
            let f: CharTableFile = formats::read_json(path)?;
            let (p, sqrt, seed) = overrides_only(o);
            Ok(Loaded { table: f.to_table()?, report: None, mats: None, p, sqrt, seed })
        }
    }
}

pub fn orbits(path: &Path, o: &Overrides) -> Result<Value> {
    let (sc, dir) = load_scenario(path, o)?;
    let mut inst = pipeline::prepare(&sc, &dir)?;
    pipeline::run_orbits(&mut inst)
}

/// `js` are 1-based; empty selects all.
pub fn intersect(path: &Path, js: &[usize], o: &Overrides) -> Result<Value> {
    let (sc, dir) = load_scenario(path, o)?;
    let mut inst = pipeline::prepare(&sc, &dir)?;
    let (partition, m) = pipeline::run_to_matrices(&mut inst)?;
    Ok(json!({ "seed": sc.seed(), "partition": partition, "intersection": pipeline::matrices_json(&m, js)? }))
}

pub fn chartab(src: &TableSource, o: &Overrides) -> Result<Value> {
    if matches!(src, TableSource::Chartab(_)) {
        return Err(CliError::Input("chartab needs a scenario or an intersection file".into()));
    }
    let l = load_table(src, o)?;
    let report = l.report.as_ref().expect("computed tables carry a report");
    let mut v = pipeline::chartab_json(&l.table, report)?;
    v["seed"] = json!(l.seed);
    Ok(v)
}

fn convention(l: &Loaded) -> Result<permendo_core::modular::SqrtConvention> {
    let p = l.p.ok_or_else(|| CliError::Input("no prime given (scenario \"p\" or --p)".into()))?;
    scenario::convention(p, &l.sqrt)
}

pub fn decomp(src: &TableSource, o: &Overrides) -> Result<Value> {
    let l = load_table(src, o)?;
    let conv = convention(&l)?;
    pipeline::decomp_json(&l.table, &conv, Some(l.seed))
}

pub fn verdict(src: &TableSource, o: &Overrides) -> Result<Value> {
    let l = load_table(src, o)?;
    let conv = convention(&l)?;
    let v = pipeline::verdict(&l.table, &conv, l.mats.as_deref(), l.seed)?;
    pipeline::verdict_json(&v, &l.table, &conv, Some(l.seed))
}

pub fn candidates(path: &Path, o: &Overrides) -> Result<Value> {
    let f: OrdinaryTableFile = formats::read_json(path)?;
    let p = o.p.or(f.p).ok_or_else(|| CliError::Input("no prime given (table \"p\" or --p)".into()))?;
    let (tbl, cons) = f.to_table()?;
    let rep = candfilter::admissible_candidates(&tbl, &cons, p).map_err(CliError::input)?;
    let names: Vec<String> = cons.iter().map(|c| tbl.characters()[c.chi].name.clone()).collect();
    let equal = candfilter::conjugation_closure(&rep.candidates, None);
    Ok(json!({
        "p": p,
        "constituents": names,
        "box_size": rep.box_size.to_string(),
        "after_vanishing": rep.after_vanishing.to_string(),
        "count": rep.candidates.len(),
        "candidates": rep.candidates.iter().map(|c| c.d.clone()).collect::<Vec<_>>(),
        "equal_coordinates": equal.iter().map(|&(i, j)| json!([names[i], names[j]])).collect::<Vec<_>>(),
        "skipped": rep.skipped.iter().map(|&(c, x)| json!({ "class": tbl.classes()[c].name, "character": tbl.characters()[x].name })).collect::<Vec<_>>(),
    }))
}

/// What the oracle command checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleTarget {
    Scenario(PathBuf),
    /// The named and random corpus, optionally one instance by name.
    Corpus(Option<String>),
}

pub fn oracle(target: &OracleTarget, o: &Overrides) -> Result<Value> {
    let seed = o.seed.unwrap_or(DEFAULT_SEED);
    let instances: Vec<CorpusInstance> = match target {
        OracleTarget::Scenario(path) => {
            let (sc, dir) = load_scenario(path, o)?;
            let Action::Permutation { group, .. } = &sc.action else {
                return Err(CliError::Input("the oracle handles permutation actions only".into()));
            };
            let g = group.load(&dir)?.to_perms()?;
            let Instance::Perm(prep) = pipeline::prepare(&sc, &dir)? else { unreachable!("permutation action") };
            let name = sc.name.clone().unwrap_or_else(|| path.display().to_string());
            vec![CorpusInstance::with_subgroup(name, &g, &prep.ctx.h_gens, prep.ctx.base)?]
        }
        OracleTarget::Corpus(name) => {
            let all = corpus::full(corpus::RANDOM_SEED)?;
            match name {
                None => all,
                Some(n) => {
                    let one: Vec<_> = all.into_iter().filter(|i| &i.name == n).collect();
                    if one.is_empty() {
                        return Err(CliError::Input(format!("no corpus instance named {n:?}")));
                    }
                    one
                }
            }
        }
    };
    let reports = crosscheck::check_corpus(&instances, seed);
    let passed = reports.iter().all(|r| r.passed);
    Ok(json!({ "seed": seed, "passed": passed, "instances": reports }))
}

pub fn corpus_manifest() -> Result<Value> {
    let all = corpus::full(corpus::RANDOM_SEED)?;
    Ok(json!({ "random_seed": corpus::RANDOM_SEED, "instances": all.iter().map(CorpusInstance::manifest).collect::<Vec<_>>() }))
}

pub fn fixtures() -> Result<Value> {
    serde_json::to_value(fixtures::run_suite()?).map_err(CliError::input)
}
