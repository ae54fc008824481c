//! Orchestration of orbit enumeration, intersection matrices, character
//! splitting and reduction mod `p`, with JSON reports.

use std::path::Path;

use num_bigint::BigUint;
use permendo_core::gfmat::{FqMatrix, FqVec};
use permendo_core::modular::{self, SqrtConvention, Verdict};
use permendo_core::orbenum::{
    self, canonical_order, classify_partial, disjoint, find_orbit, probe_fixed_space, ActionContext, EnumConfig, FixedPoints, Helper,
    IdentityQuotient, LinearQuotient, OrbitError, OrbitPartition, Point, Quotient,
};
use permendo_core::perm::{evaluate_word, Acts, GroupElem};
use permendo_core::qmat::IntMatrix;
use permendo_core::schur::{self, SchurContext, SchurError, Source as MatrixSource};
use permendo_core::splitchar::{self, EndoCharTable, TableReport};
use permendo_core::{Perm, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::formats::{self, CharTableFile, IntersectionFile};
use crate::scenario::{Action, ScenarioConfig, DEFAULT_CUTOFF};

/// JSON form of a point: 1-indexed for permutation domains, coordinates for vectors.
pub trait PointJson {
    fn to_json(&self) -> Value;
}

impl PointJson for u32 {
    fn to_json(&self) -> Value {
        json!(self + 1)
    }
}

impl PointJson for FqVec {
    fn to_json(&self) -> Value {
        json!(self.entries())
    }
}

/// A scenario resolved into an action context and helper.
pub struct Prepared<P, T, M: Quotient<P>, U> {
    pub ctx: ActionContext<P, T>,
    pub helper: Helper<P, T, M, U>,
    pub cfg: EnumConfig,
    pub cutoff: u64,
    pub probes: Vec<(Vec<T>, u64, usize)>,
}

pub type PermPrepared = Prepared<u32, Perm, IdentityQuotient, Perm>;
pub type LinearPrepared = Prepared<FqVec, FqMatrix, LinearQuotient, FqMatrix>;

pub enum Instance {
    Perm(Box<PermPrepared>),
    Linear(Box<LinearPrepared>),
}

fn eval_words<T: GroupElem>(words: &[Word], gens: &[T]) -> Result<Vec<T>> {
    words.iter().map(|w| evaluate_word(w, gens).map_err(CliError::input)).collect()
}

pub fn orbit_error(e: OrbitError) -> CliError {
    match e {
        OrbitError::ProbeBudget { residual, partition } => CliError::Budget {
            message: format!("{residual} points of O not reached"),
            report: json!({ "residual": residual, "lengths": partition.lengths, "probes": partition.probes }),
        },
        OrbitError::MemoryBudget { budget, covered } => CliError::Budget {
            message: format!("memory budget of {budget} stored points exceeded"),
            report: json!({ "stored_point_budget": budget, "covered": covered }),
        },
        OrbitError::Duplicate(_) | OrbitError::Inconsistent(_) => CliError::invariant(e),
        _ => CliError::input(e),
    }
}

fn schur_error(e: SchurError) -> CliError {
    match e {
        SchurError::TooLong { .. } | SchurError::PartialCounts { .. } => CliError::Budget { message: e.to_string(), report: json!({ "stage": "intersect" }) },
        SchurError::Shape(_) => CliError::input(e),
        _ => CliError::invariant(e),
    }
}

/// Builds the action context for a scenario.
pub fn prepare(sc: &ScenarioConfig, dir: &Path) -> Result<Instance> {
    let faithful = sc.faithful.as_ref().map(|f| f.load(dir)?.to_perms()).transpose()?;
    let h_order = sc.h_order()?;
    match &sc.action {
        Action::Permutation { group, base } => {
            let g = group.load(dir)?.to_perms()?;
            let hw = sc.h_words.iter().map(|w| formats::word_from_spec(w, g.len())).collect::<Result<Vec<_>>>()?;
            let h = eval_words(&hw, &g)?;
            let degree = g[0].degree();
            let base = match base {
                Some(b) if *b == 0 || *b as usize > degree => return Err(CliError::Input(format!("base point {b} outside 1..={degree}"))),
                Some(b) => b - 1,
                None => (0..degree as u32).find(|&x| h.iter().all(|p| p.image(x) == x)).ok_or_else(|| CliError::Input("H fixes no point".into()))?,
            };
            let index = permendo_core::permgrp::orbit(&g, degree, base).len() as u64;
            let faithful = faithful.or_else(|| Some(h.clone()));
            let ctx = ActionContext::new(g, h, base, faithful, h_order, index, 32).map_err(orbit_error)?;
            let kw = sc.k_words.iter().map(|w| formats::word_from_spec(w, ctx.h_gens.len())).collect::<Result<Vec<_>>>()?;
            let kq = eval_words(&kw, &ctx.h_gens)?;
            let helper = Helper::new::<u32>(&ctx, kw, kq, IdentityQuotient, &[]).map_err(orbit_error)?;
            let probes = fixed_probes(sc, &ctx.h_gens)?;
            Ok(Instance::Perm(Box::new(Prepared { cfg: sc.enum_config(4), cutoff: sc.cutoff(), ctx, helper, probes })))
        }
        Action::Linear { group, base, index, quotient } => {
            let gf = group.load(dir)?;
            let g = gf.to_matrices()?;
            if g.is_empty() {
                return Err(CliError::Input("group has no generators".into()));
            }
            let p = formats::prime_u8(gf.p)?;
            if base.len() != gf.dim {
                return Err(CliError::Input(format!("base has {} entries, dimension is {}", base.len(), gf.dim)));
            }
            let base = formats::fq_vector(p, base);
            let hw = sc.h_words.iter().map(|w| formats::word_from_spec(w, g.len())).collect::<Result<Vec<_>>>()?;
            let h = eval_words(&hw, &g)?;
            let bits = gf.dim as u64 * (64 - (gf.p - 1).leading_zeros() as u64);
            let ctx = ActionContext::new(g, h, base, faithful, h_order, *index, bits).map_err(orbit_error)?;
            let kw = sc.k_words.iter().map(|w| formats::word_from_spec(w, ctx.h_gens.len())).collect::<Result<Vec<_>>>()?;
            let (map, kq) = match quotient {
                Some(q) => {
                    let cols = q.matrix.first().map(|r| r.len()).unwrap_or(0);
                    let m = formats::fq_matrix(p, gf.dim, cols, &q.matrix)?;
                    let kq = q.k_on_q.iter().map(|k| formats::fq_matrix(p, cols, cols, k)).collect::<Result<Vec<_>>>()?;
                    (LinearQuotient(m), kq)
                }
                None => (LinearQuotient(FqMatrix::identity(p, gf.dim)), eval_words(&kw, &ctx.h_gens)?),
            };
            let helper = Helper::new::<FqVec>(&ctx, kw, kq, map, &[]).map_err(orbit_error)?;
            let probes = fixed_probes(sc, &ctx.h_gens)?;
            Ok(Instance::Linear(Box::new(Prepared { cfg: sc.enum_config(bits.div_ceil(8)), cutoff: sc.cutoff(), ctx, helper, probes })))
        }
    }
}

/// A permutation action given directly; `K` is generated by the first `k` generators of `H`.
pub fn prepare_perm(g: Vec<Perm>, h: Vec<Perm>, base: u32, h_order: BigUint, k: usize, cfg: EnumConfig) -> Result<PermPrepared> {
    let degree = g.first().map(Perm::degree).ok_or_else(|| CliError::Input("no generators".into()))?;
    let index = permendo_core::permgrp::orbit(&g, degree, base).len() as u64;
    let faithful = Some(h.clone());
    let ctx = ActionContext::new(g, h, base, faithful, Some(h_order), index, 32).map_err(orbit_error)?;
    let kw: Vec<Word> = (0..k.min(ctx.h_gens.len())).map(Word::gen).collect();
    let kq = eval_words(&kw, &ctx.h_gens)?;
    let helper = Helper::new::<u32>(&ctx, kw, kq, IdentityQuotient, &[]).map_err(orbit_error)?;
    Ok(Prepared { ctx, helper, cfg, cutoff: DEFAULT_CUTOFF, probes: Vec::new() })
}

fn fixed_probes<T: GroupElem>(sc: &ScenarioConfig, h: &[T]) -> Result<Vec<(Vec<T>, u64, usize)>> {
    sc.fixed_probes
        .iter()
        .map(|f| {
            let ws = f.words.iter().map(|w| formats::word_from_spec(w, h.len())).collect::<Result<Vec<_>>>()?;
            Ok((eval_words(&ws, h)?, f.length, f.tries))
        })
        .collect()
}

/// Random classification, then fixed-space probes for orbits it missed.
pub fn orbits<P, T, M, U>(prep: &mut Prepared<P, T, M, U>) -> Result<OrbitPartition<P, T>>
where
    P: Point + PointJson,
    T: GroupElem + Acts<P> + FixedPoints<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let (ctx, helper, cfg) = (&prep.ctx, &mut prep.helper, &prep.cfg);
    let mut part = classify_partial(ctx, helper, cfg).map_err(orbit_error)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    for (s_gens, length, tries) in &prep.probes {
        while part.total < ctx.index {
            let Some((probe, mut rec)) = probe_fixed_space(ctx, helper, &part, s_gens, *length, *tries, cfg, &mut rng).map_err(orbit_error)? else {
                break;
            };
            let inv = probe.element.inv();
            let y = inv.act(&ctx.base);
            part.total += rec.length;
            let j = part.records.len();
            rec.index = j;
            part.records.push(rec);
            let pair = find_orbit(ctx, helper, &part.records, &y, cfg, &mut rng).unwrap_or(j);
            part.records[j].paired = Some(pair);
            part.records[pair].paired = Some(j);
            canonical_order(&mut part.records);
        }
    }
    if part.total != ctx.index {
        return Err(CliError::Budget {
            message: format!("{} of {} points of O reached", part.total, ctx.index),
            report: partition_json(&part, prep.helper.k_order(), cfg.seed),
        });
    }
    if !disjoint(&part.records) {
        return Err(CliError::Invariant("two orbit records share a stored point".into()));
    }
    for r in &part.records {
        if BigUint::from(r.length) * &r.stab_order != ctx.h_order {
            return Err(CliError::Invariant(format!("orbit {}: n_j·|H_j| differs from |H|", r.index + 1)));
        }
        if r.paired.is_none() {
            return Err(CliError::Invariant(format!("orbit {} has no paired orbit", r.index + 1)));
        }
    }
    Ok(part)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitJson {
    pub j: usize,
    pub length: u64,
    pub stabilizer_order: String,
    pub paired: Option<usize>,
    pub certified: bool,
    pub complete: bool,
    pub stored: usize,
    pub covered: u64,
    pub saving_factor: String,
    pub representative: Value,
}

pub fn partition_json<P: Point + PointJson, T>(part: &OrbitPartition<P, T>, k_order: Option<&BigUint>, seed: u64) -> Value {
    let orbits: Vec<OrbitJson> = part
        .records
        .iter()
        .map(|r| OrbitJson {
            j: r.index + 1,
            length: r.length,
            stabilizer_order: r.stab_order.to_string(),
            paired: r.paired.map(|p| p + 1),
            certified: r.certified,
            complete: r.complete,
            stored: r.stored(),
            covered: r.covered,
            saving_factor: formats::rational_string(&r.saving_factor()),
            representative: r.rep.to_json(),
        })
        .collect();
    json!({
        "seed": seed,
        "index": part.target,
        "total": part.total,
        "probes": part.probes,
        "rank": part.rank(),
        "k_order": k_order.map(|k| k.to_string()),
        "orbits": orbits,
    })
}

/// All intersection matrices with how each was obtained.
pub struct Matrices {
    pub sctx: SchurContext,
    pub mats: Vec<IntMatrix>,
    pub sources: Vec<MatrixSource>,
}

pub fn intersect<P, T, M, U>(prep: &mut Prepared<P, T, M, U>, part: &OrbitPartition<P, T>) -> Result<Matrices>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let (sctx, mats, sources) = schur::all_intersection_matrices(&prep.ctx, &mut prep.helper, part, &prep.cfg, prep.cutoff).map_err(schur_error)?;
    Ok(Matrices { sctx, mats, sources })
}

/// `js` are 1-based; empty selects all.
pub fn matrices_json(m: &Matrices, js: &[usize]) -> Result<Value> {
    let r = m.mats.len();
    let sel: Vec<usize> = if js.is_empty() { (0..r).collect() } else { js.iter().map(|&j| if j == 0 || j > r { Err(CliError::Input(format!("matrix index {j} outside 1..={r}"))) } else { Ok(j - 1) }).collect::<Result<_>>()? };
    let pairs: Vec<(usize, &IntMatrix)> = sel.iter().map(|&j| (j, &m.mats[j])).collect();
    let file = IntersectionFile::from_matrices(&m.sctx.lengths, &m.sctx.pairing, &pairs)?;
    let sources: serde_json::Map<String, Value> = sel
        .iter()
        .map(|&j| ((j + 1).to_string(), json!(match m.sources[j] { MatrixSource::Counted => "counted", MatrixSource::Recovered => "recovered" })))
        .collect();
    let mut v = serde_json::to_value(file).map_err(CliError::input)?;
    v["sources"] = Value::Object(sources);
    Ok(v)
}

/// Character table from all intersection matrices, checked before it is returned.
pub fn chartab(mats: &[IntMatrix], lengths: &[u64], pairing: &[usize]) -> Result<(EndoCharTable, TableReport)> {
    let table = splitchar::character_table(mats, lengths).map_err(|e| match e {
        splitchar::SplitError::UnsupportedShape { .. } => CliError::input(e),
        _ => CliError::invariant(e),
    })?;
    let report = splitchar::verify_table(&table, lengths, pairing);
    if !report.is_ok() {
        return Err(CliError::Invariant(format!("character table fails verification: {report:?}")));
    }
    Ok((table, report))
}

pub fn chartab_json(table: &EndoCharTable, report: &TableReport) -> Result<Value> {
    let mut v = serde_json::to_value(CharTableFile::from_table(table)?).map_err(CliError::input)?;
    v["verification"] = json!({
        "orthogonality": report.orthogonality.is_empty(),
        "pairing": report.pairing.is_empty(),
        "galois": report.galois.is_empty(),
        "degrees": report.degrees.is_empty(),
        "dimension_sum": report.dimension_sum.to_string(),
        "expected_dimension": report.expected_dimension,
    });
    Ok(v)
}

pub fn modular_error(e: modular::ModularError) -> CliError {
    match e {
        modular::ModularError::NotPrime(_) | modular::ModularError::Inert { .. } | modular::ModularError::BadOverride { .. } => CliError::input(e),
        _ => CliError::invariant(e),
    }
}

pub fn meta(seed: Option<u64>, conv: &SqrtConvention, table: &EndoCharTable) -> Result<Value> {
    let fields: Vec<i64> = table.rows.iter().map(|r| r.field()).collect();
    let choices = conv.choices(&fields).map_err(modular_error)?;
    Ok(json!({ "seed": seed, "p": conv.p(), "sqrt": choices.iter().map(|(n, s)| json!([n, s])).collect::<Vec<_>>() }))
}

/// Reduced table, basic set, decomposition matrix, Cartan matrix and blocks.
pub fn decomp_json(table: &EndoCharTable, conv: &SqrtConvention, seed: Option<u64>) -> Result<Value> {
    let p = conv.p();
    let reduced = modular::reduce_table(table, conv).map_err(modular_error)?;
    let basic = modular::basic_set(&reduced, p);
    let d = modular::decomposition_matrix(table, &reduced, &basic, p).map_err(modular_error)?;
    let cartan = modular::cartan_from_decomposition(&d);
    Ok(json!({
        "meta": meta(seed, conv, table)?,
        "reduced": reduced.iter().map(|r| &r.values).collect::<Vec<_>>(),
        "basic_set": basic.iter().map(|b| b + 1).collect::<Vec<_>>(),
        "decomposition": decomposition_json(&d),
        "cartan": cartan,
        "blocks": blocks_json(&d),
    }))
}

fn decomposition_json(d: &modular::DecompositionMatrix) -> Value {
    json!({ "columns": d.columns.iter().map(|c| c + 1).collect::<Vec<_>>(), "rows": d.entries, "projective_dims": d.projective_dims() })
}

fn blocks_json(d: &modular::DecompositionMatrix) -> Value {
    json!(d
        .blocks()
        .iter()
        .map(|b| json!({ "rows": b.rows.iter().map(|r| r + 1).collect::<Vec<_>>(), "columns": b.columns.iter().map(|c| d.columns[*c] + 1).collect::<Vec<_>>() }))
        .collect::<Vec<_>>())
}

/// Verdict, with the regular-module Cartan route when all matrices are known.
pub fn verdict(table: &EndoCharTable, conv: &SqrtConvention, mats: Option<&[IntMatrix]>, seed: u64) -> Result<Verdict> {
    let regular = match mats {
        Some(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Some(modular::cartan_from_regular(m, conv.p(), &mut rng).map_err(modular_error)?)
        }
        None => None,
    };
    modular::permutation_verdict(table, conv, None, regular).map_err(modular_error)
}

pub fn verdict_json(v: &Verdict, table: &EndoCharTable, conv: &SqrtConvention, seed: Option<u64>) -> Result<Value> {
    let columns: Vec<Value> = v
        .columns
        .columns
        .iter()
        .map(|c| {
            let terms: serde_json::Map<String, Value> = c.terms.iter().map(|(l, k)| (l.clone(), json!({ "coefficient": k.to_string(), "exact": k.is_exact() }))).collect();
            json!({ "column": c.column + 1, "terms": Value::Object(terms) })
        })
        .collect();
    Ok(json!({
        "meta": meta(seed, conv, table)?,
        "decomposition": decomposition_json(&v.decomposition),
        "blocks": blocks_json(&v.decomposition),
        "cartan": v.cartan,
        "regular_cartan": v.regular.as_ref().map(|r| json!({ "matrix": r.matrix, "simple_dims": r.simple_dims, "projective_dims": r.projective_dims })),
        "correspondence": v.correspondence.as_ref().map(|c| json!({
            "candidates": c.candidates,
            "column_dims": c.column_dims,
            "ambiguous_columns": c.ambiguous_columns().iter().map(|x| x + 1).collect::<Vec<_>>(),
        })),
        "projective_columns": columns,
        "ambiguities": v.columns.ambiguities.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "local": v.local,
        "indecomposable": v.local,
        "answer": v.answer.to_string(),
        "summary": if v.local { "indecomposable / local" } else { "decomposable / not local" },
    }))
}

/// Runs the scenario up to the intersection matrices.
pub fn run_to_matrices(inst: &mut Instance) -> Result<(Value, Matrices)> {
    match inst {
        Instance::Perm(p) => run_generic(p),
        Instance::Linear(p) => run_generic(p),
    }
}

fn run_generic<P, T, M, U>(prep: &mut Prepared<P, T, M, U>) -> Result<(Value, Matrices)>
where
    P: Point + PointJson,
    T: GroupElem + Acts<P> + FixedPoints<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let part = orbits(prep)?;
    let pj = partition_json(&part, prep.helper.k_order(), prep.cfg.seed);
    let m = intersect(prep, &part)?;
    Ok((pj, m))
}

/// Orbit partition report only.
pub fn run_orbits(inst: &mut Instance) -> Result<Value> {
    fn go<P, T, M, U>(prep: &mut Prepared<P, T, M, U>) -> Result<Value>
    where
        P: Point + PointJson,
        T: GroupElem + Acts<P> + FixedPoints<P>,
        M: Quotient<P>,
        U: GroupElem + Acts<M::Q>,
    {
        let part = orbits(prep)?;
        let mut v = partition_json(&part, prep.helper.k_order(), prep.cfg.seed);
        v["memory_estimate_bytes"] = json!(prep.ctx.memory_estimate().to_string());
        Ok(v)
    }
    match inst {
        Instance::Perm(p) => go(p),
        Instance::Linear(p) => go(p),
    }
}

pub use orbenum::PartitionSummary;
