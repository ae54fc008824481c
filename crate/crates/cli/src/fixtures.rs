//! Published J4 tables, transcribed once and checked against each other
//! through exact identities.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use permendo_core::modular::{self, DecompositionMatrix, SimpleInfo, SqrtConvention};
use permendo_core::qmat::IntMatrix;
use permendo_core::schur::{self, SchurContext};
use permendo_core::splitchar::{self, EndoCharTable};
use permendo_core::zpoly::{factor_over_z, PolynomialZ};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::formats::{CharTableFile, IntersectionFile};

pub const ORBITS: &str = include_str!("../fixtures/j4/orbits.json");
pub const INTERSECTION: &str = include_str!("../fixtures/j4/intersection.json");
pub const EIGENSPACES: &str = include_str!("../fixtures/j4/eigenspaces.json");
pub const CHARTAB_C: &str = include_str!("../fixtures/j4/chartab_c.json");
pub const CHARTAB_F: &str = include_str!("../fixtures/j4/chartab_f.json");
pub const DECMAT: &str = include_str!("../fixtures/j4/decmat.json");
pub const TABLE8: &str = include_str!("../fixtures/j4/table8.json");
pub const PERMCHAR: &str = include_str!("../fixtures/j4/permchar.json");

/// `[G:H]` for `H = 2^10:L5(2)` in `J4`.
pub const J4_INDEX: u64 = 8_474_719_242;

#[derive(Debug, Clone, Deserialize)]
pub struct OrbitsFixture {
    pub group_order_h: u64,
    pub index: u64,
    pub helper_order: u64,
    pub orbits: Vec<OrbitFixture>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OrbitFixture {
    pub j: usize,
    pub paired: usize,
    pub length: u64,
    pub stabilizer_order: u64,
    pub stabilizer_shape: String,
    pub saving_factor: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EigenFixture {
    pub rows: Vec<EigenRow>,
}

/// Coefficients are leading-first; a row without `f` shares the `f` above.
#[derive(Debug, Clone, Deserialize)]
pub struct EigenRow {
    pub f: Option<Vec<i64>>,
    pub m_f: Option<usize>,
    pub g: Vec<i64>,
    pub m_g: usize,
    pub d: usize,
    pub splitting: Option<i64>,
    pub chi: String,
    pub m: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReducedFixture {
    pub p: u64,
    pub rows: Vec<ReducedRow>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReducedRow {
    pub phi: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DecmatFixture {
    pub p: u64,
    pub columns: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub cartan: Vec<Vec<u64>>,
    pub constituent_multiplicities: BTreeMap<String, usize>,
    pub rows: Vec<DecmatRow>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DecmatRow {
    pub phi: usize,
    pub entries: Vec<u64>,
}

/// Entries `[c, k]` stand for `c + k·a`.
#[derive(Debug, Clone, Deserialize)]
pub struct Table8Fixture {
    pub columns: Vec<usize>,
    pub rows: Vec<Table8Row>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Table8Row {
    pub chi: u64,
    pub paired: Option<u64>,
    pub entries: Vec<[i64; 2]>,
    /// The published entries where they differ from `entries`.
    pub printed: Option<Vec<[i64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PermcharFixture {
    pub constituents: Vec<PermcharRow>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PermcharRow {
    pub chi: u64,
    pub field: Option<i64>,
    pub m: usize,
}

/// All J4 tables.
pub struct J4 {
    pub orbits: OrbitsFixture,
    pub intersection: IntersectionFile,
    pub eigenspaces: EigenFixture,
    pub chartab: EndoCharTable,
    pub reduced: ReducedFixture,
    pub decmat: DecmatFixture,
    pub table8: Table8Fixture,
    pub permchar: PermcharFixture,
}

fn parse<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("fixture {name}: {e}")))
}

impl J4 {
    pub fn load() -> Result<Self> {
        let ct: CharTableFile = parse("chartab_c", CHARTAB_C)?;
        Ok(J4 {
            orbits: parse("orbits", ORBITS)?,
            intersection: parse("intersection", INTERSECTION)?,
            eigenspaces: parse("eigenspaces", EIGENSPACES)?,
            chartab: ct.to_table()?,
            reduced: parse("chartab_f", CHARTAB_F)?,
            decmat: parse("decmat", DECMAT)?,
            table8: parse("table8", TABLE8)?,
            permchar: parse("permchar", PERMCHAR)?,
        })
    }

    pub fn lengths(&self) -> &[u64] {
        &self.intersection.lengths
    }

    pub fn p2(&self) -> Result<IntMatrix> {
        self.intersection.matrices()?.into_iter().find(|(j, _)| *j == 1).map(|(_, m)| m).ok_or_else(|| CliError::Input("fixture has no P_2".into()))
    }

    /// The pinned mod-11 convention: `√3 ↦ 6`, `√5 ↦ 4`, `√33 ↦ 0`.
    pub fn convention(&self) -> Result<SqrtConvention> {
        SqrtConvention::new(self.decmat.p).and_then(|c| c.with_override(3, 6)).map_err(CliError::input)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: &'static str, name: &'static str, r: std::result::Result<String, String>) -> Self {
        match r {
            Ok(detail) => Check { id, name, passed: true, detail },
            Err(detail) => Check { id, name, passed: false, detail },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

type CheckResult = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_orbits(j4: &J4) -> CheckResult {
    let o = &j4.orbits;
    let sum: u64 = o.orbits.iter().map(|r| r.length).sum();
    ensure(sum == J4_INDEX && o.index == J4_INDEX, || format!("sum of lengths {sum}, recorded index {}", o.index))?;
    for r in &o.orbits {
        ensure(r.length as u128 * r.stabilizer_order as u128 == o.group_order_h as u128, || format!("orbit {}: n_j·|H_j| ≠ |H|", r.j))?;
        let pr = o.orbits.get(r.paired.wrapping_sub(1)).ok_or(format!("orbit {}: bad pairing", r.j))?;
        ensure(pr.paired == r.j && pr.length == r.length, || format!("orbit {}: pairing not an involution on equal lengths", r.j))?;
        ensure(r.saving_factor <= o.helper_order, || format!("orbit {}: saving factor above |K|", r.j))?;
    }
    let lengths: Vec<u64> = o.orbits.iter().map(|r| r.length).collect();
    ensure(lengths == j4.intersection.lengths, || "orbit table and intersection fixture disagree on lengths".into())?;
    let pairing: Vec<usize> = o.orbits.iter().map(|r| r.paired).collect();
    ensure(pairing == j4.intersection.pairing, || "orbit table and intersection fixture disagree on pairing".into())?;
    Ok(format!("{} orbits, sum of lengths {sum}", o.orbits.len()))
}

fn check_p2(j4: &J4) -> CheckResult {
    let sctx = SchurContext::new(j4.lengths().to_vec(), j4.intersection.pairing0().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let p2 = j4.p2().map_err(|e| e.to_string())?;
    schur::check_intersection_matrix(&sctx, 1, &p2).map_err(|e| e.to_string())?;
    Ok(format!("row 1 is e_2 and all {} weighted row sums equal 31·n_i", sctx.rank()))
}

fn check_char_poly(j4: &J4) -> CheckResult {
    let p2 = j4.p2().map_err(|e| e.to_string())?;
    let fac = factor_over_z(&splitchar::char_poly(&p2)).map_err(|e| e.to_string())?;
    ensure(fac.unit == BigInt::from(1), || format!("unit {}", fac.unit))?;
    let got: BTreeSet<(Vec<BigInt>, usize)> = fac.factors.iter().map(|(f, e)| (f.leading_first(), *e)).collect();
    let want: BTreeSet<(Vec<BigInt>, usize)> = j4
        .eigenspaces
        .rows
        .iter()
        .filter_map(|r| Some((PolynomialZ::from_leading(r.f.as_ref()?).leading_first(), r.m_f?)))
        .collect();
    ensure(got.len() == fac.factors.len(), || "repeated factor in the factorization".into())?;
    ensure(got == want, || format!("factorization {got:?} differs from the eigenspace table {want:?}"))?;
    Ok(format!("{} irreducible factors, multiplicities {:?}", got.len(), fac.factors.iter().map(|(_, e)| *e).collect::<Vec<_>>()))
}

fn check_chartab(j4: &J4) -> CheckResult {
    let t = &j4.chartab;
    ensure(t.rows.len() == 18, || format!("{} rows", t.rows.len()))?;
    let pairing = j4.intersection.pairing0().map_err(|e| e.to_string())?;
    let swapped: Vec<(usize, usize)> = pairing.iter().enumerate().filter(|(j, &js)| *j < js).map(|(j, &js)| (j + 1, js + 1)).collect();
    ensure(swapped == [(7, 8), (12, 13), (18, 19)], || format!("non-trivial pairs {swapped:?}"))?;
    let rep = splitchar::verify_table(t, j4.lengths(), &pairing);
    ensure(rep.is_ok(), || format!("{rep:?}"))?;
    let n: u64 = j4.lengths().iter().sum();
    for (i, r) in t.rows.iter().enumerate() {
        let d = splitchar::fitting_degree(r, j4.lengths(), n).map_err(|e| format!("row {}: {e}", i + 1))?;
        ensure(Some(d) == r.degree, || format!("row {}: recomputed degree {d}, printed {:?}", i + 1, r.degree))?;
    }
    for c in &j4.permchar.constituents {
        let label = c.chi.to_string();
        let rows: Vec<&splitchar::CharRow> = t.rows.iter().filter(|r| r.fitting.as_deref().map(|f| f.split('/').any(|x| x == label)).unwrap_or(false)).collect();
        ensure(!rows.is_empty() && rows.iter().all(|r| r.mult == c.m), || format!("chi {}: multiplicity {} not matched by the table", c.chi, c.m))?;
        let field = rows[0].field();
        ensure(c.field.unwrap_or(1) == field, || format!("chi {}: field {:?} but table row lies in sqrt({field})", c.chi, c.field))?;
    }
    Ok(format!("orthogonality, pairing, Galois partners and {} degrees exact; sum of m·chi(1) = {}", t.rows.len(), rep.dimension_sum))
}

fn check_reduction(j4: &J4) -> CheckResult {
    let conv = j4.convention().map_err(|e| e.to_string())?;
    ensure(conv.resolve(33).ok() == Some(0), || "sqrt(33) not ramified".into())?;
    let red = modular::reduce_table(&j4.chartab, &conv).map_err(|e| e.to_string())?;
    for row in &j4.reduced.rows {
        let mine = &red.get(row.phi - 1).ok_or(format!("no row phi{}", row.phi))?.values;
        ensure(*mine == row.values, || format!("phi{}: reduced {mine:?}, table {:?}", row.phi, row.values))?;
    }
    Ok(format!("rows {:?} agree in all 27 columns", j4.reduced.rows.iter().map(|r| r.phi).collect::<Vec<_>>()))
}

fn j4_decomposition(j4: &J4) -> std::result::Result<DecompositionMatrix, String> {
    let conv = j4.convention().map_err(|e| e.to_string())?;
    let red = modular::reduce_table(&j4.chartab, &conv).map_err(|e| e.to_string())?;
    let basic = modular::basic_set(&red, conv.p());
    modular::decomposition_matrix(&j4.chartab, &red, &basic, conv.p()).map_err(|e| e.to_string())
}

/// Position of each fixture column among the computed columns.
fn column_map(d: &DecompositionMatrix, fixture_cols: &[usize]) -> std::result::Result<Vec<usize>, String> {
    fixture_cols.iter().map(|&phi| d.columns.iter().position(|&c| c + 1 == phi).ok_or(format!("phi{phi} is not a basic-set column"))).collect()
}

fn check_decomposition(j4: &J4) -> CheckResult {
    let d = j4_decomposition(j4)?;
    let fx = &j4.decmat;
    ensure(d.ncols() == fx.columns.len(), || format!("{} columns, table has {}", d.ncols(), fx.columns.len()))?;
    let map = column_map(&d, &fx.columns)?;
    ensure(fx.rows.len() == d.nrows(), || "row count".into())?;
    for row in &fx.rows {
        let mine: Vec<u64> = map.iter().map(|&c| d.entries[row.phi - 1][c]).collect();
        ensure(mine == row.entries, || format!("phi{}: computed {mine:?}, table {:?}", row.phi, row.entries))?;
    }
    let got: BTreeSet<BTreeSet<usize>> = d.blocks().iter().map(|b| b.rows.iter().map(|r| r + 1).collect()).collect();
    let want: BTreeSet<BTreeSet<usize>> = fx.blocks.iter().map(|b| b.iter().copied().collect()).collect();
    ensure(got == want, || format!("blocks {got:?}, table {want:?}"))?;
    let c = modular::cartan_from_decomposition(&d);
    let permuted: Vec<Vec<u64>> = map.iter().map(|&a| map.iter().map(|&b| c[a][b]).collect()).collect();
    let blockdiag = vec![vec![7, 3, 0, 0], vec![3, 5, 0, 0], vec![0, 0, 6, 0], vec![0, 0, 0, 3]];
    ensure(permuted == fx.cartan && permuted == blockdiag, || format!("D^T D = {permuted:?}"))?;
    Ok(format!("18x4 matrix, {} blocks, D^T D = blockdiag([[7,3],[3,5]], [6], [3])", got.len()))
}

fn check_projective_columns(j4: &J4) -> CheckResult {
    let d = j4_decomposition(j4)?;
    let cols = modular::projective_columns(&d, &j4.chartab);
    let t8 = &j4.table8;
    let map = column_map(&d, &t8.columns)?;
    let mut corrected = Vec::new();
    for row in &t8.rows {
        let label = row.chi.to_string();
        for (q, &c) in map.iter().enumerate() {
            let coef = cols.columns[c].coefficient(&label);
            let k = coef.vars.get(&0).copied().unwrap_or(0);
            ensure(coef.vars.keys().all(|&v| v == 0), || format!("chi {label}: unexpected variables"))?;
            let [want_c, want_k] = row.entries[q];
            ensure(coef.constant == want_c && k == want_k, || format!("chi {label}, column phi{}: computed {coef}, table {want_c}+{want_k}a", t8.columns[q]))?;
        }
        if row.printed.is_some() {
            corrected.push(row.chi);
        }
    }
    let labels: BTreeSet<String> = cols.columns.iter().flat_map(|c| c.terms.iter().map(|(l, _)| l.clone())).collect();
    let known: BTreeSet<String> = t8.rows.iter().map(|r| r.chi.to_string()).collect();
    ensure(labels.is_subset(&known), || format!("labels {labels:?} not all in the table"))?;
    ensure(cols.ambiguities == [("38".to_string(), "39".to_string())], || format!("ambiguities {:?}", cols.ambiguities))?;
    Ok(format!("{} rows x 4 columns, a/1-a shared by chi38/chi39; corrected published rows: {corrected:?}", t8.rows.len()))
}

fn check_projective_dims(j4: &J4) -> CheckResult {
    let d = j4_decomposition(j4)?;
    let fx = &j4.decmat;
    let map = column_map(&d, &fx.columns)?;
    let dims = d.projective_dims();
    let ordered: Vec<u64> = map.iter().map(|&c| dims[c]).collect();
    ensure(ordered == [10, 8, 6, 3], || format!("dim P = {ordered:?}"))?;
    let simples: Vec<SimpleInfo> = fx.constituent_multiplicities.iter().map(|(l, &m)| SimpleInfo { label: l.clone(), dim: Some(1), multiplicity: m }).collect();
    let corr = modular::correspond_projectives(&d, &simples).map_err(|e| e.to_string())?;
    let m = corr.matching().ok_or(format!("ambiguous correspondence {:?}", corr.candidates))?;
    let labels: Vec<&str> = map.iter().map(|&c| simples[m[c]].label.as_str()).collect();
    Ok(format!("dim P = {ordered:?}, matched to {labels:?}"))
}

/// Runs every identity check on the J4 tables.
pub fn run_suite() -> Result<SuiteReport> {
    let j4 = J4::load()?;
    let checks = vec![
        Check::new("a", "orbit lengths sum to [G:H]", check_orbits(&j4)),
        Check::new("b", "P_2 first row and weighted row sums", check_p2(&j4)),
        Check::new("c", "char poly of P_2 matches the eigenspace table", check_char_poly(&j4)),
        Check::new("d", "character table of E_C: orthogonality, pairing, degrees", check_chartab(&j4)),
        Check::new("e", "mod-11 reduction matches the E_F table", check_reduction(&j4)),
        Check::new("f", "decomposition matrix, blocks and Cartan matrix", check_decomposition(&j4)),
        Check::new("g", "projective characters with the a/1-a ambiguity", check_projective_columns(&j4)),
        Check::new("h", "projective dimensions match constituent multiplicities", check_projective_dims(&j4)),
    ];
    Ok(SuiteReport { passed: checks.iter().all(|c| c.passed), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let j4 = J4::load().unwrap();
        assert_eq!(j4.lengths().len(), 27);
        assert_eq!(j4.chartab.rows.len(), 18);
        assert_eq!(j4.orbits.orbits[26].saving_factor, 152);
    }

    #[test]
    fn a_corrupted_p2_entry_is_caught() {
        // "3." in the printed table is 30; reading it as 3 breaks a row sum
        let j4 = J4::load().unwrap();
        let sctx = SchurContext::new(j4.lengths().to_vec(), j4.intersection.pairing0().unwrap()).unwrap();
        let mut p2 = j4.p2().unwrap();
        assert_eq!(*p2.get(2, 1), BigInt::from(30));
        p2.set(2, 1, BigInt::from(3));
        assert!(schur::check_intersection_matrix(&sctx, 1, &p2).is_err());
    }

    #[test]
    fn wrong_sqrt3_breaks_the_reduction() {
        let j4 = J4::load().unwrap();
        let conv = SqrtConvention::new(11).unwrap();
        let red = modular::reduce_table(&j4.chartab, &conv).unwrap();
        let phi9 = j4.reduced.rows.iter().find(|r| r.phi == 9).unwrap();
        assert_ne!(red[8].values, phi9.values);
    }

    #[test]
    fn suite_passes() {
        let r = run_suite().unwrap();
        for c in &r.checks {
            assert!(c.passed, "{} {}: {}", c.id, c.name, c.detail);
        }
    }
}
