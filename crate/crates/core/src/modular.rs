//! Reduction of the character table of `E` modulo a prime: basic sets,
//! decomposition matrix, Cartan matrix, blocks and the locality verdict.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::fp::{inv_mod, is_prime, mul_mod, reduce_i64, sqrt_mod};
use crate::gfmat::{self, CartanData, FqMatrix, GfError};
use crate::qmat::IntMatrix;
use crate::quadratic::QuadError;
use crate::splitchar::{CharRow, EndoCharTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("sqrt({n}) is not in F_{p}; the residue field would have to be enlarged")]
    Inert { n: i64, p: u64 },
    #[error("override {s} is not a square root of {n} mod {p}")]
    BadOverride { n: i64, s: u64, p: u64 },
    #[error("row {row}: {source}")]
    Value { row: usize, source: QuadError },
    #[error("row {row}: value at A_1 is {value}, expected multiplicity {mult} mod p")]
    Multiplicity { row: usize, value: u64, mult: usize },
    #[error("row {row} is not in the span of the basic set")]
    NotInSpan { row: usize },
    #[error("row {row}: lifted coefficients fail validation ({reason})")]
    Lift { row: usize, reason: String },
    #[error("basic-set rows are linearly dependent")]
    DependentBasicSet,
    #[error("the two Cartan matrices disagree")]
    CartanMismatch,
    #[error("{columns} columns but {simples} simple modules")]
    SimpleCount { columns: usize, simples: usize },
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// Choice of `√n ∈ F_p` for each quadratic field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtConvention {
    p: u64,
    overrides: BTreeMap<i64, u64>,
}

impl SqrtConvention {
    pub fn new(p: u64) -> Result<Self, ModularError> {
        if !is_prime(p) {
            return Err(ModularError::NotPrime(p));
        }
        Ok(SqrtConvention { p, overrides: BTreeMap::new() })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn with_override(mut self, n: i64, s: u64) -> Result<Self, ModularError> {
        let s = s % self.p;
        if mul_mod(s, s, self.p) != reduce_i64(n, self.p) {
            return Err(ModularError::BadOverride { n, s, p: self.p });
        }
        self.overrides.insert(n, s);
        Ok(self)
    }

    pub fn overrides(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.overrides.iter().map(|(&n, &s)| (n, s))
    }

    /// Image of `√n`: an override, `0` when `p | n`, else the root in `1..=(p-1)/2`.
    /// Quadratic fields are not reduced at `p = 2`.
    pub fn resolve(&self, n: i64) -> Result<u64, ModularError> {
        if let Some(&s) = self.overrides.get(&n) {
            return Ok(s);
        }
        if self.p == 2 {
            return Err(ModularError::Inert { n, p: 2 });
        }
        let a = reduce_i64(n, self.p);
        if a == 0 {
            return Ok(0);
        }
        let s = sqrt_mod(a, self.p).ok_or(ModularError::Inert { n, p: self.p })?;
        Ok(s.min(self.p - s))
    }

    pub fn is_ramified(&self, n: i64) -> bool {
        reduce_i64(n, self.p) == 0
    }

    /// The resolved choices for the given fields, in increasing order of `n`.
    pub fn choices(&self, fields: &[i64]) -> Result<Vec<(i64, u64)>, ModularError> {
        let mut fs: Vec<i64> = fields.iter().copied().filter(|&n| n != 1 && n != 0).collect();
        fs.sort_unstable();
        fs.dedup();
        fs.into_iter().map(|n| self.resolve(n).map(|s| (n, s))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCharacter {
    pub values: Vec<u64>,
    pub origin: usize,
}

pub fn reduce_table(table: &EndoCharTable, conv: &SqrtConvention) -> Result<Vec<ReducedCharacter>, ModularError> {
    let p = conv.p;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let s = if r.is_rational() { 0 } else { conv.resolve(r.field())? };
            let values = r
                .values
                .iter()
                .map(|v| v.reduce_mod(p, s).map_err(|source| ModularError::Value { row, source }))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(&v0) = values.first() {
                if v0 != r.mult as u64 % p {
                    return Err(ModularError::Multiplicity { row, value: v0, mult: r.mult });
                }
            }
            Ok(ReducedCharacter { values, origin: row })
        })
        .collect()
}

/// Echelon basis over `F_p` that remembers how each row was combined.
struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
    members: usize,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Echelon { p, rows: Vec::new(), members: 0 }
    }

    /// Reduces `v`; returns the residual and the coefficients `c` with `v - residual = Σ c_k member_k`.
    fn reduce(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let p = self.p;
        let mut v = v.to_vec();
        let mut coef = vec![0u64; self.members];
        for (piv, row, comb) in &self.rows {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + p - mul_mod(c, *y, p)) % p;
            }
            for (x, y) in coef.iter_mut().zip(comb) {
                *x = (*x + mul_mod(c, *y, p)) % p;
            }
        }
        (v, coef)
    }

    fn insert(&mut self, v: &[u64]) -> bool {
        let p = self.p;
        let (res, coef) = self.reduce(v);
        let Some(piv) = res.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(res[piv], p).unwrap_or(0);
        let row: Vec<u64> = res.iter().map(|&x| mul_mod(x, inv, p)).collect();
        // new member = res + Σ coef_k member_k, so res = member_new - Σ coef_k member_k
        let mut comb: Vec<u64> = coef.iter().map(|&c| mul_mod((p - c) % p, inv, p)).collect();
        comb.push(inv);
        for (_, _, old) in self.rows.iter_mut() {
            old.push(0);
        }
        self.members += 1;
        self.rows.push((piv, row, comb));
        true
    }
}

/// Greedy maximal independent subset of the rows, scanned in order.
pub fn basic_set(rows: &[ReducedCharacter], p: u64) -> Vec<usize> {
    let mut ech = Echelon::new(p);
    (0..rows.len()).filter(|&i| ech.insert(&rows[i].values)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
}

/// Rows are ordinary characters, columns are basic-set members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionMatrix {
    pub p: u64,
    /// Table row of each basic-set member.
    pub columns: Vec<usize>,
    pub entries: Vec<Vec<u64>>,
    pub mults: Vec<usize>,
}

impl DecompositionMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    /// Components of the graph joining columns that share a nonzero row.
    pub fn blocks(&self) -> Vec<Block> {
        let t = self.ncols();
        let mut parent: Vec<usize> = (0..t).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for row in &self.entries {
            let mut first = None;
            for (c, &e) in row.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match first {
                    None => first = Some(c),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, c));
                        parent[a] = b;
                    }
                }
            }
        }
        let mut by_root: BTreeMap<usize, Block> = BTreeMap::new();
        for c in 0..t {
            let r = find(&mut parent, c);
            by_root.entry(r).or_insert_with(|| Block { rows: Vec::new(), columns: Vec::new() }).columns.push(c);
        }
        for (j, row) in self.entries.iter().enumerate() {
            if let Some(c) = row.iter().position(|&e| e != 0) {
                let r = find(&mut parent, c);
                if let Some(b) = by_root.get_mut(&r) {
                    b.rows.push(j);
                }
            }
        }
        let mut blocks: Vec<Block> = by_root.into_values().collect();
        blocks.sort_by_key(|b| b.rows.first().copied().unwrap_or(usize::MAX));
        blocks
    }

    /// `Σ_j D[j][c]·m_j`, the dimension of the projective indecomposable of column `c`.
    pub fn projective_dims(&self) -> Vec<u64> {
        (0..self.ncols())
            .map(|c| self.entries.iter().zip(&self.mults).map(|(r, &m)| r[c] * m as u64).sum())
            .collect()
    }
}

/// Solves each reduced row in the basic rows mod `p` and lifts the
/// coefficients to `0..p`. Columns are ordered by ascending Fitting degree
/// when all degrees are known.
pub fn decomposition_matrix(
    table: &EndoCharTable,
    reduced: &[ReducedCharacter],
    basic: &[usize],
    p: u64,
) -> Result<DecompositionMatrix, ModularError> {
    let mut columns = basic.to_vec();
    if columns.iter().all(|&c| table.rows[c].degree.is_some()) {
        columns.sort_by_key(|&c| table.rows[c].degree);
    }
    let mut ech = Echelon::new(p);
    for &c in &columns {
        if !ech.insert(&reduced[c].values) {
            return Err(ModularError::DependentBasicSet);
        }
    }
    let mults: Vec<usize> = table.rows.iter().map(|r| r.mult).collect();
    let mut entries = Vec::with_capacity(reduced.len());
    for (row, rc) in reduced.iter().enumerate() {
        let (res, coef) = ech.reduce(&rc.values);
        if res.iter().any(|&x| x != 0) {
            return Err(ModularError::NotInSpan { row });
        }
        let bound = (mults[row] as u64).min(p - 1);
        if let Some((k, &e)) = coef.iter().enumerate().find(|(_, &e)| e > bound) {
            return Err(ModularError::Lift { row, reason: format!("entry {e} in column {k} exceeds {bound}") });
        }
        let dim: u64 = coef.iter().zip(&columns).map(|(&e, &c)| e * mults[c] as u64).sum();
        if dim != mults[row] as u64 {
            return Err(ModularError::Lift { row, reason: format!("dimension {dim} differs from multiplicity {}", mults[row]) });
        }
        entries.push(coef);
    }
    Ok(DecompositionMatrix { p, columns, entries, mults })
}

/// `DᵀD`.
pub fn cartan_from_decomposition(d: &DecompositionMatrix) -> Vec<Vec<u64>> {
    let t = d.ncols();
    let mut c = vec![vec![0u64; t]; t];
    for row in &d.entries {
        for a in 0..t {
            for b in 0..t {
                c[a][b] += row[a] * row[b];
            }
        }
    }
    c
}

/// Blocks of a Cartan matrix, as index sets ordered by least member.
pub fn cartan_blocks(c: &[Vec<u64>]) -> Vec<Vec<usize>> {
    let t = c.len();
    let mut seen = vec![false; t];
    let mut out = Vec::new();
    for s in 0..t {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let a = comp[i];
            for b in 0..t {
                if !seen[b] && (c[a][b] != 0 || c[b][a] != 0) {
                    seen[b] = true;
                    comp.push(b);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Right multiplication matrices of `E` reduced mod `p`.
pub fn reduce_matrices(mats: &[IntMatrix], p: u64) -> Result<Vec<FqMatrix>, ModularError> {
    let p8 = gfmat::check_prime(p)?;
    let pb = BigInt::from(p);
    mats.iter()
        .map(|m| {
            let entries: Vec<i64> = m.to_rows().iter().flatten().map(|x| x.mod_floor(&pb).to_i64().unwrap_or(0)).collect();
            Ok(FqMatrix::from_i64(p8, m.nrows(), m.ncols(), &entries)?)
        })
        .collect()
}

/// Cartan data of `E_F` from its regular module, built from all intersection matrices.
pub fn cartan_from_regular<R: Rng + ?Sized>(mats: &[IntMatrix], p: u64, rng: &mut R) -> Result<CartanData, ModularError> {
    let right = reduce_matrices(mats, p)?;
    let (m, left) = gfmat::regular_module_from_basis(p, &right)?;
    Ok(gfmat::cartan_matrix(&m, Some(&left), rng)?)
}

/// Whether `E_F` has a single simple module.
pub fn is_local<R: Rng + ?Sized>(mats: &[IntMatrix], p: u64, rng: &mut R) -> Result<bool, ModularError> {
    let right = reduce_matrices(mats, p)?;
    let (m, _) = gfmat::regular_module_from_basis(p, &right)?;
    Ok(gfmat::chop(&m, rng)?.len() == 1)
}

/// A simple `E_F`-module as known to the correspondence step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleInfo {
    pub label: String,
    pub dim: Option<usize>,
    /// `[E_F : S]`, which equals `dim P_S`.
    pub multiplicity: usize,
}

impl SimpleInfo {
    pub fn from_cartan(c: &CartanData) -> Vec<SimpleInfo> {
        (0..c.labels.len())
            .map(|i| SimpleInfo { label: c.labels[i].clone(), dim: Some(c.simple_dims[i]), multiplicity: c.regular_multiplicities[i] })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    /// For each column, the simples compatible with it.
    pub candidates: Vec<Vec<usize>>,
    pub column_dims: Vec<u64>,
}

impl Correspondence {
    /// The matched simple of each column when every match is forced.
    pub fn matching(&self) -> Option<Vec<usize>> {
        self.candidates.iter().map(|c| if c.len() == 1 { Some(c[0]) } else { None }).collect()
    }

    pub fn ambiguous_columns(&self) -> Vec<usize> {
        (0..self.candidates.len()).filter(|&c| self.candidates[c].len() != 1).collect()
    }
}

/// Matches columns to simples by `dim P_S = [E_F : S]`, and by `dim S` when known.
pub fn correspond_projectives(d: &DecompositionMatrix, simples: &[SimpleInfo]) -> Result<Correspondence, ModularError> {
    if simples.len() != d.ncols() {
        return Err(ModularError::SimpleCount { columns: d.ncols(), simples: simples.len() });
    }
    let column_dims = d.projective_dims();
    let candidates = (0..d.ncols())
        .map(|c| {
            let sdim = d.mults[d.columns[c]];
            (0..simples.len())
                .filter(|&s| simples[s].multiplicity as u64 == column_dims[c] && simples[s].dim.is_none_or(|x| x == sdim))
                .collect()
        })
        .collect();
    Ok(Correspondence { candidates, column_dims })
}

/// Whether some bijection allowed by `corr` carries `from_d` onto `regular`.
pub fn cartans_agree(from_d: &[Vec<u64>], regular: &[Vec<usize>], corr: &Correspondence) -> bool {
    let t = from_d.len();
    if regular.len() != t {
        return false;
    }
    fn go(k: usize, assign: &mut Vec<usize>, used: &mut [bool], d: &[Vec<u64>], r: &[Vec<usize>], cand: &[Vec<usize>]) -> bool {
        if k == d.len() {
            return true;
        }
        for &s in &cand[k] {
            if used[s] {
                continue;
            }
            let ok = (0..k).all(|j| d[k][j] == r[s][assign[j]] as u64 && d[j][k] == r[assign[j]][s] as u64)
                && d[k][k] == r[s][s] as u64;
            if !ok {
                continue;
            }
            used[s] = true;
            assign.push(s);
            if go(k + 1, assign, used, d, r, cand) {
                return true;
            }
            assign.pop();
            used[s] = false;
        }
        false
    }
    go(0, &mut Vec::new(), &mut vec![false; t], from_d, regular, &corr.candidates)
}

/// `constant + Σ k_v·a_v` with unresolved `a_v ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coefficient {
    pub constant: i64,
    pub vars: BTreeMap<usize, i64>,
}

impl Coefficient {
    fn add(&mut self, o: &Coefficient) {
        self.constant += o.constant;
        for (&v, &k) in &o.vars {
            *self.vars.entry(v).or_insert(0) += k;
        }
        self.vars.retain(|_, k| *k != 0);
    }

    fn scaled(&self, s: i64) -> Coefficient {
        Coefficient { constant: self.constant * s, vars: self.vars.iter().map(|(&v, &k)| (v, k * s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.vars.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.vars.is_empty()
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.constant != 0 || self.vars.is_empty() {
            parts.push(format!("{}", self.constant));
        }
        for (&v, &k) in &self.vars {
            let name = if v == 0 { String::from("a") } else { format!("a{v}") };
            parts.push(match k {
                1 => name,
                -1 => format!("-{name}"),
                k => format!("{k}{name}"),
            });
        }
        let s = parts.join("+").replace("+-", "-");
        f.write_str(&s)
    }
}

/// Character of a projective indecomposable of `E_F`, as a combination of
/// the Fitting correspondents of the ordinary rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveColumn {
    /// Table row of the basic-set member heading the column.
    pub column: usize,
    pub terms: Vec<(String, Coefficient)>,
}

impl ProjectiveColumn {
    pub fn coefficient(&self, label: &str) -> Coefficient {
        self.terms.iter().find(|(l, _)| l == label).map(|(_, c)| c.clone()).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveColumns {
    pub columns: Vec<ProjectiveColumn>,
    /// Label pairs whose assignment is unresolved; pair `v` owns variable `a_v`.
    pub ambiguities: Vec<(String, String)>,
}

fn row_label(j: usize, r: &CharRow) -> String {
    r.fitting.clone().unwrap_or_else(|| format!("phi{}", j + 1))
}

/// `Ψ_S = Σ_j D[j][S]·χ_{φ_j}`. A label `x/y` sends `1 - a` to `x` and `a`
/// to `y`, with one `a` shared by both rows of the pair.
pub fn projective_columns(d: &DecompositionMatrix, table: &EndoCharTable) -> ProjectiveColumns {
    let mut ambiguities: Vec<(String, String)> = Vec::new();
    let mut contributions: Vec<Vec<(String, Coefficient)>> = Vec::new();
    for (j, r) in table.rows.iter().enumerate() {
        let label = row_label(j, r);
        let parts: Vec<&str> = label.split('/').collect();
        if parts.len() == 2 {
            let (x, y) = (String::from(parts[0]), String::from(parts[1]));
            let key = if x <= y { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) };
            let v = match ambiguities.iter().position(|a| *a == key) {
                Some(v) => v,
                None => {
                    ambiguities.push(key.clone());
                    ambiguities.len() - 1
                }
            };
            let a = Coefficient { constant: 0, vars: [(v, 1)].into_iter().collect() };
            let one_minus = Coefficient { constant: 1, vars: [(v, -1)].into_iter().collect() };
            contributions.push(vec![(x, one_minus), (y, a)]);
        } else {
            contributions.push(vec![(label, Coefficient { constant: 1, vars: BTreeMap::new() })]);
        }
    }
    let columns = (0..d.ncols())
        .map(|c| {
            let mut terms: Vec<(String, Coefficient)> = Vec::new();
            for (j, row) in d.entries.iter().enumerate() {
                if row[c] == 0 {
                    continue;
                }
                for (l, k) in &contributions[j] {
                    let add = k.scaled(row[c] as i64);
                    match terms.iter_mut().find(|(t, _)| t == l) {
                        Some((_, acc)) => acc.add(&add),
                        None => terms.push((l.clone(), add)),
                    }
                }
            }
            terms.retain(|(_, k)| !k.is_zero());
            ProjectiveColumn { column: d.columns[c], terms }
        })
        .collect();
    ProjectiveColumns { columns, ambiguities }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    PermutationModule,
    NotPermutationModule,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::PermutationModule => "permutation module",
            Answer::NotPermutationModule => "not a permutation module",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub p: u64,
    pub sqrt_choices: Vec<(i64, u64)>,
    pub reduced: Vec<ReducedCharacter>,
    pub decomposition: DecompositionMatrix,
    pub blocks: Vec<Block>,
    pub cartan: Vec<Vec<u64>>,
    /// Cartan data from the regular module, when the full algebra was available.
    pub regular: Option<CartanData>,
    pub correspondence: Option<Correspondence>,
    pub columns: ProjectiveColumns,
    pub local: bool,
    pub answer: Answer,
}

/// Full reduction pipeline. With `simples` the correspondence is computed;
/// with `regular` the two Cartan matrices must also agree.
pub fn permutation_verdict(
    table: &EndoCharTable,
    conv: &SqrtConvention,
    simples: Option<&[SimpleInfo]>,
    regular: Option<CartanData>,
) -> Result<Verdict, ModularError> {
    let p = conv.p();
    let fields: Vec<i64> = table.rows.iter().map(|r| r.field()).collect();
    let sqrt_choices = conv.choices(&fields)?;
    let reduced = reduce_table(table, conv)?;
    let basic = basic_set(&reduced, p);
    let decomposition = decomposition_matrix(table, &reduced, &basic, p)?;
    let blocks = decomposition.blocks();
    let cartan = cartan_from_decomposition(&decomposition);
    let from_regular = regular.as_ref().map(SimpleInfo::from_cartan);
    let simples = from_regular.as_deref().or(simples);
    let correspondence = simples.map(|s| correspond_projectives(&decomposition, s)).transpose()?;
    if let (Some(reg), Some(corr)) = (&regular, &correspondence) {
        if !cartans_agree(&cartan, &reg.matrix, corr) {
            return Err(ModularError::CartanMismatch);
        }
    }
    let local = decomposition.ncols() == 1;
    if let Some(reg) = &regular {
        if (reg.labels.len() == 1) != local {
            return Err(ModularError::CartanMismatch);
        }
    }
    let columns = projective_columns(&decomposition, table);
    let answer = if local { Answer::PermutationModule } else { Answer::NotPermutationModule };
    Ok(Verdict { p, sqrt_choices, reduced, decomposition, blocks, cartan, regular, correspondence, columns, local, answer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadraticNumber;
    use crate::splitchar::character_table;
    use alloc::string::ToString;
    use proptest::prelude::{prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s5_on_s4() -> (Vec<IntMatrix>, Vec<u64>) {
        let mats = vec![IntMatrix::from_i64(&[vec![1, 0], vec![0, 1]]).unwrap(), IntMatrix::from_i64(&[vec![0, 1], vec![4, 3]]).unwrap()];
        (mats, vec![1, 4])
    }

    fn table(mats: &[IntMatrix], lengths: &[u64]) -> EndoCharTable {
        let mut t = character_table(mats, lengths).unwrap();
        t.canonicalize(lengths);
        t
    }

    #[test]
    fn sqrt_convention_choices() {
        let c = SqrtConvention::new(11).unwrap();
        assert_eq!(c.resolve(3).unwrap(), 5);
        assert_eq!(c.resolve(5).unwrap(), 4);
        assert_eq!(c.resolve(33).unwrap(), 0);
        assert!(matches!(c.resolve(2), Err(ModularError::Inert { .. })));
        let c = c.with_override(3, 6).unwrap();
        assert_eq!(c.resolve(3).unwrap(), 6);
        assert!(SqrtConvention::new(11).unwrap().with_override(3, 4).is_err());
        // 3 - 4·r3 at r3 = 6
        let v = QuadraticNumber::from_parts(3, 1, -4, 1, 3).unwrap();
        assert_eq!(v.reduce_mod(11, c.resolve(3).unwrap()).unwrap(), 1);
    }

    #[test]
    fn s5_local_at_five() {
        let (mats, lengths) = s5_on_s4();
        let t = table(&mats, &lengths);
        let conv = SqrtConvention::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reg = cartan_from_regular(&mats, 5, &mut rng).unwrap();
        let v = permutation_verdict(&t, &conv, None, Some(reg)).unwrap();
        assert_eq!(v.decomposition.entries, vec![vec![1], vec![1]]);
        assert_eq!(v.cartan, vec![vec![2]]);
        assert!(v.local);
        assert_eq!(v.answer, Answer::PermutationModule);
        assert!(is_local(&mats, 5, &mut rng).unwrap());
    }

    #[test]
    fn s5_split_at_three() {
        let (mats, lengths) = s5_on_s4();
        let t = table(&mats, &lengths);
        let conv = SqrtConvention::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reg = cartan_from_regular(&mats, 3, &mut rng).unwrap();
        let v = permutation_verdict(&t, &conv, None, Some(reg)).unwrap();
        assert_eq!(v.cartan, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(v.blocks.len(), 2);
        assert!(!v.local);
        assert_eq!(v.answer.to_string(), "not a permutation module");
        assert!(!is_local(&mats, 3, &mut rng).unwrap());
    }

    #[test]
    fn identity_decomposition() {
        let d = DecompositionMatrix { p: 7, columns: vec![0, 1, 2], entries: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], mults: vec![1, 1, 1] };
        assert_eq!(cartan_from_decomposition(&d), d.entries);
        assert_eq!(d.blocks().len(), 3);
        assert_eq!(cartan_blocks(&cartan_from_decomposition(&d)), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn basic_set_of_equal_rows() {
        let rows: Vec<ReducedCharacter> = (0..3).map(|i| ReducedCharacter { values: vec![1, 2, 3], origin: i }).collect();
        assert_eq!(basic_set(&rows, 5), vec![0]);
    }

    #[test]
    fn pentagon_reduction() {
        // pentagon scheme: values in Q(√5), ramified at 5
        let mats = vec![
            IntMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap(),
            IntMatrix::from_i64(&[vec![0, 1, 0], vec![2, 0, 1], vec![0, 1, 1]]).unwrap(),
            IntMatrix::from_i64(&[vec![0, 0, 1], vec![0, 1, 1], vec![2, 1, 0]]).unwrap(),
        ];
        let lengths = [1, 2, 2];
        let t = table(&mats, &lengths);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let conv = SqrtConvention::new(5).unwrap();
        let reg = cartan_from_regular(&mats, 5, &mut rng).unwrap();
        let v = permutation_verdict(&t, &conv, None, Some(reg)).unwrap();
        assert!(v.local);
        assert_eq!(v.cartan, vec![vec![3]]);
        assert_eq!(v.sqrt_choices, vec![(5, 0)]);
        // at 11 the scheme splits into three simples
        let conv = SqrtConvention::new(11).unwrap();
        let reg = cartan_from_regular(&mats, 11, &mut rng).unwrap();
        let v = permutation_verdict(&t, &conv, None, Some(reg)).unwrap();
        assert_eq!(v.decomposition.ncols(), 3);
        // √5 is not in F_3
        assert!(matches!(permutation_verdict(&t, &SqrtConvention::new(3).unwrap(), None, None), Err(ModularError::Inert { .. })));
    }

    #[test]
    fn ambiguous_fitting_labels() {
        let row = |f: &str| CharRow { values: vec![QuadraticNumber::from_int(1)], mult: 1, degree: None, conjugate_of: None, fitting: Some(f.into()) };
        let t = EndoCharTable { rows: vec![row("1"), row("38/39"), row("39/38")] };
        let d = DecompositionMatrix { p: 11, columns: vec![0, 1], entries: vec![vec![1, 0], vec![0, 1], vec![1, 0]], mults: vec![1, 1, 1] };
        let pc = projective_columns(&d, &t);
        assert_eq!(pc.ambiguities.len(), 1);
        let c0 = &pc.columns[0];
        assert_eq!(c0.coefficient("1").constant, 1);
        assert_eq!(c0.coefficient("38").to_string(), "a");
        assert_eq!(c0.coefficient("39").to_string(), "1-a");
        assert_eq!(pc.columns[1].coefficient("38").to_string(), "1-a");
        assert_eq!(pc.columns[1].coefficient("39").to_string(), "a");
    }

    #[test]
    fn correspondence_is_ambiguous_for_equal_dims() {
        let d = DecompositionMatrix { p: 3, columns: vec![0, 1], entries: vec![vec![1, 0], vec![0, 1]], mults: vec![1, 1] };
        let simples = vec![
            SimpleInfo { label: "1a".into(), dim: Some(1), multiplicity: 1 },
            SimpleInfo { label: "1b".into(), dim: Some(1), multiplicity: 1 },
        ];
        let c = correspond_projectives(&d, &simples).unwrap();
        assert_eq!(c.ambiguous_columns(), vec![0, 1]);
        assert!(c.matching().is_none());
        assert!(cartans_agree(&cartan_from_decomposition(&d), &[vec![1, 0], vec![0, 1]], &c));
    }

    proptest! {
        #[test]
        fn reduction_is_a_ring_homomorphism(
            n in proptest::sample::select(vec![3i64, 5, 11, -2, 33]),
            xs in proptest::collection::vec(-50i64..50, 4),
            dens in proptest::collection::vec(proptest::sample::select(vec![1i64, 2, 4, 3]), 2),
        ) {
            let p = 11u64;
            let s = SqrtConvention::new(p).unwrap().resolve(n).unwrap();
            let x = QuadraticNumber::from_parts(xs[0], dens[0], xs[1], dens[0], n).unwrap();
            let y = QuadraticNumber::from_parts(xs[2], dens[1], xs[3], dens[1], n).unwrap();
            let rx = x.reduce_mod(p, s).unwrap();
            let ry = y.reduce_mod(p, s).unwrap();
            prop_assert_eq!(x.add(&y).unwrap().reduce_mod(p, s).unwrap(), (rx + ry) % p);
            prop_assert_eq!(x.mul(&y).unwrap().reduce_mod(p, s).unwrap(), mul_mod(rx, ry, p));
        }
    }
}
