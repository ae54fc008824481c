//! Candidate characters for the projective cover of the trivial module, and
//! the index-sum search for missing orbit lengths.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational as Rational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::quadratic::{QuadError, QuadraticNumber};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CandError {
    #[error("character {chi}: field sqrt({n}) is not supported (rational and real quadratic only)")]
    UnsupportedField { chi: usize, n: i64 },
    #[error("character {chi} has {got} values for {classes} classes")]
    Shape { chi: usize, got: usize, classes: usize },
    #[error("character {chi}: value at the identity class is not a positive integer")]
    Degree { chi: usize },
    #[error("no classes")]
    Empty,
    #[error("constituent {0} is not a character of the table")]
    UnknownConstituent(usize),
    #[error("the trivial character must be a constituent with multiplicity 1")]
    NoTrivial,
    #[error("coefficients too large for exact fixed-width evaluation")]
    Overflow,
    #[error("column orthogonality fails at classes {0} and {1}")]
    Orthogonality(usize, usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub name: String,
    pub centralizer: Option<BigUint>,
    pub p_singular: bool,
}

/// One irreducible character of `G`; `None` marks an unknown value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinaryChar {
    pub name: String,
    pub values: Vec<Option<QuadraticNumber>>,
}

impl OrdinaryChar {
    pub fn degree(&self) -> Option<BigInt> {
        self.values.first().cloned().flatten().and_then(|v| v.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinaryCharTableG {
    classes: Vec<ClassInfo>,
    characters: Vec<OrdinaryChar>,
}

impl OrdinaryCharTableG {
    /// The first class must be the identity.
    pub fn new(classes: Vec<ClassInfo>, characters: Vec<OrdinaryChar>) -> Result<Self, CandError> {
        if classes.is_empty() {
            return Err(CandError::Empty);
        }
        for (chi, c) in characters.iter().enumerate() {
            if c.values.len() != classes.len() {
                return Err(CandError::Shape { chi, got: c.values.len(), classes: classes.len() });
            }
            if let Some(v) = c.values.iter().flatten().find(|v| !v.is_rational() && v.n() < 0) {
                return Err(CandError::UnsupportedField { chi, n: v.n() });
            }
            match c.degree() {
                Some(d) if d.is_positive() => {}
                _ => return Err(CandError::Degree { chi }),
            }
        }
        Ok(OrdinaryCharTableG { classes, characters })
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn characters(&self) -> &[OrdinaryChar] {
        &self.characters
    }

    /// `Σ_χ χ(g)·χ(h) = δ_{gh}·|C_G(g)|` for real-valued tables; needs every
    /// irreducible character, every value and every centralizer order.
    pub fn check_column_orthogonality(&self) -> Result<(), CandError> {
        let k = self.classes.len();
        for g in 0..k {
            for h in g..k {
                let mut s = QuadraticNumber::zero();
                for c in &self.characters {
                    let (Some(a), Some(b)) = (&c.values[g], &c.values[h]) else {
                        return Ok(());
                    };
                    s = s.add(&a.mul(&b.complex_conj())?)?;
                }
                let expected = if g == h {
                    match &self.classes[g].centralizer {
                        Some(c) => QuadraticNumber::rational(Rational::from_integer(BigInt::from(c.clone()))),
                        None => return Ok(()),
                    }
                } else {
                    QuadraticNumber::zero()
                };
                if s != expected {
                    return Err(CandError::Orthogonality(g, h));
                }
            }
        }
        Ok(())
    }
}

/// A constituent `χ_i` of the permutation character with multiplicity `m_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constituent {
    pub chi: usize,
    pub mult: u32,
}

/// Coefficients `d_i`, parallel to the constituent list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateVector {
    pub d: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateReport {
    /// Size of the box before any filter.
    pub box_size: u128,
    pub after_vanishing: u128,
    pub candidates: Vec<CandidateVector>,
    /// `(class, character)` pairs whose unknown value forced a constraint to be skipped.
    pub skipped: Vec<(usize, usize)>,
}

/// Values of one class over the basis `1, √n_1, √n_2, …`, scaled to integers.
struct IntegerColumns {
    cols: Vec<Vec<Vec<i128>>>,
}

fn build_columns(tbl: &OrdinaryCharTableG, cons: &[Constituent], classes: &[usize]) -> Result<IntegerColumns, CandError> {
    let mut fields: Vec<i64> = Vec::new();
    let mut lcm = BigInt::one();
    for &c in classes {
        for k in cons {
            if let Some(v) = &tbl.characters[k.chi].values[c] {
                if !v.is_rational() && !fields.contains(&v.n()) {
                    fields.push(v.n());
                }
                lcm = lcm.lcm(v.a().denom()).lcm(v.b().denom());
            }
        }
    }
    fields.sort_unstable();
    let scale = Rational::from_integer(lcm);
    let to_i = |q: &Rational| -> Result<i128, CandError> { (q * &scale).to_integer().to_i128().ok_or(CandError::Overflow) };
    let mut cols = Vec::with_capacity(classes.len());
    for &c in classes {
        let mut per = Vec::with_capacity(cons.len());
        for k in cons {
            let mut row = vec![0i128; fields.len() + 1];
            if let Some(v) = &tbl.characters[k.chi].values[c] {
                row[0] = to_i(v.a())?;
                if !v.is_rational() {
                    let f = fields.iter().position(|&n| n == v.n()).unwrap_or(0);
                    row[f + 1] = to_i(v.b())?;
                }
            }
            per.push(row);
        }
        cols.push(per);
    }
    Ok(IntegerColumns { cols })
}

fn trivial_position(tbl: &OrdinaryCharTableG, cons: &[Constituent]) -> Result<usize, CandError> {
    for k in cons {
        if k.chi >= tbl.characters.len() {
            return Err(CandError::UnknownConstituent(k.chi));
        }
    }
    let one = QuadraticNumber::one();
    let is_trivial = |chi: usize| tbl.characters[chi].values.iter().all(|v| v.as_ref() == Some(&one));
    cons.iter().position(|k| is_trivial(k.chi) && k.mult == 1).ok_or(CandError::NoTrivial)
}

/// `Ψ(g)` for a candidate as a rational part followed by one `b·√n` per
/// field, or `None` when a needed value is unknown.
pub fn candidate_value(tbl: &OrdinaryCharTableG, cons: &[Constituent], d: &CandidateVector, class: usize) -> Result<Option<Vec<QuadraticNumber>>, CandError> {
    let mut terms: Vec<QuadraticNumber> = Vec::new();
    for (k, &di) in cons.iter().zip(&d.d) {
        if di == 0 {
            continue;
        }
        let Some(v) = &tbl.characters[k.chi].values[class] else {
            return Ok(None);
        };
        terms.push(v.scale(&Rational::from_integer(BigInt::from(di))));
    }
    Ok(Some(merge_parts(terms)?))
}

/// Gathers rational parts into the first summand and one summand per field.
fn merge_parts(parts: Vec<QuadraticNumber>) -> Result<Vec<QuadraticNumber>, CandError> {
    let mut rational = Rational::zero();
    let mut by_field: Vec<(i64, Rational)> = Vec::new();
    for p in parts {
        rational += p.a();
        if !p.is_rational() {
            match by_field.iter_mut().find(|(n, _)| *n == p.n()) {
                Some((_, b)) => *b += p.b(),
                None => by_field.push((p.n(), p.b().clone())),
            }
        }
    }
    let mut out = vec![QuadraticNumber::rational(rational)];
    for (n, b) in by_field {
        out.push(QuadraticNumber::new(Rational::zero(), b, n)?);
    }
    Ok(out)
}

fn p_part(n: &BigUint, p: u64) -> BigUint {
    let pb = BigUint::from(p);
    let mut n = n.clone();
    let mut out = BigUint::one();
    if n.is_zero() {
        return out;
    }
    while (&n % &pb).is_zero() {
        n /= &pb;
        out *= &pb;
    }
    out
}

/// Whether `Ψ(g)/|C_G(g)|_p` is an algebraic integer. `value` is split into
/// a rational part and one `b·√n` part per field; with several fields only
/// the necessary condition of denominators dividing 4 is applied.
pub fn defect_integrality(value: &[QuadraticNumber], centralizer: &BigUint, p: u64) -> bool {
    let q = Rational::from_integer(BigInt::from(p_part(centralizer, p)));
    let inv = Rational::one() / q;
    let irrational: Vec<&QuadraticNumber> = value.iter().filter(|v| !v.is_rational()).collect();
    let rational: Rational = value.iter().map(|v| v.a().clone()).sum();
    match irrational.len() {
        0 => (rational * inv).is_integer(),
        1 => QuadraticNumber::new(rational, irrational[0].b().clone(), irrational[0].n())
            .map(|x| x.scale(&inv).is_algebraic_integer())
            .unwrap_or(false),
        _ => {
            let four = Rational::from_integer(BigInt::from(4));
            (&rational * &inv * &four).is_integer() && irrational.iter().all(|v| (v.b() * &inv * &four).is_integer())
        }
    }
}

/// Enumerates `∏[0, m_i]` with the trivial coefficient fixed to 1, keeping
/// vectors that vanish on every p-singular class and, where centralizer
/// orders are known, pass [`defect_integrality`]. Output is lexicographic.
pub fn admissible_candidates(tbl: &OrdinaryCharTableG, cons: &[Constituent], p: u64) -> Result<CandidateReport, CandError> {
    let triv = trivial_position(tbl, cons)?;
    let mut skipped = Vec::new();
    let singular: Vec<usize> = (0..tbl.classes.len())
        .filter(|&c| tbl.classes[c].p_singular)
        .filter(|&c| {
            let missing: Vec<usize> = cons.iter().filter(|k| tbl.characters[k.chi].values[c].is_none()).map(|k| k.chi).collect();
            skipped.extend(missing.iter().map(|&chi| (c, chi)));
            missing.is_empty()
        })
        .collect();
    let cols = build_columns(tbl, cons, &singular)?;
    let bounds: Vec<u32> = cons.iter().enumerate().map(|(i, k)| if i == triv { 1 } else { k.mult }).collect();
    let lows: Vec<u32> = (0..cons.len()).map(|i| if i == triv { 1 } else { 0 }).collect();
    let box_size: u128 = bounds.iter().zip(&lows).map(|(&b, &l)| (b - l) as u128 + 1).product();

    let width = cols.cols.first().map(|c| c.first().map_or(1, |r| r.len())).unwrap_or(1);
    let mut sums = vec![vec![0i128; width]; singular.len()];
    let mut d = lows.clone();
    let mut vanishing = Vec::new();
    for (c, s) in sums.iter_mut().enumerate() {
        for (i, &di) in d.iter().enumerate() {
            for (x, y) in s.iter_mut().zip(&cols.cols[c][i]) {
                *x += di as i128 * y;
            }
        }
    }
    // odometer with the last coordinate fastest
    'outer: loop {
        if sums.iter().all(|s| s.iter().all(|&x| x == 0)) {
            vanishing.push(CandidateVector { d: d.clone() });
        }
        let mut i = cons.len();
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if d[i] < bounds[i] {
                d[i] += 1;
                for (c, s) in sums.iter_mut().enumerate() {
                    for (x, y) in s.iter_mut().zip(&cols.cols[c][i]) {
                        *x = x.checked_add(*y).ok_or(CandError::Overflow)?;
                    }
                }
                continue 'outer;
            }
            let back = (d[i] - lows[i]) as i128;
            d[i] = lows[i];
            for (c, s) in sums.iter_mut().enumerate() {
                for (x, y) in s.iter_mut().zip(&cols.cols[c][i]) {
                    *x -= back * y;
                }
            }
        }
    }
    let after_vanishing = vanishing.len() as u128;
    let mut candidates = Vec::with_capacity(vanishing.len());
    'cand: for v in vanishing {
        for (c, class) in tbl.classes.iter().enumerate() {
            let Some(cent) = &class.centralizer else { continue };
            match candidate_value(tbl, cons, &v, c)? {
                Some(val) => {
                    if !defect_integrality(&val, cent, p) {
                        continue 'cand;
                    }
                }
                None => continue,
            }
        }
        candidates.push(v);
    }
    Ok(CandidateReport { box_size, after_vanishing, candidates, skipped })
}

/// Pairs `(i, j)` of constituent positions with `d_i = d_j` on every
/// candidate; `pairs` restricts the search, e.g. to Galois-conjugate pairs.
pub fn conjugation_closure(cands: &[CandidateVector], pairs: Option<&[(usize, usize)]>) -> Vec<(usize, usize)> {
    let Some(first) = cands.first() else { return Vec::new() };
    let n = first.d.len();
    let all: Vec<(usize, usize)> = match pairs {
        Some(ps) => ps.to_vec(),
        None => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
    };
    all.into_iter().filter(|&(i, j)| i < n && j < n && cands.iter().all(|c| c.d[i] == c.d[j])).collect()
}

/// All size-`k` multisets from `allowed` summing to `target`, each sorted
/// ascending, listed in lexicographic order.
pub fn partition_search(target: u64, allowed: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut vals: Vec<u64> = allowed.to_vec();
    vals.sort_unstable();
    vals.dedup();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    search(&vals, 0, target, k, &mut cur, &mut out);
    out
}

fn search(vals: &[u64], start: usize, rest: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if k == 0 {
        if rest == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if k == 1 {
        if vals[start..].binary_search(&rest).is_ok() {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    for i in start..vals.len() {
        let v = vals[i];
        // the remaining k-1 parts are at least v each
        match v.checked_mul(k as u64) {
            Some(m) if m <= rest => {}
            _ => break,
        }
        cur.push(v);
        search(vals, i, rest - v, k - 1, cur, out);
        cur.pop();
    }
}
