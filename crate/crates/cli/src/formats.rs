//! JSON file formats. Points and generator numbers are 1-indexed in files.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use permendo_core::candfilter::{ClassInfo, Constituent, OrdinaryChar, OrdinaryCharTableG};
use permendo_core::gfmat::{FqMatrix, FqVec};
use permendo_core::qmat::IntMatrix;
use permendo_core::quadratic::QuadraticNumber;
use permendo_core::splitchar::{CharRow, EndoCharTable};
use permendo_core::{Perm, Word};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// `{ "degree": n, "generators": [[images]] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
}

impl GroupFile {
    pub fn to_perms(&self) -> Result<Vec<Perm>> {
        if self.generators.is_empty() {
            return Err(CliError::Input("group has no generators".into()));
        }
        self.generators.iter().enumerate().map(|(i, g)| perm_from_images(self.degree, g).map_err(|e| CliError::Input(format!("generator {}: {e}", i + 1)))).collect()
    }

    pub fn from_perms(perms: &[Perm]) -> Self {
        let degree = perms.first().map(|p| p.degree()).unwrap_or(0);
        GroupFile { degree, generators: perms.iter().map(|p| p.images().iter().map(|&x| x + 1).collect()).collect() }
    }
}

fn perm_from_images(degree: usize, images: &[u32]) -> std::result::Result<Perm, String> {
    if images.len() != degree {
        return Err(format!("{} images for degree {degree}", images.len()));
    }
    if images.iter().any(|&x| x == 0 || x as usize > degree) {
        return Err("images must lie in 1..=degree".into());
    }
    Perm::from_images(images.iter().map(|&x| x - 1).collect()).map_err(|e| e.to_string())
}

/// `[[generator, exponent], …]`, generators 1-indexed, negative exponent for inverses.
pub type WordSpec = Vec<(usize, i64)>;

pub fn word_from_spec(spec: &WordSpec, ngens: usize) -> Result<Word> {
    let mut w = Word::empty();
    for &(g, e) in spec {
        if g == 0 || g > ngens {
            return Err(CliError::Input(format!("word letter {g} outside 1..={ngens}")));
        }
        if e == 0 {
            return Err(CliError::Input("word exponent 0".into()));
        }
        for _ in 0..e.unsigned_abs() {
            w.push(g - 1, e < 0);
        }
    }
    Ok(w)
}

pub fn word_to_spec(w: &Word) -> WordSpec {
    let mut out: WordSpec = Vec::new();
    for l in &w.0 {
        let (g, e) = (l.gen + 1, if l.inverse { -1 } else { 1 });
        match out.last_mut() {
            Some((lg, le)) if *lg == g && le.signum() == e => *le += e,
            _ => out.push((g, e)),
        }
    }
    out
}

/// Matrices over `F_p` acting on row vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixGroupFile {
    pub p: u64,
    pub dim: usize,
    pub generators: Vec<Vec<Vec<i64>>>,
}

impl MatrixGroupFile {
    pub fn to_matrices(&self) -> Result<Vec<FqMatrix>> {
        let p = prime_u8(self.p)?;
        self.generators.iter().map(|m| fq_matrix(p, self.dim, self.dim, m)).collect()
    }
}

pub fn prime_u8(p: u64) -> Result<u8> {
    permendo_core::gfmat::check_prime(p).map_err(CliError::input)
}

pub fn fq_matrix(p: u8, rows: usize, cols: usize, m: &[Vec<i64>]) -> Result<FqMatrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input(format!("matrix is not {rows}x{cols}")));
    }
    let flat: Vec<i64> = m.iter().flatten().copied().collect();
    FqMatrix::from_i64(p, rows, cols, &flat).map_err(CliError::input)
}

pub fn fq_vector(p: u8, v: &[i64]) -> FqVec {
    FqVec::from_i64(p, v)
}

/// Intersection-matrix file; `pairing` is 1-indexed and `matrices` is keyed by `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionFile {
    pub r: usize,
    pub lengths: Vec<u64>,
    pub pairing: Vec<usize>,
    pub matrices: BTreeMap<String, Vec<Vec<i64>>>,
}

impl IntersectionFile {
    pub fn pairing0(&self) -> Result<Vec<usize>> {
        if self.pairing.len() != self.r || self.lengths.len() != self.r {
            return Err(CliError::Input("lengths and pairing must have r entries".into()));
        }
        self.pairing.iter().map(|&j| if j == 0 || j > self.r { Err(CliError::Input(format!("pairing entry {j} out of range"))) } else { Ok(j - 1) }).collect()
    }

    /// `(j, P_j)` with 0-based `j`, in increasing order of `j`.
    pub fn matrices(&self) -> Result<Vec<(usize, IntMatrix)>> {
        let mut out = Vec::new();
        for (k, rows) in &self.matrices {
            let j: usize = k.parse().map_err(|_| CliError::Input(format!("matrix key {k:?} is not an index")))?;
            if j == 0 || j > self.r {
                return Err(CliError::Input(format!("matrix index {j} out of range")));
            }
            if rows.len() != self.r || rows.iter().any(|r| r.len() != self.r) {
                return Err(CliError::Input(format!("P_{j} is not {0}x{0}", self.r)));
            }
            out.push((j - 1, IntMatrix::from_i64(rows).map_err(CliError::input)?));
        }
        out.sort_by_key(|(j, _)| *j);
        Ok(out)
    }

    /// All `r` matrices, or `None` if some are missing.
    pub fn full(&self) -> Result<Option<Vec<IntMatrix>>> {
        let ms = self.matrices()?;
        if ms.len() != self.r {
            return Ok(None);
        }
        Ok(Some(ms.into_iter().map(|(_, m)| m).collect()))
    }

    pub fn from_matrices(lengths: &[u64], pairing0: &[usize], mats: &[(usize, &IntMatrix)]) -> Result<Self> {
        let mut matrices = BTreeMap::new();
        for (j, m) in mats {
            matrices.insert((j + 1).to_string(), int_rows(m)?);
        }
        Ok(IntersectionFile { r: lengths.len(), lengths: lengths.to_vec(), pairing: pairing0.iter().map(|j| j + 1).collect(), matrices })
    }
}

pub fn int_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().ok_or_else(|| CliError::Input("matrix entry exceeds 64 bits".into()))).collect()).collect()
}

/// `[a_num, a_den, b_num, b_den, n]` for `a + b·√n`.
pub type QuadSpec = [i64; 5];

pub fn quad_from_spec(s: &QuadSpec) -> Result<QuadraticNumber> {
    let [an, ad, bn, bd, n] = *s;
    if ad == 0 || bd == 0 {
        return Err(CliError::Input("zero denominator".into()));
    }
    QuadraticNumber::from_parts(an, ad, bn, bd, n).map_err(CliError::input)
}

pub fn quad_to_spec(q: &QuadraticNumber) -> Result<QuadSpec> {
    let (an, ad, bn, bd, n) = q.parts();
    let f = |x: &BigInt| x.to_i64().ok_or_else(|| CliError::Input("value exceeds 64 bits".into()));
    Ok([f(&an)?, f(&ad)?, f(&bn)?, f(&bd)?, if q.is_rational() { 1 } else { n }])
}

/// One row of a character table of `E`; `conjugate_of` is 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharRowFile {
    pub values: Vec<QuadSpec>,
    pub mult: usize,
    pub degree: Option<u64>,
    pub conjugate_of: Option<usize>,
    pub fitting: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharTableFile {
    pub rows: Vec<CharRowFile>,
}

impl CharTableFile {
    pub fn to_table(&self) -> Result<EndoCharTable> {
        let n = self.rows.len();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let values = r.values.iter().map(quad_from_spec).collect::<Result<Vec<_>>>()?;
                let conjugate_of = match r.conjugate_of {
                    Some(c) if c == 0 || c > n => return Err(CliError::Input(format!("conjugate_of {c} out of range"))),
                    c => c.map(|c| c - 1),
                };
                Ok(CharRow { values, mult: r.mult, degree: r.degree, conjugate_of, fitting: r.fitting.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EndoCharTable { rows })
    }

    pub fn from_table(t: &EndoCharTable) -> Result<Self> {
        let rows = t
            .rows
            .iter()
            .map(|r| {
                Ok(CharRowFile {
                    values: r.values.iter().map(quad_to_spec).collect::<Result<Vec<_>>>()?,
                    mult: r.mult,
                    degree: r.degree,
                    conjugate_of: r.conjugate_of.map(|c| c + 1),
                    fitting: r.fitting.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CharTableFile { rows })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFile {
    pub name: String,
    /// Decimal string, since centralizer orders overflow 64 bits.
    pub centralizer: Option<String>,
    #[serde(default)]
    pub p_singular: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryCharFile {
    pub name: String,
    pub values: Vec<Option<QuadSpec>>,
}

/// Ordinary character table of `G` with the constituents of the permutation
/// character (`chi` is 1-indexed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryTableFile {
    pub p: Option<u64>,
    pub classes: Vec<ClassFile>,
    pub characters: Vec<OrdinaryCharFile>,
    pub constituents: Vec<ConstituentFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstituentFile {
    pub chi: usize,
    pub mult: u32,
}

impl OrdinaryTableFile {
    pub fn to_table(&self) -> Result<(OrdinaryCharTableG, Vec<Constituent>)> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let centralizer = match &c.centralizer {
                    Some(s) => Some(s.parse::<BigUint>().map_err(|_| CliError::Input(format!("class {}: bad centralizer {s:?}", c.name)))?),
                    None => None,
                };
                Ok(ClassInfo { name: c.name.clone(), centralizer, p_singular: c.p_singular })
            })
            .collect::<Result<Vec<_>>>()?;
        let characters = self
            .characters
            .iter()
            .map(|c| {
                let values = c.values.iter().map(|v| v.as_ref().map(quad_from_spec).transpose()).collect::<Result<Vec<_>>>()?;
                Ok(OrdinaryChar { name: c.name.clone(), values })
            })
            .collect::<Result<Vec<_>>>()?;
        let tbl = OrdinaryCharTableG::new(classes, characters).map_err(CliError::input)?;
        let cons = self
            .constituents
            .iter()
            .map(|c| if c.chi == 0 { Err(CliError::Input("constituent index 0".into())) } else { Ok(Constituent { chi: c.chi - 1, mult: c.mult }) })
            .collect::<Result<Vec<_>>>()?;
        Ok((tbl, cons))
    }
}

/// Renders a rational as `a` or `a/b`.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_file_round_trip() {
        let g = GroupFile { degree: 3, generators: vec![vec![2, 3, 1], vec![2, 1, 3]] };
        let perms = g.to_perms().unwrap();
        assert_eq!(perms[0].image(0), 1);
        assert_eq!(GroupFile::from_perms(&perms), g);
    }

    #[test]
    fn rejects_zero_based_images() {
        let g = GroupFile { degree: 3, generators: vec![vec![0, 1, 2]] };
        assert!(matches!(g.to_perms(), Err(CliError::Input(_))));
    }

    #[test]
    fn words_expand_exponents() {
        let w = word_from_spec(&vec![(1, 2), (2, -1)], 2).unwrap();
        assert_eq!(w.len(), 3);
        assert!(w.0[2].inverse);
        assert_eq!(word_to_spec(&w), vec![(1, 2), (2, -1)]);
        assert!(word_from_spec(&vec![(3, 1)], 2).is_err());
    }

    #[test]
    fn quadratic_spec_round_trip() {
        let q = quad_from_spec(&[3, 1, -4, 1, 3]).unwrap();
        assert_eq!(quad_to_spec(&q).unwrap(), [3, 1, -4, 1, 3]);
        let r = quad_from_spec(&[5, 2, 0, 1, 1]).unwrap();
        assert_eq!(quad_to_spec(&r).unwrap(), [5, 2, 0, 1, 1]);
    }
}
