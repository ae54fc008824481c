//! The pipeline against brute-force constructions on small actions.

use std::time::Instant;

use permendo_core::modular::{ModularError, SqrtConvention};
use permendo_core::oracle::{self, OrbitalBasis};
use permendo_core::orbenum::EnumConfig;
use permendo_core::qmat::IntMatrix;
use permendo_core::splitchar::EndoCharTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::CorpusInstance;
use crate::error::{CliError, Result};
use crate::pipeline;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeStatus {
    Match,
    Mismatch,
    /// A character field is inert at `p`.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimeReport {
    pub p: u64,
    pub status: PrimeStatus,
    pub local: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub name: String,
    pub degree: usize,
    pub rank: usize,
    pub orbits: bool,
    pub matrices: bool,
    pub table: bool,
    pub primes: Vec<PrimeReport>,
    pub seconds: f64,
    pub passed: bool,
    pub errors: Vec<String>,
}

/// `sigma[j]` = oracle index of pipeline orbit `j`.
fn orbit_map(b: &OrbitalBasis, reps: &[u32], lengths: &[u64]) -> std::result::Result<Vec<usize>, String> {
    let sigma: Vec<usize> = reps.iter().map(|&y| b.orbit_of[y as usize]).collect();
    let mut seen = vec![false; b.rank()];
    for (j, &s) in sigma.iter().enumerate() {
        if seen[s] {
            return Err(format!("pipeline orbits {} and another share oracle orbit {}", j + 1, s + 1));
        }
        seen[s] = true;
        if b.lengths[s] != lengths[j] {
            return Err(format!("orbit {}: length {} vs oracle {}", j + 1, lengths[j], b.lengths[s]));
        }
    }
    if sigma.len() != b.rank() {
        return Err(format!("rank {} vs oracle {}", sigma.len(), b.rank()));
    }
    Ok(sigma)
}

fn matrices_agree(mine: &[IntMatrix], theirs: &[IntMatrix], sigma: &[usize]) -> std::result::Result<(), String> {
    let r = sigma.len();
    for j in 0..r {
        for i in 0..r {
            for k in 0..r {
                if mine[j].get(i, k) != theirs[sigma[j]].get(sigma[i], sigma[k]) {
                    return Err(format!("P_{} differs at ({}, {})", j + 1, i + 1, k + 1));
                }
            }
        }
    }
    Ok(())
}

/// Rows as bare values and multiplicities, columns in oracle order, canonical row order.
fn normalized(t: &EndoCharTable, sigma: Option<&[usize]>, lengths: &[u64]) -> EndoCharTable {
    let mut t = t.clone();
    for row in &mut t.rows {
        if let Some(s) = sigma {
            let mut v = row.values.clone();
            for (j, &sj) in s.iter().enumerate() {
                v[sj] = row.values[j].clone();
            }
            row.values = v;
        }
        row.degree = None;
        row.fitting = None;
    }
    t.canonicalize(lengths);
    t
}

/// A simultaneous row/column permutation `pi` with `a[pi i][pi j] = b[i][j]`
/// and `da[pi i] = db[i]`.
pub fn match_up_to_permutation(a: &[Vec<usize>], da: &[usize], b: &[Vec<usize>], db: &[usize]) -> Option<Vec<usize>> {
    fn go(i: usize, a: &[Vec<usize>], da: &[usize], b: &[Vec<usize>], db: &[usize], pi: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if i == b.len() {
            return true;
        }
        for c in 0..a.len() {
            if used[c] || da[c] != db[i] || a[c][c] != b[i][i] {
                continue;
            }
            let ok = (0..i).all(|k| a[c][pi[k]] == b[i][k] && a[pi[k]][c] == b[k][i]);
            if !ok {
                continue;
            }
            used[c] = true;
            pi.push(c);
            if go(i + 1, a, da, b, db, pi, used) {
                return true;
            }
            pi.pop();
            used[c] = false;
        }
        false
    }
    if a.len() != b.len() || da.len() != a.len() || db.len() != b.len() {
        return None;
    }
    let mut pi = Vec::new();
    let mut used = vec![false; a.len()];
    go(0, a, da, b, db, &mut pi, &mut used).then_some(pi)
}

fn transpose(m: &[Vec<usize>]) -> Vec<Vec<usize>> {
    (0..m.len()).map(|i| m.iter().map(|row| row[i]).collect()).collect()
}

fn check_prime(table: &EndoCharTable, mats: &[IntMatrix], b: &OrbitalBasis, g: &[permendo_core::Perm], p: u64, seed: u64) -> PrimeReport {
    let conv = match SqrtConvention::new(p) {
        Ok(c) => c,
        Err(e) => return PrimeReport { p, status: PrimeStatus::Mismatch, local: None, detail: e.to_string() },
    };
    let fields: Vec<i64> = table.rows.iter().map(|r| r.field()).collect();
    if let Err(ModularError::Inert { n, .. }) = conv.choices(&fields) {
        return PrimeReport { p, status: PrimeStatus::Skipped, local: None, detail: format!("sqrt({n}) is not in F_{p}") };
    }
    let mismatch = |detail: String| PrimeReport { p, status: PrimeStatus::Mismatch, local: None, detail };
    let v = match pipeline::verdict(table, &conv, Some(mats), seed) {
        Ok(v) => v,
        Err(e) => return mismatch(format!("pipeline: {e}")),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let direct = match oracle::direct_endo_decomposition(b, g, p, &mut rng) {
        Ok(d) => d,
        Err(e) => return mismatch(format!("oracle: {e}")),
    };
    let Some(reg) = v.regular.as_ref() else {
        return mismatch("no regular Cartan matrix".into());
    };
    // dim Hom(Y_S, Y_T) counts composition factors scaled by dim End(S)
    let hom: Vec<Vec<usize>> = reg.matrix.iter().map(|row| row.iter().zip(&reg.end_dims).map(|(c, e)| c * e).collect()).collect();
    let dims: Vec<usize> = reg.simple_dims.iter().zip(&reg.end_dims).map(|(d, e)| d / e).collect();
    let found = match_up_to_permutation(&hom, &dims, &direct.cartan, &direct.simple_dims)
        .or_else(|| match_up_to_permutation(&transpose(&hom), &dims, &direct.cartan, &direct.simple_dims));
    if found.is_none() {
        return mismatch(format!("Cartan {:?} with dims {:?}, oracle {:?} with dims {:?}", hom, dims, direct.cartan, direct.simple_dims));
    }
    let dtd: Vec<Vec<usize>> = v.cartan.iter().map(|r| r.iter().map(|&x| x as usize).collect()).collect();
    if dtd.len() != direct.cartan.len() {
        return mismatch(format!("D^T D has {} columns, oracle finds {} summands", dtd.len(), direct.cartan.len()));
    }
    if v.local != direct.local {
        return mismatch(format!("local: pipeline {}, oracle {}", v.local, direct.local));
    }
    PrimeReport { p, status: PrimeStatus::Match, local: Some(v.local), detail: format!("{} simple modules, Cartan {:?}", direct.cartan.len(), direct.cartan) }
}

/// Runs one instance through the pipeline and the oracle.
pub fn check_instance(inst: &CorpusInstance, seed: u64) -> Result<InstanceReport> {
    let start = Instant::now();
    let cfg = EnumConfig { seed, ..EnumConfig::default() };
    let mut prep = pipeline::prepare_perm(inst.g.clone(), inst.h.clone(), inst.base, inst.h_order.clone(), 1, cfg)?;
    let part = pipeline::orbits(&mut prep)?;
    let m = pipeline::intersect(&mut prep, &part)?;
    let (table, _) = pipeline::chartab(&m.mats, &m.sctx.lengths, &m.sctx.pairing)?;

    let b = oracle::commutant_basis(&inst.g, &inst.h, inst.base).map_err(CliError::invariant)?;
    let exhaustive = oracle::exhaustive_orbits(&inst.g, &inst.h, &inst.base);
    let omats = oracle::intersection_matrices(&b).map_err(CliError::invariant)?;
    let otable = oracle::character_table_by_traces(&b, &omats, seed).map_err(CliError::invariant)?;

    let mut errors = Vec::new();
    let reps: Vec<u32> = part.records.iter().map(|r| r.rep).collect();
    let sigma = orbit_map(&b, &reps, &m.sctx.lengths);
    let orbits_ok = match &sigma {
        Ok(_) => {
            let mut a = exhaustive.lengths();
            let mut l = m.sctx.lengths.clone();
            a.sort_unstable();
            l.sort_unstable();
            let stored_ok = part.records.iter().all(|r| r.stored_points().all(|x| b.orbit_of[*x as usize] == b.orbit_of[r.rep as usize]));
            if a != l || !stored_ok {
                errors.push("orbit partition differs from exhaustive enumeration".into());
            }
            a == l && stored_ok
        }
        Err(e) => {
            errors.push(e.clone());
            false
        }
    };
    let matrices_ok = match &sigma {
        Ok(s) => matrices_agree(&m.mats, &omats, s).map_err(|e| errors.push(e)).is_ok(),
        Err(_) => false,
    };
    let table_ok = match &sigma {
        Ok(s) => {
            let ok = normalized(&table, Some(s), &b.lengths).rows.iter().map(|r| (&r.values, r.mult)).eq(normalized(&otable, None, &b.lengths).rows.iter().map(|r| (&r.values, r.mult)));
            if !ok {
                errors.push("character tables differ".into());
            }
            ok
        }
        Err(_) => false,
    };
    let primes: Vec<PrimeReport> = inst.primes().into_iter().map(|p| check_prime(&table, &m.mats, &b, &inst.g, p, seed)).collect();
    let passed = orbits_ok && matrices_ok && table_ok && primes.iter().all(|p| p.status != PrimeStatus::Mismatch);
    Ok(InstanceReport {
        name: inst.name.clone(),
        degree: inst.degree,
        rank: part.rank(),
        orbits: orbits_ok,
        matrices: matrices_ok,
        table: table_ok,
        primes,
        seconds: start.elapsed().as_secs_f64(),
        passed,
        errors,
    })
}

/// Errors in one instance are recorded in its report rather than aborting the run.
pub fn check_corpus(corpus: &[CorpusInstance], seed: u64) -> Vec<InstanceReport> {
    corpus
        .iter()
        .map(|inst| {
            check_instance(inst, seed).unwrap_or_else(|e| InstanceReport {
                name: inst.name.clone(),
                degree: inst.degree,
                rank: 0,
                orbits: false,
                matrices: false,
                table: false,
                primes: Vec::new(),
                seconds: 0.0,
                passed: false,
                errors: vec![e.to_string()],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn permutation_matching() {
        let a = vec![vec![2, 1], vec![1, 3]];
        let b = vec![vec![3, 1], vec![1, 2]];
        assert_eq!(match_up_to_permutation(&a, &[1, 1], &b, &[1, 1]), Some(vec![1, 0]));
        assert_eq!(match_up_to_permutation(&a, &[1, 2], &b, &[1, 2]), None);
    }

    #[test]
    fn s5_agrees_with_oracle() {
        let inst = corpus::named().unwrap().into_iter().find(|i| i.name == "S5/S4").unwrap();
        let r = check_instance(&inst, 3).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.primes.iter().map(|p| p.p).collect::<Vec<_>>(), [2, 3, 5]);
    }
}
