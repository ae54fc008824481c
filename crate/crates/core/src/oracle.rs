//! Brute-force references for small instances: explicit coset actions,
//! orbital matrices, exhaustive orbits, a trace-based character table and a
//! direct decomposition of the permutation module.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gfmat::{self, FqMatrix, GfError, ModuleRep};
use crate::hashing::new_set;
use crate::orbenum::Point;
use crate::perm::{Acts, GroupElem, Perm, Word};
use crate::permgrp::{GeneratedGroup, GroupError};
use crate::qmat::{IntMatrix, MatrixError, QMatrix, RowSpace};
use crate::quadratic::{square_split, QuadError, QuadraticNumber, Rational};
use crate::splitchar::{CharRow, EndoCharTable};
use crate::zpoly::{factor_over_z, ZPolyError};

/// Largest coset action the oracle builds.
pub const MAX_COSETS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("index {0} exceeds the oracle limit")]
    TooManyCosets(u128),
    #[error("generator {0} of H is not in G")]
    NotSubgroup(usize),
    #[error("found {found} cosets, expected {expected}")]
    IndexMismatch { found: usize, expected: u128 },
    #[error("oracle invariant failed: {0}")]
    Inconsistent(&'static str),
    #[error("no separating central element found")]
    NoGenericElement,
    #[error("central factor of degree {0}; only rational and quadratic fields are handled")]
    UnsupportedShape(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] ZPolyError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// `G` acting on the right cosets `Hx`; coset 0 is `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    pub degree: usize,
    pub g_action: Vec<Perm>,
    pub h_action: Vec<Perm>,
    /// Coset representatives as words in the generators of `G`.
    pub reps: Vec<Word>,
}

/// Invariant of `Hx`: the images under `x` of the `H`-orbits.
fn coset_key(h_orbits: &[Vec<u32>], x: &Perm) -> Vec<Vec<u32>> {
    let mut key: Vec<Vec<u32>> = h_orbits
        .iter()
        .map(|o| {
            let mut v: Vec<u32> = o.iter().map(|&a| x.image(a)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    key.sort();
    key
}

/// Breadth-first search over coset representatives, with membership in `H`
/// deciding equality of cosets.
pub fn coset_action(degree: usize, g_gens: &[Perm], h_gens: &[Perm]) -> Result<CosetAction, OracleError> {
    let g = GeneratedGroup::new(degree, g_gens.to_vec())?.build_chain();
    let h = GeneratedGroup::new(degree, h_gens.to_vec())?.build_chain();
    for (i, x) in h_gens.iter().enumerate() {
        if !g.contains(x)? {
            return Err(OracleError::NotSubgroup(i));
        }
    }
    let (go, ho) = (g.order()?, h.order()?);
    let expected = (&go / &ho).to_u128().unwrap_or(u128::MAX);
    if expected > MAX_COSETS as u128 {
        return Err(OracleError::TooManyCosets(expected));
    }
    let mut seen = vec![false; degree];
    let mut h_orbits = Vec::new();
    for a in 0..degree as u32 {
        if !seen[a as usize] {
            let o = h.orbit(a);
            for &b in &o {
                seen[b as usize] = true;
            }
            h_orbits.push(o);
        }
    }
    let id = Perm::identity(degree);
    let mut reps: Vec<(Perm, Word)> = vec![(id.clone(), Word::empty())];
    let mut buckets: BTreeMap<Vec<Vec<u32>>, Vec<usize>> = BTreeMap::new();
    buckets.insert(coset_key(&h_orbits, &id), vec![0]);
    let find = |reps: &[(Perm, Word)], buckets: &BTreeMap<Vec<Vec<u32>>, Vec<usize>>, x: &Perm| -> Result<Option<usize>, OracleError> {
        if let Some(cands) = buckets.get(&coset_key(&h_orbits, x)) {
            for &i in cands {
                if h.contains(&x.mul(&reps[i].0.inv()))? {
                    return Ok(Some(i));
                }
            }
        }
        Ok(None)
    };
    let mut images: Vec<Vec<u32>> = vec![Vec::new(); g_gens.len()];
    let mut i = 0;
    while i < reps.len() {
        for (k, s) in g_gens.iter().enumerate() {
            let x = reps[i].0.mul(s);
            let j = match find(&reps, &buckets, &x)? {
                Some(j) => j,
                None => {
                    let mut w = reps[i].1.clone();
                    w.push(k, false);
                    reps.push((x.clone(), w));
                    if reps.len() > MAX_COSETS {
                        return Err(OracleError::TooManyCosets(reps.len() as u128));
                    }
                    buckets.entry(coset_key(&h_orbits, &x)).or_default().push(reps.len() - 1);
                    reps.len() - 1
                }
            };
            images[k].push(j as u32);
        }
        i += 1;
    }
    if reps.len() as u128 != expected {
        return Err(OracleError::IndexMismatch { found: reps.len(), expected });
    }
    let g_action = images.into_iter().map(Perm::from_images).collect::<Result<Vec<_>, _>>().map_err(|_| OracleError::Inconsistent("coset images"))?;
    let mut h_action = Vec::with_capacity(h_gens.len());
    for y in h_gens {
        let mut img = Vec::with_capacity(reps.len());
        for (r, _) in &reps {
            img.push(find(&reps, &buckets, &r.mul(y))?.ok_or(OracleError::Inconsistent("coset of H-image"))? as u32);
        }
        h_action.push(Perm::from_images(img).map_err(|_| OracleError::Inconsistent("H on cosets"))?);
    }
    Ok(CosetAction { degree: reps.len(), g_action, h_action, reps: reps.into_iter().map(|(_, w)| w).collect() })
}

/// `H`-orbits on `base·G`, each sorted, ordered by `(length, least point)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveOrbits<P> {
    pub points: usize,
    pub orbits: Vec<Vec<P>>,
}

impl<P> ExhaustiveOrbits<P> {
    pub fn lengths(&self) -> Vec<u64> {
        self.orbits.iter().map(|o| o.len() as u64).collect()
    }

    pub fn stabilizer_orders(&self, h_order: &BigUint) -> Vec<BigUint> {
        self.orbits.iter().map(|o| h_order / BigUint::from(o.len())).collect()
    }
}

fn closure<P: Point, T: Acts<P>>(start: &P, gens: &[T]) -> Vec<P> {
    let mut seen = new_set();
    seen.insert(start.clone());
    let mut out = vec![start.clone()];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let y = g.act(&out[i]);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

pub fn exhaustive_orbits<P: Point, T: Acts<P>>(g_gens: &[T], h_gens: &[T], base: &P) -> ExhaustiveOrbits<P> {
    let mut all = closure(base, g_gens);
    all.sort();
    let mut seen = new_set();
    let mut orbits = Vec::new();
    for x in &all {
        if seen.contains(x) {
            continue;
        }
        let mut o = closure(x, h_gens);
        for y in &o {
            seen.insert(y.clone());
        }
        o.sort();
        orbits.push(o);
    }
    orbits.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a[0].cmp(&b[0])));
    ExhaustiveOrbits { points: all.len(), orbits }
}

/// Orbital matrices `A_j[x][y] = 1` iff `(x, y)` lies in the `G`-orbit of `(base, y_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalBasis {
    pub n: usize,
    pub base: u32,
    pub orbit_of: Vec<usize>,
    pub reps: Vec<u32>,
    pub lengths: Vec<u64>,
    pub matrices: Vec<Vec<Vec<u8>>>,
}

impl OrbitalBasis {
    pub fn rank(&self) -> usize {
        self.matrices.len()
    }

    /// `j*` with `A_j^T = A_{j*}`.
    pub fn pairing(&self) -> Vec<usize> {
        self.reps.iter().map(|&y| self.orbit_of_transpose(y)).collect()
    }

    fn orbit_of_transpose(&self, y: u32) -> usize {
        let j = self.orbit_of[y as usize];
        let col: Vec<usize> = (0..self.n).filter(|&x| self.matrices[j][x][self.base as usize] == 1).collect();
        self.orbit_of[col[0]]
    }

    /// `tr(A_j A_k)` on the permutation module.
    pub fn trace_form(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        let mut t = vec![vec![0i64; r]; r];
        for j in 0..r {
            for k in 0..r {
                let (a, b) = (&self.matrices[j], &self.matrices[k]);
                t[j][k] = (0..self.n).map(|x| (0..self.n).map(|y| (a[x][y] * b[y][x]) as i64).sum::<i64>()).sum();
            }
        }
        t
    }

    fn product(&self, i: usize, j: usize) -> Vec<Vec<i64>> {
        let (a, b) = (&self.matrices[i], &self.matrices[j]);
        let n = self.n;
        let mut c = vec![vec![0i64; n]; n];
        for x in 0..n {
            for z in 0..n {
                if a[x][z] == 0 {
                    continue;
                }
                for y in 0..n {
                    c[x][y] += b[z][y] as i64;
                }
            }
        }
        c
    }
}

/// Orbital basis of the commutant of a transitive permutation action whose
/// point stabilizer is generated by `h_action`.
pub fn commutant_basis(g_action: &[Perm], h_action: &[Perm], base: u32) -> Result<OrbitalBasis, OracleError> {
    let n = g_action.first().map(|g| g.degree()).unwrap_or(1);
    if h_action.iter().any(|h| h.image(base) != base) {
        return Err(OracleError::Inconsistent("H does not fix the base point"));
    }
    let orbits = exhaustive_orbits::<u32, Perm>(g_action, h_action, &base);
    if orbits.points != n {
        return Err(OracleError::Inconsistent("action is not transitive"));
    }
    let mut orbit_of = vec![0usize; n];
    for (j, o) in orbits.orbits.iter().enumerate() {
        for &y in o {
            orbit_of[y as usize] = j;
        }
    }
    // t[x] maps base to x
    let mut t: Vec<Option<Perm>> = vec![None; n];
    t[base as usize] = Some(Perm::identity(n));
    let mut queue = vec![base];
    let mut qi = 0;
    while qi < queue.len() {
        let x = queue[qi];
        qi += 1;
        let tx = t[x as usize].clone().unwrap_or_else(|| Perm::identity(n));
        for g in g_action {
            let y = g.image(x);
            if t[y as usize].is_none() {
                t[y as usize] = Some(tx.mul(g));
                queue.push(y);
            }
        }
    }
    let r = orbits.orbits.len();
    let mut matrices = vec![vec![vec![0u8; n]; n]; r];
    for x in 0..n {
        let tinv = t[x].as_ref().ok_or(OracleError::Inconsistent("transversal"))?.inv();
        for y in 0..n {
            matrices[orbit_of[tinv.image(y as u32) as usize]][x][y] = 1;
        }
    }
    for a in &matrices {
        for g in g_action {
            for x in 0..n {
                for y in 0..n {
                    if a[x][y] != a[g.image(x as u32) as usize][g.image(y as u32) as usize] {
                        return Err(OracleError::Inconsistent("orbital matrix does not commute with G"));
                    }
                }
            }
        }
    }
    Ok(OrbitalBasis {
        n,
        base,
        orbit_of,
        reps: orbits.orbits.iter().map(|o| o[0]).collect(),
        lengths: orbits.lengths(),
        matrices,
    })
}

/// `P_j[i][k] = p_ijk` read off explicit products `A_i A_j = Σ_k p_ijk A_k`,
/// with every entry of every product checked.
pub fn intersection_matrices(b: &OrbitalBasis) -> Result<Vec<IntMatrix>, OracleError> {
    let r = b.rank();
    let mut out = vec![IntMatrix::zeros(r, r); r];
    for i in 0..r {
        for j in 0..r {
            let c = b.product(i, j);
            let coeff: Vec<i64> = b.reps.iter().map(|&y| c[b.base as usize][y as usize]).collect();
            for x in 0..b.n {
                for y in 0..b.n {
                    let expect: i64 = (0..r).map(|k| coeff[k] * b.matrices[k][x][y] as i64).sum();
                    if c[x][y] != expect {
                        return Err(OracleError::Inconsistent("product is not in the span of the orbitals"));
                    }
                }
            }
            for (k, &v) in coeff.iter().enumerate() {
                out[j].set(i, k, BigInt::from(v));
            }
        }
    }
    Ok(out)
}

/// Product in `E` of coordinate vectors over the orbital basis.
fn algebra_mul(p: &[IntMatrix], x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let r = p.len();
    let mut out = vec![Rational::zero(); r];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let c = xi * yj;
            for k in 0..r {
                let v = p[j].get(i, k);
                if !v.is_zero() {
                    out[k] += &c * Rational::from_integer(v.clone());
                }
            }
        }
    }
    out
}

/// The unique `x` with `x·K = target`, if any.
fn solve_left(k: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = k.to_vec();
    rows.push(target.to_vec());
    let m = QMatrix::from_rows(rows).ok()?;
    let ker = m.left_kernel();
    let d = k.len();
    let v = ker.iter().find(|v| !v[d].is_zero())?;
    let s = -v[d].clone();
    Some(v[..d].iter().map(|c| c / &s).collect())
}

/// Character table of `E` from traces on the permutation module: central
/// primitive idempotents `ε` of a separating central element give
/// `χ(1) = tr(ε)/m` and `φ(A_j) = tr(A_j ε)/χ(1)`, with `m² = dim Eε`.
pub fn character_table_by_traces(b: &OrbitalBasis, p: &[IntMatrix], seed: u64) -> Result<EndoCharTable, OracleError> {
    let r = b.rank();
    let base = b.base as usize;
    // centre: combinations whose commutator with every A_j has zero base row
    let mut comm = Vec::with_capacity(r);
    for k in 0..r {
        let mut row = Vec::with_capacity(r * b.n);
        for j in 0..r {
            let (kj, jk) = (b.product(k, j), b.product(j, k));
            row.extend((0..b.n).map(|y| Rational::from_integer(BigInt::from(kj[base][y] - jk[base][y]))));
        }
        comm.push(row);
    }
    let centre = RowSpace::from_vectors(r, QMatrix::from_rows(comm)?.left_kernel()).to_rref();
    let zb: Vec<Vec<Rational>> = centre.rows().to_vec();
    let t = zb.len();
    let trace = b.trace_form();
    let tr_with = |j: usize, x: &[Rational]| -> Rational { (0..r).map(|k| &x[k] * Rational::from_integer(BigInt::from(trace[j][k]))).sum() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let coeffs: Vec<i64> = (0..t).map(|_| rng.gen_range(-4..=4)).collect();
        let mut z = vec![Rational::zero(); r];
        for (c, v) in coeffs.iter().zip(&zb) {
            for k in 0..r {
                z[k] += Rational::from_integer(BigInt::from(*c)) * &v[k];
            }
        }
        let mut m = QMatrix::zeros(t, t);
        for (i, v) in zb.iter().enumerate() {
            let coords = centre.coordinates_rref(&algebra_mul(p, v, &z))?;
            for (k, c) in coords.into_iter().enumerate() {
                m.set(i, k, c);
            }
        }
        let den = m.to_rows().iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let scale = Rational::from_integer(den);
        let z: Vec<Rational> = z.iter().map(|q| q * &scale).collect();
        let mi = IntMatrix::from_rows(m.to_rows().iter().map(|row| row.iter().map(|q| (q * &scale).to_integer()).collect()).collect())?;
        let m = mi.to_rational();
        let fac = factor_over_z(&mi.char_poly())?;
        if fac.factors.iter().any(|(_, e)| *e > 1) {
            continue;
        }
        let mut rows = Vec::new();
        for (f, _) in &fac.factors {
            let deg = f.degree().unwrap_or(0);
            if deg > 2 {
                return Err(OracleError::UnsupportedShape(deg));
            }
            let ideal: Vec<Vec<Rational>> = m.eval_poly(f).left_kernel();
            if ideal.len() != deg {
                return Err(OracleError::Inconsistent("ideal dimension"));
            }
            // ideal elements in E coordinates
            let to_e = |c: &[Rational]| -> Vec<Rational> {
                let mut e = vec![Rational::zero(); r];
                for (ci, v) in c.iter().zip(&zb) {
                    for k in 0..r {
                        e[k] += ci * &v[k];
                    }
                }
                e
            };
            let us: Vec<Vec<Rational>> = ideal.iter().map(|c| to_e(c)).collect();
            let kmat: Vec<Vec<Rational>> = us.iter().map(|us_| us.iter().flat_map(|ut| algebra_mul(p, us_, ut)).collect()).collect();
            let target: Vec<Rational> = us.iter().flatten().cloned().collect();
            let alpha = solve_left(&kmat, &target).ok_or(OracleError::Inconsistent("no idempotent in ideal"))?;
            let mut eps = vec![Rational::zero(); r];
            for (a, u) in alpha.iter().zip(&us) {
                for k in 0..r {
                    eps[k] += a * &u[k];
                }
            }
            let e_dim = {
                let unit = |i: usize| -> Vec<Rational> { (0..r).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect() };
                let prods: Vec<Vec<Rational>> = (0..r).map(|i| algebra_mul(p, &unit(i), &eps)).collect();
                QMatrix::from_rows(prods)?.rank()
            };
            let msq = e_dim / deg;
            let mult = (msq as f64).sqrt().round() as usize;
            if mult * mult * deg != e_dim || mult == 0 {
                return Err(OracleError::Inconsistent("ideal dimension is not deg·m²"));
            }
            let chi1 = tr_with(0, &eps) / Rational::from_integer(BigInt::from(mult * deg));
            if !chi1.is_integer() || !chi1.is_positive() {
                return Err(OracleError::Inconsistent("degree is not a positive integer"));
            }
            let degree = chi1.to_integer().to_u64();
            let s: Vec<Rational> = (0..r).map(|j| tr_with(j, &eps) / &chi1).collect();
            if deg == 1 {
                let values = s.into_iter().map(QuadraticNumber::rational).collect();
                rows.push(CharRow { values, mult, degree, conjugate_of: None, fitting: None });
                continue;
            }
            // f = X² + bX + c, eigenvalue λ = (−b + k√d)/2 with k > 0
            let co = f.coeffs();
            let (c0, b1) = (co[0].clone(), co[1].clone());
            let disc = &b1 * &b1 - BigInt::from(4) * &c0;
            let (k, d) = square_split(&disc).ok_or(OracleError::Inconsistent("square discriminant"))?;
            let lam_a = Rational::new(-b1, BigInt::from(2));
            let lam_b = Rational::new(k.abs(), BigInt::from(2));
            let zeps = algebra_mul(p, &z, &eps);
            let two = Rational::from_integer(BigInt::from(2));
            let dq = Rational::from_integer(BigInt::from(d));
            let mut plus = Vec::with_capacity(r);
            for j in 0..r {
                let a = &s[j] / &two;
                let u = tr_with(j, &zeps) / &chi1;
                let beta = (u - &two * &lam_a * &a) / (&two * &lam_b * &dq);
                plus.push(QuadraticNumber::new(a, beta, d)?);
            }
            let minus = plus.iter().map(|v| v.conj()).collect();
            rows.push(CharRow { values: plus, mult, degree, conjugate_of: None, fitting: None });
            rows.push(CharRow { values: minus, mult, degree, conjugate_of: None, fitting: None });
        }
        let mut table = EndoCharTable { rows };
        table.canonicalize(&b.lengths);
        return Ok(table);
    }
    Err(OracleError::NoGenericElement)
}

/// Decomposition of the permutation module over `F_p` into indecomposables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectDecomposition {
    pub p: u64,
    /// Dimensions of the pairwise non-isomorphic summands `Y_S`.
    pub summand_dims: Vec<usize>,
    /// Multiplicity of each `Y_S`, which is `dim S` for the simple `E_F`-module `S`.
    pub simple_dims: Vec<usize>,
    /// `dim Hom_G(Y_S, Y_T)`.
    pub cartan: Vec<Vec<usize>>,
    pub local: bool,
}

pub fn direct_endo_decomposition<R: Rng + ?Sized>(b: &OrbitalBasis, g_action: &[Perm], p: u64, rng: &mut R) -> Result<DirectDecomposition, OracleError> {
    let p8 = gfmat::check_prime(p)?;
    let n = b.n;
    let actions = g_action.iter().map(|g| FqMatrix::permutation(p8, g)).collect();
    let module = ModuleRep::new(p, n, actions)?;
    let end = b
        .matrices
        .iter()
        .map(|a| {
            let flat: Vec<i64> = a.iter().flatten().map(|&x| x as i64).collect();
            FqMatrix::from_i64(p8, n, n, &flat)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let parts = gfmat::summands(&module, Some(&end), rng)?;
    let mut cartan = vec![vec![0usize; parts.len()]; parts.len()];
    for (s, ps) in parts.iter().enumerate() {
        for (t, pt) in parts.iter().enumerate() {
            cartan[s][t] = gfmat::hom_basis(&ps.rep, &pt.rep)?.len();
        }
    }
    let local = parts.len() == 1 && parts[0].multiplicity == 1;
    Ok(DirectDecomposition {
        p,
        summand_dims: parts.iter().map(|s| s.dim()).collect(),
        simple_dims: parts.iter().map(|s| s.multiplicity).collect(),
        cartan,
        local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitchar::character_table;

    fn sym(n: usize) -> Vec<Perm> {
        let c: Vec<u32> = (0..n as u32).collect();
        vec![Perm::from_cycles(n, &[&[0, 1]]).unwrap(), Perm::from_cycles(n, &[&c]).unwrap()]
    }

    fn stab(n: usize, gens: &[Perm], point: u32) -> Vec<Perm> {
        GeneratedGroup::new(n, gens.to_vec()).unwrap().build_chain().stabilizer(point).unwrap().generators().to_vec()
    }

    /// PSL(2,11) on 11 points.
    fn l2_11() -> Vec<Perm> {
        vec![
            Perm::from_cycles(11, &[&[1, 9], &[2, 3], &[4, 8], &[5, 6]]).unwrap(),
            Perm::from_cycles(11, &[&[0, 1, 10], &[2, 4, 9], &[5, 7, 8]]).unwrap(),
        ]
    }

    #[test]
    fn trivial_and_natural_coset_actions() {
        let g = sym(5);
        let a = coset_action(5, &g, &g).unwrap();
        assert_eq!(a.degree, 1);
        let a = coset_action(5, &g, &stab(5, &g, 4)).unwrap();
        assert_eq!(a.degree, 5);
        let b = commutant_basis(&a.g_action, &a.h_action, 0).unwrap();
        assert_eq!(b.lengths, vec![1, 4]);
        let p = intersection_matrices(&b).unwrap();
        assert_eq!(p[1], IntMatrix::from_i64(&[vec![0, 1], vec![4, 3]]).unwrap());
    }

    #[test]
    fn l2_11_on_a5_cosets_is_two_transitive() {
        let g = l2_11();
        let h = stab(11, &g, 0);
        assert_eq!(GeneratedGroup::new(11, h.clone()).unwrap().build_chain().order().unwrap(), BigUint::from(60u32));
        let a = coset_action(11, &g, &h).unwrap();
        assert_eq!(a.degree, 11);
        let b = commutant_basis(&a.g_action, &a.h_action, 0).unwrap();
        assert_eq!(b.rank(), 2);
        // every ordered pair of distinct points is reached
        let pairs = exhaustive_orbits::<(u32, u32), PairAct>(&a.g_action.iter().cloned().map(PairAct).collect::<Vec<_>>(), &[], &(0, 1));
        assert_eq!(pairs.points, 110);
    }

    #[derive(Clone)]
    struct PairAct(Perm);
    impl Acts<(u32, u32)> for PairAct {
        fn act(&self, x: &(u32, u32)) -> (u32, u32) {
            (self.0.image(x.0), self.0.image(x.1))
        }
    }

    #[test]
    fn orbitals_sum_to_all_ones_and_rank_matches_character_norm() {
        // S6 on 2-subsets through the coset action of S2 × S4
        let g = sym(6);
        let h = vec![Perm::from_cycles(6, &[&[0, 1]]).unwrap(), Perm::from_cycles(6, &[&[2, 3]]).unwrap(), Perm::from_cycles(6, &[&[2, 3, 4, 5]]).unwrap()];
        let a = coset_action(6, &g, &h).unwrap();
        assert_eq!(a.degree, 15);
        let b = commutant_basis(&a.g_action, &a.h_action, 0).unwrap();
        assert_eq!(b.lengths, vec![1, 6, 8]);
        for x in 0..b.n {
            for y in 0..b.n {
                assert_eq!(b.matrices.iter().map(|m| m[x][y]).sum::<u8>(), 1);
            }
        }
        // rank = ⟨π, π⟩ = average number of fixed points squared over G
        let all = GeneratedGroup::new(15, a.g_action.clone()).unwrap().build_chain().elements().unwrap();
        let s: usize = all.iter().map(|x| (0..15).filter(|&i| x.image(i) == i).count().pow(2)).sum();
        assert_eq!(s / all.len(), b.rank());
        assert_eq!(b.pairing(), vec![0, 1, 2]);
    }

    #[test]
    fn trace_table_matches_splitting() {
        let g = sym(6);
        let h = vec![Perm::from_cycles(6, &[&[0, 1]]).unwrap(), Perm::from_cycles(6, &[&[2, 3]]).unwrap(), Perm::from_cycles(6, &[&[2, 3, 4, 5]]).unwrap()];
        let a = coset_action(6, &g, &h).unwrap();
        let b = commutant_basis(&a.g_action, &a.h_action, 0).unwrap();
        let p = intersection_matrices(&b).unwrap();
        let t = character_table_by_traces(&b, &p, 1).unwrap();
        let mut s = character_table(&p, &b.lengths).unwrap();
        s.canonicalize(&b.lengths);
        let degs: Vec<Option<u64>> = t.rows.iter().map(|r| r.degree).collect();
        assert_eq!(degs, vec![Some(1), Some(5), Some(9)]);
        assert_eq!(t.rows.iter().map(|r| &r.values).collect::<Vec<_>>(), s.rows.iter().map(|r| &r.values).collect::<Vec<_>>());
    }

    #[test]
    fn quadratic_rows_from_traces() {
        // the dihedral group of order 10 on 5 points has rank 3 with values in Q(√5)
        let r = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        let s = Perm::from_cycles(5, &[&[1, 4], &[2, 3]]).unwrap();
        let b = commutant_basis(&[r, s.clone()], &[s], 0).unwrap();
        let p = intersection_matrices(&b).unwrap();
        let t = character_table_by_traces(&b, &p, 2).unwrap();
        let mut sp = character_table(&p, &b.lengths).unwrap();
        sp.canonicalize(&b.lengths);
        assert_eq!(t.rows.len(), 3);
        for (x, y) in t.rows.iter().zip(&sp.rows) {
            assert_eq!(x.values, y.values);
            assert_eq!(x.mult, y.mult);
        }
        assert_eq!(t.rows.iter().map(|r| r.degree.unwrap()).collect::<Vec<_>>(), vec![1, 2, 2]);
    }

    #[test]
    fn direct_decomposition_of_s5_natural() {
        let g = sym(5);
        let a = coset_action(5, &g, &stab(5, &g, 4)).unwrap();
        let b = commutant_basis(&a.g_action, &a.h_action, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d5 = direct_endo_decomposition(&b, &a.g_action, 5, &mut rng).unwrap();
        assert!(d5.local);
        assert_eq!(d5.cartan, vec![vec![2]]);
        let d3 = direct_endo_decomposition(&b, &a.g_action, 3, &mut rng).unwrap();
        assert!(!d3.local);
        assert_eq!(d3.simple_dims, vec![1, 1]);
        let mut dims = d3.summand_dims.clone();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 4]);
    }

    #[test]
    fn rank_one_is_local() {
        let g = sym(4);
        let a = coset_action(4, &g, &g).unwrap();
        let b = commutant_basis(&a.g_action, &a.h_action, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(direct_endo_decomposition(&b, &a.g_action, 2, &mut rng).unwrap().local);
    }

    #[test]
    fn vector_orbits() {
        use crate::gfmat::FqVec;
        // S4 permuting coordinates of F_2^4 from the base point e_0
        let g: Vec<FqMatrix> = sym(4).iter().map(|x| FqMatrix::permutation(2, x)).collect();
        let h: Vec<FqMatrix> = stab(4, &sym(4), 0).iter().map(|x| FqMatrix::permutation(2, x)).collect();
        let e0 = FqVec::unit(2, 4, 0);
        let o = exhaustive_orbits(&g, &h, &e0);
        assert_eq!(o.points, 4);
        assert_eq!(o.lengths(), vec![1, 3]);
    }
}
