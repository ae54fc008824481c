//! Endomorphisms, indecomposable summands and Cartan matrices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::meataxe::{chop, chop_into, ConstituentLibrary};
use super::{Echelon, FqMatrix, FqVec, GfError, ModuleRep};
use crate::fppoly::FpPoly;

/// Random endomorphisms tried per summand before giving up.
pub const SPLIT_BUDGET: usize = 64;

/// Basis of `Hom(a, b)`: matrices `X` with `A_i X = X B_i` for every generator.
pub fn hom_basis(a: &ModuleRep, b: &ModuleRep) -> Result<Vec<FqMatrix>, GfError> {
    if a.p() != b.p() || a.ngens() != b.ngens() {
        return Err(GfError::Dimension("hom between incompatible modules"));
    }
    let p = a.p();
    let (m, n) = (a.dim(), b.dim());
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let g = a.ngens();
    // unknown (k, l) is X[k][l]; equation (s, i, j) is (A_s X - X B_s)[i][j]
    let cols = g * m * n;
    let mut rows = Vec::with_capacity(m * n);
    for k in 0..m {
        for l in 0..n {
            let mut r = FqVec::zero(p, cols);
            for s in 0..g {
                let (aa, bb) = (&a.actions()[s], &b.actions()[s]);
                let off = s * m * n;
                for i in 0..m {
                    let c = aa.get(i, k);
                    if c != 0 {
                        let idx = off + i * n + l;
                        r.set(idx, ((r.get(idx) as u16 + c as u16) % p as u16) as u8);
                    }
                }
                for j in 0..n {
                    let c = bb.get(l, j);
                    if c != 0 {
                        let idx = off + k * n + j;
                        r.set(idx, ((r.get(idx) as u16 + (p - c) as u16) % p as u16) as u8);
                    }
                }
            }
            rows.push(r);
        }
    }
    let sys = FqMatrix::from_rows(p, cols, rows);
    let null = if g == 0 { (0..m * n).map(|i| FqVec::unit(p, m * n, i)).collect() } else { sys.left_nullspace() };
    let null = Echelon::from_vectors(p, m * n, &null).to_rref();
    Ok(null.rows().iter().map(|v| unflatten(p, m, n, v)).collect())
}

fn unflatten(p: u8, m: usize, n: usize, v: &FqVec) -> FqMatrix {
    let rows = (0..m).map(|k| FqVec::from_entries(p, &(0..n).map(|l| v.get(k * n + l)).collect::<Vec<_>>())).collect();
    FqMatrix::from_rows(p, n, rows)
}

fn flatten(x: &FqMatrix) -> FqVec {
    let mut out = FqVec::zero(x.p(), 0);
    for r in x.rows() {
        out = out.concat(r);
    }
    out
}

pub fn endomorphism_basis(m: &ModuleRep) -> Result<Vec<FqMatrix>, GfError> {
    hom_basis(m, m)
}

/// Right regular representation of the algebra spanned by `basis`:
/// row `i` of the `k`-th matrix holds the coordinates of `basis[i] · basis[k]`.
pub fn algebra_regular_module(p: u8, basis: &[FqMatrix]) -> Result<ModuleRep, GfError> {
    let e = basis.len();
    let flat: Vec<FqVec> = basis.iter().map(flatten).collect();
    let len = flat.first().map(|v| v.len()).unwrap_or(0);
    let ech = Echelon::from_vectors(p, len, &flat);
    if ech.dim() != e {
        return Err(GfError::Dimension("algebra basis is linearly dependent"));
    }
    // coordinates w.r.t. `basis` itself: solve through the matrix of flattened vectors
    let coords = |x: &FqMatrix| -> Result<Vec<u8>, GfError> { solve_in_span(p, &flat, &flatten(x)) };
    let mut actions = Vec::with_capacity(e);
    for bk in basis {
        let rows = basis
            .iter()
            .map(|bi| Ok(FqVec::from_entries(p, &coords(&bi.mul_mat(bk))?)))
            .collect::<Result<Vec<_>, GfError>>()?;
        actions.push(FqMatrix::from_rows(p, e, rows));
    }
    ModuleRep::new(p as u64, e, actions)
}

/// Coefficients `c` with `Σ c_i span[i] = v`.
fn solve_in_span(p: u8, span: &[FqVec], v: &FqVec) -> Result<Vec<u8>, GfError> {
    let k = span.len();
    let rows: Vec<FqVec> = span.iter().enumerate().map(|(i, s)| s.concat(&FqVec::unit(p, k, i))).collect();
    let n = v.len();
    let mut ech = Echelon::new(p, n + k);
    for r in rows {
        ech.insert(r);
    }
    let mut w = v.concat(&FqVec::zero(p, k));
    ech.reduce(&mut w);
    if (0..n).any(|i| w.get(i) != 0) {
        return Err(GfError::NotInvariant);
    }
    // w = v - Σ c_i span[i] recorded as -c in the tail
    Ok((0..k).map(|i| super::neg_u8(w.get(n + i), p)).collect())
}

/// An algebra given by its regular module is local iff the regular module has
/// a single simple constituent `S` with `dim S = dim End(S)`.
pub fn is_local_algebra<R: Rng + ?Sized>(regular: &ModuleRep, rng: &mut R) -> Result<bool, GfError> {
    let cs = chop(regular, rng)?;
    if cs.len() != 1 {
        return Ok(false);
    }
    Ok(endomorphism_basis(&cs[0].rep)?.len() == cs[0].dim())
}

/// A direct summand of the input module.
#[derive(Debug, Clone)]
pub struct Summand {
    pub rep: ModuleRep,
    /// Basis of the summand inside the input module, one copy.
    pub basis: Vec<FqVec>,
    pub multiplicity: usize,
    pub end_basis: Vec<FqMatrix>,
}

impl Summand {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// Regular module of an algebra from its right multiplication matrices
/// (`b_i · b_k = Σ_l R_k[i][l] b_l`), with the left multiplications as an
/// endomorphism basis.
pub fn regular_module_from_basis(p: u64, right: &[FqMatrix]) -> Result<(ModuleRep, Vec<FqMatrix>), GfError> {
    let e = right.len();
    let p8 = super::check_prime(p)?;
    let m = ModuleRep::new(p, e, right.to_vec())?;
    let left = (0..e)
        .map(|i| FqMatrix::from_rows(p8, e, (0..e).map(|k| right[k].row(i).clone()).collect()))
        .collect();
    Ok((m, left))
}

/// Indecomposable summands with multiplicities, obtained by repeatedly
/// splitting along primary components of random endomorphisms.
pub fn summands<R: Rng + ?Sized>(
    m: &ModuleRep,
    end_basis: Option<&[FqMatrix]>,
    rng: &mut R,
) -> Result<Vec<Summand>, GfError> {
    let p = m.p();
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let end = match end_basis {
        Some(e) => e.to_vec(),
        None => endomorphism_basis(m)?,
    };
    let full: Vec<FqVec> = (0..n).map(|i| FqVec::unit(p, n, i)).collect();
    let mut work = vec![(full, m.clone(), end)];
    let mut pieces: Vec<(Vec<FqVec>, ModuleRep, Vec<FqMatrix>)> = Vec::new();
    while let Some((basis, rep, end)) = work.pop() {
        if rep.dim() == 1 || is_local_algebra(&algebra_regular_module(p, &end)?, rng)? {
            pieces.push((basis, rep, end));
            continue;
        }
        let parts = split_once(&rep, &end, SPLIT_BUDGET, rng)?;
        for (sub, sub_rep, sub_end) in parts {
            // express the piece in the coordinates of the original module
            let emb: Vec<FqVec> = sub.iter().map(|v| combine(p, v, &basis)).collect();
            work.push((emb, sub_rep, sub_end));
        }
    }
    pieces.sort_by_key(|(b, _, _)| core::cmp::Reverse(b.len()));
    let mut out: Vec<Summand> = Vec::new();
    for (basis, rep, end) in pieces {
        let mut matched = false;
        for s in out.iter_mut() {
            if isomorphic_indecomposables(&s.rep, &rep)? {
                s.multiplicity += 1;
                matched = true;
                break;
            }
        }
        if !matched {
            out.push(Summand { rep, basis, multiplicity: 1, end_basis: end });
        }
    }
    Ok(out)
}

fn combine(p: u8, coeffs: &FqVec, basis: &[FqVec]) -> FqVec {
    let mut out = FqVec::zero(p, basis[0].len());
    for (i, b) in basis.iter().enumerate() {
        out.add_scaled(b, coeffs.get(i));
    }
    out
}

type Piece = (Vec<FqVec>, ModuleRep, Vec<FqMatrix>);

/// Splits a decomposable module into primary components of one random endomorphism.
fn split_once<R: Rng + ?Sized>(m: &ModuleRep, end: &[FqMatrix], budget: usize, rng: &mut R) -> Result<Vec<Piece>, GfError> {
    let p = m.p();
    let n = m.dim();
    for _ in 0..budget {
        let mut theta = FqMatrix::zero(p, n, n);
        for phi in end {
            theta.add_scaled_mat(phi, rng.gen_range(0..p));
        }
        let factors = theta.char_poly().factor();
        if factors.len() < 2 {
            continue;
        }
        let bases: Vec<Vec<FqVec>> = factors
            .iter()
            .map(|(f, e)| {
                let g = (1..*e).fold(f.clone(), |acc, _| acc.mul(f));
                generalized_kernel(&theta, &g)
            })
            .collect();
        let stacked: Vec<FqVec> = bases.iter().flatten().cloned().collect();
        let binv = FqMatrix::from_rows(p, n, stacked).inverse()?;
        let mut out = Vec::with_capacity(bases.len());
        let mut offset = 0;
        for basis in &bases {
            let d = basis.len();
            let range: Vec<usize> = (offset..offset + d).collect();
            let project = |v: &FqVec| binv.apply(v).select(&range);
            let rep_actions = m
                .actions()
                .iter()
                .map(|a| FqMatrix::from_rows(p, d, basis.iter().map(|b| project(&a.apply(b))).collect()))
                .collect();
            let sub_rep = ModuleRep::new(p as u64, d, rep_actions)?;
            let proj_end: Vec<FqVec> = end
                .iter()
                .map(|phi| flatten(&FqMatrix::from_rows(p, d, basis.iter().map(|b| project(&phi.apply(b))).collect())))
                .collect();
            let sub_end = Echelon::from_vectors(p, d * d, &proj_end)
                .to_rref()
                .rows()
                .iter()
                .map(|v| unflatten(p, d, d, v))
                .collect();
            out.push((basis.clone(), sub_rep, sub_end));
            offset += d;
        }
        return Ok(out);
    }
    Err(GfError::BudgetExhausted(budget))
}

fn generalized_kernel(theta: &FqMatrix, g: &FpPoly) -> Vec<FqVec> {
    theta.eval_poly(g).left_nullspace()
}

/// Indecomposables `a ≅ b` iff some `f ∈ Hom(a,b)`, `g ∈ Hom(b,a)` have `f·g` invertible.
pub fn isomorphic_indecomposables(a: &ModuleRep, b: &ModuleRep) -> Result<bool, GfError> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    let fs = hom_basis(a, b)?;
    if fs.is_empty() {
        return Ok(false);
    }
    let gs = hom_basis(b, a)?;
    for f in &fs {
        for g in &gs {
            if f.mul_mat(g).rank() == a.dim() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Cartan invariants of an algebra computed from its regular module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    pub labels: Vec<String>,
    pub simple_dims: Vec<usize>,
    pub end_dims: Vec<usize>,
    /// `matrix[i][j]` = multiplicity of simple `j` in the projective cover of simple `i`.
    pub matrix: Vec<Vec<usize>>,
    pub projective_dims: Vec<usize>,
    /// Composition multiplicity of each simple in the regular module.
    pub regular_multiplicities: Vec<usize>,
    /// Multiplicity of each projective indecomposable as a summand.
    pub summand_multiplicities: Vec<usize>,
}

impl CartanData {
    pub fn is_symmetric(&self) -> bool {
        let t = self.matrix.len();
        (0..t).all(|i| (0..t).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    /// Whether `dim P_S = [E : S]` for every simple `S`.
    pub fn projective_dims_match(&self) -> bool {
        self.projective_dims == self.regular_multiplicities
    }
}

/// Cartan matrix of the algebra whose regular module is `regular`.
pub fn cartan_matrix<R: Rng + ?Sized>(
    regular: &ModuleRep,
    end_basis: Option<&[FqMatrix]>,
    rng: &mut R,
) -> Result<CartanData, GfError> {
    let mut lib = ConstituentLibrary::new();
    chop_into(regular, &mut lib, rng)?;
    let t = lib.constituents().len();
    let regular_multiplicities: Vec<usize> = lib.constituents().iter().map(|c| c.multiplicity).collect();
    let parts = summands(regular, end_basis, rng)?;
    let mut matrix = vec![vec![0usize; t]; t];
    let mut projective_dims = vec![0usize; t];
    let mut summand_multiplicities = vec![0usize; t];
    let mut seen = vec![false; t];
    for part in &parts {
        let heads: Vec<usize> = (0..t)
            .filter(|&j| hom_basis(&part.rep, &lib.constituents()[j].rep).map(|h| !h.is_empty()).unwrap_or(false))
            .collect();
        if heads.len() != 1 {
            return Err(GfError::Dimension("summand is not a projective indecomposable"));
        }
        let i = heads[0];
        if seen[i] {
            return Err(GfError::Dimension("two projective covers for one simple"));
        }
        seen[i] = true;
        let before = t;
        let mut probe = lib.clone();
        let found = chop_into(&part.rep, &mut probe, rng)?;
        if probe.constituents().len() != before {
            return Err(GfError::Dimension("summand has a constituent missing from the regular module"));
        }
        for j in found {
            matrix[i][j] += 1;
        }
        projective_dims[i] = part.dim();
        summand_multiplicities[i] = part.multiplicity;
    }
    if seen.iter().any(|s| !s) {
        return Err(GfError::Dimension("simple without a projective cover"));
    }
    let cs = lib.constituents();
    let end_dims = cs.iter().map(|c| endomorphism_basis(&c.rep).map(|b| b.len())).collect::<Result<Vec<_>, _>>()?;
    Ok(CartanData {
        labels: cs.iter().map(|c| c.label.clone()).collect(),
        simple_dims: cs.iter().map(|c| c.dim()).collect(),
        end_dims,
        matrix,
        projective_dims,
        regular_multiplicities,
        summand_multiplicities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{GroupElem, Perm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    /// Group algebra `F_p[G]` for `G` given by all its elements (first is the identity).
    fn group_algebra(p: u8, elems: &[Perm], gens: &[Perm]) -> (ModuleRep, Vec<FqMatrix>) {
        let idx = |x: &Perm| elems.iter().position(|e| e == x).unwrap();
        let n = elems.len();
        let right = |g: &Perm| Perm::from_images(elems.iter().map(|e| idx(&e.mul(g)) as u32).collect()).unwrap();
        let left = |g: &Perm| Perm::from_images(elems.iter().map(|e| idx(&g.mul(e)) as u32).collect()).unwrap();
        let actions = gens.iter().map(|g| FqMatrix::permutation(p, &right(g))).collect();
        let ends = elems.iter().map(|g| FqMatrix::permutation(p, &left(g))).collect();
        (ModuleRep::new(p as u64, n, actions).unwrap(), ends)
    }

    fn cyclic(n: u32) -> (Vec<Perm>, Vec<Perm>) {
        let c: Vec<u32> = (0..n).collect();
        let g = Perm::from_cycles(n as usize, &[&c]).unwrap();
        let elems = (0..n).map(|k| g.pow(k as u64)).collect();
        (elems, vec![g])
    }

    fn s3() -> (Vec<Perm>, Vec<Perm>) {
        let t = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let c = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let grp = crate::permgrp::GeneratedGroup::new(3, vec![t.clone(), c.clone()]).unwrap().build_chain();
        let mut elems = grp.elements().unwrap();
        elems.sort_by_key(|e| !e.is_identity());
        (elems, vec![t, c])
    }

    #[test]
    fn endomorphisms_of_simple_and_permutation_modules() {
        let t = FqMatrix::from_i64(5, 2, 2, &[0, 1, 1, 0]).unwrap();
        let c = FqMatrix::from_i64(5, 2, 2, &[0, 1, -1, -1]).unwrap();
        let m = ModuleRep::new(5, 2, vec![t, c]).unwrap();
        assert_eq!(endomorphism_basis(&m).unwrap().len(), 1);
        // End of the natural S3 permutation module over F5 has dimension = number of orbitals = 2
        let (_, gens) = s3();
        let pm = ModuleRep::new(5, 3, gens.iter().map(|g| FqMatrix::permutation(5, g)).collect()).unwrap();
        let e = endomorphism_basis(&pm).unwrap();
        assert_eq!(e.len(), 2);
        for phi in &e {
            for a in pm.actions() {
                assert_eq!(a.mul_mat(phi), phi.mul_mat(a));
            }
        }
    }

    #[test]
    fn f5_c5_is_local_with_cartan_five() {
        let (elems, gens) = cyclic(5);
        let (m, ends) = group_algebra(5, &elems, &gens);
        let parts = summands(&m, Some(&ends), &mut rng()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].dim(), 5);
        let c = cartan_matrix(&m, Some(&ends), &mut rng()).unwrap();
        assert_eq!(c.matrix, vec![vec![5]]);
        assert!(is_local_algebra(&m, &mut rng()).unwrap());
    }

    #[test]
    fn semisimple_commutative_summands_match_chop() {
        let (elems, gens) = cyclic(4);
        let (m, ends) = group_algebra(5, &elems, &gens);
        let parts = summands(&m, Some(&ends), &mut rng()).unwrap();
        assert_eq!(parts.len(), 4);
        assert!(parts.iter().all(|s| s.dim() == 1 && s.multiplicity == 1));
        let c = cartan_matrix(&m, Some(&ends), &mut rng()).unwrap();
        assert_eq!(c.matrix, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert!(!is_local_algebra(&m, &mut rng()).unwrap());
    }

    #[test]
    fn computed_and_supplied_endomorphisms_agree_in_dimension() {
        let (elems, gens) = s3();
        let (m, ends) = group_algebra(3, &elems, &gens);
        assert_eq!(endomorphism_basis(&m).unwrap().len(), ends.len());
    }

    #[test]
    fn f2_s3_cartan() {
        // F2[S3] = F2[C2]-block (2x2 Cartan [2]) plus the 2-dim simple projective
        let (elems, gens) = s3();
        let (m, ends) = group_algebra(2, &elems, &gens);
        let c = cartan_matrix(&m, Some(&ends), &mut rng()).unwrap();
        let mut pairs: Vec<(usize, usize, usize)> =
            (0..c.labels.len()).map(|i| (c.simple_dims[i], c.matrix[i][i], c.projective_dims[i])).collect();
        pairs.sort();
        assert_eq!(pairs, vec![(1, 2, 2), (2, 1, 2)]);
        assert!(c.is_symmetric());
        assert!(c.projective_dims_match());
    }

    #[test]
    fn f3_s3_cartan_is_all_twos_and_ones() {
        let (elems, gens) = s3();
        let (m, ends) = group_algebra(3, &elems, &gens);
        let c = cartan_matrix(&m, Some(&ends), &mut rng()).unwrap();
        assert_eq!(c.matrix, vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(c.projective_dims, vec![3, 3]);
        assert!(c.projective_dims_match());
    }

    #[test]
    fn indecomposable_input_is_returned_whole() {
        // uniserial F3[C3] regular module
        let (elems, gens) = cyclic(3);
        let (m, _) = group_algebra(3, &elems, &gens);
        let parts = summands(&m, None, &mut rng()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].dim(), 3);
    }

    #[test]
    fn summands_tile_the_module() {
        let (elems, gens) = s3();
        let (m, ends) = group_algebra(5, &elems, &gens);
        let parts = summands(&m, Some(&ends), &mut rng()).unwrap();
        let total: usize = parts.iter().map(|s| s.dim() * s.multiplicity).sum();
        assert_eq!(total, 6);
        for s in &parts {
            assert!(m.is_invariant(&s.basis));
        }
    }

    #[test]
    fn algebra_regular_module_of_scalars() {
        let m = algebra_regular_module(7, &[FqMatrix::identity(7, 3)]).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(m.actions()[0].get(0, 0) == 1);
    }
}
