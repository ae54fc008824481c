//! Module representations: spinning, standard bases, fixed spaces, duals,
//! submodules and quotients.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_prime, Echelon, FqMatrix, FqVec, GfError};

/// Generators of an algebra (or group) acting on `F_p^dim` from the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleRep {
    p: u8,
    dim: usize,
    actions: Vec<FqMatrix>,
}

impl ModuleRep {
    pub fn new(p: u64, dim: usize, actions: Vec<FqMatrix>) -> Result<Self, GfError> {
        let p = check_prime(p)?;
        for a in &actions {
            if a.nrows() != dim || a.ncols() != dim || a.p() != p {
                return Err(GfError::Dimension("action size"));
            }
        }
        Ok(ModuleRep { p, dim, actions })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[FqMatrix] {
        &self.actions
    }

    pub fn ngens(&self) -> usize {
        self.actions.len()
    }

    /// The zero module with the same number of generators.
    pub fn zero_like(&self) -> ModuleRep {
        ModuleRep { p: self.p, dim: 0, actions: vec![FqMatrix::zero(self.p, 0, 0); self.actions.len()] }
    }

    /// Action of the basis change `t`: `t · a · t⁻¹`.
    pub fn rebase(&self, t: &FqMatrix) -> Result<ModuleRep, GfError> {
        let ti = t.inverse()?;
        Ok(ModuleRep {
            p: self.p,
            dim: self.dim,
            actions: self.actions.iter().map(|a| t.mul_mat(a).mul_mat(&ti)).collect(),
        })
    }

    /// Contragredient module: each action replaced by its inverse transpose.
    pub fn dual(&self) -> Result<ModuleRep, GfError> {
        let actions = self.actions.iter().map(|a| Ok(a.inverse()?.transpose())).collect::<Result<_, GfError>>()?;
        Ok(ModuleRep { p: self.p, dim: self.dim, actions })
    }

    /// Module with transposed actions (for algebra modules, the opposite-side action).
    pub fn transposed(&self) -> ModuleRep {
        ModuleRep { p: self.p, dim: self.dim, actions: self.actions.iter().map(|a| a.transpose()).collect() }
    }

    pub fn fixed_space(&self) -> Vec<FqVec> {
        fixed_space(self)
    }

    /// Action on an invariant subspace given by its basis.
    pub fn submodule(&self, basis: &[FqVec]) -> Result<ModuleRep, GfError> {
        let e = Echelon::from_vectors(self.p, self.dim, basis).to_rref();
        let k = e.dim();
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let mut rows = Vec::with_capacity(k);
            for b in e.rows() {
                let img = a.apply(b);
                let c = e.coordinates(&img).ok_or(GfError::NotInvariant)?;
                rows.push(FqVec::from_entries(self.p, &c));
            }
            actions.push(FqMatrix::from_rows(self.p, k, rows));
        }
        Ok(ModuleRep { p: self.p, dim: k, actions })
    }

    /// Quotient by an invariant subspace, with the projection matrix (`dim × dim'`).
    pub fn quotient(&self, basis: &[FqVec]) -> Result<(ModuleRep, FqMatrix), GfError> {
        let e = Echelon::from_vectors(self.p, self.dim, basis).to_rref();
        let q = e.non_pivots();
        let project = |v: &FqVec| {
            let mut w = v.clone();
            e.reduce(&mut w);
            w.select(&q)
        };
        for a in &self.actions {
            for b in e.rows() {
                if !e.contains(&a.apply(b)) {
                    return Err(GfError::NotInvariant);
                }
            }
        }
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let rows = q.iter().map(|&c| project(a.row(c))).collect();
            actions.push(FqMatrix::from_rows(self.p, q.len(), rows));
        }
        let proj_rows = (0..self.dim).map(|i| project(&FqVec::unit(self.p, self.dim, i))).collect();
        let proj = FqMatrix::from_rows(self.p, q.len(), proj_rows);
        Ok((ModuleRep { p: self.p, dim: q.len(), actions }, proj))
    }

    pub fn direct_sum(&self, other: &ModuleRep) -> Result<ModuleRep, GfError> {
        if other.p != self.p || other.actions.len() != self.actions.len() {
            return Err(GfError::Dimension("direct sum of incompatible modules"));
        }
        let n = self.dim + other.dim;
        let actions = self
            .actions
            .iter()
            .zip(&other.actions)
            .map(|(a, b)| {
                let mut rows = Vec::with_capacity(n);
                for r in a.rows() {
                    rows.push(r.concat(&FqVec::zero(self.p, other.dim)));
                }
                for r in b.rows() {
                    rows.push(FqVec::zero(self.p, self.dim).concat(r));
                }
                FqMatrix::from_rows(self.p, n, rows)
            })
            .collect();
        Ok(ModuleRep { p: self.p, dim: n, actions })
    }

    /// Whether the subspace spanned by `basis` is invariant.
    pub fn is_invariant(&self, basis: &[FqVec]) -> bool {
        let e = Echelon::from_vectors(self.p, self.dim, basis);
        self.actions.iter().all(|a| e.rows().iter().all(|b| e.contains(&a.apply(b))))
    }
}

/// Echelonized basis of the smallest invariant subspace containing `seeds`.
pub fn spin(seeds: &[FqVec], m: &ModuleRep) -> Echelon {
    let mut e = Echelon::new(m.p, m.dim);
    let mut queue: Vec<FqVec> = Vec::new();
    for s in seeds {
        if let Some(i) = e.insert(s.clone()) {
            queue.push(e.rows()[i].clone());
        }
    }
    let mut k = 0;
    while k < queue.len() {
        let v = queue[k].clone();
        for a in &m.actions {
            if let Some(i) = e.insert(a.apply(&v)) {
                queue.push(e.rows()[i].clone());
            }
        }
        k += 1;
    }
    e
}

/// Ordered basis obtained by spinning `seed` breadth-first in generator order.
///
/// Returns the basis matrix `B` (rows) so that `B · a · B⁻¹` is the action in
/// standard form.
pub fn standard_basis(seed: &FqVec, m: &ModuleRep) -> Result<FqMatrix, GfError> {
    let mut e = Echelon::new(m.p, m.dim);
    let mut basis: Vec<FqVec> = Vec::new();
    if e.insert(seed.clone()).is_some() {
        basis.push(seed.clone());
    }
    let mut k = 0;
    while k < basis.len() && basis.len() < m.dim {
        for a in &m.actions {
            let w = a.apply(&basis[k]);
            if e.insert(w.clone()).is_some() {
                basis.push(w);
            }
        }
        k += 1;
    }
    if basis.len() < m.dim {
        return Err(GfError::SeedDoesNotGenerate { spanned: basis.len(), dim: m.dim });
    }
    Ok(FqMatrix::from_rows(m.p, m.dim, basis))
}

/// Actions in the standard basis from `seed`.
pub fn standard_form(seed: &FqVec, m: &ModuleRep) -> Result<Vec<FqMatrix>, GfError> {
    let b = standard_basis(seed, m)?;
    Ok(m.rebase(&b)?.actions)
}

/// Basis of the common fixed space `∩ ker(a − 1)`.
pub fn fixed_space(m: &ModuleRep) -> Vec<FqVec> {
    if m.actions.is_empty() {
        return (0..m.dim).map(|i| FqVec::unit(m.p, m.dim, i)).collect();
    }
    // v (a_1 - 1 | a_2 - 1 | ...) = 0
    let id = FqMatrix::identity(m.p, m.dim);
    let blocks: Vec<FqMatrix> = m.actions.iter().map(|a| a.sub_mat(&id)).collect();
    let rows = (0..m.dim)
        .map(|i| {
            let mut r = blocks[0].row(i).clone();
            for b in &blocks[1..] {
                r = r.concat(b.row(i));
            }
            r
        })
        .collect();
    let big = FqMatrix::from_rows(m.p, m.dim * blocks.len(), rows);
    let ns = big.left_nullspace();
    Echelon::from_vectors(m.p, m.dim, &ns).to_rref().rows().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{GroupElem, Perm};

    fn perm_module(p: u8, gens: &[Perm]) -> ModuleRep {
        let n = gens[0].degree();
        ModuleRep::new(p as u64, n, gens.iter().map(|g| FqMatrix::permutation(p, g)).collect()).unwrap()
    }

    fn c3() -> Vec<Perm> {
        vec![Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap()]
    }

    fn s3() -> Vec<Perm> {
        vec![Perm::from_cycles(3, &[&[0, 1]]).unwrap(), Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap()]
    }

    #[test]
    fn zero_vector_spins_to_nothing() {
        let m = perm_module(2, &c3());
        assert_eq!(spin(&[FqVec::zero(2, 3)], &m).dim(), 0);
    }

    #[test]
    fn spin_in_c3_permutation_module_matches_exhaustive_closure() {
        let m = perm_module(2, &c3());
        for bits in 1u8..8 {
            let v = FqVec::from_entries(2, &[bits & 1, (bits >> 1) & 1, (bits >> 2) & 1]);
            // exhaustive closure: all F2 combinations of orbit images
            let mut span = alloc::vec![v.clone()];
            let g = &m.actions()[0];
            let mut w = v.clone();
            for _ in 0..2 {
                w = g.apply(&w);
                span.push(w.clone());
            }
            let mut all = crate::hashing::new_set::<FqVec>();
            for mask in 0u8..8 {
                let mut s = FqVec::zero(2, 3);
                for (k, x) in span.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        s.add_scaled(x, 1);
                    }
                }
                all.insert(s);
            }
            let dim = (all.len() as f64).log2() as usize;
            assert_eq!(spin(&[v], &m).dim(), dim);
        }
    }

    #[test]
    fn identity_module_standard_basis_is_unit() {
        let m = ModuleRep::new(5, 3, alloc::vec![FqMatrix::identity(5, 3)]).unwrap();
        assert!(standard_basis(&FqVec::unit(5, 3, 0), &m).is_err());
        let m1 = ModuleRep::new(5, 1, alloc::vec![FqMatrix::identity(5, 1)]).unwrap();
        assert!(standard_basis(&FqVec::unit(5, 1, 0), &m1).unwrap().is_identity());
    }

    #[test]
    fn conjugate_copies_share_standard_form() {
        // 3-dim permutation representation of S3 over F5, conjugated by a fixed matrix
        let m = perm_module(5, &s3());
        let t = FqMatrix::from_i64(5, 3, 3, &[1, 2, 0, 0, 1, 3, 1, 0, 1]).unwrap();
        let m2 = m.rebase(&t).unwrap();
        let seed = FqVec::from_entries(5, &[1, 0, 0]);
        let seed2 = t.inverse().unwrap().apply(&seed);
        // v ↦ v·t⁻¹ intertwines m and m2
        assert_eq!(standard_form(&seed, &m).unwrap(), standard_form(&seed2, &m2).unwrap());
    }

    #[test]
    fn fixed_space_of_transitive_permutation_module_is_one_dimensional() {
        for &p in &[2u8, 3, 5] {
            let m = perm_module(p, &s3());
            let f = fixed_space(&m);
            assert_eq!(f.len(), 1);
            assert_eq!(f[0], FqVec::from_entries(p, &[1, 1, 1]));
        }
    }

    #[test]
    fn regular_c2_over_f3_has_one_dim_fixed_space() {
        let m = perm_module(3, &[Perm::from_cycles(2, &[&[0, 1]]).unwrap()]);
        assert_eq!(fixed_space(&m).len(), 1);
    }

    #[test]
    fn trivial_module_is_all_fixed() {
        let m = ModuleRep::new(7, 4, alloc::vec![FqMatrix::identity(7, 4)]).unwrap();
        assert_eq!(fixed_space(&m).len(), 4);
    }

    #[test]
    fn quotient_by_fixed_vector_of_s3_over_f2() {
        let m = perm_module(2, &s3());
        let (q, proj) = m.quotient(&[FqVec::from_entries(2, &[1, 1, 1])]).unwrap();
        assert_eq!(q.dim(), 2);
        // projection commutes with actions
        for (a, b) in m.actions().iter().zip(q.actions()) {
            assert_eq!(a.mul_mat(&proj), proj.mul_mat(b));
        }
        // quotient basis is the images of e2, e3; e1 ≡ e2 + e3
        let t = FqMatrix::from_i64(2, 2, 2, &[1, 1, 0, 1]).unwrap();
        let c = FqMatrix::from_i64(2, 2, 2, &[0, 1, 1, 1]).unwrap();
        assert_eq!(q.actions()[0], t);
        assert_eq!(q.actions()[1], c);
    }

    #[test]
    fn quotient_by_everything_is_zero() {
        let m = perm_module(3, &s3());
        let all: Vec<FqVec> = (0..3).map(|i| FqVec::unit(3, 3, i)).collect();
        assert_eq!(m.quotient(&all).unwrap().0.dim(), 0);
    }

    #[test]
    fn double_dual_has_same_standard_form() {
        let m = perm_module(5, &s3());
        let dd = m.dual().unwrap().dual().unwrap();
        let seed = FqVec::from_entries(5, &[1, 0, 0]);
        assert_eq!(standard_form(&seed, &m).unwrap(), standard_form(&seed, &dd).unwrap());
    }
}
