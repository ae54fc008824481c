//! Norton irreducibility test and composition factors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::module::{spin, standard_form};
use super::{FqMatrix, FqVec, GfError, ModuleRep};
use crate::fppoly::FpPoly;

/// Random elements tried before giving up.
pub const NORTON_BUDGET: usize = 30;

/// Largest number of seeds (up to scalars) scanned when matching constituents.
const MAX_SEEDS: u64 = 1 << 16;

/// A linear combination of generator words, `Σ c_k · w_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recipe {
    pub terms: Vec<(u8, Vec<usize>)>,
}

impl Recipe {
    pub fn random<R: Rng + ?Sized>(p: u8, ngens: usize, rng: &mut R) -> Recipe {
        if ngens == 0 {
            return Recipe { terms: Vec::new() };
        }
        let count = rng.gen_range(1..=4);
        let terms = (0..count)
            .map(|_| {
                let len = rng.gen_range(1..=3);
                let word = (0..len).map(|_| rng.gen_range(0..ngens)).collect();
                (rng.gen_range(1..p.max(2)), word)
            })
            .collect();
        Recipe { terms }
    }

    pub fn evaluate(&self, actions: &[FqMatrix], p: u8, dim: usize) -> FqMatrix {
        let mut acc = FqMatrix::zero(p, dim, dim);
        for (c, word) in &self.terms {
            let mut m = FqMatrix::identity(p, dim);
            for &g in word {
                m = m.mul_mat(&actions[g]);
            }
            acc.add_scaled_mat(&m, *c);
        }
        acc
    }
}

/// Evidence that a module is irreducible: `ker f(θ)` has dimension `deg f`
/// and one of its vectors spins to the whole module, as does one of the
/// transposed kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub recipe: Recipe,
    pub factor: FpPoly,
    pub kernel: Vec<FqVec>,
}

#[derive(Debug, Clone)]
pub enum Irreducibility {
    Irreducible(Option<Certificate>),
    /// Basis of a proper nonzero submodule.
    Reducible(Vec<FqVec>),
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible(_))
    }
}

/// Norton's test with the default budget.
pub fn is_irreducible<R: Rng + ?Sized>(m: &ModuleRep, rng: &mut R) -> Result<Irreducibility, GfError> {
    is_irreducible_with_budget(m, NORTON_BUDGET, rng)
}

pub fn is_irreducible_with_budget<R: Rng + ?Sized>(
    m: &ModuleRep,
    budget: usize,
    rng: &mut R,
) -> Result<Irreducibility, GfError> {
    let n = m.dim();
    if n <= 1 {
        return Ok(Irreducibility::Irreducible(None));
    }
    let p = m.p();
    let tr = m.transposed();
    for _ in 0..budget {
        let recipe = Recipe::random(p, m.ngens(), rng);
        let theta = recipe.evaluate(m.actions(), p, n);
        let mut factors: Vec<FpPoly> = theta.char_poly().factor().into_iter().map(|(f, _)| f).collect();
        factors.sort_by_key(|f| f.degree());
        for f in factors {
            let nf = theta.eval_poly(&f);
            let kernel = nf.left_nullspace();
            let v = &kernel[0];
            let s = spin(core::slice::from_ref(v), m);
            if s.dim() < n {
                return Ok(Irreducibility::Reducible(s.rows().to_vec()));
            }
            let tkernel = nf.transpose().left_nullspace();
            let st = spin(core::slice::from_ref(&tkernel[0]), &tr);
            if st.dim() < n {
                // annihilator of an invariant subspace of the transposed module
                let w = st.to_matrix().right_nullspace();
                return Ok(Irreducibility::Reducible(w));
            }
            if kernel.len() == f.degree() {
                return Ok(Irreducibility::Irreducible(Some(Certificate { recipe, factor: f, kernel })));
            }
        }
    }
    Err(GfError::BudgetExhausted(budget))
}

/// An irreducible constituent together with data for recognizing copies of it.
#[derive(Debug, Clone)]
pub struct Constituent {
    pub rep: ModuleRep,
    pub multiplicity: usize,
    pub label: String,
    certificate: Option<Certificate>,
    form: Vec<FqMatrix>,
}

impl Constituent {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// Whether `other` (irreducible, same generators) is isomorphic to this constituent.
    pub fn is_isomorphic(&self, other: &ModuleRep) -> bool {
        if other.dim() != self.dim() || other.ngens() != self.rep.ngens() || other.p() != self.rep.p() {
            return false;
        }
        let n = other.dim();
        let p = other.p();
        match &self.certificate {
            None => standard_form(&FqVec::unit(p, n, 0), other).map(|f| f == self.form).unwrap_or(false),
            Some(c) => {
                let theta = c.recipe.evaluate(other.actions(), p, n);
                let kernel = theta.eval_poly(&c.factor).left_nullspace();
                if kernel.len() != c.kernel.len() {
                    return false;
                }
                let found = projective_points(p, &kernel)
                    .any(|seed| standard_form(&seed, other).map(|f| f == self.form).unwrap_or(false));
                found
            }
        }
    }
}

/// One representative per line in the span of `basis`, lines in a fixed order.
fn projective_points(p: u8, basis: &[FqVec]) -> impl Iterator<Item = FqVec> + '_ {
    let d = basis.len() as u32;
    let q = p as u64;
    let total = if d == 0 { 0 } else { (q.pow(d) - 1) / (q - 1) };
    let total = total.min(MAX_SEEDS);
    let mut lead = 0u32;
    let mut counter = 0u64;
    let mut emitted = 0u64;
    core::iter::from_fn(move || {
        if emitted >= total {
            return None;
        }
        // coefficient vectors whose first nonzero entry (at `lead`) is 1
        while lead < d && counter >= q.pow(d - 1 - lead) {
            lead += 1;
            counter = 0;
        }
        if lead >= d {
            return None;
        }
        let mut v = basis[lead as usize].clone();
        let mut c = counter;
        for b in &basis[lead as usize + 1..] {
            v.add_scaled(b, (c % q) as u8);
            c /= q;
        }
        counter += 1;
        emitted += 1;
        Some(v)
    })
}

/// Constituents found so far, with labels unique per dimension.
#[derive(Debug, Clone, Default)]
pub struct ConstituentLibrary {
    items: Vec<Constituent>,
}

impl ConstituentLibrary {
    pub fn new() -> Self {
        ConstituentLibrary { items: Vec::new() }
    }

    pub fn constituents(&self) -> &[Constituent] {
        &self.items
    }

    pub fn into_constituents(self) -> Vec<Constituent> {
        self.items
    }

    /// Index of the constituent isomorphic to `s`, registering it if new.
    pub fn record(&mut self, s: ModuleRep, certificate: Option<Certificate>, count: usize) -> Result<usize, GfError> {
        if let Some(i) = self.items.iter().position(|c| c.is_isomorphic(&s)) {
            self.items[i].multiplicity += count;
            return Ok(i);
        }
        let n = s.dim();
        let seed = match &certificate {
            None => FqVec::unit(s.p(), n, 0),
            Some(c) => c.kernel[0].clone(),
        };
        let form = standard_form(&seed, &s)?;
        let same_dim = self.items.iter().filter(|c| c.dim() == n).count();
        let label = format!("{}{}", n, letters(same_dim));
        self.items.push(Constituent { rep: s, multiplicity: count, label, certificate, form });
        Ok(self.items.len() - 1)
    }

    /// Identifies an irreducible module against the library without recording it.
    pub fn find(&self, s: &ModuleRep) -> Option<usize> {
        self.items.iter().position(|c| c.is_isomorphic(s))
    }
}

/// `0 → a`, `25 → z`, `26 → aa`.
fn letters(mut k: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (k % 26) as u8);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

/// Composition factors with multiplicities, in discovery order.
pub fn chop<R: Rng + ?Sized>(m: &ModuleRep, rng: &mut R) -> Result<Vec<Constituent>, GfError> {
    let mut lib = ConstituentLibrary::new();
    chop_into(m, &mut lib, rng)?;
    Ok(lib.into_constituents())
}

/// Chops `m` into an existing library; returns the constituent index of
/// each composition factor.
pub fn chop_into<R: Rng + ?Sized>(
    m: &ModuleRep,
    lib: &mut ConstituentLibrary,
    rng: &mut R,
) -> Result<Vec<usize>, GfError> {
    let mut stack = vec![m.clone()];
    let mut found = Vec::new();
    while let Some(cur) = stack.pop() {
        if cur.dim() == 0 {
            continue;
        }
        match is_irreducible(&cur, rng)? {
            Irreducibility::Irreducible(cert) => found.push(lib.record(cur, cert, 1)?),
            Irreducibility::Reducible(sub) => {
                let (q, _) = cur.quotient(&sub)?;
                let s = cur.submodule(&sub)?;
                stack.push(q);
                stack.push(s);
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn perm_module(p: u8, gens: &[Perm]) -> ModuleRep {
        let n = gens[0].degree();
        ModuleRep::new(p as u64, n, gens.iter().map(|g| FqMatrix::permutation(p, g)).collect()).unwrap()
    }

    fn cycle(n: u32) -> Perm {
        let c: Vec<u32> = (0..n).collect();
        Perm::from_cycles(n as usize, &[&c]).unwrap()
    }

    #[test]
    fn letters_roll_over() {
        assert_eq!(letters(0), "a");
        assert_eq!(letters(25), "z");
        assert_eq!(letters(26), "aa");
        assert_eq!(letters(27), "ab");
    }

    #[test]
    fn projective_points_count() {
        let b: Vec<FqVec> = (0..3).map(|i| FqVec::unit(3, 3, i)).collect();
        let pts: Vec<FqVec> = projective_points(3, &b).collect();
        assert_eq!(pts.len(), 13);
        let set: crate::hashing::HashSet<FqVec> = pts.iter().cloned().collect();
        assert_eq!(set.len(), 13);
    }

    #[test]
    fn regular_c6_over_f5_splits_as_x6_minus_1() {
        // x^6 - 1 = (x - 1)(x + 1)(x^2 + x + 1)(x^2 - x + 1) over F5, quadratics irreducible
        let m = perm_module(5, &[cycle(6)]);
        let cs = chop(&m, &mut rng()).unwrap();
        let mut dims: Vec<usize> = cs.iter().map(|c| c.dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2, 2]);
        assert!(cs.iter().all(|c| c.multiplicity == 1));
        let mut scalars: Vec<u8> = cs.iter().filter(|c| c.dim() == 1).map(|c| c.rep.actions()[0].get(0, 0)).collect();
        scalars.sort();
        assert_eq!(scalars, vec![1, 4]);
    }

    #[test]
    fn regular_c4_over_f5_has_four_linear_constituents() {
        let m = perm_module(5, &[cycle(4)]);
        let cs = chop(&m, &mut rng()).unwrap();
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().all(|c| c.dim() == 1 && c.multiplicity == 1));
    }

    #[test]
    fn direct_sum_of_equal_lines_has_multiplicity_two() {
        let a = ModuleRep::new(7, 1, vec![FqMatrix::from_i64(7, 1, 1, &[3]).unwrap()]).unwrap();
        let m = a.direct_sum(&a).unwrap();
        let cs = chop(&m, &mut rng()).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].multiplicity, 2);
        assert_eq!(cs[0].label, "1a");
    }

    #[test]
    fn natural_s3_module_over_f5_is_trivial_plus_two() {
        let gens = [Perm::from_cycles(3, &[&[0, 1]]).unwrap(), cycle(3)];
        let m = perm_module(5, &gens);
        let cs = chop(&m, &mut rng()).unwrap();
        let mut dims: Vec<(usize, usize)> = cs.iter().map(|c| (c.dim(), c.multiplicity)).collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (2, 1)]);
        let two = cs.iter().find(|c| c.dim() == 2).unwrap();
        assert!(is_irreducible(&two.rep, &mut rng()).unwrap().is_irreducible());
    }

    #[test]
    fn natural_s3_module_over_f3_is_uniserial_of_trivials_and_sign() {
        let gens = [Perm::from_cycles(3, &[&[0, 1]]).unwrap(), cycle(3)];
        let m = perm_module(3, &gens);
        let cs = chop(&m, &mut rng()).unwrap();
        let mut dims: Vec<(usize, usize)> = cs.iter().map(|c| (c.dim(), c.multiplicity)).collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn irreducible_module_chops_to_itself() {
        // 2-dim irreducible of S3 over F5 acting on the sum-zero plane
        let t = FqMatrix::from_i64(5, 2, 2, &[0, 1, 1, 0]).unwrap();
        let c = FqMatrix::from_i64(5, 2, 2, &[0, 1, -1, -1]).unwrap();
        let m = ModuleRep::new(5, 2, vec![t, c]).unwrap();
        let cs = chop(&m, &mut rng()).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].multiplicity, 1);
        assert_eq!(cs[0].label, "2a");
    }

    #[test]
    fn c3_on_f2_cubed_gives_trivial_and_field_of_four() {
        let m = perm_module(2, &[cycle(3)]);
        let cs = chop(&m, &mut rng()).unwrap();
        let mut dims: Vec<usize> = cs.iter().map(|c| c.dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);
    }

    #[test]
    fn conjugate_constituents_are_identified() {
        let t = FqMatrix::from_i64(5, 2, 2, &[0, 1, 1, 0]).unwrap();
        let c = FqMatrix::from_i64(5, 2, 2, &[0, 1, -1, -1]).unwrap();
        let m = ModuleRep::new(5, 2, vec![t, c]).unwrap();
        let x = FqMatrix::from_i64(5, 2, 2, &[2, 1, 1, 1]).unwrap();
        let m2 = m.rebase(&x).unwrap();
        let sum = m.direct_sum(&m2).unwrap();
        let cs = chop(&sum, &mut rng()).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].multiplicity, 2);
    }

    #[test]
    fn sign_and_trivial_are_distinguished() {
        let triv = ModuleRep::new(5, 1, vec![FqMatrix::identity(5, 1)]).unwrap();
        let sign = ModuleRep::new(5, 1, vec![FqMatrix::from_i64(5, 1, 1, &[-1]).unwrap()]).unwrap();
        let cs = chop(&triv.direct_sum(&sign).unwrap(), &mut rng()).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].label, "1a");
        assert_eq!(cs[1].label, "1b");
    }

    #[test]
    fn reducible_witness_is_a_proper_submodule() {
        let gens = [Perm::from_cycles(4, &[&[0, 1]]).unwrap(), cycle(4)];
        let m = perm_module(3, &gens);
        match is_irreducible(&m, &mut rng()).unwrap() {
            Irreducibility::Reducible(w) => {
                assert!(!w.is_empty() && w.len() < 4);
                assert!(m.is_invariant(&w));
            }
            Irreducibility::Irreducible(_) => panic!("permutation module is reducible"),
        }
    }
}
