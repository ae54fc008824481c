//! Permutation groups given by generators: stabilizer chains, orders,
//! membership, point stabilizers and seeded product-replacement streams.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::perm::{GroupElem, Line, Perm, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group has no stabilizer chain; call build_chain first")]
    MissingChain,
    #[error("generator of degree {found} in a group of degree {expected}")]
    Degree { expected: usize, found: usize },
    #[error("point {0} outside the domain")]
    PointOutOfRange(u32),
    #[error("random stream needs at least one generator")]
    NoGenerators,
    #[error("burn-in of {0} steps is below the minimum of 50")]
    BurnIn(usize),
}

#[derive(Debug, Clone)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    reps: Vec<Option<Perm>>,
    inv_reps: Vec<Option<Perm>>,
    // number of generators already checked per orbit position
    checked: Vec<usize>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut reps = vec![None; degree];
        let mut inv_reps = vec![None; degree];
        reps[base as usize] = Some(Perm::identity(degree));
        inv_reps[base as usize] = Some(Perm::identity(degree));
        Level { base, gens: Vec::new(), orbit: vec![base], reps, inv_reps, checked: vec![0] }
    }

    fn add_gen(&mut self, g: Perm) {
        self.gens.push(g);
        let s = self.gens.len() - 1;
        let old = self.orbit.len();
        let mut pos = 0;
        while pos < self.orbit.len() {
            let x = self.orbit[pos];
            // points present before this call only need the new generator
            let range = if pos < old { s..s + 1 } else { 0..self.gens.len() };
            for t in range {
                let y = self.gens[t].image(x);
                if self.reps[y as usize].is_none() {
                    let r = self.reps[x as usize].as_ref().unwrap().mul(&self.gens[t]);
                    self.inv_reps[y as usize] = Some(r.inv());
                    self.reps[y as usize] = Some(r);
                    self.orbit.push(y);
                    self.checked.push(0);
                }
            }
            pos += 1;
        }
    }
}

/// Base and strong generating set with explicit transversals.
#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    fn sift_from(&self, mut h: Perm, start: usize) -> (Perm, usize) {
        for (l, lev) in self.levels.iter().enumerate().skip(start) {
            let x = h.image(lev.base);
            match &lev.inv_reps[x as usize] {
                None => return (h, l),
                Some(ui) => h = h.mul(ui),
            }
        }
        (h, self.levels.len())
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(g.clone(), 0).0.is_identity()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        self.levels.first().map(|l| l.gens.as_slice()).unwrap_or(&[])
    }

    fn schreier_sims(degree: usize, gens: &[Perm], base_prefix: &[u32]) -> StabChain {
        let mut chain = StabChain { degree, levels: Vec::new() };
        let mut base: Vec<u32> = base_prefix.to_vec();
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            if base.iter().all(|&b| g.image(b) == b) {
                base.push(g.first_moved().unwrap());
            }
        }
        for &b in &base {
            chain.levels.push(Level::new(b, degree));
        }
        for g in &gens {
            let mut l = 0;
            while l < chain.levels.len() {
                chain.levels[l].add_gen(g.clone());
                if g.image(chain.levels[l].base) != chain.levels[l].base {
                    break;
                }
                l += 1;
            }
        }

        let mut i = chain.levels.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            let Some((pos, s)) = chain.next_unchecked(iu) else {
                i -= 1;
                continue;
            };
            chain.levels[iu].checked[pos] = s + 1;
            let lev = &chain.levels[iu];
            let x = lev.orbit[pos];
            let y = lev.gens[s].image(x);
            let h = lev.reps[x as usize]
                .as_ref()
                .unwrap()
                .mul(&lev.gens[s])
                .mul(lev.inv_reps[y as usize].as_ref().unwrap());
            let (res, j) = chain.sift_from(h, iu + 1);
            if !res.is_identity() {
                if j == chain.levels.len() {
                    let b = res.first_moved().unwrap();
                    chain.levels.push(Level::new(b, degree));
                }
                for l in iu + 1..=j {
                    chain.levels[l].add_gen(res.clone());
                }
                i = j as isize;
            }
        }
        chain
    }

    fn next_unchecked(&self, l: usize) -> Option<(usize, usize)> {
        let lev = &self.levels[l];
        lev.checked
            .iter()
            .enumerate()
            .find(|&(_, &c)| c < lev.gens.len())
            .map(|(pos, &c)| (pos, c))
    }

    /// All group elements, in chain order. Intended for small groups.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for lev in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * lev.orbit.len());
            for g in &out {
                for &x in &lev.orbit {
                    next.push(g.mul(lev.reps[x as usize].as_ref().unwrap()));
                }
            }
            out = next;
        }
        out
    }

    /// A uniformly distributed element drawn from the transversals.
    pub fn uniform_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for lev in self.levels.iter().rev() {
            let x = lev.orbit[rng.gen_range(0..lev.orbit.len())];
            g = g.mul(lev.reps[x as usize].as_ref().unwrap());
        }
        g
    }
}

/// A permutation group on `0..degree` given by generators.
#[derive(Debug, Clone)]
pub struct GeneratedGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: Option<StabChain>,
}

impl GeneratedGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self, GroupError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(GroupError::Degree { expected: degree, found: g.degree() });
            }
        }
        Ok(GeneratedGroup { degree, generators, chain: None })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn chain(&self) -> Result<&StabChain, GroupError> {
        self.chain.as_ref().ok_or(GroupError::MissingChain)
    }

    pub fn has_chain(&self) -> bool {
        self.chain.is_some()
    }

    /// Returns the group with a deterministic stabilizer chain attached.
    pub fn build_chain(&self) -> GeneratedGroup {
        self.build_chain_with_base(&[])
    }

    pub fn build_chain_with_base(&self, base_prefix: &[u32]) -> GeneratedGroup {
        let chain = StabChain::schreier_sims(self.degree, &self.generators, base_prefix);
        GeneratedGroup { degree: self.degree, generators: self.generators.clone(), chain: Some(chain) }
    }

    pub fn order(&self) -> Result<BigUint, GroupError> {
        Ok(self.chain()?.order())
    }

    pub fn contains(&self, p: &Perm) -> Result<bool, GroupError> {
        Ok(self.chain()?.contains(p))
    }

    /// The full stabilizer of `point`, with its own chain.
    pub fn stabilizer(&self, point: u32) -> Result<GeneratedGroup, GroupError> {
        let chain = self.chain()?;
        if point as usize >= self.degree {
            return Err(GroupError::PointOutOfRange(point));
        }
        let full = StabChain::schreier_sims(self.degree, chain.strong_generators(), &[point]);
        let levels: Vec<Level> = full.levels.into_iter().skip(1).collect();
        let generators = levels.first().map(|l| l.gens.clone()).unwrap_or_default();
        Ok(GeneratedGroup {
            degree: self.degree,
            generators,
            chain: Some(StabChain { degree: self.degree, levels }),
        })
    }

    pub fn orbit(&self, point: u32) -> Vec<u32> {
        orbit(&self.generators, self.degree, point)
    }

    pub fn elements(&self) -> Result<Vec<Perm>, GroupError> {
        Ok(self.chain()?.elements())
    }
}

/// Orbit of `point` under `gens`, in BFS order.
pub fn orbit(gens: &[Perm], degree: usize, point: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut out = vec![point];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for g in gens {
            let y = g.image(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// All orbits of `gens` on `0..degree`, each in BFS order, ordered by minimal point.
pub fn orbits(gens: &[Perm], degree: usize) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for s in 0..degree as u32 {
        if seen[s as usize] {
            continue;
        }
        let o = orbit(gens, degree, s);
        for &x in &o {
            seen[x as usize] = true;
        }
        out.push(o);
    }
    out
}

/// Seeded product-replacement generator of random elements.
///
/// Elements are tracked alongside a shared straight-line program so that each
/// returned element can be reconstructed from the generators.
#[derive(Debug, Clone)]
pub struct RandomStream<T: GroupElem> {
    slots: Vec<T>,
    slot_lines: Vec<u32>,
    acc: T,
    acc_line: u32,
    program: Program,
    rng: ChaCha8Rng,
    seed: u64,
}

pub const SLOTS: usize = 10;
pub const BURN_IN: usize = 50;

impl<T: GroupElem> RandomStream<T> {
    pub fn new(gens: &[T], seed: u64) -> Result<Self, GroupError> {
        Self::with_burn_in(gens, seed, BURN_IN)
    }

    pub fn with_burn_in(gens: &[T], seed: u64, burn_in: usize) -> Result<Self, GroupError> {
        if gens.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        if burn_in < BURN_IN {
            return Err(GroupError::BurnIn(burn_in));
        }
        let mut program = Program::default();
        let one = program.push(Line::One);
        let gen_lines: Vec<u32> = (0..gens.len()).map(|i| program.push(Line::Gen(i as u32))).collect();
        let n = SLOTS.max(gens.len());
        let slots: Vec<T> = (0..n).map(|i| gens[i % gens.len()].clone()).collect();
        let slot_lines: Vec<u32> = (0..n).map(|i| gen_lines[i % gens.len()]).collect();
        let mut s = RandomStream {
            slots,
            slot_lines,
            acc: gens[0].identity_like(),
            acc_line: one,
            program,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        };
        for _ in 0..burn_in {
            s.step();
        }
        Ok(s)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn step(&mut self) {
        let n = self.slots.len();
        let i = self.rng.gen_range(0..n);
        let mut j = self.rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let inverse = self.rng.gen_bool(0.5);
        let left = self.rng.gen_bool(0.5);
        let (sj, mut lj) = (self.slots[j].clone(), self.slot_lines[j]);
        let sj = if inverse {
            lj = self.program.push(Line::Inv(lj));
            sj.inv()
        } else {
            sj
        };
        if left {
            self.slots[i] = sj.mul(&self.slots[i]);
            self.slot_lines[i] = self.program.push(Line::Mul(lj, self.slot_lines[i]));
        } else {
            self.slots[i] = self.slots[i].mul(&sj);
            self.slot_lines[i] = self.program.push(Line::Mul(self.slot_lines[i], lj));
        }
        self.acc = self.acc.mul(&self.slots[i]);
        self.acc_line = self.program.push(Line::Mul(self.acc_line, self.slot_lines[i]));
    }

    /// Next element, with a handle into the stream's program.
    pub fn next_element(&mut self) -> (T, u32) {
        self.step();
        (self.acc.clone(), self.acc_line)
    }

    /// A self-contained program for a handle returned by [`next_element`](Self::next_element).
    pub fn program_for(&self, handle: u32) -> Program {
        self.program.extract(handle)
    }

    /// Draws a uniform index below `n` from the stream's generator.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Random element of `g` together with a program producing it from `g`'s generators.
pub fn random_element(stream: &mut RandomStream<Perm>) -> (Perm, Program) {
    let (p, h) = stream.next_element();
    (p, stream.program_for(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::new_set;
    use crate::perm::evaluate_word;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn sym(n: usize) -> GeneratedGroup {
        let c: Vec<u32> = (0..n as u32).collect();
        GeneratedGroup::new(
            n,
            vec![Perm::from_cycles(n, &[&[0, 1]]).unwrap(), Perm::from_cycles(n, &[&c]).unwrap()],
        )
        .unwrap()
    }

    fn closure(gens: &[Perm], degree: usize) -> usize {
        let mut seen = new_set::<Perm>();
        let id = Perm::identity(degree);
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn s3_has_order_6() {
        assert_eq!(sym(3).build_chain().order().unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn c4_has_order_4() {
        let g = GeneratedGroup::new(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()]).unwrap();
        assert_eq!(g.build_chain().order().unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn order_needs_chain() {
        assert_eq!(sym(3).order(), Err(GroupError::MissingChain));
    }

    #[test]
    fn s4_point_stabilizer_has_order_6() {
        let g = sym(4).build_chain();
        let s = g.stabilizer(2).unwrap();
        assert_eq!(s.order().unwrap(), BigUint::from(6u32));
        for h in s.generators() {
            assert_eq!(h.image(2), 2);
        }
        assert_eq!(s.order().unwrap() * BigUint::from(g.orbit(2).len()), g.order().unwrap());
    }

    #[test]
    fn base_starts_with_first_moved_point() {
        let g = GeneratedGroup::new(5, vec![Perm::from_cycles(5, &[&[2, 3, 4]]).unwrap()]).unwrap();
        assert_eq!(g.build_chain().chain().unwrap().base(), vec![2]);
    }

    #[test]
    fn membership_in_a5() {
        let a5 = GeneratedGroup::new(
            5,
            vec![Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap(), Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap()],
        )
        .unwrap()
        .build_chain();
        assert_eq!(a5.order().unwrap(), BigUint::from(60u32));
        assert!(a5.contains(&Perm::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap()).unwrap());
        assert!(!a5.contains(&Perm::from_cycles(5, &[&[0, 1]]).unwrap()).unwrap());
    }

    #[test]
    fn m11_order() {
        // (2,10)(4,11)(5,7)(8,9), (1,4,3,8)(2,5,6,9), 0-indexed
        let a = Perm::from_cycles(11, &[&[1, 9], &[3, 10], &[4, 6], &[7, 8]]).unwrap();
        let b = Perm::from_cycles(11, &[&[0, 3, 2, 7], &[1, 4, 5, 8]]).unwrap();
        let g = GeneratedGroup::new(11, vec![a, b]).unwrap().build_chain();
        assert_eq!(g.order().unwrap(), BigUint::from(7920u32));
        assert_eq!(g.stabilizer(0).unwrap().order().unwrap(), BigUint::from(720u32));
    }

    #[test]
    fn stream_is_deterministic_per_seed() {
        let g = sym(6);
        let mut a = RandomStream::new(g.generators(), 7).unwrap();
        let mut b = RandomStream::new(g.generators(), 7).unwrap();
        let mut c = RandomStream::new(g.generators(), 8).unwrap();
        let xs: Vec<Perm> = (0..20).map(|_| a.next_element().0).collect();
        let ys: Vec<Perm> = (0..20).map(|_| b.next_element().0).collect();
        let zs: Vec<Perm> = (0..20).map(|_| c.next_element().0).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn stream_rejects_short_burn_in() {
        let g = sym(4);
        assert_eq!(RandomStream::with_burn_in(g.generators(), 1, 10).err(), Some(GroupError::BurnIn(10)));
    }

    #[test]
    fn random_elements_reproduce_from_program() {
        let g = sym(7);
        let mut s = RandomStream::new(g.generators(), 3).unwrap();
        let id = Perm::identity(7);
        for _ in 0..50 {
            let (p, prog) = random_element(&mut s);
            assert_eq!(prog.evaluate(g.generators(), &id).unwrap(), p);
        }
    }

    #[test]
    fn random_word_in_s5_folds_left_to_right() {
        let g = sym(5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pairs: Vec<(usize, i8)> = (0..20)
                .map(|_| (rng.gen_range(0..2), if rng.gen_bool(0.5) { 1 } else { -1 }))
                .collect();
            let w = crate::perm::Word::from_pairs(&pairs);
            let mut acc = Perm::identity(5);
            for &(i, e) in &pairs {
                let x = &g.generators()[i];
                acc = if e > 0 { acc.mul(x) } else { acc.mul(&x.inv()) };
            }
            assert_eq!(evaluate_word(&w, g.generators()).unwrap(), acc);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn chain_order_matches_closure(seed in any::<u64>(), n in 3usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut gens = Vec::new();
            for _ in 0..2 {
                let mut img: Vec<u32> = (0..n as u32).collect();
                for i in (1..n).rev() {
                    let j = rng.gen_range(0..=i);
                    img.swap(i, j);
                }
                gens.push(Perm::from_images(img).unwrap());
            }
            let g = GeneratedGroup::new(n, gens.clone()).unwrap().build_chain();
            let order = g.order().unwrap();
            prop_assert_eq!(order.clone(), BigUint::from(closure(&gens, n)));
            for x in 0..n as u32 {
                let s = g.stabilizer(x).unwrap();
                prop_assert_eq!(s.order().unwrap() * BigUint::from(g.orbit(x).len()), order.clone());
            }
            for h in g.elements().unwrap().iter().take(50) {
                prop_assert!(g.contains(h).unwrap());
            }
        }
    }
}
