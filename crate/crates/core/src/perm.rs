//! Permutations, words in generators, and straight-line programs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("image list is not a bijection of 0..{0}")]
    NotBijection(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("generator index {index} out of range ({count} generators)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("word evaluation needs at least one generator")]
    NoGenerators,
}

/// Group elements multiplied left to right: `x^(ab) = (x^a)^b`.
pub trait GroupElem: Clone + PartialEq {
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    /// The identity of the group containing `self`.
    fn identity_like(&self) -> Self;
    fn is_identity(&self) -> bool;
}

/// Right action of group elements on points.
pub trait Acts<P> {
    fn act(&self, x: &P) -> P;
}

/// A permutation of `0..n`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotBijection(n));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self, PermError> {
        let mut img: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for c in cycles {
            for (k, &a) in c.iter().enumerate() {
                let b = c[(k + 1) % c.len()];
                if a as usize >= n || b as usize >= n || touched[a as usize] {
                    return Err(PermError::NotBijection(n));
                }
                touched[a as usize] = true;
                img[a as usize] = b;
            }
        }
        Perm::from_images(img)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn image(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|&(i, &x)| i as u32 != x).map(|(i, _)| i as u32)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Order of the permutation (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut l = 1u64;
        for s in 0..self.degree() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            l = num_integer::lcm(l, len);
        }
        l
    }

    /// Conjugates by a relabelling `sigma`: the result maps `sigma(x)` to `sigma(self(x))`.
    pub fn relabel(&self, sigma: &Perm) -> Perm {
        let mut img = vec![0u32; self.degree()];
        for x in 0..self.degree() as u32 {
            img[sigma.image(x) as usize] = sigma.image(self.image(x));
        }
        Perm(img)
    }
}

impl GroupElem for Perm {
    #[inline]
    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    fn inv(&self) -> Self {
        let mut img = vec![0u32; self.degree()];
        for (i, &x) in self.0.iter().enumerate() {
            img[x as usize] = i as u32;
        }
        Perm(img)
    }

    fn identity_like(&self) -> Self {
        Perm::identity(self.degree())
    }

    fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

impl Acts<u32> for Perm {
    #[inline]
    fn act(&self, x: &u32) -> u32 {
        self.0[*x as usize]
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for s in 0..self.degree() {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = s;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// A letter of a word: generator index and exponent ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

/// A word in generators, evaluated left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![Letter { gen: i, inverse: false }])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, gen: usize, inverse: bool) {
        self.0.push(Letter { gen, inverse });
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| Letter { gen: l.gen, inverse: !l.inverse }).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Cancels adjacent inverse pairs.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            match out.last() {
                Some(t) if t.gen == l.gen && t.inverse != l.inverse => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    /// Replaces each letter by a word in another generating set.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        let mut out = Word::empty();
        for l in &self.0 {
            let w = images
                .get(l.gen)
                .ok_or(WordError::IndexOutOfRange { index: l.gen, count: images.len() })?;
            if l.inverse {
                out.0.extend(w.inverse().0);
            } else {
                out.0.extend_from_slice(&w.0);
            }
        }
        Ok(out)
    }

    /// Pairs `(generator, ±1)` with 0-based generator indices.
    pub fn from_pairs(pairs: &[(usize, i8)]) -> Self {
        Word(pairs.iter().map(|&(g, e)| Letter { gen: g, inverse: e < 0 }).collect())
    }

    pub fn to_pairs(&self) -> Vec<(usize, i8)> {
        self.0.iter().map(|l| (l.gen, if l.inverse { -1 } else { 1 })).collect()
    }
}

/// Evaluates a word in `gens` as the left-to-right product.
pub fn evaluate_word<T: GroupElem>(w: &Word, gens: &[T]) -> Result<T, WordError> {
    let first = gens.first().ok_or(WordError::NoGenerators)?;
    let mut invs: Vec<Option<T>> = vec![None; gens.len()];
    let mut acc = first.identity_like();
    for l in &w.0 {
        let g = gens.get(l.gen).ok_or(WordError::IndexOutOfRange { index: l.gen, count: gens.len() })?;
        if l.inverse {
            let gi = invs[l.gen].get_or_insert_with(|| g.inv());
            acc = acc.mul(gi);
        } else {
            acc = acc.mul(g);
        }
    }
    Ok(acc)
}

/// One line of a straight-line program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    One,
    Gen(u32),
    Inv(u32),
    Mul(u32, u32),
}

/// A straight-line program over numbered generators; the last line is the result.
///
/// Product replacement produces elements whose words grow exponentially with the
/// number of steps, so elements are tracked as programs instead.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    lines: Vec<Line>,
}

impl Program {
    pub fn identity() -> Self {
        Program { lines: vec![Line::One] }
    }

    pub fn gen(i: usize) -> Self {
        Program { lines: vec![Line::Gen(i as u32)] }
    }

    pub fn from_word(w: &Word) -> Self {
        let mut p = Program { lines: vec![Line::One] };
        let mut acc = 0u32;
        for l in &w.0 {
            p.lines.push(Line::Gen(l.gen as u32));
            let mut g = p.lines.len() as u32 - 1;
            if l.inverse {
                p.lines.push(Line::Inv(g));
                g += 1;
            }
            p.lines.push(Line::Mul(acc, g));
            acc = p.lines.len() as u32 - 1;
        }
        p.extract(acc)
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn push(&mut self, line: Line) -> u32 {
        self.lines.push(line);
        self.lines.len() as u32 - 1
    }

    fn result_line(&self) -> u32 {
        self.lines.len() as u32 - 1
    }

    /// Copies the lines needed for `target` into a fresh program ending at `target`.
    pub fn extract(&self, target: u32) -> Program {
        let mut needed = vec![false; target as usize + 1];
        needed[target as usize] = true;
        for i in (0..=target as usize).rev() {
            if !needed[i] {
                continue;
            }
            match self.lines[i] {
                Line::Inv(a) => needed[a as usize] = true,
                Line::Mul(a, b) => {
                    needed[a as usize] = true;
                    needed[b as usize] = true;
                }
                _ => {}
            }
        }
        let mut remap = vec![u32::MAX; target as usize + 1];
        let mut out = Program::default();
        for i in 0..=target as usize {
            if !needed[i] {
                continue;
            }
            let line = match self.lines[i] {
                Line::Inv(a) => Line::Inv(remap[a as usize]),
                Line::Mul(a, b) => Line::Mul(remap[a as usize], remap[b as usize]),
                l => l,
            };
            remap[i] = out.push(line);
        }
        out
    }

    /// Program for `self * other`.
    pub fn then(&self, other: &Program) -> Program {
        if self.is_empty() {
            return other.clone();
        }
        let mut out = self.clone();
        let a = out.result_line();
        let off = out.lines.len() as u32;
        for &l in &other.lines {
            out.lines.push(match l {
                Line::Inv(x) => Line::Inv(x + off),
                Line::Mul(x, y) => Line::Mul(x + off, y + off),
                l => l,
            });
        }
        let b = out.result_line();
        out.push(Line::Mul(a, b));
        out
    }

    pub fn inverse(&self) -> Program {
        let mut out = self.clone();
        let r = out.result_line();
        out.push(Line::Inv(r));
        out
    }

    /// Evaluates the program; `one` is used for `Line::One`.
    pub fn evaluate<T: GroupElem>(&self, gens: &[T], one: &T) -> Result<T, WordError> {
        let mut vals: Vec<T> = Vec::with_capacity(self.lines.len());
        for &l in &self.lines {
            let v = match l {
                Line::One => one.clone(),
                Line::Gen(i) => gens
                    .get(i as usize)
                    .cloned()
                    .ok_or(WordError::IndexOutOfRange { index: i as usize, count: gens.len() })?,
                Line::Inv(a) => vals[a as usize].inv(),
                Line::Mul(a, b) => vals[a as usize].mul(&vals[b as usize]),
            };
            vals.push(v);
        }
        Ok(vals.pop().unwrap_or_else(|| one.clone()))
    }

    /// Expands the program into a word, giving up beyond `max_len` letters.
    pub fn to_word(&self, max_len: usize) -> Option<Word> {
        let mut lens: Vec<usize> = Vec::with_capacity(self.lines.len());
        for &l in &self.lines {
            let n = match l {
                Line::One => 0,
                Line::Gen(_) => 1,
                Line::Inv(a) => lens[a as usize],
                Line::Mul(a, b) => lens[a as usize].saturating_add(lens[b as usize]),
            };
            lens.push(n);
        }
        if lens.last().copied().unwrap_or(0) > max_len {
            return None;
        }
        let mut words: Vec<Word> = Vec::with_capacity(self.lines.len());
        for &l in &self.lines {
            let w = match l {
                Line::One => Word::empty(),
                Line::Gen(g) => Word::gen(g as usize),
                Line::Inv(a) => words[a as usize].inverse(),
                Line::Mul(a, b) => words[a as usize].concat(&words[b as usize]),
            };
            words.push(w.reduced());
        }
        words.pop()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s5() -> Vec<Perm> {
        vec![
            Perm::from_cycles(5, &[&[0, 1]]).unwrap(),
            Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
        ]
    }

    #[test]
    fn from_images_rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn inverse_and_identity() {
        let g = Perm::from_cycles(6, &[&[0, 3, 5], &[1, 2]]).unwrap();
        assert!(g.mul(&g.inv()).is_identity());
        assert_eq!(g.order(), 6);
        assert!(g.pow(6).is_identity());
    }

    #[test]
    fn empty_word_is_identity() {
        let g = s5();
        assert!(evaluate_word(&Word::empty(), &g).unwrap().is_identity());
    }

    #[test]
    fn word_times_inverse_letter_is_identity() {
        let g = s5();
        let w = Word::from_pairs(&[(0, 1), (0, -1)]);
        assert!(evaluate_word(&w, &g).unwrap().is_identity());
    }

    #[test]
    fn out_of_range_letter_is_reported() {
        let g = s5();
        let w = Word::from_pairs(&[(2, 1)]);
        assert_eq!(
            evaluate_word(&w, &g),
            Err(WordError::IndexOutOfRange { index: 2, count: 2 })
        );
    }

    #[test]
    fn program_roundtrips_word() {
        let g = s5();
        let w = Word::from_pairs(&[(0, 1), (1, -1), (1, -1), (0, 1), (1, 1)]);
        let p = Program::from_word(&w);
        let id = Perm::identity(5);
        assert_eq!(p.evaluate(&g, &id).unwrap(), evaluate_word(&w, &g).unwrap());
        let back = p.to_word(100).unwrap();
        assert_eq!(evaluate_word(&back, &g).unwrap(), evaluate_word(&w, &g).unwrap());
    }

    #[test]
    fn program_then_and_inverse() {
        let g = s5();
        let id = Perm::identity(5);
        let a = Program::from_word(&Word::from_pairs(&[(0, 1), (1, 1)]));
        let b = Program::from_word(&Word::from_pairs(&[(1, 1), (1, 1)]));
        let ab = a.then(&b).evaluate(&g, &id).unwrap();
        let want = a.evaluate(&g, &id).unwrap().mul(&b.evaluate(&g, &id).unwrap());
        assert_eq!(ab, want);
        assert!(a.then(&a.inverse()).evaluate(&g, &id).unwrap().is_identity());
    }

    #[test]
    fn debug_prints_cycles_one_indexed() {
        let g = Perm::from_cycles(4, &[&[0, 2]]).unwrap();
        assert_eq!(alloc::format!("{:?}", g), "(1,3)");
    }
}
