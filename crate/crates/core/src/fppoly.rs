//! Univariate polynomials over a prime field and their factorization
//! (square-free, distinct-degree and equal-degree splitting).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fp::{inv_mod, mul_mod};

/// Coefficients low to high, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        let mut f = FpPoly { p, c };
        f.trim();
        f
    }

    pub fn from_i64(p: u64, c: &[i64]) -> Self {
        FpPoly::new(p, c.iter().map(|&x| crate::fp::reduce_i64(x, p)).collect())
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly { p, c: vec![1] }
    }

    pub fn x(p: u64) -> Self {
        FpPoly { p, c: vec![0, 1] }
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    /// Degree; the zero polynomial has degree `usize::MAX` as a sentinel.
    pub fn degree(&self) -> usize {
        if self.c.is_empty() {
            usize::MAX
        } else {
            self.c.len() - 1
        }
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let li = inv_mod(self.lead(), self.p).unwrap();
        self.scale(li)
    }

    pub fn scale(&self, a: u64) -> Self {
        FpPoly::new(self.p, self.c.iter().map(|&x| mul_mod(x, a, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + self.p - o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        FpPoly::new(self.p, c)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let p = self.p;
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (FpPoly::zero(p), self.clone());
        }
        let li = inv_mod(d.lead(), p).unwrap();
        let dl = d.c.len();
        let mut q = vec![0u64; r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + dl - 1], li, p);
            q[k] = coef;
            if coef != 0 {
                for (j, &b) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mul_mod(coef, b, p)) % p;
                }
            }
        }
        r.truncate(dl - 1);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
        let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let s = s0.sub(&q.mul(&s1));
            s0 = s1;
            s1 = s;
            let t = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let li = inv_mod(r0.lead(), p).unwrap();
        (r0.scale(li), s0.scale(li), t0.scale(li))
    }

    pub fn derivative(&self) -> Self {
        let c = self.c.iter().enumerate().skip(1).map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p)).collect();
        FpPoly::new(self.p, c)
    }

    pub fn powmod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = FpPoly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mul_mod(acc, x, self.p) + a) % self.p)
    }

    /// Square-free factorization: pairs `(g, e)` with `self = lead · Π g^e`.
    pub fn squarefree(&self) -> Vec<(FpPoly, usize)> {
        let p = self.p;
        let f = self.monic();
        let mut out = Vec::new();
        if f.degree() == 0 || f.is_zero() {
            return out;
        }
        let d = f.derivative();
        let mut c = f.gcd(&d);
        let mut w = f.divrem(&c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.divrem(&y).0;
            if fac.degree() > 0 {
                out.push((fac.monic(), i));
            }
            w = y;
            c = c.divrem(&w).0;
            i += 1;
        }
        if !c.is_one() {
            // c is a p-th power
            let root: Vec<u64> = c.c.iter().step_by(p as usize).copied().collect();
            let root = FpPoly::new(p, root);
            for (g, e) in root.squarefree() {
                out.push((g, e * p as usize));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    pub fn distinct_degree(&self) -> Vec<(FpPoly, usize)> {
        let p = self.p;
        let mut f = self.monic();
        let mut out = Vec::new();
        let x = FpPoly::x(p);
        let mut h = x.clone();
        let mut d = 0;
        while f.degree() != usize::MAX && f.degree() >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(p as u128, &f);
            let g = h.sub(&x).gcd(&f);
            if !g.is_one() {
                f = f.divrem(&g).0;
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if f.degree() != usize::MAX && f.degree() > 0 {
            let dd = f.degree();
            out.push((f, dd));
        }
        out
    }

    /// Splits a product of distinct irreducibles of degree `d` into its factors.
    pub fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
        let p = self.p;
        let f = self.monic();
        if f.degree() == d {
            return vec![f];
        }
        let n = f.degree();
        loop {
            let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
            if a.degree() == usize::MAX || a.degree() == 0 {
                continue;
            }
            let g0 = a.gcd(&f);
            if !g0.is_one() {
                return split_pair(&f, &g0, d, rng);
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = a.clone();
                let mut s = a.clone();
                for _ in 1..d {
                    t = t.mul(&t).rem(&f);
                    s = s.add(&t);
                }
                s
            } else {
                // a^((p^d - 1)/2) via the norm a^(1 + p + ... + p^(d-1))
                let mut t = a.clone();
                let mut nrm = a.clone();
                for _ in 1..d {
                    t = t.powmod(p as u128, &f);
                    nrm = nrm.mul(&t).rem(&f);
                }
                nrm.powmod(((p - 1) / 2) as u128, &f).sub(&FpPoly::one(p))
            };
            let g = b.gcd(&f);
            if !g.is_one() && g.degree() < n && !g.is_zero() {
                return split_pair(&f, &g, d, rng);
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities, sorted.
    pub fn factor(&self) -> Vec<(FpPoly, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.p ^ ((self.c.len() as u64) << 32));
        let mut out = Vec::new();
        for (g, e) in self.squarefree() {
            for (h, d) in g.distinct_degree() {
                for q in h.equal_degree(d, &mut rng) {
                    out.push((q, e));
                }
            }
        }
        out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.c.cmp(&b.0.c)));
        out
    }
}

fn split_pair(f: &FpPoly, g: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let h = f.divrem(g).0;
    let mut out = g.equal_degree(d, rng);
    out.extend(h.equal_degree(d, rng));
    out
}

/// Product of `(g, e)` pairs.
pub fn expand(p: u64, factors: &[(FpPoly, usize)]) -> FpPoly {
    let mut acc = FpPoly::one(p);
    for (g, e) in factors {
        for _ in 0..*e {
            acc = acc.mul(g);
        }
    }
    acc
}

pub fn is_irreducible(f: &FpPoly) -> bool {
    let fs = f.factor();
    fs.len() == 1 && fs[0].1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn x2_minus_1_mod_5() {
        let f = FpPoly::from_i64(5, &[-1, 0, 1]);
        let fs = f.factor();
        assert_eq!(fs, vec![(FpPoly::from_i64(5, &[1, 1]), 1), (FpPoly::from_i64(5, &[4, 1]), 1)]);
    }

    #[test]
    fn x2_plus_1_irreducible_mod_3() {
        assert!(is_irreducible(&FpPoly::from_i64(3, &[1, 0, 1])));
        assert!(!is_irreducible(&FpPoly::from_i64(5, &[1, 0, 1])));
    }

    #[test]
    fn pth_powers_in_char_2() {
        // (x^2 + x + 1)^2 (x + 1)^3 over F2
        let a = FpPoly::from_i64(2, &[1, 1, 1]);
        let b = FpPoly::from_i64(2, &[1, 1]);
        let f = a.mul(&a).mul(&b).mul(&b).mul(&b);
        assert_eq!(f.factor(), vec![(b, 3), (a, 2)]);
    }

    #[test]
    fn xgcd_identity() {
        let a = FpPoly::from_i64(7, &[3, 1, 4, 1]);
        let b = FpPoly::from_i64(7, &[5, 9, 2]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    fn arb_poly(p: u64) -> impl Strategy<Value = FpPoly> {
        proptest::collection::vec(0..p, 2..12).prop_map(move |mut c| {
            let n = c.len();
            c[n - 1] = 1;
            FpPoly::new(p, c)
        })
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(f in prop_oneof![arb_poly(2), arb_poly(3), arb_poly(11), arb_poly(101)]) {
            let fs = f.factor();
            prop_assert_eq!(expand(f.p(), &fs), f.monic());
            for (g, _) in &fs {
                // irreducible: no roots and no proper factor by distinct-degree
                let dd = g.distinct_degree();
                prop_assert_eq!(dd.len(), 1);
                prop_assert_eq!(dd[0].1, g.degree());
            }
        }
    }
}
