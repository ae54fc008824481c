//! Integer polynomials and their factorization over ℚ (modular factorization,
//! Hensel lifting and Zassenhaus recombination).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::fppoly::FpPoly;

/// Largest degree for which subset recombination is attempted.
pub const MAX_RECOMBINATION_DEGREE: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZPolyError {
    #[error("zero polynomial has no factorization")]
    Zero,
    #[error("degree {0} exceeds the recombination limit")]
    TooLarge(usize),
    #[error("no suitable prime found for modular factorization")]
    NoPrime,
}

/// Integer coefficients, low to high, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolynomialZ {
    c: Vec<BigInt>,
}

impl PolynomialZ {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        PolynomialZ { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        PolynomialZ::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Coefficients given from the leading term down.
    pub fn from_leading(c: &[i64]) -> Self {
        let mut v: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        v.reverse();
        PolynomialZ::new(v)
    }

    pub fn zero() -> Self {
        PolynomialZ { c: Vec::new() }
    }

    pub fn one() -> Self {
        PolynomialZ::constant(BigInt::one())
    }

    pub fn constant(a: BigInt) -> Self {
        PolynomialZ::new(vec![a])
    }

    pub fn x() -> Self {
        PolynomialZ::from_i64(&[0, 1])
    }

    /// `X − a`.
    pub fn linear(a: BigInt) -> Self {
        PolynomialZ::new(vec![-a, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    /// Coefficients from the leading term down.
    pub fn leading_first(&self) -> Vec<BigInt> {
        self.c.iter().rev().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn content(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        PolynomialZ::new(self.c.iter().map(|x| x / &g).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        PolynomialZ::new(
            (0..n)
                .map(|i| self.c.get(i).cloned().unwrap_or_default() + o.c.get(i).cloned().unwrap_or_default())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        PolynomialZ::new(self.c.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: &BigInt) -> Self {
        PolynomialZ::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return PolynomialZ::zero();
        }
        let mut out = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolynomialZ::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(PolynomialZ::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        PolynomialZ::new(self.c.iter().enumerate().skip(1).map(|(i, x)| x * BigInt::from(i)).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
    }

    /// Exact quotient in `ℤ[X]`, if `d` divides `self` there.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(PolynomialZ::zero());
        }
        let (n, m) = (self.deg(), d.deg());
        if n < m {
            return None;
        }
        let ld = d.lead();
        let mut r = self.c.clone();
        let mut q = vec![BigInt::zero(); n - m + 1];
        for k in (0..=n - m).rev() {
            let top = &r[k + m];
            if top.is_zero() {
                continue;
            }
            let (qq, rem) = top.div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.c.iter().enumerate() {
                r[k + i] -= &qq * dc;
            }
            q[k] = qq;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(PolynomialZ::new(q))
    }

    /// Pseudo-remainder `lc(d)^(deg f − deg d + 1) · f mod d`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let mut r = self.clone();
        let m = d.deg();
        let ld = d.lead();
        while !r.is_zero() && r.deg() >= m {
            let shift = r.deg() - m;
            let lr = r.lead();
            let mut t = vec![BigInt::zero(); shift];
            t.extend(d.c.iter().map(|x| x * &lr));
            r = r.scale(&ld).sub(&PolynomialZ::new(t));
        }
        r
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.is_zero() {
            return b;
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    pub fn to_fp(&self, p: u64) -> FpPoly {
        let pb = BigInt::from(p);
        FpPoly::new(p, self.c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap_or(0)).collect())
    }

    /// Squarefree part (primitive).
    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.primitive().div_exact(&g).unwrap_or_else(|| self.primitive())
    }
}

impl fmt::Debug for PolynomialZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PolynomialZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let mag = a.abs();
            let sign = if a.is_negative() { "-" } else if first { "" } else { "+" };
            let coeff = if mag.is_one() && i > 0 { String::new() } else { format!("{}", mag) };
            let mono = match i {
                0 => String::new(),
                1 => String::from("X"),
                _ => format!("X^{}", i),
            };
            let star = if !coeff.is_empty() && !mono.is_empty() { "*" } else { "" };
            write!(f, "{}{}{}{}", sign, coeff, star, mono)?;
            first = false;
        }
        Ok(())
    }
}

/// Factorization `unit · Π f_i^{e_i}` with primitive irreducible `f_i` of positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    pub unit: BigInt,
    pub factors: Vec<(PolynomialZ, usize)>,
}

impl FactoredPoly {
    pub fn expand(&self) -> PolynomialZ {
        self.factors.iter().fold(PolynomialZ::constant(self.unit.clone()), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    pub fn multiplicity(&self, f: &PolynomialZ) -> usize {
        let f = f.primitive();
        self.factors.iter().find(|(g, _)| *g == f).map(|(_, e)| *e).unwrap_or(0)
    }
}

/// Complete factorization over `ℤ`, factors sorted by degree then coefficients.
pub fn factor_over_z(f: &PolynomialZ) -> Result<FactoredPoly, ZPolyError> {
    if f.is_zero() {
        return Err(ZPolyError::Zero);
    }
    let prim = f.primitive();
    let unit = f.content() * if f.lead().is_negative() { -1 } else { 1 };
    if prim.deg() == 0 {
        return Ok(FactoredPoly { unit, factors: Vec::new() });
    }
    let sqf = prim.squarefree_part();
    let mut irreducibles = Vec::new();
    let mut rest = sqf.clone();
    // powers of X first
    if rest.c[0].is_zero() {
        irreducibles.push(PolynomialZ::x());
        rest = rest.div_exact(&PolynomialZ::x()).expect("X divides");
    }
    if rest.deg() > 0 {
        irreducibles.extend(zassenhaus(&rest)?);
    }
    let mut factors = Vec::new();
    for q in irreducibles {
        let mut e = 0;
        let mut cur = prim.clone();
        while let Some(next) = cur.div_exact(&q) {
            cur = next;
            e += 1;
        }
        factors.push((q, e));
    }
    factors.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.leading_first().cmp(&b.0.leading_first())));
    Ok(FactoredPoly { unit, factors })
}

/// Irreducible factors of a squarefree primitive polynomial with nonzero constant term.
fn zassenhaus(f: &PolynomialZ) -> Result<Vec<PolynomialZ>, ZPolyError> {
    let n = f.deg();
    if n == 1 {
        return Ok(vec![f.primitive()]);
    }
    let (p, modular) = choose_prime(f)?;
    if modular.len() == 1 {
        return Ok(vec![f.primitive()]);
    }
    if n > MAX_RECOMBINATION_DEGREE {
        return Err(ZPolyError::TooLarge(n));
    }
    let lc = f.lead();
    // factor coefficients are bounded by 2^n · ||f||_2 (Mignotte), times lc for the scaled product
    let norm2: BigInt = f.c.iter().map(|x| x * x).fold(BigInt::zero(), |a, b| a + b);
    let norm = isqrt(&norm2) + 1;
    let bound = (BigInt::one() << n) * norm * lc.abs() * 2 + 1;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    let lifted = hensel_lift(f, &modular, p, k);

    let mut remaining: Vec<Vec<BigInt>> = lifted;
    let mut g = f.clone();
    let mut out = Vec::new();
    let mut s = 1;
    'outer: while 2 * s <= remaining.len() {
        let r = remaining.len();
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let glc = g.lead();
            let mut h = vec![glc.clone()];
            for &i in &idx {
                h = mul_mod(&h, &remaining[i], &pk);
            }
            let cand = PolynomialZ::new(h.iter().map(|x| symmetric(x, &pk)).collect()).primitive();
            if trailing_divides(&cand, &g) {
                if let Some(q) = g.div_exact(&cand) {
                    out.push(cand);
                    g = q;
                    remaining = remaining.into_iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, v)| v).collect();
                    continue 'outer;
                }
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
        s += 1;
    }
    out.push(g.primitive());
    Ok(out)
}

fn trailing_divides(cand: &PolynomialZ, g: &PolynomialZ) -> bool {
    let c = &cand.c[0];
    !c.is_zero() && (&g.c[0] % c).is_zero()
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

/// Picks the prime (among the first few admissible) giving the fewest modular factors.
fn choose_prime(f: &PolynomialZ) -> Result<(u64, Vec<FpPoly>), ZPolyError> {
    let n = f.deg();
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    let mut p = 2u64;
    while tried < 6 && p < 10_000 {
        p += 1;
        if !crate::fp::is_prime(p) {
            continue;
        }
        let fp = f.to_fp(p);
        if fp.degree() != n {
            continue;
        }
        if fp.gcd(&fp.derivative()).degree() != 0 {
            continue;
        }
        tried += 1;
        let lc_inv = crate::fp::inv_mod(fp.lead(), p).expect("lead is a unit");
        let fs: Vec<FpPoly> = fp.scale(lc_inv).factor().into_iter().map(|(g, _)| g).collect();
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
        if best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
            break;
        }
    }
    best.ok_or(ZPolyError::NoPrime)
}

fn fp_to_big(f: &FpPoly) -> Vec<BigInt> {
    f.coeffs().iter().map(|&x| BigInt::from(x)).collect()
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

fn mul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out.into_iter().map(|x| x.mod_floor(m)).collect())
}

fn sub_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()).mod_floor(m))
            .collect(),
    )
}

/// Lifts `f ≡ lc · Π g_i (mod p)` with monic `g_i` to a factorization modulo `p^k`.
fn hensel_lift(f: &PolynomialZ, factors: &[FpPoly], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let pk = BigInt::from(p).pow(k);
    let mut out = Vec::with_capacity(factors.len());
    let mut target: Vec<BigInt> = f.c.iter().map(|x| x.mod_floor(&pk)).collect();
    for (i, g) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            // what is left is lc · g; make it monic
            let lc = target.last().cloned().unwrap_or_default();
            let inv = lc.modinv(&pk).expect("lc is a unit mod p^k");
            out.push(target.iter().map(|x| (x * &inv).mod_floor(&pk)).collect());
            break;
        }
        let rest = factors[i + 1..].iter().fold(FpPoly::one(p), |acc, h| acc.mul(h));
        let lc = target.last().map(|x| x.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0)).unwrap_or(0);
        let rest = rest.scale(lc);
        let (a, b) = lift_pair(&target, g, &rest, p, k);
        out.push(a);
        target = b;
    }
    out
}

/// Lifts `t ≡ a·b (mod p)` (monic `a`, coprime factors) to `t ≡ A·B (mod p^k)`.
fn lift_pair(t: &[BigInt], a: &FpPoly, b: &FpPoly, p: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let (g, _, tt) = a.xgcd(b);
    debug_assert!(g.is_one());
    let pb = BigInt::from(p);
    let mut big_a = fp_to_big(a);
    let mut big_b = fp_to_big(b);
    let mut pj = pb.clone();
    for _ in 1..k {
        let next = &pj * &pb;
        let prod = mul_mod(&big_a, &big_b, &next);
        let err = sub_mod(t, &prod, &next);
        // err is divisible by p^j
        let e = FpPoly::new(p, err.iter().map(|x| (x / &pj).mod_floor(&pb).to_u64().unwrap_or(0)).collect());
        // alpha·b + beta·a ≡ e with deg alpha < deg a
        let alpha = tt.mul(&e).rem(a);
        let beta = e.sub(&alpha.mul(b)).divrem(a).0;
        let upd = |x: &mut Vec<BigInt>, d: &FpPoly| {
            let dv = fp_to_big(d);
            if x.len() < dv.len() {
                x.resize(dv.len(), BigInt::zero());
            }
            for (i, c) in dv.iter().enumerate() {
                x[i] = (&x[i] + c * &pj).mod_floor(&next);
            }
        };
        upd(&mut big_a, &alpha);
        upd(&mut big_b, &beta);
        pj = next;
    }
    (trim(big_a), trim(big_b))
}
