//! Exact numbers `a + b√n` with rational `a`, `b` and squarefree `n`.

use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("values from different fields: sqrt({0}) and sqrt({1})")]
    FieldMismatch(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator divisible by {0}")]
    NotIntegralAt(u64),
}

/// `a + b·√n`; rationals are stored with `b = 0` and `n = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: Rational,
    b: Rational,
    n: i64,
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    let m = n.unsigned_abs();
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `n = k² · m` with `m` squarefree; returns `(k, m)`.
pub fn square_split(n: &BigInt) -> Option<(BigInt, i64)> {
    if n.is_zero() {
        return Some((BigInt::zero(), 1));
    }
    let mut rest = n.abs();
    let mut k = BigInt::one();
    let mut m = BigInt::one();
    let mut d = BigInt::from(2);
    // trial division; inputs are discriminants of small quadratics
    while &d * &d <= rest {
        let dd = &d * &d;
        while (&rest % &dd).is_zero() {
            rest /= &dd;
            k *= &d;
        }
        if (&rest % &d).is_zero() {
            rest /= &d;
            m *= &d;
        }
        d += 1;
    }
    m *= rest;
    if n.is_negative() {
        m = -m;
    }
    Some((k, m.to_i64()?))
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational, n: i64) -> Result<Self, QuadError> {
        if b.is_zero() || n == 1 {
            let a = if n == 1 { a + b } else { a };
            return Ok(QuadraticNumber::rational(a));
        }
        if !is_squarefree(n) {
            return Err(QuadError::NotSquarefree(n));
        }
        Ok(QuadraticNumber { a, b, n })
    }

    pub fn rational(a: Rational) -> Self {
        QuadraticNumber { a, b: Rational::zero(), n: 1 }
    }

    pub fn from_int(a: i64) -> Self {
        QuadraticNumber::rational(Rational::from_integer(a.into()))
    }

    pub fn from_parts(a_num: i64, a_den: i64, b_num: i64, b_den: i64, n: i64) -> Result<Self, QuadError> {
        if a_den == 0 || b_den == 0 {
            return Err(QuadError::DivisionByZero);
        }
        QuadraticNumber::new(
            Rational::new(a_num.into(), a_den.into()),
            Rational::new(b_num.into(), b_den.into()),
            n,
        )
    }

    /// `√n` itself.
    pub fn sqrt(n: i64) -> Result<Self, QuadError> {
        QuadraticNumber::new(Rational::zero(), Rational::one(), n)
    }

    pub fn zero() -> Self {
        QuadraticNumber::from_int(0)
    }

    pub fn one() -> Self {
        QuadraticNumber::from_int(1)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Radicand; `1` for rationals.
    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    fn field(&self, o: &Self) -> Result<i64, QuadError> {
        match (self.n, o.n) {
            (1, m) | (m, 1) => Ok(m),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(QuadError::FieldMismatch(x, y)),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, QuadError> {
        let n = self.field(o)?;
        QuadraticNumber::new(&self.a + &o.a, &self.b + &o.b, n)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, QuadError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, QuadError> {
        let n = self.field(o)?;
        let nn = Rational::from_integer(n.into());
        let a = &self.a * &o.a + &self.b * &o.b * nn;
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadraticNumber::new(a, b, n)
    }

    pub fn neg(&self) -> Self {
        QuadraticNumber { a: -&self.a, b: -&self.b, n: self.n }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return QuadraticNumber::zero();
        }
        QuadraticNumber { a: &self.a * c, b: &self.b * c, n: self.n }
    }

    /// Galois conjugate `a − b√n`.
    pub fn conj(&self) -> Self {
        QuadraticNumber { a: self.a.clone(), b: -&self.b, n: self.n }
    }

    /// Complex conjugate: the Galois conjugate for imaginary fields, identity otherwise.
    pub fn complex_conj(&self) -> Self {
        if self.n < 0 {
            self.conj()
        } else {
            self.clone()
        }
    }

    /// Field norm `a² − n b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.n.into())
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    /// `z · conj_ℂ(z)`.
    pub fn abs_sq(&self) -> Self {
        self.mul(&self.complex_conj()).expect("same field")
    }

    pub fn inv(&self) -> Result<Self, QuadError> {
        let nrm = self.norm();
        if nrm.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        let c = self.conj();
        Ok(QuadraticNumber { a: &c.a / &nrm, b: &c.b / &nrm, n: self.n })
    }

    pub fn div(&self, o: &Self) -> Result<Self, QuadError> {
        self.mul(&o.inv()?)
    }

    /// Membership in the ring of integers of `ℚ(√n)`.
    pub fn is_algebraic_integer(&self) -> bool {
        if self.is_rational() {
            return self.a.is_integer();
        }
        if self.n.rem_euclid(4) == 1 {
            let ta = &self.a + &self.a;
            let tb = &self.b + &self.b;
            ta.is_integer() && tb.is_integer() && (ta.to_integer() - tb.to_integer()).is_even()
        } else {
            self.a.is_integer() && self.b.is_integer()
        }
    }

    /// Image under `√n ↦ s` in `F_p`.
    pub fn reduce_mod(&self, p: u64, s: u64) -> Result<u64, QuadError> {
        let a = rational_mod(&self.a, p)?;
        if self.is_rational() {
            return Ok(a);
        }
        let b = rational_mod(&self.b, p)?;
        Ok((a + crate::fp::mul_mod(b, s % p, p)) % p)
    }

    /// Floating-point approximation of the real value (real fields only).
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * libm_sqrt(self.n as f64)
    }

    /// Exact sign of a real value.
    pub fn signum_real(&self) -> Option<i8> {
        if self.n < 0 && !self.b.is_zero() {
            return None;
        }
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return Some(sa);
        }
        if sa == 0 || sa == sb {
            return Some(if sa == 0 { sb } else { sa });
        }
        // a and b√n of opposite sign: compare a² with n b²
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_integer(self.n.into());
        Some(if lhs > rhs { sa } else if lhs < rhs { sb } else { 0 })
    }

    /// Components as `(a_num, a_den, b_num, b_den, n)`.
    pub fn parts(&self) -> (BigInt, BigInt, BigInt, BigInt, i64) {
        (self.a.numer().clone(), self.a.denom().clone(), self.b.numer().clone(), self.b.denom().clone(), self.n)
    }
}

fn sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn libm_sqrt(x: f64) -> f64 {
    // Newton iteration; core has no sqrt without std
    if x <= 0.0 {
        return 0.0;
    }
    let mut y = if x > 1.0 { x / 2.0 } else { 1.0 };
    for _ in 0..64 {
        y = 0.5 * (y + x / y);
    }
    y
}

pub fn rational_mod(q: &Rational, p: u64) -> Result<u64, QuadError> {
    let pb = BigInt::from(p);
    let num = q.numer().mod_floor(&pb).to_u64().unwrap_or(0);
    let den = q.denom().mod_floor(&pb).to_u64().unwrap_or(0);
    let inv = crate::fp::inv_mod(den, p).ok_or(QuadError::NotIntegralAt(p))?;
    Ok(crate::fp::mul_mod(num, inv, p))
}

fn radical(n: i64) -> String {
    match n {
        -1 => String::from("i"),
        n if n < 0 => format!("i{}", -n),
        n => format!("r{}", n),
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let r = radical(self.n);
        let b = if self.b == Rational::one() {
            r
        } else if self.b == -Rational::one() {
            format!("-{}", r)
        } else {
            format!("{}*{}", self.b, r)
        };
        if self.a.is_zero() {
            write!(f, "{}", b)
        } else if b.starts_with('-') {
            write!(f, "{}{}", self.a, b)
        } else {
            write!(f, "{}+{}", self.a, b)
        }
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert_eq, proptest};

    fn q(a: i64, b: i64, n: i64) -> QuadraticNumber {
        QuadraticNumber::from_parts(a, 1, b, 1, n).unwrap()
    }

    #[test]
    fn canonical_rationals() {
        assert_eq!(q(3, 0, 5), QuadraticNumber::from_int(3));
        assert_eq!(q(3, 0, 5).n(), 1);
        assert!(QuadraticNumber::sqrt(12).is_err());
    }

    #[test]
    fn arithmetic_in_q_sqrt3() {
        let x = q(3, -4, 3);
        let y = x.mul(&x.conj()).unwrap();
        assert_eq!(y, QuadraticNumber::from_int(9 - 48));
        assert_eq!(x.inv().unwrap().mul(&x).unwrap(), QuadraticNumber::one());
        assert!(q(1, 1, 2).add(&q(1, 1, 3)).is_err());
    }

    #[test]
    fn reduction_with_chosen_root() {
        // 3 - 4·6 = -21 ≡ 1 (mod 11)
        assert_eq!(q(3, -4, 3).reduce_mod(11, 6).unwrap(), 1);
        // ramified: r33 ↦ 0
        assert_eq!(q(5, 7, 33).reduce_mod(11, 0).unwrap(), 5);
        let half = QuadraticNumber::from_parts(1, 2, 0, 1, 1).unwrap();
        assert_eq!(half.reduce_mod(11, 0).unwrap(), 6);
        assert!(half.reduce_mod(2, 0).is_err());
    }

    #[test]
    fn algebraic_integers() {
        let golden = QuadraticNumber::from_parts(1, 2, 1, 2, 5).unwrap();
        assert!(golden.is_algebraic_integer());
        assert!(!QuadraticNumber::from_parts(1, 2, 1, 2, 3).unwrap().is_algebraic_integer());
        assert!(!QuadraticNumber::from_parts(1, 2, 0, 1, 5).unwrap().is_algebraic_integer());
        assert!(q(2, -7, 3).is_algebraic_integer());
        // (1 + i3)/2 is an Eisenstein integer
        assert!(QuadraticNumber::from_parts(1, 2, 1, 2, -3).unwrap().is_algebraic_integer());
    }

    #[test]
    fn exact_real_sign() {
        assert_eq!(q(-6, 1, 5).signum_real(), Some(-1));
        assert_eq!(q(3, -1, 5).signum_real(), Some(1));
        assert_eq!(q(2, -1, 5).signum_real(), Some(-1));
        assert_eq!(q(0, 0, 1).signum_real(), Some(0));
        assert_eq!(q(1, 1, -1).signum_real(), None);
    }

    #[test]
    fn imaginary_modulus() {
        let z = q(1, 2, -1);
        assert_eq!(z.abs_sq(), QuadraticNumber::from_int(5));
        assert_eq!(q(1, 2, 3).abs_sq(), q(13, 4, 3));
    }

    #[test]
    fn square_split_of_discriminants() {
        assert_eq!(square_split(&BigInt::from(180)), Some((BigInt::from(6), 5)));
        assert_eq!(square_split(&BigInt::from(-12)), Some((BigInt::from(2), -3)));
        assert_eq!(square_split(&BigInt::from(33)), Some((BigInt::from(1), 33)));
        assert_eq!(square_split(&BigInt::from(49)), Some((BigInt::from(7), 1)));
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", q(3, -4, 3)), "3-4*r3");
        assert_eq!(alloc::format!("{}", q(0, 1, 5)), "r5");
        assert_eq!(alloc::format!("{}", q(1, 1, -1)), "1+i");
    }

    proptest! {
        #[test]
        fn reduction_is_a_ring_homomorphism(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, den in 1i64..10) {
            // √5 ↦ 4 in F_11
            let x = QuadraticNumber::from_parts(a, den, b, 1, 5).unwrap();
            let y = QuadraticNumber::from_parts(c, 1, d, den, 5).unwrap();
            let r = |z: &QuadraticNumber| z.reduce_mod(11, 4).unwrap();
            prop_assert_eq!(r(&x.add(&y).unwrap()), (r(&x) + r(&y)) % 11);
            prop_assert_eq!(r(&x.mul(&y).unwrap()), (r(&x) * r(&y)) % 11);
        }

        #[test]
        fn inverse_roundtrip(a in -30i64..30, b in 1i64..30) {
            let x = q(a, b, 7);
            prop_assert_eq!(x.mul(&x.inv().unwrap()).unwrap(), QuadraticNumber::one());
        }
    }
}
