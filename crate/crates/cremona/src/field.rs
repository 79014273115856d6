//! Exact coefficient fields: arbitrary-precision rationals, prime fields
//! `GF(p)`, and cyclotomic extensions `Q(zeta_p)` represented modulo the
//! p-th cyclotomic polynomial `x^(p-1) + ... + x + 1`.
//!
//! Every element is kept in a canonical form (reduced fraction, least
//! residue, polynomial of degree < p-1), so equality is plain payload
//! equality and values can be shared freely between threads.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Errors raised by field construction and arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime modulus {0} must be below 2^31")]
    ModulusTooLarge(u32),
    #[error("cyclotomic order must be an odd prime, got {0}")]
    BadCyclotomicOrder(u32),
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(FieldDescriptor, FieldDescriptor),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} has no primitive root of unity")]
    NoRootOfUnity(FieldDescriptor),
    #[error("denominator of {0} vanishes modulo {1}")]
    BadReduction(BigRational, u32),
    #[error("cannot parse field selector {0:?} (expected Q, GF(p) or CYC(p))")]
    BadSelector(String),
}

/// Which exact coefficient field values live in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum FieldDescriptor {
    /// The rational numbers.
    Rationals,
    /// The prime field `GF(p)` with `p < 2^31`.
    PrimeField(u32),
    /// The cyclotomic field `Q(zeta_p)` for an odd prime `p`.
    Cyclotomic(u32),
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    let n = n as u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

impl FieldDescriptor {
    /// Checked constructor for `GF(p)`.
    pub fn prime_field(p: u32) -> Result<Self, FieldError> {
        if p >= 1 << 31 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldDescriptor::PrimeField(p))
    }

    /// Checked constructor for `Q(zeta_p)`, p an odd prime.
    pub fn cyclotomic(p: u32) -> Result<Self, FieldError> {
        if p < 3 || !is_prime(p) {
            return Err(FieldError::BadCyclotomicOrder(p));
        }
        Ok(FieldDescriptor::Cyclotomic(p))
    }

    /// Re-checks the descriptor invariants (used when a descriptor was built
    /// directly rather than through the checked constructors).
    pub fn validate(&self) -> Result<(), FieldError> {
        match *self {
            FieldDescriptor::Rationals => Ok(()),
            FieldDescriptor::PrimeField(p) => Self::prime_field(p).map(|_| ()),
            FieldDescriptor::Cyclotomic(p) => Self::cyclotomic(p).map(|_| ()),
        }
    }

    /// Characteristic of the field.
    pub fn characteristic(&self) -> u32 {
        match *self {
            FieldDescriptor::PrimeField(p) => p,
            _ => 0,
        }
    }

    /// Parses the CLI selector syntax `Q`, `GF(p)`, `CYC(p)`.
    pub fn parse_selector(text: &str) -> Result<Self, FieldError> {
        let t = text.trim();
        if t == "Q" {
            return Ok(FieldDescriptor::Rationals);
        }
        let inner = |prefix: &str| -> Option<u32> {
            t.strip_prefix(prefix)?
                .strip_prefix('(')?
                .strip_suffix(')')?
                .trim()
                .parse()
                .ok()
        };
        if let Some(p) = inner("GF") {
            return Self::prime_field(p);
        }
        if let Some(p) = inner("CYC") {
            return Self::cyclotomic(p);
        }
        Err(FieldError::BadSelector(text.to_string()))
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::PrimeField(p) => write!(f, "GF({p})"),
            FieldDescriptor::Cyclotomic(p) => write!(f, "CYC({p})"),
        }
    }
}

/// An exact field element in canonical form.
///
/// Canonical means: reduced fraction for rationals, least residue for
/// `GF(p)`, coefficient vector of length p-1 for `Q(zeta_p)`. Equality is
/// structural equality of the payload.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FieldElem {
    Rational(BigRational),
    Prime { p: u32, value: u64 },
    Cyclotomic { p: u32, coeffs: Vec<BigRational> },
}

/// The four field operations, as named by the checked `arith` entry point.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

// ---- prime-field helpers (p < 2^31, so products fit in u64) ----

fn pf_reduce(p: u32, v: i64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

fn pf_inv(p: u32, a: u64) -> Result<u64, FieldError> {
    if a == 0 {
        return Err(FieldError::DivisionByZero);
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (a as i64, p as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    Ok(pf_reduce(p, s0))
}

// ---- dense univariate helpers over Q, used by the cyclotomic payload ----

fn qp_trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn qp_deg(v: &[BigRational]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

/// Reduces an arbitrary coefficient vector modulo `Phi_p` and pads to the
/// canonical length p-1.
fn cyc_reduce(p: u32, mut v: Vec<BigRational>) -> Vec<BigRational> {
    let m = (p - 1) as usize;
    // x^(p-1) = -(x^(p-2) + ... + x + 1)
    for k in (m..v.len()).rev() {
        let c = std::mem::replace(&mut v[k], BigRational::zero());
        if c.is_zero() {
            continue;
        }
        for j in 0..m {
            let idx = k - m + j;
            let updated = &v[idx] - &c;
            v[idx] = updated;
        }
    }
    v.truncate(m);
    v.resize(m, BigRational::zero());
    v
}

fn cyc_modulus(p: u32) -> Vec<BigRational> {
    vec![BigRational::one(); p as usize]
}

/// Division with remainder in Q[x]; divisor must be nonzero.
fn qp_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = qp_deg(b).expect("division by zero polynomial");
    let lead = &b[db];
    let mut rem: Vec<BigRational> = a.to_vec();
    qp_trim(&mut rem);
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(db) + 1];
    while let Some(dr) = qp_deg(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / lead;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            let updated = &rem[shift + i] - &(&factor * bc);
            rem[shift + i] = updated;
        }
        quot[shift] = factor;
        qp_trim(&mut rem);
    }
    qp_trim(&mut quot);
    (quot, rem)
}

/// Inverse of `a` modulo `modulus` in Q[x] via extended Euclid.
fn qp_invmod(a: &[BigRational], modulus: &[BigRational]) -> Vec<BigRational> {
    let (mut r0, mut r1) = (modulus.to_vec(), a.to_vec());
    let (mut t0, mut t1) = (Vec::new(), vec![BigRational::one()]);
    qp_trim(&mut r1);
    while qp_deg(&r1).is_some() {
        let (q, r) = qp_divrem(&r0, &r1);
        let mut t = t0.clone();
        // t = t0 - q * t1
        let prod_len = q.len() + t1.len();
        t.resize(t.len().max(prod_len), BigRational::zero());
        for (i, qc) in q.iter().enumerate() {
            if qc.is_zero() {
                continue;
            }
            for (j, tc) in t1.iter().enumerate() {
                let updated = &t[i + j] - &(qc * tc);
                t[i + j] = updated;
            }
        }
        qp_trim(&mut t);
        (r0, r1) = (r1, r);
        (t0, t1) = (t1, t);
    }
    // r0 is a nonzero constant gcd; scale t0 by its inverse
    let c = &r0[qp_deg(&r0).expect("gcd of unit and modulus is nonzero")];
    t0.iter().map(|t| t / c).collect()
}

impl FieldElem {
    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            FieldElem::Rational(_) => FieldDescriptor::Rationals,
            FieldElem::Prime { p, .. } => FieldDescriptor::PrimeField(*p),
            FieldElem::Cyclotomic { p, .. } => FieldDescriptor::Cyclotomic(*p),
        }
    }

    pub fn zero(desc: FieldDescriptor) -> FieldElem {
        FieldElem::from_int(desc, 0)
    }

    pub fn one(desc: FieldDescriptor) -> FieldElem {
        FieldElem::from_int(desc, 1)
    }

    pub fn from_int(desc: FieldDescriptor, v: i64) -> FieldElem {
        match desc {
            FieldDescriptor::Rationals => FieldElem::Rational(BigRational::from(BigInt::from(v))),
            FieldDescriptor::PrimeField(p) => FieldElem::Prime { p, value: pf_reduce(p, v) },
            FieldDescriptor::Cyclotomic(p) => {
                let mut coeffs = vec![BigRational::zero(); (p - 1) as usize];
                coeffs[0] = BigRational::from(BigInt::from(v));
                FieldElem::Cyclotomic { p, coeffs }
            }
        }
    }

    /// Embeds a rational into the field; for `GF(p)` the denominator must be
    /// a unit mod p.
    pub fn from_rational(desc: FieldDescriptor, q: &BigRational) -> Result<FieldElem, FieldError> {
        match desc {
            FieldDescriptor::Rationals => Ok(FieldElem::Rational(q.clone())),
            FieldDescriptor::Cyclotomic(p) => {
                let mut coeffs = vec![BigRational::zero(); (p - 1) as usize];
                coeffs[0] = q.clone();
                Ok(FieldElem::Cyclotomic { p, coeffs })
            }
            FieldDescriptor::PrimeField(p) => {
                let pb = BigInt::from(p);
                let den = (q.denom() % &pb + &pb) % &pb;
                let den_u64: u64 = den.try_into().expect("residue fits u64");
                if den_u64 == 0 {
                    return Err(FieldError::BadReduction(q.clone(), p));
                }
                let num = (q.numer() % &pb + &pb) % &pb;
                let num_u64: u64 = num.try_into().expect("residue fits u64");
                let value = num_u64 * pf_inv(p, den_u64)? % p as u64;
                Ok(FieldElem::Prime { p, value })
            }
        }
    }

    /// Fraction `a/b` in the field.
    pub fn from_fraction(desc: FieldDescriptor, a: i64, b: i64) -> Result<FieldElem, FieldError> {
        let num = FieldElem::from_int(desc, a);
        let den = FieldElem::from_int(desc, b);
        num.div(&den)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_zero(),
            FieldElem::Prime { value, .. } => *value == 0,
            FieldElem::Cyclotomic { coeffs, .. } => coeffs.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_one(),
            FieldElem::Prime { value, .. } => *value == 1,
            FieldElem::Cyclotomic { coeffs, .. } => {
                coeffs[0].is_one() && coeffs[1..].iter().all(|c| c.is_zero())
            }
        }
    }

    fn check_same(&self, other: &FieldElem) {
        assert_eq!(
            self.descriptor(),
            other.descriptor(),
            "field mismatch in arithmetic"
        );
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.check_same(other);
        match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Prime { p, value: a }, FieldElem::Prime { value: b, .. }) => {
                FieldElem::Prime { p: *p, value: (a + b) % *p as u64 }
            }
            (FieldElem::Cyclotomic { p, coeffs: a }, FieldElem::Cyclotomic { coeffs: b, .. }) => {
                FieldElem::Cyclotomic {
                    p: *p,
                    coeffs: a.iter().zip(b).map(|(x, y)| x + y).collect(),
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Prime { p, value } => FieldElem::Prime {
                p: *p,
                value: if *value == 0 { 0 } else { *p as u64 - value },
            },
            FieldElem::Cyclotomic { p, coeffs } => FieldElem::Cyclotomic {
                p: *p,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
        }
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.check_same(other);
        match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Prime { p, value: a }, FieldElem::Prime { value: b, .. }) => {
                FieldElem::Prime { p: *p, value: a * b % *p as u64 }
            }
            (FieldElem::Cyclotomic { p, coeffs: a }, FieldElem::Cyclotomic { coeffs: b, .. }) => {
                let mut prod = vec![BigRational::zero(); 2 * a.len()];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let updated = &prod[i + j] + &(x * y);
                        prod[i + j] = updated;
                    }
                }
                FieldElem::Cyclotomic { p: *p, coeffs: cyc_reduce(*p, prod) }
            }
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Rational(a) => FieldElem::Rational(a.recip()),
            FieldElem::Prime { p, value } => FieldElem::Prime { p: *p, value: pf_inv(*p, *value)? },
            FieldElem::Cyclotomic { p, coeffs } => {
                let inv = qp_invmod(coeffs, &cyc_modulus(*p));
                FieldElem::Cyclotomic { p: *p, coeffs: cyc_reduce(*p, inv) }
            }
        })
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power, with negative exponents through the inverse.
    pub fn pow(&self, e: i64) -> Result<FieldElem, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = FieldElem::one(self.descriptor());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// The checked four-operation entry point: descriptor mismatch and
    /// division by zero are reported as errors.
    pub fn arith(op: ArithOp, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
        if a.descriptor() != b.descriptor() {
            return Err(FieldError::Mismatch(a.descriptor(), b.descriptor()));
        }
        match op {
            ArithOp::Add => Ok(a.add(b)),
            ArithOp::Sub => Ok(a.sub(b)),
            ArithOp::Mul => Ok(a.mul(b)),
            ArithOp::Div => a.div(b),
        }
    }

    /// The distinguished primitive p-th root of unity of `Q(zeta_p)`.
    pub fn root_of_unity(desc: FieldDescriptor) -> Result<FieldElem, FieldError> {
        match desc {
            FieldDescriptor::Cyclotomic(p) => {
                let mut coeffs = vec![BigRational::zero(); (p - 1) as usize];
                coeffs[1] = BigRational::one();
                Ok(FieldElem::Cyclotomic { p, coeffs })
            }
            other => Err(FieldError::NoRootOfUnity(other)),
        }
    }

    /// Exact square root when one exists in the field. Rationals need both
    /// numerator and denominator to be perfect squares; `GF(p)` uses
    /// Tonelli-Shanks; cyclotomic square roots are not attempted.
    pub fn sqrt(&self) -> Option<FieldElem> {
        match self {
            FieldElem::Rational(q) => {
                if q.is_negative() {
                    return None;
                }
                let num = q.numer();
                let den = q.denom();
                let sn = num.sqrt();
                let sd = den.sqrt();
                if &(&sn * &sn) == num && &(&sd * &sd) == den {
                    Some(FieldElem::Rational(BigRational::new(sn, sd)))
                } else {
                    None
                }
            }
            FieldElem::Prime { p, value } => pf_sqrt(*p, *value).map(|r| FieldElem::Prime { p: *p, value: r }),
            FieldElem::Cyclotomic { .. } => None,
        }
    }
}

/// Tonelli-Shanks square root in `GF(p)`.
fn pf_sqrt(p: u32, a: u64) -> Option<u64> {
    let pm = p as u64;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        b %= pm;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % pm;
            }
            b = b * b % pm;
            e >>= 1;
        }
        acc
    };
    if pow(a, (pm - 1) / 2) != 1 {
        return None;
    }
    if pm % 4 == 3 {
        return Some(pow(a, (pm + 1) / 4));
    }
    // write p-1 = q * 2^s with q odd
    let mut q = pm - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // find a quadratic non-residue
    let mut z = 2u64;
    while pow(z, (pm - 1) / 2) == 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow(z, q);
    let mut t = pow(a, q);
    let mut r = pow(a, (q + 1) / 2);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % pm;
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1));
        m = i;
        c = b * b % pm;
        t = t * c % pm;
        r = r * b % pm;
    }
    Some(r)
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(q) => write!(f, "{q}"),
            FieldElem::Prime { value, .. } => write!(f, "{value}"),
            FieldElem::Cyclotomic { coeffs, .. } => {
                if self.is_zero() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (k, c) in coeffs.iter().enumerate().rev() {
                    if c.is_zero() {
                        continue;
                    }
                    let mag = c.abs();
                    if first {
                        if c.is_negative() {
                            write!(f, "-")?;
                        }
                        first = false;
                    } else if c.is_negative() {
                        write!(f, " - ")?;
                    } else {
                        write!(f, " + ")?;
                    }
                    match k {
                        0 => write!(f, "{mag}")?,
                        _ => {
                            if !mag.is_one() {
                                write!(f, "{mag}*")?;
                            }
                            if k == 1 {
                                write!(f, "r")?;
                            } else {
                                write!(f, "r^{k}")?;
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Draws a small "random" element, used by the randomized identity checks.
pub fn sample(desc: FieldDescriptor, rng: &mut impl rand::Rng) -> FieldElem {
    match desc {
        FieldDescriptor::Rationals => {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            FieldElem::from_fraction(desc, num, den).expect("nonzero denominator")
        }
        FieldDescriptor::PrimeField(p) => FieldElem::Prime { p, value: rng.gen_range(0..p as u64) },
        FieldDescriptor::Cyclotomic(p) => {
            let coeffs = (0..p - 1)
                .map(|_| BigRational::from(BigInt::from(rng.gen_range(-4i64..=4))))
                .collect();
            FieldElem::Cyclotomic { p, coeffs }
        }
    }
}

/// Like [`sample`] but never returns zero.
pub fn sample_nonzero(desc: FieldDescriptor, rng: &mut impl rand::Rng) -> FieldElem {
    loop {
        let v = sample(desc, rng);
        if !v.is_zero() {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> FieldElem {
        FieldElem::from_fraction(FieldDescriptor::Rationals, a, b).unwrap()
    }

    #[test]
    fn rational_addition() {
        let sum = FieldElem::arith(ArithOp::Add, &q(1, 2), &q(1, 3)).unwrap();
        assert_eq!(sum, q(5, 6));
    }

    #[test]
    fn prime_field_division() {
        let d = FieldDescriptor::prime_field(7).unwrap();
        let r = FieldElem::arith(ArithOp::Div, &FieldElem::from_int(d, 3), &FieldElem::from_int(d, 5))
            .unwrap();
        assert_eq!(r, FieldElem::from_int(d, 2));
    }

    #[test]
    fn cyclotomic_square_reduces() {
        let d = FieldDescriptor::cyclotomic(3).unwrap();
        let z = FieldElem::root_of_unity(d).unwrap();
        // zeta^2 = -1 - zeta mod Phi_3
        let expected = FieldElem::from_int(d, -1).sub(&z);
        assert_eq!(z.mul(&z), expected);
    }

    #[test]
    fn root_of_unity_orders() {
        for p in [3u32, 5, 7] {
            let d = FieldDescriptor::cyclotomic(p).unwrap();
            let z = FieldElem::root_of_unity(d).unwrap();
            let one = FieldElem::one(d);
            assert_eq!(z.pow(p as i64).unwrap(), one, "zeta^{p} = 1");
            for k in 1..p {
                assert_ne!(z.pow(k as i64).unwrap(), one, "zeta^{k} != 1");
            }
        }
    }

    #[test]
    fn root_of_unity_requires_cyclotomic() {
        let d = FieldDescriptor::prime_field(7).unwrap();
        assert!(matches!(
            FieldElem::root_of_unity(d),
            Err(FieldError::NoRootOfUnity(_))
        ));
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for p in [3u32, 5, 7] {
            let d = FieldDescriptor::cyclotomic(p).unwrap();
            let z = FieldElem::root_of_unity(d).unwrap();
            let mut acc = FieldElem::zero(d);
            for k in 0..p {
                acc = acc.add(&z.pow(k as i64).unwrap());
            }
            assert!(acc.is_zero(), "sum of all p-th roots vanishes");
        }
    }

    #[test]
    fn field_axioms_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for desc in [
            FieldDescriptor::Rationals,
            FieldDescriptor::prime_field(101).unwrap(),
            FieldDescriptor::cyclotomic(5).unwrap(),
        ] {
            for _ in 0..60 {
                let a = sample(desc, &mut rng);
                let b = sample(desc, &mut rng);
                let c = sample(desc, &mut rng);
                assert_eq!(a.add(&b), b.add(&a));
                assert_eq!(a.mul(&b), b.mul(&a));
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                if !a.is_zero() {
                    assert!(a.mul(&a.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let a = q(1, 2);
        let b = FieldElem::from_int(FieldDescriptor::prime_field(5).unwrap(), 1);
        assert!(matches!(
            FieldElem::arith(ArithOp::Add, &a, &b),
            Err(FieldError::Mismatch(_, _))
        ));
    }

    #[test]
    fn division_by_zero_is_reported() {
        let a = q(1, 2);
        let z = FieldElem::zero(FieldDescriptor::Rationals);
        assert_eq!(
            FieldElem::arith(ArithOp::Div, &a, &z),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn descriptor_validation() {
        assert!(FieldDescriptor::prime_field(6).is_err());
        assert!(FieldDescriptor::cyclotomic(2).is_err());
        assert!(FieldDescriptor::prime_field(2147483647).is_ok());
        assert!(FieldDescriptor::PrimeField(9).validate().is_err());
    }

    #[test]
    fn selector_round_trip() {
        for s in ["Q", "GF(7)", "CYC(5)"] {
            let d = FieldDescriptor::parse_selector(s).unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!(FieldDescriptor::parse_selector("R").is_err());
    }

    #[test]
    fn sqrt_paths() {
        assert_eq!(q(9, 4).sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt(), None);
        let d = FieldDescriptor::prime_field(13).unwrap();
        let a = FieldElem::from_int(d, 4);
        let r = a.sqrt().unwrap();
        assert_eq!(r.mul(&r), a);
        // 5 is a non-residue mod 13
        assert_eq!(FieldElem::from_int(d, 5).sqrt(), None);
    }
}
