//! Sparse multivariate polynomial arithmetic over the exact coefficient
//! fields.
//!
//! [`MultiPoly`] is the general engine (no homogeneity assumption); it backs
//! the GCD machinery, affine-chart work and the parameter polynomials of the
//! freeness certificates. [`HomPoly`] wraps it with the homogeneity
//! invariant required of projective map components.
//!
//! The monomial order everywhere is graded lexicographic with
//! `z0 > z1 > ... > zn`; canonical formatting emits terms in descending
//! order of that ranking.

mod gcd;
mod parse;

pub use parse::{parse_fraction, parse_poly};

use crate::field::{FieldDescriptor, FieldElem, FieldError};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("coefficient field mismatch: {0} vs {1}")]
    FieldMismatch(FieldDescriptor, FieldDescriptor),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("polynomial is not homogeneous (saw degrees {0} and {1})")]
    Inhomogeneous(usize, usize),
    #[error("division is not exact")]
    NonExactDivision,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("substitution images must share one degree")]
    UnequalImageDegrees,
    #[error("empty polynomial list")]
    EmptyList,
    #[error("all polynomials in the list are zero")]
    AllZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable z{index} at byte {pos} (expected z0..z{max})")]
    UnknownVariable { index: usize, pos: usize, max: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An exponent vector; total degree is the sum of the entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn div_into(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
        } else {
            None
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse multivariate polynomial over one of the exact fields.
///
/// Invariant: no stored coefficient is zero. Arity and coefficient-field
/// compatibility are the caller's responsibility at this level; the
/// homogeneous wrapper exposes checked variants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    nvars: usize,
    field: FieldDescriptor,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, field: FieldDescriptor) -> Self {
        MultiPoly { nvars, field, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: FieldElem) -> Self {
        let field = c.descriptor();
        let mut p = MultiPoly::zero(nvars, field);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize, field: FieldDescriptor) -> Self {
        Self::constant(nvars, FieldElem::one(field))
    }

    pub fn variable(nvars: usize, field: FieldDescriptor, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = MultiPoly::zero(nvars, field);
        p.terms.insert(Monomial::variable(nvars, i), FieldElem::one(field));
        p
    }

    pub fn from_terms<I>(nvars: usize, field: FieldDescriptor, iter: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, FieldElem)>,
    {
        let mut p = MultiPoly::zero(nvars, field);
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: FieldElem) {
        assert_eq!(m.nvars(), self.nvars, "monomial arity mismatch");
        assert_eq!(c.descriptor(), self.field, "coefficient field mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&FieldElem> {
        self.terms.get(m)
    }

    /// Maximum total degree among terms; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// The common degree of all terms, if the polynomial is homogeneous
    /// (`Some(None)` is never produced; zero reports `Ok(None)`).
    pub fn homogeneous_degree(&self) -> Result<Option<usize>, PolyError> {
        let mut deg = None;
        for m in self.terms.keys() {
            let d = m.total_degree();
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return Err(PolyError::Inhomogeneous(prev, d)),
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Leading term under graded lex.
    pub fn leading(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next_back()
    }

    /// Largest variable index that actually occurs.
    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.exponents().iter().rposition(|&e| e > 0))
            .max()
    }

    /// Degree in one variable.
    pub fn degree_in(&self, v: usize) -> usize {
        self.terms
            .keys()
            .map(|m| m.exponents()[v] as usize)
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &MultiPoly) {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        assert_eq!(self.field, other.field, "polynomial field mismatch");
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.check_compatible(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.check_compatible(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.neg());
        }
        r
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> MultiPoly {
        assert_eq!(c.descriptor(), self.field, "scalar field mismatch");
        if c.is_zero() {
            return MultiPoly::zero(self.nvars, self.field);
        }
        MultiPoly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.check_compatible(other);
        if let Some(r) = self.mul_packed(other) {
            return r;
        }
        let mut r = MultiPoly::zero(self.nvars, self.field);
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (m, c) in &small.terms {
            for (m2, c2) in &large.terms {
                r.add_term(m.mul(m2), c.mul(c2));
            }
        }
        r
    }

    /// Product with exponent vectors packed into a single u64 key, which is
    /// much faster than vector-keyed collection for products with many
    /// terms. Applicable when every per-variable exponent of the result
    /// fits its bit field.
    fn mul_packed(&self, other: &MultiPoly) -> Option<MultiPoly> {
        let nv = self.nvars;
        if nv == 0 || nv > 16 {
            return None;
        }
        let bits = 64 / nv;
        let half_cap = (1u32 << (bits - 1)) - 1;
        let fits = |p: &MultiPoly| {
            p.terms
                .keys()
                .all(|m| m.exponents().iter().all(|&e| e <= half_cap))
        };
        if !fits(self) || !fits(other) {
            return None;
        }
        let pack = |m: &Monomial| -> u64 {
            m.exponents()
                .iter()
                .fold(0u64, |acc, &e| (acc << bits) | u64::from(e))
        };
        let a: Vec<(u64, &FieldElem)> = self.terms.iter().map(|(m, c)| (pack(m), c)).collect();
        let b: Vec<(u64, &FieldElem)> = other.terms.iter().map(|(m, c)| (pack(m), c)).collect();
        let mut acc: std::collections::HashMap<u64, FieldElem> =
            std::collections::HashMap::with_capacity(a.len() * b.len() / 2 + 1);
        for (ka, ca) in &a {
            for (kb, cb) in &b {
                let key = ka + kb;
                let prod = ca.mul(cb);
                match acc.entry(key) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let sum = e.get().add(&prod);
                        if sum.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
        }
        let mask = (1u64 << bits) - 1;
        let terms: BTreeMap<Monomial, FieldElem> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(key, c)| {
                let mut exps = vec![0u32; nv];
                for (i, e) in exps.iter_mut().enumerate() {
                    *e = ((key >> (bits * (nv - 1 - i))) & mask) as u32;
                }
                (Monomial::new(exps), c)
            })
            .collect();
        Some(MultiPoly { nvars: nv, field: self.field, terms })
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars, self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division; errors unless `divisor` divides `self` exactly.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(divisor);
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZeroPoly);
        }
        let (lm, lc) = divisor.leading().expect("nonzero divisor");
        let lc_inv = lc.inv().expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars, self.field);
        while let Some((rm, rc)) = rem.leading() {
            let qm = lm
                .div_into(rm)
                .ok_or(PolyError::NonExactDivision)?;
            let qc = rc.mul(&lc_inv);
            let piece = MultiPoly::from_terms(self.nvars, self.field, [(qm, qc)]);
            rem = rem.sub(&piece.mul(divisor));
            quot = quot.add(&piece);
        }
        Ok(quot)
    }

    /// True when `divisor` divides `self` exactly.
    pub fn divisible_by(&self, divisor: &MultiPoly) -> bool {
        self.div_exact(divisor).is_ok()
    }

    /// Scales so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                if c.is_one() {
                    self.clone()
                } else {
                    self.scale(&c.inv().expect("nonzero leading coefficient"))
                }
            }
        }
    }

    pub fn eval(&self, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, point.len()));
        }
        for c in point {
            if c.descriptor() != self.field {
                return Err(PolyError::FieldMismatch(self.field, c.descriptor()));
            }
        }
        let mut acc = FieldElem::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t.mul(&point[v].pow(e as i64).expect("nonnegative exponent"));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Replaces variable `i` by `images[i]`; the images may live in a ring
    /// with a different number of variables, but must agree among
    /// themselves.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, images.len()));
        }
        let out_nvars = images.first().map_or(self.nvars, |p| p.nvars());
        for im in images {
            if im.nvars() != out_nvars {
                return Err(PolyError::ArityMismatch(out_nvars, im.nvars()));
            }
            if im.field() != self.field {
                return Err(PolyError::FieldMismatch(self.field, im.field()));
            }
        }
        // powers[i][e] = images[i]^e, built on demand
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|_| vec![MultiPoly::one(out_nvars, self.field)])
            .collect();
        let mut acc = MultiPoly::zero(out_nvars, self.field);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(out_nvars, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap().mul(&images[v]);
                    powers[v].push(next);
                }
                t = t.mul(&powers[v][e as usize]);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Converts coefficients into another field (e.g. reduction mod p).
    pub fn map_field(&self, target: FieldDescriptor) -> Result<MultiPoly, PolyError> {
        let mut r = MultiPoly::zero(self.nvars, target);
        for (m, c) in &self.terms {
            let v = match c {
                FieldElem::Rational(q) => FieldElem::from_rational(target, q)?,
                other => {
                    return Err(PolyError::FieldMismatch(other.descriptor(), target));
                }
            };
            r.add_term(m.clone(), v);
        }
        Ok(r)
    }

    /// Appends fresh (unused) trailing variables.
    pub fn extend_vars(&self, new_nvars: usize) -> MultiPoly {
        assert!(new_nvars >= self.nvars);
        let mut r = MultiPoly::zero(new_nvars, self.field);
        for (m, c) in &self.terms {
            let mut e = m.exponents().to_vec();
            e.resize(new_nvars, 0);
            r.terms.insert(Monomial::new(e), c.clone());
        }
        r
    }

    /// Drops trailing variables, which must not occur in any term.
    pub fn shrink_vars(&self, new_nvars: usize) -> MultiPoly {
        assert!(new_nvars <= self.nvars);
        let mut r = MultiPoly::zero(new_nvars, self.field);
        for (m, c) in &self.terms {
            let e = m.exponents();
            assert!(
                e[new_nvars..].iter().all(|&x| x == 0),
                "dropped variable occurs in polynomial"
            );
            r.terms.insert(Monomial::new(e[..new_nvars].to_vec()), c.clone());
        }
        r
    }

    /// Sets variable `v` to 1.
    pub fn dehomogenize(&self, v: usize) -> MultiPoly {
        let mut r = MultiPoly::zero(self.nvars, self.field);
        for (m, c) in &self.terms {
            let mut e = m.exponents().to_vec();
            e[v] = 0;
            r.add_term(Monomial::new(e), c.clone());
        }
        r
    }

    /// Multiplies each term by the power of `z_v` that brings it to
    /// `target` total degree; requires `target >= total_degree`.
    pub fn homogenize(&self, v: usize, target: usize) -> MultiPoly {
        let mut r = MultiPoly::zero(self.nvars, self.field);
        for (m, c) in &self.terms {
            let d = m.total_degree();
            assert!(d <= target, "homogenization target below term degree");
            let mut e = m.exponents().to_vec();
            e[v] += (target - d) as u32;
            r.add_term(Monomial::new(e), c.clone());
        }
        r
    }

    /// The componentwise-min exponent vector over all terms (the monomial
    /// content); `None` for zero.
    pub fn monomial_content(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.gcd(m)))
    }

    /// GCD of two polynomials, graded-lex monic. See [`gcd`] module.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        gcd::gcd(self, other)
    }

    /// GCD of a nonempty list with at least one nonzero entry, monic.
    pub fn gcd_many(ps: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        gcd::gcd_many(ps)
    }

    /// lcm(a, b) = a * (b / gcd(a, b)), monic.
    pub fn lcm(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero(self.nvars, self.field);
        }
        let g = self.gcd(other);
        self.mul(&other.div_exact(&g).expect("gcd divides")).monic()
    }

    /// Canonical text form; see [`format_with`](Self::format_with).
    pub fn format(&self) -> String {
        self.format_with(&|i| format!("z{i}"))
    }

    /// Formats with caller-chosen variable names, terms in descending
    /// graded-lex order.
    pub fn format_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let (sign_neg, mag) = match c {
                FieldElem::Rational(q) => {
                    use num::Signed;
                    (q.is_negative(), FieldElem::Rational(q.abs()))
                }
                other => (false, other.clone()),
            };
            if idx == 0 {
                if sign_neg {
                    out.push('-');
                }
            } else if sign_neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let coeff_str = match &mag {
                FieldElem::Cyclotomic { .. } => format!("({mag})"),
                _ => format!("{mag}"),
            };
            if m.is_one() {
                out.push_str(&coeff_str);
                continue;
            }
            let mut wrote_coeff = false;
            if !mag.is_one() {
                out.push_str(&coeff_str);
                wrote_coeff = true;
            }
            let mut first_var = true;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote_coeff || !first_var {
                    out.push('*');
                }
                out.push_str(&name(v));
                if e > 1 {
                    out.push_str(&format!("^{e}"));
                }
                first_var = false;
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format())
    }
}

/// A homogeneous sparse polynomial: all monomials share one total degree.
///
/// The zero polynomial is allowed; its degree is `None` rather than any
/// number.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomPoly(MultiPoly);

impl HomPoly {
    pub fn zero(nvars: usize, field: FieldDescriptor) -> Self {
        HomPoly(MultiPoly::zero(nvars, field))
    }

    pub fn constant(nvars: usize, c: FieldElem) -> Self {
        HomPoly(MultiPoly::constant(nvars, c))
    }

    pub fn one(nvars: usize, field: FieldDescriptor) -> Self {
        HomPoly(MultiPoly::one(nvars, field))
    }

    pub fn variable(nvars: usize, field: FieldDescriptor, i: usize) -> Self {
        HomPoly(MultiPoly::variable(nvars, field, i))
    }

    /// Single-term builder.
    pub fn monomial(nvars: usize, c: FieldElem, exps: &[u32]) -> Self {
        HomPoly(MultiPoly::from_terms(
            nvars,
            c.descriptor(),
            [(Monomial::new(exps.to_vec()), c)],
        ))
    }

    /// Validates homogeneity.
    pub fn from_multi(p: MultiPoly) -> Result<Self, PolyError> {
        p.homogeneous_degree()?;
        Ok(HomPoly(p))
    }

    pub fn from_terms<I>(
        nvars: usize,
        field: FieldDescriptor,
        iter: I,
    ) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, FieldElem)>,
    {
        Self::from_multi(MultiPoly::from_terms(nvars, field, iter))
    }

    pub fn as_multi(&self) -> &MultiPoly {
        &self.0
    }

    pub fn into_multi(self) -> MultiPoly {
        self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars()
    }

    pub fn field(&self) -> FieldDescriptor {
        self.0.field()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Common total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.terms.keys().next().map(|m| m.total_degree())
    }

    pub fn num_terms(&self) -> usize {
        self.0.num_terms()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.0.terms()
    }

    pub fn leading(&self) -> Option<(&Monomial, &FieldElem)> {
        self.0.leading()
    }

    pub fn degree_in(&self, v: usize) -> usize {
        self.0.degree_in(v)
    }

    fn check_ring(&self, other: &HomPoly) -> Result<(), PolyError> {
        if self.nvars() != other.nvars() {
            return Err(PolyError::ArityMismatch(self.nvars(), other.nvars()));
        }
        if self.field() != other.field() {
            return Err(PolyError::FieldMismatch(self.field(), other.field()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.check_ring(other)?;
        Ok(HomPoly(self.0.mul(&other.0)))
    }

    /// Addition requires matching degrees (zero is compatible with any).
    pub fn add(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.check_ring(other)?;
        match (self.degree(), other.degree()) {
            (Some(a), Some(b)) if a != b => Err(PolyError::DegreeMismatch(a, b)),
            _ => Ok(HomPoly(self.0.add(&other.0))),
        }
    }

    pub fn sub(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HomPoly {
        HomPoly(self.0.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> HomPoly {
        HomPoly(self.0.scale(c))
    }

    pub fn monic(&self) -> HomPoly {
        HomPoly(self.0.monic())
    }

    pub fn pow(&self, e: u32) -> HomPoly {
        HomPoly(self.0.pow(e))
    }

    /// Substitutes the images (all homogeneous of one shared degree) for
    /// the variables; the result is homogeneous of degree
    /// `deg(self) * deg(images)`.
    pub fn substitute(&self, images: &[HomPoly]) -> Result<HomPoly, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::ArityMismatch(self.nvars(), images.len()));
        }
        let mut common = None;
        for im in images {
            if let Some(d) = im.degree() {
                match common {
                    None => common = Some(d),
                    Some(c) if c != d => return Err(PolyError::UnequalImageDegrees),
                    _ => {}
                }
            }
        }
        let raw: Vec<MultiPoly> = images.iter().map(|p| p.0.clone()).collect();
        Ok(HomPoly(self.0.substitute(&raw)?))
    }

    pub fn exact_div(&self, divisor: &HomPoly) -> Result<HomPoly, PolyError> {
        self.check_ring(divisor)?;
        Ok(HomPoly(self.0.div_exact(&divisor.0)?))
    }

    pub fn eval_point(&self, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        self.0.eval(point)
    }

    /// GCD of a nonempty family, graded-lex monic; dividing every input by
    /// it leaves a family with trivial common factor.
    pub fn gcd_many(ps: &[HomPoly]) -> Result<HomPoly, PolyError> {
        let raw: Vec<MultiPoly> = ps.iter().map(|p| p.0.clone()).collect();
        let g = MultiPoly::gcd_many(&raw)?;
        Ok(HomPoly(g))
    }

    pub fn map_field(&self, target: FieldDescriptor) -> Result<HomPoly, PolyError> {
        Ok(HomPoly(self.0.map_field(target)?))
    }

    pub fn extend_vars(&self, new_nvars: usize) -> HomPoly {
        HomPoly(self.0.extend_vars(new_nvars))
    }

    pub fn shrink_vars(&self, new_nvars: usize) -> HomPoly {
        HomPoly(self.0.shrink_vars(new_nvars))
    }

    pub fn format(&self) -> String {
        self.0.format()
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_nonzero;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hp(text: &str, nvars: usize) -> HomPoly {
        parse_poly(text, nvars, FieldDescriptor::Rationals).unwrap()
    }

    pub(crate) fn random_multi(
        nvars: usize,
        field: FieldDescriptor,
        max_deg: u32,
        terms: usize,
        rng: &mut impl Rng,
    ) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars, field);
        for _ in 0..terms {
            let exps: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=max_deg)).collect();
            p.add_term(Monomial::new(exps), sample_nonzero(field, rng));
        }
        p
    }

    #[test]
    fn grlex_order() {
        // z0 > z1 in degree 1; degree dominates
        let a = Monomial::new(vec![1, 0]);
        let b = Monomial::new(vec![0, 1]);
        let c = Monomial::new(vec![0, 2]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn difference_of_squares() {
        let a = hp("z0+z1", 2);
        let b = hp("z0-z1", 2);
        assert_eq!(a.mul(&b).unwrap(), hp("z0^2-z1^2", 2));
    }

    #[test]
    fn monomial_product() {
        let a = hp("z1*z2", 3);
        let b = hp("z0*z2", 3);
        assert_eq!(a.mul(&b).unwrap(), hp("z0*z1*z2^2", 3));
    }

    #[test]
    fn char_two_square() {
        let d = FieldDescriptor::prime_field(2).unwrap();
        let a = parse_poly("z0+z1", 2, d).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, parse_poly("z0^2+z1^2", 2, d).unwrap());
    }

    #[test]
    fn substitute_examples() {
        // p = z0*z1 at the standard quadratic involution of P^2
        let p = hp("z0*z1", 3);
        let images = [hp("z1*z2", 3), hp("z0*z2", 3), hp("z0*z1", 3)];
        assert_eq!(p.substitute(&images).unwrap(), hp("z0*z1*z2^2", 3));

        let proj = hp("z0", 3);
        assert_eq!(proj.substitute(&images).unwrap(), images[0]);

        let q = hp("z0^2+z1^2", 2);
        let collapse = [hp("z0", 2), hp("z0", 2)];
        assert_eq!(q.substitute(&collapse).unwrap(), hp("2*z0^2", 2));
    }

    #[test]
    fn exact_division() {
        assert_eq!(
            hp("z0^2-z1^2", 2).exact_div(&hp("z0-z1", 2)).unwrap(),
            hp("z0+z1", 2)
        );
        assert_eq!(
            hp("z0*z1*z2^2", 3).exact_div(&hp("z2", 3)).unwrap(),
            hp("z0*z1*z2", 3)
        );
        assert_eq!(
            hp("z0^2", 2).exact_div(&hp("z1", 2)),
            Err(PolyError::NonExactDivision)
        );
    }

    #[test]
    fn eval_points() {
        let d = FieldDescriptor::Rationals;
        let one = FieldElem::one(d);
        let p = hp("z1*z2", 3);
        assert_eq!(p.eval_point(&[one.clone(), one.clone(), one.clone()]).unwrap(), one);

        let quadric = hp("z0*z3-z1*z2", 4);
        let pt: Vec<FieldElem> = [0, 0, 0, 1].iter().map(|&v| FieldElem::from_int(d, v)).collect();
        assert!(quadric.eval_point(&pt).unwrap().is_zero());

        let gf = FieldDescriptor::prime_field(7).unwrap();
        let q = parse_poly("z0^2+z1^2", 2, gf).unwrap();
        let pt: Vec<FieldElem> = [2, 3].iter().map(|&v| FieldElem::from_int(gf, v)).collect();
        assert_eq!(q.eval_point(&pt).unwrap(), FieldElem::from_int(gf, 6));
    }

    #[test]
    fn degree_of_product_adds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let a = random_multi(3, FieldDescriptor::Rationals, 3, 4, &mut rng);
            let b = random_multi(3, FieldDescriptor::Rationals, 3, 4, &mut rng);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            assert_eq!(
                a.mul(&b).total_degree().unwrap(),
                a.total_degree().unwrap() + b.total_degree().unwrap()
            );
        }
    }

    #[test]
    fn mul_then_divide_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let a = random_multi(3, FieldDescriptor::Rationals, 3, 4, &mut rng);
            let b = random_multi(3, FieldDescriptor::Rationals, 3, 3, &mut rng);
            if b.is_zero() {
                continue;
            }
            assert_eq!(a.mul(&b).div_exact(&b).unwrap(), a);
        }
    }

    #[test]
    fn substitution_is_ring_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let a = random_multi(2, FieldDescriptor::Rationals, 2, 3, &mut rng);
            let b = random_multi(2, FieldDescriptor::Rationals, 2, 3, &mut rng);
            let images: Vec<MultiPoly> = (0..2)
                .map(|_| random_multi(2, FieldDescriptor::Rationals, 2, 3, &mut rng))
                .collect();
            let lhs = a.mul(&b).substitute(&images).unwrap();
            let rhs = a.substitute(&images).unwrap().mul(&b.substitute(&images).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let z = HomPoly::zero(3, FieldDescriptor::Rationals);
        assert_eq!(z.degree(), None);
        assert!(z.is_zero());
    }

    #[test]
    fn homogeneity_is_enforced() {
        let p = MultiPoly::from_terms(
            2,
            FieldDescriptor::Rationals,
            [
                (Monomial::new(vec![1, 0]), FieldElem::one(FieldDescriptor::Rationals)),
                (Monomial::new(vec![0, 2]), FieldElem::one(FieldDescriptor::Rationals)),
            ],
        );
        assert!(matches!(HomPoly::from_multi(p), Err(PolyError::Inhomogeneous(_, _))));
    }
}
