//! Multivariate GCD by recursive content/primitive-part splitting and a
//! primitive pseudo-remainder sequence.
//!
//! The polynomials are viewed as univariate in the highest-index variable
//! present, with coefficients in the polynomial ring over the remaining
//! variables. Every result is validated by exact division of both inputs
//! before it is returned, and normalized so its graded-lex leading
//! coefficient is 1.

use super::{Monomial, MultiPoly, PolyError};

/// Dense view of `p` as a univariate polynomial in `v`.
struct UniView {
    /// coeffs[k] is the coefficient of v^k (with v stripped out).
    coeffs: Vec<MultiPoly>,
}

impl UniView {
    fn split(p: &MultiPoly, v: usize) -> UniView {
        let d = p.degree_in(v);
        let mut coeffs = vec![MultiPoly::zero(p.nvars(), p.field()); d + 1];
        for (m, c) in p.terms() {
            let k = m.exponents()[v] as usize;
            let mut e = m.exponents().to_vec();
            e[v] = 0;
            coeffs[k].add_term(Monomial::new(e), c.clone());
        }
        UniView { coeffs }
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }
}

/// Pseudo-remainder of `a` by `b` in the variable `v` (`b` nonzero in `v`).
/// No division happens: `a` is repeatedly scaled by the leading coefficient
/// of `b`, which keeps everything in the polynomial ring.
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let nvars = a.nvars();
    let field = a.field();
    let bv = UniView::split(b, v);
    let db = bv.degree().expect("pseudo_rem divisor is zero");
    let lead_b = bv.coeffs[db].clone();
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let rv = UniView::split(&r, v);
        let dr = rv.degree().unwrap();
        if dr < db {
            return r;
        }
        // r = lead_b * r - lead_r * v^(dr-db) * b
        let lead_r = rv.coeffs[dr].clone();
        let mut shift = vec![0u32; nvars];
        shift[v] = (dr - db) as u32;
        let sub = lead_r.mul_monomial(&Monomial::new(shift)).mul(b);
        r = r.mul(&lead_b).sub(&sub);
        debug_assert!(r.degree_in(v) < dr || r.is_zero());
        let _ = field;
    }
}

/// Content of `p` with respect to `v`: the GCD of its `v`-coefficients.
fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let view = UniView::split(p, v);
    let nonzero: Vec<MultiPoly> = view.coeffs.into_iter().filter(|c| !c.is_zero()).collect();
    gcd_many(&nonzero).expect("nonzero polynomial has nonzero coefficients")
}

fn primitive_part(p: &MultiPoly, v: usize) -> (MultiPoly, MultiPoly) {
    let cont = content_in(p, v);
    let prim = p.div_exact(&cont).expect("content divides");
    (cont, prim)
}

/// Monic GCD. Zero inputs are absorbed (`gcd(0, b) = monic(b)`).
pub(crate) fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let g = gcd_inner(a, b);
    debug_assert!(a.divisible_by(&g) || a.is_zero());
    debug_assert!(b.divisible_by(&g) || b.is_zero());
    g
}

fn gcd_inner(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let nvars = a.nvars();
    let field = a.field();

    // pull out the monomial content of each side first
    let ma = a.monomial_content().unwrap();
    let mb = b.monomial_content().unwrap();
    let shared = ma.gcd(&mb);
    let a0 = a
        .div_exact(&MultiPoly::from_terms(nvars, field, [(ma, crate::field::FieldElem::one(field))]))
        .unwrap();
    let b0 = b
        .div_exact(&MultiPoly::from_terms(nvars, field, [(mb, crate::field::FieldElem::one(field))]))
        .unwrap();
    let shared_poly =
        MultiPoly::from_terms(nvars, field, [(shared, crate::field::FieldElem::one(field))]);

    let core = gcd_free_of_monomials(&a0, &b0);
    shared_poly.mul(&core).monic()
}

/// GCD of two polynomials with trivial monomial content.
fn gcd_free_of_monomials(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let nvars = a.nvars();
    let field = a.field();
    let one = MultiPoly::one(nvars, field);

    if a.total_degree() == Some(0) || b.total_degree() == Some(0) {
        return one;
    }
    // proportional polynomials
    if a.num_terms() == b.num_terms() {
        let (la, ca) = a.leading().unwrap();
        let (lb, cb) = b.leading().unwrap();
        if la == lb {
            let ratio = ca.div(cb).expect("nonzero leading coefficient");
            if *a == b.scale(&ratio) {
                return a.monic();
            }
        }
    }
    // quick mutual-divisibility probes
    let (da, db) = (a.total_degree().unwrap(), b.total_degree().unwrap());
    if da <= db && b.divisible_by(a) {
        return a.monic();
    }
    if db < da && a.divisible_by(b) {
        return b.monic();
    }

    // homogeneous pairs lose one variable exactly: with no monomial
    // content, setting the top variable to 1 is a multiplicative bijection
    // onto the affine ring, and the gcd transfers through rehomogenization
    if let (Ok(Some(_)), Ok(Some(_))) = (a.homogeneous_degree(), b.homogeneous_degree()) {
        let v = a.max_var().into_iter().chain(b.max_var()).max().unwrap();
        if a.degree_in(v) > 0 || b.degree_in(v) > 0 {
            let g_affine = gcd(&a.dehomogenize(v), &b.dehomogenize(v));
            let target = g_affine.total_degree().unwrap_or(0);
            return g_affine.homogenize(v, target).monic();
        }
    }

    // main variable: present in both, with the shortest possible remainder
    // sequence; fall back to the largest variable present
    let v = (0..nvars)
        .filter(|&v| a.degree_in(v) > 0 && b.degree_in(v) > 0)
        .min_by_key(|&v| a.degree_in(v).min(b.degree_in(v)))
        .or_else(|| a.max_var().into_iter().chain(b.max_var()).max())
        .expect("nonconstant inputs");

    let deg_av = a.degree_in(v);
    let deg_bv = b.degree_in(v);
    if deg_av == 0 {
        return gcd(a, &content_in(b, v));
    }
    if deg_bv == 0 {
        return gcd(&content_in(a, v), b);
    }

    let (cont_a, prim_a) = primitive_part(a, v);
    let (cont_b, prim_b) = primitive_part(b, v);
    let cont_gcd = gcd(&cont_a, &cont_b);

    let (mut r0, mut r1) = if prim_a.degree_in(v) >= prim_b.degree_in(v) {
        (prim_a, prim_b)
    } else {
        (prim_b, prim_a)
    };
    while !r1.is_zero() {
        let r = pseudo_rem(&r0, &r1, v);
        r0 = r1;
        // the extra monic() keeps univariate chains from accumulating
        // constant factors with huge numerators
        r1 = if r.is_zero() { r } else { primitive_part(&r, v).1.monic() };
    }
    cont_gcd.mul(&r0).monic()
}

/// Monic GCD of a nonempty list; errors on an empty or all-zero list.
pub(crate) fn gcd_many(ps: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
    if ps.is_empty() {
        return Err(PolyError::EmptyList);
    }
    if ps.iter().all(|p| p.is_zero()) {
        return Err(PolyError::AllZero);
    }
    let mut acc = ps[0].clone();
    for p in &ps[1..] {
        if acc.total_degree() == Some(0) {
            break;
        }
        acc = gcd(&acc, p);
    }
    Ok(acc.monic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;
    use crate::poly::parse_poly;

    fn mp(text: &str, nvars: usize) -> MultiPoly {
        parse_poly(text, nvars, FieldDescriptor::Rationals)
            .unwrap()
            .into_multi()
    }

    #[test]
    fn monomial_gcd() {
        let ps = [mp("z0^2*z1*z2", 3), mp("z0*z1^2*z2", 3), mp("z0*z1*z2^2", 3)];
        assert_eq!(gcd_many(&ps).unwrap(), mp("z0*z1*z2", 3));
    }

    #[test]
    fn factored_gcd() {
        // (z0-z1)(z0+z1) vs (z0+z1)^2
        let a = mp("z0^2-z1^2", 2);
        let b = mp("z0^2+2*z0*z1+z1^2", 2);
        assert_eq!(gcd(&a, &b), mp("z0+z1", 2));
    }

    #[test]
    fn coprime_variables() {
        assert_eq!(gcd_many(&[mp("z0", 2), mp("z1", 2)]).unwrap(), mp("1", 2));
    }

    #[test]
    fn list_errors() {
        assert_eq!(gcd_many(&[]), Err(PolyError::EmptyList));
        let z = MultiPoly::zero(2, FieldDescriptor::Rationals);
        assert_eq!(gcd_many(&[z.clone(), z]), Err(PolyError::AllZero));
    }

    #[test]
    fn gcd_divides_and_strips() {
        use crate::poly::tests::random_multi;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let common = random_multi(3, FieldDescriptor::Rationals, 2, 3, &mut rng);
            if common.is_zero() {
                continue;
            }
            let a = random_multi(3, FieldDescriptor::Rationals, 2, 3, &mut rng).mul(&common);
            let b = random_multi(3, FieldDescriptor::Rationals, 2, 3, &mut rng).mul(&common);
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let g = gcd(&a, &b);
            // the planted factor divides the gcd, and the gcd divides both
            assert!(g.divisible_by(&common), "planted common factor recovered");
            if !a.is_zero() {
                let ra = a.div_exact(&g).unwrap();
                let rb = b.div_exact(&g).unwrap();
                if !ra.is_zero() && !rb.is_zero() {
                    assert_eq!(gcd(&ra, &rb).total_degree(), Some(0), "quotients are coprime");
                }
            }
        }
    }

    #[test]
    fn gcd_over_prime_field() {
        let d = FieldDescriptor::prime_field(7).unwrap();
        let a = parse_poly("z0^2-z1^2", 2, d).unwrap().into_multi();
        let b = parse_poly("z0^2+2*z0*z1+z1^2", 2, d).unwrap().into_multi();
        assert_eq!(gcd(&a, &b), parse_poly("z0+z1", 2, d).unwrap().into_multi());
    }
}
