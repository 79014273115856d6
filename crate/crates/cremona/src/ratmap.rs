//! Projective rational self-maps of P^n: canonical normalization (no common
//! factor, leading coefficient 1), composition with exact common-factor
//! cancellation, point action, affine-chart homogenization, and the bridge
//! between degree-1 maps and invertible matrices including the dual
//! `g -> (transpose g)^(-1)`.

use crate::field::{FieldDescriptor, FieldElem};
use crate::poly::{HomPoly, MultiPoly, PolyError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("coefficient field mismatch: {0} vs {1}")]
    FieldMismatch(FieldDescriptor, FieldDescriptor),
    #[error("components must share one degree (saw {0} and {1})")]
    ComponentDegreeMismatch(usize, usize),
    #[error("all components are zero")]
    AllComponentsZero,
    #[error("normalization left a degree-0 map (components were proportional)")]
    DegenerateMap,
    #[error("map is undefined at {0} (base point)")]
    BasePoint(String),
    #[error("point has all coordinates zero")]
    ZeroPoint,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("map has degree {0}, expected a linear map")]
    NotLinear(usize),
    #[error("affine component has a zero denominator")]
    ZeroDenominator,
    #[error("need at least one component")]
    NoComponents,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A point of P^n in canonical form: the first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProjPoint {
    coords: Vec<FieldElem>,
}

impl ProjPoint {
    pub fn new(coords: Vec<FieldElem>) -> Result<Self, MapError> {
        let lead = coords.iter().position(|c| !c.is_zero()).ok_or(MapError::ZeroPoint)?;
        let inv = coords[lead].inv().expect("nonzero coordinate");
        Ok(ProjPoint {
            coords: coords.iter().map(|c| c.mul(&inv)).collect(),
        })
    }

    pub fn from_ints(field: FieldDescriptor, coords: &[i64]) -> Result<Self, MapError> {
        Self::new(coords.iter().map(|&v| FieldElem::from_int(field, v)).collect())
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

/// A rational self-map of P^n held in canonical normalized form:
/// components share one degree, their GCD is 1, and the graded-lex leading
/// coefficient of the first nonzero component is 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMap {
    components: Vec<HomPoly>,
}

impl RatMap {
    /// Normalizes a component list: checks equal degrees, divides by the
    /// common factor, and applies scalar canonicalization. Idempotent.
    pub fn new_normalized(components: Vec<HomPoly>) -> Result<Self, MapError> {
        if components.is_empty() {
            return Err(MapError::NoComponents);
        }
        let field = components[0].field();
        let nvars = components[0].nvars();
        if nvars != components.len() {
            return Err(MapError::DimensionMismatch(nvars, components.len()));
        }
        let mut degree = None;
        for c in &components {
            if c.nvars() != nvars {
                return Err(MapError::DimensionMismatch(nvars, c.nvars()));
            }
            if c.field() != field {
                return Err(MapError::FieldMismatch(field, c.field()));
            }
            if let Some(d) = c.degree() {
                match degree {
                    None => degree = Some(d),
                    Some(prev) if prev != d => {
                        return Err(MapError::ComponentDegreeMismatch(prev, d))
                    }
                    _ => {}
                }
            }
        }
        if degree.is_none() {
            return Err(MapError::AllComponentsZero);
        }
        let g = HomPoly::gcd_many(&components)?;
        let mut reduced: Vec<HomPoly> = components
            .iter()
            .map(|c| {
                if c.is_zero() {
                    c.clone()
                } else {
                    c.exact_div(&g).expect("gcd divides every component")
                }
            })
            .collect();
        let lead = reduced
            .iter()
            .find(|c| !c.is_zero())
            .expect("some component nonzero");
        if lead.degree() == Some(0) {
            return Err(MapError::DegenerateMap);
        }
        let scale = lead
            .leading()
            .expect("nonzero component")
            .1
            .inv()
            .expect("nonzero leading coefficient");
        for c in reduced.iter_mut() {
            *c = c.scale(&scale);
        }
        Ok(RatMap { components: reduced })
    }

    pub fn identity(n: usize, field: FieldDescriptor) -> RatMap {
        let components = (0..=n)
            .map(|i| HomPoly::variable(n + 1, field, i))
            .collect();
        RatMap::new_normalized(components).expect("identity is well formed")
    }

    pub fn is_identity(&self) -> bool {
        *self == RatMap::identity(self.n(), self.field())
    }

    pub fn n(&self) -> usize {
        self.components.len() - 1
    }

    pub fn field(&self) -> FieldDescriptor {
        self.components[0].field()
    }

    pub fn degree(&self) -> usize {
        self.components
            .iter()
            .find_map(|c| c.degree())
            .expect("normalized map has a degree")
    }

    pub fn components(&self) -> &[HomPoly] {
        &self.components
    }

    fn check_compatible(&self, other: &RatMap) -> Result<(), MapError> {
        if self.n() != other.n() {
            return Err(MapError::DimensionMismatch(self.n(), other.n()));
        }
        if self.field() != other.field() {
            return Err(MapError::FieldMismatch(self.field(), other.field()));
        }
        Ok(())
    }

    /// Composition `self(other(z))`; the result is normalized, so its
    /// degree can drop strictly below the degree product.
    pub fn compose(&self, other: &RatMap) -> Result<RatMap, MapError> {
        self.check_compatible(other)?;
        let images = other.components();
        let composed: Result<Vec<HomPoly>, PolyError> = self
            .components
            .iter()
            .map(|c| c.substitute(images))
            .collect();
        RatMap::new_normalized(composed?)
    }

    /// The raw substituted components before normalization (used by degree
    /// drop diagnostics and tests).
    pub fn compose_raw(&self, other: &RatMap) -> Result<Vec<HomPoly>, MapError> {
        self.check_compatible(other)?;
        let images = other.components();
        let composed: Result<Vec<HomPoly>, PolyError> = self
            .components
            .iter()
            .map(|c| c.substitute(images))
            .collect();
        Ok(composed?)
    }

    /// Canonical-form equality (equivalent to the vanishing of all cross
    /// products f_i g_j - f_j g_i).
    pub fn equals(&self, other: &RatMap) -> bool {
        self == other
    }

    /// `self` iterated `k` times; `k = 0` gives the identity.
    pub fn pow(&self, k: usize) -> Result<RatMap, MapError> {
        let mut acc = RatMap::identity(self.n(), self.field());
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Evaluates at a point; errors on the base locus.
    pub fn apply_point(&self, p: &ProjPoint) -> Result<ProjPoint, MapError> {
        if p.n() != self.n() {
            return Err(MapError::DimensionMismatch(self.n(), p.n()));
        }
        let values: Result<Vec<FieldElem>, PolyError> = self
            .components
            .iter()
            .map(|c| c.eval_point(p.coords()))
            .collect();
        ProjPoint::new(values?).map_err(|_| MapError::BasePoint(p.to_string()))
    }

    /// Homogenizes an affine-chart map given as `n` rational components in
    /// `z0..z_{n-1}`: components are put over the least common denominator,
    /// the chart variable `z_n` homogenizes everything to one degree, and
    /// the result is normalized.
    pub fn from_affine_chart(components: &[(MultiPoly, MultiPoly)]) -> Result<RatMap, MapError> {
        if components.is_empty() {
            return Err(MapError::NoComponents);
        }
        let n = components.len();
        let field = components[0].0.field();
        for (num, den) in components {
            if num.nvars() != n || den.nvars() != n {
                return Err(MapError::DimensionMismatch(n, num.nvars().max(den.nvars())));
            }
            if den.is_zero() {
                return Err(MapError::ZeroDenominator);
            }
        }
        // reduce each fraction, then take the lcm of denominators
        let reduced: Vec<(MultiPoly, MultiPoly)> = components
            .iter()
            .map(|(num, den)| {
                if num.is_zero() {
                    return (num.clone(), MultiPoly::one(n, field));
                }
                let g = num.gcd(den);
                (
                    num.div_exact(&g).expect("gcd divides"),
                    den.div_exact(&g).expect("gcd divides"),
                )
            })
            .collect();
        let mut lcm = MultiPoly::one(n, field);
        for (_, den) in &reduced {
            lcm = lcm.lcm(den);
        }
        let mut cleared: Vec<MultiPoly> = reduced
            .iter()
            .map(|(num, den)| {
                num.mul(&lcm.div_exact(den).expect("lcm is divisible by each denominator"))
            })
            .collect();
        cleared.push(lcm);
        let target = cleared
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .ok_or(MapError::AllComponentsZero)?;
        let homogenized: Result<Vec<HomPoly>, PolyError> = cleared
            .iter()
            .map(|p| HomPoly::from_multi(p.extend_vars(n + 1).homogenize(n, target)))
            .collect();
        RatMap::new_normalized(homogenized?)
    }

    /// Restriction to the chart `z_n = 1`, as numerator/denominator pairs
    /// in `z0..z_{n-1}` (the denominator is the last component).
    pub fn restrict_to_chart(&self) -> Vec<(MultiPoly, MultiPoly)> {
        let n = self.n();
        let den = self.components[n].as_multi().dehomogenize(n).shrink_vars(n);
        self.components[..n]
            .iter()
            .map(|c| (c.as_multi().dehomogenize(n).shrink_vars(n), den.clone()))
            .collect()
    }

    /// Text form `[c0; c1; ...]` in the canonical polynomial syntax.
    pub fn format(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(|c| c.format()).collect();
        format!("[{}]", parts.join("; "))
    }
}

impl fmt::Display for RatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format())
    }
}

/// The standard involution of P^n: the i-th coordinate is the product of
/// all variables except `z_i`. Degree n, its own inverse.
pub fn standard_involution(n: usize, field: FieldDescriptor) -> RatMap {
    let nvars = n + 1;
    let components = (0..nvars)
        .map(|i| {
            let exps: Vec<u32> = (0..nvars).map(|k| u32::from(k != i)).collect();
            HomPoly::monomial(nvars, FieldElem::one(field), &exps)
        })
        .collect();
    RatMap::new_normalized(components).expect("sigma is well formed")
}

/// An invertible matrix acting on P^n, canonicalized so the first nonzero
/// entry (row major) is 1. Equality is projective equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap {
    mat: Vec<Vec<FieldElem>>,
}

impl LinearMap {
    pub fn new(mat: Vec<Vec<FieldElem>>) -> Result<Self, MapError> {
        let size = mat.len();
        assert!(size >= 2, "projective dimension must be at least 1");
        for row in &mat {
            assert_eq!(row.len(), size, "matrix must be square");
        }
        let m = LinearMap { mat }.canonicalized();
        if m.det().is_zero() {
            return Err(MapError::SingularMatrix);
        }
        Ok(m)
    }

    fn canonicalized(mut self) -> Self {
        let lead = self
            .mat
            .iter()
            .flatten()
            .find(|c| !c.is_zero())
            .cloned();
        if let Some(c) = lead {
            if !c.is_one() {
                let inv = c.inv().expect("nonzero entry");
                for row in self.mat.iter_mut() {
                    for e in row.iter_mut() {
                        *e = e.mul(&inv);
                    }
                }
            }
        }
        self
    }

    pub fn identity(n: usize, field: FieldDescriptor) -> LinearMap {
        let size = n + 1;
        let mat = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| FieldElem::from_int(field, i64::from(i == j)))
                    .collect()
            })
            .collect();
        LinearMap { mat }
    }

    pub fn from_int_rows(field: FieldDescriptor, rows: &[&[i64]]) -> Result<LinearMap, MapError> {
        LinearMap::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| FieldElem::from_int(field, v)).collect())
                .collect(),
        )
    }

    /// Diagonal matrix; all entries must be nonzero.
    pub fn diagonal(entries: &[FieldElem]) -> Result<LinearMap, MapError> {
        let size = entries.len();
        let field = entries[0].descriptor();
        if entries.iter().any(|e| e.is_zero()) {
            return Err(MapError::SingularMatrix);
        }
        let mat = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        if i == j {
                            entries[i].clone()
                        } else {
                            FieldElem::zero(field)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(LinearMap { mat }.canonicalized())
    }

    /// The permutation sending basis vector `i` to `perm[i]`.
    pub fn permutation(field: FieldDescriptor, perm: &[usize]) -> LinearMap {
        let size = perm.len();
        let mat = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| FieldElem::from_int(field, i64::from(perm[j] == i)))
                    .collect()
            })
            .collect();
        LinearMap { mat }
    }

    pub fn n(&self) -> usize {
        self.mat.len() - 1
    }

    pub fn field(&self) -> FieldDescriptor {
        self.mat[0][0].descriptor()
    }

    pub fn matrix(&self) -> &[Vec<FieldElem>] {
        &self.mat
    }

    pub fn det(&self) -> FieldElem {
        let field = self.field();
        let size = self.mat.len();
        let mut m = self.mat.clone();
        let mut det = FieldElem::one(field);
        for col in 0..size {
            let pivot = (col..size).find(|&r| !m[r][col].is_zero());
            let pivot = match pivot {
                None => return FieldElem::zero(field),
                Some(p) => p,
            };
            if pivot != col {
                m.swap(pivot, col);
                det = det.neg();
            }
            det = det.mul(&m[col][col]);
            let inv = m[col][col].inv().expect("nonzero pivot");
            for r in col + 1..size {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].mul(&inv);
                for c in col..size {
                    let delta = factor.mul(&m[col][c]);
                    m[r][c] = m[r][c].sub(&delta);
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> LinearMap {
        let field = self.field();
        let size = self.mat.len();
        let mut m = self.mat.clone();
        let mut inv = LinearMap::identity(self.n(), field).mat;
        for col in 0..size {
            let pivot = (col..size)
                .find(|&r| !m[r][col].is_zero())
                .expect("invertible matrix has a pivot");
            m.swap(pivot, col);
            inv.swap(pivot, col);
            let scale = m[col][col].inv().expect("nonzero pivot");
            for c in 0..size {
                m[col][c] = m[col][c].mul(&scale);
                inv[col][c] = inv[col][c].mul(&scale);
            }
            for r in 0..size {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                for c in 0..size {
                    let dm = factor.mul(&m[col][c]);
                    m[r][c] = m[r][c].sub(&dm);
                    let di = factor.mul(&inv[col][c]);
                    inv[r][c] = inv[r][c].sub(&di);
                }
            }
        }
        LinearMap { mat: inv }.canonicalized()
    }

    pub fn transpose(&self) -> LinearMap {
        let size = self.mat.len();
        let mat = (0..size)
            .map(|i| (0..size).map(|j| self.mat[j][i].clone()).collect())
            .collect();
        LinearMap { mat }.canonicalized()
    }

    /// The dual automorphism `g -> (transpose g)^(-1)`.
    pub fn dual(&self) -> LinearMap {
        self.transpose().inverse()
    }

    /// Matrix product; `(a.compose(b))(z) = a(b(z))`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let field = self.field();
        let size = self.mat.len();
        assert_eq!(size, other.mat.len(), "dimension mismatch");
        let mat = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        let mut acc = FieldElem::zero(field);
                        for k in 0..size {
                            acc = acc.add(&self.mat[i][k].mul(&other.mat[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        LinearMap { mat }.canonicalized()
    }

    pub fn is_diagonal(&self) -> bool {
        self.mat
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, e)| i == j || e.is_zero()))
    }

    pub fn diagonal_entries(&self) -> Option<Vec<FieldElem>> {
        if self.is_diagonal() {
            Some((0..self.mat.len()).map(|i| self.mat[i][i].clone()).collect())
        } else {
            None
        }
    }

    /// The degree-1 rational map with these rows.
    pub fn to_rat_map(&self) -> RatMap {
        let field = self.field();
        let size = self.mat.len();
        let components = (0..size)
            .map(|i| {
                let mut p = HomPoly::zero(size, field);
                for (j, e) in self.mat[i].iter().enumerate() {
                    if !e.is_zero() {
                        let term = HomPoly::variable(size, field, j).scale(e);
                        p = p.add(&term).expect("linear terms share degree");
                    }
                }
                p
            })
            .collect();
        RatMap::new_normalized(components).expect("invertible rows are nonzero")
    }

    /// Reads a degree-1 rational map back as a matrix.
    pub fn from_rat_map(map: &RatMap) -> Result<LinearMap, MapError> {
        if map.degree() != 1 {
            return Err(MapError::NotLinear(map.degree()));
        }
        let size = map.n() + 1;
        let field = map.field();
        let mat = map
            .components()
            .iter()
            .map(|c| {
                (0..size)
                    .map(|j| {
                        let mono = crate::poly::Monomial::variable(size, j);
                        c.as_multi().coefficient(&mono).cloned().unwrap_or_else(|| FieldElem::zero(field))
                    })
                    .collect()
            })
            .collect();
        LinearMap::new(mat)
    }
}

impl fmt::Display for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rat_map())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    fn hp(text: &str, nvars: usize) -> HomPoly {
        parse_poly(text, nvars, Q).unwrap()
    }

    fn map(texts: &[&str]) -> RatMap {
        let nvars = texts.len();
        RatMap::new_normalized(texts.iter().map(|t| hp(t, nvars)).collect()).unwrap()
    }

    #[test]
    fn normalization_cancels_common_factor() {
        let m = map(&["z0^2*z1*z2", "z0*z1^2*z2", "z0*z1*z2^2"]);
        assert_eq!(m, RatMap::identity(2, Q));
        assert_eq!(m.degree(), 1);
    }

    #[test]
    fn scalar_canonicalization() {
        let m = map(&["2*z0", "2*z1", "2*z2"]);
        assert_eq!(m, RatMap::identity(2, Q));
    }

    #[test]
    fn degree_mismatch_is_error() {
        let err = RatMap::new_normalized(vec![hp("z0", 2), hp("z1^2", 2)]);
        assert!(matches!(err, Err(MapError::ComponentDegreeMismatch(1, 2))));
    }

    #[test]
    fn normalization_is_idempotent() {
        let m = map(&["z1*z2", "z0*z2", "z0*z1"]);
        let again = RatMap::new_normalized(m.components().to_vec()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn sigma_is_an_involution() {
        for n in 2..=4 {
            let sigma = standard_involution(n, Q);
            assert_eq!(sigma.degree(), n);
            let square = sigma.compose(&sigma).unwrap();
            assert!(square.is_identity(), "sigma_{n} squared is the identity");
            // raw degree n^2 collapses to 1
            let raw = sigma.compose_raw(&sigma).unwrap();
            assert_eq!(raw[0].degree(), Some(n * n));
        }
    }

    #[test]
    fn compose_with_identity() {
        let sigma = standard_involution(2, Q);
        let id = RatMap::identity(2, Q);
        assert_eq!(sigma.compose(&id).unwrap(), sigma);
        assert_eq!(id.compose(&sigma).unwrap(), sigma);
    }

    #[test]
    fn apply_point_paths() {
        let sigma = standard_involution(2, Q);
        let fixed = ProjPoint::from_ints(Q, &[1, 1, 1]).unwrap();
        assert_eq!(sigma.apply_point(&fixed).unwrap(), fixed);

        let base = ProjPoint::from_ints(Q, &[0, 0, 1]).unwrap();
        assert!(matches!(sigma.apply_point(&base), Err(MapError::BasePoint(_))));

        let gf = FieldDescriptor::prime_field(7).unwrap();
        let sigma7 = standard_involution(2, gf);
        let p = ProjPoint::from_ints(gf, &[1, 2, 3]).unwrap();
        let expected = ProjPoint::from_ints(gf, &[1, 4, 5]).unwrap();
        assert_eq!(sigma7.apply_point(&p).unwrap(), expected);
    }

    #[test]
    fn affine_chart_examples() {
        // eta on P^3: (z0, z1, 1/z2) -> (z0*z2 : z1*z2 : z3^2 : z2*z3)
        let comps: Vec<(MultiPoly, MultiPoly)> = ["z0", "z1", "1/z2"]
            .iter()
            .map(|t| crate::poly::parse_fraction(t, 3, Q).unwrap())
            .collect();
        let eta = RatMap::from_affine_chart(&comps).unwrap();
        assert_eq!(eta, map(&["z0*z2", "z1*z2", "z3^2", "z2*z3"]));
        assert_eq!(eta.degree(), 2);

        // h_2 homogenizes to a linear map
        let comps: Vec<(MultiPoly, MultiPoly)> = ["z0/(z0-1)", "(z0-z1)/(z0-1)"]
            .iter()
            .map(|t| crate::poly::parse_fraction(t, 2, Q).unwrap())
            .collect();
        let h2 = RatMap::from_affine_chart(&comps).unwrap();
        assert_eq!(h2, map(&["z0", "z0-z1", "z0-z2"]));
        assert_eq!(h2.degree(), 1);

        // identity chart
        let comps: Vec<(MultiPoly, MultiPoly)> = ["z0", "z1"]
            .iter()
            .map(|t| crate::poly::parse_fraction(t, 2, Q).unwrap())
            .collect();
        assert!(RatMap::from_affine_chart(&comps).unwrap().is_identity());
    }

    #[test]
    fn chart_restriction_recovers_input() {
        let comps: Vec<(MultiPoly, MultiPoly)> = ["z0", "z1", "1/z2"]
            .iter()
            .map(|t| crate::poly::parse_fraction(t, 3, Q).unwrap())
            .collect();
        let eta = RatMap::from_affine_chart(&comps).unwrap();
        let back = eta.restrict_to_chart();
        for ((num, den), (orig_num, orig_den)) in back.iter().zip(&comps) {
            // equality as fractions: num * orig_den == orig_num * den
            assert_eq!(num.mul(orig_den), orig_num.mul(den));
        }
    }

    #[test]
    fn linear_bridge_round_trip() {
        let h2 = LinearMap::from_int_rows(Q, &[&[1, 0, 0], &[1, -1, 0], &[1, 0, -1]]).unwrap();
        let as_map = h2.to_rat_map();
        assert_eq!(LinearMap::from_rat_map(&as_map).unwrap(), h2);
        // h2 is an involution
        assert_eq!(h2.inverse(), h2);
    }

    #[test]
    fn dual_examples() {
        let field = Q;
        let d = LinearMap::diagonal(&[
            FieldElem::from_int(field, 2),
            FieldElem::from_int(field, 3),
            FieldElem::from_int(field, 5),
        ])
        .unwrap();
        let dual = d.dual();
        // diag(a,b,c) dual = diag(1/a,1/b,1/c) = diag(bc, ac, ab) projectively
        let expected = LinearMap::diagonal(&[
            FieldElem::from_int(field, 15),
            FieldElem::from_int(field, 10),
            FieldElem::from_int(field, 6),
        ])
        .unwrap();
        assert_eq!(dual, expected);
        assert_eq!(dual.dual(), d);
        let id = LinearMap::identity(3, field);
        assert_eq!(id.dual(), id);
    }

    #[test]
    fn singular_matrix_rejected() {
        let err = LinearMap::from_int_rows(Q, &[&[1, 1], &[2, 2]]);
        assert!(matches!(err, Err(MapError::SingularMatrix)));
    }

    #[test]
    fn linear_compose_agrees_with_matrix_product() {
        let a = LinearMap::from_int_rows(Q, &[&[1, 2, 0], &[0, 1, 0], &[3, 0, 1]]).unwrap();
        let b = LinearMap::from_int_rows(Q, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]).unwrap();
        let lhs = a.compose(&b).to_rat_map();
        let rhs = a.to_rat_map().compose(&b.to_rat_map()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn degenerate_composition_reported() {
        // (z1 : z0 : 0) followed by sigma_2 collapses to a point
        let g = map(&["z1", "z0", "0"]);
        let sigma = standard_involution(2, Q);
        assert!(matches!(sigma.compose(&g), Err(MapError::DegenerateMap)));
    }
}
