//! The `Psi_{P,Q,R}` machinery: construction of `Psi` and its shadow map on
//! one lower dimension, the splitting `P = z_n P_{d-1} + P_d`, a recursive
//! birationality criterion with certificate trail, generic hypersurface
//! blow-downs, and the finite-field oracles (fiber enumeration and
//! contraction checks) that back them.

use crate::field::{FieldDescriptor, FieldElem, FieldError};
use crate::poly::{HomPoly, Monomial, PolyError};
use crate::ratmap::{LinearMap, MapError, RatMap};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PanError {
    #[error("need d >= ell+1 >= 2, got d = {d}, ell = {ell}")]
    BadDegrees { d: usize, ell: usize },
    #[error("{poly} must have z_n-degree <= 1, found {found}")]
    ZnDegreeTooHigh { poly: String, found: usize },
    #[error("both top z_n-coefficients vanish: (P_(d-1), Q_(ell-1)) = (0, 0)")]
    TopCoefficientsZero,
    #[error("P and Q share the common factor {0}")]
    CommonFactor(String),
    #[error("{poly} has degree {found:?}, expected {expected}")]
    WrongDegree { poly: String, found: Option<usize>, expected: usize },
    #[error("R components must be polynomials in z0..z_(n-1) only")]
    RInvolvesLastVariable,
    #[error("hypersurface degree must be at least 1")]
    EllZero,
    #[error("hypersurface must pass through the center (0:...:0:1)")]
    NotThroughCenter,
    #[error("dimension n = {0} is too small here")]
    DimensionTooSmall(usize),
    #[error("prime {p} unusable: {reason}")]
    BadPrime { p: u32, reason: String },
    #[error("retry budget of {tries} draws exhausted ({diagnostics})")]
    RetriesExhausted { tries: usize, diagnostics: String },
    #[error("no usable points over GF({0})")]
    NoUsablePoints(u32),
    #[error("all sampled fibers over GF({0}) were degenerate (positive-dimensional)")]
    AllTrialsDegenerate(u32),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The data `(n, d, ell, P, Q, R_0..R_{n-1})` of one `Psi` instance, with
/// all hypotheses checked at construction:
/// `deg_{z_n} P <= 1`, `deg_{z_n} Q <= 1`, `(P_{d-1}, Q_{ell-1}) != (0,0)`,
/// `gcd(P, Q) = 1`, and the R_i free of `z_n` with degree `d - ell`.
#[derive(Clone, Debug)]
pub struct PanSpec {
    n: usize,
    d: usize,
    ell: usize,
    p: HomPoly,
    q: HomPoly,
    r: Vec<HomPoly>,
}

impl PanSpec {
    pub fn new(
        n: usize,
        d: usize,
        ell: usize,
        p: HomPoly,
        q: HomPoly,
        r: Vec<HomPoly>,
    ) -> Result<Self, PanError> {
        if n < 2 {
            return Err(PanError::DimensionTooSmall(n));
        }
        if !(d >= ell + 1 && ell >= 1) {
            return Err(PanError::BadDegrees { d, ell });
        }
        let nvars = n + 1;
        if p.degree() != Some(d) {
            return Err(PanError::WrongDegree { poly: "P".into(), found: p.degree(), expected: d });
        }
        if q.degree() != Some(ell) {
            return Err(PanError::WrongDegree { poly: "Q".into(), found: q.degree(), expected: ell });
        }
        for poly in [&p, &q] {
            if poly.nvars() != nvars {
                return Err(PolyError::ArityMismatch(nvars, poly.nvars()).into());
            }
        }
        let dp = p.degree_in(n);
        if dp > 1 {
            return Err(PanError::ZnDegreeTooHigh { poly: "P".into(), found: dp });
        }
        let dq = q.degree_in(n);
        if dq > 1 {
            return Err(PanError::ZnDegreeTooHigh { poly: "Q".into(), found: dq });
        }
        if dp == 0 && dq == 0 {
            return Err(PanError::TopCoefficientsZero);
        }
        if r.len() != n {
            return Err(PolyError::ArityMismatch(n, r.len()).into());
        }
        for ri in &r {
            if ri.nvars() != nvars {
                return Err(PolyError::ArityMismatch(nvars, ri.nvars()).into());
            }
            if ri.degree_in(n) > 0 {
                return Err(PanError::RInvolvesLastVariable);
            }
            if ri.degree() != Some(d - ell) {
                return Err(PanError::WrongDegree {
                    poly: "R".into(),
                    found: ri.degree(),
                    expected: d - ell,
                });
            }
        }
        let g = p.as_multi().gcd(q.as_multi());
        if g.total_degree() != Some(0) {
            return Err(PanError::CommonFactor(g.format()));
        }
        Ok(PanSpec { n, d, ell, p, q, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn p(&self) -> &HomPoly {
        &self.p
    }

    pub fn q(&self) -> &HomPoly {
        &self.q
    }

    pub fn r(&self) -> &[HomPoly] {
        &self.r
    }
}

/// Splits `p = z_n * high + low` with both parts free of `z_n`; errors when
/// the `z_n`-degree exceeds 1.
pub fn zn_split(p: &HomPoly) -> Result<(HomPoly, HomPoly), PanError> {
    let v = p.nvars() - 1;
    let dz = p.degree_in(v);
    if dz > 1 {
        return Err(PanError::ZnDegreeTooHigh { poly: p.format(), found: dz });
    }
    let field = p.field();
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (m, c) in p.terms() {
        let mut e = m.exponents().to_vec();
        if e[v] == 1 {
            e[v] = 0;
            high.push((Monomial::new(e), c.clone()));
        } else {
            low.push((Monomial::new(e), c.clone()));
        }
    }
    Ok((
        HomPoly::from_terms(p.nvars(), field, high)?,
        HomPoly::from_terms(p.nvars(), field, low)?,
    ))
}

/// `Psi = (Q R_0 : ... : Q R_{n-1} : P)`, normalized.
pub fn build_psi(spec: &PanSpec) -> Result<RatMap, PanError> {
    let mut comps: Vec<HomPoly> = spec
        .r
        .iter()
        .map(|ri| spec.q.mul(ri))
        .collect::<Result<_, _>>()?;
    comps.push(spec.p.clone());
    Ok(RatMap::new_normalized(comps)?)
}

/// The shadow map `(R_0 : ... : R_{n-1})` on one lower dimension.
pub fn build_psi_tilde(spec: &PanSpec) -> Result<RatMap, PanError> {
    let comps: Vec<HomPoly> = spec.r.iter().map(|ri| ri.shrink_vars(spec.n)).collect();
    Ok(RatMap::new_normalized(comps)?)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Birationality {
    Birational,
    NotBirational,
    Undetermined,
}

/// How strong the verdict is: `Certified` comes from an exact argument,
/// `Probabilistic` from fiber-1 sampling, `Witnessed` from an explicit
/// multi-point fiber.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Certified,
    Probabilistic,
    Witnessed,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrailStep {
    pub dim: usize,
    pub action: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: Birationality,
    pub certainty: Certainty,
    pub trail: Vec<TrailStep>,
}

/// Primes, trial count and seed for the fiber oracles.
#[derive(Clone, Debug)]
pub struct OracleOpts {
    pub primes: Vec<u32>,
    pub trials: u32,
    pub seed: u64,
}

impl Default for OracleOpts {
    fn default() -> Self {
        OracleOpts { primes: vec![7, 11, 13], trials: 7, seed: 0 }
    }
}

/// Tries to read a map on P^m as some `Psi_{P,Q,R}`: the last component is
/// P, the GCD of the others is Q, and the cofactors R_i must avoid the last
/// variable.
pub fn pan_shape(map: &RatMap) -> Option<PanSpec> {
    let m = map.n();
    if m < 2 {
        return None;
    }
    let comps = map.components();
    let p = comps[m].clone();
    let front = &comps[..m];
    if front.iter().all(|c| c.is_zero()) {
        return None;
    }
    let q = HomPoly::gcd_many(front).ok()?;
    let ell = q.degree()?;
    if ell == 0 {
        return None;
    }
    let r: Option<Vec<HomPoly>> = front
        .iter()
        .map(|c| {
            if c.is_zero() {
                Some(HomPoly::zero(c.nvars(), c.field()))
            } else {
                c.exact_div(&q).ok()
            }
        })
        .collect();
    let d = map.degree();
    PanSpec::new(m, d, ell, p, q, r?).ok()
}

/// Lemma-driven birationality decision: `Psi` is birational iff its shadow
/// map is, so the decision recurses through shadow maps until an exact base
/// case (linear map, involution, or a self-map of P^1) or, failing that,
/// the finite-field generic-fiber oracle. The trail records every step.
pub fn birationality_criterion(spec: &PanSpec, opts: &OracleOpts) -> Result<Verdict, PanError> {
    let mut trail = Vec::new();
    trail.push(TrailStep {
        dim: spec.n,
        action: "psi_shape".into(),
        detail: format!("d = {}, ell = {}; reducing to the shadow map", spec.d, spec.ell),
    });
    let tilde = match build_psi_tilde(spec) {
        Ok(m) => m,
        Err(PanError::Map(MapError::DegenerateMap)) => {
            trail.push(TrailStep {
                dim: spec.n - 1,
                action: "degenerate_shadow".into(),
                detail: "R components are proportional; the map is not dominant".into(),
            });
            return Ok(Verdict {
                status: Birationality::NotBirational,
                certainty: Certainty::Certified,
                trail,
            });
        }
        Err(e) => return Err(e),
    };
    decide_map(&tilde, trail, opts)
}

/// Decides birationality of an arbitrary normalized self-map, reusing the
/// shadow-map reduction whenever the map has `Psi` shape.
pub fn decide_map(
    map: &RatMap,
    mut trail: Vec<TrailStep>,
    opts: &OracleOpts,
) -> Result<Verdict, PanError> {
    let dim = map.n();
    if map.degree() == 1 {
        return Ok(match LinearMap::from_rat_map(map) {
            Ok(_) => {
                trail.push(TrailStep {
                    dim,
                    action: "linear".into(),
                    detail: "invertible matrix".into(),
                });
                Verdict {
                    status: Birationality::Birational,
                    certainty: Certainty::Certified,
                    trail,
                }
            }
            Err(MapError::SingularMatrix) => {
                trail.push(TrailStep {
                    dim,
                    action: "linear".into(),
                    detail: "singular matrix, not dominant".into(),
                });
                Verdict {
                    status: Birationality::NotBirational,
                    certainty: Certainty::Certified,
                    trail,
                }
            }
            Err(e) => return Err(e.into()),
        });
    }
    if dim == 1 {
        trail.push(TrailStep {
            dim,
            action: "projective_line".into(),
            detail: format!("degree {} self-map of P^1 has generic fiber {}", map.degree(), map.degree()),
        });
        return Ok(Verdict {
            status: Birationality::NotBirational,
            certainty: Certainty::Certified,
            trail,
        });
    }
    if let Ok(square) = map.compose(map) {
        if square.is_identity() {
            trail.push(TrailStep {
                dim,
                action: "involution".into(),
                detail: "map composed with itself is the identity".into(),
            });
            return Ok(Verdict {
                status: Birationality::Birational,
                certainty: Certainty::Certified,
                trail,
            });
        }
    }
    if let Some(inner) = pan_shape(map) {
        trail.push(TrailStep {
            dim,
            action: "psi_shape".into(),
            detail: format!(
                "recognized Psi shape with d = {}, ell = {}; reducing to the shadow map",
                inner.d, inner.ell
            ),
        });
        let tilde = match build_psi_tilde(&inner) {
            Ok(m) => m,
            Err(PanError::Map(MapError::DegenerateMap)) => {
                trail.push(TrailStep {
                    dim: inner.n - 1,
                    action: "degenerate_shadow".into(),
                    detail: "R components are proportional; the map is not dominant".into(),
                });
                return Ok(Verdict {
                    status: Birationality::NotBirational,
                    certainty: Certainty::Certified,
                    trail,
                });
            }
            Err(e) => return Err(e),
        };
        return decide_map(&tilde, trail, opts);
    }
    // base case: finite-field generic-fiber oracle
    let mut modal_sizes = Vec::new();
    let mut witness: Option<String> = None;
    for &p in &opts.primes {
        match generic_fiber_size(map, p, opts.trials, opts.seed) {
            Ok(report) => {
                trail.push(TrailStep {
                    dim,
                    action: "fiber_oracle".into(),
                    detail: format!(
                        "GF({p}): modal fiber {} over {} trials (sizes {:?})",
                        report.modal_size, report.trials, report.trial_sizes
                    ),
                });
                if report.modal_size > 1 && witness.is_none() {
                    witness = report.sample_fiber.clone();
                }
                modal_sizes.push(report.modal_size);
            }
            Err(PanError::BadPrime { p, reason }) => {
                trail.push(TrailStep {
                    dim,
                    action: "fiber_oracle".into(),
                    detail: format!("GF({p}) skipped: {reason}"),
                });
            }
            Err(PanError::AllTrialsDegenerate(p)) => {
                trail.push(TrailStep {
                    dim,
                    action: "fiber_oracle".into(),
                    detail: format!("GF({p}) skipped: every sampled fiber was positive-dimensional"),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let verdict = if modal_sizes.is_empty() {
        Verdict {
            status: Birationality::Undetermined,
            certainty: Certainty::Probabilistic,
            trail,
        }
    } else if modal_sizes.iter().all(|&s| s == 1) {
        Verdict {
            status: Birationality::Birational,
            certainty: Certainty::Probabilistic,
            trail,
        }
    } else if modal_sizes.iter().all(|&s| s > 1) {
        if let Some(w) = witness {
            trail.push(TrailStep {
                dim,
                action: "fiber_witness".into(),
                detail: w,
            });
        }
        Verdict {
            status: Birationality::NotBirational,
            certainty: Certainty::Witnessed,
            trail,
        }
    } else {
        Verdict {
            status: Birationality::Undetermined,
            certainty: Certainty::Probabilistic,
            trail,
        }
    };
    Ok(verdict)
}

/// The data behind one hypersurface blow-down.
#[derive(Clone, Debug)]
pub struct BlowdownSpec {
    pub n: usize,
    /// hypersurface equation, degree ell, multiplicity >= ell-1 at the center
    pub q_prime: HomPoly,
    /// the random hyperplane through the center
    pub h: HomPoly,
    /// target degree (ell+1 when minimal)
    pub d: usize,
    /// the chosen last component P = z_n P_{d-1} + P_d
    pub p: HomPoly,
    pub seed: u64,
}

fn random_homogeneous(
    nvars: usize,
    active: usize,
    degree: usize,
    field: FieldDescriptor,
    rng: &mut ChaCha8Rng,
    terms: usize,
) -> HomPoly {
    let mut acc = HomPoly::zero(nvars, field);
    for _ in 0..terms {
        let mut exps = vec![0u32; nvars];
        for _ in 0..degree {
            exps[rng.gen_range(0..active)] += 1;
        }
        let c = loop {
            let v = rng.gen_range(-3i64..=3);
            if v != 0 {
                break v;
            }
        };
        let term = HomPoly::monomial(nvars, FieldElem::from_int(field, c), &exps);
        acc = acc.add(&term).expect("same degree");
    }
    acc
}

/// Builds a birational map of degree `d` that blows the hypersurface
/// `q' = 0` down to the center `(0:...:0:1)`: a seeded-random hyperplane
/// `h` through the center and a random `P = z_n P_{d-1} + P_d` are redrawn
/// until `P_{d-1} != 0` and `gcd(P, h q') = 1`, then
/// `Q = h^(d-ell-1) q'` and `R_i = z_i`.
pub fn blowdown_build(
    q_prime: &HomPoly,
    d: usize,
    seed: u64,
) -> Result<(BlowdownSpec, RatMap), PanError> {
    let nvars = q_prime.nvars();
    let n = nvars - 1;
    if n < 2 {
        return Err(PanError::DimensionTooSmall(n));
    }
    let field = q_prime.field();
    let ell = q_prime.degree().ok_or(PanError::EllZero)?;
    if ell == 0 {
        return Err(PanError::EllZero);
    }
    let dz = q_prime.degree_in(n);
    if dz > 1 {
        return Err(PanError::ZnDegreeTooHigh { poly: "q'".into(), found: dz });
    }
    let mut center = vec![FieldElem::zero(field); nvars];
    center[n] = FieldElem::one(field);
    if !q_prime.eval_point(&center)?.is_zero() {
        return Err(PanError::NotThroughCenter);
    }
    if d < ell + 1 {
        return Err(PanError::BadDegrees { d, ell });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 200;
    let mut last_reason = String::new();
    for _ in 0..budget {
        let h = random_homogeneous(nvars, n, 1, field, &mut rng, 2);
        if h.is_zero() {
            last_reason = "drew a zero hyperplane".into();
            continue;
        }
        let p_high = random_homogeneous(nvars, n, d - 1, field, &mut rng, 3);
        if p_high.is_zero() {
            last_reason = "drew P_(d-1) = 0".into();
            continue;
        }
        let low_terms = rng.gen_range(0..=3);
        let p_low = random_homogeneous(nvars, n, d, field, &mut rng, low_terms);
        let zn = HomPoly::variable(nvars, field, n);
        let p = zn.mul(&p_high)?.add(&p_low)?;
        let hq = h.mul(q_prime)?;
        if p.as_multi().gcd(hq.as_multi()).total_degree() != Some(0) {
            last_reason = "gcd(P, h q') nontrivial".into();
            continue;
        }
        let mut q = q_prime.clone();
        for _ in 0..d - ell - 1 {
            q = q.mul(&h)?;
        }
        let r: Vec<HomPoly> = (0..n).map(|i| HomPoly::variable(nvars, field, i)).collect();
        let spec = PanSpec::new(n, d, d - 1, p.clone(), q, r)?;
        let psi = build_psi(&spec)?;
        let bspec = BlowdownSpec {
            n,
            q_prime: q_prime.clone(),
            h,
            d,
            p,
            seed,
        };
        return Ok((bspec, psi));
    }
    Err(PanError::RetriesExhausted { tries: budget, diagnostics: last_reason })
}

// ---- finite-field machinery ----

/// A map over GF(p) compiled to flat coefficient/exponent arrays for fast
/// evaluation over the whole projective space.
struct CompiledMap {
    p: u64,
    nvars: usize,
    components: Vec<Vec<(u64, Vec<u32>)>>,
}

impl CompiledMap {
    fn compile(map: &RatMap, p: u32) -> Result<(CompiledMap, RatMap), PanError> {
        let gf = FieldDescriptor::prime_field(p)?;
        let reduced = if map.field() == gf {
            map.clone()
        } else {
            let comps: Result<Vec<HomPoly>, PolyError> =
                map.components().iter().map(|c| c.map_field(gf)).collect();
            let comps = comps.map_err(|e| PanError::BadPrime { p, reason: e.to_string() })?;
            RatMap::new_normalized(comps)
                .map_err(|e| PanError::BadPrime { p, reason: e.to_string() })?
        };
        let components = reduced
            .components()
            .iter()
            .map(|c| {
                c.terms()
                    .map(|(m, coeff)| {
                        let v = match coeff {
                            FieldElem::Prime { value, .. } => *value,
                            _ => unreachable!("reduced to GF(p)"),
                        };
                        (v, m.exponents().to_vec())
                    })
                    .collect()
            })
            .collect();
        Ok((
            CompiledMap { p: u64::from(p), nvars: reduced.n() + 1, components },
            reduced,
        ))
    }

    fn eval(&self, point: &[u64]) -> Vec<u64> {
        self.components
            .iter()
            .map(|terms| {
                let mut acc = 0u64;
                for (c, exps) in terms {
                    let mut t = *c;
                    for (v, &e) in exps.iter().enumerate() {
                        for _ in 0..e {
                            t = t * point[v] % self.p;
                        }
                    }
                    acc = (acc + t) % self.p;
                }
                acc
            })
            .collect()
    }
}

fn pf_inv(p: u64, a: u64) -> u64 {
    // p is prime and a != 0
    let (mut r0, mut r1) = (a as i64, p as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i64) as u64
}

/// Canonical representatives of all points of P^n(GF(p)): first nonzero
/// coordinate equals 1.
fn enumerate_projective_points(nvars: usize, p: u64) -> Vec<Vec<u64>> {
    let mut points = Vec::new();
    for lead in 0..nvars {
        // coordinates before `lead` are 0, coordinate `lead` is 1
        let free = nvars - lead - 1;
        let count = (p as usize).pow(free as u32);
        for idx in 0..count {
            let mut coords = vec![0u64; nvars];
            coords[lead] = 1;
            let mut rem = idx;
            for v in lead + 1..nvars {
                coords[v] = (rem % p as usize) as u64;
                rem /= p as usize;
            }
            points.push(coords);
        }
    }
    points
}

fn canonicalize_point(mut coords: Vec<u64>, p: u64) -> Option<Vec<u64>> {
    let lead = coords.iter().position(|&c| c != 0)?;
    let inv = pf_inv(p, coords[lead]);
    for c in coords.iter_mut() {
        *c = *c * inv % p;
    }
    Some(coords)
}

/// Fiber statistics of a map over GF(p).
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub prime: u32,
    pub trials: u32,
    /// most common fiber size among non-degenerate trials (ties broken
    /// toward the smaller size)
    pub modal_size: usize,
    pub trial_sizes: Vec<usize>,
    /// sampled fibers larger than the degeneracy threshold; such fibers
    /// are positive-dimensional (contracted loci), not generic ones
    pub degenerate_trials: u32,
    /// fibers above this size were treated as degenerate:
    /// `min(d^n, p)` with the Bezout bound d^n on zero-dimensional fibers
    pub degeneracy_threshold: usize,
    pub domain_points: usize,
    pub base_points: usize,
    /// formatted points of one multi-point fiber, when a trial found one
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_fiber: Option<String>,
}

/// Estimates the generic fiber size: reduce mod p, evaluate the map on all
/// of P^n(GF(p)), then sample random source points off the base locus and
/// count their full fibers. A sampled fiber with more than `d^n` points is
/// provably positive-dimensional (Bezout), so the trial is reported as
/// degenerate and redrawn; for small primes the cap `p` is applied as well
/// and recorded in the report. Returns the modal size over the valid
/// trials.
pub fn generic_fiber_size(
    map: &RatMap,
    p: u32,
    trials: u32,
    seed: u64,
) -> Result<FiberReport, PanError> {
    let (compiled, reduced) = CompiledMap::compile(map, p)?;
    let pp = u64::from(p);
    let points = enumerate_projective_points(compiled.nvars, pp);
    let images: Vec<Option<Vec<u64>>> = points
        .iter()
        .map(|pt| canonicalize_point(compiled.eval(pt), pp))
        .collect();
    let mut counts: HashMap<&[u64], usize> = HashMap::new();
    for img in images.iter().flatten() {
        *counts.entry(img.as_slice()).or_insert(0) += 1;
    }
    let usable: Vec<usize> = (0..points.len()).filter(|&i| images[i].is_some()).collect();
    if usable.is_empty() {
        return Err(PanError::NoUsablePoints(p));
    }
    let base_points = points.len() - usable.len();
    let n = reduced.n();
    let bezout = reduced.degree().checked_pow(n as u32).unwrap_or(usize::MAX);
    let threshold = bezout.min(pp as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(p));
    let mut trial_sizes = Vec::with_capacity(trials as usize);
    let mut degenerate_trials = 0u32;
    let mut sample_fiber = None;
    let budget = trials.saturating_mul(20);
    for _ in 0..budget {
        if trial_sizes.len() == trials as usize {
            break;
        }
        let idx = usable[rng.gen_range(0..usable.len())];
        let img = images[idx].as_ref().unwrap();
        let size = counts[img.as_slice()];
        if size > threshold {
            degenerate_trials += 1;
            continue;
        }
        if size > 1 && sample_fiber.is_none() {
            let members: Vec<String> = (0..points.len())
                .filter(|&j| images[j].as_deref() == Some(img.as_slice()))
                .take(8)
                .map(|j| format!("({})", points[j].iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")))
                .collect();
            sample_fiber = Some(format!(
                "fiber of size {size} over {} contains {}",
                format_args!("({})", img.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")),
                members.join(", ")
            ));
        }
        trial_sizes.push(size);
    }
    if trial_sizes.is_empty() {
        return Err(PanError::AllTrialsDegenerate(p));
    }
    let mut freq: HashMap<usize, usize> = HashMap::new();
    for &s in &trial_sizes {
        *freq.entry(s).or_insert(0) += 1;
    }
    let max_count = freq.values().copied().max().unwrap();
    let modal_size = freq
        .iter()
        .filter(|(_, &c)| c == max_count)
        .map(|(&s, _)| s)
        .min()
        .unwrap();
    Ok(FiberReport {
        prime: p,
        trials: trial_sizes.len() as u32,
        modal_size,
        trial_sizes,
        degenerate_trials,
        degeneracy_threshold: threshold,
        domain_points: points.len(),
        base_points,
        sample_fiber,
    })
}

/// Result of checking that a map contracts the hypersurface `q' = 0` to a
/// single point over GF(p).
#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub prime: u32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_image: Option<String>,
    pub surface_points: usize,
    pub base_points: usize,
    pub distinct_images: usize,
}

/// Enumerates the points of `q' = 0` in P^n(GF(p)) outside the base locus
/// of the reduced map and checks that all their images coincide.
pub fn contraction_check(
    map: &RatMap,
    q_prime: &HomPoly,
    p: u32,
) -> Result<ContractionReport, PanError> {
    let gf = FieldDescriptor::prime_field(p)?;
    // reject primes that kill the leading coefficient or any denominator
    let lead = q_prime
        .leading()
        .ok_or(PanError::EllZero)?
        .1
        .clone();
    if let FieldElem::Rational(qr) = &lead {
        let reduced = FieldElem::from_rational(gf, qr)
            .map_err(|e| PanError::BadPrime { p, reason: e.to_string() })?;
        if reduced.is_zero() {
            return Err(PanError::BadPrime {
                p,
                reason: "divides the leading coefficient of q'".into(),
            });
        }
    }
    let q_reduced = q_prime
        .map_field(gf)
        .map_err(|e| PanError::BadPrime { p, reason: e.to_string() })?;
    let (compiled, _) = CompiledMap::compile(map, p)?;
    let pp = u64::from(p);
    let q_compiled: Vec<(u64, Vec<u32>)> = q_reduced
        .terms()
        .map(|(m, c)| {
            let v = match c {
                FieldElem::Prime { value, .. } => *value,
                _ => unreachable!(),
            };
            (v, m.exponents().to_vec())
        })
        .collect();
    let eval_q = |pt: &[u64]| -> u64 {
        let mut acc = 0u64;
        for (c, exps) in &q_compiled {
            let mut t = *c;
            for (v, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t = t * pt[v] % pp;
                }
            }
            acc = (acc + t) % pp;
        }
        acc
    };
    let points = enumerate_projective_points(compiled.nvars, pp);
    let mut surface_points = 0usize;
    let mut base_points = 0usize;
    let mut images: Vec<Vec<u64>> = Vec::new();
    for pt in &points {
        if eval_q(pt) != 0 {
            continue;
        }
        surface_points += 1;
        match canonicalize_point(compiled.eval(pt), pp) {
            None => base_points += 1,
            Some(img) => {
                if !images.contains(&img) {
                    images.push(img);
                }
            }
        }
    }
    if surface_points == base_points {
        return Err(PanError::NoUsablePoints(p));
    }
    let pass = images.len() == 1;
    let common_image = if pass {
        Some(format!(
            "({})",
            images[0].iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
        ))
    } else {
        None
    };
    Ok(ContractionReport {
        prime: p,
        pass,
        common_image,
        surface_points,
        base_points,
        distinct_images: images.len(),
    })
}

/// Draws a random `PanSpec` over Q with the stated invariants, mixing
/// shadow-map families that are and are not birational. Deterministic in
/// the seed.
pub fn random_pan_spec(n: usize, d_max: usize, rng: &mut ChaCha8Rng) -> PanSpec {
    let field = FieldDescriptor::Rationals;
    let nvars = n + 1;
    loop {
        let ell = rng.gen_range(1..=2.min(d_max - 1));
        let gap = rng.gen_range(1..=(d_max - ell).min(2));
        let d = ell + gap;
        // R family
        let r: Vec<HomPoly> = match rng.gen_range(0..5) {
            0 => {
                // invertible linear (only when gap = 1); else monomials
                if gap == 1 {
                    let mut rows: Vec<HomPoly> = Vec::new();
                    for i in 0..n {
                        let mut poly = HomPoly::variable(nvars, field, i);
                        if rng.gen_bool(0.5) {
                            let j = rng.gen_range(0..n);
                            let c = FieldElem::from_int(field, rng.gen_range(1..=2));
                            poly = poly
                                .add(&HomPoly::variable(nvars, field, j).scale(&c))
                                .unwrap();
                        }
                        rows.push(poly);
                    }
                    rows
                } else {
                    (0..n)
                        .map(|i| {
                            let mut e = vec![0u32; nvars];
                            e[i] += 1;
                            e[(i + 1) % n] += (gap - 1) as u32;
                            HomPoly::monomial(nvars, FieldElem::one(field), &e)
                        })
                        .collect()
                }
            }
            1 => {
                // powers of single variables: not birational for gap > 1
                (0..n)
                    .map(|i| {
                        let mut e = vec![0u32; nvars];
                        e[i] = gap as u32;
                        HomPoly::monomial(nvars, FieldElem::one(field), &e)
                    })
                    .collect()
            }
            2 if n == 3 && gap == 2 => {
                // the standard quadratic involution of P^2 in the first
                // three variables
                (0..3)
                    .map(|i| {
                        let mut e = vec![0u32; nvars];
                        for k in 0..3 {
                            if k != i {
                                e[k] = 1;
                            }
                        }
                        HomPoly::monomial(nvars, FieldElem::one(field), &e)
                    })
                    .collect()
            }
            3 => {
                // nested Psi shape in the first n variables: R_i = q * z_i
                // for i < n-1, last = random with deg_{z_{n-1}} <= 1
                if gap == 2 && n >= 2 {
                    let q_inner = random_homogeneous(nvars, n - 1, 1, field, rng, 2);
                    if q_inner.is_zero() {
                        continue;
                    }
                    let mut comps: Vec<HomPoly> = (0..n - 1)
                        .map(|i| q_inner.mul(&HomPoly::variable(nvars, field, i)).unwrap())
                        .collect();
                    let high = random_homogeneous(nvars, n - 1, 1, field, rng, 2);
                    let low = random_homogeneous(nvars, n - 1, 2, field, rng, 2);
                    let last_var = HomPoly::variable(nvars, field, n - 1);
                    match high.mul(&last_var).and_then(|hp| hp.add(&low)) {
                        Ok(p_inner) if p_inner.degree() == Some(2) => {
                            comps.push(p_inner);
                            comps
                        }
                        _ => continue,
                    }
                } else {
                    (0..n)
                        .map(|_| random_homogeneous(nvars, n, gap, field, rng, 2))
                        .collect()
                }
            }
            _ => (0..n)
                .map(|_| random_homogeneous(nvars, n, gap, field, rng, 2))
                .collect(),
        };
        if r.iter().any(|ri| ri.degree() != Some(gap)) {
            continue;
        }
        // P and Q with z_n-degree <= 1
        let zn = HomPoly::variable(nvars, field, n);
        let p_high = random_homogeneous(nvars, n, d - 1, field, rng, 2);
        let p_low = random_homogeneous(nvars, n, d, field, rng, 2);
        let p = match p_high.mul(&zn).and_then(|a| a.add(&p_low)) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let q_high = if rng.gen_bool(0.4) {
            random_homogeneous(nvars, n, ell - 1, field, rng, 1)
        } else {
            HomPoly::zero(nvars, field)
        };
        let q_low = random_homogeneous(nvars, n, ell, field, rng, 2);
        let q = match (q_high.is_zero(), ell) {
            (true, _) => q_low.clone(),
            (false, 1) => match q_high.mul(&zn) {
                Ok(qh) => match qh.add(&q_low) {
                    Ok(q) => q,
                    Err(_) => continue,
                },
                Err(_) => continue,
            },
            (false, _) => match q_high.mul(&zn).and_then(|qh| qh.add(&q_low)) {
                Ok(q) => q,
                Err(_) => continue,
            },
        };
        if let Ok(spec) = PanSpec::new(n, d, ell, p, q, r) {
            return spec;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::ratmap::standard_involution;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    fn hp(text: &str, nvars: usize) -> HomPoly {
        parse_poly(text, nvars, Q).unwrap()
    }

    #[test]
    fn zn_split_examples() {
        let (high, low) = zn_split(&hp("z3*z0 + z1^2", 4)).unwrap();
        assert_eq!(high, hp("z0", 4));
        assert_eq!(low, hp("z1^2", 4));

        let (high, low) = zn_split(&hp("z0*z3 - z1*z2", 4)).unwrap();
        assert_eq!(high, hp("z0", 4));
        assert_eq!(low, hp("-z1*z2", 4));

        assert!(matches!(
            zn_split(&hp("z3^2 + z0^2", 4)),
            Err(PanError::ZnDegreeTooHigh { .. })
        ));
    }

    #[test]
    fn psi_assembly_and_identity_shadow() {
        // n = 2, P = z2 z0 + z1^2, Q = z0, R = (z0, z1)
        let spec = PanSpec::new(
            2,
            2,
            1,
            hp("z2*z0 + z1^2", 3),
            hp("z0", 3),
            vec![hp("z0", 3), hp("z1", 3)],
        )
        .unwrap();
        let psi = build_psi(&spec).unwrap();
        let expected = RatMap::new_normalized(vec![
            hp("z0^2", 3),
            hp("z0*z1", 3),
            hp("z2*z0 + z1^2", 3),
        ])
        .unwrap();
        assert!(psi.equals(&expected));
        let tilde = build_psi_tilde(&spec).unwrap();
        assert!(tilde.is_identity());
        let verdict = birationality_criterion(&spec, &OracleOpts::default()).unwrap();
        assert_eq!(verdict.status, Birationality::Birational);
        assert_eq!(verdict.certainty, Certainty::Certified);
    }

    #[test]
    fn non_birational_square_shadow() {
        // n = 2, R = (z0^2, z1^2): shadow is a degree-2 self-map of P^1
        let spec = PanSpec::new(
            2,
            3,
            1,
            hp("z2*z0^2 + z1^3", 3),
            hp("z0", 3),
            vec![hp("z0^2", 3), hp("z1^2", 3)],
        )
        .unwrap();
        let verdict = birationality_criterion(&spec, &OracleOpts::default()).unwrap();
        assert_eq!(verdict.status, Birationality::NotBirational);
        assert_eq!(verdict.certainty, Certainty::Certified);
        // and the oracle agrees
        let psi = build_psi(&spec).unwrap();
        let report = generic_fiber_size(&psi, 7, 7, 0).unwrap();
        assert!(report.modal_size > 1);
    }

    #[test]
    fn invariant_violations_reported() {
        // common factor z0
        assert!(matches!(
            PanSpec::new(
                2,
                2,
                1,
                hp("z0*z2 + z0*z1", 3),
                hp("z0", 3),
                vec![hp("z0", 3), hp("z1", 3)],
            ),
            Err(PanError::CommonFactor(_))
        ));
        // z_n-degree 2 in P
        assert!(matches!(
            PanSpec::new(
                2,
                2,
                1,
                hp("z2^2", 3),
                hp("z0", 3),
                vec![hp("z0", 3), hp("z1", 3)],
            ),
            Err(PanError::ZnDegreeTooHigh { .. })
        ));
        // both top coefficients zero
        assert!(matches!(
            PanSpec::new(
                2,
                2,
                1,
                hp("z0^2 + z1^2", 3),
                hp("z1", 3),
                vec![hp("z0", 3), hp("z1", 3)],
            ),
            Err(PanError::TopCoefficientsZero)
        ));
    }

    #[test]
    fn sigma_fiber_is_one() {
        for n in [2usize, 3] {
            let sigma = standard_involution(n, Q);
            let report = generic_fiber_size(&sigma, 7, 7, 1).unwrap();
            assert_eq!(report.modal_size, 1, "sigma_{n} is birational");
        }
        let id = RatMap::identity(2, Q);
        assert_eq!(generic_fiber_size(&id, 5, 5, 0).unwrap().modal_size, 1);
    }

    #[test]
    fn squares_map_fiber_four() {
        let m = RatMap::new_normalized(vec![hp("z0^2", 3), hp("z1^2", 3), hp("z2^2", 3)]).unwrap();
        let report = generic_fiber_size(&m, 7, 9, 0).unwrap();
        assert_eq!(report.modal_size, 4);
    }

    #[test]
    fn blowdown_quadric_contracts() {
        let q = hp("z0*z3 - z1*z2", 4);
        let (bspec, psi) = blowdown_build(&q, 3, 1).unwrap();
        assert_eq!(psi.degree(), 3);
        assert_eq!(bspec.d, 3);
        // first n components are divisible by q'
        for c in &psi.components()[..3] {
            assert!(c.as_multi().divisible_by(q.as_multi()));
        }
        let report = contraction_check(&psi, &q, 7).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.common_image.as_deref(), Some("(0:0:0:1)"));
    }

    #[test]
    fn blowdown_hyperplane() {
        let q = hp("z0", 4);
        let (_, psi) = blowdown_build(&q, 2, 3).unwrap();
        assert_eq!(psi.degree(), 2);
        let report = contraction_check(&psi, &q, 7).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn blowdown_rejects_bad_multiplicity() {
        let q = hp("z3^2 + z0^2", 4);
        assert!(matches!(
            blowdown_build(&q, 3, 0),
            Err(PanError::ZnDegreeTooHigh { .. })
        ));
    }

    #[test]
    fn sigma_contracts_coordinate_plane() {
        // sigma_2 sends the line z0 = 0 to (1:0:0)
        let sigma = standard_involution(2, Q);
        let report = contraction_check(&sigma, &hp("z0", 3), 5).unwrap();
        assert!(report.pass);
        assert_eq!(report.common_image.as_deref(), Some("(1:0:0)"));
    }

    #[test]
    fn identity_contracts_nothing() {
        let id = RatMap::identity(2, Q);
        let report = contraction_check(&id, &hp("z0", 3), 5).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn random_specs_have_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..30 {
            let n = if rng.gen_bool(0.5) { 2 } else { 3 };
            let spec = random_pan_spec(n, 4, &mut rng);
            assert!(spec.d() <= 4);
            assert!(spec.d() >= spec.ell() + 1);
        }
    }
}
