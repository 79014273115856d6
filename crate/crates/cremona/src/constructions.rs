//! Catalog of the explicit maps used throughout the crate, each with its
//! decomposition data where one exists, plus the named-identity
//! verification registry.
//!
//! Everything here is exact: identities are checked by symbolic composition
//! and canonical-form equality, never numerically.

use crate::field::{sample_nonzero, FieldDescriptor, FieldElem, FieldError};
use crate::poly::{parse_fraction, HomPoly, MultiPoly, PolyError};
use crate::ratmap::{standard_involution, LinearMap, MapError, RatMap};
use crate::words::{
    birkhoff_check, commutator, conjugate, evaluate, Alphabet, BirationalPair, GroupWord,
    WordError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

/// Compositions are capped at this ambient dimension by default; all the
/// paper identities are uniform in n, so small n carry the content.
pub const DEFAULT_MAX_N: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("unknown construction {0:?}")]
    UnknownName(String),
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("{name} is not defined for n = {n} (supported: {min}..={max})")]
    UnsupportedDimension { name: String, n: usize, min: usize, max: usize },
    #[error("{name} requires parameter {param}")]
    MissingParam { name: String, param: String },
    #[error("decomposition of {0} does not evaluate to the map")]
    DecompositionMismatch(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Optional parameters for `build`.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub prime: Option<u32>,
    pub alpha: Option<Vec<FieldElem>>,
    pub index: Option<usize>,
    pub exponent: Option<i64>,
}

/// A cataloged map plus, when the construction comes with one, the word
/// that decomposes it over the standard involution and linear letters.
#[derive(Clone, Debug)]
pub struct NamedConstruction {
    pub name: String,
    pub n: usize,
    pub map: RatMap,
    pub decomposition: Option<(Alphabet, GroupWord)>,
}

impl NamedConstruction {
    fn plain(name: &str, n: usize, map: RatMap) -> Self {
        NamedConstruction { name: name.to_string(), n, map, decomposition: None }
    }

    fn with_word(
        name: &str,
        n: usize,
        map: RatMap,
        alphabet: Alphabet,
        word: GroupWord,
    ) -> Result<Self, BuildError> {
        if !evaluate(&word, &alphabet)?.equals(&map) {
            return Err(BuildError::DecompositionMismatch(name.to_string()));
        }
        Ok(NamedConstruction {
            name: name.to_string(),
            n,
            map,
            decomposition: Some((alphabet, word)),
        })
    }
}

fn row(size: usize, field: FieldDescriptor, entries: &[(i64, usize)]) -> Vec<FieldElem> {
    let mut r = vec![FieldElem::zero(field); size];
    for &(c, i) in entries {
        r[i] = r[i].add(&FieldElem::from_int(field, c));
    }
    r
}

fn linear(n: usize, field: FieldDescriptor, rows: &[Vec<(i64, usize)>]) -> LinearMap {
    let size = n + 1;
    let mat = rows.iter().map(|r| row(size, field, r)).collect();
    LinearMap::new(mat).expect("cataloged linear maps are invertible")
}

/// The degree-2 map of Lemma "pratique":
/// `(z0 z_{n-1} : ... : z_{n-2} z_{n-1} : z_{n-1} z_n : z_n^2)`.
pub fn varsigma(n: usize, field: FieldDescriptor) -> RatMap {
    let size = n + 1;
    let mut comps = Vec::with_capacity(size);
    for i in 0..n - 1 {
        let mut e = vec![0u32; size];
        e[i] = 1;
        e[n - 1] += 1;
        comps.push(HomPoly::monomial(size, FieldElem::one(field), &e));
    }
    let mut e = vec![0u32; size];
    e[n - 1] = 1;
    e[n] = 1;
    comps.push(HomPoly::monomial(size, FieldElem::one(field), &e));
    let mut e = vec![0u32; size];
    e[n] = 2;
    comps.push(HomPoly::monomial(size, FieldElem::one(field), &e));
    RatMap::new_normalized(comps).expect("varsigma is well formed")
}

/// The three linear letters that decompose `varsigma` over the standard
/// involution.
pub fn varsigma_letters(n: usize, field: FieldDescriptor) -> (LinearMap, LinearMap, LinearMap) {
    // a1 = (z2-z1 : z3-z1 : ... : zn-z1 : z1 : z1-z0)
    let mut rows1: Vec<Vec<(i64, usize)>> = (0..n - 1).map(|i| vec![(1, i + 2), (-1, 1)]).collect();
    rows1.push(vec![(1, 1)]);
    rows1.push(vec![(1, 1), (-1, 0)]);
    // a2 = (z_{n-1}+z_n : z_n : z0 : z1 : ... : z_{n-2})
    let mut rows2: Vec<Vec<(i64, usize)>> = vec![vec![(1, n - 1), (1, n)], vec![(1, n)]];
    rows2.extend((0..n - 1).map(|i| vec![(1, i)]));
    // a3 = (z0+z_n : ... : z_{n-2}+z_n : z_{n-1}-z_n : z_n)
    let mut rows3: Vec<Vec<(i64, usize)>> = (0..n - 1).map(|i| vec![(1, i), (1, n)]).collect();
    rows3.push(vec![(1, n - 1), (-1, n)]);
    rows3.push(vec![(1, n)]);
    (
        linear(n, field, &rows1),
        linear(n, field, &rows2),
        linear(n, field, &rows3),
    )
}

fn varsigma_decomposed(n: usize, field: FieldDescriptor) -> Result<NamedConstruction, BuildError> {
    let (a1, a2, a3) = varsigma_letters(n, field);
    let mut alphabet = Alphabet::new(n, field);
    alphabet.register("a1", a1.to_rat_map())?;
    alphabet.register("a2", a2.to_rat_map())?;
    alphabet.register("a3", a3.to_rat_map())?;
    alphabet.register("s", standard_involution(n, field))?;
    let word = GroupWord::parse("a1 s a2 s a3")?;
    NamedConstruction::with_word("varsigma", n, varsigma(n, field), alphabet, word)
}

/// The involution conjugating `-id` to the standard involution, given in
/// the chart `z_n = 1` by `z_i -> (z_i+1)/(z_i-1)`.
pub fn psi(n: usize, field: FieldDescriptor) -> RatMap {
    let comps: Vec<(MultiPoly, MultiPoly)> = (0..n)
        .map(|i| parse_fraction(&format!("(z{i}+1)/(z{i}-1)"), n, field).expect("fixed syntax"))
        .collect();
    RatMap::from_affine_chart(&comps).expect("psi is well formed")
}

/// The two affine letters with `psi = a1 sigma a2`.
pub fn psi_letters(n: usize, field: FieldDescriptor) -> (LinearMap, LinearMap) {
    // translations z_i -> z_i + 1 and z_i -> (z_i - 1)/2, projectivized
    let mut rows1: Vec<Vec<(i64, usize)>> = (0..n).map(|i| vec![(1, i), (1, n)]).collect();
    rows1.push(vec![(1, n)]);
    let mut rows2: Vec<Vec<(i64, usize)>> = (0..n).map(|i| vec![(1, i), (-1, n)]).collect();
    rows2.push(vec![(2, n)]);
    (linear(n, field, &rows1), linear(n, field, &rows2))
}

fn psi_decomposed(n: usize, field: FieldDescriptor) -> Result<NamedConstruction, BuildError> {
    let (a1, a2) = psi_letters(n, field);
    let mut alphabet = Alphabet::new(n, field);
    alphabet.register("a1", a1.to_rat_map())?;
    alphabet.register("a2", a2.to_rat_map())?;
    alphabet.register("s", standard_involution(n, field))?;
    let word = GroupWord::parse("a1 s a2")?;
    NamedConstruction::with_word("psi", n, psi(n, field), alphabet, word)
}

/// `-id` in the chart `z_n = 1`: projectively `(z0 : ... : z_{n-1} : -z_n)`.
pub fn neg_id(n: usize, field: FieldDescriptor) -> LinearMap {
    let mut rows: Vec<Vec<(i64, usize)>> = (0..n).map(|i| vec![(1, i)]).collect();
    rows.push(vec![(-1, n)]);
    linear(n, field, &rows)
}

/// The degree-2 Jonquieres map `(z0 z_n + z1^2 : z1 z_n : ... : z_{n-1} z_n : z_n^2)`.
pub fn tame_quadratic(n: usize, field: FieldDescriptor) -> RatMap {
    let size = n + 1;
    let one = FieldElem::one(field);
    let mut first = HomPoly::zero(size, field);
    let mut e = vec![0u32; size];
    e[0] = 1;
    e[n] = 1;
    first = first.add(&HomPoly::monomial(size, one.clone(), &e)).unwrap();
    let mut e = vec![0u32; size];
    e[1] = 2;
    first = first.add(&HomPoly::monomial(size, one.clone(), &e)).unwrap();
    let mut comps = vec![first];
    for i in 1..n {
        let mut e = vec![0u32; size];
        e[i] = 1;
        e[n] = 1;
        comps.push(HomPoly::monomial(size, one.clone(), &e));
    }
    let mut e = vec![0u32; size];
    e[n] = 2;
    comps.push(HomPoly::monomial(size, one, &e));
    RatMap::new_normalized(comps).expect("tame quadratic is well formed")
}

/// The four linear letters of the tame-quadratic decomposition.
pub fn tame_letters(
    n: usize,
    field: FieldDescriptor,
) -> (LinearMap, LinearMap, LinearMap, LinearMap) {
    // g1 = (z2-z1+z0 : 2z1-z0 : z3 : ... : zn : z1-z0)
    let mut rows1: Vec<Vec<(i64, usize)>> = vec![vec![(1, 2), (-1, 1), (1, 0)], vec![(2, 1), (-1, 0)]];
    rows1.extend((3..=n).map(|j| vec![(1, j)]));
    rows1.push(vec![(1, 1), (-1, 0)]);
    // g2 = (z0+z2 : z0 : z1 : z3 : ... : zn)
    let mut rows2: Vec<Vec<(i64, usize)>> = vec![vec![(1, 0), (1, 2)], vec![(1, 0)], vec![(1, 1)]];
    rows2.extend((3..=n).map(|j| vec![(1, j)]));
    // g3 = (-z1 : z0+z2-3z1 : z0 : z3 : ... : zn)
    let mut rows3: Vec<Vec<(i64, usize)>> =
        vec![vec![(-1, 1)], vec![(1, 0), (1, 2), (-3, 1)], vec![(1, 0)]];
    rows3.extend((3..=n).map(|j| vec![(1, j)]));
    // g4 = (z1-zn : -2zn-z0 : 2zn-z1 : -z2 : ... : -z_{n-1})
    let mut rows4: Vec<Vec<(i64, usize)>> = vec![
        vec![(1, 1), (-1, n)],
        vec![(-2, n), (-1, 0)],
        vec![(2, n), (-1, 1)],
    ];
    rows4.extend((3..=n).map(|j| vec![(-1, j - 1)]));
    (
        linear(n, field, &rows1),
        linear(n, field, &rows2),
        linear(n, field, &rows3),
        linear(n, field, &rows4),
    )
}

fn tame_decomposed(n: usize, field: FieldDescriptor) -> Result<NamedConstruction, BuildError> {
    let (g1, g2, g3, g4) = tame_letters(n, field);
    let mut alphabet = Alphabet::new(n, field);
    alphabet.register("g1", g1.to_rat_map())?;
    alphabet.register("g2", g2.to_rat_map())?;
    alphabet.register("g3", g3.to_rat_map())?;
    alphabet.register("g4", g4.to_rat_map())?;
    alphabet.register("s", standard_involution(n, field))?;
    let word = GroupWord::parse("g1 s g2 s g3 s g2 s g4")?;
    NamedConstruction::with_word("tame_quadratic", n, tame_quadratic(n, field), alphabet, word)
}

/// The transposition of `z_i` and `z_{n-1}` (fixing the chart variable).
pub fn tau(n: usize, i: usize, field: FieldDescriptor) -> Result<LinearMap, BuildError> {
    if i >= n - 1 {
        return Err(BuildError::MissingParam {
            name: "tau".into(),
            param: format!("index i < n-1 (got {i})"),
        });
    }
    let mut perm: Vec<usize> = (0..=n).collect();
    perm.swap(i, n - 1);
    Ok(LinearMap::permutation(field, &perm))
}

/// The degree-2 involution inverting the last chart coordinate:
/// `(z0, ..., z_{n-2}, 1/z_{n-1})` in the chart `z_n = 1`.
pub fn eta(n: usize, field: FieldDescriptor) -> RatMap {
    let mut comps: Vec<(MultiPoly, MultiPoly)> = (0..n - 1)
        .map(|i| {
            (
                MultiPoly::variable(n, field, i),
                MultiPoly::one(n, field),
            )
        })
        .collect();
    comps.push((MultiPoly::one(n, field), MultiPoly::variable(n, field, n - 1)));
    RatMap::from_affine_chart(&comps).expect("eta is well formed")
}

/// The linear map `(z0 : z0-z1 : ... : z0-z_n)` (the homogenization of the
/// affine h_n of the duality argument); an involution.
pub fn h_n(n: usize, field: FieldDescriptor) -> LinearMap {
    let mut rows: Vec<Vec<(i64, usize)>> = vec![vec![(1, 0)]];
    rows.extend((1..=n).map(|j| vec![(1, 0), (-1, j)]));
    linear(n, field, &rows)
}

/// Projective diagonal map from n+1 nonzero entries.
pub fn diag(alpha: &[FieldElem]) -> Result<LinearMap, BuildError> {
    Ok(LinearMap::diagonal(alpha)?)
}

/// Chart-style diagonal `(a_0 z_0, ..., a_{n-1} z_{n-1})`: the projective
/// diagonal with a trailing 1.
pub fn diag_affine(alpha: &[FieldElem]) -> Result<LinearMap, BuildError> {
    let field = alpha[0].descriptor();
    let mut entries = alpha.to_vec();
    entries.push(FieldElem::one(field));
    Ok(LinearMap::diagonal(&entries)?)
}

/// Scalar multiplication by the primitive p-th root on all chart
/// coordinates, over `Q(zeta_p)`.
pub fn g_p(n: usize, p: u32) -> Result<LinearMap, BuildError> {
    let field = FieldDescriptor::cyclotomic(p)?;
    let zeta = FieldElem::root_of_unity(field)?;
    let mut entries = vec![zeta; n];
    entries.push(FieldElem::one(field));
    Ok(LinearMap::diagonal(&entries)?)
}

/// Same but fixing the last chart coordinate.
pub fn h_p(n: usize, p: u32) -> Result<LinearMap, BuildError> {
    let field = FieldDescriptor::cyclotomic(p)?;
    let zeta = FieldElem::root_of_unity(field)?;
    let mut entries = vec![zeta; n - 1];
    entries.push(FieldElem::one(field));
    entries.push(FieldElem::one(field));
    Ok(LinearMap::diagonal(&entries)?)
}

/// The translation `(z0 : z1+z_n : ... : z_{n-1}+z_n : z_n)` realized below
/// as a commutator of linear maps.
pub fn translation_t(n: usize, field: FieldDescriptor) -> LinearMap {
    let mut rows: Vec<Vec<(i64, usize)>> = vec![vec![(1, 0)]];
    rows.extend((1..n).map(|i| vec![(1, i), (1, n)]));
    rows.push(vec![(1, n)]);
    linear(n, field, &rows)
}

/// The pair `(a, b)` with `t = [a, b]`.
pub fn translation_commutator_pair(n: usize, field: FieldDescriptor) -> (LinearMap, LinearMap) {
    let mut rows_a: Vec<Vec<(i64, usize)>> = vec![vec![(1, 0)]];
    rows_a.extend((1..n).map(|i| vec![(3, i)]));
    rows_a.push(vec![(1, n)]);
    let mut rows_b: Vec<Vec<(i64, usize)>> = vec![vec![(2, 0)]];
    rows_b.extend((1..n).map(|i| vec![(1, i), (1, n)]));
    rows_b.push(vec![(2, n)]);
    (linear(n, field, &rows_a), linear(n, field, &rows_b))
}

/// A member of the subgroup `H`: chart map
/// `(a_0 z_0 z_{n-1}^k, ..., a_{n-2} z_{n-2} z_{n-1}^k, a_{n-1} z_{n-1})`
/// for integer k; k = 1 with unit scalars is `varsigma`.
pub fn h_subgroup(
    n: usize,
    alpha: &[FieldElem],
    k: i64,
) -> Result<RatMap, BuildError> {
    let field = alpha[0].descriptor();
    if alpha.len() != n {
        return Err(BuildError::MissingParam {
            name: "h_subgroup".into(),
            param: format!("alpha with {n} entries"),
        });
    }
    let last = MultiPoly::variable(n, field, n - 1);
    let power = last.pow(k.unsigned_abs() as u32);
    let mut comps: Vec<(MultiPoly, MultiPoly)> = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let base = MultiPoly::variable(n, field, i).scale(&alpha[i]);
        if k >= 0 {
            comps.push((base.mul(&power), MultiPoly::one(n, field)));
        } else {
            comps.push((base, power.clone()));
        }
    }
    comps.push((last.scale(&alpha[n - 1]), MultiPoly::one(n, field)));
    Ok(RatMap::from_affine_chart(&comps)?)
}

/// A pencil-preserving automorphism
/// `(a z0 + b z1 : c z0 + d z1 : z2 : ... : zn)`.
pub fn pencil_generator(
    n: usize,
    field: FieldDescriptor,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
) -> Result<LinearMap, BuildError> {
    let mut rows: Vec<Vec<(i64, usize)>> = vec![vec![(a, 0), (b, 1)], vec![(c, 0), (d, 1)]];
    rows.extend((2..=n).map(|j| vec![(1, j)]));
    let size = n + 1;
    let mat = rows.iter().map(|r| row(size, field, r)).collect();
    Ok(LinearMap::new(mat)?)
}

fn check_dimension(name: &str, n: usize, min: usize) -> Result<(), BuildError> {
    if n < min || n > DEFAULT_MAX_N {
        return Err(BuildError::UnsupportedDimension {
            name: name.to_string(),
            n,
            min,
            max: DEFAULT_MAX_N,
        });
    }
    Ok(())
}

/// Builds a cataloged construction by name.
pub fn build(
    name: &str,
    n: usize,
    params: &Params,
    field: FieldDescriptor,
) -> Result<NamedConstruction, BuildError> {
    let need_alpha = |what: &str| -> Result<Vec<FieldElem>, BuildError> {
        params.alpha.clone().ok_or_else(|| BuildError::MissingParam {
            name: name.to_string(),
            param: what.to_string(),
        })
    };
    match name {
        "sigma" => {
            check_dimension(name, n, 2)?;
            Ok(NamedConstruction::plain(name, n, standard_involution(n, field)))
        }
        "varsigma" => {
            check_dimension(name, n, 2)?;
            varsigma_decomposed(n, field)
        }
        "psi" => {
            check_dimension(name, n, 2)?;
            psi_decomposed(n, field)
        }
        "neg_id" => {
            check_dimension(name, n, 2)?;
            Ok(NamedConstruction::plain(name, n, neg_id(n, field).to_rat_map()))
        }
        "tame_quadratic" => {
            check_dimension(name, n, 3)?;
            tame_decomposed(n, field)
        }
        "tau" => {
            check_dimension(name, n, 2)?;
            let i = params.index.ok_or_else(|| BuildError::MissingParam {
                name: name.to_string(),
                param: "index".into(),
            })?;
            Ok(NamedConstruction::plain(name, n, tau(n, i, field)?.to_rat_map()))
        }
        "eta" => {
            check_dimension(name, n, 2)?;
            Ok(NamedConstruction::plain(name, n, eta(n, field)))
        }
        "h_n" => {
            check_dimension(name, n, 2)?;
            Ok(NamedConstruction::plain(name, n, h_n(n, field).to_rat_map()))
        }
        "d_alpha" => {
            check_dimension(name, n, 2)?;
            let alpha = need_alpha("alpha (n+1 nonzero scalars)")?;
            Ok(NamedConstruction::plain(name, n, diag(&alpha)?.to_rat_map()))
        }
        "g_p" => {
            check_dimension(name, n, 2)?;
            let p = params.prime.ok_or_else(|| BuildError::MissingParam {
                name: name.to_string(),
                param: "prime".into(),
            })?;
            Ok(NamedConstruction::plain(name, n, g_p(n, p)?.to_rat_map()))
        }
        "h_p" => {
            check_dimension(name, n, 2)?;
            let p = params.prime.ok_or_else(|| BuildError::MissingParam {
                name: name.to_string(),
                param: "prime".into(),
            })?;
            Ok(NamedConstruction::plain(name, n, h_p(n, p)?.to_rat_map()))
        }
        "t" => {
            check_dimension(name, n, 2)?;
            Ok(NamedConstruction::plain(name, n, translation_t(n, field).to_rat_map()))
        }
        "h_subgroup" => {
            check_dimension(name, n, 2)?;
            let alpha = need_alpha("alpha (n nonzero scalars)")?;
            let k = params.exponent.unwrap_or(1);
            Ok(NamedConstruction::plain(name, n, h_subgroup(n, &alpha, k)?))
        }
        other => Err(BuildError::UnknownName(other.to_string())),
    }
}

/// The identity registry; every entry is an exact symbolic check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Identity {
    SigmaInvolution,
    VarsigmaDecomposition,
    PsiDecompositionAndConjugacy,
    TameDecomposition,
    DiagSigmaRelation,
    EtaDiagRelation,
    SigmaTauEtaProduct,
    HnSigmaOrderThree,
    HnDualSigmaNotOrderThree,
    TranslationCommutator,
    BirkhoffTriple,
}

impl Identity {
    pub const ALL: [Identity; 11] = [
        Identity::SigmaInvolution,
        Identity::VarsigmaDecomposition,
        Identity::PsiDecompositionAndConjugacy,
        Identity::TameDecomposition,
        Identity::DiagSigmaRelation,
        Identity::EtaDiagRelation,
        Identity::SigmaTauEtaProduct,
        Identity::HnSigmaOrderThree,
        Identity::HnDualSigmaNotOrderThree,
        Identity::TranslationCommutator,
        Identity::BirkhoffTriple,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::SigmaInvolution => "sigma_involution",
            Identity::VarsigmaDecomposition => "varsigma_decomposition",
            Identity::PsiDecompositionAndConjugacy => "psi_decomposition_and_conjugacy",
            Identity::TameDecomposition => "tame_decomposition",
            Identity::DiagSigmaRelation => "diag_sigma_relation",
            Identity::EtaDiagRelation => "eta_diag_relation",
            Identity::SigmaTauEtaProduct => "sigma_tau_eta_product",
            Identity::HnSigmaOrderThree => "hn_sigma_order_three",
            Identity::HnDualSigmaNotOrderThree => "hn_dual_sigma_not_order_three",
            Identity::TranslationCommutator => "translation_commutator",
            Identity::BirkhoffTriple => "birkhoff_triple",
        }
    }

    pub fn parse(s: &str) -> Result<Identity, BuildError> {
        Identity::ALL
            .iter()
            .copied()
            .find(|i| i.name() == s)
            .ok_or_else(|| BuildError::UnknownIdentity(s.to_string()))
    }

    /// Smallest dimension the check is defined for.
    pub fn min_dimension(&self) -> usize {
        match self {
            Identity::TameDecomposition => 3,
            Identity::SigmaTauEtaProduct => 2,
            _ => 2,
        }
    }

    /// Whether the check needs a prime parameter.
    pub fn needs_prime(&self) -> bool {
        matches!(self, Identity::BirkhoffTriple)
    }
}

/// Options shared by the registry checks.
#[derive(Clone, Debug)]
pub struct VerifyOpts {
    pub seed: u64,
    /// number of random diagonals for the sampled relations
    pub samples: usize,
    pub prime: Option<u32>,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts { seed: 0, samples: 20, prime: None }
    }
}

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub n: usize,
    pub params: serde_json::Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckOutcome {
    fn pass(check: &str, n: usize, params: serde_json::Value) -> Self {
        CheckOutcome {
            check: check.to_string(),
            n,
            params,
            pass: true,
            millis: None,
            witness: None,
            note: None,
        }
    }

    fn fail(check: &str, n: usize, params: serde_json::Value, witness: Vec<String>) -> Self {
        CheckOutcome {
            check: check.to_string(),
            n,
            params,
            pass: false,
            millis: None,
            witness: Some(witness),
            note: None,
        }
    }
}

fn equality_outcome(
    check: &str,
    n: usize,
    params: serde_json::Value,
    lhs: &RatMap,
    rhs: &RatMap,
    label: &str,
) -> CheckOutcome {
    if lhs.equals(rhs) {
        CheckOutcome::pass(check, n, params)
    } else {
        CheckOutcome::fail(
            check,
            n,
            params,
            vec![format!("{label}: left = {lhs}"), format!("{label}: right = {rhs}")],
        )
    }
}

fn random_diag_entries(
    count: usize,
    field: FieldDescriptor,
    rng: &mut ChaCha8Rng,
) -> Vec<FieldElem> {
    (0..count).map(|_| sample_nonzero(field, rng)).collect()
}

/// Runs one registry identity at dimension n.
pub fn verify_identity(
    id: Identity,
    n: usize,
    opts: &VerifyOpts,
) -> Result<CheckOutcome, BuildError> {
    let field = FieldDescriptor::Rationals;
    check_dimension(id.name(), n, id.min_dimension())?;
    let check = id.name();
    let start = std::time::Instant::now();
    let mut outcome = match id {
        Identity::SigmaInvolution => {
            let sigma = standard_involution(n, field);
            let square = sigma.compose(&sigma)?;
            let id_map = RatMap::identity(n, field);
            equality_outcome(check, n, json!({}), &square, &id_map, "sigma∘sigma")
        }
        Identity::VarsigmaDecomposition => {
            let c = varsigma_decomposed(n, field)?;
            let (alphabet, word) = c.decomposition.as_ref().unwrap();
            let value = evaluate(word, alphabet)?;
            let mut out = equality_outcome(check, n, json!({}), &value, &c.map, "a1 s a2 s a3");
            if out.pass && c.map.degree() != 2 {
                out = CheckOutcome::fail(
                    check,
                    n,
                    json!({}),
                    vec![format!("deg varsigma = {} (expected 2)", c.map.degree())],
                );
            }
            out
        }
        Identity::PsiDecompositionAndConjugacy => {
            let c = psi_decomposed(n, field)?;
            let (alphabet, word) = c.decomposition.as_ref().unwrap();
            let value = evaluate(word, alphabet)?;
            let mut out = equality_outcome(check, n, json!({}), &value, &c.map, "a1 s a2");
            if out.pass {
                let psi_pair = BirationalPair::involution(c.map.clone())?;
                let conj = conjugate(&neg_id(n, field).to_rat_map(), &psi_pair)?;
                let sigma = standard_involution(n, field);
                out = equality_outcome(check, n, json!({}), &conj, &sigma, "psi∘(-id)∘psi^-1");
            }
            out
        }
        Identity::TameDecomposition => {
            let c = tame_decomposed(n, field)?;
            let (alphabet, word) = c.decomposition.as_ref().unwrap();
            let value = evaluate(word, alphabet)?;
            equality_outcome(check, n, json!({}), &value, &c.map, "g1 s g2 s g3 s g2 s g4")
        }
        Identity::DiagSigmaRelation => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(n as u64));
            let sigma = standard_involution(n, field);
            let params = json!({"samples": opts.samples, "seed": opts.seed});
            let mut failing = None;
            for _ in 0..opts.samples {
                let alpha = random_diag_entries(n + 1, field, &mut rng);
                let d = diag(&alpha)?;
                let d_pair = BirationalPair::from_linear(&d);
                let lhs = conjugate(&sigma, &d_pair)?;
                let mid = d.compose(&d).to_rat_map().compose(&sigma)?;
                let rhs = sigma.compose(&d.inverse().compose(&d.inverse()).to_rat_map())?;
                if !(lhs.equals(&mid) && mid.equals(&rhs)) {
                    failing = Some(vec![
                        format!("alpha = {:?}", alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>()),
                        format!("d s d^-1   = {lhs}"),
                        format!("d^2 s      = {mid}"),
                        format!("s d^-2     = {rhs}"),
                    ]);
                    break;
                }
            }
            match failing {
                None => CheckOutcome::pass(check, n, params),
                Some(w) => CheckOutcome::fail(check, n, params, w),
            }
        }
        Identity::EtaDiagRelation => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(n as u64));
            let eta_map = eta(n, field);
            let params = json!({"samples": opts.samples, "seed": opts.seed});
            let mut failing = None;
            for _ in 0..opts.samples {
                let alpha = random_diag_entries(n, field, &mut rng);
                let mut beta = alpha.clone();
                beta[n - 1] = beta[n - 1].inv().expect("nonzero entries");
                let d_alpha = diag_affine(&alpha)?;
                let d_beta = diag_affine(&beta)?;
                let lhs = d_beta.to_rat_map().compose(&eta_map)?;
                let rhs = eta_map.compose(&d_alpha.to_rat_map())?;
                if !lhs.equals(&rhs) {
                    failing = Some(vec![
                        format!("alpha = {:?}", alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>()),
                        format!("d_beta eta = {lhs}"),
                        format!("eta d_alpha = {rhs}"),
                    ]);
                    break;
                }
            }
            match failing {
                None => CheckOutcome::pass(check, n, params),
                Some(w) => CheckOutcome::fail(check, n, params, w),
            }
        }
        Identity::SigmaTauEtaProduct => {
            let eta_map = eta(n, field);
            let mut product = RatMap::identity(n, field);
            for i in 0..n - 1 {
                let tau_i = tau(n, i, field)?.to_rat_map();
                product = product.compose(&tau_i)?.compose(&eta_map)?.compose(&tau_i)?;
            }
            product = product.compose(&eta_map)?;
            let sigma = standard_involution(n, field);
            equality_outcome(check, n, json!({}), &product, &sigma, "(tau_i eta tau_i)... eta")
        }
        Identity::HnSigmaOrderThree => {
            let h = h_n(n, field).to_rat_map();
            let sigma = standard_involution(n, field);
            let cube = h.compose(&sigma)?.pow(3)?;
            let id_map = RatMap::identity(n, field);
            equality_outcome(check, n, json!({}), &cube, &id_map, "(h_n sigma)^3")
        }
        Identity::HnDualSigmaNotOrderThree => {
            let h_dual = h_n(n, field).dual().to_rat_map();
            let sigma = standard_involution(n, field);
            let cube = h_dual.compose(&sigma)?.pow(3)?;
            let id_map = RatMap::identity(n, field);
            if cube.equals(&id_map) {
                CheckOutcome::fail(
                    check,
                    n,
                    json!({}),
                    vec!["(h_n^dual sigma)^3 unexpectedly equals the identity".into()],
                )
            } else {
                CheckOutcome::pass(check, n, json!({}))
            }
        }
        Identity::TranslationCommutator => {
            let (a, b) = translation_commutator_pair(n, field);
            let value = commutator(
                &BirationalPair::from_linear(&a),
                &BirationalPair::from_linear(&b),
            )?;
            let t = translation_t(n, field).to_rat_map();
            equality_outcome(check, n, json!({}), &value, &t, "[a, b]")
        }
        Identity::BirkhoffTriple => {
            let p = opts.prime.ok_or_else(|| BuildError::MissingParam {
                name: check.to_string(),
                param: "prime".into(),
            })?;
            let cyc = FieldDescriptor::cyclotomic(p)?;
            let c = varsigma_decomposed(n, cyc)?;
            let (alphabet, word) = c.decomposition.as_ref().unwrap();
            let varsigma_pair = BirationalPair::from_word(word, alphabet)?;
            let g = BirationalPair::from_linear(&g_p(n, p)?);
            let h = BirationalPair::from_linear(&h_p(n, p)?);
            let report = birkhoff_check(&varsigma_pair, &g, &h, p)?;
            let params = json!({"p": p});
            let mut out = if report.all_hold() {
                CheckOutcome::pass(check, n, params)
            } else {
                CheckOutcome::fail(check, n, params, vec![format!("{report:?}")])
            };
            // the paper's commutation statement names an undefined map phi;
            // the check reads it as varsigma and says so
            out.note = Some("commutation tested against varsigma".into());
            out
        }
    };
    outcome.millis = Some(start.elapsed().as_millis() as u64);
    Ok(outcome)
}

/// Runs every identity defined at each requested dimension, in
/// deterministic order; Birkhoff runs once per requested prime.
pub fn verify_suite(ns: &[usize], opts: &VerifyOpts, primes: &[u32]) -> Vec<CheckOutcome> {
    let mut dims: Vec<usize> = ns.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let mut out = Vec::new();
    for id in Identity::ALL {
        for &n in &dims {
            if n < id.min_dimension() || n > DEFAULT_MAX_N {
                continue;
            }
            if id.needs_prime() {
                for &p in primes {
                    let mut o = opts.clone();
                    o.prime = Some(p);
                    match verify_identity(id, n, &o) {
                        Ok(outcome) => out.push(outcome),
                        Err(err) => out.push(CheckOutcome::fail(
                            id.name(),
                            n,
                            json!({"p": p}),
                            vec![format!("error: {err}")],
                        )),
                    }
                }
            } else {
                match verify_identity(id, n, opts) {
                    Ok(outcome) => out.push(outcome),
                    Err(err) => out.push(CheckOutcome::fail(
                        id.name(),
                        n,
                        json!({}),
                        vec![format!("error: {err}")],
                    )),
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    #[test]
    fn sigma_formula_matches() {
        let c = build("sigma", 3, &Params::default(), Q).unwrap();
        let expected = RatMap::new_normalized(
            ["z1*z2*z3", "z0*z2*z3", "z0*z1*z3", "z0*z1*z2"]
                .iter()
                .map(|t| crate::poly::parse_poly(t, 4, Q).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(c.map.equals(&expected));
        assert_eq!(c.map.degree(), 3);
    }

    #[test]
    fn varsigma_formula_matches() {
        let c = build("varsigma", 4, &Params::default(), Q).unwrap();
        let expected = RatMap::new_normalized(
            ["z0*z3", "z1*z3", "z2*z3", "z3*z4", "z4^2"]
                .iter()
                .map(|t| crate::poly::parse_poly(t, 5, Q).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(c.map.equals(&expected));
        assert_eq!(c.map.degree(), 2);
    }

    #[test]
    fn tau_swaps_coordinates() {
        let c = build("tau", 3, &Params { index: Some(0), ..Params::default() }, Q).unwrap();
        let p = crate::ratmap::ProjPoint::from_ints(Q, &[1, 2, 3, 4]).unwrap();
        let q = c.map.apply_point(&p).unwrap();
        let expected = crate::ratmap::ProjPoint::from_ints(Q, &[3, 2, 1, 4]).unwrap();
        assert_eq!(q, expected);
    }

    #[test]
    fn catalog_degrees() {
        for n in 2..=4 {
            assert_eq!(standard_involution(n, Q).degree(), n);
            assert_eq!(varsigma(n, Q).degree(), 2);
            assert_eq!(eta(n, Q).degree(), 2);
            assert_eq!(h_n(n, Q).to_rat_map().degree(), 1);
        }
    }

    #[test]
    fn involutions() {
        for n in 2..=3 {
            for (name, m) in [
                ("psi", psi(n, Q)),
                ("eta", eta(n, Q)),
                ("sigma", standard_involution(n, Q)),
                ("h_n", h_n(n, Q).to_rat_map()),
                ("neg_id", neg_id(n, Q).to_rat_map()),
            ] {
                assert!(
                    m.compose(&m).unwrap().is_identity(),
                    "{name} at n = {n} is an involution"
                );
            }
        }
    }

    #[test]
    fn h_subgroup_with_unit_scalars_is_varsigma() {
        for n in 2..=4 {
            let alpha = vec![FieldElem::one(Q); n];
            let h = h_subgroup(n, &alpha, 1).unwrap();
            assert!(h.equals(&varsigma(n, Q)));
        }
    }

    #[test]
    fn h_subgroup_negative_exponent() {
        let alpha = vec![FieldElem::one(Q); 3];
        let h = h_subgroup(3, &alpha, -2).unwrap();
        // chart restriction sends z0 to z0 / z2^2
        let chart = h.restrict_to_chart();
        let (num, den) = &chart[0];
        let z0 = MultiPoly::variable(3, Q, 0);
        let z2sq = MultiPoly::variable(3, Q, 2).pow(2);
        assert_eq!(num.mul(&z2sq), z0.mul(den));
    }

    #[test]
    fn registry_passes_at_small_n() {
        let opts = VerifyOpts { samples: 3, ..VerifyOpts::default() };
        for id in [
            Identity::SigmaInvolution,
            Identity::VarsigmaDecomposition,
            Identity::PsiDecompositionAndConjugacy,
            Identity::DiagSigmaRelation,
            Identity::EtaDiagRelation,
            Identity::SigmaTauEtaProduct,
            Identity::HnSigmaOrderThree,
            Identity::HnDualSigmaNotOrderThree,
            Identity::TranslationCommutator,
        ] {
            let outcome = verify_identity(id, 2, &opts).unwrap();
            assert!(outcome.pass, "{} fails at n = 2: {:?}", id.name(), outcome.witness);
        }
        let outcome = verify_identity(Identity::TameDecomposition, 3, &opts).unwrap();
        assert!(outcome.pass, "tame fails at n = 3: {:?}", outcome.witness);
    }

    #[test]
    fn birkhoff_triple_small() {
        let opts = VerifyOpts { prime: Some(3), ..VerifyOpts::default() };
        let outcome = verify_identity(Identity::BirkhoffTriple, 2, &opts).unwrap();
        assert!(outcome.pass, "witness: {:?}", outcome.witness);
        assert!(outcome.note.is_some());
    }

    #[test]
    fn suite_is_deterministic_and_ordered() {
        let opts = VerifyOpts::default();
        let a = verify_suite(&[2], &opts, &[3]);
        let b = verify_suite(&[2], &opts, &[3]);
        let strip = |v: &[CheckOutcome]| -> Vec<String> {
            v.iter()
                .map(|o| {
                    let mut c = o.clone();
                    c.millis = None;
                    serde_json::to_string(&c).unwrap()
                })
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
        assert!(a.iter().all(|o| o.pass));
    }

    #[test]
    fn unsupported_dimension_reported() {
        assert!(matches!(
            build("sigma", 1, &Params::default(), Q),
            Err(BuildError::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            build("nonsense", 3, &Params::default(), Q),
            Err(BuildError::UnknownName(_))
        ));
    }
}
