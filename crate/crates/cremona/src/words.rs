//! Words over a named generator alphabet with formal inverses: free
//! reduction, evaluation to rational maps, conjugates and commutators, the
//! Birkhoff-relation checker, and the rewriting of a word into a product of
//! conjugates of the standard involution.
//!
//! Conventions, fixed once for the whole crate: `compose(f, g)` acts as
//! `z -> f(g(z))`, a word evaluates left to right with its leftmost letter
//! outermost, the commutator is `[f, g] = f g f^-1 g^-1`, and
//! `conjugate(f, by) = by f by^-1`.

use crate::field::{FieldDescriptor, FieldElem};
use crate::ratmap::{standard_involution, LinearMap, MapError, RatMap};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("generator {0:?} is already registered")]
    DuplicateGenerator(String),
    #[error("generator {name:?} needs an explicit inverse: {reason}")]
    InverseUnavailable { name: String, reason: String },
    #[error("maps are not mutually inverse")]
    NotMutuallyInverse,
    #[error("generator dimension {0} does not match alphabet dimension {1}")]
    WrongDimension(usize, usize),
    #[error("word syntax error at token {0}: {1}")]
    WordSyntax(usize, String),
    #[error("{field} contains no primitive {p}-th root of unity")]
    MissingRootOfUnity { field: FieldDescriptor, p: u32 },
    #[error("conjugate-product rewriting unsupported: {0}")]
    RewriteUnsupported(String),
    #[error("conjugate-product rewrite failed its symbolic re-verification")]
    RewriteVerificationFailed,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A named generator together with its inverse map.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub map: RatMap,
    pub inverse: RatMap,
    /// true when map == inverse, which lets reduction cancel repeats
    pub involutive: bool,
}

/// An immutable-after-registration set of generators over one P^n.
#[derive(Clone, Debug)]
pub struct Alphabet {
    n: usize,
    field: FieldDescriptor,
    gens: BTreeMap<String, Generator>,
}

impl Alphabet {
    pub fn new(n: usize, field: FieldDescriptor) -> Self {
        Alphabet { n, field, gens: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    /// Registers a generator, deriving the inverse automatically: linear
    /// maps are inverted through their matrix, and involutions (such as the
    /// standard involution) are their own inverse. Anything else needs
    /// [`register_with_inverse`](Self::register_with_inverse).
    pub fn register(&mut self, name: &str, map: RatMap) -> Result<(), WordError> {
        let inverse = if map.degree() == 1 {
            LinearMap::from_rat_map(&map)?.inverse().to_rat_map()
        } else if map.compose(&map).map(|m| m.is_identity()).unwrap_or(false) {
            map.clone()
        } else {
            return Err(WordError::InverseUnavailable {
                name: name.to_string(),
                reason: "not linear and not an involution".into(),
            });
        };
        self.register_with_inverse(name, map, inverse)
    }

    /// Registers a generator with an explicit inverse; both compositions
    /// are verified to be the identity.
    pub fn register_with_inverse(
        &mut self,
        name: &str,
        map: RatMap,
        inverse: RatMap,
    ) -> Result<(), WordError> {
        if map.n() != self.n {
            return Err(WordError::WrongDimension(map.n(), self.n));
        }
        if self.gens.contains_key(name) {
            return Err(WordError::DuplicateGenerator(name.to_string()));
        }
        if !map.compose(&inverse)?.is_identity() || !inverse.compose(&map)?.is_identity() {
            return Err(WordError::NotMutuallyInverse);
        }
        let involutive = map == inverse;
        self.gens.insert(
            name.to_string(),
            Generator { name: name.to_string(), map, inverse, involutive },
        );
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Generator, WordError> {
        self.gens
            .get(name)
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gens.keys().map(|s| s.as_str())
    }
}

/// One letter of a word: a generator name with exponent +1 or -1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Letter {
    pub name: String,
    pub exponent: i8,
}

/// A word over a generator alphabet with formal inverses.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { letters: Vec::new() }
    }

    pub fn from_names<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        GroupWord {
            letters: names
                .into_iter()
                .map(|n| Letter { name: n.into(), exponent: 1 })
                .collect(),
        }
    }

    pub fn push(&mut self, name: &str, exponent: i8) {
        assert!(exponent == 1 || exponent == -1);
        self.letters.push(Letter { name: name.to_string(), exponent });
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Whitespace-separated letters with an optional `^-1` suffix, e.g.
    /// `"a1 s a2 s a3"` or `"g s g^-1"`.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for (i, tok) in text.split_whitespace().enumerate() {
            let (name, exp) = match tok.strip_suffix("^-1") {
                Some(base) => (base, -1),
                None => match tok.strip_suffix("^1") {
                    Some(base) => (base, 1),
                    None => {
                        if tok.contains('^') {
                            return Err(WordError::WordSyntax(
                                i,
                                format!("bad exponent in {tok:?} (only ^-1 is allowed)"),
                            ));
                        }
                        (tok, 1)
                    }
                },
            };
            if name.is_empty() {
                return Err(WordError::WordSyntax(i, "empty letter".into()));
            }
            letters.push(Letter { name: name.to_string(), exponent: exp });
        }
        Ok(GroupWord { letters })
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        GroupWord { letters }
    }

    /// The formal inverse: reversed letters with flipped exponents.
    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter { name: l.name.clone(), exponent: -l.exponent })
                .collect(),
        }
    }

    /// Free reduction: cancels adjacent letter/inverse pairs, and adjacent
    /// repeats of involutive letters. Needs the alphabet to know which
    /// letters are involutive (and to reject unknown names).
    pub fn reduce(&self, alphabet: &Alphabet) -> Result<GroupWord, WordError> {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for letter in &self.letters {
            let gen = alphabet.get(&letter.name)?;
            let cancels = stack.last().is_some_and(|top| {
                top.name == letter.name
                    && (top.exponent == -letter.exponent || gen.involutive)
            });
            if cancels {
                stack.pop();
            } else {
                stack.push(letter.clone());
            }
        }
        Ok(GroupWord { letters: stack })
    }

    pub fn format(&self) -> String {
        self.letters
            .iter()
            .map(|l| {
                if l.exponent == 1 {
                    l.name.clone()
                } else {
                    format!("{}^-1", l.name)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format())
    }
}

/// Evaluates a word left to right (leftmost letter outermost); the empty
/// word is the identity.
pub fn evaluate(word: &GroupWord, alphabet: &Alphabet) -> Result<RatMap, WordError> {
    let mut acc = RatMap::identity(alphabet.n(), alphabet.field());
    for letter in word.letters() {
        let gen = alphabet.get(&letter.name)?;
        let m = if letter.exponent == 1 { &gen.map } else { &gen.inverse };
        acc = acc.compose(m)?;
    }
    Ok(acc)
}

/// A birational map paired with its verified inverse, so commutators and
/// conjugates stay constructive.
#[derive(Clone, Debug)]
pub struct BirationalPair {
    pub map: RatMap,
    pub inverse: RatMap,
}

impl BirationalPair {
    pub fn new(map: RatMap, inverse: RatMap) -> Result<Self, WordError> {
        if !map.compose(&inverse)?.is_identity() || !inverse.compose(&map)?.is_identity() {
            return Err(WordError::NotMutuallyInverse);
        }
        Ok(BirationalPair { map, inverse })
    }

    pub fn from_linear(m: &LinearMap) -> Self {
        BirationalPair {
            map: m.to_rat_map(),
            inverse: m.inverse().to_rat_map(),
        }
    }

    pub fn involution(map: RatMap) -> Result<Self, WordError> {
        Self::new(map.clone(), map)
    }

    /// Evaluates a word and its formal inverse.
    pub fn from_word(word: &GroupWord, alphabet: &Alphabet) -> Result<Self, WordError> {
        Self::new(evaluate(word, alphabet)?, evaluate(&word.inverse(), alphabet)?)
    }

    pub fn swapped(&self) -> Self {
        BirationalPair { map: self.inverse.clone(), inverse: self.map.clone() }
    }
}

/// `[a, b] = a b a^-1 b^-1`.
pub fn commutator(a: &BirationalPair, b: &BirationalPair) -> Result<RatMap, WordError> {
    Ok(a.map
        .compose(&b.map)?
        .compose(&a.inverse)?
        .compose(&b.inverse)?)
}

/// `by f by^-1`.
pub fn conjugate(f: &RatMap, by: &BirationalPair) -> Result<RatMap, WordError> {
    Ok(by.map.compose(f)?.compose(&by.inverse)?)
}

/// Outcome of the Birkhoff-lemma relation check on a triple `(a, b, c)`.
#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffReport {
    pub p: u32,
    /// `[a, b] = c`
    pub commutator_is_c: bool,
    /// `[a, c] = id`
    pub a_commutes_with_c: bool,
    /// `[b, c] = id`
    pub b_commutes_with_c: bool,
    /// `c^p = id`
    pub c_has_order_dividing_p: bool,
}

impl BirkhoffReport {
    pub fn all_hold(&self) -> bool {
        self.commutator_is_c
            && self.a_commutes_with_c
            && self.b_commutes_with_c
            && self.c_has_order_dividing_p
    }
}

fn field_has_pth_root(field: FieldDescriptor, p: u32) -> bool {
    match field {
        FieldDescriptor::Rationals => false,
        FieldDescriptor::Cyclotomic(q) => q == p,
        FieldDescriptor::PrimeField(q) => (u64::from(q) - 1) % u64::from(p) == 0,
    }
}

/// Checks the relations `[a,b] = c`, `[a,c] = [b,c] = id`, `c^p = id`,
/// requiring the coefficient field to contain a primitive p-th root of
/// unity.
pub fn birkhoff_check(
    a: &BirationalPair,
    b: &BirationalPair,
    c: &BirationalPair,
    p: u32,
) -> Result<BirkhoffReport, WordError> {
    let field = a.map.field();
    if !field_has_pth_root(field, p) {
        return Err(WordError::MissingRootOfUnity { field, p });
    }
    let id = RatMap::identity(a.map.n(), field);
    Ok(BirkhoffReport {
        p,
        commutator_is_c: commutator(a, b)?.equals(&c.map),
        a_commutes_with_c: commutator(a, c)?.equals(&id),
        b_commutes_with_c: commutator(b, c)?.equals(&id),
        c_has_order_dividing_p: c.map.pow(p as usize)?.equals(&id),
    })
}

/// Per-generator factorizations into diagonalizable pieces, for rewriting
/// words whose linear letters are not diagonal: each piece is
/// `basis * diag * basis^-1`.
pub type RewriteHints = BTreeMap<String, Vec<(LinearMap, Vec<FieldElem>)>>;

enum RewriteLetter {
    Sigma,
    Diagonal(Vec<FieldElem>),
    Factored(Vec<(LinearMap, Vec<FieldElem>)>),
}

fn classify_letter(
    letter: &Letter,
    alphabet: &Alphabet,
    hints: &RewriteHints,
    sigma: &RatMap,
) -> Result<RewriteLetter, WordError> {
    let gen = alphabet.get(&letter.name)?;
    let map = if letter.exponent == 1 { &gen.map } else { &gen.inverse };
    if map.equals(sigma) {
        return Ok(RewriteLetter::Sigma);
    }
    if map.degree() != 1 {
        return Err(WordError::RewriteUnsupported(format!(
            "letter {:?} is neither linear nor the standard involution",
            letter.name
        )));
    }
    let linear = LinearMap::from_rat_map(map)?;
    if let Some(entries) = linear.diagonal_entries() {
        return Ok(RewriteLetter::Diagonal(entries));
    }
    let pieces = hints.get(&letter.name).ok_or_else(|| {
        WordError::RewriteUnsupported(format!(
            "letter {:?} is not diagonal and no diagonalizable factorization was supplied",
            letter.name
        ))
    })?;
    // verify the supplied factorization against the letter itself
    let mut product = LinearMap::identity(alphabet.n(), alphabet.field());
    for (basis, diag) in pieces {
        let d = LinearMap::diagonal(diag)?;
        product = product.compose(&basis.compose(&d).compose(&basis.inverse()));
    }
    let forward = LinearMap::from_rat_map(&gen.map)?;
    if product != forward {
        return Err(WordError::RewriteUnsupported(format!(
            "factorization supplied for {:?} does not multiply back to the letter",
            letter.name
        )));
    }
    let mut pieces = pieces.clone();
    if letter.exponent == -1 {
        pieces.reverse();
        for (_, diag) in pieces.iter_mut() {
            for e in diag.iter_mut() {
                *e = e.inv().expect("diagonal entries are units");
            }
        }
    }
    Ok(RewriteLetter::Factored(pieces))
}

/// Square roots of the diagonal after projective scaling by the first
/// entry; `None` when the field does not contain them.
fn projective_sqrt(entries: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let scale = entries[0].inv().expect("diagonal entries are units");
    entries.iter().map(|e| e.mul(&scale).sqrt()).collect()
}

fn is_projectively_trivial(entries: &[FieldElem]) -> bool {
    entries.iter().all(|e| e == &entries[0])
}

/// Rewrites `evaluate(word)` as a product of conjugates
/// `g_0 s g_0^-1 * g_1 s g_1^-1 * ...` of the standard involution `s`,
/// returning the conjugators. Supported letters: `s` itself, diagonal
/// linear maps, and linear maps that come with a diagonalizable
/// factorization in `hints`. The identity is re-verified symbolically
/// before returning.
pub fn conjugate_product_rewrite(
    word: &GroupWord,
    alphabet: &Alphabet,
    hints: &RewriteHints,
) -> Result<Vec<LinearMap>, WordError> {
    let n = alphabet.n();
    let field = alphabet.field();
    let sigma = standard_involution(n, field);
    let letters: Vec<RewriteLetter> = word
        .letters()
        .iter()
        .map(|l| classify_letter(l, alphabet, hints, &sigma))
        .collect::<Result<_, _>>()?;

    let all_plain = letters
        .iter()
        .all(|l| matches!(l, RewriteLetter::Sigma | RewriteLetter::Diagonal(_)));

    let conjugators: Vec<LinearMap> = if all_plain {
        // collapse to d * s^eps using s d = d^-1 s, then use
        // d_g s d_g^-1 = d_g^2 s to express the residue
        let mut diag: Vec<FieldElem> = vec![FieldElem::one(field); n + 1];
        let mut eps = false;
        for letter in &letters {
            match letter {
                RewriteLetter::Sigma => eps = !eps,
                RewriteLetter::Diagonal(entries) => {
                    for (d, e) in diag.iter_mut().zip(entries) {
                        let factor = if eps {
                            e.inv().expect("diagonal entries are units")
                        } else {
                            e.clone()
                        };
                        *d = d.mul(&factor);
                    }
                }
                RewriteLetter::Factored(_) => unreachable!(),
            }
        }
        let trivial = is_projectively_trivial(&diag);
        match (eps, trivial) {
            (true, true) => vec![LinearMap::identity(n, field)],
            (false, true) => Vec::new(),
            (eps, false) => {
                let roots = projective_sqrt(&diag).ok_or_else(|| {
                    WordError::RewriteUnsupported(
                        "diagonal residue has entries without square roots in the field".into(),
                    )
                })?;
                let g = LinearMap::diagonal(&roots)?;
                if eps {
                    vec![g]
                } else {
                    vec![g, LinearMap::identity(n, field)]
                }
            }
        }
    } else {
        // expand letter by letter; each diagonalizable piece u d_(g^2) u^-1
        // becomes (u d_g) s (u d_g)^-1 * u s u^-1
        let mut out = Vec::new();
        for letter in &letters {
            match letter {
                RewriteLetter::Sigma => out.push(LinearMap::identity(n, field)),
                RewriteLetter::Diagonal(entries) => {
                    if is_projectively_trivial(entries) {
                        continue;
                    }
                    let roots = projective_sqrt(entries).ok_or_else(|| {
                        WordError::RewriteUnsupported(
                            "diagonal letter has entries without square roots in the field".into(),
                        )
                    })?;
                    out.push(LinearMap::diagonal(&roots)?);
                    out.push(LinearMap::identity(n, field));
                }
                RewriteLetter::Factored(pieces) => {
                    for (basis, diag) in pieces {
                        if is_projectively_trivial(diag) {
                            continue;
                        }
                        let roots = projective_sqrt(diag).ok_or_else(|| {
                            WordError::RewriteUnsupported(
                                "diagonalized letter has eigenvalues without square roots in the field"
                                    .into(),
                            )
                        })?;
                        let root_diag = LinearMap::diagonal(&roots)?;
                        out.push(basis.compose(&root_diag));
                        out.push(basis.clone());
                    }
                }
            }
        }
        out
    };

    // mandatory symbolic re-verification
    let mut product = RatMap::identity(n, field);
    for g in &conjugators {
        let piece = g
            .to_rat_map()
            .compose(&sigma)?
            .compose(&g.inverse().to_rat_map())?;
        product = product.compose(&piece)?;
    }
    if !product.equals(&evaluate(word, alphabet)?) {
        return Err(WordError::RewriteVerificationFailed);
    }
    Ok(conjugators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_nonzero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    fn sigma_alphabet(n: usize) -> Alphabet {
        let mut a = Alphabet::new(n, Q);
        a.register("s", standard_involution(n, Q)).unwrap();
        a
    }

    #[test]
    fn reduction_examples() {
        let mut alphabet = sigma_alphabet(2);
        let g = LinearMap::from_int_rows(Q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        alphabet.register("g", g.to_rat_map()).unwrap();

        let w = GroupWord::parse("g g^-1 s").unwrap();
        assert_eq!(w.reduce(&alphabet).unwrap().format(), "s");

        let w = GroupWord::parse("s s").unwrap();
        assert!(w.reduce(&alphabet).unwrap().is_empty());

        let w = GroupWord::parse("g s g").unwrap();
        assert_eq!(w.reduce(&alphabet).unwrap(), w);
    }

    #[test]
    fn reduction_preserves_evaluation() {
        let mut alphabet = sigma_alphabet(2);
        let g = LinearMap::from_int_rows(Q, &[&[1, 2, 0], &[0, 1, 0], &[1, 0, 3]]).unwrap();
        alphabet.register("g", g.to_rat_map()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        use rand::Rng;
        for _ in 0..25 {
            let mut w = GroupWord::empty();
            for _ in 0..rng.gen_range(0..8) {
                let name = if rng.gen_bool(0.5) { "g" } else { "s" };
                let exp = if rng.gen_bool(0.5) { 1 } else { -1 };
                w.push(name, exp);
            }
            let reduced = w.reduce(&alphabet).unwrap();
            assert!(evaluate(&w, &alphabet)
                .unwrap()
                .equals(&evaluate(&reduced, &alphabet).unwrap()));
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism() {
        let mut alphabet = sigma_alphabet(2);
        let g = LinearMap::from_int_rows(Q, &[&[2, 1, 0], &[1, 1, 0], &[0, 0, 1]]).unwrap();
        alphabet.register("g", g.to_rat_map()).unwrap();
        let w1 = GroupWord::parse("g s").unwrap();
        let w2 = GroupWord::parse("s g^-1").unwrap();
        let direct = evaluate(&w1.concat(&w2), &alphabet).unwrap();
        let split = evaluate(&w1, &alphabet)
            .unwrap()
            .compose(&evaluate(&w2, &alphabet).unwrap())
            .unwrap();
        assert!(direct.equals(&split));
    }

    #[test]
    fn empty_word_is_identity() {
        let alphabet = sigma_alphabet(3);
        assert!(evaluate(&GroupWord::empty(), &alphabet).unwrap().is_identity());
    }

    #[test]
    fn unknown_generator_reported() {
        let alphabet = sigma_alphabet(2);
        let w = GroupWord::parse("nope").unwrap();
        assert!(matches!(
            evaluate(&w, &alphabet),
            Err(WordError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn commutator_of_map_with_itself() {
        let f = BirationalPair::involution(standard_involution(2, Q)).unwrap();
        assert!(commutator(&f, &f).unwrap().is_identity());
    }

    #[test]
    fn commutator_of_commuting_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let a: Vec<FieldElem> = (0..4).map(|_| sample_nonzero(Q, &mut rng)).collect();
            let b: Vec<FieldElem> = (0..4).map(|_| sample_nonzero(Q, &mut rng)).collect();
            let da = BirationalPair::from_linear(&LinearMap::diagonal(&a).unwrap());
            let db = BirationalPair::from_linear(&LinearMap::diagonal(&b).unwrap());
            assert!(commutator(&da, &db).unwrap().is_identity());
        }
    }

    #[test]
    fn birkhoff_needs_roots_of_unity() {
        let id = BirationalPair::involution(RatMap::identity(2, Q)).unwrap();
        let s = BirationalPair::involution(standard_involution(2, Q)).unwrap();
        assert!(matches!(
            birkhoff_check(&id, &id, &s, 3),
            Err(WordError::MissingRootOfUnity { .. })
        ));
    }

    #[test]
    fn birkhoff_order_failure_detected() {
        // over GF(7) there are cube roots of unity; sigma has order 2, not 3
        let gf = FieldDescriptor::prime_field(7).unwrap();
        let id = BirationalPair::involution(RatMap::identity(2, gf)).unwrap();
        let s = BirationalPair::involution(standard_involution(2, gf)).unwrap();
        let report = birkhoff_check(&id, &id, &s, 3).unwrap();
        assert!(!report.c_has_order_dividing_p);
        assert!(!report.commutator_is_c);
        assert!(report.a_commutes_with_c);
        assert!(!report.all_hold());
    }

    #[test]
    fn rewrite_single_sigma() {
        let alphabet = sigma_alphabet(2);
        let w = GroupWord::parse("s").unwrap();
        let gs = conjugate_product_rewrite(&w, &alphabet, &RewriteHints::new()).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0], LinearMap::identity(2, Q));
    }

    #[test]
    fn rewrite_diag_squared_sigma() {
        // d_a^2 s = (d_a) s (d_a)^-1  -- one conjugator
        let mut alphabet = sigma_alphabet(2);
        let a = [3i64, 5, 7];
        let sq: Vec<FieldElem> = a.iter().map(|&v| FieldElem::from_int(Q, v * v)).collect();
        alphabet
            .register("d", LinearMap::diagonal(&sq).unwrap().to_rat_map())
            .unwrap();
        let w = GroupWord::parse("d s").unwrap();
        let gs = conjugate_product_rewrite(&w, &alphabet, &RewriteHints::new()).unwrap();
        assert_eq!(gs.len(), 1);
    }

    #[test]
    fn rewrite_pure_diagonal_with_roots() {
        let mut alphabet = sigma_alphabet(2);
        let sq: Vec<FieldElem> = [4i64, 9, 1].iter().map(|&v| FieldElem::from_int(Q, v)).collect();
        alphabet
            .register("d", LinearMap::diagonal(&sq).unwrap().to_rat_map())
            .unwrap();
        let w = GroupWord::parse("d").unwrap();
        let gs = conjugate_product_rewrite(&w, &alphabet, &RewriteHints::new()).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[1], LinearMap::identity(2, Q));
    }

    #[test]
    fn rewrite_unsupported_without_roots() {
        let mut alphabet = sigma_alphabet(2);
        let d: Vec<FieldElem> = [2i64, 1, 1].iter().map(|&v| FieldElem::from_int(Q, v)).collect();
        alphabet
            .register("d", LinearMap::diagonal(&d).unwrap().to_rat_map())
            .unwrap();
        let w = GroupWord::parse("d").unwrap();
        assert!(matches!(
            conjugate_product_rewrite(&w, &alphabet, &RewriteHints::new()),
            Err(WordError::RewriteUnsupported(_))
        ));
    }

    #[test]
    fn rewrite_with_supplied_factorization() {
        // m = u d u^-1 with d = diag(4, 1, 1) and a shear-free basis u
        let u = LinearMap::from_int_rows(Q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let d: Vec<FieldElem> = [4i64, 1, 1].iter().map(|&v| FieldElem::from_int(Q, v)).collect();
        let m = u
            .compose(&LinearMap::diagonal(&d).unwrap())
            .compose(&u.inverse());
        let mut alphabet = sigma_alphabet(2);
        alphabet.register("m", m.to_rat_map()).unwrap();
        let mut hints = RewriteHints::new();
        hints.insert("m".into(), vec![(u, d)]);
        let w = GroupWord::parse("m s m").unwrap();
        let gs = conjugate_product_rewrite(&w, &alphabet, &hints).unwrap();
        assert!(!gs.is_empty());
    }
}
