//! Minimal integral representatives, reductive factors, the (k, l)-chain
//! calculus, and the tree search for biminimal chains.
//!
//! A word in the elementary generators is alternating when the exponents
//! strictly alternate between +1 and -1. Appending `g[c/d]^{+-1}` to a
//! (k, l)-chain demands `l | rf` against the previous symbol, passes to
//! `l' = (d^4 det g[c/d]) / l`, and must reproduce the determinant of the
//! minimal integral representative as `k l'`. A biminimal chain is a
//! (1, 1)-chain; a nontrivial one lies in the integral subgroup with nonzero
//! upper-right entry and thereby witnesses that the deviating subgroup is
//! nontrivial.
//!
//! The search enumerates center pairs whose reductive factor is large enough
//! to be the maximal one of a chain, then grows both ends outward, pruning
//! by divisor bookkeeping; every surviving candidate is re-verified by the
//! full chain calculus before it is reported.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::laurent::{poly, IntPoly, RatPoly};
use crate::quaternionic::{
    gen_power, in_integral_subgroup, GenLetter, GenWord, IntegralityReport, QElement,
};

/// Hard usage errors for the chain operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    /// The zero matrix has no minimal integral representative.
    #[error("the zero matrix has no minimal integral representative")]
    ZeroMatrix,
    /// Reductive factors need opposite exponents.
    #[error("reductive factors are defined for alternating pairs; both exponents have sign {0}")]
    NotAlternatingPair(i64),
    /// Reductive factors need distinct symbols.
    #[error("reductive factor of equal symbols g[{0}] is undefined; the word is not reduced")]
    EqualSymbols(BigRational),
    /// The starting factor must divide the cleared determinant.
    #[error("k = {k} does not divide the cleared determinant {det} of the first symbol")]
    BadStart { k: BigInt, det: BigInt },
    /// Exponents in chains are +1 or -1.
    #[error("chain exponents must be +1 or -1, got {0}")]
    BadExponent(i64),
    /// The operation needs at least two symbols.
    #[error("the chain has fewer than two symbols")]
    TooShort,
}

/// Structured rejection of a chain extension; one variant per failed rule.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainRejection {
    /// The new symbol equals the previous one.
    #[error("new symbol equals the previous symbol; the word would not be reduced")]
    RepeatedSymbol,
    /// The new exponent does not alternate.
    #[error("exponent {got} does not alternate against the previous exponent {prev}")]
    NotAlternating { prev: i64, got: i64 },
    /// `l` must divide the reductive factor to the new symbol.
    #[error("l = {l} does not divide the reductive factor {rf} to the new symbol")]
    DivisibilityFailed { l: BigInt, rf: BigInt },
    /// `l` must divide the new symbol's cleared determinant.
    #[error("l = {l} does not divide the cleared determinant {det} of the new symbol")]
    NonIntegralNext { l: BigInt, det: BigInt },
    /// The bookkeeping determinant must match the minimal representative.
    #[error("k l' = {expected} but the minimal representative has determinant {found}")]
    MirDetMismatch { expected: BigInt, found: BigInt },
}

/// A word extension that failed, with its position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainVerifyError {
    /// Empty words are not chains.
    #[error("the empty word is not a chain")]
    Empty,
    /// Setup of the first symbol failed.
    #[error("bad first symbol: {0}")]
    Start(#[from] ChainError),
    /// An extension step was rejected.
    #[error("letter {index} rejected: {rejection}")]
    Rejected { index: usize, rejection: ChainRejection },
}

/// `b^4 det g[a/b] = a^4 + a^2 b^2 + b^4`, the denominator-cleared
/// determinant of a symbol in lowest terms.
pub fn cleared_det(a: &BigInt, b: &BigInt) -> BigInt {
    let a2 = a * a;
    let b2 = b * b;
    &a2 * &a2 + &a2 * &b2 + &b2 * &b2
}

/// The symbol `g[r]^e` for `e = +-1` as an exact rational 2x2 matrix.
pub fn symbol_matrix(r: &BigRational, e: i64) -> [[RatPoly; 2]; 2] {
    assert!(e == 1 || e == -1, "symbols carry exponent +1 or -1");
    let r2 = r * r;
    let one = BigRational::one();
    let phi = poly::phi_sym().to_rational();
    if e == 1 {
        [
            [
                RatPoly::from_terms([(1, one.clone()), (0, -&r2)]),
                RatPoly::constant(r.clone()),
            ],
            [
                phi.scale(&-r.clone()),
                RatPoly::from_terms([(-1, one), (0, -r2)]),
            ],
        ]
    } else {
        // det^-1 times the adjugate.
        let det = BigRational::one() + &r2 + &r2 * &r2;
        let s = det.recip();
        [
            [
                RatPoly::from_terms([(-1, one.clone()), (0, -&r2)]).scale(&s),
                RatPoly::constant(-r.clone()).scale(&s),
            ],
            [
                phi.scale(&(r * &s)),
                RatPoly::from_terms([(1, one), (0, -r2)]).scale(&s),
            ],
        ]
    }
}

/// Product of 2x2 rational-polynomial matrices.
pub fn mat2_mul(a: &[[RatPoly; 2]; 2], b: &[[RatPoly; 2]; 2]) -> [[RatPoly; 2]; 2] {
    let entry = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// The minimal integral representative of a rational matrix: the integer
/// multiple of collective content 1, with the sign fixed so that the first
/// nonzero entry has positive highest coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mir {
    /// The representative matrix.
    pub matrix: [[IntPoly; 2]; 2],
    /// The rational multiplier: `matrix = scale * input`.
    pub scale: BigRational,
}

impl Mir {
    /// Determinant of the representative.
    pub fn det(&self) -> IntPoly {
        self.matrix[0][0]
            .mul(&self.matrix[1][1])
            .sub(&self.matrix[0][1].mul(&self.matrix[1][0]))
    }
}

/// Computes the minimal integral representative.
pub fn mir(b: &[[RatPoly; 2]; 2]) -> Result<Mir, ChainError> {
    let mut lcm = BigInt::one();
    for row in b {
        for p in row {
            lcm = lcm.lcm(&p.denominator_lcm());
        }
    }
    let scale = BigRational::from(lcm);
    let ints: Vec<IntPoly> = b
        .iter()
        .flatten()
        .map(|p| p.scale(&scale).to_int_poly().expect("denominators cleared"))
        .collect();
    let mut content = BigInt::zero();
    for p in &ints {
        content = content.gcd(&p.content());
    }
    if content.is_zero() {
        return Err(ChainError::ZeroMatrix);
    }
    let mut entries: Vec<IntPoly> = ints
        .iter()
        .map(|p| p.div_scalar_exact(&content).expect("content divides"))
        .collect();
    let mut sign = BigInt::one();
    if let Some(first) = entries.iter().find(|p| !p.is_zero()) {
        if first.highest_coeff().unwrap().is_negative() {
            sign = -sign;
            entries = entries.iter().map(|p| p.neg()).collect();
        }
    }
    let mut it = entries.into_iter();
    let matrix = [
        [it.next().unwrap(), it.next().unwrap()],
        [it.next().unwrap(), it.next().unwrap()],
    ];
    let scale = scale * BigRational::from(sign) / BigRational::from(content);
    Ok(Mir { matrix, scale })
}

/// The reductive factor of the alternating pair `g[r1]^s1 g[r2]^s2`:
/// `gcd(F, a d - b c)` with `F = a^2 c^2 + a b c d + b^2 d^2` for
/// `r1 = a/b`, `r2 = c/d` in lowest terms; cross-validated against the
/// equal gcd forms built from the cleared determinants.
pub fn reductive_factor(
    r1: &BigRational,
    s1: i64,
    r2: &BigRational,
    s2: i64,
) -> Result<BigInt, ChainError> {
    if s1 * s2 != -1 {
        return Err(ChainError::NotAlternatingPair(s1));
    }
    if r1 == r2 {
        return Err(ChainError::EqualSymbols(r1.clone()));
    }
    let (a, b) = (r1.numer(), r1.denom());
    let (c, d) = (r2.numer(), r2.denom());
    let f = a * a * c * c + a * b * c * d + b * b * d * d;
    let m = a * d - b * c;
    let rf = f.gcd(&m);
    // The gcd against either cleared determinant gives the same value.
    debug_assert_eq!(rf, cleared_det(a, b).gcd(&m));
    debug_assert_eq!(rf, cleared_det(c, d).gcd(&m));
    Ok(rf)
}

/// Result of checking the defining identity of the reductive factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirProductReport {
    /// The factor from the gcd formula.
    pub rf: BigInt,
    /// The factor observed as the content of `mir(A) mir(B)`.
    pub oracle_rf: BigInt,
    /// Whether `rf * mir(A B) = mir(A) mir(B)` entrywise up to sign.
    pub holds: bool,
}

/// Verifies `rf(A, B) mir(A B) = mir(A) mir(B)` for an alternating symbol
/// pair, reporting the gcd value, the content oracle, and the entrywise
/// comparison.
pub fn mir_product_identity_check(
    r1: &BigRational,
    s1: i64,
    r2: &BigRational,
    s2: i64,
) -> Result<MirProductReport, ChainError> {
    let rf = reductive_factor(r1, s1, r2, s2)?;
    let ma = mir(&symbol_matrix(r1, s1))?;
    let mb = mir(&symbol_matrix(r2, s2))?;
    let product = mat2_mul(&symbol_matrix(r1, s1), &symbol_matrix(r2, s2));
    let mab = mir(&product)?;
    let int_product = {
        let to_rat = |m: &[[IntPoly; 2]; 2]| {
            [
                [m[0][0].to_rational(), m[0][1].to_rational()],
                [m[1][0].to_rational(), m[1][1].to_rational()],
            ]
        };
        mat2_mul(&to_rat(&ma.matrix), &to_rat(&mb.matrix))
    };
    let mut oracle_rf = BigInt::zero();
    for p in int_product.iter().flatten() {
        oracle_rf = oracle_rf.gcd(&p.to_int_poly().expect("integer entries").content());
    }
    let scaled: Vec<IntPoly> = mab
        .matrix
        .iter()
        .flatten()
        .map(|p| p.scale(&rf))
        .collect();
    let target: Vec<IntPoly> = int_product
        .iter()
        .flatten()
        .map(|p| p.to_int_poly().expect("integer entries"))
        .collect();
    let neg: Vec<IntPoly> = target.iter().map(|p| p.neg()).collect();
    let holds = scaled == target || scaled == neg;
    Ok(MirProductReport { rf, oracle_rf, holds })
}

/// An alternating word with validated (k, l)-chain bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    word: GenWord,
    k: BigInt,
    l: BigInt,
    rf_list: Vec<BigInt>,
    element: QElement,
}

impl Chain {
    /// Starts a chain from one symbol `g[r]^e` and a factor split
    /// `k l = cleared det`; `k` must divide the cleared determinant.
    pub fn start(r: &BigRational, e: i64, k: &BigInt) -> Result<Self, ChainError> {
        if e != 1 && e != -1 {
            return Err(ChainError::BadExponent(e));
        }
        let det = cleared_det(r.numer(), r.denom());
        if k.is_positive() && (&det % k).is_zero() {
            Ok(Chain {
                word: GenWord::new(vec![GenLetter { r: r.clone(), e }]),
                k: k.clone(),
                l: &det / k,
                rf_list: Vec::new(),
                element: gen_power(r, e),
            })
        } else {
            Err(ChainError::BadStart { k: k.clone(), det })
        }
    }

    /// Appends `g[r]^e`, enforcing the four chain rules; on success the
    /// returned chain carries `l' = cleared det / l` and the rf list grows
    /// by the new adjacent factor.
    pub fn extend(&self, r: &BigRational, e: i64) -> Result<Self, ChainRejection> {
        let last = self.word.letters().last().expect("chains are nonempty");
        if e != -last.e {
            return Err(ChainRejection::NotAlternating { prev: last.e, got: e });
        }
        if *r == last.r {
            return Err(ChainRejection::RepeatedSymbol);
        }
        let rf = reductive_factor(&last.r, last.e, r, e)
            .expect("alternating distinct symbols");
        if !(&rf % &self.l).is_zero() {
            return Err(ChainRejection::DivisibilityFailed { l: self.l.clone(), rf });
        }
        let det = cleared_det(r.numer(), r.denom());
        if !(&det % &self.l).is_zero() {
            return Err(ChainRejection::NonIntegralNext { l: self.l.clone(), det });
        }
        let l_next = &det / &self.l;
        let element = self.element.mul(&gen_power(r, e));
        let expected = &self.k * &l_next;
        if expected != *element.det() {
            return Err(ChainRejection::MirDetMismatch {
                expected,
                found: element.det().clone(),
            });
        }
        let mut word_letters = self.word.letters().to_vec();
        word_letters.push(GenLetter { r: r.clone(), e });
        let mut rf_list = self.rf_list.clone();
        rf_list.push(rf);
        Ok(Chain {
            word: GenWord::new(word_letters),
            k: self.k.clone(),
            l: l_next,
            rf_list,
            element,
        })
    }

    /// The underlying alternating word.
    pub fn word(&self) -> &GenWord {
        &self.word
    }

    /// The constant factor `k`.
    pub fn k(&self) -> &BigInt {
        &self.k
    }

    /// The running factor `l` after the last symbol.
    pub fn l(&self) -> &BigInt {
        &self.l
    }

    /// Reductive factors of adjacent symbol pairs, one per boundary.
    pub fn rf_list(&self) -> &[BigInt] {
        &self.rf_list
    }

    /// The group element of the word.
    pub fn element(&self) -> &QElement {
        &self.element
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    /// True iff the chain has no symbols; never the case for constructed
    /// chains.
    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Certificate accompanying the biminimality decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiminimalCertificate {
    /// `(k, l) = (1, 1)`.
    pub biminimal: bool,
    /// Whether the word is just `g[0]^{+-1}`, the excluded trivial case.
    pub trivial: bool,
    /// The canonical group element.
    pub element: QElement,
    /// Membership report for the integral subgroup.
    pub integrality: IntegralityReport,
    /// Whether this chain certifies non-surjectivity: biminimal, nontrivial,
    /// integral, with nonzero upper-right entry.
    pub witnesses_nonsurjectivity: bool,
}

/// Decides biminimality and bundles the counterexample certificate.
pub fn is_biminimal(c: &Chain) -> BiminimalCertificate {
    let biminimal = c.k().is_one() && c.l().is_one();
    let zero = BigRational::zero();
    let trivial = c.len() == 1 && c.word().letters()[0].r == zero;
    let element = c.element().clone();
    let integrality = in_integral_subgroup(&element);
    let witnesses_nonsurjectivity =
        biminimal && !trivial && integrality.member && integrality.m12_nonzero;
    BiminimalCertificate { biminimal, trivial, element, integrality, witnesses_nonsurjectivity }
}

/// The maximal reductive factor and the inequality it must satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrfReport {
    /// The maximum over adjacent-pair reductive factors.
    pub mrf: BigInt,
    /// 0-based boundary position of the (first) maximum.
    pub position: usize,
    /// Whether `mrf^2` dominates both cleared determinants at that boundary.
    pub inequality_holds: bool,
}

/// Computes the maximal reductive factor of a chain with at least two
/// symbols and checks the squared-dominance inequality at the maximum.
pub fn max_reductive_factor(c: &Chain) -> Result<MrfReport, ChainError> {
    if c.len() < 2 {
        return Err(ChainError::TooShort);
    }
    let (position, mrf) = c
        .rf_list()
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
        .map(|(i, x)| (i, x.clone()))
        .expect("nonempty rf list");
    let letters = c.word().letters();
    let wa = cleared_det(letters[position].r.numer(), letters[position].r.denom());
    let wb = cleared_det(letters[position + 1].r.numer(), letters[position + 1].r.denom());
    let inequality_holds = &mrf * &mrf >= wa.max(wb);
    Ok(MrfReport { mrf, position, inequality_holds })
}

/// Runs the chain calculus over a whole word with `k = 1`, returning the
/// validated chain or the first rejection.
pub fn verify_word_as_chain(word: &GenWord) -> Result<Chain, ChainVerifyError> {
    let letters = word.letters();
    let first = letters.first().ok_or(ChainVerifyError::Empty)?;
    let mut chain = Chain::start(&first.r, first.e, &BigInt::one())?;
    for (index, letter) in letters.iter().enumerate().skip(1) {
        chain = chain
            .extend(&letter.r, letter.e)
            .map_err(|rejection| ChainVerifyError::Rejected { index, rejection })?;
    }
    Ok(chain)
}

// ---------------------------------------------------------------------------
// The tree search.

/// Configuration of the search.
#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    /// Worker threads for the root loop; `None` runs the canonical
    /// sequential mode. Both modes produce identical output.
    pub parallel: Option<usize>,
    /// Retain the full surviving tree in the outcome.
    pub keep_tree: bool,
    /// Emit progress lines on stderr.
    pub progress: bool,
}

/// A node of the search tree: symbol `a/b`, the boundary factor `rf` toward
/// the parent, and the inherited root-pair index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchNode {
    pub a: i64,
    pub b: i64,
    pub rf: i64,
    pub index: i64,
    pub children: Vec<SearchNode>,
}

impl SearchNode {
    fn new(a: i64, b: i64, rf: i64, index: i64) -> Self {
        SearchNode { a, b, rf, index, children: Vec::new() }
    }

    fn set_index(&mut self, index: i64) {
        self.index = index;
        for child in &mut self.children {
            child.set_index(index);
        }
    }

    /// Renders the subtree as indented `(a, b, rf, index)` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_into(&mut out, 0);
        out
    }

    fn dump_into(&self, out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(&format!("({}, {}, {}, {})\n", self.a, self.b, self.rf, self.index));
        for child in &self.children {
            child.dump_into(out, depth + 1);
        }
    }
}

/// Counters describing one search run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Root quadruples enumerated.
    pub root_quadruples: u64,
    /// Quadruples passing the squared-dominance test.
    pub pairs_inserted: u64,
    /// Root pairs alive at the end.
    pub pairs_surviving: u64,
    /// Non-root nodes inserted below root children.
    pub nodes_inserted: u64,
    /// Nodes deleted for lack of children.
    pub nodes_deleted: u64,
    /// Closed leaves.
    pub closed_leaves: u64,
    /// Candidate words assembled from leaf-path pairs, before dedup.
    pub raw_candidates: u64,
    /// Candidates passing full verification as biminimal chains.
    pub verified_biminimal: u64,
}

/// A verified biminimal chain found by the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundChain {
    pub chain: Chain,
    /// Maximal reductive factor.
    pub mrf: BigInt,
    /// Relative degree of the element.
    pub rd: i64,
    /// Index of the root pair that produced it.
    pub pair_index: i64,
}

/// Everything a search run produces.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Verified biminimal chains, deduplicated by word, in discovery order.
    pub found: Vec<FoundChain>,
    /// Count of word orbits among the found chains, where a word and its
    /// reversed-inverted form count once.
    pub orbit_count: usize,
    /// The surviving tree under the synthetic root, when retained.
    pub tree: Option<SearchNode>,
    /// Run counters.
    pub stats: SearchStats,
    /// Wall-clock duration.
    pub elapsed: Duration,
}

fn w64(a: i64, b: i64) -> i64 {
    let a2 = a * a;
    let b2 = b * b;
    a2 * a2 + a2 * b2 + b2 * b2
}

// Ascending values x with 0 < |x| <= limit and gcd(|x|, n) = 1.
fn coprime_values(n: i64, limit: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for x in -limit..=limit {
        if x != 0 && x.unsigned_abs().gcd(&n.unsigned_abs()) == 1 {
            out.push(x);
        }
    }
    out
}

struct Tables {
    m: i64,
    // Indexed by denominator 1..=m; values bounded by m.
    coprime: Vec<Vec<i64>>,
}

impl Tables {
    fn new(m: i64) -> Self {
        let mut coprime = vec![Vec::new()];
        for n in 1..=m {
            coprime.push(coprime_values(n, m));
        }
        Tables { m, coprime }
    }

    // The slice of coprime[n] with |x| <= bound; valid because the list is
    // ascending and symmetric around the gap at zero.
    fn coprime_upto<'a>(&'a self, n: i64, bound: i64) -> &'a [i64] {
        let list = &self.coprime[n as usize];
        let lo = list.partition_point(|&x| x < -bound);
        let hi = list.partition_point(|&x| x <= bound);
        &list[lo..hi]
    }
}

// Procedure (e)-(g): grow the subtree of `node`, returning whether the node
// survives (keeps at least one child).
fn explore(
    node: &mut SearchNode,
    rf0: i64,
    ancestors: &mut Vec<i64>,
    tables: &Tables,
    stats: &mut SearchStats,
) -> bool {
    let wn = w64(node.a, node.b);
    debug_assert_eq!(wn % node.rf, 0, "boundary factor divides the cleared determinant");
    let rf_child = wn / node.rf;
    // rf_child does not depend on the candidate symbol, so the ordering and
    // ancestor-exclusion rules can be tested before the loop.
    if rf_child < rf0 && rf_child != node.rf && !ancestors.contains(&rf_child) {
        let (e, f) = (node.a, node.b);
        for h in 1..=tables.m {
            for &g in &tables.coprime[h as usize] {
                if g == e && h == f {
                    continue;
                }
                let det_m = e * h - f * g;
                let ff = e * e * g * g + e * f * g * h + f * f * h * h;
                let rf_near = ff.gcd(&det_m);
                if rf_near % rf_child != 0 {
                    continue;
                }
                stats.nodes_inserted += 1;
                let mut child = SearchNode::new(g, h, rf_child, node.index);
                if w64(g, h) == rf_near {
                    stats.closed_leaves += 1;
                    node.children.push(child);
                } else {
                    ancestors.push(node.rf);
                    let survived = explore(&mut child, rf0, ancestors, tables, stats);
                    ancestors.pop();
                    if survived {
                        node.children.push(child);
                    } else {
                        stats.nodes_deleted += 1;
                    }
                }
            }
        }
    }
    !node.children.is_empty()
}

// Steps (c)-(d) for one root quadruple; `None` when pruned or when a side
// dies, `Some(left, right)` with fully grown subtrees otherwise.
fn process_quadruple(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    tables: &Tables,
    stats: &mut SearchStats,
) -> Option<(SearchNode, SearchNode)> {
    let ff = a * a * c * c + a * b * c * d + b * b * d * d;
    let det_m = a * d - b * c;
    let rf0 = ff.gcd(&det_m);
    let wa = w64(a, b);
    let wc = w64(c, d);
    if rf0 * rf0 < wa.max(wc) {
        return None;
    }
    stats.pairs_inserted += 1;
    let mut left = SearchNode::new(a, b, rf0, 0);
    let mut right = SearchNode::new(c, d, rf0, 0);
    let left_closed = rf0 == wa;
    if !left_closed && !explore(&mut left, rf0, &mut Vec::new(), tables, stats) {
        return None;
    }
    let right_closed = rf0 == wc;
    if !right_closed && !explore(&mut right, rf0, &mut Vec::new(), tables, stats) {
        return None;
    }
    Some((left, right))
}

// All root-to-leaf symbol paths of a surviving subtree; leaves of survivors
// are exactly the closed nodes.
fn leaf_paths(node: &SearchNode) -> Vec<Vec<(i64, i64)>> {
    if node.children.is_empty() {
        return vec![vec![(node.a, node.b)]];
    }
    let mut out = Vec::new();
    for child in &node.children {
        for mut path in leaf_paths(child) {
            path.insert(0, (node.a, node.b));
            out.push(path);
        }
    }
    out
}

fn assemble_word(left_path: &[(i64, i64)], right_path: &[(i64, i64)]) -> GenWord {
    let mut symbols: Vec<(i64, i64)> = left_path.iter().rev().copied().collect();
    symbols.extend_from_slice(right_path);
    let letters = symbols
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| GenLetter {
            r: BigRational::new(BigInt::from(a), BigInt::from(b)),
            e: if i % 2 == 0 { 1 } else { -1 },
        })
        .collect();
    GenWord::new(letters)
}

// Words related by reading backwards with inverted exponents describe one
// chain orbit; both are normalized to start with exponent +1.
fn orbit_key(word: &GenWord) -> String {
    let flip = |w: &GenWord| {
        let letters = w
            .letters()
            .iter()
            .map(|l| GenLetter { r: l.r.clone(), e: -l.e })
            .collect();
        GenWord::new(letters)
    };
    let normalize = |w: GenWord| {
        if w.letters().first().map(|l| l.e) == Some(-1) {
            flip(&w)
        } else {
            w
        }
    };
    let fwd = normalize(word.clone()).to_string();
    let rev = normalize(word.inverse()).to_string();
    fwd.min(rev)
}

struct UnitOutcome {
    pairs: Vec<(SearchNode, SearchNode)>,
    stats: SearchStats,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.root_quadruples += other.root_quadruples;
        self.pairs_inserted += other.pairs_inserted;
        self.pairs_surviving += other.pairs_surviving;
        self.nodes_inserted += other.nodes_inserted;
        self.nodes_deleted += other.nodes_deleted;
        self.closed_leaves += other.closed_leaves;
        self.raw_candidates += other.raw_candidates;
        self.verified_biminimal += other.verified_biminimal;
    }
}

// Steps (b)-(d) for all quadruples with fixed (b, a), in canonical order.
fn process_ba(b: i64, a: i64, tables: &Tables, progress: bool) -> UnitOutcome {
    let mut stats = SearchStats::default();
    let mut pairs = Vec::new();
    for d in 1..=b {
        for &c in tables.coprime_upto(d, b) {
            if a == c && b == d {
                continue;
            }
            stats.root_quadruples += 1;
            if let Some(pair) = process_quadruple(a, b, c, d, tables, &mut stats) {
                pairs.push(pair);
            }
        }
    }
    if progress && !pairs.is_empty() {
        eprintln!("[search] b={b} a={a}: {} surviving pair(s)", pairs.len());
    }
    UnitOutcome { pairs, stats }
}

/// Runs the tree search up to denominator bound `m` and fully verifies every
/// candidate word with the chain calculus.
pub fn search(m: i64, config: &SearchConfig) -> SearchOutcome {
    assert!(m >= 1, "the denominator bound must be positive");
    let start = std::time::Instant::now();
    let tables = Tables::new(m);
    let units: Vec<(i64, i64)> = (1..=m)
        .flat_map(|b| {
            tables.coprime_upto(b, b).to_vec().into_iter().map(move |a| (b, a))
        })
        .collect();

    let outcomes: Vec<UnitOutcome> = match config.parallel {
        Some(threads) if threads > 1 => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool");
            pool.install(|| {
                units
                    .par_iter()
                    .map(|&(b, a)| process_ba(b, a, &tables, config.progress))
                    .collect()
            })
        }
        _ => units
            .iter()
            .map(|&(b, a)| process_ba(b, a, &tables, config.progress))
            .collect(),
    };

    let mut stats = SearchStats::default();
    let mut root = SearchNode::new(0, 0, 0, 0);
    let mut found: Vec<FoundChain> = Vec::new();
    let mut seen_words: BTreeSet<String> = BTreeSet::new();
    let mut orbits: BTreeSet<String> = BTreeSet::new();
    let mut next_index = 1i64;
    for outcome in outcomes {
        stats.absorb(&outcome.stats);
        for (mut left, mut right) in outcome.pairs {
            let index = next_index;
            next_index += 1;
            stats.pairs_surviving += 1;
            left.set_index(index);
            right.set_index(-index);
            for lp in leaf_paths(&left) {
                for rp in leaf_paths(&right) {
                    stats.raw_candidates += 1;
                    let word = assemble_word(&lp, &rp);
                    let Ok(chain) = verify_word_as_chain(&word) else {
                        continue;
                    };
                    let cert = is_biminimal(&chain);
                    if !cert.witnesses_nonsurjectivity {
                        continue;
                    }
                    stats.verified_biminimal += 1;
                    if !seen_words.insert(word.to_string()) {
                        continue;
                    }
                    orbits.insert(orbit_key(&word));
                    let mrf = max_reductive_factor(&chain)
                        .expect("verified chains have length >= 2")
                        .mrf;
                    let rd = chain.element().rd();
                    found.push(FoundChain { chain, mrf, rd, pair_index: index });
                }
            }
            root.children.push(left);
            root.children.push(right);
        }
    }
    if config.progress {
        eprintln!(
            "[search] done: {} quadruples, {} surviving pairs, {} verified chains",
            stats.root_quadruples,
            stats.pairs_surviving,
            found.len()
        );
    }
    SearchOutcome {
        found,
        orbit_count: orbits.len(),
        tree: config.keep_tree.then_some(root),
        stats,
        elapsed: start.elapsed(),
    }
}

impl fmt::Display for FoundChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chain of length {} with Mrf {} and relative degree {}: {}",
            self.chain.len(),
            self.mrf,
            self.rd,
            self.chain.word()
        )
    }
}
