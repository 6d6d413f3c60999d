//! The reduced Burau representation of the three-strand braid group and the
//! formal group cut out by its invariants.
//!
//! A matrix `A` over `Z[t, t^-1]` belongs to the formal Burau group when
//!
//! * every row sums to 1,
//! * the row vector `v = (t, t^2, t^3)` satisfies `v A = v`,
//! * `bar(A) J A^T = J` for the fixed hermitian form `J`, and
//! * `det A = (-t)^k` for some integer `k`.
//!
//! Two rank-reducing maps expose the structure of such matrices. `phi` keeps
//! the exact `t`-dependence: it sends `A` to a 2x2 matrix over the rationals
//! in `t` whose first row is built from the classifying coordinates
//! `f_kl`. `rho` forgets everything except `t = -1` and lands in integer 2x2
//! matrices. Together with `reconstruct_from_g`, which inverts `phi` entry by
//! entry, they let certificates produced downstream be lifted back to honest
//! members of the formal group.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::laurent::{poly, EisensteinValue, IntPoly, LaurentError, RatPoly};

/// Errors raised by the Burau-side operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BurauError {
    /// A braid word contained a letter other than 1, -1, 2, -2.
    #[error("braid letter {0} is not one of 1, -1, 2, -2")]
    BadLetter(i32),
    /// A classifying identity that holds on the formal group failed.
    #[error("classifying identity {0} failed; the matrix is not in the formal Burau group")]
    FunctionalEquation(&'static str),
    /// The determinant is not a signed power of t.
    #[error("determinant {0} is not of the form (-t)^k")]
    DetNotSignedPower(String),
    /// Matrix entries could not be parsed.
    #[error(transparent)]
    Poly(#[from] LaurentError),
}

/// Failure report for `reconstruct_from_g`: the offending entries stay
/// fractional, which by the classification happens exactly when `g11` does
/// not evaluate to 1 at the primitive cube root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructFailure {
    /// 1-based labels of entries that are not integer Laurent polynomials.
    pub bad_entries: Vec<(u8, u8)>,
    /// Value of `g11` at the primitive cube root of unity.
    pub g11_at_zeta3: EisensteinValue,
}

impl fmt::Display for ReconstructFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> =
            self.bad_entries.iter().map(|(i, j)| format!("A{i}{j}")).collect();
        write!(
            f,
            "entries {} are not integer Laurent polynomials (g11 at zeta3 = {})",
            names.join(", "),
            self.g11_at_zeta3
        )
    }
}

impl std::error::Error for ReconstructFailure {}

// ---------------------------------------------------------------------------
// Exact rational functions of t.

/// A rational function `num / den` over `Q`, with `num` Laurent and `den` an
/// ordinary polynomial.
///
/// Canonical form: `den` is monic with nonzero constant term and shares no
/// factor with `num` (powers of `t` are pushed into the Laurent numerator),
/// so derived equality is semantic equality. This covers the denominators
/// `t^a (1+t)^b (1+t+t^2)^c` that the classifying coordinates produce.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFrac {
    num: RatPoly,
    den: RatPoly,
}

impl RatFrac {
    /// Builds `num / den`, reducing to canonical form. Panics if `den` is zero.
    pub fn new(num: RatPoly, den: RatPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in RatFrac");
        if num.is_zero() {
            return RatFrac { num: RatPoly::zero(), den: RatPoly::one_poly() };
        }
        // Push the t-power content of the denominator into the numerator.
        let dlo = den.lowest_exp().unwrap();
        let den0 = den.shift(-dlo);
        let num0 = num.shift(-dlo);
        // Split the numerator as t^m * (polynomial with nonnegative exponents).
        let m = num0.lowest_exp().unwrap().min(0);
        let num1 = num0.shift(-m);
        let g = poly_gcd(&num1, &den0);
        let num2 = num1.div_exact(&g).expect("gcd divides");
        let den2 = den0.div_exact(&g).expect("gcd divides");
        let lead = den2.highest_coeff().unwrap().clone();
        let lead_inv = lead.recip();
        RatFrac { num: num2.scale(&lead_inv).shift(m), den: den2.scale(&lead_inv) }
    }

    /// Embeds a Laurent polynomial.
    pub fn from_poly(p: RatPoly) -> Self {
        RatFrac { num: p, den: RatPoly::one_poly() }
    }

    /// Embeds an integer Laurent polynomial.
    pub fn from_int_poly(p: &IntPoly) -> Self {
        Self::from_poly(p.to_rational())
    }

    /// The constant 0.
    pub fn zero() -> Self {
        Self::from_poly(RatPoly::zero())
    }

    /// The constant 1.
    pub fn one() -> Self {
        Self::from_poly(RatPoly::one_poly())
    }

    /// Numerator of the canonical form.
    pub fn num(&self) -> &RatPoly {
        &self.num
    }

    /// Denominator of the canonical form.
    pub fn den(&self) -> &RatPoly {
        &self.den
    }

    /// True iff the value is zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        RatFrac::new(
            &self.num.mul(&other.den) + &other.num.mul(&self.den),
            self.den.mul(&other.den),
        )
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        RatFrac { num: self.num.neg(), den: self.den.clone() }
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        RatFrac::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Reciprocal; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(RatFrac::new(self.den.clone(), self.num.clone()))
        }
    }

    /// The bar involution `t -> t^-1`.
    pub fn bar(&self) -> Self {
        RatFrac::new(self.num.bar(), self.den.bar())
    }

    /// Multiplication by the monomial `c * t^k`.
    pub fn scale_mono(&self, k: i64, c: &BigRational) -> Self {
        RatFrac::new(self.num.shift(k).scale(c), self.den.clone())
    }

    /// Returns the value as a Laurent polynomial if the denominator is 1.
    pub fn as_poly(&self) -> Option<&RatPoly> {
        if self.den.is_one_poly() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Returns the value as an integer Laurent polynomial if possible.
    pub fn as_int_poly(&self) -> Option<IntPoly> {
        self.as_poly()?.to_int_poly()
    }
}

impl fmt::Display for RatFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

// Euclidean gcd of ordinary polynomials (nonnegative exponents), monic result.
fn poly_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    let lead = a.highest_coeff().expect("gcd of nonzero polynomials").clone();
    a.scale(&lead.recip())
}

// Remainder of ordinary polynomial division.
fn poly_rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let db = b.highest_exp().expect("nonzero divisor");
    let lead = b.highest_coeff().unwrap().clone();
    let mut r = a.clone();
    while let Some(dr) = r.highest_exp() {
        if dr < db {
            break;
        }
        let c = r.highest_coeff().unwrap() / &lead;
        let m = RatPoly::monomial(dr - db, c);
        r = r.sub(&m.mul(b));
    }
    r
}

// Convenience constructors on RatPoly used only here.
impl RatPoly {
    fn one_poly() -> RatPoly {
        RatPoly::constant(BigRational::one())
    }

    fn is_one_poly(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }
}

// ---------------------------------------------------------------------------
// Burau matrices.

/// A 3x3 matrix over `Z[t, t^-1]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BurauMatrix {
    entries: [[IntPoly; 3]; 3],
}

impl BurauMatrix {
    /// Wraps raw entries.
    pub fn new(entries: [[IntPoly; 3]; 3]) -> Self {
        BurauMatrix { entries }
    }

    /// Parses nine polynomial strings in row-major order.
    pub fn from_strs(rows: &[[&str; 3]; 3]) -> Result<Self, LaurentError> {
        let mut entries: [[IntPoly; 3]; 3] = Default::default();
        for (i, row) in rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                entries[i][j] = s.parse()?;
            }
        }
        Ok(BurauMatrix { entries })
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        let mut entries: [[IntPoly; 3]; 3] = Default::default();
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = IntPoly::constant(BigInt::one());
        }
        BurauMatrix { entries }
    }

    /// Image of the first braid generator.
    pub fn sigma1() -> Self {
        Self::from_strs(&[["1 - t", "t", "0"], ["1", "0", "0"], ["0", "0", "1"]])
            .expect("fixed entries parse")
    }

    /// Image of the second braid generator.
    pub fn sigma2() -> Self {
        Self::from_strs(&[["1", "0", "0"], ["0", "1 - t", "t"], ["0", "1", "0"]])
            .expect("fixed entries parse")
    }

    /// Image of the full twist `(sigma1 sigma2 sigma1)^2`, the center generator.
    pub fn delta() -> Self {
        Self::from_strs(&[
            ["1 - t + t^3", "t - t^2", "t^2 - t^3"],
            ["1 - t", "t - t^2 + t^3", "t^2 - t^3"],
            ["1 - t", "t - t^2", "t^2"],
        ])
        .expect("fixed entries parse")
    }

    /// Image of a single braid letter: 1, -1, 2, -2.
    pub fn generator(letter: i32) -> Result<Self, BurauError> {
        match letter {
            1 => Ok(Self::sigma1()),
            2 => Ok(Self::sigma2()),
            -1 => Ok(Self::sigma1().inverse().expect("generator is invertible")),
            -2 => Ok(Self::sigma2().inverse().expect("generator is invertible")),
            other => Err(BurauError::BadLetter(other)),
        }
    }

    /// Image of a braid word given as a sequence of letters.
    pub fn from_word(word: &[i32]) -> Result<Self, BurauError> {
        let mut acc = Self::identity();
        for &letter in word {
            acc = acc.mul(&Self::generator(letter)?);
        }
        Ok(acc)
    }

    /// Entry at 0-based position `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &IntPoly {
        &self.entries[i][j]
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out: [[IntPoly; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = IntPoly::zero();
                for (k, b_row) in other.entries.iter().enumerate() {
                    acc = acc.add(&self.entries[i][k].mul(&b_row[j]));
                }
                out[i][j] = acc;
            }
        }
        BurauMatrix { entries: out }
    }

    /// Determinant by first-row cofactor expansion.
    pub fn det(&self) -> IntPoly {
        let e = &self.entries;
        let m = |i: usize, j: usize, k: usize, l: usize| {
            e[1][i].mul(&e[2][j]).sub(&e[1][k].mul(&e[2][l]))
        };
        e[0][0].mul(&m(1, 2, 2, 1)).sub(&e[0][1].mul(&m(0, 2, 2, 0))).add(&e[0][2].mul(&m(0, 1, 1, 0)))
    }

    /// Exact inverse; requires the determinant to be a unit `c * t^k` with
    /// `c = 1` or `c = -1`.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let (k, c) = det.as_monomial()?;
        if !(c.is_one() || (-c).is_one()) {
            return None;
        }
        let e = &self.entries;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            e[r0][c0].mul(&e[r1][c1]).sub(&e[r0][c1].mul(&e[r1][c0]))
        };
        // Adjugate: transposed cofactors with checkerboard signs.
        let rows = [[1, 2], [0, 2], [0, 1]];
        let mut out: [[IntPoly; 3]; 3] = Default::default();
        for (i, out_row) in out.iter_mut().enumerate() {
            for (j, slot) in out_row.iter_mut().enumerate() {
                let [r0, r1] = rows[j];
                let [c0, c1] = rows[i];
                let minor = cof(r0, r1, c0, c1);
                let signed = if (i + j) % 2 == 0 { minor } else { minor.neg() };
                // Division by the unit c * t^k.
                let shifted = signed.shift(-k);
                *slot = if c.is_one() { shifted } else { shifted.neg() };
            }
        }
        Some(BurauMatrix { entries: out })
    }

    /// Applies the bar involution to every entry.
    pub fn bar(&self) -> Self {
        self.map(|p| p.bar())
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        let mut out: [[IntPoly; 3]; 3] = Default::default();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out[j][i] = p.clone();
            }
        }
        BurauMatrix { entries: out }
    }

    /// Entrywise evaluation at `t = -1`.
    pub fn eval_neg1(&self) -> [[BigInt; 3]; 3] {
        self.entries.clone().map(|row| row.map(|p| p.eval_neg1()))
    }

    /// Entrywise evaluation at `t = 1`.
    pub fn eval_one(&self) -> [[BigInt; 3]; 3] {
        self.entries.clone().map(|row| row.map(|p| p.eval_one()))
    }

    /// True iff the matrix commutes with the image of the full twist.
    pub fn commutes_with_delta(&self) -> bool {
        let d = Self::delta();
        self.mul(&d) == d.mul(self)
    }

    fn map<F: Fn(&IntPoly) -> IntPoly>(&self, f: F) -> Self {
        let mut out: [[IntPoly; 3]; 3] = Default::default();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out[i][j] = f(p);
            }
        }
        BurauMatrix { entries: out }
    }
}

impl fmt::Display for BurauMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

// The hermitian form J fixed by unitarity.
fn j_form() -> BurauMatrix {
    BurauMatrix::from_strs(&[
        ["1", "-t^-1", "-t^-1"],
        ["-t", "1", "-t^-1"],
        ["-t", "-t", "1"],
    ])
    .expect("fixed entries parse")
}

fn v_row() -> [IntPoly; 3] {
    [poly::int(&[(1, 1)]), poly::int(&[(2, 1)]), poly::int(&[(3, 1)])]
}

/// Outcome of testing the four defining conditions of the formal Burau group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    /// Every row sums to 1.
    pub row_sum: bool,
    /// The row vector `(t, t^2, t^3)` is fixed from the right.
    pub v_fixed: bool,
    /// `bar(A) J A^T = J`.
    pub unitary: bool,
    /// The determinant is `(-t)^k`.
    pub det_form: bool,
    /// The exponent `k` when `det_form` holds.
    pub det_exponent: Option<i64>,
    /// All four conditions hold.
    pub member: bool,
}

/// Tests the four defining conditions of the formal Burau group.
pub fn is_in_formal_burau(a: &BurauMatrix) -> MembershipReport {
    let one = IntPoly::constant(BigInt::one());
    let row_sum = (0..3).all(|i| {
        let s = a.entry(i, 0).add(a.entry(i, 1)).add(a.entry(i, 2));
        s == one
    });
    let v = v_row();
    let v_fixed = (0..3).all(|j| {
        let s = v[0].mul(a.entry(0, j)).add(&v[1].mul(a.entry(1, j))).add(&v[2].mul(a.entry(2, j)));
        s == v[j]
    });
    let j = j_form();
    let unitary = a.bar().mul(&j).mul(&a.transpose()) == j;
    let det = a.det();
    let det_exponent = det.as_monomial().and_then(|(k, c)| {
        let want_neg = k.rem_euclid(2) == 1;
        let ok = if want_neg { (-c).is_one() } else { c.is_one() };
        ok.then_some(k)
    });
    let det_form = det_exponent.is_some();
    MembershipReport {
        row_sum,
        v_fixed,
        unitary,
        det_form,
        det_exponent,
        member: row_sum && v_fixed && unitary && det_form,
    }
}

/// Membership report extended by the permutation condition at `t = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaReport {
    /// The formal-group conditions.
    pub base: MembershipReport,
    /// `A` evaluated at `t = 1` is a permutation matrix.
    pub perm_at_1: bool,
    /// The permutation condition is implied by the others; false here would
    /// signal an internal inconsistency.
    pub consistent: bool,
    /// Member of the extended group.
    pub member: bool,
}

/// Tests formal-group membership together with the `t = 1` permutation
/// condition. The latter is redundant for members, so `consistent` is false
/// only if arithmetic is broken somewhere.
pub fn check_gamma(a: &BurauMatrix) -> GammaReport {
    let base = is_in_formal_burau(a);
    let at_one = a.eval_one();
    let perm_at_1 = is_permutation(&at_one);
    let consistent = !base.member || perm_at_1;
    let member = base.member && perm_at_1;
    GammaReport { base, perm_at_1, consistent, member }
}

fn is_permutation(m: &[[BigInt; 3]; 3]) -> bool {
    let one = BigInt::one();
    for row in m {
        if row.iter().filter(|c| **c == one).count() != 1
            || row.iter().filter(|c| !c.is_zero()).count() != 1
        {
            return false;
        }
    }
    for j in 0..3 {
        if (0..3).filter(|&i| m[i][j] == one).count() != 1 {
            return false;
        }
    }
    true
}

/// The classifying coordinates of a formal-group element.
///
/// `f_k1 = A_k1 (1 + t + t^2) - 1` and `f_k2 = A_k1 + A_k2 (1 + t) - 1` for
/// `k = 1, 2`; the `g` fields are the same data divided by `t (1 + t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FCoords {
    pub f11: IntPoly,
    pub f12: IntPoly,
    pub f21: IntPoly,
    pub f22: IntPoly,
    pub g11: RatFrac,
    pub g12: RatFrac,
    pub g21: RatFrac,
    pub g22: RatFrac,
}

/// Computes the classifying coordinates, validating the identities that
/// characterize them on the formal group.
pub fn f_coords(a: &BurauMatrix) -> Result<FCoords, BurauError> {
    let c3 = poly::cyclo3();
    let opt = poly::one_plus_t();
    let one = IntPoly::constant(BigInt::one());
    let f = |k: usize| {
        let fk1 = a.entry(k, 0).mul(&c3).sub(&one);
        let fk2 = a.entry(k, 0).add(&a.entry(k, 1).mul(&opt)).sub(&one);
        (fk1, fk2)
    };
    let (f11, f12) = f(0);
    let (f21, f22) = f(1);

    // det A * t^2 (1 + t) = f11 f22 - f12 f21.
    let det = a.det();
    let lhs = det.mul(&poly::int(&[(2, 1), (3, 1)]));
    if f11.mul(&f22).sub(&f12.mul(&f21)) != lhs {
        return Err(BurauError::FunctionalEquation("determinant relation"));
    }
    // f_k1 bar(f_k1) + (1 + t + t^-1) f_k2 bar(f_k2) = t^-1 (1 + t)^2.
    let phi_sym = poly::phi_sym();
    let rhs = poly::int(&[(-1, 1), (0, 2), (1, 1)]);
    for (name, (fk1, fk2)) in [("row-1 norm", (&f11, &f12)), ("row-2 norm", (&f21, &f22))] {
        if fk1.mul(&fk1.bar()).add(&phi_sym.mul(&fk2.mul(&fk2.bar()))) != rhs {
            return Err(BurauError::FunctionalEquation(name));
        }
    }
    // 1 + t + t^2 (bar(f11) f21 + (1 + t + t^-1) bar(f12) f22) = 0.
    let inner = f11.bar().mul(&f21).add(&phi_sym.mul(&f12.bar().mul(&f22)));
    if opt.add(&inner.shift(2)) != IntPoly::zero() {
        return Err(BurauError::FunctionalEquation("row orthogonality"));
    }

    let t_opt = poly::int(&[(1, 1), (2, 1)]).to_rational();
    let g = |f: &IntPoly| RatFrac::new(f.to_rational(), t_opt.clone());
    Ok(FCoords {
        g11: g(&f11),
        g12: g(&f12),
        g21: g(&f21),
        g22: g(&f22),
        f11,
        f12,
        f21,
        f22,
    })
}

/// The 2x2 image of a formal-group element under the degree-lowering map.
///
/// Only the first row `(g11, g12)` and the determinant exponent are stored;
/// the second row is `(-d Phi bar(g12), d bar(g11))` with `d = (-t)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiImage {
    pub g11: RatFrac,
    pub g12: RatFrac,
    /// `k` with `det = (-t)^k`, shared with the source matrix.
    pub det_exponent: i64,
}

impl PhiImage {
    /// The determinant `(-t)^k` as a polynomial.
    pub fn det_poly(&self) -> IntPoly {
        signed_power(self.det_exponent)
    }

    /// The full 2x2 matrix.
    pub fn entries(&self) -> [[RatFrac; 2]; 2] {
        let d = RatFrac::from_int_poly(&self.det_poly());
        let phi_sym = RatFrac::from_int_poly(&poly::phi_sym());
        [
            [self.g11.clone(), self.g12.clone()],
            [d.mul(&phi_sym).mul(&self.g12.bar()).neg(), d.mul(&self.g11.bar())],
        ]
    }

    /// Product of two images, staying in first-row form.
    pub fn mul(&self, other: &Self) -> Self {
        let e = RatFrac::from_int_poly(&signed_power(other.det_exponent));
        let phi_sym = RatFrac::from_int_poly(&poly::phi_sym());
        let g11 = self
            .g11
            .mul(&other.g11)
            .sub(&e.mul(&phi_sym).mul(&self.g12.mul(&other.g12.bar())));
        let g12 = self.g11.mul(&other.g12).add(&e.mul(&self.g12.mul(&other.g11.bar())));
        PhiImage { g11, g12, det_exponent: self.det_exponent + other.det_exponent }
    }

    /// Determinant of the full 2x2 matrix, as a rational function.
    pub fn det2(&self) -> RatFrac {
        let m = self.entries();
        m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
    }

    /// The first row as integer Laurent polynomials, when the image is
    /// integral.
    pub fn integral_pair(&self) -> Option<(IntPoly, IntPoly)> {
        Some((self.g11.as_int_poly()?, self.g12.as_int_poly()?))
    }
}

/// `(-t)^k` as an integer Laurent polynomial.
pub fn signed_power(k: i64) -> IntPoly {
    let c = if k.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
    IntPoly::monomial(k, c)
}

/// The degree-lowering map on the formal Burau group.
pub fn phi(a: &BurauMatrix) -> Result<PhiImage, BurauError> {
    let fc = f_coords(a)?;
    let det = a.det();
    let det_exponent = det
        .as_monomial()
        .and_then(|(k, c)| {
            let want_neg = k.rem_euclid(2) == 1;
            let ok = if want_neg { (-c).is_one() } else { c.is_one() };
            ok.then_some(k)
        })
        .ok_or_else(|| BurauError::DetNotSignedPower(det.to_string()))?;
    Ok(PhiImage { g11: fc.g11, g12: fc.g12, det_exponent })
}

/// The integral shadow: evaluate at `t = -1`, then take the 2x2 corner
/// combination. Multiplicative on the formal group.
pub fn rho(a: &BurauMatrix) -> [[BigInt; 2]; 2] {
    let b = a.eval_neg1();
    let one = BigInt::one();
    [
        [&one - &b[0][2], &one - &b[0][0]],
        [&one - &b[2][2], &one - &b[2][0]],
    ]
}

/// 2x2 integer matrix product, for checking multiplicativity of `rho`.
pub fn mat2_mul(a: &[[BigInt; 2]; 2], b: &[[BigInt; 2]; 2]) -> [[BigInt; 2]; 2] {
    let mut out = [[BigInt::zero(), BigInt::zero()], [BigInt::zero(), BigInt::zero()]];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        }
    }
    out
}

/// Rebuilds the nine entries of a formal-group element from `(g11, g12)` and
/// the determinant `(-t)^det_exponent`.
///
/// Succeeds iff every entry comes out an integer Laurent polynomial; the
/// failure report lists the fractional entries together with the value of
/// `g11` at the primitive cube root of unity, which is the obstruction.
pub fn reconstruct_from_g(
    g11: &RatPoly,
    g12: &RatPoly,
    det_exponent: i64,
) -> Result<(BurauMatrix, MembershipReport), ReconstructFailure> {
    let d = RatFrac::from_int_poly(&signed_power(det_exponent));
    let c3 = RatFrac::from_int_poly(&poly::cyclo3());
    let t_opt = RatFrac::from_int_poly(&poly::int(&[(1, 1), (2, 1)]));
    let one = RatFrac::one();
    let t = RatFrac::from_poly(RatPoly::monomial(1, BigRational::one()));

    let g11 = RatFrac::from_poly(g11.clone());
    let g12 = RatFrac::from_poly(g12.clone());
    let c3_inv = c3.inv().expect("cyclotomic is nonzero");
    let t_opt_inv = t_opt.inv().expect("t(1+t) is nonzero");

    // Second-row coordinates forced by unitarity and the determinant.
    let g21 = g11.add(&g12.bar().mul(&c3).mul(&d)).neg().mul(&t_opt_inv);
    let g22 = g12.neg().add(&g11.bar().mul(&t).mul(&d)).mul(&t_opt_inv);

    let row = |gk1: &RatFrac, gk2: &RatFrac| {
        let ak1 = one.add(&gk1.mul(&t_opt)).mul(&c3_inv);
        let ak2 = t.mul(&one.sub(gk1)).mul(&c3_inv).add(&t.mul(gk2));
        let ak3 = one.sub(&ak1).sub(&ak2);
        (ak1, ak2, ak3)
    };
    let (a11, a12, a13) = row(&g11, &g12);
    let (a21, a22, a23) = row(&g21, &g22);

    // Third row from the fixed-vector conditions.
    let tm2 = |x: RatFrac| x.scale_mono(-2, &BigRational::one());
    let a31 = tm2(one.sub(&a11).sub(&t.mul(&a21)));
    let a32 = tm2(t.sub(&a12).sub(&t.mul(&a22)));
    let a33 = tm2(
        a11.add(&a12).add(&t.mul(&a21)).add(&t.mul(&a22)).sub(&one).sub(&t).add(&t.mul(&t)),
    );

    let labelled = [
        ((1u8, 1u8), a11),
        ((1, 2), a12),
        ((1, 3), a13),
        ((2, 1), a21),
        ((2, 2), a22),
        ((2, 3), a23),
        ((3, 1), a31),
        ((3, 2), a32),
        ((3, 3), a33),
    ];
    let mut bad = Vec::new();
    let mut entries: [[IntPoly; 3]; 3] = Default::default();
    for ((i, j), frac) in labelled {
        match frac.as_int_poly() {
            Some(p) => entries[(i - 1) as usize][(j - 1) as usize] = p,
            None => bad.push((i, j)),
        }
    }
    if !bad.is_empty() {
        return Err(ReconstructFailure {
            bad_entries: bad,
            g11_at_zeta3: g11.num().eval_zeta3(),
        });
    }
    let m = BurauMatrix::new(entries);
    let report = is_in_formal_burau(&m);
    Ok((m, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn rp(s: &str) -> RatPoly {
        s.parse().unwrap()
    }

    fn frac(num: &str, den: &str) -> RatFrac {
        RatFrac::new(rp(num), rp(den))
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    // Independent determinant oracle: the Leibniz sum over all six
    // permutations of {0,1,2}.
    fn det_leibniz(m: &BurauMatrix) -> IntPoly {
        let perms: [([usize; 3], i64); 6] = [
            ([0, 1, 2], 1),
            ([1, 2, 0], 1),
            ([2, 0, 1], 1),
            ([0, 2, 1], -1),
            ([1, 0, 2], -1),
            ([2, 1, 0], -1),
        ];
        let mut acc = IntPoly::zero();
        for (p, sign) in perms {
            let prod = m.entry(0, p[0]).mul(m.entry(1, p[1])).mul(m.entry(2, p[2]));
            acc = if sign > 0 { acc.add(&prod) } else { acc.sub(&prod) };
        }
        acc
    }

    #[test]
    fn ratfrac_reduces_to_canonical_form() {
        // (t^2 + t) / (t + 1) = t.
        assert_eq!(frac("t + t^2", "1 + t"), RatFrac::from_poly(rp("t")));
        // (1 - t^2) / (1 + t) = 1 - t.
        assert_eq!(frac("1 - t^2", "1 + t"), RatFrac::from_poly(rp("1 - t")));
        // Denominator t-powers move into the numerator.
        assert_eq!(frac("1", "t^2"), RatFrac::from_poly(rp("t^-2")));
        // Monic normalization keeps equality structural.
        assert_eq!(frac("2", "2 + 2*t"), frac("1", "1 + t"));
    }

    #[test]
    fn ratfrac_field_operations() {
        let a = frac("1", "1 + t");
        let b = frac("t", "1 + t");
        assert_eq!(a.add(&b), RatFrac::one());
        assert_eq!(a.mul(&b).mul(&a.mul(&b).inv().unwrap()), RatFrac::one());
        assert_eq!(a.sub(&a), RatFrac::zero());
        // bar(1/(1+t)) = t/(1+t).
        assert_eq!(a.bar(), b);
    }

    #[test]
    fn generator_matrices_are_pinned() {
        let s1 = BurauMatrix::sigma1();
        assert_eq!(*s1.entry(0, 0), ip("1 - t"));
        assert_eq!(*s1.entry(0, 1), ip("t"));
        assert_eq!(*s1.entry(1, 0), ip("1"));
        let s2 = BurauMatrix::sigma2();
        assert_eq!(*s2.entry(1, 1), ip("1 - t"));
        assert_eq!(*s2.entry(1, 2), ip("t"));
        assert_eq!(*s2.entry(2, 1), ip("1"));
    }

    #[test]
    fn generators_invert_exactly() {
        for letter in [1, 2, -1, -2] {
            let a = BurauMatrix::generator(letter).unwrap();
            let b = BurauMatrix::generator(-letter).unwrap();
            assert_eq!(a.mul(&b), BurauMatrix::identity());
        }
        assert!(matches!(BurauMatrix::generator(3), Err(BurauError::BadLetter(3))));
    }

    #[test]
    fn braid_relation_holds() {
        let lhs = BurauMatrix::from_word(&[1, 2, 1]).unwrap();
        let rhs = BurauMatrix::from_word(&[2, 1, 2]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn full_twist_matches_word_and_is_central() {
        let d = BurauMatrix::delta();
        assert_eq!(d, BurauMatrix::from_word(&[1, 2, 1, 1, 2, 1]).unwrap());
        assert!(BurauMatrix::sigma1().commutes_with_delta());
        assert!(BurauMatrix::sigma2().commutes_with_delta());
    }

    #[test]
    fn determinant_matches_leibniz_oracle() {
        for w in [vec![], vec![1], vec![2, -1], vec![1, 2, 1, 1, 2, 1], vec![1, 1, -2, 1, 2, 2]] {
            let m = BurauMatrix::from_word(&w).unwrap();
            assert_eq!(m.det(), det_leibniz(&m));
        }
        assert_eq!(BurauMatrix::delta().det(), ip("t^6"));
        assert_eq!(BurauMatrix::sigma1().det(), ip("-t"));
    }

    #[test]
    fn membership_of_known_members() {
        for w in [vec![], vec![1], vec![-2], vec![1, 2, 1, 1, 2, 1], vec![1, -2, 1, 1, 2, -1, -1]] {
            let m = BurauMatrix::from_word(&w).unwrap();
            let rep = is_in_formal_burau(&m);
            assert!(rep.member, "word {w:?} must be a member: {rep:?}");
            // Determinant exponent is the signed word length.
            let signed: i64 = w.iter().map(|&l| if l > 0 { 1 } else { -1 }).sum();
            assert_eq!(rep.det_exponent, Some(signed));
            let g = check_gamma(&m);
            assert!(g.member && g.consistent);
        }
    }

    #[test]
    fn membership_flags_localize_failures() {
        // A permutation matrix satisfies the row-sum condition only.
        let p = BurauMatrix::from_strs(&[["0", "1", "0"], ["1", "0", "0"], ["0", "0", "1"]])
            .unwrap();
        let rep = is_in_formal_burau(&p);
        assert!(rep.row_sum);
        assert!(!rep.v_fixed);
        assert!(!rep.member);
        assert!(!p.commutes_with_delta());
        // Scaling a row breaks the row sums but keeps the determinant form.
        let m = BurauMatrix::from_strs(&[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-t"]])
            .unwrap();
        let rep = is_in_formal_burau(&m);
        assert!(!rep.row_sum);
        assert!(rep.det_form);
        assert_eq!(rep.det_exponent, Some(1));
    }

    #[test]
    fn commutation_tracks_v_condition_on_row_sum_matrices() {
        // On matrices with row sums 1, fixing v is equivalent to commuting
        // with the full twist; spot-check both directions.
        for w in [vec![1, 2], vec![-1, 2, 2], vec![1, 1, 1]] {
            let m = BurauMatrix::from_word(&w).unwrap();
            assert!(is_in_formal_burau(&m).v_fixed);
            assert!(m.commutes_with_delta());
        }
        let p = BurauMatrix::from_strs(&[["0", "1", "0"], ["1", "0", "0"], ["0", "0", "1"]])
            .unwrap();
        assert!(is_in_formal_burau(&p).row_sum && !is_in_formal_burau(&p).v_fixed);
        assert!(!p.commutes_with_delta());
    }

    #[test]
    fn f_coords_of_identity() {
        let fc = f_coords(&BurauMatrix::identity()).unwrap();
        assert_eq!(fc.f11, ip("t + t^2"));
        assert_eq!(fc.f12, IntPoly::zero());
        assert_eq!(fc.f21, ip("-1"));
        assert_eq!(fc.f22, ip("t"));
        assert_eq!(fc.g11, RatFrac::one());
        assert_eq!(fc.g21, frac("-1", "t + t^2"));
    }

    #[test]
    fn f_coords_rejects_non_members() {
        let p = BurauMatrix::from_strs(&[["0", "1", "0"], ["1", "0", "0"], ["0", "0", "1"]])
            .unwrap();
        assert!(f_coords(&p).is_err());
    }

    #[test]
    fn phi_of_generators_is_pinned() {
        let p1 = phi(&BurauMatrix::sigma1()).unwrap();
        let m = p1.entries();
        assert_eq!(m[0][0], frac("-t^2", "1 + t"));
        assert_eq!(m[0][1], frac("t", "1 + t"));
        assert_eq!(m[1][0], frac("1 + t + t^2", "1 + t"));
        assert_eq!(m[1][1], frac("1", "1 + t"));
        let p2 = phi(&BurauMatrix::sigma2()).unwrap();
        let m = p2.entries();
        assert_eq!(m[0][0], RatFrac::one());
        assert_eq!(m[0][1], RatFrac::zero());
        assert_eq!(m[1][0], RatFrac::zero());
        assert_eq!(m[1][1], RatFrac::from_poly(rp("-t")));
    }

    #[test]
    fn phi_of_full_twist_is_scalar() {
        let p = phi(&BurauMatrix::delta()).unwrap();
        let m = p.entries();
        assert_eq!(m[0][0], RatFrac::from_poly(rp("t^3")));
        assert_eq!(m[0][1], RatFrac::zero());
        assert_eq!(m[1][1], RatFrac::from_poly(rp("t^3")));
        assert_eq!(p.det_exponent, 6);
    }

    #[test]
    fn phi_is_multiplicative_and_det_preserving() {
        let words: [&[i32]; 4] = [&[1, 2], &[1, -2, 1], &[2, 2, -1, 1, 2], &[-1, -1, 2]];
        for w in words {
            let (w1, w2) = w.split_at(w.len() / 2);
            let a = BurauMatrix::from_word(w1).unwrap();
            let b = BurauMatrix::from_word(w2).unwrap();
            let pa = phi(&a).unwrap();
            let pb = phi(&b).unwrap();
            let pab = phi(&a.mul(&b)).unwrap();
            assert_eq!(pa.mul(&pb), pab);
            // det of the 2x2 image equals det of the source.
            let d = pab.det2();
            assert_eq!(d, RatFrac::from_int_poly(&a.mul(&b).det()));
        }
    }

    #[test]
    fn phi_second_row_matches_direct_definition() {
        // The stored second row (-d Phi bar(g12), d bar(g11)) must agree with
        // the defining combination (t^-1 g11 + (1+t) g21, t^-1 g12 + (1+t) g22).
        for w in [vec![1], vec![2, 1], vec![1, 2, -1, -2, 1]] {
            let a = BurauMatrix::from_word(&w).unwrap();
            let fc = f_coords(&a).unwrap();
            let p = phi(&a).unwrap();
            let m = p.entries();
            let t_inv = RatFrac::from_poly(rp("t^-1"));
            let opt = RatFrac::from_int_poly(&poly::one_plus_t());
            assert_eq!(m[1][0], t_inv.mul(&fc.g11).add(&opt.mul(&fc.g21)));
            assert_eq!(m[1][1], t_inv.mul(&fc.g12).add(&opt.mul(&fc.g22)));
        }
    }

    #[test]
    fn rho_images_of_generators() {
        assert_eq!(rho(&BurauMatrix::sigma1()), [[bi(1), bi(-1)], [bi(0), bi(1)]]);
        assert_eq!(rho(&BurauMatrix::sigma2()), [[bi(1), bi(0)], [bi(1), bi(1)]]);
    }

    #[test]
    fn full_twist_at_minus_one() {
        let b = BurauMatrix::delta().eval_neg1();
        let expect = [[1, -2, 2], [2, -3, 2], [2, -2, 1]].map(|r| r.map(BigInt::from));
        assert_eq!(b, expect);
        assert_eq!(rho(&BurauMatrix::delta()), [[bi(-1), bi(0)], [bi(0), bi(-1)]]);
    }

    #[test]
    fn rho_is_multiplicative_on_members() {
        let words: [&[i32]; 3] = [&[1, 2, -1], &[2, 2, 1], &[-1, -2, -1, 2]];
        for w in words {
            let (w1, w2) = w.split_at(1);
            let a = BurauMatrix::from_word(w1).unwrap();
            let b = BurauMatrix::from_word(w2).unwrap();
            assert_eq!(rho(&a.mul(&b)), mat2_mul(&rho(&a), &rho(&b)));
        }
    }

    #[test]
    fn solutions_at_one_are_constrained() {
        // (f11, f12) at t = 1 solves x^2 + 3 y^2 = 4.
        for w in [vec![], vec![1], vec![2, -1, 2], vec![1, 1, 2, -1, 2, 2]] {
            let fc = f_coords(&BurauMatrix::from_word(&w).unwrap()).unwrap();
            let x = fc.f11.eval_one();
            let y = fc.f12.eval_one();
            assert_eq!(&x * &x + bi(3) * &y * &y, bi(4), "word {w:?}");
        }
    }

    #[test]
    fn reconstruct_round_trips_integral_images() {
        // Words in the second generator and the full twist have integral
        // images under the degree-lowering map.
        for (m, n) in [(0i64, 1i64), (1, 0), (1, 2), (2, -3), (-1, 4)] {
            let mut w = Vec::new();
            for _ in 0..m.abs() {
                let s = if m > 0 { 1 } else { -1 };
                w.extend_from_slice(&[s, 2 * s, s, s, 2 * s, s]);
            }
            for _ in 0..n.abs() {
                w.push(if n > 0 { 2 } else { -2 });
            }
            let a = BurauMatrix::from_word(&w).unwrap();
            let p = phi(&a).unwrap();
            let (g11, g12) = p.integral_pair().expect("image is integral");
            let (back, rep) =
                reconstruct_from_g(&g11.to_rational(), &g12.to_rational(), p.det_exponent)
                    .expect("round trip succeeds");
            assert_eq!(back, a);
            assert!(rep.member);
        }
    }

    #[test]
    fn reconstruct_pinned_examples() {
        let (m, rep) = reconstruct_from_g(&rp("t^3"), &RatPoly::zero(), 6).unwrap();
        assert_eq!(m, BurauMatrix::delta());
        assert!(rep.member);

        let err = reconstruct_from_g(&rp("t"), &RatPoly::zero(), 2).unwrap_err();
        assert!(err.bad_entries.contains(&(1, 1)));
        assert!(!err.g11_at_zeta3.is_one());
    }

    #[test]
    fn integral_image_iff_shadow_corner_vanishes() {
        // The image under phi is integral exactly when the (1,2) entry of the
        // shadow vanishes, equivalently when A11 at t = -1 equals 1.
        let words: [&[i32]; 6] =
            [&[2], &[1], &[1, 2, 1, 1, 2, 1], &[2, 2, -1], &[1, 1], &[-2, 1, 2, -1]];
        for w in words {
            let a = BurauMatrix::from_word(w).unwrap();
            let integral = phi(&a).unwrap().integral_pair().is_some();
            let shadow_zero = rho(&a)[0][1].is_zero();
            let corner_one = a.entry(0, 0).eval_neg1().is_one();
            assert_eq!(integral, shadow_zero, "word {w:?}");
            assert_eq!(integral, corner_one, "word {w:?}");
        }
    }

    #[test]
    fn derivative_identity_for_integral_images() {
        // For members with integral image and det = (-t)^l, the entry A33
        // satisfies 1 - A33(-1) = 2 g11'(-1) - 2 g12'(-1) - l (g12(-1) - g11(-1)).
        let words: [&[i32]; 4] = [&[2], &[2, 2, 2], &[1, 2, 1, 1, 2, 1, 2], &[-2, -2, 1, 2, 1, 1, 2, 1]];
        for w in words {
            let a = BurauMatrix::from_word(w).unwrap();
            let p = phi(&a).unwrap();
            let (g11, g12) = p.integral_pair().expect("integral image");
            let l = p.det_exponent;
            let lhs = BigInt::one() - a.entry(2, 2).eval_neg1();
            let rhs = bi(2) * g11.derivative_eval_neg1() - bi(2) * g12.derivative_eval_neg1()
                + BigInt::from(-l) * (g12.eval_neg1() - g11.eval_neg1());
            assert_eq!(lhs, rhs, "word {w:?}");
        }
    }
}
