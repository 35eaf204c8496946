//! Termwise integration of `x^r y^s Log^k(xy) / (1-xy)^t` over the unit square.
//!
//! Expanding `(1-xy)^-t` as a binomial series and integrating term by term
//! gives `sum_{m>=1} w_t(m) K_k(m; r, s)` with the weight
//! `w_t(m) = binom(m+t-2, t-1)` and the kernels
//!
//! * `K_0 = 1 / ((m+r)(m+s))`
//! * `K_1 = -(2m+r+s) / ((m+r)^2 (m+s)^2)`
//! * `K_2 = 2(3m^2 + 3mr + 3ms + r^2 + rs + s^2) / ((m+r)^3 (m+s)^3)`
//!
//! (`K_1`, `K_2` are the first two derivatives of `K_0` under a common shift of
//! `r` and `s`, which is what multiplying by `Log(xy)` does.) Each product is split
//! into a polynomial part and shifted partial fractions, which
//! [`reduce_terms`](crate::zeta_form::reduce_terms) turns into zeta values.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{int, Poly};
use crate::zeta_form::{reduce_terms, PfTerm, ZetaForm, M_VAR};

pub const XY: [&str; 2] = ["x", "y"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("divergent parts do not cancel: {0}")]
    NonCancellingDivergence(Box<ZetaForm>),
    #[error("malformed integrand piece: {0}")]
    InvalidPiece(String),
}

/// `numerator(x, y) * Log^k(xy) / (1-xy)^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrandPiece {
    pub numerator: Poly,
    pub t: u32,
    pub k: u32,
}

impl IntegrandPiece {
    pub fn new(numerator: Poly, t: u32, k: u32) -> Result<Self, SeriesError> {
        if numerator.vars() != XY {
            return Err(SeriesError::InvalidPiece(format!("numerator variables {:?}", numerator.vars())));
        }
        if t == 0 {
            return Err(SeriesError::InvalidPiece("t must be at least 1".into()));
        }
        if k > 2 {
            return Err(SeriesError::InvalidPiece(format!("log power {k} not supported")));
        }
        if numerator.is_zero() {
            return Err(SeriesError::InvalidPiece("zero numerator".into()));
        }
        Ok(IntegrandPiece { numerator, t, k })
    }
}

/// `numerator(m) / prod_j (m+j)^{e_j}` with dense ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionOfM {
    pub numerator: Vec<BigRational>,
    /// shift `j` -> exponent `e_j`
    pub denominator: BTreeMap<u32, u32>,
}

/// Partial-fraction image of one monomial: shifted terms plus the
/// polynomial part that does not decay.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermSet {
    pub terms: Vec<PfTerm>,
    pub polynomial: Vec<BigRational>,
}

impl TermSet {
    pub fn reduce(&self) -> ZetaForm {
        let mut form = reduce_terms(&self.terms);
        form.divergent_poly = Poly::from_coeffs(M_VAR, &self.polynomial);
        form
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Truncated product of two power series, keeping orders `< n`.
fn series_mul(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Division by a monic polynomial: returns `(quotient, remainder)`.
fn poly_divmod_monic(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    debug_assert!(den.last().is_some_and(One::is_one));
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (k, dk) in den.iter().enumerate() {
            rem[i - dd + k] -= &c * dk;
        }
    }
    rem.truncate(dd);
    (trim(quot), trim(rem))
}

/// Coefficients of `p(h + c)` as a polynomial in `h`.
fn taylor_shift(p: &[BigRational], c: &BigRational) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::new();
    let lin = [c.clone(), BigRational::one()];
    for coeff in p.iter().rev() {
        out = poly_mul(&out, &lin);
        if out.is_empty() {
            out.push(BigRational::zero());
        }
        out[0] += coeff;
    }
    trim(out)
}

impl RationalFunctionOfM {
    pub fn polynomial(numerator: Vec<BigRational>) -> Self {
        RationalFunctionOfM { numerator: trim(numerator), denominator: BTreeMap::new() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut denominator = self.denominator.clone();
        for (j, e) in &other.denominator {
            *denominator.entry(*j).or_insert(0) += e;
        }
        RationalFunctionOfM { numerator: poly_mul(&self.numerator, &other.numerator), denominator }
    }

    /// Expanded denominator polynomial (monic).
    pub fn denominator_poly(&self) -> Vec<BigRational> {
        let mut d = vec![BigRational::one()];
        for (j, e) in &self.denominator {
            let lin = [int(*j as i64), BigRational::one()];
            for _ in 0..*e {
                d = poly_mul(&d, &lin);
            }
        }
        d
    }

    /// Polynomial division followed by repeated-root partial fractions.
    pub fn partial_fractions(&self) -> TermSet {
        let den = self.denominator_poly();
        let (polynomial, rem) = poly_divmod_monic(&self.numerator, &den);
        let mut terms = Vec::new();
        if rem.is_empty() {
            return TermSet { terms, polynomial };
        }
        for (&j, &e) in &self.denominator {
            let order = e as usize;
            // expand around m = -j with m = h - j
            let shift = -int(j as i64);
            let mut local = taylor_shift(&rem, &shift);
            local.resize(order.max(local.len()), BigRational::zero());
            let mut inv_other = vec![BigRational::zero(); order];
            inv_other[0] = BigRational::one();
            for (&j2, &e2) in &self.denominator {
                if j2 == j {
                    continue;
                }
                // 1/(h + d) = sum_i (-1)^i h^i / d^{i+1}
                let d = int(j2 as i64 - j as i64);
                let inv: Vec<BigRational> = (0..order)
                    .map(|i| {
                        let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                        sign / num_traits::pow(d.clone(), i + 1)
                    })
                    .collect();
                for _ in 0..e2 {
                    inv_other = series_mul(&inv_other, &inv, order);
                }
            }
            let g = series_mul(&local, &inv_other, order);
            for (i, c) in g.into_iter().enumerate() {
                if !c.is_zero() {
                    terms.push(PfTerm::new(e - i as u32, j, c));
                }
            }
        }
        TermSet { terms, polynomial }
    }

    pub fn eval(&self, m: &BigRational) -> BigRational {
        let num = self.numerator.iter().rev().fold(BigRational::zero(), |acc, c| acc * m + c);
        let den = self
            .denominator
            .iter()
            .fold(BigRational::one(), |acc, (j, e)| acc * num_traits::pow(m + int(*j as i64), *e as usize));
        num / den
    }
}

/// `binom(m+t-2, t-1) = m(m+1)...(m+t-2)/(t-1)!` as a polynomial in `m`.
pub fn weight(t: u32) -> RationalFunctionOfM {
    assert!(t >= 1, "t must be positive");
    let mut p = vec![BigRational::one()];
    let mut fact = BigRational::one();
    for i in 0..t.saturating_sub(1) {
        p = poly_mul(&p, &[int(i as i64), int(1)]);
        fact *= int(i as i64 + 1);
    }
    let inv = fact.recip();
    RationalFunctionOfM::polynomial(p.into_iter().map(|c| c * &inv).collect())
}

/// Kernel of `x^r y^s Log^k(xy)` for `k` in `{0, 1, 2}`, sign included.
pub fn dk_kernel(k: u32, r: u32, s: u32) -> RationalFunctionOfM {
    let (r, s) = (r as i64, s as i64);
    let numerator = match k {
        0 => vec![int(1)],
        1 => vec![int(-(r + s)), int(-2)],
        2 => vec![int(2 * (r * r + r * s + s * s)), int(6 * (r + s)), int(6)],
        _ => panic!("log power {k} not supported"),
    };
    let mut denominator = BTreeMap::new();
    *denominator.entry(r as u32).or_insert(0) += k + 1;
    *denominator.entry(s as u32).or_insert(0) += k + 1;
    RationalFunctionOfM { numerator, denominator }
}

/// Partial-fraction terms of `sum_{m>=1} w_t(m) K_k(m; r, s)`.
pub fn monomial_terms(r: u32, s: u32, t: u32, k: u32) -> TermSet {
    weight(t).mul(&dk_kernel(k, r, s)).partial_fractions()
}

#[derive(Default)]
struct Accumulator {
    terms: BTreeMap<(u32, u32), BigRational>,
    polynomial: Vec<BigRational>,
}

impl Accumulator {
    fn add(mut self, scale: &BigRational, set: TermSet) -> Self {
        for t in set.terms {
            *self.terms.entry((t.power, t.shift)).or_insert_with(BigRational::zero) += t.coeff * scale;
        }
        if self.polynomial.len() < set.polynomial.len() {
            self.polynomial.resize(set.polynomial.len(), BigRational::zero());
        }
        for (i, c) in set.polynomial.into_iter().enumerate() {
            self.polynomial[i] += c * scale;
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (key, c) in other.terms {
            *self.terms.entry(key).or_insert_with(BigRational::zero) += c;
        }
        if self.polynomial.len() < other.polynomial.len() {
            self.polynomial.resize(other.polynomial.len(), BigRational::zero());
        }
        for (i, c) in other.polynomial.into_iter().enumerate() {
            self.polynomial[i] += c;
        }
        self
    }
}

/// Sum the partial-fraction images of every monomial, without demanding
/// that divergences cancel.
pub fn piece_terms(piece: &IntegrandPiece) -> TermSet {
    let monomials: Vec<_> = piece.numerator.terms().map(|(m, c)| (m[0], m[1], c.clone())).collect();
    let acc = monomials
        .par_iter()
        .fold(Accumulator::default, |acc, (r, s, c)| acc.add(c, monomial_terms(*r, *s, piece.t, piece.k)))
        .reduce(Accumulator::default, Accumulator::merge);
    TermSet {
        terms: acc.terms.into_iter().filter(|(_, c)| !c.is_zero()).map(|((a, j), c)| PfTerm::new(a, j, c)).collect(),
        polynomial: trim(acc.polynomial),
    }
}

/// Exact value of `∫∫ numerator * Log^k(xy) / (1-xy)^t dx dy` as a zeta form.
pub fn integrate_piece(piece: &IntegrandPiece) -> Result<ZetaForm, SeriesError> {
    let form = piece_terms(piece).reduce();
    if form.is_finite() {
        Ok(form)
    } else {
        Err(SeriesError::NonCancellingDivergence(Box::new(form)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    fn xy_poly(terms: &[((u32, u32), i64)]) -> Poly {
        Poly::from_terms(&XY, terms.iter().map(|((a, b), c)| (vec![*a, *b], int(*c))))
    }

    fn pf(a: u32, j: u32, c: BigRational) -> PfTerm {
        PfTerm::new(a, j, c)
    }

    #[test]
    fn weights() {
        assert_eq!(weight(2).numerator, vec![int(0), int(1)]);
        assert_eq!(weight(3).numerator, vec![int(0), rat(1, 2), rat(1, 2)]);
        assert_eq!(weight(1).numerator, vec![int(1)]);
        // t = 4: m(m+1)(m+2)/6
        assert_eq!(weight(4).numerator, vec![int(0), rat(1, 3), rat(1, 2), rat(1, 6)]);
    }

    #[test]
    fn kernels_at_small_shifts() {
        let k2 = dk_kernel(2, 0, 0);
        assert_eq!(k2.numerator, vec![int(0), int(0), int(6)]);
        assert_eq!(k2.denominator, BTreeMap::from([(0, 6)]));
        assert_eq!(k2.partial_fractions().terms, vec![pf(4, 0, int(6))]);
        assert_eq!(dk_kernel(1, 0, 0).partial_fractions().terms, vec![pf(3, 0, int(-2))]);
        assert_eq!(dk_kernel(2, 1, 1).partial_fractions().terms, vec![pf(4, 1, int(6))]);
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(monomial_terms(0, 0, 1, 2), TermSet { terms: vec![pf(4, 0, int(6))], polynomial: vec![] });
        let mut got = monomial_terms(1, 1, 3, 2).terms;
        got.sort();
        assert_eq!(got, vec![pf(2, 1, int(3)), pf(3, 1, int(-3))]);
        let lone = monomial_terms(1, 0, 2, 0);
        assert_eq!(lone.terms, vec![pf(1, 1, int(1))]);
        assert!(!lone.reduce().is_finite());
    }

    #[test]
    fn polynomial_part_is_extracted() {
        // t = 4, k = 0, r = s = 0: m(m+1)(m+2)/(6 m^2) = m/6 + 1/2 + 1/(3m)
        let set = monomial_terms(0, 0, 4, 0);
        assert_eq!(set.polynomial, vec![rat(1, 2), rat(1, 6)]);
        assert_eq!(set.terms, vec![pf(1, 0, rat(1, 3))]);
    }

    #[test]
    fn partial_fractions_reassemble() {
        for (r, s, t, k) in [(0, 3, 5, 2), (2, 2, 4, 1), (5, 1, 2, 0), (4, 4, 6, 2)] {
            let f = weight(t).mul(&dk_kernel(k, r, s));
            let set = f.partial_fractions();
            for m in [1i64, 2, 7, 31] {
                let mq = int(m);
                let poly = set.polynomial.iter().rev().fold(BigRational::zero(), |acc, c| acc * &mq + c);
                let pf_sum = set.terms.iter().fold(BigRational::zero(), |acc, t| {
                    acc + &t.coeff / num_traits::pow(&mq + int(t.shift as i64), t.power as usize)
                });
                assert_eq!(poly + pf_sum, f.eval(&mq), "(r,s,t,k) = {:?}, m = {m}", (r, s, t, k));
            }
        }
    }

    #[test]
    fn piece_examples() {
        let zeta4 = integrate_piece(&IntegrandPiece::new(xy_poly(&[((0, 0), 1)]), 1, 2).unwrap()).unwrap();
        assert_eq!(zeta4, ZetaForm::from_parts(int(0), [(4, int(6))]));

        let base = xy_poly(&[((1, 1), 1), ((2, 1), -1), ((1, 2), -1), ((2, 2), 1)]);
        let i1a = integrate_piece(&IntegrandPiece::new(base.scale(&int(4)), 1, 0).unwrap()).unwrap();
        assert_eq!(i1a, ZetaForm::from_parts(int(-13), [(2, int(8))]));

        let i1c_num = xy_poly(&[
            ((1, 1), 1), ((2, 1), -1), ((1, 2), -1), ((2, 2), 3), ((3, 2), -2),
            ((2, 3), -2), ((3, 3), 3), ((4, 3), -1), ((3, 4), -1), ((4, 4), 1),
        ]);
        let i1c = integrate_piece(&IntegrandPiece::new(i1c_num, 3, 2).unwrap()).unwrap();
        assert_eq!(i1c, ZetaForm::from_parts(rat(-423, 8), [(4, int(108)), (3, int(-64)), (2, int(8))]));

        let one_plus_xy = xy_poly(&[((0, 0), 1), ((1, 1), 1)]);
        let i1b_num = (&base * &one_plus_xy).scale(&int(4));
        let i1b = integrate_piece(&IntegrandPiece::new(i1b_num, 2, 1).unwrap()).unwrap();
        assert_eq!(i1b, ZetaForm::from_parts(int(-51), [(2, int(-16)), (3, int(64))]));
    }

    #[test]
    fn lone_divergent_piece_is_an_error() {
        let err = integrate_piece(&IntegrandPiece::new(xy_poly(&[((1, 0), 1)]), 2, 0).unwrap()).unwrap_err();
        match err {
            SeriesError::NonCancellingDivergence(form) => assert_eq!(form.divergent_harmonic, int(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_pieces_rejected() {
        assert!(IntegrandPiece::new(xy_poly(&[((0, 0), 1)]), 0, 0).is_err());
        assert!(IntegrandPiece::new(xy_poly(&[((0, 0), 1)]), 1, 3).is_err());
        assert!(IntegrandPiece::new(Poly::zero(&XY), 1, 0).is_err());
        assert!(IntegrandPiece::new(Poly::one(&["u"]), 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_in_r_and_s(r in 0u32..7, s in 0u32..7, t in 1u32..6, k in 0u32..3) {
            prop_assert_eq!(monomial_terms(r, s, t, k).reduce(), monomial_terms(s, r, t, k).reduce());
        }

        #[test]
        fn piece_integration_is_linear(a in prop::collection::vec(((0u32..4, 0u32..4), -4i64..4), 1..5),
                                        b in prop::collection::vec(((0u32..4, 0u32..4), -4i64..4), 1..5),
                                        t in 1u32..4, k in 0u32..3) {
            let pa = xy_poly(&a);
            let pb = xy_poly(&b);
            let sum = &pa + &pb;
            prop_assume!(!pa.is_zero() && !pb.is_zero() && !sum.is_zero());
            let fa = piece_terms(&IntegrandPiece::new(pa, t, k).unwrap()).reduce();
            let fb = piece_terms(&IntegrandPiece::new(pb, t, k).unwrap()).reduce();
            let fs = piece_terms(&IntegrandPiece::new(sum, t, k).unwrap()).reduce();
            prop_assert_eq!(fs, crate::zeta_form::form_combine(&fa, &fb, &int(1)));
        }
    }
}
