use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector, one entry per variable in the owning polynomial's order.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms live in a `BTreeMap` keyed by exponent vector, so iteration order
/// (and therefore every derived computation) is deterministic. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(vars: &[&str]) -> Self {
        Poly { vars: vars.iter().map(|v| v.to_string()).collect(), terms: BTreeMap::new() }
    }

    fn zero_like(&self) -> Self {
        Poly { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &[&str]) -> Self {
        Self::constant(vars, BigRational::one())
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &[&str], name: &str) -> Self {
        let idx = vars.iter().position(|v| *v == name).expect("unknown variable");
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        let mut p = Self::zero(vars);
        p.add_term(exps, BigRational::one());
        p
    }

    pub fn from_terms<I>(vars: &[&str], terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Dense univariate polynomial from coefficients in ascending degree.
    pub fn from_coeffs(var: &str, coeffs: &[BigRational]) -> Self {
        Self::from_terms(&[var], coeffs.iter().enumerate().map(|(d, c)| (vec![d as u32], c.clone())))
    }

    pub fn add_term(&mut self, exps: Monomial, c: BigRational) {
        assert_eq!(exps.len(), self.vars.len(), "exponent vector arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return self.zero_like();
        }
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.var_refs());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    /// Smallest exponent of `var` over all terms (0 for the zero polynomial).
    pub fn valuation_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).min().unwrap_or(0)
    }

    /// Exact division by `var^e`; panics if some term is not divisible.
    pub fn div_var_power(&self, var: usize, e: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                assert!(m[var] >= e, "term not divisible by {}^{e}", self.vars[var]);
                let mut m = m.clone();
                m[var] -= e;
                (m, c.clone())
            })
            .collect();
        Poly { vars: self.vars.clone(), terms }
    }

    /// Replace variable `var` by the polynomial `repl` (same variable set).
    pub fn substitute(&self, var: usize, repl: &Poly) -> Self {
        assert_eq!(self.vars, repl.vars, "substitution across variable sets");
        let max_deg = self.degree_in(var);
        let mut powers = vec![Poly::one(&self.var_refs())];
        for d in 1..=max_deg as usize {
            powers.push(&powers[d - 1] * repl);
        }
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            rest[var] = 0;
            let mono = Poly::from_terms(&self.var_refs(), [(rest, c.clone())]);
            out = &out + &(&mono * &powers[m[var] as usize]);
        }
        out
    }

    /// Compose a univariate polynomial with `inner`, giving a polynomial in
    /// `inner`'s variables.
    pub fn compose(&self, inner: &Poly) -> Self {
        assert_eq!(self.nvars(), 1, "compose expects a univariate outer polynomial");
        let deg = self.degree_in(0);
        let mut acc = inner.zero_like();
        for d in (0..=deg).rev() {
            acc = &acc * inner;
            let c = self.coeff(&[d]);
            if !c.is_zero() {
                acc.add_term(vec![0; inner.nvars()], c);
            }
        }
        acc
    }

    /// Dense coefficient list of a univariate polynomial, ascending degree.
    pub fn to_coeffs(&self) -> Vec<BigRational> {
        assert_eq!(self.nvars(), 1, "to_coeffs expects a univariate polynomial");
        if self.is_zero() {
            return Vec::new();
        }
        let deg = self.degree_in(0) as usize;
        let mut out = vec![BigRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m[0] as usize] = c.clone();
        }
        out
    }

    fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }
}

/// Exact expansion of `p^e`.
pub fn poly_pow_expand(p: &Poly, e: u32) -> Poly {
    p.pow(e)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.vars, rhs.vars, "adding polynomials over different variables");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.vars, rhs.vars, "multiplying polynomials over different variables");
        let mut out = self.zero_like();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // highest total degree first reads most naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let factors: Vec<String> = m
                .iter()
                .zip(self.vars.iter())
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use proptest::prelude::*;

    const XY: [&str; 2] = ["x", "y"];

    fn x() -> Poly {
        Poly::var(&XY, "x")
    }
    fn y() -> Poly {
        Poly::var(&XY, "y")
    }
    fn one() -> Poly {
        Poly::one(&XY)
    }

    #[test]
    fn pow_expand_examples() {
        let z = Poly::var(&["z"], "z");
        let p = &z - &(&z * &z);
        let expected = Poly::from_terms(&["z"], [(vec![2], int(1)), (vec![3], int(-2)), (vec![4], int(1))]);
        assert_eq!(poly_pow_expand(&p, 2), expected);
        assert_eq!(poly_pow_expand(&p, 0), Poly::one(&["z"]));

        let base = &(&x() * &(&one() - &x())) * &(&y() * &(&one() - &y()));
        let expected = Poly::from_terms(
            &XY,
            [(vec![1, 1], int(1)), (vec![2, 1], int(-1)), (vec![1, 2], int(-1)), (vec![2, 2], int(1))],
        );
        assert_eq!(poly_pow_expand(&base, 1), expected);
    }

    #[test]
    fn zero_terms_are_dropped() {
        let p = &x() - &x();
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
        assert!(x().scale(&int(0)).is_zero());
    }

    #[test]
    fn compose_and_substitute() {
        // (1 - u)^2 with u = xy
        let u = Poly::var(&["u"], "u");
        let outer = (&Poly::one(&["u"]) - &u).pow(2);
        let xy = &x() * &y();
        let composed = outer.compose(&xy);
        assert_eq!(composed, (&one() - &xy).pow(2));
        // x -> 1 - x applied twice is the identity
        let p = &(&x() * &x()) + &(&y() * &int_poly(3));
        let flip = &one() - &x();
        assert_eq!(p.substitute(0, &flip).substitute(0, &flip), p);
    }

    fn int_poly(v: i64) -> Poly {
        Poly::constant(&XY, int(v))
    }

    #[test]
    fn valuation_and_division() {
        let u = Poly::var(&["u"], "u");
        let p = &u.pow(3) + &u.pow(5).scale(&int(2));
        assert_eq!(p.valuation_in(0), 3);
        assert_eq!(p.div_var_power(0, 3), &Poly::one(&["u"]) + &u.pow(2).scale(&int(2)));
    }

    #[test]
    fn display_reads_naturally() {
        let p = &(&(&x() * &y()) - &x().scale(&crate::exact::rat(3, 2))) + &int_poly(-1);
        assert_eq!(p.to_string(), "x*y - 3/2*x - 1");
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3), -5i64..5), 0..5).prop_map(|ts| {
            Poly::from_terms(&XY, ts.into_iter().map(|((a, b), c)| (vec![a, b], int(c))))
        })
    }

    proptest! {
        #[test]
        fn multiplication_commutes_and_associates(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
