//! Reduction of the multiple integrals to [`IntegrandPiece`]s and exact forms.
//!
//! The inner integral `J_n(u) = ∫_0^1 (z(1-z))^n / (1-uz)^{n+1} dz` has the
//! closed form `(P(u) + Q(u) L(u)) / u^{2n+1}` with `L(u) = -Log(1-u)`. With
//! `u = 1 - xy` this leaves double integrals over `x, y` whose integrands are
//! polynomials times `Log^k(xy)` over powers of `1 - xy`:
//!
//! * `zeta2`: `∫∫ (x(1-x)y(1-y))^n / (1-xy)^{n+1}`
//! * `zeta3`: `∫∫ (x(1-x)y(1-y))^n J_n(1-xy)` (the `z` integral done)
//! * `zeta4`: `∫∫ (x(1-x)y(1-y))^n (1-xy)^{2n+1} J_n(1-xy)^2` (both `z` and `w`)

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{int, Poly};
use crate::series::{integrate_piece, IntegrandPiece, SeriesError, XY};
use crate::zeta_form::{form_combine, ZetaForm};

pub const U: [&str; 1] = ["u"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Zeta2,
    Zeta3,
    Zeta4,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Zeta2, Family::Zeta3, Family::Zeta4];

    /// The zeta value the family is built around.
    pub fn zeta_index(self) -> u32 {
        match self {
            Family::Zeta2 => 2,
            Family::Zeta3 => 3,
            Family::Zeta4 => 4,
        }
    }

    /// Number of integration variables of the unreduced integral.
    pub fn dimension(self) -> usize {
        self.zeta_index() as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Zeta2 => "zeta2",
            Family::Zeta3 => "zeta3",
            Family::Zeta4 => "zeta4",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeta2" => Ok(Family::Zeta2),
            "zeta3" => Ok(Family::Zeta3),
            "zeta4" => Ok(Family::Zeta4),
            other => Err(format!("unknown family {other:?} (expected zeta2, zeta3 or zeta4)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
}

impl FamilySpec {
    pub fn new(family: Family, n: u32) -> Self {
        FamilySpec { family, n }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.family, self.n)
    }
}

/// `J_n(u) = (p(u) + q(u) L(u)) / u^{2n+1}` with `L(u) = -Log(1-u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProfile {
    pub n: u32,
    pub p: Poly,
    pub q: Poly,
}

fn binomial(n: u32, k: u32) -> BigRational {
    let mut acc = int(1);
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int((i + 1) as i64);
    }
    acc
}

/// Closed form of the inner `z` integral.
///
/// With `v = 1 - uz` and `c = 1 - u` the integral becomes
/// `u^{-(2n+1)} ∫_c^1 ((1-v)(v-c))^n v^{-(n+1)} dv`. Writing the integrand as
/// `sum_i α_i(c) v^{i-n-1}`, every power except `i = n` integrates to
/// `α_i (1 - c^{i-n}) / (i-n)`, a polynomial because `c^{n-i}` divides `α_i`
/// for `i < n`; the `v^{-1}` term gives `α_n(c) L(u)`.
pub fn inner_profile(n: u32) -> InnerProfile {
    // α_i as polynomials in c, from (1-v)^n (v-c)^n
    let c_vars = ["c"];
    let c = Poly::var(&c_vars, "c");
    let mut alpha: Vec<Poly> = vec![Poly::zero(&c_vars); 2 * n as usize + 1];
    for a in 0..=n {
        // (1-v)^n contributes binom(n,a) (-1)^a v^a
        let ca = binomial(n, a) * int(if a % 2 == 0 { 1 } else { -1 });
        for l in 0..=n {
            // (v-c)^n contributes binom(n,l) v^l (-c)^{n-l}
            let sign = if (n - l) % 2 == 0 { 1 } else { -1 };
            let coeff = &ca * binomial(n, l) * int(sign);
            let term = c.pow(n - l).scale(&coeff);
            alpha[(a + l) as usize] = &alpha[a as usize + l as usize] + &term;
        }
    }
    let mut p_c = Poly::zero(&c_vars);
    let one = Poly::one(&c_vars);
    for (i, a_i) in alpha.iter().enumerate() {
        let i = i as i64;
        let d = i - n as i64;
        if d == 0 {
            continue;
        }
        let contrib = if d > 0 {
            // α_i (1 - c^d) / d
            &(a_i * &(&one - &c.pow(d as u32))) * &Poly::constant(&c_vars, int(d).recip())
        } else {
            // α_i (1 - c^{-|d|}) / d = (α_i - α_i / c^{|d|}) / d
            let reduced = a_i.div_var_power(0, (-d) as u32);
            (a_i - &reduced).scale(&int(d).recip())
        };
        p_c = &p_c + &contrib;
    }
    let q_c = alpha[n as usize].clone();
    // c = 1 - u
    let u = Poly::var(&U, "u");
    let c_of_u = &Poly::one(&U) - &u;
    InnerProfile { n, p: p_c.compose(&c_of_u), q: q_c.compose(&c_of_u) }
}

fn base_factor(n: u32) -> Poly {
    let x = Poly::var(&XY, "x");
    let y = Poly::var(&XY, "y");
    let one = Poly::one(&XY);
    let b = &(&x * &(&one - &x)) * &(&y * &(&one - &y));
    b.pow(n)
}

/// Turn `base * N(u) / u^den_power * Log^k(xy)` into a piece, cancelling the
/// largest power of `u = 1 - xy` dividing `N`.
fn make_piece(base: &Poly, numer_u: &Poly, den_power: u32, k: u32) -> Option<IntegrandPiece> {
    if numer_u.is_zero() {
        return None;
    }
    let cancel = numer_u.valuation_in(0).min(den_power - 1);
    let reduced = numer_u.div_var_power(0, cancel);
    let x = Poly::var(&XY, "x");
    let y = Poly::var(&XY, "y");
    let u_of_xy = &Poly::one(&XY) - &(&x * &y);
    let numerator = base * &reduced.compose(&u_of_xy);
    Some(IntegrandPiece::new(numerator, den_power - cancel, k).expect("well-formed piece"))
}

/// Pieces of the reduced double integral, ordered by log power.
pub fn assemble_pieces(spec: FamilySpec) -> Vec<IntegrandPiece> {
    let n = spec.n;
    let base = base_factor(n);
    match spec.family {
        Family::Zeta2 => {
            vec![IntegrandPiece::new(base, n + 1, 0).expect("well-formed piece")]
        }
        Family::Zeta3 => {
            let prof = inner_profile(n);
            // P + Q L with L = -Log(xy)
            [(prof.p.clone(), 0), (-&prof.q, 1)]
                .into_iter()
                .filter_map(|(num, k)| make_piece(&base, &num, 2 * n + 1, k))
                .collect()
        }
        Family::Zeta4 => {
            let prof = inner_profile(n);
            // (1-xy)^{2n+1} (P + Q L)^2 / u^{4n+2} = (P^2 - 2PQ Log + Q^2 Log^2) / u^{2n+1}
            let pp = &prof.p * &prof.p;
            let pq = (&prof.p * &prof.q).scale(&int(-2));
            let qq = &prof.q * &prof.q;
            [(pp, 0), (pq, 1), (qq, 2)]
                .into_iter()
                .filter_map(|(num, k)| make_piece(&base, &num, 2 * n + 1, k))
                .collect()
        }
    }
}

/// Which zeta values survive in a computed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub nonzero_zeta: Vec<u32>,
    pub vanishing_zeta: Vec<u32>,
    /// Only the family's own zeta value (and the rational part) survive.
    pub target_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputedForm {
    pub spec: FamilySpec,
    pub form: ZetaForm,
    pub piece_forms: Vec<(u32, ZetaForm)>,
    pub report: StructuralReport,
}

pub fn structural_report(family: Family, form: &ZetaForm) -> StructuralReport {
    let nonzero_zeta = form.support();
    let max_index = nonzero_zeta.iter().copied().max().unwrap_or(0).max(family.zeta_index());
    let vanishing_zeta = (2..=max_index).filter(|a| form.zeta_coeff(*a).is_zero()).collect();
    let target_only = nonzero_zeta.iter().all(|a| *a == family.zeta_index());
    StructuralReport { nonzero_zeta, vanishing_zeta, target_only }
}

/// Exact value of the family integral as a linear form in zeta values.
pub fn compute_form(spec: FamilySpec) -> Result<ComputedForm, SeriesError> {
    let pieces = assemble_pieces(spec);
    let piece_forms = pieces
        .par_iter()
        .map(|p| integrate_piece(p).map(|f| (p.k, f)))
        .collect::<Result<Vec<_>, _>>()?;
    let form = piece_forms
        .iter()
        .fold(ZetaForm::zero(), |acc, (_, f)| form_combine(&acc, f, &int(1)));
    let report = structural_report(spec.family, &form);
    Ok(ComputedForm { spec, form, piece_forms, report })
}
