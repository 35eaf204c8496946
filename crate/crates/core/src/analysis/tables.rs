use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::AnalysisError;
use crate::exact::lcm_upto;
use crate::hp::HpReal;
use crate::numeric::eval_form;
use crate::reducer::{compute_form, Family, FamilySpec};
use crate::zeta_form::ZetaForm;

fn as_string<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenominatorRow {
    pub n: u32,
    #[serde(serialize_with = "as_string")]
    pub den_rational: BigInt,
    #[serde(serialize_with = "as_string")]
    pub den_zeta: BigInt,
    /// lcm of both denominators: the smallest admissible `T_n`.
    #[serde(serialize_with = "as_string")]
    pub den_form: BigInt,
    #[serde(serialize_with = "as_string")]
    pub lcm_n_pow: BigInt,
    pub divides_lcm_n_pow: bool,
    #[serde(serialize_with = "as_string")]
    pub lcm_2n_pow: BigInt,
    pub divides_lcm_2n_pow: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenominatorReport {
    pub family: Family,
    pub power: u32,
    pub rows: Vec<DenominatorRow>,
}

/// Denominators of computed forms against `lcm(1..n)^k` and `lcm(1..2n)^k`,
/// where `k` is the family's zeta index. Verdicts come straight from the
/// exact values.
pub fn denominator_report(family: Family, forms: &[(u32, ZetaForm)]) -> DenominatorReport {
    let k = family.zeta_index();
    let rows = forms
        .iter()
        .map(|(n, form)| {
            let den_rational = form.rational.denom().clone();
            let den_zeta = form.zeta_coeff(k).denom().clone();
            let den_form = den_rational.lcm(&den_zeta);
            let lcm_n_pow = BigInt::from(lcm_upto(*n as u64)).pow(k);
            let lcm_2n_pow = BigInt::from(lcm_upto(2 * *n as u64)).pow(k);
            DenominatorRow {
                n: *n,
                divides_lcm_n_pow: (&lcm_n_pow % &den_form).is_zero(),
                divides_lcm_2n_pow: (&lcm_2n_pow % &den_form).is_zero(),
                den_rational,
                den_zeta,
                den_form,
                lcm_n_pow,
                lcm_2n_pow,
            }
        })
        .collect();
    DenominatorReport { family, power: k, rows }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub n: u32,
    /// `|I_n|`.
    pub value: HpReal,
    /// `|I_0| * C^n`.
    pub bound: HpReal,
    pub positive: bool,
    pub within_bound: bool,
    /// lcm of the form's denominators.
    #[serde(serialize_with = "as_string")]
    pub scale: BigInt,
    /// `scale * |I_n|`.
    pub scaled_residual: HpReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayTable {
    pub family: Family,
    pub digits: u32,
    pub base_integral: HpReal,
    pub sup_constant: HpReal,
    pub rows: Vec<DecayRow>,
}

/// Numeric `|I_n|` for each form, with the bound `|I_0| C^n` and the scaled
/// residual `T |I_n|` for `T` the denominator of the form.
pub fn decay_table(family: Family, forms: &[(u32, ZetaForm)], digits: u32) -> Result<DecayTable, AnalysisError> {
    if digits < 30 {
        return Err(AnalysisError::InvalidArgument("decay table needs at least 30 digits".into()));
    }
    let base_form = compute_form(FamilySpec::new(family, 0)).map_err(|e| AnalysisError::Series(e.to_string()))?;
    let base_integral = eval_form(&base_form.form, digits)?.abs();
    let sup_constant = super::bounds::sup_ratio(family)?.closed_form_value;
    let zero = HpReal::zero(digits);
    let mut rows = Vec::with_capacity(forms.len());
    for (n, form) in forms {
        let value = eval_form(form, digits)?.abs();
        let bound = &base_integral * &sup_constant.powi(*n as usize);
        let scale = form
            .zeta
            .values()
            .fold(form.rational.denom().clone(), |acc, q| acc.lcm(q.denom()));
        let scaled_residual = &value * &HpReal::from_bigint(&scale, digits + 10);
        rows.push(DecayRow {
            n: *n,
            positive: value > zero,
            within_bound: value <= bound,
            value: value.round_to(digits),
            bound: bound.round_to(digits),
            scale,
            scaled_residual: scaled_residual.round_to(digits),
        });
    }
    Ok(DecayTable {
        family,
        digits,
        base_integral: base_integral.round_to(digits),
        sup_constant: sup_constant.round_to(digits),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use num_traits::One;

    fn low_order_forms() -> Vec<(u32, ZetaForm)> {
        vec![
            (0, ZetaForm::from_parts(int(0), [(4, int(6))])),
            (1, ZetaForm::from_parts(rat(-935, 8), [(4, int(108))])),
            (2, ZetaForm::from_parts(rat(-39185573, 3456), [(4, int(10476))])),
        ]
    }

    #[test]
    fn denominator_verdicts() {
        let rep = denominator_report(Family::Zeta4, &low_order_forms());
        let r0 = &rep.rows[0];
        assert_eq!(r0.den_form, BigInt::one());
        assert!(r0.divides_lcm_n_pow && r0.divides_lcm_2n_pow);
        let r1 = &rep.rows[1];
        assert_eq!(r1.den_rational, BigInt::from(8));
        assert_eq!(r1.lcm_n_pow, BigInt::one());
        assert!(!r1.divides_lcm_n_pow);
        assert_eq!(r1.lcm_2n_pow, BigInt::from(16));
        assert!(r1.divides_lcm_2n_pow);
        let r2 = &rep.rows[2];
        assert_eq!(r2.den_rational, BigInt::from(3456));
        assert_eq!(r2.lcm_2n_pow, BigInt::from(20736));
        assert!(r2.divides_lcm_2n_pow);
        assert!(!r2.divides_lcm_n_pow);
    }

    #[test]
    fn decay_values() {
        let t = decay_table(Family::Zeta4, &low_order_forms(), 30).unwrap();
        assert_eq!(t.rows[0].value.to_fixed(7), "6.4939394");
        assert_eq!(t.rows[1].value.to_fixed(7), "0.0159092");
        assert_eq!(t.rows[1].scaled_residual.to_fixed(6), "0.127274");
        assert_eq!(t.rows[2].value.to_sci(5), "8.2932e-5");
        assert_eq!(t.rows[2].scaled_residual.to_fixed(6), "0.286613");
        assert!(t.rows.iter().all(|r| r.positive && r.within_bound));
    }

    #[test]
    fn low_precision_rejected() {
        assert!(decay_table(Family::Zeta4, &low_order_forms(), 20).is_err());
    }
}
