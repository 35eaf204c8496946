use std::f64::consts::PI;

use num_rational::BigRational;
use rayon::prelude::*;
use twofloat::TwoFloat;

use super::NumericError;
use crate::exact::Poly;
use crate::hp::HpReal;
use crate::series::{IntegrandPiece, XY};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Tanh-sinh quadrature on `[0, 1]` in high precision. The integrand gets
/// both `x` and `1 - x`, computed without cancellation.
pub fn tanh_sinh_hp<F>(f: F, digits: u32) -> Result<HpReal, NumericError>
where
    F: Fn(&HpReal, &HpReal) -> HpReal + Sync,
{
    let w = digits + 10;
    let one = HpReal::from_i64(1, w);
    let two = HpReal::from_i64(2, w);
    let half_pi = HpReal::pi(w) / two.clone();
    let tol = HpReal::from_i64(10, w).powi(digits as usize).recip();
    // nodes beyond |t| = t_max have weights below 10^-digits
    let t_max = ((digits as f64 * std::f64::consts::LN_10 * 2.0 / PI).ln() + 1.0).max(3.0);

    let node = |t: f64| -> (HpReal, HpReal, HpReal) {
        let t_hp = HpReal::from_f64(t, w);
        let et = t_hp.exp();
        let sinh = (&et - &et.recip()) / two.clone();
        let cosh = (&et + &et.recip()) / two.clone();
        let s = &half_pi * &sinh;
        let e2s = (&s * &two).exp();
        let x = &e2s / &(&one + &e2s);
        let xc = &one / &(&one + &e2s);
        // dx/dt = (pi/2) cosh t * x (1 - x) * 2
        let wt = &half_pi * &cosh * &x * &xc * two.clone();
        (x, xc, wt)
    };

    let mut prev: Option<HpReal> = None;
    for level in 3..=12u32 {
        let h = 1.0 / (1u64 << level) as f64;
        let count = (t_max / h).ceil() as i64;
        let terms: Vec<HpReal> = (-count..=count)
            .into_par_iter()
            .map(|j| {
                let (x, xc, wt) = node(j as f64 * h);
                if x.is_zero() || xc.is_zero() {
                    return HpReal::zero(w);
                }
                f(&x, &xc) * wt
            })
            .collect();
        let sum = terms.into_iter().fold(HpReal::zero(w), |a, b| a + b) * HpReal::from_f64(h, w);
        if let Some(p) = &prev {
            if (&sum - p).abs() < tol {
                return Ok(sum);
            }
        }
        prev = Some(sum);
    }
    let last = prev.expect("at least one level");
    Err(NumericError::NonConvergent { last_change: last.to_f64(), target: tol.to_f64() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub level: u32,
}

/// Dense coefficients of a polynomial in (x, y) as double-double numbers.
struct Dense {
    coeffs: Vec<Vec<TwoFloat>>,
}

fn to_twofloat(q: &BigRational) -> TwoFloat {
    let hi = super::rational_to_f64(q);
    let rest = q - BigRational::from_float(hi).expect("finite coefficient");
    TwoFloat::new_add(hi, super::rational_to_f64(&rest))
}

impl Dense {
    fn from_poly(p: &Poly) -> Self {
        let dx = p.degree_in(0) as usize;
        let dy = p.degree_in(1) as usize;
        let mut coeffs = vec![vec![TwoFloat::from(0.0); dy + 1]; dx + 1];
        for (m, c) in p.terms() {
            coeffs[m[0] as usize][m[1] as usize] = to_twofloat(c);
        }
        Dense { coeffs }
    }

    /// Coefficients of `y^j` after substituting a value for the first variable.
    fn collapse(&self, x: f64) -> Vec<TwoFloat> {
        let dy = self.coeffs[0].len();
        let mut out = vec![TwoFloat::from(0.0); dy];
        for row in self.coeffs.iter().rev() {
            for (o, c) in out.iter_mut().zip(row) {
                *o = *o * x + *c;
            }
        }
        out
    }
}

fn horner(coeffs: &[TwoFloat], y: f64) -> f64 {
    let mut acc = TwoFloat::from(0.0);
    for c in coeffs.iter().rev() {
        acc = acc * y + *c;
    }
    acc.hi() + acc.lo()
}

struct Node {
    x: f64,
    xc: f64,
    w: f64,
}

fn tanh_sinh_nodes(level: u32, t_max: f64) -> Vec<Node> {
    let h = 1.0 / (1u64 << level) as f64;
    let count = (t_max / h).ceil() as i64;
    (-count..=count)
        .filter_map(|j| {
            let t = j as f64 * h;
            let s = PI / 2.0 * t.sinh();
            let x = 1.0 / (1.0 + (-2.0 * s).exp());
            let xc = 1.0 / (1.0 + (2.0 * s).exp());
            let w = h * PI / 2.0 * t.cosh() * 2.0 * x * xc;
            (x > 0.0 && xc > 0.0 && w > 0.0).then_some(Node { x, xc, w })
        })
        .collect()
}

fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// 2-D tanh-sinh quadrature of `N(x,y) Log^k(xy) / (1-xy)^t` over the unit
/// square.
///
/// The numerator is re-expanded around each corner: points with `x >= 1/2`
/// use `a = 1 - x` as the variable (likewise `y`), so that the vanishing of
/// `N` near `(1, 1)` is resolved in relative precision. `1 - xy` is formed as
/// `(1 - x) + x (1 - y)` and the logarithm from `ln_1p` where appropriate.
pub fn quad_piece(p: &IntegrandPiece, digits: u32) -> Result<QuadResult, NumericError> {
    let target = 10f64.powf(-(digits as f64) / 2.0);
    let one = Poly::one(&XY);
    let a = &one - &Poly::var(&XY, "x");
    let b = &one - &Poly::var(&XY, "y");
    let nx = &p.numerator;
    let na = nx.substitute(0, &a);
    let charts = [
        [Dense::from_poly(nx), Dense::from_poly(&nx.substitute(1, &b))],
        [Dense::from_poly(&na), Dense::from_poly(&na.substitute(1, &b))],
    ];
    let (t, k) = (p.t as i32, p.k as i32);

    let t_max = 3.5;
    let mut prev: Option<f64> = None;
    let mut prev_change = f64::INFINITY;
    for level in 3..=8u32 {
        let nodes = tanh_sinh_nodes(level, t_max);
        let rows: Vec<(f64, f64)> = nodes
            .par_iter()
            .map(|nx_| {
                let use_a = nx_.x >= 0.5;
                let xv = if use_a { nx_.xc } else { nx_.x };
                let chart = &charts[use_a as usize];
                let cy = [chart[0].collapse(xv), chart[1].collapse(xv)];
                let lx = if use_a { (-nx_.xc).ln_1p() } else { nx_.x.ln() };
                let vals = nodes.iter().map(|ny| {
                    let use_b = ny.x >= 0.5;
                    let yv = if use_b { ny.xc } else { ny.x };
                    let num = horner(&cy[use_b as usize], yv);
                    if num == 0.0 {
                        return 0.0;
                    }
                    let ly = if use_b { (-ny.xc).ln_1p() } else { ny.x.ln() };
                    let u = nx_.xc + nx_.x * ny.xc;
                    ny.w * num * (lx + ly).powi(k) / u.powi(t)
                });
                let row: Vec<f64> = vals.collect();
                let abs: f64 = row.iter().map(|v| v.abs()).sum::<f64>() * nx_.w;
                (nx_.w * neumaier(row), abs)
            })
            .collect();
        let value = neumaier(rows.iter().map(|r| r.0));
        let magnitude: f64 = rows.iter().map(|r| r.1).sum();
        // below this the change between levels is rounding noise
        let floor = 64.0 * f64::EPSILON * magnitude;
        if let Some(pv) = prev {
            let change = (value - pv).abs();
            if change < target.max(floor) {
                return Ok(QuadResult { value, error_estimate: change.max(floor), level });
            }
            prev_change = change;
        }
        prev = Some(value);
    }
    Err(NumericError::NonConvergent { last_change: prev_change, target })
}
