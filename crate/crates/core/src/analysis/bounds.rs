use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::exact::rat;
use crate::hp::HpReal;
use crate::reducer::Family;

const GRID: usize = 64;
const WORK_DIGITS: u32 = 50;

#[derive(Clone, Debug, Serialize)]
pub struct BoundCertificate {
    pub family: Family,
    pub closed_form: String,
    pub closed_form_value: HpReal,
    pub numeric_sup: HpReal,
    pub argmax: Vec<f64>,
    /// Euclidean norm of the analytic gradient of the ratio at `argmax`.
    pub gradient_norm: f64,
    /// Largest gap between analytic and central-difference partials.
    pub finite_difference_gap: f64,
    /// Largest ratio seen on the grid scan.
    pub grid_max: f64,
    pub exponent: String,
    pub decay_product: HpReal,
    pub satisfied: bool,
}

/// The family's integrand ratio, whose n-th power bounds the integrand
/// against the base integrand. Coordinates beyond the family's dimension
/// are ignored.
pub fn ratio(family: Family, p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    let bxy = x * (1.0 - x) * y * (1.0 - y);
    let u = 1.0 - x * y;
    match family {
        Family::Zeta2 => bxy / u,
        Family::Zeta3 => bxy * p[2] * (1.0 - p[2]) / (1.0 - u * p[2]),
        Family::Zeta4 => {
            let (z, w) = (p[2], p[3]);
            bxy * z * (1.0 - z) * w * (1.0 - w) * u * u / ((1.0 - u * z) * (1.0 - u * w))
        }
    }
}

fn ratio_hp(family: Family, p: &[f64]) -> HpReal {
    let d = WORK_DIGITS + 10;
    let c: Vec<HpReal> = p.iter().map(|v| HpReal::from_f64(*v, d)).collect();
    let one = HpReal::from_i64(1, d);
    let om = |v: &HpReal| &one - v;
    let bxy = &c[0] * &om(&c[0]) * &c[1] * &om(&c[1]);
    let u = om(&(&c[0] * &c[1]));
    match family {
        Family::Zeta2 => bxy / u,
        Family::Zeta3 => bxy * &c[2] * om(&c[2]) / om(&(&u * &c[2])),
        Family::Zeta4 => {
            let num = bxy * &c[2] * om(&c[2]) * &c[3] * om(&c[3]) * &u * &u;
            num / (om(&(&u * &c[2])) * om(&(&u * &c[3])))
        }
    }
}

/// Analytic gradient of `log ratio` in full coordinates.
fn grad_log(family: Family, p: &[f64]) -> Vec<f64> {
    let (x, y) = (p[0], p[1]);
    let u = 1.0 - x * y;
    let edge = |v: f64| 1.0 / v - 1.0 / (1.0 - v);
    match family {
        Family::Zeta2 => vec![edge(x) + y / u, edge(y) + x / u],
        Family::Zeta3 => {
            let z = p[2];
            let d = 1.0 - u * z;
            vec![edge(x) - y * z / d, edge(y) - x * z / d, edge(z) + u / d]
        }
        Family::Zeta4 => {
            let (z, w) = (p[2], p[3]);
            let (dz, dw) = (1.0 - u * z, 1.0 - u * w);
            vec![
                edge(x) - 2.0 * y / u - y * z / dz - y * w / dw,
                edge(y) - 2.0 * x / u - x * z / dz - x * w / dw,
                edge(z) + u / dz,
                edge(w) + u / dw,
            ]
        }
    }
}

/// Search coordinates: zeta4 is scanned on the symmetric slice `z = w`.
fn reduced_dim(family: Family) -> usize {
    match family {
        Family::Zeta2 => 2,
        Family::Zeta3 | Family::Zeta4 => 3,
    }
}

fn expand(family: Family, q: &[f64]) -> Vec<f64> {
    match family {
        Family::Zeta4 => vec![q[0], q[1], q[2], q[2]],
        _ => q.to_vec(),
    }
}

fn reduced_grad(family: Family, q: &[f64]) -> Vec<f64> {
    let g = grad_log(family, &expand(family, q));
    match family {
        Family::Zeta4 => vec![g[0], g[1], g[2] + g[3]],
        _ => g,
    }
}

fn grid_scan(family: Family) -> (f64, Vec<f64>) {
    let dim = reduced_dim(family);
    let total = GRID.pow(dim as u32);
    let coord = |i: usize| (i as f64 + 0.5) / GRID as f64;
    let point = |idx: usize| -> Vec<f64> {
        let mut rem = idx;
        let mut q = Vec::with_capacity(dim);
        for _ in 0..dim {
            q.push(coord(rem % GRID));
            rem /= GRID;
        }
        q
    };
    let (best, idx) = (0..total)
        .into_par_iter()
        .map(|i| (ratio(family, &expand(family, &point(i))), i))
        .reduce(|| (f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    (best, point(idx))
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Damped Newton ascent on `log ratio` from `start`.
fn ascend(family: Family, start: Vec<f64>) -> Result<Vec<f64>, AnalysisError> {
    let dim = start.len();
    let f = |q: &[f64]| ratio(family, &expand(family, q)).ln();
    let mut q = start;
    for _ in 0..200 {
        let g = reduced_grad(family, &q);
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-14 {
            break;
        }
        let h = 1e-6;
        let mut hess = vec![vec![0.0; dim]; dim];
        for j in 0..dim {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += h;
            qm[j] -= h;
            let (gp, gm) = (reduced_grad(family, &qp), reduced_grad(family, &qm));
            for i in 0..dim {
                hess[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let newton = solve(hess, g.iter().map(|v| -v).collect());
        // fall back to the gradient when the Newton step is not an ascent direction
        let dir = match newton {
            Some(d) if d.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() > 0.0 => d,
            _ => g.clone(),
        };
        let f0 = f(&q);
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = q.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            if cand.iter().all(|v| *v > 0.0 && *v < 1.0) && f(&cand) >= f0 {
                q = cand;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if q.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(AnalysisError::NoInteriorMaximum(q));
    }
    Ok(q)
}

fn closed_form(family: Family) -> (&'static str, HpReal) {
    let d = WORK_DIGITS + 10;
    let int = |v: i64| HpReal::from_i64(v, d);
    match family {
        Family::Zeta2 => ("((-1+√5)/2)^5", ((int(5).sqrt() - int(1)) / int(2)).powi(5)),
        Family::Zeta3 => ("(-1+√2)^4", (int(2).sqrt() - int(1)).powi(4)),
        Family::Zeta4 => {
            let r = int(17).sqrt();
            let num = (&r - &int(7)).powi(4) * (&r - &int(3)).powi(2);
            ("(-7+√17)^4 (-3+√17)^2 / (256 (1+√17)^2)", num / (int(256) * (&r + &int(1)).powi(2)))
        }
    }
}

fn exponent(family: Family) -> (String, HpReal) {
    let hundredths = 100 * family.zeta_index() as i64 + 1;
    let text = format!("{}.01", family.zeta_index());
    (text, HpReal::from_rational(&rat(hundredths, 100), WORK_DIGITS + 10))
}

fn gradient_checks(family: Family, p: &[f64]) -> (f64, f64) {
    let r = ratio(family, p);
    let analytic: Vec<f64> = grad_log(family, p).iter().map(|g| g * r).collect();
    let h = 1e-5;
    let mut gap = 0.0f64;
    for (j, a) in analytic.iter().enumerate() {
        let mut pp = p.to_vec();
        let mut pm = p.to_vec();
        pp[j] += h;
        pm[j] -= h;
        let fd = (ratio(family, &pp) - ratio(family, &pm)) / (2.0 * h);
        gap = gap.max((fd - a).abs());
    }
    (analytic.iter().map(|v| v * v).sum::<f64>().sqrt(), gap)
}

/// Maximize the family ratio over the open cube and certify it against the
/// closed-form constant.
pub fn sup_ratio(family: Family) -> Result<BoundCertificate, AnalysisError> {
    let (grid_max, start) = grid_scan(family);
    let q = ascend(family, start)?;
    let argmax = expand(family, &q);
    let (gradient_norm, finite_difference_gap) = gradient_checks(family, &argmax);
    // at a maximum the value is insensitive to first order in the argmax
    let numeric_sup = ratio_hp(family, &argmax).round_to(WORK_DIGITS);
    let (desc, closed) = closed_form(family);
    let closed_form_value = closed.round_to(WORK_DIGITS);
    let (exp_text, exp_val) = exponent(family);
    let decay_product = (exp_val.exp() * &closed).round_to(WORK_DIGITS);
    let tol = HpReal::from_f64(1e-12, WORK_DIGITS);
    let agrees = (&closed_form_value - &numeric_sup).abs() < tol;
    let one = HpReal::from_i64(1, WORK_DIGITS);
    Ok(BoundCertificate {
        family,
        closed_form: desc.to_string(),
        satisfied: agrees && decay_product < one,
        closed_form_value,
        numeric_sup,
        argmax,
        gradient_norm,
        finite_difference_gap,
        grid_max,
        exponent: exp_text,
        decay_product,
    })
}

/// Same certificate; kept as a separate entry point for the decay step.
pub fn decay_certificate(family: Family) -> Result<BoundCertificate, AnalysisError> {
    sup_ratio(family)
}

/// The decay product if the denominators were `lcm(1..2n)^k`, whose growth
/// doubles the exponent.
#[derive(Clone, Debug, Serialize)]
pub struct DoubledLcmDecay {
    pub family: Family,
    pub exponent: String,
    pub product: HpReal,
    pub below_one: bool,
}

pub fn doubled_lcm_decay(family: Family) -> DoubledLcmDecay {
    let (_, closed) = closed_form(family);
    let hundredths = 2 * (100 * family.zeta_index() as i64 + 1);
    let e = HpReal::from_rational(&rat(hundredths, 100), WORK_DIGITS + 10).exp();
    let product = (e * closed).round_to(WORK_DIGITS);
    DoubledLcmDecay {
        family,
        exponent: format!("{}.{:02}", hundredths / 100, hundredths % 100),
        below_one: product < HpReal::from_i64(1, WORK_DIGITS),
        product,
    }
}
