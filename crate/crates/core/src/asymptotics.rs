//! Floating-point special functions and asymptotic estimates, all in natural
//! log space where magnitudes grow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-16;
pub const DEFAULT_MAX_TERMS: usize = 10_000_000;

/// Parameters for the q-series below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub q: f64,
    pub tolerance: f64,
    pub max_terms: usize,
}

impl SeriesParams {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Domain(format!("q = {q} outside [0, 1)")));
        }
        Ok(SeriesParams { q, tolerance: DEFAULT_TOLERANCE, max_terms: DEFAULT_MAX_TERMS })
    }

    /// `q = m / (m + n)`.
    pub fn for_size(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        Self::new(m as f64 / (m + n) as f64)
    }

    pub fn z(&self) -> f64 {
        -self.q.ln()
    }

    /// `sum_j (-1)^j w(j) q^J(j)` with `J(j) = j(j+1)/2`, stopped once a term
    /// falls below `tolerance * |partial sum|`.
    fn alternating(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let q = self.q;
        let mut power = 1.0; // q^J(j)
        let mut qj = 1.0; // q^j
        let mut sum = 0.0;
        for j in 0..self.max_terms {
            let term = weight(j as f64) * power;
            sum += if j % 2 == 0 { term } else { -term };
            qj *= q;
            power *= qj;
            if power == 0.0 || weight(j as f64 + 1.0) * power < self.tolerance * sum.abs() {
                break;
            }
        }
        sum
    }

    /// `sum_{j >= 1} ln(1 - q^j)`.
    fn log_euler(&self) -> f64 {
        let mut sum = 0.0;
        let mut qj = self.q;
        for _ in 0..self.max_terms {
            if qj < self.tolerance * 1e-3 {
                break;
            }
            sum += (-qj).ln_1p();
            qj *= self.q;
        }
        sum
    }
}

/// The partial theta function `f(q) = sum_j (-1)^j q^J(j)`.
pub fn partial_theta_f(q: f64) -> Result<f64> {
    Ok(SeriesParams::new(q)?.alternating(|_| 1.0))
}

/// Both sides of `sum_j (-1)^j (2j+1) q^J(j) = prod_j (1 - q^j)^3`.
pub fn jacobi_sides(q: f64) -> Result<(f64, f64)> {
    let p = SeriesParams::new(q)?;
    let lhs = p.alternating(|j| 2.0 * j + 1.0);
    let rhs = (3.0 * p.log_euler()).exp();
    Ok((lhs, rhs))
}

/// `ln prod_j (1 - q^j)` and its small-`z` approximation
/// `-pi^2/(6z) - ln(z/2pi)/2`, `z = -ln q`.
pub fn euler_log(q: f64) -> Result<(f64, f64)> {
    if q <= 0.0 {
        return Err(Error::Domain(format!("q = {q} must be positive")));
    }
    let p = SeriesParams::new(q)?;
    let z = p.z();
    let freiman = -PI * PI / (6.0 * z) - 0.5 * (z / (2.0 * PI)).ln();
    Ok((p.log_euler(), freiman))
}

/// `ln C(n, k)` via log-gamma.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_binomial(n as u64, k as u64)
}

/// `ln C_n`.
pub fn ln_catalan(n: usize) -> f64 {
    ln_choose(2 * n, n) - ((n + 1) as f64).ln()
}

/// Largest `m` for which the asymptotic formula is claimed, with the slowly
/// growing slack taken as `ln ln n`. Zero when the expression is not
/// positive.
pub fn asymptotic_m_limit(n: usize, l: usize) -> f64 {
    let ln_n = (n as f64).ln();
    let lln = ln_n.ln();
    if !lln.is_finite() {
        return 0.0;
    }
    let v = 2.0 / (PI * PI) * n as f64 * (ln_n - 0.5 * (l as f64 + 2.0) * lln - lln);
    v.max(0.0)
}

/// Log of the asymptotic estimate of `[x^m y^n] T^l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticValue {
    pub ln_value: f64,
    /// Set when `m` exceeds [`asymptotic_m_limit`]; the value is then only
    /// indicative.
    pub advisory: bool,
}

pub fn asymptotic_t(n: usize, m: usize, l: usize) -> Result<AsymptoticValue> {
    if n == 0 || l == 0 {
        return Err(Error::Domain("asymptotic_t needs n >= 1 and l >= 1".into()));
    }
    let p = SeriesParams::for_size(n, m)?;
    let f = p.alternating(|_| 1.0);
    let ln_value = (l as f64).ln()
        + (l as f64 - 1.0) * (2.0 * f).ln()
        + ln_choose(n + m - 1, n - 1)
        + ln_catalan(n)
        + 3.0 * p.log_euler();
    Ok(AsymptoticValue { ln_value, advisory: m as f64 > asymptotic_m_limit(n, l) })
}

/// Limit law `(j+1)(1-p)^2 p^j` of the number of cuts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutLaw {
    pub p: f64,
}

impl CutLaw {
    pub fn pmf(&self, j: usize) -> f64 {
        let p = self.p;
        (j as f64 + 1.0) * (1.0 - p) * (1.0 - p) * p.powi(j as i32)
    }

    pub fn mean(&self) -> f64 {
        2.0 * self.p / (1.0 - self.p)
    }
}

/// `p = 1 - 1/(2 f(q))`.
pub fn cut_law(q: f64) -> Result<CutLaw> {
    let f = partial_theta_f(q)?;
    Ok(CutLaw { p: 1.0 - 1.0 / (2.0 * f) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower_log: f64,
    pub upper_log: f64,
    /// `m >= n^{3/2}`: the lower bound is outside the range where it is
    /// established.
    pub lower_outside_regime: bool,
}

/// `C_n C(n+m-1, n-1) exp(-2 (m/n) ln n) <~ T_{n,m} <= C_n C(n+m-1, n-1)`.
pub fn bounds_t(n: usize, m: usize) -> Result<Bounds> {
    if n == 0 {
        return Err(Error::Domain("bounds_t needs n >= 1".into()));
    }
    let upper_log = ln_catalan(n) + ln_choose(n + m - 1, n - 1);
    let lower_log = upper_log - 2.0 * (m as f64 / n as f64) * (n as f64).ln();
    Ok(Bounds {
        lower_log,
        upper_log,
        lower_outside_regime: m as f64 >= (n as f64).powf(1.5),
    })
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Log of the upper bound on connected diagrams with `nu` chords and `mu`
/// crossings: the smaller of
/// `(4^nu/nu^2) (mu+nu)^(mu+nu) / (mu^mu nu^nu)` and
/// `(3nu+mu)^(3nu+mu) / ((3nu)^(3nu) mu^mu)`.
pub fn bounds_connected(nu: usize, mu: usize) -> Result<f64> {
    if nu == 0 || mu + 1 < nu {
        return Err(Error::Domain(format!("no connected diagram with nu = {nu}, mu = {mu}")));
    }
    let (v, u) = (nu as f64, mu as f64);
    let a = v * 4f64.ln() - 2.0 * v.ln() + xlnx(u + v) - xlnx(u) - xlnx(v);
    let b = xlnx(3.0 * v + u) - xlnx(3.0 * v) - xlnx(u);
    Ok(a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert_eq!(partial_theta_f(0.0).unwrap(), 1.0);
        assert!((partial_theta_f(0.5).unwrap() - 0.61032).abs() < 1e-4);
        let f = partial_theta_f(0.999).unwrap();
        assert!(f > 0.5 && f < 0.52);
        assert!(partial_theta_f(1.0).is_err());
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_sides(0.0).unwrap(), (1.0, 1.0));
        let (l, r) = jacobi_sides(0.5).unwrap();
        assert!((l - 0.02408).abs() < 1e-5);
        assert!((l - r).abs() <= 1e-12);
    }

    #[test]
    fn euler_examples() {
        let (e, _) = euler_log(0.5).unwrap();
        assert!((e - 0.288788f64.ln()).abs() < 1e-5);
        assert!(euler_log(1e-12).unwrap().0.abs() < 1e-11);
        let (e, f) = euler_log(0.99).unwrap();
        assert!((e - f).abs() <= -(0.99f64).ln());
        assert!(euler_log(0.0).is_err() && euler_log(1.0).is_err());
    }

    #[test]
    fn cut_law_examples() {
        let law = cut_law(0.0).unwrap();
        assert_eq!(law.p, 0.5);
        assert!((law.pmf(3) - 4.0 * 2f64.powi(-5)).abs() < 1e-15);
        assert!((cut_law(0.5).unwrap().p - 0.1807).abs() < 1e-4);
        for q in [0.0, 0.3, 0.5, 0.8] {
            let law = cut_law(q).unwrap();
            let s: f64 = (0..=200).map(|j| law.pmf(j)).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn small_asymptotic_values() {
        // l = 2, n = 2, m = 0: 2 * 2 * 1 * 2 * 1 = 8.
        let v = asymptotic_t(2, 0, 2).unwrap();
        assert!((v.ln_value - 8f64.ln()).abs() < 1e-12);
        let v = asymptotic_t(7, 0, 1).unwrap();
        assert!((v.ln_value - 429f64.ln()).abs() < 1e-10);
        assert!(asymptotic_t(1000, 1000, 1).unwrap().advisory);
        assert!(!asymptotic_t(1000, 100, 1).unwrap().advisory);
    }

    #[test]
    fn bounds_examples() {
        let b = bounds_t(10, 0).unwrap();
        assert!((b.upper_log - 16796f64.ln()).abs() < 1e-9);
        assert!(b.lower_log <= b.upper_log);
        assert!(bounds_t(10, 40).unwrap().lower_outside_regime);
        assert!(bounds_connected(2, 1).unwrap() >= 0.0);
        assert!(bounds_connected(3, 1).is_err());
    }
}
