//! Student t critical values by quadrature of the density and bisection.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Density of Student's t with `nu` degrees of freedom.
pub fn t_pdf(t: f64, nu: f64) -> f64 {
    let log_norm = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln();
    (log_norm - (nu + 1.0) / 2.0 * (t * t / nu).ln_1p()).exp()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `P(T > t)` for `t >= 0`.
pub fn t_upper_tail(t: f64, nu: f64) -> f64 {
    0.5 - integrate(|s| t_pdf(s, nu), 0.0, t, 1e-13)
}

/// The value with upper-tail probability `alpha` under Student's t with
/// `nu` degrees of freedom, to about 1e-9.
pub fn t_critical(alpha: f64, nu: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if nu == 0 {
        return Err(Error::InvalidArgument("degrees of freedom must be positive".into()));
    }
    if alpha == 0.5 {
        return Ok(0.0);
    }
    if alpha > 0.5 {
        return t_critical(1.0 - alpha, nu).map(|t| -t);
    }
    let nu = nu as f64;
    let (mut lo, mut hi) = (0.0, 200.0);
    while t_upper_tail(hi, nu) > alpha {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if t_upper_tail(mid, nu) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn cauchy_quantile() {
        // nu = 1 is the Cauchy distribution: t = tan(pi (1/2 - alpha)).
        let t = t_critical(0.1, 1).unwrap();
        let exact = (std::f64::consts::PI * 0.4).tan();
        assert!((t - exact).abs() < 1e-7);
    }

    #[test]
    fn symmetry_and_errors() {
        assert_eq!(t_critical(0.5, 4).unwrap(), 0.0);
        let t = t_critical(0.05, 9).unwrap();
        assert!((t_critical(0.95, 9).unwrap() + t).abs() < 1e-12);
        assert!(t_critical(0.0, 3).is_err());
        assert!(t_critical(1.0, 3).is_err());
        assert!(t_critical(0.05, 0).is_err());
    }

    #[test]
    fn heavy_tail_bracket_expands() {
        let t = t_critical(1e-4, 1).unwrap();
        let exact = (std::f64::consts::PI * (0.5 - 1e-4)).tan();
        assert!((t - exact).abs() / exact < 1e-6);
    }
}
