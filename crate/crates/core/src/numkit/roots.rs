//! All complex roots of a polynomial by Aberth–Ehrlich iteration followed by
//! Newton polishing.

use num_complex::Complex64;

use super::NumError;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Relative residual bound `|f(r)| <= tol * sum |a_k| |r|^k`.
    pub tol: f64,
    /// Minimum separation, relative to the largest root modulus (floored at 1).
    pub min_separation: f64,
    /// Leading coefficients below this magnitude are rejected.
    pub min_leading: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-13,
            min_separation: 1e-6,
            min_leading: 1e-300,
            max_iter: 500,
        }
    }
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // value and derivative
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn scale_at(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

/// Roots of `sum coeffs[k] p^k`, sorted by (real part, imaginary part).
pub fn roots_numeric(coeffs: &[Complex64], opts: RootOptions) -> Result<Vec<Complex64>, NumError> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().map_or(false, |x| x.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    let lead = c.last().copied().unwrap_or_default();
    if lead.norm() <= opts.min_leading {
        return Err(NumError::LeadingCoefficientVanishes);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // Cauchy bound for the initial circle
    let bound = 1.0 + c[..n].iter().map(|a| (a / lead).norm()).fold(0.0, f64::max);
    let radius = bound.min(1e6) * 0.5 + 1e-3;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius, th)
        })
        .collect();

    for _ in 0..opts.max_iter {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }

    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.norm() <= 1e-17 * zi.norm().max(1e-300) {
                break;
            }
            let cand = *zi - step;
            if horner(&c, cand).0.norm() < p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }

    for zi in &z {
        if !zi.is_finite() {
            return Err(NumError::DegenerateInput("non-finite root".into()));
        }
        let (p, _) = horner(&c, *zi);
        if p.norm() > opts.tol.max(1e-13) * scale_at(&c, *zi) * 1e3 {
            return Err(NumError::DegenerateInput(format!(
                "residual {:e} at root {}",
                p.norm(),
                zi
            )));
        }
    }

    let maxmod = z.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in (i + 1)..n {
            if (z[i] - z[j]).norm() < opts.min_separation * maxmod {
                return Err(NumError::DegenerateInput(format!(
                    "roots {} and {} closer than {:e}",
                    z[i],
                    z[j],
                    opts.min_separation * maxmod
                )));
            }
        }
    }

    z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    Ok(z)
}

/// Relative residual `|f(r)| / sum |a_k| |r|^k`.
pub fn relative_residual(coeffs: &[Complex64], r: Complex64) -> f64 {
    let (p, _) = horner(coeffs, r);
    let s = scale_at(coeffs, r);
    if s == 0.0 {
        0.0
    } else {
        p.norm() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(c: &[f64]) -> Vec<Complex64> {
        c.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn quadratic() {
        let r = roots_numeric(&re(&[-1.0, 0.0, 1.0]), RootOptions::default()).unwrap();
        assert!((r[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-13);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn complex_pair() {
        let r = roots_numeric(&re(&[1.0, 0.0, 1.0]), RootOptions::default()).unwrap();
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-13);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn double_root_is_degenerate() {
        let err = roots_numeric(&re(&[0.0, 0.0, 1.0]), RootOptions::default()).unwrap_err();
        assert!(matches!(err, NumError::DegenerateInput(_)));
    }

    #[test]
    fn vanishing_leading_coefficient() {
        let err = roots_numeric(&re(&[1.0]), RootOptions { min_leading: 2.0, ..Default::default() }).unwrap_err();
        assert_eq!(err, NumError::LeadingCoefficientVanishes);
    }

    #[test]
    fn residuals_small_for_quintic() {
        let c = re(&[0.5, -1.25, 0.0, 2.0, -0.75, 1.0]);
        let r = roots_numeric(&c, RootOptions::default()).unwrap();
        assert_eq!(r.len(), 5);
        for z in r {
            assert!(relative_residual(&c, z) < 1e-13);
        }
    }
}
