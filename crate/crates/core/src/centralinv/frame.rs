use num_complex::Complex64 as C;

use super::{CInvError, SamplePoint};
use crate::numkit::{roots_numeric, RootOptions};

/// `lambda(z) = z^{n+1} + sum_k v_k z^{k-1} + u/(z - w)` at complex arguments.
#[derive(Debug, Clone)]
pub struct Superpotential {
    pub v: Vec<C>,
    pub w: C,
    pub u: C,
}

fn falling(k: usize, m: usize) -> f64 {
    (0..m).map(|j| (k - j) as f64).product()
}

impl Superpotential {
    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// `d^m/dz^m` of the polynomial part.
    pub fn plus(&self, z: C, m: usize) -> C {
        let n = self.n();
        let mut s = C::new(0.0, 0.0);
        if m <= n + 1 {
            s += falling(n + 1, m) * z.powu((n + 1 - m) as u32);
        }
        for (k, vk) in self.v.iter().enumerate() {
            let deg = k;
            if m <= deg {
                s += vk * falling(deg, m) * z.powu((deg - m) as u32);
            }
        }
        s
    }

    pub fn deriv(&self, z: C, m: usize) -> C {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let fact: f64 = (1..=m).map(|j| j as f64).product();
        self.plus(z, m) + self.u * sign * fact / (z - self.w).powu(m as u32 + 1)
    }

    pub fn at(&self, z: C) -> C {
        self.deriv(z, 0)
    }

    /// Coefficients (ascending) of `(p - w)^2 lambda'(p)`.
    pub fn critical_polynomial(&self) -> Vec<C> {
        let n = self.n();
        let mut d = vec![C::new(0.0, 0.0); n + 1];
        d[n] = C::new((n + 1) as f64, 0.0);
        for (k, vk) in self.v.iter().enumerate().skip(1) {
            d[k - 1] += vk * k as f64;
        }
        let sq = [self.w * self.w, -2.0 * self.w, C::new(1.0, 0.0)];
        let mut out = vec![C::new(0.0, 0.0); n + 3];
        for (i, a) in d.iter().enumerate() {
            for (j, b) in sq.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out[0] -= self.u;
        out
    }
}

/// Genericity thresholds applied to a point before it is accepted.
#[derive(Debug, Clone, Copy)]
pub struct Gates {
    pub min_u: f64,
    pub min_root_separation: f64,
    pub min_pole_distance: f64,
    pub min_lambda_separation: f64,
    pub min_f: f64,
}

impl Default for Gates {
    fn default() -> Self {
        Gates { min_u: 1e-12, min_root_separation: 1e-8, min_pole_distance: 1e-8, min_lambda_separation: 1e-8, min_f: 1e-10 }
    }
}

impl Gates {
    /// Margins used when drawing random points for sweeps.
    pub fn sampling() -> Self {
        Gates { min_u: 1e-3, min_root_separation: 0.05, min_pole_distance: 0.05, min_lambda_separation: 0.05, min_f: 0.05 }
    }
}

/// Critical points of `lambda`, canonical coordinates and metric.
#[derive(Debug, Clone)]
pub struct CanonicalFrame {
    pub roots: Vec<C>,
    pub lambda: Vec<C>,
    pub f: Vec<C>,
    pub sp: Superpotential,
}

impl CanonicalFrame {
    pub fn permuted(&self, perm: &[usize]) -> CanonicalFrame {
        CanonicalFrame {
            roots: perm.iter().map(|&i| self.roots[i]).collect(),
            lambda: perm.iter().map(|&i| self.lambda[i]).collect(),
            f: perm.iter().map(|&i| self.f[i]).collect(),
            sp: self.sp.clone(),
        }
    }

    /// Largest `|lambda'(r_i)|` relative to the size of the terms.
    pub fn critical_residual(&self) -> f64 {
        self.roots
            .iter()
            .map(|&r| {
                let scale = 1.0 + self.sp.plus(r, 1).norm() + (self.sp.u / (r - self.sp.w).powu(2)).norm();
                self.sp.deriv(r, 1).norm() / scale
            })
            .fold(0.0, f64::max)
    }
}

fn degenerate(gate: &str, margin: f64) -> CInvError {
    CInvError::Degenerate { gate: gate.to_string(), margin }
}

pub fn canonical_frame(point: &SamplePoint, gates: &Gates) -> Result<CanonicalFrame, CInvError> {
    let sp = point.superpotential();
    if sp.u.norm() < gates.min_u {
        return Err(degenerate("u vanishes", sp.u.norm()));
    }
    let opts = RootOptions { min_separation: gates.min_root_separation, ..RootOptions::default() };
    let roots = roots_numeric(&sp.critical_polynomial(), opts).map_err(|e| degenerate(&format!("critical points: {e}"), 0.0))?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for r in &roots {
        let d = (r - sp.w).norm() / scale;
        if d < gates.min_pole_distance {
            return Err(degenerate("critical point near the pole w", d));
        }
    }
    for i in 0..roots.len() {
        for j in 0..i {
            let d = (roots[i] - roots[j]).norm() / scale;
            if d < gates.min_root_separation {
                return Err(degenerate("coincident critical points", d));
            }
        }
    }
    let lambda: Vec<C> = roots.iter().map(|&r| sp.at(r)).collect();
    let f: Vec<C> = roots.iter().map(|&r| sp.deriv(r, 2)).collect();
    let lscale = lambda.iter().map(|l| l.norm()).fold(1.0, f64::max);
    for i in 0..lambda.len() {
        for j in 0..i {
            let d = (lambda[i] - lambda[j]).norm() / lscale;
            if d < gates.min_lambda_separation {
                return Err(degenerate("coincident canonical coordinates", d));
            }
        }
    }
    let fscale = f.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for x in &f {
        if x.norm() / fscale < gates.min_f {
            return Err(degenerate("vanishing metric entry", x.norm() / fscale));
        }
    }
    Ok(CanonicalFrame { roots, lambda, f, sp })
}
