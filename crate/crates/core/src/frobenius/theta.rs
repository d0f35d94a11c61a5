use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::Serialize;

use super::FrobError;
use crate::centralinv::SamplePoint;
use crate::numkit::laurent::{series_log, series_pow};
use crate::numkit::{int, rat, rat_to_f64, Scalar};

/// `sum_k c[k] t^{val + k}` with `t = 1/p`, known for `k < c.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtInf {
    pub val: i64,
    pub c: Vec<Scalar>,
}

impl AtInf {
    pub fn coeff(&self, e: i64) -> Result<Scalar, FrobError> {
        let k = e - self.val;
        if k < 0 {
            return Ok(Scalar::default());
        }
        self.c.get(k as usize).cloned().ok_or(FrobError::TruncationExhausted { depth: self.c.len(), needed: k as usize + 1 })
    }

    /// `res_{p = inf} f dp = -[t^1] f`.
    pub fn res_inf(&self) -> Result<Scalar, FrobError> {
        Ok(-self.coeff(1)?)
    }

    pub fn mul(&self, o: &AtInf) -> AtInf {
        let len = self.c.len().min(o.c.len());
        let mut c = vec![Scalar::default(); len];
        for (i, a) in self.c.iter().enumerate().take(len) {
            for (j, b) in o.c.iter().enumerate().take(len - i) {
                c[i + j] += a * b;
            }
        }
        AtInf { val: self.val + o.val, c }
    }
}

/// `t^{-(n+1)} g(t)` for `lambda`, `g(0) = 1`.
pub fn lambda_at_inf(point: &SamplePoint, len: usize) -> AtInf {
    let n = point.n();
    let mut g = vec![Scalar::default(); len];
    g[0] = int(1);
    for (k, vk) in point.v.iter().enumerate() {
        let e = n + 1 - k;
        if e < len {
            g[e] += vk;
        }
    }
    let mut wj = int(1);
    for e in (n + 2)..len {
        g[e] += &point.u * &wj;
        wj *= &point.w;
    }
    AtInf { val: -(n as i64 + 1), c: g }
}

/// `lambda^s` with the branch `lambda^{1/(n+1)} = p (1 + O(1/p))`.
pub fn lambda_pow(point: &SamplePoint, s: &Scalar, len: usize) -> Result<AtInf, FrobError> {
    let n1 = int(point.n() as i64 + 1);
    let e = s * &n1;
    if !e.is_integer() {
        return Err(FrobError::BranchAmbiguity(s.to_string()));
    }
    let lam = lambda_at_inf(point, len);
    let val = -e.to_integer().try_into().unwrap_or(0i64);
    Ok(AtInf { val, c: series_pow(&lam.c, s, len) })
}

/// `d lambda / d v_a` at infinity.
pub fn dlambda_at_inf(point: &SamplePoint, a: usize, len: usize) -> AtInf {
    let n = point.n();
    if a < n {
        return AtInf { val: -(a as i64), c: pad(vec![int(1)], len) };
    }
    let w = &point.w;
    // sum_j binom(j + k - 1, k - 1) w^j t^j
    let geo = |k: usize| -> Vec<Scalar> {
        let mut out = Vec::with_capacity(len);
        let mut wj = int(1);
        for j in 0..len {
            out.push(binom(j + k - 1, k - 1) * &wj);
            wj *= w;
        }
        out
    };
    if a == n {
        AtInf { val: 2, c: geo(2).into_iter().map(|x| x * &point.u).collect() }
    } else {
        AtInf { val: 1, c: geo(1) }
    }
}

/// `d^2 lambda / d v_a d v_b` at infinity (nonzero only for `w w` and `w u`).
pub fn d2lambda_at_inf(point: &SamplePoint, a: usize, b: usize, len: usize) -> Option<AtInf> {
    let n = point.n();
    let (a, b) = (a.min(b), a.max(b));
    let series = |k: usize, scale: Scalar| -> Vec<Scalar> {
        let mut out = Vec::with_capacity(len);
        let mut wj = int(1);
        for j in 0..len {
            out.push(binom(j + k - 1, k - 1) * &wj * &scale);
            wj *= &point.w;
        }
        out
    };
    match (a, b) {
        (x, y) if x == n && y == n => Some(AtInf { val: 3, c: series(3, &point.u * int(2)) }),
        (x, y) if x == n && y == n + 1 => Some(AtInf { val: 2, c: series(2, int(1)) }),
        _ => None,
    }
}

fn pad(mut v: Vec<Scalar>, len: usize) -> Vec<Scalar> {
    v.resize(len, Scalar::default());
    v
}

fn binom(n: usize, k: usize) -> Scalar {
    let mut r = int(1);
    for i in 0..k {
        r = r * int((n - i) as i64) / int(i as i64 + 1);
    }
    r
}

/// Value, gradient and Hessian in `(v, w, u)` of `-C res_{p=inf} lambda^s`.
pub fn power_residue(point: &SamplePoint, s: &Scalar, c: &Scalar) -> Result<(Scalar, Vec<Scalar>, Vec<Vec<Scalar>>), FrobError> {
    let n = point.n();
    let dim = n + 2;
    let top = (s * int(n as i64 + 1)).ceil().to_integer();
    let len = (top.try_into().unwrap_or(0i64).max(0) as usize) + n + 8;
    let l0 = lambda_pow(point, s, len)?;
    let l1 = lambda_pow(point, &(s - int(1)), len)?;
    let l2 = lambda_pow(point, &(s - int(2)), len)?;
    let dl: Vec<AtInf> = (0..dim).map(|a| dlambda_at_inf(point, a, len)).collect();
    let value = -(c * l0.res_inf()?);
    let grad = (0..dim).map(|a| Ok(-(c * s * l1.mul(&dl[a]).res_inf()?))).collect::<Result<Vec<_>, FrobError>>()?;
    let mut hess = vec![vec![Scalar::default(); dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            let mut r = s * (s - int(1)) * l2.mul(&dl[a]).mul(&dl[b]).res_inf()?;
            if let Some(d2) = d2lambda_at_inf(point, a, b, len) {
                r += s * l1.mul(&d2).res_inf()?;
            }
            hess[a][b] = -(c * &r);
            hess[b][a] = hess[a][b].clone();
        }
    }
    Ok((value, grad, hess))
}

/// `c_0 = 0`, `c_m = sum_{k <= m} 1/k`.
pub fn harmonic(m: u32) -> Scalar {
    (1..=m).fold(Scalar::default(), |acc, k| acc + rat(1, k as i64))
}

/// Exponent and prefactor of `theta_{j,m} = -C res lambda^s` for `j <= n + 1`.
pub fn theta_power(n: usize, j: usize, m: u32) -> (Scalar, Scalar) {
    let n1 = n as i64 + 1;
    if j as i64 == n1 {
        let fact = (1..=m as i64 + 1).fold(int(1), |a, k| a * int(k));
        (int(m as i64 + 1), int(1) / fact)
    } else {
        let q = rat(j as i64, n1);
        let prod = (0..=m as i64).fold(int(1), |a, k| a * (int(k) + &q));
        (int(m as i64) + &q, int(1) / (int(n1) * prod))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaValue {
    pub j: usize,
    pub m: u32,
    pub value: [f64; 2],
    /// Exact value when `j <= n + 1`.
    pub exact: Option<String>,
    /// Series depth used for the logarithm, `j = n + 2` only.
    pub depth: Option<usize>,
}

/// `theta_{j,m}` at a point; `depth` bounds the log-series for `j = n + 2`.
pub fn theta(j: usize, m: u32, point: &SamplePoint, depth: usize) -> Result<ThetaValue, FrobError> {
    let n = point.n();
    if j == 0 || j > n + 2 {
        return Err(FrobError::Degenerate(format!("theta index j = {j} out of range 1..={}", n + 2)));
    }
    if j <= n + 1 {
        let (s, c) = theta_power(n, j, m);
        let (v, _, _) = power_residue(point, &s, &c)?;
        return Ok(ThetaValue { j, m, value: [rat_to_f64(&v), 0.0], exact: Some(v.to_string()), depth: None });
    }
    let v = log_theta(point, m, depth)?;
    Ok(ThetaValue { j, m, value: [v.re, v.im], exact: None, depth: Some(depth) })
}

/// `lambda^m` as a Laurent polynomial in `s = p - w`, exponents from `-m`.
fn lambda_pow_at_w(point: &SamplePoint, m: u32) -> Vec<Scalar> {
    let n = point.n();
    // lambda = u s^{-1} + lambda_+(w + s)
    let mut plus = vec![Scalar::default(); n + 2];
    let w = &point.w;
    let expand = |plus: &mut Vec<Scalar>, coeff: &Scalar, deg: usize| {
        for i in 0..=deg {
            plus[i] += coeff * binom(deg, i) * w.pow((deg - i) as i32);
        }
    };
    expand(&mut plus, &int(1), n + 1);
    for (k, vk) in point.v.iter().enumerate() {
        expand(&mut plus, vk, k);
    }
    // shifted by one: index i holds s^{i-1}
    let mut lam = vec![point.u.clone()];
    lam.extend(plus);
    let mut out = vec![int(1)];
    for _ in 0..m {
        let mut next = vec![Scalar::default(); out.len() + lam.len() - 1];
        for (i, a) in out.iter().enumerate() {
            for (j, b) in lam.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

/// `((n+2)/((n+1) m!)) res_{p=w} lambda^m (log lambda - c_m)`.
fn log_theta(point: &SamplePoint, m: u32, depth: usize) -> Result<C, FrobError> {
    let n = point.n();
    let lm = lambda_pow_at_w(point, m);
    let lo = -(m as i64);
    let hi = lo + lm.len() as i64 - 1;
    // log((p - w) lambda / u) = log(1 + s lambda_+(w + s) / u)
    let plus_at_w = lambda_pow_at_w(point, 1);
    let mut a_in = vec![int(1)];
    a_in.extend(plus_at_w.iter().skip(1).map(|x| x / &point.u));
    let need_a = (-1 - lo).max(0) as usize + 1;
    let need_b = (hi + 1).max(0) as usize + 1;
    if need_a > depth + 1 || need_b > depth + 1 {
        return Err(FrobError::TruncationExhausted { depth, needed: need_a.max(need_b) - 1 });
    }
    let a = series_log(&a_in, depth + 1);
    // log(lambda / s^{n+1}) as a series in 1/s
    let mut b_in = vec![Scalar::default(); n + 3];
    for (i, x) in plus_at_w.iter().enumerate().skip(1) {
        // s^{i-1} / s^{n+1}
        let e = n + 2 - i;
        b_in[e] += x;
    }
    b_in[n + 2] += &point.u;
    let b = series_log(&b_in, depth + 1);
    let coeff = |e: i64| -> Scalar {
        if e < lo || e > hi {
            Scalar::default()
        } else {
            lm[(e - lo) as usize].clone()
        }
    };
    // res_{s=0} lambda^m * (log u + A + B/(n+1)) * (n+1)/(n+2)
    let mut res_a = Scalar::default();
    for k in 1..a.len() {
        res_a += coeff(-1 - k as i64) * &a[k];
    }
    let mut res_b = Scalar::default();
    for k in 1..b.len() {
        res_b += coeff(k as i64 - 1) * &b[k];
    }
    let res_one = coeff(-1);
    let n1 = int(n as i64 + 1);
    let n2 = int(n as i64 + 2);
    let exact_part = &n1 / &n2 * (res_a + res_b / &n1) - &res_one * harmonic(m);
    let logu = C::new(rat_to_f64(&point.u), 0.0).ln();
    let fact = (1..=m as i64).fold(int(1), |x, k| x * int(k));
    let pref = &n2 / (&n1 * fact);
    let total = C::new(rat_to_f64(&(&pref * exact_part)), 0.0) + rat_to_f64(&(&pref * &n1 / &n2 * &res_one)) * logu;
    Ok(total)
}

/// `(1/(n+1)) (1/2 pi i) oint log(lambda(p)/(p-w)^{n+1}) dp` over a circle
/// around `w` enclosing every zero of `lambda`; equals `theta_{n+2,0}`.
pub fn log_oracle(point: &SamplePoint, nodes: usize) -> C {
    let n = point.n();
    let sp = point.superpotential();
    let mut rad = 4.0 + sp.v.iter().map(|x| x.norm()).sum::<f64>() + sp.u.norm() + sp.w.norm();
    let f = |z: C| sp.at(z) / (z - sp.w).powu(n as u32 + 1);
    // grow the circle until the integrand stays in the right half plane
    while (0..64).any(|k| (f(sp.w + C::from_polar(rad, 2.0 * PI * k as f64 / 64.0)) - 1.0).norm() > 0.5) {
        rad *= 2.0;
    }
    let mut s = C::new(0.0, 0.0);
    for k in 0..nodes {
        let e = C::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        let z = sp.w + rad * e;
        s += f(z).ln() * rad * e;
    }
    s / (nodes as f64 * (n as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> SamplePoint {
        SamplePoint::new(vec![], int(0), int(1))
    }

    #[test]
    fn theta_translation_density_is_u() {
        for n in 0..=2 {
            let p = SamplePoint::new((0..n).map(|k| rat(k as i64 + 1, 3)).collect(), rat(1, 2), rat(5, 7));
            let t = theta(n + 1, 0, &p, 8).unwrap();
            assert_eq!(t.exact.as_deref(), Some("5/7"));
        }
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(0), int(0));
        assert_eq!(harmonic(1), int(1));
        assert_eq!(harmonic(2), rat(3, 2));
    }

    #[test]
    fn log_theta_matches_quadrature() {
        let p = simple();
        let t = theta(2, 0, &p, 12).unwrap();
        let o = log_oracle(&p, 2048);
        assert!((C::new(t.value[0], t.value[1]) - o).norm() < 1e-6, "{:?} {}", t, o);
        let p = SamplePoint::new(vec![rat(1, 3), rat(-1, 2)], rat(1, 4), rat(3, 2));
        let t = theta(4, 0, &p, 12).unwrap();
        let o = log_oracle(&p, 4096);
        assert!((C::new(t.value[0], t.value[1]) - o).norm() < 1e-6, "{:?} {}", t, o);
    }
}
