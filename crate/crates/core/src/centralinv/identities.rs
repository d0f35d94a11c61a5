use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::Serialize;

use super::{pq_closed_form, CanonicalFrame, SamplePoint};

/// Deviations found by `residue_identity_check`, all relative.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// Sum over `k != i` of `(P2 - l_i P1)^2 / (f^k (l_k - l_i))` against the
    /// `h_1, h_2, h_3` expansion and against its closed form.
    pub sum_dev: f64,
    /// `Q2 - l_i Q1` against its closed form.
    pub q_dev: f64,
    /// The same two comparisons with the `u lambda''/(r - w)^3` coefficient
    /// taken as `+1` and `-1` instead of `+n/(n+1)` and `-n/(n+1)`.
    pub unit_coefficient_sum_dev: f64,
    pub unit_coefficient_q_dev: f64,
    /// Sum of the finite residues of `h_1`, `h_2`, `h_3` plus the residue at
    /// infinity.
    pub total_residue_dev: f64,
}

impl IdentityReport {
    pub fn ok(&self, tol: f64) -> bool {
        self.sum_dev < tol && self.q_dev < tol && self.total_residue_dev < tol
    }
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

/// `(1/2 pi i) oint f dz` over `|z - c| = rad` by the trapezoid rule.
pub fn circle_integral(f: impl Fn(C) -> C, c: C, rad: f64, nodes: usize) -> C {
    let mut s = C::new(0.0, 0.0);
    for k in 0..nodes {
        let e = C::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        s += f(c + rad * e) * rad * e;
    }
    s / nodes as f64
}

pub fn residue_identity_check(frame: &CanonicalFrame, point: &SamplePoint) -> IdentityReport {
    let sp = &frame.sp;
    let n = point.n() as f64;
    let (u, w) = (sp.u, sp.w);
    let r = &frame.roots;
    let l = &frame.lambda;
    let m = r.len();
    let pq = pq_closed_form(frame, point);
    let (lp, dlp) = (sp.plus(w, 0), sp.plus(w, 1));
    let mut report = IdentityReport {
        sum_dev: 0.0,
        q_dev: 0.0,
        unit_coefficient_sum_dev: 0.0,
        unit_coefficient_q_dev: 0.0,
        total_residue_dev: 0.0,
    };
    for i in 0..m {
        let t = r[i] - w;
        let d2 = frame.f[i];
        let d2p = sp.plus(r[i], 2);
        let mut direct = C::new(0.0, 0.0);
        let mut s = [C::new(0.0, 0.0); 3];
        for k in (0..m).filter(|&k| k != i) {
            let x = pq.p2[k][i] - l[i] * pq.p1[k][i];
            direct += x * x / (frame.f[k] * (l[k] - l[i]));
            let base = (l[k] - l[i]) / (frame.f[k] * (r[k] - r[i]).powu(2));
            for (j, sj) in s.iter_mut().enumerate() {
                *sj += base / (r[k] - w).powu(2 * j as u32);
            }
        }
        let expanded = d2p * d2p / 4.0 * s[0] + u * d2p / t * s[1] + u * u / (t * t) * s[2];
        let mixed = u * d2 / t.powu(3);
        let closed = (1.0 - n) / (2.0 * (n + 1.0)) * d2 * d2 / 4.0
            + n / (n + 1.0) * mixed
            + (n + 2.0) / (n + 1.0) * u * u / t.powu(6)
            - 2.0 * u * l[i] / t.powu(5)
            + 2.0 * u * lp / t.powu(5)
            + 2.0 * u * dlp / t.powu(4);
        report.sum_dev = report.sum_dev.max(rel(direct, expanded)).max(rel(direct, closed));
        let unit = mixed / (n + 1.0);
        report.unit_coefficient_sum_dev = report.unit_coefficient_sum_dev.max(rel(direct, closed + unit));

        let qd = pq.q2[i] - l[i] * pq.q1[i];
        let qclosed = n / (n + 1.0) * d2 * d2 / 4.0 - n / (n + 1.0) * mixed - (n + 2.0) / (n + 1.0) * u * u / t.powu(6)
            + 2.0 * u * l[i] / t.powu(5)
            - 2.0 * u * lp / t.powu(5)
            - 2.0 * u * dlp / t.powu(4);
        report.q_dev = report.q_dev.max(rel(qd, qclosed));
        report.unit_coefficient_q_dev = report.unit_coefficient_q_dev.max(rel(qd, qclosed - unit));

        let h1 = |z: C| (sp.at(z) - l[i]) / (sp.deriv(z, 1) * (z - r[i]).powu(2));
        let sep = (0..m).filter(|&k| k != i).map(|k| (r[k] - r[i]).norm()).chain([t.norm()]).fold(f64::INFINITY, f64::min);
        let wsep = (0..m).map(|k| (r[k] - w).norm()).fold(f64::INFINITY, f64::min);
        let big = r.iter().map(|z| z.norm()).fold(w.norm(), f64::max) * 4.0 + 4.0;
        for (j, sj) in s.iter().enumerate() {
            let h = |z: C| h1(z) / (z - w).powu(2 * j as u32);
            let finite = circle_integral(h, r[i], 0.4 * sep, 256) + circle_integral(h, w, 0.4 * wsep, 256) + sj;
            let outer = circle_integral(h, C::new(0.0, 0.0), big, 4096);
            let inf = C::new(if j == 0 { 1.0 / (n + 1.0) } else { 0.0 }, 0.0);
            report.total_residue_dev = report.total_residue_dev.max(rel(finite, inf)).max(rel(outer, inf));
        }
    }
    report
}
