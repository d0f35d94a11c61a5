use num_complex::Complex64 as C;
use serde::Serialize;

use super::{CInvError, CanonicalFrame, SamplePoint};
use crate::brackets::atable::{generating_atable, ATable};
use crate::numkit::{rat_to_f64, MPoly, RatF, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PqSource {
    ClosedForm,
    Pipeline,
}

/// `P_a^{ij}` (off-diagonal), `Q_a^{ii}` and `f^i` in canonical coordinates.
#[derive(Debug, Clone)]
pub struct PQData {
    pub source: PqSource,
    pub f: Vec<C>,
    pub p1: Vec<Vec<C>>,
    pub p2: Vec<Vec<C>>,
    pub q1: Vec<C>,
    pub q2: Vec<C>,
}

impl PQData {
    /// Largest entrywise relative difference.
    pub fn max_rel_diff(&self, o: &PQData) -> f64 {
        let rel = |a: C, b: C| (a - b).norm() / (1.0 + a.norm().max(b.norm()));
        let mut m: f64 = 0.0;
        for i in 0..self.f.len() {
            m = m.max(rel(self.f[i], o.f[i])).max(rel(self.q1[i], o.q1[i])).max(rel(self.q2[i], o.q2[i]));
            for j in (0..self.f.len()).filter(|&j| j != i) {
                m = m.max(rel(self.p1[i][j], o.p1[i][j])).max(rel(self.p2[i][j], o.p2[i][j]));
            }
        }
        m
    }
}

fn square(m: usize, f: impl Fn(usize, usize) -> C) -> Vec<Vec<C>> {
    (0..m).map(|i| (0..m).map(|j| if i == j { C::new(0.0, 0.0) } else { f(i, j) }).collect()).collect()
}

pub fn pq_closed_form(frame: &CanonicalFrame, point: &SamplePoint) -> PQData {
    let sp = &frame.sp;
    let n = point.n() as f64;
    let (u, w) = (sp.u, sp.w);
    let r = &frame.roots;
    let l = &frame.lambda;
    let d2: Vec<C> = r.iter().map(|&x| sp.deriv(x, 2)).collect();
    let d4: Vec<C> = r.iter().map(|&x| sp.deriv(x, 4)).collect();
    let m = r.len();
    let p1 = square(m, |i, j| {
        (d2[i] + d2[j]) / (2.0 * (r[i] - r[j]))
            - (r[i] - r[j]) * (r[i] + r[j] - 2.0 * w) * u / ((r[i] - w).powu(3) * (r[j] - w).powu(3))
    });
    let p2 = square(m, |i, j| {
        (d2[i] * l[j] + l[i] * d2[j]) / (2.0 * (r[i] - r[j]))
            - (r[i] + r[j] - 2.0 * w) * (l[i] * (r[i] - w) - l[j] * (r[j] - w)) * u
                / ((r[i] - w).powu(3) * (r[j] - w).powu(3))
    });
    let lp = sp.plus(w, 0);
    let dlp = sp.plus(w, 1);
    let q1 = (0..m).map(|i| d4[i] / 12.0 - 2.0 * u / (r[i] - w).powu(5)).collect();
    let q2 = (0..m)
        .map(|i| {
            let t = r[i] - w;
            d4[i] * l[i] / 12.0 + n / (4.0 * (n + 1.0)) * d2[i] * d2[i]
                - (n + 2.0) / (n + 1.0) * u * u / t.powu(6)
                - n / (n + 1.0) * u * d2[i] / t.powu(3)
                - 2.0 * u * dlp / t.powu(4)
                - 2.0 * u * lp / t.powu(5)
        })
        .collect();
    PQData { source: PqSource::ClosedForm, f: d2, p1, p2, q1, q2 }
}

/// A-tables for one `n`, with the diagonal entries already restricted to
/// `zeta = xi`.
#[derive(Debug, Clone)]
pub struct PipelineTables {
    pub n: usize,
    pub a1: ATable,
    pub a2: ATable,
    f_diag: RatF,
    q1_diag: RatF,
    q2_diag: RatF,
}

fn diagonal(r: &RatF, what: &str) -> Result<RatF, CInvError> {
    if r.has_pole_along(&MPoly::var(Var::XI).sub(&MPoly::var(Var::ZETA))) {
        return Err(CInvError::LimitSingular(what.to_string()));
    }
    r.subst(Var::ZETA, &MPoly::var(Var::XI)).map_err(|e| CInvError::LimitSingular(format!("{what}: {e}")))
}

impl PipelineTables {
    pub fn new(n: usize) -> Result<Self, CInvError> {
        let a1 = generating_atable(n, 1, 2)?;
        let a2 = generating_atable(n, 2, 2)?;
        Ok(PipelineTables {
            n,
            f_diag: diagonal(&a1.entries[0], "A_{0,0;1}")?,
            q1_diag: diagonal(&a1.entries[2], "A_{2,0;1}")?,
            q2_diag: diagonal(&a2.entries[2], "A_{2,0;2}")?,
            a1,
            a2,
        })
    }
}

fn env(point: &SamplePoint, xi: C, zeta: C) -> impl Fn(Var) -> C + '_ {
    move |v: Var| match v {
        Var::XI => xi,
        Var::ZETA => zeta,
        Var::W => C::new(rat_to_f64(&point.w), 0.0),
        Var::U => C::new(rat_to_f64(&point.u), 0.0),
        Var(k) if k > Var::U.0 => C::new(rat_to_f64(&point.v[(k - Var::U.0 - 1) as usize]), 0.0),
        other => panic!("unexpected variable {}", other.name()),
    }
}

pub fn pq_from_atable(tables: &PipelineTables, frame: &CanonicalFrame, point: &SamplePoint) -> Result<PQData, CInvError> {
    assert_eq!(tables.n, point.n());
    let r = &frame.roots;
    let m = r.len();
    let at = |e: &RatF, x: C, z: C| e.eval_complex(&env(point, x, z));
    let f = r.iter().map(|&x| at(&tables.f_diag, x, x)).collect();
    let q1 = r.iter().map(|&x| at(&tables.q1_diag, x, x)).collect();
    let q2 = r.iter().map(|&x| at(&tables.q2_diag, x, x)).collect();
    let p1 = square(m, |i, j| at(&tables.a1.entries[1], r[i], r[j]));
    let p2 = square(m, |i, j| at(&tables.a2.entries[1], r[i], r[j]));
    Ok(PQData { source: PqSource::Pipeline, f, p1, p2, q1, q2 })
}
