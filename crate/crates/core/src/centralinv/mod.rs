//! Canonical coordinates at numeric points, the `P`, `Q`, `f` tables by two
//! independent routes, and the central invariants.

mod frame;
mod identities;
mod pq;

pub use frame::{canonical_frame, CanonicalFrame, Gates, Superpotential};
pub use identities::{residue_identity_check, IdentityReport};
pub use pq::{pq_closed_form, pq_from_atable, PQData, PipelineTables, PqSource};

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::brackets::atable::ATableError;
use crate::numkit::{rat, rat_to_f64, Scalar};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CInvError {
    #[error("degenerate point: {gate} (margin {margin:.3e})")]
    Degenerate { gate: String, margin: f64 },
    #[error("limit on the diagonal is singular: {0}")]
    LimitSingular(String),
    #[error(transparent)]
    ATable(#[from] ATableError),
    #[error("no generic point found after {0} draws")]
    SamplingExhausted(usize),
}

/// Values of `v_1..v_n`, `w`, `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePoint {
    #[serde(serialize_with = "ser_rats")]
    pub v: Vec<Scalar>,
    #[serde(serialize_with = "ser_rat")]
    pub w: Scalar,
    #[serde(serialize_with = "ser_rat")]
    pub u: Scalar,
}

fn ser_rat<S: serde::Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_rats<S: serde::Serializer>(x: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|r| r.to_string()))
}

impl SamplePoint {
    pub fn new(v: Vec<Scalar>, w: Scalar, u: Scalar) -> Self {
        SamplePoint { v, w, u }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn superpotential(&self) -> Superpotential {
        Superpotential {
            v: self.v.iter().map(|x| C::new(rat_to_f64(x), 0.0)).collect(),
            w: C::new(rat_to_f64(&self.w), 0.0),
            u: C::new(rat_to_f64(&self.u), 0.0),
        }
    }

    /// Rationals in `[-2, 2]` with denominators at most 16.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut draw = || {
            let d: i64 = rng.gen_range(1..=16);
            let m: i64 = rng.gen_range(-2 * d..=2 * d);
            rat(m, d)
        };
        let v = (0..n).map(|_| draw()).collect();
        let w = draw();
        let u = draw();
        SamplePoint { v, w, u }
    }
}

/// `c_1..c_{n+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CInvariants {
    pub c: Vec<C>,
}

impl CInvariants {
    /// Largest `|c_i - 1/24| / (1/24)`.
    pub fn max_dev(&self) -> f64 {
        let t = C::new(1.0 / 24.0, 0.0);
        self.c.iter().map(|c| (c - t).norm() * 24.0).fold(0.0, f64::max)
    }
}

/// `c_i = (Q2 - l_i Q1 + sum_k (P2^{ki} - l_i P1^{ki})^2 / (f^k (l_k - l_i))) / (3 f_i^2)`.
pub fn central_invariants(frame: &CanonicalFrame, pq: &PQData) -> CInvariants {
    let m = frame.roots.len();
    let c = (0..m)
        .map(|i| {
            let li = frame.lambda[i];
            let mut s = pq.q2[i] - li * pq.q1[i];
            for k in (0..m).filter(|&k| k != i) {
                let t = pq.p2[k][i] - li * pq.p1[k][i];
                s += t * t / (pq.f[k] * (frame.lambda[k] - li));
            }
            s / (3.0 * pq.f[i] * pq.f[i])
        })
        .collect();
    CInvariants { c }
}

/// Draw a generic point passing `gates`; deterministic in `seed`.
pub fn sample_generic(n: usize, seed: u64, gates: &Gates) -> Result<(SamplePoint, CanonicalFrame), CInvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const TRIES: usize = 10_000;
    for _ in 0..TRIES {
        let p = SamplePoint::random(n, &mut rng);
        if let Ok(f) = canonical_frame(&p, gates) {
            return Ok((p, f));
        }
    }
    Err(CInvError::SamplingExhausted(TRIES))
}

/// One row of the verification sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub point: SamplePoint,
    pub roots: Vec<[f64; 2]>,
    pub c: Vec<[f64; 2]>,
    pub max_dev_closed: f64,
    pub max_dev_pipeline: Option<f64>,
    /// Largest deviation among the summation and total-residue identities.
    pub identity_dev: f64,
    pub identities_ok: bool,
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

/// Closed-form and, when tables are given, pipeline invariants at one point.
pub fn evaluate_point(
    point: &SamplePoint,
    frame: &CanonicalFrame,
    tables: Option<&PipelineTables>,
    tol: f64,
) -> Result<SweepRow, CInvError> {
    let closed = central_invariants(frame, &pq_closed_form(frame, point));
    let pipeline = match tables {
        Some(t) => Some(central_invariants(frame, &pq_from_atable(t, frame, point)?).max_dev()),
        None => None,
    };
    let ids = residue_identity_check(frame, point);
    Ok(SweepRow {
        n: point.n(),
        point: point.clone(),
        roots: frame.roots.iter().copied().map(pair).collect(),
        c: closed.c.iter().copied().map(pair).collect(),
        max_dev_closed: closed.max_dev(),
        max_dev_pipeline: pipeline,
        identity_dev: ids.sum_dev.max(ids.q_dev).max(ids.total_residue_dev),
        identities_ok: ids.ok(tol),
    })
}

/// Evaluate `count` seeded points for one `n`, in parallel when enabled.
pub fn sweep(
    n: usize,
    count: usize,
    seed: u64,
    tables: Option<&PipelineTables>,
    tol: f64,
) -> Result<Vec<SweepRow>, CInvError> {
    let gates = Gates::sampling();
    let seeds: Vec<u64> = (0..count as u64).map(|i| seed.wrapping_mul(1_000_003).wrapping_add(i)).collect();
    crate::par::map(seeds, |s| {
        let (p, f) = sample_generic(n, s, &gates)?;
        evaluate_point(&p, &f, tables, tol)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::int;

    fn simple() -> SamplePoint {
        SamplePoint::new(vec![], int(0), int(1))
    }

    #[test]
    fn n0_frame() {
        let f = canonical_frame(&simple(), &Gates::default()).unwrap();
        let close = |a: C, b: f64| (a - C::new(b, 0.0)).norm() < 1e-12;
        assert!(close(f.roots[0], -1.0) && close(f.roots[1], 1.0));
        assert!(close(f.lambda[0], -2.0) && close(f.lambda[1], 2.0));
        assert!(close(f.f[0], -2.0) && close(f.f[1], 2.0));
    }

    #[test]
    fn u_zero_is_degenerate() {
        let p = SamplePoint::new(vec![], int(0), int(0));
        assert!(matches!(canonical_frame(&p, &Gates::default()), Err(CInvError::Degenerate { .. })));
    }

    #[test]
    fn n0_closed_form_values() {
        let p = simple();
        let f = canonical_frame(&p, &Gates::default()).unwrap();
        let pq = pq_closed_form(&f, &p);
        assert!(pq.q1[1].norm() < 1e-12);
        assert!(pq.p1[0][1].norm() < 1e-12);
        let c = central_invariants(&f, &pq);
        assert!(c.max_dev() < 1e-12, "{:?}", c);
    }

    #[test]
    fn relabeling_invariance() {
        let (p, f) = sample_generic(2, 7, &Gates::sampling()).unwrap();
        let c = central_invariants(&f, &pq_closed_form(&f, &p));
        let perm: Vec<usize> = (0..f.roots.len()).rev().collect();
        let g = f.permuted(&perm);
        let d = central_invariants(&g, &pq_closed_form(&g, &p));
        for (i, &j) in perm.iter().enumerate() {
            assert!((d.c[i] - c.c[j]).norm() < 1e-12);
        }
    }
}
