//! Frobenius manifold of the superpotential: residue pairings, flat
//! coordinates, the calibration `theta_{j,m}` and the principal hierarchy.

mod flat;
mod theta;

pub use flat::{flat_chart, flat_point, lax_velocity_matrix, principal_flow, time_identification, FlatChart, FlatPoint, PrincipalFlowCheck};
pub use theta::{harmonic, log_oracle, theta, ThetaValue};

use num_complex::Complex64 as C;
use serde::Serialize;
use thiserror::Error;

use crate::brackets::lambda;
use crate::centralinv::{CanonicalFrame, SamplePoint, Superpotential};
use crate::hierarchy::HierarchyError;
use crate::numkit::linalg::{char_poly, inverse, inverse_complex, matmul, solve_complex, to_complex, transpose, Mat};
use crate::numkit::{roots_numeric, MPoly, NumError, RatF, RootOptions, Scalar, Var};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FrobError {
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("point lies on the discriminant: lambda(r_{index}) = 0")]
    OnDiscriminant { index: usize },
    #[error("fractional power lambda^{0} has no single-valued expansion at infinity")]
    BranchAmbiguity(String),
    #[error("series truncated at depth {depth}, need {needed}")]
    TruncationExhausted { depth: usize, needed: usize },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// Coordinate index `a` in `(v_1..v_n, w, u)`.
pub fn coord_var(n: usize, a: usize) -> Var {
    match a {
        a if a < n => Var::v(a + 1),
        a if a == n => Var::W,
        _ => Var::U,
    }
}

fn substitute(r: &RatF, point: &SamplePoint) -> Result<RatF, NumError> {
    let n = point.n();
    r.partial_eval(&|v: Var| match v {
        Var::P => None,
        Var::W => Some(point.w.clone()),
        Var::U => Some(point.u.clone()),
        Var(k) if k > Var::U.0 && ((k - Var::U.0) as usize) <= n => Some(point.v[(k - Var::U.0 - 1) as usize].clone()),
        _ => None,
    })
}

/// `-(res_{p=inf} + res_{p=w}) f dp`.
pub fn pairing_residue(f: &RatF, point: &SamplePoint) -> Result<Scalar, NumError> {
    let at_inf = f.residue_at_infinity(Var::P)?;
    let at_w = f.residue_at(Var::P, &MPoly::constant(point.w.clone()))?;
    let s = at_inf.add(&at_w).neg();
    s.as_constant().ok_or_else(|| NumError::DegenerateInput(format!("pairing is not a number: {s}")))
}

/// Metric, structure tensor and intersection form at a rational point.
#[derive(Debug, Clone, Serialize)]
pub struct FrobPoint {
    pub point: SamplePoint,
    #[serde(serialize_with = "ser_mat")]
    pub metric: Mat<Scalar>,
    #[serde(skip)]
    pub c: Vec<Vec<Vec<Scalar>>>,
}

fn ser_mat<S: serde::Serializer>(m: &Mat<Scalar>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

/// `d lambda / d v_a` at the point, as a function of `p`.
pub fn dlambda(point: &SamplePoint, a: usize) -> Result<RatF, NumError> {
    let n = point.n();
    substitute(&lambda(n, Var::P).deriv(coord_var(n, a)), point)
}

pub fn frob_point(point: &SamplePoint) -> Result<FrobPoint, FrobError> {
    if num_traits::Zero::is_zero(&point.u) {
        return Err(FrobError::Degenerate("u vanishes".into()));
    }
    let n = point.n();
    let dim = n + 2;
    let lam = substitute(&lambda(n, Var::P), point)?;
    let dl: Vec<RatF> = (0..dim).map(|a| dlambda(point, a)).collect::<Result<_, _>>()?;
    let inv_dp = lam.deriv(Var::P).inv().ok_or_else(|| FrobError::Degenerate("lambda' vanishes".into()))?;
    let mut metric = vec![vec![Scalar::default(); dim]; dim];
    let mut c = vec![vec![vec![Scalar::default(); dim]; dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            let ab = dl[a].mul(&dl[b]).mul(&inv_dp);
            let g = pairing_residue(&ab, point)?;
            metric[a][b] = g.clone();
            metric[b][a] = g;
            for k in b..dim {
                let v = pairing_residue(&ab.mul(&dl[k]), point)?;
                for (x, y, z) in [(a, b, k), (a, k, b), (b, a, k), (b, k, a), (k, a, b), (k, b, a)] {
                    c[x][y][z] = v.clone();
                }
            }
        }
    }
    Ok(FrobPoint { point: point.clone(), metric, c })
}

impl FrobPoint {
    /// Covariant intersection form `(a, b)`: the pairing of
    /// `d_a lambda d_b lambda / (lambda lambda')`. Besides `p = inf` and
    /// `p = w` the integrand has poles at the zeros of `lambda`; those
    /// residues `d_a lambda d_b lambda / lambda'^2` are added numerically.
    pub fn intersection_form(&self, sp: &Superpotential) -> Result<Mat<C>, FrobError> {
        let point = &self.point;
        let n = point.n();
        let dim = n + 2;
        let lam = substitute(&lambda(n, Var::P), point)?;
        let il = lam.inv().ok_or_else(|| FrobError::Degenerate("lambda vanishes identically".into()))?;
        let inv_dp = lam.deriv(Var::P).inv().ok_or_else(|| FrobError::Degenerate("lambda' vanishes".into()))?;
        let dl: Vec<RatF> = (0..dim).map(|a| dlambda(point, a)).collect::<Result<_, _>>()?;
        // (p - w) lambda_+ + u
        let mut plus = vec![C::new(0.0, 0.0); n + 2];
        for (k, vk) in sp.v.iter().enumerate() {
            plus[k] = *vk;
        }
        plus[n + 1] = C::new(1.0, 0.0);
        let mut num = vec![C::new(0.0, 0.0); n + 3];
        for (k, c) in plus.iter().enumerate() {
            num[k + 1] += c;
            num[k] -= sp.w * c;
        }
        num[0] += sp.u;
        let zeros = roots_numeric(&num, RootOptions::default())?;
        let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
        for a in 0..dim {
            for b in a..dim {
                let outer = pairing_residue(&dl[a].mul(&dl[b]).mul(&inv_dp).mul(&il), point)?;
                let mut v = C::new(crate::numkit::rat_to_f64(&outer), 0.0);
                for &z in &zeros {
                    v -= dlambda_c(sp, a, z) * dlambda_c(sp, b, z) / sp.deriv(z, 1).powu(2);
                }
                m[a][b] = v;
                m[b][a] = v;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.metric.len()
    }

    pub fn metric_symmetric(&self) -> bool {
        self.metric == transpose(&self.metric)
    }

    pub fn c_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|a| {
            (0..d).all(|b| (0..d).all(|k| self.c[a][b][k] == self.c[b][a][k] && self.c[a][b][k] == self.c[a][k][b]))
        })
    }

    /// `c_{ab}^k`, indices raised with the inverse metric.
    pub fn structure_constants(&self) -> Option<Vec<Mat<Scalar>>> {
        let ginv = inverse(&self.metric)?;
        Some(self.c.iter().map(|ca| matmul(ca, &ginv)).collect())
    }

    /// `(e_a e_b) e_d = e_a (e_b e_d)`, exactly.
    pub fn associative(&self) -> bool {
        let Some(s) = self.structure_constants() else { return false };
        let d = self.dim();
        let zero = Scalar::default();
        for a in 0..d {
            for b in 0..d {
                for e in 0..d {
                    for m in 0..d {
                        let lhs = (0..d).fold(zero.clone(), |acc, k| acc + &s[a][b][k] * &s[k][e][m]);
                        let rhs = (0..d).fold(zero.clone(), |acc, k| acc + &s[b][e][k] * &s[a][k][m]);
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `c(a, b, e_k)` against `<a o b, e_k>`, with the product found
    /// independently from `d_a lambda d_b lambda = sum_k C^k_{ab} d_k lambda`
    /// at the critical points.
    pub fn compatibility_dev(&self, frame: &CanonicalFrame) -> f64 {
        let d = self.dim();
        let n = d - 2;
        let sp = &frame.sp;
        let dl = |a: usize, z: C| -> C {
            if a < n {
                z.powu(a as u32)
            } else if a == n {
                sp.u / (z - sp.w).powu(2)
            } else {
                1.0 / (z - sp.w)
            }
        };
        let mat: Mat<C> = frame.roots.iter().map(|&r| (0..d).map(|k| dl(k, r)).collect()).collect();
        let g = to_complex(&self.metric);
        let mut dev: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let rhs: Vec<C> = frame.roots.iter().map(|&r| dl(a, r) * dl(b, r)).collect();
                let Some(cab) = solve_complex(&mat, &rhs) else { return f64::INFINITY };
                for k in 0..d {
                    let lhs: C = (0..d).map(|l| cab[l] * g[l][k]).sum();
                    let exact = C::new(crate::numkit::rat_to_f64(&self.c[a][b][k]), 0.0);
                    dev = dev.max((lhs - exact).norm() / (1.0 + exact.norm()));
                }
            }
        }
        dev
    }
}

/// `d lambda / d v_a` at a complex `p`.
fn dlambda_c(sp: &Superpotential, a: usize, z: C) -> C {
    let n = sp.n();
    if a < n {
        z.powu(a as u32)
    } else if a == n {
        sp.u / (z - sp.w).powu(2)
    } else {
        1.0 / (z - sp.w)
    }
}

/// Result of comparing the metric pencil with the canonical frame.
#[derive(Debug, Clone, Serialize)]
pub struct PencilReport {
    pub root_dev: f64,
    pub diagonal_dev: f64,
    pub off_diagonal: f64,
}

impl PencilReport {
    pub fn ok(&self, tol: f64) -> bool {
        self.root_dev < tol && self.diagonal_dev < tol && self.off_diagonal < tol
    }
}

pub fn pencil_check(fp: &FrobPoint, frame: &CanonicalFrame) -> Result<PencilReport, FrobError> {
    for (i, l) in frame.lambda.iter().enumerate() {
        if l.norm() < 1e-12 {
            return Err(FrobError::OnDiscriminant { index: i });
        }
    }
    let inter = fp.intersection_form(&frame.sp)?;
    let g1 = inverse(&fp.metric).ok_or_else(|| FrobError::Degenerate("metric is singular".into()))?;
    // det(g2 - t g1) = 0 with g2 = inter^-1  <=>  det(metric - t inter) = 0
    let inter_inv = inverse_complex(&inter).ok_or_else(|| FrobError::Degenerate("intersection form is singular".into()))?;
    let cp = char_poly(&matmul(&to_complex(&fp.metric), &inter_inv));
    let roots = roots_numeric(&cp, RootOptions::default())?;
    let scale = frame.lambda.iter().map(|l| l.norm()).fold(1.0, f64::max);
    let root_dev = frame
        .lambda
        .iter()
        .map(|l| roots.iter().map(|r| (r - l).norm()).fold(f64::INFINITY, f64::min) / scale)
        .fold(0.0, f64::max);
    let d = fp.dim();
    let sp = &frame.sp;
    let jac: Mat<C> = frame.roots.iter().map(|&r| (0..d).map(|a| dlambda_c(sp, a, r)).collect()).collect();
    let g = matmul(&matmul(&jac, &to_complex(&g1)), &transpose(&jac));
    let fscale = frame.f.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let mut diagonal_dev: f64 = 0.0;
    let mut off_diagonal: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                diagonal_dev = diagonal_dev.max((g[i][i] - frame.f[i]).norm() / fscale);
            } else {
                off_diagonal = off_diagonal.max(g[i][j].norm() / fscale);
            }
        }
    }
    Ok(PencilReport { root_dev, diagonal_dev, off_diagonal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centralinv::{canonical_frame, sample_generic, Gates};
    use crate::numkit::int;

    fn simple() -> SamplePoint {
        SamplePoint::new(vec![], int(0), int(1))
    }

    #[test]
    fn n0_metric() {
        let f = frob_point(&simple()).unwrap();
        // coordinates (w, u)
        assert_eq!(f.metric, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert!(f.c_symmetric() && f.associative());
    }

    #[test]
    fn n0_pencil() {
        let p = simple();
        let fp = frob_point(&p).unwrap();
        let fr = canonical_frame(&p, &Gates::default()).unwrap();
        let r = pencil_check(&fp, &fr).unwrap();
        assert!(r.ok(1e-10), "{:?}", r);
    }

    #[test]
    fn random_points_are_consistent() {
        for n in 1..=2 {
            let (p, fr) = sample_generic(n, 3, &Gates::sampling()).unwrap();
            let fp = frob_point(&p).unwrap();
            assert!(fp.metric_symmetric() && fp.c_symmetric());
            assert!(fp.associative());
            assert!(fp.compatibility_dev(&fr) < 1e-10);
            assert!(pencil_check(&fp, &fr).unwrap().ok(1e-8));
        }
    }
}
