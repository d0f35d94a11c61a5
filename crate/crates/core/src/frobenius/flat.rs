use serde::Serialize;

use super::theta::{power_residue, theta_power};
use super::{frob_point, FrobError};
use crate::centralinv::SamplePoint;
use crate::hierarchy::{flow_with, Truncation};
use crate::jetring::{FieldId, JetVar};
use crate::numkit::linalg::{inverse, matmul, transpose, Mat};
use crate::numkit::{int, rat, rat_to_f64, Scalar};

/// Flat coordinates at one point with their first and second derivatives
/// in `(v, w, u)`.
#[derive(Debug, Clone)]
pub struct FlatPoint {
    pub coords: Vec<Scalar>,
    /// `d vt_i / d v_a`.
    pub jacobian: Mat<Scalar>,
    /// `d^2 vt_i / d v_a d v_b`, one matrix per `i`.
    pub hessians: Vec<Mat<Scalar>>,
    /// Metric in flat coordinates.
    pub eta: Mat<Scalar>,
}

fn zeros(d: usize) -> Mat<Scalar> {
    vec![vec![Scalar::default(); d]; d]
}

pub fn flat_point(point: &SamplePoint) -> Result<FlatPoint, FrobError> {
    let n = point.n();
    let d = n + 2;
    let n1 = n as i64 + 1;
    let mut coords = Vec::with_capacity(d);
    let mut jacobian = Vec::with_capacity(d);
    let mut hessians = Vec::with_capacity(d);
    for i in 1..=n as i64 {
        let s = int(1) - rat(i, n1);
        let c = rat(n1, n1 - i);
        let (v, g, h) = power_residue(point, &s, &c)?;
        coords.push(v);
        jacobian.push(g);
        hessians.push(h);
    }
    for (a, value) in [(n, point.w.clone()), (n + 1, point.u.clone())] {
        coords.push(value);
        let mut row = vec![Scalar::default(); d];
        row[a] = int(1);
        jacobian.push(row);
        hessians.push(zeros(d));
    }
    let k = inverse(&jacobian).ok_or_else(|| FrobError::Degenerate("flat coordinates are not a chart here".into()))?;
    let g = frob_point(point)?.metric;
    let eta = matmul(&matmul(&transpose(&k), &g), &k);
    Ok(FlatPoint { coords, jacobian, hessians, eta })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatChart {
    pub n: usize,
    #[serde(serialize_with = "ser_mat")]
    pub eta: Mat<Scalar>,
    #[serde(serialize_with = "ser_mat")]
    pub eta_inv: Mat<Scalar>,
    /// `eta` is the same matrix at every point.
    pub eta_constant: bool,
    pub max_eta_dev: f64,
    #[serde(skip)]
    pub points: Vec<FlatPoint>,
}

fn ser_mat<S: serde::Serializer>(m: &Mat<Scalar>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

pub fn flat_chart(points: &[SamplePoint]) -> Result<FlatChart, FrobError> {
    if points.len() < 2 {
        return Err(FrobError::Degenerate("flatness needs at least two points".into()));
    }
    let charts: Vec<FlatPoint> = points.iter().map(flat_point).collect::<Result<_, _>>()?;
    let eta = charts[0].eta.clone();
    let eta_inv = inverse(&eta).ok_or_else(|| FrobError::Degenerate("eta is singular".into()))?;
    let mut max_eta_dev: f64 = 0.0;
    for c in &charts[1..] {
        for (r0, r1) in eta.iter().zip(&c.eta) {
            for (a, b) in r0.iter().zip(r1) {
                max_eta_dev = max_eta_dev.max(rat_to_f64(&(a - b)).abs());
            }
        }
    }
    let eta_constant = charts.iter().all(|c| c.eta == eta);
    Ok(FlatChart { n: points[0].n(), eta, eta_inv, eta_constant, max_eta_dev, points: charts })
}

/// Principal-hierarchy velocity matrix against the Lax flow it is identified with.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalFlowCheck {
    pub j: usize,
    pub m: u32,
    /// Index `k` of the Lax flow `t_k`.
    pub lax_index: u32,
    pub prefactor: String,
    #[serde(serialize_with = "ser_mat")]
    pub principal: Mat<Scalar>,
    /// Lax velocity matrix in flat coordinates, times the prefactor.
    #[serde(serialize_with = "ser_mat")]
    pub lax: Mat<Scalar>,
    pub max_dev: f64,
}

impl PrincipalFlowCheck {
    pub fn agrees(&self) -> bool {
        self.principal == self.lax
    }
}

/// `d/dt^{j,m} = prefactor * d/dt_k` with `k = m (n+1) + j`.
pub fn time_identification(n: usize, j: usize, m: u32) -> (u32, Scalar) {
    let n1 = n as i64 + 1;
    let k = (m as i64 * n1 + j as i64) as u32;
    if j as i64 == n1 {
        let fact = (1..=m as i64 + 1).fold(int(1), |a, k| a * int(k));
        (k, int(1) / fact)
    } else {
        let q = rat(j as i64, n1);
        let prod = (0..=m as i64).fold(int(1), |a, k| a * (int(k) + &q));
        (k, int(1) / (int(n1) * prod))
    }
}

/// Dispersionless velocity matrix `M_{ab} = d V_a / d (v_b)_x` of the Lax flow `t_k`.
pub fn lax_velocity_matrix(point: &SamplePoint, k: u32) -> Result<Mat<Scalar>, FrobError> {
    let n = point.n();
    let f = flow_with(n, k, Truncation { depth: k as usize + 4, eps_order: 1 })?;
    let fields = FieldId::phase_fields(n);
    let at = |fid: FieldId| -> Scalar {
        match fid {
            FieldId::V(i) => point.v[i as usize - 1].clone(),
            FieldId::W => point.w.clone(),
            FieldId::U => point.u.clone(),
            FieldId::Aux(_) => Scalar::default(),
        }
    };
    Ok(fields
        .iter()
        .map(|fa| {
            let v0 = f.velocity(*fa).coeff(0);
            fields.iter().map(|fb| v0.partial(JetVar::new(*fb, 1)).eval_frozen(&at)).collect()
        })
        .collect())
}

/// `dvt_i/dt^{j,m} = eta^{ik} d_x (d theta_{j,m+1} / d vt_k)` as a matrix
/// acting on `vt_x`, compared with the identified Lax flow.
pub fn principal_flow(j: usize, m: u32, point: &SamplePoint) -> Result<PrincipalFlowCheck, FrobError> {
    let n = point.n();
    if j == 0 || j > n + 1 {
        return Err(FrobError::Degenerate(format!("principal flows are computed for 1 <= j <= {}", n + 1)));
    }
    let d = n + 2;
    let fp = flat_point(point)?;
    let eta_inv = inverse(&fp.eta).ok_or_else(|| FrobError::Degenerate("eta is singular".into()))?;
    let kinv = inverse(&fp.jacobian).ok_or_else(|| FrobError::Degenerate("singular Jacobian".into()))?;
    let (s, c) = theta_power(n, j, m + 1);
    let (_, grad, hess) = power_residue(point, &s, &c)?;
    // Hessian in flat coordinates: K^T (H - sum_i (d theta/d vt_i) Hess vt_i) K
    let dtheta_flat: Vec<Scalar> =
        (0..d).map(|i| (0..d).fold(Scalar::default(), |acc, a| acc + &grad[a] * &kinv[a][i])).collect();
    let mut h = hess.clone();
    for (i, hi) in fp.hessians.iter().enumerate() {
        for a in 0..d {
            for b in 0..d {
                h[a][b] -= &dtheta_flat[i] * &hi[a][b];
            }
        }
    }
    let hflat = matmul(&matmul(&transpose(&kinv), &h), &kinv);
    let principal = matmul(&eta_inv, &hflat);
    let (k, pref) = time_identification(n, j, m);
    let mv = lax_velocity_matrix(point, k)?;
    let lax: Mat<Scalar> = matmul(&matmul(&fp.jacobian, &mv), &kinv)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x * &pref).collect())
        .collect();
    let mut max_dev: f64 = 0.0;
    for (r0, r1) in principal.iter().zip(&lax) {
        for (a, b) in r0.iter().zip(r1) {
            max_dev = max_dev.max(rat_to_f64(&(a - b)).abs());
        }
    }
    Ok(PrincipalFlowCheck { j, m, lax_index: k, prefactor: pref.to_string(), principal, lax, max_dev })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: usize) -> Vec<SamplePoint> {
        (0..3)
            .map(|s| {
                SamplePoint::new(
                    (0..n).map(|k| rat(k as i64 + s + 1, 5)).collect(),
                    rat(s - 1, 3),
                    rat(2 * s + 1, 4),
                )
            })
            .collect()
    }

    #[test]
    fn flat_metric_is_constant() {
        for n in 0..=2 {
            let c = flat_chart(&pts(n)).unwrap();
            assert!(c.eta_constant, "n = {n}: {:?}", c.eta);
        }
    }

    #[test]
    fn n0_flat_metric() {
        let c = flat_chart(&pts(0)).unwrap();
        assert_eq!(c.eta, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
    }

    #[test]
    fn translation_flow() {
        for n in 0..=2 {
            let r = principal_flow(1, 0, &pts(n)[1]).unwrap();
            assert_eq!(r.lax_index, 1);
            assert!(r.agrees(), "n = {n}: {:?}", r);
            let d = n + 2;
            let id: Vec<Vec<Scalar>> = (0..d).map(|a| (0..d).map(|b| int((a == b) as i64)).collect()).collect();
            assert_eq!(r.principal, id);
        }
    }

    #[test]
    fn principal_flows_match_lax_flows() {
        for n in 1..=2 {
            for m in 0..=1 {
                for j in 1..=n + 1 {
                    let r = principal_flow(j, m, &pts(n)[2]).unwrap();
                    assert!(r.agrees(), "n = {n}, j = {j}, m = {m}: {}", r.max_dev);
                }
            }
        }
    }
}
