//! Operator form of the brackets: `delta F / delta L` and the two bracket
//! densities on the full jet ring.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::hierarchy::{build_lax, flow_with, ham_density_with, FlowResult, HierarchyError, LaxData, Truncation};
use crate::jetring::{dx_inverse, euler_vd, DiffPoly, EpsPoly, FieldId, JetError, JetVar};
use crate::numkit::{int, Scalar};
use crate::pdo::{PDOp, PdoError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BracketError {
    #[error(transparent)]
    Pdo(#[from] PdoError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("the 1/u term is needed but u is zero")]
    UDividesZero,
    #[error("u must be a single monomial to be inverted")]
    UNotInvertible,
    #[error("bracket density has a 1/eps pole at D^{0}")]
    EpsilonPole(String),
}

/// Variational derivatives of a functional with respect to the phase fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VarDerivSpec {
    /// `delta F / delta v_i`, `i = 1..n`.
    pub v: Vec<EpsPoly>,
    pub u: EpsPoly,
    pub w: EpsPoly,
}

impl VarDerivSpec {
    /// All entries from a density by Euler-Lagrange derivatives.
    pub fn from_density(n: usize, h: &EpsPoly) -> Self {
        VarDerivSpec {
            v: (1..=n).map(|i| euler_vd(h, FieldId::V(i as u8))).collect(),
            u: euler_vd(h, FieldId::U),
            w: euler_vd(h, FieldId::W),
        }
    }
}

fn inverse_monomial(u: &EpsPoly) -> Result<EpsPoly, BracketError> {
    if u.is_zero() {
        return Err(BracketError::UDividesZero);
    }
    let c0 = u.coeff(0);
    if u.coeffs().iter().skip(1).any(|c| !c.is_zero()) || c0.len() != 1 {
        return Err(BracketError::UNotInvertible);
    }
    let (m, c) = c0.terms().next().unwrap();
    let mut inv = DiffPoly::constant(Scalar::from_integer(1.into()) / c);
    for (v, e) in m.factors() {
        inv = inv.mul(&DiffPoly::power(*v, -e));
    }
    Ok(EpsPoly::from(inv))
}

/// `delta F/delta L = sum_i D^{-i} F_{v_i} + F_u + F_w u^{-1} (D - w)`.
pub fn var_deriv_l(spec: &VarDerivSpec, u: &EpsPoly, w: &EpsPoly, floor: i64) -> Result<PDOp, BracketError> {
    let mut x = PDOp::function(spec.u.clone());
    for (i, fv) in spec.v.iter().enumerate() {
        let di = PDOp::monomial(-(i as i64 + 1), EpsPoly::one(), floor);
        x = x.add(&di.mul(&PDOp::function(fv.clone()))?);
    }
    if !spec.w.is_zero() {
        let c = spec.w.mul(&inverse_monomial(u)?);
        let dw = PDOp::d().sub(&PDOp::function(w.clone()));
        x = x.add(&PDOp::function(c).mul(&dw)?);
    }
    Ok(x.with_floor(floor))
}

fn div_eps(e: &EpsPoly, what: &str) -> Result<EpsPoly, BracketError> {
    e.div_eps().ok_or_else(|| BracketError::EpsilonPole(what.to_string()))
}

/// `eps^{-1} res([L, X_+] Y - [L, X]_+ Y)`.
pub fn bracket1(x: &PDOp, y: &PDOp, l: &PDOp) -> Result<EpsPoly, BracketError> {
    let a = l.commutator(&x.plus_part())?.mul(y)?;
    let b = l.commutator(x)?.plus_part().mul(y)?;
    div_eps(&a.sub(&b).res()?, "-1")
}

/// `K_Y = eps^{-1} dx^{-1} res [L, Y]`.
pub fn k_y(y: &PDOp, l: &PDOp) -> Result<EpsPoly, BracketError> {
    let r = l.commutator(y)?.res()?;
    Ok(dx_inverse(&div_eps(&r, "K_Y")?)?)
}

/// `eps^{-1} res((LY)_+ LX - (YL)_+ XL + X [L, K_Y]/(n+1))`.
pub fn bracket2(n: usize, x: &PDOp, y: &PDOp, l: &PDOp) -> Result<EpsPoly, BracketError> {
    let t1 = l.mul(y)?.plus_part().mul(&l.mul(x)?)?;
    let t2 = y.mul(l)?.plus_part().mul(&x.mul(l)?)?;
    let ky = PDOp::function(k_y(y, l)?);
    let t3 = x.mul(&l.commutator(&ky)?)?.scale(&(Scalar::from_integer(1.into()) / int(n as i64 + 1)));
    div_eps(&t1.sub(&t2).add(&t3).res()?, "-1")
}

fn test_slot(f: FieldId) -> FieldId {
    match f {
        FieldId::V(i) => FieldId::Aux(i),
        FieldId::U => FieldId::Aux(100),
        FieldId::W => FieldId::Aux(101),
        FieldId::Aux(_) => panic!("test slots are only attached to phase fields"),
    }
}

/// `X` for `F = int sum_f phi_f f dx`, with `phi_w` entering as `u phi_w` so
/// that `X` stays polynomial.
fn test_x(lax: &LaxData) -> Result<PDOp, BracketError> {
    let e = lax.trunc.eps_order;
    let u = EpsPoly::field(FieldId::U).with_order(e);
    let spec = VarDerivSpec {
        v: (1..=lax.n).map(|i| EpsPoly::field(test_slot(FieldId::V(i as u8))).with_order(e)).collect(),
        u: EpsPoly::field(test_slot(FieldId::U)).with_order(e),
        w: u.mul(&EpsPoly::field(test_slot(FieldId::W))).with_order(e),
    };
    var_deriv_l(&spec, &u, &EpsPoly::field(FieldId::W).with_order(e), lax.l.floor())
}

/// Velocities `{f(x), H}` read off a bracket density `int sum phi_f V_f dx`.
fn velocities_from_density(n: usize, d: &EpsPoly) -> BTreeMap<FieldId, EpsPoly> {
    let uinv = DiffPoly::power(JetVar::new(FieldId::U, 0), -1);
    FieldId::phase_fields(n)
        .into_iter()
        .map(|f| {
            let v = euler_vd(d, test_slot(f));
            (f, if f == FieldId::W { v.mul_diff(&uinv) } else { v })
        })
        .collect()
}

/// Flows produced by `{., H_k}_1` and `{., H_{k-n-1}}_2`, and the Lax flow.
#[derive(Debug, Clone)]
pub struct BihamiltonianResidual {
    pub lax_flow: FlowResult,
    pub first: FlowResult,
    pub second: FlowResult,
}

impl BihamiltonianResidual {
    pub fn holds(&self) -> bool {
        self.lax_flow.agrees_with(&self.first) && self.lax_flow.agrees_with(&self.second)
    }
}

pub fn bihamiltonian_residual_with(n: usize, k: u32, trunc: Truncation) -> Result<BihamiltonianResidual, BracketError> {
    let lax = build_lax(n, trunc);
    let x = test_x(&lax)?;
    let u = EpsPoly::field(FieldId::U).with_order(trunc.eps_order);
    let w = EpsPoly::field(FieldId::W).with_order(trunc.eps_order);
    let y_of = |j: i64| -> Result<PDOp, BracketError> {
        let h = ham_density_with(n, j, trunc)?;
        var_deriv_l(&VarDerivSpec::from_density(n, &h.density), &u, &w, lax.l.floor())
    };
    let d1 = bracket1(&x, &y_of(k as i64)?, &lax.l)?;
    let d2 = bracket2(n, &x, &y_of(k as i64 - n as i64 - 1)?, &lax.l)?;
    Ok(BihamiltonianResidual {
        lax_flow: flow_with(n, k, trunc)?,
        first: FlowResult { n, k, velocities: velocities_from_density(n, &d1) },
        second: FlowResult { n, k, velocities: velocities_from_density(n, &d2) },
    })
}

pub fn bihamiltonian_residual(n: usize, k: u32) -> Result<BihamiltonianResidual, BracketError> {
    let base = Truncation::for_flow(k);
    bihamiltonian_residual_with(n, k, Truncation { depth: base.depth + n + 2, eps_order: base.eps_order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_deriv_of_simple_functionals() {
        let u = EpsPoly::field(FieldId::U);
        let w = EpsPoly::field(FieldId::W);
        let spec = VarDerivSpec { v: vec![], u: EpsPoly::one(), w: EpsPoly::zero() };
        assert_eq!(var_deriv_l(&spec, &u, &w, -6).unwrap().coeff(0).unwrap(), EpsPoly::one());
        let spec = VarDerivSpec { v: vec![], u: EpsPoly::zero(), w: EpsPoly::one() };
        let x = var_deriv_l(&spec, &u, &w, -6).unwrap();
        let uinv = EpsPoly::from(DiffPoly::power(JetVar::new(FieldId::U, 0), -1));
        assert_eq!(x.coeff(1).unwrap(), uinv);
        assert_eq!(x.coeff(0).unwrap(), uinv.mul(&w).neg());
        assert_eq!(var_deriv_l(&spec, &EpsPoly::zero(), &w, -6), Err(BracketError::UDividesZero));
    }
}
