//! The two Poisson brackets: operator form on the full jet ring, and the
//! generating-functional symbol form that produces the A-tables.

pub mod atable;
pub mod kernel;
pub mod operator;

pub use atable::{generating_atable, atable_closed, rtable_closed, ATable};
pub use kernel::{star, Slot};
pub use operator::{bihamiltonian_residual, bracket1, bracket2, var_deriv_l, BracketError, VarDerivSpec};

use crate::numkit::{MPoly, RatF, Var};

/// Positive part of the superpotential, `v^{n+1} + sum_k v_k v^{k-1}`.
pub fn lambda_plus(n: usize, v: Var) -> RatF {
    let mut out = MPoly::var(v).pow(n as u32 + 1);
    for k in 1..=n {
        out = out.add(&MPoly::var(Var::v(k)).mul(&MPoly::var(v).pow(k as u32 - 1)));
    }
    out.into()
}

/// `lambda(v) = v^{n+1} + sum_k v_k v^{k-1} + u/(v - w)`.
pub fn lambda(n: usize, v: Var) -> RatF {
    let pole = RatF::var(Var::U).mul(&RatF::inv_pow(&MPoly::var(v).sub(&MPoly::var(Var::W)), 1));
    lambda_plus(n, v).add(&pole)
}

/// `d^k lambda / dv^k`.
pub fn lambda_deriv(n: usize, v: Var, k: usize) -> RatF {
    lambda(n, v).nth_deriv(v, k)
}
