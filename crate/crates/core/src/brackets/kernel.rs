//! Symbol-calculus evaluation of the two brackets between the generating
//! functionals, on a frozen (x-independent) background.
//!
//! The delta functions are replaced by test functions `phi(x)`, `psi(x)`;
//! the generating symbols are kept abstract as slots `F^{(k)}(p)` and
//! `G^{(l)}(q)` (plus the constant slots `a`, `b` of the `D - w` term), so the
//! output is the family of kernels `R^i_{r,0;a}(p, q)`.

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use super::lambda;
use crate::numkit::{int, MPoly, RatF, Scalar, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FSlot {
    None,
    /// `d_p^k F(p)`.
    F(u32),
    /// The constant `a = 1/(xi - w)^2` multiplying `phi`.
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GSlot {
    None,
    G(u32),
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Key {
    f: FSlot,
    g: GSlot,
    phi: Option<u32>,
    psi: Option<u32>,
    eps: u32,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("epsilon^0 part survives where the bracket requires a factor epsilon")]
    NonzeroLeadingOrder,
    #[error("term with {psi} psi-derivatives at epsilon^{eps} breaks the grading")]
    Grading { eps: u32, psi: u32 },
}

/// Finite sum of `coefficient(p, q) * slots * phi^{(i)} psi^{(j)} eps^r`,
/// truncated above `eps^e`.
#[derive(Debug, Clone)]
pub struct Sym {
    terms: BTreeMap<Key, RatF>,
    e: u32,
}

impl Sym {
    fn empty(e: u32) -> Self {
        Sym { terms: BTreeMap::new(), e }
    }

    pub fn scalar(r: RatF, e: u32) -> Self {
        let mut s = Sym::empty(e);
        s.push(Key { f: FSlot::None, g: GSlot::None, phi: None, psi: None, eps: 0 }, r);
        s
    }

    fn push(&mut self, k: Key, r: RatF) {
        if k.eps > self.e || r.is_zero() {
            return;
        }
        match self.terms.remove(&k) {
            Some(old) => {
                let s = old.add(&r);
                if !s.is_zero() {
                    self.terms.insert(k, s);
                }
            }
            None => {
                self.terms.insert(k, r);
            }
        }
    }

    pub fn add(&self, o: &Sym) -> Sym {
        let mut out = self.clone();
        out.e = self.e.min(o.e);
        out.terms.retain(|k, _| k.eps <= out.e);
        for (k, r) in &o.terms {
            out.push(*k, r.clone());
        }
        out
    }

    pub fn neg(&self) -> Sym {
        self.scale(&int(-1))
    }

    pub fn sub(&self, o: &Sym) -> Sym {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Sym {
        Sym {
            terms: self.terms.iter().map(|(k, r)| (*k, r.scale(c))).collect(),
            e: self.e,
        }
    }

    pub fn mul_rat(&self, c: &RatF) -> Sym {
        let mut out = Sym::empty(self.e);
        for (k, r) in &self.terms {
            out.push(*k, r.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &Sym) -> Sym {
        let e = self.e.min(o.e);
        let mut out = Sym::empty(e);
        for (k1, r1) in &self.terms {
            for (k2, r2) in &o.terms {
                let eps = k1.eps + k2.eps;
                if eps > e {
                    continue;
                }
                let f = match (k1.f, k2.f) {
                    (x, FSlot::None) | (FSlot::None, x) => x,
                    _ => panic!("product of two F slots"),
                };
                let g = match (k1.g, k2.g) {
                    (x, GSlot::None) | (GSlot::None, x) => x,
                    _ => panic!("product of two G slots"),
                };
                let phi = match (k1.phi, k2.phi) {
                    (Some(_), Some(_)) => panic!("product of two phi factors"),
                    (x, y) => x.or(y),
                };
                let psi = match (k1.psi, k2.psi) {
                    (Some(_), Some(_)) => panic!("product of two psi factors"),
                    (x, y) => x.or(y),
                };
                out.push(Key { f, g, phi, psi, eps }, r1.mul(r2));
            }
        }
        out
    }

    pub fn shift_eps(&self, k: u32) -> Sym {
        let mut out = Sym::empty(self.e);
        for (key, r) in &self.terms {
            out.push(Key { eps: key.eps + k, ..*key }, r.clone());
        }
        out
    }

    pub fn div_eps(&self) -> Result<Sym, KernelError> {
        let mut out = Sym::empty(self.e.saturating_sub(1));
        for (key, r) in &self.terms {
            if key.eps == 0 {
                return Err(KernelError::NonzeroLeadingOrder);
            }
            out.push(Key { eps: key.eps - 1, ..*key }, r.clone());
        }
        Ok(out)
    }

    /// Derivative in `p` (acting on `F` slots) or `q` (acting on `G` slots).
    pub fn dvar(&self, v: Var) -> Sym {
        let mut out = Sym::empty(self.e);
        for (k, r) in &self.terms {
            out.push(*k, r.deriv(v));
            if v == Var::P {
                if let FSlot::F(j) = k.f {
                    out.push(Key { f: FSlot::F(j + 1), ..*k }, r.clone());
                }
            } else if v == Var::Q {
                if let GSlot::G(j) = k.g {
                    out.push(Key { g: GSlot::G(j + 1), ..*k }, r.clone());
                }
            }
        }
        out
    }

    /// Total x-derivative; on a frozen background only the test functions
    /// depend on x.
    pub fn dx(&self) -> Sym {
        let mut out = Sym::empty(self.e);
        for (k, r) in &self.terms {
            if let Some(i) = k.phi {
                out.push(Key { phi: Some(i + 1), ..*k }, r.clone());
            }
            if let Some(j) = k.psi {
                out.push(Key { psi: Some(j + 1), ..*k }, r.clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `A * B = sum_k eps^k / k! d_v^k A d_x^k B`.
pub fn star(v: Var, a: &Sym, b: &Sym) -> Sym {
    let e = a.e.min(b.e);
    let mut out = Sym::empty(e);
    let mut da = a.clone();
    let mut db = b.clone();
    let mut fact = Scalar::one();
    for k in 0..=e {
        if da.is_zero() || db.is_zero() {
            break;
        }
        out = out.add(&da.mul(&db).shift_eps(k).scale(&(Scalar::one() / &fact)));
        da = da.dvar(v);
        db = db.dx();
        fact *= int(k as i64 + 1);
    }
    out
}

fn commutator(v: Var, a: &Sym, b: &Sym) -> Sym {
    star(v, a, b).sub(&star(v, b, a))
}

/// Positive-part projector: `S(q) -> S(q) / (q - p)`, `q` integrated later.
fn project(s: &Sym) -> Sym {
    let kern = RatF::from(MPoly::var(Var::Q).sub(&MPoly::var(Var::P))).inv().expect("nonzero");
    s.mul_rat(&kern)
}

fn x_hat(e: u32) -> Sym {
    let mut s = Sym::empty(e);
    let mut fact = Scalar::one();
    for k in 0..=e {
        s.push(Key { f: FSlot::F(k), g: GSlot::None, phi: Some(k), psi: None, eps: k }, RatF::constant(Scalar::one() / &fact));
        fact *= int(k as i64 + 1);
    }
    s.push(Key { f: FSlot::A, g: GSlot::None, phi: Some(1), psi: None, eps: 1 }, RatF::int(-1));
    s
}

fn y_hat(e: u32) -> Sym {
    let mut s = Sym::empty(e);
    let mut fact = Scalar::one();
    for k in 0..=e {
        s.push(Key { f: FSlot::None, g: GSlot::G(k), phi: None, psi: Some(k), eps: k }, RatF::constant(Scalar::one() / &fact));
        fact *= int(k as i64 + 1);
    }
    s.push(Key { f: FSlot::None, g: GSlot::B, phi: None, psi: Some(1), eps: 1 }, RatF::int(-1));
    s
}

/// Raw integrand of `{lambda(y, xi), lambda(z, zeta)}_a` before integration
/// by parts, up to `eps^rmax`.
pub fn integrand(n: usize, a: u8, rmax: u32) -> Result<Sym, KernelError> {
    let e = rmax + 1;
    let lp = Sym::scalar(lambda(n, Var::P), e);
    let lq = Sym::scalar(lambda(n, Var::Q), e);
    let x = x_hat(e);
    let y = y_hat(e);
    let total = match a {
        1 => {
            let t1 = star(Var::P, &project(&commutator(Var::Q, &lq, &y)), &x);
            let t2 = star(Var::P, &project(&y), &commutator(Var::P, &lp, &x));
            t1.add(&t2)
        }
        _ => {
            let t1 = star(Var::P, &project(&star(Var::Q, &lq, &y)), &star(Var::P, &lp, &x));
            let t2 = star(Var::P, &project(&star(Var::Q, &y, &lq)), &star(Var::P, &x, &lp));
            // K_Y = sum_{k >= 1} eps^{k-1}/k! lambda^{(k)}(q) d_x^{k-1} Y(q)
            let mut ky = Sym::empty(e);
            let mut dl = lq.dvar(Var::Q);
            let mut dy = y.clone();
            let mut fact = Scalar::one();
            for k in 1..=e + 1 {
                fact *= int(k as i64);
                ky = ky.add(&dl.mul(&dy).shift_eps(k - 1).scale(&(Scalar::one() / &fact)));
                dl = dl.dvar(Var::Q);
                dy = dy.dx();
            }
            let t3 = star(Var::P, &x, &commutator(Var::P, &lp, &ky)).scale(&(Scalar::one() / int(n as i64 + 1)));
            t1.sub(&t2).add(&t3)
        }
    };
    total.div_eps()
}

/// Which of the four kernels: `(F or a) x (G or b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    FG,
    FB,
    AG,
    AB,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::FG, Slot::FB, Slot::AG, Slot::AB];

    pub fn index(self) -> usize {
        match self {
            Slot::FG => 1,
            Slot::FB => 2,
            Slot::AG => 3,
            Slot::AB => 4,
        }
    }
}

/// Kernels `R^i_{r,0;a}(p, q)` indexed by `(r, slot)`, from integrating the
/// raw integrand by parts in `p`, `q` and `x` until it reads
/// `F(p) R G(q) phi psi^{(r+1)}`.
pub fn kernels(n: usize, a: u8, rmax: u32) -> Result<BTreeMap<(u32, Slot), RatF>, KernelError> {
    let s = integrand(n, a, rmax)?;
    let mut out: BTreeMap<(u32, Slot), RatF> = BTreeMap::new();
    for (k, r) in &s.terms {
        let mut c = r.clone();
        let fs = match k.f {
            FSlot::F(j) => {
                c = c.nth_deriv(Var::P, j as usize);
                if j % 2 == 1 {
                    c = c.neg();
                }
                true
            }
            FSlot::A => false,
            FSlot::None => unreachable!("bracket is bilinear"),
        };
        let gs = match k.g {
            GSlot::G(j) => {
                c = c.nth_deriv(Var::Q, j as usize);
                if j % 2 == 1 {
                    c = c.neg();
                }
                true
            }
            GSlot::B => false,
            GSlot::None => unreachable!("bracket is bilinear"),
        };
        let (i, j) = (k.phi.expect("phi"), k.psi.expect("psi"));
        if i % 2 == 1 {
            c = c.neg();
        }
        if i + j != k.eps + 1 {
            return Err(KernelError::Grading { eps: k.eps, psi: i + j });
        }
        let slot = match (fs, gs) {
            (true, true) => Slot::FG,
            (true, false) => Slot::FB,
            (false, true) => Slot::AG,
            (false, false) => Slot::AB,
        };
        let e = out.entry((k.eps, slot)).or_insert_with(RatF::zero);
        *e = e.add(&c);
    }
    for r in 0..=rmax {
        for slot in Slot::ALL {
            out.entry((r, slot)).or_insert_with(RatF::zero);
        }
    }
    Ok(out)
}
