//! A-tables `A_{k,0;a}(xi, zeta)` from the kernel pipeline, the closed forms
//! they are compared against, and their serialization.

use std::collections::BTreeMap;

use serde::Serialize;

use super::kernel::{kernels, KernelError, Slot};
use super::{lambda, lambda_plus, lambda_deriv};
use crate::numkit::{rat, MPoly, NumError, RatF, Var};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ATableError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("kernel R^{index}_{{{r},0;{a}}} has a pole on p = q")]
    SingularKernel { index: usize, r: u32, a: u8 },
}

fn var(v: Var) -> RatF {
    RatF::var(v)
}

fn diff(a: Var, b: Var) -> RatF {
    var(a).sub(&var(b))
}

fn inv(r: &RatF) -> RatF {
    r.inv().expect("nonzero")
}

fn inv_pow(r: &RatF, e: u32) -> RatF {
    inv(&r.pow(e))
}

fn c(n: i64, d: i64) -> RatF {
    RatF::constant(rat(n, d))
}

/// The displayed closed forms of `R^i_{r,0;a}(p, q)`, indexed `[R1, R2, R3, R4]`.
pub fn rtable_closed(n: usize, a: u8, r: u32) -> [RatF; 4] {
    let l = |k: usize, v: Var| lambda_deriv(n, v, k);
    let (p, q) = (Var::P, Var::Q);
    let pq = diff(p, q);
    let np1 = c(1, n as i64 + 1);
    let z = RatF::zero();
    match (a, r) {
        (1, 0) => [l(1, p).sub(&l(1, q)).mul(&inv(&pq)), z.clone(), z.clone(), z],
        (1, 1) => {
            let r1 = l(2, p).add(&l(2, q)).mul(&inv(&pq.scale(&rat(2, 1)))).sub(&l(1, p).sub(&l(1, q)).mul(&inv_pow(&pq, 2)));
            let r2 = l(1, p).sub(&l(1, q)).mul(&inv(&pq)).neg();
            [r1, r2.clone(), r2.neg(), z]
        }
        (1, 2) => {
            let r1 = l(3, p)
                .sub(&l(3, q))
                .mul(&inv(&pq.scale(&rat(6, 1))))
                .sub(&l(2, p).add(&l(2, q)).mul(&inv(&pq.pow(2).scale(&rat(2, 1)))))
                .add(&l(1, p).sub(&l(1, q)).mul(&inv_pow(&pq, 3)));
            let r23 = l(2, p).sub(&l(2, q)).mul(&inv(&pq.scale(&rat(2, 1)))).neg();
            let r4 = l(1, p).sub(&l(1, q)).mul(&inv(&pq)).neg();
            [r1, r23.clone(), r23, r4]
        }
        (2, 0) => {
            let r1 = l(0, q).mul(&l(1, p)).sub(&l(0, p).mul(&l(1, q))).mul(&inv(&pq)).add(&l(1, p).mul(&l(1, q)).mul(&np1));
            [r1, z.clone(), z.clone(), z]
        }
        (2, 1) => {
            let r1 = l(0, p)
                .mul(&l(1, q))
                .sub(&l(0, q).mul(&l(1, p)))
                .mul(&inv_pow(&pq, 2))
                .add(
                    &l(0, q)
                        .mul(&l(2, p))
                        .add(&l(0, p).mul(&l(2, q)))
                        .sub(&l(1, p).mul(&l(1, q)).scale(&rat(2, 1)))
                        .mul(&inv(&pq.scale(&rat(2, 1)))),
                )
                .add(&l(2, p).mul(&l(1, q)).sub(&l(1, p).mul(&l(2, q))).mul(&np1).scale(&rat(1, 2)));
            let r2 = l(0, p).mul(&l(1, q)).sub(&l(0, q).mul(&l(1, p))).mul(&inv(&pq)).sub(&l(1, p).mul(&l(1, q)).mul(&np1));
            [r1, r2.clone(), r2.neg(), z]
        }
        (2, 2) => {
            let t1 = l(3, p)
                .mul(&l(0, q))
                .sub(&l(2, p).mul(&l(1, q)).scale(&rat(3, 1)))
                .add(&l(1, p).mul(&l(2, q)).scale(&rat(3, 1)))
                .sub(&l(0, p).mul(&l(3, q)))
                .mul(&inv(&pq.scale(&rat(6, 1))));
            let t2 = l(2, p)
                .mul(&l(0, q))
                .sub(&l(1, p).mul(&l(1, q)).scale(&rat(2, 1)))
                .add(&l(0, p).mul(&l(2, q)))
                .mul(&inv(&pq.pow(2).scale(&rat(2, 1))));
            let t3 = l(1, p).mul(&l(0, q)).sub(&l(1, q).mul(&l(0, p))).mul(&inv_pow(&pq, 3));
            let t4 = l(3, p)
                .mul(&l(1, q))
                .scale(&rat(2, 1))
                .sub(&l(2, p).mul(&l(2, q)).scale(&rat(3, 1)))
                .add(&l(1, p).mul(&l(3, q)).scale(&rat(2, 1)))
                .mul(&np1)
                .scale(&rat(1, 12));
            let r1 = t1.sub(&t2).add(&t3).add(&t4);
            let base = l(0, p).mul(&l(2, q)).sub(&l(0, q).mul(&l(2, p))).mul(&inv(&pq.scale(&rat(2, 1))));
            let r2 = base.sub(&l(2, p).mul(&l(1, q)).add(&l(1, p).mul(&l(2, q))).mul(&np1).scale(&rat(1, 2)));
            let r3 = base.add(&l(2, p).mul(&l(1, q)).sub(&l(1, p).mul(&l(2, q))).mul(&np1).scale(&rat(1, 2)));
            let r4 = l(0, p).mul(&l(1, q)).sub(&l(0, q).mul(&l(1, p))).mul(&inv(&pq)).sub(&l(1, p).mul(&l(1, q)).mul(&np1));
            [r1, r2, r3, r4]
        }
        _ => panic!("closed forms are tabulated for r <= 2 and a in {{1, 2}}"),
    }
}

/// The displayed `A_{k,0;a}(xi, zeta)`, `k <= 2`.
pub fn atable_closed(n: usize, a: u8, k: u32) -> RatF {
    let (x, z, w) = (Var::XI, Var::ZETA, Var::W);
    let u = var(Var::U);
    let r1 = rtable_closed(n, a, k)[0].subst(Var::P, &MPoly::var(x)).unwrap().subst(Var::Q, &MPoly::var(z)).unwrap();
    let xw = diff(x, w);
    let zw = diff(z, w);
    let s = var(x).add(&var(z)).sub(&var(w).scale(&rat(2, 1)));
    let np1 = c(1, n as i64 + 1);
    let l = |k: usize, v: Var| lambda_deriv(n, v, k);
    let lp_w = lambda_plus(n, Var::W);
    let dlp_w = lambda_plus(n, Var::P).deriv(Var::P).subst(Var::P, &MPoly::var(w)).unwrap();
    match (a, k) {
        (_, 0) => r1,
        (1, 1) => r1.sub(&diff(x, z).mul(&s).mul(&u).mul(&inv(&xw.pow(3).mul(&zw.pow(3))))),
        (1, 2) => {
            let quad = var(z)
                .pow(2)
                .add(&var(x).pow(2))
                .sub(&var(x).mul(&var(z)))
                .add(&var(w).pow(2))
                .sub(&var(z).mul(&var(w)))
                .sub(&var(x).mul(&var(w)));
            r1.sub(&s.mul(&quad).mul(&u).mul(&inv(&zw.pow(4).mul(&xw.pow(4)))))
        }
        (2, 1) => {
            let t1 = s
                .mul(&u)
                .mul(&inv(&zw.pow(2).mul(&xw.pow(2))))
                .mul(&l(0, x).mul(&inv(&zw)).sub(&l(0, z).mul(&inv(&xw))));
            let t2 = u.mul(&inv(&zw.mul(&xw))).mul(&l(1, x).mul(&inv(&zw)).sub(&l(1, z).mul(&inv(&xw))));
            let t3 = u.mul(&np1).mul(&l(1, x).mul(&inv_pow(&zw, 3)).sub(&l(1, z).mul(&inv_pow(&xw, 3))));
            r1.sub(&t1).sub(&t2).add(&t3)
        }
        (2, 2) => {
            let t1 = c(n as i64 + 2, n as i64 + 1).mul(&u.pow(2)).mul(&inv(&zw.pow(3).mul(&xw.pow(3))));
            let t2 = diff(x, z)
                .mul(&s)
                .mul(&u)
                .mul(&inv(&zw.pow(3).mul(&xw.pow(3))))
                .mul(&l(0, x).mul(&inv(&zw)).sub(&l(0, z).mul(&inv(&xw))));
            let t3 = u
                .mul(&inv(&zw.mul(&xw).scale(&rat(2, 1))))
                .mul(&l(2, z).mul(&inv(&xw)).add(&l(2, x).mul(&inv(&zw))));
            let t4 = u.mul(&inv(&zw.mul(&xw))).mul(&l(1, z).mul(&inv_pow(&xw, 2)).add(&l(1, x).mul(&inv_pow(&zw, 2))));
            let t5 = u.mul(&dlp_w).scale(&rat(2, 1)).mul(&inv(&zw.pow(2).mul(&xw.pow(2))));
            let t6 = u.mul(&s).mul(&lp_w).mul(&inv(&zw.pow(3).mul(&xw.pow(3))));
            let t7 = u.mul(&np1).mul(
                &l(2, z)
                    .mul(&inv(&xw.pow(3).scale(&rat(2, 1))))
                    .add(&l(2, x).mul(&inv(&zw.pow(3).scale(&rat(2, 1)))))
                    .add(&l(1, z).mul(&inv_pow(&xw, 4)))
                    .add(&l(1, x).mul(&inv_pow(&zw, 4))),
            );
            r1.sub(&t1).sub(&t2).sub(&t3).sub(&t4).sub(&t5).sub(&t6).add(&t7)
        }
        _ => panic!("closed forms are tabulated for k <= 2 and a in {{1, 2}}"),
    }
}

/// `(1/2 pi i) oint dv`, a large anticlockwise circle: `-res_{v = inf}`.
pub fn contour(f: &RatF, v: Var) -> Result<RatF, NumError> {
    Ok(f.residue_at_infinity(v)?.neg())
}

/// Same contour as a sum of finite residues at the listed sites.
pub fn contour_finite(f: &RatF, v: Var, sites: &[MPoly]) -> Result<RatF, NumError> {
    let mut acc = RatF::zero();
    for s in sites {
        acc = acc.add(&f.residue_at(v, s)?);
    }
    Ok(acc)
}

/// `f-bar(p) = 1/(p - xi) + a_0 + p a` with `a = 1/(xi - w)^2`,
/// `a_0 = 1/(xi - w) - w/(xi - w)^2`; returns `(f-bar, a)`.
pub fn generating_symbol(p: Var, xi: Var) -> (RatF, RatF) {
    let xw = diff(xi, Var::W);
    let alpha = inv_pow(&xw, 2);
    let alpha0 = inv(&xw).sub(&var(Var::W).mul(&alpha));
    let fbar = inv(&diff(p, xi)).add(&alpha0).add(&var(p).mul(&alpha));
    (fbar, alpha)
}

/// Regularity of a kernel on the diagonal `p = q`.
pub fn regular_on_diagonal(r: &RatF, a: Var, b: Var) -> bool {
    !r.has_pole_along(&MPoly::var(a).sub(&MPoly::var(b)))
}

/// The coefficients `A_{k,0;a}(xi, zeta)`, `k <= kmax`, with every
/// field treated as a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ATable {
    pub n: usize,
    pub a: u8,
    pub entries: Vec<RatF>,
    /// The kernels `R^i_{r,0;a}(p, q)` the entries were assembled from.
    pub kernels: BTreeMap<(u32, Slot), RatF>,
}

/// Assemble `A_{r,0;a} = oint dp oint dq [f R1 g + f R2 b + a R3 g + a R4 b]`
/// with `f`, `g` replaced by their closed forms.
pub fn assemble(kernels: &BTreeMap<(u32, Slot), RatF>, r: u32, finite: bool) -> Result<RatF, NumError> {
    let (fbar, alpha) = generating_symbol(Var::P, Var::XI);
    let (gbar, beta) = generating_symbol(Var::Q, Var::ZETA);
    let cq = |f: &RatF| -> Result<RatF, NumError> {
        if finite {
            contour_finite(f, Var::Q, &[MPoly::var(Var::ZETA), MPoly::var(Var::W)])
        } else {
            contour(f, Var::Q)
        }
    };
    let cp = |f: &RatF| -> Result<RatF, NumError> {
        if finite {
            contour_finite(f, Var::P, &[MPoly::var(Var::XI), MPoly::var(Var::W)])
        } else {
            contour(f, Var::P)
        }
    };
    let k = |s: Slot| kernels[&(r, s)].clone();
    let inner_f = cq(&k(Slot::FG).mul(&gbar))?.add(&cq(&k(Slot::FB))?.mul(&beta));
    let inner_a = cq(&k(Slot::AG).mul(&gbar))?.add(&cq(&k(Slot::AB))?.mul(&beta));
    Ok(cp(&fbar.mul(&inner_f))?.add(&alpha.mul(&cp(&inner_a)?)))
}

pub fn generating_atable(n: usize, a: u8, kmax: u32) -> Result<ATable, ATableError> {
    let ks = kernels(n, a, kmax)?;
    for ((r, slot), kern) in &ks {
        if !regular_on_diagonal(kern, Var::P, Var::Q) {
            return Err(ATableError::SingularKernel { index: slot.index(), r: *r, a });
        }
    }
    let mut entries = Vec::new();
    for r in 0..=kmax {
        entries.push(assemble(&ks, r, false)?);
    }
    Ok(ATable { n, a, entries, kernels: ks })
}

impl ATable {
    /// `A(zeta, xi) = (-1)^k A(xi, zeta)` for every entry.
    pub fn parity_holds(&self) -> bool {
        self.entries.iter().enumerate().all(|(k, e)| {
            let swapped = e.swap(Var::XI, Var::ZETA);
            if k % 2 == 0 {
                swapped == *e
            } else {
                swapped == e.neg()
            }
        })
    }

    pub fn diagonal_regular(&self) -> bool {
        self.entries.iter().all(|e| regular_on_diagonal(e, Var::XI, Var::ZETA))
    }

    pub fn to_serial(&self) -> ATableSerial {
        ATableSerial {
            n: self.n,
            a: self.a,
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let (numerator, den) = e.to_parts();
                    EntrySerial {
                        k: k as u32,
                        numerator,
                        denominator: den.into_iter().map(|(factor, exponent)| FactorSerial { factor, exponent }).collect(),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorSerial {
    pub factor: String,
    pub exponent: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntrySerial {
    pub k: u32,
    pub numerator: String,
    pub denominator: Vec<FactorSerial>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ATableSerial {
    pub n: usize,
    pub a: u8,
    pub entries: Vec<EntrySerial>,
}

/// Kernels of the pipeline against the displayed closed forms.
pub fn rtable_matches(n: usize, a: u8, rmax: u32) -> Result<Vec<(u32, Slot, bool, bool)>, ATableError> {
    let ks = kernels(n, a, rmax)?;
    let mut out = Vec::new();
    for r in 0..=rmax {
        let closed = rtable_closed(n, a, r);
        for slot in Slot::ALL {
            let got = &ks[&(r, slot)];
            out.push((r, slot, *got == closed[slot.index() - 1], regular_on_diagonal(got, Var::P, Var::Q)));
        }
    }
    Ok(out)
}

/// `lambda(xi)` for callers that only need the superpotential.
pub fn lambda_at(n: usize, v: Var) -> RatF {
    lambda(n, v)
}
