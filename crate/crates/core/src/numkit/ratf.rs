//! Multivariate rational functions with a factored denominator.
//!
//! The denominator is a product of powers of monic, non-constant "atoms"
//! (in practice linear forms such as `p - w` or `xi - zeta`). After every
//! operation the numerator is divided by each atom as often as it exactly
//! can, so an atom left in the denominator is a genuine pole. Equality is
//! decided by cross-multiplication and never depends on the factorisation.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::mpoly::Mono;
use super::{Field, MPoly, NumError, Scalar, UPoly, Var};

#[derive(Debug, Clone, Default)]
pub struct RatF {
    num: MPoly,
    den: BTreeMap<MPoly, u32>,
}

impl PartialEq for RatF {
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).num.is_zero()
    }
}

impl From<MPoly> for RatF {
    fn from(num: MPoly) -> Self {
        RatF {
            num,
            den: BTreeMap::new(),
        }
    }
}

impl RatF {
    pub fn zero() -> Self {
        RatF::default()
    }

    pub fn one() -> Self {
        MPoly::one().into()
    }

    pub fn constant(c: Scalar) -> Self {
        MPoly::constant(c).into()
    }

    pub fn int(n: i64) -> Self {
        MPoly::int(n).into()
    }

    pub fn var(v: Var) -> Self {
        MPoly::var(v).into()
    }

    /// `1 / atom^e` for a non-constant polynomial `atom`.
    pub fn inv_pow(atom: &MPoly, e: u32) -> Self {
        let mut r = RatF::one();
        let (c, m) = atom.monic();
        if m.as_constant().is_some() {
            return RatF::constant(c.recip().pow(e as i32) * m.as_constant().unwrap().recip());
        }
        r.num = MPoly::constant(c.recip().pow(e as i32));
        r.den.insert(m, e);
        r
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom_atoms(&self) -> &BTreeMap<MPoly, u32> {
        &self.den
    }

    pub fn denom_poly(&self) -> MPoly {
        self.den
            .iter()
            .fold(MPoly::one(), |acc, (a, e)| acc.mul(&a.pow(*e)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// True if the canonical denominator contains `atom` (up to scaling).
    pub fn has_pole_along(&self, atom: &MPoly) -> bool {
        let (_, m) = atom.monic();
        self.den.contains_key(&m)
    }

    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let atoms: Vec<MPoly> = self.den.keys().cloned().collect();
        for a in atoms {
            let mut e = self.den[&a];
            while e > 0 {
                match self.num.div_exact(&a) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e == 0 {
                self.den.remove(&a);
            } else {
                self.den.insert(a, e);
            }
        }
        self
    }

    pub fn add(&self, o: &RatF) -> RatF {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let mut den = self.den.clone();
        for (a, e) in &o.den {
            let x = den.entry(a.clone()).or_insert(0);
            *x = (*x).max(*e);
        }
        let lift = |r: &RatF| -> MPoly {
            den.iter().fold(r.num.clone(), |acc, (a, e)| {
                let have = r.den.get(a).copied().unwrap_or(0);
                if *e > have {
                    acc.mul(&a.pow(*e - have))
                } else {
                    acc
                }
            })
        };
        let num = lift(self).add(&lift(o));
        RatF { num, den }.reduce()
    }

    pub fn neg(&self) -> RatF {
        RatF {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatF) -> RatF {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatF) -> RatF {
        if self.is_zero() || o.is_zero() {
            return RatF::zero();
        }
        let mut den = self.den.clone();
        for (a, e) in &o.den {
            *den.entry(a.clone()).or_insert(0) += e;
        }
        RatF {
            num: self.num.mul(&o.num),
            den,
        }
        .reduce()
    }

    pub fn scale(&self, c: &Scalar) -> RatF {
        RatF {
            num: self.num.scale(c),
            den: if Zero::is_zero(c) { BTreeMap::new() } else { self.den.clone() },
        }
    }

    pub fn mul_poly(&self, p: &MPoly) -> RatF {
        self.mul(&RatF::from(p.clone()))
    }

    pub fn pow(&self, e: u32) -> RatF {
        (0..e).fold(RatF::one(), |acc, _| acc.mul(self))
    }

    /// Multiplicative inverse. The numerator is split into its monomial
    /// content (one atom per variable) and the remaining cofactor, which
    /// becomes a single atom.
    pub fn inv(&self) -> Option<RatF> {
        if self.num.is_zero() {
            return None;
        }
        let content = self.num.monomial_content();
        let rest = self.num.div_mono(&content);
        let (c, rest_monic) = rest.monic();
        let mut out = RatF::from(self.denom_poly().scale(&c.recip()));
        for (v, e) in content.vars() {
            out = out.mul(&RatF::inv_pow(&MPoly::var(v), e));
        }
        if rest_monic.as_constant().is_none() {
            out = out.mul(&RatF::inv_pow(&rest_monic, 1));
        }
        Some(out)
    }

    pub fn div(&self, o: &RatF) -> Option<RatF> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn deriv(&self, v: Var) -> RatF {
        let active: Vec<(&MPoly, u32)> = self
            .den
            .iter()
            .filter(|(a, _)| a.contains(v))
            .map(|(a, e)| (a, *e))
            .collect();
        if active.is_empty() {
            return RatF {
                num: self.num.deriv(v),
                den: self.den.clone(),
            }
            .reduce();
        }
        let prod_all = active.iter().fold(MPoly::one(), |acc, (a, _)| acc.mul(a));
        let mut num = self.num.deriv(v).mul(&prod_all);
        for (i, (a, e)) in active.iter().enumerate() {
            let others = active
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(MPoly::one(), |acc, (_, (b, _))| acc.mul(b));
            let t = self
                .num
                .mul(&a.deriv(v))
                .mul(&others)
                .scale(&super::int(*e as i64));
            num = num.sub(&t);
        }
        let mut den = self.den.clone();
        for (a, _) in &active {
            *den.get_mut(*a).unwrap() += 1;
        }
        RatF { num, den }.reduce()
    }

    pub fn nth_deriv(&self, v: Var, k: usize) -> RatF {
        (0..k).fold(self.clone(), |f, _| f.deriv(v))
    }

    /// Substitute `v := value`; fails if a denominator atom vanishes.
    pub fn subst(&self, v: Var, value: &MPoly) -> Result<RatF, NumError> {
        let mut out = RatF::from(self.num.subst(v, value));
        for (a, e) in &self.den {
            let a2 = if a.contains(v) { a.subst(v, value) } else { a.clone() };
            if a2.is_zero() {
                return Err(NumError::IdenticallyZeroDenominator);
            }
            out = out.mul(&RatF::inv_pow(&a2, *e));
        }
        Ok(out)
    }

    pub fn swap(&self, a: Var, b: Var) -> RatF {
        let mut out = RatF::from(self.num.swap(a, b));
        for (x, e) in &self.den {
            out = out.mul(&RatF::inv_pow(&x.swap(a, b), *e));
        }
        out
    }

    pub fn partial_eval(&self, at: &dyn Fn(Var) -> Option<Scalar>) -> Result<RatF, NumError> {
        let mut out = RatF::from(self.num.partial_eval(at));
        for (x, e) in &self.den {
            let x2 = x.partial_eval(at);
            if x2.is_zero() {
                return Err(NumError::IdenticallyZeroDenominator);
            }
            out = out.mul(&RatF::inv_pow(&x2, *e));
        }
        Ok(out)
    }

    pub fn eval_complex(&self, at: &dyn Fn(Var) -> Complex64) -> Complex64 {
        let mut d = Complex64::new(1.0, 0.0);
        for (a, e) in &self.den {
            d *= a.eval_complex(at).powu(*e);
        }
        self.num.eval_complex(at) / d
    }

    pub fn eval_rat(&self, at: &dyn Fn(Var) -> Scalar) -> Result<Scalar, NumError> {
        let mut d = <Scalar as One>::one();
        for (a, e) in &self.den {
            d *= a.eval_rat(at).pow(*e as i32);
        }
        if Zero::is_zero(&d) {
            return Err(NumError::IdenticallyZeroDenominator);
        }
        Ok(self.num.eval_rat(at) / d)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.num.contains(v) || self.den.keys().any(|a| a.contains(v))
    }

    /// `res_{v = infinity}` with the convention `-[v^{-1}]` of the
    /// expansion at infinity. Requires the `v`-dependent part of the
    /// denominator to have a constant leading coefficient in `v`.
    pub fn residue_at_infinity(&self, v: Var) -> Result<RatF, NumError> {
        let mut dv = MPoly::one();
        let mut rest = RatF::one();
        for (a, e) in &self.den {
            if a.contains(v) {
                dv = dv.mul(&a.pow(*e));
            } else {
                rest = rest.mul(&RatF::inv_pow(a, *e));
            }
        }
        let dcs = dv.coeffs_in(v);
        let d = dcs.len() - 1;
        let lc = dcs[d].as_constant().ok_or(NumError::NonMonicDenominator)?;
        let mut rem = self.num.coeffs_in(v);
        if d == 0 {
            // polynomial in v: no residue
            return Ok(RatF::zero());
        }
        // reduce rem modulo dv down to degree < d
        let lc_inv = lc.recip();
        while rem.len() > d {
            let top = rem.len() - 1;
            let c = rem[top].scale(&lc_inv);
            if !c.is_zero() {
                for (j, dc) in dcs.iter().enumerate() {
                    let idx = top - d + j;
                    rem[idx] = rem[idx].sub(&c.mul(dc));
                }
            }
            rem.pop();
        }
        let top = rem.get(d - 1).cloned().unwrap_or_else(MPoly::zero);
        Ok(RatF::from(top.scale(&(-lc_inv))).mul(&rest))
    }

    /// Residue at the finite site `v = site` (sum of the Laurent coefficient
    /// of `(v - site)^{-1}`).
    pub fn residue_at(&self, v: Var, site: &MPoly) -> Result<RatF, NumError> {
        let mut order = 0u32;
        let mut regular = RatF::from(self.num.clone());
        for (a, e) in &self.den {
            if a.contains(v) && a.subst(v, site).is_zero() {
                // a = c * (v - site) for linear atoms
                let lin = MPoly::var(v).sub(site);
                let c = a.div_exact(&lin).ok_or_else(|| NumError::BadSite(a.to_string()))?;
                if c.contains(v) {
                    return Err(NumError::BadSite(a.to_string()));
                }
                order += e;
                regular = regular.mul(&RatF::inv_pow(&c, *e));
            } else {
                regular = regular.mul(&RatF::inv_pow(a, *e));
            }
        }
        if order == 0 {
            return Ok(RatF::zero());
        }
        let k = order as usize - 1;
        let dk = regular.nth_deriv(v, k);
        let fact: i64 = (1..=k as i64).product();
        Ok(dk.subst(v, site)?.scale(&super::rat(1, fact.max(1))))
    }

    /// View as a univariate rational function in `v` with coefficients in
    /// the rational functions of the remaining indeterminates.
    pub fn to_univariate(&self, v: Var) -> (UPoly<RatF>, UPoly<RatF>) {
        let to_up = |p: &MPoly| UPoly::new(p.coeffs_in(v).into_iter().map(RatF::from).collect());
        let mut den = UPoly::constant(RatF::one());
        for (a, e) in &self.den {
            den = den.mul(&to_up(a).pow(*e));
        }
        (to_up(&self.num), den)
    }

    /// Constant value if the function carries no indeterminates.
    pub fn as_constant(&self) -> Option<Scalar> {
        if !self.den.is_empty() {
            return None;
        }
        self.num.as_constant()
    }

    /// Canonical serialisation: numerator terms and denominator atoms.
    pub fn to_parts(&self) -> (String, Vec<(String, u32)>) {
        (
            self.num.to_string(),
            self.den.iter().map(|(a, e)| (a.to_string(), *e)).collect(),
        )
    }

    pub fn mono_content(&self) -> Mono {
        self.num.monomial_content()
    }
}

impl fmt::Display for RatF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (a, e)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "({})", a)?;
            } else {
                write!(f, "({})^{}", a, e)?;
            }
        }
        write!(f, ")")
    }
}

impl Field for RatF {
    fn zero() -> Self {
        RatF::zero()
    }
    fn one() -> Self {
        RatF::one()
    }
    fn from_i64(n: i64) -> Self {
        RatF::int(n)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        RatF::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatF::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatF::mul(self, o)
    }
    fn neg(&self) -> Self {
        RatF::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        RatF::inv(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::laurent::{laurent_at, Site};
    use crate::numkit::int;

    fn v(x: Var) -> MPoly {
        MPoly::var(x)
    }

    #[test]
    fn cancellation_is_canonical() {
        let pw = v(Var::P).sub(&v(Var::W));
        let f = RatF::from(pw.mul(&v(Var::U))).mul(&RatF::inv_pow(&pw, 2));
        assert_eq!(f.denom_atoms().len(), 1);
        assert_eq!(f.denom_atoms().values().next(), Some(&1));
        assert!(f.has_pole_along(&pw));
        let g = f.mul_poly(&pw);
        assert!(g.is_polynomial());
        assert_eq!(g, RatF::var(Var::U));
    }

    #[test]
    fn symbolic_geometric_series_at_infinity() {
        // u/(p - w) = u/p + u w/p^2 + u w^2/p^3 + ...
        let f = RatF::var(Var::U).mul(&RatF::inv_pow(&v(Var::P).sub(&v(Var::W)), 1));
        let (n, d) = f.to_univariate(Var::P);
        let jet = laurent_at(&n, &d, Site::Infinity, 3).unwrap();
        let u = RatF::var(Var::U);
        let w = RatF::var(Var::W);
        assert_eq!(jet.coeff(1), Some(u.clone()));
        assert_eq!(jet.coeff(2), Some(u.mul(&w)));
        assert_eq!(jet.coeff(3), Some(u.mul(&w).mul(&w)));
    }

    #[test]
    fn residues_at_infinity_and_finite_sites_sum_to_zero() {
        // (p^2 + u)/((p - w)^2 (p - xi))
        let p = v(Var::P);
        let num = p.mul(&p).add(&v(Var::U));
        let f = RatF::from(num)
            .mul(&RatF::inv_pow(&p.sub(&v(Var::W)), 2))
            .mul(&RatF::inv_pow(&p.sub(&v(Var::XI)), 1));
        let r_inf = f.residue_at_infinity(Var::P).unwrap();
        let r_w = f.residue_at(Var::P, &v(Var::W)).unwrap();
        let r_xi = f.residue_at(Var::P, &v(Var::XI)).unwrap();
        assert!(r_inf.add(&r_w).add(&r_xi).is_zero());
        assert_eq!(r_inf, RatF::int(-1));
    }

    #[test]
    fn derivative_quotient_rule() {
        let p = v(Var::P);
        let f = RatF::inv_pow(&p.sub(&v(Var::W)), 1);
        let df = f.deriv(Var::P);
        assert_eq!(df, RatF::inv_pow(&p.sub(&v(Var::W)), 2).neg());
        let g = RatF::from(p.pow(3)).mul(&f);
        let lhs = g.deriv(Var::P);
        let rhs = RatF::from(p.pow(2).scale(&int(3))).mul(&f).add(&RatF::from(p.pow(3)).mul(&df));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_roundtrip() {
        let p = v(Var::P);
        let f = RatF::from(p.mul(&p).add(&v(Var::U)).mul(&v(Var::W)))
            .mul(&RatF::inv_pow(&p.sub(&v(Var::W)), 1));
        let g = f.inv().unwrap();
        assert_eq!(f.mul(&g), RatF::one());
    }
}
