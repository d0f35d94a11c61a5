//! Sparse multivariate polynomials over the rationals in a fixed set of
//! named indeterminates, ordered lexicographically with `p` highest.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::{int, rat_to_f64, Scalar};

/// Indeterminate. The first six are the spectral parameters and the two
/// scalar fields; `v_k` follows as `Var(5 + k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u8);

impl Var {
    pub const P: Var = Var(0);
    pub const Q: Var = Var(1);
    pub const XI: Var = Var(2);
    pub const ZETA: Var = Var(3);
    pub const W: Var = Var(4);
    pub const U: Var = Var(5);

    pub fn v(k: usize) -> Var {
        assert!(k >= 1 && k < 200);
        Var(5 + k as u8)
    }

    pub fn name(self) -> String {
        match self.0 {
            0 => "p".into(),
            1 => "q".into(),
            2 => "xi".into(),
            3 => "zeta".into(),
            4 => "w".into(),
            5 => "u".into(),
            k => format!("v{}", k - 5),
        }
    }
}

/// Exponent vector indexed by `Var`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(Vec<u32>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        let mut m = vec![0; v.0 as usize + 1];
        m[v.0 as usize] = e;
        Mono(m).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.get(v.0 as usize).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, o: &Mono) -> Mono {
        let n = self.0.len().max(o.0.len());
        Mono((0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + o.0.get(i).copied().unwrap_or(0))
            .collect())
    }

    fn divides(&self, o: &Mono) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| e <= o.0.get(i).copied().unwrap_or(0))
    }

    fn div(&self, d: &Mono) -> Mono {
        Mono(self
            .0
            .iter()
            .enumerate()
            .map(|(i, &e)| e - d.0.get(i).copied().unwrap_or(0))
            .collect())
        .trimmed()
    }

    fn with_exp(&self, v: Var, e: u32) -> Mono {
        let mut m = self.0.clone();
        if m.len() <= v.0 as usize {
            m.resize(v.0 as usize + 1, 0);
        }
        m[v.0 as usize] = e;
        Mono(m).trimmed()
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var(i as u8), e))
    }

    fn gcd(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(o.0.iter()).map(|(a, b)| *a.min(b)).collect()).trimmed()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MPoly {
    terms: BTreeMap<Mono, Scalar>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        MPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Scalar::one(), Mono::var(v, 1))
    }

    pub fn term(c: Scalar, m: Mono) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Constant value, if the polynomial has no indeterminates.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Mono, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> MPoly {
        if s.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Coefficients as a polynomial in `v`: entry `k` multiplies `v^k`.
    pub fn coeffs_in(&self, v: Var) -> Vec<MPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MPoly::zero(); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            out[e].add_term(m.with_exp(v, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: Var, cs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero();
        for (k, c) in cs.iter().enumerate() {
            for (m, x) in &c.terms {
                out.add_term(m.mul(&Mono::var(v, k as u32)), x.clone());
            }
        }
        out
    }

    pub fn deriv(&self, v: Var) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                out.add_term(m.with_exp(v, e - 1), c * int(e as i64));
            }
        }
        out
    }

    /// Substitute `v := value`.
    pub fn subst(&self, v: Var, value: &MPoly) -> MPoly {
        let cs = self.coeffs_in(v);
        // Horner
        cs.iter()
            .rev()
            .fold(MPoly::zero(), |acc, c| acc.mul(value).add(c))
    }

    /// Exchange two indeterminates.
    pub fn swap(&self, a: Var, b: Var) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let (ea, eb) = (m.exp(a), m.exp(b));
            out.add_term(m.with_exp(a, eb).with_exp(b, ea), c.clone());
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = MPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let qm = rm.div(&dm);
            let qc = rc / &dc;
            let t = MPoly::term(qc.clone(), qm.clone());
            rem = rem.sub(&t.mul(d));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        match it.next() {
            None => Mono::one(),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    pub fn div_mono(&self, m: &Mono) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(k, c)| (k.div(m), c.clone())).collect(),
        }
    }

    /// Scaled so that the lexicographically leading coefficient is one;
    /// returns the factor removed.
    pub fn monic(&self) -> (Scalar, MPoly) {
        match self.leading() {
            None => (Scalar::one(), MPoly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }

    pub fn eval_rat(&self, at: &dyn Fn(Var) -> Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.vars() {
                let x = at(v);
                for _ in 0..e {
                    t *= &x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_complex(&self, at: &dyn Fn(Var) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(rat_to_f64(c), 0.0);
            for (v, e) in m.vars() {
                t *= at(v).powu(e);
            }
            acc += t;
        }
        acc
    }

    /// Substitute rational values for a subset of the indeterminates.
    pub fn partial_eval(&self, at: &dyn Fn(Var) -> Option<Scalar>) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Mono::one();
            for (v, e) in m.vars() {
                match at(v) {
                    Some(x) => {
                        for _ in 0..e {
                            coef *= &x;
                        }
                    }
                    None => rest = rest.mul(&Mono::var(v, e)),
                }
            }
            out.add_term(rest, coef);
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Scalar::zero();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(a.to_string());
            }
            for (v, e) in m.vars() {
                if e == 1 {
                    parts.push(v.name());
                } else {
                    parts.push(format!("{}^{}", v.name(), e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var(Var::P)
    }
    fn w() -> MPoly {
        MPoly::var(Var::W)
    }

    #[test]
    fn exact_division() {
        let a = x().sub(&w());
        let b = x().mul(&x()).add(&w().scale(&int(3)));
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.add(&MPoly::one()).div_exact(&a), None);
    }

    #[test]
    fn substitution_and_swap() {
        let f = x().pow(2).mul(&w());
        let g = f.subst(Var::P, &w());
        assert_eq!(g, w().pow(3));
        assert_eq!(f.swap(Var::P, Var::W), w().pow(2).mul(&x()));
    }

    #[test]
    fn display_is_stable() {
        let f = x().pow(2).sub(&w().scale(&int(2))).add(&MPoly::int(1));
        assert_eq!(f.to_string(), "p^2 - 2*w + 1");
    }
}
