//! Differential polynomials in the fields `v_1..v_n, w, u` (plus auxiliary
//! test fields) and their x-jets, with exact rational coefficients, and the
//! epsilon-graded extension used by the dispersive Lax operator.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numkit::{int, Scalar};

/// Field identifier. Declaration order is the canonical rendering order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldId {
    V(u8),
    W,
    U,
    /// Auxiliary field (test functions, variations); never part of the phase
    /// space.
    Aux(u8),
}

impl FieldId {
    pub fn name(self) -> String {
        match self {
            FieldId::V(i) => format!("v{}", i),
            FieldId::W => "w".into(),
            FieldId::U => "u".into(),
            FieldId::Aux(i) => format!("a{}", i),
        }
    }

    pub fn is_aux(self) -> bool {
        matches!(self, FieldId::Aux(_))
    }

    /// Phase-space fields for a given `n`: `v_1..v_n, w, u`.
    pub fn phase_fields(n: usize) -> Vec<FieldId> {
        let mut f: Vec<FieldId> = (1..=n).map(|i| FieldId::V(i as u8)).collect();
        f.push(FieldId::W);
        f.push(FieldId::U);
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub field: FieldId,
    pub order: u32,
}

impl JetVar {
    pub fn new(field: FieldId, order: u32) -> Self {
        JetVar { field, order }
    }

    pub fn dx(self) -> Self {
        JetVar {
            field: self.field,
            order: self.order + 1,
        }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.field.name();
        match self.order {
            0 => write!(f, "{}", base),
            k if k <= 3 => write!(f, "{}_{}", base, "x".repeat(k as usize)),
            k => write!(f, "{}_x{}", base, k),
        }
    }
}

/// Product of jet variables with integer (possibly negative) exponents,
/// sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(JetVar, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(JetVar, i32)] {
        &self.0
    }

    pub fn exp(&self, v: JetVar) -> i32 {
        self.0
            .iter()
            .find(|(x, _)| *x == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out: Vec<(JetVar, i32)> = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            let take_left = j >= o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0);
            let take_right = i >= self.0.len() || (j < o.0.len() && o.0[j].0 < self.0[i].0);
            if take_left {
                out.push(self.0[i]);
                i += 1;
            } else if take_right {
                out.push(o.0[j]);
                j += 1;
            } else {
                let e = self.0[i].1 + o.0[j].1;
                if e != 0 {
                    out.push((self.0[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    fn with_exp(&self, v: JetVar, e: i32) -> Monomial {
        let mut out: Vec<(JetVar, i32)> = self.0.iter().copied().filter(|(x, _)| *x != v).collect();
        if e != 0 {
            out.push((v, e));
            out.sort();
        }
        Monomial(out)
    }

    /// Sum of jet orders, weighted by exponent.
    pub fn jet_degree(&self) -> i64 {
        self.0.iter().map(|(v, e)| v.order as i64 * *e as i64).sum()
    }

    pub fn has_jets(&self) -> bool {
        self.0.iter().any(|(v, _)| v.order > 0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|(_, e)| *e > 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{}^{}", v, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Finite linear combination of monomials with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn jet(field: FieldId, order: u32) -> Self {
        Self::term(Scalar::one(), Monomial::var(JetVar::new(field, order)))
    }

    pub fn field(field: FieldId) -> Self {
        Self::jet(field, 0)
    }

    /// `x^e` for a jet variable, `e` may be negative.
    pub fn power(v: JetVar, e: i32) -> Self {
        Self::term(Scalar::one(), Monomial(if e == 0 { vec![] } else { vec![(v, e)] }))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
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

    pub fn add(&self, o: &DiffPoly) -> DiffPoly {
        let (mut out, small) = if self.terms.len() >= o.terms.len() { (self.clone(), o) } else { (o.clone(), self) };
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, o: &DiffPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &DiffPoly) -> DiffPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> DiffPoly {
        if s.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, o: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        (0..e).fold(DiffPoly::one(), |acc, _| acc.mul(self))
    }

    /// Total x-derivative.
    pub fn dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for &(v, e) in &m.0 {
                let reduced = m.with_exp(v, e - 1);
                let t = reduced.mul(&Monomial::var(v.dx()));
                out.add_term(t, c * int(e as i64));
            }
        }
        out
    }

    pub fn dx_n(&self, k: u32) -> DiffPoly {
        (0..k).fold(self.clone(), |f, _| f.dx())
    }

    /// Partial derivative with respect to one jet variable.
    pub fn partial(&self, v: JetVar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                out.add_term(m.with_exp(v, e - 1), c * int(e as i64));
            }
        }
        out
    }

    /// Highest jet order of `field` appearing.
    pub fn max_order(&self, field: FieldId) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter())
            .filter(|(v, _)| v.field == field)
            .map(|(v, _)| v.order)
            .max()
    }

    pub fn fields(&self) -> Vec<FieldId> {
        let mut f: Vec<FieldId> = self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.field)).collect();
        f.sort();
        f.dedup();
        f
    }

    /// Drop every monomial containing a jet of order at least one.
    pub fn freeze_jets(&self) -> DiffPoly {
        self.retain(|m| !m.has_jets())
    }

    /// Drop monomials containing jets (order >= 1) of the selected fields.
    pub fn freeze_fields(&self, pred: impl Fn(FieldId) -> bool) -> DiffPoly {
        self.retain(|m| !m.0.iter().any(|(v, _)| v.order > 0 && pred(v.field)))
    }

    pub fn retain(&self, keep: impl Fn(&Monomial) -> bool) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Exact division by a jet variable; `None` if a resulting exponent
    /// would be negative where the input was a polynomial.
    pub fn div_var_poly(&self, v: JetVar) -> Option<DiffPoly> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e < 1 {
                return None;
            }
            out.add_term(m.with_exp(v, e - 1), c.clone());
        }
        Some(out)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    /// Substitute a jet variable by a constant value.
    pub fn eval_var(&self, v: JetVar, x: &Scalar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let f = if e >= 0 { x.pow(e) } else { x.recip().pow(-e) };
            out.add_term(m.with_exp(v, 0), c * f);
        }
        out
    }

    /// Evaluate on constant field values (all jets of order >= 1 are zero).
    pub fn eval_frozen(&self, at: &dyn Fn(FieldId) -> Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in self.freeze_jets().terms() {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                t *= at(v.field).pow(*e);
            }
            acc += t;
        }
        acc
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    pub fn is_jet_homogeneous(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(Monomial::jet_degree);
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.0.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", a, m)?;
            }
        }
        Ok(())
    }
}

/// Sentinel truncation order for values that carry no epsilon truncation.
pub const EXACT: u32 = u32::MAX;

/// Polynomial in epsilon with `DiffPoly` coefficients, truncated above
/// `order`.
#[derive(Debug, Clone)]
pub struct EpsPoly {
    coeffs: Vec<DiffPoly>,
    order: u32,
}

/// Equality of the stored coefficients; the truncation order is not compared.
impl PartialEq for EpsPoly {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}

impl Eq for EpsPoly {}

impl Default for EpsPoly {
    fn default() -> Self {
        EpsPoly::zero()
    }
}

impl From<DiffPoly> for EpsPoly {
    fn from(d: DiffPoly) -> Self {
        EpsPoly::new(vec![d], EXACT)
    }
}

impl EpsPoly {
    pub fn new(coeffs: Vec<DiffPoly>, order: u32) -> Self {
        let mut e = EpsPoly { coeffs, order };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.order != EXACT && self.coeffs.len() > self.order as usize + 1 {
            self.coeffs.truncate(self.order as usize + 1);
        }
        while self.coeffs.last().map_or(false, DiffPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        EpsPoly { coeffs: Vec::new(), order: EXACT }
    }

    pub fn one() -> Self {
        DiffPoly::one().into()
    }

    pub fn int(n: i64) -> Self {
        DiffPoly::int(n).into()
    }

    pub fn constant(c: Scalar) -> Self {
        DiffPoly::constant(c).into()
    }

    pub fn field(f: FieldId) -> Self {
        DiffPoly::field(f).into()
    }

    pub fn jet(f: FieldId, k: u32) -> Self {
        DiffPoly::jet(f, k).into()
    }

    /// `eps^k * d`.
    pub fn eps_term(k: u32, d: DiffPoly) -> Self {
        let mut coeffs = vec![DiffPoly::zero(); k as usize];
        coeffs.push(d);
        EpsPoly::new(coeffs, EXACT)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = self.order.min(order);
        self.normalize();
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `eps^k`; panics if `k` exceeds the truncation order.
    pub fn coeff(&self, k: u32) -> DiffPoly {
        assert!(k <= self.order, "epsilon order {} beyond truncation {}", k, self.order);
        self.coeffs.get(k as usize).cloned().unwrap_or_default()
    }

    pub fn try_coeff(&self, k: u32) -> Option<DiffPoly> {
        (k <= self.order).then(|| self.coeffs.get(k as usize).cloned().unwrap_or_default())
    }

    pub fn coeffs(&self) -> &[DiffPoly] {
        &self.coeffs
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> EpsPoly {
        EpsPoly::new(self.coeffs.iter().map(f).collect(), self.order)
    }

    pub fn add(&self, o: &EpsPoly) -> EpsPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => DiffPoly::zero(),
            })
            .collect();
        EpsPoly::new(coeffs, self.order.min(o.order))
    }

    pub fn sub(&self, o: &EpsPoly) -> EpsPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> EpsPoly {
        self.map(DiffPoly::neg)
    }

    pub fn scale(&self, s: &Scalar) -> EpsPoly {
        self.map(|d| d.scale(s))
    }

    pub fn mul(&self, o: &EpsPoly) -> EpsPoly {
        let order = self.order.min(o.order);
        if self.is_zero() || o.is_zero() {
            return EpsPoly { coeffs: Vec::new(), order };
        }
        let n = (self.coeffs.len() + o.coeffs.len() - 1).min(order.saturating_add(1) as usize);
        let mut coeffs = vec![DiffPoly::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j].add_assign(&a.mul(b));
                }
            }
        }
        EpsPoly::new(coeffs, order)
    }

    pub fn mul_diff(&self, d: &DiffPoly) -> EpsPoly {
        self.map(|c| c.mul(d))
    }

    /// Multiply by `eps^k`.
    pub fn shift_eps(&self, k: u32) -> EpsPoly {
        let mut coeffs = vec![DiffPoly::zero(); k as usize];
        coeffs.extend(self.coeffs.iter().cloned());
        EpsPoly::new(coeffs, self.order)
    }

    /// Divide by `eps`; the constant term must vanish. The truncation order
    /// drops by one.
    pub fn div_eps(&self) -> Option<EpsPoly> {
        if self.coeffs.first().map_or(false, |c| !c.is_zero()) {
            return None;
        }
        let order = if self.order == EXACT { EXACT } else { self.order.checked_sub(1)? };
        Some(EpsPoly::new(self.coeffs.iter().skip(1).cloned().collect(), order))
    }

    pub fn dx(&self) -> EpsPoly {
        self.map(DiffPoly::dx)
    }

    pub fn dx_n(&self, k: u32) -> EpsPoly {
        self.map(|d| d.dx_n(k))
    }

    pub fn partial(&self, v: JetVar) -> EpsPoly {
        self.map(|d| d.partial(v))
    }

    pub fn freeze_jets(&self) -> EpsPoly {
        self.map(DiffPoly::freeze_jets)
    }

    pub fn freeze_fields(&self, pred: impl Fn(FieldId) -> bool + Copy) -> EpsPoly {
        self.map(|d| d.freeze_fields(pred))
    }

    /// Sum of all epsilon coefficients (evaluation at `eps = 1`).
    pub fn at_eps_one(&self) -> DiffPoly {
        self.coeffs.iter().fold(DiffPoly::zero(), |acc, c| acc.add(c))
    }

    pub fn max_order(&self, field: FieldId) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| c.max_order(field)).max()
    }

    pub fn fields(&self) -> Vec<FieldId> {
        let mut f: Vec<FieldId> = self.coeffs.iter().flat_map(DiffPoly::fields).collect();
        f.sort();
        f.dedup();
        f
    }

    /// Equality of all coefficients up to the smaller truncation order.
    pub fn agrees_with(&self, o: &EpsPoly) -> bool {
        let top = self.order.min(o.order);
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n)
            .filter(|&k| top == EXACT || k as u32 <= top)
            .all(|k| self.coeffs.get(k).cloned().unwrap_or_default() == o.coeffs.get(k).cloned().unwrap_or_default())
    }

    pub fn is_polynomial(&self) -> bool {
        self.coeffs.iter().all(DiffPoly::is_polynomial)
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "eps*({})", c)?,
                _ => write!(f, "eps^{}*({})", k, c)?,
            }
        }
        if self.order != EXACT {
            write!(f, " + O(eps^{})", self.order + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum JetError {
    /// The Euler operator of the residual does not vanish; the witness lists
    /// the nonzero variational derivatives per field.
    #[error("not a total derivative (epsilon order {eps_order}); Euler witness: {}", .witness.iter().map(|(f, d)| format!("{}: {}", f.name(), d)).collect::<Vec<_>>().join(", "))]
    NotATotalDerivative {
        eps_order: u32,
        witness: Vec<(FieldId, DiffPoly)>,
    },
}

/// Variational derivative `sum_s (-dx)^s d f / d field^{(s)}`.
pub fn euler_vd_diff(f: &DiffPoly, field: FieldId) -> DiffPoly {
    let top = match f.max_order(field) {
        Some(t) => t,
        None => return DiffPoly::zero(),
    };
    let mut out = DiffPoly::zero();
    for s in 0..=top {
        let mut term = f.partial(JetVar::new(field, s));
        if term.is_zero() {
            continue;
        }
        term = term.dx_n(s);
        if s % 2 == 1 {
            term = term.neg();
        }
        out.add_assign(&term);
    }
    out
}

pub fn euler_vd(f: &EpsPoly, field: FieldId) -> EpsPoly {
    f.map(|d| euler_vd_diff(d, field))
}

fn euler_witness(f: &DiffPoly) -> Vec<(FieldId, DiffPoly)> {
    f.fields()
        .into_iter()
        .map(|fid| (fid, euler_vd_diff(f, fid)))
        .filter(|(_, d)| !d.is_zero())
        .collect()
}

/// Inverse of the total derivative on its image.
///
/// Integrates the monomials carrying the highest jet variable one at a time;
/// a total derivative is linear in its top jets, so every step removes one
/// such monomial without creating new ones. Any leftover means `f` is not in
/// the image of `dx`, and the Euler operator of `f` is returned as witness.
pub fn dx_inverse_diff(f: &DiffPoly) -> Result<DiffPoly, Vec<(FieldId, DiffPoly)>> {
    let mut rest = f.clone();
    let mut g = DiffPoly::zero();
    let budget = 200_000usize;
    for _ in 0..budget {
        if rest.is_zero() {
            return Ok(g);
        }
        // highest jet variable present
        let top = rest
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| *v))
            .max_by(|a, b| a.order.cmp(&b.order).then(a.field.cmp(&b.field)));
        let top = match top {
            Some(t) if t.order > 0 => t,
            _ => break,
        };
        let (m, c) = match rest.terms.iter().find(|(m, _)| m.exp(top) != 0) {
            Some((m, c)) => (m.clone(), c.clone()),
            None => break,
        };
        if m.exp(top) != 1 {
            break;
        }
        // every other order-`top.order` jet must be absent from this monomial
        if m.0.iter().any(|(v, _)| *v != top && v.order >= top.order) {
            break;
        }
        let below = JetVar::new(top.field, top.order - 1);
        let a = m.exp(below);
        if a == -1 {
            break;
        }
        let cofactor = m.with_exp(top, 0).with_exp(below, 0);
        let new_m = cofactor.mul(&Monomial(vec![(below, a + 1)]));
        let piece = DiffPoly::term(c / int((a + 1) as i64), new_m);
        rest = rest.sub(&piece.dx());
        g = g.add(&piece);
    }
    if rest.is_zero() {
        Ok(g)
    } else {
        Err(euler_witness(f))
    }
}

/// `dx^{-1}` on epsilon-graded densities, coefficientwise.
pub fn dx_inverse(f: &EpsPoly) -> Result<EpsPoly, JetError> {
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    for (k, c) in f.coeffs.iter().enumerate() {
        match dx_inverse_diff(c) {
            Ok(g) => coeffs.push(g),
            Err(witness) => {
                return Err(JetError::NotATotalDerivative {
                    eps_order: k as u32,
                    witness,
                })
            }
        }
    }
    Ok(EpsPoly::new(coeffs, f.order))
}

pub fn dx(f: &EpsPoly) -> EpsPoly {
    f.dx()
}

pub fn freeze_jets(f: &EpsPoly) -> EpsPoly {
    f.freeze_jets()
}

/// Apply an evolutionary derivation: `D(f) = sum d f/d field^{(s)} dx^s(V[field])`.
pub fn apply_derivation(f: &EpsPoly, velocity: &dyn Fn(FieldId) -> Option<EpsPoly>) -> EpsPoly {
    let mut out = EpsPoly::zero().with_order(f.order);
    for field in f.fields() {
        let v = match velocity(field) {
            Some(v) => v,
            None => continue,
        };
        let top = f.max_order(field).unwrap_or(0);
        let mut dv = v.clone();
        for s in 0..=top {
            let part = f.partial(JetVar::new(field, s));
            if !part.is_zero() {
                out = out.add(&part.mul(&dv));
            }
            dv = dv.dx();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> DiffPoly {
        DiffPoly::field(FieldId::U)
    }
    fn w() -> DiffPoly {
        DiffPoly::field(FieldId::W)
    }
    fn j(f: FieldId, k: u32) -> DiffPoly {
        DiffPoly::jet(f, k)
    }

    #[test]
    fn leibniz() {
        let f = u().mul(&w());
        let expected = j(FieldId::U, 1).mul(&w()).add(&u().mul(&j(FieldId::W, 1)));
        assert_eq!(f.dx(), expected);
        assert_eq!(DiffPoly::field(FieldId::V(1)).dx(), j(FieldId::V(1), 1));
        let e = EpsPoly::eps_term(1, j(FieldId::W, 1).pow(2));
        let de = EpsPoly::eps_term(1, j(FieldId::W, 1).mul(&j(FieldId::W, 2)).scale(&int(2)));
        assert_eq!(e.dx(), de);
    }

    #[test]
    fn dx_inverse_examples() {
        let f = j(FieldId::U, 1).mul(&w()).add(&u().mul(&j(FieldId::W, 1)));
        assert_eq!(dx_inverse_diff(&f).unwrap(), u().mul(&w()));
        let err = dx_inverse(&u().mul(&w()).into()).unwrap_err();
        match err {
            JetError::NotATotalDerivative { witness, .. } => {
                assert!(witness.contains(&(FieldId::U, w())));
                assert!(witness.contains(&(FieldId::W, u())));
            }
        }
    }

    #[test]
    fn euler_examples() {
        let half = crate::numkit::rat(1, 2);
        assert_eq!(euler_vd_diff(&u().mul(&u()).scale(&half), FieldId::U), u());
        assert_eq!(
            euler_vd_diff(&u().mul(&j(FieldId::U, 2)), FieldId::U),
            j(FieldId::U, 2).scale(&int(2))
        );
        assert!(euler_vd_diff(&j(FieldId::U, 1), FieldId::U).is_zero());
    }

    #[test]
    fn euler_matches_first_variation() {
        // oracle: d/dt int (u + t phi)(u + t phi)_xx at t = 0 = int phi (2 u_xx) after parts
        let phi = FieldId::Aux(0);
        let f = u().mul(&j(FieldId::U, 2));
        // first variation density: phi * u_xx + u * phi_xx
        let var = DiffPoly::field(phi).mul(&j(FieldId::U, 2)).add(&u().mul(&j(phi, 2)));
        let lhs = DiffPoly::field(phi).mul(&euler_vd_diff(&f, FieldId::U));
        assert!(dx_inverse_diff(&var.sub(&lhs)).is_ok());
    }

    #[test]
    fn freeze() {
        let f = EpsPoly::field(FieldId::U).add(&EpsPoly::eps_term(1, j(FieldId::W, 1)));
        assert_eq!(f.freeze_jets(), EpsPoly::field(FieldId::U));
        let g = DiffPoly::field(FieldId::V(1)).mul(&w());
        assert_eq!(g.freeze_jets(), g);
        assert!(j(FieldId::W, 1).mul(&j(FieldId::W, 2)).freeze_jets().is_zero());
    }

    #[test]
    fn laurent_exponents_differentiate() {
        let inv_u = DiffPoly::power(JetVar::new(FieldId::U, 0), -1);
        assert_eq!(inv_u.dx(), DiffPoly::power(JetVar::new(FieldId::U, 0), -2).mul(&j(FieldId::U, 1)).neg());
        assert_eq!(inv_u.mul(&u()), DiffPoly::one());
    }

    #[test]
    fn rendering_order() {
        let f = u().mul(&j(FieldId::W, 1)).add(&w().mul(&j(FieldId::U, 1))).scale(&int(2)).sub(&j(FieldId::U, 2));
        assert_eq!(f.to_string(), "2*w*u_x + 2*w_x*u - u_xx");
    }
}
