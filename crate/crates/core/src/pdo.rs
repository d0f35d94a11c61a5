//! Truncated pseudo-differential operators `sum_k a_k D^k` over the
//! epsilon-graded jet ring, with `D = eps * d/dx`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::jetring::{DiffPoly, EpsPoly, EXACT};
use crate::numkit::{int, Scalar};

/// Floor value of operators whose coefficients are known for every power.
pub const NO_FLOOR: i64 = i64::MIN / 4;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PdoError {
    #[error("coefficient of D^{requested} lies below the truncation floor {floor}")]
    TruncationExhausted { requested: i64, floor: i64 },
    #[error("operator is not monic of the expected order")]
    NonMonicInput,
    #[error("infinite expansion with neither a power floor nor an epsilon truncation")]
    Unbounded,
}

/// `sum_{k >= floor} terms[k] D^k`; coefficients below `floor` are unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct PDOp {
    terms: BTreeMap<i64, EpsPoly>,
    floor: i64,
}

fn product_floor(a: &PDOp, b: &PDOp) -> i64 {
    let side = |f: i64, top: i64| if f == NO_FLOOR || top == NO_FLOOR { NO_FLOOR } else { f + top };
    side(a.floor, b.top_or_floor()).max(side(a.top_or_floor(), b.floor))
}

/// `k (k-1) ... (k-l+1) / l!` for any integer `k`.
pub fn binom(k: i64, l: u32) -> Scalar {
    let mut acc = Scalar::one();
    for i in 0..l as i64 {
        acc = acc * int(k - i) / int(i + 1);
    }
    acc
}

impl PDOp {
    pub fn zero() -> Self {
        PDOp { terms: BTreeMap::new(), floor: NO_FLOOR }
    }

    pub fn with_floor(mut self, floor: i64) -> Self {
        self.floor = self.floor.max(floor);
        self.terms = self.terms.split_off(&self.floor);
        self
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, EpsPoly)>, floor: i64) -> Self {
        let mut out = PDOp { terms: BTreeMap::new(), floor };
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    /// `f` as a zeroth-order operator.
    pub fn function(f: EpsPoly) -> Self {
        Self::from_terms([(0, f)], NO_FLOOR)
    }

    /// `D^k` for `k >= 0`.
    pub fn d_pow(k: u32) -> Self {
        Self::from_terms([(k as i64, EpsPoly::one())], NO_FLOOR)
    }

    pub fn d() -> Self {
        Self::d_pow(1)
    }

    /// `D^k` for any `k`, known down to `floor`.
    pub fn monomial(k: i64, c: EpsPoly, floor: i64) -> Self {
        Self::from_terms([(k, c)], floor)
    }

    fn add_term(&mut self, k: i64, c: EpsPoly) {
        if k < self.floor {
            return;
        }
        let entry = self.terms.remove(&k).map_or(c.clone(), |old| old.add(&c));
        if !entry.is_zero() {
            self.terms.insert(k, entry);
        }
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor == NO_FLOOR
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn top_or_floor(&self) -> i64 {
        let below = if self.floor == NO_FLOOR { NO_FLOOR } else { self.floor - 1 };
        self.order().unwrap_or(NO_FLOOR).max(below)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &EpsPoly)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient of `D^k`, refusing reads below the floor.
    pub fn coeff(&self, k: i64) -> Result<EpsPoly, PdoError> {
        if k < self.floor {
            return Err(PdoError::TruncationExhausted { requested: k, floor: self.floor });
        }
        Ok(self.terms.get(&k).cloned().unwrap_or_default())
    }

    pub fn res(&self) -> Result<EpsPoly, PdoError> {
        self.coeff(-1)
    }

    pub fn plus_part(&self) -> PDOp {
        PDOp {
            terms: self.terms.range(0..).map(|(k, c)| (*k, c.clone())).collect(),
            floor: if self.floor <= 0 { NO_FLOOR } else { self.floor },
        }
    }

    pub fn minus_part(&self) -> PDOp {
        PDOp {
            terms: self.terms.range(..0).map(|(k, c)| (*k, c.clone())).collect(),
            floor: self.floor,
        }
    }

    pub fn add(&self, o: &PDOp) -> PDOp {
        let floor = self.floor.max(o.floor);
        let mut out = PDOp { terms: BTreeMap::new(), floor };
        for (k, c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> PDOp {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, o: &PDOp) -> PDOp {
        self.add(&o.neg())
    }

    pub fn map(&self, f: impl Fn(&EpsPoly) -> EpsPoly) -> PDOp {
        let mut out = PDOp { terms: BTreeMap::new(), floor: self.floor };
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> PDOp {
        self.map(|c| c.scale(s))
    }

    /// Left multiplication by a function.
    pub fn lmul_fn(&self, f: &EpsPoly) -> PDOp {
        self.map(|c| f.mul(c))
    }

    /// Truncation order of the epsilon coefficients (minimum over terms).
    pub fn eps_order(&self) -> u32 {
        self.terms.values().map(EpsPoly::order).min().unwrap_or(EXACT)
    }

    /// `A B = sum eps^l binom(k, l) f_k dx^l(g_j) D^{k + j - l}`.
    pub fn mul(&self, o: &PDOp) -> Result<PDOp, PdoError> {
        let floor = product_floor(self, o);
        let eps_cap = self.eps_order().min(o.eps_order());
        let mut out = PDOp { terms: BTreeMap::new(), floor };
        for (&k, f) in &self.terms {
            for (&j, g) in &o.terms {
                let mut dg = g.clone();
                let mut l: u32 = 0;
                loop {
                    let power = k + j - l as i64;
                    if power < floor || dg.is_zero() {
                        break;
                    }
                    if k >= 0 && l as i64 > k {
                        break;
                    }
                    if eps_cap != EXACT && l > eps_cap {
                        break;
                    }
                    if k < 0 && floor == NO_FLOOR && eps_cap == EXACT && l > 64 {
                        return Err(PdoError::Unbounded);
                    }
                    let b = binom(k, l);
                    let term = f.mul(&dg).shift_eps(l).scale(&b);
                    out.add_term(power, term);
                    dg = dg.dx();
                    l += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &PDOp) -> Result<PDOp, PdoError> {
        Ok(self.mul(o)?.sub(&o.mul(self)?))
    }

    pub fn pow(&self, e: u32) -> Result<PDOp, PdoError> {
        let mut acc = PDOp::d_pow(0);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Apply `f` to every coefficient's `DiffPoly` components.
    pub fn map_diff(&self, f: impl Fn(&DiffPoly) -> DiffPoly + Copy) -> PDOp {
        self.map(|c| c.map(f))
    }

    /// Equality of all coefficients known in both operators.
    pub fn agrees_with(&self, o: &PDOp) -> bool {
        let floor = self.floor.max(o.floor);
        let keys: std::collections::BTreeSet<i64> =
            self.terms.keys().chain(o.terms.keys()).copied().filter(|k| *k >= floor).collect();
        keys.into_iter().all(|k| {
            let a = self.terms.get(&k).cloned().unwrap_or_default();
            let b = o.terms.get(&k).cloned().unwrap_or_default();
            a.agrees_with(&b)
        })
    }

    /// `(n+1)`-th root `R = D + sum_{j <= -1} r_j D^j` of a monic operator
    /// with vanishing subleading coefficient.
    pub fn nth_root(&self, n_plus_1: u32) -> Result<PDOp, PdoError> {
        let big_n = n_plus_1 as i64;
        if self.order() != Some(big_n) || self.coeff(big_n)? != EpsPoly::one() {
            return Err(PdoError::NonMonicInput);
        }
        if big_n >= 1 && !self.coeff(big_n - 1)?.is_zero() {
            return Err(PdoError::NonMonicInput);
        }
        if big_n == 1 {
            return Ok(self.clone());
        }
        if self.is_exact() {
            return Err(PdoError::Unbounded);
        }
        let root_floor = self.floor - big_n + 1;
        let inv_n = Scalar::one() / int(big_n);
        let mut root = PDOp::d();
        for j in (root_floor..0).rev() {
            let partial = PDOp { terms: root.terms.clone(), floor: j };
            let power = partial.pow(n_plus_1)?;
            let target = big_n - 1 + j;
            let r = self.coeff(target)?.sub(&power.coeff(target)?).scale(&inv_n);
            root.add_term(j, r);
        }
        root.floor = root_floor;
        Ok(root)
    }

    pub fn symbol(&self) -> Symbol {
        Symbol { terms: self.terms.clone(), floor: self.floor }
    }
}

impl fmt::Display for PDOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{}] D^{}", c, k)?;
        }
        if !self.is_exact() {
            write!(f, " + O(D^{})", self.floor - 1)?;
        }
        Ok(())
    }
}

/// Laurent symbol `sum_k a_k p^k` of a pseudo-differential operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub terms: BTreeMap<i64, EpsPoly>,
    pub floor: i64,
}

impl Symbol {
    /// `d/dp`.
    pub fn dp(&self) -> Symbol {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if *k != 0 {
                terms.insert(k - 1, c.scale(&int(*k)));
            }
        }
        Symbol { terms, floor: if self.floor == NO_FLOOR { NO_FLOOR } else { self.floor - 1 } }
    }

    pub fn dx(&self) -> Symbol {
        Symbol {
            terms: self.terms.iter().map(|(k, c)| (*k, c.dx())).filter(|(_, c)| !c.is_zero()).collect(),
            floor: self.floor,
        }
    }

    pub fn to_pdo(&self) -> PDOp {
        PDOp::from_terms(self.terms.clone(), self.floor)
    }
}

/// Star product `sum_k eps^k / k! d_p^k A d_x^k B`, computed through
/// explicit `p`-derivatives of the left symbol.
pub fn star(a: &Symbol, b: &Symbol, max_k: u32) -> Symbol {
    let a_op = a.to_pdo();
    let b_op = b.to_pdo();
    let floor = product_floor(&a_op, &b_op);
    let mut out = PDOp { terms: BTreeMap::new(), floor };
    let mut da = a.clone();
    let mut db = b.clone();
    let mut fact = Scalar::one();
    for k in 0..=max_k {
        for (i, f) in &da.terms {
            for (j, g) in &db.terms {
                let t = f.mul(g).shift_eps(k).scale(&(Scalar::one() / &fact));
                out.add_term(i + j, t);
            }
        }
        da = da.dp();
        db = db.dx();
        fact *= int(k as i64 + 1);
    }
    out.symbol()
}

/// Pole-basis representation `sum_k b_k (p - w)^{-k}` of the symbol of
/// `(D - w)^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventRep {
    pub b: Vec<EpsPoly>,
    pub w: EpsPoly,
}

impl ResolventRep {
    /// `b_1 = 1`, `b_2 = 0`, `b_{k+1} = -eps (k-1) b_{k-1} w_x - eps b_k'`.
    pub fn new(w: &EpsPoly, depth: usize, eps_order: u32) -> Self {
        let mut b: Vec<EpsPoly> = vec![EpsPoly::one().with_order(eps_order)];
        if depth >= 2 {
            b.push(EpsPoly::zero().with_order(eps_order));
        }
        let wx = w.dx();
        while b.len() < depth {
            let k = b.len();
            let t1 = b[k - 2].mul(&wx).scale(&int(-(k as i64 - 1)));
            let t2 = b[k - 1].dx().neg();
            b.push(t1.add(&t2).shift_eps(1).with_order(eps_order));
        }
        ResolventRep { b, w: w.clone() }
    }

    pub fn depth(&self) -> usize {
        self.b.len()
    }

    /// Re-expand in powers of `D^{-1}`:
    /// `a_m = sum_{k + j = m} b_k binom(m - 1, j) w^j`.
    pub fn to_dbasis(&self) -> PDOp {
        let depth = self.b.len() as i64;
        let mut terms = Vec::new();
        let mut wpow = vec![EpsPoly::one()];
        for j in 1..depth {
            wpow.push(wpow[j as usize - 1].mul(&self.w));
        }
        for m in 1..=depth {
            let mut a = EpsPoly::zero();
            for k in 1..=m {
                let j = m - k;
                let bk = &self.b[k as usize - 1];
                if bk.is_zero() {
                    continue;
                }
                a = a.add(&bk.mul(&wpow[j as usize]).scale(&binom(m - 1, j as u32)));
            }
            terms.push((-m, a));
        }
        PDOp::from_terms(terms, -depth)
    }
}

/// `(D - w)^{-1}` in the `D^{-1}` basis: `a_1 = 1`, `a_{m+1} = w a_m - eps a_m'`.
pub fn resolvent(w: &EpsPoly, depth: usize, eps_order: u32) -> PDOp {
    let mut a = EpsPoly::one().with_order(eps_order);
    let mut terms = Vec::with_capacity(depth);
    for m in 1..=depth as i64 {
        terms.push((-m, a.clone()));
        a = w.mul(&a).sub(&a.dx().shift_eps(1)).with_order(eps_order);
    }
    PDOp::from_terms(terms, -(depth as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetring::FieldId;

    fn f(id: FieldId) -> EpsPoly {
        EpsPoly::field(id)
    }
    fn jet(id: FieldId, k: u32) -> EpsPoly {
        EpsPoly::jet(id, k)
    }

    #[test]
    fn d_times_function() {
        let u = f(FieldId::U);
        let p = PDOp::d().mul(&PDOp::function(u.clone())).unwrap();
        let expected = PDOp::from_terms([(1, u.clone()), (0, jet(FieldId::U, 1).shift_eps(1))], NO_FLOOR);
        assert_eq!(p, expected);
        assert_eq!(PDOp::d().commutator(&PDOp::function(u)).unwrap(), PDOp::function(jet(FieldId::U, 1).shift_eps(1)));
    }

    #[test]
    fn d_inverse_times_function() {
        let u = f(FieldId::U);
        let dinv = PDOp::monomial(-1, EpsPoly::one(), -4);
        let p = dinv.mul(&PDOp::function(u.clone())).unwrap();
        assert_eq!(p.coeff(-1).unwrap(), u);
        assert_eq!(p.coeff(-2).unwrap(), jet(FieldId::U, 1).shift_eps(1).neg());
        assert_eq!(p.coeff(-3).unwrap(), jet(FieldId::U, 2).shift_eps(2));
        assert!(p.coeff(-5).is_err());
        // multiplying back by D on the left recovers u
        let back = PDOp::d().mul(&p).unwrap();
        assert_eq!(back.coeff(0).unwrap(), u);
        assert!(back.coeff(-1).unwrap().is_zero());
        assert!(back.coeff(-2).unwrap().is_zero());
    }

    #[test]
    fn resolvent_defining_identity() {
        let w = f(FieldId::W);
        for depth in 1..=6 {
            let r = resolvent(&w, depth, 6);
            let lhs = PDOp::d().sub(&PDOp::function(w.clone())).mul(&r).unwrap();
            assert_eq!(lhs.coeff(0).unwrap(), EpsPoly::one());
            for k in (lhs.floor()..0).rev() {
                assert!(lhs.coeff(k).unwrap().is_zero(), "depth {} power {}", depth, k);
            }
        }
    }

    #[test]
    fn pole_basis_recursion() {
        let w = f(FieldId::W);
        let rep = ResolventRep::new(&w, 5, 6);
        assert_eq!(rep.b[0], EpsPoly::one());
        assert!(rep.b[1].is_zero());
        assert_eq!(rep.b[2], jet(FieldId::W, 1).shift_eps(1).neg());
        assert!(rep.to_dbasis().agrees_with(&resolvent(&w, 5, 6)));
    }

    #[test]
    fn parts_and_residue() {
        let u = f(FieldId::U);
        let op = PDOp::d_pow(2).add(&PDOp::monomial(-1, u.clone(), -3));
        assert_eq!(op.plus_part(), PDOp::d_pow(2));
        assert_eq!(op.res().unwrap(), u);
        let r = resolvent(&f(FieldId::W), 4, 4).mul(&PDOp::function(u.clone())).unwrap();
        assert_eq!(r.res().unwrap().coeff(0), u.coeff(0));
    }

    #[test]
    fn square_root_at_leading_order() {
        // L = D^2 + v1: root D + v1/2 D^{-1} + ...
        let v1 = f(FieldId::V(1));
        let l = PDOp::d_pow(2).add(&PDOp::function(v1.clone())).with_floor(-6);
        let r = l.nth_root(2).unwrap();
        assert_eq!(r.coeff(-1).unwrap(), v1.scale(&crate::numkit::rat(1, 2)));
        let sq = r.mul(&r).unwrap();
        assert!(sq.agrees_with(&l));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(-1, 3), int(-1));
        assert_eq!(binom(-2, 2), int(3));
        assert_eq!(binom(5, 2), int(10));
        assert_eq!(binom(2, 3), int(0));
    }
}
