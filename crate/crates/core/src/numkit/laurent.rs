//! Truncated Laurent expansions of univariate rational functions.

use super::{Field, NumError, UPoly};

/// Expansion site: a finite point `c` (local parameter `t = p - c`) or
/// infinity (local parameter `t = 1/p`).
#[derive(Debug, Clone, PartialEq)]
pub enum Site<F: Field> {
    Finite(F),
    Infinity,
}

/// `sum_{k = valuation}^{order} coeffs[k - valuation] * t^k`. Coefficients
/// of exponents above `order` are unknown, not zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentJet<F: Field> {
    pub site: Site<F>,
    pub valuation: i64,
    pub order: i64,
    coeffs: Vec<F>,
}

/// First `n` coefficients of the power series quotient `a / b`, `b[0] != 0`.
pub fn series_div<F: Field>(a: &[F], b: &[F], n: usize) -> Option<Vec<F>> {
    let b0_inv = b.first()?.inv()?;
    let mut out: Vec<F> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a.get(k).cloned().unwrap_or_else(F::zero);
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            acc = acc.sub(&b[j].mul(&out[k - j]));
        }
        out.push(acc.mul(&b0_inv));
    }
    Some(out)
}

/// First `n` coefficients of `a^s` for a power series with `a[0] = 1`.
pub fn series_pow<F: Field>(a: &[F], s: &F, n: usize) -> Vec<F> {
    let coef = |j: usize| a.get(j).cloned().unwrap_or_else(F::zero);
    let mut y: Vec<F> = Vec::with_capacity(n);
    if n == 0 {
        return y;
    }
    y.push(F::one());
    for k in 1..n {
        let mut acc = F::zero();
        for j in 1..=k {
            let aj = coef(j);
            if aj.is_zero() {
                continue;
            }
            // a_j (s j - (k - j)) y_{k-j}
            let w = s.mul(&F::from_i64(j as i64)).sub(&F::from_i64((k - j) as i64));
            acc = acc.add(&aj.mul(&w).mul(&y[k - j]));
        }
        y.push(acc.mul(&F::from_i64(k as i64).inv().expect("char 0")));
    }
    y
}

/// First `n` coefficients of `log(a)` for a power series with `a[0] = 1`.
pub fn series_log<F: Field>(a: &[F], n: usize) -> Vec<F> {
    // (log a)' = a'/a
    let da: Vec<F> = (1..=n)
        .map(|k| a.get(k).cloned().unwrap_or_else(F::zero).mul(&F::from_i64(k as i64)))
        .collect();
    let q = series_div(&da, a, n).expect("a[0] = 1");
    let mut out = vec![F::zero(); n];
    for k in 1..n {
        out[k] = q[k - 1].mul(&F::from_i64(k as i64).inv().expect("char 0"));
    }
    out
}

impl<F: Field> LaurentJet<F> {
    pub fn new(site: Site<F>, valuation: i64, coeffs: Vec<F>) -> Self {
        let order = valuation + coeffs.len() as i64 - 1;
        LaurentJet {
            site,
            valuation,
            order,
            coeffs,
        }
    }

    /// Expansion of `num / den` at `site`, keeping exponents up to `order`.
    pub fn of_ratio(num: &UPoly<F>, den: &UPoly<F>, site: Site<F>, order: i64) -> Result<Self, NumError> {
        if den.is_zero() {
            return Err(NumError::IdenticallyZeroDenominator);
        }
        let (n_loc, d_loc, base) = match &site {
            Site::Finite(c) => (num.shift(c), den.shift(c), 0i64),
            Site::Infinity => {
                // f(1/t) = t^{deg d - deg n} rev(n)(t) / rev(d)(t)
                let dn = num.degree().unwrap_or(0) as i64;
                let dd = den.degree().unwrap_or(0) as i64;
                (num.reversed(), den.reversed(), dd - dn)
            }
        };
        if n_loc.is_zero() {
            return Ok(LaurentJet {
                site,
                valuation: order + 1,
                order,
                coeffs: Vec::new(),
            });
        }
        let vn = n_loc.valuation().unwrap_or(0);
        let vd = den_valuation(&d_loc)?;
        let valuation = base + vn as i64 - vd as i64;
        let count = (order - valuation + 1).max(0) as usize;
        let a = &n_loc.coeffs()[vn..];
        let b = &d_loc.coeffs()[vd..];
        let coeffs = series_div(a, b, count).ok_or(NumError::IdenticallyZeroDenominator)?;
        Ok(LaurentJet {
            site,
            valuation,
            order,
            coeffs,
        })
    }

    /// Coefficient of `t^e`; `None` when `e` lies above the truncation order.
    pub fn coeff(&self, e: i64) -> Option<F> {
        if e > self.order {
            None
        } else if e < self.valuation {
            Some(F::zero())
        } else {
            Some(self.coeffs[(e - self.valuation) as usize].clone())
        }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Residue with the convention `res_inf = -[p^{-1}]`.
    pub fn residue(&self) -> Option<F> {
        match self.site {
            Site::Finite(_) => self.coeff(-1),
            Site::Infinity => self.coeff(1).map(|c| c.neg()),
        }
    }

    /// Truncation-aware comparison: exponents known in both jets must agree.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let top = self.order.min(o.order);
        let low = self.valuation.min(o.valuation);
        (low..=top).all(|e| self.coeff(e) == o.coeff(e))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let valuation = self.valuation + o.valuation;
        let order = (self.order + o.valuation).min(o.order + self.valuation);
        let n = (order - valuation + 1).max(0) as usize;
        let mut coeffs = vec![F::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        LaurentJet {
            site: self.site.clone(),
            valuation,
            order,
            coeffs,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let valuation = self.valuation.min(o.valuation);
        let order = self.order.min(o.order);
        let coeffs = (valuation..=order)
            .map(|e| self.coeff(e).unwrap().add(&o.coeff(e).unwrap()))
            .collect();
        LaurentJet {
            site: self.site.clone(),
            valuation,
            order,
            coeffs,
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        LaurentJet {
            site: self.site.clone(),
            valuation: self.valuation,
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }
}

fn den_valuation<F: Field>(d: &UPoly<F>) -> Result<usize, NumError> {
    d.valuation().ok_or(NumError::IdenticallyZeroDenominator)
}

/// `laurent_at` for univariate rational functions given as numerator and
/// denominator.
pub fn laurent_at<F: Field>(num: &UPoly<F>, den: &UPoly<F>, site: Site<F>, order: i64) -> Result<LaurentJet<F>, NumError> {
    LaurentJet::of_ratio(num, den, site, order)
}

/// Residue of `num / den` at a site.
pub fn residue_at<F: Field>(num: &UPoly<F>, den: &UPoly<F>, site: Site<F>) -> Result<F, NumError> {
    let order = match site {
        Site::Finite(_) => -1,
        Site::Infinity => 1,
    };
    let jet = LaurentJet::of_ratio(num, den, site, order)?;
    Ok(jet.residue().expect("order covers the residue exponent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{int, rat, Scalar};

    fn p(c: &[i64]) -> UPoly<Scalar> {
        UPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn simple_pole_at_its_site() {
        let w = int(3);
        let jet = laurent_at(&p(&[1]), &UPoly::linear_root(&w), Site::Finite(w), 2).unwrap();
        assert_eq!(jet.coeff(-1), Some(int(1)));
        for e in 0..=2 {
            assert_eq!(jet.coeff(e), Some(int(0)));
        }
        assert_eq!(jet.coeff(3), None);
    }

    #[test]
    fn geometric_series_at_infinity() {
        // 5/(p - 2) = 5/p + 10/p^2 + 20/p^3 + ...
        let jet = laurent_at(&p(&[5]), &p(&[-2, 1]), Site::Infinity, 3).unwrap();
        assert_eq!(jet.coeff(1), Some(int(5)));
        assert_eq!(jet.coeff(2), Some(int(10)));
        assert_eq!(jet.coeff(3), Some(int(20)));
    }

    #[test]
    fn superpotential_n0_at_infinity() {
        // p + 1/p = (p^2 + 1)/p
        let jet = laurent_at(&p(&[1, 0, 1]), &p(&[0, 1]), Site::Infinity, 2).unwrap();
        assert_eq!(jet.valuation, -1);
        assert_eq!(jet.coeff(-1), Some(int(1)));
        assert_eq!(jet.coeff(0), Some(int(0)));
        assert_eq!(jet.coeff(1), Some(int(1)));
    }

    #[test]
    fn residue_conventions() {
        let w = int(-1);
        assert_eq!(residue_at(&p(&[1]), &UPoly::linear_root(&w), Site::Finite(w)).unwrap(), int(1));
        assert_eq!(residue_at(&p(&[1]), &p(&[0, 1]), Site::Infinity).unwrap(), int(-1));
    }

    #[test]
    fn partial_fractions_residue_sum_vanishes() {
        // (p^2 + 1)/((p-1)(p-2)(p-3))
        let num = p(&[1, 0, 1]);
        let den = p(&[-1, 1]).mul(&p(&[-2, 1])).mul(&p(&[-3, 1]));
        let total = [1, 2, 3]
            .iter()
            .map(|&c| residue_at(&num, &den, Site::Finite(int(c))).unwrap())
            .fold(int(0), |a, b| a + b)
            + residue_at(&num, &den, Site::Infinity).unwrap();
        assert_eq!(total, int(0));
        // partial-fraction oracle: A/(p-1) with A = 2/((1-2)(1-3)) = 1, etc.
        assert_eq!(residue_at(&num, &den, Site::Finite(int(1))).unwrap(), int(1));
        assert_eq!(residue_at(&num, &den, Site::Finite(int(2))).unwrap(), int(-5));
        assert_eq!(residue_at(&num, &den, Site::Finite(int(3))).unwrap(), int(5));
    }

    #[test]
    fn binomial_and_log_series() {
        // (1 + t)^{1/2}: 1, 1/2, -1/8, 1/16
        let s = series_pow(&[int(1), int(1)], &rat(1, 2), 4);
        assert_eq!(s, vec![int(1), rat(1, 2), rat(-1, 8), rat(1, 16)]);
        // log(1 + t): 0, 1, -1/2, 1/3
        let l = series_log(&[int(1), int(1)], 4);
        assert_eq!(l, vec![int(0), int(1), rat(-1, 2), rat(1, 3)]);
    }
}
