//! Small dense matrices over exact rationals and complex floats.

use num_complex::Complex64;

use super::{Field, Scalar};

pub type Mat<F> = Vec<Vec<F>>;

pub fn identity<F: Field>(n: usize) -> Mat<F> {
    (0..n).map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect()
}

pub fn transpose<F: Field>(a: &Mat<F>) -> Mat<F> {
    let (r, c) = (a.len(), a.first().map_or(0, Vec::len));
    (0..c).map(|j| (0..r).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn matmul<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(F::zero(), |acc, k| acc.add(&row[k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse; exact over rationals.
pub fn inverse(a: &Mat<Scalar>) -> Option<Mat<Scalar>> {
    let n = a.len();
    let mut m: Mat<Scalar> = a.clone();
    let mut inv = identity::<Scalar>(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !Field::is_zero(&m[r][col]))?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = Field::inv(&m[col][col])?;
        for j in 0..n {
            m[col][j] = Field::mul(&m[col][j], &d);
            inv[col][j] = Field::mul(&inv[col][j], &d);
        }
        for r in (0..n).filter(|&r| r != col) {
            let f = m[r][col].clone();
            if Field::is_zero(&f) {
                continue;
            }
            for j in 0..n {
                m[r][j] = Field::sub(&m[r][j], &Field::mul(&f, &m[col][j]));
                inv[r][j] = Field::sub(&inv[r][j], &Field::mul(&f, &inv[col][j]));
            }
        }
    }
    Some(inv)
}

/// Coefficients (ascending, monic) of `det(t I - a)` by Faddeev-LeVerrier.
pub fn char_poly<F: Field>(a: &Mat<F>) -> Vec<F> {
    let n = a.len();
    let mut c = vec![F::zero(); n + 1];
    c[n] = F::one();
    let mut m = vec![vec![F::zero(); n]; n];
    for k in 1..=n {
        let am = matmul(a, &m);
        for i in 0..n {
            for j in 0..n {
                m[i][j] = am[i][j].clone();
            }
            m[i][i] = m[i][i].add(&c[n + 1 - k]);
        }
        let am = matmul(a, &m);
        let tr = (0..n).fold(F::zero(), |acc, i| acc.add(&am[i][i]));
        c[n - k] = tr.neg().div(&F::from_i64(k as i64)).expect("k > 0");
    }
    c
}

/// Inverse by solving against the unit vectors.
pub fn inverse_complex(a: &Mat<Complex64>) -> Option<Mat<Complex64>> {
    let n = a.len();
    let cols: Vec<Vec<Complex64>> = identity::<Complex64>(n).iter().map(|e| solve_complex(a, e)).collect::<Option<_>>()?;
    Some(transpose(&cols))
}

/// Solve `a x = b` with partial pivoting.
pub fn solve_complex(a: &Mat<Complex64>, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.iter().zip(b).map(|(r, bi)| r.iter().copied().chain([*bi]).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))?;
        if m[piv][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for j in col..=n {
                let t = m[col][j];
                m[r][j] -= f * t;
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

pub fn to_complex(a: &Mat<Scalar>) -> Mat<Complex64> {
    a.iter().map(|r| r.iter().map(|x| Complex64::new(super::rat_to_f64(x), 0.0)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::int;

    #[test]
    fn inverse_and_char_poly() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(matmul(&a, &inv), identity(2));
        // t^2 - 5 t + 5
        assert_eq!(char_poly(&a), vec![int(5), int(-5), int(1)]);
    }
}
