use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Exact rational scalar. `BigRational` keeps itself reduced with a positive
/// denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(x: &Scalar) -> f64 {
    match x.to_f64() {
        Some(v) => v,
        None => {
            // numerator or denominator overflowed f64; scale by bit length
            let n = x.numer();
            let d = x.denom();
            let shift = n.bits().max(d.bits()).saturating_sub(900) as usize;
            let nn = (n >> shift).to_f64().unwrap_or(0.0);
            let dd = (d >> shift).to_f64().unwrap_or(1.0);
            nn / dd
        }
    }
}
