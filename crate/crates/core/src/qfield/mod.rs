//! Exact scalar arithmetic over Q(q).
//!
//! Everything downstream rests on this module: Laurent polynomials with
//! rational big-integer coefficients, reduced rational functions, the bar
//! involution `q -> q^-1`, quantum integers, factorials and binomials, and a
//! small parser for the canonical textual rendering.

mod laurent;
mod parse;
mod scalar;

pub use laurent::LaurentPoly;
pub use parse::{parse_laurent, parse_scalar};
pub use scalar::Scalar;

/// The quantum integer `[n] = (q^n - q^-n)/(q - q^-1)`, with `q` replaced by
/// `q^d`. `d = 1` gives the plain quantum integer.
pub fn quantum_int(n: i64, d: i64) -> LaurentPoly {
    if n == 0 {
        return LaurentPoly::zero();
    }
    if n < 0 {
        return -&quantum_int(-n, d);
    }
    let mut out = LaurentPoly::zero();
    for k in 0..n {
        out += &LaurentPoly::q_pow(d * (n - 1 - 2 * k));
    }
    out
}

/// `[n]! = [n][n-1]...[1]` for `n >= 0`.
pub fn quantum_factorial(n: u32, d: i64) -> LaurentPoly {
    let mut out = LaurentPoly::one();
    for k in 1..=i64::from(n) {
        out = &out * &quantum_int(k, d);
    }
    out
}

/// The Gaussian binomial `[n; k]` for `n` in `Z`, `k >= 0`, computed by exact
/// polynomial division of the product formula. The quotient is always a
/// Laurent polynomial with integer coefficients.
pub fn quantum_binom(n: i64, k: u32, d: i64) -> LaurentPoly {
    if k == 0 {
        return LaurentPoly::one();
    }
    let mut num = LaurentPoly::one();
    for j in 0..i64::from(k) {
        num = &num * &quantum_int(n - j, d);
    }
    let den = quantum_factorial(k, d);
    num.exact_div(&den)
        .expect("Gaussian binomial division is exact")
}
