//! Elements of Q(q) as reduced ratios of Laurent polynomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::laurent::LaurentPoly;

/// A reduced fraction of Laurent polynomials.
///
/// Normal form: numerator and denominator share no polynomial factor, the
/// denominator is an honest polynomial with integer coprime coefficients,
/// nonzero constant term and positive lowest coefficient. A unit denominator
/// is therefore exactly `1`, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Scalar {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Scalar {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar {
                num: LaurentPoly::zero(),
                den: LaurentPoly::one(),
            };
        }
        if den.is_one() {
            return Scalar {
                num,
                den: LaurentPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let mut num = num.exact_div(&g).expect("gcd divides numerator");
        let mut den = den.exact_div(&g).expect("gcd divides denominator");
        // Push the denominator's unit part (sign, rational content, q power)
        // into the numerator.
        let den_norm = den.normalize_primitive();
        let unit = den.exact_div(&den_norm).expect("unit factor");
        debug_assert_eq!(unit.term_count(), 1);
        let (exp, coeff) = unit.terms().next().map(|(e, c)| (*e, c.clone())).unwrap();
        num = num.scale(-exp, &coeff.recip());
        den = den_norm;
        Scalar { num, den }
    }

    pub fn zero() -> Scalar {
        Scalar {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar {
            num: LaurentPoly::from_int(n),
            den: LaurentPoly::one(),
        }
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Scalar {
        Scalar {
            num: LaurentPoly::q_pow(exp),
            den: LaurentPoly::one(),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True iff the denominator is a unit, i.e. `self` is a Laurent polynomial.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// The underlying Laurent polynomial, when the denominator is a unit.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        if self.is_laurent() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Substitutes `q -> q^-1` and re-reduces.
    pub fn bar(&self) -> Scalar {
        Scalar::new(self.num.bar(), self.den.bar())
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero scalar");
        Scalar::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: i64) -> Scalar {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Constant term of a Laurent scalar as a rational; `None` when the
    /// denominator is not a unit.
    pub fn constant_term(&self) -> Option<BigRational> {
        self.as_laurent().map(|p| p.coefficient(0))
    }

    /// Rough size measure used for pivot selection in exact elimination.
    pub fn size(&self) -> usize {
        self.num.term_count() + self.den.term_count()
    }
}

impl From<LaurentPoly> for Scalar {
    fn from(p: LaurentPoly) -> Scalar {
        Scalar {
            num: p,
            den: LaurentPoly::one(),
        }
    }
}

impl TryFrom<Scalar> for LaurentPoly {
    type Error = ();
    fn try_from(s: Scalar) -> Result<LaurentPoly, ()> {
        if s.is_laurent() {
            Ok(s.num)
        } else {
            Err(())
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return Scalar::new(&self.num + &rhs.num, self.den.clone());
        }
        Scalar::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from(&self.num * &rhs.num);
        }
        // multiplying by a unit (monomial numerator, unit denominator)
        // keeps the pair reduced and the denominator canonical
        if rhs.den.is_one() && rhs.num.term_count() == 1 {
            return Scalar {
                num: &self.num * &rhs.num,
                den: self.den.clone(),
            };
        }
        if self.den.is_one() && self.num.term_count() == 1 {
            return Scalar {
                num: &self.num * &rhs.num,
                den: rhs.den.clone(),
            };
        }
        Scalar::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}
