//! Laurent polynomials in `q` with arbitrary-precision rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An element of Q[q, q^-1], stored as a finitely supported map from
/// exponent to nonzero rational coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, BigRational::one())
    }

    /// The monomial `c * q^exp`; collapses to zero when `c == 0`.
    pub fn monomial(exp: i64, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentPoly { coeffs }
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        LaurentPoly::monomial(exp, BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        LaurentPoly::monomial(0, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
            && self
                .coeffs
                .get(&0)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, exp: i64) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn insert_term(&mut self, exp: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Substitutes `q -> q^-1` (the bar involution on coefficients).
    pub fn bar(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (-e, c.clone()))
            .collect();
        LaurentPoly { coeffs }
    }

    /// Sum of the terms with exponent strictly less than `m`.
    pub fn truncate_below(&self, m: i64) -> Self {
        let coeffs = self
            .coeffs
            .range(..m)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        LaurentPoly { coeffs }
    }

    /// True iff every coefficient is non-negative.
    pub fn is_positive(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// True iff every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Multiplies by `c * q^exp` in place.
    pub fn scale(&self, exp: i64, c: &BigRational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, k)| (e + exp, k * c))
            .collect();
        LaurentPoly { coeffs }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division; returns `None` when `self` is not a multiple of `rhs`.
    ///
    /// Both arguments are shifted to honest polynomials first; `q`-powers are
    /// units, so the quotient is again a Laurent polynomial.
    pub fn exact_div(&self, rhs: &LaurentPoly) -> Option<LaurentPoly> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        let shift = self.min_degree().unwrap() - rhs.min_degree().unwrap();
        let mut rem: BTreeMap<i64, BigRational> = self
            .coeffs
            .iter()
            .map(|(e, c)| (e - self.min_degree().unwrap(), c.clone()))
            .collect();
        let den: BTreeMap<i64, BigRational> = rhs
            .coeffs
            .iter()
            .map(|(e, c)| (e - rhs.min_degree().unwrap(), c.clone()))
            .collect();
        let den_deg = *den.keys().next_back().unwrap();
        let den_lead = den[&den_deg].clone();
        let mut quot = LaurentPoly::zero();
        while let Some((&deg, _)) = rem.iter().next_back() {
            if deg < den_deg {
                return None;
            }
            let lead = rem[&deg].clone();
            let factor = &lead / &den_lead;
            let off = deg - den_deg;
            quot.insert_term(off + shift, factor.clone());
            for (e, c) in &den {
                let k = e + off;
                let delta = c * &factor;
                use std::collections::btree_map::Entry;
                match rem.entry(k) {
                    Entry::Vacant(v) => {
                        if !delta.is_zero() {
                            v.insert(-delta);
                        }
                    }
                    Entry::Occupied(mut o) => {
                        *o.get_mut() -= delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                }
            }
        }
        Some(quot)
    }

    /// GCD up to units, returned with integer coprime coefficients and a
    /// positive lowest coefficient. `q` powers are units and never appear.
    ///
    /// Primitive integer Euclid with pseudo-division; the content is split
    /// off after every step to keep coefficients small.
    pub fn gcd(&self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.normalize_primitive_or_zero();
        }
        if rhs.is_zero() {
            return self.normalize_primitive_or_zero();
        }
        if self.term_count() == 1 || rhs.term_count() == 1 {
            return LaurentPoly::one();
        }
        let mut a = self.normalize_primitive();
        let mut b = rhs.normalize_primitive();
        if a.max_degree() < b.max_degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.is_zero() {
                return a.normalize_primitive_or_zero();
            }
            if b.term_count() == 1 {
                // unit remainder: coprime up to units
                return LaurentPoly::one();
            }
            let r = a.pseudo_rem(&b).normalize_primitive_or_zero();
            a = b;
            b = r;
        }
    }

    /// Least common multiple up to units, primitive-normalized.
    pub fn lcm(&self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let g = self.gcd(rhs);
        let q = self.exact_div(&g).expect("gcd divides");
        (&q * rhs).normalize_primitive()
    }

    fn normalize_primitive_or_zero(&self) -> LaurentPoly {
        if self.is_zero() {
            LaurentPoly::zero()
        } else {
            self.normalize_primitive()
        }
    }

    /// Pseudo-remainder of honest integer polynomials: repeatedly cancels
    /// the leading term after scaling by the divisor's leading coefficient.
    fn pseudo_rem(&self, rhs: &LaurentPoly) -> LaurentPoly {
        debug_assert!(!rhs.is_zero());
        let den_deg = rhs.max_degree().unwrap();
        let den_lead = rhs.coeffs[&den_deg].clone();
        let mut rem = self.clone();
        loop {
            if rem.is_zero() {
                return rem;
            }
            let deg = rem.max_degree().unwrap();
            if deg < den_deg {
                return rem;
            }
            let lead = rem.coeffs[&deg].clone();
            rem = &rem.scale(0, &den_lead) - &rhs.scale(deg - den_deg, &lead);
        }
    }

    /// Integer coprime coefficients, positive lowest coefficient, constant
    /// term nonzero.
    pub fn normalize_primitive(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let min = self.min_degree().unwrap();
        let mut denom_lcm = BigInt::one();
        for c in self.coeffs.values() {
            denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
        }
        let mut numer_gcd = BigInt::zero();
        for c in self.coeffs.values() {
            let scaled = c * BigRational::from_integer(denom_lcm.clone());
            debug_assert!(scaled.is_integer());
            numer_gcd = num_integer::gcd(numer_gcd, scaled.numer().clone());
        }
        let mut factor = BigRational::new(denom_lcm, numer_gcd);
        if self.coeffs.values().next().unwrap().is_negative() {
            factor = -factor;
        }
        self.scale(-min, &factor)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, -c)).collect();
        LaurentPoly { coeffs }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.insert_term(*e, c.clone());
        }
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.insert_term(*e, c.clone());
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.insert_term(*e, -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.insert_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical ascending-exponent rendering, e.g. `q^-1 + 2 + 3*q^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let qpart = match *e {
                0 => None,
                1 => Some("q".to_string()),
                exp => Some(format!("q^{}", exp)),
            };
            match qpart {
                None => write!(f, "{}", fmt_rational(&mag))?,
                Some(qp) => {
                    if mag.is_one() {
                        write!(f, "{}", qp)?;
                    } else {
                        write!(f, "{}*{}", fmt_rational(&mag), qp)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
