//! Elements of the negative half with semantic equality.
//!
//! Elements are carried as formal combinations of words in the lowering
//! generators; Serre relations are never straightened. Equality, zero tests
//! and expansion all go through the iterated q-derivation coordinates, which
//! are faithful on the quotient algebra. The twisted product rules for the
//! derivations are locked in by the adjointness property of the bilinear
//! form (see the tests at the bottom).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qfield::{quantum_binom, quantum_factorial, LaurentPoly, Scalar};
use crate::rootdata::{RootDatum, Weight};

/// A word in the lowering generators, e.g. `[0, 1, 0]` for `F1 F2 F1`.
pub type Word = Vec<u8>;

/// Semantic zero test used by the string operations. The self-contained
/// implementation walks the full coordinate tree; callers holding a PBW
/// weight cache can supply a much cheaper pivot-coordinate test.
pub trait ZeroOracle {
    fn is_zero(&self, x: &NegElement) -> bool;
}

/// The derivation-tree oracle; always available, never wrong, not fast.
pub struct DerivationOracle<'a>(pub &'a RootDatum);

impl ZeroOracle for DerivationOracle<'_> {
    fn is_zero(&self, x: &NegElement) -> bool {
        x.is_zero(self.0)
    }
}

/// Which q-derivation to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    /// `e'_i`, peeling letters from the left.
    Right,
    /// `_ie'`, peeling letters from the right.
    Left,
}

/// Kashiwara operator direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KashiwaraDir {
    E,
    F,
}

/// A formal combination of F-words with scalar coefficients.
///
/// The representation is not canonical: two different combinations can be
/// the same element of the algebra. All semantic questions are answered by
/// [`NegElement::coordinates`] and friends.
#[derive(Clone, Default)]
pub struct NegElement {
    words: BTreeMap<Word, Scalar>,
}

impl NegElement {
    pub fn zero() -> NegElement {
        NegElement::default()
    }

    /// The unit, i.e. the empty word with coefficient 1.
    pub fn one() -> NegElement {
        NegElement::word(Vec::new(), Scalar::one())
    }

    pub fn generator(i: u8) -> NegElement {
        NegElement::word(vec![i], Scalar::one())
    }

    pub fn word(w: Word, c: Scalar) -> NegElement {
        let mut words = BTreeMap::new();
        if !c.is_zero() {
            words.insert(w, c);
        }
        NegElement { words }
    }

    /// The divided power `F_i^{(n)} = F_i^n / [n]_i!`.
    pub fn divided_power(datum: &RootDatum, i: u8, n: u32) -> NegElement {
        let fact = Scalar::from(quantum_factorial(n, datum.d(i as usize)));
        NegElement::word(vec![i; n as usize], fact.inv())
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.words.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.words.iter()
    }

    pub fn coefficient(&self, w: &[u8]) -> Scalar {
        self.words.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Weight of a homogeneous element: minus the letter content of any word.
    /// `None` for the structural zero.
    pub fn weight(&self, rank: usize) -> Option<Weight> {
        let w = self.words.keys().next()?;
        let mut v = vec![0i64; rank];
        for &i in w {
            v[i as usize] -= 1;
        }
        debug_assert!(
            self.words.keys().all(|u| {
                let mut t = vec![0i64; rank];
                for &i in u {
                    t[i as usize] -= 1;
                }
                t == v
            }),
            "inhomogeneous element"
        );
        Some(Weight(v))
    }

    pub fn insert(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.words.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &NegElement) -> NegElement {
        let mut out = self.clone();
        for (w, c) in &rhs.words {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &NegElement) -> NegElement {
        let mut out = self.clone();
        for (w, c) in &rhs.words {
            out.insert(w.clone(), -c);
        }
        out
    }

    pub fn scaled(&self, c: &Scalar) -> NegElement {
        if c.is_zero() {
            return NegElement::zero();
        }
        let words = self
            .words
            .iter()
            .map(|(w, k)| (w.clone(), k * c))
            .collect();
        NegElement { words }
    }

    pub fn mul(&self, rhs: &NegElement) -> NegElement {
        let mut out = NegElement::zero();
        for (w1, c1) in &self.words {
            for (w2, c2) in &rhs.words {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.insert(w, c1 * c2);
            }
        }
        out
    }

    /// The anti-involution fixing the generators: reverses every word.
    pub fn star(&self) -> NegElement {
        let words = self
            .words
            .iter()
            .map(|(w, c)| {
                let mut r = w.clone();
                r.reverse();
                (r, c.clone())
            })
            .collect();
        NegElement { words }
    }

    /// The bar involution: words fixed, coefficients bar'd.
    pub fn bar(&self) -> NegElement {
        let words = self
            .words
            .iter()
            .map(|(w, c)| (w.clone(), c.bar()))
            .collect();
        NegElement { words }
    }

    /// `e'_i` (side = Right) or `_ie'` (side = Left).
    ///
    /// On words these are the twisted letter-removal operators
    ///   e'_i(u v) = e'_i(u) v + q_i^{<wt u, a_i^vee>} u e'_i(v),
    ///   _ie'(u v) = q_i^{<wt v, a_i^vee>} _ie'(u) v + u _ie'(v),
    /// with e'_i(F_j) = _ie'(F_j) = delta_ij.
    pub fn derivation(&self, datum: &RootDatum, i: u8, side: Side) -> NegElement {
        let d = datum.d(i as usize);
        let mut out = NegElement::zero();
        for (w, c) in &self.words {
            match side {
                Side::Right => {
                    // weight pairing of the prefix before position p
                    let mut twist = 0i64;
                    for (p, &letter) in w.iter().enumerate() {
                        if letter == i {
                            let mut rest = Vec::with_capacity(w.len() - 1);
                            rest.extend_from_slice(&w[..p]);
                            rest.extend_from_slice(&w[p + 1..]);
                            out.insert(rest, c * &Scalar::q_pow(d * twist));
                        }
                        twist -= datum.cartan(i as usize, letter as usize);
                    }
                }
                Side::Left => {
                    let mut twist = 0i64;
                    for (p, &letter) in w.iter().enumerate().rev() {
                        if letter == i {
                            let mut rest = Vec::with_capacity(w.len() - 1);
                            rest.extend_from_slice(&w[..p]);
                            rest.extend_from_slice(&w[p + 1..]);
                            out.insert(rest, c * &Scalar::q_pow(d * twist));
                        }
                        twist -= datum.cartan(i as usize, letter as usize);
                    }
                }
            }
        }
        out
    }

    /// All iterated right-derivation coordinates: for each word `j_1..j_l`
    /// with letter content `-wt self`, the scalar `e'_{j_1}...e'_{j_l}(self)`.
    /// Returned in lexicographic word order.
    pub fn coordinates(&self, datum: &RootDatum) -> BTreeMap<Word, Scalar> {
        let mut out = BTreeMap::new();
        let mut prefix = Vec::new();
        self.coords_rec(datum, &mut prefix, &mut out);
        out
    }

    fn coords_rec(
        &self,
        datum: &RootDatum,
        prefix: &mut Word,
        out: &mut BTreeMap<Word, Scalar>,
    ) {
        if self.is_structurally_zero() {
            return;
        }
        if let Some(c) = self.words.get(&Vec::new()) {
            // homogeneous: a surviving empty word means weight zero
            out.insert(prefix.clone(), c.clone());
            return;
        }
        for i in 0..datum.rank() as u8 {
            let dx = self.derivation(datum, i, Side::Right);
            if dx.is_structurally_zero() {
                continue;
            }
            prefix.push(i);
            dx.coords_rec(datum, prefix, out);
            prefix.pop();
        }
    }

    /// The single iterated-derivation coordinate along `word` (letters
    /// applied left to right).
    pub fn coordinate_at(&self, datum: &RootDatum, word: &[u8]) -> Scalar {
        let mut cur = self.clone();
        for &i in word {
            if cur.is_structurally_zero() {
                return Scalar::zero();
            }
            cur = cur.derivation(datum, i, Side::Right);
        }
        cur.coefficient(&[])
    }

    /// Semantic zero test via faithfulness of iterated derivations.
    pub fn is_zero(&self, datum: &RootDatum) -> bool {
        self.first_nonzero_coordinate(datum).is_none()
    }

    fn first_nonzero_coordinate(&self, datum: &RootDatum) -> Option<Word> {
        if self.is_structurally_zero() {
            return None;
        }
        if let Some(c) = self.words.get(&Vec::new()) {
            return if c.is_zero() { None } else { Some(Vec::new()) };
        }
        for i in 0..datum.rank() as u8 {
            let dx = self.derivation(datum, i, Side::Right);
            if let Some(mut w) = dx.first_nonzero_coordinate(datum) {
                w.insert(0, i);
                return Some(w);
            }
        }
        None
    }

    pub fn semantically_equal(&self, datum: &RootDatum, rhs: &NegElement) -> bool {
        self.sub(rhs).is_zero(datum)
    }

    /// The Kashiwara bilinear form, with
    /// `(1,1) = 1` and `(F_i x, y) = (x, e'_i(y)) / (1 - q_i^2)`.
    pub fn bilinear_form(&self, datum: &RootDatum, rhs: &NegElement) -> Scalar {
        let rank = datum.rank();
        match (self.weight(rank), rhs.weight(rank)) {
            (Some(a), Some(b)) if a != b => return Scalar::zero(),
            _ => {}
        }
        self.form_rec(datum, rhs)
    }

    fn form_rec(&self, datum: &RootDatum, rhs: &NegElement) -> Scalar {
        let mut acc = Scalar::zero();
        if let Some(c) = self.words.get(&Vec::new()) {
            // weight-zero pairing: (c, d) = c d
            if let Some(d) = rhs.words.get(&Vec::new()) {
                acc = &acc + &(c * d);
            }
        }
        // group the remaining words of self by first letter
        let mut by_first: BTreeMap<u8, NegElement> = BTreeMap::new();
        for (w, c) in &self.words {
            if let Some((&first, rest)) = w.split_first() {
                by_first
                    .entry(first)
                    .or_default()
                    .insert(rest.to_vec(), c.clone());
            }
        }
        for (i, tail) in by_first {
            let dy = rhs.derivation(datum, i, Side::Right);
            if dy.is_structurally_zero() {
                continue;
            }
            let di = datum.d(i as usize);
            let denom = &Scalar::one() - &Scalar::q_pow(2 * di);
            let inner = tail.form_rec(datum, &dy);
            acc = &acc + &(&inner / &denom);
        }
        acc
    }

    /// The ladder of iterated right derivations, up to (and excluding) the
    /// first structurally zero power.
    fn derivation_ladder(&self, datum: &RootDatum, i: u8) -> Vec<NegElement> {
        let mut ladder = vec![self.clone()];
        loop {
            let next = ladder.last().unwrap().derivation(datum, i, Side::Right);
            if next.is_structurally_zero() {
                return ladder;
            }
            ladder.push(next);
        }
    }

    /// Largest `n` with `(e'_i)^n self != 0` semantically; 0 for weight-zero
    /// elements, `None` for semantic zero. This is the top of the i-string.
    pub fn epsilon(&self, datum: &RootDatum, i: u8) -> Option<u32> {
        self.epsilon_with(datum, i, &DerivationOracle(datum))
    }

    pub fn epsilon_with(
        &self,
        datum: &RootDatum,
        i: u8,
        oracle: &impl ZeroOracle,
    ) -> Option<u32> {
        if self.is_structurally_zero() {
            return None;
        }
        // epsilon is scaling-invariant, so clear denominators first and keep
        // the whole ladder over Laurent coefficients
        let den = self.denominator_lcm();
        let cleared = if den.is_one() {
            self.clone()
        } else {
            self.scaled(&Scalar::from(den))
        };
        // semantically nonzero powers form a prefix of the structural ladder
        let ladder = cleared.derivation_ladder(datum, i);
        for n in (0..ladder.len()).rev() {
            if !oracle.is_zero(&ladder[n]) {
                return Some(n as u32);
            }
        }
        None
    }

    /// The crystal statistic: the largest `p` with
    /// `self` in `F_i^{(p)} U_q(n^-)`, i.e. the lowest nonzero i-string
    /// component. `None` for semantic zero. On canonical basis elements this
    /// is `eps_i` of the label.
    pub fn crystal_epsilon(&self, datum: &RootDatum, i: u8) -> Option<u32> {
        self.crystal_epsilon_with(datum, i, &DerivationOracle(datum))
    }

    pub fn crystal_epsilon_with(
        &self,
        datum: &RootDatum,
        i: u8,
        oracle: &impl ZeroOracle,
    ) -> Option<u32> {
        let parts = self.i_string_decompose_with(datum, i, oracle);
        // components come out in descending n
        parts.last().map(|(n, _)| *n)
    }

    /// Decomposes a homogeneous element along the i-string direct sum
    /// `U_q(n^-) = (+)_n F_i^{(n)} Ker e'_i`, returning pairs `(n, u_n)` with
    /// `e'_i(u_n) = 0` and `self = sum F_i^{(n)} u_n`, in descending `n`.
    ///
    /// Works top-down on one derivation ladder: the top candidate is
    /// `u_N = q_i^{N(N-1)/2} (e'_i)^N(x)`, and removing `F_i^{(N)} u_N`
    /// updates the ladder in place via
    /// `(e'_i)^k(F_i^{(N)} u) = q_i^{-kN + k(k+1)/2} F_i^{(N-k)} u`.
    pub fn i_string_decompose(&self, datum: &RootDatum, i: u8) -> Vec<(u32, NegElement)> {
        self.i_string_decompose_with(datum, i, &DerivationOracle(datum))
    }

    /// The least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> LaurentPoly {
        let mut den = LaurentPoly::one();
        for (_, c) in self.terms() {
            if !c.denominator().is_one() {
                den = den.lcm(c.denominator());
            }
        }
        den
    }

    pub fn i_string_decompose_with(
        &self,
        datum: &RootDatum,
        i: u8,
        oracle: &impl ZeroOracle,
    ) -> Vec<(u32, NegElement)> {
        if self.is_structurally_zero() {
            return Vec::new();
        }
        let d = datum.d(i as usize);
        // Clear denominators and scale rung k by [m-k]!_i so that the whole
        // elimination runs over Laurent coefficients: removing the component
        // at n subtracts a Gaussian-binomial multiple,
        //   rung_k -= q_i^{-kn + k(k+1)/2} [m-k; n-k]_i F_i^{n-k} V_n.
        let den = self.denominator_lcm();
        let cleared = if den.is_one() {
            self.clone()
        } else {
            self.scaled(&Scalar::from(den.clone()))
        };
        let ladder = cleared.derivation_ladder(datum, i);
        let m = ladder.len() - 1;
        let mut rungs: Vec<NegElement> = ladder
            .into_iter()
            .enumerate()
            .map(|(k, e)| e.scaled(&Scalar::from(quantum_factorial((m - k) as u32, d))))
            .collect();
        let mut out = Vec::new();
        for n in (0..=m).rev() {
            let nn = n as i64;
            let v = rungs[n].scaled(&Scalar::q_pow(d * nn * (nn - 1) / 2));
            if v.is_structurally_zero() || oracle.is_zero(&v) {
                continue;
            }
            // u_n = V_n / ([m-n]!_i den)
            let divisor = &quantum_factorial((m - n) as u32, d) * &den;
            out.push((
                n as u32,
                v.scaled(&Scalar::new(LaurentPoly::one(), divisor)),
            ));
            for (k, rung) in rungs.iter_mut().enumerate().take(n + 1) {
                let kk = k as i64;
                let shift = d * (-kk * nn + kk * (kk + 1) / 2);
                let binom = quantum_binom((m - k) as i64, (n - k) as u32, d);
                let plain = NegElement::word(vec![i; n - k], Scalar::one());
                let sub = plain
                    .mul(&v)
                    .scaled(&(&Scalar::q_pow(shift) * &Scalar::from(binom)));
                *rung = rung.sub(&sub);
            }
        }
        out
    }

    /// Kashiwara operator: shifts every i-string component by one divided
    /// power (`E` lowers, `F` raises).
    pub fn kashiwara(&self, datum: &RootDatum, i: u8, dir: KashiwaraDir) -> NegElement {
        self.kashiwara_with(datum, i, dir, &DerivationOracle(datum))
    }

    pub fn kashiwara_with(
        &self,
        datum: &RootDatum,
        i: u8,
        dir: KashiwaraDir,
        oracle: &impl ZeroOracle,
    ) -> NegElement {
        let mut out = NegElement::zero();
        for (n, u) in self.i_string_decompose_with(datum, i, oracle) {
            let m = match dir {
                KashiwaraDir::F => n + 1,
                KashiwaraDir::E => {
                    if n == 0 {
                        continue;
                    }
                    n - 1
                }
            };
            out = out.add(&NegElement::divided_power(datum, i, m).mul(&u));
        }
        out
    }

    /// Pretty word rendering like `(q) F1.F2 + F2.F1`.
    pub fn render(&self) -> String {
        if self.is_structurally_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (w, c) in &self.words {
            let word = if w.is_empty() {
                "1".to_string()
            } else {
                w.iter()
                    .map(|i| format!("F{}", i + 1))
                    .collect::<Vec<_>>()
                    .join(".")
            };
            parts.push(format!("({c}) {word}"));
        }
        parts.join(" + ")
    }
}

impl std::fmt::Debug for NegElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// `q_i^k` as a scalar.
pub fn qi_pow(datum: &RootDatum, i: u8, k: i64) -> Scalar {
    Scalar::q_pow(datum.d(i as usize) * k)
}

/// `1 - q_i^2` as a Laurent polynomial.
pub fn one_minus_qi_sq(datum: &RootDatum, i: u8) -> LaurentPoly {
    &LaurentPoly::one() - &LaurentPoly::q_pow(2 * datum.d(i as usize))
}

/// Checks that the supplied element is homogeneous and returns its weight;
/// errors on the structural zero.
pub fn weight_of(datum: &RootDatum, x: &NegElement) -> Result<Weight> {
    x.weight(datum.rank())
        .ok_or_else(|| Error::domain("weight of structural zero requested"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::parse_scalar;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn datum(s: &str) -> RootDatum {
        RootDatum::new(s.parse().unwrap()).unwrap()
    }

    fn sc(s: &str) -> Scalar {
        parse_scalar(s).unwrap()
    }

    fn random_element(rng: &mut StdRng, rank: u8, max_words: usize, max_len: usize) -> NegElement {
        let mut x = NegElement::zero();
        let n_words = rng.gen_range(1..=max_words);
        for _ in 0..n_words {
            let len = rng.gen_range(0..=max_len);
            let w: Word = (0..len).map(|_| rng.gen_range(0..rank)).collect();
            let c = Scalar::q_pow(rng.gen_range(-3..=3i64));
            let c = if rng.gen_bool(0.5) { -&c } else { c };
            x.insert(w, c);
        }
        x
    }

    /// Random homogeneous element of the given letter content.
    fn random_homogeneous(rng: &mut StdRng, content: &[u8], max_words: usize) -> NegElement {
        let mut x = NegElement::zero();
        for _ in 0..rng.gen_range(1..=max_words) {
            let mut w = content.to_vec();
            // Fisher-Yates
            for k in (1..w.len()).rev() {
                let j = rng.gen_range(0..=k);
                w.swap(k, j);
            }
            let c = Scalar::q_pow(rng.gen_range(-3..=3i64));
            x.insert(w, c);
        }
        x
    }

    #[test]
    fn derivation_base_cases() {
        let a2 = datum("A2");
        let f1 = NegElement::generator(0);
        assert_eq!(
            f1.derivation(&a2, 0, Side::Right).coefficient(&[]),
            Scalar::one()
        );
        assert!(f1.derivation(&a2, 1, Side::Right).is_structurally_zero());

        // e'_1(F2 F1) = q F2 in A2
        let f2f1 = NegElement::word(vec![1, 0], Scalar::one());
        let d = f2f1.derivation(&a2, 0, Side::Right);
        assert_eq!(d.coefficient(&[1]), sc("q"));
        assert_eq!(d.term_count(), 1);
    }

    #[test]
    fn derivation_divided_power() {
        // e'_i(F_i^{(d)}) = q_i^{-d+1} F_i^{(d-1)}
        for ty in ["A1", "B2"] {
            let dat = datum(ty);
            for i in 0..dat.rank() as u8 {
                for n in 1..=4u32 {
                    let x = NegElement::divided_power(&dat, i, n);
                    let dx = x.derivation(&dat, i, Side::Right);
                    let expect = NegElement::divided_power(&dat, i, n - 1)
                        .scaled(&qi_pow(&dat, i, -(i64::from(n)) + 1));
                    assert!(dx.sub(&expect).is_zero(&dat), "{ty} i={i} n={n}");
                }
            }
        }
    }

    #[test]
    fn serre_elements_have_zero_coordinates() {
        let a2 = datum("A2");
        // F1^2 F2 - [2] F1 F2 F1 + F2 F1^2
        let two = Scalar::from(crate::qfield::quantum_int(2, 1));
        let mut serre = NegElement::zero();
        serre.insert(vec![0, 0, 1], Scalar::one());
        serre.insert(vec![0, 1, 0], -&two);
        serre.insert(vec![1, 0, 0], Scalar::one());
        assert!(serre.is_zero(&a2));
        for (_, c) in serre.coordinates(&a2) {
            assert!(c.is_zero());
        }

        // commuting case: F1 F3 - F3 F1 in A3
        let a3 = datum("A3");
        let mut comm = NegElement::zero();
        comm.insert(vec![0, 2], Scalar::one());
        comm.insert(vec![2, 0], -&Scalar::one());
        assert!(comm.is_zero(&a3));

        // basic coordinates
        let f1 = NegElement::generator(0);
        assert_eq!(f1.coordinates(&a2)[&vec![0u8]], Scalar::one());
    }

    #[test]
    fn adjointness_locks_in_product_rule() {
        // (1 - q_j^2)(F_j x, y) = (x, e'_j y) on random inputs, all j.
        let mut rng = StdRng::seed_from_u64(42);
        for ty in ["A2", "B2", "G2"] {
            let dat = datum(ty);
            for _ in 0..40 {
                let len = rng.gen_range(0..=3usize);
                let content: Vec<u8> = (0..len)
                    .map(|_| rng.gen_range(0..dat.rank() as u8))
                    .collect();
                let x = random_homogeneous(&mut rng, &content, 3);
                for j in 0..dat.rank() as u8 {
                    let mut content_y = content.clone();
                    content_y.push(j);
                    content_y.sort_unstable();
                    let y = random_homogeneous(&mut rng, &content_y, 3);
                    let fjx = NegElement::generator(j).mul(&x);
                    let lhs = &Scalar::from(one_minus_qi_sq(&dat, j))
                        * &fjx.bilinear_form(&dat, &y);
                    let rhs = x.bilinear_form(&dat, &y.derivation(&dat, j, Side::Right));
                    assert_eq!(lhs, rhs, "{ty} j={j}");
                }
            }
        }
    }

    #[test]
    fn form_symmetry_and_base_cases() {
        let a2 = datum("A2");
        assert_eq!(
            NegElement::one().bilinear_form(&a2, &NegElement::one()),
            Scalar::one()
        );
        let f1 = NegElement::generator(0);
        let f2 = NegElement::generator(1);
        // (F_i, F_i) = 1/(1 - q_i^2)
        assert_eq!(
            f1.bilinear_form(&a2, &f1),
            Scalar::new(LaurentPoly::one(), one_minus_qi_sq(&a2, 0))
        );
        assert!(f1.bilinear_form(&a2, &f2).is_zero());

        // symmetry on random same-weight pairs
        let mut rng = StdRng::seed_from_u64(7);
        for ty in ["A2", "B2"] {
            let dat = datum(ty);
            for _ in 0..25 {
                let len = rng.gen_range(0..=4usize);
                let content: Vec<u8> = (0..len)
                    .map(|_| rng.gen_range(0..dat.rank() as u8))
                    .collect();
                let x = random_homogeneous(&mut rng, &content, 3);
                let y = random_homogeneous(&mut rng, &content, 3);
                assert_eq!(
                    x.bilinear_form(&dat, &y),
                    y.bilinear_form(&dat, &x),
                    "{ty}"
                );
            }
        }
    }

    #[test]
    fn star_conjugation_of_derivations() {
        // _ie' = * . e'_i . *
        let mut rng = StdRng::seed_from_u64(11);
        for ty in ["A2", "G2"] {
            let dat = datum(ty);
            for _ in 0..50 {
                let x = random_element(&mut rng, dat.rank() as u8, 4, 5);
                for i in 0..dat.rank() as u8 {
                    let lhs = x.derivation(&dat, i, Side::Left);
                    let rhs = x.star().derivation(&dat, i, Side::Right).star();
                    // identity of representatives, not just semantic
                    assert!(lhs.sub(&rhs).is_zero(&dat), "{ty} i={i}");
                }
            }
        }
    }

    #[test]
    fn bar_derivation_twist() {
        // e'_i(x) = q_i^{<wt x + a_i, a_i^vee>} bar(_ie'(bar x)) on homogeneous x
        let mut rng = StdRng::seed_from_u64(23);
        for ty in ["A2", "B2"] {
            let dat = datum(ty);
            for _ in 0..40 {
                let len = rng.gen_range(1..=4usize);
                let content: Vec<u8> = (0..len)
                    .map(|_| rng.gen_range(0..dat.rank() as u8))
                    .collect();
                let x = random_homogeneous(&mut rng, &content, 3);
                let wt = match x.weight(dat.rank()) {
                    Some(w) => w,
                    None => continue,
                };
                for i in 0..dat.rank() as u8 {
                    let lhs = x.derivation(&dat, i, Side::Right);
                    let shift =
                        dat.pairing(&wt, i as usize) + dat.cartan(i as usize, i as usize);
                    let rhs = x
                        .bar()
                        .derivation(&dat, i, Side::Left)
                        .bar()
                        .scaled(&qi_pow(&dat, i, shift));
                    assert!(lhs.sub(&rhs).is_zero(&dat), "{ty} i={i}");
                }
            }
        }
    }

    #[test]
    fn star_and_bar_are_involutions() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..30 {
            let x = random_element(&mut rng, 2, 4, 5);
            assert!(x.star().star().sub(&x).is_structurally_zero());
            assert!(x.bar().bar().sub(&x).is_structurally_zero());
        }
        let f1f2 = NegElement::word(vec![0, 1], Scalar::one());
        assert_eq!(f1f2.star().coefficient(&[1, 0]), Scalar::one());
        let qf = NegElement::word(vec![0, 1], sc("q"));
        assert_eq!(qf.bar().coefficient(&[0, 1]), sc("q^-1"));
    }

    #[test]
    fn i_string_reconstruction() {
        let mut rng = StdRng::seed_from_u64(99);
        for ty in ["A2", "B2"] {
            let dat = datum(ty);
            for _ in 0..20 {
                let len = rng.gen_range(0..=4usize);
                let content: Vec<u8> = (0..len)
                    .map(|_| rng.gen_range(0..dat.rank() as u8))
                    .collect();
                let x = random_homogeneous(&mut rng, &content, 3);
                for i in 0..dat.rank() as u8 {
                    let parts = x.i_string_decompose(&dat, i);
                    let mut sum = NegElement::zero();
                    for (n, u) in &parts {
                        assert!(
                            u.derivation(&dat, i, Side::Right).is_zero(&dat),
                            "{ty}: u_{n} not in Ker e'_{i}"
                        );
                        sum = sum.add(&NegElement::divided_power(&dat, i, *n).mul(u));
                    }
                    assert!(sum.sub(&x).is_zero(&dat), "{ty} i={i}");
                }
            }
        }
    }

    #[test]
    fn i_string_examples() {
        let a2 = datum("A2");
        // F_i^{(3)} -> [(3, 1)]
        let x = NegElement::divided_power(&a2, 0, 3);
        let parts = x.i_string_decompose(&a2, 0);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, 3);
        assert!(parts[0].1.sub(&NegElement::one()).is_zero(&a2));

        // zero -> empty
        assert!(NegElement::zero().i_string_decompose(&a2, 0).is_empty());

        // F2 F1, i = 1: reconstruction with u_0 = F2F1 - q F1F2 (in Ker e'_1)
        let f2f1 = NegElement::word(vec![1, 0], Scalar::one());
        let parts = f2f1.i_string_decompose(&a2, 0);
        assert_eq!(parts.len(), 2);
        let mut expect_u0 = NegElement::word(vec![1, 0], Scalar::one());
        expect_u0.insert(vec![0, 1], -&sc("q"));
        let u0 = parts.iter().find(|(n, _)| *n == 0).unwrap();
        assert!(u0.1.sub(&expect_u0).is_zero(&a2));
    }

    #[test]
    fn kashiwara_operator_basics() {
        let a1 = datum("A1");
        for n in 0..4u32 {
            let x = NegElement::divided_power(&a1, 0, n);
            let fx = x.kashiwara(&a1, 0, KashiwaraDir::F);
            assert!(fx
                .sub(&NegElement::divided_power(&a1, 0, n + 1))
                .is_zero(&a1));
        }
        let one = NegElement::one();
        assert!(one.kashiwara(&a1, 0, KashiwaraDir::E).is_zero(&a1));

        // e . f = id on random homogeneous elements
        let mut rng = StdRng::seed_from_u64(5);
        for ty in ["A2", "B2"] {
            let dat = datum(ty);
            for _ in 0..15 {
                let len = rng.gen_range(0..=3usize);
                let content: Vec<u8> = (0..len)
                    .map(|_| rng.gen_range(0..dat.rank() as u8))
                    .collect();
                let x = random_homogeneous(&mut rng, &content, 2);
                for i in 0..dat.rank() as u8 {
                    let fx = x.kashiwara(&dat, i, KashiwaraDir::F);
                    let efx = fx.kashiwara(&dat, i, KashiwaraDir::E);
                    assert!(efx.sub(&x).is_zero(&dat), "{ty} i={i}");
                }
            }
        }
    }

    #[test]
    fn faithfulness_vs_form() {
        // an element with all-zero coordinates pairs to zero against every word
        let a2 = datum("A2");
        let two = Scalar::from(crate::qfield::quantum_int(2, 1));
        let mut serre = NegElement::zero();
        serre.insert(vec![0, 0, 1], Scalar::one());
        serre.insert(vec![0, 1, 0], -&two);
        serre.insert(vec![1, 0, 0], Scalar::one());
        for w in [vec![0u8, 0, 1], vec![0, 1, 0], vec![1, 0, 0]] {
            let probe = NegElement::word(w, Scalar::one());
            assert!(probe.bilinear_form(&a2, &serre).is_zero());
        }
    }

    #[test]
    fn epsilon_counts() {
        let a2 = datum("A2");
        let x = NegElement::divided_power(&a2, 0, 3);
        assert_eq!(x.epsilon(&a2, 0), Some(3));
        assert_eq!(x.epsilon(&a2, 1), Some(0));
        assert_eq!(NegElement::one().epsilon(&a2, 0), Some(0));
        assert_eq!(NegElement::zero().epsilon(&a2, 0), None);
    }
}
