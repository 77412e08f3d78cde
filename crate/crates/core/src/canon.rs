//! Canonical basis slices, crystal labels and operators, Saito reflections,
//! and the Kashiwara embedding.
//!
//! Labels are Lusztig data: the leading PBW exponent tuple with respect to a
//! fixed reference reduced word (the lexicographically smallest one). Each
//! weight slice is produced by a bar-invariant triangular solve against the
//! bar matrix of the PBW monomials, with off-leading coefficients in qZ[q].
//! String statistics are computed lazily per (label, index) and memoized;
//! transition chains touch many weight spaces but need very few statistics
//! in each.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pbw::{ExponentTuple, PbwBasis, PbwZero, WeightCache};
use crate::qfield::{LaurentPoly, Scalar};
use crate::rootdata::{RootDatum, Weight};
use crate::uqn::{KashiwaraDir, NegElement, ZeroOracle};

/// Which order made the bar matrix unitriangular.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveOrder {
    LeftLex,
    Topological(Vec<usize>),
}

impl SolveOrder {
    pub fn as_label(&self) -> &'static str {
        match self {
            SolveOrder::LeftLex => "left-lex",
            SolveOrder::Topological(_) => "topological",
        }
    }
}

/// A point of the crystal, identified by its Lusztig datum. Statistics live
/// in the context's memo tables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrystalLabel {
    pub datum: ExponentTuple,
    pub weight: Weight,
}

/// One weight space of the canonical basis.
pub struct CanonicalBasisSlice {
    pub weight: Weight,
    /// Lusztig data, index-aligned with the weight cache's tuples.
    pub labels: Vec<CrystalLabel>,
    pub elements: Vec<NegElement>,
    /// `pbw_coords[l][t]` = coefficient of tuple `t` in element `l`
    /// (reference-word expansion); unitriangular.
    pub pbw_coords: Vec<Vec<Scalar>>,
    pub order: SolveOrder,
}

impl CanonicalBasisSlice {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_index(&self, datum: &ExponentTuple) -> Option<usize> {
        self.labels.iter().position(|l| &l.datum == datum)
    }

    /// Tuple indices in the order the triangular solve processed them.
    pub fn solve_order(&self) -> Vec<usize> {
        match &self.order {
            SolveOrder::LeftLex => (0..self.labels.len()).collect(),
            SolveOrder::Topological(o) => o.clone(),
        }
    }
}

/// Serializable core of a slice, used by the disk cache.
pub struct SliceData {
    pub weight: Weight,
    pub tuples: Vec<ExponentTuple>,
    pub coords: Vec<Vec<Scalar>>,
    pub order: SolveOrder,
}

/// Pluggable persistent store for computed slices.
pub trait SliceCacheBackend: Send + Sync {
    fn load(&self, mu: &Weight) -> Option<SliceData>;
    fn store(&self, data: &SliceData);
}

/// Shared context: the root datum, the reference PBW basis, all lazily
/// computed slices, and the statistic/reflection memos.
pub struct CanonicalContext {
    datum: Arc<RootDatum>,
    basis: Arc<PbwBasis>,
    slices: RwLock<HashMap<Weight, Arc<CanonicalBasisSlice>>>,
    /// `(datum tuple, i) -> eps_i`.
    eps_memo: RwLock<HashMap<(ExponentTuple, u8), u32>>,
    /// `(datum tuple, i) -> eps*_i`.
    eps_star_memo: RwLock<HashMap<(ExponentTuple, u8), u32>>,
    /// Memoized `Lambda_i^{-1}` by (label datum, i).
    saito_inv: RwLock<HashMap<(ExponentTuple, u8), ExponentTuple>>,
    /// Memoized `Lambda_i` by (label datum, i).
    saito_fwd: RwLock<HashMap<(ExponentTuple, u8), ExponentTuple>>,
    backend: Option<Arc<dyn SliceCacheBackend>>,
}

impl CanonicalContext {
    /// Builds the reference basis for the type's reference word.
    pub fn new(datum: Arc<RootDatum>, height_bound: i64) -> Result<CanonicalContext> {
        let word = datum.reference_word()?;
        let basis = Arc::new(PbwBasis::build(&datum, &word, height_bound)?);
        Ok(CanonicalContext {
            datum,
            basis,
            slices: RwLock::new(HashMap::new()),
            eps_memo: RwLock::new(HashMap::new()),
            eps_star_memo: RwLock::new(HashMap::new()),
            saito_inv: RwLock::new(HashMap::new()),
            saito_fwd: RwLock::new(HashMap::new()),
            backend: None,
        })
    }

    pub fn with_backend(mut self, backend: Arc<dyn SliceCacheBackend>) -> CanonicalContext {
        self.backend = Some(backend);
        self
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    /// The pivot-coordinate zero oracle over the reference basis.
    pub fn zero_oracle(&self) -> PbwZero<'_> {
        PbwZero {
            datum: &self.datum,
            basis: &self.basis,
        }
    }

    pub fn basis(&self) -> &Arc<PbwBasis> {
        &self.basis
    }

    pub fn height_bound(&self) -> i64 {
        self.basis.height_bound()
    }

    /// The canonical basis slice at `mu`, computed (or loaded) on first use.
    pub fn slice(&self, mu: &Weight) -> Result<Arc<CanonicalBasisSlice>> {
        if let Some(s) = self.slices.read().unwrap().get(mu) {
            return Ok(s.clone());
        }
        if let Some(backend) = &self.backend {
            if let Some(data) = backend.load(mu) {
                let slice = Arc::new(self.rehydrate(data)?);
                self.slices
                    .write()
                    .unwrap()
                    .entry(mu.clone())
                    .or_insert_with(|| slice.clone());
                return Ok(slice);
            }
        }
        let slice = Arc::new(self.compute_slice(mu)?);
        if let Some(backend) = &self.backend {
            backend.store(&slice_to_data(&slice));
        }
        self.slices
            .write()
            .unwrap()
            .entry(mu.clone())
            .or_insert_with(|| slice.clone());
        Ok(slice)
    }

    fn rehydrate(&self, data: SliceData) -> Result<CanonicalBasisSlice> {
        let cache = self.basis.weight_cache(&self.datum, &data.weight)?;
        if cache.tuples != data.tuples {
            return Err(Error::integrity(format!(
                "cached slice at {} lists different exponent tuples",
                data.weight
            )));
        }
        let elements = data
            .coords
            .iter()
            .map(|row| assemble(&cache, row))
            .collect::<Vec<_>>();
        let labels = cache
            .tuples
            .iter()
            .map(|t| CrystalLabel {
                datum: t.clone(),
                weight: data.weight.clone(),
            })
            .collect();
        Ok(CanonicalBasisSlice {
            weight: data.weight,
            labels,
            elements,
            pbw_coords: data.coords,
            order: data.order,
        })
    }

    fn compute_slice(&self, mu: &Weight) -> Result<CanonicalBasisSlice> {
        let datum = &*self.datum;
        let solved = solve_bar_invariant_basis(datum, &self.basis, mu)?;
        let cache = self.basis.weight_cache(datum, mu)?;
        let labels = cache
            .tuples
            .iter()
            .map(|t| CrystalLabel {
                datum: t.clone(),
                weight: mu.clone(),
            })
            .collect();
        Ok(CanonicalBasisSlice {
            weight: mu.clone(),
            labels,
            elements: solved.elements,
            pbw_coords: solved.coords,
            order: solved.order,
        })
    }

    /// Label lookup by datum tuple (the weight is implied by the tuple).
    pub fn label(&self, datum_tuple: &ExponentTuple) -> Result<CrystalLabel> {
        let mu = self.basis.tuple_weight(datum_tuple);
        let slice = self.slice(&mu)?;
        let k = slice.label_index(datum_tuple).ok_or_else(|| {
            Error::domain(format!("tuple {datum_tuple} is not a label at weight {mu}"))
        })?;
        Ok(slice.labels[k].clone())
    }

    pub fn unit_label(&self) -> Result<CrystalLabel> {
        self.label(&ExponentTuple::zero(self.basis.rank_n()))
    }

    pub fn element_of(&self, label: &CrystalLabel) -> Result<NegElement> {
        let slice = self.slice(&label.weight)?;
        let k = slice
            .label_index(&label.datum)
            .ok_or_else(|| Error::integrity("label missing from its own slice"))?;
        Ok(slice.elements[k].clone())
    }

    /// The crystal statistic `eps_i(b)`: the lowest i-string component of
    /// the canonical element. Memoized.
    pub fn eps(&self, label: &CrystalLabel, i: u8) -> Result<u32> {
        let key = (label.datum.clone(), i);
        if let Some(&v) = self.eps_memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let elem = self.element_of(label)?;
        let v = elem
            .crystal_epsilon_with(&self.datum, i, &self.zero_oracle())
            .ok_or_else(|| Error::integrity("canonical element is semantically zero"))?;
        self.eps_memo.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// `eps*_i(b) = eps_i(*b)`. Memoized.
    pub fn eps_star(&self, label: &CrystalLabel, i: u8) -> Result<u32> {
        let key = (label.datum.clone(), i);
        if let Some(&v) = self.eps_star_memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let elem = self.element_of(label)?.star();
        let v = elem
            .crystal_epsilon_with(&self.datum, i, &self.zero_oracle())
            .ok_or_else(|| Error::integrity("starred canonical element is semantically zero"))?;
        self.eps_star_memo.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// `phi_i = eps_i + <alpha_i^vee, wt>`.
    pub fn phi(&self, label: &CrystalLabel, i: u8) -> Result<i64> {
        Ok(i64::from(self.eps(label, i)?) + self.datum.pairing(&label.weight, i as usize))
    }

    /// `phi*_i = eps*_i + <alpha_i^vee, wt>`.
    pub fn phi_star(&self, label: &CrystalLabel, i: u8) -> Result<i64> {
        Ok(i64::from(self.eps_star(label, i)?) + self.datum.pairing(&label.weight, i as usize))
    }

    /// Expands a homogeneous element in the canonical basis of its weight
    /// slice, returning per-label coefficients.
    pub fn expand_in_canonical(&self, x: &NegElement) -> Result<Vec<(CrystalLabel, Scalar)>> {
        let Some(mu) = x.weight(self.datum.rank()) else {
            return Ok(Vec::new());
        };
        let slice = self.slice(&mu)?;
        let z = self.basis.expand(&self.datum, x)?;
        let cache = self.basis.weight_cache(&self.datum, &mu)?;
        let mut rem: Vec<Scalar> = cache
            .tuples
            .iter()
            .map(|t| z.get(t).cloned().unwrap_or_else(Scalar::zero))
            .collect();
        let mut gamma = vec![Scalar::zero(); slice.len()];
        for pos in slice.solve_order() {
            let g = rem[pos].clone();
            if g.is_zero() {
                continue;
            }
            gamma[pos] = g.clone();
            for (t, c) in slice.pbw_coords[pos].iter().enumerate() {
                if !c.is_zero() {
                    rem[t] = &rem[t] - &(&g * c);
                }
            }
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return Err(Error::integrity(format!(
                "canonical expansion left a nonzero remainder at weight {mu}"
            )));
        }
        Ok(slice
            .labels
            .iter()
            .cloned()
            .zip(gamma)
            .filter(|(_, g)| !g.is_zero())
            .collect())
    }

    /// Crystal operator on labels. Applies the Kashiwara operator to the
    /// canonical element, expands in the adjacent slice and reduces mod q:
    /// exactly one coefficient must be `1 mod q` and the rest `0 mod q`;
    /// an all-zero reduction is the crystal zero, legal only for raising
    /// operators at the bottom of the string.
    pub fn crystal_step(
        &self,
        label: &CrystalLabel,
        i: u8,
        op: CrystalOp,
    ) -> Result<Option<CrystalLabel>> {
        let datum = &*self.datum;
        let raising_eps = match op {
            CrystalOp::E => Some(self.eps(label, i)?),
            CrystalOp::EStar => Some(self.eps_star(label, i)?),
            _ => None,
        };
        let elem = self.element_of(label)?;
        let conj = matches!(op, CrystalOp::EStar | CrystalOp::FStar);
        let dir = match op {
            CrystalOp::E | CrystalOp::EStar => KashiwaraDir::E,
            CrystalOp::F | CrystalOp::FStar => KashiwaraDir::F,
        };
        let oracle = self.zero_oracle();
        let moved = if conj {
            elem.star().kashiwara_with(datum, i, dir, &oracle).star()
        } else {
            elem.kashiwara_with(datum, i, dir, &oracle)
        };
        let hit = if oracle.is_zero(&moved) {
            None
        } else {
            let expansion = self.expand_in_canonical(&moved)?;
            let mut hit: Option<CrystalLabel> = None;
            for (l, g) in expansion {
                let p = g.as_laurent().ok_or_else(|| {
                    Error::integrity(format!(
                        "crystal step coefficient {g} at {} is not Laurent",
                        l.datum
                    ))
                })?;
                if p.min_degree().map(|d| d < 0).unwrap_or(false) {
                    return Err(Error::integrity(format!(
                        "crystal step coefficient {g} has negative q-degree"
                    )));
                }
                let c0 = p.coefficient(0);
                if c0.is_one() {
                    if hit.is_some() {
                        return Err(Error::integrity(
                            "two coefficients are 1 mod q in a crystal step",
                        ));
                    }
                    hit = Some(l);
                } else if !c0.is_zero() {
                    return Err(Error::integrity(format!(
                        "crystal step coefficient {g} is neither 0 nor 1 mod q"
                    )));
                }
            }
            hit
        };
        match (&hit, raising_eps) {
            (None, Some(eps)) if eps > 0 => Err(Error::integrity(
                "raising step vanished although eps > 0",
            )),
            (Some(_), Some(0)) => Err(Error::integrity(
                "raising step survived although eps = 0",
            )),
            (None, None) => Err(Error::integrity("lowering step vanished")),
            _ => Ok(hit),
        }
    }

    /// Iterated crystal step; errors if a step unexpectedly vanishes.
    pub fn crystal_steps(
        &self,
        label: &CrystalLabel,
        i: u8,
        op: CrystalOp,
        times: u32,
    ) -> Result<CrystalLabel> {
        let mut cur = label.clone();
        for _ in 0..times {
            cur = self.crystal_step(&cur, i, op)?.ok_or_else(|| {
                Error::integrity("crystal step hit zero before the requested power")
            })?;
        }
        Ok(cur)
    }

    /// The Saito reflection. `Lambda_i^{-1}` is the displayed composition
    /// `b -> f_i^{phi*_i(b)} (e*_i)^{eps*_i(b)} b` on `{eps_i = 0}`;
    /// `Lambda_i` is its inverse, computed by search over the target slice.
    /// Both directions are memoized.
    pub fn saito_reflect(
        &self,
        label: &CrystalLabel,
        i: u8,
        dir: SaitoDir,
    ) -> Result<CrystalLabel> {
        match dir {
            SaitoDir::Inverse => {
                if self.eps(label, i)? != 0 {
                    return Err(Error::domain(format!(
                        "Lambda_{}^-1 needs eps_{}(b) = 0",
                        i + 1,
                        i + 1
                    )));
                }
                self.saito_inverse_raw(label, i)
            }
            SaitoDir::Forward => {
                if self.eps_star(label, i)? != 0 {
                    return Err(Error::domain(format!(
                        "Lambda_{} needs eps*_{}(b) = 0",
                        i + 1,
                        i + 1
                    )));
                }
                let key = (label.datum.clone(), i);
                if let Some(hit) = self.saito_fwd.read().unwrap().get(&key) {
                    return self.label(hit);
                }
                let target_weight = self.datum.simple_reflection(i as usize, &label.weight);
                let target = self.slice(&target_weight)?;
                let mut found = None;
                for l in &target.labels {
                    if self.eps(l, i)? != 0 {
                        continue;
                    }
                    let back = self.saito_inverse_raw(l, i)?;
                    if back.datum == label.datum {
                        found = Some(l.clone());
                        break;
                    }
                }
                let found = found.ok_or_else(|| {
                    Error::integrity(format!(
                        "no Lambda_{} image found for {} (Saito bijection broken)",
                        i + 1,
                        label.datum
                    ))
                })?;
                self.saito_fwd
                    .write()
                    .unwrap()
                    .insert(key, found.datum.clone());
                Ok(found)
            }
        }
    }

    fn saito_inverse_raw(&self, label: &CrystalLabel, i: u8) -> Result<CrystalLabel> {
        let key = (label.datum.clone(), i);
        if let Some(hit) = self.saito_inv.read().unwrap().get(&key) {
            return self.label(hit);
        }
        let e_star = self.eps_star(label, i)?;
        let phi_star = self.phi_star(label, i)?;
        if phi_star < 0 {
            return Err(Error::integrity(format!(
                "phi*_{}(b) = {phi_star} < 0 on the Saito domain",
                i + 1
            )));
        }
        let up = self.crystal_steps(label, i, CrystalOp::EStar, e_star)?;
        let img = self.crystal_steps(&up, i, CrystalOp::F, phi_star as u32)?;
        self.saito_inv
            .write()
            .unwrap()
            .insert(key, img.datum.clone());
        Ok(img)
    }

    /// The label of `* b`, found by matching the starred element inside the
    /// same slice.
    pub fn star_label(&self, label: &CrystalLabel) -> Result<CrystalLabel> {
        let elem = self.element_of(label)?.star();
        let expansion = self.expand_in_canonical(&elem)?;
        if expansion.len() != 1 || !expansion[0].1.is_one() {
            return Err(Error::integrity(format!(
                "*G({}) is not a canonical element",
                label.datum
            )));
        }
        Ok(expansion[0].0.clone())
    }

    /// The Kashiwara embedding `Psi_i(b) = ((e*_i)^{eps*_i(b)} b, -eps*_i(b))`.
    pub fn kashiwara_embed(&self, label: &CrystalLabel, i: u8) -> Result<(CrystalLabel, i64)> {
        let m = self.eps_star(label, i)?;
        let body = self.crystal_steps(label, i, CrystalOp::EStar, m)?;
        Ok((body, -i64::from(m)))
    }

    /// Crystal operator on the image crystal `B(inf) x Z_i`.
    pub fn tensor_step(
        &self,
        point: &(CrystalLabel, i64),
        i: u8,
        j: u8,
        op: CrystalOp,
    ) -> Result<Option<(CrystalLabel, i64)>> {
        let (b, m) = point;
        let phi_i = self.phi(b, i)?;
        match op {
            CrystalOp::E => {
                if j != i || phi_i >= -m {
                    Ok(self
                        .crystal_step(b, j, CrystalOp::E)?
                        .map(|nb| (nb, *m)))
                } else {
                    Ok(Some((b.clone(), m + 1)))
                }
            }
            CrystalOp::F => {
                if j != i || phi_i > -m {
                    Ok(self
                        .crystal_step(b, j, CrystalOp::F)?
                        .map(|nb| (nb, *m)))
                } else {
                    Ok(Some((b.clone(), m - 1)))
                }
            }
            _ => Err(Error::domain("starred operators undefined on the tensor")),
        }
    }

    /// All labels of weight `mu`.
    pub fn labels_at(&self, mu: &Weight) -> Result<Vec<CrystalLabel>> {
        Ok(self.slice(mu)?.labels.clone())
    }

    /// Weights of the slices computed so far (diagnostics).
    pub fn cached_slice_weights(&self) -> Vec<Weight> {
        let mut v: Vec<Weight> = self.slices.read().unwrap().keys().cloned().collect();
        v.sort();
        v
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CrystalOp {
    E,
    F,
    EStar,
    FStar,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SaitoDir {
    /// `Lambda_i : {eps*_i = 0} -> {eps_i = 0}`.
    Forward,
    /// `Lambda_i^{-1} : {eps_i = 0} -> {eps*_i = 0}`.
    Inverse,
}

/// Output of the triangular solve: elements index-aligned with the weight
/// cache's tuples, their full coordinate rows, and the order that worked.
pub struct SolvedSlice {
    pub elements: Vec<NegElement>,
    pub coords: Vec<Vec<Scalar>>,
    pub order: SolveOrder,
}

/// Builds `sum_t row[t] * F^t` from cached monomials.
fn assemble(cache: &WeightCache, row: &[Scalar]) -> NegElement {
    let mut out = NegElement::zero();
    for (t, c) in row.iter().enumerate() {
        if !c.is_zero() {
            out = out.add(&cache.monomials[t].scaled(c));
        }
    }
    out
}

/// The bar-invariant triangular solve for one weight space of an arbitrary
/// PBW basis. Returns elements index-aligned with the basis's tuples; entry
/// `k` is the unique bar-invariant element with unitriangular expansion led
/// by tuple `k`.
pub fn solve_bar_invariant_basis(
    datum: &RootDatum,
    basis: &PbwBasis,
    mu: &Weight,
) -> Result<SolvedSlice> {
    let cache = basis.weight_cache(datum, mu)?;
    let n = cache.tuples.len();
    // bar matrix: bar(F^c) = sum_e M[c][e] F^e (bar on the word carrier is
    // coefficient bar)
    let mut bar_matrix = vec![vec![Scalar::zero(); n]; n];
    for (c, m) in cache.monomials.iter().enumerate() {
        let expansion = basis.expand(datum, &m.bar())?;
        for (e, coeff) in expansion {
            let col = cache
                .tuples
                .binary_search(&e)
                .map_err(|_| Error::integrity("bar image leaves the weight space"))?;
            if !coeff.is_laurent() {
                return Err(Error::integrity(format!(
                    "bar matrix entry {coeff} at {mu} is not Laurent"
                )));
            }
            bar_matrix[c][col] = coeff;
        }
    }
    let order = find_unitriangular_order(&bar_matrix)?;
    let sequence = match &order {
        SolveOrder::LeftLex => (0..n).collect::<Vec<_>>(),
        SolveOrder::Topological(o) => o.clone(),
    };
    // position of each tuple in the solve sequence
    let mut pos = vec![0usize; n];
    for (p, &t) in sequence.iter().enumerate() {
        pos[t] = p;
    }
    let mut coords = vec![vec![Scalar::zero(); n]; n];
    for lead in 0..n {
        let mut row = vec![Scalar::zero(); n];
        row[lead] = Scalar::one();
        // process tuples after the lead in solve order
        for &t in sequence.iter().skip(pos[lead] + 1) {
            // r = sum_{e: pos[lead] <= pos[e] < pos[t]} bar(p_e) M[e][t]
            let mut r = Scalar::zero();
            for &e in &sequence[pos[lead]..pos[t]] {
                if row[e].is_zero() || bar_matrix[e][t].is_zero() {
                    continue;
                }
                r = &r + &(&row[e].bar() * &bar_matrix[e][t]);
            }
            row[t] = solve_bar_equation(&r).map_err(|e| {
                Error::integrity(format!(
                    "at weight {mu}, lead {}: {e}",
                    cache.tuples[lead]
                ))
            })?;
        }
        coords[lead] = row;
    }
    let elements = coords.iter().map(|row| assemble(&cache, row)).collect();
    Ok(SolvedSlice {
        elements,
        coords,
        order,
    })
}

/// Unique `p` in `q Z[q]` with `p - bar(p) = r`.
fn solve_bar_equation(r: &Scalar) -> Result<Scalar> {
    let poly = r
        .as_laurent()
        .ok_or_else(|| Error::integrity(format!("bar equation rhs {r} is not Laurent")))?;
    if poly.bar() != -poly {
        return Err(Error::integrity(format!(
            "bar equation rhs {r} is not bar-antisymmetric"
        )));
    }
    // antisymmetry kills the constant term, so the positive-degree part is
    // the unique solution in qQ[q]
    let mut positive = LaurentPoly::zero();
    for (e, c) in poly.terms() {
        if *e > 0 {
            positive += &LaurentPoly::monomial(*e, c.clone());
        }
    }
    debug_assert_eq!(&(&positive - &positive.bar()), poly);
    if !positive.has_integer_coeffs() {
        return Err(Error::integrity(format!(
            "bar-invariant correction {positive} is not integral"
        )));
    }
    Ok(Scalar::from(positive))
}

/// Left-lex first; otherwise a topological order of the bar matrix support.
fn find_unitriangular_order(m: &[Vec<Scalar>]) -> Result<SolveOrder> {
    let n = m.len();
    let diag_ok = (0..n).all(|k| m[k][k].is_one());
    if !diag_ok {
        return Err(Error::integrity(
            "bar matrix diagonal is not identically 1",
        ));
    }
    let lex_ok = (0..n).all(|r| (0..r).all(|c| m[r][c].is_zero()));
    if lex_ok {
        return Ok(SolveOrder::LeftLex);
    }
    // Kahn's algorithm on edges r -> c for off-diagonal support, smallest
    // index first for determinism
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut indeg = vec![0usize; n];
    let mut edges = vec![Vec::new(); n];
    for r in 0..n {
        for c in 0..n {
            if r != c && !m[r][c].is_zero() {
                edges[r].push(c);
                indeg[c] += 1;
            }
        }
    }
    let mut queue: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&k| indeg[k] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(k)) = queue.pop() {
        order.push(k);
        for &c in &edges[k] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(Reverse(c));
            }
        }
    }
    if order.len() != n {
        return Err(Error::integrity(
            "bar matrix support has a cycle; no unitriangular order exists",
        ));
    }
    Ok(SolveOrder::Topological(order))
}

fn slice_to_data(slice: &CanonicalBasisSlice) -> SliceData {
    SliceData {
        weight: slice.weight.clone(),
        tuples: slice.labels.iter().map(|l| l.datum.clone()).collect(),
        coords: slice.pbw_coords.clone(),
        order: slice.order.clone(),
    }
}

/// Canonical elements at `mu` computed against an arbitrary word's basis;
/// used for reduced-word-independence checks.
pub fn canonical_elements_for_basis(
    datum: &RootDatum,
    basis: &PbwBasis,
    mu: &Weight,
) -> Result<Vec<NegElement>> {
    Ok(solve_bar_invariant_basis(datum, basis, mu)?.elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbw::weights_up_to_height;
    use crate::qfield::parse_scalar;
    use crate::rootdata::ReducedWord;

    fn ctx(ty: &str, bound: i64) -> CanonicalContext {
        let datum = Arc::new(RootDatum::new(ty.parse().unwrap()).unwrap());
        CanonicalContext::new(datum, bound).unwrap()
    }

    fn sc(s: &str) -> Scalar {
        parse_scalar(s).unwrap()
    }

    #[test]
    fn rank1_slices_are_divided_powers() {
        let c = ctx("A1", 5);
        for n in 1..=5i64 {
            let mu = Weight(vec![-n]);
            let slice = c.slice(&mu).unwrap();
            assert_eq!(slice.len(), 1);
            let expect = NegElement::divided_power(c.datum(), 0, n as u32);
            assert!(slice.elements[0].sub(&expect).is_zero(c.datum()));
            assert_eq!(slice.pbw_coords[0][0], Scalar::one());
            assert_eq!(c.eps(&slice.labels[0], 0).unwrap(), n as u32);
        }
    }

    #[test]
    fn a2_height_two_slice() {
        let c = ctx("A2", 4);
        let mu = Weight(vec![-1, -1]);
        let slice = c.slice(&mu).unwrap();
        assert_eq!(slice.len(), 2);
        // leading tuples (0,1,0) and (1,0,1); G(0,1,0) = F2 F1, G(1,0,1) = F1 F2
        let i_mid = slice
            .label_index(&ExponentTuple(vec![0, 1, 0]))
            .unwrap();
        let i_prod = slice
            .label_index(&ExponentTuple(vec![1, 0, 1]))
            .unwrap();
        let f2f1 = NegElement::word(vec![1, 0], Scalar::one());
        let f1f2 = NegElement::word(vec![0, 1], Scalar::one());
        assert!(slice.elements[i_mid].sub(&f2f1).is_zero(c.datum()));
        assert!(slice.elements[i_prod].sub(&f1f2).is_zero(c.datum()));
        // expansion of G(0,1,0): 1 at the lead, q at (1,0,1)
        assert_eq!(slice.pbw_coords[i_mid][i_prod], sc("q"));
        assert_eq!(slice.order, SolveOrder::LeftLex);
        // crystal eps of the F2F1 label: eps_1 = 0 despite e'_1 acting
        assert_eq!(c.eps(&slice.labels[i_mid], 0).unwrap(), 0);
        assert_eq!(c.eps(&slice.labels[i_mid], 1).unwrap(), 1);
    }

    #[test]
    fn bar_invariance_and_unitriangularity() {
        for ty in ["A2", "B2"] {
            let c = ctx(ty, 4);
            for mu in weights_up_to_height(c.datum(), 4) {
                let slice = c.slice(&mu).unwrap();
                for (k, g) in slice.elements.iter().enumerate() {
                    assert!(
                        g.bar().sub(g).is_zero(c.datum()),
                        "{ty} {mu}: element {k} not bar-invariant"
                    );
                    // unitriangular with off-lead coefficients in qZ[q]
                    for (t, coeff) in slice.pbw_coords[k].iter().enumerate() {
                        if t == k {
                            assert!(coeff.is_one());
                        } else if !coeff.is_zero() {
                            assert!(t > k, "{ty} {mu}: support below left-lex lead");
                            let p = coeff.as_laurent().unwrap();
                            assert!(p.min_degree().unwrap() >= 1, "{ty} {mu}: {coeff}");
                            assert!(p.has_integer_coeffs());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn word_independence_of_canonical_elements() {
        let c = ctx("A2", 4);
        let other = ReducedWord::parse("2,1,2", 2).unwrap();
        let basis2 = PbwBasis::build(c.datum(), &other, 4).unwrap();
        for mu in weights_up_to_height(c.datum(), 4) {
            let s1 = c.slice(&mu).unwrap();
            let s2 = canonical_elements_for_basis(c.datum(), &basis2, &mu).unwrap();
            assert_eq!(s1.len(), s2.len());
            for g in &s2 {
                let found = s1
                    .elements
                    .iter()
                    .any(|h| h.sub(g).is_zero(c.datum()));
                assert!(found, "mu = {mu}: element from word 2,1,2 not in slice");
            }
        }
    }

    #[test]
    fn crystal_step_examples() {
        let c = ctx("A2", 4);
        let unit = c.unit_label().unwrap();
        // f_i on the unit -> label of F_i^{(1)}
        let f1 = c.crystal_step(&unit, 0, CrystalOp::F).unwrap().unwrap();
        assert_eq!(f1.datum, ExponentTuple(vec![1, 0, 0]));
        let f2 = c.crystal_step(&unit, 1, CrystalOp::F).unwrap().unwrap();
        assert_eq!(f2.datum, ExponentTuple(vec![0, 0, 1]));
        // e_i null iff eps_i = 0
        assert!(c.crystal_step(&unit, 0, CrystalOp::E).unwrap().is_none());
        let back = c.crystal_step(&f1, 0, CrystalOp::E).unwrap().unwrap();
        assert_eq!(back.datum, unit.datum);
        // first-letter f-step increments the first datum entry
        let ff1 = c.crystal_step(&f1, 0, CrystalOp::F).unwrap().unwrap();
        assert_eq!(ff1.datum, ExponentTuple(vec![2, 0, 0]));
    }

    #[test]
    fn epsilon_matches_step_count() {
        let c = ctx("A2", 4);
        for mu in weights_up_to_height(c.datum(), 4) {
            let slice = c.slice(&mu).unwrap();
            for l in &slice.labels {
                for i in 0..2u8 {
                    let mut steps = 0u32;
                    let mut cur = l.clone();
                    while let Some(next) = c.crystal_step(&cur, i, CrystalOp::E).unwrap() {
                        cur = next;
                        steps += 1;
                    }
                    assert_eq!(
                        steps,
                        c.eps(l, i).unwrap(),
                        "mu={mu} l={} i={i}",
                        l.datum
                    );
                }
            }
        }
    }

    #[test]
    fn crystal_axioms_on_enumerated_labels() {
        let c = ctx("A2", 4);
        for mu in weights_up_to_height(c.datum(), 3) {
            let slice = c.slice(&mu).unwrap();
            for l in &slice.labels {
                for i in 0..2u8 {
                    let phi = c.phi(l, i).unwrap();
                    if let Some(e) = c.crystal_step(l, i, CrystalOp::E).unwrap() {
                        assert_eq!(
                            e.weight,
                            l.weight.add(&Weight::simple_root(2, i as usize))
                        );
                        assert_eq!(c.eps(&e, i).unwrap(), c.eps(l, i).unwrap() - 1);
                        assert_eq!(c.phi(&e, i).unwrap(), phi + 1);
                        // f e = id
                        let back = c.crystal_step(&e, i, CrystalOp::F).unwrap().unwrap();
                        assert_eq!(back.datum, l.datum);
                    }
                    let f = c.crystal_step(l, i, CrystalOp::F).unwrap().unwrap();
                    assert_eq!(c.eps(&f, i).unwrap(), c.eps(l, i).unwrap() + 1);
                    assert_eq!(c.phi(&f, i).unwrap(), phi - 1);
                    let back = c.crystal_step(&f, i, CrystalOp::E).unwrap().unwrap();
                    assert_eq!(back.datum, l.datum);
                }
            }
        }
    }

    #[test]
    fn saito_reflection_examples() {
        let c = ctx("A2", 4);
        let unit = c.unit_label().unwrap();
        // unit -> unit
        let r = c.saito_reflect(&unit, 0, SaitoDir::Inverse).unwrap();
        assert_eq!(r.datum, unit.datum);
        // weight law and round trip on applicable labels
        for mu in weights_up_to_height(c.datum(), 3) {
            let slice = c.slice(&mu).unwrap();
            for l in &slice.labels {
                for i in 0..2u8 {
                    if c.eps(l, i).unwrap() == 0 {
                        let img = c.saito_reflect(l, i, SaitoDir::Inverse).unwrap();
                        assert_eq!(
                            img.weight,
                            c.datum().simple_reflection(i as usize, &l.weight),
                            "weight law"
                        );
                        assert_eq!(c.eps_star(&img, i).unwrap(), 0);
                        let back = c.saito_reflect(&img, i, SaitoDir::Forward).unwrap();
                        assert_eq!(back.datum, l.datum, "Lambda . Lambda^-1 = id");
                    }
                }
            }
        }
        // A2: Lambda_1^{-1} of datum (0,1,0) has weight s_1(-a1-a2) = -a2
        let mid = c.label(&ExponentTuple(vec![0, 1, 0])).unwrap();
        assert_eq!(c.eps(&mid, 0).unwrap(), 0);
        let img = c.saito_reflect(&mid, 0, SaitoDir::Inverse).unwrap();
        assert_eq!(img.weight, Weight(vec![0, -1]));
    }

    #[test]
    fn kashiwara_embedding_properties() {
        let c = ctx("A2", 4);
        for mu in weights_up_to_height(c.datum(), 3) {
            let slice = c.slice(&mu).unwrap();
            for l in &slice.labels {
                for i in 0..2u8 {
                    let (body, m) = c.kashiwara_embed(l, i).unwrap();
                    assert_eq!(m, -i64::from(c.eps_star(l, i).unwrap()));
                    assert_eq!(c.eps_star(&body, i).unwrap(), 0);
                    if c.eps_star(l, i).unwrap() == 0 {
                        assert_eq!(body.datum, l.datum);
                    }
                    // Psi_i(f*_i b) = (body, m - 1)
                    let fs = c.crystal_step(l, i, CrystalOp::FStar).unwrap().unwrap();
                    let (body2, m2) = c.kashiwara_embed(&fs, i).unwrap();
                    assert_eq!(body2.datum, body.datum);
                    assert_eq!(m2, m - 1);
                    // commutation with f_j through the tensor rules
                    for j in 0..2u8 {
                        let direct = c.crystal_step(l, j, CrystalOp::F).unwrap().unwrap();
                        let (db, dm) = c.kashiwara_embed(&direct, i).unwrap();
                        let via = c
                            .tensor_step(&(body.clone(), m), i, j, CrystalOp::F)
                            .unwrap()
                            .unwrap();
                        assert_eq!((via.0.datum.clone(), via.1), (db.datum, dm));
                    }
                }
            }
        }
    }
}
