//! Finite-type Cartan data: simple roots, the symmetrized bilinear form, the
//! Weyl group, reduced words of the longest element, and the positive-root
//! sequence attached to a reduced word.
//!
//! Numbering convention: in types B and C the first simple root carries the
//! distinguished length (B: short first, C: long first), in G2 the first
//! simple root is short, and types A/D/E/F follow the usual linear/forked
//! Bourbaki diagrams. Indices are 0-based internally and 1-based in all
//! textual interfaces.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default cap on the rank; raisable via [`RootDatum::with_rank_limit`].
pub const DEFAULT_RANK_LIMIT: usize = 4;

/// Hard cap on the number of positive roots for Weyl-group enumeration.
pub const MAX_POSITIVE_ROOTS: usize = 36;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n)
            | CartanType::E(n) => n,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::E(n) => write!(f, "E{n}"),
            CartanType::F4 => write!(f, "F4"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<CartanType> {
        let s = s.trim();
        let (letter, num) = s.split_at(1);
        let n: usize = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad Cartan type {s:?}")))?;
        let ty = match (letter, n) {
            ("A" | "a", n) if n >= 1 => CartanType::A(n),
            ("B" | "b", n) if n >= 2 => CartanType::B(n),
            ("C" | "c", n) if n >= 2 => CartanType::C(n),
            ("D" | "d", n) if n >= 4 => CartanType::D(n),
            ("E" | "e", 6..=8) => CartanType::E(n),
            ("F" | "f", 4) => CartanType::F4,
            ("G" | "g", 2) => CartanType::G2,
            _ => return Err(Error::Parse(format!("unsupported Cartan type {s:?}"))),
        };
        Ok(ty)
    }
}

/// An element of the root lattice Q in simple-root coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Weight {
        Weight(vec![0; rank])
    }

    pub fn simple_root(rank: usize, i: usize) -> Weight {
        let mut v = vec![0; rank];
        v[i] = 1;
        Weight(v)
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// All coordinates `>= 0` (membership in Q_+).
    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// All coordinates `<= 0` (membership in Q_-).
    pub fn is_nonpos(&self) -> bool {
        self.0.iter().all(|&x| x <= 0)
    }

    pub fn add(&self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scaled(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Weight {
    /// Coordinates in the simple-root basis, e.g. `(1,2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A word in the simple reflections, 0-based letters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord(pub Vec<u8>);

impl ReducedWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Parses a 1-based comma-separated list such as `1,2,1`.
    pub fn parse(s: &str, rank: usize) -> Result<ReducedWord> {
        let mut letters = Vec::new();
        for part in s.split(',') {
            let k: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad word entry {part:?}")))?;
            if k == 0 || k > rank {
                return Err(Error::Parse(format!(
                    "word letter {k} out of range 1..={rank}"
                )));
            }
            letters.push((k - 1) as u8);
        }
        Ok(ReducedWord(letters))
    }
}

impl fmt::Display for ReducedWord {
    /// 1-based comma-separated rendering, e.g. `1,2,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// How many reduced words to enumerate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WordLimit {
    All,
    First(usize),
}

/// A Weyl group element as its action matrix on the root lattice
/// (row-major, simple-root coordinates).
type Action = Vec<i64>;

/// Finite-type Cartan datum.
pub struct RootDatum {
    ty: CartanType,
    rank: usize,
    /// `cartan[i][j] = <alpha_i^vee, alpha_j>`.
    cartan: Vec<Vec<i64>>,
    /// `d[i] = (alpha_i, alpha_i)/2`, with short roots normalized to 1.
    d: Vec<i64>,
    /// Lazily built Weyl-group table: action matrix -> length.
    weyl: std::sync::OnceLock<WeylTable>,
}

struct WeylTable {
    lengths: HashMap<Action, usize>,
    w0: Action,
    longest_length: usize,
}

impl RootDatum {
    pub fn new(ty: CartanType) -> Result<RootDatum> {
        Self::with_rank_limit(ty, DEFAULT_RANK_LIMIT)
    }

    /// Constructs the datum with an explicit rank cap (the default cap keeps
    /// the desk-scale guarantee; raising it is the caller's responsibility).
    pub fn with_rank_limit(ty: CartanType, rank_limit: usize) -> Result<RootDatum> {
        let rank = ty.rank();
        if rank > rank_limit {
            return Err(Error::capacity(format!(
                "type {ty} has rank {rank} > limit {rank_limit}"
            )));
        }
        let (cartan, d) = cartan_data(ty)?;
        for i in 0..rank {
            debug_assert_eq!(cartan[i][i], 2);
            for j in 0..rank {
                if i != j {
                    debug_assert!(cartan[i][j] <= 0);
                }
                debug_assert_eq!(d[i] * cartan[i][j], d[j] * cartan[j][i]);
            }
        }
        Ok(RootDatum {
            ty,
            rank,
            cartan,
            d,
            weyl: std::sync::OnceLock::new(),
        })
    }

    pub fn cartan_type(&self) -> CartanType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `<alpha_i^vee, alpha_j>`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    /// `(alpha_i, alpha_i)/2`.
    pub fn d(&self, i: usize) -> i64 {
        self.d[i]
    }

    /// `<mu, alpha_i^vee>`.
    pub fn pairing(&self, mu: &Weight, i: usize) -> i64 {
        mu.0.iter()
            .enumerate()
            .map(|(j, m)| m * self.cartan[i][j])
            .sum()
    }

    /// The symmetric form `(mu, nu)`.
    pub fn form(&self, mu: &Weight, nu: &Weight) -> i64 {
        let mut acc = 0;
        for (i, m) in mu.0.iter().enumerate() {
            if *m == 0 {
                continue;
            }
            for (j, n) in nu.0.iter().enumerate() {
                acc += m * n * self.d[i] * self.cartan[i][j];
            }
        }
        acc
    }

    /// `(mu, alpha_i)`.
    pub fn form_simple(&self, mu: &Weight, i: usize) -> i64 {
        mu.0.iter()
            .enumerate()
            .map(|(j, m)| m * self.d[j] * self.cartan[j][i])
            .sum()
    }

    /// `s_i(mu) = mu - <mu, alpha_i^vee> alpha_i`.
    pub fn simple_reflection(&self, i: usize, mu: &Weight) -> Weight {
        let k = self.pairing(mu, i);
        let mut v = mu.0.clone();
        v[i] -= k;
        Weight(v)
    }

    /// The positive roots, generated by the reflection orbit of the simple
    /// roots, in a deterministic order.
    pub fn positive_roots(&self) -> Vec<Weight> {
        let mut seen = std::collections::BTreeSet::new();
        let mut queue: Vec<Weight> = (0..self.rank)
            .map(|i| Weight::simple_root(self.rank, i))
            .collect();
        while let Some(beta) = queue.pop() {
            if !seen.insert(beta.clone()) {
                continue;
            }
            for i in 0..self.rank {
                let img = self.simple_reflection(i, &beta);
                if img.is_nonneg() && !seen.contains(&img) {
                    queue.push(img);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots().len()
    }

    fn identity_action(&self) -> Action {
        let n = self.rank;
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        m
    }

    /// Left-multiplies the action matrix by `s_i`.
    fn reflect_action(&self, i: usize, m: &Action) -> Action {
        let n = self.rank;
        let mut out = m.clone();
        // s_i changes only coordinate i of the image vectors:
        // (s_i v)_i = -v_i - sum_{j != i} c_ij v_j.
        for col in 0..n {
            let mut acc = 0;
            for j in 0..n {
                acc += self.cartan[i][j] * m[j * n + col];
            }
            out[i * n + col] = m[i * n + col] - acc;
        }
        out
    }

    fn apply_action(&self, m: &Action, mu: &Weight) -> Weight {
        let n = self.rank;
        let mut v = vec![0; n];
        for (row, item) in v.iter_mut().enumerate() {
            let mut acc = 0;
            for col in 0..n {
                acc += m[row * n + col] * mu.0[col];
            }
            *item = acc;
        }
        Weight(v)
    }

    fn weyl_table(&self) -> Result<&WeylTable> {
        let n_pos = self.num_positive_roots();
        if n_pos > MAX_POSITIVE_ROOTS {
            return Err(Error::capacity(format!(
                "type {} has {} positive roots > {}",
                self.ty, n_pos, MAX_POSITIVE_ROOTS
            )));
        }
        Ok(self.weyl.get_or_init(|| {
            let mut lengths = HashMap::new();
            let id = self.identity_action();
            lengths.insert(id.clone(), 0usize);
            let mut frontier = vec![id];
            let mut len = 0usize;
            let mut last = self.identity_action();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for w in &frontier {
                    for i in 0..self.rank {
                        let img = self.reflect_action(i, w);
                        if !lengths.contains_key(&img) {
                            lengths.insert(img.clone(), len + 1);
                            last = img.clone();
                            next.push(img);
                        }
                    }
                }
                if !next.is_empty() {
                    len += 1;
                }
                frontier = next;
            }
            WeylTable {
                lengths,
                w0: last,
                longest_length: len,
            }
        }))
    }

    /// Length of the longest element (= number of positive roots).
    pub fn longest_length(&self) -> Result<usize> {
        Ok(self.weyl_table()?.longest_length)
    }

    /// Reduced words of the longest element, lexicographically ascending.
    pub fn longest_element_words(&self, limit: WordLimit) -> Result<Vec<ReducedWord>> {
        let table = self.weyl_table()?;
        let cap = match limit {
            WordLimit::All => usize::MAX,
            WordLimit::First(k) => k,
        };
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.descend(table, &table.w0, &mut prefix, cap, &mut out);
        Ok(out)
    }

    fn descend(
        &self,
        table: &WeylTable,
        w: &Action,
        prefix: &mut Vec<u8>,
        cap: usize,
        out: &mut Vec<ReducedWord>,
    ) {
        if out.len() >= cap {
            return;
        }
        let len = table.lengths[w];
        if len == 0 {
            out.push(ReducedWord(prefix.clone()));
            return;
        }
        for i in 0..self.rank {
            let img = self.reflect_action(i, w);
            if table.lengths[&img] < len {
                prefix.push(i as u8);
                self.descend(table, &img, prefix, cap, out);
                prefix.pop();
                if out.len() >= cap {
                    return;
                }
            }
        }
    }

    /// The lexicographically smallest reduced word of the longest element;
    /// used everywhere as the deterministic reference word.
    pub fn reference_word(&self) -> Result<ReducedWord> {
        Ok(self
            .longest_element_words(WordLimit::First(1))?
            .into_iter()
            .next()
            .expect("longest element exists"))
    }

    /// `beta^k = s_{i_1} ... s_{i_{k-1}}(alpha_{i_k})`; errors when the word
    /// is not reduced.
    pub fn positive_roots_of(&self, word: &ReducedWord) -> Result<Vec<Weight>> {
        let mut roots = Vec::with_capacity(word.len());
        let mut action = self.identity_action();
        for (k, &i) in word.letters().iter().enumerate() {
            let beta = self.apply_action(&action, &Weight::simple_root(self.rank, i as usize));
            if !beta.is_nonneg() || beta.is_zero() {
                return Err(Error::domain(format!(
                    "word {word} is not reduced (letter {} at position {})",
                    i + 1,
                    k + 1
                )));
            }
            roots.push(beta);
            // append s_i on the right: action := action * s_i
            action = self.right_multiply(&action, i as usize);
        }
        Ok(roots)
    }

    /// `word` spells the longest element and is reduced.
    pub fn check_longest_word(&self, word: &ReducedWord) -> Result<Vec<Weight>> {
        let n = self.longest_length()?;
        if word.len() != n {
            return Err(Error::domain(format!(
                "word {word} has length {} but l(w0) = {n}",
                word.len()
            )));
        }
        self.positive_roots_of(word)
    }

    /// action * s_i (matrix product, s_i acting first).
    fn right_multiply(&self, m: &Action, i: usize) -> Action {
        let n = self.rank;
        // column j of s_i is e_j for j != i and e_i - sum_j c_ij e_j ... the
        // cleanest route is to apply m to the images of the basis under s_i.
        let mut out = vec![0; n * n];
        for j in 0..n {
            let img = self.simple_reflection(i, &Weight::simple_root(n, j));
            let v = self.apply_action(m, &img);
            for row in 0..n {
                out[row * n + j] = v.0[row];
            }
        }
        out
    }
}

fn cartan_data(ty: CartanType) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    let n = ty.rank();
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let chain = |c: &mut Vec<Vec<i64>>, edges: &[(usize, usize)]| {
        for &(i, j) in edges {
            c[i][j] = -1;
            c[j][i] = -1;
        }
    };
    let d;
    match ty {
        CartanType::A(_) => {
            chain(&mut c, &linear_edges(n));
            d = vec![1; n];
        }
        CartanType::B(_) => {
            // first simple root short: (a_1, a_1) = 2, the rest long
            chain(&mut c, &linear_edges(n));
            c[0][1] = -2;
            c[1][0] = -1;
            let mut dd = vec![2; n];
            dd[0] = 1;
            d = dd;
        }
        CartanType::C(_) => {
            // first simple root long, the rest short
            chain(&mut c, &linear_edges(n));
            c[0][1] = -1;
            c[1][0] = -2;
            let mut dd = vec![1; n];
            dd[0] = 2;
            d = dd;
        }
        CartanType::D(_) => {
            // fork at node 2 (0-based 1): edges 1-2, 2-3, 2-4, then a chain
            let mut edges = vec![(0, 1), (1, 2), (1, 3)];
            for k in 3..n.saturating_sub(1) {
                edges.push((k, k + 1));
            }
            chain(&mut c, &edges);
            d = vec![1; n];
        }
        CartanType::E(_) => {
            // Bourbaki: chain 1-3-4-5-..., node 2 attached to node 4
            let mut edges = vec![(0, 2), (2, 3), (1, 3)];
            for k in 3..n - 1 {
                edges.push((k, k + 1));
            }
            chain(&mut c, &edges);
            d = vec![1; n];
        }
        CartanType::F4 => {
            chain(&mut c, &[(0, 1), (2, 3)]);
            c[1][2] = -1;
            c[2][1] = -2;
            d = vec![2, 2, 1, 1];
        }
        CartanType::G2 => {
            // first simple root short
            c[0][1] = -3;
            c[1][0] = -1;
            d = vec![1, 3];
        }
    }
    Ok((c, d))
}

fn linear_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
}
