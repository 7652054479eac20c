//! Numeration in a Pisot base `β` with digits `{0, …, d−1}`.
//!
//! Carries `q' = βq − ω + ε` live in `Q(β)` and are closed under a window;
//! the closure is the state set of the normalization transducer. The same
//! states index the matrices of the Bernoulli convolution `η_{β,p}`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{Field, FieldElement};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{is_probability_vector, Q};
use crate::sofic::LinearRepresentation;
use crate::words::{check_letters, format_word, Word};

pub const DEFAULT_STATE_CAP: usize = 10_000;
pub const EXPANSION_CAP: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Window {
    /// `(−1, α]`
    HalfOpenRightClosed,
    /// `(−1, α)`
    Open,
    /// `(−α, α)`
    Symmetric,
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "half-open" | "half-open-right-closed" => Ok(Window::HalfOpenRightClosed),
            "open" => Ok(Window::Open),
            "symmetric" => Ok(Window::Symmetric),
            _ => Err(Error::Parse(format!(
                "unknown window {s:?} (half-open, open, symmetric)"
            ))),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::HalfOpenRightClosed => "HALF_OPEN_RIGHT_CLOSED",
            Window::Open => "OPEN",
            Window::Symmetric => "SYMMETRIC",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PisotBase {
    field: Field,
    beta: FieldElement,
    ceil_beta: usize,
    d: usize,
    alpha: FieldElement,
    state_cap: usize,
}

impl PisotBase {
    pub fn new(field: &Field, d: usize) -> Result<Self> {
        let beta = field.beta();
        let ceil_beta = beta
            .ceil()
            .to_usize()
            .ok_or_else(|| Error::InvalidInput("β is too large".into()))?;
        if d < ceil_beta {
            return Err(Error::InvalidInput(format!(
                "need d ≥ ⌈β⌉ = {ceil_beta}, got d = {d}"
            )));
        }
        let alpha = beta
            .add_int(-1)
            .inverse()?
            .scale(&Q::from_integer((d as i64 - 1).into()));
        Ok(PisotBase {
            field: field.clone(),
            beta,
            ceil_beta,
            d,
            alpha,
            state_cap: DEFAULT_STATE_CAP,
        })
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    pub fn ceil_beta(&self) -> usize {
        self.ceil_beta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(d−1)/(β−1)`, the right end of the support of `η`.
    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn state_cap(&self) -> usize {
        self.state_cap
    }

    pub fn contains(&self, window: Window, q: &FieldElement) -> bool {
        let minus_one = FieldElement::from_int(&self.field, -1);
        let above = |lo: &FieldElement| q.compare(lo).unwrap() == Ordering::Greater;
        let below_alpha = q.compare(&self.alpha).unwrap();
        match window {
            Window::HalfOpenRightClosed => above(&minus_one) && below_alpha != Ordering::Greater,
            Window::Open => above(&minus_one) && below_alpha == Ordering::Less,
            Window::Symmetric => above(&-&self.alpha) && below_alpha == Ordering::Less,
        }
    }

    /// Output digits allowed on transducer edges. The symmetric window counts
    /// redundant representations, so there both sides range over all `d` digits.
    fn output_digits(&self, window: Window) -> usize {
        match window {
            Window::Symmetric => self.d,
            _ => self.ceil_beta,
        }
    }

    /// `Σ wᵢ β^{k−i}` for a word `w₁…w_k`.
    pub fn value_of(&self, word: &[usize]) -> FieldElement {
        word.iter()
            .fold(FieldElement::zero(&self.field), |acc, &w| {
                (&acc * &self.beta).add_int(w as i64)
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub omega: usize,
    pub epsilon: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct Transducer {
    window: Window,
    states: Vec<FieldElement>,
    edges: Vec<Edge>,
    index: HashMap<FieldElement, usize>,
}

impl Transducer {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn states(&self) -> &[FieldElement] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn state_index(&self, q: &FieldElement) -> Option<usize> {
        self.index.get(q).copied()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph transducer {\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == 0 { "doublecircle" } else { "circle" };
            out.push_str(&format!("  s{i} [label=\"{s}\", shape={shape}];\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  s{} -> s{} [label=\"{}/{}\"];\n",
                e.from, e.to, e.omega, e.epsilon
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> TransducerJson {
        TransducerJson {
            window: self.window,
            states: self.states.iter().map(|s| s.to_string()).collect(),
            coordinates: self
                .states
                .iter()
                .map(|s| s.coeffs().iter().map(ToString::to_string).collect())
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        self.states[e.from].to_string(),
                        format!("{}/{}", e.omega, e.epsilon),
                        self.states[e.to].to_string(),
                    )
                })
                .collect(),
            initial: vec![self.states[0].to_string()],
        }
    }
}

/// Graph JSON (as for automata) plus exact coordinates of every carry in the
/// basis `1, β, β², …`.
#[derive(Debug, Clone, Serialize)]
pub struct TransducerJson {
    pub window: Window,
    pub states: Vec<String>,
    pub coordinates: Vec<Vec<String>>,
    pub edges: Vec<(String, String, String)>,
    pub initial: Vec<String>,
}

/// Breadth-first closure of `{0}` under `q ↦ βq − ω + ε` inside the window,
/// with all edges between the discovered states.
pub fn build_transducer(base: &PisotBase, window: Window) -> Result<Transducer> {
    let zero = FieldElement::zero(&base.field);
    let mut states = vec![zero.clone()];
    let mut index = HashMap::from([(zero, 0)]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(from) = queue.pop_front() {
        let scaled = &states[from] * &base.beta;
        for omega in 0..base.d {
            for epsilon in 0..base.output_digits(window) {
                let next = scaled.add_int(epsilon as i64 - omega as i64);
                if !base.contains(window, &next) {
                    continue;
                }
                let to = match index.get(&next) {
                    Some(&i) => i,
                    None => {
                        if states.len() == base.state_cap {
                            return Err(Error::StateCapExceeded {
                                cap: base.state_cap,
                            });
                        }
                        let i = states.len();
                        index.insert(next.clone(), i);
                        states.push(next);
                        queue.push_back(i);
                        i
                    }
                };
                edges.push(Edge {
                    from,
                    omega,
                    epsilon,
                    to,
                });
            }
        }
    }
    Ok(Transducer {
        window,
        states,
        edges,
        index,
    })
}

pub fn carry_states(base: &PisotBase, window: Window) -> Result<Vec<FieldElement>> {
    Ok(build_transducer(base, window)?.states)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiExpansion {
    pub digits: Word,
    #[serde(rename = "T")]
    pub period: usize,
}

impl QuasiExpansion {
    /// The `i`-th digit (from 0) of the periodic word `(α₁…α_T)^∞`.
    pub fn digit(&self, i: usize) -> usize {
        self.digits[i % self.period]
    }
}

/// Purely periodic quasi-expansion of 1, derived from a finite greedy expansion.
pub fn quasi_expansion(base: &PisotBase) -> Result<QuasiExpansion> {
    let mut digits = Vec::new();
    let mut remainder = FieldElement::one(&base.field);
    let mut seen = HashSet::new();
    while digits.len() < EXPANSION_CAP {
        let x = &remainder * &base.beta;
        let t = x.floor();
        remainder = x.add_int(-t.to_i64().expect("digit fits"));
        digits.push(t.to_usize().expect("digit is nonnegative"));
        if remainder.is_zero() {
            *digits.last_mut().unwrap() -= 1;
            let period = digits.len();
            return Ok(QuasiExpansion { digits, period });
        }
        if !seen.insert(remainder.clone()) {
            return Err(Error::NotFiniteRenyi);
        }
    }
    Err(Error::NotFiniteRenyi)
}

/// The prefix-free set `{α₁…α_{i−1}α' : α' < αᵢ} ∪ {α₁…α_T}`, shortest first.
pub fn word_set(quasi: &QuasiExpansion) -> Vec<Word> {
    let mut words = Vec::new();
    for i in 0..quasi.period {
        for a in 0..quasi.digits[i] {
            let mut w = quasi.digits[..i].to_vec();
            w.push(a);
            words.push(w);
        }
    }
    words.push(quasi.digits.clone());
    words
}

/// Every suffix, padded with zeros, is below `(α₁…α_T)^∞`.
pub fn is_admissible(word: &[usize], quasi: &QuasiExpansion) -> bool {
    (0..word.len()).all(|start| {
        let suffix = &word[start..];
        for (i, &w) in suffix.iter().enumerate() {
            match w.cmp(&quasi.digit(i)) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        true
    })
}

/// Splits a word into blocks of the prefix-free set `W`; returns block indices.
pub fn parse_w(word: &[usize], w_set: &[Word]) -> Result<Vec<usize>> {
    let mut blocks = Vec::new();
    let mut rest = word;
    while !rest.is_empty() {
        let (i, w) = w_set
            .iter()
            .enumerate()
            .find(|(_, w)| rest.starts_with(w))
            .ok_or_else(|| Error::NotParseable(format_word(word)))?;
        blocks.push(i);
        rest = &rest[w.len()..];
    }
    Ok(blocks)
}

/// Counting matrices of the symmetric-window transducer: `N_ℓ[i][j] = 1` iff
/// `β𝔦ᵢ − 𝔦ⱼ + ℓ ∈ {0, …, d−1}`.
#[derive(Debug, Clone)]
pub struct RedundancyCounter {
    transducer: Transducer,
    /// `successors[ℓ][i]` lists the `j` with `N_ℓ[i][j] = 1`.
    successors: Vec<Vec<Vec<usize>>>,
}

impl RedundancyCounter {
    pub fn new(base: &PisotBase) -> Result<Self> {
        let transducer = build_transducer(base, Window::Symmetric)?;
        let n = transducer.states.len();
        let mut successors = vec![vec![Vec::new(); n]; base.d];
        for e in &transducer.edges {
            successors[e.epsilon][e.from].push(e.to);
        }
        Ok(RedundancyCounter {
            transducer,
            successors,
        })
    }

    pub fn transducer(&self) -> &Transducer {
        &self.transducer
    }

    pub fn matrix(&self, letter: usize) -> Vec<Vec<u8>> {
        let n = self.transducer.states.len();
        let mut m = vec![vec![0; n]; n];
        for (i, succ) in self.successors[letter].iter().enumerate() {
            for &j in succ {
                m[i][j] = 1;
            }
        }
        m
    }

    /// `(1 0 … 0) N_{ε₁} … N_{ε_k} (1 0 … 0)ᵗ`.
    pub fn count(&self, word: &[usize]) -> Result<BigUint> {
        check_letters(word, self.successors.len())?;
        let mut row = vec![BigUint::zero(); self.transducer.states.len()];
        row[0] = BigUint::one();
        for &l in word {
            let mut next = vec![BigUint::zero(); row.len()];
            for (i, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                for &j in &self.successors[l][i] {
                    next[j] += v;
                }
            }
            row = next;
        }
        Ok(row.swap_remove(0))
    }
}

/// Number of digit words `ω` over `{0..d−1}` of the same length with the same value.
pub fn count_redundant(base: &PisotBase, word: &[usize]) -> Result<BigUint> {
    RedundancyCounter::new(base)?.count(word)
}

/// Admissible form of `Σ ωᵢ β^{−i}`: the value equals `Σ εᵢ β^{h'−i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub integer_digits: usize,
    pub digits: Word,
}

pub fn normalize_pisot(base: &PisotBase, omega: &[usize]) -> Result<NormalForm> {
    check_letters(omega, base.d)?;
    let quasi = quasi_expansion(base)?;
    let h = omega.len();
    let value = fractional_value(base, omega);
    let one = FieldElement::one(&base.field);
    let mut shift = 0;
    let mut power = one.clone();
    while value.compare(&power)? != Ordering::Less {
        power = &power * &base.beta;
        shift += 1;
    }
    // y = value / β^shift lies in [0, 1).
    let mut remainder = value.checked_div(&power)?;
    let mut digits = Vec::new();
    let mut seen = HashSet::new();
    while !remainder.is_zero() {
        if digits.len() >= EXPANSION_CAP + h || !seen.insert(remainder.clone()) {
            return Err(Error::NonTerminatingExpansion(digits.len()));
        }
        let x = &remainder * &base.beta;
        let t = x.floor();
        remainder = x.add_int(-t.to_i64().expect("digit fits"));
        digits.push(t.to_usize().expect("digit is nonnegative"));
    }
    digits.resize(digits.len().max(shift + h), 0);
    debug_assert!(is_admissible(&digits, &quasi));
    let form = NormalForm {
        integer_digits: shift,
        digits,
    };
    normalization_carries(base, omega, &form)?;
    Ok(form)
}

/// `Σ ωᵢ β^{−i}`.
fn fractional_value(base: &PisotBase, omega: &[usize]) -> FieldElement {
    let inv = base.beta.inverse().expect("β ≠ 0");
    omega
        .iter()
        .rev()
        .fold(FieldElement::zero(&base.field), |acc, &w| {
            &acc.add_int(w as i64) * &inv
        })
}

/// Carries of the path in the transducer `(−1, α]` reading `0^{h'}ω` and
/// writing the normal form; each lies in the window and the last is 0.
pub fn normalization_carries(
    base: &PisotBase,
    omega: &[usize],
    form: &NormalForm,
) -> Result<Vec<FieldElement>> {
    let len = form.digits.len().max(form.integer_digits + omega.len());
    let input: Vec<usize> = (0..len)
        .map(|i| {
            i.checked_sub(form.integer_digits)
                .and_then(|j| omega.get(j).copied())
                .unwrap_or(0)
        })
        .collect();
    let output: Vec<usize> = (0..len)
        .map(|i| form.digits.get(i).copied().unwrap_or(0))
        .collect();
    let mut carry = FieldElement::zero(&base.field);
    let mut carries = vec![carry.clone()];
    for (w, e) in input.iter().zip(&output) {
        carry = (&carry * &base.beta).add_int(*e as i64 - *w as i64);
        if !base.contains(Window::HalfOpenRightClosed, &carry) {
            return Err(Error::InvalidInput(format!(
                "carry {carry} leaves the window"
            )));
        }
        carries.push(carry.clone());
    }
    if !carry.is_zero() {
        return Err(Error::InvalidInput("normal form changes the value".into()));
    }
    Ok(carries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scale {
    /// `Σ C_q = 1` over the integer states `q ∈ {0, …, ⌈α⌉−1}`, so `C_q = η([q, q+1))`.
    Absolute,
    /// Some integer below `α` is not a state; `C` is normalized to total 1 instead.
    UpToScale,
}

/// Matrices `M_ℓ` of `η_{β,p}` on the open-window carries, with the eigenvector `C`
/// of `Σ_{w∈W} M_w`.
#[derive(Debug, Clone)]
pub struct PisotMeasure {
    base: PisotBase,
    p: Vec<Q>,
    states: Vec<FieldElement>,
    matrices: Vec<QMatrix>,
    w_set: Vec<Word>,
    w_matrices: Vec<QMatrix>,
    c: Vec<Q>,
    scale: Scale,
}

impl PisotMeasure {
    pub fn new(base: &PisotBase, p: Vec<Q>) -> Result<Self> {
        if p.len() != base.d || !is_probability_vector(&p) {
            return Err(Error::InvalidInput(format!(
                "p must be a probability vector of length {}",
                base.d
            )));
        }
        let quasi = quasi_expansion(base)?;
        let w_set = word_set(&quasi);
        let states = carry_states(base, Window::Open)?;
        let matrices = measure_matrices_on(base, &p, &states);
        let w_matrices: Vec<QMatrix> = w_set
            .iter()
            .map(|w| product(&matrices, w, states.len()))
            .collect();
        let total = QMatrix::sum(&w_matrices, states.len());
        let kernel = total.sub(&QMatrix::identity(states.len())).kernel();
        if kernel.len() != 1 {
            return Err(Error::KernelDimension(kernel.len()));
        }
        let mut c = kernel.into_iter().next().unwrap();
        if c.iter().any(Signed::is_negative) {
            c.iter_mut().for_each(|x| *x = -x.clone());
        }
        if c.iter().any(|x| !x.is_positive()) {
            return Err(Error::NonPositiveEigenvector);
        }
        let ceil_alpha = base.alpha.ceil().to_i64().expect("α fits");
        let integer_states: Option<Vec<usize>> = (0..ceil_alpha)
            .map(|q| {
                states
                    .iter()
                    .position(|s| s.as_integer() == Some(BigInt::from(q)))
            })
            .collect();
        let (norm, scale) = match integer_states {
            Some(idx) => (
                idx.iter().map(|&i| c[i].clone()).sum::<Q>(),
                Scale::Absolute,
            ),
            None => (c.iter().sum::<Q>(), Scale::UpToScale),
        };
        c.iter_mut().for_each(|x| *x /= &norm);
        Ok(PisotMeasure {
            base: base.clone(),
            p,
            states,
            matrices,
            w_set,
            w_matrices,
            c,
            scale,
        })
    }

    pub fn base(&self) -> &PisotBase {
        &self.base
    }

    pub fn p(&self) -> &[Q] {
        &self.p
    }

    pub fn states(&self) -> &[FieldElement] {
        &self.states
    }

    /// `M₀, …, M_{⌈β⌉−1}`.
    pub fn matrices(&self) -> &[QMatrix] {
        &self.matrices
    }

    pub fn w_set(&self) -> &[Word] {
        &self.w_set
    }

    /// `M_w` for `w ∈ W`, in the order of [`PisotMeasure::w_set`].
    pub fn w_matrices(&self) -> &[QMatrix] {
        &self.w_matrices
    }

    pub fn c(&self) -> &[Q] {
        &self.c
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// `η(𝔧ᵢ + I_w) = Eᵢ M_w C` for a concatenation `w` of blocks of `W`.
    /// Meaningful as an absolute value only when the scale is [`Scale::Absolute`].
    pub fn interval_measure(&self, state: usize, word: &[usize]) -> Result<Q> {
        if state >= self.states.len() {
            return Err(Error::InvalidInput(format!(
                "state {state} outside 0..{}",
                self.states.len()
            )));
        }
        check_letters(word, self.base.ceil_beta)?;
        parse_w(word, &self.w_set)?;
        let mut col = self.c.clone();
        for &l in word.iter().rev() {
            col = self.matrices[l].mul_col(&col);
        }
        Ok(col[state].clone())
    }

    /// `ηᵢ[w] = η(𝔧ᵢ + I_w) / η(𝔧ᵢ + [0,1))`, independent of the scale of `C`.
    pub fn normalized_interval_measure(&self, state: usize, word: &[usize]) -> Result<Q> {
        Ok(self.interval_measure(state, word)? / &self.c[state])
    }

    /// `ηᵢ` as a linear representation over the alphabet `W` (letter `k` is `w_set()[k]`).
    pub fn linear_representation(&self, state: usize) -> Result<LinearRepresentation> {
        if state >= self.states.len() {
            return Err(Error::InvalidInput(format!("no state {state}")));
        }
        let r = self
            .w_matrices
            .iter()
            .map(|m| m.row(state).iter().map(|x| x / &self.c[state]).collect())
            .collect();
        LinearRepresentation::new(r, self.w_matrices.clone(), self.c.clone())
    }

    /// Block matrix whose rows all repeat `(M_{w₁} … M_{w_m})` over `w ∈ W`.
    pub fn w_block_matrix(&self) -> QMatrix {
        let n = self.states.len();
        let m = self.w_matrices.len();
        let mut out = QMatrix::zeros(n * m, n * m);
        for block_row in 0..m {
            for (k, mw) in self.w_matrices.iter().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        out[(block_row * n + i, k * n + j)] = mw[(i, j)].clone();
                    }
                }
            }
        }
        out
    }
}

/// `m^ℓ_{ij} = p_ω` when `ω = β𝔧ᵢ − 𝔧ⱼ + ℓ ∈ {0, …, d−1}`, else 0.
pub fn measure_matrices_on(base: &PisotBase, p: &[Q], states: &[FieldElement]) -> Vec<QMatrix> {
    let n = states.len();
    (0..base.ceil_beta)
        .map(|l| {
            let mut m = QMatrix::zeros(n, n);
            for (i, si) in states.iter().enumerate() {
                let scaled = (si * &base.beta).add_int(l as i64);
                for (j, sj) in states.iter().enumerate() {
                    let omega = (&scaled - sj).as_integer().and_then(|w| w.to_usize());
                    if let Some(w) = omega.filter(|&w| w < base.d) {
                        m[(i, j)] = p[w].clone();
                    }
                }
            }
            m
        })
        .collect()
}

fn product(matrices: &[QMatrix], word: &[usize], n: usize) -> QMatrix {
    word.iter()
        .fold(QMatrix::identity(n), |acc, &l| acc.mul(&matrices[l]))
}
