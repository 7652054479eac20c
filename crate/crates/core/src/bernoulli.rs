//! Bernoulli convolutions in an integer base `b` with `d ≥ b` digits.
//!
//! `η_{b,p}` is the law of `Σ ω_k b^{−k}` for i.i.d. digits `ω_k ∈ {0, …, d−1}`
//! of law `p`. Its values on translated `b`-adic intervals are products of the
//! `(a+1)×(a+1)` matrices `M_j = (p_{j+bq−q'})`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{is_probability_vector, Q};
use crate::sofic::{LetterMap, LinearRepresentation, MarkovMeasure};
use crate::words::check_letters;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliSpec {
    b: usize,
    d: usize,
    p: Vec<Q>,
}

impl BernoulliSpec {
    pub fn new(b: usize, d: usize, p: Vec<Q>) -> Result<Self> {
        if b < 2 || d < b {
            return Err(Error::InvalidInput(format!(
                "need d ≥ b ≥ 2, got b={b}, d={d}"
            )));
        }
        if p.len() != d || !is_probability_vector(&p) || p.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "p must be a positive probability vector of length {d}"
            )));
        }
        Ok(BernoulliSpec { b, d, p })
    }

    pub fn uniform(b: usize, d: usize) -> Result<Self> {
        Self::new(b, d, vec![Q::new(BigInt::one(), BigInt::from(d)); d])
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> &[Q] {
        &self.p
    }

    /// `⌈(d−1)/(b−1)⌉ − 1`; the matrices are `(a+1)×(a+1)`.
    pub fn a(&self) -> usize {
        (self.d - 1).div_ceil(self.b - 1) - 1
    }

    pub fn size(&self) -> usize {
        self.a() + 1
    }

    pub fn is_uniform(&self) -> bool {
        self.p.iter().all(|x| *x == self.p[0])
    }

    fn digit_prob(&self, index: isize) -> Q {
        if (0..self.d as isize).contains(&index) {
            self.p[index as usize].clone()
        } else {
            Q::zero()
        }
    }
}

/// `M_j[q][q'] = p_{j+bq−q'}`, with `p_i = 0` outside `0..d`.
pub fn build_matrices(spec: &BernoulliSpec) -> Vec<QMatrix> {
    let n = spec.size();
    (0..spec.b)
        .map(|j| {
            let mut m = QMatrix::zeros(n, n);
            for q in 0..n {
                for q2 in 0..n {
                    m[(q, q2)] = spec.digit_prob((j + spec.b * q) as isize - q2 as isize);
                }
            }
            m
        })
        .collect()
}

/// Positive `C` with `(ΣM_j)C = C` and `ΣC_q = 1`; `C_q = η([q, q+1))`.
pub fn stationary_vector(spec: &BernoulliSpec) -> Result<Vec<Q>> {
    let mats = build_matrices(spec);
    eigenvector_summing_to_one(&QMatrix::sum(&mats, spec.size()))
}

pub(crate) fn eigenvector_summing_to_one(total: &QMatrix) -> Result<Vec<Q>> {
    if !total.is_irreducible() {
        return Err(Error::Reducible);
    }
    let kernel = total.sub(&QMatrix::identity(total.rows())).kernel();
    if kernel.len() != 1 {
        return Err(Error::KernelDimension(kernel.len()));
    }
    let v = &kernel[0];
    let s: Q = v.iter().sum();
    if s.is_zero() {
        return Err(Error::NonPositiveEigenvector);
    }
    let c: Vec<Q> = v.iter().map(|x| x / &s).collect();
    if c.iter().any(|x| !x.is_positive()) {
        return Err(Error::NonPositiveEigenvector);
    }
    Ok(c)
}

/// Bundles the matrices with `C` so repeated evaluations share them.
#[derive(Debug, Clone)]
pub struct BernoulliMeasure {
    spec: BernoulliSpec,
    matrices: Vec<QMatrix>,
    c: Vec<Q>,
}

impl BernoulliMeasure {
    pub fn new(spec: BernoulliSpec) -> Result<Self> {
        let matrices = build_matrices(&spec);
        let c = eigenvector_summing_to_one(&QMatrix::sum(&matrices, spec.size()))?;
        Ok(BernoulliMeasure { spec, matrices, c })
    }

    pub fn spec(&self) -> &BernoulliSpec {
        &self.spec
    }

    pub fn matrices(&self) -> &[QMatrix] {
        &self.matrices
    }

    pub fn c(&self) -> &[Q] {
        &self.c
    }

    /// `M_{ε₁} … M_{ε_k}`.
    pub fn product(&self, digits: &[usize]) -> Result<QMatrix> {
        check_letters(digits, self.spec.b)?;
        Ok(digits
            .iter()
            .fold(QMatrix::identity(self.spec.size()), |acc, &e| {
                acc.mul(&self.matrices[e])
            }))
    }

    /// `η(q + I_{ε₁…ε_k}) = E_q M_{ε₁} … M_{ε_k} C`.
    pub fn interval_measure(&self, q: usize, digits: &[usize]) -> Result<Q> {
        if q >= self.spec.size() {
            return Err(Error::InvalidInput(format!(
                "q = {q} outside 0..={}",
                self.spec.a()
            )));
        }
        check_letters(digits, self.spec.b)?;
        let mut col = self.c.clone();
        for &e in digits.iter().rev() {
            col = self.matrices[e].mul_col(&col);
        }
        Ok(col[q].clone())
    }

    /// `η(q + I_ε) / η(q + [0,1))`.
    pub fn normalized_interval_measure(&self, q: usize, digits: &[usize]) -> Result<Q> {
        Ok(self.interval_measure(q, digits)? / &self.c[q])
    }

    /// `Σ_q η(q + I_ε)`.
    pub fn sum_symbolic_cylinder(&self, digits: &[usize]) -> Result<Q> {
        (0..self.spec.size())
            .map(|q| self.interval_measure(q, digits))
            .sum()
    }

    /// Linear representation of `ε ↦ Σ_q η(q + I_ε)`: `R_j = (1 … 1) M_j`.
    pub fn sum_symbolic_representation(&self) -> LinearRepresentation {
        let ones = vec![Q::one(); self.spec.size()];
        let r = self.matrices.iter().map(|m| m.row_mul(&ones)).collect();
        LinearRepresentation::new(r, self.matrices.clone(), self.c.clone())
            .expect("transpose-stochastic matrices give a valid representation")
    }
}

pub fn interval_measure(spec: &BernoulliSpec, q: usize, digits: &[usize]) -> Result<Q> {
    BernoulliMeasure::new(spec.clone())?.interval_measure(q, digits)
}

/// Number of length-`k` digit words `ω_{k−1}…ω_0` over `{0..d−1}` with `Σ ω_i b^i = n`.
pub fn count_k(spec: &BernoulliSpec, n: u64, k: usize) -> BigUint {
    let mut states = BTreeMap::from([(n, BigUint::one())]);
    for _ in 0..k {
        states = step(spec, &states);
        if states.is_empty() {
            break;
        }
    }
    states.remove(&0).unwrap_or_default()
}

/// Number of `b`-representations of `n` with digits in `{0..d−1}`.
pub fn count_representations(spec: &BernoulliSpec, n: u64) -> BigUint {
    let mut states = BTreeMap::from([(n, BigUint::one())]);
    while states.keys().any(|&m| m != 0) {
        states = step(spec, &states);
    }
    states.remove(&0).unwrap_or_default()
}

/// One digit position, least significant first. A key `m` is the part of `n`
/// still to be represented, divided by the current power of `b`; keys at a
/// given depth are `⌊n/b^j⌋ − t` for a carry `t ∈ {0..a}`.
fn step(spec: &BernoulliSpec, states: &BTreeMap<u64, BigUint>) -> BTreeMap<u64, BigUint> {
    let b = spec.b as u64;
    let mut next: BTreeMap<u64, BigUint> = BTreeMap::new();
    for (&m, count) in states {
        let top = m.min(spec.d as u64 - 1);
        let mut w = m % b;
        while w <= top {
            *next.entry((m - w) / b).or_default() += count;
            w += b;
        }
    }
    next
}

/// `d^k M_{ε₁} … M_{ε_k}` as an integer matrix (uniform `p` only).
pub fn matrix_count_table(spec: &BernoulliSpec, digits: &[usize]) -> Result<Vec<Vec<BigInt>>> {
    if !spec.is_uniform() {
        return Err(Error::NonUniform);
    }
    let measure = BernoulliMeasure::new(spec.clone())?;
    let product = measure.product(digits)?;
    let scale = Q::from_integer(num_traits::pow(BigInt::from(spec.d), digits.len()));
    Ok(product
        .scale(&scale)
        .to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    assert!(x.is_integer());
                    x.to_integer()
                })
                .collect()
        })
        .collect())
}

/// Edges `(q, ω, ε, q')` of the integer normalization transducer: `q + ω = b·q' + ε`.
pub fn integer_transducer(spec: &BernoulliSpec) -> Vec<(usize, usize, usize, usize)> {
    let mut edges = Vec::new();
    for q in 0..spec.size() {
        for w in 0..spec.d {
            let s = q + w;
            edges.push((q, w, s % spec.b, s / spec.b));
        }
    }
    edges
}

/// Canonical base-`b` digits (most significant first) of `Σ x_i b^i`, obtained
/// by running the normalization transducer from the least significant digit.
pub fn normalize_digits(spec: &BernoulliSpec, digits: &[usize]) -> Result<Vec<usize>> {
    check_letters(digits, spec.d)?;
    let mut out = Vec::with_capacity(digits.len() + 2);
    let mut carry = 0;
    for &w in digits.iter().rev() {
        let s = carry + w;
        out.push(s % spec.b);
        carry = s / spec.b;
    }
    while carry > 0 {
        out.push(carry % spec.b);
        carry /= spec.b;
    }
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    if out.is_empty() {
        out.push(0);
    }
    out.reverse();
    Ok(out)
}

/// Markov chain on `(a+1)·b` states whose image under `i ↦ ⌊i/(a+1)⌋` is the
/// reversed-word measure `η'[ε₁…ε_k] = Σ_q η(q + I_{ε_k…ε₁})`.
#[derive(Debug, Clone)]
pub struct SymbolicExport {
    /// Initial vector `(ᵗC ᵗM₀, …, ᵗC ᵗM_{b−1})`; reproduces `η'` directly.
    pub markov: MarkovMeasure,
    /// The same chain started from `(ᵗC … ᵗC)/b`; reproduces `η'` after
    /// discarding the first letter.
    pub markov_block_initial: MarkovMeasure,
    /// `(ᵗC … ᵗC)` sums to this factor before normalization.
    pub block_initial_factor: usize,
    pub psi: LetterMap,
}

pub fn symbolic_markov_export(spec: &BernoulliSpec) -> Result<SymbolicExport> {
    let measure = BernoulliMeasure::new(spec.clone())?;
    let (b, n) = (spec.b, spec.size());
    let mut transition = QMatrix::zeros(b * n, b * n);
    for i in 0..b {
        for (j, m) in measure.matrices.iter().enumerate() {
            for q in 0..n {
                for q2 in 0..n {
                    transition[(i * n + q, j * n + q2)] = m[(q2, q)].clone();
                }
            }
        }
    }
    let mut p = Vec::with_capacity(b * n);
    for m in &measure.matrices {
        p.extend(m.mul_col(&measure.c));
    }
    let factor = Q::from_integer(BigInt::from(b));
    let block: Vec<Q> = (0..b)
        .flat_map(|_| measure.c.iter().map(|x| x / &factor))
        .collect();
    Ok(SymbolicExport {
        markov: MarkovMeasure::new(p, transition.clone())?,
        markov_block_initial: MarkovMeasure::new(block, transition)?,
        block_initial_factor: b,
        psi: LetterMap::new((0..b * n).map(|i| i / n).collect(), b)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MatricesReport {
    pub b: usize,
    pub d: usize,
    pub a: usize,
    #[serde(with = "crate::rational::serde_q::vec")]
    pub p: Vec<Q>,
    #[serde(rename = "M")]
    pub m: Vec<crate::sofic::Rows>,
    #[serde(rename = "C", with = "crate::rational::serde_q::vec")]
    pub c: Vec<Q>,
}

impl BernoulliMeasure {
    pub fn report(&self) -> MatricesReport {
        MatricesReport {
            b: self.spec.b,
            d: self.spec.d,
            a: self.spec.a(),
            p: self.spec.p.clone(),
            m: self
                .matrices
                .iter()
                .map(|m| crate::sofic::Rows(m.to_rows()))
                .collect(),
            c: self.c.clone(),
        }
    }
}
