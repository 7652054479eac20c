//! Markov measures, linear representations and the conversions between them.
//!
//! A linear representation `(R, M, C)` assigns to a word `ω₁…ω_n` the value
//! `R_{ω₁} M_{ω₂} … M_{ω_n} C`; it is valid when `(ΣR)C = 1` and `(ΣM)C = C`
//! with `C > 0`.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{is_probability_vector, serde_q, Q};
use crate::words::check_letters;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovMeasure {
    p: Vec<Q>,
    transition: QMatrix,
}

impl MarkovMeasure {
    /// Zero entries in `p` are accepted (the block construction of
    /// [`linear_to_markov`] produces them).
    pub fn new(p: Vec<Q>, transition: QMatrix) -> Result<Self> {
        if !is_probability_vector(&p) {
            return Err(Error::InvalidMarkov("p is not a probability vector".into()));
        }
        if !transition.is_square() || transition.rows() != p.len() {
            return Err(Error::InvalidMarkov(format!(
                "transition matrix must be {0}x{0}",
                p.len()
            )));
        }
        if !transition.is_nonnegative() {
            return Err(Error::InvalidMarkov("negative transition entry".into()));
        }
        if let Some(i) = (0..p.len()).find(|&i| transition.row(i).iter().sum::<Q>() != Q::one()) {
            return Err(Error::InvalidMarkov(format!("row {i} does not sum to 1")));
        }
        Ok(MarkovMeasure { p, transition })
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[Q] {
        &self.p
    }

    pub fn transition(&self) -> &QMatrix {
        &self.transition
    }

    /// `p_{ω₁} p_{ω₁ω₂} … p_{ω_{n−1}ω_n}`.
    pub fn cylinder(&self, word: &[usize]) -> Result<Q> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        check_letters(word, self.size())?;
        let mut value = self.p[word[0]].clone();
        for pair in word.windows(2) {
            if value.is_zero() {
                break;
            }
            value *= &self.transition[(pair[0], pair[1])];
        }
        Ok(value)
    }

    pub fn to_json(&self) -> MarkovJson {
        MarkovJson {
            p: self.p.clone(),
            transition: self.transition.to_rows(),
        }
    }

    pub fn from_json(json: MarkovJson) -> Result<Self> {
        Self::new(json.p, checked_matrix(json.transition, "P")?)
    }
}

pub fn markov_cylinder(m: &MarkovMeasure, word: &[usize]) -> Result<Q> {
    m.cylinder(word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRepresentation {
    r: Vec<Vec<Q>>,
    m: Vec<QMatrix>,
    c: Vec<Q>,
}

impl LinearRepresentation {
    pub fn new(r: Vec<Vec<Q>>, m: Vec<QMatrix>, c: Vec<Q>) -> Result<Self> {
        let lr = Self::new_unchecked(r, m, c)?;
        let dim = lr.dim();
        let mass: Q = lr.r.iter().map(|ri| dot(ri, &lr.c)).sum();
        if mass != Q::one() {
            return Err(Error::InvalidRepresentation(format!(
                "(ΣR)C = {mass}, expected 1"
            )));
        }
        if QMatrix::sum(&lr.m, dim).mul_col(&lr.c) != lr.c {
            return Err(Error::InvalidRepresentation("(ΣM)C ≠ C".into()));
        }
        Ok(lr)
    }

    /// Checks shapes, nonnegativity and `C > 0`, but not the two mass identities.
    pub fn new_unchecked(r: Vec<Vec<Q>>, m: Vec<QMatrix>, c: Vec<Q>) -> Result<Self> {
        let dim = c.len();
        if dim == 0 || r.is_empty() || r.len() != m.len() {
            return Err(Error::InvalidRepresentation(
                "need as many matrices as row vectors, and a nonempty C".into(),
            ));
        }
        if r.iter().any(|ri| ri.len() != dim)
            || m.iter().any(|mi| mi.rows() != dim || mi.cols() != dim)
        {
            return Err(Error::InvalidRepresentation(format!(
                "dimension must be {dim} throughout"
            )));
        }
        if r.iter().flatten().any(Signed::is_negative) || m.iter().any(|mi| !mi.is_nonnegative()) {
            return Err(Error::InvalidRepresentation("negative entry".into()));
        }
        if c.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidRepresentation(
                "C is not strictly positive".into(),
            ));
        }
        Ok(LinearRepresentation { r, m, c })
    }

    pub fn alphabet_size(&self) -> usize {
        self.r.len()
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn r(&self) -> &[Vec<Q>] {
        &self.r
    }

    pub fn m(&self) -> &[QMatrix] {
        &self.m
    }

    pub fn c(&self) -> &[Q] {
        &self.c
    }

    /// `R_{ω₁} M_{ω₂} … M_{ω_n} C`.
    pub fn cylinder(&self, word: &[usize]) -> Result<Q> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        check_letters(word, self.alphabet_size())?;
        let mut row = self.r[word[0]].clone();
        for &l in &word[1..] {
            row = self.m[l].row_mul(&row);
        }
        Ok(dot(&row, &self.c))
    }

    /// With `R = ΣRᵢ`: `ΣMᵢ` irreducible and `Rᵢ = R·Mᵢ` for every letter.
    pub fn is_stationary(&self) -> bool {
        let total = QMatrix::sum(&self.m, self.dim());
        if !total.is_irreducible() {
            return false;
        }
        let mut r_sum = vec![Q::zero(); self.dim()];
        for ri in &self.r {
            for (acc, x) in r_sum.iter_mut().zip(ri) {
                *acc += x;
            }
        }
        self.r
            .iter()
            .zip(&self.m)
            .all(|(ri, mi)| *ri == mi.row_mul(&r_sum))
    }

    /// A valid representation with small random rational entries: random
    /// nonnegative matrices are rescaled row-wise so that `(ΣM)C = C`.
    pub fn random<G: Rng>(rng: &mut G, letters: usize, dim: usize) -> Self {
        assert!(letters >= 1 && dim >= 1);
        let c: Vec<Q> = (0..dim)
            .map(|_| Q::new(rng.gen_range(1..=5).into(), rng.gen_range(1..=3).into()))
            .collect();
        let mut m: Vec<QMatrix> = (0..letters)
            .map(|_| {
                let mut mi = QMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        if rng.gen_bool(0.6) {
                            mi[(i, j)] = Q::from_integer(rng.gen_range(1..=4).into());
                        }
                    }
                }
                mi
            })
            .collect();
        // Every row needs some mass.
        for i in 0..dim {
            let row_mass: Q = m.iter().map(|mi| mi.row(i).iter().sum::<Q>()).sum();
            if row_mass.is_zero() {
                let l = rng.gen_range(0..letters);
                let j = rng.gen_range(0..dim);
                m[l][(i, j)] = Q::one();
            }
        }
        let image = QMatrix::sum(&m, dim).mul_col(&c);
        for mi in &mut m {
            for i in 0..dim {
                let factor = &c[i] / &image[i];
                for j in 0..dim {
                    let v = &mi[(i, j)] * &factor;
                    mi[(i, j)] = v;
                }
            }
        }
        let mut r: Vec<Vec<Q>> = (0..letters)
            .map(|_| {
                (0..dim)
                    .map(|_| Q::from_integer(rng.gen_range(0..=3).into()))
                    .collect()
            })
            .collect();
        if r.iter().flatten().all(Zero::is_zero) {
            r[0][0] = Q::one();
        }
        let mass: Q = r.iter().map(|ri| dot(ri, &c)).sum();
        for x in r.iter_mut().flatten() {
            *x /= &mass;
        }
        Self::new(r, m, c).expect("construction satisfies the mass identities")
    }

    pub fn to_json(&self) -> LinearRepresentationJson {
        LinearRepresentationJson {
            r: self.r.clone(),
            m: self.m.iter().map(|mi| Rows(mi.to_rows())).collect(),
            c: self.c.clone(),
        }
    }

    pub fn from_json(json: LinearRepresentationJson) -> Result<Self> {
        let m = json
            .m
            .into_iter()
            .map(|rows| checked_matrix(rows.0, "M"))
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.r, m, json.c)
    }
}

pub fn linrep_cylinder(lr: &LinearRepresentation, word: &[usize]) -> Result<Q> {
    lr.cylinder(word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterMap {
    map: Vec<usize>,
    target_size: usize,
}

impl LetterMap {
    pub fn new(map: Vec<usize>, target_size: usize) -> Result<Self> {
        if let Some(&letter) = map.iter().find(|&&l| l >= target_size) {
            return Err(Error::LetterOutOfRange {
                letter,
                size: target_size,
            });
        }
        Ok(LetterMap { map, target_size })
    }

    /// Target alphabet is `{0, …, max ψ}`.
    pub fn from_images(map: Vec<usize>) -> Self {
        let target_size = map.iter().max().map_or(0, |m| m + 1);
        LetterMap { map, target_size }
    }

    pub fn identity(size: usize) -> Self {
        LetterMap {
            map: (0..size).collect(),
            target_size: size,
        }
    }

    pub fn source_size(&self) -> usize {
        self.map.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn apply(&self, letter: usize) -> usize {
        self.map[letter]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }
}

/// Linear representation of a Markov measure: `πᵢ = pᵢ eᵢ`, `Pᵢ` keeps only column `i` of `P`.
pub fn markov_to_linear(m: &MarkovMeasure) -> LinearRepresentation {
    let b = m.size();
    let r = (0..b)
        .map(|i| {
            let mut pi = vec![Q::zero(); b];
            pi[i] = m.p[i].clone();
            pi
        })
        .collect();
    let mats = (0..b)
        .map(|i| {
            let mut pm = QMatrix::zeros(b, b);
            for k in 0..b {
                pm[(k, i)] = m.transition[(k, i)].clone();
            }
            pm
        })
        .collect();
    LinearRepresentation {
        r,
        m: mats,
        c: vec![Q::one(); b],
    }
}

/// Image measure under `ψ`: row vectors and matrices are summed over preimages.
pub fn push_forward(lr: &LinearRepresentation, psi: &LetterMap) -> Result<LinearRepresentation> {
    if psi.source_size() != lr.alphabet_size() {
        return Err(Error::InvalidInput(format!(
            "letter map has {} letters, representation has {}",
            psi.source_size(),
            lr.alphabet_size()
        )));
    }
    let dim = lr.dim();
    let mut r = vec![vec![Q::zero(); dim]; psi.target_size()];
    let mut m = vec![QMatrix::zeros(dim, dim); psi.target_size()];
    for i in 0..lr.alphabet_size() {
        let j = psi.apply(i);
        for (acc, x) in r[j].iter_mut().zip(&lr.r[i]) {
            *acc += x;
        }
        m[j] = m[j].add(&lr.m[i]);
    }
    Ok(LinearRepresentation {
        r,
        m,
        c: lr.c.clone(),
    })
}

/// Markov measure on `b·r` letters and the map `i ↦ ⌊i/r⌋` whose image is `lr`.
///
/// Conjugating by `diag(C)` makes the column vector all ones; the letter
/// `i·r + k` then stands for "letter `i`, coordinate `k`".
pub fn linear_to_markov(lr: &LinearRepresentation) -> Result<(MarkovMeasure, LetterMap)> {
    let lr = LinearRepresentation::new(lr.r.clone(), lr.m.clone(), lr.c.clone())?;
    let (b, r) = (lr.alphabet_size(), lr.dim());
    let c = &lr.c;
    let mut p = vec![Q::zero(); b * r];
    let mut transition = QMatrix::zeros(b * r, b * r);
    for i in 0..b {
        for k in 0..r {
            p[i * r + k] = &lr.r[i][k] * &c[k];
        }
    }
    for j in 0..b {
        for k in 0..r {
            for l in 0..r {
                let entry = &lr.m[j][(k, l)];
                if entry.is_zero() {
                    continue;
                }
                let conjugated = entry * &c[l] / &c[k];
                for i in 0..b {
                    transition[(i * r + k, j * r + l)] = conjugated.clone();
                }
            }
        }
    }
    let markov = MarkovMeasure::new(p, transition)?;
    let psi = LetterMap::new((0..b * r).map(|i| i / r).collect(), b)?;
    Ok((markov, psi))
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn checked_matrix(rows: Vec<Vec<Q>>, name: &str) -> Result<QMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("ragged rows in {name}")));
    }
    Ok(QMatrix::from_rows(rows))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct Rows(#[serde(with = "serde_q::matrix")] pub Vec<Vec<Q>>);

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinearRepresentationJson {
    #[serde(rename = "R", with = "serde_q::matrix")]
    pub r: Vec<Vec<Q>>,
    #[serde(rename = "M")]
    pub m: Vec<Rows>,
    #[serde(rename = "C", with = "serde_q::vec")]
    pub c: Vec<Q>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MarkovJson {
    #[serde(with = "serde_q::vec")]
    pub p: Vec<Q>,
    #[serde(rename = "P", with = "serde_q::matrix")]
    pub transition: Vec<Vec<Q>>,
}

/// Measures on the presentations shipped in [`crate::automata::fixtures`].
pub mod fixtures {
    use super::*;
    use crate::rational::q;

    /// Uniform choices on the edge-shift cover with symbols
    /// `(a,0) (b,0) (b,1) (c,0)` numbered 0..4, and its projection to `{0,1}`.
    pub fn even_gap_cover_measure() -> (MarkovMeasure, LetterMap) {
        let h = q(1, 2);
        let z = Q::zero();
        let o = Q::one();
        let transition = QMatrix::from_rows(vec![
            vec![z.clone(), h.clone(), h.clone(), z.clone()],
            vec![o.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), o.clone()],
            vec![z.clone(), h.clone(), h.clone(), z.clone()],
        ]);
        let p = vec![q(1, 4); 4];
        let markov = MarkovMeasure::new(p, transition).unwrap();
        (markov, LetterMap::new(vec![0, 0, 1, 0], 2).unwrap())
    }
}
