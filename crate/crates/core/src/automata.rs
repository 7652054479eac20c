//! Labeled graphs presenting sofic subshifts, letter-to-letter images and
//! finite-length comparison of factor languages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = char;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    states: Vec<String>,
    edges: Vec<(usize, Label, usize)>,
    initial: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub states: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub initial: Vec<String>,
}

impl LabeledGraph {
    pub fn new<S: Into<String>>(
        states: Vec<S>,
        edges: Vec<(&str, Label, &str)>,
        initial: Vec<&str>,
    ) -> Result<Self> {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let index = |id: &str| {
            states
                .iter()
                .position(|s| s == id)
                .ok_or_else(|| Error::InvalidInput(format!("undeclared state {id:?}")))
        };
        let edges = edges
            .into_iter()
            .map(|(from, label, to)| Ok((index(from)?, label, index(to)?)))
            .collect::<Result<Vec<_>>>()?;
        let initial = initial.into_iter().map(index).collect::<Result<Vec<_>>>()?;
        Ok(LabeledGraph {
            states,
            edges,
            initial,
        })
    }

    /// Every state is initial: the graph presents the subshift of its path labels.
    pub fn subshift<S: Into<String>>(
        states: Vec<S>,
        edges: Vec<(&str, Label, &str)>,
    ) -> Result<Self> {
        let mut g = Self::new(states, edges, Vec::new())?;
        g.initial = (0..g.states.len()).collect();
        Ok(g)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn edges(&self) -> &[(usize, Label, usize)] {
        &self.edges
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.edges.iter().map(|&(_, l, _)| l).collect()
    }

    /// True iff some path starting at an initial state carries `word`.
    pub fn accepts_factor(&self, word: &str) -> Result<bool> {
        let alphabet = self.alphabet();
        if let Some(c) = word.chars().find(|c| !alphabet.contains(c)) {
            return Err(Error::UnknownLetter(c));
        }
        let mut current: BTreeSet<usize> = self.initial.iter().copied().collect();
        for c in word.chars() {
            current = self
                .edges
                .iter()
                .filter(|&&(from, l, _)| l == c && current.contains(&from))
                .map(|&(_, _, to)| to)
                .collect();
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All labels of paths of length `len` starting at an initial state.
    pub fn path_labels(&self, len: usize) -> BTreeSet<String> {
        let mut frontier: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        frontier.insert(String::new(), self.initial.iter().copied().collect());
        for _ in 0..len {
            let mut next: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
            for (word, states) in &frontier {
                for &(from, label, to) in &self.edges {
                    if states.contains(&from) {
                        let mut w = word.clone();
                        w.push(label);
                        next.entry(w).or_default().insert(to);
                    }
                }
            }
            frontier = next;
        }
        frontier.into_keys().collect()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            states: self.states.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(f, l, t)| {
                    (
                        self.states[f].clone(),
                        l.to_string(),
                        self.states[t].clone(),
                    )
                })
                .collect(),
            initial: self
                .initial
                .iter()
                .map(|&i| self.states[i].clone())
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let edges = json
            .edges
            .iter()
            .map(|(f, l, t)| {
                let mut chars = l.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok((f.as_str(), c, t.as_str())),
                    _ => Err(Error::Parse(format!(
                        "edge label {l:?} must be one character"
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            json.states.clone(),
            edges,
            json.initial.iter().map(String::as_str).collect(),
        )
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if self.initial.contains(&i) {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  s{i} [label=\"{s}\", shape={shape}];");
        }
        for &(f, l, t) in &self.edges {
            let _ = writeln!(out, "  s{f} -> s{t} [label=\"{l}\"];");
        }
        out.push_str("}\n");
        out
    }
}

/// A source of finite words: the factor language of some subshift presentation.
pub trait WordSource {
    fn alphabet(&self) -> BTreeSet<Label>;
    fn words(&self, len: usize) -> BTreeSet<String>;
}

impl WordSource for LabeledGraph {
    fn alphabet(&self) -> BTreeSet<Label> {
        LabeledGraph::alphabet(self)
    }

    fn words(&self, len: usize) -> BTreeSet<String> {
        self.path_labels(len)
    }
}

/// Image of a graph's path labels under a letter-to-letter map.
pub struct MorphismImage<'a> {
    graph: &'a LabeledGraph,
    map: BTreeMap<Label, Label>,
}

impl<'a> MorphismImage<'a> {
    pub fn new(graph: &'a LabeledGraph, map: BTreeMap<Label, Label>) -> Result<Self> {
        if let Some(c) = graph.alphabet().into_iter().find(|c| !map.contains_key(c)) {
            return Err(Error::InvalidInput(format!(
                "letter map is undefined on {c:?}"
            )));
        }
        Ok(MorphismImage { graph, map })
    }
}

impl WordSource for MorphismImage<'_> {
    fn alphabet(&self) -> BTreeSet<Label> {
        self.graph.alphabet().iter().map(|c| self.map[c]).collect()
    }

    fn words(&self, len: usize) -> BTreeSet<String> {
        self.graph
            .path_labels(len)
            .iter()
            .map(|w| w.chars().map(|c| self.map[&c]).collect())
            .collect()
    }
}

pub struct FullShift {
    pub letters: BTreeSet<Label>,
}

impl WordSource for FullShift {
    fn alphabet(&self) -> BTreeSet<Label> {
        self.letters.clone()
    }

    fn words(&self, len: usize) -> BTreeSet<String> {
        let mut words = BTreeSet::from([String::new()]);
        for _ in 0..len {
            words = words
                .iter()
                .flat_map(|w| {
                    self.letters.iter().map(move |&c| {
                        let mut w = w.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        words
    }
}

pub fn morphism_image_language(
    graph: &LabeledGraph,
    map: &BTreeMap<Label, Label>,
    len: usize,
) -> Result<BTreeSet<String>> {
    Ok(MorphismImage::new(graph, map.clone())?.words(len))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageComparison {
    pub equal: bool,
    pub counterexample: Option<String>,
}

/// Compares factor languages length by length up to `max_len`; the first
/// counterexample is the shortest, then lexicographically least, word in the
/// symmetric difference.
pub fn languages_equal_up_to(
    a: &dyn WordSource,
    b: &dyn WordSource,
    max_len: usize,
) -> LanguageComparison {
    for len in 0..=max_len {
        let wa = a.words(len);
        let wb = b.words(len);
        if let Some(w) = wa.symmetric_difference(&wb).next() {
            return LanguageComparison {
                equal: false,
                counterexample: Some(w.clone()),
            };
        }
    }
    LanguageComparison {
        equal: true,
        counterexample: None,
    }
}

/// Presentations of the subshift of binary sequences with no factor `1 0^{2i} 1`.
pub mod fixtures {
    use super::*;

    /// Three-state automaton: after a 1 an odd number of 0s must precede the next 1.
    pub fn even_gap_automaton() -> LabeledGraph {
        LabeledGraph::subshift(
            vec!["a", "b", "c"],
            vec![
                ("a", '0', "b"),
                ("b", '0', "a"),
                ("b", '1', "c"),
                ("c", '0', "b"),
            ],
        )
        .unwrap()
    }

    /// Edge-shift cover of [`even_gap_automaton`]: symbols are its edges
    /// `A=(a,0) B=(b,0) D=(b,1) C=(c,0)`, and each symbol is its own label.
    pub fn even_gap_markov_cover() -> LabeledGraph {
        let transitions = [
            ('A', 'B'),
            ('A', 'D'),
            ('B', 'A'),
            ('D', 'C'),
            ('C', 'B'),
            ('C', 'D'),
        ];
        let names = ["A", "B", "C", "D"];
        let edges = transitions
            .iter()
            .map(|&(x, y)| {
                let from = names.iter().find(|n| n.starts_with(x)).unwrap();
                let to = names.iter().find(|n| n.starts_with(y)).unwrap();
                (*from, x, *to)
            })
            .collect();
        LabeledGraph::subshift(names.to_vec(), edges).unwrap()
    }

    pub fn even_gap_cover_projection() -> BTreeMap<Label, Label> {
        BTreeMap::from([('A', '0'), ('B', '0'), ('D', '1'), ('C', '0')])
    }

    /// Markov graph on `{a, b, c}`; each vertex emits its own name.
    pub fn three_letter_markov_graph() -> LabeledGraph {
        LabeledGraph::subshift(
            vec!["a", "b", "c"],
            vec![
                ("a", 'a', "b"),
                ("b", 'b', "a"),
                ("a", 'a', "c"),
                ("c", 'c', "a"),
            ],
        )
        .unwrap()
    }

    /// ψ(a) = 0, ψ(b) = 0, ψ(c) = 1.
    pub fn three_letter_map() -> BTreeMap<Label, Label> {
        BTreeMap::from([('a', '0'), ('b', '0'), ('c', '1')])
    }
}
