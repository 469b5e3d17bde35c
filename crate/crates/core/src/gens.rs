use sha2::{Digest, Sha256};

use crate::graph::GraphError;

/// Index of a generator inside a [`GeneratorSet`].
pub type Gen = usize;

/// An ordered list of generator labels together with their formal inverses.
///
/// The order is fixed at construction and enters every ball code, so two
/// sets with the same labels in a different order are different sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    names: Vec<String>,
    inverse: Vec<Gen>,
}

impl GeneratorSet {
    pub fn new(names: Vec<String>, inverse: Vec<Gen>) -> Result<Self, GraphError> {
        if names.len() != inverse.len() {
            return Err(GraphError::InvalidGenerators(format!(
                "{} names but {} inverse entries",
                names.len(),
                inverse.len()
            )));
        }
        if names.len() > u16::MAX as usize {
            return Err(GraphError::InvalidGenerators("too many generators".into()));
        }
        for (g, &h) in inverse.iter().enumerate() {
            if h >= inverse.len() || inverse[h] != g {
                return Err(GraphError::InvalidGenerators(format!(
                    "pairing is not an involution at generator {g}"
                )));
            }
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(GraphError::InvalidGenerators(
                "duplicate generator name".into(),
            ));
        }
        Ok(Self { names, inverse })
    }

    /// `k` self-inverse generators named `a0, a1, ...`.
    pub fn involutions(k: usize) -> Self {
        Self {
            names: (0..k).map(|i| format!("a{i}")).collect(),
            inverse: (0..k).collect(),
        }
    }

    /// One generator `s` and its inverse `S`.
    pub fn cyclic() -> Self {
        Self {
            names: vec!["s".into(), "S".into()],
            inverse: vec![1, 0],
        }
    }

    /// `k` free generators, each followed by its inverse: `x0, X0, x1, X1, ...`.
    pub fn free(k: usize) -> Self {
        let mut names = Vec::with_capacity(2 * k);
        let mut inverse = Vec::with_capacity(2 * k);
        for i in 0..k {
            names.push(format!("x{i}"));
            names.push(format!("X{i}"));
            inverse.push(2 * i + 1);
            inverse.push(2 * i);
        }
        Self { names, inverse }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn inverse(&self, g: Gen) -> Gen {
        self.inverse[g]
    }

    pub fn is_involution(&self, g: Gen) -> bool {
        self.inverse[g] == g
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<Gen> {
        self.names.iter().position(|n| n == name)
    }

    /// Letterwise inverse of a word, in reversed order (the group inverse).
    pub fn inverse_word(&self, word: &[Gen]) -> Vec<Gen> {
        word.iter().rev().map(|&g| self.inverse[g]).collect()
    }

    /// Short hex fingerprint of names and pairing, used to tag kernel files.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (n, i) in self.names.iter().zip(&self.inverse) {
            h.update(n.as_bytes());
            h.update([0u8]);
            h.update((*i as u32).to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    /// Parse a word such as `s s S a0` (whitespace or comma separated names).
    pub fn parse_word(&self, text: &str) -> Result<Vec<Gen>, GraphError> {
        text.split(|c: char| c.is_whitespace() || c == ',' || c == '.')
            .filter(|t| !t.is_empty())
            .map(|t| {
                self.index_of(t).ok_or_else(|| {
                    GraphError::InvalidGenerators(format!("unknown generator `{t}`"))
                })
            })
            .collect()
    }
}
