//! Bipolar memory vectors and the Hebbian interconnection matrix built from
//! them.
//!
//! A network of `n` neurons stores `m` memories, each a vector of `+1/-1`
//! entries. The interconnection matrix is the sum of the memories' outer
//! products with the diagonal forced to zero, so that it splits exactly
//! into a strictly lower-triangular part and its transpose.

use std::fmt;

use thiserror::Error;

use crate::matrix::SquareMatrix;

/// Validation failures. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemoryError {
    #[error("memory set is empty")]
    Empty,
    #[error("memory {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("memory {index} has non-bipolar entry {value} at position {position}")]
    NonBipolar {
        index: usize,
        position: usize,
        value: i64,
    },
    #[error("memories {first} and {second} are identical")]
    Duplicate { first: usize, second: usize },
    #[error("memories {first} and {second} are complements of each other")]
    ComplementPair { first: usize, second: usize },
    #[error("memory dimension must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemoryVector(Vec<i8>);

impl MemoryVector {
    /// Accepts only `+1`/`-1` entries; on failure returns the offending
    /// position and value.
    pub fn from_signed(values: &[i64]) -> Result<Self, (usize, i64)> {
        values
            .iter()
            .enumerate()
            .map(|(pos, &v)| match v {
                1 => Ok(1),
                -1 => Ok(-1),
                other => Err((pos, other)),
            })
            .collect::<Result<Vec<i8>, _>>()
            .map(MemoryVector)
    }

    /// Wraps entries already known to be bipolar.
    ///
    /// Panics if an entry is not `+1` or `-1`.
    pub fn from_bipolar(entries: Vec<i8>) -> Self {
        assert!(
            entries.iter().all(|&e| e == 1 || e == -1),
            "non-bipolar entry in {entries:?}"
        );
        MemoryVector(entries)
    }

    #[inline]
    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn negated(&self) -> Self {
        MemoryVector(self.0.iter().map(|&e| -e).collect())
    }

    pub fn scaled(&self, sign: i8) -> Self {
        if sign < 0 {
            self.negated()
        } else {
            self.clone()
        }
    }

    pub fn is_complement_of(&self, other: &MemoryVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a == &-b)
    }

    /// Number of differing positions.
    pub fn hamming(&self, other: &MemoryVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Hamming distance to the nearer of `other` and its complement.
    pub fn complement_distance(&self, other: &MemoryVector) -> usize {
        let h = self.hamming(other);
        h.min(self.len() - h)
    }
}

impl fmt::Display for MemoryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A non-empty set of same-length memories, no two equal or complementary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorySet {
    memories: Vec<MemoryVector>,
    dimension: usize,
}

impl MemorySet {
    pub fn new(memories: Vec<MemoryVector>) -> Result<Self, MemoryError> {
        let first = memories.first().ok_or(MemoryError::Empty)?;
        let dimension = first.len();
        if dimension == 0 {
            return Err(MemoryError::ZeroDimension);
        }
        for (index, m) in memories.iter().enumerate() {
            if m.len() != dimension {
                return Err(MemoryError::DimensionMismatch {
                    index,
                    expected: dimension,
                    found: m.len(),
                });
            }
        }
        for second in 1..memories.len() {
            for first in 0..second {
                if memories[first] == memories[second] {
                    return Err(MemoryError::Duplicate { first, second });
                }
                if memories[first].is_complement_of(&memories[second]) {
                    return Err(MemoryError::ComplementPair { first, second });
                }
            }
        }
        Ok(MemorySet {
            memories,
            dimension,
        })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.memories.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.memories.is_empty()
    }

    #[inline]
    pub fn get(&self, index: usize) -> &MemoryVector {
        &self.memories[index]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MemoryVector> {
        self.memories.iter()
    }

    pub fn as_slice(&self) -> &[MemoryVector] {
        &self.memories
    }

    pub fn negated(&self) -> MemorySet {
        MemorySet {
            memories: self.memories.iter().map(MemoryVector::negated).collect(),
            dimension: self.dimension,
        }
    }
}

impl<'a> IntoIterator for &'a MemorySet {
    type Item = &'a MemoryVector;
    type IntoIter = std::slice::Iter<'a, MemoryVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Validates raw signed vectors into a [`MemorySet`], preserving order.
pub fn validate_memories(raw: &[Vec<i64>]) -> Result<MemorySet, MemoryError> {
    let first = raw.first().ok_or(MemoryError::Empty)?;
    let expected = first.len();
    let mut memories = Vec::with_capacity(raw.len());
    for (index, values) in raw.iter().enumerate() {
        if values.len() != expected {
            return Err(MemoryError::DimensionMismatch {
                index,
                expected,
                found: values.len(),
            });
        }
        let v = MemoryVector::from_signed(values).map_err(|(position, value)| {
            MemoryError::NonBipolar {
                index,
                position,
                value,
            }
        })?;
        memories.push(v);
    }
    MemorySet::new(memories)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterconnectionError {
    #[error("weight matrix is not symmetric")]
    Asymmetric,
    #[error("weight matrix has a nonzero diagonal entry")]
    NonzeroDiagonal,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Symmetric, zero-diagonal weight matrix of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct InterconnectionMatrix {
    weights: SquareMatrix,
}

impl InterconnectionMatrix {
    /// Wraps a matrix after checking exact symmetry and a zero diagonal.
    pub fn from_matrix(weights: SquareMatrix) -> Result<Self, InterconnectionError> {
        if !weights.is_symmetric() {
            return Err(InterconnectionError::Asymmetric);
        }
        if !weights.has_zero_diagonal() {
            return Err(InterconnectionError::NonzeroDiagonal);
        }
        Ok(InterconnectionMatrix { weights })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, InterconnectionError> {
        let m = SquareMatrix::from_rows(rows).ok_or(InterconnectionError::DimensionMismatch {
            expected: rows.len(),
            found: rows
                .iter()
                .map(Vec::len)
                .find(|&l| l != rows.len())
                .unwrap_or(0),
        })?;
        Self::from_matrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        InterconnectionMatrix {
            weights: SquareMatrix::zeros(n),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    #[inline]
    pub fn matrix(&self) -> &SquareMatrix {
        &self.weights
    }

    pub fn bit_eq(&self, other: &InterconnectionMatrix) -> bool {
        self.weights.bit_eq(&other.weights)
    }

    pub fn edge_count(&self) -> usize {
        edge_count(self)
    }

    pub(crate) fn from_matrix_unchecked(weights: SquareMatrix) -> Self {
        debug_assert!(weights.is_symmetric() && weights.has_zero_diagonal());
        InterconnectionMatrix { weights }
    }
}

/// Sum of the memories' outer products with the diagonal zeroed.
pub fn build_t_matrix(memories: &MemorySet) -> InterconnectionMatrix {
    let n = memories.dimension();
    let mut w = SquareMatrix::zeros(n);
    for x in memories {
        let x = x.entries();
        for i in 0..n {
            let row = w.row_mut(i);
            for j in 0..n {
                if i != j {
                    row[j] += f64::from(x[i] * x[j]);
                }
            }
        }
    }
    InterconnectionMatrix::from_matrix_unchecked(w)
}

/// Unordered neuron pairs joined by a nonzero weight.
pub fn edge_count(t: &InterconnectionMatrix) -> usize {
    let n = t.dim();
    (0..n)
        .map(|i| (0..i).filter(|&j| t.get(i, j) != 0.0).count())
        .sum()
}

/// Errors from the plain-text memory format. Line numbers are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemoryFileError {
    #[error("line {line}: cannot parse token {token:?} as an integer")]
    Token { line: usize, token: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: MemoryError,
    },
    #[error("no memories found")]
    Empty,
}

fn parse_entry(token: &str) -> Option<i64> {
    let normalized = token.replace('\u{2212}', "-");
    normalized.parse::<i64>().ok()
}

/// Parses one memory per line, whitespace-separated `1`/`-1`/`+1` entries.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_memories(text: &str) -> Result<MemorySet, MemoryFileError> {
    let mut raw = Vec::new();
    let mut lines = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let values = trimmed
            .split_whitespace()
            .map(|tok| {
                parse_entry(tok).ok_or_else(|| MemoryFileError::Token {
                    line: idx + 1,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        raw.push(values);
        lines.push(idx + 1);
    }
    if raw.is_empty() {
        return Err(MemoryFileError::Empty);
    }
    validate_memories(&raw).map_err(|source| {
        let index = match &source {
            MemoryError::DimensionMismatch { index, .. }
            | MemoryError::NonBipolar { index, .. } => *index,
            MemoryError::Duplicate { second, .. } | MemoryError::ComplementPair { second, .. } => {
                *second
            }
            MemoryError::Empty | MemoryError::ZeroDimension => 0,
        };
        MemoryFileError::Invalid {
            line: lines[index],
            source,
        }
    })
}

/// Inverse of [`parse_memories`].
pub fn format_memories(memories: &MemorySet) -> String {
    let mut out = String::new();
    for m in memories {
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}
