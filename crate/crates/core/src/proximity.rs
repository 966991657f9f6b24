//! Neuron distances and the per-trigger orderings derived from them.
//!
//! Retrieval from a trigger neuron visits the other neurons nearest-first.
//! The ordering sorts neurons by distance from the trigger, breaking ties
//! by ascending index, and the weight matrix is conjugated by that
//! permutation before its lower triangle is taken.

use thiserror::Error;

use crate::matrix::SquareMatrix;
use crate::memory::InterconnectionMatrix;

/// Tolerance used when checking a loaded proximity matrix for symmetry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProximityError {
    #[error("a network needs at least 2 neurons, got {0}")]
    TooSmall(usize),
    #[error("proximity matrix is not square")]
    NotSquare,
    #[error("proximity matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("proximity matrix has nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("proximity entry ({row}, {col}) = {value} is negative or not finite")]
    InvalidDistance { row: usize, col: usize, value: f64 },
    #[error("trigger {trigger} out of range for {n} neurons")]
    TriggerOutOfRange { trigger: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("line {line}: cannot parse {token:?} as a distance")]
    Token { line: usize, token: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProximityMatrix {
    distances: SquareMatrix,
}

impl ProximityMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ProximityError> {
        let distances = SquareMatrix::from_rows(rows).ok_or(ProximityError::NotSquare)?;
        Self::from_matrix(distances)
    }

    pub fn from_matrix(distances: SquareMatrix) -> Result<Self, ProximityError> {
        let n = distances.dim();
        if n < 2 {
            return Err(ProximityError::TooSmall(n));
        }
        for row in 0..n {
            for col in 0..n {
                let value = distances[(row, col)];
                if !value.is_finite() || value < 0.0 {
                    return Err(ProximityError::InvalidDistance { row, col, value });
                }
            }
            if distances[(row, row)] != 0.0 {
                return Err(ProximityError::NonzeroDiagonal(row));
            }
            for col in 0..row {
                if (distances[(row, col)] - distances[(col, row)]).abs() > SYMMETRY_TOLERANCE {
                    return Err(ProximityError::Asymmetric { row, col });
                }
            }
        }
        Ok(ProximityMatrix { distances })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.distances.dim()
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[(i, j)]
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.distances
    }
}

/// Neurons laid out on a line: `d(i, j) = |i - j|`.
pub fn linear_proximity(n: usize) -> Result<ProximityMatrix, ProximityError> {
    if n < 2 {
        return Err(ProximityError::TooSmall(n));
    }
    let distances = SquareMatrix::from_fn(n, |i, j| i.abs_diff(j) as f64);
    Ok(ProximityMatrix { distances })
}

/// Parses `n` lines of `n` whitespace-separated non-negative reals.
pub fn parse_proximity(text: &str) -> Result<ProximityMatrix, ProximityError> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| ProximityError::Token {
                    line: idx + 1,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    ProximityMatrix::from_rows(&rows)
}

/// Visiting order of the neurons when `trigger` is clamped.
///
/// `order[k]` is the original index of the neuron at proximity position
/// `k`; `order[0]` is always the trigger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeuronOrdering {
    trigger: usize,
    order: Vec<usize>,
    position: Vec<usize>,
}

impl NeuronOrdering {
    /// Builds an ordering from an explicit permutation; `order[0]` becomes
    /// the trigger. Returns `None` if `order` is not a permutation.
    pub fn from_order(order: Vec<usize>) -> Option<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (k, &neuron) in order.iter().enumerate() {
            if neuron >= n || position[neuron] != usize::MAX {
                return None;
            }
            position[neuron] = k;
        }
        Some(NeuronOrdering {
            trigger: *order.first()?,
            order,
            position,
        })
    }

    pub fn identity(n: usize) -> Self {
        NeuronOrdering::from_order((0..n).collect()).expect("identity is a permutation")
    }

    #[inline]
    pub fn trigger(&self) -> usize {
        self.trigger
    }

    #[inline]
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Original neuron at proximity position `k`.
    #[inline]
    pub fn neuron_at(&self, k: usize) -> usize {
        self.order[k]
    }

    /// Proximity position of original neuron `neuron`.
    #[inline]
    pub fn position_of(&self, neuron: usize) -> usize {
        self.position[neuron]
    }

    /// The inverse permutation, as an ordering in its own right.
    pub fn inverse(&self) -> NeuronOrdering {
        NeuronOrdering::from_order(self.position.clone()).expect("inverse is a permutation")
    }

    /// Reorders `values` (indexed by original neuron) into proximity order.
    pub fn gather<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.order.iter().map(|&i| values[i]).collect()
    }

    /// Maps `values` given in proximity order back to original neuron order.
    pub fn scatter<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.position.iter().map(|&k| values[k]).collect()
    }
}

/// Stable sort by distance from `trigger`, ties by ascending index.
pub fn ordering_for(
    trigger: usize,
    prox: &ProximityMatrix,
) -> Result<NeuronOrdering, ProximityError> {
    let n = prox.dim();
    if trigger >= n {
        return Err(ProximityError::TriggerOutOfRange { trigger, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    // The trigger's own distance is zero, but another neuron at distance zero
    // with a lower index must not displace it from the front.
    order.sort_by(|&a, &b| {
        (a != trigger)
            .cmp(&(b != trigger))
            .then(
                prox.distance(trigger, a)
                    .total_cmp(&prox.distance(trigger, b)),
            )
            .then(a.cmp(&b))
    });
    Ok(NeuronOrdering::from_order(order).expect("sorted indices form a permutation"))
}

/// `result[a][b] = t[order[a]][order[b]]`.
pub fn permute_matrix(
    t: &InterconnectionMatrix,
    ord: &NeuronOrdering,
) -> Result<InterconnectionMatrix, ProximityError> {
    if t.dim() != ord.len() {
        return Err(ProximityError::DimensionMismatch {
            expected: t.dim(),
            found: ord.len(),
        });
    }
    let m = t.matrix();
    let order = ord.order();
    let permuted = SquareMatrix::from_fn(t.dim(), |a, b| m[(order[a], order[b])]);
    Ok(InterconnectionMatrix::from_matrix_unchecked(permuted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{build_t_matrix, validate_memories};

    #[test]
    fn linear_proximity_small() {
        let p = linear_proximity(3).unwrap();
        assert_eq!(
            p.matrix().to_rows(),
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0]
            ]
        );
        assert_eq!(
            linear_proximity(2).unwrap().matrix().to_rows(),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]]
        );
        assert_eq!(
            linear_proximity(1).unwrap_err(),
            ProximityError::TooSmall(1)
        );
    }

    #[test]
    fn orderings_under_linear_proximity() {
        let p = linear_proximity(4).unwrap();
        assert_eq!(ordering_for(2, &p).unwrap().order(), &[2, 1, 3, 0]);
        for n in 2..10 {
            let p = linear_proximity(n).unwrap();
            let first = ordering_for(0, &p).unwrap();
            assert_eq!(first.order(), (0..n).collect::<Vec<_>>().as_slice());
            let last = ordering_for(n - 1, &p).unwrap();
            assert_eq!(last.order(), (0..n).rev().collect::<Vec<_>>().as_slice());
        }
        assert_eq!(
            ordering_for(4, &p).unwrap_err(),
            ProximityError::TriggerOutOfRange { trigger: 4, n: 4 }
        );
    }

    #[test]
    fn trigger_stays_first_with_zero_distances() {
        let p = ProximityMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(ordering_for(1, &p).unwrap().order(), &[1, 0, 2]);
    }

    #[test]
    fn permute_two_memory_matrix() {
        let set = validate_memories(&[vec![1, 1, -1, -1], vec![1, -1, 1, -1]]).unwrap();
        let t = build_t_matrix(&set);
        let ord = ordering_for(2, &linear_proximity(4).unwrap()).unwrap();
        let p = permute_matrix(&t, &ord).unwrap();
        assert_eq!(
            p.matrix().to_rows(),
            vec![
                vec![0.0, -2.0, 0.0, 0.0],
                vec![-2.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, -2.0],
                vec![0.0, 0.0, -2.0, 0.0],
            ]
        );
        let back = permute_matrix(&p, &ord.inverse()).unwrap();
        assert!(back.bit_eq(&t));
        assert_eq!(permute_matrix(&t, &NeuronOrdering::identity(4)).unwrap(), t);
        assert!(permute_matrix(&t, &NeuronOrdering::identity(3)).is_err());
    }

    #[test]
    fn gather_scatter_roundtrip() {
        let ord = NeuronOrdering::from_order(vec![2, 0, 3, 1]).unwrap();
        let v = [10, 11, 12, 13];
        let g = ord.gather(&v);
        assert_eq!(g, vec![12, 10, 13, 11]);
        assert_eq!(ord.scatter(&g), v.to_vec());
        assert!(NeuronOrdering::from_order(vec![0, 0]).is_none());
    }

    #[test]
    fn proximity_validation() {
        assert!(matches!(
            ProximityMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(ProximityError::Asymmetric { row: 1, col: 0 })
        ));
        assert!(ProximityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-12, 0.0]]).is_ok());
        assert!(matches!(
            ProximityMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(ProximityError::NonzeroDiagonal(0))
        ));
        assert!(matches!(
            ProximityMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(ProximityError::InvalidDistance { .. })
        ));
        assert!(matches!(
            parse_proximity("0 1\n1 zero\n"),
            Err(ProximityError::Token { line: 2, .. })
        ));
        assert_eq!(
            parse_proximity("0 1.5\n1.5 0\n").unwrap().distance(0, 1),
            1.5
        );
    }
}
