//! Fragment-expansion retrieval from single-neuron clamps.
//!
//! For a trigger neuron the weight matrix is permuted into the trigger's
//! proximity order and split as `T = B + Bᵗ` with `B` strictly lower
//! triangular. Clamping the trigger to `±1` and feeding the fragment back
//! through `B` appends one component per step:
//!
//! ```text
//! f[k] = sgn( Σ_{j<k} B[k][j] · f[j] )
//! ```
//!
//! Zero activations resolve to the clamp polarity, which makes the whole
//! trace an odd function of the clamp.

use thiserror::Error;

use crate::matrix::SquareMatrix;
use crate::memory::{InterconnectionMatrix, MemorySet, MemoryVector};
use crate::par::Execution;
use crate::proximity::{
    ordering_for, permute_matrix, NeuronOrdering, ProximityError, ProximityMatrix,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RetrievalError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("permuted matrix is not symmetric")]
    Asymmetric,
    #[error("permuted matrix has a nonzero diagonal")]
    NonzeroDiagonal,
    #[error(transparent)]
    Proximity(#[from] ProximityError),
}

/// Sign of a clamp, and of any bipolar component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub const BOTH: [Polarity; 2] = [Polarity::Positive, Polarity::Negative];

    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }

    /// Panics on zero.
    #[inline]
    pub fn from_sign(v: i8) -> Polarity {
        match v {
            1 => Polarity::Positive,
            -1 => Polarity::Negative,
            _ => panic!("not a bipolar value: {v}"),
        }
    }

    #[inline]
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    /// Column index used by per-polarity tables: 0 for `+1`, 1 for `-1`.
    #[inline]
    pub fn slot(self) -> usize {
        match self {
            Polarity::Positive => 0,
            Polarity::Negative => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        }
    }
}

/// Threshold with ties resolved to `tie`.
#[inline]
pub fn sgn(activation: f64, tie: Polarity) -> Polarity {
    if activation > 0.0 {
        Polarity::Positive
    } else if activation < 0.0 {
        Polarity::Negative
    } else {
        tie
    }
}

/// `Σ weights[j] · inputs[j]`, summed in ascending `j`.
///
/// Both the generator and the delta rule go through this function so that
/// a converged row reproduces the same activation bit-for-bit on
/// regeneration.
#[inline]
pub fn activation(weights: &[f64], inputs: &[i8]) -> f64 {
    debug_assert_eq!(weights.len(), inputs.len());
    weights
        .iter()
        .zip(inputs)
        .fold(0.0, |acc, (w, &u)| acc + w * f64::from(u))
}

/// Strictly lower-triangular half of a permuted weight matrix, together
/// with the ordering that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrixView {
    b: SquareMatrix,
    ordering: NeuronOrdering,
}

impl BMatrixView {
    #[inline]
    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &SquareMatrix {
        &self.b
    }

    #[inline]
    pub fn ordering(&self) -> &NeuronOrdering {
        &self.ordering
    }

    /// The `k` weights feeding proximity position `k`.
    #[inline]
    pub fn row_prefix(&self, k: usize) -> &[f64] {
        &self.b.row(k)[..k]
    }

    /// Only the strict lower triangle is reachable, so edits cannot break
    /// triangularity.
    #[inline]
    pub fn row_prefix_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.b.row_mut(k)[..k]
    }

    /// `b + bᵗ`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.dim();
        SquareMatrix::from_fn(n, |i, j| self.b[(i, j)] + self.b[(j, i)])
    }

    pub fn is_strictly_lower(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| self.b[(i, j)] == 0.0))
    }
}

/// Takes the strict lower triangle of `t_permuted`.
pub fn extract_b(
    t_permuted: &InterconnectionMatrix,
    ord: &NeuronOrdering,
) -> Result<BMatrixView, RetrievalError> {
    let m = t_permuted.matrix();
    if m.dim() != ord.len() {
        return Err(RetrievalError::DimensionMismatch {
            expected: m.dim(),
            found: ord.len(),
        });
    }
    if !m.is_symmetric() {
        return Err(RetrievalError::Asymmetric);
    }
    if !m.has_zero_diagonal() {
        return Err(RetrievalError::NonzeroDiagonal);
    }
    let b = SquareMatrix::from_fn(m.dim(), |i, j| if j < i { m[(i, j)] } else { 0.0 });
    Ok(BMatrixView {
        b,
        ordering: ord.clone(),
    })
}

/// Permutes `t` into `trigger`'s proximity order and extracts its B-matrix.
pub fn view_for(
    t: &InterconnectionMatrix,
    prox: &ProximityMatrix,
    trigger: usize,
) -> Result<BMatrixView, RetrievalError> {
    let ord = ordering_for(trigger, prox)?;
    let permuted = permute_matrix(t, &ord)?;
    extract_b(&permuted, &ord)
}

/// One run of the generator from a single clamped neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalTrace {
    pub trigger: usize,
    pub polarity: Polarity,
    /// Generated components in proximity order; the fragment after `k`
    /// steps is `sequence[..k]`.
    pub sequence: Vec<i8>,
    /// `activations[k - 1]` is the activation that produced `sequence[k]`.
    pub activations: Vec<f64>,
    /// `sequence` mapped back to original neuron order.
    pub final_vector: MemoryVector,
}

impl RetrievalTrace {
    /// Fragment of length `len` (1..=n).
    pub fn fragment(&self, len: usize) -> &[i8] {
        &self.sequence[..len]
    }

    /// All fragments, shortest first.
    pub fn fragments(&self) -> impl Iterator<Item = &[i8]> {
        (1..=self.sequence.len()).map(move |k| &self.sequence[..k])
    }
}

pub fn generate(view: &BMatrixView, polarity: Polarity) -> RetrievalTrace {
    let n = view.dim();
    let mut sequence = Vec::with_capacity(n);
    let mut activations = Vec::with_capacity(n.saturating_sub(1));
    sequence.push(polarity.value());
    for k in 1..n {
        let a = activation(view.row_prefix(k), &sequence);
        activations.push(a);
        sequence.push(sgn(a, polarity).value());
    }
    let final_vector = MemoryVector::from_bipolar(view.ordering().scatter(&sequence));
    RetrievalTrace {
        trigger: view.ordering().trigger(),
        polarity,
        sequence,
        activations,
        final_vector,
    }
}

/// A stored memory recovered by a trace, with the sign it appeared under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Match {
    pub memory: usize,
    pub sign: Polarity,
}

/// First stored memory equal to `vector` or to its negation.
pub fn match_memory(
    vector: &MemoryVector,
    memories: &MemorySet,
) -> Result<Option<Match>, RetrievalError> {
    if vector.len() != memories.dimension() {
        return Err(RetrievalError::DimensionMismatch {
            expected: memories.dimension(),
            found: vector.len(),
        });
    }
    Ok(memories.iter().enumerate().find_map(|(memory, m)| {
        if m == vector {
            Some(Match {
                memory,
                sign: Polarity::Positive,
            })
        } else if m.is_complement_of(vector) {
            Some(Match {
                memory,
                sign: Polarity::Negative,
            })
        } else {
            None
        }
    }))
}

/// Outcome of clamping every neuron with both polarities.
///
/// Per-neuron tables are indexed `[neuron][polarity.slot()]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport {
    pub outputs: Vec<[MemoryVector; 2]>,
    pub matches: Vec<[Option<Match>; 2]>,
    pub active: Vec<bool>,
    pub retrieved: Vec<bool>,
    /// Number of neurons that retrieve each memory under either polarity.
    pub frequency: Vec<usize>,
    /// Percentage of memories retrieved by at least one clamp.
    pub rate: f64,
}

impl RetrievalReport {
    /// Classifies the generated vectors of every `(neuron, polarity)` clamp.
    pub fn classify(
        outputs: Vec<[MemoryVector; 2]>,
        memories: &MemorySet,
    ) -> Result<Self, RetrievalError> {
        let m = memories.len();
        let mut matches = Vec::with_capacity(outputs.len());
        let mut active = Vec::with_capacity(outputs.len());
        let mut retrieved = vec![false; m];
        let mut frequency = vec![0; m];
        for pair in &outputs {
            let found = [
                match_memory(&pair[0], memories)?,
                match_memory(&pair[1], memories)?,
            ];
            let mut seen = vec![false; m];
            for hit in found.iter().flatten() {
                retrieved[hit.memory] = true;
                if !seen[hit.memory] {
                    seen[hit.memory] = true;
                    frequency[hit.memory] += 1;
                }
            }
            active.push(found.iter().any(Option::is_some));
            matches.push(found);
        }
        let count = retrieved.iter().filter(|&&r| r).count();
        Ok(RetrievalReport {
            outputs,
            matches,
            active,
            retrieved,
            frequency,
            rate: 100.0 * count as f64 / m as f64,
        })
    }

    #[inline]
    pub fn neuron_count(&self) -> usize {
        self.active.len()
    }

    #[inline]
    pub fn memory_count(&self) -> usize {
        self.retrieved.len()
    }

    pub fn retrieved_count(&self) -> usize {
        self.retrieved.iter().filter(|&&r| r).count()
    }

    pub fn is_complete(&self) -> bool {
        self.retrieved.iter().all(|&r| r)
    }

    pub fn unretrieved(&self) -> Vec<usize> {
        (0..self.memory_count())
            .filter(|&j| !self.retrieved[j])
            .collect()
    }

    /// Memory retrieved at `neuron` under either polarity, `+1` first.
    pub fn matched_memory(&self, neuron: usize) -> Option<usize> {
        self.matches[neuron]
            .iter()
            .flatten()
            .map(|hit| hit.memory)
            .next()
    }

    pub fn output(&self, neuron: usize, polarity: Polarity) -> &MemoryVector {
        &self.outputs[neuron][polarity.slot()]
    }
}

/// Clamps every neuron with both polarities and classifies the results.
pub fn evaluate_network(
    t: &InterconnectionMatrix,
    memories: &MemorySet,
    prox: &ProximityMatrix,
) -> Result<RetrievalReport, RetrievalError> {
    evaluate_network_with(t, memories, prox, Execution::default())
}

pub fn evaluate_network_with(
    t: &InterconnectionMatrix,
    memories: &MemorySet,
    prox: &ProximityMatrix,
    exec: Execution,
) -> Result<RetrievalReport, RetrievalError> {
    let n = t.dim();
    for found in [memories.dimension(), prox.dim()] {
        if found != n {
            return Err(RetrievalError::DimensionMismatch { expected: n, found });
        }
    }
    let outputs = exec
        .map_range(n, |trigger| {
            let view = view_for(t, prox, trigger)?;
            Ok([
                generate(&view, Polarity::Positive).final_vector,
                generate(&view, Polarity::Negative).final_vector,
            ])
        })
        .into_iter()
        .collect::<Result<Vec<_>, RetrievalError>>()?;
    RetrievalReport::classify(outputs, memories)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{build_t_matrix, validate_memories};
    use crate::proximity::linear_proximity;

    fn two_memory_t() -> (MemorySet, InterconnectionMatrix) {
        let set = validate_memories(&[vec![1, 1, -1, -1], vec![1, -1, 1, -1]]).unwrap();
        let t = build_t_matrix(&set);
        (set, t)
    }

    #[test]
    fn sgn_ties_follow_polarity() {
        assert_eq!(sgn(2.5, Polarity::Positive), Polarity::Positive);
        assert_eq!(sgn(-0.1, Polarity::Positive), Polarity::Negative);
        assert_eq!(sgn(0.0, Polarity::Negative), Polarity::Negative);
        assert_eq!(sgn(-0.0, Polarity::Positive), Polarity::Positive);
    }

    #[test]
    fn extract_small_matrices() {
        let t = InterconnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let view = extract_b(&t, &NeuronOrdering::identity(2)).unwrap();
        assert_eq!(
            view.matrix().to_rows(),
            vec![vec![0.0, 0.0], vec![1.0, 0.0]]
        );
        let zero = extract_b(
            &InterconnectionMatrix::zeros(3),
            &NeuronOrdering::identity(3),
        )
        .unwrap();
        assert_eq!(zero.matrix(), &SquareMatrix::zeros(3));
        assert!(matches!(
            extract_b(&t, &NeuronOrdering::identity(3)),
            Err(RetrievalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn extract_two_memory_permuted() {
        let (_, t) = two_memory_t();
        let view = view_for(&t, &linear_proximity(4).unwrap(), 2).unwrap();
        assert!(view.is_strictly_lower());
        assert_eq!(
            view.matrix().to_rows(),
            vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![-2.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, -2.0, 0.0],
            ]
        );
        let ord = ordering_for(2, &linear_proximity(4).unwrap()).unwrap();
        assert!(view
            .reconstruct()
            .bit_eq(permute_matrix(&t, &ord).unwrap().matrix()));
    }

    #[test]
    fn hand_trace_two_memory_trigger_one() {
        let (set, t) = two_memory_t();
        let view = view_for(&t, &linear_proximity(4).unwrap(), 0).unwrap();
        let trace = generate(&view, Polarity::Positive);
        assert_eq!(trace.activations, vec![0.0, -2.0, -2.0]);
        assert_eq!(trace.final_vector.entries(), &[1, 1, -1, -1]);
        assert_eq!(
            match_memory(&trace.final_vector, &set).unwrap(),
            Some(Match {
                memory: 0,
                sign: Polarity::Positive
            })
        );
        assert_eq!(trace.fragment(1), &[1]);
        assert_eq!(trace.fragments().count(), 4);
    }

    #[test]
    fn negative_clamp_negates_trace() {
        let (_, t) = two_memory_t();
        let prox = linear_proximity(4).unwrap();
        for trigger in 0..4 {
            let view = view_for(&t, &prox, trigger).unwrap();
            let plus = generate(&view, Polarity::Positive);
            let minus = generate(&view, Polarity::Negative);
            assert_eq!(minus.final_vector, plus.final_vector.negated());
        }
    }

    #[test]
    fn match_memory_cases() {
        let (set, _) = two_memory_t();
        let v = |e: Vec<i8>| MemoryVector::from_bipolar(e);
        assert_eq!(
            match_memory(&v(vec![1, 1, -1, -1]), &set).unwrap(),
            Some(Match {
                memory: 0,
                sign: Polarity::Positive
            })
        );
        assert_eq!(
            match_memory(&v(vec![-1, 1, -1, 1]), &set).unwrap(),
            Some(Match {
                memory: 1,
                sign: Polarity::Negative
            })
        );
        assert_eq!(match_memory(&v(vec![1, 1, 1, 1]), &set).unwrap(), None);
        assert!(match_memory(&v(vec![1, 1]), &set).is_err());
    }

    #[test]
    fn single_memory_is_fully_retrieved() {
        let set = validate_memories(&[vec![1, -1, -1, 1, 1, -1]]).unwrap();
        let t = build_t_matrix(&set);
        let report = evaluate_network(&t, &set, &linear_proximity(6).unwrap()).unwrap();
        assert_eq!(report.rate, 100.0);
        assert!(report.active.iter().all(|&a| a));
        assert_eq!(report.frequency, vec![6]);
    }

    #[test]
    fn zero_weights_retrieve_nothing_informative() {
        // With all-zero weights every clamp yields the constant vector, which
        // is not stored here.
        let set = validate_memories(&[vec![1, -1, 1], vec![1, 1, -1]]).unwrap();
        let report = evaluate_network(
            &InterconnectionMatrix::zeros(3),
            &set,
            &linear_proximity(3).unwrap(),
        )
        .unwrap();
        assert_eq!(report.rate, 0.0);
        assert!(report.active.iter().all(|&a| !a));
        assert_eq!(report.unretrieved(), vec![0, 1]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (set, t) = two_memory_t();
        let prox = linear_proximity(4).unwrap();
        assert_eq!(
            evaluate_network_with(&t, &set, &prox, Execution::Sequential).unwrap(),
            evaluate_network_with(&t, &set, &prox, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let (set, t) = two_memory_t();
        assert!(matches!(
            evaluate_network(&t, &set, &linear_proximity(5).unwrap()),
            Err(RetrievalError::DimensionMismatch {
                expected: 4,
                found: 5
            })
        ));
    }
}
