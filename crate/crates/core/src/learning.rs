//! Delta-rule learning that raises the network's retrieval rate.
//!
//! The loop repeatedly picks a node that retrieves nothing (or, when every
//! node is active but some memories are still missing, a node retrieving the
//! most common memory), picks the unretrieved memory nearest in Hamming
//! distance to what that node currently produces, and teaches the node's
//! B-matrix rows with the Widrow-Hoff rule until regeneration yields the
//! target. The taught B-matrix is folded back into the shared weight
//! matrix; the change is kept only if the retrieval rate strictly rises,
//! otherwise the weights are restored and the next target or node is tried.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::SquareMatrix;
use crate::memory::{InterconnectionMatrix, MemorySet, MemoryVector};
use crate::proximity::ProximityMatrix;
use crate::retrieval::{
    activation, evaluate_network, generate, sgn, view_for, BMatrixView, Polarity, RetrievalError,
    RetrievalReport,
};

pub const DEFAULT_ETA: f64 = 0.1;
pub const DEFAULT_MAX_INNER: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearningError {
    #[error("invalid learning configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("fallback node requested but {0}")]
    NoFallback(&'static str),
    #[error("every memory is already retrieved")]
    NothingToRetrieve,
    #[error("target sign does not match the clamp at trigger {trigger}")]
    ClampMismatch { trigger: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningConfig {
    /// Widrow-Hoff learning rate.
    pub eta: f64,
    /// Update cap per B-matrix row.
    pub max_inner: usize,
    /// Teach-attempt budget; `None` means `10 · n · m`.
    pub max_outer: Option<usize>,
    /// Seed for shuffling equally distant targets. `None` keeps ascending
    /// memory index order.
    pub tie_seed: Option<u64>,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            eta: DEFAULT_ETA,
            max_inner: DEFAULT_MAX_INNER,
            max_outer: None,
            tie_seed: None,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<(), LearningError> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(LearningError::InvalidConfig(
                "eta must be positive and finite",
            ));
        }
        if self.max_inner < 1 {
            return Err(LearningError::InvalidConfig("max_inner must be at least 1"));
        }
        if self.max_outer == Some(0) {
            return Err(LearningError::InvalidConfig("max_outer must be at least 1"));
        }
        Ok(())
    }

    pub fn resolved_max_outer(&self, nodes: usize, memories: usize) -> usize {
        self.max_outer.unwrap_or(10 * nodes * memories).max(1)
    }
}

/// Neurons retrieving no memory under either polarity, ascending.
pub fn inactive_nodes(report: &RetrievalReport) -> Vec<usize> {
    (0..report.neuron_count())
        .filter(|&i| !report.active[i])
        .collect()
}

/// Lowest-index neuron whose retrieved memory has the highest frequency.
/// Only meaningful when every neuron is active yet some memory is missing.
pub fn fallback_node(report: &RetrievalReport) -> Result<usize, LearningError> {
    if report.is_complete() {
        return Err(LearningError::NoFallback(
            "the retrieval rate is already 100",
        ));
    }
    if report.active.iter().any(|&a| !a) {
        return Err(LearningError::NoFallback("inactive neurons exist"));
    }
    let best = report.frequency.iter().copied().max().unwrap_or(0);
    (0..report.neuron_count())
        .find(|&i| {
            report.matches[i]
                .iter()
                .flatten()
                .any(|hit| report.frequency[hit.memory] == best)
        })
        .ok_or(LearningError::NoFallback("no neuron matches a memory"))
}

/// `(memory, distance)` for every unretrieved memory, where distance is the
/// Hamming distance from the node's `+1` output to the nearer of the memory
/// and its complement. Sorted by distance, then memory index.
pub fn target_distances(
    node: usize,
    report: &RetrievalReport,
    memories: &MemorySet,
) -> Result<Vec<(usize, usize)>, LearningError> {
    let unretrieved = report.unretrieved();
    if unretrieved.is_empty() {
        return Err(LearningError::NothingToRetrieve);
    }
    let v = report.output(node, Polarity::Positive);
    let mut ranked: Vec<(usize, usize)> = unretrieved
        .into_iter()
        .map(|j| (j, v.complement_distance(memories.get(j))))
        .collect();
    ranked.sort_by_key(|&(j, d)| (d, j));
    Ok(ranked)
}

/// Unretrieved memories, nearest first.
pub fn rank_targets(
    node: usize,
    report: &RetrievalReport,
    memories: &MemorySet,
) -> Result<Vec<usize>, LearningError> {
    Ok(target_distances(node, report, memories)?
        .into_iter()
        .map(|(j, _)| j)
        .collect())
}

fn shuffle_ties(ranked: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(ranked.len());
    for group in ranked.chunk_by(|a, b| a.1 == b.1) {
        let mut ids: Vec<usize> = group.iter().map(|&(j, _)| j).collect();
        ids.shuffle(rng);
        out.extend(ids);
    }
    out
}

/// One Widrow-Hoff step `w ← w + eta · (desired − w·u) · u`. Returns the
/// error before the update.
pub fn lms_update(weights: &mut [f64], inputs: &[i8], desired: Polarity, eta: f64) -> f64 {
    let error = f64::from(desired.value()) - activation(weights, inputs);
    let step = eta * error;
    for (w, &u) in weights.iter_mut().zip(inputs) {
        *w += step * f64::from(u);
    }
    error
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowFit {
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Applies [`lms_update`] until the thresholded activation equals
/// `desired` or `config.max_inner` updates have been made.
///
/// `tie` is the sign assigned to an exactly-zero activation; it must match
/// the clamp polarity the row will be regenerated under.
pub fn widrow_hoff_row(
    row_prefix: &[f64],
    input_prefix: &[i8],
    desired: Polarity,
    tie: Polarity,
    config: &LearningConfig,
) -> RowFit {
    let mut weights = row_prefix.to_vec();
    let mut iterations = 0;
    loop {
        if sgn(activation(&weights, input_prefix), tie) == desired {
            return RowFit {
                weights,
                iterations,
                converged: true,
            };
        }
        if iterations == config.max_inner {
            return RowFit {
                weights,
                iterations,
                converged: false,
            };
        }
        lms_update(&mut weights, input_prefix, desired, config.eta);
        iterations += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeachOutcome {
    pub view: BMatrixView,
    /// Original neuron indices of the rows that were changed, in sweep order.
    pub rows_updated: Vec<usize>,
    /// Update count for each entry of `rows_updated`.
    pub iterations: Vec<usize>,
    pub converged: bool,
}

/// Teaches the trigger of `view` to regenerate `target_sign · target` from
/// a `+1` clamp.
///
/// Rows are swept nearest-first. Each row sees the already-corrected prefix
/// as its input, so only rows whose generated component disagrees with the
/// desired one are updated. Sweeping stops at the first row that fails to
/// converge.
pub fn teach_node(
    view: &BMatrixView,
    target: &MemoryVector,
    target_sign: Polarity,
    config: &LearningConfig,
) -> Result<TeachOutcome, LearningError> {
    let n = view.dim();
    if target.len() != n {
        return Err(LearningError::DimensionMismatch {
            expected: n,
            found: target.len(),
        });
    }
    let ord = view.ordering().clone();
    let desired: Vec<i8> = ord
        .gather(target.entries())
        .into_iter()
        .map(|e| e * target_sign.value())
        .collect();
    if desired[0] != Polarity::Positive.value() {
        return Err(LearningError::ClampMismatch {
            trigger: ord.trigger(),
        });
    }

    let mut taught = view.clone();
    let mut rows_updated = Vec::new();
    let mut iterations = Vec::new();
    for k in 1..n {
        let want = Polarity::from_sign(desired[k]);
        let input = &desired[..k];
        if sgn(activation(taught.row_prefix(k), input), Polarity::Positive) == want {
            continue;
        }
        let fit = widrow_hoff_row(
            taught.row_prefix(k),
            input,
            want,
            Polarity::Positive,
            config,
        );
        taught.row_prefix_mut(k).copy_from_slice(&fit.weights);
        rows_updated.push(ord.neuron_at(k));
        iterations.push(fit.iterations);
        if !fit.converged {
            return Ok(TeachOutcome {
                view: taught,
                rows_updated,
                iterations,
                converged: false,
            });
        }
    }
    Ok(TeachOutcome {
        view: taught,
        rows_updated,
        iterations,
        converged: true,
    })
}

/// Rebuilds the full weight matrix in original neuron order from a view:
/// `T'[order[a]][order[b]] = (b + bᵗ)[a][b]`.
pub fn fold_back(view: &BMatrixView) -> InterconnectionMatrix {
    let sym = view.reconstruct();
    let ord = view.ordering();
    let n = view.dim();
    let t = SquareMatrix::from_fn(n, |i, j| sym[(ord.position_of(i), ord.position_of(j))]);
    InterconnectionMatrix::from_matrix_unchecked(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    RolledBack,
    RowUnteachable,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Accepted => "accepted",
            Outcome::RolledBack => "rolled_back",
            Outcome::RowUnteachable => "row_unteachable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Rate100,
    BudgetExhausted,
    OptionsExhausted,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Rate100 => "rate_100",
            Termination::BudgetExhausted => "budget_exhausted",
            Termination::OptionsExhausted => "options_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningStep {
    pub node: usize,
    pub target_memory: usize,
    pub target_sign: Polarity,
    pub rows_updated: Vec<usize>,
    pub inner_iterations: Vec<usize>,
    pub rate_before: f64,
    /// Equal to `rate_before` for unteachable rows, which are never evaluated.
    pub rate_after: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningLog {
    pub steps: Vec<LearningStep>,
    pub initial_rate: f64,
    pub final_rate: f64,
    pub termination: Termination,
    /// Full-network evaluations performed, including the initial one.
    pub evaluations: usize,
}

impl LearningLog {
    pub fn attempts(&self) -> usize {
        self.steps.len()
    }

    pub fn accepted(&self) -> impl Iterator<Item = &LearningStep> {
        self.steps.iter().filter(|s| s.outcome == Outcome::Accepted)
    }

    pub fn inner_iterations(&self) -> usize {
        self.steps.iter().flat_map(|s| &s.inner_iterations).sum()
    }
}

/// Hooks into each teach attempt. The default accepts a change only when
/// it strictly increases the number of retrieved memories.
///
/// Policies that accept non-improving changes void the monotonicity
/// guarantees of [`LearningLog`].
pub trait StepPolicy {
    fn accept(&mut self, before: &RetrievalReport, after: &RetrievalReport) -> bool {
        after.retrieved_count() > before.retrieved_count()
    }

    /// Called with the committed weights before an attempt starts.
    fn before_attempt(&mut self, _weights: &InterconnectionMatrix) {}

    /// Called with the committed weights once the attempt is resolved.
    fn after_attempt(&mut self, _step: &LearningStep, _weights: &InterconnectionMatrix) {}
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StrictImprovement;

impl StepPolicy for StrictImprovement {}

pub fn learning_loop(
    t: &InterconnectionMatrix,
    memories: &MemorySet,
    prox: &ProximityMatrix,
    config: &LearningConfig,
) -> Result<(InterconnectionMatrix, LearningLog), LearningError> {
    learning_loop_with(t, memories, prox, config, &mut StrictImprovement)
}

pub fn learning_loop_with<P: StepPolicy + ?Sized>(
    t: &InterconnectionMatrix,
    memories: &MemorySet,
    prox: &ProximityMatrix,
    config: &LearningConfig,
    policy: &mut P,
) -> Result<(InterconnectionMatrix, LearningLog), LearningError> {
    config.validate()?;
    let n = t.dim();
    let budget = config.resolved_max_outer(n, memories.len());
    let mut rng = config.tie_seed.map(ChaCha8Rng::seed_from_u64);

    let mut weights = t.clone();
    let mut report = evaluate_network(&weights, memories, prox)?;
    let mut evaluations = 1;
    let initial_rate = report.rate;
    let mut steps = Vec::new();

    let termination = 'search: loop {
        if report.is_complete() {
            break Termination::Rate100;
        }
        let mut candidates = inactive_nodes(&report);
        if candidates.is_empty() {
            candidates.push(fallback_node(&report)?);
        }

        for node in candidates {
            let ranked = target_distances(node, &report, memories)?;
            let targets = match rng.as_mut() {
                Some(rng) => shuffle_ties(&ranked, rng),
                None => ranked.iter().map(|&(j, _)| j).collect(),
            };
            for target_memory in targets {
                if steps.len() >= budget {
                    break 'search Termination::BudgetExhausted;
                }
                policy.before_attempt(&weights);
                let target = memories.get(target_memory);
                let target_sign = Polarity::from_sign(target.get(node));
                let view = view_for(&weights, prox, node)?;
                let taught = teach_node(&view, target, target_sign, config)?;

                let mut step = LearningStep {
                    node,
                    target_memory,
                    target_sign,
                    rows_updated: taught.rows_updated,
                    inner_iterations: taught.iterations,
                    rate_before: report.rate,
                    rate_after: report.rate,
                    outcome: Outcome::RowUnteachable,
                };
                if !taught.converged {
                    policy.after_attempt(&step, &weights);
                    steps.push(step);
                    continue;
                }

                let snapshot = weights.clone();
                weights = fold_back(&taught.view);
                let candidate = evaluate_network(&weights, memories, prox)?;
                evaluations += 1;
                step.rate_after = candidate.rate;
                if policy.accept(&report, &candidate) {
                    step.outcome = Outcome::Accepted;
                    report = candidate;
                    policy.after_attempt(&step, &weights);
                    steps.push(step);
                    continue 'search;
                }
                weights = snapshot;
                step.outcome = Outcome::RolledBack;
                policy.after_attempt(&step, &weights);
                steps.push(step);
            }
        }
        break Termination::OptionsExhausted;
    };

    let log = LearningLog {
        steps,
        initial_rate,
        final_rate: report.rate,
        termination,
        evaluations,
    };
    Ok((weights, log))
}

/// Regenerates from `node` with a `+1` clamp.
pub fn regenerate(
    t: &InterconnectionMatrix,
    prox: &ProximityMatrix,
    node: usize,
) -> Result<MemoryVector, LearningError> {
    let view = view_for(t, prox, node)?;
    Ok(generate(&view, Polarity::Positive).final_vector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{build_t_matrix, validate_memories};
    use crate::proximity::{linear_proximity, ordering_for, permute_matrix, NeuronOrdering};
    use crate::retrieval::{extract_b, Match};

    fn report_with(active: Vec<bool>, matches: Vec<Option<usize>>, m: usize) -> RetrievalReport {
        let n = active.len();
        let mut frequency = vec![0; m];
        let mut retrieved = vec![false; m];
        for j in matches.iter().flatten() {
            frequency[*j] += 1;
            retrieved[*j] = true;
        }
        let dummy = MemoryVector::from_bipolar(vec![1; 2]);
        RetrievalReport {
            outputs: vec![[dummy.clone(), dummy.negated()]; n],
            matches: matches
                .iter()
                .map(|hit| {
                    let h = hit.map(|memory| Match {
                        memory,
                        sign: Polarity::Positive,
                    });
                    [
                        h,
                        h.map(|x| Match {
                            sign: Polarity::Negative,
                            ..x
                        }),
                    ]
                })
                .collect(),
            active,
            rate: 100.0 * retrieved.iter().filter(|&&r| r).count() as f64 / m as f64,
            retrieved,
            frequency,
        }
    }

    #[test]
    fn inactive_node_listing() {
        let r = report_with(vec![true; 3], vec![Some(0); 3], 1);
        assert!(inactive_nodes(&r).is_empty());
        let r = report_with(
            vec![true, false, true, true, false],
            vec![Some(0), None, Some(0), Some(0), None],
            2,
        );
        assert_eq!(inactive_nodes(&r), vec![1, 4]);
    }

    #[test]
    fn fallback_prefers_most_frequent_memory() {
        let mut hits = vec![Some(1), Some(1)];
        hits.extend(vec![Some(0); 6]);
        let r = report_with(vec![true; 8], hits, 3);
        assert_eq!(fallback_node(&r).unwrap(), 2);

        let r = report_with(vec![true; 4], vec![Some(0); 4], 2);
        assert_eq!(fallback_node(&r).unwrap(), 0);

        let r = report_with(vec![true; 4], vec![Some(1), Some(0), Some(0), Some(1)], 3);
        assert_eq!(fallback_node(&r).unwrap(), 0);
    }

    #[test]
    fn fallback_preconditions() {
        let complete = report_with(vec![true; 2], vec![Some(0), Some(0)], 1);
        assert!(matches!(
            fallback_node(&complete),
            Err(LearningError::NoFallback(_))
        ));
        let with_inactive = report_with(vec![true, false], vec![Some(0), None], 2);
        assert!(matches!(
            fallback_node(&with_inactive),
            Err(LearningError::NoFallback(_))
        ));
    }

    #[test]
    fn targets_ranked_by_complement_distance() {
        let set = validate_memories(&[vec![1, 1, -1, -1], vec![1, -1, 1, -1], vec![-1, -1, -1, 1]])
            .unwrap();
        let mut r = report_with(vec![false], vec![None], 3);
        r.outputs[0] = [
            MemoryVector::from_bipolar(vec![1, 1, 1, -1]),
            MemoryVector::from_bipolar(vec![-1, -1, -1, 1]),
        ];
        // (1,1,1,-1) vs m0: 1, m1: 1, m2 complement (1,1,1,-1): 0
        assert_eq!(
            target_distances(0, &r, &set).unwrap(),
            vec![(2, 0), (0, 1), (1, 1)]
        );
        r.retrieved[2] = true;
        assert_eq!(rank_targets(0, &r, &set).unwrap(), vec![0, 1]);
        r.retrieved = vec![true; 3];
        assert_eq!(
            rank_targets(0, &r, &set).unwrap_err(),
            LearningError::NothingToRetrieve
        );
    }

    #[test]
    fn lms_first_update_matches_hand_computation() {
        let mut w = vec![0.0, -2.0];
        let err = lms_update(&mut w, &[1, 1], Polarity::Positive, 0.1);
        assert_eq!(err, 3.0);
        assert!((w[0] - 0.3).abs() < 1e-12 && (w[1] + 1.7).abs() < 1e-12);
        let act = activation(&w, &[1, 1]);
        assert!((act + 1.4).abs() < 1e-12);
        assert!((1.0 - act - 2.4).abs() < 1e-12);
    }

    #[test]
    fn widrow_hoff_already_satisfied() {
        let cfg = LearningConfig::default();
        let fit = widrow_hoff_row(
            &[1.0, 0.5],
            &[1, 1],
            Polarity::Positive,
            Polarity::Positive,
            &cfg,
        );
        assert_eq!(fit.iterations, 0);
        assert!(fit.converged);
        assert_eq!(fit.weights, vec![1.0, 0.5]);
    }

    #[test]
    fn widrow_hoff_converges_and_caps() {
        let cfg = LearningConfig::default();
        let fit = widrow_hoff_row(
            &[0.0, -2.0],
            &[1, 1],
            Polarity::Positive,
            Polarity::Positive,
            &cfg,
        );
        assert!(fit.converged);
        assert!(activation(&fit.weights, &[1, 1]) > 0.0);
        // error contracts by 0.8 per step from 3: activation 1 - 3*0.8^k > 0
        // first at k = 5
        assert_eq!(fit.iterations, 5);

        let capped = LearningConfig {
            max_inner: 2,
            ..LearningConfig::default()
        };
        let fit = widrow_hoff_row(
            &[0.0, -2.0],
            &[1, 1],
            Polarity::Positive,
            Polarity::Positive,
            &capped,
        );
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 2);
    }

    #[test]
    fn zero_activation_counts_only_for_tie_polarity() {
        let cfg = LearningConfig::default();
        let fit = widrow_hoff_row(
            &[1.0, -1.0],
            &[1, 1],
            Polarity::Negative,
            Polarity::Negative,
            &cfg,
        );
        assert_eq!(fit.iterations, 0);
        let fit = widrow_hoff_row(
            &[1.0, -1.0],
            &[1, 1],
            Polarity::Negative,
            Polarity::Positive,
            &cfg,
        );
        assert!(fit.iterations > 0);
        assert!(activation(&fit.weights, &[1, 1]) < 0.0);
    }

    fn two_memory() -> (MemorySet, InterconnectionMatrix) {
        let set = validate_memories(&[vec![1, 1, -1, -1], vec![1, -1, 1, -1]]).unwrap();
        let t = build_t_matrix(&set);
        (set, t)
    }

    #[test]
    fn teaching_an_already_retrieved_target_is_a_no_op() {
        let (set, t) = two_memory();
        let view = view_for(&t, &linear_proximity(4).unwrap(), 0).unwrap();
        let out = teach_node(
            &view,
            set.get(0),
            Polarity::Positive,
            &LearningConfig::default(),
        )
        .unwrap();
        assert!(out.converged);
        assert!(out.rows_updated.is_empty());
        assert_eq!(out.view, view);
    }

    #[test]
    fn teaching_second_memory_at_first_node() {
        let (set, t) = two_memory();
        let prox = linear_proximity(4).unwrap();
        let view = view_for(&t, &prox, 0).unwrap();
        let before = generate(&view, Polarity::Positive).final_vector;
        assert_eq!(&before, set.get(0));
        let out = teach_node(
            &view,
            set.get(1),
            Polarity::Positive,
            &LearningConfig::default(),
        )
        .unwrap();
        assert!(out.converged);
        assert!(out.view.is_strictly_lower());
        let after = generate(&out.view, Polarity::Positive).final_vector;
        assert_eq!(&after, set.get(1));
        // m1 differs from m0 at neurons 1 and 2, but once row 1 yields -1 the
        // activation of row 2 is 0·1 + (-2)·(-1) = 2, already +1.
        assert_eq!(out.rows_updated, vec![1]);
        assert_eq!(out.iterations, vec![1]);
    }

    #[test]
    fn teach_rejects_clamp_mismatch() {
        let (set, t) = two_memory();
        let view = view_for(&t, &linear_proximity(4).unwrap(), 0).unwrap();
        assert_eq!(
            teach_node(
                &view,
                set.get(0),
                Polarity::Negative,
                &LearningConfig::default()
            )
            .unwrap_err(),
            LearningError::ClampMismatch { trigger: 0 }
        );
    }

    #[test]
    fn fold_back_roundtrips() {
        let (set, t) = two_memory();
        let prox = linear_proximity(4).unwrap();
        let identity = extract_b(&t, &NeuronOrdering::identity(4)).unwrap();
        assert!(fold_back(&identity).bit_eq(&t));
        for trigger in 0..4 {
            let ord = ordering_for(trigger, &prox).unwrap();
            let view = extract_b(&permute_matrix(&t, &ord).unwrap(), &ord).unwrap();
            assert!(fold_back(&view).bit_eq(&t));

            let target = set.get(1);
            let sign = Polarity::from_sign(target.get(trigger));
            let taught = teach_node(&view, target, sign, &LearningConfig::default()).unwrap();
            let folded = fold_back(&taught.view);
            assert!(folded.matrix().is_symmetric() && folded.matrix().has_zero_diagonal());
            let again = extract_b(&permute_matrix(&folded, &ord).unwrap(), &ord).unwrap();
            assert!(again.matrix().bit_eq(taught.view.matrix()));
        }
    }

    #[test]
    fn perfect_network_needs_no_steps() {
        let set = validate_memories(&[vec![1, -1, 1, 1, -1]]).unwrap();
        let t = build_t_matrix(&set);
        let (after, log) = learning_loop(
            &t,
            &set,
            &linear_proximity(5).unwrap(),
            &LearningConfig::default(),
        )
        .unwrap();
        assert!(log.steps.is_empty());
        assert_eq!(log.termination, Termination::Rate100);
        assert!(after.bit_eq(&t));
        assert_eq!(log.evaluations, 1);
    }

    #[test]
    fn config_validation() {
        let bad = LearningConfig {
            eta: 0.0,
            ..LearningConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LearningConfig {
            max_inner: 0,
            ..LearningConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LearningConfig {
            max_outer: Some(0),
            ..LearningConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(LearningConfig::default().resolved_max_outer(16, 4), 640);
    }

    #[test]
    fn tie_shuffle_keeps_distance_groups() {
        let ranked = vec![(3, 0), (0, 1), (1, 1), (2, 1), (4, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = shuffle_ties(&ranked, &mut rng);
        assert_eq!(out[0], 3);
        assert_eq!(out[4], 4);
        let mut mid = out[1..4].to_vec();
        mid.sort();
        assert_eq!(mid, vec![0, 1, 2]);
    }
}
