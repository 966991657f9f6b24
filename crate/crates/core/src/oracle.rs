//! Brute-force reference implementations for cross-checking on small
//! networks.
//!
//! Nothing here calls into the matrix, proximity or retrieval code paths:
//! orderings, outer products and activations are recomputed with plain
//! nested loops over the original weights. Only the domain types are shared.

use thiserror::Error;

use crate::memory::{InterconnectionMatrix, MemorySet, MemoryVector};
use crate::proximity::ProximityMatrix;
use crate::retrieval::{Match, Polarity, RetrievalReport};

/// Largest network [`oracle_evaluate`] accepts.
pub const ORACLE_MAX_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle limited to {max} nodes, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("dimension mismatch")]
    DimensionMismatch,
}

/// `T[i][j] = Σ_k x_k[i] · x_k[j]` for `i ≠ j`, zero on the diagonal.
pub fn oracle_t_matrix(memories: &MemorySet) -> InterconnectionMatrix {
    let n = memories.dimension();
    let mut rows = vec![vec![0.0f64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let mut sum = 0i64;
            for x in memories.iter() {
                sum += i64::from(x.entries()[i]) * i64::from(x.entries()[j]);
            }
            *cell = sum as f64;
        }
    }
    InterconnectionMatrix::from_rows(&rows).expect("outer-product sum is symmetric")
}

#[allow(clippy::needless_range_loop)]
fn oracle_order(prox: &ProximityMatrix, trigger: usize) -> Vec<usize> {
    // selection sort: trigger first, then repeatedly the nearest remaining
    // neuron, lowest index on ties
    let n = prox.dim();
    let mut used = vec![false; n];
    let mut order = vec![trigger];
    used[trigger] = true;
    while order.len() < n {
        let mut best: Option<usize> = None;
        for j in 0..n {
            if used[j] {
                continue;
            }
            best = match best {
                None => Some(j),
                Some(b) if prox.distance(trigger, j) < prox.distance(trigger, b) => Some(j),
                keep => keep,
            };
        }
        let b = best.expect("a neuron remains");
        used[b] = true;
        order.push(b);
    }
    order
}

fn oracle_trace(t: &InterconnectionMatrix, order: &[usize], clamp: i8) -> Vec<i8> {
    let n = order.len();
    let mut f = vec![clamp];
    for k in 1..n {
        let mut a = 0.0f64;
        for j in 0..k {
            a += t.get(order[k], order[j]) * f64::from(f[j]);
        }
        let s = if a > 0.0 {
            1
        } else if a < 0.0 {
            -1
        } else {
            clamp
        };
        f.push(s);
    }
    let mut out = vec![0i8; n];
    for (k, &neuron) in order.iter().enumerate() {
        out[neuron] = f[k];
    }
    out
}

fn oracle_match(v: &[i8], memories: &MemorySet) -> Option<Match> {
    for (j, m) in memories.iter().enumerate() {
        let e = m.entries();
        if (0..v.len()).all(|i| e[i] == v[i]) {
            return Some(Match {
                memory: j,
                sign: Polarity::Positive,
            });
        }
        if (0..v.len()).all(|i| e[i] == -v[i]) {
            return Some(Match {
                memory: j,
                sign: Polarity::Negative,
            });
        }
    }
    None
}

/// Recomputes every trace by direct summation over the original weights
/// and classifies the results.
pub fn oracle_evaluate(
    t: &InterconnectionMatrix,
    memories: &MemorySet,
    prox: &ProximityMatrix,
) -> Result<RetrievalReport, OracleError> {
    let n = t.dim();
    if n > ORACLE_MAX_NODES {
        return Err(OracleError::TooLarge {
            n,
            max: ORACLE_MAX_NODES,
        });
    }
    if memories.dimension() != n || prox.dim() != n {
        return Err(OracleError::DimensionMismatch);
    }
    let m = memories.len();
    let mut outputs = Vec::new();
    let mut matches = Vec::new();
    let mut active = Vec::new();
    let mut retrieved = vec![false; m];
    let mut frequency = vec![0usize; m];
    for trigger in 0..n {
        let order = oracle_order(prox, trigger);
        let plus = oracle_trace(t, &order, 1);
        let minus = oracle_trace(t, &order, -1);
        let hits = [
            oracle_match(&plus, memories),
            oracle_match(&minus, memories),
        ];
        let mut counted = Vec::new();
        for hit in hits.iter().flatten() {
            retrieved[hit.memory] = true;
            if !counted.contains(&hit.memory) {
                counted.push(hit.memory);
                frequency[hit.memory] += 1;
            }
        }
        active.push(hits[0].is_some() || hits[1].is_some());
        matches.push(hits);
        outputs.push([
            MemoryVector::from_bipolar(plus),
            MemoryVector::from_bipolar(minus),
        ]);
    }
    let count = retrieved.iter().filter(|r| **r).count();
    Ok(RetrievalReport {
        outputs,
        matches,
        active,
        retrieved,
        frequency,
        rate: 100.0 * count as f64 / m as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::validate_memories;
    use crate::proximity::linear_proximity;

    #[test]
    fn oracle_two_memory_matrix() {
        let set = validate_memories(&[vec![1, 1, -1, -1], vec![1, -1, 1, -1]]).unwrap();
        let t = oracle_t_matrix(&set);
        assert_eq!(t.get(0, 3), -2.0);
        assert_eq!(t.get(1, 2), -2.0);
        assert_eq!(t.get(0, 1), 0.0);
    }

    #[test]
    fn oracle_order_linear() {
        let p = linear_proximity(4).unwrap();
        assert_eq!(oracle_order(&p, 2), vec![2, 1, 3, 0]);
        assert_eq!(oracle_order(&p, 3), vec![3, 2, 1, 0]);
    }

    #[test]
    fn oracle_single_memory_complete() {
        let set = validate_memories(&[vec![1, -1, -1, 1, -1]]).unwrap();
        let t = oracle_t_matrix(&set);
        let r = oracle_evaluate(&t, &set, &linear_proximity(5).unwrap()).unwrap();
        assert_eq!(r.rate, 100.0);
        assert!(r.active.iter().all(|a| *a));
    }

    #[test]
    fn oracle_cost_guard() {
        let set = validate_memories(&[vec![1; 13]]).unwrap();
        let t = oracle_t_matrix(&set);
        assert_eq!(
            oracle_evaluate(&t, &set, &linear_proximity(13).unwrap()).unwrap_err(),
            OracleError::TooLarge { n: 13, max: 12 }
        );
    }
}
