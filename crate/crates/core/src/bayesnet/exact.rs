use serde::Serialize;

use super::{pack_bits, Assignment, BayesNet, BayesNetError, MAX_ENUMERATION_NODES};

/// Conditional distribution over the query nodes.
///
/// `probs[v]` is the probability of the query outcome packed as `v`, where
/// bit `j` of `v` is the value of `query[j]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    pub query: Vec<usize>,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn prob(&self, packed: u64) -> f64 {
        self.probs[packed as usize]
    }

    /// Probability that query node `node` is 1.
    pub fn marginal_one(&self, node: usize) -> Option<f64> {
        let j = self.query.iter().position(|&q| q == node)?;
        Some(
            self.probs
                .iter()
                .enumerate()
                .filter(|(v, _)| (v >> j) & 1 == 1)
                .map(|(_, p)| p)
                .sum(),
        )
    }
}

impl BayesNet {
    /// `P(Q | E = e)` by brute-force enumeration of every consistent assignment.
    pub fn exact_inference(
        &self,
        query: &[usize],
        evidence: &Assignment,
    ) -> Result<Distribution, BayesNetError> {
        self.check_disjoint(query, evidence)?;
        let free = self.len() - evidence.len();
        if free > MAX_ENUMERATION_NODES {
            return Err(BayesNetError::EnumerationGuard(free));
        }
        let mut probs = vec![0.0; 1 << query.len()];
        let mut total = 0.0;
        for x in self.consistent_indices(evidence) {
            let p = self.joint_probability_index(x);
            probs[pack_bits(x, query) as usize] += p;
            total += p;
        }
        if total <= 0.0 {
            return Err(BayesNetError::ImpossibleEvidence);
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Distribution {
            query: query.to_vec(),
            probs,
        })
    }
}
