use rand::Rng;
use serde::Serialize;

use super::{pack_bits, Assignment, BayesNet, BayesNetError};
use crate::rng::{seeded, SampleRng};

/// Default cap on ancestral draws for one rejection-sampling batch.
pub const DEFAULT_DRAW_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalSample {
    /// Query bits packed in query order.
    pub query_bits: u64,
    /// Ancestral draws spent on this sample, the accepted one included.
    pub draws: u64,
}

/// Accepted samples and cost counters of classical rejection sampling.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub query: Vec<usize>,
    pub samples: Vec<ClassicalSample>,
    pub total_draws: u64,
    /// `total_draws * n`: one CPT lookup per node per draw.
    pub total_cpt_lookups: u64,
    /// Parent bits read while indexing CPTs, `total_draws * sum_i |parents(i)|`.
    pub total_parent_inspections: u64,
}

impl ClassicalReport {
    pub fn mean_draws(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.total_draws as f64 / self.samples.len() as f64
        }
    }
}

impl BayesNet {
    /// Draws every node in topological order given its sampled parents.
    /// Returns the full assignment as a basis index.
    pub fn ancestral_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut x = 0u64;
        for (i, node) in self.nodes.iter().enumerate() {
            // u < p with u in [0, 1): p = 0 never fires, p = 1 always does.
            if rng.random::<f64>() < node.p_one(x) {
                x |= 1 << i;
            }
        }
        x
    }

    pub fn ancestral_sample(&self, seed: u64) -> Assignment {
        Assignment::from_index(self.len(), self.ancestral_draw(&mut seeded(seed)))
    }

    /// Rejection sampling: draw from the joint until `count` draws agree with
    /// the evidence. Fails once `budget` draws have been spent.
    pub fn classical_rejection_sample(
        &self,
        query: &[usize],
        evidence: &Assignment,
        count: usize,
        seed: u64,
        budget: u64,
    ) -> Result<ClassicalReport, BayesNetError> {
        self.check_disjoint(query, evidence)?;
        let mut rng: SampleRng = seeded(seed);
        let (mask, value) = evidence.mask_and_value();
        let mut report = ClassicalReport {
            query: query.to_vec(),
            ..Default::default()
        };
        let mut since_last = 0u64;
        while report.samples.len() < count {
            if report.total_draws >= budget {
                return Err(BayesNetError::DrawBudgetExhausted {
                    budget,
                    accepted: report.samples.len(),
                });
            }
            let x = self.ancestral_draw(&mut rng);
            report.total_draws += 1;
            since_last += 1;
            if x & mask == value {
                report.samples.push(ClassicalSample {
                    query_bits: pack_bits(x, query),
                    draws: since_last,
                });
                since_last = 0;
            }
        }
        let n = self.len() as u64;
        let parents: u64 = self.nodes.iter().map(|n| n.parents.len() as u64).sum();
        report.total_cpt_lookups = report.total_draws * n;
        report.total_parent_inspections = report.total_draws * parents;
        Ok(report)
    }
}
