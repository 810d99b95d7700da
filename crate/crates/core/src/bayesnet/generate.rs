use rand::seq::index::sample;
use rand::Rng;

use super::{BayesNet, NodeSpec};

/// Random network with `n` nodes, each drawing up to `max_indegree` parents
/// among earlier nodes. CPT entries are uniform on [0, 1].
pub fn random_net<R: Rng + ?Sized>(rng: &mut R, n: usize, max_indegree: usize) -> BayesNet {
    let specs = (0..n)
        .map(|i| {
            let k = rng.random_range(0..=max_indegree.min(i));
            let mut parents: Vec<usize> = sample(rng, i.max(1), k).into_vec();
            parents.sort_unstable();
            NodeSpec {
                name: format!("X{i}"),
                parents: parents.iter().map(|p| format!("X{p}")).collect(),
                cpt: (0..1usize << k).map(|_| rng.random::<f64>()).collect(),
            }
        })
        .collect();
    BayesNet::from_specs(specs).expect("generated network is valid")
}
