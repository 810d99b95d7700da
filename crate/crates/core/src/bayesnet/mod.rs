//! Bayesian networks over binary variables.
//!
//! A [`BayesNet`] is stored in topological order: node `i` is the `i`-th node
//! of a stable topological sort of the input, and bit `i` of a basis index is
//! the value of node `i`. Every full assignment is therefore a `u64` index,
//! which is also the statevector basis index used by the simulator.

mod exact;
mod generate;
mod sample;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::Distribution;
pub use generate::random_net;
pub use sample::{ClassicalReport, ClassicalSample, DEFAULT_DRAW_BUDGET};

/// Largest network accepted by the parser; full assignments are packed into a `u64`.
pub const MAX_NODES: usize = 64;

/// Largest network [`BayesNet::exact_inference`] will enumerate.
pub const MAX_ENUMERATION_NODES: usize = 25;

#[derive(Debug, Error, PartialEq)]
pub enum BayesNetError {
    #[error("malformed network file: {0}")]
    Json(String),
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("node `{node}` references unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("node `{node}` lists parent `{parent}` more than once")]
    DuplicateParent { node: String, parent: String },
    #[error("cycle detected through node `{0}`")]
    Cycle(String),
    #[error(
        "node `{node}` has {parents} parents so its CPT needs {expected} entries, found {found}"
    )]
    CptLength {
        node: String,
        parents: usize,
        expected: usize,
        found: usize,
    },
    #[error("node `{node}` CPT entry {row} = {value} is not a probability")]
    ProbabilityOutOfRange {
        node: String,
        row: usize,
        value: f64,
    },
    #[error("network has {0} nodes, more than the supported {MAX_NODES}")]
    TooManyNodes(usize),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("assignment covers {assigned} of {nodes} nodes")]
    IncompleteAssignment { assigned: usize, nodes: usize },
    #[error("node `{0}` appears in both query and evidence")]
    QueryEvidenceOverlap(String),
    #[error("evidence has zero probability")]
    ImpossibleEvidence,
    #[error("enumeration over {0} nodes exceeds the limit of {MAX_ENUMERATION_NODES}")]
    EnumerationGuard(usize),
    #[error("draw budget of {budget} exhausted after {accepted} accepted samples")]
    DrawBudgetExhausted { budget: u64, accepted: usize },
}

/// One node as written in a network file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    #[serde(default)]
    pub parents: Vec<String>,
    /// `cpt[r] = P(node = 1 | parent row r)`, first parent (lowest
    /// topological index) most significant.
    pub cpt: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct NetFile {
    nodes: Vec<NodeSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    name: String,
    /// Parent node indices, ascending.
    parents: Vec<usize>,
    cpt: Vec<f64>,
}

impl Node {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn cpt(&self) -> &[f64] {
        &self.cpt
    }

    /// CPT row selected by the parent values in the basis index `x`.
    #[inline]
    pub fn row(&self, x: u64) -> usize {
        self.parents
            .iter()
            .fold(0usize, |r, &p| (r << 1) | ((x >> p) & 1) as usize)
    }

    /// `P(node = 1 | parents as in x)`.
    #[inline]
    pub fn p_one(&self, x: u64) -> f64 {
        self.cpt[self.row(x)]
    }
}

/// Validated network in topological order.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    /// `input_position[i]` is where canonical node `i` appeared in the input.
    input_position: Vec<usize>,
    max_indegree: usize,
}

/// Partial map from node index to bit. Used for evidence, full assignments
/// and query outcomes alike.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: BTreeMap<usize, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Full assignment of the low `width` bits of `index`.
    pub fn from_index(width: usize, index: u64) -> Self {
        let values = (0..width).map(|i| (i, (index >> i) & 1 == 1)).collect();
        Self { values }
    }

    pub fn set(&mut self, node: usize, bit: bool) -> &mut Self {
        self.values.insert(node, bit);
        self
    }

    pub fn with(mut self, node: usize, bit: bool) -> Self {
        self.values.insert(node, bit);
        self
    }

    pub fn get(&self, node: usize) -> Option<bool> {
        self.values.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Assigned nodes, ascending.
    pub fn nodes(&self) -> Vec<usize> {
        self.values.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.values.iter().map(|(&n, &b)| (n, b))
    }

    /// Bit mask of assigned nodes and the required values under that mask.
    pub fn mask_and_value(&self) -> (u64, u64) {
        self.values.iter().fold((0, 0), |(m, v), (&n, &b)| {
            (m | 1 << n, if b { v | 1 << n } else { v })
        })
    }

    /// Whether the basis index `x` agrees with every assigned bit.
    #[inline]
    pub fn matches(&self, x: u64) -> bool {
        let (mask, value) = self.mask_and_value();
        x & mask == value
    }
}

impl FromIterator<(usize, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (usize, bool)>>(iter: T) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

impl BayesNet {
    /// Parses the JSON network format and normalizes it into topological order.
    pub fn parse(text: &str) -> Result<Self, BayesNetError> {
        let file: NetFile =
            serde_json::from_str(text).map_err(|e| BayesNetError::Json(e.to_string()))?;
        Self::from_specs(file.nodes)
    }

    pub fn from_specs(specs: Vec<NodeSpec>) -> Result<Self, BayesNetError> {
        if specs.len() > MAX_NODES {
            return Err(BayesNetError::TooManyNodes(specs.len()));
        }
        let mut by_name: HashMap<&str, usize> = HashMap::with_capacity(specs.len());
        for (i, s) in specs.iter().enumerate() {
            if by_name.insert(s.name.as_str(), i).is_some() {
                return Err(BayesNetError::DuplicateName(s.name.clone()));
            }
        }

        let mut parents_in = Vec::with_capacity(specs.len());
        for s in &specs {
            let mut ps = Vec::with_capacity(s.parents.len());
            for p in &s.parents {
                let pi = *by_name
                    .get(p.as_str())
                    .ok_or_else(|| BayesNetError::UnknownParent {
                        node: s.name.clone(),
                        parent: p.clone(),
                    })?;
                if ps.contains(&pi) {
                    return Err(BayesNetError::DuplicateParent {
                        node: s.name.clone(),
                        parent: p.clone(),
                    });
                }
                ps.push(pi);
            }
            let expected = 1usize << ps.len();
            if s.cpt.len() != expected {
                return Err(BayesNetError::CptLength {
                    node: s.name.clone(),
                    parents: ps.len(),
                    expected,
                    found: s.cpt.len(),
                });
            }
            if let Some((row, &value)) = s
                .cpt
                .iter()
                .enumerate()
                .find(|(_, p)| !(0.0..=1.0).contains(*p))
            {
                return Err(BayesNetError::ProbabilityOutOfRange {
                    node: s.name.clone(),
                    row,
                    value,
                });
            }
            parents_in.push(ps);
        }

        // Kahn's algorithm; the heap yields the earliest input position among ready nodes.
        let n = specs.len();
        let mut pending: Vec<usize> = parents_in.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (child, ps) in parents_in.iter().enumerate() {
            for &p in ps {
                children[p].push(child);
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| pending[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &c in &children[i] {
                pending[c] -= 1;
                if pending[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&i| pending[i] > 0).unwrap_or(0);
            return Err(BayesNetError::Cycle(specs[stuck].name.clone()));
        }

        let mut canonical = vec![0usize; n];
        for (pos, &orig) in order.iter().enumerate() {
            canonical[orig] = pos;
        }
        let mut nodes = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for (pos, &orig) in order.iter().enumerate() {
            let mut parents: Vec<usize> = parents_in[orig].iter().map(|&p| canonical[p]).collect();
            parents.sort_unstable();
            index.insert(specs[orig].name.clone(), pos);
            nodes.push(Node {
                name: specs[orig].name.clone(),
                parents,
                cpt: specs[orig].cpt.clone(),
            });
        }
        let max_indegree = nodes.iter().map(|n| n.parents.len()).max().unwrap_or(0);
        Ok(Self {
            nodes,
            index,
            input_position: order,
            max_indegree,
        })
    }

    /// Serializes back to the network file format, canonical order.
    pub fn to_json(&self) -> String {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeSpec {
                name: n.name.clone(),
                parents: n
                    .parents
                    .iter()
                    .map(|&p| self.nodes[p].name.clone())
                    .collect(),
                cpt: n.cpt.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&NetFile { nodes }).expect("network serializes")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Maximum number of parents of any node.
    pub fn max_indegree(&self) -> usize {
        self.max_indegree
    }

    pub fn node_index(&self, name: &str) -> Result<usize, BayesNetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| BayesNetError::UnknownNode(name.to_string()))
    }

    /// Position of canonical node `i` in the original input.
    pub fn input_position(&self, i: usize) -> usize {
        self.input_position[i]
    }

    /// Every basis index with the evidence bits fixed, in ascending order.
    pub(crate) fn consistent_indices(&self, evidence: &Assignment) -> impl Iterator<Item = u64> {
        let (mask, value) = evidence.mask_and_value();
        let free: Vec<usize> = (0..self.len()).filter(|&i| mask >> i & 1 == 0).collect();
        (0..1u64 << free.len()).map(move |k| {
            free.iter()
                .enumerate()
                .fold(value, |x, (j, &node)| x | ((k >> j) & 1) << node)
        })
    }

    /// Product of CPT lookups for the full assignment packed in `x`.
    pub fn joint_probability_index(&self, x: u64) -> f64 {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                let p1 = node.p_one(x);
                if (x >> i) & 1 == 1 {
                    p1
                } else {
                    1.0 - p1
                }
            })
            .product()
    }

    pub fn joint_probability(&self, x: &Assignment) -> Result<f64, BayesNetError> {
        if x.len() != self.len() || x.iter().any(|(n, _)| n >= self.len()) {
            return Err(BayesNetError::IncompleteAssignment {
                assigned: x.len(),
                nodes: self.len(),
            });
        }
        Ok(self.joint_probability_index(x.mask_and_value().1))
    }

    /// `P(E = e)` by summing the joint over every non-evidence node.
    pub fn marginal_probability(&self, evidence: &Assignment) -> Result<f64, BayesNetError> {
        self.check_nodes(evidence)?;
        let free = self.len() - evidence.len();
        if free > MAX_ENUMERATION_NODES {
            return Err(BayesNetError::EnumerationGuard(free));
        }
        Ok(self
            .consistent_indices(evidence)
            .map(|x| self.joint_probability_index(x))
            .sum())
    }

    pub(crate) fn check_nodes(&self, a: &Assignment) -> Result<(), BayesNetError> {
        match a.iter().find(|&(n, _)| n >= self.len()) {
            Some((n, _)) => Err(BayesNetError::UnknownNode(format!("#{n}"))),
            None => Ok(()),
        }
    }

    /// Parses `NAME=BIT,NAME=BIT` into an assignment.
    pub fn parse_evidence(&self, spec: &str) -> Result<Assignment, String> {
        let mut a = Assignment::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, bit) = item
                .split_once('=')
                .ok_or_else(|| format!("evidence item `{item}` is not NAME=BIT"))?;
            let node = self.node_index(name.trim()).map_err(|e| e.to_string())?;
            let bit = match bit.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(format!(
                        "evidence value `{other}` for `{name}` is not 0 or 1"
                    ))
                }
            };
            if a.get(node).is_some() {
                return Err(format!("node `{name}` given twice in evidence"));
            }
            a.set(node, bit);
        }
        Ok(a)
    }

    /// Parses `NAME,NAME` into ascending node indices.
    pub fn parse_query(&self, spec: &str) -> Result<Vec<usize>, String> {
        let mut q = Vec::new();
        for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let node = self.node_index(name).map_err(|e| e.to_string())?;
            if q.contains(&node) {
                return Err(format!("node `{name}` given twice in query"));
            }
            q.push(node);
        }
        q.sort_unstable();
        Ok(q)
    }

    /// Every node not fixed by the evidence.
    pub fn default_query(&self, evidence: &Assignment) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| evidence.get(i).is_none())
            .collect()
    }

    pub(crate) fn check_disjoint(
        &self,
        query: &[usize],
        evidence: &Assignment,
    ) -> Result<(), BayesNetError> {
        self.check_nodes(evidence)?;
        for &q in query {
            if q >= self.len() {
                return Err(BayesNetError::UnknownNode(format!("#{q}")));
            }
            if evidence.get(q).is_some() {
                return Err(BayesNetError::QueryEvidenceOverlap(
                    self.nodes[q].name.clone(),
                ));
            }
        }
        Ok(())
    }
}

/// Packs the bits of `x` at `nodes` so that `nodes[j]` lands in bit `j`.
#[inline]
pub fn pack_bits(x: u64, nodes: &[usize]) -> u64 {
    nodes
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &n)| acc | ((x >> n) & 1) << j)
}

/// Bitstring of the low `width` bits of `x`, most significant first.
pub fn bitstring(x: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|i| if (x >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const TWO_NODE: &str = r#"{"nodes": [
        {"name": "A", "parents": [], "cpt": [0.25]},
        {"name": "B", "parents": ["A"], "cpt": [0.5, 0.8]}
    ]}"#;

    pub(crate) fn two_node() -> BayesNet {
        BayesNet::parse(TWO_NODE).unwrap()
    }

    #[test]
    fn parses_single_node() {
        let net = BayesNet::parse(r#"{"nodes":[{"name":"A","parents":[],"cpt":[0.3]}]}"#).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.max_indegree(), 0);
    }

    #[test]
    fn parses_two_nodes() {
        let net = BayesNet::parse(
            r#"{"nodes":[{"name":"A","parents":[],"cpt":[0.3]},
            {"name":"B","parents":["A"],"cpt":[0.5,0.8]}]}"#,
        )
        .unwrap();
        assert_eq!(net.len(), 2);
        assert_eq!(net.max_indegree(), 1);
        assert_eq!(net.node(1).parents(), &[0]);
    }

    #[test]
    fn parents_key_is_optional() {
        let net = BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.3]}]}"#).unwrap();
        assert_eq!(net.node(0).parents().len(), 0);
    }

    #[test]
    fn rejects_unknown_parent() {
        let err = BayesNet::parse(r#"{"nodes":[{"name":"A","parents":["Z"],"cpt":[0.1,0.2]}]}"#)
            .unwrap_err();
        assert_eq!(
            err,
            BayesNetError::UnknownParent {
                node: "A".into(),
                parent: "Z".into()
            }
        );
    }

    #[test]
    fn rejects_validation_failures() {
        let cases = [
            (
                r#"{"nodes":[{"name":"A","parents":["B"],"cpt":[0.1,0.2]},
                   {"name":"B","parents":["A"],"cpt":[0.1,0.2]}]}"#,
                "cycle",
            ),
            (
                r#"{"nodes":[{"name":"A","parents":["A"],"cpt":[0.1,0.2]}]}"#,
                "cycle",
            ),
            (
                r#"{"nodes":[{"name":"A","parents":[],"cpt":[0.1,0.2]}]}"#,
                "CPT",
            ),
            (
                r#"{"nodes":[{"name":"A","parents":[],"cpt":[1.5]}]}"#,
                "not a probability",
            ),
            (
                r#"{"nodes":[{"name":"A","parents":[],"cpt":[-0.1]}]}"#,
                "not a probability",
            ),
            (
                r#"{"nodes":[{"name":"A","cpt":[0.1]},{"name":"A","cpt":[0.2]}]}"#,
                "duplicate node",
            ),
            (
                r#"{"nodes":[{"name":"A","cpt":[0.1]},{"name":"B","parents":["A","A"],"cpt":[0,0,0,0]}]}"#,
                "more than once",
            ),
            (r#"{"nodes":[{"name":"A"}]}"#, "malformed"),
            (r#"not json"#, "malformed"),
        ];
        for (text, needle) in cases {
            let msg = BayesNet::parse(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{msg} should mention {needle}");
        }
    }

    #[test]
    fn topological_sort_is_stable() {
        // C depends on B, which is listed after it; A and D are roots.
        let net = BayesNet::parse(
            r#"{"nodes":[
                {"name":"C","parents":["B"],"cpt":[0.1,0.2]},
                {"name":"A","cpt":[0.5]},
                {"name":"B","parents":[],"cpt":[0.3]},
                {"name":"D","cpt":[0.7]}]}"#,
        )
        .unwrap();
        let names: Vec<_> = net.nodes().iter().map(|n| n.name()).collect();
        assert_eq!(names, ["A", "B", "C", "D"]);
        assert_eq!(net.input_position(0), 1);
        assert_eq!(net.node_index("C").unwrap(), 2);
    }

    #[test]
    fn parent_rows_follow_topological_order() {
        // File lists C's parents as [B, A]; rows still use A as the high bit.
        let net = BayesNet::parse(
            r#"{"nodes":[
                {"name":"A","cpt":[0.5]},
                {"name":"B","cpt":[0.5]},
                {"name":"C","parents":["B","A"],"cpt":[0.1,0.2,0.3,0.4]}]}"#,
        )
        .unwrap();
        let c = net.node(2);
        assert_eq!(c.parents(), &[0, 1]);
        // A=1, B=0 -> row 0b10
        assert_eq!(c.row(0b001), 2);
        assert_eq!(c.p_one(0b001), 0.3);
        assert_eq!(c.p_one(0b010), 0.2);
    }

    #[test]
    fn joint_probability_hand_products() {
        let net = two_node();
        let both = Assignment::new().with(0, true).with(1, true);
        assert!((net.joint_probability(&both).unwrap() - 0.2).abs() < 1e-15);
        let none = Assignment::new().with(0, false).with(1, false);
        assert!((net.joint_probability(&none).unwrap() - 0.375).abs() < 1e-15);
        let total: f64 = (0..4).map(|x| net.joint_probability_index(x)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_probability_needs_full_assignment() {
        let net = two_node();
        let err = net
            .joint_probability(&Assignment::new().with(0, true))
            .unwrap_err();
        assert!(matches!(
            err,
            BayesNetError::IncompleteAssignment {
                assigned: 1,
                nodes: 2
            }
        ));
    }

    #[test]
    fn marginal_probability_cases() {
        let net = two_node();
        let b1 = Assignment::new().with(1, true);
        assert!((net.marginal_probability(&b1).unwrap() - 0.575).abs() < 1e-12);
        let all = Assignment::new().with(0, true).with(1, true);
        assert!((net.marginal_probability(&all).unwrap() - 0.2).abs() < 1e-12);
        assert!((net.marginal_probability(&Assignment::new()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evidence_and_query_specs() {
        let net = two_node();
        let e = net.parse_evidence("B=1").unwrap();
        assert_eq!(e.get(1), Some(true));
        assert!(net
            .parse_evidence("B=2")
            .unwrap_err()
            .contains("not 0 or 1"));
        assert!(net.parse_evidence("B").is_err());
        assert!(net.parse_evidence("Z=1").is_err());
        assert!(net.parse_evidence("B=1,B=0").is_err());
        assert_eq!(net.parse_query("B, A").unwrap(), vec![0, 1]);
        assert_eq!(net.default_query(&e), vec![0]);
        assert!(net.parse_evidence("").unwrap().is_empty());
    }

    #[test]
    fn roundtrips_through_json() {
        let net = two_node();
        assert_eq!(BayesNet::parse(&net.to_json()).unwrap(), net);
    }

    #[test]
    fn consistent_indices_fix_evidence() {
        let net = BayesNet::parse(
            r#"{"nodes":[{"name":"A","cpt":[0.5]},{"name":"B","cpt":[0.5]},{"name":"C","cpt":[0.5]}]}"#,
        )
        .unwrap();
        let e = Assignment::new().with(1, true);
        let xs: Vec<u64> = net.consistent_indices(&e).collect();
        assert_eq!(xs, vec![0b010, 0b011, 0b110, 0b111]);
        assert_eq!(pack_bits(0b110, &[0, 2]), 0b10);
        assert_eq!(bitstring(0b011, 3), "011");
    }
}
