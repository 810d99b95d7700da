//! Network-to-circuit compilation.
//!
//! Node `i` of a [`BayesNet`] lives on qubit `i`. The q-sample preparation
//! circuit applies, in topological order, one uniformly controlled
//! y-rotation per node, controlled by the node's parents. Each uniformly
//! controlled rotation is expanded with the Gray-code construction into
//! `2^k` rotations and `2^k` CNOTs.

use thiserror::Error;

use crate::bayesnet::{Assignment, BayesNet, BayesNetError};
use crate::circuit::{Circuit, CircuitError, Gate, Qubit};

/// Largest explicit joint table accepted by [`compile_qsample_general`].
pub const MAX_GENERAL_QUBITS: usize = 20;

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("probabilities sum to {0}, not 1")]
    Unnormalized(f64),
    #[error("expected {expected} rotation angles, found {found}")]
    AngleCount { expected: usize, found: usize },
    #[error("joint table length {0} is not a power of two")]
    TableSize(usize),
    #[error("joint table over {0} bits exceeds the limit of {MAX_GENERAL_QUBITS}")]
    TableGuard(usize),
    #[error("phase flip needs at least one evidence qubit")]
    EmptyEvidence,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Net(#[from] BayesNetError),
}

/// Node-to-qubit map. The canonical layout is the identity; evidence is
/// addressed through a qubit set rather than permuted to one end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    width: usize,
}

impl QubitLayout {
    pub fn canonical(net: &BayesNet) -> Self {
        Self { width: net.len() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn qubit(&self, node: usize) -> Qubit {
        node
    }

    /// Evidence qubits (ascending) and their required bits.
    pub fn evidence(&self, evidence: &Assignment) -> (Vec<Qubit>, Vec<bool>) {
        evidence.iter().map(|(n, b)| (self.qubit(n), b)).unzip()
    }
}

/// Angle `theta` with `RotY(theta)|0> = sqrt(p0)|0> + sqrt(p1)|1>`.
pub fn rotation_angle(p0: f64, p1: f64) -> Result<f64, CompileError> {
    if p0 < 0.0 || p1 < 0.0 {
        return Err(CompileError::NegativeProbability(p0.min(p1)));
    }
    if (p0 + p1 - 1.0).abs() > NORMALIZATION_TOL {
        return Err(CompileError::Unnormalized(p0 + p1));
    }
    Ok(angle(p0, p1))
}

#[inline]
fn angle(p0: f64, p1: f64) -> f64 {
    2.0 * p1.sqrt().atan2(p0.sqrt())
}

/// In-place Walsh-Hadamard transform, unnormalized.
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Gates of a uniformly controlled y-rotation.
///
/// `angles[r]` is the rotation applied to `target` when the controls read
/// row `r`, with `controls[0]` the most significant bit of `r`.
pub fn ucry_gates(
    angles: &[f64],
    controls: &[Qubit],
    target: Qubit,
) -> Result<Vec<Gate>, CompileError> {
    let k = controls.len();
    let rows = 1usize << k;
    if angles.len() != rows {
        return Err(CompileError::AngleCount {
            expected: rows,
            found: angles.len(),
        });
    }
    if k == 0 {
        return Ok(vec![Gate::RotY {
            q: target,
            theta: angles[0],
        }]);
    }
    // theta_c = sum_j (-1)^{c . g(j)} phi_j, so phi_{j} = WHT(theta)[g(j)] / 2^k.
    let mut spectrum = angles.to_vec();
    walsh_hadamard(&mut spectrum);
    let scale = 1.0 / rows as f64;
    // bit l of a row index belongs to controls[k - 1 - l]
    let control_for_bit = |l: u32| controls[k - 1 - l as usize];
    let mut gates = Vec::with_capacity(2 * rows);
    for j in 0..rows {
        let gray = j ^ (j >> 1);
        gates.push(Gate::RotY {
            q: target,
            theta: spectrum[gray] * scale,
        });
        let flip = if j + 1 == rows {
            (k - 1) as u32
        } else {
            (j + 1).trailing_zeros()
        };
        gates.push(Gate::Cnot {
            control: control_for_bit(flip),
            target,
        });
    }
    Ok(gates)
}

/// Uniformly controlled rotation as a circuit on `width` qubits.
pub fn decompose_ucry(
    width: usize,
    angles: &[f64],
    controls: &[Qubit],
    target: Qubit,
) -> Result<Circuit, CompileError> {
    Ok(Circuit::from_gates(
        width,
        ucry_gates(angles, controls, target)?,
    )?)
}

/// Preparation circuit for the q-sample of `net`.
pub fn compile_qsample(net: &BayesNet) -> Circuit {
    let mut gates = Vec::new();
    for (i, node) in net.nodes().iter().enumerate() {
        let angles: Vec<f64> = node.cpt().iter().map(|&p| angle(1.0 - p, p)).collect();
        gates.extend(ucry_gates(&angles, node.parents(), i).expect("CPT has 2^k rows"));
    }
    Circuit::from_gates(net.len(), gates).expect("parents precede children")
}

/// Preparation circuit for an arbitrary joint table over `log2(len)` bits,
/// factorized qubit by qubit, each conditioned on every earlier qubit.
/// `table[x]` is the probability of basis index `x`.
pub fn compile_qsample_general(table: &[f64]) -> Result<Circuit, CompileError> {
    if !table.len().is_power_of_two() {
        return Err(CompileError::TableSize(table.len()));
    }
    let n = table.len().trailing_zeros() as usize;
    if n > MAX_GENERAL_QUBITS {
        return Err(CompileError::TableGuard(n));
    }
    if let Some(&p) = table.iter().find(|&&p| p < 0.0 || p.is_nan()) {
        return Err(CompileError::NegativeProbability(p));
    }
    let sum: f64 = table.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(CompileError::Unnormalized(sum));
    }
    // marginals[i][y]: probability that qubits 0..i read y
    let mut marginals = vec![table.to_vec()];
    for i in (0..n).rev() {
        let prev = marginals.last().expect("nonempty");
        let bit = 1usize << i;
        marginals.push((0..bit).map(|y| prev[y] + prev[y | bit]).collect());
    }
    marginals.reverse();

    let mut gates = Vec::new();
    for i in 0..n {
        let controls: Vec<Qubit> = (0..i).collect();
        let mut angles = vec![0.0; 1 << i];
        for y in 0..1usize << i {
            let ctx = marginals[i][y];
            if ctx <= 0.0 {
                continue;
            }
            let p1 = marginals[i + 1][y | 1 << i] / ctx;
            // row convention puts qubit 0 in the most significant bit
            let row = if i == 0 {
                0
            } else {
                y.reverse_bits() >> (usize::BITS as usize - i)
            };
            angles[row] = angle((1.0 - p1).max(0.0), p1.min(1.0));
        }
        gates.extend(ucry_gates(&angles, &controls, i)?);
    }
    Ok(Circuit::from_gates(n, gates)?)
}

/// Phase flip `I - 2|e><e|` on the evidence qubits: X on every qubit whose
/// evidence bit is 0, one MCZ over all of them, then the X gates again.
pub fn compile_phase_flip(
    width: usize,
    qubits: &[Qubit],
    bits: &[bool],
) -> Result<Circuit, CompileError> {
    assert_eq!(qubits.len(), bits.len(), "one bit per evidence qubit");
    if qubits.is_empty() {
        return Err(CompileError::EmptyEvidence);
    }
    let flips: Vec<Gate> = qubits
        .iter()
        .zip(bits)
        .filter(|(_, &b)| !b)
        .map(|(&q, _)| Gate::X { q })
        .collect();
    let mut c = Circuit::new(width);
    c.extend(flips.iter().cloned())?;
    c.push(Gate::Mcz {
        qubits: qubits.to_vec(),
    })?;
    c.extend(flips)?;
    Ok(c)
}

/// Reflection about `|0...0>` on the whole register.
pub fn compile_s0(width: usize) -> Circuit {
    let qubits: Vec<Qubit> = (0..width).collect();
    compile_phase_flip(width, &qubits, &vec![false; width]).expect("width >= 1")
}

/// All operators needed to amplify evidence `e` on the q-sample of a network.
#[derive(Clone, Debug, PartialEq)]
pub struct GroverOperators {
    pub prep: Circuit,
    pub s_e: Circuit,
    pub s_0: Circuit,
    /// `S_e`, then `prep^-1`, `S_0`, `prep` in time order; the global -1 is dropped.
    pub iterate: Circuit,
    pub evidence_qubits: Vec<Qubit>,
    pub evidence_bits: Vec<bool>,
}

impl GroverOperators {
    pub fn compile(net: &BayesNet, evidence: &Assignment) -> Result<Self, CompileError> {
        net.check_nodes(evidence)?;
        let layout = QubitLayout::canonical(net);
        let (evidence_qubits, evidence_bits) = layout.evidence(evidence);
        let prep = compile_qsample(net);
        let s_e = compile_phase_flip(net.len(), &evidence_qubits, &evidence_bits)?;
        let s_0 = compile_s0(net.len());
        let iterate = Circuit::concat(&[&s_e, &prep.inverse(), &s_0, &prep])?;
        Ok(Self {
            prep,
            s_e,
            s_0,
            iterate,
            evidence_qubits,
            evidence_bits,
        })
    }
}

/// Grover iterate for `net` and `evidence`, up to global phase.
pub fn compile_grover(net: &BayesNet, evidence: &Assignment) -> Result<Circuit, CompileError> {
    Ok(GroverOperators::compile(net, evidence)?.iterate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesnet::random_net;
    use crate::circuit::MczMode;
    use crate::rng::seeded;
    use crate::simulator::Statevector;
    use num_complex::Complex64;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    const TWO_NODE: &str = r#"{"nodes": [
        {"name": "A", "parents": [], "cpt": [0.25]},
        {"name": "B", "parents": ["A"], "cpt": [0.5, 0.8]}
    ]}"#;

    fn run(c: &Circuit, input: u64) -> Statevector {
        let mut s = Statevector::basis(c.width(), input).unwrap();
        s.apply(c, MczMode::Primitive).unwrap();
        s
    }

    fn ry(theta: f64) -> [[f64; 2]; 2] {
        let (s, c) = (theta / 2.0).sin_cos();
        [[c, -s], [s, c]]
    }

    /// Reference block-diagonal operator, built directly: for control row
    /// `r` the target undergoes `RotY(angles[r])`.
    fn assert_matches_block_diagonal(
        angles: &[f64],
        controls: &[Qubit],
        target: Qubit,
        width: usize,
    ) {
        let c = decompose_ucry(width, angles, controls, target).unwrap();
        let k = controls.len();
        for x in 0..1u64 << width {
            let out = run(&c, x);
            let row = controls
                .iter()
                .fold(0usize, |r, &q| (r << 1) | ((x >> q) & 1) as usize);
            let m = ry(angles[row]);
            let tb = (x >> target) & 1;
            for y in 0..1u64 << width {
                let want = if y & !(1 << target) == x & !(1 << target) {
                    m[((y >> target) & 1) as usize][tb as usize]
                } else {
                    0.0
                };
                let got = out.amplitudes()[y as usize];
                assert!(
                    (got - Complex64::new(want, 0.0)).norm() < 1e-10,
                    "k={k} x={x} y={y} got {got} want {want}"
                );
            }
        }
    }

    #[test]
    fn rotation_angle_examples() {
        assert!((rotation_angle(0.5, 0.5).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((rotation_angle(0.75, 0.25).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((rotation_angle(0.0, 1.0).unwrap() - PI).abs() < 1e-15);
        assert!(matches!(
            rotation_angle(-0.1, 1.1),
            Err(CompileError::NegativeProbability(_))
        ));
        assert!(matches!(
            rotation_angle(0.3, 0.3),
            Err(CompileError::Unnormalized(_))
        ));
    }

    #[test]
    fn ucry_k0_and_k1_structure() {
        assert_eq!(
            ucry_gates(&[0.7], &[], 2).unwrap(),
            vec![Gate::RotY { q: 2, theta: 0.7 }]
        );
        let (t0, t1) = (0.9, -0.4);
        assert_eq!(
            ucry_gates(&[t0, t1], &[0], 1).unwrap(),
            vec![
                Gate::RotY {
                    q: 1,
                    theta: (t0 + t1) / 2.0
                },
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
                Gate::RotY {
                    q: 1,
                    theta: (t0 - t1) / 2.0
                },
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
            ]
        );
        assert_matches_block_diagonal(&[t0, t1], &[0], 1, 2);
        assert_eq!(
            ucry_gates(&[0.1; 3], &[0], 1).unwrap_err(),
            CompileError::AngleCount {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn ucry_matches_block_diagonal_random() {
        let mut rng = seeded(17);
        for k in 1..=4 {
            for _ in 0..5 {
                let angles: Vec<f64> = (0..1 << k).map(|_| rng.random_range(-PI..PI)).collect();
                // controls deliberately out of ascending order, target in the middle
                let mut controls: Vec<Qubit> = (0..=k).filter(|&q| q != 1).collect();
                controls.reverse();
                let c = decompose_ucry(k + 1, &angles, &controls, 1).unwrap();
                let counts = c.gate_count(MczMode::Primitive);
                assert_eq!((counts.cnot, counts.roty), (1 << k, 1 << k));
                assert_matches_block_diagonal(&angles, &controls, 1, k + 1);
            }
        }
    }

    #[test]
    fn single_node_qsample() {
        let net = BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.25]}]}"#).unwrap();
        let c = compile_qsample(&net);
        assert_eq!(c.len(), 1);
        let Gate::RotY { q: 0, theta } = c.gates()[0] else {
            panic!()
        };
        assert!((theta - PI / 3.0).abs() < 1e-15);
        let s = run(&c, 0);
        assert!((s.amplitudes()[0].re - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((s.amplitudes()[1].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn independent_nodes_need_no_cnots() {
        let specs = (0..6)
            .map(|i| crate::NodeSpec {
                name: format!("N{i}"),
                parents: vec![],
                cpt: vec![0.1 * i as f64],
            })
            .collect();
        let net = BayesNet::from_specs(specs).unwrap();
        let counts = compile_qsample(&net).gate_count(MczMode::Compiled);
        assert_eq!((counts.roty, counts.cnot, counts.total), (6, 0, 6));
    }

    #[test]
    fn qsample_amplitudes_are_sqrt_joint() {
        let mut rng = seeded(99);
        for _ in 0..20 {
            let net = random_net(&mut rng, 7, 3);
            let s = run(&compile_qsample(&net), 0);
            for (x, a) in s.amplitudes().iter().enumerate() {
                let p = net.joint_probability_index(x as u64);
                assert!((a.norm_sqr() - p).abs() < 1e-10);
                assert!(a.re >= -1e-12 && a.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn general_qsample_examples() {
        let c = compile_qsample_general(&[0.5, 0.5]).unwrap();
        assert_eq!(
            c.gates(),
            &[Gate::RotY {
                q: 0,
                theta: FRAC_PI_2
            }]
        );
        let s = run(&compile_qsample_general(&[0.25; 4]).unwrap(), 0);
        assert!(s.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-10));

        let mut rng = seeded(3);
        let raw: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let table: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let c = compile_qsample_general(&table).unwrap();
        assert!(c.gate_count(MczMode::Compiled).total <= 14);
        let s = run(&c, 0);
        for (x, a) in s.amplitudes().iter().enumerate() {
            assert!((a.re - table[x].sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn general_qsample_zero_contexts_and_errors() {
        // qubit 0 is never 1, so the x0 = 1 context of qubit 1 has angle 0
        let table = [0.3, 0.0, 0.7, 0.0];
        let c = compile_qsample_general(&table).unwrap();
        let s = run(&c, 0);
        for (x, a) in s.amplitudes().iter().enumerate() {
            assert!((a.re - table[x].sqrt()).abs() < 1e-10);
        }
        assert_eq!(
            compile_qsample_general(&[0.5, 0.25, 0.25]).unwrap_err(),
            CompileError::TableSize(3)
        );
        assert!(matches!(
            compile_qsample_general(&[0.5, 0.6]),
            Err(CompileError::Unnormalized(_))
        ));
        assert!(matches!(
            compile_qsample_general(&[1.5, -0.5]),
            Err(CompileError::NegativeProbability(_))
        ));
    }

    fn diagonal_signs(c: &Circuit) -> Vec<f64> {
        (0..1u64 << c.width())
            .map(|x| {
                let s = run(c, x);
                for (y, a) in s.amplitudes().iter().enumerate() {
                    if y as u64 != x {
                        assert!(a.norm() < 1e-12, "off-diagonal at x={x} y={y}");
                    }
                }
                let a = s.amplitudes()[x as usize];
                assert!(a.im.abs() < 1e-12 && (a.re.abs() - 1.0).abs() < 1e-12);
                a.re.signum()
            })
            .collect()
    }

    #[test]
    fn phase_flip_examples() {
        let c = compile_phase_flip(3, &[2], &[true]).unwrap();
        assert_eq!(c.gates(), &[Gate::Mcz { qubits: vec![2] }]);

        let c = compile_phase_flip(3, &[2], &[false]).unwrap();
        assert_eq!(c.len(), 3);
        let signs = diagonal_signs(&c);
        for (x, s) in signs.iter().enumerate() {
            assert_eq!(*s, if x & 0b100 == 0 { -1.0 } else { 1.0 });
        }

        // e = "10": first evidence qubit 1, second 0
        let c = compile_phase_flip(2, &[0, 1], &[true, false]).unwrap();
        assert_eq!(diagonal_signs(&c), vec![1.0, -1.0, 1.0, 1.0]);

        assert_eq!(
            compile_phase_flip(2, &[], &[]).unwrap_err(),
            CompileError::EmptyEvidence
        );
    }

    #[test]
    fn s0_examples() {
        let c = compile_s0(1);
        assert_eq!(
            c.gates(),
            &[
                Gate::X { q: 0 },
                Gate::Mcz { qubits: vec![0] },
                Gate::X { q: 0 }
            ]
        );
        let signs = diagonal_signs(&compile_s0(3));
        assert_eq!(signs, vec![-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    }

    fn grover_mass(net: &BayesNet, evidence: &Assignment, iterations: usize) -> f64 {
        let ops = GroverOperators::compile(net, evidence).unwrap();
        let mut s = Statevector::zero(net.len()).unwrap();
        s.apply(&ops.prep, MczMode::Primitive).unwrap();
        for _ in 0..iterations {
            s.apply(&ops.iterate, MczMode::Primitive).unwrap();
        }
        s.evidence_mass(&ops.evidence_qubits, &ops.evidence_bits)
    }

    #[test]
    fn grover_follows_rotation_law() {
        let net = BayesNet::parse(TWO_NODE).unwrap();
        let e = Assignment::new().with(1, true);
        let phi = 0.575f64.sqrt().asin();
        for n in 0..6 {
            let want = ((2 * n + 1) as f64 * phi).sin().powi(2);
            assert!((grover_mass(&net, &e, n) - want).abs() < 1e-9, "N={n}");
        }
    }

    #[test]
    fn certain_evidence_stays_certain() {
        let net =
            BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.3]},{"name":"B","cpt":[1.0]}]}"#)
                .unwrap();
        let e = Assignment::new().with(1, true);
        for n in 0..4 {
            assert!((grover_mass(&net, &e, n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grover_gate_count_is_additive() {
        let net = BayesNet::parse(TWO_NODE).unwrap();
        let ops = GroverOperators::compile(&net, &Assignment::new().with(1, false)).unwrap();
        for mode in [MczMode::Primitive, MczMode::Compiled] {
            let prep = ops.prep.gate_count(mode);
            assert_eq!(
                ops.iterate.gate_count(mode),
                prep + prep + ops.s_0.gate_count(mode) + ops.s_e.gate_count(mode)
            );
        }
    }
}
