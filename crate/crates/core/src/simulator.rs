//! Dense statevector simulator.
//!
//! Basis index bit `i` is qubit `i` (qubit 0 least significant). Kernels walk
//! index pairs with bit masks; everything runs in a fixed order so results are
//! bit-for-bit reproducible.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{mcz_gates, Circuit, Gate, MczMode, Qubit};

/// Default largest register the simulator will allocate.
pub const DEFAULT_MAX_QUBITS: usize = 25;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QBAYES_MAX_QUBITS";

/// Branches lighter than this cannot be selected by a measurement.
pub const MIN_BRANCH_MASS: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{width} qubits exceeds the simulator limit of {limit}")]
    WidthGuard { width: usize, limit: usize },
    #[error("circuit width {circuit} does not match state width {state}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: Qubit, width: usize },
    #[error("basis index {index} out of range for width {width}")]
    BasisOutOfRange { index: u64, width: usize },
    #[error("measurement branch mass {0:e} is below the numerical floor")]
    VanishingBranch(f64),
}

/// Width limit: `QBAYES_MAX_QUBITS` when set to a number, else 25.
pub fn width_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<Complex64>,
}

/// Result of measuring a subset of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    /// Outcome bit per measured qubit, in the order requested.
    pub bits: Vec<bool>,
    /// `bits` packed with `bits[j]` in bit `j`.
    pub packed: u64,
    /// Renormalized post-measurement state.
    pub state: Statevector,
}

impl Statevector {
    /// `|0...0>` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self, SimError> {
        Self::zero_with_limit(width, width_limit())
    }

    pub fn zero_with_limit(width: usize, limit: usize) -> Result<Self, SimError> {
        if width > limit || width >= 64 {
            return Err(SimError::WidthGuard { width, limit });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { width, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(width: usize, index: u64) -> Result<Self, SimError> {
        let mut s = Self::zero(width)?;
        if index >= 1 << width {
            return Err(SimError::BasisOutOfRange { index, width });
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(
            amps.len().is_power_of_two(),
            "amplitude count must be a power of two"
        );
        Self {
            width: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest amplitude difference after removing the global phase that best
    /// aligns `other` with `self`.
    pub fn distance_up_to_phase(&self, other: &Statevector) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&mut self, circuit: &Circuit, mode: MczMode) -> Result<(), SimError> {
        if circuit.width() != self.width {
            return Err(SimError::WidthMismatch {
                circuit: circuit.width(),
                state: self.width,
            });
        }
        for g in circuit.gates() {
            match (g, mode) {
                (Gate::Mcz { qubits }, MczMode::Compiled) => {
                    for e in mcz_gates(qubits) {
                        self.apply_gate(&e);
                    }
                }
                (g, _) => self.apply_gate(g),
            }
        }
        Ok(())
    }

    /// Applies one gate. Qubits must already be validated against the width.
    pub fn apply_gate(&mut self, gate: &Gate) {
        match *gate {
            Gate::RotY { q, theta } => {
                let (s, c) = (theta / 2.0).sin_cos();
                let bit = 1usize << q;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = a0 * c - a1 * s;
                        self.amps[i | bit] = a0 * s + a1 * c;
                    }
                }
            }
            Gate::Phase { q, phi } => {
                let w = Complex64::from_polar(1.0, phi);
                let bit = 1usize << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= w;
                    }
                }
            }
            Gate::X { q } => {
                let bit = 1usize << q;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (cb, tb) = (1usize << control, 1usize << target);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Mcz { ref qubits } => {
                let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
        }
    }

    /// Total probability of basis states whose `qubits` read `bits`.
    pub fn evidence_mass(&self, qubits: &[Qubit], bits: &[bool]) -> f64 {
        assert_eq!(qubits.len(), bits.len());
        let (mask, value) = qubits
            .iter()
            .zip(bits)
            .fold((0usize, 0usize), |(m, v), (&q, &b)| {
                (m | 1 << q, if b { v | 1 << q } else { v })
            });
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == value)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Born-rule probability of each outcome of measuring `qubits`, indexed
    /// by the packed outcome (`qubits[j]` in bit `j`).
    pub fn outcome_probabilities(&self, qubits: &[Qubit]) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[pack(i, qubits)] += a.norm_sqr();
        }
        probs
    }

    /// Projective measurement of `qubits` in the computational basis.
    pub fn measure_subset<R: Rng + ?Sized>(
        &self,
        qubits: &[Qubit],
        rng: &mut R,
    ) -> Result<MeasurementOutcome, SimError> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.width) {
            return Err(SimError::QubitOutOfRange {
                qubit: q,
                width: self.width,
            });
        }
        let probs = self.outcome_probabilities(qubits);
        let total: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (k, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            chosen = Some(k);
            if u < acc {
                break;
            }
        }
        let packed = chosen.unwrap_or(0);
        self.project(qubits, packed as u64)
    }

    /// Post-measurement state for a given outcome.
    pub fn project(&self, qubits: &[Qubit], packed: u64) -> Result<MeasurementOutcome, SimError> {
        let mass: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pack(*i, qubits) as u64 == packed)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if mass < MIN_BRANCH_MASS {
            return Err(SimError::VanishingBranch(mass));
        }
        let scale = 1.0 / mass.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if pack(i, qubits) as u64 == packed {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(MeasurementOutcome {
            bits: (0..qubits.len()).map(|j| (packed >> j) & 1 == 1).collect(),
            packed,
            state: Statevector {
                width: self.width,
                amps,
            },
        })
    }
}

#[inline]
fn pack(i: usize, qubits: &[Qubit]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | ((i >> q) & 1) << j)
}
