//! Ancilla-free expansion of multi-controlled Z.
//!
//! One and two qubits compile to real gates. From three qubits up the MCZ
//! is a multi-controlled phase `C^k P(pi)`, built recursively:
//!
//! ```text
//! C^k P(phi) = CP(phi/2)[c_k,t]  C^{k-1}X[c_1..c_{k-1} -> c_k]  CP(-phi/2)[c_k,t]
//!              C^{k-1}X[c_1..c_{k-1} -> c_k]  C^{k-1}P(phi/2)[c_1..c_{k-1}; t]
//! ```
//!
//! Each `C^{k-1}X` borrows the phase target `t` as a dirty qubit and costs
//! O(k) Toffolis, so the whole expansion is O(k^2) primitives.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{Gate, Qubit};

/// Primitive gates implementing `Mcz { qubits }` exactly.
pub fn mcz_gates(qubits: &[Qubit]) -> Vec<Gate> {
    let mut out = Vec::new();
    match qubits {
        [] => {}
        // Z = X * RY(pi)
        [q] => {
            out.push(Gate::RotY { q: *q, theta: PI });
            out.push(Gate::X { q: *q });
        }
        // CZ = H_t CNOT H_t
        [c, t] => {
            hadamard(&mut out, *t);
            out.push(Gate::Cnot {
                control: *c,
                target: *t,
            });
            hadamard(&mut out, *t);
        }
        [controls @ .., t] => mc_phase(&mut out, controls, *t, PI),
    }
    out
}

/// H = X * RY(pi/2), exact.
fn hadamard(out: &mut Vec<Gate>, q: Qubit) {
    out.push(Gate::RotY {
        q,
        theta: FRAC_PI_2,
    });
    out.push(Gate::X { q });
}

fn controlled_phase(out: &mut Vec<Gate>, c: Qubit, t: Qubit, phi: f64) {
    out.push(Gate::Phase {
        q: c,
        phi: phi / 2.0,
    });
    out.push(Gate::Phase {
        q: t,
        phi: phi / 2.0,
    });
    out.push(Gate::Cnot {
        control: c,
        target: t,
    });
    out.push(Gate::Phase {
        q: t,
        phi: -phi / 2.0,
    });
    out.push(Gate::Cnot {
        control: c,
        target: t,
    });
}

fn mc_phase(out: &mut Vec<Gate>, controls: &[Qubit], t: Qubit, phi: f64) {
    match controls {
        [] => out.push(Gate::Phase { q: t, phi }),
        [c] => controlled_phase(out, *c, t, phi),
        [rest @ .., last] => {
            controlled_phase(out, *last, t, phi / 2.0);
            mcx(out, rest, *last, &[t]);
            controlled_phase(out, *last, t, -phi / 2.0);
            mcx(out, rest, *last, &[t]);
            mc_phase(out, rest, t, phi / 2.0);
        }
    }
}

fn toffoli(out: &mut Vec<Gate>, a: Qubit, b: Qubit, t: Qubit) {
    hadamard(out, t);
    mc_phase(out, &[a, b], t, PI);
    hadamard(out, t);
}

/// Multi-controlled X using `dirty` qubits (arbitrary state, restored).
fn mcx(out: &mut Vec<Gate>, controls: &[Qubit], target: Qubit, dirty: &[Qubit]) {
    match controls {
        [] => out.push(Gate::X { q: target }),
        [c] => out.push(Gate::Cnot {
            control: *c,
            target,
        }),
        [a, b] => toffoli(out, *a, *b, target),
        _ if dirty.len() >= controls.len() - 2 => toffoli_ladder(out, controls, target, dirty),
        _ => {
            let borrowed = *dirty
                .first()
                .expect("multi-controlled X with >= 3 controls needs a borrowed qubit");
            let (a, b) = controls.split_at(controls.len().div_ceil(2));
            let mut b_and_anc = b.to_vec();
            b_and_anc.push(borrowed);
            let mut b_and_target = b.to_vec();
            b_and_target.push(target);
            // target ^= AND(b) & anc; anc ^= AND(a); target ^= AND(b) & anc; anc ^= AND(a)
            for _ in 0..2 {
                mcx(out, &b_and_anc, target, a);
                mcx(out, a, borrowed, &b_and_target);
            }
        }
    }
}

/// Linear-size `C^c X` with `c - 2` dirty ancillas.
fn toffoli_ladder(out: &mut Vec<Gate>, x: &[Qubit], y: Qubit, anc: &[Qubit]) {
    let c = x.len();
    // Step i (2 <= i < c) is Toffoli(x_i, a_{i-2} -> a_{i-1}); a_{c-2} stands for y.
    let slot = |i: usize| if i + 1 == c { y } else { anc[i - 1] };
    let step = |out: &mut Vec<Gate>, i: usize| toffoli(out, x[i], anc[i - 2], slot(i));
    let half = |out: &mut Vec<Gate>, top: usize| {
        for i in (2..top).rev() {
            step(out, i);
        }
        toffoli(out, x[0], x[1], anc[0]);
        for i in 2..top {
            step(out, i);
        }
    };
    half(out, c);
    half(out, c - 1);
}
