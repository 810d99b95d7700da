use std::borrow::Cow;

use crate::circuit::{Circuit, MczMode};
use crate::simulator::Statevector;

const MEMORY_BUDGET_BYTES: usize = 64 << 20;
const MAX_DENSE: usize = 4096;

/// Lazily computed states `G^N A|0>`.
///
/// Every attempt of the sampler starts from the same prepared state and
/// applies a deterministic number of iterates, so the pre-measurement state
/// depends only on `N`. Small `N` are kept densely; larger `N` are rebuilt
/// from checkpoints spaced `dense_cap` iterates apart.
pub(crate) struct GroverOrbit {
    iterate: Circuit,
    mode: MczMode,
    dense: Vec<Statevector>,
    dense_cap: usize,
    checkpoints: Vec<Statevector>,
}

impl GroverOrbit {
    pub(crate) fn new(prepared: Statevector, iterate: Circuit, mode: MczMode) -> Self {
        let state_bytes = 16usize << prepared.width();
        let fit = (MEMORY_BUDGET_BYTES / state_bytes).clamp(1, MAX_DENSE);
        let dense_cap = 1usize << (usize::BITS - 1 - fit.leading_zeros());
        Self {
            iterate,
            mode,
            checkpoints: vec![prepared.clone()],
            dense: vec![prepared],
            dense_cap,
        }
    }

    fn step(&self, s: &mut Statevector) {
        s.apply(&self.iterate, self.mode)
            .expect("iterate and state share the register width");
    }

    pub(crate) fn state_at(&mut self, n: u64) -> Cow<'_, Statevector> {
        let cap = self.dense_cap as u64;
        if n < cap {
            while self.dense.len() as u64 <= n {
                let mut next = self.dense.last().expect("seeded").clone();
                self.step(&mut next);
                self.dense.push(next);
            }
            return Cow::Borrowed(&self.dense[n as usize]);
        }
        let idx = (n / cap) as usize;
        while self.checkpoints.len() <= idx {
            let mut next = self.checkpoints.last().expect("seeded").clone();
            for _ in 0..cap {
                self.step(&mut next);
            }
            self.checkpoints.push(next);
        }
        let rem = n % cap;
        if rem == 0 {
            return Cow::Borrowed(&self.checkpoints[idx]);
        }
        let mut s = self.checkpoints[idx].clone();
        for _ in 0..rem {
            self.step(&mut s);
        }
        Cow::Owned(s)
    }
}
