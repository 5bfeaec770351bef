//! Per-component time-slot interleaving for the imaginary-axis halves.
//!
//! The two halves of a component code share the stream gain `r_kk(t)` when
//! they land in the same time slot, so the imaginary half is permuted to
//! decorrelate the paired channel uses. One Fisher-Yates permutation is drawn
//! per component `(stream, level)`, keyed by the global seed.

use crate::rng::{substream, CTX_INTERLEAVER};
use rand::Rng;

#[derive(Debug, Clone)]
struct Perm {
    to_slot: Vec<u32>,
    from_slot: Vec<u32>,
}

/// Deterministic per-component permutations over the `N` time slots.
#[derive(Debug, Clone)]
pub struct PairInterleaver {
    n_slots: usize,
    perms: Vec<Perm>,
}

impl PairInterleaver {
    /// Fisher-Yates permutations keyed by `(seed, stream, level)`.
    pub fn new(seed: u64, num_tx: usize, mod_order: usize, n_slots: usize) -> Self {
        let levels = mod_order / 2;
        let mut perms = Vec::with_capacity(num_tx * levels);
        for s in 0..num_tx {
            for j in 0..levels {
                let mut rng = substream(seed, CTX_INTERLEAVER, ((s as u64) << 32) | j as u64);
                let mut to_slot: Vec<u32> = (0..n_slots as u32).collect();
                for i in (1..n_slots).rev() {
                    let swap = rng.gen_range(0..=i);
                    to_slot.swap(i, swap);
                }
                perms.push(Perm::from_forward(to_slot));
            }
        }
        PairInterleaver { n_slots, perms }
    }

    /// The identity permutation for every component; used by golden vectors.
    pub fn identity(num_tx: usize, mod_order: usize, n_slots: usize) -> Self {
        let levels = mod_order / 2;
        let perms = (0..num_tx * levels)
            .map(|_| Perm::from_forward((0..n_slots as u32).collect()))
            .collect();
        PairInterleaver { n_slots, perms }
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn num_components(&self) -> usize {
        self.perms.len()
    }

    /// Slot carrying the coded bit at imaginary-half offset `q` of component
    /// `comp`.
    pub fn to_slot(&self, comp: usize, q: usize) -> usize {
        self.perms[comp].to_slot[q] as usize
    }

    /// Imaginary-half offset transmitted in slot `t` of component `comp`.
    pub fn from_slot(&self, comp: usize, t: usize) -> usize {
        self.perms[comp].from_slot[t] as usize
    }
}

impl Perm {
    fn from_forward(to_slot: Vec<u32>) -> Self {
        let mut from_slot = vec![0u32; to_slot.len()];
        for (q, &t) in to_slot.iter().enumerate() {
            from_slot[t as usize] = q as u32;
        }
        Perm { to_slot, from_slot }
    }
}
