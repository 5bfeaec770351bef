//! Successive-cancellation decoding.

use super::{llr_check, llr_var, metric_penalty, PolarCode};
use crate::error::Error;

/// Result of one SC decode.
#[derive(Debug, Clone)]
pub struct ScOutput {
    /// Decided source bits.
    pub decisions: Vec<u8>,
    /// Re-encoded codeword implied by the decisions (channel order).
    pub codeword: Vec<u8>,
    /// Accumulated path-metric penalty of the single SC path.
    pub metric: f64,
}

/// Per-path decoder state: the LLR tree, the stored left-sibling codewords and
/// the decisions so far.
#[derive(Debug, Clone)]
pub(crate) struct TreeState {
    /// `llr[d]` holds the active block at depth `d` (`n >> d` entries); depth 0
    /// is the channel.
    llr: Vec<Vec<f64>>,
    /// `left[d]` holds the codeword of the completed left child of the open
    /// node at depth `d` (`n >> (d+1)` entries).
    left: Vec<Vec<u8>>,
    decisions: Vec<u8>,
    pub(crate) metric: f64,
    scratch: Vec<u8>,
    bubble: Vec<u8>,
}

impl TreeState {
    pub(crate) fn new(n: usize, stages: u32) -> Self {
        let llr = (0..=stages).map(|d| vec![0.0; n >> d]).collect();
        let left = (0..stages).map(|d| vec![0u8; n >> (d + 1)]).collect();
        TreeState {
            llr,
            left,
            decisions: Vec::with_capacity(n),
            metric: 0.0,
            scratch: vec![0u8; n],
            bubble: vec![0u8; n],
        }
    }

    pub(crate) fn reset(&mut self, channel_llrs: &[f64]) {
        self.llr[0].copy_from_slice(channel_llrs);
        self.decisions.clear();
        self.metric = 0.0;
    }

    pub(crate) fn decisions(&self) -> &[u8] {
        &self.decisions
    }

    /// Brings the LLR tree to the leaf for bit `phase` and returns the
    /// decision LLR. Counts check/variable-node evaluations in `visits`.
    pub(crate) fn leaf_llr(&mut self, phase: usize, stages: u32, visits: &mut u64) -> f64 {
        let start_depth = if phase == 0 {
            0
        } else {
            let z = phase.trailing_zeros();
            let d = stages - z; // node at depth d is a right child
            let half = self.llr[(d - 1) as usize].len() / 2;
            for i in 0..half {
                let a = self.llr[(d - 1) as usize][i];
                let b = self.llr[(d - 1) as usize][i + half];
                self.llr[d as usize][i] = llr_var(a, b, self.left[(d - 1) as usize][i]);
            }
            *visits += half as u64;
            d
        };
        for d in start_depth..stages {
            let half = self.llr[d as usize].len() / 2;
            for i in 0..half {
                let a = self.llr[d as usize][i];
                let b = self.llr[d as usize][i + half];
                self.llr[(d + 1) as usize][i] = llr_check(a, b);
            }
            *visits += half as u64;
        }
        self.llr[stages as usize][0]
    }

    /// Records the decision for bit `phase` and propagates partial sums.
    /// After the final phase the root buffer of `left`-combines has produced
    /// the full codeword, returned via `codeword()`.
    pub(crate) fn apply_decision(&mut self, phase: usize, bit: u8, stages: u32) {
        self.decisions.push(bit);
        self.bubble[0] = bit;
        let mut len = 1usize;
        let mut depth = stages;
        let mut t = phase;
        while t & 1 == 1 && depth > 0 {
            depth -= 1;
            let left = &self.left[depth as usize];
            debug_assert_eq!(left.len(), len);
            for i in 0..len {
                self.scratch[i] = left[i] ^ self.bubble[i];
                self.scratch[i + len] = self.bubble[i];
            }
            len *= 2;
            self.bubble[..len].copy_from_slice(&self.scratch[..len]);
            t >>= 1;
        }
        if depth > 0 {
            self.left[(depth - 1) as usize][..len].copy_from_slice(&self.bubble[..len]);
        }
    }

    /// Valid after the final phase: the re-encoded codeword.
    pub(crate) fn codeword(&self, n: usize) -> Vec<u8> {
        self.bubble[..n].to_vec()
    }
}

/// Reusable SC decoder with owned scratch buffers.
///
/// One instance serves one block length; a decode call is sequential, and
/// distinct instances may run concurrently.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: usize,
    state: TreeState,
    visits: u64,
}

impl ScDecoder {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n > 0, "block length must be 2^n");
        let stages = n.trailing_zeros();
        ScDecoder {
            n,
            state: TreeState::new(n, stages),
            visits: 0,
        }
    }

    /// Total check/variable-node evaluations across all decodes so far.
    pub fn butterfly_visits(&self) -> u64 {
        self.visits
    }

    pub fn decode(&mut self, code: &PolarCode, channel_llrs: &[f64]) -> Result<ScOutput, Error> {
        if code.len() != self.n {
            return Err(Error::invalid("code length does not match decoder"));
        }
        if channel_llrs.len() != self.n {
            return Err(Error::invalid("LLR block length does not match code"));
        }
        if channel_llrs.iter().any(|l| l.is_nan()) {
            return Err(Error::invalid("LLR block contains NaN"));
        }
        let stages = code.stages();
        self.state.reset(channel_llrs);
        for phase in 0..self.n {
            let llr = self.state.leaf_llr(phase, stages, &mut self.visits);
            let bit = if code.frozen()[phase] {
                code.frozen_values()[phase]
            } else if llr >= 0.0 {
                0
            } else {
                1
            };
            self.state.metric += metric_penalty(llr, bit);
            self.state.apply_decision(phase, bit, stages);
        }
        Ok(ScOutput {
            decisions: self.state.decisions().to_vec(),
            codeword: self.state.codeword(self.n),
            metric: self.state.metric,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::polar_encode;

    fn perfect_llrs(codeword: &[u8]) -> Vec<f64> {
        codeword
            .iter()
            .map(|&b| if b == 0 { f64::INFINITY } else { f64::NEG_INFINITY })
            .collect()
    }

    #[test]
    fn frozen_positions_echo_values() {
        let mask = vec![true; 8];
        let vals = vec![0u8; 8];
        let code = PolarCode::new(&mask, &vals).unwrap();
        let mut dec = ScDecoder::new(8);
        let llrs = vec![-0.5, 1.0, -2.0, 0.3, 4.0, -1.0, 0.0, 2.0];
        let out = dec.decode(&code, &llrs).unwrap();
        assert_eq!(out.decisions, vals);
    }

    #[test]
    fn noiseless_two_bit_roundtrip() {
        let code = PolarCode::new(&[false, false], &[0, 0]).unwrap();
        let mut dec = ScDecoder::new(2);
        let out = dec
            .decode(&code, &[f64::INFINITY, f64::INFINITY])
            .unwrap();
        assert_eq!(out.decisions, vec![0, 0]);
    }

    #[test]
    fn decodes_last_info_bit_over_perfect_channel() {
        // u = (0,0,0,1) with positions {0,1,2} frozen to zero.
        let u = [0u8, 0, 0, 1];
        let x = polar_encode(&u).unwrap();
        let code = PolarCode::new(&[true, true, true, false], &[0; 4]).unwrap();
        let mut dec = ScDecoder::new(4);
        let out = dec.decode(&code, &perfect_llrs(&x)).unwrap();
        assert_eq!(out.decisions[3], 1);
        assert_eq!(out.codeword, x);
    }

    #[test]
    fn roundtrip_exhaustive_small_blocks() {
        // Every frozen set and every information pattern for N in {2,4,8,16}:
        // encode then SC-decode with perfect-sign LLRs recovers the input.
        for n in [2usize, 4, 8, 16] {
            for frozen_pat in 0..(1usize << n) {
                let mask: Vec<bool> = (0..n).map(|i| (frozen_pat >> i) & 1 == 1).collect();
                let info: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
                // Probe a couple of info patterns rather than all 2^K.
                for probe in [0usize, usize::MAX, 0x5555_5555] {
                    let mut u = vec![0u8; n];
                    for (b, &pos) in info.iter().enumerate() {
                        u[pos] = ((probe >> (b % 60)) & 1) as u8;
                    }
                    let x = polar_encode(&u).unwrap();
                    let code = PolarCode::new(&mask, &vec![0u8; n]).unwrap();
                    let mut dec = ScDecoder::new(n);
                    let out = dec.decode(&code, &perfect_llrs(&x)).unwrap();
                    assert_eq!(out.decisions, u, "n={n} frozen={frozen_pat:b}");
                    assert_eq!(out.codeword, x);
                }
            }
        }
    }

    #[test]
    fn visit_count_is_n_log_n() {
        for n in [4usize, 16, 64, 256] {
            let code = PolarCode::from_info_positions(n, &[n - 1]).unwrap();
            let mut dec = ScDecoder::new(n);
            let llrs = vec![0.7; n];
            dec.decode(&code, &llrs).unwrap();
            assert_eq!(
                dec.butterfly_visits(),
                (n as u64) * n.trailing_zeros() as u64
            );
        }
    }
}
