//! Binary polar transform, CRC handling and successive-cancellation decoders.
//!
//! Bit vectors are `&[u8]` slices holding 0/1 values. LLRs use the natural-log
//! convention with positive values favoring bit 0; `±inf` encodes perfect
//! knowledge and `NaN` is never produced.
//!
//! Indexing follows the transform `x = u * F^⊗n` with row vectors: the
//! synthesized channel for `u[0]` is the most degraded one and the
//! reliability recursions interleave (minus branch at even positions, plus
//! branch at odd positions), matching the sequential decoder order. The
//! bit-reversal-permuted variant of the transform differs only by a
//! relabeling of the source indices.

mod crc;
mod sc;
mod scl;

pub use crc::{cascl_select, crc_attach, crc_check, CasclSelection, CrcSpec};
pub(crate) use crc::select_path_index;
pub use sc::{ScDecoder, ScOutput};
pub use scl::{scl_decode, DecoderPath, SclDecoder};

use crate::error::Error;

/// Bit-reversal permutation on `2^n_log2` elements: `perm[i]` is the index
/// whose `n_log2`-bit binary representation is that of `i` reversed. The
/// permutation is an involution. Indices are 0-based.
pub fn bit_reversal_permutation(n_log2: u32) -> Vec<usize> {
    let n = 1usize << n_log2;
    (0..n)
        .map(|i| {
            let mut r = 0usize;
            for b in 0..n_log2 {
                r |= ((i >> b) & 1) << (n_log2 - 1 - b);
            }
            r
        })
        .collect()
}

fn require_bits(u: &[u8]) -> Result<(), Error> {
    if u.iter().any(|&b| b > 1) {
        return Err(Error::invalid("bit block contains values other than 0/1"));
    }
    Ok(())
}

fn require_power_of_two(len: usize) -> Result<u32, Error> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!(
            "block length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros())
}

/// In-place transform by `F^⊗n` acting on a row vector: for each stage the
/// first half of every block absorbs the second half by XOR.
pub(crate) fn butterfly_in_place(x: &mut [u8]) {
    let n = x.len();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let mut base = 0;
        while base < n {
            for i in 0..half {
                x[base + i] ^= x[base + i + half];
            }
            base += len;
        }
        len *= 2;
    }
}

/// Polar encoding `x = u * F^⊗n` over GF(2).
///
/// The input length must be a power of two. Applying the transform twice
/// returns the input (the transform is an involution).
pub fn polar_encode(u: &[u8]) -> Result<Vec<u8>, Error> {
    require_power_of_two(u.len())?;
    require_bits(u)?;
    let mut x = u.to_vec();
    butterfly_in_place(&mut x);
    Ok(x)
}

/// A polar code of length `n` with a fixed frozen pattern.
#[derive(Debug, Clone)]
pub struct PolarCode {
    n: usize,
    stages: u32,
    frozen: Vec<bool>,
    frozen_values: Vec<u8>,
}

impl PolarCode {
    /// Builds a code from a frozen mask (`true` = frozen) and the values the
    /// frozen positions carry.
    pub fn new(frozen_mask: &[bool], frozen_values: &[u8]) -> Result<Self, Error> {
        let stages = require_power_of_two(frozen_mask.len())?;
        if frozen_values.len() != frozen_mask.len() {
            return Err(Error::invalid("frozen mask and value lengths differ"));
        }
        require_bits(frozen_values)?;
        Ok(PolarCode {
            n: frozen_mask.len(),
            stages,
            frozen: frozen_mask.to_vec(),
            frozen_values: frozen_values.to_vec(),
        })
    }

    /// All positions frozen to zero except the listed information indices.
    pub fn from_info_positions(n: usize, info: &[usize]) -> Result<Self, Error> {
        require_power_of_two(n)?;
        let mut mask = vec![true; n];
        for &i in info {
            if i >= n {
                return Err(Error::invalid(format!("information index {i} out of range")));
            }
            mask[i] = false;
        }
        Self::new(&mask, &vec![0u8; n])
    }

    /// Code length.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when every position is frozen.
    pub fn is_empty(&self) -> bool {
        self.frozen.iter().all(|&f| f)
    }

    /// Number of information (non-frozen) positions.
    pub fn info_len(&self) -> usize {
        self.frozen.iter().filter(|&&f| !f).count()
    }

    pub(crate) fn stages(&self) -> u32 {
        self.stages
    }

    pub(crate) fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub(crate) fn frozen_values(&self) -> &[u8] {
        &self.frozen_values
    }
}

/// Check-node LLR combination: the exact rule
/// `2 atanh(tanh(a/2) tanh(b/2))` in a numerically stable form.
#[inline]
pub(crate) fn llr_check(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    if a.is_infinite() || b.is_infinite() {
        let same = (a > 0.0) == (b > 0.0);
        if a.is_infinite() && b.is_infinite() {
            return if same { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        let (inf, fin) = if a.is_infinite() { (a, b) } else { (b, a) };
        return if inf > 0.0 { fin } else { -fin };
    }
    let sign = if (a >= 0.0) == (b >= 0.0) { 1.0 } else { -1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p()
        - (-(a - b).abs()).exp().ln_1p()
}

/// Variable-node LLR combination `b + (1 - 2u) * a`. A clash of opposite
/// infinities resolves to complete uncertainty (0) rather than NaN.
#[inline]
pub(crate) fn llr_var(a: f64, b: f64, u: u8) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    let t = if u == 0 { a } else { -a };
    if t.is_infinite() && b.is_infinite() && (t > 0.0) != (b > 0.0) {
        return 0.0;
    }
    b + t
}

/// Path-metric penalty for deciding `u` against decision LLR `llr`:
/// `ln(1 + exp(-(1 - 2u) * llr))`.
#[inline]
pub(crate) fn metric_penalty(llr: f64, u: u8) -> f64 {
    let m = if u == 0 { llr } else { -llr };
    if m.is_infinite() {
        return if m > 0.0 { 0.0 } else { f64::INFINITY };
    }
    if m <= -37.0 {
        // exp(-m) would overflow well before this; ln(1 + e^{-m}) ~= -m.
        -m
    } else {
        (-m).exp().ln_1p()
    }
}

/// Convenience form of the SC decoder over a one-shot code description.
///
/// Frozen positions echo `frozen_values`; information positions follow the
/// sign of the recursively computed decision LLR (ties decide 0).
pub fn sc_decode(
    channel_llrs: &[f64],
    frozen_mask: &[bool],
    frozen_values: &[u8],
) -> Result<Vec<u8>, Error> {
    let code = PolarCode::new(frozen_mask, frozen_values)?;
    let mut dec = ScDecoder::new(code.len());
    Ok(dec.decode(&code, channel_llrs)?.decisions)
}
