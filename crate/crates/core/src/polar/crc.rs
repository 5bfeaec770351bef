//! Bit-serial CRC attachment, checking and CRC-aided path selection.

use super::DecoderPath;
use crate::error::Error;

/// CRC register description.
///
/// The register is clocked bit-serially, most significant bit first. With
/// `reflect_in` the input bits are consumed in reverse order; with
/// `reflect_out` the emitted checksum bits are reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcSpec {
    width: u32,
    poly: u32,
    init: u32,
    reflect_in: bool,
    reflect_out: bool,
}

impl CrcSpec {
    pub fn new(
        width: u32,
        poly: u32,
        init: u32,
        reflect_in: bool,
        reflect_out: bool,
    ) -> Result<Self, Error> {
        if width == 0 || width > 32 {
            return Err(Error::invalid(format!("CRC width {width} outside 1..=32")));
        }
        if width < 32 && poly >> width != 0 {
            return Err(Error::invalid("CRC polynomial wider than the register"));
        }
        if poly == 0 {
            return Err(Error::invalid("CRC polynomial must be nonzero"));
        }
        Ok(CrcSpec {
            width,
            poly,
            init,
            reflect_in,
            reflect_out,
        })
    }

    /// CRC-16/CCITT register (poly 0x1021, zero init, no reflection); the
    /// default used by the CRC-aided list decoder.
    pub fn crc16() -> Self {
        CrcSpec::new(16, 0x1021, 0, false, false).expect("valid built-in spec")
    }

    /// 8-bit register with poly 0x07.
    pub fn crc8() -> Self {
        CrcSpec::new(8, 0x07, 0, false, false).expect("valid built-in spec")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    fn mask(&self) -> u32 {
        if self.width == 32 {
            u32::MAX
        } else {
            (1u32 << self.width) - 1
        }
    }

    fn register<'a, I: Iterator<Item = &'a u8>>(&self, bits: I) -> u32 {
        let mask = self.mask();
        let top = 1u32 << (self.width - 1);
        let mut reg = self.init & mask;
        for &bit in bits {
            let fed = ((reg & top) != 0) ^ (bit == 1);
            reg = (reg << 1) & mask;
            if fed {
                reg ^= self.poly & mask;
            }
        }
        reg
    }

    /// Checksum of a bit sequence.
    pub fn checksum(&self, payload: &[u8]) -> u32 {
        let reg = if self.reflect_in {
            self.register(payload.iter().rev())
        } else {
            self.register(payload.iter())
        };
        if self.reflect_out {
            reg.reverse_bits() >> (32 - self.width)
        } else {
            reg
        }
    }
}

/// Appends the CRC checksum bits (most significant first) to `payload`.
pub fn crc_attach(payload: &[u8], spec: &CrcSpec) -> Result<Vec<u8>, Error> {
    if payload.is_empty() {
        return Err(Error::invalid("CRC payload must be non-empty"));
    }
    if payload.iter().any(|&b| b > 1) {
        return Err(Error::invalid("CRC payload contains values other than 0/1"));
    }
    let crc = spec.checksum(payload);
    let mut out = payload.to_vec();
    for i in (0..spec.width).rev() {
        out.push(((crc >> i) & 1) as u8);
    }
    Ok(out)
}

/// Verifies a `payload || checksum` block. Blocks shorter than the CRC width
/// fail the check.
pub fn crc_check(block: &[u8], spec: &CrcSpec) -> bool {
    let w = spec.width as usize;
    if block.len() <= w {
        return false;
    }
    let (payload, tail) = block.split_at(block.len() - w);
    let crc = spec.checksum(payload);
    tail.iter()
        .enumerate()
        .all(|(i, &b)| b == ((crc >> (w - 1 - i)) & 1) as u8)
}

/// Outcome of CRC-aided selection.
#[derive(Debug, Clone)]
pub struct CasclSelection {
    /// Information bits of the chosen path.
    pub info_bits: Vec<u8>,
    /// Whether the chosen path passed the CRC. When `false` the selection
    /// fell back to the best-metric path.
    pub crc_passed: bool,
}

/// Index of the best-metric path whose information bits pass the CRC, or the
/// overall best (index 0) flagged `false` when none passes.
pub(crate) fn select_path_index(
    paths: &[DecoderPath],
    spec: &CrcSpec,
    info_positions: &[usize],
) -> (usize, bool) {
    for (idx, path) in paths.iter().enumerate() {
        if crc_check(&path.extract(info_positions), spec) {
            return (idx, true);
        }
    }
    (0, false)
}

/// Picks the best-metric path whose extracted information bits pass the CRC;
/// falls back to the overall best-metric path when none passes.
///
/// `paths` must be sorted by ascending metric (as returned by the list
/// decoder) and non-empty.
pub fn cascl_select(
    paths: &[DecoderPath],
    spec: &CrcSpec,
    info_positions: &[usize],
) -> Result<CasclSelection, Error> {
    if paths.is_empty() {
        return Err(Error::invalid("path list must be non-empty"));
    }
    let (idx, crc_passed) = select_path_index(paths, spec, info_positions);
    Ok(CasclSelection {
        info_bits: paths[idx].extract(info_positions),
        crc_passed,
    })
}
