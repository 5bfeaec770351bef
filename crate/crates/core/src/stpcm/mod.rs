//! The end-to-end space-time polar coded modulation scheme.
//!
//! A frame carries `T m N` source bits split over `T m/2` component polar
//! codes of length `2N`, one per (stream, set-partition level) pair. The two
//! halves of a component feed the real and imaginary axes of the stream's
//! QAM symbols; the imaginary half is slot-interleaved. Detection runs
//! QR/SIC over streams (logical stream 1 is the physical antenna `T`),
//! multistage over levels, and successive cancellation inside each component
//! code, with hard decisions propagating forward.

mod frame_io;
mod interleave;

pub use frame_io::{read_frame, write_frame};
pub use interleave::PairInterleaver;

use crate::construction::CodeConstruction;
use crate::error::Error;
use crate::mimo::ChannelRealization;
use crate::modem::{build_sp_qam, level_llr, Axis, Constellation, LevelObservation};
use crate::polar::{
    crc_attach, crc_check, polar_encode, select_path_index, CrcSpec, PolarCode, ScDecoder,
    SclDecoder,
};
use num_complex::Complex64;

/// Composes the synthesized-channel index `a` from (stream, level, position),
/// all 0-based: `a = s m N + 2 j N + i` with `i < 2N`, `j < m/2`, `s < T`.
pub fn index_compose(stream: usize, level: usize, position: usize, mod_order: usize, n_slots: usize) -> usize {
    stream * mod_order * n_slots + 2 * level * n_slots + position
}

/// Splits a synthesized-channel index into (stream, level, position), the
/// inverse of [`index_compose`]. All indices 0-based.
pub fn index_map(
    a: usize,
    num_tx: usize,
    mod_order: usize,
    n_slots: usize,
) -> Result<(usize, usize, usize), Error> {
    let total = num_tx * mod_order * n_slots;
    if a >= total {
        return Err(Error::invalid(format!("channel index {a} outside 0..{total}")));
    }
    let two_n = 2 * n_slots;
    let position = a % two_n;
    let level = (a / two_n) % (mod_order / 2);
    let stream = a / (mod_order * n_slots);
    Ok((stream, level, position))
}

/// One encoded frame: the source vector and the `T x N` transmit matrix
/// (row index = physical antenna).
#[derive(Debug, Clone)]
pub struct StpcmFrame {
    pub u: Vec<u8>,
    pub x: Vec<Vec<Complex64>>,
}

/// Decoding result.
#[derive(Debug, Clone)]
pub struct DecodeOutput {
    /// Recovered payload (information bits minus any per-component CRC).
    pub payload: Vec<u8>,
    /// All information bits, in ascending channel-index order.
    pub info_bits: Vec<u8>,
    /// The full decided source vector.
    pub u_hat: Vec<u8>,
    /// True when every CRC-bearing component passed its check (vacuously true
    /// without CRC or under SC decoding of CRC-free frames).
    pub crc_ok: bool,
    /// Check/variable-node evaluations spent by the component decoders.
    pub butterfly_visits: u64,
}

struct Component {
    stream: usize,
    level: usize,
    code: PolarCode,
    /// Information positions inside the component, ascending.
    info_positions: Vec<usize>,
    payload_bits: usize,
    crc_bits: usize,
}

/// Encoder/decoder pair for one construction, CRC policy and interleaver.
pub struct StpcmCodec {
    construction: CodeConstruction,
    constellation: Constellation,
    interleaver: PairInterleaver,
    crc: Option<CrcSpec>,
    components: Vec<Component>,
    payload_len: usize,
}

impl StpcmCodec {
    /// Builds the codec. With a `CrcSpec`, every component whose information
    /// allocation exceeds the CRC width donates its last `width` information
    /// positions to a component-local CRC; smaller components stay unguarded.
    pub fn new(
        construction: CodeConstruction,
        crc: Option<CrcSpec>,
        interleaver: PairInterleaver,
    ) -> Result<Self, Error> {
        if interleaver.n_slots() != construction.n_slots()
            || interleaver.num_components()
                != construction.num_tx() * construction.mod_order() / 2
        {
            return Err(Error::invalid("interleaver shape does not match construction"));
        }
        let constellation = build_sp_qam(construction.mod_order())?;
        let num_tx = construction.num_tx();
        let mod_order = construction.mod_order();
        let n_slots = construction.n_slots();
        let levels = mod_order / 2;
        let component_len = 2 * n_slots;

        let mut info_by_component: Vec<Vec<usize>> = vec![Vec::new(); num_tx * levels];
        for &a in construction.info_set() {
            let (s, j, i) = index_map(a, num_tx, mod_order, n_slots)?;
            info_by_component[s * levels + j].push(i);
        }

        let mut components = Vec::with_capacity(num_tx * levels);
        let mut payload_len = 0usize;
        for (c, info_positions) in info_by_component.into_iter().enumerate() {
            let stream = c / levels;
            let level = c % levels;
            let mut mask = vec![true; component_len];
            for &i in &info_positions {
                mask[i] = false;
            }
            let code = PolarCode::new(&mask, &vec![0u8; component_len])?;
            let crc_bits = match &crc {
                Some(spec) if info_positions.len() > spec.width() as usize => {
                    spec.width() as usize
                }
                _ => 0,
            };
            let payload_bits = info_positions.len() - crc_bits;
            payload_len += payload_bits;
            components.push(Component {
                stream,
                level,
                code,
                info_positions,
                payload_bits,
                crc_bits,
            });
        }

        Ok(StpcmCodec {
            construction,
            constellation,
            interleaver,
            crc,
            components,
            payload_len,
        })
    }

    pub fn construction(&self) -> &CodeConstruction {
        &self.construction
    }

    /// Payload bits carried per frame (`K` minus CRC overhead).
    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    fn num_tx(&self) -> usize {
        self.construction.num_tx()
    }

    fn levels(&self) -> usize {
        self.construction.mod_order() / 2
    }

    fn n_slots(&self) -> usize {
        self.construction.n_slots()
    }

    /// Scatters the payload (with any CRC attachments) into the length-`TmN`
    /// source vector.
    fn assemble_source(&self, payload: &[u8]) -> Result<Vec<u8>, Error> {
        if payload.len() != self.payload_len {
            return Err(Error::invalid(format!(
                "payload length {} does not match codec ({})",
                payload.len(),
                self.payload_len
            )));
        }
        if payload.iter().any(|&b| b > 1) {
            return Err(Error::invalid("payload contains values other than 0/1"));
        }
        let mod_order = self.construction.mod_order();
        let n_slots = self.n_slots();
        let mut u = vec![0u8; self.construction.total_channels()];
        let mut offset = 0usize;
        for comp in self.components.iter() {
            let chunk = &payload[offset..offset + comp.payload_bits];
            offset += comp.payload_bits;
            let bits = if comp.crc_bits > 0 {
                crc_attach(chunk, self.crc.as_ref().expect("crc present"))?
            } else {
                chunk.to_vec()
            };
            debug_assert_eq!(bits.len(), comp.info_positions.len());
            let (s, j) = (comp.stream, comp.level);
            for (&i, &b) in comp.info_positions.iter().zip(bits.iter()) {
                u[index_compose(s, j, i, mod_order, n_slots)] = b;
            }
        }
        Ok(u)
    }

    /// Encodes a payload into a frame: per-component polar transforms, halves
    /// split over the two axes, imaginary-half interleaving, symbol mapping.
    pub fn encode(&self, payload: &[u8]) -> Result<StpcmFrame, Error> {
        let u = self.assemble_source(payload)?;
        let num_tx = self.num_tx();
        let levels = self.levels();
        let n_slots = self.n_slots();
        let mod_order = self.construction.mod_order();

        let mut coded: Vec<Vec<u8>> = Vec::with_capacity(num_tx * levels);
        for c in 0..num_tx * levels {
            let (s, j) = (c / levels, c % levels);
            let block: Vec<u8> = (0..2 * n_slots)
                .map(|i| u[index_compose(s, j, i, mod_order, n_slots)])
                .collect();
            coded.push(polar_encode(&block)?);
        }

        let mut x = vec![vec![Complex64::new(0.0, 0.0); n_slots]; num_tx];
        let mut bits = vec![0u8; mod_order];
        for s in 0..num_tx {
            let physical = num_tx - 1 - s;
            for t in 0..n_slots {
                for j in 0..levels {
                    let c = s * levels + j;
                    bits[j] = coded[c][t];
                    bits[levels + j] = coded[c][n_slots + self.interleaver.from_slot(c, t)];
                }
                x[physical][t] = self.constellation.map_symbol(&bits)?;
            }
        }
        Ok(StpcmFrame { u, x })
    }

    /// Joint QR/SIC detection and SC decoding.
    pub fn decode_sc(
        &self,
        y: &[Vec<Complex64>],
        realizations: &[ChannelRealization],
        sigma: f64,
    ) -> Result<DecodeOutput, Error> {
        self.decode_inner(y, realizations, sigma, None)
    }

    /// Joint QR/SIC detection and CRC-aided list decoding with width
    /// `list_size`. With `list_size = 1` the output matches [`Self::decode_sc`].
    pub fn decode_cascl(
        &self,
        y: &[Vec<Complex64>],
        realizations: &[ChannelRealization],
        sigma: f64,
        list_size: usize,
    ) -> Result<DecodeOutput, Error> {
        self.decode_inner(y, realizations, sigma, Some(list_size))
    }

    fn decode_inner(
        &self,
        y: &[Vec<Complex64>],
        realizations: &[ChannelRealization],
        sigma: f64,
        list_size: Option<usize>,
    ) -> Result<DecodeOutput, Error> {
        let num_tx = self.num_tx();
        let num_rx = self.construction.num_rx();
        let n_slots = self.n_slots();
        let levels = self.levels();
        let component_len = 2 * n_slots;
        if y.len() != n_slots || realizations.len() != n_slots {
            return Err(Error::invalid("observation span does not match slot count"));
        }
        if y.iter().any(|col| col.len() != num_rx)
            || realizations
                .iter()
                .any(|r| r.num_rx() != num_rx || r.num_tx() != num_tx)
        {
            return Err(Error::invalid("antenna dimensions do not match construction"));
        }
        if !(sigma > 0.0) {
            return Err(Error::invalid("noise sigma must be positive"));
        }

        // Q^H y once per slot; SIC then works on the rotated vectors.
        let rotated: Vec<Vec<Complex64>> = y
            .iter()
            .zip(realizations.iter())
            .map(|(col, real)| real.q.adjoint_mul_vec(col))
            .collect();

        let mut decided = vec![vec![Complex64::new(0.0, 0.0); n_slots]; num_tx];
        let mut u_hat = vec![0u8; self.construction.total_channels()];
        let mut visits = 0u64;
        let mut crc_ok = true;

        let mut sc = ScDecoder::new(component_len);
        let mut scl = list_size.map(|l| SclDecoder::new(component_len, l));

        let mut llrs = vec![0.0f64; component_len];
        let mut real_known: Vec<Vec<u8>> = vec![Vec::with_capacity(levels); n_slots];
        let mut imag_known: Vec<Vec<u8>> = vec![Vec::with_capacity(levels); n_slots];
        let mut axis_bits = vec![0u8; 2 * levels];

        for s in 0..num_tx {
            let physical = num_tx - 1 - s;
            // Effective scalar observations after cancelling decided streams.
            let eff: Vec<(Complex64, f64)> = (0..n_slots)
                .map(|t| {
                    let r = &realizations[t].r;
                    let mut v = rotated[t][physical];
                    for p in (physical + 1)..num_tx {
                        v -= r[(physical, p)] * decided[p][t];
                    }
                    (v, r[(physical, physical)].re)
                })
                .collect();

            for slot_bits in real_known.iter_mut() {
                slot_bits.clear();
            }
            for slot_bits in imag_known.iter_mut() {
                slot_bits.clear();
            }

            for j in 0..levels {
                let c = s * levels + j;
                let comp = &self.components[c];
                for t in 0..n_slots {
                    let (value, gain) = eff[t];
                    let obs = LevelObservation { value, gain, sigma };
                    llrs[t] =
                        level_llr(&obs, &real_known[t], j + 1, Axis::Real, &self.constellation)?;
                }
                for q in 0..n_slots {
                    let t = self.interleaver.to_slot(c, q);
                    let (value, gain) = eff[t];
                    let obs = LevelObservation { value, gain, sigma };
                    llrs[n_slots + q] =
                        level_llr(&obs, &imag_known[t], j + 1, Axis::Imag, &self.constellation)?;
                }

                let (decisions, codeword) = match scl.as_mut() {
                    None => {
                        let out = sc.decode(&comp.code, &llrs)?;
                        visits += sc.butterfly_visits();
                        (out.decisions, out.codeword)
                    }
                    Some(decoder) => {
                        let paths = decoder.decode(&comp.code, &llrs)?;
                        visits += decoder.butterfly_visits();
                        let chosen = match (&self.crc, comp.crc_bits) {
                            (Some(spec), bits) if bits > 0 => {
                                let (idx, passed) =
                                    select_path_index(&paths, spec, &comp.info_positions);
                                crc_ok &= passed;
                                idx
                            }
                            _ => 0,
                        };
                        let path = &paths[chosen];
                        (path.decisions.clone(), path.codeword.clone())
                    }
                };

                let mod_order = self.construction.mod_order();
                for (i, &b) in decisions.iter().enumerate() {
                    u_hat[index_compose(s, j, i, mod_order, n_slots)] = b;
                }
                for t in 0..n_slots {
                    real_known[t].push(codeword[t]);
                    imag_known[t].push(codeword[n_slots + self.interleaver.from_slot(c, t)]);
                }
            }

            // Reconstruct this stream's symbols for cancellation below.
            for t in 0..n_slots {
                axis_bits[..levels].copy_from_slice(&real_known[t]);
                axis_bits[levels..].copy_from_slice(&imag_known[t]);
                decided[physical][t] = self.constellation.map_symbol(&axis_bits)?;
            }
        }

        // Under SC decoding of a CRC-bearing frame, still report CRC status.
        if list_size.is_none() {
            if let Some(spec) = &self.crc {
                for comp in self.components.iter().filter(|c| c.crc_bits > 0) {
                    let mod_order = self.construction.mod_order();
                    let (s, j) = (comp.stream, comp.level);
                    let bits: Vec<u8> = comp
                        .info_positions
                        .iter()
                        .map(|&i| u_hat[index_compose(s, j, i, mod_order, n_slots)])
                        .collect();
                    crc_ok &= crc_check(&bits, spec);
                }
            }
        }

        let info_bits: Vec<u8> = self
            .construction
            .info_set()
            .iter()
            .map(|&a| u_hat[a])
            .collect();
        let payload = self.extract_payload(&u_hat);
        Ok(DecodeOutput {
            payload,
            info_bits,
            u_hat,
            crc_ok,
            butterfly_visits: visits,
        })
    }

    fn extract_payload(&self, u_hat: &[u8]) -> Vec<u8> {
        let mod_order = self.construction.mod_order();
        let n_slots = self.n_slots();
        let mut payload = Vec::with_capacity(self.payload_len);
        for comp in self.components.iter() {
            let (s, j) = (comp.stream, comp.level);
            for &i in comp.info_positions.iter().take(comp.payload_bits) {
                payload.push(u_hat[index_compose(s, j, i, mod_order, n_slots)]);
            }
        }
        payload
    }
}
