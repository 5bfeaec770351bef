//! Reliability evaluation and frozen-set selection.
//!
//! Construction approximates each detection stream of the fading chain by an
//! AWGN channel of identical ergodic capacity, fits a consistent-Gaussian LLR
//! mean to every set-partition level of that channel by Monte-Carlo, evolves
//! the means through the binary polarization, and keeps the `K` most reliable
//! of the `T m N` synthesized channels.

mod bec;
mod capacity;
mod ga;

pub use bec::bec_bhattacharyya;
pub use capacity::{
    awgn_capacity_qam, chi2_pdf, equivalent_awgn_sigma, ergodic_stream_capacity,
    mimo_ergodic_capacity, solve_awgn_sigma_for_capacity, EquivalentAwgn, CAPACITY_TOLERANCE,
    SIGMA_BRACKET_HI, SIGMA_BRACKET_LO,
};
pub use ga::{ga_error_probability, ga_evolve};

use crate::error::Error;
use crate::modem::{build_sp_qam, level_llr, Axis, Constellation, LevelObservation};
use crate::rng::{standard_normal_pair, substream, CTX_CONSTRUCTION};
use crate::stpcm::index_compose;
use num_complex::Complex64;
use rand::Rng;
use std::io::{BufRead, Write};

/// Samples drawn per level when fitting the Gaussian LLR mean.
const LEVEL_FIT_SAMPLES: usize = 100_000;
/// Fixed seed for construction-time Monte-Carlo, so a construction depends
/// only on its parameters.
const LEVEL_FIT_SEED: u64 = 0x7374_7063_6d31;

/// What a reliability figure measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Erasure/Bhattacharyya parameter in `[0, 1]`.
    Bhattacharyya,
    /// Mean LLR under the Gaussian approximation, `>= 0`.
    GaLlrMean,
    /// Per-channel error probability in `[0, 1/2]`.
    ErrorProbability,
}

/// Per-synthesized-channel reliability figures in decoder index order.
#[derive(Debug, Clone)]
pub struct ReliabilityVector {
    pub values: Vec<f64>,
    pub kind: MetricKind,
}

/// A frozen-set selection for the space-time scheme, together with the
/// per-stream equivalent noise levels it was derived from.
#[derive(Debug, Clone)]
pub struct CodeConstruction {
    num_tx: usize,
    num_rx: usize,
    mod_order: usize,
    n_slots: usize,
    k: usize,
    design_sigma: f64,
    /// Equivalent AWGN sigma per logical stream (stream 1 is detected first).
    stream_sigmas: Vec<f64>,
    /// Sorted information-channel indices, 0-based over `0..TmN`.
    info_set: Vec<usize>,
    /// GA error probability per synthesized channel, 0-based over `0..TmN`.
    error_probs: Vec<f64>,
}

/// Fits the mean of the sign-folded level LLR over a unit-gain AWGN channel
/// at noise `sigma`, conditioning the demapper on the true lower-level bits.
fn level_llr_mean(
    constellation: &Constellation,
    level: usize,
    sigma: f64,
    stream: usize,
    level_idx: usize,
) -> Result<f64, Error> {
    let bits_per_axis = constellation.bits_per_axis();
    let axis_std = (sigma * sigma / 2.0).sqrt();
    let mut rng = substream(
        LEVEL_FIT_SEED,
        CTX_CONSTRUCTION,
        (stream as u64) << 32 | level_idx as u64,
    );
    let mut bits = vec![0u8; bits_per_axis];
    let mut acc = 0.0;
    for _ in 0..LEVEL_FIT_SAMPLES {
        for b in bits.iter_mut() {
            *b = rng.gen_range(0..=1);
        }
        let amp = constellation.axis_amplitude(&bits);
        let (g, _) = standard_normal_pair(&mut rng);
        let obs = LevelObservation {
            value: Complex64::new(amp + axis_std * g, 0.0),
            gain: 1.0,
            sigma,
        };
        let llr = level_llr(&obs, &bits[..level - 1], level, Axis::Real, constellation)?;
        acc += if bits[level - 1] == 0 { llr } else { -llr };
    }
    Ok((acc / LEVEL_FIT_SAMPLES as f64).max(0.0))
}

/// Builds a construction for `T x M` antennas, `2^m`-ary QAM, `N` time slots
/// and `K` information channels at design noise `sigma`.
pub fn build_construction(
    num_tx: usize,
    num_rx: usize,
    mod_order: usize,
    n_slots: usize,
    k: usize,
    sigma: f64,
) -> Result<CodeConstruction, Error> {
    validate_shape(num_tx, num_rx, mod_order, n_slots)?;
    let total = num_tx * mod_order * n_slots;
    if k > total {
        return Err(Error::invalid(format!("K = {k} exceeds TmN = {total}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("design sigma must be positive"));
    }

    // Logical stream s is detected s-th, i.e. physical antenna T + 1 - s with
    // chi-square gain order 2(M - (T + 1 - s) + 1).
    let mut stream_sigmas = Vec::with_capacity(num_tx);
    for s in 1..=num_tx {
        let physical = num_tx + 1 - s;
        let eq = equivalent_awgn_sigma(sigma, mod_order, num_rx, physical)?;
        stream_sigmas.push(eq.sigma);
    }

    let mut construction = CodeConstruction {
        num_tx,
        num_rx,
        mod_order,
        n_slots,
        k,
        design_sigma: sigma,
        stream_sigmas,
        info_set: Vec::new(),
        error_probs: Vec::new(),
    };
    construction.error_probs = construction.compute_error_probs()?;

    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| {
        construction.error_probs[a]
            .partial_cmp(&construction.error_probs[b])
            .expect("error probabilities are never NaN")
            .then(a.cmp(&b))
    });
    let mut info: Vec<usize> = order.into_iter().take(k).collect();
    info.sort_unstable();
    construction.info_set = info;
    Ok(construction)
}

fn validate_shape(
    num_tx: usize,
    num_rx: usize,
    mod_order: usize,
    n_slots: usize,
) -> Result<(), Error> {
    if num_tx == 0 || num_rx < num_tx {
        return Err(Error::invalid("antenna counts must satisfy M >= T >= 1"));
    }
    if mod_order < 2 || mod_order % 2 != 0 {
        return Err(Error::invalid("modulation order must be even and >= 2"));
    }
    if n_slots == 0 || !n_slots.is_power_of_two() {
        return Err(Error::invalid("slot count must be a power of two"));
    }
    Ok(())
}

impl CodeConstruction {
    /// GA error probabilities for every synthesized channel, derived from the
    /// per-stream equivalent sigmas. Deterministic given the parameters.
    fn compute_error_probs(&self) -> Result<Vec<f64>, Error> {
        let constellation = build_sp_qam(self.mod_order)?;
        let levels = self.mod_order / 2;
        let component_len = 2 * self.n_slots;
        let stages = component_len.trailing_zeros();
        let mut probs = vec![0.0; self.num_tx * self.mod_order * self.n_slots];
        for s in 0..self.num_tx {
            for j in 0..levels {
                let mean = level_llr_mean(
                    &constellation,
                    j + 1,
                    self.stream_sigmas[s],
                    s,
                    j,
                )?;
                let means = ga_evolve(stages, mean)?;
                for (i, &m) in means.iter().enumerate() {
                    let a = index_compose(s, j, i, self.mod_order, self.n_slots);
                    probs[a] = ga_error_probability(m);
                }
            }
        }
        Ok(probs)
    }

    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    pub fn num_rx(&self) -> usize {
        self.num_rx
    }

    pub fn mod_order(&self) -> usize {
        self.mod_order
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    /// Number of information channels (payload plus any CRC bits).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn design_sigma(&self) -> f64 {
        self.design_sigma
    }

    /// Equivalent AWGN sigma per logical stream.
    pub fn stream_sigmas(&self) -> &[f64] {
        &self.stream_sigmas
    }

    /// Sorted 0-based information-channel indices.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// GA error probability per synthesized channel.
    pub fn error_probs(&self) -> &[f64] {
        &self.error_probs
    }

    /// Total number of synthesized channels `T m N`.
    pub fn total_channels(&self) -> usize {
        self.num_tx * self.mod_order * self.n_slots
    }

    /// GA-predicted block error rate `1 - prod_(a in A) (1 - P_e(a))`.
    pub fn ga_bler(&self) -> f64 {
        let log_ok: f64 = self
            .info_set
            .iter()
            .map(|&a| (-self.error_probs[a]).ln_1p())
            .sum();
        -log_ok.exp_m1()
    }

    /// Writes the plain-text v1 format: a header line
    /// `stpcm-construction v1 T M m N K sigma`, one sigma per stream, then
    /// the sorted 1-based information indices.
    pub fn to_writer<W: Write>(&self, mut w: W) -> Result<(), Error> {
        writeln!(
            w,
            "stpcm-construction v1 {} {} {} {} {} {}",
            self.num_tx, self.num_rx, self.mod_order, self.n_slots, self.k, self.design_sigma
        )?;
        for s in &self.stream_sigmas {
            writeln!(w, "{s}")?;
        }
        let indices: Vec<String> = self.info_set.iter().map(|a| (a + 1).to_string()).collect();
        writeln!(w, "{}", indices.join(" "))?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.to_writer(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("format is ASCII")
    }

    /// Parses the v1 format and recomputes the reliability table (needed for
    /// GA predictions) from the recorded parameters.
    pub fn from_reader<R: BufRead>(r: R) -> Result<Self, Error> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty construction file".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 8 || fields[0] != "stpcm-construction" || fields[1] != "v1" {
            return Err(Error::Parse("bad construction header".into()));
        }
        let num_tx: usize = parse_field(fields[2], "T")?;
        let num_rx: usize = parse_field(fields[3], "M")?;
        let mod_order: usize = parse_field(fields[4], "m")?;
        let n_slots: usize = parse_field(fields[5], "N")?;
        let k: usize = parse_field(fields[6], "K")?;
        let design_sigma: f64 = parse_field(fields[7], "sigma")?;
        validate_shape(num_tx, num_rx, mod_order, n_slots)?;

        let mut stream_sigmas = Vec::with_capacity(num_tx);
        for _ in 0..num_tx {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing stream sigma line".into()))??;
            stream_sigmas.push(parse_field(line.trim(), "stream sigma")?);
        }
        let idx_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing information-set line".into()))??;
        let mut info_set = Vec::with_capacity(k);
        for tok in idx_line.split_whitespace() {
            let a: usize = parse_field(tok, "information index")?;
            if a == 0 || a > num_tx * mod_order * n_slots {
                return Err(Error::Parse(format!("information index {a} out of range")));
            }
            info_set.push(a - 1);
        }
        if info_set.len() != k {
            return Err(Error::Parse(format!(
                "expected {k} information indices, found {}",
                info_set.len()
            )));
        }
        info_set.sort_unstable();
        info_set.dedup();
        if info_set.len() != k {
            return Err(Error::Parse("duplicate information indices".into()));
        }

        let mut construction = CodeConstruction {
            num_tx,
            num_rx,
            mod_order,
            n_slots,
            k,
            design_sigma,
            stream_sigmas,
            info_set,
            error_probs: Vec::new(),
        };
        construction.error_probs = construction.compute_error_probs()?;
        Ok(construction)
    }
}

fn parse_field<T: std::str::FromStr>(tok: &str, name: &str) -> Result<T, Error> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad {name} field: {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_empty_selections() {
        let c = build_construction(1, 1, 2, 4, 8, 0.5).unwrap();
        assert_eq!(c.info_set(), (0..8).collect::<Vec<_>>());
        let c = build_construction(1, 1, 2, 4, 0, 0.5).unwrap();
        assert!(c.info_set().is_empty());
        assert_eq!(c.ga_bler(), 0.0);
    }

    #[test]
    fn infeasible_k_rejected() {
        assert!(build_construction(1, 1, 2, 4, 9, 0.5).is_err());
        assert!(build_construction(2, 1, 2, 4, 4, 0.5).is_err());
        assert!(build_construction(1, 1, 3, 4, 4, 0.5).is_err());
        assert!(build_construction(1, 1, 2, 3, 4, 0.5).is_err());
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_construction(2, 2, 2, 8, 16, 0.6).unwrap();
        let b = build_construction(2, 2, 2, 8, 16, 0.6).unwrap();
        assert_eq!(a.info_set(), b.info_set());
        assert_eq!(a.stream_sigmas(), b.stream_sigmas());
        assert_eq!(a.error_probs(), b.error_probs());
    }

    #[test]
    fn first_stream_sees_worse_equivalent_channel() {
        // Logical stream 1 (physical antenna T) has the least diversity.
        let c = build_construction(2, 2, 2, 8, 16, 0.5).unwrap();
        assert!(c.stream_sigmas()[0] > c.stream_sigmas()[1]);
    }

    #[test]
    fn selection_prefers_reliable_channels() {
        let c = build_construction(1, 1, 2, 16, 8, 0.4).unwrap();
        let worst_selected = c
            .info_set()
            .iter()
            .map(|&a| c.error_probs()[a])
            .fold(0.0, f64::max);
        let best_frozen = (0..c.total_channels())
            .filter(|a| !c.info_set().contains(a))
            .map(|a| c.error_probs()[a])
            .fold(f64::INFINITY, f64::min);
        assert!(worst_selected <= best_frozen);
    }

    #[test]
    fn ga_bler_monotone_in_sigma() {
        let coarse = build_construction(1, 1, 2, 16, 16, 0.9).unwrap();
        let fine = build_construction(1, 1, 2, 16, 16, 0.3).unwrap();
        assert!(fine.ga_bler() < coarse.ga_bler());
    }

    #[test]
    fn text_roundtrip() {
        let c = build_construction(2, 2, 4, 8, 40, 0.55).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("stpcm-construction v1 2 2 4 8 40 0.55"));
        let back = CodeConstruction::from_reader(text.as_bytes()).unwrap();
        assert_eq!(back.info_set(), c.info_set());
        assert_eq!(back.stream_sigmas(), c.stream_sigmas());
        assert_eq!(back.design_sigma(), c.design_sigma());
        assert_eq!(back.error_probs(), c.error_probs());
    }

    #[test]
    fn malformed_text_rejected() {
        assert!(CodeConstruction::from_reader("".as_bytes()).is_err());
        assert!(CodeConstruction::from_reader("nonsense v1 1 1 2 4 4 0.5\n".as_bytes()).is_err());
        let missing = "stpcm-construction v1 1 1 2 4 4 0.5\n0.6\n1 2 3\n";
        assert!(CodeConstruction::from_reader(missing.as_bytes()).is_err());
        let out_of_range = "stpcm-construction v1 1 1 2 4 4 0.5\n0.6\n1 2 3 99\n";
        assert!(CodeConstruction::from_reader(out_of_range.as_bytes()).is_err());
    }
}
