//! Reproducible Monte-Carlo block-error simulation.
//!
//! Frames are simulated in fixed-size batches whose per-frame random draws
//! come from counter-derived substreams, so results are identical for any
//! worker count. Each SNR point builds its own construction at the derived
//! noise level and stops after the target number of block errors or the
//! frame budget, whichever comes first.

use crate::construction::build_construction;
use crate::error::Error;
use crate::mimo::{sample_channel, transmit, NoiseModel};
use crate::polar::CrcSpec;
use crate::rng::{substream, CTX_FRAME};
use crate::stpcm::{PairInterleaver, StpcmCodec};
use rand::Rng;
use rayon::prelude::*;
use std::io::{BufRead, Write};
use std::time::Instant;

/// Frames per scheduling batch; fixed so early stopping is deterministic.
const BATCH_FRAMES: u64 = 512;

/// Which decoder the sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Sc,
    Cascl,
}

/// Sweep parameters.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub num_tx: usize,
    pub num_rx: usize,
    pub mod_order: usize,
    pub n_slots: usize,
    /// Information channels per frame (payload plus CRC overhead).
    pub k: usize,
    /// Es/N0 points in dB, with unit-energy symbols per transmit antenna and
    /// noise variance `sigma^2 = 10^(-snr_db/10)`.
    pub snrs_db: Vec<f64>,
    pub decoder: DecoderKind,
    pub list_size: usize,
    /// CRC width per guarded component; 0 disables CRC.
    pub crc_width: u32,
    pub max_frames: u64,
    pub target_block_errors: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the default pool. The results do not depend on
    /// this value.
    pub workers: usize,
}

impl SimConfig {
    /// Code rate `K / (T m N)`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / (self.num_tx * self.mod_order * self.n_slots) as f64
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.num_tx == 0 || self.num_rx < self.num_tx {
            return Err(Error::invalid("antenna counts must satisfy M >= T >= 1"));
        }
        if self.mod_order < 2 || self.mod_order % 2 != 0 {
            return Err(Error::invalid("mod_order must be even and >= 2"));
        }
        if self.n_slots == 0 || !self.n_slots.is_power_of_two() {
            return Err(Error::invalid("n_slots must be a power of two"));
        }
        let total = self.num_tx * self.mod_order * self.n_slots;
        if self.k == 0 || self.k > total {
            return Err(Error::invalid(format!("k must lie in 1..={total}")));
        }
        if self.snrs_db.is_empty() {
            return Err(Error::invalid("snrs_db must be non-empty"));
        }
        if self.snrs_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("snrs_db contains a non-finite value"));
        }
        if self.max_frames == 0 {
            return Err(Error::invalid("max_frames must be at least 1"));
        }
        if self.decoder == DecoderKind::Cascl && self.list_size == 0 {
            return Err(Error::invalid("list_size must be at least 1"));
        }
        if self.crc_width > 32 {
            return Err(Error::invalid("crc_width must be at most 32"));
        }
        Ok(())
    }

    fn crc_spec(&self) -> Result<Option<CrcSpec>, Error> {
        if self.crc_width == 0 {
            return Ok(None);
        }
        // Default register: CRC-16/CCITT truncated or widened as configured.
        Ok(Some(CrcSpec::new(self.crc_width, 0x1021, 0, false, false)?))
    }
}

/// Per-SNR outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BlerRecord {
    pub snr_db: f64,
    pub frames: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub ga_bler: f64,
    pub seconds: f64,
}

/// Noise level for an Es/N0 point with unit-energy symbols.
pub fn sigma_for_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 20.0)
}

/// Runs the configured sweep and returns one record per SNR point.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<BlerRecord>, Error> {
    config.validate()?;
    let run = || -> Result<Vec<BlerRecord>, Error> {
        let mut records = Vec::with_capacity(config.snrs_db.len());
        for &snr_db in &config.snrs_db {
            records.push(run_point(config, snr_db)?);
        }
        Ok(records)
    };
    if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    }
}

fn run_point(config: &SimConfig, snr_db: f64) -> Result<BlerRecord, Error> {
    let sigma = sigma_for_snr_db(snr_db);
    let construction = build_construction(
        config.num_tx,
        config.num_rx,
        config.mod_order,
        config.n_slots,
        config.k,
        sigma,
    )?;
    run_point_with_construction(config, snr_db, construction)
}

/// Runs one SNR point over a caller-supplied construction (for example one
/// loaded from a construction file). The construction shape must match the
/// config.
pub fn run_point_with_construction(
    config: &SimConfig,
    snr_db: f64,
    construction: crate::construction::CodeConstruction,
) -> Result<BlerRecord, Error> {
    config.validate()?;
    if construction.num_tx() != config.num_tx
        || construction.num_rx() != config.num_rx
        || construction.mod_order() != config.mod_order
        || construction.n_slots() != config.n_slots
        || construction.k() != config.k
    {
        return Err(Error::invalid("construction shape does not match config"));
    }
    let started = Instant::now();
    let sigma = sigma_for_snr_db(snr_db);
    let ga_bler = construction.ga_bler();
    let interleaver = PairInterleaver::new(
        config.seed,
        config.num_tx,
        config.mod_order,
        config.n_slots,
    );
    let codec = StpcmCodec::new(construction, config.crc_spec()?, interleaver)?;

    let decoder = config.decoder;
    let list_size = config.list_size;
    let simulate = |frame_idx: u64| -> (bool, u64) {
        let mut rng = substream(config.seed, CTX_FRAME, frame_idx);
        let payload: Vec<u8> = (0..codec.payload_len())
            .map(|_| rng.gen_range(0..=1u8))
            .collect();
        let frame = codec.encode(&payload).expect("codec encodes its own payload");
        let noise = NoiseModel { sigma };
        let n_slots = config.n_slots;
        let mut realizations = Vec::with_capacity(n_slots);
        let mut observations = Vec::with_capacity(n_slots);
        for t in 0..n_slots {
            let real = sample_channel(config.num_tx, config.num_rx, &mut rng)
                .expect("valid antenna shape");
            let x_col: Vec<_> = (0..config.num_tx).map(|p| frame.x[p][t]).collect();
            observations.push(transmit(&x_col, &real, &noise, &mut rng).expect("shapes agree"));
            realizations.push(real);
        }
        let decoded = match decoder {
            DecoderKind::Sc => codec.decode_sc(&observations, &realizations, sigma),
            DecoderKind::Cascl => {
                codec.decode_cascl(&observations, &realizations, sigma, list_size)
            }
        }
        .expect("decode of well-formed frame");
        let bit_errors = payload
            .iter()
            .zip(decoded.payload.iter())
            .filter(|(a, b)| a != b)
            .count() as u64;
        (bit_errors > 0, bit_errors)
    };

    let mut frames = 0u64;
    let mut block_errors = 0u64;
    let mut bit_errors = 0u64;
    while config.target_block_errors > 0
        && block_errors < config.target_block_errors
        && frames < config.max_frames
    {
        let batch = BATCH_FRAMES.min(config.max_frames - frames);
        let results: Vec<(bool, u64)> = (frames..frames + batch)
            .into_par_iter()
            .map(simulate)
            .collect();
        for (block_err, bits) in results {
            block_errors += u64::from(block_err);
            bit_errors += bits;
        }
        frames += batch;
    }

    let bler = if frames > 0 {
        block_errors as f64 / frames as f64
    } else {
        0.0
    };
    let ber = if frames > 0 {
        bit_errors as f64 / (frames * codec.payload_len() as u64) as f64
    } else {
        0.0
    };
    Ok(BlerRecord {
        snr_db,
        frames,
        block_errors,
        bit_errors,
        bler,
        ber,
        ga_bler,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// CSV header written by [`write_csv`].
pub const CSV_HEADER: &str = "snr_db,frames,block_errors,bit_errors,bler,ber,ga_bler,seconds";

/// Writes records in the fixed CSV format (decimal points, fixed significant
/// digits).
pub fn write_csv<W: Write>(records: &[BlerRecord], mut w: W) -> Result<(), Error> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{:.3},{},{},{},{:.6e},{:.6e},{:.6e},{:.3}",
            r.snr_db, r.frames, r.block_errors, r.bit_errors, r.bler, r.ber, r.ga_bler, r.seconds
        )?;
    }
    Ok(())
}

/// Writes records to a file path.
pub fn emit_csv(records: &[BlerRecord], path: &std::path::Path) -> Result<(), Error> {
    let file = std::fs::File::create(path)?;
    write_csv(records, std::io::BufWriter::new(file))
}

/// Parses a CSV produced by [`write_csv`].
pub fn parse_csv<R: BufRead>(r: R) -> Result<Vec<BlerRecord>, Error> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))??;
    if header.trim() != CSV_HEADER {
        return Err(Error::Parse("unexpected CSV header".into()));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse(format!("expected 8 fields, got {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64, Error> {
            fields[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad numeric field {:?}", fields[i])))
        };
        let int = |i: usize| -> Result<u64, Error> {
            fields[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer field {:?}", fields[i])))
        };
        out.push(BlerRecord {
            snr_db: num(0)?,
            frames: int(1)?,
            block_errors: int(2)?,
            bit_errors: int(3)?,
            bler: num(4)?,
            ber: num(5)?,
            ga_bler: num(6)?,
            seconds: num(7)?,
        });
    }
    Ok(out)
}
