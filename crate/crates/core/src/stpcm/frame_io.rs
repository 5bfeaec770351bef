//! Plain-text frame vectors for golden tests.
//!
//! Format:
//! ```text
//! stpcm-frame v1
//! info <0/1 digits>
//! seed <u64>
//! X <T> <N>
//! <re>,<im> <re>,<im> ...   (one row per transmit antenna)
//! ```

use crate::error::Error;
use num_complex::Complex64;
use std::io::{BufRead, Write};

pub fn write_frame<W: Write>(
    mut w: W,
    info_bits: &[u8],
    seed: u64,
    x: &[Vec<Complex64>],
) -> Result<(), Error> {
    writeln!(w, "stpcm-frame v1")?;
    let digits: String = info_bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
    writeln!(w, "info {digits}")?;
    writeln!(w, "seed {seed}")?;
    let t = x.len();
    let n = x.first().map_or(0, Vec::len);
    writeln!(w, "X {t} {n}")?;
    for row in x {
        let cells: Vec<String> = row.iter().map(|c| format!("{},{}", c.re, c.im)).collect();
        writeln!(w, "{}", cells.join(" "))?;
    }
    Ok(())
}

#[allow(clippy::type_complexity)]
pub fn read_frame<R: BufRead>(r: R) -> Result<(Vec<u8>, u64, Vec<Vec<Complex64>>), Error> {
    let mut lines = r.lines();
    let mut next_line = || -> Result<String, Error> {
        lines
            .next()
            .ok_or_else(|| Error::Parse("truncated frame file".into()))?
            .map_err(Error::from)
    };
    if next_line()?.trim() != "stpcm-frame v1" {
        return Err(Error::Parse("bad frame header".into()));
    }
    let info_line = next_line()?;
    let digits = info_line
        .strip_prefix("info ")
        .ok_or_else(|| Error::Parse("missing info line".into()))?;
    let info: Vec<u8> = digits
        .trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(Error::Parse(format!("bad info digit {other:?}"))),
        })
        .collect::<Result<_, _>>()?;
    let seed_line = next_line()?;
    let seed: u64 = seed_line
        .strip_prefix("seed ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse("bad seed line".into()))?;
    let dims_line = next_line()?;
    let dims: Vec<&str> = dims_line.split_whitespace().collect();
    if dims.len() != 3 || dims[0] != "X" {
        return Err(Error::Parse("bad matrix header".into()));
    }
    let t: usize = dims[1]
        .parse()
        .map_err(|_| Error::Parse("bad antenna count".into()))?;
    let n: usize = dims[2]
        .parse()
        .map_err(|_| Error::Parse("bad slot count".into()))?;
    let mut x = Vec::with_capacity(t);
    for _ in 0..t {
        let row_line = next_line()?;
        let mut row = Vec::with_capacity(n);
        for cell in row_line.split_whitespace() {
            let (re, im) = cell
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad cell {cell:?}")))?;
            let re: f64 = re
                .parse()
                .map_err(|_| Error::Parse(format!("bad real part {re:?}")))?;
            let im: f64 = im
                .parse()
                .map_err(|_| Error::Parse(format!("bad imaginary part {im:?}")))?;
            row.push(Complex64::new(re, im));
        }
        if row.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} symbols per row, found {}",
                row.len()
            )));
        }
        x.push(row);
    }
    Ok((info, seed, x))
}
