//! QAM constellations with per-axis set-partition labeling and level-wise
//! soft demapping.
//!
//! A `2^m`-ary square QAM symbol is the product of two identical
//! `2^(m/2)`-ary PAM alphabets. Each axis carries `m/2` label bits; bit `j`
//! (1-based level, LSB first) selects within the set partition so that every
//! fixed bit doubles the minimum intra-subset distance. The first `m/2` bits
//! of a symbol label the real axis, the remaining `m/2` the imaginary axis.

use crate::error::Error;
use crate::numerics::log_sum_exp;
use num_complex::Complex64;

/// Which axis of the complex observation a level channel reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Real,
    Imag,
}

/// A unit-energy square QAM constellation with set-partition labeling.
#[derive(Debug, Clone)]
pub struct Constellation {
    mod_order: usize,
    bits_per_axis: usize,
    axis_amplitudes: Vec<f64>,
    points: Vec<Complex64>,
}

/// Builds the `2^m`-ary set-partition labeled QAM constellation with unit
/// average symbol energy. `m` must be even and at least 2.
pub fn build_sp_qam(mod_order: usize) -> Result<Constellation, Error> {
    if mod_order < 2 || mod_order % 2 != 0 {
        return Err(Error::invalid(format!(
            "modulation order {mod_order} must be even and >= 2"
        )));
    }
    if mod_order > 16 {
        return Err(Error::invalid("modulation order above 16 is unsupported"));
    }
    let bits_per_axis = mod_order / 2;
    let levels = 1usize << bits_per_axis;
    // E[a^2] over {..,-3,-1,1,3,..}*d is d^2 (L^2 - 1)/3; two axes make the
    // total symbol energy 2 E[a^2] = 1.
    let spacing = (3.0 / (2.0 * ((levels * levels - 1) as f64))).sqrt();
    let axis_amplitudes: Vec<f64> = (0..levels)
        .map(|p| ((2 * p) as f64 - (levels as f64 - 1.0)) * spacing)
        .collect();
    let mut points = Vec::with_capacity(1 << mod_order);
    for idx in 0..(1usize << mod_order) {
        let re = axis_amplitudes[idx & (levels - 1)];
        let im = axis_amplitudes[idx >> bits_per_axis];
        points.push(Complex64::new(re, im));
    }
    Ok(Constellation {
        mod_order,
        bits_per_axis,
        axis_amplitudes,
        points,
    })
}

impl Constellation {
    pub fn mod_order(&self) -> usize {
        self.mod_order
    }

    pub fn bits_per_axis(&self) -> usize {
        self.bits_per_axis
    }

    /// PAM amplitudes in ascending order; the label of amplitude `p` is the
    /// binary representation of `p`, LSB = level 1.
    pub fn axis_amplitudes(&self) -> &[f64] {
        &self.axis_amplitudes
    }

    /// All `2^m` symbols indexed by the packed bit label (bit `i` of the index
    /// is label bit `i`, real-axis bits in the low half).
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    fn axis_index(&self, bits: &[u8]) -> usize {
        bits.iter()
            .enumerate()
            .fold(0usize, |acc, (l, &b)| acc | ((b as usize) << l))
    }

    /// Amplitude selected by level bits (`bits[0]` = level 1).
    pub fn axis_amplitude(&self, bits: &[u8]) -> f64 {
        self.axis_amplitudes[self.axis_index(bits)]
    }

    /// Maps `m` bits to a symbol: the first `m/2` bits label the real axis,
    /// the last `m/2` the imaginary axis.
    pub fn map_symbol(&self, bits: &[u8]) -> Result<Complex64, Error> {
        if bits.len() != self.mod_order {
            return Err(Error::invalid(format!(
                "expected {} bits, got {}",
                self.mod_order,
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("symbol bits contain values other than 0/1"));
        }
        let re = self.axis_amplitude(&bits[..self.bits_per_axis]);
        let im = self.axis_amplitude(&bits[self.bits_per_axis..]);
        Ok(Complex64::new(re, im))
    }
}

/// One scalar channel use as seen by a level demapper: the complex
/// observation, the effective real gain and the complex-noise standard
/// deviation (per-axis variance is `sigma^2 / 2`).
#[derive(Debug, Clone, Copy)]
pub struct LevelObservation {
    pub value: Complex64,
    pub gain: f64,
    pub sigma: f64,
}

/// Log-likelihood ratio of level `level` (1-based) on the given axis, with
/// the lower-level bits of that axis already known.
///
/// Marginalizes the higher levels of the same axis:
/// `ln sum_h exp(-(y - g a(known,0,h))^2 / sigma^2) - ln sum_h exp(... 1 ...)`,
/// evaluated with log-sum-exp. Positive favors bit 0.
pub fn level_llr(
    obs: &LevelObservation,
    known_lower: &[u8],
    level: usize,
    axis: Axis,
    c: &Constellation,
) -> Result<f64, Error> {
    if level == 0 || level > c.bits_per_axis {
        return Err(Error::invalid(format!(
            "level {level} outside 1..={}",
            c.bits_per_axis
        )));
    }
    if known_lower.len() != level - 1 {
        return Err(Error::invalid(format!(
            "level {level} demapping needs {} known bits, got {}",
            level - 1,
            known_lower.len()
        )));
    }
    if obs.sigma <= 0.0 {
        return Err(Error::invalid("noise sigma must be positive"));
    }
    let y = match axis {
        Axis::Real => obs.value.re,
        Axis::Imag => obs.value.im,
    };
    let base = c.axis_index(known_lower);
    let higher = 1usize << (c.bits_per_axis - level);
    let inv_var = 1.0 / (obs.sigma * obs.sigma);
    let mut exps0 = Vec::with_capacity(higher);
    let mut exps1 = Vec::with_capacity(higher);
    for h in 0..higher {
        for (bit, exps) in [(0usize, &mut exps0), (1usize, &mut exps1)] {
            let p = base | (bit << (level - 1)) | (h << level);
            let d = y - obs.gain * c.axis_amplitudes[p];
            exps.push(-d * d * inv_var);
        }
    }
    Ok(log_sum_exp(&exps0) - log_sum_exp(&exps1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, substream};
    use rand::Rng;

    #[test]
    fn qpsk_points_and_energy() {
        let c = build_sp_qam(2).unwrap();
        let d = 1.0 / 2.0_f64.sqrt();
        assert!((c.axis_amplitudes()[0] + d).abs() < 1e-15);
        assert!((c.axis_amplitudes()[1] - d).abs() < 1e-15);
        for p in c.points() {
            assert!((p.re.abs() - d).abs() < 1e-15);
            assert!((p.im.abs() - d).abs() < 1e-15);
        }
    }

    #[test]
    fn sixteen_qam_amplitudes() {
        let c = build_sp_qam(4).unwrap();
        let d = 1.0 / 10.0_f64.sqrt();
        let expected = [-3.0 * d, -d, d, 3.0 * d];
        for (a, e) in c.axis_amplitudes().iter().zip(expected.iter()) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_energy_all_orders() {
        for m in [2usize, 4, 6, 8] {
            let c = build_sp_qam(m).unwrap();
            let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>()
                / c.points().len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "m={m} energy={e}");
        }
    }

    #[test]
    fn odd_order_rejected() {
        assert!(build_sp_qam(3).is_err());
        assert!(build_sp_qam(0).is_err());
    }

    #[test]
    fn mapping_is_bijective() {
        for m in [2usize, 4, 6] {
            let c = build_sp_qam(m).unwrap();
            let mut seen = Vec::new();
            for idx in 0..(1usize << m) {
                let bits: Vec<u8> = (0..m).map(|i| ((idx >> i) & 1) as u8).collect();
                let p = c.map_symbol(&bits).unwrap();
                assert_eq!(p, c.points()[idx]);
                assert!(
                    !seen.iter().any(|q: &num_complex::Complex64| (q - p).norm() < 1e-12),
                    "duplicate point for {bits:?}"
                );
                seen.push(p);
            }
        }
    }

    #[test]
    fn set_partition_doubles_subset_spacing() {
        // Fixing level 1 on a 16-QAM axis leaves amplitudes spaced twice the
        // full-set spacing.
        let c = build_sp_qam(4).unwrap();
        let full = c.axis_amplitudes()[1] - c.axis_amplitudes()[0];
        for bit in 0..2u8 {
            let survivors: Vec<f64> = (0..4usize)
                .filter(|p| (p & 1) as u8 == bit)
                .map(|p| c.axis_amplitudes()[p])
                .collect();
            for w in survivors.windows(2) {
                assert!((w[1] - w[0] - 2.0 * full).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dominant_point_gives_large_positive_llr() {
        let c = build_sp_qam(2).unwrap();
        let obs = LevelObservation {
            value: Complex64::new(c.axis_amplitude(&[0]), 0.0),
            gain: 1.0,
            sigma: 0.05,
        };
        let llr = level_llr(&obs, &[], 1, Axis::Real, &c).unwrap();
        assert!(llr > 100.0);
    }

    #[test]
    fn top_level_llr_is_odd_in_observation() {
        // SP labeling gives odd symmetry for the sign-determining level.
        let c = build_sp_qam(4).unwrap();
        for &y in &[0.1, 0.37, 0.8, 2.0] {
            let pos = LevelObservation {
                value: Complex64::new(y, 0.0),
                gain: 0.9,
                sigma: 0.5,
            };
            let neg = LevelObservation {
                value: Complex64::new(-y, 0.0),
                gain: 0.9,
                sigma: 0.5,
            };
            // Mirroring the alphabet swaps the even/odd index subsets, so the
            // level-1 LLR is odd in y.
            let l_pos = level_llr(&pos, &[], 1, Axis::Real, &c).unwrap();
            let l_neg = level_llr(&neg, &[], 1, Axis::Real, &c).unwrap();
            assert!(
                (l_pos + l_neg).abs() < 1e-9,
                "y={y}: {l_pos} vs {l_neg}"
            );
        }
    }

    #[test]
    fn llr_matches_direct_sum_oracle() {
        // Brute-force the marginalization for 16-QAM at every level.
        let c = build_sp_qam(4).unwrap();
        let mut rng = substream(11, 96, 0);
        for _ in 0..200 {
            let y = Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
            let gain: f64 = rng.gen::<f64>() + 0.2;
            let sigma = 0.4;
            let obs = LevelObservation { value: y, gain, sigma };
            for (level, known_len) in [(1usize, 0usize), (2, 1)] {
                let known: Vec<u8> = (0..known_len).map(|_| rng.gen_range(0..=1)).collect();
                let got = level_llr(&obs, &known, level, Axis::Real, &c).unwrap();
                let direct = {
                    let mut num = 0.0f64;
                    let mut den = 0.0f64;
                    for p in 0..4usize {
                        let matches_known =
                            (0..known_len).all(|l| ((p >> l) & 1) as u8 == known[l]);
                        if !matches_known {
                            continue;
                        }
                        let d = y.re - gain * c.axis_amplitudes()[p];
                        let w = (-d * d / (sigma * sigma)).exp();
                        if (p >> (level - 1)) & 1 == 0 {
                            num += w;
                        } else {
                            den += w;
                        }
                    }
                    (num / den).ln()
                };
                assert!((got - direct).abs() < 1e-10, "level={level}");
            }
        }
    }

    #[test]
    fn noiseless_roundtrip_recovers_bits() {
        let c = build_sp_qam(6).unwrap();
        let mut rng = substream(12, 96, 0);
        for _ in 0..100 {
            let bits: Vec<u8> = (0..6).map(|_| rng.gen_range(0..=1)).collect();
            let x = c.map_symbol(&bits).unwrap();
            let y = x + complex_gaussian(&mut rng, 1e-10);
            let obs = LevelObservation { value: y, gain: 1.0, sigma: 1e-4 };
            let mut got = Vec::new();
            for axis in [Axis::Real, Axis::Imag] {
                let mut known = Vec::new();
                for level in 1..=3usize {
                    let llr = level_llr(&obs, &known, level, axis, &c).unwrap();
                    let b = u8::from(llr < 0.0);
                    known.push(b);
                    got.push(b);
                }
            }
            assert_eq!(got, bits);
        }
    }

    #[test]
    fn llr_finite_for_finite_inputs() {
        let c = build_sp_qam(8).unwrap();
        let obs = LevelObservation {
            value: Complex64::new(37.0, -12.0),
            gain: 3.0,
            sigma: 0.01,
        };
        let llr = level_llr(&obs, &[], 1, Axis::Real, &c).unwrap();
        assert!(llr.is_finite());
    }
}
