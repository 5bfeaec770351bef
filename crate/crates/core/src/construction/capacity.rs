//! Constrained capacities and the capacity-equivalent AWGN solver.
//!
//! Noise follows the CN(0, sigma^2) convention throughout: each real
//! dimension carries variance `sigma^2 / 2`. A `2^m`-ary square QAM symbol
//! splits into two independent PAM axes, so the symmetric capacity is twice
//! the per-axis mutual information.

use crate::error::Error;
use crate::modem::build_sp_qam;
use crate::numerics::{adaptive_simpson, gauss_legendre_256};

const LN2: f64 = std::f64::consts::LN_2;

/// Lower end of the sigma bracket used by the equivalent-noise bisection.
pub const SIGMA_BRACKET_LO: f64 = 1e-6;
/// Upper end of the sigma bracket used by the equivalent-noise bisection.
pub const SIGMA_BRACKET_HI: f64 = 1e3;
/// Capacity residual the bisection drives the match below, in bits.
pub const CAPACITY_TOLERANCE: f64 = 1e-6;

/// Symmetric capacity (bits/symbol) of an AWGN channel under unit-energy
/// `2^m`-ary QAM with noise level `sigma`.
///
/// Evaluates `-2 Int p(y) log2 p(y) dy - log2(pi e sigma^2)` where `p` is the
/// per-axis PAM mixture density, integrating adaptively over intervals that
/// extend 12 sigma beyond the extreme constellation points.
pub fn awgn_capacity_qam(sigma: f64, mod_order: usize) -> Result<f64, Error> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("noise sigma must be positive"));
    }
    let constellation = build_sp_qam(mod_order)?;
    let amps = constellation.axis_amplitudes();
    let axis_var = sigma * sigma / 2.0;
    let weight = 1.0 / amps.len() as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * axis_var).sqrt();
    let inv_two_var = 1.0 / (2.0 * axis_var);

    let neg_p_log2_p = |y: f64| {
        let p: f64 = amps
            .iter()
            .map(|&a| {
                let d = y - a;
                weight * norm * (-d * d * inv_two_var).exp()
            })
            .sum();
        if p > 0.0 {
            -p * p.ln() / LN2
        } else {
            0.0
        }
    };

    // Integration windows around each amplitude, merged where they overlap so
    // narrow spikes at small sigma are never stepped over.
    let spread = 12.0 * sigma;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &a in amps {
        let (lo, hi) = (a - spread, a + spread);
        match intervals.last_mut() {
            Some(last) if lo <= last.1 => last.1 = hi,
            _ => intervals.push((lo, hi)),
        }
    }
    let tol = 1e-9 / intervals.len() as f64;
    let axis_entropy: f64 = intervals
        .iter()
        .map(|&(lo, hi)| adaptive_simpson(&neg_p_log2_p, lo, hi, tol))
        .sum();

    let capacity =
        2.0 * axis_entropy - (std::f64::consts::PI * std::f64::consts::E * sigma * sigma).ln() / LN2;
    Ok(capacity.clamp(0.0, mod_order as f64))
}

/// Gamma function at integer or half-integer arguments, computed by the
/// recurrence from `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
fn gamma_int_or_half(two_kappa: u32) -> f64 {
    // Argument is two_kappa / 2.
    let mut acc = if two_kappa % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if two_kappa % 2 == 0 { 2u32 } else { 1u32 };
    while x + 2 <= two_kappa {
        acc *= x as f64 / 2.0;
        x += 2;
    }
    acc
}

/// Chi-square density with `kappa` degrees of freedom at `gamma >= 0`.
pub fn chi2_pdf(gamma: f64, kappa: u32) -> Result<f64, Error> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::invalid("chi-square argument must be non-negative"));
    }
    if kappa == 0 {
        return Err(Error::invalid("degrees of freedom must be at least 1"));
    }
    let half = kappa as f64 / 2.0;
    let coeff = 0.5f64.powf(half) / gamma_int_or_half(kappa);
    let power = if kappa == 2 {
        1.0
    } else {
        gamma.powf(half - 1.0)
    };
    Ok(coeff * power * (-gamma / 2.0).exp())
}

/// Ergodic capacity of detection stream `k` (1-based) of an `M`-receive
/// QR/SIC chain: the QAM AWGN capacity averaged over the stream gain, where
/// twice the squared gain is chi-square with `2(M - k + 1)` degrees of
/// freedom.
pub fn ergodic_stream_capacity(
    sigma: f64,
    mod_order: usize,
    num_rx: usize,
    k: usize,
) -> Result<f64, Error> {
    if k == 0 || k > num_rx {
        return Err(Error::invalid(format!("stream index {k} outside 1..={num_rx}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("noise sigma must be positive"));
    }
    let kappa = 2 * (num_rx - k + 1) as u32;
    // Integrate over u = 2 a^2 ~ chi^2(kappa); the tail beyond kappa + 80 is
    // below 1e-15 of the mass.
    let upper = kappa as f64 + 80.0;
    let (nodes, weights) = gauss_legendre_256();
    let half = 0.5 * upper;
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let u = half * (x + 1.0);
        let gain = (u / 2.0).sqrt();
        if gain <= 0.0 {
            continue;
        }
        let cap = awgn_capacity_qam(sigma / gain, mod_order)?;
        acc += w * cap * chi2_pdf(u, kappa)?;
    }
    Ok((acc * half).clamp(0.0, mod_order as f64))
}

/// Ergodic capacity of the full `T x M` chain: the sum of the per-stream
/// ergodic capacities.
pub fn mimo_ergodic_capacity(
    sigma: f64,
    mod_order: usize,
    num_tx: usize,
    num_rx: usize,
) -> Result<f64, Error> {
    if num_tx == 0 || num_tx > num_rx {
        return Err(Error::invalid(
            "antenna counts must satisfy M >= T >= 1",
        ));
    }
    let mut total = 0.0;
    for k in 1..=num_tx {
        total += ergodic_stream_capacity(sigma, mod_order, num_rx, k)?;
    }
    Ok(total)
}

/// An AWGN noise level matched to a target capacity.
#[derive(Debug, Clone, Copy)]
pub struct EquivalentAwgn {
    pub sigma: f64,
    /// Set when the target fell outside the achievable range and the bracket
    /// endpoint was returned instead.
    pub clamped: bool,
}

/// Solves `I_G(sigma) = target` by bisection over `[1e-6, 1e3]` to within
/// [`CAPACITY_TOLERANCE`] bits. Targets outside the achievable range return
/// the nearer bracket endpoint, flagged.
pub fn solve_awgn_sigma_for_capacity(target: f64, mod_order: usize) -> Result<EquivalentAwgn, Error> {
    let mut lo = SIGMA_BRACKET_LO;
    let mut hi = SIGMA_BRACKET_HI;
    let cap_lo = awgn_capacity_qam(lo, mod_order)?;
    let cap_hi = awgn_capacity_qam(hi, mod_order)?;
    if target >= cap_lo {
        return Ok(EquivalentAwgn {
            sigma: lo,
            clamped: (target - cap_lo).abs() > CAPACITY_TOLERANCE,
        });
    }
    if target <= cap_hi {
        return Ok(EquivalentAwgn {
            sigma: hi,
            clamped: (target - cap_hi).abs() > CAPACITY_TOLERANCE,
        });
    }
    let mut mid = (lo * hi).sqrt();
    for _ in 0..200 {
        // Bisect in log sigma: capacity is monotone decreasing in sigma.
        mid = (lo * hi).sqrt();
        let cap = awgn_capacity_qam(mid, mod_order)?;
        if (cap - target).abs() <= CAPACITY_TOLERANCE / 10.0 {
            return Ok(EquivalentAwgn {
                sigma: mid,
                clamped: false,
            });
        }
        if cap > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EquivalentAwgn {
        sigma: mid,
        clamped: (awgn_capacity_qam(mid, mod_order)? - target).abs() > CAPACITY_TOLERANCE,
    })
}

/// Equivalent AWGN noise level for stream `k`: the sigma whose QAM capacity
/// matches the stream's ergodic capacity at the actual noise level.
pub fn equivalent_awgn_sigma(
    sigma: f64,
    mod_order: usize,
    num_rx: usize,
    k: usize,
) -> Result<EquivalentAwgn, Error> {
    let target = ergodic_stream_capacity(sigma, mod_order, num_rx, k)?;
    solve_awgn_sigma_for_capacity(target, mod_order)
}
