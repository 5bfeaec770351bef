//! Gaussian-approximation density evolution.
//!
//! Tracks a single mean per channel, assuming consistent Gaussian LLRs
//! (variance twice the mean). The variable-node update is additive
//! (`m+ = 2m`); the check-node update uses the standard phi-function
//! approximation `phi(x) ~= exp(-0.4527 x^0.86 + 0.0218)` for `x < 10` with
//! the asymptotic tail `sqrt(pi/x) exp(-x/4) (1 - 10/(7x))` above, inverted
//! by bisection in the log domain.

use crate::error::Error;

/// `ln phi(x)` for `x >= 0`.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Solves `ln phi(m) = target` for `m >= 0` by bisection.
fn ln_phi_inv(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Check-node mean update `m- = phi^{-1}(1 - (1 - phi(m))^2)`, evaluated in
/// the log domain so tiny phi values survive.
fn check_mean(m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    let lp = ln_phi(m);
    let p = lp.exp();
    // 1 - (1 - p)^2 = p (2 - p); ln of it stays finite for underflowed p.
    let target = lp + (2.0 - p).ln();
    ln_phi_inv(target)
}

/// Evolves the all-channel LLR mean `llr_mean_0` through `n_log2`
/// polarization steps, in decoder index order (minus branch at even
/// positions, plus branch at odd positions).
pub fn ga_evolve(n_log2: u32, llr_mean_0: f64) -> Result<Vec<f64>, Error> {
    if !(llr_mean_0 >= 0.0) {
        return Err(Error::invalid(format!(
            "initial LLR mean {llr_mean_0} must be non-negative"
        )));
    }
    let mut means = vec![llr_mean_0];
    for _ in 0..n_log2 {
        let mut next = Vec::with_capacity(2 * means.len());
        for &m in &means {
            next.push(check_mean(m));
            next.push(2.0 * m);
        }
        means = next;
    }
    Ok(means)
}

/// Error probability of a consistent-Gaussian LLR with mean `m`:
/// `Q(sqrt(m / 2))`.
pub fn ga_error_probability(mean: f64) -> f64 {
    0.5 * libm::erfc(mean.max(0.0).sqrt() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(x: f64) -> f64 {
        ln_phi(x).exp()
    }

    #[test]
    fn zero_steps_pass_through() {
        assert_eq!(ga_evolve(0, 3.7).unwrap(), vec![3.7]);
    }

    #[test]
    fn plus_branch_doubles_the_mean() {
        for m0 in [0.1, 1.0, 7.3, 42.0] {
            let out = ga_evolve(1, m0).unwrap();
            assert_eq!(out.len(), 2);
            assert!((out[1] - 2.0 * m0).abs() < 1e-12);
            assert!(out[0] <= m0 && out[0] >= 0.0);
        }
    }

    #[test]
    fn useless_channel_is_fixed_point() {
        let out = ga_evolve(1, 0.0).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
        let pe = ga_error_probability(0.0);
        assert!((pe - 0.5).abs() < 1e-15);
    }

    #[test]
    fn check_mean_solves_the_fixed_point_equation() {
        for m in [0.05, 0.7, 3.0, 8.0, 25.0, 200.0] {
            let mm = check_mean(m);
            let lhs = phi(mm);
            let rhs = 1.0 - (1.0 - phi(m)).powi(2);
            assert!(
                (lhs - rhs).abs() < 1e-6 * rhs.max(1e-12),
                "m={m}: phi(m-)={lhs} target={rhs}"
            );
            assert!(mm <= m + 1e-12, "check mean must not exceed input");
        }
    }

    #[test]
    fn error_probabilities_stay_in_range() {
        let means = ga_evolve(6, 2.5).unwrap();
        for m in means {
            let pe = ga_error_probability(m);
            assert!((0.0..=0.5).contains(&pe));
        }
    }

    #[test]
    fn negative_mean_rejected() {
        assert!(ga_evolve(2, -1.0).is_err());
        assert!(ga_evolve(2, f64::NAN).is_err());
    }
}
