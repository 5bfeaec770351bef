//! Exact Bhattacharyya recursion for binary erasure channels.

use crate::error::Error;

/// Evolves the erasure parameter `z0` through `n_log2` polarization steps:
/// `Z- = 2Z - Z^2` (even positions) and `Z+ = Z^2` (odd positions), in
/// decoder index order. For a BEC the recursion is exact: each output is the
/// erasure probability of the corresponding synthesized channel.
pub fn bec_bhattacharyya(n_log2: u32, z0: f64) -> Result<Vec<f64>, Error> {
    if !(0.0..=1.0).contains(&z0) {
        return Err(Error::invalid(format!("erasure parameter {z0} outside [0, 1]")));
    }
    let mut z = vec![z0];
    for _ in 0..n_log2 {
        let mut next = Vec::with_capacity(2 * z.len());
        for &zi in &z {
            next.push(2.0 * zi - zi * zi);
            next.push(zi * zi);
        }
        z = next;
    }
    Ok(z)
}
