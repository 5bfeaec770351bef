//! Rayleigh fast-fading channel generation, the linear channel law, QR
//! factorization and successive-interference-cancellation observations.

use crate::error::Error;
use crate::rng::complex_gaussian;
use num_complex::Complex64;
use rand::Rng;

/// Dense column-major complex matrix, sized for small antenna arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = CMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self * x` for a column vector.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `self^H * y` (conjugate transpose applied to a column vector).
    pub fn adjoint_mul_vec(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.rows, y.len());
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].conj() * y[i]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[j * self.rows + i]
    }
}

/// Additive complex Gaussian noise with per-dimension variance `sigma^2 / 2`
/// (total complex variance `sigma^2`).
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    pub sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self, Error> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("noise sigma must be positive"));
        }
        Ok(NoiseModel { sigma })
    }
}

/// One fading realization `H` together with its QR factorization `H = Q R`,
/// where `Q` is unitary and `R` upper triangular with real non-negative
/// diagonal.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: CMat,
    pub q: CMat,
    pub r: CMat,
    /// How many degenerate draws (vanishing diagonal) were rejected before
    /// this realization was produced.
    pub resamples: u32,
}

impl ChannelRealization {
    pub fn from_matrix(h: CMat) -> Result<Self, Error> {
        if h.rows() < h.cols() {
            return Err(Error::invalid("need at least as many receive as transmit antennas"));
        }
        let (q, r) = qr_decompose(&h);
        Ok(ChannelRealization {
            h,
            q,
            r,
            resamples: 0,
        })
    }

    pub fn num_tx(&self) -> usize {
        self.h.cols()
    }

    pub fn num_rx(&self) -> usize {
        self.h.rows()
    }
}

/// Householder QR of an `M x T` matrix (`M >= T`), post-processed so the
/// diagonal of `R` is real and non-negative (phases absorbed into `Q`).
pub fn qr_decompose(h: &CMat) -> (CMat, CMat) {
    let m = h.rows();
    let t = h.cols();
    assert!(m >= t, "QR expects rows >= cols");
    let mut r = h.clone();
    let mut q = CMat::identity(m);
    let mut w = vec![Complex64::new(0.0, 0.0); m];

    for j in 0..t {
        // Householder vector for column j below the diagonal.
        let mut norm = 0.0;
        for i in j..m {
            norm += r[(i, j)].norm_sqr();
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let pivot = r[(j, j)];
        let phase = if pivot.norm() > 0.0 {
            pivot / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let beta = -phase * norm;
        let mut vnorm = 0.0;
        for i in j..m {
            let v = if i == j { r[(i, j)] - beta } else { r[(i, j)] };
            w[i] = v;
            vnorm += v.norm_sqr();
        }
        if vnorm == 0.0 {
            continue;
        }
        let vnorm = vnorm.sqrt();
        for item in w.iter_mut().take(m).skip(j) {
            *item /= vnorm;
        }
        // R <- (I - 2 w w^H) R on the trailing block.
        for c in j..t {
            let dot: Complex64 = (j..m).map(|i| w[i].conj() * r[(i, c)]).sum();
            for i in j..m {
                let delta = 2.0 * w[i] * dot;
                r[(i, c)] -= delta;
            }
        }
        // Q <- Q (I - 2 w w^H).
        for row in 0..m {
            let dot: Complex64 = (j..m).map(|i| q[(row, i)] * w[i]).sum();
            for i in j..m {
                let delta = 2.0 * dot * w[i].conj();
                q[(row, i)] -= delta;
            }
        }
    }

    // Absorb diagonal phases into Q so r_jj is real and non-negative, and
    // clear the round-off below the diagonal.
    for j in 0..t {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag > 0.0 {
            let phase = d / mag;
            let conj = phase.conj();
            for c in j..t {
                r[(j, c)] *= conj;
            }
            for i in 0..m {
                q[(i, j)] *= phase;
            }
        }
        r[(j, j)] = Complex64::new(mag, 0.0);
        for i in (j + 1)..m {
            r[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, r)
}

/// Draws an i.i.d. CN(0,1) fading matrix and its QR factorization. A
/// vanishing `R` diagonal entry (probability zero up to floating-point
/// degeneracy) triggers a resample, counted in the result.
pub fn sample_channel<R: Rng>(t: usize, m: usize, rng: &mut R) -> Result<ChannelRealization, Error> {
    if t == 0 || m < t {
        return Err(Error::invalid(
            "antenna counts must satisfy M >= T >= 1",
        ));
    }
    let mut resamples = 0u32;
    loop {
        let mut h = CMat::zeros(m, t);
        for j in 0..t {
            for i in 0..m {
                h[(i, j)] = complex_gaussian(rng, 1.0);
            }
        }
        let (q, r) = qr_decompose(&h);
        let degenerate = (0..t).any(|k| r[(k, k)].re < 1e-12);
        if degenerate {
            resamples += 1;
            continue;
        }
        return Ok(ChannelRealization { h, q, r, resamples });
    }
}

/// Applies the linear channel law `y = H x + z` with fresh CN(0, sigma^2)
/// noise at every receive antenna.
pub fn transmit<R: Rng>(
    x: &[Complex64],
    realization: &ChannelRealization,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Vec<Complex64>, Error> {
    if x.len() != realization.num_tx() {
        return Err(Error::invalid("symbol vector length does not match antennas"));
    }
    let mut y = realization.h.mul_vec(x);
    for v in y.iter_mut() {
        *v += complex_gaussian(rng, noise.sigma * noise.sigma);
    }
    Ok(y)
}

/// Rotates the received vector by `Q^H` and cancels already-decided streams,
/// returning the effective scalar observation and gain for stream `k`
/// (0-based antenna index; streams with larger index must already be
/// decided).
pub fn sic_observation(
    y: &[Complex64],
    realization: &ChannelRealization,
    decided: &[Option<Complex64>],
    k: usize,
) -> Result<(Complex64, f64), Error> {
    let t = realization.num_tx();
    if y.len() != realization.num_rx() {
        return Err(Error::invalid("observation length does not match antennas"));
    }
    if decided.len() != t || k >= t {
        return Err(Error::invalid("stream index or decision vector out of range"));
    }
    let rotated = realization.q.adjoint_mul_vec(y);
    let mut eff = rotated[k];
    for kp in (k + 1)..t {
        let sym = decided[kp]
            .ok_or_else(|| Error::invalid(format!("stream {kp} must be decided before {k}")))?;
        eff -= realization.r[(k, kp)] * sym;
    }
    Ok((eff, realization.r[(k, k)].re))
}
