//! Shifted-signal arithmetic: the data model and the convolution, shift and
//! metric primitives every deconvolution method builds on.
//!
//! A [`Signal1D`] is a finitely supported real sequence on the integers. It
//! stores a signed offset (the index of its first coefficient) so that
//! left-shifted copies need no reindexing convention; coefficients outside
//! the stored range read as zero.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A finitely supported real sequence with a signed start offset.
///
/// Canonical form: the first and last stored values are nonzero, except for
/// the all-zero signal which is stored as a single `0.0` at offset 0.
/// Arithmetic trims exact-zero boundary coefficients only — the threshold is
/// `== 0.0`, never an epsilon — so reconstruction tests see tiny residuals
/// instead of having them silently removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    offset: i64,
    values: Vec<f64>,
}

impl Signal1D {
    /// Builds a signal from its first index and coefficients, trimming to
    /// canonical form.
    ///
    /// Fails with [`Error::EmptySignal`] on an empty coefficient list and
    /// [`Error::NonFinite`] if any value is NaN or infinite.
    pub fn new(offset: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySignal);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_raw(offset, values))
    }

    /// Internal constructor for arithmetic results: canonicalizes without
    /// re-validating finiteness (inputs were finite, operations preserve it).
    pub(crate) fn from_raw(offset: i64, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        let first_nonzero = values.iter().position(|&v| v != 0.0);
        let Some(lo) = first_nonzero else {
            return Self {
                offset: 0,
                values: vec![0.0],
            };
        };
        let hi = values.iter().rposition(|&v| v != 0.0).unwrap();
        let trimmed = values[lo..=hi].to_vec();
        Self {
            offset: offset + lo as i64,
            values: trimmed,
        }
    }

    /// Unit impulse at `position`.
    pub fn delta(position: i64) -> Self {
        Self {
            offset: position,
            values: vec![1.0],
        }
    }

    /// Index of the first stored coefficient.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Index of the last stored coefficient.
    pub fn last_index(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    /// Stored coefficients, first to last.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of stored coefficients (support width).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True only for the canonical all-zero signal.
    pub fn is_zero(&self) -> bool {
        self.values == [0.0]
    }

    /// Never true: a canonical signal stores at least one coefficient.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient at an absolute index; zero outside the support.
    pub fn get(&self, index: i64) -> f64 {
        let local = index - self.offset;
        if local < 0 || local >= self.values.len() as i64 {
            0.0
        } else {
            self.values[local as usize]
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs_slice(&self.values)
    }

    /// The same coefficients shifted right by `l` intervals (left for
    /// negative `l`).
    pub fn shift(&self, l: i64) -> Self {
        Self {
            offset: self.offset + l,
            values: self.values.clone(),
        }
    }

    /// The sequence mirrored about the origin: coefficient at `i` moves to
    /// `-i`. Used to re-express a problem relative to its trailing term.
    pub fn reverse(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            offset: -self.last_index(),
            values,
        }
    }

    /// Restriction to the inclusive index window `[lo, hi]`, coefficients
    /// outside the support reading as zero.
    pub fn windowed(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow);
        }
        let values = (lo..=hi).map(|i| self.get(i)).collect();
        Ok(Self::from_raw(lo, values))
    }
}

pub(crate) fn max_abs_slice(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, &v| {
        let a = abs(v);
        if a > m {
            a
        } else {
            m
        }
    })
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Discrete linear convolution over raw coefficient slices.
///
/// `out[p] = sum_k s[k] * h[p - k]`, summed in ascending `k` so results are
/// bit-reproducible regardless of thread count or call site.
pub(crate) fn convolve_slices(h: &[f64], s: &[f64]) -> Vec<f64> {
    let out_len = h.len() + s.len() - 1;
    let mut out = Vec::with_capacity(out_len);
    for p in 0..out_len {
        let k_lo = p.saturating_sub(h.len() - 1);
        let k_hi = if p < s.len() { p } else { s.len() - 1 };
        let mut sum = 0.0;
        for k in k_lo..=k_hi {
            sum += s[k] * h[p - k];
        }
        out.push(sum);
    }
    out
}

/// Convolution `H = S * h`: the response of a system with kernel `s` to the
/// impulse response `h`.
///
/// Output offset is the sum of the input offsets and the support width is
/// `h.len() + s.len() - 1` before canonical trimming.
pub fn convolve(h: &Signal1D, s: &Signal1D) -> Signal1D {
    let values = convolve_slices(&h.values, &s.values);
    Signal1D::from_raw(h.offset + s.offset, values)
}

/// Pointwise `x + alpha * y` over the union of supports.
///
/// Realizes the subtractions of the iterative methods. `alpha` must be
/// finite.
pub fn axpy(x: &Signal1D, alpha: f64, y: &Signal1D) -> Signal1D {
    assert!(alpha.is_finite(), "axpy scale must be finite");
    if alpha == 0.0 {
        return x.clone();
    }
    let lo = x.offset.min(y.offset);
    let hi = x.last_index().max(y.last_index());
    let values = (lo..=hi).map(|i| x.get(i) + alpha * y.get(i)).collect();
    Signal1D::from_raw(lo, values)
}

/// Largest pointwise difference `max |a_i - b_i|` over `window` (inclusive),
/// or over the union of supports when no window is given. Coefficients
/// missing from either signal read as zero.
pub fn max_abs_error(a: &Signal1D, b: &Signal1D, window: Option<(i64, i64)>) -> Result<f64> {
    let (lo, hi) = match window {
        Some((lo, hi)) => {
            if lo > hi {
                return Err(Error::EmptyWindow);
            }
            (lo, hi)
        }
        None => (a.offset.min(b.offset), a.last_index().max(b.last_index())),
    };
    let mut worst = 0.0;
    for i in lo..=hi {
        let d = abs(a.get(i) - b.get(i));
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// Seeded synthetic-noise description: `level` is the standard deviation as
/// a fraction of the peak magnitude of the signal it perturbs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    level: f64,
    seed: u64,
}

impl NoiseSpec {
    /// Fails with [`Error::BadNoiseLevel`] unless `0 <= level < 1`.
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        if !level.is_finite() || !(0.0..1.0).contains(&level) {
            return Err(Error::BadNoiseLevel(level));
        }
        Ok(Self { level, seed })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Perturbs every stored coefficient with a seeded Gaussian draw of standard
/// deviation `level * max|h|`. The same seed always produces the same
/// output; a zero level returns the input unchanged.
pub fn add_noise(h: &Signal1D, spec: &NoiseSpec) -> Signal1D {
    let sigma = spec.level * h.max_abs();
    if sigma == 0.0 {
        return h.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    let values = h
        .values
        .iter()
        .map(|v| v + normal.sample(&mut rng))
        .collect();
    Signal1D::from_raw(h.offset, values)
}
