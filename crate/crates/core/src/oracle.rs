//! Slow, independent ground truths used by the test suites: dense
//! least-squares deconvolution and definitional 2D convolution.
//!
//! Nothing here shares a solver with the shift methods — this module's
//! elimination is its own full-pivot code over the normal equations — so an
//! agreement between the two is evidence, not tautology.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::ImageRaster;
use crate::signal::{abs, Signal1D};

/// Rank tolerance of the full-pivot elimination, relative to the largest
/// normal-equation entry.
const RANK_THRESHOLD: f64 = 1e-12;

/// Least-squares deconvolution: the `terms`-coefficient impulse response
/// minimizing `|convolve(h, s) - response|^2`, solved through the normal
/// equations with full pivoting. Exact (up to rounding) whenever the
/// response really is a blur of some `h` by `s`.
pub fn dense_deconvolve(response: &Signal1D, s: &Signal1D, terms: usize) -> Result<Signal1D> {
    assert!(terms >= 1, "must request at least one coefficient");
    let k = s.len();
    let rows = response.len().max(k + terms - 1);

    // Convolution matrix column m holds s shifted down by m; rows compare
    // against the observed response (zero where unobserved).
    let a = |row: usize, col: usize| -> f64 {
        let idx = row as i64 - col as i64;
        if (0..k as i64).contains(&idx) {
            s.values()[idx as usize]
        } else {
            0.0
        }
    };
    let b = |row: usize| -> f64 {
        if row < response.len() {
            response.values()[row]
        } else {
            0.0
        }
    };

    // Normal equations N h = g with N = A^T A, g = A^T b.
    let mut n = vec![0.0; terms * terms];
    let mut g = vec![0.0; terms];
    for i in 0..terms {
        for j in 0..terms {
            let mut sum = 0.0;
            for row in 0..rows {
                sum += a(row, i) * a(row, j);
            }
            n[i * terms + j] = sum;
        }
        let mut sum = 0.0;
        for row in 0..rows {
            sum += a(row, i) * b(row);
        }
        g[i] = sum;
    }

    let h = solve_full_pivot(&mut n, &mut g, terms)?;
    Ok(Signal1D::from_raw(response.offset() - s.offset(), h))
}

/// In-place Gaussian elimination with full (row and column) pivoting.
fn solve_full_pivot(m: &mut [f64], rhs: &mut [f64], dim: usize) -> Result<Vec<f64>> {
    let scale = m.iter().fold(0.0f64, |acc, &v| {
        let a = abs(v);
        if a > acc {
            a
        } else {
            acc
        }
    });
    if scale == 0.0 {
        return Err(Error::RankDeficient);
    }
    let floor = RANK_THRESHOLD * scale;

    // col_of[k]: which original unknown was eliminated at stage k.
    let mut col_of: Vec<usize> = (0..dim).collect();

    for stage in 0..dim {
        let mut best = (stage, stage, abs(m[stage * dim + stage]));
        for r in stage..dim {
            for c in stage..dim {
                let v = abs(m[r * dim + c]);
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 < floor {
            return Err(Error::RankDeficient);
        }
        let (pr, pc, _) = best;
        if pr != stage {
            for c in 0..dim {
                m.swap(pr * dim + c, stage * dim + c);
            }
            rhs.swap(pr, stage);
        }
        if pc != stage {
            for r in 0..dim {
                m.swap(r * dim + pc, r * dim + stage);
            }
            col_of.swap(pc, stage);
        }
        let pivot = m[stage * dim + stage];
        for r in stage + 1..dim {
            let factor = m[r * dim + stage] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in stage..dim {
                let upper = m[stage * dim + c];
                m[r * dim + c] -= factor * upper;
            }
            let upper_rhs = rhs[stage];
            rhs[r] -= factor * upper_rhs;
        }
    }

    let mut y = vec![0.0; dim];
    for r in (0..dim).rev() {
        let mut sum = rhs[r];
        for c in r + 1..dim {
            sum -= m[r * dim + c] * y[c];
        }
        y[r] = sum / m[r * dim + r];
    }

    let mut x = vec![0.0; dim];
    for (stage, &col) in col_of.iter().enumerate() {
        x[col] = y[stage];
    }
    Ok(x)
}

/// A dense (non-separable) 2D kernel for the definitional convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseKernel2D {
    width: usize,
    height: usize,
    weights: Vec<f64>,
}

impl DenseKernel2D {
    pub fn new(width: usize, height: usize, weights: Vec<f64>) -> Result<Self> {
        assert!(
            width >= 1 && height >= 1,
            "kernel dimensions must be positive"
        );
        if weights.len() != width * height {
            return Err(Error::EmptySignal);
        }
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            width,
            height,
            weights,
        })
    }

    /// Outer product of two 1D kernels: `w(x, y) = sx(x) * sy(y)`.
    pub fn separable(sx: &Signal1D, sy: &Signal1D) -> Self {
        let mut weights = Vec::with_capacity(sx.len() * sy.len());
        for vy in sy.values() {
            for vx in sx.values() {
                weights.push(vx * vy);
            }
        }
        Self {
            width: sx.len(),
            height: sy.len(),
            weights,
        }
    }

    fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[y * self.width + x]
    }
}

/// Definitional 2D convolution by the quadruple loop, full support growth,
/// channels independent. Test-scale inputs only.
pub fn convolve_2d_naive(img: &ImageRaster, kernel: &DenseKernel2D) -> ImageRaster {
    let out_w = img.width() + kernel.width - 1;
    let out_h = img.height() + kernel.height - 1;
    let mut out = ImageRaster::zeros(out_w, out_h, img.channels());
    for channel in 0..img.channels() {
        for ky in 0..kernel.height {
            for kx in 0..kernel.width {
                let w = kernel.weight(kx, ky);
                if w == 0.0 {
                    continue;
                }
                for my in 0..img.height() {
                    for mx in 0..img.width() {
                        let v =
                            out.sample(kx + mx, ky + my, channel) + w * img.sample(mx, my, channel);
                        out.set_sample(kx + mx, ky + my, channel, v);
                    }
                }
            }
        }
    }
    out
}
