//! Combined shifts: build the Toeplitz shift matrix, solve for the
//! combination coefficients, and apply the combination to the response.
//!
//! Instead of iterating, this method constructs in one shot a linear
//! combination `sum mu_i * S_(i)` of kernel copies shifted by `-L..L` whose
//! result has coefficient 1 at a chosen center `C` and exact zeros at the
//! `2L` surrounding positions. Applied to the response, the same combination
//! yields the impulse response directly on the window `[C, C+L]` whenever
//! `L` exceeds the impulse-response length. The coefficients solve
//! `mu * Sigma = e` where `Sigma_ij = s_(C+j-i)` is Toeplitz and `e` picks
//! the target kernel on the window — a unit impulse for deconvolution, or
//! any other shape to remodel the response as if measured with a different
//! kernel.
//!
//! The method is a fixed linear operator on the data: it has no divergence
//! horizon and degrades linearly under noise, which is what makes it work on
//! kernels (interior maxima, Gaussians) that defeat the step iteration.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::signal::{abs, max_abs_slice, Signal1D};

/// Pivots below `SINGULARITY_THRESHOLD * max|Sigma|` mean the shift matrix
/// is treated as singular rather than silently amplifying noise.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// A solved combination must reproduce its target within
/// `RESIDUAL_TOLERANCE * (max|e| + max|mu| * max|Sigma|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// The `(2L+1) x (2L+1)` Toeplitz matrix `Sigma_ij = s_(C+j-i)` describing
/// how kernel copies shifted by `-L..L` overlap around the center `C`
/// (an index into the kernel's stored coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftMatrix {
    center: i64,
    half_width: usize,
    entries: Vec<f64>,
}

impl ShiftMatrix {
    /// Matrix dimension `2L + 1`.
    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn center(&self) -> i64 {
        self.center
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Entry at row `i`, column `j` (0-based).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_slice(&self.entries)
    }
}

/// Builds the shift matrix for kernel `s`, center index `center` (into the
/// stored coefficients) and half-width `half_width`.
pub fn build_shift_matrix(s: &Signal1D, center: i64, half_width: usize) -> Result<ShiftMatrix> {
    assert!(half_width >= 1, "half-width L must be at least 1");
    if center < 0 || center >= s.len() as i64 {
        return Err(Error::BadCenter {
            center,
            kernel_len: s.len(),
        });
    }
    let n = 2 * half_width + 1;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            let k = center + j - i;
            entries.push(if (0..s.len() as i64).contains(&k) {
                s.values()[k as usize]
            } else {
                0.0
            });
        }
    }
    Ok(ShiftMatrix {
        center,
        half_width,
        entries,
    })
}

/// Solves `mu * Sigma = e` by row-pivoted Gaussian elimination on the
/// transposed system (never by forming an inverse), and verifies the
/// residual afterwards.
pub fn solve_coefficients(sigma: &ShiftMatrix, e: &[f64]) -> Result<Vec<f64>> {
    let n = sigma.dim();
    assert_eq!(e.len(), n, "target vector must have dimension 2L+1");
    assert!(e.iter().all(|v| v.is_finite()), "target must be finite");

    let scale = sigma.max_abs();
    if scale == 0.0 {
        return Err(Error::SingularShiftMatrix);
    }
    let pivot_floor = SINGULARITY_THRESHOLD * scale;

    // a = Sigma^T augmented with e; row-reduce in place.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = sigma.entry(j, i);
        }
    }
    let mut b: Vec<f64> = e.to_vec();

    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, abs(a[r * n + col])))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_val < pivot_floor {
            return Err(Error::SingularShiftMatrix);
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(pivot_row * n + j, col * n + j);
            }
            b.swap(pivot_row, col);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                let above = a[col * n + j];
                a[row * n + j] -= factor * above;
            }
            let rhs = b[col];
            b[row] -= factor * rhs;
        }
    }

    let mut mu = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for j in row + 1..n {
            sum -= a[row * n + j] * mu[j];
        }
        mu[row] = sum / a[row * n + row];
    }

    // Backward-stable elimination should land well inside this bound; a
    // violation means the system was too ill-conditioned to trust.
    let bound = RESIDUAL_TOLERANCE * (max_abs_slice(e) + max_abs_slice(&mu) * scale);
    for (j, &e_j) in e.iter().enumerate() {
        let mut r = -e_j;
        for (i, &m) in mu.iter().enumerate() {
            r += m * sigma.entry(i, j);
        }
        if abs(r) > bound {
            return Err(Error::SingularShiftMatrix);
        }
    }
    Ok(mu)
}

/// A solved shift combination: the coefficients `mu_(-L)..mu_L` together
/// with the center, half-width and target vector they were solved for.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCombination {
    center: i64,
    half_width: usize,
    mu: Vec<f64>,
    target: Vec<f64>,
}

impl ShiftCombination {
    /// Builds the shift matrix for `(s, center, half_width)` and solves for
    /// the combination reproducing `target` on the cancellation window.
    pub fn solve(s: &Signal1D, center: i64, half_width: usize, target: &[f64]) -> Result<Self> {
        let sigma = build_shift_matrix(s, center, half_width)?;
        let mu = solve_coefficients(&sigma, target)?;
        Ok(Self {
            center,
            half_width,
            mu,
            target: target.to_vec(),
        })
    }

    /// Reassembles a previously solved combination (e.g. read back from a
    /// file) without re-solving. Lengths must match `2L + 1`.
    pub fn from_parts(
        center: i64,
        half_width: usize,
        mu: Vec<f64>,
        target: Vec<f64>,
    ) -> Result<Self> {
        let n = 2 * half_width + 1;
        if mu.len() != n || target.len() != n {
            return Err(Error::KernelShape(
                "combination vectors must have length 2L+1",
            ));
        }
        if mu.iter().chain(target.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            center,
            half_width,
            mu,
            target,
        })
    }

    pub fn center(&self) -> i64 {
        self.center
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Combination coefficients for shifts `-L..L`, in shift order.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Target vector `e` the coefficients were solved for.
    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// The unit-impulse target used for plain deconvolution.
    pub fn unit_target(half_width: usize) -> Vec<f64> {
        let mut e = vec![0.0; 2 * half_width + 1];
        e[half_width] = 1.0;
        e
    }
}

/// Applies a combination to the response:
/// `H* = sum_i mu_i * H_(i), i = -L..L`, accumulated in fixed shift order so
/// the result is bit-reproducible.
///
/// The output support is `L` wider on each side before trimming.
pub fn apply_combination(response: &Signal1D, comb: &ShiftCombination) -> Signal1D {
    let l = comb.half_width;
    let out_len = response.len() + 2 * l;
    let mut out = vec![0.0; out_len];
    for (idx, &m) in comb.mu.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        for (p, &v) in response.values().iter().enumerate() {
            out[p + idx] += m * v;
        }
    }
    Signal1D::from_raw(response.offset() - l as i64, out)
}

/// Number of impulse-response terms determined by a response of `h_len`
/// samples under a kernel of `k_len` coefficients.
fn response_terms(h_len: usize, k_len: usize) -> Result<usize> {
    if h_len < k_len {
        return Err(Error::IncompleteResponse {
            response_len: h_len,
            kernel_len: k_len,
        });
    }
    Ok(h_len - k_len + 1)
}

fn argmax_abs(values: &[f64]) -> i64 {
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if abs(v) > abs(values[best]) {
            best = i;
        }
    }
    best as i64
}

/// Deconvolution by combined shifts.
///
/// The center defaults to the largest kernel coefficient (ties toward the
/// smallest index); `half_width` must exceed the number of impulse-response
/// terms `M = len(H) - len(S) + 1`. Unlike the iterative methods the result
/// needs no `1/s0` rescaling: the solved combination pins the effective
/// kernel coefficient at the center to exactly 1.
pub fn combined_deconvolve(
    response: &Signal1D,
    s: &Signal1D,
    half_width: usize,
    center: Option<i64>,
) -> Result<(Signal1D, ShiftCombination)> {
    let c = center.unwrap_or_else(|| argmax_abs(s.values()));
    let comb =
        ShiftCombination::solve(s, c, half_width, &ShiftCombination::unit_target(half_width))?;
    let est = deconvolve_with(response, s, &comb)?;
    Ok((est, comb))
}

/// Applies an already solved unit-target combination to a response,
/// reading the impulse response off the window `[C, C+M-1]`.
///
/// Lets one solve per kernel serve many responses of equal length (raster
/// lines, archived combinations).
pub fn deconvolve_with(
    response: &Signal1D,
    s: &Signal1D,
    comb: &ShiftCombination,
) -> Result<Signal1D> {
    let terms = response_terms(response.len(), s.len())?;
    if comb.half_width() <= terms {
        return Err(Error::HalfWidthTooSmall {
            half_width: comb.half_width(),
            response_terms: terms,
        });
    }
    if comb.center() < 0 || comb.center() >= s.len() as i64 {
        return Err(Error::BadCenter {
            center: comb.center(),
            kernel_len: s.len(),
        });
    }
    let star = apply_combination(response, comb);
    let lo = response.offset() + comb.center();
    let est = star.windowed(lo, lo + terms as i64 - 1)?;
    Ok(est.shift(-s.offset() - comb.center()))
}

/// Remodels the response as if the data had been measured with the kernel
/// encoded in `target` instead of `s`.
///
/// `target` lists the desired effective kernel on the cancellation window
/// `C-L..C+L` (so the unit vector reduces to plain deconvolution, and
/// narrower kernels model a sharper measuring system). The result is placed
/// at its true position: remodelling to the kernel itself returns the
/// response unchanged. Guarantees hold on the window where every
/// contribution is pinned by the solve; target support hugging the window
/// edges (within `M-1` of either end) picks up uncancelled tails.
pub fn remodel(
    response: &Signal1D,
    s: &Signal1D,
    half_width: usize,
    center: i64,
    target: &[f64],
) -> Result<Signal1D> {
    let terms = response_terms(response.len(), s.len())?;
    if half_width <= terms {
        return Err(Error::HalfWidthTooSmall {
            half_width,
            response_terms: terms,
        });
    }
    let comb = ShiftCombination::solve(s, center, half_width, target)?;
    let Some(first) = target.iter().position(|&v| v != 0.0) else {
        return Ok(Signal1D::from_raw(0, vec![0.0]));
    };
    let last = target.iter().rposition(|&v| v != 0.0).unwrap();
    let star = apply_combination(response, &comb);
    let lo = response.offset() + center - half_width as i64 + first as i64;
    let hi = response.offset() + center - half_width as i64 + last as i64 + terms as i64 - 1;
    star.windowed(lo, hi)
}
