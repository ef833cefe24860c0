//! Iterative shift methods: step-by-step cancellation, the doubling variant
//! for two-term kernels, the left-shift reformulation, and the
//! divergence-horizon estimate.
//!
//! Both iterations repeatedly subtract scaled, shifted copies of the kernel
//! and response from themselves. After `n` accepted steps the first `n`
//! kernel coefficients past the leading one are cancelled, so on that prefix
//! the running response equals `s0 * h`. The price is growth: whenever some
//! kernel coefficient exceeds the leading one, the cancellation multipliers
//! grow geometrically and floating point eventually drowns the
//! reconstruction (the horizon estimated by [`estimate_m_max`]).

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::signal::{abs, max_abs_slice, Signal1D};

/// One recorded iteration step.
///
/// For the step-by-step method `a_n` is the cancellation multiplier
/// `s_n / s0` of step `n`. For the doubling method it is the coefficient of
/// the single residual term left in the kernel after step `n` (which is also
/// the multiplier the next step will apply).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub n: usize,
    pub a_n: f64,
    pub max_abs_s: f64,
    pub max_abs_h: f64,
}

/// Step-by-step record of an iterative reconstruction, kept for divergence
/// diagnostics and for plotting error-growth curves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    /// Per-step records in ascending `n`.
    pub steps: Vec<TraceStep>,
    /// True iff the stop rule fired before the requested prefix was done.
    pub diverged: bool,
    /// Number of impulse-response coefficients actually confirmed.
    pub reconstructed_len: usize,
}

/// Options shared by the iterative methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    /// How many impulse-response coefficients to reconstruct.
    pub target_len: usize,
    /// Stop rule: declare divergence once `max|H^n|` exceeds this factor
    /// times `max|H^0|`, or any multiplier stops being finite.
    pub divergence_factor: f64,
    /// Divide the result by the leading kernel coefficient so the output is
    /// `h` itself rather than `s0 * h`.
    pub normalize: bool,
}

impl StepOptions {
    pub fn new(target_len: usize) -> Self {
        Self {
            target_len,
            divergence_factor: 1e6,
            normalize: true,
        }
    }

    fn validate(&self) {
        assert!(self.target_len >= 1, "target_len must be at least 1");
        assert!(
            self.divergence_factor.is_finite() && self.divergence_factor > 1.0,
            "divergence_factor must be finite and > 1"
        );
    }
}

/// Raw state of the step-by-step iteration; tracks the full evolving kernel
/// and response so the divergence guard sees tail growth, not just the
/// requested prefix.
struct StepState {
    kernel: Vec<f64>,
    response: Vec<f64>,
    s0: f64,
}

impl StepState {
    fn new(kernel: &[f64], response: &[f64]) -> Self {
        Self {
            kernel: kernel.to_vec(),
            response: response.to_vec(),
            s0: kernel[0],
        }
    }

    /// True once every kernel coefficient past the leading one is cancelled;
    /// the reconstruction is then complete at any length.
    fn settled(&self, from: usize) -> bool {
        self.kernel[from.min(self.kernel.len())..]
            .iter()
            .all(|&v| v == 0.0)
    }

    /// Applies iteration step `n`, returning the multiplier `a_n`.
    fn advance(&mut self, n: usize) -> f64 {
        let a = if n < self.kernel.len() {
            self.kernel[n] / self.s0
        } else {
            0.0
        };
        if a != 0.0 {
            subtract_shifted(&mut self.kernel, a, n);
            // The step exists to cancel this coefficient; write the exact
            // zero instead of keeping the rounding residue of s_n - a*s0.
            self.kernel[n] = 0.0;
            subtract_shifted(&mut self.response, a, n);
        }
        a
    }
}

/// `x <- x - a * shift(x, l)` in place, growing the buffer by `l`.
fn subtract_shifted(x: &mut Vec<f64>, a: f64, l: usize) {
    let old_len = x.len();
    x.resize(old_len + l, 0.0);
    for i in (l..old_len + l).rev() {
        let shifted = x[i - l];
        x[i] -= a * shifted;
    }
}

/// Reconstructs the impulse response by cancelling one kernel coefficient
/// per iteration (the step-by-step shifts method).
///
/// Both signals keep their absolute positions: the estimate comes back at
/// offset `response.offset() - kernel.offset()`.
///
/// On divergence the confirmed prefix is still returned with
/// `trace.diverged` set; only when not even the first coefficient survives
/// does this fail with [`Error::Divergent`].
pub fn step_by_step(
    response: &Signal1D,
    kernel: &Signal1D,
    opts: &StepOptions,
) -> Result<(Signal1D, IterationTrace)> {
    opts.validate();
    if kernel.is_zero() {
        return Err(Error::LeadingZeroKernel);
    }
    let out_offset = response.offset() - kernel.offset();
    let target = opts.target_len;
    let limit = opts.divergence_factor * response.max_abs();

    let mut state = StepState::new(kernel.values(), response.values());
    let mut trace = IterationTrace::default();
    let mut confirmed = 1usize.min(target);

    for n in 1..target {
        if state.settled(n) {
            confirmed = target;
            break;
        }
        let a = state.advance(n);
        let max_s = max_abs_slice(&state.kernel);
        let max_h = max_abs_slice(&state.response);
        trace.steps.push(TraceStep {
            n,
            a_n: a,
            max_abs_s: max_s,
            max_abs_h: max_h,
        });
        if !a.is_finite() || !max_s.is_finite() || !max_h.is_finite() || max_h > limit {
            trace.diverged = true;
            confirmed = n;
            break;
        }
        confirmed = n + 1;
    }

    finish(
        &state.response,
        confirmed,
        state.s0,
        out_offset,
        opts,
        trace,
    )
}

/// Splits a canonical two-term kernel `s0*d_0 + s_l*d_l` into
/// `(s0, s_l, l)`, rejecting any other shape.
fn two_term_split(kernel: &Signal1D) -> Result<(f64, f64, usize)> {
    let v = kernel.values();
    if v.len() < 2 || v[1..v.len() - 1].iter().any(|&x| x != 0.0) {
        return Err(Error::KernelShape(
            "kernel must have exactly two nonzero terms",
        ));
    }
    Ok((v[0], v[v.len() - 1], v.len() - 1))
}

/// Doubling variant of the step iteration for two-term kernels
/// `s0*d_0 + s_l*d_l`.
///
/// Step 1 subtracts the copy shifted by `l`; step `n + 1` adds the copy
/// shifted by `2^n * l` scaled by the residual coefficient, squaring it.
/// After `k` steps the kernel is `s0 * (d_0 - a^(2^k) * d_(2^k * l))` with
/// `a = s_l / s0`, so the first `2^k * l` coefficients of `h` are confirmed:
/// each step doubles the reconstructed prefix instead of extending it by
/// one.
pub fn modified_doubling(
    response: &Signal1D,
    kernel: &Signal1D,
    n_steps: usize,
    opts: &StepOptions,
) -> Result<(Signal1D, IterationTrace)> {
    opts.validate();
    let (s0, s_l, l) = two_term_split(kernel)?;
    let a = s_l / s0;
    let out_offset = response.offset() - kernel.offset();
    let target = opts.target_len;
    let limit = opts.divergence_factor * response.max_abs();

    // The doubling recursion never propagates information leftward, so the
    // response only needs tracking on the requested prefix.
    let mut h: Vec<f64> = (0..target)
        .map(|i| {
            if i < response.len() {
                response.values()[i]
            } else {
                0.0
            }
        })
        .collect();

    let mut trace = IterationTrace::default();
    let mut completed = 0usize;
    // Multiplier applied at the upcoming step; equals the residual
    // coefficient left by the previous one.
    let mut mult = a;

    for n in 1..=n_steps {
        if !mult.is_finite() || abs(mult) > opts.divergence_factor {
            trace.diverged = true;
            break;
        }
        let shift = l.checked_shl((n - 1) as u32).unwrap_or(usize::MAX);
        // Step 1 subtracts the shifted copy; later steps add it.
        let signed = if n == 1 { -mult } else { mult };
        if shift < target && signed != 0.0 {
            for i in (shift..target).rev() {
                let shifted = h[i - shift];
                h[i] += signed * shifted;
            }
        }
        let residual = mult * mult;
        let max_h = max_abs_slice(&h);
        trace.steps.push(TraceStep {
            n,
            a_n: residual,
            max_abs_s: abs(s0) * if residual > 1.0 { residual } else { 1.0 },
            max_abs_h: max_h,
        });
        if !max_h.is_finite() || max_h > limit {
            trace.diverged = true;
            break;
        }
        completed = n;
        mult = residual;
    }

    let prefix = (1usize << completed.min(63)).saturating_mul(l).min(target);
    finish(&h, prefix, s0, out_offset, opts, trace)
}

/// Shared tail of both iterations: slice off the confirmed prefix, apply the
/// `1/s0` normalization, and refuse to return a result with no usable
/// coefficient.
fn finish(
    h: &[f64],
    confirmed: usize,
    s0: f64,
    out_offset: i64,
    opts: &StepOptions,
    mut trace: IterationTrace,
) -> Result<(Signal1D, IterationTrace)> {
    let mut out: Vec<f64> = h[..confirmed.min(h.len())].to_vec();
    if opts.normalize {
        for v in &mut out {
            *v /= s0;
        }
    }
    let finite_len = out.iter().position(|v| !v.is_finite()).unwrap_or(out.len());
    if finite_len == 0 {
        trace.diverged = true;
        trace.reconstructed_len = 0;
        return Err(Error::Divergent(Box::new(trace)));
    }
    out.truncate(finite_len);
    trace.reconstructed_len = finite_len;
    Ok((Signal1D::from_raw(out_offset, out), trace))
}

/// Re-expresses a two-term problem relative to the dominant term when the
/// trailing coefficient is the larger one, by mirroring both signals about
/// the origin (the "shift left instead of right" reformulation).
///
/// With `|s_l| > |s0|` the direct iteration multiplies by `a = s_l/s0 > 1`
/// and diverges; on the mirrored problem the effective ratio is `1/a`.
/// Returns the (possibly mirrored) response and kernel plus a flag; when the
/// flag is set the caller un-mirrors the estimate with
/// [`Signal1D::reverse`].
pub fn flip_to_dominant(
    response: &Signal1D,
    kernel: &Signal1D,
) -> Result<(Signal1D, Signal1D, bool)> {
    let (s0, s_l, _) = two_term_split(kernel)?;
    if abs(s_l) > abs(s0) {
        Ok((response.reverse(), kernel.reverse(), true))
    } else {
        Ok((response.clone(), kernel.clone(), false))
    }
}

/// Estimated number of reconstructable coefficients before iteration
/// multipliers outgrow the largest representable magnitude `N_max`:
/// `l * ln(N_max) / ln(s_max / s0)`.
///
/// `ratio` is `s_max / s0` and `l` the spacing of the dominant term.
/// A ratio at or below 1 never diverges; the horizon is infinite.
pub fn estimate_m_max(ratio: f64, l: u32, ln_n_max: f64) -> f64 {
    assert!(l >= 1, "term spacing l must be at least 1");
    assert!(
        ln_n_max.is_finite() && ln_n_max > 0.0,
        "ln_n_max must be finite and positive"
    );
    if ratio.is_nan() || ratio <= 1.0 {
        return f64::INFINITY;
    }
    l as f64 * ln_n_max / libm::log(ratio)
}
