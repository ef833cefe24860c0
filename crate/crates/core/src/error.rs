//! Error type shared by all deconvolution modules.

use alloc::boxed::Box;
use core::fmt;

use crate::image::Axis;
use crate::step::IterationTrace;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building signals or deconvolving.
///
/// Numerical failures carry enough context to report *where* the method gave
/// up (the divergence trace, the failing raster line), because for the
/// iterative methods a failure is an expected outcome on hostile kernels,
/// not a bug.
#[derive(Debug, Clone)]
pub enum Error {
    /// A signal or raster was constructed with NaN or infinite samples.
    NonFinite,
    /// A signal needs at least one coefficient.
    EmptySignal,
    /// A comparison window with `lo > hi`.
    EmptyWindow,
    /// Noise level outside `[0, 1)`.
    BadNoiseLevel(f64),
    /// The kernel is the zero signal, so no leading coefficient exists.
    LeadingZeroKernel,
    /// The iteration blew past the divergence guard before confirming a
    /// single coefficient. The trace records how it got there.
    Divergent(Box<IterationTrace>),
    /// A kernel does not have the shape the method requires (e.g. the
    /// doubling method needs exactly two nonzero terms).
    KernelShape(&'static str),
    /// Center index outside the kernel support.
    BadCenter { center: i64, kernel_len: usize },
    /// The shift matrix is numerically singular, so no cancelling
    /// combination exists for this kernel/center/half-width choice.
    SingularShiftMatrix,
    /// The combination half-width L must exceed the impulse-response length.
    HalfWidthTooSmall {
        half_width: usize,
        response_terms: usize,
    },
    /// The observed response is shorter than the kernel, so the impulse
    /// response is not fully determined.
    IncompleteResponse {
        response_len: usize,
        kernel_len: usize,
    },
    /// The least-squares system of the reference oracle has deficient rank.
    RankDeficient,
    /// Uniform-motion blur length meets or exceeds the raster extent.
    BlurWiderThanImage { extent: usize, blur_len: usize },
    /// A per-line deconvolution failed inside a raster operation.
    LineFailed {
        axis: Axis,
        line: usize,
        channel: usize,
        source: Box<Error>,
    },
}

impl Error {
    /// Stable machine-readable name, used verbatim in CLI diagnostics.
    ///
    /// A failed raster line reports the name of the underlying failure so
    /// that `Divergent` means the same thing for signals and images.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite => "NonFinite",
            Error::EmptySignal => "EmptySignal",
            Error::EmptyWindow => "EmptyWindow",
            Error::BadNoiseLevel(_) => "BadNoiseLevel",
            Error::LeadingZeroKernel => "LeadingZeroKernel",
            Error::Divergent(_) => "Divergent",
            Error::KernelShape(_) => "KernelShape",
            Error::BadCenter { .. } => "BadCenter",
            Error::SingularShiftMatrix => "SingularShiftMatrix",
            Error::HalfWidthTooSmall { .. } => "HalfWidthTooSmall",
            Error::IncompleteResponse { .. } => "IncompleteResponse",
            Error::RankDeficient => "RankDeficient",
            Error::BlurWiderThanImage { .. } => "BlurWiderThanImage",
            Error::LineFailed { source, .. } => source.name(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "signal values must be finite"),
            Error::EmptySignal => write!(f, "signal must have at least one value"),
            Error::EmptyWindow => write!(f, "comparison window is empty (lo > hi)"),
            Error::BadNoiseLevel(level) => {
                write!(f, "noise level {level} outside [0, 1)")
            }
            Error::LeadingZeroKernel => {
                write!(f, "kernel has no nonzero leading coefficient")
            }
            Error::Divergent(trace) => write!(
                f,
                "iteration diverged after {} step(s) with no confirmed coefficient",
                trace.steps.len()
            ),
            Error::KernelShape(what) => write!(f, "{what}"),
            Error::BadCenter { center, kernel_len } => write!(
                f,
                "center index {center} outside kernel support [0, {kernel_len})"
            ),
            Error::SingularShiftMatrix => {
                write!(f, "shift matrix is numerically singular")
            }
            Error::HalfWidthTooSmall {
                half_width,
                response_terms,
            } => write!(
                f,
                "half-width L={half_width} must exceed the {response_terms} response term(s)"
            ),
            Error::IncompleteResponse {
                response_len,
                kernel_len,
            } => write!(
                f,
                "response of {response_len} sample(s) is shorter than the kernel ({kernel_len})"
            ),
            Error::RankDeficient => write!(f, "least-squares system is rank deficient"),
            Error::BlurWiderThanImage { extent, blur_len } => write!(
                f,
                "blur length {blur_len} meets or exceeds the raster extent {extent}"
            ),
            Error::LineFailed {
                axis,
                line,
                channel,
                source,
            } => write!(
                f,
                "{source} (axis {axis:?}, line {line}, channel {channel})"
            ),
        }
    }
}
