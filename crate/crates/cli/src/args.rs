//! Command-line grammar.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "shiftdeconv",
    version,
    about = "Direct deconvolution of signals and images by shift-cancellation methods",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convolve a signal or image with a kernel.
    Blur {
        /// Input data: signal CSV, or PGM/PPM image.
        #[arg(long)]
        input: PathBuf,
        /// Kernel as a signal CSV.
        #[arg(long)]
        kernel: PathBuf,
        /// Image axis for the kernel (default x; images only).
        #[arg(long)]
        axis: Option<AxisArg>,
        /// Second kernel applied along y after the first along x.
        #[arg(long = "kernel-y")]
        kernel_y: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Reconstruct the unblurred data from a response and its kernel.
    Deblur {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
        /// Second kernel for separable two-axis deblurring.
        #[arg(long = "kernel-y")]
        kernel_y: Option<PathBuf>,
        /// Combination half-width (combined method; default M+1).
        #[arg(long = "L")]
        half_width: Option<usize>,
        /// Cancellation center index into the kernel (combined method;
        /// default: largest coefficient).
        #[arg(long)]
        center: Option<i64>,
        /// Iteration count for the modified (doubling) method.
        #[arg(long)]
        steps: Option<usize>,
        /// Keep the raw s0*h scale instead of dividing by the leading
        /// kernel coefficient.
        #[arg(long = "no-normalize")]
        no_normalize: bool,
        /// Axis order for separable deblurring (default xy).
        #[arg(long, value_enum)]
        order: Option<OrderArg>,
        /// Image axis for single-kernel deblurring (default x).
        #[arg(long)]
        axis: Option<AxisArg>,
        #[arg(long)]
        output: PathBuf,
        /// Write the per-step iteration trace CSV (signals only).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the solved shift combination CSV (combined method).
        #[arg(long)]
        combination: Option<PathBuf>,
    },
    /// Generate a kernel file.
    Synth {
        #[command(subcommand)]
        shape: SynthShape,
    },
    /// Add seeded Gaussian noise scaled to the peak magnitude.
    Noise {
        /// Standard deviation as a fraction of max |value|, in [0, 1).
        #[arg(long)]
        level: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print an error metric between two signals or two images.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Inclusive index window `lo:hi` (signals only).
        #[arg(long)]
        window: Option<String>,
        #[arg(long, value_enum, default_value_t = MetricArg::Maxabs)]
        metric: MetricArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum SynthShape {
    /// Unnormalized Gaussian: exp(-k^2 / (2 sigma^2)), peak 1.
    Gaussian {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Uniform-motion kernel: `len` unit coefficients at offsets 0..len-1.
    Boxcar {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Explicit coefficients at offset 0.
    Custom {
        /// Comma-separated values, e.g. `1,0.5,0.25`.
        #[arg(long)]
        values: String,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisArg {
    X,
    Y,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Step,
    Modified,
    Combined,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderArg {
    /// Deblur along x first, then y.
    Xy,
    /// Deblur along y first, then x.
    Yx,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    /// Largest absolute pointwise difference.
    Maxabs,
    /// Root mean square difference.
    Rms,
    /// maxabs divided by the dynamic range of the first input.
    Rel,
}
