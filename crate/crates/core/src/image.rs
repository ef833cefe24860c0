//! Raster deblurring: the 1D methods applied line by line along an image
//! axis, uniform-motion (boxcar) removal by differencing, and separable 2D
//! restoration.
//!
//! Axis-parallel blur reduces the 2D convolution to independent 1D problems
//! per row (or column) and channel, so every 1D method applies unchanged.
//! Kernels are taken by their coefficient values; a kernel's global offset
//! has no meaning on a raster and is ignored, which keeps blur/deblur exact
//! inverses of each other.
//!
//! Boundary model: blurring grows the image along the axis by the kernel
//! width minus one (full support, no padding tricks), and deblurring
//! consumes exactly that. Intermediate samples may leave `[0, 1]`; clamping
//! is a concern of file writers, not of the numerics.
//!
//! Only axis-parallel smear is representable ([`Axis::X`] or [`Axis::Y`]).
//! Diagonal motion must be rotated onto an axis by the caller first;
//! resampling trade-offs of that rotation are out of scope here.

use alloc::boxed::Box;
use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::combined::{deconvolve_with, ShiftCombination};
use crate::error::{Error, Result};
use crate::signal::{convolve_slices, NoiseSpec, Signal1D};
use crate::step::{flip_to_dominant, modified_doubling, step_by_step, StepOptions};

/// Raster axis: `X` runs along rows, `Y` along columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A width x height x channels grid of real samples, row-major with
/// interleaved channels.
///
/// File readers deliver samples in `[0, 1]`; intermediate computation
/// results may exceed that range and only need to stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRaster {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f64>,
}

impl ImageRaster {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<f64>) -> Result<Self> {
        assert!(
            width >= 1 && height >= 1,
            "raster dimensions must be positive"
        );
        assert!(
            channels == 1 || channels == 3,
            "rasters carry 1 or 3 channels"
        );
        if samples.len() != width * height * channels {
            return Err(Error::EmptySignal);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        Self::new(
            width,
            height,
            channels,
            vec![0.0; width * height * channels],
        )
        .expect("zero raster is valid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample(&self, x: usize, y: usize, channel: usize) -> f64 {
        self.samples[(y * self.width + x) * self.channels + channel]
    }

    pub fn set_sample(&mut self, x: usize, y: usize, channel: usize, value: f64) {
        self.samples[(y * self.width + x) * self.channels + channel] = value;
    }

    /// Image extent along an axis.
    pub fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.width,
            Axis::Y => self.height,
        }
    }

    /// Number of independent lines per channel along an axis.
    fn line_count(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.height,
            Axis::Y => self.width,
        }
    }

    fn line(&self, axis: Axis, line: usize, channel: usize) -> Vec<f64> {
        match axis {
            Axis::X => (0..self.width)
                .map(|x| self.sample(x, line, channel))
                .collect(),
            Axis::Y => (0..self.height)
                .map(|y| self.sample(line, y, channel))
                .collect(),
        }
    }

    fn write_line(&mut self, axis: Axis, line: usize, channel: usize, values: &[f64]) {
        match axis {
            Axis::X => {
                for (x, &v) in values.iter().enumerate() {
                    self.set_sample(x, line, channel, v);
                }
            }
            Axis::Y => {
                for (y, &v) in values.iter().enumerate() {
                    self.set_sample(line, y, channel, v);
                }
            }
        }
    }

    fn resized_along(&self, axis: Axis, extent: usize) -> Self {
        match axis {
            Axis::X => Self::zeros(extent, self.height, self.channels),
            Axis::Y => Self::zeros(self.width, extent, self.channels),
        }
    }
}

/// A 2D kernel factored into per-axis 1D components.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableKernel2D {
    pub sx: Signal1D,
    pub sy: Signal1D,
}

/// Which 1D method deconvolves each line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeblurMethod {
    Step,
    Modified,
    Combined,
}

/// Axis order for separable restoration; both orders reconstruct the same
/// image up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeblurOrder {
    XThenY,
    YThenX,
}

/// Per-line method parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeblurOptions {
    /// Combination half-width for the combined method; defaults per line to
    /// the smallest admissible value `M + 1`.
    pub half_width: Option<usize>,
    /// Cancellation center for the combined method; defaults to the largest
    /// kernel coefficient.
    pub center: Option<i64>,
    /// Step count for the doubling method; defaults to just enough to push
    /// the residual past the line.
    pub steps: Option<usize>,
    /// Divergence guard passed through to the iterative methods.
    pub divergence_factor: f64,
    /// Divide by the leading kernel coefficient (iterative methods).
    pub normalize: bool,
}

impl Default for DeblurOptions {
    fn default() -> Self {
        Self {
            half_width: None,
            center: None,
            steps: None,
            divergence_factor: 1e6,
            normalize: true,
        }
    }
}

/// Blurs every line of every channel along `axis` with the kernel's
/// coefficients; the image grows by `len(s) - 1` along that axis.
pub fn blur_axis(img: &ImageRaster, s: &Signal1D, axis: Axis) -> ImageRaster {
    let out_extent = img.extent(axis) + s.len() - 1;
    let mut out = img.resized_along(axis, out_extent);
    for channel in 0..img.channels {
        for line in 0..img.line_count(axis) {
            let values = img.line(axis, line, channel);
            let blurred = convolve_slices(&values, s.values());
            out.write_line(axis, line, channel, &blurred);
        }
    }
    out
}

/// Smallest `n` with `2^n * l >= target`.
fn doubling_steps(target: usize, l: usize) -> usize {
    let mut n = 0;
    let mut reach = l;
    while reach < target {
        reach = reach.saturating_mul(2);
        n += 1;
    }
    n
}

/// Deconvolves one trimmed line. The line signal's offset is its leading
/// run of exactly-zero pixels; estimates come back carrying the same offset
/// so the caller re-embeds by absolute index.
fn deconvolve_line(
    line: &Signal1D,
    kernel: &Signal1D,
    method: DeblurMethod,
    opts: &DeblurOptions,
    comb_cache: &mut BTreeMap<usize, ShiftCombination>,
) -> Result<Signal1D> {
    if line.len() < kernel.len() {
        return Err(Error::IncompleteResponse {
            response_len: line.len(),
            kernel_len: kernel.len(),
        });
    }
    let terms = line.len() - kernel.len() + 1;
    let mut sopts = StepOptions::new(terms);
    sopts.divergence_factor = opts.divergence_factor;
    sopts.normalize = opts.normalize;
    match method {
        DeblurMethod::Step => {
            let (est, trace) = step_by_step(line, kernel, &sopts)?;
            if trace.diverged {
                return Err(Error::Divergent(Box::new(trace)));
            }
            Ok(est)
        }
        DeblurMethod::Modified => {
            let (resp, kern, flipped) = flip_to_dominant(line, kernel)?;
            let l = kern.len() - 1;
            let steps = opts.steps.unwrap_or_else(|| doubling_steps(terms, l));
            let (est, trace) = modified_doubling(&resp, &kern, steps, &sopts)?;
            if trace.diverged {
                return Err(Error::Divergent(Box::new(trace)));
            }
            Ok(if flipped { est.reverse() } else { est })
        }
        DeblurMethod::Combined => {
            let half_width = opts.half_width.unwrap_or(terms + 1);
            let comb = cached_combination(kernel, half_width, opts, comb_cache)?;
            deconvolve_with(line, kernel, comb)
        }
    }
}

/// One combination solve serves every full-length line of an axis; shorter
/// (trimmed) lines get their own entry keyed by half-width.
fn cached_combination<'c>(
    kernel: &Signal1D,
    half_width: usize,
    opts: &DeblurOptions,
    cache: &'c mut BTreeMap<usize, ShiftCombination>,
) -> Result<&'c ShiftCombination> {
    match cache.entry(half_width) {
        Entry::Occupied(hit) => Ok(hit.into_mut()),
        Entry::Vacant(slot) => {
            let center = opts.center.unwrap_or_else(|| {
                let v = kernel.values();
                let mut best = 0;
                for (i, &x) in v.iter().enumerate() {
                    if libm::fabs(x) > libm::fabs(v[best]) {
                        best = i;
                    }
                }
                best as i64
            });
            let comb = ShiftCombination::solve(
                kernel,
                center,
                half_width,
                &ShiftCombination::unit_target(half_width),
            )?;
            Ok(slot.insert(comb))
        }
    }
}

/// Deconvolves every line of every channel along `axis` with the chosen 1D
/// method; the image shrinks by `len(s) - 1` along that axis.
///
/// Lines are independent problems: all-zero lines stay zero, and a line
/// whose method diverges aborts the whole operation with its line/channel
/// coordinates attached.
pub fn deblur_axis(
    img: &ImageRaster,
    s: &Signal1D,
    axis: Axis,
    method: DeblurMethod,
    opts: &DeblurOptions,
) -> Result<ImageRaster> {
    if s.is_zero() {
        return Err(Error::LeadingZeroKernel);
    }
    let in_extent = img.extent(axis);
    if in_extent < s.len() {
        return Err(Error::IncompleteResponse {
            response_len: in_extent,
            kernel_len: s.len(),
        });
    }
    let out_extent = in_extent - s.len() + 1;
    // Rasters have no index origin, so the kernel is anchored at zero.
    let kernel = Signal1D::from_raw(0, s.values().to_vec());
    let mut out = img.resized_along(axis, out_extent);
    let mut comb_cache = BTreeMap::new();
    for channel in 0..img.channels {
        for line in 0..img.line_count(axis) {
            let line_sig = Signal1D::from_raw(0, img.line(axis, line, channel));
            if line_sig.is_zero() {
                continue;
            }
            let est = deconvolve_line(&line_sig, &kernel, method, opts, &mut comb_cache).map_err(
                |e| Error::LineFailed {
                    axis,
                    line,
                    channel,
                    source: Box::new(e),
                },
            )?;
            let values: Vec<f64> = (0..out_extent as i64).map(|x| est.get(x)).collect();
            out.write_line(axis, line, channel, &values);
        }
    }
    Ok(out)
}

/// Removes uniform-motion smear modelled by the mean boxcar of length
/// `blur_len` (coefficients `1/blur_len`, the exposure-averaged kernel that
/// keeps samples in range).
///
/// Returns the restored image and the number of combination steps used:
/// one differencing step that collapses the boxcar to the two-term kernel
/// `d_0 - d_blur_len`, plus the doubling steps that push the leftover ghost
/// off the image.
pub fn motion_deblur_uniform(
    img: &ImageRaster,
    blur_len: usize,
    axis: Axis,
) -> Result<(ImageRaster, usize)> {
    motion_deblur_scaled(img, blur_len, 1.0 / blur_len as f64, axis)
}

/// Uniform-motion removal for a boxcar with an arbitrary (equal) coefficient
/// per tap; the `1/coefficient` gain restore happens before return.
pub fn motion_deblur_scaled(
    img: &ImageRaster,
    blur_len: usize,
    coefficient: f64,
    axis: Axis,
) -> Result<(ImageRaster, usize)> {
    assert!(blur_len >= 2, "boxcar must span at least 2 samples");
    assert!(
        coefficient.is_finite() && coefficient != 0.0,
        "boxcar coefficient must be finite and nonzero"
    );
    let in_extent = img.extent(axis);
    if in_extent <= blur_len {
        return Err(Error::BlurWiderThanImage {
            extent: in_extent,
            blur_len,
        });
    }
    let out_extent = in_extent - blur_len + 1;
    let steps = doubling_steps(out_extent, blur_len);

    // Differenced kernel: c * (d_0 - d_l).
    let mut two_term = vec![0.0; blur_len + 1];
    two_term[0] = coefficient;
    two_term[blur_len] = -coefficient;
    let kernel = Signal1D::from_raw(0, two_term);

    let mut sopts = StepOptions::new(out_extent);
    sopts.divergence_factor = 1e6;
    let mut out = img.resized_along(axis, out_extent);
    for channel in 0..img.channels {
        for line in 0..img.line_count(axis) {
            let values = img.line(axis, line, channel);
            // H1 = H - H_(1), one extra sample of support.
            let mut diff = Vec::with_capacity(values.len() + 1);
            diff.push(values[0]);
            for i in 1..values.len() {
                diff.push(values[i] - values[i - 1]);
            }
            diff.push(-values[values.len() - 1]);
            let line_sig = Signal1D::from_raw(0, diff);
            if line_sig.is_zero() {
                continue;
            }
            let (est, trace) =
                modified_doubling(&line_sig, &kernel, steps, &sopts).map_err(|e| {
                    Error::LineFailed {
                        axis,
                        line,
                        channel,
                        source: Box::new(e),
                    }
                })?;
            if trace.diverged {
                return Err(Error::LineFailed {
                    axis,
                    line,
                    channel,
                    source: Box::new(Error::Divergent(Box::new(trace))),
                });
            }
            let restored: Vec<f64> = (0..out_extent as i64).map(|x| est.get(x)).collect();
            out.write_line(axis, line, channel, &restored);
        }
    }
    Ok((out, 1 + steps))
}

/// Separable restoration: deconvolve along one axis to obtain the
/// intermediate image, then along the other to obtain the original.
pub fn deblur_separable(
    img: &ImageRaster,
    kernel: &SeparableKernel2D,
    order: DeblurOrder,
    method: DeblurMethod,
    opts: &DeblurOptions,
) -> Result<ImageRaster> {
    match order {
        DeblurOrder::XThenY => {
            let intermediate = deblur_axis(img, &kernel.sx, Axis::X, method, opts)?;
            deblur_axis(&intermediate, &kernel.sy, Axis::Y, method, opts)
        }
        DeblurOrder::YThenX => {
            let intermediate = deblur_axis(img, &kernel.sy, Axis::Y, method, opts)?;
            deblur_axis(&intermediate, &kernel.sx, Axis::X, method, opts)
        }
    }
}

/// Perturbs every sample with the same seeded Gaussian model as
/// [`crate::signal::add_noise`]: standard deviation `level * max |sample|`,
/// identical output for identical seeds.
pub fn add_image_noise(img: &ImageRaster, spec: &NoiseSpec) -> ImageRaster {
    let peak = img.samples().iter().fold(
        0.0f64,
        |m, &v| if libm::fabs(v) > m { libm::fabs(v) } else { m },
    );
    let sigma = spec.level() * peak;
    if sigma == 0.0 {
        return img.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    let samples = img
        .samples()
        .iter()
        .map(|v| v + normal.sample(&mut rng))
        .collect();
    ImageRaster::new(img.width(), img.height(), img.channels(), samples)
        .expect("perturbed raster keeps its shape")
}

/// One factor of a separable Gaussian: `exp(-k^2 / (2 sigma^2))` for
/// `k in [-radius, radius]`, peak exactly 1 (unnormalized), offset
/// `-radius`. Requires `radius >= ceil(sigma)`.
pub fn make_gaussian_kernel(sigma: f64, radius: usize) -> Signal1D {
    assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
    assert!(radius >= 1, "radius must be at least 1");
    assert!(
        radius as f64 >= libm::ceil(sigma),
        "radius must be at least ceil(sigma)"
    );
    let denom = 2.0 * sigma * sigma;
    let values: Vec<f64> = (-(radius as i64)..=radius as i64)
        .map(|k| libm::exp(-((k * k) as f64) / denom))
        .collect();
    Signal1D::from_raw(-(radius as i64), values)
}
