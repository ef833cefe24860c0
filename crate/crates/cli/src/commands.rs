//! Command execution: every subcommand reads its inputs, runs the core
//! routine, writes the artifacts, and drops a manifest next to each one.

use std::fs;
use std::path::Path;

use shiftdeconv_core::combined::combined_deconvolve;
use shiftdeconv_core::image::{
    add_image_noise, blur_axis, deblur_axis, deblur_separable, motion_deblur_scaled, Axis,
    DeblurMethod, DeblurOptions, DeblurOrder, ImageRaster, SeparableKernel2D,
};
use shiftdeconv_core::signal::{add_noise, axpy, convolve, max_abs_error, NoiseSpec, Signal1D};
use shiftdeconv_core::step::{
    flip_to_dominant, modified_doubling, step_by_step, IterationTrace, StepOptions,
};
use shiftdeconv_core::Error as CoreError;

use crate::args::{AxisArg, Cli, Command, MethodArg, MetricArg, OrderArg, SynthShape};
use crate::error::CliError;
use crate::formats::{parse_signal, read_signal, write_combination, write_signal, write_trace};
use crate::manifest::Manifest;
use crate::netpbm::{looks_like_netpbm, parse_image, write_image};

/// A file is either a 1D signal or a raster; commands accept both and write
/// back whatever kind they read.
enum Data {
    Signal(Signal1D),
    Image(ImageRaster),
}

fn read_data(path: &Path) -> Result<Data, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if looks_like_netpbm(&bytes) {
        let img = parse_image(&bytes).map_err(|detail| CliError::Format {
            name: "ImageFormat",
            detail: format!("{}: {detail}", path.display()),
        })?;
        Ok(Data::Image(img))
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Format {
            name: "SignalFormat",
            detail: format!("{}: not UTF-8 text", path.display()),
        })?;
        let s = parse_signal(text).map_err(|detail| CliError::Format {
            name: "SignalFormat",
            detail: format!("{}: {detail}", path.display()),
        })?;
        Ok(Data::Signal(s))
    }
}

fn write_data(path: &Path, data: &Data, manifest: &Manifest) -> Result<(), CliError> {
    match data {
        Data::Signal(s) => write_signal(path, s)?,
        Data::Image(img) => write_image(path, img)?,
    }
    manifest.write_for(path)
}

fn axis_of(arg: Option<AxisArg>) -> Axis {
    match arg {
        Some(AxisArg::Y) => Axis::Y,
        _ => Axis::X,
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Blur {
            input,
            kernel,
            axis,
            kernel_y,
            output,
        } => blur(&input, &kernel, axis, kernel_y.as_deref(), &output),
        Command::Deblur {
            method,
            input,
            kernel,
            kernel_y,
            half_width,
            center,
            steps,
            no_normalize,
            order,
            axis,
            output,
            trace,
            combination,
        } => {
            let opts = DeblurArgs {
                method,
                half_width,
                center,
                steps,
                normalize: !no_normalize,
                order,
                axis,
                trace,
                combination,
            };
            deblur(&input, &kernel, kernel_y.as_deref(), &output, &opts)
        }
        Command::Synth { shape } => synth(&shape),
        Command::Noise {
            level,
            seed,
            input,
            output,
        } => noise(level, seed, &input, &output),
        Command::Compare {
            a,
            b,
            window,
            metric,
        } => compare(&a, &b, window.as_deref(), metric),
    }
}

fn blur(
    input: &Path,
    kernel_path: &Path,
    axis: Option<AxisArg>,
    kernel_y: Option<&Path>,
    output: &Path,
) -> Result<(), CliError> {
    let mut manifest = Manifest::for_current_command();
    manifest.add_input(input)?;
    manifest.add_input(kernel_path)?;
    if let Some(ky) = kernel_y {
        manifest.add_input(ky)?;
    }
    let kernel = read_signal(kernel_path)?;

    match read_data(input)? {
        Data::Signal(s) => {
            if axis.is_some() || kernel_y.is_some() {
                return Err(CliError::Usage(
                    "--axis and --kernel-y apply to image inputs only".into(),
                ));
            }
            let out = convolve(&s, &kernel);
            write_data(output, &Data::Signal(out), &manifest)
        }
        Data::Image(img) => {
            let out = if let Some(ky_path) = kernel_y {
                if axis == Some(AxisArg::Y) {
                    return Err(CliError::Usage(
                        "--kernel-y already fixes the axes: kernel runs along x".into(),
                    ));
                }
                let ky = read_signal(ky_path)?;
                blur_axis(&blur_axis(&img, &kernel, Axis::X), &ky, Axis::Y)
            } else {
                blur_axis(&img, &kernel, axis_of(axis))
            };
            write_data(output, &Data::Image(out), &manifest)
        }
    }
}

struct DeblurArgs {
    method: MethodArg,
    half_width: Option<usize>,
    center: Option<i64>,
    steps: Option<usize>,
    normalize: bool,
    order: Option<OrderArg>,
    axis: Option<AxisArg>,
    trace: Option<std::path::PathBuf>,
    combination: Option<std::path::PathBuf>,
}

/// True if every coefficient is the same (a uniform-motion kernel).
fn as_boxcar(kernel: &Signal1D) -> Option<(usize, f64)> {
    let v = kernel.values();
    if v.len() >= 2 && v.iter().all(|&x| x == v[0]) {
        Some((v.len(), v[0]))
    } else {
        None
    }
}

fn doubling_steps(target: usize, l: usize) -> usize {
    let mut n = 0;
    let mut reach = l;
    while reach < target {
        reach = reach.saturating_mul(2);
        n += 1;
    }
    n
}

fn deblur(
    input: &Path,
    kernel_path: &Path,
    kernel_y: Option<&Path>,
    output: &Path,
    args: &DeblurArgs,
) -> Result<(), CliError> {
    let mut manifest = Manifest::for_current_command();
    manifest.add_input(input)?;
    manifest.add_input(kernel_path)?;
    if let Some(ky) = kernel_y {
        manifest.add_input(ky)?;
    }
    manifest.add_param("method", format!("{:?}", args.method).to_lowercase());
    manifest.add_param("normalize", args.normalize);
    let kernel = read_signal(kernel_path)?;

    match read_data(input)? {
        Data::Signal(s) => {
            if kernel_y.is_some() {
                return Err(CliError::Usage(
                    "--kernel-y applies to image inputs only".into(),
                ));
            }
            if args.axis.is_some() {
                return Err(CliError::Usage(
                    "--axis applies to image inputs only".into(),
                ));
            }
            let est = deblur_signal(&s, &kernel, args, &manifest)?;
            write_data(output, &Data::Signal(est), &manifest)
        }
        Data::Image(img) => {
            if args.trace.is_some() {
                return Err(CliError::Usage(
                    "--trace records a single 1D iteration; use a signal input".into(),
                ));
            }
            let est = deblur_image(&img, &kernel, kernel_y, args)?;
            write_data(output, &Data::Image(est), &manifest)
        }
    }
}

fn response_terms(response: &Signal1D, kernel: &Signal1D) -> Result<usize, CliError> {
    if response.len() < kernel.len() {
        return Err(CliError::Numeric(CoreError::IncompleteResponse {
            response_len: response.len(),
            kernel_len: kernel.len(),
        }));
    }
    Ok(response.len() - kernel.len() + 1)
}

fn dump_trace(
    args: &DeblurArgs,
    manifest: &Manifest,
    trace: &IterationTrace,
) -> Result<(), CliError> {
    if let Some(path) = &args.trace {
        write_trace(path, trace)?;
        manifest.write_for(path)?;
    }
    Ok(())
}

fn deblur_signal(
    response: &Signal1D,
    kernel: &Signal1D,
    args: &DeblurArgs,
    manifest: &Manifest,
) -> Result<Signal1D, CliError> {
    let terms = response_terms(response, kernel)?;
    let mut opts = StepOptions::new(terms);
    opts.normalize = args.normalize;

    match args.method {
        MethodArg::Step => {
            let (est, trace) = match step_by_step(response, kernel, &opts) {
                Ok(pair) => pair,
                Err(CoreError::Divergent(trace)) => {
                    // The divergence curve is the interesting artifact here;
                    // keep it even though the command fails.
                    dump_trace(args, manifest, &trace)?;
                    return Err(CliError::Numeric(CoreError::Divergent(trace)));
                }
                Err(e) => return Err(e.into()),
            };
            dump_trace(args, manifest, &trace)?;
            if trace.diverged {
                return Err(CliError::Numeric(CoreError::Divergent(Box::new(trace))));
            }
            Ok(est)
        }
        MethodArg::Modified => {
            let (est, trace, steps_used, flipped) = if let Some((l, coeff)) = as_boxcar(kernel) {
                // Differencing collapses the boxcar to c * (d_0 - d_l).
                let diffed = axpy(response, -1.0, &response.shift(1));
                let mut two_term = vec![0.0; l + 1];
                two_term[0] = coeff;
                two_term[l] = -coeff;
                let reduced =
                    Signal1D::new(kernel.offset(), two_term).expect("two-term kernel is valid");
                let n = args.steps.unwrap_or_else(|| doubling_steps(terms, l));
                let (est, trace) = modified_doubling(&diffed, &reduced, n, &opts)?;
                (est, trace, 1 + n, false)
            } else {
                let (resp, kern, flipped) = flip_to_dominant(response, kernel)?;
                let l = kern.len() - 1;
                let n = args.steps.unwrap_or_else(|| doubling_steps(terms, l));
                let (est, trace) = modified_doubling(&resp, &kern, n, &opts)?;
                (est, trace, n, flipped)
            };
            dump_trace(args, manifest, &trace)?;
            if trace.diverged {
                return Err(CliError::Numeric(CoreError::Divergent(Box::new(trace))));
            }
            println!("steps_used={steps_used}");
            if flipped {
                println!("flipped=true");
            }
            Ok(if flipped { est.reverse() } else { est })
        }
        MethodArg::Combined => {
            let half_width = args.half_width.unwrap_or(terms + 1);
            let (est, comb) = combined_deconvolve(response, kernel, half_width, args.center)?;
            if let Some(path) = &args.combination {
                write_combination(path, &comb)?;
                manifest.write_for(path)?;
            }
            println!("L={} C={}", comb.half_width(), comb.center());
            Ok(est)
        }
    }
}

fn deblur_image(
    img: &ImageRaster,
    kernel: &Signal1D,
    kernel_y: Option<&Path>,
    args: &DeblurArgs,
) -> Result<ImageRaster, CliError> {
    let method = match args.method {
        MethodArg::Step => DeblurMethod::Step,
        MethodArg::Modified => DeblurMethod::Modified,
        MethodArg::Combined => DeblurMethod::Combined,
    };
    let opts = DeblurOptions {
        half_width: args.half_width,
        center: args.center,
        steps: args.steps,
        normalize: args.normalize,
        ..DeblurOptions::default()
    };

    if let Some(ky_path) = kernel_y {
        if args.axis.is_some() {
            return Err(CliError::Usage(
                "--kernel-y already fixes the axes: kernel runs along x".into(),
            ));
        }
        let ky = read_signal(ky_path)?;
        let pair = SeparableKernel2D {
            sx: kernel.clone(),
            sy: ky,
        };
        let order = match args.order {
            Some(OrderArg::Yx) => DeblurOrder::YThenX,
            _ => DeblurOrder::XThenY,
        };
        return Ok(deblur_separable(img, &pair, order, method, &opts)?);
    }

    let axis = axis_of(args.axis);
    if method == DeblurMethod::Modified {
        if let Some((l, coeff)) = as_boxcar(kernel) {
            if args.steps.is_some() {
                return Err(CliError::Usage(
                    "--steps is derived from the image extent for boxcar motion deblurring".into(),
                ));
            }
            let (out, steps_used) = motion_deblur_scaled(img, l, coeff, axis)?;
            println!("steps_used={steps_used}");
            return Ok(out);
        }
    }
    Ok(deblur_axis(img, kernel, axis, method, &opts)?)
}

fn synth(shape: &SynthShape) -> Result<(), CliError> {
    let mut manifest = Manifest::for_current_command();
    let (kernel, output) = match shape {
        SynthShape::Gaussian {
            sigma,
            radius,
            output,
        } => {
            if !(sigma.is_finite() && *sigma > 0.0) {
                return Err(CliError::Usage(format!("sigma {sigma} must be positive")));
            }
            if *radius < 1 || (*radius as f64) < sigma.ceil() {
                return Err(CliError::Usage(format!(
                    "radius {radius} must be at least ceil(sigma) = {}",
                    sigma.ceil()
                )));
            }
            manifest.add_param("sigma", sigma);
            manifest.add_param("radius", radius);
            (
                shiftdeconv_core::image::make_gaussian_kernel(*sigma, *radius),
                output,
            )
        }
        SynthShape::Boxcar { len, output } => {
            if *len < 1 {
                return Err(CliError::Usage("boxcar length must be at least 1".into()));
            }
            manifest.add_param("len", len);
            (
                Signal1D::new(0, vec![1.0; *len]).expect("boxcar is valid"),
                output,
            )
        }
        SynthShape::Custom { values, output } => {
            let parsed: Result<Vec<f64>, _> =
                values.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let coeffs =
                parsed.map_err(|_| CliError::Usage(format!("cannot parse values `{values}`")))?;
            manifest.add_param("values", values);
            let kernel = Signal1D::new(0, coeffs)
                .map_err(|e| CliError::Usage(format!("invalid kernel: {e}")))?;
            (kernel, output)
        }
    };
    write_signal(output, &kernel)?;
    manifest.write_for(output)
}

fn noise(level: f64, seed: u64, input: &Path, output: &Path) -> Result<(), CliError> {
    let spec = NoiseSpec::new(level, seed)?;
    let mut manifest = Manifest::for_current_command();
    manifest.add_input(input)?;
    manifest.set_seed(seed);
    manifest.add_param("level", level);

    match read_data(input)? {
        Data::Signal(s) => write_data(output, &Data::Signal(add_noise(&s, &spec)), &manifest),
        Data::Image(img) => {
            let out = add_image_noise(&img, &spec);
            write_data(output, &Data::Image(out), &manifest)
        }
    }
}

fn parse_window(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("window `{text}` must be `lo:hi`"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn compare(
    a_path: &Path,
    b_path: &Path,
    window: Option<&str>,
    metric: MetricArg,
) -> Result<(), CliError> {
    let window = window.map(parse_window).transpose()?;
    let value = match (read_data(a_path)?, read_data(b_path)?) {
        (Data::Signal(a), Data::Signal(b)) => signal_metric(&a, &b, window, metric)?,
        (Data::Image(a), Data::Image(b)) => {
            if window.is_some() {
                return Err(CliError::Usage(
                    "--window applies to signal comparisons only".into(),
                ));
            }
            image_metric(&a, &b, metric)?
        }
        _ => {
            return Err(CliError::Format {
                name: "MixedKinds",
                detail: "cannot compare a signal with an image".into(),
            })
        }
    };
    println!("{value}");
    Ok(())
}

fn signal_metric(
    a: &Signal1D,
    b: &Signal1D,
    window: Option<(i64, i64)>,
    metric: MetricArg,
) -> Result<f64, CliError> {
    let maxabs = max_abs_error(a, b, window)?;
    Ok(match metric {
        MetricArg::Maxabs => maxabs,
        MetricArg::Rms => {
            let (lo, hi) = window.unwrap_or((
                a.offset().min(b.offset()),
                a.last_index().max(b.last_index()),
            ));
            let mut sum = 0.0;
            for i in lo..=hi {
                let d = a.get(i) - b.get(i);
                sum += d * d;
            }
            (sum / (hi - lo + 1) as f64).sqrt()
        }
        MetricArg::Rel => relative(maxabs, a.values()),
    })
}

fn image_metric(a: &ImageRaster, b: &ImageRaster, metric: MetricArg) -> Result<f64, CliError> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(CliError::Format {
            name: "ImageFormat",
            detail: format!(
                "dimension mismatch: {}x{}x{} vs {}x{}x{}",
                a.width(),
                a.height(),
                a.channels(),
                b.width(),
                b.height(),
                b.channels()
            ),
        });
    }
    let diffs = a.samples().iter().zip(b.samples());
    Ok(match metric {
        MetricArg::Maxabs => diffs.fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
        MetricArg::Rms => {
            let sum: f64 = diffs.map(|(x, y)| (x - y) * (x - y)).sum();
            (sum / a.samples().len() as f64).sqrt()
        }
        MetricArg::Rel => {
            let maxabs = a
                .samples()
                .iter()
                .zip(b.samples())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            relative(maxabs, a.samples())
        }
    })
}

/// maxabs scaled by the dynamic range of the reference data.
fn relative(maxabs: f64, reference: &[f64]) -> f64 {
    if maxabs == 0.0 {
        return 0.0;
    }
    let (lo, hi) = reference
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    maxabs / (hi - lo)
}
