//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantity next to its pinned tolerance.
//!
//! Run with `cargo test -p shiftdeconv-core --test acceptance -- --nocapture`
//! to see the per-criterion report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftdeconv_core::combined::combined_deconvolve;
use shiftdeconv_core::image::{
    blur_axis, deblur_separable, make_gaussian_kernel, motion_deblur_uniform, Axis, DeblurMethod,
    DeblurOptions, DeblurOrder, ImageRaster, SeparableKernel2D,
};
use shiftdeconv_core::oracle::{convolve_2d_naive, dense_deconvolve, DenseKernel2D};
use shiftdeconv_core::signal::{add_noise, convolve, max_abs_error, NoiseSpec, Signal1D};
use shiftdeconv_core::step::{estimate_m_max, modified_doubling, step_by_step, StepOptions};
use shiftdeconv_core::Error;

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance criterion {criterion:2} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn signal(offset: i64, values: Vec<f64>) -> Signal1D {
    Signal1D::new(offset, values).unwrap()
}

fn random_signal(seed: u64, len: usize) -> Signal1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    signal(0, (0..len).map(|_| rng.random_range(0.001..1.0)).collect())
}

fn random_image(seed: u64, w: usize, h: usize, c: usize) -> ImageRaster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..w * h * c).map(|_| rng.random_range(0.0..1.0)).collect();
    ImageRaster::new(w, h, c, samples).unwrap()
}

fn max_image_diff(a: &ImageRaster, b: &ImageRaster) -> f64 {
    a.samples()
        .iter()
        .zip(b.samples())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn image_range(img: &ImageRaster) -> f64 {
    let (lo, hi) = img
        .samples()
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Criterion 1: step-by-step exactness on a leading-dominant kernel,
/// 20 coefficients within 1e-9, under a second.
#[test]
fn criterion_01_step_exactness() {
    let start = Instant::now();
    let kernel = signal(0, vec![1.0, 0.55, 0.31, 0.18, 0.1, 0.05]);
    let h = random_signal(101, 20);
    let response = convolve(&h, &kernel);
    let (est, trace) = step_by_step(&response, &kernel, &StepOptions::new(20)).unwrap();
    let err = max_abs_error(&est, &h, Some((0, 19))).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "step-by-step exactness",
        !trace.diverged && err <= 1e-9 && elapsed < 1.0,
        &format!("max err {err:.3e} <= 1e-9, runtime {elapsed:.3}s < 1s"),
    );
}

/// Criterion 2: divergence horizons for s0 in {0.1, 0.05, 0.01} calibrate
/// the horizon formula and reproduce the 26 : 19.98 : 13 scaling pattern.
#[test]
fn criterion_02_divergence_horizon() {
    const TARGET: usize = 60;
    const SEEDS: u64 = 5;
    const SPACING: u32 = 3; // the dominant coefficient sits 3 taps in

    // Last index of the contiguous accurate prefix (error < 1e-6).
    fn horizon(s0: f64, seed: u64) -> f64 {
        let kernel = signal(0, vec![s0, 0.3 * s0, 0.5 * s0, 1.0, 0.3, 0.1]);
        let h = random_signal(200 + seed, TARGET);
        let response = convolve(&h, &kernel);
        let mut opts = StepOptions::new(TARGET);
        opts.divergence_factor = 1e300;
        let (est, _) = step_by_step(&response, &kernel, &opts).unwrap();
        let mut last = -1i64;
        for i in 0..TARGET as i64 {
            if (est.get(i) - h.get(i)).abs() < 1e-6 {
                last = i;
            } else {
                break;
            }
        }
        last as f64
    }

    let mean =
        |s0: f64| -> f64 { (0..SEEDS).map(|seed| horizon(s0, seed)).sum::<f64>() / SEEDS as f64 };
    let (h10, h20, h100) = (mean(0.1), mean(0.05), mean(0.01));

    // Calibrate l*ln(N_max) on the s0 = 0.1 run, predict the others.
    let ln_n_max = h10 * 10.0f64.ln() / SPACING as f64;
    let pred20 = estimate_m_max(20.0, SPACING, ln_n_max);
    let pred100 = estimate_m_max(100.0, SPACING, ln_n_max);
    let within2 = (pred20 - h20).abs() <= 2.0 && (pred100 - h100).abs() <= 2.0;

    let (r2, r3) = (h20 / h10, h100 / h10);
    let pattern =
        (r2 / (19.98 / 26.0) - 1.0).abs() <= 0.10 && (r3 / (13.0 / 26.0) - 1.0).abs() <= 0.10;

    report(
        2,
        "divergence horizon",
        within2 && pattern,
        &format!(
            "horizons {h10:.1}/{h20:.1}/{h100:.1}, predictions {pred20:.1}/{pred100:.1} within ±2, \
             ratios 1:{r2:.3}:{r3:.3} vs 1:0.768:0.500 within 10%"
        ),
    );
}

/// Criterion 3: boxcar-20 uniform-motion deblur of a 100-pixel-wide color
/// image takes exactly 4 combination steps and matches within 1e-9.
#[test]
fn criterion_03_doubling_step_count() {
    let img = random_image(303, 100, 24, 3);
    let boxcar = signal(0, vec![1.0 / 20.0; 20]);
    let blurred = blur_axis(&img, &boxcar, Axis::X);
    let (restored, steps) = motion_deblur_uniform(&blurred, 20, Axis::X).unwrap();
    let err = max_image_diff(&restored, &img);
    report(
        3,
        "doubling step count",
        steps == 4 && err <= 1e-9,
        &format!("steps_used {steps} == 4, max err {err:.3e} <= 1e-9"),
    );
}

/// Criterion 4: left-shift coefficient decay for a = 0.99 follows the
/// squared-power law exactly.
#[test]
fn criterion_04_left_shift_decay() {
    let kernel = signal(0, vec![1.0, 0.99]);
    let h = random_signal(404, 8);
    let response = convolve(&h, &kernel);
    let (_, trace) = modified_doubling(&response, &kernel, 10, &StepOptions::new(8)).unwrap();
    let after9 = trace.steps[8].a_n;
    let after10 = trace.steps[9].a_n;
    let want9 = 0.99f64.powi(512);
    let want10 = 0.99f64.powi(1024);
    let ok9 = (after9 - want9).abs() <= 1e-12 * want9;
    let ok10 = (after10 - want10).abs() <= 1e-12 * want10;
    report(
        4,
        "left-shift coefficient decay",
        ok9 && ok10 && (0.0055..0.0062).contains(&after9) && after10 < 4e-5,
        &format!("after 9 steps {after9:.6e} = 0.99^512, after 10 steps {after10:.6e} = 0.99^1024"),
    );
}

/// Criterion 5: combined shifts with s0 = 0.01 and 0.001 (interior max),
/// h of 10 terms, L = 11.
#[test]
fn criterion_05_combined_small_s0() {
    let h = random_signal(505, 10);
    let mut details = Vec::new();
    let mut pass = true;
    for (s0, tol) in [(0.01, 1e-9), (0.001, 1e-6)] {
        let kernel = signal(0, vec![s0, 0.4, 1.0, 0.5, 0.2, 0.05]);
        let response = convolve(&h, &kernel);
        let (est, _) = combined_deconvolve(&response, &kernel, 11, None).unwrap();
        let err = max_abs_error(&est, &h, None).unwrap();
        pass &= err <= tol;
        details.push(format!("s0={s0}: err {err:.3e} <= {tol:.0e}"));
    }
    report(5, "combined small s0", pass, &details.join(", "));
}

/// Criterion 6: the Gaussian kernel is easy for the combined method and
/// fatal for step-by-step.
#[test]
fn criterion_06_gaussian_kernel() {
    let kernel = make_gaussian_kernel(2.0, 6);
    let h = random_signal(606, 12);
    let response = convolve(&h, &kernel);

    let (est, _) = combined_deconvolve(&response, &kernel, 13, None).unwrap();
    let err = max_abs_error(&est, &h, None).unwrap();

    let step_diverged = match step_by_step(&response, &kernel, &StepOptions::new(12)) {
        Ok((_, trace)) => trace.diverged,
        Err(Error::Divergent(_)) => true,
        Err(other) => panic!("unexpected step error {other:?}"),
    };

    report(
        6,
        "gaussian kernel",
        err <= 1e-9 && step_diverged,
        &format!("combined err {err:.3e} <= 1e-9, step-by-step diverged = {step_diverged}"),
    );
}

/// Criterion 7: with 1% noise the combined error stays within 3x the noise
/// level while step-by-step diverges, across 20 seeds.
#[test]
fn criterion_07_noise_behavior() {
    let kernel = signal(0, vec![0.1, 0.03, 0.05, 1.0, 0.3, 0.1]);
    let h = random_signal(707, 20);
    let response = convolve(&h, &kernel);
    let sigma = 0.01 * response.max_abs();

    let mut total_err = 0.0;
    let mut all_diverged = true;
    for seed in 0..20u64 {
        let noisy = add_noise(&response, &NoiseSpec::new(0.01, seed).unwrap());
        let (est, _) = combined_deconvolve(&noisy, &kernel, 21, None).unwrap();
        total_err += max_abs_error(&est, &h, None).unwrap();
        let diverged = match step_by_step(&noisy, &kernel, &StepOptions::new(20)) {
            Ok((_, trace)) => trace.diverged,
            Err(Error::Divergent(_)) => true,
            Err(other) => panic!("unexpected step error {other:?}"),
        };
        all_diverged &= diverged;
    }
    let mean_err = total_err / 20.0;
    report(
        7,
        "noise behavior",
        mean_err <= 3.0 * sigma && all_diverged,
        &format!(
            "mean combined err {mean_err:.4e} <= 3*sigma {:.4e}, step diverged on all 20 seeds = {all_diverged}",
            3.0 * sigma
        ),
    );
}

/// Criterion 8: separable Gaussian restoration of a 64x48 color image, both
/// axis orders.
#[test]
fn criterion_08_separable_2d() {
    let img = random_image(808, 64, 48, 3);
    let kernel = SeparableKernel2D {
        sx: make_gaussian_kernel(2.0, 6),
        sy: make_gaussian_kernel(3.0, 9),
    };
    let blurred = blur_axis(&blur_axis(&img, &kernel.sx, Axis::X), &kernel.sy, Axis::Y);
    let opts = DeblurOptions::default();
    let xy = deblur_separable(
        &blurred,
        &kernel,
        DeblurOrder::XThenY,
        DeblurMethod::Combined,
        &opts,
    )
    .unwrap();
    let yx = deblur_separable(
        &blurred,
        &kernel,
        DeblurOrder::YThenX,
        DeblurMethod::Combined,
        &opts,
    )
    .unwrap();
    let range = image_range(&img);
    let err = max_image_diff(&xy, &img) / range;
    let path_diff = max_image_diff(&xy, &yx) / range;
    report(
        8,
        "2D separable restoration",
        err <= 0.015 && path_diff <= 2e-6,
        &format!("restoration err {err:.3e} <= 1.5e-2 of range, XY-vs-YX {path_diff:.3e} <= 2e-6"),
    );
}

/// Criterion 9: the fast paths agree with the dense oracle on random
/// instances, and axis blurs agree with definitional 2D convolution.
#[test]
fn criterion_09_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut checked = 0usize;
    let mut worst_1d = 0.0f64;
    let mut attempts = 0usize;
    while checked < 100 {
        attempts += 1;
        assert!(attempts < 1000, "too many singular instances");
        let k_len = rng.random_range(1..=8);
        let m_len = rng.random_range(1..=6);
        let kernel = signal(0, (0..k_len).map(|_| rng.random_range(0.01..1.0)).collect());
        let h = signal(0, (0..m_len).map(|_| rng.random_range(0.01..1.0)).collect());
        let response = convolve(&h, &kernel);
        let (fast, _) = match combined_deconvolve(&response, &kernel, m_len + 1, None) {
            Ok(pair) => pair,
            Err(Error::SingularShiftMatrix) => continue,
            Err(other) => panic!("unexpected error {other:?}"),
        };
        let slow = dense_deconvolve(&response, &kernel, m_len).unwrap();
        worst_1d = worst_1d.max(max_abs_error(&fast, &slow, None).unwrap());
        checked += 1;
    }

    let mut worst_2d = 0.0f64;
    for seed in 0..20u64 {
        let img = random_image(910 + seed, 8, 8, 1);
        let sx = signal(0, vec![1.0, 0.5, 0.2]);
        let sy = signal(0, vec![0.4, 1.0, 0.3]);
        let by_axes = blur_axis(&blur_axis(&img, &sx, Axis::X), &sy, Axis::Y);
        let by_oracle = convolve_2d_naive(&img, &DenseKernel2D::separable(&sx, &sy));
        worst_2d = worst_2d.max(max_image_diff(&by_axes, &by_oracle));
    }

    report(
        9,
        "oracle equivalence",
        worst_1d <= 1e-8 && worst_2d <= 1e-10,
        &format!(
            "100 combined-vs-dense instances worst {worst_1d:.3e} <= 1e-8, \
             20 blur-vs-naive images worst {worst_2d:.3e} <= 1e-10"
        ),
    );
}

/// Criterion 10: 200 randomized blur -> deblur round trips across the three
/// methods in their valid regimes, all within 1e-9, well under a minute.
/// (The per-module invariants additionally run as property suites in
/// `tests/invariants.rs`.)
#[test]
fn criterion_10_round_trip_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst = 0.0f64;
    let mut cases = 0usize;

    // 70 step-method cases: leading-dominant kernels.
    for _ in 0..70 {
        let k_len = rng.random_range(2..=6);
        let mut kv: Vec<f64> = (0..k_len).map(|_| rng.random_range(0.01..0.9)).collect();
        kv[0] = 1.0;
        let kernel = signal(rng.random_range(-3..3), kv);
        let h = random_signal(rng.random(), rng.random_range(1..=20));
        let response = convolve(&h, &kernel);
        let (est, trace) = step_by_step(&response, &kernel, &StepOptions::new(h.len())).unwrap();
        assert!(!trace.diverged);
        worst = worst.max(max_abs_error(&est, &h, None).unwrap());
        cases += 1;
    }

    // 70 combined-method cases: arbitrary kernels, interior maxima included.
    let mut done = 0;
    while done < 70 {
        let k_len = rng.random_range(1..=8);
        let kernel = signal(
            rng.random_range(-3..3),
            (0..k_len).map(|_| rng.random_range(0.01..1.0)).collect(),
        );
        let h = random_signal(rng.random(), rng.random_range(1..=8));
        let response = convolve(&h, &kernel);
        match combined_deconvolve(&response, &kernel, h.len() + 1, None) {
            Ok((est, _)) => {
                worst = worst.max(max_abs_error(&est, &h, None).unwrap());
                done += 1;
                cases += 1;
            }
            Err(Error::SingularShiftMatrix) => continue,
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    // 60 doubling cases: two-term kernels, flipped when trailing-dominant.
    for _ in 0..60 {
        let l = rng.random_range(1..=3);
        let a: f64 = rng.random_range(-0.9..0.9);
        let a = if a.abs() < 0.05 { 0.5 } else { a };
        let mut kv = vec![0.0; l + 1];
        kv[0] = 1.0;
        kv[l] = a;
        let kernel = signal(rng.random_range(-3..3), kv);
        let h = random_signal(rng.random(), rng.random_range(1..=32));
        let response = convolve(&h, &kernel);
        let mut steps = 0;
        while (1usize << steps) * l < h.len() {
            steps += 1;
        }
        let (est, trace) =
            modified_doubling(&response, &kernel, steps, &StepOptions::new(h.len())).unwrap();
        assert!(!trace.diverged);
        worst = worst.max(max_abs_error(&est, &h, None).unwrap());
        cases += 1;
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        10,
        "round-trip property suite",
        cases == 200 && worst <= 1e-9 && elapsed < 60.0,
        &format!("{cases} round trips, worst err {worst:.3e} <= 1e-9, runtime {elapsed:.2}s < 60s"),
    );
}
