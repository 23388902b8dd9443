//! End-to-end acceptance checks. Each test writes one PASS/FAIL line to
//! stderr (bypassing output capture) before asserting.

use std::io::Write as _;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use semdenoise::acf::AcfCurve;
use semdenoise::bayes_opt::tune::{gpr_presets, gpr_space, gpr_spec_from_config, reference_svm_spec};
use semdenoise::bayes_opt::{
    bayes_optimize, cross_validated_rmse, expected_improvement, tune_optimizable_gpr, BoOptions, Dimension, ParamValue,
    SearchSpace,
};
use semdenoise::filters::{wiener_nv, FilterConfig, FilterKind};
use semdenoise::image::{make_synthetic, GrayImage, SyntheticKind};
use semdenoise::pipeline::{
    benchmark_filters, benchmark_snr, generate_dataset, make_corpus, noisy_instance, run_aogprllsr, train_pipeline,
    BenchOptions, CorpusConfig, DatasetOptions, FixedNv, MseTable, PipelineConfig, PipelineModel, SnrTable,
    TrainOptions, TrainingReport,
};
use semdenoise::regression::{gpr_fit, regression_metrics, svr_fit, KernelSpec, Standardizer, SvrParams};
use semdenoise::snr::{lsr_line, snr_lsr, snr_nllsr};
use semdenoise::stats::quality::psnr_from_mse;
use semdenoise::stats::{cosine_similarity, ssim};
use semdenoise::{LagWindow, SnrMethod, SplitMix64};

const SNR_LEVELS: &str = include_str!("fixtures/snr_levels.csv");
const FILTER_MSE_LEVELS: &str = include_str!("fixtures/filter_mse_levels.csv");

struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what);
        }
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{name}: got {got}, want {want} +/- {tol}"));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, name: &str, elapsed: Duration, limit: Duration) {
        self.note(format!("{name} {:.2}s", elapsed.as_secs_f64()));
        self.check(elapsed < limit, format!("{name} took {elapsed:?}, limit {limit:?}"));
    }

    fn finish(self, id: u32, title: &str) {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("acceptance {id:>2} {status} {title}");
        if !self.notes.is_empty() {
            line.push_str(&format!(" [{}]", self.notes.join("; ")));
        }
        for f in &self.failures {
            line.push_str(&format!("\n    {f}"));
        }
        line.push('\n');
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(self.failures.is_empty(), "{}", self.failures.join("\n"));
    }
}

fn sig2(v: f64) -> f64 {
    let mag = 10f64.powf(v.abs().log10().floor() - 1.0);
    (v / mag).round() * mag
}

#[test]
fn a01_filter_mse_t_test() {
    let mut c = Checks::new();
    let t0 = Instant::now();
    let r = MseTable::from_csv(FILTER_MSE_LEVELS).unwrap().t_test().unwrap();
    c.within("runtime", t0.elapsed(), Duration::from_secs(1));
    c.close("mean post", r.mean_x, 0.001615294, 1e-9);
    c.close("mean pre", r.mean_y, 0.005285, 1e-6);
    c.close("pearson", r.pearson, 0.997196, 1e-4);
    c.close("t", r.t_stat, -5.38176, 1e-4);
    c.close("p one-tail", r.p_one_tail, 2.21735e-4, 1e-8);
    c.close("t crit one-tail", r.t_crit_one, 1.833113, 1e-5);
    c.note(format!("t {:.6} p {:.6e}", r.t_stat, r.p_one_tail));
    c.finish(1, "paired t-test on reference filter MSE levels");
}

#[test]
fn a02_snr_error_t_tests() {
    let mut c = Checks::new();
    let t0 = Instant::now();
    let table = SnrTable::from_csv(SNR_LEVELS).unwrap();
    let tests = table.error_tests().unwrap();
    c.within("runtime", t0.elapsed(), Duration::from_secs(1));
    let nn = tests.iter().find(|t| t.method == SnrMethod::Nn).unwrap();
    c.close("mean LSR error", nn.report.mean_x, 0.48398, 1e-4);
    c.close("mean NN error", nn.report.mean_y, 7.749397, 1e-4);
    c.close("var LSR error", nn.report.var_x, 0.231596, 1e-4);
    c.close("var NN error", nn.report.var_y, 12.20013, 1e-4);
    let want = [
        (SnrMethod::Nn, -7.58308, 1.69e-5),
        (SnrMethod::Fol, -2.12214, 0.031409),
        (SnrMethod::NnFol, -7.0405, 3.02e-5),
        (SnrMethod::Nllsr, -8.14822, 9.55e-6),
    ];
    for (m, t, p) in want {
        let r = &tests.iter().find(|x| x.method == m).unwrap().report;
        c.close(&format!("t LSR vs {}", m.label()), r.t_stat, t, 1e-3);
        let (got, exp) = (sig2(r.p_one_tail), sig2(p));
        c.check(
            (got - exp).abs() <= 1e-9 * exp,
            format!(
                "p LSR vs {}: got {:e}, want {p:e} to 2 significant digits",
                m.label(),
                r.p_one_tail
            ),
        );
    }
    c.finish(2, "LSR absolute-error t-tests on reference SNR levels");
}

#[test]
fn a03_rmse_mse_consistency() {
    let mut c = Checks::new();
    let rmse = 0.006177919;
    let y: Vec<f64> = (0..40).map(|i| 0.001 + 0.00025 * i as f64).collect();
    let pred: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { v + rmse } else { v - rmse })
        .collect();
    let m = regression_metrics(&y, &pred).unwrap();
    c.close("rmse", m.rmse, rmse, 1e-15);
    c.check(
        (m.rmse * m.rmse - m.mse).abs() <= 1e-15 * m.mse,
        format!("rmse^2 {} != mse {}", m.rmse * m.rmse, m.mse),
    );
    c.close("mse", m.mse, 3.8167e-5, 5e-10);
    c.check(
        format!("{:.2e}", m.mse) == "3.82e-5",
        format!("mse prints as {:.2e}", m.mse),
    );

    let mut rng = SplitMix64::new(3);
    for _ in 0..100 {
        let y: Vec<f64> = (0..25).map(|_| rng.next_f64()).collect();
        let p: Vec<f64> = y.iter().map(|v| v + 0.01 * rng.next_normal()).collect();
        let m = regression_metrics(&y, &p).unwrap();
        c.check((m.rmse * m.rmse - m.mse).abs() <= 1e-14 * m.mse, "random rmse^2 != mse");
        c.check(m.mae <= m.rmse + 1e-15, "mae > rmse");
    }
    c.note(format!("mse {:.5e}", m.mse));
    c.finish(3, "rmse^2 = mse at the reference tuned-GPR scale");
}

#[test]
fn a04_snr_estimator_suite() {
    let mut c = Checks::new();
    let t0 = Instant::now();
    let cfg = PipelineConfig::default();
    let imgs = make_corpus(&cfg.corpus, cfg.seed).unwrap();
    c.check(imgs.len() == 20, "corpus size");
    let table = benchmark_snr(&imgs, &cfg.nv_grid, 5, &BenchOptions::default()).unwrap();
    c.within("runtime", t0.elapsed(), Duration::from_secs(120));

    let lsr = table.mean_abs_error(SnrMethod::Lsr);
    let nn = table.mean_abs_error(SnrMethod::Nn);
    let nn_fol = table.mean_abs_error(SnrMethod::NnFol);
    c.note(format!("mean |error| dB: LSR {lsr:.3} NN {nn:.3} NN+FOL {nn_fol:.3}"));
    c.check(lsr < nn, format!("LSR error {lsr} not below NN {nn}"));
    c.check(lsr < nn_fol, format!("LSR error {lsr} not below NN+FOL {nn_fol}"));
    for m in semdenoise::pipeline::bench::SNR_COLUMNS {
        let col = table.column(m);
        let ok = col.iter().all(|v| v.is_finite()) && col.windows(2).all(|w| w[1] <= w[0]);
        c.check(ok, format!("{} not non-increasing in NV: {col:?}", m.label()));
    }
    let actual = table.actual();
    c.check(
        actual.windows(2).all(|w| w[1] <= w[0]),
        format!("actual SNR not non-increasing: {actual:?}"),
    );

    let (a, b) = (0.83, 0.0125);
    let mut vals = vec![0.9];
    vals.extend((1..=16).map(|k| a - b * k as f64));
    let acf = AcfCurve::from_values(vals, 0.5).unwrap();
    let (alpha, slope) = lsr_line(&acf, LagWindow::default());
    c.close("exact-line intercept", alpha, a, 1e-12);
    c.close("exact-line slope", slope, -b, 1e-12);
    let est = snr_lsr(&acf, LagWindow::default()).unwrap();
    c.close("exact-line peak", est.peak_estimate, a + (0.9 - (a - b)) / 2.0, 1e-12);

    let (cc, gamma) = (0.7, -0.15);
    let mut vals = vec![0.75];
    vals.extend((1..=16).map(|k| cc * ((k + 1) as f64).powf(gamma)));
    let acf = AcfCurve::from_values(vals, 0.5).unwrap();
    let est = snr_nllsr(&acf, LagWindow::default()).unwrap();
    c.close("power-law peak", est.peak_estimate, cc, 1e-9);
    c.finish(4, "SNR estimators on the synthetic corpus");
}

#[test]
fn a05_gpr_correctness() {
    let mut c = Checks::new();
    let se = KernelSpec::SquaredExponential {
        sigma_f: 1.0,
        length: 1.0,
    };
    let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 * 0.9 - 4.0]).collect();
    let y: Vec<f64> = x.iter().map(|r| (r[0] * 0.8).sin() + 0.1 * r[0]).collect();
    let m = gpr_fit(&x, &y, &se, 0.0).unwrap();
    let max_err = x
        .iter()
        .zip(&y)
        .map(|(r, t)| (m.predict_mean(r).unwrap() - t).abs())
        .fold(0.0, f64::max);
    c.note(format!("interpolation error {max_err:.2e}"));
    c.check(max_err < 1e-8, format!("noiseless interpolation error {max_err}"));

    let one = gpr_fit(&[vec![0.0]], &[1.0], &se, 0.0).unwrap();
    let (mean, var) = one.predict(&[1.0]).unwrap();
    c.close("one-point mean", mean, (-0.5f64).exp(), 1e-6);
    c.close("one-point variance", var, 1.0 - (-1.0f64).exp(), 1e-6);
    c.close("one-point mean (printed)", mean, 0.606531, 1e-6);
    c.close("one-point variance (printed)", var, 0.632121, 1e-6);

    let mut rng = SplitMix64::new(11);
    let x2: Vec<Vec<f64>> = (0..30)
        .map(|_| vec![rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)])
        .collect();
    let y2: Vec<f64> = x2.iter().map(|r| r[0] * r[1] + 0.05 * rng.next_normal()).collect();
    let kernels = [
        KernelSpec::Matern52 {
            sigma_f: 1.3,
            length: 0.7,
        },
        KernelSpec::ArdMatern32 {
            sigma_f: 0.8,
            lengths: vec![0.5, 2.0],
        },
    ];
    for k in &kernels {
        let m = gpr_fit(&x2, &y2, k, 0.05).unwrap();
        for _ in 0..500 {
            let q = vec![rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)];
            let (_, v) = m.predict(&q).unwrap();
            let kqq = k.eval(&q, &q);
            c.check(
                v >= 0.0 && v <= kqq + 1e-10,
                format!("{} variance {v} outside [0, {kqq}]", k.name()),
            );
        }
    }
    c.finish(5, "GPR interpolation, closed-form posterior, variance bounds");
}

#[test]
fn a06_bayesian_optimization() {
    let mut c = Checks::new();
    let mut rng = SplitMix64::new(6);
    let mut mc = SplitMix64::new(60);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mu = rng.uniform(-1.0, 1.0);
        let sigma = rng.uniform(0.05, 1.0);
        let best = rng.uniform(-1.0, 1.0);
        // antithetic pairs: 10^6 normal draws, each used as z and -z
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let z = mc.next_normal();
            sum += (best - (mu + sigma * z)).max(0.0) + (best - (mu - sigma * z)).max(0.0);
        }
        let est = sum / (2 * n) as f64;
        let ei = expected_improvement(mu, sigma, best);
        worst = worst.max((est - ei).abs());
    }
    c.note(format!("EI vs Monte Carlo max |diff| {worst:.2e}"));
    c.check(worst < 1e-3, format!("EI differs from Monte Carlo by {worst}"));

    let space = SearchSpace::new(vec![Dimension::linear("x", -3.0, 5.0)]).unwrap();
    let res = bayes_optimize(
        |cfg| match cfg[0] {
            ParamValue::Real(x) => (x - 1.3).powi(2),
            _ => f64::INFINITY,
        },
        &space,
        &BoOptions::new(30, 0),
    )
    .unwrap();
    let x = space.real(&res.best, "x").unwrap();
    c.note(format!("quadratic argmin {x:.4} after {} evaluations", res.trace.len()));
    c.check(res.trace.len() <= 30, "more than 30 evaluations");
    c.check(
        (x - 1.3).abs() <= 0.05,
        format!("quadratic argmin {x}, want 1.3 +/- 0.05"),
    );

    let imgs = make_corpus(
        &CorpusConfig {
            images: 6,
            side: 64,
            ..CorpusConfig::default()
        },
        2,
    )
    .unwrap();
    let grid = semdenoise::pipeline::config::default_nv_grid();
    let data = generate_dataset(&imgs, &grid, 2, &DatasetOptions::default()).unwrap();
    let (xs, ys) = data.xy();
    let tuned = tune_optimizable_gpr(&xs, &ys, 30, 0).unwrap();
    let stds = Standardizer::fit(&xs).stds;
    let space = gpr_space();
    for (name, cfg) in gpr_presets(&xs, &ys) {
        let spec = gpr_spec_from_config(&space, &cfg, &stds);
        let preset = cross_validated_rmse(&xs, &ys, &spec, 5, 0).unwrap();
        c.check(
            tuned.cv_rmse <= preset,
            format!("tuned CV-RMSE {} above preset {name} {preset}", tuned.cv_rmse),
        );
    }
    c.note(format!("tuned GPR CV-RMSE {:.4e} on {} rows", tuned.cv_rmse, xs.len()));
    c.finish(6, "expected improvement, quadratic search, tuned GPR vs presets");
}

#[test]
fn a07_svr() {
    let mut c = Checks::new();
    let mut rng = SplitMix64::new(7);
    let x: Vec<Vec<f64>> = (0..60)
        .map(|_| vec![rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)])
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|r| (2.0 * r[0]).sin() * r[1] + 0.05 * rng.next_normal())
        .collect();
    for (kernel, cap) in [
        (KernelSpec::GaussianRbf { sigma: 0.6 }, 0.5),
        (
            KernelSpec::Polynomial {
                degree: 3,
                bias: 1.0,
                scale: 1.0,
            },
            2.0,
        ),
    ] {
        let m = svr_fit(&x, &y, &kernel, SvrParams::new(cap, 0.02)).unwrap();
        let beta = m.dual_coefficients();
        c.check(m.converged(), format!("{} did not converge", kernel.name()));
        c.check(
            beta.iter().all(|b| b.abs() <= cap * (1.0 + 1e-12)),
            format!("{} box constraint violated", kernel.name()),
        );
        let sum: f64 = beta.iter().sum();
        c.check(
            sum.abs() <= 1e-8 * cap * x.len() as f64,
            format!("{} equality constraint residual {sum}", kernel.name()),
        );
    }

    let xl: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 29.0, (i % 7) as f64 / 6.0]).collect();
    let yl: Vec<f64> = xl.iter().map(|r| 1.5 * r[0] - 0.7 * r[1] + 0.2).collect();
    let eps = 1e-3;
    let lin = KernelSpec::Polynomial {
        degree: 1,
        bias: 0.0,
        scale: 1.0,
    };
    let m = svr_fit(&xl, &yl, &lin, SvrParams::new(1e3, eps)).unwrap();
    let pred: Vec<f64> = xl.iter().map(|r| m.predict(r).unwrap()).collect();
    let worst = pred.iter().zip(&yl).map(|(p, t)| (p - t).abs()).fold(0.0, f64::max);
    let r2 = regression_metrics(&yl, &pred).unwrap().r_squared;
    c.note(format!("linear fit max residual {worst:.2e}, R^2 {r2:.6}"));
    c.check(worst <= eps + 1e-6, format!("linear residual {worst}"));
    c.check(r2 > 0.999, format!("linear R^2 {r2}"));

    let xr: Vec<Vec<f64>> = (0..50).map(|i| vec![10.0 + 0.4 * i as f64]).collect();
    let yr: Vec<f64> = xr.iter().map(|r| 0.02 * (-r[0] / 9.0).exp()).collect();
    match reference_svm_spec().fit(&xr, &yr) {
        Ok(m) => c.check(
            m.predict(&[15.0]).map(f64::is_finite).unwrap_or(false),
            "reference SVM prediction",
        ),
        Err(e) => c.check(false, format!("reference SVM failed: {e}")),
    }
    c.finish(7, "SVR dual feasibility, exact linear fit, reference parameters");
}

struct Trained {
    config: PipelineConfig,
    model: PipelineModel,
    report: TrainingReport,
    corpus: Vec<GrayImage>,
    seconds: f64,
}

fn trained() -> &'static Trained {
    static CELL: OnceLock<Trained> = OnceLock::new();
    CELL.get_or_init(|| {
        let t0 = Instant::now();
        let config = PipelineConfig::default();
        let corpus = make_corpus(&config.corpus, config.seed).unwrap();
        let opts = DatasetOptions {
            features: config.features,
            max_lag: config.max_lag,
            lag_window: config.lag_window().unwrap(),
            seed: config.seed,
        };
        let data = generate_dataset(&corpus, &config.nv_grid, config.seeds_per_level, &opts).unwrap();
        let (model, report) = train_pipeline(
            &data,
            &TrainOptions {
                budget: config.tuning_budget,
                seed: config.seed,
                max_lag: config.max_lag,
                lag_window: opts.lag_window,
            },
        )
        .unwrap();
        Trained {
            config,
            model,
            report,
            corpus,
            seconds: t0.elapsed().as_secs_f64(),
        }
    })
}

fn true_nv_wiener_mse(corpus: &[GrayImage], nv: f64, level: usize, opts: &BenchOptions) -> f64 {
    let mut sum = 0.0;
    for (i, clean) in corpus.iter().enumerate() {
        for rep in 0..5 {
            let noisy = noisy_instance(clean, nv, opts.seed, i, level, rep).unwrap();
            let out = wiener_nv(&noisy, &FilterConfig::new(opts.window, nv)).unwrap();
            sum += semdenoise::stats::mse(&out, clean).unwrap();
        }
    }
    sum / (corpus.len() * 5) as f64
}

#[test]
fn a08_filter_efficacy() {
    let mut c = Checks::new();
    let t = trained();
    c.note(format!("training {:.1}s", t.seconds));
    // a fresh corpus, disjoint from the training images
    let corpus = make_corpus(&t.config.corpus, t.config.seed + 1).unwrap();
    let opts = BenchOptions {
        seed: t.config.seed + 1,
        ..BenchOptions::default()
    };
    let t0 = Instant::now();
    let table = benchmark_filters(&corpus, &t.config.nv_grid, 5, &t.model, &opts).unwrap();
    c.within("runtime", t0.elapsed(), Duration::from_secs(300));
    for l in &table.levels {
        c.check(l.post < l.pre, format!("NV {}: post {} >= pre {}", l.nv, l.post, l.pre));
    }
    let r = table.mse_table().t_test().unwrap();
    c.note(format!("t {:.3} p {:.3e}", r.t_stat, r.p_one_tail));
    c.check(
        r.t_stat < 0.0 && r.p_one_tail < 0.05,
        format!("t {} p {}", r.t_stat, r.p_one_tail),
    );
    for (level, l) in table.levels.iter().enumerate().filter(|(_, l)| l.nv >= 0.004 - 1e-12) {
        for (name, v) in [
            ("average", l.average),
            ("median", l.median),
            ("gaussian", l.gaussian),
            ("fixed-NV wiener", l.wiener_fixed),
        ] {
            if l.post > v {
                c.check(
                    false,
                    format!(
                        "NV {}: NV-guided {:.6e} > {name} {v:.6e} (true-NV wiener {:.6e}, mean estimate {:.5})",
                        l.nv,
                        l.post,
                        true_nv_wiener_mse(&corpus, l.nv, level, &opts),
                        l.estimated_nv
                    ),
                );
            }
        }
    }
    c.finish(8, "NV-guided Wiener filtering efficacy");
}

#[test]
fn a09_pipeline_accuracy() {
    let mut c = Checks::new();
    let t = trained();
    let (mut hits, mut total) = (0usize, 0usize);
    let mut oracle_ok = true;
    for &img in &t.report.test_images {
        let clean = &t.corpus[img];
        for (level, &nv) in t.config.nv_grid.iter().enumerate() {
            for rep in 0..t.config.seeds_per_level {
                let noisy = noisy_instance(clean, nv, t.config.seed, img, level, rep).unwrap();
                let (_, r) = run_aogprllsr(&noisy, &t.model, t.config.window, t.config.boundary).unwrap();
                total += 1;
                if ((r.estimated_nv - nv) / nv).abs() <= 0.3 {
                    hits += 1;
                }
                let (out, _) = run_aogprllsr(&noisy, &FixedNv(nv), t.config.window, t.config.boundary).unwrap();
                let direct = wiener_nv(&noisy, &t.config.filter_config(nv)).unwrap();
                oracle_ok &= out
                    .pixels()
                    .iter()
                    .zip(direct.pixels())
                    .all(|(a, b)| a.to_bits() == b.to_bits());
            }
        }
    }
    let frac = hits as f64 / total as f64;
    c.note(format!(
        "{hits}/{total} held-out noisy images within 30% ({:.1}%), images {:?}",
        100.0 * frac,
        t.report.test_images
    ));
    c.check(frac >= 0.8, format!("only {:.1}% within 30%", 100.0 * frac));
    c.check(oracle_ok, "oracle composition differs from direct Wiener filtering");
    c.finish(9, "trained pipeline NV accuracy and oracle identity");
}

#[test]
#[allow(clippy::approx_constant)]
fn a10_metric_sanity() {
    let mut c = Checks::new();
    let a = make_synthetic(SyntheticKind::BandlimitedNoise, 64, 64, 10).unwrap();
    c.check(ssim(&a, &a).unwrap() == 1.0, "ssim(a, a) != 1");
    c.close("psnr(mse 0.01)", psnr_from_mse(0.01, 1.0), 20.0, 1e-12);
    let x = [0.3, -1.2, 4.0];
    c.close("cosine x,x", cosine_similarity(&x, &x).unwrap(), 1.0, 1e-15);
    c.close(
        "cosine orthogonal",
        cosine_similarity(&[1.0, 0.0], &[0.0, 2.0]).unwrap(),
        0.0,
        1e-15,
    );
    c.close(
        "cosine [1,1],[1,0]",
        cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap(),
        0.70711,
        1e-5,
    );
    c.check(
        cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).is_err(),
        "zero-norm cosine accepted",
    );

    let noisy = semdenoise::add_awgn(&a, &semdenoise::NoiseSpec::new(0.02, 3).unwrap());
    let flat = GrayImage::filled(64, 64, 0.37).unwrap();
    let kinds = [
        FilterKind::Average,
        FilterKind::Median,
        FilterKind::Gaussian,
        FilterKind::Wiener,
        FilterKind::WienerFreq,
    ];
    for kind in kinds {
        for window in [3, 5] {
            let cfg = FilterConfig::new(window, 0.02);
            let out = kind.apply(&noisy, &cfg).unwrap();
            c.check(
                out.pixels().iter().all(|v| (0.0..=1.0).contains(v)),
                format!("{kind:?} leaves [0, 1]"),
            );
            let f = kind.apply(&flat, &cfg).unwrap();
            let dev = f.pixels().iter().map(|v| (v - 0.37).abs()).fold(0.0, f64::max);
            c.check(dev <= 1e-12, format!("{kind:?} moves a constant image by {dev}"));
        }
    }
    c.finish(10, "quality metrics and filter range sanity");
}

#[test]
fn trained_model_generalizes() {
    let t = trained();
    let score = |name: &str| t.report.scores.iter().find(|s| s.name == name).unwrap().test;
    let (gpr, linear) = (score("Optimizable GPR"), score("Linear SVM"));
    let clean = make_synthetic(SyntheticKind::BandlimitedNoise, 128, 128, 99).unwrap();
    let (out, r) = run_aogprllsr(&clean, &t.model, t.config.window, t.config.boundary).unwrap();
    let damage = semdenoise::stats::mse(&out, &clean).unwrap();
    let _ = writeln!(
        std::io::stderr(),
        "tuned GPR test R^2 {:.4} RMSE {:.4e}; linear SVM RMSE {:.4e}; noise-free input NV {:.3e} filter MSE {:.3e}",
        gpr.r_squared,
        gpr.rmse,
        linear.rmse,
        r.estimated_nv,
        damage
    );
    assert!(gpr.r_squared > 0.9, "R^2 {}", gpr.r_squared);
    assert!(
        gpr.rmse <= linear.rmse,
        "GPR {} vs linear SVM {}",
        gpr.rmse,
        linear.rmse
    );
    assert!(
        r.estimated_nv < 1e-3,
        "noise-free input estimated at {}",
        r.estimated_nv
    );
    assert!(damage <= 1e-4, "filtering a noise-free image costs MSE {damage}");
}
