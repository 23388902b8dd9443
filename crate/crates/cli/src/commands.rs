use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use semdenoise::acf::compute_acf;
use semdenoise::filters::FilterConfig;
use semdenoise::image::{add_awgn, make_synthetic, GrayImage, NoiseSpec};
use semdenoise::pgm::{load_pgm, save_pgm};
use semdenoise::pipeline::bench::{render_error_tests, SNR_COLUMNS};
use semdenoise::pipeline::{
    benchmark_filters, benchmark_snr, generate_dataset, make_corpus, run_aogprllsr, train_pipeline, BenchOptions,
    Dataset, DatasetOptions, FixedNv, MseTable, NoiseVariancePredictor, PipelineConfig, PipelineModel, SnrTable,
    TrainOptions,
};
use semdenoise::snr::{actual_snr, estimate, noise_variance_from_acf};
use semdenoise::stats::ttest::render_t_table;
use semdenoise::stats::{cosine_similarity, mse, paired_t_test, psnr, ssim, TTestReport};
use semdenoise::tabular::{read_column, split_column_ref, NumericTable};
use semdenoise::{LagWindow, SnrMethod};

use crate::args::{
    BenchCommand, Cli, Command, DatasetCommand, FilterArgs, NoiseCommand, RunArgs, SnrArgs, SynthArgs, TrainArgs,
    TtestArgs,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values: exit code 1.
    Usage(String),
    /// Unreadable or unusable input data: exit code 2.
    Data(String),
}

fn data(e: impl Display) -> CliError {
    CliError::Data(e.to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type Result<T> = std::result::Result<T, CliError>;

struct Ctx {
    out_dir: PathBuf,
    config: PipelineConfig,
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.config.seed
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.prepare(name)?;
        fs::write(&path, contents).map_err(|e| data(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn prepare(&self, name: &str) -> Result<PathBuf> {
        let path = self.path(name);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
        }
        Ok(path)
    }

    fn write_json(&self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(data)?;
        text.push('\n');
        self.write(name, text)
    }

    fn save_image(&self, name: &str, img: &GrayImage, bits: u32) -> Result<()> {
        let path = self.prepare(name)?;
        save_pgm(img, &path, maxval(bits)?).map_err(data)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn lag_window(&self, flag: Option<[usize; 2]>) -> Result<LagWindow> {
        let [a, b] = flag.unwrap_or(self.config.lag_window);
        LagWindow::new(a, b).map_err(|e| usage(format!("--lag-window: {e}")))
    }

    fn bench_options(&self) -> Result<BenchOptions> {
        let c = &self.config;
        Ok(BenchOptions {
            seed: c.seed,
            max_lag: c.max_lag,
            lag_window: self.lag_window(None)?,
            window: c.window,
            boundary: c.boundary,
            fixed_nv: c.fixed_wiener_nv,
        })
    }

    fn corpus(&self) -> Result<Vec<GrayImage>> {
        make_corpus(&self.config.corpus, self.seed()).map_err(data)
    }
}

fn maxval(bits: u32) -> Result<u32> {
    match bits {
        8 => Ok(255),
        16 => Ok(65535),
        other => Err(usage(format!("--bits must be 8 or 16, got {other}"))),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn load_image(path: &Path) -> Result<GrayImage> {
    load_pgm(path).map_err(data)
}

fn check_window(window: usize) -> Result<usize> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(usage(format!("--window must be odd and at least 3, got {window}")));
    }
    Ok(window)
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            PipelineConfig::from_json(&read_text(path)?).map_err(|e| data(format!("{}: {e}", path.display())))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

pub fn execute(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        config: load_config(&cli)?,
        out_dir: cli.out_dir,
    };
    match cli.command {
        Command::Acf { image, max_lag } => cmd_acf(&ctx, &image, max_lag),
        Command::Snr(a) => cmd_snr(&ctx, a),
        Command::Noise(NoiseCommand::Add {
            image,
            nv,
            output,
            bits,
        }) => cmd_noise_add(&ctx, &image, nv, &output, bits),
        Command::Filter(a) => cmd_filter(&ctx, a),
        Command::Dataset(DatasetCommand::Gen {
            images,
            side,
            seeds_per_level,
            features,
            output,
        }) => {
            let mut ctx = ctx;
            let c = &mut ctx.config;
            c.corpus.images = images.unwrap_or(c.corpus.images);
            c.corpus.side = side.unwrap_or(c.corpus.side);
            c.seeds_per_level = seeds_per_level.unwrap_or(c.seeds_per_level);
            c.features = features.unwrap_or(c.features);
            c.validate().map_err(|e| usage(e.to_string()))?;
            cmd_dataset_gen(&ctx, &output)
        }
        Command::Train(a) => cmd_train(&ctx, a),
        Command::Run(a) => cmd_run(&ctx, a),
        Command::Bench(BenchCommand::Snr { table }) => cmd_bench_snr(&ctx, table.as_deref()),
        Command::Bench(BenchCommand::Filters { model, fixed_nv, table }) => {
            cmd_bench_filters(&ctx, model.as_deref(), fixed_nv, table.as_deref())
        }
        Command::Ttest(a) => cmd_ttest(&ctx, a),
        Command::Quality { a, b } => cmd_quality(&ctx, &a, &b),
        Command::Synth(a) => cmd_synth(&ctx, a),
    }
}

fn cmd_acf(ctx: &Ctx, image: &Path, max_lag: Option<usize>) -> Result<()> {
    let img = load_image(image)?;
    let acf = compute_acf(&img, max_lag.unwrap_or(ctx.config.max_lag)).map_err(data)?;
    ctx.write("acf.csv", acf.to_csv())?;
    println!(
        "{}x{} image, mean {:.6}, h(0) {:.6}, h(1) {:.6}, mean^2 {:.6}, lags 0..={}",
        img.width(),
        img.height(),
        acf.mean(),
        acf.h0(),
        acf.h(1),
        acf.mean_sq(),
        acf.max_lag()
    );
    Ok(())
}

fn cmd_snr(ctx: &Ctx, a: SnrArgs) -> Result<()> {
    let methods: Vec<SnrMethod> = if a.method.eq_ignore_ascii_case("all") {
        SNR_COLUMNS.to_vec()
    } else {
        vec![a.method.parse().map_err(|e: String| usage(format!("--method: {e}")))?]
    };
    let window = ctx.lag_window(a.lag_window)?;
    let img = load_image(&a.image)?;
    let acf = compute_acf(&img, a.max_lag.unwrap_or(ctx.config.max_lag)).map_err(data)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for m in &methods {
        match estimate(&acf, *m, window) {
            Ok(e) => {
                println!(
                    "{:<7} snr_db {:>10.4}  snr {:.6}  peak {:.8}",
                    m.label(),
                    e.snr_db,
                    e.snr_linear,
                    e.peak_estimate
                );
                rows.push(json!({
                    "method": m,
                    "snr_db": e.snr_db,
                    "snr_linear": e.snr_linear,
                    "peak_estimate": e.peak_estimate,
                    "acf_noise_variance": noise_variance_from_acf(&acf, e.peak_estimate, img.len()),
                }));
            }
            Err(e) => {
                println!("{:<7} unavailable: {e}", m.label());
                rows.push(json!({ "method": m, "error": e.to_string() }));
                failures.push(e.to_string());
            }
        }
    }
    let actual = match &a.clean {
        Some(p) => {
            let clean = load_image(p)?;
            let s = actual_snr(&clean, &img).map_err(data)?;
            println!(
                "actual  snr_db {:>10.4}  noise variance {:.6e}",
                s.snr_db, s.noise_variance
            );
            serde_json::to_value(s).map_err(data)?
        }
        None => Value::Null,
    };
    ctx.write_json(
        "snr.json",
        &json!({
            "width": img.width(),
            "height": img.height(),
            "mean": acf.mean(),
            "h0": acf.h0(),
            "lag_window": [window.first(), window.last()],
            "estimates": rows,
            "actual": actual,
        }),
    )?;
    if methods.len() == 1 && !failures.is_empty() {
        return Err(data(failures.remove(0)));
    }
    Ok(())
}

fn cmd_noise_add(ctx: &Ctx, image: &Path, nv: f64, output: &str, bits: u32) -> Result<()> {
    maxval(bits)?;
    let spec = NoiseSpec::new(nv, ctx.seed()).map_err(|e| usage(format!("--nv: {e}")))?;
    let img = load_image(image)?;
    let noisy = add_awgn(&img, &spec);
    ctx.save_image(output, &noisy, bits)?;
    println!(
        "added noise variance {nv} with seed {}; MSE against the input {:.6e}",
        ctx.seed(),
        mse(&img, &noisy).map_err(data)?
    );
    Ok(())
}

fn cmd_filter(ctx: &Ctx, a: FilterArgs) -> Result<()> {
    maxval(a.bits)?;
    if !(a.nv >= 0.0 && a.nv.is_finite()) {
        return Err(usage(format!("--nv must be a non-negative number, got {}", a.nv)));
    }
    let cfg = FilterConfig {
        window: check_window(a.window.unwrap_or(ctx.config.window))?,
        noise_variance: a.nv,
        boundary: a.boundary.unwrap_or(ctx.config.boundary),
    };
    let img = load_image(&a.image)?;
    let out = a.filter.apply(&img, &cfg).map_err(data)?;
    ctx.save_image(&a.output, &out, a.bits)?;
    println!(
        "{:?} filter, window {}, nv {}, {:?} boundary",
        a.filter, cfg.window, cfg.noise_variance, cfg.boundary
    );
    if let Some(r) = &a.reference {
        let clean = load_image(r)?;
        let pre = quality_of(&clean, &img)?;
        let post = quality_of(&clean, &out)?;
        println!(
            "MSE pre {:.6e} post {:.6e}",
            pre["mse"].as_f64().unwrap_or(f64::NAN),
            post["mse"].as_f64().unwrap_or(f64::NAN)
        );
        ctx.write_json("quality.json", &json!({ "pre": pre, "post": post }))?;
    }
    Ok(())
}

fn quality_of(reference: &GrayImage, img: &GrayImage) -> Result<Value> {
    Ok(json!({
        "mse": mse(reference, img).map_err(data)?,
        "psnr_db": psnr(reference, img, 1.0).map_err(data)?,
        "ssim": ssim(reference, img).ok(),
        "cosine": cosine_similarity(reference.pixels(), img.pixels()).ok(),
    }))
}

fn cmd_dataset_gen(ctx: &Ctx, output: &str) -> Result<()> {
    let c = &ctx.config;
    let corpus = ctx.corpus()?;
    let opts = DatasetOptions {
        features: c.features,
        max_lag: c.max_lag,
        lag_window: ctx.lag_window(None)?,
        seed: c.seed,
    };
    let d = generate_dataset(&corpus, &c.nv_grid, c.seeds_per_level, &opts).map_err(data)?;
    ctx.write(output, d.to_csv())?;
    ctx.write_json("dataset_config.json", c)?;
    println!(
        "{} rows from {} images x {} levels x {} seeds, {} skipped, features {}",
        d.len(),
        corpus.len(),
        c.nv_grid.len(),
        c.seeds_per_level,
        d.skipped.len(),
        d.features.names().join(",")
    );
    for s in d.skipped.iter().take(10) {
        println!(
            "  skipped image {} level {} rep {}: {}",
            s.image_id, s.level, s.rep, s.reason
        );
    }
    Ok(())
}

fn cmd_train(ctx: &Ctx, a: TrainArgs) -> Result<()> {
    let budget = a.budget.unwrap_or(ctx.config.tuning_budget);
    if budget == 0 {
        return Err(usage("--budget must be at least 1"));
    }
    let d = Dataset::from_csv(&read_text(&a.dataset)?).map_err(data)?;
    let opts = TrainOptions {
        budget,
        seed: ctx.seed(),
        max_lag: ctx.config.max_lag,
        lag_window: ctx.lag_window(None)?,
    };
    let (model, report) = train_pipeline(&d, &opts).map_err(data)?;
    ctx.write(&a.output, model.to_json())?;
    ctx.write("validation_metrics.csv", report.metrics_csv(false))?;
    ctx.write("test_metrics.csv", report.metrics_csv(true))?;
    ctx.write("gpr_trace.csv", &report.gpr_trace_csv)?;
    ctx.write_json("training_report.json", &report)?;
    println!(
        "{} training rows ({} images), {} test rows ({} images)",
        report.n_train,
        report.train_images.len(),
        report.n_test,
        report.test_images.len()
    );
    println!(
        "{:<24} {:>12} {:>12} {:>10}",
        "model", "val RMSE", "test RMSE", "test R^2"
    );
    for s in &report.scores {
        println!(
            "{:<24} {:>12.6e} {:>12.6e} {:>10.6}",
            s.name, s.validation.rmse, s.test.rmse, s.test.r_squared
        );
    }
    println!("tuned GPR: {}", report.tuned_gpr_config);
    Ok(())
}

fn cmd_run(ctx: &Ctx, a: RunArgs) -> Result<()> {
    maxval(a.bits)?;
    let window = check_window(a.window.unwrap_or(ctx.config.window))?;
    let model = PipelineModel::from_json(&read_text(&a.model)?).map_err(data)?;
    let img = load_image(&a.image)?;
    let (out, report) = run_aogprllsr(&img, &model, window, a.boundary.unwrap_or(ctx.config.boundary)).map_err(data)?;
    ctx.save_image(&a.output, &out, a.bits)?;
    ctx.write_json("report.json", &report)?;
    match report.snr_db {
        Some(db) => println!("LSR snr_db {db:.4}, peak {:.8}", report.peak_estimate),
        None => println!("LSR estimate unavailable"),
    }
    println!("estimated noise variance {:.6e}", report.estimated_nv);
    if let Some(w) = &report.warning {
        println!("warning: {w}");
    }
    Ok(())
}

fn print_t_table(blocks: &[(&str, &str, &TTestReport)]) {
    print!("{}", render_t_table(blocks));
}

fn cmd_bench_snr(ctx: &Ctx, table: Option<&Path>) -> Result<()> {
    let t = match table {
        Some(p) => SnrTable::from_table(&NumericTable::load(p).map_err(data)?).map_err(data)?,
        None => {
            let corpus = ctx.corpus()?;
            let c = &ctx.config;
            let t = benchmark_snr(&corpus, &c.nv_grid, c.seeds_per_level, &ctx.bench_options()?).map_err(data)?;
            ctx.write("snr_table.csv", t.to_csv())?;
            t
        }
    };
    for m in SNR_COLUMNS {
        println!("{:<7} mean |error| {:.6} dB", m.label(), t.mean_abs_error(m));
    }
    let tests = t.error_tests().map_err(data)?;
    if tests.is_empty() {
        println!("fewer than two noise levels; t-tests skipped");
        return Ok(());
    }
    let text = render_error_tests(&tests);
    print!("{text}");
    ctx.write("snr_ttests.txt", &text)?;
    ctx.write_json("snr_ttests.json", &tests)
}

fn cmd_bench_filters(ctx: &Ctx, model: Option<&Path>, fixed_nv: Option<f64>, table: Option<&Path>) -> Result<()> {
    let mse_table = match table {
        Some(p) => MseTable::from_table(&NumericTable::load(p).map_err(data)?).map_err(data)?,
        None => {
            let predictor: Box<dyn NoiseVariancePredictor + Sync> = match (model, fixed_nv) {
                (Some(p), _) => Box::new(PipelineModel::from_json(&read_text(p)?).map_err(data)?),
                (None, Some(v)) if v >= 0.0 && v.is_finite() => Box::new(FixedNv(v)),
                (None, Some(v)) => return Err(usage(format!("--fixed-nv must be non-negative, got {v}"))),
                (None, None) => return Err(usage("one of --model, --fixed-nv or --table is required")),
            };
            let corpus = ctx.corpus()?;
            let c = &ctx.config;
            let t = benchmark_filters(
                &corpus,
                &c.nv_grid,
                c.seeds_per_level,
                predictor.as_ref(),
                &ctx.bench_options()?,
            )
            .map_err(data)?;
            ctx.write("filter_mse.csv", t.mse_csv())?;
            ctx.write("filter_comparison.csv", t.comparison_csv())?;
            println!(
                "{:>7} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                "nv", "pre", "nv-guided", "average", "median", "gaussian", "gauss 1px", "fixed wiener"
            );
            for l in &t.levels {
                println!(
                    "{:>7} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
                    l.nv, l.pre, l.post, l.average, l.median, l.gaussian, l.gaussian_unit, l.wiener_fixed
                );
            }
            t.mse_table()
        }
    };
    let r = mse_table.t_test().map_err(data)?;
    print_t_table(&[("MSE (post-filter)", "MSE (pre-filter)", &r)]);
    ctx.write(
        "filter_ttest.txt",
        render_t_table(&[("MSE (post-filter)", "MSE (pre-filter)", &r)]),
    )?;
    ctx.write_json("filter_ttest.json", &r)
}

fn column_label(spec: &str) -> String {
    let (path, col) = split_column_ref(spec);
    col.map(str::to_string).unwrap_or_else(|| {
        Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.to_string())
    })
}

fn cmd_ttest(ctx: &Ctx, a: TtestArgs) -> Result<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let x = read_column(&a.x).map_err(data)?;
    let y = read_column(&a.y).map_err(data)?;
    let r = paired_t_test(&x, &y, a.alpha).map_err(data)?;
    let (xl, yl) = (column_label(&a.x), column_label(&a.y));
    let text = render_t_table(&[(&xl, &yl, &r)]);
    print!("{text}");
    println!("{}", r.hypothesis_summary(&xl, &yl).trim_end());
    ctx.write("ttest.txt", &text)?;
    ctx.write_json("ttest.json", &r)
}

fn cmd_quality(ctx: &Ctx, a: &Path, b: &Path) -> Result<()> {
    let (ia, ib) = (load_image(a)?, load_image(b)?);
    let q = quality_of(&ia, &ib)?;
    println!(
        "MSE {:.6e}  PSNR {} dB  SSIM {}  cosine {}",
        q["mse"].as_f64().unwrap_or(f64::NAN),
        q["psnr_db"].as_f64().map_or("inf".to_string(), |v| format!("{v:.4}")),
        q["ssim"].as_f64().map_or("n/a".to_string(), |v| format!("{v:.6}")),
        q["cosine"].as_f64().map_or("n/a".to_string(), |v| format!("{v:.6}")),
    );
    ctx.write_json("quality.json", &q)
}

fn cmd_synth(ctx: &Ctx, a: SynthArgs) -> Result<()> {
    maxval(a.bits)?;
    let grain = NoiseSpec::new(a.grain, ctx.seed()).map_err(|e| usage(format!("--grain: {e}")))?;
    let img = make_synthetic(a.kind, a.width, a.height, ctx.seed()).map_err(|e| usage(e.to_string()))?;
    let img = add_awgn(&img, &grain.with_stream(1));
    ctx.save_image(&a.output, &img, a.bits)?;
    println!(
        "{:?} {}x{} seed {}, mean {:.4}, variance {:.6}",
        a.kind,
        a.width,
        a.height,
        ctx.seed(),
        img.mean(),
        img.variance()
    );
    Ok(())
}
