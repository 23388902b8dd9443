use std::time::Instant;

use thiserror::Error;

use super::acquisition::{
    ei_per_second, expected_improvement, lcb_acquisition, plus_exploration_check, probability_of_improvement, sigma_q,
    Acquisition,
};
use super::space::{Config, SearchSpace, SpaceError};
use crate::regression::{gpr_fit, KernelSpec, TrainedGpr};
use crate::rng::SplitMix64;

const LENGTH_GRID: [f64; 5] = [0.1, 0.2, 0.4, 0.8, 1.6];
const NOISE_GRID: [f64; 4] = [1e-3, 1e-2, 1e-1, 0.3];
/// Length-scale multiplier applied when a proposal over-exploits.
const PLUS_INFLATION: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum BoError {
    #[error("evaluation budget must be at least 1")]
    ZeroBudget,
    #[error("candidate pool must be non-empty")]
    NoCandidates,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("every objective evaluation failed")]
    AllFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoOptions {
    pub budget: usize,
    pub initial_design: usize,
    pub candidates: usize,
    pub acquisition: Acquisition,
    /// PI margin, objective units.
    pub margin: f64,
    pub t_sigma: f64,
    pub plus: bool,
    pub seed: u64,
    /// Evaluated first, before the space-filling design.
    pub warm_start: Vec<Config>,
}

impl BoOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            initial_design: 5,
            candidates: 2048,
            acquisition: Acquisition::ExpectedImprovement,
            margin: 0.0,
            t_sigma: 0.5,
            plus: true,
            seed,
            warm_start: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub iteration: usize,
    pub config: Config,
    /// `+inf` for a failed evaluation.
    pub objective: f64,
    pub incumbent: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoResult {
    pub best: Config,
    pub best_value: f64,
    pub best_iteration: usize,
    pub trace: Vec<Evaluation>,
}

impl BoResult {
    /// `iter,config_json,objective,incumbent`
    pub fn trace_csv(&self, space: &SearchSpace) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iter", "config_json", "objective", "incumbent"])
            .expect("in-memory write");
        for e in &self.trace {
            w.write_record([
                e.iteration.to_string(),
                space.to_json(&e.config).to_string(),
                e.objective.to_string(),
                e.incumbent.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

struct Surrogate {
    gp: TrainedGpr,
    noise: f64,
}

fn fit_surrogate(x: &[Vec<f64>], z: &[f64]) -> Option<Surrogate> {
    let dim = x[0].len();
    let mut best: Option<(f64, Surrogate)> = None;
    for &l in &LENGTH_GRID {
        for &noise in &NOISE_GRID {
            let kernel = KernelSpec::ArdMatern32 {
                sigma_f: 1.0,
                lengths: vec![l; dim],
            };
            let Ok(gp) = gpr_fit(x, z, &kernel, noise) else {
                continue;
            };
            let lml = gp.log_marginal_likelihood();
            if lml.is_finite() && best.as_ref().is_none_or(|(b, _)| lml > *b) {
                best = Some((lml, Surrogate { gp, noise }));
            }
        }
    }
    best.map(|(_, s)| s)
}

fn standardize(v: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    (v.iter().map(|a| (a - m) / sd).collect(), m, sd)
}

struct Scorer<'a> {
    surrogate: &'a Surrogate,
    timing: Option<&'a (TrainedGpr, f64, f64)>,
    acquisition: Acquisition,
    best_z: f64,
    margin_z: f64,
}

impl Scorer<'_> {
    /// Acquisition value and the model-term std at `x`.
    fn score(&self, x: &[f64]) -> (f64, f64) {
        let (mu, var) = self.surrogate.gp.predict(x).expect("encoded dimension is fixed");
        let sigma_f = var.max(0.0).sqrt();
        let s = sigma_q(sigma_f, self.surrogate.noise);
        let a = match self.acquisition {
            Acquisition::ExpectedImprovement => expected_improvement(mu, s, self.best_z),
            Acquisition::ProbabilityOfImprovement => probability_of_improvement(mu, s, self.best_z, self.margin_z),
            Acquisition::LowerConfidenceBound => lcb_acquisition(mu, s),
            Acquisition::ExpectedImprovementPerSecond => {
                let ei = expected_improvement(mu, s, self.best_z);
                let secs = match self.timing {
                    Some((gp, m, sd)) => (gp.predict_mean(x).expect("encoded dimension is fixed") * sd + m).exp(),
                    None => 1.0,
                };
                ei_per_second(ei, secs)
            }
        };
        (a, sigma_f)
    }
}

/// Minimizes `objective` over `space`. Non-finite objective values count as
/// failures: they are traced as `+inf` and left out of the surrogate.
pub fn bayes_optimize<F>(mut objective: F, space: &SearchSpace, opts: &BoOptions) -> Result<BoResult, BoError>
where
    F: FnMut(&Config) -> f64,
{
    if opts.budget == 0 {
        return Err(BoError::ZeroBudget);
    }
    if opts.candidates == 0 {
        return Err(BoError::NoCandidates);
    }
    for c in &opts.warm_start {
        space.check(c)?;
    }
    let mut rng = SplitMix64::stream(opts.seed, 0x626f);
    let n0 = opts.initial_design.max(opts.warm_start.len()).min(opts.budget);
    let mut queue: Vec<Config> = opts.warm_start.iter().take(n0).cloned().collect();
    if queue.len() < n0 {
        queue.extend(space.latin_hypercube(n0 - queue.len(), &mut rng));
    }

    let mut trace: Vec<Evaluation> = Vec::with_capacity(opts.budget);
    let mut encoded: Vec<Vec<f64>> = Vec::with_capacity(opts.budget);
    let mut best = (f64::INFINITY, usize::MAX);

    let mut run = |config: Config, trace: &mut Vec<Evaluation>, best: &mut (f64, usize)| {
        let t0 = Instant::now();
        let v = objective(&config);
        let seconds = t0.elapsed().as_secs_f64();
        let v = if v.is_finite() { v } else { f64::INFINITY };
        let iteration = trace.len();
        if v < best.0 {
            *best = (v, iteration);
        }
        trace.push(Evaluation {
            iteration,
            config,
            objective: v,
            incumbent: best.0,
            seconds,
        });
    };

    for c in queue {
        encoded.push(space.encode(&c));
        run(c, &mut trace, &mut best);
    }

    while trace.len() < opts.budget {
        let ok: Vec<usize> = (0..trace.len()).filter(|&i| trace[i].objective.is_finite()).collect();
        let next = if ok.len() < 2 {
            space.sample(&mut rng)
        } else {
            propose(space, opts, &trace, &encoded, &ok, best.1, &mut rng)
        };
        encoded.push(space.encode(&next));
        run(next, &mut trace, &mut best);
    }

    if best.1 == usize::MAX {
        return Err(BoError::AllFailed);
    }
    Ok(BoResult {
        best: trace[best.1].config.clone(),
        best_value: best.0,
        best_iteration: best.1,
        trace,
    })
}

fn propose(
    space: &SearchSpace,
    opts: &BoOptions,
    trace: &[Evaluation],
    encoded: &[Vec<f64>],
    ok: &[usize],
    best_idx: usize,
    rng: &mut SplitMix64,
) -> Config {
    let x: Vec<Vec<f64>> = ok.iter().map(|&i| encoded[i].clone()).collect();
    let (z, _, sd) = standardize(&ok.iter().map(|&i| trace[i].objective).collect::<Vec<_>>());
    let Some(surrogate) = fit_surrogate(&x, &z) else {
        return space.sample(rng);
    };
    let timing = (opts.acquisition == Acquisition::ExpectedImprovementPerSecond)
        .then(|| {
            let logs: Vec<f64> = ok.iter().map(|&i| trace[i].seconds.max(1e-9).ln()).collect();
            let (lz, lm, lsd) = standardize(&logs);
            let k = KernelSpec::ArdMatern32 {
                sigma_f: 1.0,
                lengths: vec![0.4; x[0].len()],
            };
            gpr_fit(&x, &lz, &k, 0.1).ok().map(|gp| (gp, lm, lsd))
        })
        .flatten();

    let n_local = opts.candidates / 8;
    let incumbent = &trace[best_idx].config;
    let pool: Vec<Config> = (0..opts.candidates)
        .map(|i| {
            if i < n_local {
                space.perturb(incumbent, 0.05, rng)
            } else {
                space.sample(rng)
            }
        })
        .collect();
    let pool_enc: Vec<Vec<f64>> = pool.iter().map(|c| space.encode(c)).collect();

    let mut scorer = Scorer {
        surrogate: &surrogate,
        timing: timing.as_ref(),
        acquisition: opts.acquisition,
        best_z: z.iter().copied().fold(f64::INFINITY, f64::min),
        margin_z: opts.margin / sd,
    };
    let pick = |scorer: &Scorer| -> Option<(usize, f64)> {
        let mut top: Option<(usize, f64, f64)> = None;
        for (i, e) in pool_enc.iter().enumerate() {
            if encoded.contains(e) {
                continue;
            }
            let (a, sf) = scorer.score(e);
            if a.is_finite() && top.is_none_or(|(_, b, _)| a > b) {
                top = Some((i, a, sf));
            }
        }
        top.map(|(i, _, sf)| (i, sf))
    };
    let Some((mut choice, sigma_f)) = pick(&scorer) else {
        return space.sample(rng);
    };
    if opts.plus && plus_exploration_check(sigma_f, surrogate.noise, opts.t_sigma) {
        let kernel = surrogate.gp.kernel().with_scaled_lengths(PLUS_INFLATION);
        if let Ok(gp) = gpr_fit(&x, &z, &kernel, surrogate.noise) {
            let inflated = Surrogate {
                gp,
                noise: surrogate.noise,
            };
            scorer.surrogate = &inflated;
            if let Some((c, _)) = pick(&scorer) {
                choice = c;
            }
        }
    }
    pool[choice].clone()
}
