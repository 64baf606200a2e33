use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, FSpec};
use super::report::{Cell, ExperimentReport, ReportRow};
use crate::bounds::{
    finite_bound, mean_bound_conditional, mean_bound_unconditional, median_cdf, median_tail_bounds, real_bound,
    MedianLawInputs,
};
use crate::error::{Error, Result};
use crate::estimators::{cdf_estimators, gini_estimators, mean_estimators, variance_estimators, EstimatorInputs};
use crate::measure::{
    cdf_of, empirical_in, l21_functional, AnalyticFamily, AtomicMeasure, Sample, SpaceTag, L21_DEFAULT_TOL,
};
use crate::priors::{draw_iid, ExchangeableModel, TestFn};
use crate::rng::{derive_seed, mix_seed, RngState};
use crate::scalar::compensated_sum;
use crate::transport::{w1_scalar_samples, MetaW1};

/// Number of standard errors in the Monte Carlo slack.
pub const SLACK_SE: f64 = 3.0;

/// Runs the configured experiment. Replicates and grid points run in
/// parallel; rows are assembled by `(N, replicate)` index, so the report
/// does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let rows = match cfg.experiment {
        ExperimentKind::BoundFinite | ExperimentKind::BoundReal => run_cells(cfg, bound_cell)?,
        ExperimentKind::BoundMean => run_cells(cfg, mean_cell)?,
        ExperimentKind::EstimatorSweep => run_cells(cfg, sweep_cell)?,
        ExperimentKind::MedianLaw => run_cells(cfg, median_cell)?,
    };
    Ok(ExperimentReport::new(cfg.clone(), rows))
}

pub fn run_bound_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(cfg, &[ExperimentKind::BoundFinite, ExperimentKind::BoundReal])?;
    run_experiment(cfg)
}

pub fn run_mean_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(cfg, &[ExperimentKind::BoundMean])?;
    run_experiment(cfg)
}

pub fn run_estimator_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(cfg, &[ExperimentKind::EstimatorSweep])?;
    run_experiment(cfg)
}

pub fn run_median_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(cfg, &[ExperimentKind::MedianLaw])?;
    run_experiment(cfg)
}

fn expect_kind(cfg: &ExperimentConfig, kinds: &[ExperimentKind]) -> Result<()> {
    if kinds.contains(&cfg.experiment) {
        Ok(())
    } else {
        Err(Error::Config(format!("{} is not handled here", cfg.experiment.name())))
    }
}

/// Stream 0 of each replicate draws the history; stream `1 + g` drives the
/// cell at grid index `g`.
fn history_seed(cfg: &ExperimentConfig, replicate: usize) -> RngState {
    derive_seed(cfg.master_seed, replicate as u32, 0)
}

fn run_cells<F>(cfg: &ExperimentConfig, cell_fn: F) -> Result<Vec<ReportRow>>
where
    F: Fn(&ExperimentConfig, Cell, &Sample<f64>, &mut RngState) -> Result<Vec<ReportRow>> + Sync,
{
    let histories: Vec<Sample<f64>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| match &cfg.model {
            Some(m) => m.sample_sequence(cfg.n, &mut history_seed(cfg, r)),
            None => Ok(Sample::empty()),
        })
        .collect::<Result<_>>()?;
    let index: Vec<(usize, usize)> = (0..cfg.n_grid.len())
        .flat_map(|g| (0..cfg.replicates).map(move |r| (g, r)))
        .collect();
    let rows = index
        .par_iter()
        .map(|&(g, r)| {
            let seed = mix_seed(cfg.master_seed, r as u32, 1 + g as u32);
            let cell = Cell {
                big_n: cfg.n_grid[g],
                n: cfg.n,
                replicate: r,
                seed,
            };
            cell_fn(cfg, cell, &histories[r], &mut RngState::from_seed_u64(seed))
        })
        .collect::<Result<Vec<Vec<ReportRow>>>>()?;
    Ok(rows.concat())
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn sd(xs: &[f64]) -> f64 {
    let (_, se) = mean_se(xs);
    se * (xs.len() as f64).sqrt()
}

/// Standard deviation of `stat` over `b` resamples that draw `m` row and
/// `m` column indices with replacement.
fn bootstrap_sd<F>(b: usize, m: usize, rng: &mut RngState, stat: F) -> Result<f64>
where
    F: Fn(&[usize], &[usize]) -> Result<f64> + Sync,
{
    let seeds: Vec<u64> = (0..b).map(|_| rng.random()).collect();
    let vals = seeds
        .par_iter()
        .map(|&s| {
            let mut r = RngState::from_seed_u64(s);
            let rows: Vec<usize> = (0..m).map(|_| r.random_range(0..m)).collect();
            let cols: Vec<usize> = (0..m).map(|_| r.random_range(0..m)).collect();
            stat(&rows, &cols)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(sd(&vals))
}

fn bound_cell(cfg: &ExperimentConfig, cell: Cell, history: &Sample<f64>, rng: &mut RngState) -> Result<Vec<ReportRow>> {
    let model = cfg.model()?;
    let ground = cfg.ground()?;
    let space = model.space();
    let m = cfg.m_samples;
    let ps = (0..m)
        .map(|_| model.posterior_draw(history, rng))
        .collect::<Result<Vec<AtomicMeasure<f64>>>>()?;
    let qs = (0..m)
        .map(|_| empirical_in(&model.continue_sequence(history, cell.big_n, rng)?, space))
        .collect::<Result<Vec<AtomicMeasure<f64>>>>()?;
    let meta = MetaW1::solve(&ps, &qs, ground)?;
    let se_meta = bootstrap_sd(cfg.bootstrap, m, rng, |r, c| meta.resample(r, c))?;
    let (bound, se_bound) = match (cfg.experiment, space) {
        (ExperimentKind::BoundFinite, SpaceTag::FiniteAlphabet { k }) => (finite_bound(k, cell.n, cell.big_n)?, 0.0),
        _ => {
            let l21 = ps
                .par_iter()
                .map(|p| l21_functional(&cdf_of(p)?, L21_DEFAULT_TOL))
                .collect::<Result<Vec<f64>>>()?;
            let (mean, se) = mean_se(&l21);
            let scale = 1.0 / ((cell.big_n - cell.n) as f64).sqrt();
            (real_bound(cell.n, cell.big_n, mean)?, scale * se)
        }
    };
    let stderr = se_meta.hypot(se_bound);
    let mut rows = vec![ReportRow::new(
        cfg.experiment.name(),
        cell,
        meta.value,
        Some(stderr),
        bound,
        SLACK_SE * stderr,
    )];
    if cfg.stabilization {
        // m fresh draws per side join the first m; the standard error is
        // scaled from the m-sample bootstrap
        let mut ps2 = ps;
        let mut qs2 = qs;
        for _ in 0..m {
            ps2.push(model.posterior_draw(history, rng)?);
        }
        for _ in 0..m {
            qs2.push(empirical_in(
                &model.continue_sequence(history, cell.big_n, rng)?,
                space,
            )?);
        }
        let doubled = MetaW1::solve(&ps2, &qs2, ground)?;
        let se2 = (se_meta / 2f64.sqrt()).hypot(se_bound);
        rows.push(ReportRow::new(
            format!("{}:2m", cfg.experiment.name()),
            cell,
            doubled.value,
            Some(se2),
            bound,
            SLACK_SE * se2,
        ));
    }
    Ok(rows)
}

fn integral(p: &AtomicMeasure<f64>, f: &TestFn) -> Result<f64> {
    let mut acc = Vec::with_capacity(p.len());
    for (x, w) in p.atoms() {
        acc.push(w * f.eval(&x)?);
    }
    Ok(compensated_sum(acc))
}

fn mc_estimate(
    model: &ExchangeableModel,
    history: &Sample<f64>,
    f: &TestFn,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<crate::priors::Estimate> {
    let mut rng = RngState::from_seed_u64(seed);
    model.predictive_expectation_mc(history, f, cfg.mc_draws, &mut rng)
}

/// `w1` between the laws of `e_N(f)` and `p(f)` given the history. The
/// bound is evaluated for `f - mu_hat` (same `w1`, `mu_hat` the predictive
/// mean), with the absolute sample and posterior means in the conditional
/// form.
fn mean_cell(cfg: &ExperimentConfig, cell: Cell, history: &Sample<f64>, rng: &mut RngState) -> Result<Vec<ReportRow>> {
    let model = cfg.model()?;
    let f = cfg
        .f_spec
        .ok_or_else(|| Error::Config("bound_mean needs f_spec".to_string()))?
        .test_fn();
    let m = cfg.m_samples;
    let mut xs = Vec::with_capacity(m);
    for _ in 0..m {
        let full = model.continue_sequence(history, cell.big_n, rng)?;
        let vals = full.values().iter().map(|p| f.eval(p)).collect::<Result<Vec<f64>>>()?;
        xs.push(compensated_sum(vals) / cell.big_n as f64);
    }
    let ys = (0..m)
        .map(|_| integral(&model.posterior_draw(history, rng)?, &f))
        .collect::<Result<Vec<f64>>>()?;
    let estimate = w1_scalar_samples(&xs, &ys)?;
    let se_w1 = bootstrap_sd(cfg.bootstrap, m, rng, |r, c| {
        let a: Vec<f64> = r.iter().map(|&i| xs[i]).collect();
        let b: Vec<f64> = c.iter().map(|&j| ys[j]).collect();
        w1_scalar_samples(&a, &b)
    })?;

    let square = TestFn::custom({
        let f = f.clone();
        move |x| f.at(x).powi(2)
    });
    let mu_hat = mc_estimate(model, history, &f, cfg, cell.seed ^ 1)?;
    let f2_hat = mc_estimate(model, history, &square, cfg, cell.seed ^ 2)?;
    let pred_var = (f2_hat.value - mu_hat.value.powi(2)).max(0.0);
    let (bound, se_bound) = if cell.n == 0 {
        (mean_bound_unconditional(cell.big_n, pred_var)?, 0.0)
    } else {
        let vals = history
            .values()
            .iter()
            .map(|p| f.eval(p))
            .collect::<Result<Vec<f64>>>()?;
        let sample_mean = (compensated_sum(vals) / cell.n as f64 - mu_hat.value).abs();
        let dev: Vec<f64> = ys.iter().map(|y| (y - mu_hat.value).abs()).collect();
        let (post_abs, se_post) = mean_se(&dev);
        let w = cell.n as f64 / cell.big_n as f64;
        (
            mean_bound_conditional(cell.n, cell.big_n, sample_mean, post_abs, pred_var)?,
            w * se_post,
        )
    };
    let stderr = se_w1.hypot(se_bound);
    Ok(vec![ReportRow::new(
        cfg.experiment.name(),
        cell,
        estimate,
        Some(stderr),
        bound,
        SLACK_SE * stderr,
    )])
}

/// Rows `|finitary - classical|` against the envelopes
/// mean `(n/N)(|mu_bar| + |mu_hat|)`, CDF `n/N`,
/// variance `(n/N)s2_bar + ((n+1)/N)s2_hat + (n/N)^2 c_bar + ((2n+1)/N)|c_hat| + (2n/N)|mu_bar mu_hat|`,
/// Gini `(n/N)^2 Delta_n + ((2n+1)/N) G_hat + (2(N-n)/N^2) sum_j E_j`.
fn sweep_cell(
    cfg: &ExperimentConfig,
    cell: Cell,
    history: &Sample<f64>,
    _rng: &mut RngState,
) -> Result<Vec<ReportRow>> {
    let mut inp = EstimatorInputs::new(cfg.model()?.clone(), history.clone(), cell.big_n)?;
    inp.mc_draws = cfg.mc_draws;
    inp.mc_seed = cell.seed;
    let y = match cfg.f_spec {
        Some(FSpec::Indicator(y)) => y,
        _ => 0.0,
    };
    let (n, big_n) = (cell.n as f64, cell.big_n as f64);
    let r = n / big_n;
    let c = |p: &crate::estimators::EstimatePair, key: &str| p.components.get(key).copied().unwrap_or(0.0);

    let mean = mean_estimators(&inp)?;
    let var = variance_estimators(&inp)?;
    let cdf = cdf_estimators(&inp, y)?;
    let gini = gini_estimators(&inp)?;
    let envelopes = [
        ("mean", &mean, r * (c(&mean, "mu_bar").abs() + c(&mean, "mu_hat").abs())),
        (
            "variance",
            &var,
            r * c(&var, "s2_bar")
                + (n + 1.0) / big_n * c(&var, "s2_hat")
                + r * r * c(&var, "c12_bar")
                + (2.0 * n + 1.0) / big_n * c(&var, "c12_hat").abs()
                + 2.0 * r * (c(&var, "mu_bar") * c(&var, "mu_hat")).abs(),
        ),
        ("cdf", &cdf, r),
        (
            "gini",
            &gini,
            r * r * c(&gini, "Delta_n")
                + (2.0 * n + 1.0) / big_n * c(&gini, "G_hat")
                + 2.0 * (big_n - n) / (big_n * big_n) * c(&gini, "cross_sum"),
        ),
    ];
    Ok(envelopes
        .into_iter()
        .map(|(name, pair, bound)| {
            let estimate = (pair.finitary - pair.classical).abs();
            let stderr = (pair.stderr > 0.0).then_some(pair.stderr);
            let slack = SLACK_SE * pair.stderr + 1e-12 * (1.0 + bound);
            ReportRow::new(format!("estimator_sweep:{name}"), cell, estimate, stderr, bound, slack)
        })
        .collect())
}

fn median_of(xs: &mut [f64]) -> f64 {
    let mid = xs.len() / 2;
    *xs.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// Per replicate, `m` medians of `2N + 1` draws. With a fixed law the
/// empirical `P{M <= x}` is compared with the exact law; with a model each
/// draw uses its own posterior `p`, and the exact side is the average of
/// `I_{F_p(x)}(N+1, N+1)` over the same draws.
fn median_cell(
    cfg: &ExperimentConfig,
    cell: Cell,
    history: &Sample<f64>,
    rng: &mut RngState,
) -> Result<Vec<ReportRow>> {
    let m = cfg.m_samples;
    let size = 2 * cell.big_n + 1;
    let xs_at: Vec<f64> = match (&cfg.fixed_p, &cfg.model) {
        (Some(p), _) => cfg.f_grid.iter().map(|&u| p.quantile(u)).collect(),
        (None, Some(model)) => model_levels(model, &cfg.f_grid),
        _ => return Err(Error::Config("median_law needs a model or fixed_p".to_string())),
    };
    let levels = cfg.f_grid.len();
    // per draw: median and F_p at every grid point
    let mut medians = Vec::with_capacity(m);
    let mut f_at: Vec<Vec<f64>> = vec![Vec::with_capacity(m); levels];
    let mut g_at: Vec<Vec<f64>> = vec![Vec::with_capacity(m); levels];
    match (&cfg.fixed_p, &cfg.model) {
        (Some(p), _) => {
            let mut buf = vec![0.0; size];
            for _ in 0..m {
                buf.iter_mut().for_each(|x| *x = p.sample(rng));
                medians.push(median_of(&mut buf));
            }
            for (k, &u) in cfg.f_grid.iter().enumerate() {
                f_at[k] = vec![u; m];
                g_at[k] = vec![1.0 - u; m];
            }
        }
        (None, Some(model)) => {
            for _ in 0..m {
                let p = model.posterior_draw(history, rng)?;
                let mut draws = draw_iid(&p, size, rng).scalars()?;
                medians.push(median_of(&mut draws));
                let atoms = p
                    .scalar_points()
                    .ok_or_else(|| Error::Config("median_law needs scalar draws".to_string()))?;
                for (k, &x) in xs_at.iter().enumerate() {
                    let (mut le, mut ge) = (0.0, 0.0);
                    for (a, w) in atoms.iter().zip(p.weights()) {
                        if *a <= x {
                            le += w;
                        }
                        if *a >= x {
                            ge += w;
                        }
                    }
                    f_at[k].push(le.min(1.0));
                    g_at[k].push(ge.min(1.0));
                }
            }
        }
        _ => unreachable!(),
    }
    let mut rows = Vec::with_capacity(3 * levels);
    for (k, &x) in xs_at.iter().enumerate() {
        let level = cfg.f_grid[k];
        let below: Vec<f64> = medians.iter().map(|&v| f64::from(v <= x)).collect();
        let above: Vec<f64> = medians.iter().map(|&v| f64::from(v >= x)).collect();
        let exact = f_at[k]
            .iter()
            .map(|&u| {
                median_cdf(MedianLawInputs {
                    big_n: cell.big_n,
                    f_at_x: u.clamp(0.0, 1.0),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let diffs: Vec<f64> = below.iter().zip(&exact).map(|(a, b)| a - b).collect();
        let (p_below, _) = mean_se(&below);
        let (p_above, _) = mean_se(&above);
        let (law, _) = mean_se(&exact);
        let (_, se_diff) = mean_se(&diffs);
        // a fixed law has no spread on the exact side: use the binomial SE
        let se_cdf = if cfg.fixed_p.is_some() {
            (law * (1.0 - law) / m as f64).sqrt()
        } else {
            se_diff
        };
        let (f_mean, _) = mean_se(&f_at[k]);
        let (g_mean, _) = mean_se(&g_at[k]);
        let (left, right) = median_tail_bounds(
            MedianLawInputs {
                big_n: cell.big_n,
                f_at_x: level,
            },
            f_mean.clamp(0.0, 1.0),
            g_mean.clamp(0.0, 1.0),
        )?;
        let se_b = (p_below * (1.0 - p_below) / m as f64).sqrt();
        let se_a = (p_above * (1.0 - p_above) / m as f64).sqrt();
        let tag = format!("F={level}");
        let mut cdf_row = ReportRow::new(
            format!("median_law:cdf:{tag}"),
            cell,
            p_below,
            Some(se_cdf),
            law,
            SLACK_SE * se_cdf,
        );
        // the law is an equality: flag deviations on either side
        cdf_row.violated = (p_below - law).abs() > cdf_row.slack;
        rows.push(cdf_row);
        rows.push(ReportRow::new(
            format!("median_law:left_tail:{tag}"),
            cell,
            p_below,
            Some(se_b),
            left,
            SLACK_SE * se_b,
        ));
        rows.push(ReportRow::new(
            format!("median_law:right_tail:{tag}"),
            cell,
            p_above,
            Some(se_a),
            right,
            SLACK_SE * se_a,
        ));
    }
    Ok(rows)
}

/// Points `x` at which a model's median law is checked: quantiles of the
/// base measure at the requested levels, or the atoms of a finite model.
fn model_levels(model: &ExchangeableModel, levels: &[f64]) -> Vec<f64> {
    let base: Option<AnalyticFamily> = match model {
        ExchangeableModel::DirichletProcess(m) => Some(m.base),
        ExchangeableModel::StickBreaking(m) => Some(m.base),
        ExchangeableModel::PolyaTree(m) => Some(m.base),
        ExchangeableModel::FiniteDirichlet(_) => None,
    };
    match (base, model) {
        (Some(b), _) => levels.iter().map(|&u| b.quantile(u)).collect(),
        (None, ExchangeableModel::FiniteDirichlet(m)) => {
            let k = m.k();
            levels
                .iter()
                .map(|&u| m.value(((u * k as f64).ceil() as usize).clamp(1, k) - 1))
                .collect()
        }
        _ => unreachable!(),
    }
}
