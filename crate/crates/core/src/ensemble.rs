//! Disorder ensembles and (sigma, g) sweeps.
//!
//! The measure is evaluated per realization and only then averaged. Work is
//! spread over a bounded rayon pool, but every result lands in an
//! index-ordered slot and the reduction runs sequentially afterwards, so the
//! output does not depend on the number of workers.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{choose_horizon, required_cavities, spectral_data, HorizonPolicy, TimeStep, Trajectory};
use crate::model::{sample_realization, ChainSpec, DisorderSpec};
use crate::nonmarkov::{geometric_measure, MeasureResult};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub chain: ChainSpec,
    pub disorder: DisorderSpec,
    pub n_realizations: usize,
    pub horizon: f64,
    pub dt: TimeStep,
    /// Sites kept between the light cone and the chain ends.
    pub margin: usize,
    pub keep_per_realization: bool,
}

impl EnsembleConfig {
    pub fn new(chain: ChainSpec, disorder: DisorderSpec, n_realizations: usize, horizon: f64) -> Self {
        Self {
            chain,
            disorder,
            n_realizations,
            horizon,
            dt: TimeStep::Auto,
            margin: HorizonPolicy::default().margin,
            keep_per_realization: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        DisorderSpec::new(self.disorder.sigma, self.disorder.master_seed)?;
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter("n_realizations must be >= 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
            }
        }
        let required = required_cavities(self.horizon, self.chain.hopping, self.margin);
        if self.chain.n_cavities < required {
            return Err(Error::LightCone {
                n_cavities: self.chain.n_cavities,
                horizon: self.horizon,
                required,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub mean_n: f64,
    /// Sample standard deviation over `sqrt(M)`.
    pub stderr: f64,
    pub n_realizations: usize,
    pub per_realization: Option<Vec<MeasureResult>>,
}

/// Measure of realization `index` of `cfg`.
pub fn realization_measure(cfg: &EnsembleConfig, index: usize) -> Result<MeasureResult> {
    let traj = realization_trajectory(cfg, index)?;
    geometric_measure(&traj)
}

/// Rotating-frame trajectory of realization `index` on `[0, horizon]`.
pub fn realization_trajectory(cfg: &EnsembleConfig, index: usize) -> Result<Trajectory> {
    let r = sample_realization(&cfg.chain, &cfg.disorder, index);
    let spec = spectral_data(&cfg.chain, &r)?;
    Trajectory::uniform(&spec, cfg.horizon, cfg.dt.resolve(&spec, cfg.chain.hopping))
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    Ok(pool.install(job))
}

/// Averages the rescaled measure over `cfg.n_realizations` realizations.
/// `workers = 0` uses one thread per core.
pub fn run_ensemble(cfg: &EnsembleConfig, workers: usize) -> Result<EnsembleResult> {
    cfg.validate()?;
    let tag = |index: usize| {
        move |e: Error| Error::Realization {
            index,
            seed: cfg.disorder.master_seed,
            source: Box::new(e),
        }
    };
    let measures: Vec<MeasureResult> = if cfg.disorder.sigma == 0.0 {
        // every realization is the clean chain
        let m = realization_measure(cfg, 0).map_err(tag(0))?;
        vec![m; cfg.n_realizations]
    } else {
        let results: Vec<Result<MeasureResult>> = with_pool(workers, || {
            (0..cfg.n_realizations)
                .into_par_iter()
                .map(|i| realization_measure(cfg, i).map_err(tag(i)))
                .collect()
        })?;
        results.into_iter().collect::<Result<_>>()?
    };
    let (mean_n, stderr) = mean_and_stderr(measures.iter().map(|m| m.n_rescaled));
    Ok(EnsembleResult {
        mean_n,
        stderr,
        n_realizations: measures.len(),
        per_realization: cfg.keep_per_realization.then_some(measures),
    })
}

/// Mean and standard error by the shifted-data formulas (shift = first
/// value), so identical inputs give exactly that value and zero error.
fn mean_and_stderr(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.collect();
    let m = values.len() as f64;
    let shift = values[0];
    let (sum, sum_sq) = values
        .iter()
        .map(|v| v - shift)
        .fold((0.0, 0.0), |(s, q), d| (s + d, q + d * d));
    let mean = shift + sum / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - sum * sum / m) / (m - 1.0)).max(0.0);
    (mean, (var / m).sqrt())
}

/// Realization average of `|alpha(t)|` on the fixed grid of step `dt`: the
/// trajectory of the averaged dynamics, for comparison with the averaged
/// measure.
pub fn averaged_trajectory(cfg: &EnsembleConfig, dt: f64, workers: usize) -> Result<Trajectory> {
    let cfg = EnsembleConfig {
        dt: TimeStep::Fixed(dt),
        ..*cfg
    };
    cfg.validate()?;
    let trajs: Vec<Result<Trajectory>> = with_pool(workers, || {
        (0..cfg.n_realizations)
            .into_par_iter()
            .map(|i| realization_trajectory(&cfg, i))
            .collect()
    })?;
    let mut mean: Option<(Vec<f64>, Vec<f64>)> = None;
    for t in trajs {
        let t = t?;
        match mean.as_mut() {
            None => mean = Some((t.times, t.abs_alpha)),
            Some((_, acc)) => acc.iter_mut().zip(&t.abs_alpha).for_each(|(a, b)| *a += b),
        }
    }
    let (times, sum) = mean.expect("n_realizations >= 1");
    let m = cfg.n_realizations as f64;
    Trajectory::new(times, sum.into_iter().map(|s| Complex64::new(s / m, 0.0)).collect())
}

/// How a sweep picks each column's horizon and chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HorizonRule {
    /// Same horizon for every cell; the chain is lengthened if needed.
    Fixed(f64),
    /// As long as the template chain's light cone allows.
    LightCone,
    /// The template chain's light-cone horizon, raised to the clean-array
    /// release time of each coupling when that is longer (the chain is then
    /// lengthened to match).
    Release(HorizonPolicy),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub n_realizations: usize,
    pub master_seed: u64,
    pub dt: TimeStep,
    pub horizon: HorizonRule,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub sigma: f64,
    pub g: f64,
    /// Master seed of this cell's disorder streams.
    pub seed: u64,
    pub horizon: f64,
    pub n_cavities: usize,
    pub result: EnsembleResult,
}

impl SweepCell {
    /// Configuration reproducing this cell on its own.
    pub fn config(&self, template: &ChainSpec, opts: &SweepOptions, margin: usize) -> EnsembleConfig {
        EnsembleConfig {
            dt: opts.dt,
            margin,
            ..EnsembleConfig::new(
                ChainSpec {
                    n_cavities: self.n_cavities,
                    coupling: self.g,
                    ..*template
                },
                DisorderSpec {
                    sigma: self.sigma,
                    master_seed: self.seed,
                },
                opts.n_realizations,
                self.horizon,
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub sigma_grid: Vec<f64>,
    pub g_grid: Vec<f64>,
    /// `cells[sigma_index][g_index]`.
    pub cells: Vec<Vec<SweepCell>>,
}

/// Seed of cell `(sigma_index, g_index)`: a splitmix64 hash of the triple.
pub fn cell_seed(master_seed: u64, sigma_index: usize, g_index: usize) -> u64 {
    let mut h = splitmix64(master_seed);
    h = splitmix64(h ^ sigma_index as u64);
    splitmix64(h ^ (g_index as u64).rotate_left(32))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!("{name} grid must be strictly ascending")));
    }
    Ok(())
}

/// Horizon and chain length used for coupling `g`.
pub fn column_setup(template: &ChainSpec, g: f64, rule: &HorizonRule, margin: usize) -> Result<(f64, usize)> {
    let grown = |t: f64| template.n_cavities.max(required_cavities(t, template.hopping, margin));
    let light_cone = template.light_cone_horizon(margin);
    match *rule {
        HorizonRule::Fixed(t) => Ok((t, grown(t))),
        HorizonRule::LightCone if light_cone > 0.0 => Ok((light_cone, template.n_cavities)),
        HorizonRule::LightCone => Err(Error::LightCone {
            n_cavities: template.n_cavities,
            horizon: 0.0,
            required: required_cavities(0.0, template.hopping, margin),
        }),
        HorizonRule::Release(policy) => {
            let h = choose_horizon(&template.with_coupling(g), &HorizonPolicy { margin, ..policy })?;
            let t = h.time.max(light_cone);
            Ok((t, grown(t)))
        }
    }
}

fn rule_margin(rule: &HorizonRule) -> usize {
    match rule {
        HorizonRule::Release(p) => p.margin,
        _ => HorizonPolicy::default().margin,
    }
}

/// Runs one ensemble per `(sigma, g)` cell, sigma-major. `on_cell` sees each
/// finished cell in output order.
pub fn sweep_with(
    template: &ChainSpec,
    sigma_grid: &[f64],
    g_grid: &[f64],
    opts: &SweepOptions,
    mut on_cell: impl FnMut(usize, usize, &SweepCell),
) -> Result<SweepResult> {
    template.validate()?;
    check_grid("sigma", sigma_grid)?;
    check_grid("g", g_grid)?;
    let margin = rule_margin(&opts.horizon);
    let columns: Vec<(f64, usize)> = g_grid
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            column_setup(template, *g, &opts.horizon, margin).map_err(|e| Error::Cell {
                sigma_index: 0,
                g_index: gi,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(sigma_grid.len());
    for (si, &sigma) in sigma_grid.iter().enumerate() {
        let mut row = Vec::with_capacity(g_grid.len());
        for (gi, &g) in g_grid.iter().enumerate() {
            let (horizon, n_cavities) = columns[gi];
            let mut cell = SweepCell {
                sigma,
                g,
                seed: cell_seed(opts.master_seed, si, gi),
                horizon,
                n_cavities,
                result: EnsembleResult {
                    mean_n: 0.0,
                    stderr: 0.0,
                    n_realizations: 0,
                    per_realization: None,
                },
            };
            let cfg = cell.config(template, opts, margin);
            cell.result = run_ensemble(&cfg, opts.workers).map_err(|e| Error::Cell {
                sigma_index: si,
                g_index: gi,
                source: Box::new(e),
            })?;
            on_cell(si, gi, &cell);
            row.push(cell);
        }
        cells.push(row);
    }
    Ok(SweepResult {
        sigma_grid: sigma_grid.to_vec(),
        g_grid: g_grid.to_vec(),
        cells,
    })
}

pub fn sweep(template: &ChainSpec, sigma_grid: &[f64], g_grid: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    sweep_with(template, sigma_grid, g_grid, opts, |_, _, _| {})
}
