use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use qedlat::ensemble::{column_setup, realization_trajectory};
use qedlat::{
    bound_states, geometric_measure, run_ensemble, ChainSpec, DisorderSpec, EnsembleConfig, Realization,
    SweepOptions,
};

use crate::config::{HorizonMode, HorizonSetting, RunConfig, StepMode, StepSetting};
use crate::output::{write_json, Csv, Field, Json};
use crate::CliError;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const MEASURE_FILE: &str = "measure.json";
pub const ENSEMBLE_FILE: &str = "ensemble.json";
pub const REALIZATIONS_FILE: &str = "realizations.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const BOUND_STATES_FILE: &str = "boundstates.json";

/// Horizon, chain and ensemble settings for one `(sigma, g)` point.
fn point_config(cfg: &RunConfig, sigma: f64, g: f64) -> Result<EnsembleConfig, CliError> {
    let template = cfg.template()?;
    let (horizon, n_cavities) = column_setup(&template, g, &cfg.horizon_rule(), cfg.margin)?;
    let chain = ChainSpec {
        n_cavities,
        coupling: g,
        ..template
    };
    let disorder = DisorderSpec::new(sigma, cfg.master_seed())?;
    Ok(EnsembleConfig {
        dt: cfg.time_step(),
        margin: cfg.margin,
        ..EnsembleConfig::new(chain, disorder, cfg.realizations, horizon)
    })
}

pub fn single(cfg: &RunConfig) -> Result<(), CliError> {
    let (sigma, g) = cfg.single_point()?;
    let ens = point_config(cfg, sigma, g)?;
    ens.validate()?;
    let traj = realization_trajectory(&ens, cfg.realization)?;
    let m = geometric_measure(&traj)?;

    let out = prepare(&cfg.out)?;
    let mut csv = Csv::create(&out.join(TRAJECTORY_FILE), &["t", "re_alpha", "im_alpha", "abs_alpha", "abs_alpha_pow4"])?;
    for ((t, a), abs) in traj.times.iter().zip(&traj.alpha).zip(&traj.abs_alpha) {
        csv.row(&[Field::F(*t), Field::F(a.re), Field::F(a.im), Field::F(*abs), Field::F(abs.powi(4))])?;
    }
    csv.flush()?;

    let dt = traj.times[1] - traj.times[0];
    write_json(
        &out.join(MEASURE_FILE),
        &Json::obj([
            ("n_v", Json::Float(m.n_v)),
            ("n_rescaled", Json::Float(m.n_rescaled)),
            ("growth_sum", Json::Float(m.growth_sum)),
            ("decay_sum", Json::Float(m.decay_sum)),
            ("seed", Json::Int(cfg.master_seed())),
            ("realization", Json::Int(cfg.realization as u64)),
            ("sigma", Json::Float(sigma)),
            ("g", Json::Float(g)),
            ("horizon", Json::Float(ens.horizon)),
            ("n_cavities", Json::Int(ens.chain.n_cavities as u64)),
            ("dt", Json::Float(dt)),
        ]),
    )?;
    Ok(())
}

pub fn ensemble(cfg: &RunConfig) -> Result<(), CliError> {
    let (sigma, g) = cfg.single_point()?;
    let ens = EnsembleConfig {
        keep_per_realization: true,
        ..point_config(cfg, sigma, g)?
    };
    let res = run_ensemble(&ens, cfg.workers)?;

    let out = prepare(&cfg.out)?;
    let mut csv = Csv::create(
        &out.join(REALIZATIONS_FILE),
        &["index", "n_v", "n_rescaled", "growth_sum", "decay_sum"],
    )?;
    for (i, m) in res.per_realization.iter().flatten().enumerate() {
        csv.row(&[
            Field::U(i as u64),
            Field::F(m.n_v),
            Field::F(m.n_rescaled),
            Field::F(m.growth_sum),
            Field::F(m.decay_sum),
        ])?;
    }
    csv.flush()?;
    write_json(
        &out.join(ENSEMBLE_FILE),
        &Json::obj([
            ("sigma", Json::Float(sigma)),
            ("g", Json::Float(g)),
            ("mean_n", Json::Float(res.mean_n)),
            ("stderr", Json::Float(res.stderr)),
            ("m", Json::Int(res.n_realizations as u64)),
            ("seed", Json::Int(cfg.master_seed())),
            ("horizon", Json::Float(ens.horizon)),
            ("n_cavities", Json::Int(ens.chain.n_cavities as u64)),
        ]),
    )?;
    Ok(())
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let template = cfg.template()?;
    let opts = SweepOptions {
        n_realizations: cfg.realizations,
        master_seed: cfg.master_seed(),
        dt: cfg.time_step(),
        horizon: cfg.horizon_rule(),
        workers: cfg.workers,
    };
    let out = prepare(&cfg.out)?;
    let started = unix_now();
    write_json(&out.join(MANIFEST_FILE), &manifest(cfg, started, None, &[]))?;

    let mut csv = Csv::create(&out.join(SWEEP_FILE), &["sigma", "g", "mean_n", "stderr", "m", "seed"])?;
    let mut io_error = None;
    let mut cells = Vec::new();
    qedlat::ensemble::sweep_with(&template, &cfg.sigma, &cfg.g, &opts, |si, gi, cell| {
        if io_error.is_some() {
            return;
        }
        let written = csv
            .row(&[
                Field::F(cell.sigma),
                Field::F(cell.g),
                Field::F(cell.result.mean_n),
                Field::F(cell.result.stderr),
                Field::U(cell.result.n_realizations as u64),
                Field::U(cell.seed),
            ])
            .and_then(|_| csv.flush());
        if let Err(e) = written {
            io_error = Some(e);
        }
        cells.push(Json::obj([
            ("sigma_index", Json::Int(si as u64)),
            ("g_index", Json::Int(gi as u64)),
            ("seed", Json::Int(cell.seed)),
            ("horizon", Json::Float(cell.horizon)),
            ("n_cavities", Json::Int(cell.n_cavities as u64)),
        ]));
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    write_json(&out.join(MANIFEST_FILE), &manifest(cfg, started, Some(unix_now()), &cells))?;
    Ok(())
}

pub fn boundstates(cfg: &RunConfig) -> Result<(), CliError> {
    let template = cfg.template()?;
    let mut rows = Vec::with_capacity(cfg.g.len());
    for &g in &cfg.g {
        let chain = template.with_coupling(g);
        let report = bound_states(&chain, &Realization::clean(&chain), cfg.overlap_floor)?;
        rows.push(Json::obj([
            ("g", Json::Float(g)),
            ("energies", Json::floats(&report.energies)),
            ("weights", Json::floats(&report.weights)),
            ("residual_excitation", Json::Float(report.residual_excitation)),
        ]));
    }
    let out = prepare(&cfg.out)?;
    write_json(
        &out.join(BOUND_STATES_FILE),
        &Json::obj([
            ("n_cavities", Json::Int(cfg.cavities as u64)),
            ("detuning", Json::Float(cfg.detuning)),
            ("overlap_floor", Json::Float(cfg.overlap_floor)),
            ("results", Json::Array(rows)),
        ]),
    )?;
    Ok(())
}

fn prepare(dir: &Path) -> Result<&Path, CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(dir)
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn manifest(cfg: &RunConfig, started: f64, finished: Option<f64>, cells: &[Json]) -> Json {
    Json::obj([
        ("tool", Json::Str(env!("CARGO_PKG_NAME").into())),
        ("version", Json::Str(env!("CARGO_PKG_VERSION").into())),
        ("started_unix", Json::Float(started)),
        ("finished_unix", finished.map_or(Json::Null, Json::Float)),
        ("master_seed", Json::Int(cfg.master_seed())),
        ("config", config_json(cfg)),
        ("cells", Json::Array(cells.to_vec())),
    ])
}

fn config_json(cfg: &RunConfig) -> Json {
    let horizon = match cfg.horizon {
        HorizonSetting::Time(t) => Json::Float(t),
        HorizonSetting::Mode(HorizonMode::Auto) => Json::Str("auto".into()),
        HorizonSetting::Mode(HorizonMode::LightCone) => Json::Str("light-cone".into()),
    };
    let dt = match cfg.dt {
        StepSetting::Step(dt) => Json::Float(dt),
        StepSetting::Mode(StepMode::Auto) => Json::Str("auto".into()),
    };
    Json::obj([
        ("cavities", Json::Int(cfg.cavities as u64)),
        ("g", Json::floats(&cfg.g)),
        ("sigma", Json::floats(&cfg.sigma)),
        ("detuning", Json::Float(cfg.detuning)),
        ("realizations", Json::Int(cfg.realizations as u64)),
        ("horizon", horizon),
        ("dt", dt),
        ("seed", cfg.seed.map_or(Json::Null, Json::Int)),
        ("workers", Json::Int(cfg.workers as u64)),
        ("epsilon", Json::Float(cfg.epsilon)),
        ("margin", Json::Int(cfg.margin as u64)),
        ("horizon_cap", Json::Float(cfg.horizon_cap)),
        ("overlap_floor", Json::Float(cfg.overlap_floor)),
        ("out", Json::Str(cfg.out.display().to_string())),
    ])
}
