//! Exact single-excitation propagation.
//!
//! The excited-state amplitude is synthesised from the spectrum,
//! `alpha(t) = sum_m w_m exp(-i E_m t)` with `w_m = |<e,vac|psi_m>|^2`, so a
//! trajectory carries no time-stepping error. Everything here works in the
//! frame rotating at the bare cavity frequency, where the atom sits at
//! `omega_a - omega0` and the cavities at `delta_n`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{band_info, build_hamiltonian, ChainSpec, Realization};
use crate::tridiag::{chase_bulge, eigen_projections, SymTridiagonal};
use crate::{Error, Result};

/// Modes whose atom weight is below this are dropped when synthesising
/// trajectories; their summed contribution is bounded by their summed weight.
pub const WEIGHT_FLOOR: f64 = 1e-20;

/// Phasors are recomputed from scratch every this many uniform steps.
const RESYNC_STEPS: usize = 128;

/// Eigenvalues (ascending) and atom weights of a single-excitation
/// Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub atom_weights: Vec<f64>,
}

impl SpectralData {
    pub fn weight_sum(&self) -> f64 {
        self.atom_weights.iter().sum()
    }

    /// Modes carrying more than [`WEIGHT_FLOOR`] of the initial state.
    pub fn significant(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.eigenvalues
            .iter()
            .zip(&self.atom_weights)
            .filter(|(_, w)| **w > WEIGHT_FLOOR)
            .map(|(e, w)| (*e, *w))
    }

    /// Spread of the energies the atom actually overlaps.
    pub fn span(&self) -> f64 {
        let (lo, hi) = self
            .significant()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (e, _)| {
                (lo.min(e), hi.max(e))
            });
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }
}

/// Full dense eigendecomposition; columns of `vectors` follow the ascending
/// order of `spectral.eigenvalues`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub spectral: SpectralData,
    pub vectors: DMatrix<f64>,
}

/// Dense symmetric eigendecomposition of an arbitrary real symmetric matrix.
pub fn diagonalize(h: &DMatrix<f64>) -> Result<Eigensystem> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: h.ncols(),
        });
    }
    let scale = h.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (h[(i, j)] - h[(j, i)]).abs();
            if gap > 1e-12 * scale {
                return Err(Error::NotSymmetric { row: i, col: j, gap });
            }
        }
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::NoConvergence(format!("dense eigensolver, dimension {n}")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let atom_weights = (0..n).map(|c| vectors[(0, c)].powi(2)).collect();
    Ok(Eigensystem {
        spectral: SpectralData {
            eigenvalues,
            atom_weights,
        },
        vectors,
    })
}

/// Spectrum and atom weights of the chain in the rotating frame, via the
/// O(n^2) structured solver in [`crate::tridiag`].
pub fn spectral_data(chain: &ChainSpec, r: &Realization) -> Result<SpectralData> {
    chain.validate()?;
    if r.deltas.len() != chain.n_cavities {
        return Err(Error::DimensionMismatch {
            expected: chain.n_cavities,
            actual: r.deltas.len(),
        });
    }
    let half = chain.half_length();
    let hop = -chain.hopping;

    // basis order (-N, .., 0, e, 1, .., N)
    let mut diag = Vec::with_capacity(chain.dim());
    diag.extend_from_slice(&r.deltas[..=half]);
    diag.push(chain.detuning());
    diag.extend_from_slice(&r.deltas[half + 1..]);
    let mut off = vec![hop; chain.dim() - 1];
    off[half] = chain.coupling;
    off[half + 1] = 0.0;

    let mut t = SymTridiagonal::new(diag, off)?;
    let mut atom = vec![0.0; chain.dim()];
    atom[half + 1] = 1.0;
    chase_bulge(&mut t, half, hop, &mut atom);
    let (eigenvalues, proj) = eigen_projections(&t, &atom)?;
    Ok(SpectralData {
        eigenvalues,
        atom_weights: proj.into_iter().map(|x| x * x).collect(),
    })
}

/// Sampled excited-state amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub abs_alpha: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, alpha: Vec<Complex64>) -> Result<Self> {
        if times.len() != alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                actual: alpha.len(),
            });
        }
        check_ascending(&times)?;
        let abs_alpha = alpha.iter().map(|a| a.norm()).collect();
        Ok(Self {
            times,
            alpha,
            abs_alpha,
        })
    }

    /// Evaluates the spectral sum independently at every time point.
    pub fn from_spectrum(spec: &SpectralData, times: &[f64]) -> Result<Self> {
        check_ascending(times)?;
        if let Some(t) = times.first() {
            if *t < 0.0 {
                return Err(Error::InvalidParameter(format!("negative time {t}")));
            }
        }
        let modes: Vec<(f64, f64)> = spec.significant().collect();
        let alpha = times
            .iter()
            .map(|&t| {
                if t == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                modes.iter().fold(Complex64::new(0.0, 0.0), |acc, (e, w)| {
                    let (s, c) = (e * t).sin_cos();
                    acc + Complex64::new(w * c, -w * s)
                })
            })
            .collect();
        Self::new(times.to_vec(), alpha)
    }

    /// Uniform grid `t_k = k * horizon / K` on `[0, horizon]`, with `K` the
    /// smallest step count giving a spacing no larger than `max_dt`.
    ///
    /// Phasors advance by complex multiplication and are reset from the exact
    /// phase every few steps, so the rounding drift stays at machine level.
    pub fn uniform(spec: &SpectralData, horizon: f64, max_dt: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
        }
        if !(max_dt > 0.0 && max_dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {max_dt}")));
        }
        let steps = (horizon / max_dt).ceil().max(1.0) as usize;
        let dt = horizon / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();

        let mut alpha = vec![Complex64::new(0.0, 0.0); steps + 1];
        for (energy, weight) in spec.significant() {
            let step = Complex64::from_polar(1.0, -energy * dt);
            let mut phasor = Complex64::new(weight, 0.0);
            for (k, a) in alpha.iter_mut().enumerate() {
                if k % RESYNC_STEPS == 0 {
                    phasor = Complex64::from_polar(weight, -energy * times[k]);
                }
                *a += phasor;
                phasor *= step;
            }
        }
        alpha[0] = Complex64::new(1.0, 0.0);
        Self::new(times, alpha)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|alpha|^4`, the Bloch-volume ratio `V(t)/V(0)` of the channel.
    pub fn volume_ratio(&self) -> Vec<f64> {
        self.abs_alpha.iter().map(|a| a.powi(4)).collect()
    }
}

fn check_ascending(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonAscendingTimes(i + 1));
        }
    }
    Ok(())
}

/// Exact `alpha(t_i)` in the rotating frame.
pub fn amplitude_trajectory(chain: &ChainSpec, r: &Realization, times: &[f64]) -> Result<Trajectory> {
    let spec = spectral_data(chain, r)?;
    Trajectory::from_spectrum(&spec, times)
}

/// `exp(-iHt)|e,vac>` in the site basis (lab frame), from a dense solve.
pub fn full_state(chain: &ChainSpec, r: &Realization, t: f64) -> Result<Vec<Complex64>> {
    let h = build_hamiltonian(&chain.shifted(), r)?;
    let eig = diagonalize(&h)?;
    let frame = Complex64::from_polar(1.0, -chain.omega0 * t);
    let n = chain.dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    for (m, e) in eig.spectral.eigenvalues.iter().enumerate() {
        let amp = Complex64::from_polar(eig.vectors[(0, m)], -e * t) * frame;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += amp * eig.vectors[(i, m)];
        }
    }
    Ok(psi)
}

/// How the sampling step of a trajectory is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum TimeStep {
    #[default]
    /// `min(0.02 * 2pi / span, 0.1 / J)`, with `span` the energy spread of
    /// the modes the atom overlaps: at least 50 samples per fastest beat.
    Auto,
    Fixed(f64),
}

impl TimeStep {
    pub fn resolve(&self, spec: &SpectralData, hopping: f64) -> f64 {
        match *self {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Auto => {
                let cap = 0.1 / hopping;
                let span = spec.span();
                if span > 0.0 {
                    (0.02 * TAU / span).min(cap)
                } else {
                    cap
                }
            }
        }
    }
}

/// Eigenstates outside the clean band with appreciable atom overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateReport {
    /// Lab-frame energies, ascending.
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
    /// Long-time average of `|alpha|^2`.
    pub residual_excitation: f64,
}

/// Out-of-band energies must clear the edge by this many `J`.
pub const BAND_EDGE_TOLERANCE: f64 = 1e-9;
/// Energies closer than this many `J` count as degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-10;

pub fn bound_states(chain: &ChainSpec, r: &Realization, overlap_floor: f64) -> Result<BoundStateReport> {
    if !(overlap_floor >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "overlap_floor must be non-negative, got {overlap_floor}"
        )));
    }
    let spec = spectral_data(chain, r)?;
    Ok(bound_states_from(chain, &spec, overlap_floor))
}

pub(crate) fn bound_states_from(chain: &ChainSpec, spec: &SpectralData, overlap_floor: f64) -> BoundStateReport {
    let edge = 2.0 * chain.hopping;
    let tol = BAND_EDGE_TOLERANCE * chain.hopping;
    let (energies, weights): (Vec<f64>, Vec<f64>) = spec
        .eigenvalues
        .iter()
        .zip(&spec.atom_weights)
        .filter(|(e, w)| e.abs() > edge + tol && **w > overlap_floor)
        .map(|(e, w)| (*e, *w))
        .unzip();

    let mut residual = 0.0;
    let mut group: Option<(f64, f64)> = None;
    for (e, w) in energies.iter().zip(&weights) {
        group = match group {
            Some((e0, acc)) if (e - e0).abs() <= DEGENERACY_TOLERANCE * chain.hopping => Some((e0, acc + w)),
            Some((_, acc)) => {
                residual += acc * acc;
                Some((*e, *w))
            }
            None => Some((*e, *w)),
        };
    }
    if let Some((_, acc)) = group {
        residual += acc * acc;
    }

    let band = band_info(chain);
    BoundStateReport {
        energies: energies.iter().map(|e| e + band.center).collect(),
        weights,
        residual_excitation: residual,
    }
}

/// Parameters of the horizon search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonPolicy {
    pub epsilon_rel: f64,
    /// Candidate horizons are multiples of this, in units of `1/J`.
    pub grid_step: f64,
    /// Largest admissible horizon, in units of `1/J`.
    pub cap: f64,
    /// Sites kept between the light-cone front and each chain end.
    pub margin: usize,
    pub overlap_floor: f64,
}

impl Default for HorizonPolicy {
    fn default() -> Self {
        Self {
            epsilon_rel: 1e-3,
            grid_step: 5.0,
            cap: 5000.0,
            margin: 20,
            overlap_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub time: f64,
    pub required_n_cavities: usize,
    pub residual_excitation: f64,
}

/// Smallest odd chain keeping a `2J` front `margin` sites from both ends up
/// to `horizon`.
pub fn required_cavities(horizon: f64, hopping: f64, margin: usize) -> usize {
    let reach = (2.0 * hopping * horizon - 1e-9).ceil().max(0.0) as usize;
    2 * (reach + margin) + 1
}

/// Picks the simulation time for `chain`'s coupling: the first grid time `T`
/// at which the clean-array mean of `|alpha|^2` over `[T/2, T]` is within
/// `epsilon_rel` of the bound-state residual, i.e. everything that can leave
/// has left. The chain length of `chain` is ignored; the search sizes its own
/// chains from the light cone and reports the length needed for `T`.
pub fn choose_horizon(chain: &ChainSpec, policy: &HorizonPolicy) -> Result<Horizon> {
    chain.validate()?;
    if !(policy.epsilon_rel > 0.0) || !(policy.grid_step > 0.0) || !(policy.cap >= policy.grid_step) {
        return Err(Error::InvalidParameter(format!("bad horizon policy {policy:?}")));
    }
    let unit = 1.0 / chain.hopping;
    let step = policy.grid_step * unit;
    let cap = policy.cap * unit;
    let found = |time: f64, residual: f64| Horizon {
        time,
        required_n_cavities: required_cavities(time, chain.hopping, policy.margin),
        residual_excitation: residual,
    };
    if chain.coupling == 0.0 {
        // nothing is ever emitted
        return Ok(found(step, 0.0));
    }

    let mut trial = (64.0 * unit).max(step).min(cap);
    let mut next = 1usize;
    let mut gap = f64::INFINITY;
    loop {
        let c = chain.with_cavities(required_cavities(trial, chain.hopping, policy.margin));
        let spec = spectral_data(&c, &Realization::clean(&c))?;
        let residual = bound_states_from(&c, &spec, policy.overlap_floor).residual_excitation;
        let traj = Trajectory::uniform(&spec, trial, TimeStep::Auto.resolve(&spec, c.hopping))?;
        let dt = traj.times[1];
        let mut prefix = Vec::with_capacity(traj.len() + 1);
        prefix.push(0.0);
        for a in &traj.abs_alpha {
            prefix.push(prefix.last().unwrap() + a * a);
        }
        while next as f64 * step <= trial * (1.0 + 1e-12) {
            let t = next as f64 * step;
            let lo = ((0.5 * t / dt) - 1e-9).ceil() as usize;
            let hi = (((t / dt) + 1e-9).floor() as usize).min(traj.len() - 1);
            let mean = (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64;
            gap = (mean - residual).abs();
            if gap < policy.epsilon_rel {
                return Ok(found(t, residual));
            }
            next += 1;
        }
        if trial >= cap {
            return Err(Error::HorizonCapExceeded { cap, gap });
        }
        trial = (2.0 * trial).min(cap);
    }
}
