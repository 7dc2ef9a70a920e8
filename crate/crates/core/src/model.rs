//! Single-excitation model of an emitter side-coupled to the central cavity
//! of a finite coupled-cavity array with on-site disorder.
//!
//! Basis ordering used by every matrix in this crate:
//! row 0 is `|e>|vac>`, rows `1..=n_cavities` are `|g>|1_n>` for sites
//! `n = -N..=N` in ascending order, so site `n = 0` sits at row `N + 1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Static parameters of atom + array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    /// Total number of cavities, `2N + 1`.
    pub n_cavities: usize,
    /// Inter-cavity hopping rate `J`.
    pub hopping: f64,
    /// Atom to central-cavity coupling `g`.
    pub coupling: f64,
    /// Bare cavity frequency.
    pub omega0: f64,
    /// Atomic transition frequency.
    pub omega_a: f64,
}

impl ChainSpec {
    pub fn new(n_cavities: usize, hopping: f64, coupling: f64, omega0: f64, omega_a: f64) -> Result<Self> {
        let spec = Self {
            n_cavities,
            hopping,
            coupling,
            omega0,
            omega_a,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Resonant emitter (`omega_a = omega0 = 0`) with unit hopping.
    pub fn resonant(n_cavities: usize, coupling: f64) -> Result<Self> {
        Self::new(n_cavities, 1.0, coupling, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cavities < 3 || self.n_cavities.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "n_cavities must be odd and >= 3, got {}",
                self.n_cavities
            )));
        }
        if !(self.hopping > 0.0 && self.hopping.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hopping must be positive and finite, got {}",
                self.hopping
            )));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coupling must be non-negative and finite, got {}",
                self.coupling
            )));
        }
        if !self.omega0.is_finite() || !self.omega_a.is_finite() {
            return Err(Error::InvalidParameter("frequencies must be finite".into()));
        }
        Ok(())
    }

    /// `N`, so that sites run over `-N..=N`.
    pub fn half_length(&self) -> usize {
        self.n_cavities / 2
    }

    /// Matrix row of cavity site `n`.
    pub fn site_row(&self, n: isize) -> usize {
        (1 + self.half_length() as isize + n) as usize
    }

    /// Matrix row of the central cavity the atom couples to.
    pub fn center_row(&self) -> usize {
        1 + self.half_length()
    }

    pub fn dim(&self) -> usize {
        self.n_cavities + 1
    }

    /// Atom detuning from the band center, `omega_a - omega0`.
    pub fn detuning(&self) -> f64 {
        self.omega_a - self.omega0
    }

    /// Same chain in the frame rotating at `omega0`.
    pub fn shifted(&self) -> Self {
        Self {
            omega0: 0.0,
            omega_a: self.detuning(),
            ..*self
        }
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..*self }
    }

    pub fn with_cavities(&self, n_cavities: usize) -> Self {
        Self { n_cavities, ..*self }
    }

    /// Largest time for which a front leaving the center at the maximal
    /// group velocity `2J` stays `margin` sites clear of both ends.
    pub fn light_cone_horizon(&self, margin: usize) -> f64 {
        let free = self.half_length().saturating_sub(margin) as f64;
        free / (2.0 * self.hopping)
    }
}

/// Strength and seed of Gaussian on-site disorder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    /// Standard deviation of the detunings.
    pub sigma: f64,
    pub master_seed: u64,
}

impl DisorderSpec {
    pub fn new(sigma: f64, master_seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be non-negative and finite, got {sigma}"
            )));
        }
        Ok(Self { sigma, master_seed })
    }

    pub fn clean() -> Self {
        Self {
            sigma: 0.0,
            master_seed: 0,
        }
    }
}

/// One draw of the cavity detunings `delta_n`, `n = -N..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub index: usize,
    /// Master seed the stream was derived from.
    pub seed: u64,
    pub deltas: Vec<f64>,
}

impl Realization {
    /// Disorder-free array.
    pub fn clean(chain: &ChainSpec) -> Self {
        Self {
            index: 0,
            seed: 0,
            deltas: vec![0.0; chain.n_cavities],
        }
    }
}

/// Draws i.i.d. zero-mean Gaussian detunings for realization `index`.
///
/// Each realization owns ChaCha8 stream `index` under key `master_seed`, so
/// the result depends on `(master_seed, index)` only, never on call order.
pub fn sample_realization(chain: &ChainSpec, dis: &DisorderSpec, index: usize) -> Realization {
    let deltas = if dis.sigma == 0.0 {
        vec![0.0; chain.n_cavities]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(dis.master_seed);
        rng.set_stream(index as u64);
        (0..chain.n_cavities)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                dis.sigma * z
            })
            .collect()
    };
    Realization {
        index,
        seed: dis.master_seed,
        deltas,
    }
}

/// Dense single-excitation Hamiltonian (open boundaries).
pub fn build_hamiltonian(chain: &ChainSpec, r: &Realization) -> Result<DMatrix<f64>> {
    if r.deltas.len() != chain.n_cavities {
        return Err(Error::DimensionMismatch {
            expected: chain.n_cavities,
            actual: r.deltas.len(),
        });
    }
    let dim = chain.dim();
    let mut h = DMatrix::zeros(dim, dim);
    h[(0, 0)] = chain.omega_a;
    let c0 = chain.center_row();
    h[(0, c0)] = chain.coupling;
    h[(c0, 0)] = chain.coupling;
    for (i, delta) in r.deltas.iter().enumerate() {
        let row = i + 1;
        h[(row, row)] = chain.omega0 + delta;
        if row + 1 < dim {
            h[(row, row + 1)] = -chain.hopping;
            h[(row + 1, row)] = -chain.hopping;
        }
    }
    Ok(h)
}

/// Edges and center of the clean-array photon band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandInfo {
    pub lower_edge: f64,
    pub upper_edge: f64,
    pub width: f64,
    pub center: f64,
}

impl BandInfo {
    pub fn contains(&self, energy: f64) -> bool {
        (self.lower_edge..=self.upper_edge).contains(&energy)
    }
}

pub fn band_info(chain: &ChainSpec) -> BandInfo {
    let half = 2.0 * chain.hopping;
    BandInfo {
        lower_edge: chain.omega0 - half,
        upper_edge: chain.omega0 + half,
        width: 2.0 * half,
        center: chain.omega0,
    }
}

/// Clean-array dispersion `omega_k = omega0 - 2J cos k` and group velocity
/// `d omega / dk = 2J sin k` (sites per unit time).
pub fn dispersion(chain: &ChainSpec, k: f64) -> Result<(f64, f64)> {
    if !(-PI..=PI).contains(&k) {
        return Err(Error::WavenumberOutOfRange(k));
    }
    let j2 = 2.0 * chain.hopping;
    Ok((chain.omega0 - j2 * k.cos(), j2 * k.sin()))
}
