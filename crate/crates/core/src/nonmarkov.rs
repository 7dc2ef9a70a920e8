//! Amplitude-damping channel and its geometric non-Markovianity.
//!
//! For the channel generated by `alpha(t)` the Bloch-volume ratio is
//! `V(t)/V(0) = |alpha(t)|^4`, so the measure is the total increase of
//! `|alpha|^4` and its rescaled form divides by the total decrease. On a
//! sampled trajectory both integrals are sums of the positive (negative)
//! increments of `|alpha|^4`; no quadrature is involved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::{Error, Result};

/// Increments of `|alpha|^4` at or below this size count as flat.
pub const FLAT_TOLERANCE: f64 = 1e-12;

/// Slack allowed on `|alpha| <= 1` before an amplitude is rejected.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    /// Unnormalised measure, equal to `growth_sum`.
    pub n_v: f64,
    /// `growth_sum / decay_sum`, or 0 when nothing decays.
    pub n_rescaled: f64,
    pub growth_sum: f64,
    pub decay_sum: f64,
}

pub fn geometric_measure(traj: &Trajectory) -> Result<MeasureResult> {
    let f = checked_volume(traj)?;
    let (mut growth, mut decay) = (0.0, 0.0);
    for w in f.windows(2) {
        let step = w[1] - w[0];
        if step > FLAT_TOLERANCE {
            growth += step;
        } else if step < -FLAT_TOLERANCE {
            decay -= step;
        }
    }
    let n_rescaled = if decay > FLAT_TOLERANCE { growth / decay } else { 0.0 };
    Ok(MeasureResult {
        n_v: growth,
        n_rescaled,
        growth_sum: growth,
        decay_sum: decay,
    })
}

/// Whether `|alpha|` ever grows, judged on the same increments (of
/// `|alpha|^4`, a monotone function of `|alpha|`) and threshold as
/// [`geometric_measure`], so `revival_detector(t) == (n_v > 0)` holds exactly.
pub fn revival_detector(traj: &Trajectory) -> Result<bool> {
    let f = checked_volume(traj)?;
    Ok(f.windows(2).any(|w| w[1] - w[0] > FLAT_TOLERANCE))
}

fn checked_volume(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples(traj.len()));
    }
    for (i, w) in traj.times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonAscendingTimes(i + 1));
        }
    }
    Ok(traj.volume_ratio())
}

/// Qubit state in the `(e, g)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub ee: Complex64,
    pub eg: Complex64,
    pub ge: Complex64,
    pub gg: Complex64,
}

impl DensityMatrix {
    pub fn new(ee: Complex64, eg: Complex64, ge: Complex64, gg: Complex64) -> Result<Self> {
        let rho = Self { ee, eg, ge, gg };
        rho.validate()?;
        Ok(rho)
    }

    pub fn excited() -> Self {
        Self::diagonal(1.0, 0.0)
    }

    pub fn ground() -> Self {
        Self::diagonal(0.0, 1.0)
    }

    pub fn diagonal(p_e: f64, p_g: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            ee: Complex64::new(p_e, 0.0),
            eg: zero,
            ge: zero,
            gg: Complex64::new(p_g, 0.0),
        }
    }

    /// State with Bloch vector `(x, y, z)`, `z` the excited-state inversion.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.ee + self.gg
    }

    /// Both eigenvalues, ascending (assumes Hermitian).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = (self.ee.re + self.gg.re) / 2.0;
        let half_gap = (((self.ee.re - self.gg.re) / 2.0).powi(2) + self.eg.norm_sqr()).sqrt();
        (mean - half_gap, mean + half_gap)
    }

    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        if (self.trace() - 1.0).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {}", self.trace())));
        }
        if self.ee.im.abs() > tol || self.gg.im.abs() > tol || (self.eg - self.ge.conj()).norm() > tol {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        let (low, _) = self.eigenvalues();
        if low < -tol {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {low}")));
        }
        Ok(())
    }
}

/// The amplitude-damping map generated by `alpha`.
pub fn apply_channel(alpha: Complex64, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let a = alpha.norm();
    if a > 1.0 + AMPLITUDE_TOLERANCE || !a.is_finite() {
        return Err(Error::UnphysicalAmplitude(a));
    }
    rho0.validate()?;
    let p = alpha.norm_sqr().min(1.0);
    Ok(DensityMatrix {
        ee: rho0.ee * p,
        eg: rho0.eg * alpha,
        ge: rho0.ge * alpha.conj(),
        gg: rho0.ee * (1.0 - p) + rho0.gg,
    })
}
