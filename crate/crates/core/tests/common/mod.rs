//! Oracles that share no code path with the spectral solver.

#![allow(dead_code)]

use num_complex::Complex64;
use qedlat::{ChainSpec, Realization};

/// Classical RK4 for `i dpsi/dt = H psi` on the sparse single-excitation
/// Hamiltonian (rotating frame), starting from `|e,vac>`. Returns the atom
/// amplitude at every multiple of `sample_every` steps.
pub fn rk4_atom_amplitude(
    chain: &ChainSpec,
    r: &Realization,
    step: f64,
    n_steps: usize,
    sample_every: usize,
) -> Vec<(f64, Complex64)> {
    let dim = chain.n_cavities + 1;
    let c0 = chain.center_row();
    let (g, hop, det) = (chain.coupling, chain.hopping, chain.omega_a - chain.omega0);
    let apply = |psi: &[Complex64], out: &mut [Complex64]| {
        // out = -i H psi
        let mi = Complex64::new(0.0, -1.0);
        out[0] = mi * (det * psi[0] + g * psi[c0]);
        for row in 1..dim {
            let mut acc = r.deltas[row - 1] * psi[row];
            if row > 1 {
                acc -= hop * psi[row - 1];
            }
            if row + 1 < dim {
                acc -= hop * psi[row + 1];
            }
            if row == c0 {
                acc += g * psi[0];
            }
            out[row] = mi * acc;
        }
    };
    let zero = Complex64::new(0.0, 0.0);
    let mut psi = vec![zero; dim];
    psi[0] = Complex64::new(1.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    let mut out = vec![(0.0, psi[0])];
    for n in 1..=n_steps {
        apply(&psi, &mut k1);
        for i in 0..dim {
            tmp[i] = psi[i] + k1[i] * (step / 2.0);
        }
        apply(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = psi[i] + k2[i] * (step / 2.0);
        }
        apply(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = psi[i] + k3[i] * step;
        }
        apply(&tmp, &mut k4);
        for i in 0..dim {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (step / 6.0);
        }
        if n % sample_every == 0 {
            out.push((n as f64 * step, psi[0]));
        }
    }
    out
}

/// Positive root of `E = g^2 / sqrt(E^2 - 4J^2)` (resonant emitter, infinite
/// clean chain) by bisection on `(2J, 2J + g^2 + g]`.
pub fn green_function_bound_energy(g: f64, hopping: f64) -> f64 {
    let f = |e: f64| e - g * g / (e * e - 4.0 * hopping * hopping).sqrt();
    let mut lo = 2.0 * hopping * (1.0 + 1e-15);
    let mut hi = 2.0 * hopping + g * g + g + 1.0;
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `x = Gamma T` (bisection) with `mean_{[T/2,T]} exp(-Gamma t) < eps`.
pub fn exponential_release_time(gamma: f64, eps: f64) -> f64 {
    let mean = |x: f64| 2.0 * ((-x / 2.0).exp() - (-x).exp()) / x;
    let (mut lo, mut hi) = (2.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi / gamma
}

pub fn max_abs_dev(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
