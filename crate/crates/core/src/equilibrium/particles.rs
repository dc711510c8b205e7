//! Discrete Coulomb-gas minimizer used as an independent check on the spectral
//! solver and as its fallback when the endpoint root-finder fails.
//!
//! Minimizes `N Σ V(x_i) − Σ_{i≠j} log|x_i − x_j|` by damped Newton steps with the
//! dense Hessian. Edge positions are extracted by fitting the outermost particles
//! to the Airy-zero spacing law and extrapolating in `N`.

use nalgebra::{DMatrix, DVector};

use crate::error::{FreeError, Result};
use crate::potentials::Potential;

/// First zeros of the Airy function Ai, in absolute value.
const AIRY_ZEROS: [f64; 8] = [
    2.338_107_410_459_767,
    4.087_949_444_130_971,
    5.520_559_828_095_551,
    6.786_708_090_071_759,
    7.944_133_587_120_853,
    9.022_650_853_340_98,
    10.040_174_341_558_085,
    11.008_524_303_733_263,
];

#[derive(Debug, Clone)]
pub struct ParticleConfiguration {
    pub positions: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
}

fn energy(u: &Potential, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut e = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        e += n * u.value(xi);
        for &xj in &x[i + 1..] {
            let d = (xj - xi).abs();
            if d == 0.0 {
                return f64::INFINITY;
            }
            e -= 2.0 * d.ln();
        }
    }
    e
}

fn ordered(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] > w[0])
}

/// Minimizes the discrete energy for `n` particles.
pub fn particle_minimize(u: &Potential, n: usize) -> Result<ParticleConfiguration> {
    let (dlo, dhi) = u.domain();
    if dlo.is_finite() || dhi.is_finite() {
        return Err(FreeError::Precondition("particle solver needs a potential finite on the whole line".into()));
    }
    if n < 8 {
        return Err(FreeError::Size(format!("need at least 8 particles, got {n}")));
    }
    let m = u.argmin();
    let curv = u.second_derivative(m);
    let r0 = if curv > 1e-6 && curv.is_finite() { 2.0 / curv.sqrt() } else { 2.0 };
    // Semicircle quantiles as the starting configuration.
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let p = (i as f64 + 0.5) / n as f64;
            let target = |t: f64| {
                0.5 + (t * (1.0 - t * t).max(0.0).sqrt() + t.clamp(-1.0, 1.0).asin()) / std::f64::consts::PI - p
            };
            let t = crate::numerics::brent_root(target, -1.0, 1.0, 1e-15).unwrap_or(0.0);
            m + r0 * t
        })
        .collect();
    let nf = n as f64;
    let mut e = energy(u, &x);
    let mut iterations = 0;
    for it in 0..200 {
        iterations = it + 1;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            grad[i] = nf * u.derivative(x[i]);
            hess[(i, i)] = nf * u.second_derivative(x[i]);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = x[i] - x[j];
                grad[i] -= 2.0 / d;
                hess[(i, i)] += 2.0 / (d * d);
                hess[(i, j)] = -2.0 / (d * d);
            }
        }
        let gnorm = grad.amax();
        if gnorm < 1e-10 * nf {
            break;
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => grad.clone() / hess.diagonal().amax(),
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            if ordered(&trial) {
                let et = energy(u, &trial);
                if et <= e {
                    x = trial;
                    e = et;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(ParticleConfiguration { positions: x, energy: e, iterations })
}

/// Least-squares fit `y_k = b − C|a_k| + D|a_k|²` over the outermost particles,
/// returning the edge `b`.
fn airy_edge(outer: &[f64]) -> f64 {
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut atb = nalgebra::Vector3::<f64>::zeros();
    for (k, &y) in outer.iter().enumerate() {
        let a = AIRY_ZEROS[k];
        let row = nalgebra::Vector3::new(1.0, -a, a * a);
        ata += row * row.transpose();
        atb += row * y;
    }
    ata.lu().solve(&atb).map(|c| c[0]).unwrap_or(outer[0])
}

/// Support endpoints estimated from particle systems of size `n` and `n/2`,
/// combined by first-order extrapolation in `1/n`.
pub fn particle_edges(u: &Potential, n: usize) -> Result<(f64, f64)> {
    let edges = |k: usize| -> Result<(f64, f64)> {
        let conf = particle_minimize(u, k)?;
        let x = &conf.positions;
        let top: Vec<f64> = x.iter().rev().take(AIRY_ZEROS.len()).cloned().collect();
        let bottom: Vec<f64> = x.iter().take(AIRY_ZEROS.len()).map(|v| -v).collect();
        Ok((-airy_edge(&bottom), airy_edge(&top)))
    };
    let (a1, b1) = edges(n)?;
    let (a2, b2) = edges(n / 2)?;
    Ok((2.0 * a1 - a2, 2.0 * b1 - b2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{quadratic, quartic};

    #[test]
    fn quadratic_edges_are_two() {
        let (a, b) = particle_edges(&quadratic(1.0).unwrap(), 200).unwrap();
        assert!((a + 2.0).abs() < 2e-4 && (b - 2.0).abs() < 2e-4, "{a} {b}");
    }

    #[test]
    fn quartic_edges() {
        let exact = (16.0f64 / 3.0).powf(0.25);
        let (a, b) = particle_edges(&quartic(0.25).unwrap(), 200).unwrap();
        assert!((b - exact).abs() < 1e-3 && (a + exact).abs() < 1e-3, "{a} {b} vs {exact}");
    }
}
