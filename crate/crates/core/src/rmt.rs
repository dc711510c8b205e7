//! Finite-N unitary-invariant ensembles: a Metropolis sampler for the
//! eigenvalue law `∏|x_i − x_j|² exp(−N Σ V(x_i))`, finite-N pressures and the
//! trace form of the Fenchel–Young inequality.
//!
//! Chain `k` of a run with master seed `s` is seeded with
//! `s.wrapping_add(k · 0x9E37_79B9_7F4A_7C15)`; chains run in parallel and are
//! merged in index order, so results do not depend on the thread count.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::equilibrium::EquilibriumResult;
use crate::error::{FreeError, Result, Witness};
use crate::logpotential::chi_constant;
use crate::measures::GridMeasure;
use crate::numerics::{gauss_legendre, gauss_legendre_unit, integrate};
use crate::potentials::{quadratic, Potential};

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;
const ACCEPT_LO: f64 = 0.2;
const ACCEPT_HI: f64 = 0.6;
const TI_KNOTS: usize = 16;

pub fn chain_seed(master: u64, chain: usize) -> u64 {
    master.wrapping_add((chain as u64).wrapping_mul(SEED_STRIDE))
}

#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub chains: usize,
    pub burn_in: usize,
    /// Retained sweeps per chain.
    pub sweeps: usize,
    /// Eigenvalues are confined to `[−R, R]` when set.
    pub radius: Option<f64>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { chains: 4, burn_in: 500, sweeps: 1000, radius: None }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSample {
    pub n: usize,
    pub potential: String,
    pub chains: usize,
    /// One ascending set per retained sweep, chain by chain.
    pub eigenvalue_sets: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    pub n_values: Vec<usize>,
    pub statistic: Vec<f64>,
    pub target: Option<f64>,
    pub label: String,
}

impl ConvergenceSeries {
    /// `|statistic − target|` non-increasing in `N`.
    pub fn distance_is_monotone(&self) -> bool {
        let t = self.target.unwrap_or(0.0);
        self.statistic.windows(2).all(|w| (w[1] - t).abs() <= (w[0] - t).abs())
    }
}

/// `2 Σ_{i<j} log|x_i − x_j| − N Σ V(x_i)`.
pub fn log_density(v: &Potential, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut acc = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        acc -= n * v.value(xi);
        for &xj in &x[i + 1..] {
            acc += 2.0 * (xi - xj).abs().ln();
        }
    }
    acc
}

struct Chain<'a> {
    v: &'a Potential,
    x: Vec<f64>,
    scale: f64,
    radius: f64,
    rng: ChaCha8Rng,
}

impl Chain<'_> {
    /// One sweep of single-coordinate updates; returns the number accepted.
    fn sweep(&mut self) -> usize {
        let n = self.x.len();
        let nf = n as f64;
        let mut accepted = 0;
        for i in 0..n {
            let step: f64 = self.rng.sample(StandardNormal);
            let old = self.x[i];
            let new = old + self.scale * step;
            let u: f64 = self.rng.random();
            if new.abs() > self.radius {
                continue;
            }
            let vn = self.v.value(new);
            if !vn.is_finite() {
                continue;
            }
            let mut delta = -nf * (vn - self.v.value(old));
            for (j, &xj) in self.x.iter().enumerate() {
                if j != i {
                    delta += 2.0 * ((new - xj).abs().ln() - (old - xj).abs().ln());
                }
            }
            if delta >= 0.0 || u < delta.exp() {
                self.x[i] = new;
                accepted += 1;
            }
        }
        accepted
    }
}

fn initial_configuration(v: &Potential, n: usize, radius: f64) -> Vec<f64> {
    let m = v.argmin();
    let curv = v.second_derivative(m);
    let mut r0 = if curv.is_finite() && curv > 1e-6 { 2.0 / curv.sqrt() } else { 1.0 };
    let (dlo, dhi) = v.domain();
    let room = (m - dlo).min(dhi - m).min(radius - m.abs());
    r0 = r0.min(0.9 * room.max(1e-3));
    (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { -1.0 + 2.0 * (i as f64 + 0.5) / n as f64 };
            let x = m + r0 * t;
            if v.contains(x) { x } else { m }
        })
        .collect()
}

fn run_chain(v: &Potential, n: usize, cfg: &SamplerConfig, seed: u64) -> Result<(Vec<Vec<f64>>, f64)> {
    let radius = cfg.radius.unwrap_or(f64::INFINITY);
    let mut chain = Chain {
        v,
        x: initial_configuration(v, n, radius),
        scale: 0.5 / (n as f64).sqrt(),
        radius,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    // Burn-in with the proposal scale adapted in blocks of 20 sweeps.
    let block = 20;
    let mut done = 0;
    while done < cfg.burn_in {
        let len = block.min(cfg.burn_in - done);
        let acc: usize = (0..len).map(|_| chain.sweep()).sum();
        let rate = acc as f64 / (len * n) as f64;
        if rate < ACCEPT_LO {
            chain.scale *= 0.6;
        } else if rate > ACCEPT_HI {
            chain.scale *= 1.5;
        }
        done += len;
    }
    let mut sets = Vec::with_capacity(cfg.sweeps);
    let mut acc = 0;
    for _ in 0..cfg.sweeps {
        acc += chain.sweep();
        let mut s = chain.x.clone();
        s.sort_by(f64::total_cmp);
        sets.push(s);
    }
    let rate = acc as f64 / (cfg.sweeps.max(1) * n) as f64;
    Ok((sets, rate))
}

/// Samples eigenvalue configurations of the `β = 2` ensemble with potential `v`.
pub fn sample_eigenvalues_with(v: &Potential, n: usize, cfg: &SamplerConfig, seed: u64) -> Result<EnsembleSample> {
    if !v.growth_ok() {
        return Err(FreeError::Precondition(format!("potential {} lacks the growth certificate", v.label())));
    }
    if n == 0 || n > 512 {
        return Err(FreeError::Size(format!("N = {n} outside 1..=512")));
    }
    if cfg.chains == 0 || cfg.sweeps == 0 {
        return Err(FreeError::Size("need at least one chain and one sweep".into()));
    }
    let runs: Vec<Result<(Vec<Vec<f64>>, f64)>> =
        (0..cfg.chains).into_par_iter().map(|k| run_chain(v, n, cfg, chain_seed(seed, k))).collect();
    let mut sets = Vec::with_capacity(cfg.chains * cfg.sweeps);
    let mut rates = Vec::with_capacity(cfg.chains);
    for run in runs {
        let (s, r) = run?;
        sets.extend(s);
        rates.push(r);
    }
    let acceptance_rate = rates.iter().sum::<f64>() / rates.len() as f64;
    if acceptance_rate < 0.01 {
        return Err(FreeError::Sampler(format!(
            "acceptance collapsed to {acceptance_rate:.4} (per chain {rates:?}) for {} at N = {n}",
            v.label()
        )));
    }
    Ok(EnsembleSample {
        n,
        potential: v.label().to_string(),
        chains: cfg.chains,
        eigenvalue_sets: sets,
        acceptance_rate,
        seed,
    })
}

pub fn sample_eigenvalues(v: &Potential, n: usize, sweeps: usize, seed: u64) -> Result<EnsembleSample> {
    sample_eigenvalues_with(v, n, &SamplerConfig { sweeps, ..SamplerConfig::default() }, seed)
}

/// Defect of `(1/N²) S(σ_N) + ½ log N = ½ log(2πe)`, where `σ_N` is the GUE
/// with density `∝ exp(−(N/2) Tr M²)` on `N²` isometric real coordinates.
pub fn gue_entropy_identity(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(FreeError::Size("N must be at least 1".into()));
    }
    let nf = n as f64;
    // N² independent centered Gaussians of variance 1/N.
    let per_coordinate = 0.5 * (2.0 * PI * std::f64::consts::E / nf).ln();
    let entropy = nf * nf * per_coordinate;
    Ok((entropy / (nf * nf) + 0.5 * nf.ln() - 0.5 * (2.0 * PI * std::f64::consts::E).ln()).abs())
}

/// `log` of the Weyl constant for Lebesgue measure on Hermitian matrices in the
/// isometric coordinates: `(2π)^{N(N−1)/2} / ∏_{k≤N} k!`.
fn log_weyl_constant(n: usize) -> f64 {
    let nf = n as f64;
    let log_fact_prod: f64 = (1..=n).map(|k| (1..=k).map(|j| (j as f64).ln()).sum::<f64>()).sum();
    0.5 * nf * (nf - 1.0) * (2.0 * PI).ln() - log_fact_prod
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    Direct,
    ThermodynamicIntegration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroPressure {
    /// `(1/N²) log ∫ exp(−N Tr V(M)) dΛ_N + ½ log N` over `‖M‖ ≤ R`.
    pub value: f64,
    pub std_error: f64,
    pub low_confidence: bool,
    pub method: PressureMethod,
}

/// Direct path: Heine's formula `∫ Δ² ∏ w = N! ∏ h_k`, with the norms `h_k` of the
/// monic orthogonal polynomials of `w = exp(−N V)` on `[−R, R]` from the Stieltjes
/// procedure on a Gauss–Legendre discretization.
fn micro_pressure_direct(v: &Potential, radius: f64, n: usize) -> Result<f64> {
    let rule = gauss_legendre(512);
    let nf = n as f64;
    let mut xs = Vec::new();
    let mut logw = Vec::new();
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = radius * t;
        let val = v.value(x);
        if val.is_finite() {
            xs.push(x);
            logw.push((w * radius).ln() - nf * val);
        }
    }
    if xs.is_empty() {
        return Err(FreeError::Domain(format!("potential {} is infinite on [−{radius}, {radius}]", v.label())));
    }
    let shift = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logw.iter().map(|l| (l - shift).exp()).collect();
    let mut prev = vec![0.0; xs.len()];
    let mut cur = vec![1.0; xs.len()];
    let mut log_norms = 0.0;
    let mut h_prev = 1.0;
    for k in 0..n {
        let h: f64 = weights.iter().zip(&cur).map(|(w, p)| w * p * p).sum();
        if !(h > 0.0) {
            return Err(FreeError::SolverFailure("orthogonal polynomial norm underflow".into()));
        }
        log_norms += h.ln() + shift;
        let alpha: f64 = weights.iter().zip(&cur).zip(&xs).map(|((w, p), x)| w * x * p * p).sum::<f64>() / h;
        let beta = if k == 0 { 0.0 } else { h / h_prev };
        let next: Vec<f64> = xs.iter().zip(&cur).zip(&prev).map(|((x, p), q)| (x - alpha) * p - beta * q).collect();
        prev = std::mem::replace(&mut cur, next);
        h_prev = h;
    }
    let log_n_fact: f64 = (1..=n).map(|j| (j as f64).ln()).sum();
    let log_z = log_weyl_constant(n) + log_n_fact + log_norms;
    Ok(log_z / (nf * nf) + 0.5 * nf.ln())
}

/// Thermodynamic integration from the quadratic `κx²/2` whose equilibrium has the
/// same support radius `a` as `v` (`κ = 4/a²`), along `q + t(v − q)`.
fn micro_pressure_ti(v: &Potential, radius: f64, n: usize, seed: u64, support_radius: f64) -> Result<MicroPressure> {
    let kappa = 4.0 / (support_radius * support_radius);
    let q = quadratic(kappa)?;
    let reference = 0.5 * (2.0 * PI).ln() - 0.5 * kappa.ln();
    let (ts, ws) = gauss_legendre_unit(TI_KNOTS);
    let diff = |x: f64| v.value(x) - q.value(x);
    let mut integral = 0.0;
    let mut variance = 0.0;
    for (k, (&t, &w)) in ts.iter().zip(&ws).enumerate() {
        let vt = Potential::combine(1.0 - t, &q, t, v)?;
        let cfg = SamplerConfig { chains: 4, burn_in: 300, sweeps: 600, radius: Some(radius) };
        let sample = sample_eigenvalues_with(&vt, n, &cfg, chain_seed(seed, 1000 + k))?;
        let per_sweep: Vec<f64> = sample
            .eigenvalue_sets
            .iter()
            .map(|s| s.iter().map(|&x| diff(x)).sum::<f64>() / n as f64)
            .collect();
        let (mean, se) = batch_mean(&per_sweep, 20);
        integral += w * mean;
        variance += w * w * se * se;
    }
    let std_error = variance.sqrt();
    Ok(MicroPressure {
        value: reference - integral,
        std_error,
        low_confidence: std_error > 0.01,
        method: PressureMethod::ThermodynamicIntegration,
    })
}

/// Mean and batch-means standard error.
pub fn batch_mean(values: &[f64], batches: usize) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let size = values.len() / batches;
    if size == 0 || batches < 2 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = (0..batches).map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// Finite-N pressure: direct quadrature for `N ≤ 6`, thermodynamic integration
/// otherwise. `support_radius` sets the quadratic reference of the integration path.
pub fn micro_pressure_estimate(v: &Potential, radius: f64, n: usize, seed: u64, support_radius: f64) -> Result<MicroPressure> {
    if n == 0 || n > 256 {
        return Err(FreeError::Size(format!("N = {n} outside 1..=256")));
    }
    if n <= 6 {
        let value = micro_pressure_direct(v, radius, n)?;
        return Ok(MicroPressure { value, std_error: 0.0, low_confidence: false, method: PressureMethod::Direct });
    }
    micro_pressure_ti(v, radius, n, seed, support_radius)
}

/// Thermodynamic-integration estimates over several `N`.
pub fn micro_pressure_series(v: &Potential, radius: f64, ns: &[usize], seed: u64, support_radius: f64) -> Result<ConvergenceSeries> {
    let mut stats = Vec::with_capacity(ns.len());
    for &n in ns {
        stats.push(micro_pressure_ti(v, radius, n, seed, support_radius)?.value);
    }
    Ok(ConvergenceSeries {
        n_values: ns.to_vec(),
        statistic: stats,
        target: None,
        label: format!("micro-pressure:{}", v.label()),
    })
}

fn hermitian_eigenvalues(m: &DMatrix<Complex<f64>>) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex<f64>> {
    let mut m = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
    for i in 0..n {
        m[(i, i)] = Complex::new(rng.sample(StandardNormal), 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex::new(re, im) / 2f64.sqrt();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Minimum over random Hermitian pairs of `tr f(x) + tr g(y) − tr(xy)`.
pub fn matrix_fenchel_young_check(f: &Potential, g: &Potential, n: usize, trials: usize, seed: u64) -> Result<f64> {
    if n == 0 || trials == 0 {
        return Err(FreeError::Size("need N ≥ 1 and at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..trials).map(|_| (random_hermitian(n, &mut rng), random_hermitian(n, &mut rng))).collect();
    let spectra: Vec<(Vec<f64>, Vec<f64>)> = pairs.iter().map(|(x, y)| (hermitian_eigenvalues(x), hermitian_eigenvalues(y))).collect();
    let l = 1.5 * spectra.iter().flat_map(|(a, b)| a.iter().chain(b)).fold(0.0_f64, |m, v| m.max(v.abs()));
    let grid: Vec<f64> = (0..256).map(|i| -l + 2.0 * l * i as f64 / 255.0).collect();
    for &x in &grid {
        for &y in &grid {
            let s = f.value(x) + g.value(y) - x * y;
            if s < -1e-8 * (1.0 + (x * y).abs()) {
                return Err(FreeError::Hypothesis {
                    msg: format!("f(x) + g(y) ≥ xy fails at ({x:.6}, {y:.6})"),
                    witness: Witness { x, y, slack: s },
                });
            }
        }
    }
    let nf = n as f64;
    let mut worst = f64::INFINITY;
    for ((x, y), (ex, ey)) in pairs.iter().zip(&spectra) {
        let trace_xy: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (x[(i, j)] * y[(j, i)]).re).sum();
        let lhs: f64 = ex.iter().map(|&v| f.value(v)).sum::<f64>() + ey.iter().map(|&v| g.value(v)).sum::<f64>();
        worst = worst.min((lhs - trace_xy) / nf);
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct EmpiricalComparison {
    /// KS distance of the pooled empirical CDF to the equilibrium CDF, per `N`.
    pub ks: ConvergenceSeries,
    /// Mean over sweeps of `J_V(μ̂_N) − J_V(ν_V)`, per `N`.
    pub rate_surrogate: ConvergenceSeries,
}

/// Kolmogorov–Smirnov distance between the pooled eigenvalues and `measure`.
pub fn ks_to_measure(sample: &EnsembleSample, measure: &GridMeasure) -> f64 {
    let mut all: Vec<f64> = sample.eigenvalue_sets.iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    let m = all.len() as f64;
    all.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = measure.cdf(x);
            (c - i as f64 / m).abs().max((c - (i + 1) as f64 / m).abs())
        })
        .fold(0.0, f64::max)
}

/// `(1/N) Σ V(x_i) − (1/N²) Σ_{i≠j} log|x_i − x_j|`.
pub fn discrete_energy(v: &Potential, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut pair = 0.0;
    for (i, &a) in x.iter().enumerate() {
        for &b in &x[i + 1..] {
            pair += (a - b).abs().ln();
        }
    }
    x.iter().map(|&a| v.value(a)).sum::<f64>() / n - 2.0 * pair / (n * n)
}

/// Compares samples at several `N` with the solved equilibrium of the same potential.
pub fn empirical_vs_equilibrium(samples: &[EnsembleSample], eq: &EquilibriumResult, v: &Potential) -> Result<EmpiricalComparison> {
    for s in samples {
        if s.potential != v.label() || eq.potential != v.label() {
            return Err(FreeError::Precondition(format!(
                "sample potential `{}` and equilibrium potential `{}` differ from `{}`",
                s.potential,
                eq.potential,
                v.label()
            )));
        }
    }
    if samples.windows(2).any(|w| w[1].n <= w[0].n) {
        return Err(FreeError::Precondition("samples must have strictly increasing N".into()));
    }
    let j_eq = chi_constant() - eq.pressure;
    let ns: Vec<usize> = samples.iter().map(|s| s.n).collect();
    let ks = samples.iter().map(|s| ks_to_measure(s, &eq.measure)).collect();
    let rate = samples
        .iter()
        .map(|s| {
            let vals: Vec<f64> = s.eigenvalue_sets.iter().map(|x| discrete_energy(v, x) - j_eq).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect();
    Ok(EmpiricalComparison {
        ks: ConvergenceSeries { n_values: ns.clone(), statistic: ks, target: Some(0.0), label: format!("ks:{}", v.label()) },
        rate_surrogate: ConvergenceSeries { n_values: ns, statistic: rate, target: Some(0.0), label: format!("rate:{}", v.label()) },
    })
}

fn log_partition_1d(f: &Potential) -> Result<(f64, f64)> {
    let m = f.argmin();
    let fm = f.value(m);
    let (dlo, dhi) = f.domain();
    let reach = |sign: f64| {
        let mut w = 1.0;
        while w < 1e6 {
            let x = m + sign * w;
            if !f.contains(x) || f.value(x) - fm > 60.0 {
                break;
            }
            w *= 2.0;
        }
        (m + sign * w).clamp(dlo, dhi)
    };
    let (a, b) = (reach(-1.0), reach(1.0));
    let z = integrate(|x| (fm - f.value(x)).exp(), a, b, 1e-15, 1e-13);
    let first = integrate(|x| x * (fm - f.value(x)).exp(), a, b, 1e-15, 1e-13);
    if !(z > 0.0) {
        return Err(FreeError::Degenerate(format!("∫exp(−{}) vanishes", f.label())));
    }
    Ok((z.ln() - fm, first / z))
}

/// Slack `log 2π − log(∫e^{−f} ∫e^{−g})` of the classical one-dimensional
/// functional Santaló inequality, for `f(x) + g(y) ≥ xy` with `e^{−f}` centered.
pub fn micro_santalo_1d(f: &Potential, g: &Potential) -> Result<f64> {
    let (lf, bf) = log_partition_1d(f)?;
    let (lg, bg) = log_partition_1d(g)?;
    if bf.abs() >= 1e-8 && bg.abs() >= 1e-8 {
        return Err(FreeError::Precondition(format!("neither e^(−f) nor e^(−g) is centered ({bf:.3e}, {bg:.3e})")));
    }
    Ok((2.0 * PI).ln() - lf - lg)
}
