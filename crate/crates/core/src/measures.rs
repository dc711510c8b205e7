//! Compactly supported probability measures on the line.
//!
//! A [`GridMeasure`] is parametrized by an angle `s ∈ [0, π]` through a monotone
//! map `s ↦ x(s)`; for measures built from a density on `[lo, hi]` this is the
//! Chebyshev map `x = c − r cos s`. The mass density in `s`,
//! `a(s) = ρ(x(s)) x'(s)`, is smooth for the square-root and inverse-square-root
//! edge behaviours met in practice, so midpoint sums in `s` are spectrally
//! accurate and the cumulative distribution follows from a cosine series.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{FreeError, Result};
use crate::numerics::{
    central_difference, cosine_coefficients, cosine_series_on_grid, gauss_legendre_unit, hermite,
    invert_hermite,
};

pub const DEFAULT_NODES: usize = 4096;
/// Order of the Gauss–Legendre rule in `p` used for energy double integrals.
pub const ENERGY_ORDER: usize = 1024;
/// Order of the shared quantile grid used by every transport quantity.
pub const TRANSPORT_ORDER: usize = 8192;

/// Table of `(p, x)` along a uniform grid in the parameter `s`, with the
/// `s`-derivatives of both coordinates for Hermite interpolation.
#[derive(Debug)]
struct QuantileTable {
    step: f64,
    p: Vec<f64>,
    dp: Vec<f64>,
    x: Vec<f64>,
    dx: Vec<f64>,
}

impl QuantileTable {
    fn segment_by(values: &[f64], v: f64) -> usize {
        let i = values.partition_point(|&q| q <= v);
        i.clamp(1, values.len() - 1) - 1
    }

    fn quantile(&self, p: f64) -> f64 {
        let last = self.p.len() - 1;
        if p <= 0.0 {
            return self.x[0];
        }
        if p >= 1.0 {
            return self.x[last];
        }
        let i = Self::segment_by(&self.p, p);
        let h = self.step;
        let t = invert_hermite(p, self.p[i], self.p[i + 1], h * self.dp[i], h * self.dp[i + 1]);
        hermite(t, self.x[i], self.x[i + 1], h * self.dx[i], h * self.dx[i + 1])
            .clamp(self.x[i], self.x[i + 1])
    }

    fn locate_x(&self, x: f64) -> (usize, f64) {
        let i = Self::segment_by(&self.x, x);
        let h = self.step;
        let t = invert_hermite(x, self.x[i], self.x[i + 1], h * self.dx[i], h * self.dx[i + 1]);
        (i, t)
    }

    fn cdf(&self, x: f64) -> f64 {
        let last = self.x.len() - 1;
        if x <= self.x[0] {
            return 0.0;
        }
        if x >= self.x[last] {
            return 1.0;
        }
        let (i, t) = self.locate_x(x);
        let h = self.step;
        hermite(t, self.p[i], self.p[i + 1], h * self.dp[i], h * self.dp[i + 1]).clamp(0.0, 1.0)
    }

    fn density(&self, x: f64) -> f64 {
        let last = self.x.len() - 1;
        if x < self.x[0] || x > self.x[last] {
            return 0.0;
        }
        // Both derivatives vanish at the ends; take the ratio one table step inside.
        if x == self.x[0] || x == self.x[last] {
            let j = if x == self.x[0] { 1 } else { last - 1 };
            return self.dp[j] / self.dx[j];
        }
        let (i, t) = self.locate_x(x);
        let a = (1.0 - t) * self.dp[i] + t * self.dp[i + 1];
        let d = (1.0 - t) * self.dx[i] + t * self.dx[i + 1];
        if a <= 0.0 {
            0.0
        } else {
            a / d
        }
    }
}

/// Probability measure with a density on a compact interval.
#[derive(Debug, Clone)]
pub struct GridMeasure {
    support_lo: f64,
    support_hi: f64,
    nodes: Vec<f64>,
    density: Vec<f64>,
    weights: Vec<f64>,
    table: Arc<QuantileTable>,
    chebyshev: OnceLock<Arc<Vec<f64>>>,
    energy_quantiles: OnceLock<Arc<Vec<f64>>>,
    transport_quantiles: OnceLock<Arc<Vec<f64>>>,
    total_mass_error: f64,
}

fn midpoint_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (j as f64 + 0.5) * PI / n as f64)
}

impl GridMeasure {
    /// Builds a measure on `[lo, hi]` from samples of `a(s) = ρ(x) r sin s` at the
    /// midpoint angles `s_j = (j + ½)π/n`, with `x = c − r cos s`.
    pub fn from_angular_samples(lo: f64, hi: f64, samples: Vec<f64>) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(FreeError::Domain(format!("invalid support [{lo}, {hi}]")));
        }
        let n = samples.len();
        if n < 16 {
            return Err(FreeError::Domain(format!("too few nodes ({n})")));
        }
        let peak = samples.iter().cloned().fold(0.0_f64, f64::max);
        if samples.iter().any(|v| !v.is_finite()) || peak <= 0.0 {
            return Err(FreeError::Degenerate("density samples are not a finite positive profile".into()));
        }
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let mut a: Vec<f64> = samples.into_iter().map(|v| v.max(0.0)).collect();
        let mut coeffs = cosine_coefficients(&a);
        let mass = PI * coeffs[0];
        if mass <= 0.0 {
            return Err(FreeError::Degenerate("zero total mass".into()));
        }
        a.iter_mut().for_each(|v| *v /= mass);
        coeffs.iter_mut().for_each(|v| *v /= mass);

        let nodes: Vec<f64> = midpoint_angles(n).map(|s| c - r * s.cos()).collect();
        let density = midpoint_angles(n)
            .zip(&a)
            .map(|(s, &v)| v / (r * s.sin()))
            .collect();
        let weights = a.iter().map(|v| v * PI / n as f64).collect();

        let m = 4 * n;
        let (vals, ints) = cosine_series_on_grid(&coeffs, m);
        let mut p = Vec::with_capacity(m + 1);
        let mut running = 0.0_f64;
        for (i, v) in ints.into_iter().enumerate() {
            let v = if i == 0 { 0.0 } else if i == m { 1.0 } else { v.clamp(0.0, 1.0) };
            running = running.max(v);
            p.push(running);
        }
        let dp = vals.into_iter().map(|v| v.max(0.0)).collect();
        let x = (0..=m).map(|i| c - r * (PI * i as f64 / m as f64).cos()).collect();
        let dx = (0..=m).map(|i| r * (PI * i as f64 / m as f64).sin()).collect();
        let table = QuantileTable { step: PI / m as f64, p, dp, x, dx };

        let chebyshev: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, b)| if k % 2 == 0 { *b } else { -*b })
            .collect();
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(chebyshev));
        Ok(GridMeasure {
            support_lo: lo,
            support_hi: hi,
            nodes,
            density,
            weights,
            table: Arc::new(table),
            chebyshev: cell,
            energy_quantiles: OnceLock::new(),
            transport_quantiles: OnceLock::new(),
            total_mass_error: mass - 1.0,
        })
    }

    /// Builds a measure from a density evaluated at `n` Chebyshev nodes of `[lo, hi]`.
    pub fn from_density<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, rho: F) -> Result<Self> {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let samples = midpoint_angles(n)
            .map(|s| rho(c - r * s.cos()) * r * s.sin())
            .collect::<Vec<_>>();
        if samples.iter().any(|v| *v < 0.0) {
            return Err(FreeError::Domain("density takes negative values".into()));
        }
        Self::from_angular_samples(lo, hi, samples)
    }

    /// Reads a CSV table with header `x,density` and ascending `x`; the density is
    /// interpolated linearly onto the default Chebyshev grid.
    pub fn from_table_file(path: &Path, n: usize) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "x" || &headers[1] != "density" {
            return Err(FreeError::Parse { msg: "expected header `x,density`".into(), pos: 0 });
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or(FreeError::Parse { msg: format!("bad number in row {}", line + 2), pos: line + 2 })
            };
            xs.push(parse(0)?);
            ys.push(parse(1)?);
        }
        if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FreeError::Parse { msg: "x column must be strictly ascending with ≥ 2 rows".into(), pos: 0 });
        }
        let interp = |x: f64| {
            let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1) - 1;
            let t = ((x - xs[i]) / (xs[i + 1] - xs[i])).clamp(0.0, 1.0);
            (1.0 - t) * ys[i] + t * ys[i + 1]
        };
        Self::from_density(xs[0], *xs.last().unwrap(), n, interp)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lo, self.support_hi)
    }

    pub fn support_lo(&self) -> f64 {
        self.support_lo
    }

    pub fn support_hi(&self) -> f64 {
        self.support_hi
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Quadrature weights attached to the nodes; they sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass_error(&self) -> f64 {
        self.total_mass_error
    }

    /// `(p, x)` pairs of the cached quantile table.
    pub fn quantile_table(&self) -> Vec<(f64, f64)> {
        self.table.p.iter().cloned().zip(self.table.x.iter().cloned()).collect()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.table.quantile(p)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.table.cdf(x)
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.table.density(x)
    }

    /// `∫ φ dμ` by the node quadrature.
    pub fn integrate<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * phi(x)).sum()
    }

    pub fn moment(&self, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        self.integrate(|x| x.powi(k as i32))
    }

    pub fn barycenter(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.barycenter();
        self.integrate(|x| (x - m) * (x - m))
    }

    /// Quantiles on the Gauss–Legendre grid of order [`ENERGY_ORDER`].
    pub(crate) fn energy_quantiles(&self) -> Arc<Vec<f64>> {
        self.energy_quantiles
            .get_or_init(|| {
                let (p, _) = gauss_legendre_unit(ENERGY_ORDER);
                Arc::new(p.iter().map(|&q| self.quantile(q)).collect())
            })
            .clone()
    }

    /// Quantiles on the shared transport grid of order [`TRANSPORT_ORDER`].
    pub fn transport_quantiles(&self) -> Arc<Vec<f64>> {
        self.transport_quantiles
            .get_or_init(|| {
                let (p, _) = gauss_legendre_unit(TRANSPORT_ORDER);
                Arc::new(p.iter().map(|&q| self.quantile(q)).collect())
            })
            .clone()
    }

    /// Chebyshev coefficients `c_k` of the angular weight on the measure's own
    /// support, `w(θ) = ρ(c + r cos θ) r sin θ = Σ c_k cos kθ`, with `c_0 = 1/π`.
    pub fn chebyshev_coefficients(&self) -> Arc<Vec<f64>> {
        self.chebyshev
            .get_or_init(|| {
                let n = self.nodes.len();
                let c = 0.5 * (self.support_lo + self.support_hi);
                let r = 0.5 * (self.support_hi - self.support_lo);
                let samples: Vec<f64> = midpoint_angles(n)
                    .map(|s| {
                        let v = self.density_at(c - r * s.cos()) * r * s.sin();
                        if v.is_finite() { v } else { 0.0 }
                    })
                    .collect();
                let mut b = cosine_coefficients(&samples);
                let mass = PI * b[0];
                Arc::new(
                    b.iter_mut()
                        .enumerate()
                        .map(|(k, v)| if k % 2 == 0 { *v / mass } else { -*v / mass })
                        .collect(),
                )
            })
            .clone()
    }

    fn with_table(&self, table: QuantileTable, nodes: Vec<f64>, density: Vec<f64>) -> Self {
        let last = table.x.len() - 1;
        GridMeasure {
            support_lo: table.x[0],
            support_hi: table.x[last],
            nodes,
            density,
            weights: self.weights.clone(),
            table: Arc::new(table),
            chebyshev: OnceLock::new(),
            energy_quantiles: OnceLock::new(),
            transport_quantiles: OnceLock::new(),
            total_mass_error: self.total_mass_error,
        }
    }

    /// Shift by `a`: `μ_a(A) = μ(A − a)`.
    pub fn translate(&self, a: f64) -> Self {
        if a == 0.0 {
            return self.clone();
        }
        let t = &self.table;
        let table = QuantileTable {
            step: t.step,
            p: t.p.clone(),
            dp: t.dp.clone(),
            x: t.x.iter().map(|x| x + a).collect(),
            dx: t.dx.clone(),
        };
        let mut out = self.with_table(table, self.nodes.iter().map(|x| x + a).collect(), self.density.clone());
        if let Some(c) = self.chebyshev.get() {
            let _ = out.chebyshev.set(c.clone());
        }
        out.support_lo = self.support_lo + a;
        out.support_hi = self.support_hi + a;
        out
    }

    /// Image under `x ↦ λx` for `λ > 0`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(FreeError::Domain(format!("dilation factor must be positive, got {lambda}")));
        }
        pushforward_monotone_with(self, |x| lambda * x, |_| lambda)
    }
}

/// Semicircular law with the given mean and variance.
pub fn make_semicircular(mean: f64, variance: f64) -> Result<GridMeasure> {
    make_semicircular_n(mean, variance, DEFAULT_NODES)
}

pub fn make_semicircular_n(mean: f64, variance: f64, n: usize) -> Result<GridMeasure> {
    if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
        return Err(FreeError::Domain(format!("semicircular variance must be positive, got {variance}")));
    }
    let half = 2.0 * variance.sqrt();
    let samples = midpoint_angles(n).map(|s| 2.0 / PI * s.sin().powi(2)).collect();
    GridMeasure::from_angular_samples(mean - half, mean + half, samples)
}

/// Arcsine law `1/(π√(R² − x²))` on `[−R, R]`.
pub fn make_arcsine(radius: f64) -> Result<GridMeasure> {
    make_arcsine_n(radius, DEFAULT_NODES)
}

pub fn make_arcsine_n(radius: f64, n: usize) -> Result<GridMeasure> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(FreeError::Domain(format!("arcsine radius must be positive, got {radius}")));
    }
    GridMeasure::from_angular_samples(-radius, radius, vec![1.0 / PI; n])
}

/// Marchenko–Pastur law `√(4Ct − t²)/(2πCt)` on `[0, 4C]`.
pub fn make_marchenko_pastur_family(c: f64) -> Result<GridMeasure> {
    make_marchenko_pastur_family_n(c, DEFAULT_NODES)
}

pub fn make_marchenko_pastur_family_n(c: f64, n: usize) -> Result<GridMeasure> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(FreeError::Domain(format!("Marchenko–Pastur parameter must be positive, got {c}")));
    }
    let samples = midpoint_angles(n).map(|s| (1.0 + s.cos()) / PI).collect();
    GridMeasure::from_angular_samples(0.0, 4.0 * c, samples)
}

/// Quarter-circle law `√(4 − x²)/π` on `[0, 2]`.
pub fn make_quarter_circle() -> Result<GridMeasure> {
    GridMeasure::from_density(0.0, 2.0, DEFAULT_NODES, |x| (4.0 - x * x).max(0.0).sqrt() / PI)
}

/// Convex combination of measures, resampled on the union of their supports.
///
/// When a component endpoint lies strictly inside the union, the mixed density
/// is singular there and moments and quantiles agree only to about `1e-6`.
pub fn mixture(parts: &[(f64, &GridMeasure)], n: usize) -> Result<GridMeasure> {
    let total: f64 = parts.iter().map(|(w, _)| *w).sum();
    if parts.is_empty() || parts.iter().any(|(w, _)| *w < 0.0) || !(total > 0.0) {
        return Err(FreeError::Domain("mixture weights must be nonnegative and not all zero".into()));
    }
    let lo = parts.iter().map(|(_, m)| m.support_lo).fold(f64::INFINITY, f64::min);
    let hi = parts.iter().map(|(_, m)| m.support_hi).fold(f64::NEG_INFINITY, f64::max);
    // Cell averages from the component CDFs: an endpoint singularity of one
    // component inside the union support is not resolved by point samples.
    let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let cdf = |j: usize| {
        let x = c - r * (PI * j as f64 / n as f64).cos();
        parts.iter().map(|(w, m)| w / total * m.cdf(x)).sum::<f64>()
    };
    let edges: Vec<f64> = (0..=n).map(cdf).collect();
    let samples = edges.windows(2).map(|e| (e[1] - e[0]).max(0.0) * n as f64 / PI).collect();
    GridMeasure::from_angular_samples(lo, hi, samples)
}

/// Image of `mu` under a nondecreasing map `t`, with `t'` by central differences.
pub fn pushforward_monotone<T: Fn(f64) -> f64>(mu: &GridMeasure, t: T) -> Result<GridMeasure> {
    let dt = |x: f64| central_difference(&t, x);
    pushforward_monotone_with(mu, &t, dt)
}

/// Image of `mu` under a nondecreasing map `t` with derivative `dt`.
pub fn pushforward_monotone_with<T, D>(mu: &GridMeasure, t: T, dt: D) -> Result<GridMeasure>
where
    T: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let src = &mu.table;
    let x: Vec<f64> = src.x.iter().map(|&v| t(v)).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(FreeError::Precondition("map is not finite on the support".into()));
    }
    let scale = 1.0 + x[0].abs().max(x[x.len() - 1].abs());
    for w in x.windows(2) {
        if w[1] < w[0] - 1e-12 * scale {
            return Err(FreeError::Precondition(format!(
                "map is not nondecreasing on the support (decrease near {:.6})",
                w[0]
            )));
        }
    }
    let span = x[x.len() - 1] - x[0];
    if span <= 1e-12 * scale {
        return Err(FreeError::Degenerate("map collapses the support to a point".into()));
    }
    let mut mono = x;
    for i in 1..mono.len() {
        if mono[i] < mono[i - 1] {
            mono[i] = mono[i - 1];
        }
    }
    let mut dx: Vec<f64> = src.x.iter().zip(&src.dx).map(|(&v, &d)| dt(v) * d).collect();
    // Where the chain rule degenerates (zero parameter speed against an infinite
    // slope at an edge) fall back to a one-sided second-order difference.
    let last = dx.len() - 1;
    let h = src.step;
    if !(dx[0].is_finite() && dx[0] > 0.0) {
        dx[0] = (-3.0 * mono[0] + 4.0 * mono[1] - mono[2]) / (2.0 * h);
    }
    if !(dx[last].is_finite() && dx[last] > 0.0) {
        dx[last] = (3.0 * mono[last] - 4.0 * mono[last - 1] + mono[last - 2]) / (2.0 * h);
    }
    for i in 1..last {
        if !dx[i].is_finite() {
            dx[i] = (mono[i + 1] - mono[i - 1]) / (2.0 * h);
        }
    }
    dx.iter_mut().for_each(|d| *d = d.max(0.0));
    let table = QuantileTable { step: src.step, p: src.p.clone(), dp: src.dp.clone(), x: mono, dx };
    let nodes = mu.nodes.iter().map(|&v| t(v)).collect();
    let density = mu
        .nodes
        .iter()
        .zip(&mu.density)
        .map(|(&v, &rho)| {
            let d = dt(v);
            if d > 0.0 { rho / d } else { f64::INFINITY }
        })
        .collect();
    Ok(mu.with_table(table, nodes, density))
}

/// Kolmogorov–Smirnov distance between two grid measures.
pub fn ks_distance(mu: &GridMeasure, nu: &GridMeasure) -> f64 {
    let mut worst = 0.0_f64;
    for (p, x) in mu.table.p.iter().zip(&mu.table.x) {
        worst = worst.max((p - nu.cdf(*x)).abs());
    }
    for (p, x) in nu.table.p.iter().zip(&nu.table.x) {
        worst = worst.max((p - mu.cdf(*x)).abs());
    }
    worst
}

/// Finitely supported probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    /// Sorts by location, merges coincident atoms and drops zero weights.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(x, w)| !x.is_finite() || !(*w >= 0.0)) {
            return Err(FreeError::Domain("atoms need finite locations and nonnegative weights".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(FreeError::Domain(format!("atom weights sum to {total}, not 1")));
        }
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        Ok(AtomicMeasure { atoms: merged })
    }

    pub fn point_mass(x: f64) -> Self {
        AtomicMeasure { atoms: vec![(x, 1.0)] }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn barycenter(&self) -> f64 {
        self.atoms.iter().map(|(x, w)| x * w).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|(x, w)| x * x * w).sum()
    }

    /// Left-continuous quantile `inf{x : F(x) ≥ p}`.
    pub fn quantile(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            acc += w;
            if acc >= p {
                return x;
            }
        }
        self.atoms.last().map(|a| a.0).unwrap_or(0.0)
    }

    /// Cumulative weights at each atom, with the last forced to exactly 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| {
                acc += a.1;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_moments() {
        let s = make_semicircular(0.0, 1.0).unwrap();
        assert_eq!(s.support(), (-2.0, 2.0));
        assert!((s.moment(2) - 1.0).abs() < 1e-12);
        assert!(s.moment(3).abs() < 1e-12);
        assert!((s.moment(4) - 2.0).abs() < 1e-12);
        let t = make_semicircular(3.0, 1.0).unwrap();
        assert_eq!(t.support(), (1.0, 5.0));
        assert!((t.barycenter() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn arcsine_and_mp_moments() {
        let a = make_arcsine(2.0).unwrap();
        assert!((a.moment(2) - 2.0).abs() < 1e-12);
        let mp = make_marchenko_pastur_family(1.0).unwrap();
        assert_eq!(mp.support(), (0.0, 4.0));
        assert!((mp.moment(1) - 1.0).abs() < 1e-12);
        assert!((mp.moment(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_cdf_round_trip() {
        let s = make_semicircular(0.0, 1.0).unwrap();
        for &x in &[-1.9, -1.0, -0.3, 0.0, 0.7, 1.5, 1.99] {
            let p = s.cdf(x);
            assert!((s.quantile(p) - x).abs() < 1e-8, "x={x}");
        }
        // closed-form semicircle CDF
        let f = |x: f64| 0.5 + (x * (4.0 - x * x).sqrt() / 4.0 + (x / 2.0).asin()) / PI;
        for &x in &[-1.5, 0.2, 1.8] {
            assert!((s.cdf(x) - f(x)).abs() < 1e-12);
        }
        let a = make_arcsine(1.0).unwrap();
        assert!((a.quantile(0.25) + (PI / 4.0).cos()).abs() < 1e-10);
    }

    #[test]
    fn mp_sqrt_is_quarter_circle() {
        let mp = make_marchenko_pastur_family(1.0).unwrap();
        let pushed = pushforward_monotone_with(&mp, |x| x.max(0.0).sqrt(), |x| 0.5 / x.max(1e-300).sqrt()).unwrap();
        let qc = make_quarter_circle().unwrap();
        let d = ks_distance(&pushed, &qc);
        assert!(d < 1e-6, "ks {d}");
    }

    #[test]
    fn pushforward_scaling_and_errors() {
        let s = make_semicircular(0.0, 1.0).unwrap();
        let scaled = pushforward_monotone(&s, |x| 3.0 * x + 1.0).unwrap();
        assert!((scaled.barycenter() - 1.0).abs() < 1e-10);
        assert!((scaled.variance() - 9.0).abs() < 1e-8);
        assert!(matches!(pushforward_monotone(&s, |x| -x), Err(FreeError::Precondition(_))));
        assert!(matches!(pushforward_monotone(&s, |_| 1.0), Err(FreeError::Degenerate(_))));
        let a = make_arcsine(1.0).unwrap();
        let cubed = pushforward_monotone(&a, |x| x * x * x).unwrap();
        assert!(cubed.barycenter().abs() < 1e-12);
    }

    #[test]
    fn translation_round_trip() {
        let a = make_arcsine(1.0).unwrap().translate(-1.0);
        assert_eq!(a.support(), (-2.0, 0.0));
        let s = make_semicircular(0.0, 1.0).unwrap();
        let back = s.translate(2.5).translate(-2.5);
        for (x, y) in s.nodes().iter().zip(back.nodes()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!((s.translate(2.0).barycenter() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(make_semicircular(0.0, 0.0), Err(FreeError::Domain(_))));
        assert!(matches!(make_arcsine(-1.0), Err(FreeError::Domain(_))));
        assert!(matches!(make_marchenko_pastur_family(0.0), Err(FreeError::Domain(_))));
    }

    #[test]
    fn atomic_measure_normalizes() {
        let a = AtomicMeasure::new(vec![(1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(a.atoms(), &[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(a.quantile(0.5), 0.0);
        assert_eq!(a.quantile(0.51), 1.0);
        assert!(AtomicMeasure::new(vec![(0.0, 0.5)]).is_err());
    }
}
