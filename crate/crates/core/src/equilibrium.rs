//! Equilibrium measures of external fields, the free pressure, the free moment
//! map and the barycenter-centering search.
//!
//! The solver assumes a single interval of support. Writing `x = c + r cos φ`
//! and expanding `u'(x) = Σ g_k cos kφ`, the Euler–Lagrange equation
//! `2π Hν = u'` is solved in closed form for the cosine coefficients of the
//! angular density `ν(dx)/dφ`. The endpoint values of that angular density are
//!
//! ```text
//! right:  (1/π)(1 − r g₀/2 − r g₁/4)
//! left:   (1/π)(1 + r g₀/2 − r g₁/4)
//! ```
//!
//! A soft edge is one where this value vanishes; a hard edge sits on the boundary
//! of the domain of `u` and needs it nonnegative.

pub mod particles;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{FreeError, Result};
use crate::logpotential::{chi_rel, euler_lagrange_residual, interior_probes, log_potential, schwinger_dyson_residual, TestPolynomial};
use crate::measures::{ks_distance, make_arcsine_n, make_semicircular_n, mixture, pushforward_monotone, GridMeasure, DEFAULT_NODES};
use crate::numerics::{brent_root, cosine_coefficients, cosine_series, integrate};
use crate::potentials::{tilt_linear, Potential};

/// Name of the fixed family of competitor measures used for the variational check.
pub const PROBE_FAMILY: &str = "probe-v1";

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub nodes: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Attempt a one-cut solve even when `u` is not certified convex.
    pub allow_nonconvex: bool,
    /// Compare against the probe family after solving.
    pub check_probes: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { nodes: DEFAULT_NODES, tolerance: 1e-5, max_iterations: 100, allow_nonconvex: false, check_probes: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    OneCut { left: Edge, right: Edge },
    /// Endpoints taken from the discrete particle minimizer.
    ParticleEdges,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |e: &Edge| match e {
            Edge::Soft => "soft",
            Edge::Hard => "hard",
        };
        match self {
            Method::OneCut { left, right } => write!(f, "one-cut({},{})", name(left), name(right)),
            Method::ParticleEdges => write!(f, "particle-edges"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub measure: GridMeasure,
    pub support_lo: f64,
    pub support_hi: f64,
    /// `C` in `2∫log|x − y| dν(y) = u(x) + C` on the support.
    pub el_constant: f64,
    /// `max |2πHν − u'|` at interior probes. Solutions are accepted when either
    /// this or `potential_residual` is within tolerance: for discontinuous `u'`
    /// the truncated Hilbert transform rings near the jump.
    pub el_residual: f64,
    /// `max |2Uν − u − C|` at the same probes.
    pub potential_residual: f64,
    pub sd_residual: f64,
    /// `max χ_u(probe) − χ_u(ν)` over the probe family; `-∞` when not checked.
    pub variational_defect: f64,
    pub pressure: f64,
    pub iterations: usize,
    pub method: Method,
    /// Label of the potential that was solved.
    pub potential: String,
}

/// `(g₀, g₁)`: the first two cosine coefficients of `φ ↦ u'(c + r cos φ)`.
fn edge_moments(u: &Potential, c: f64, r: f64) -> (f64, f64) {
    let f0 = |phi: f64| u.derivative(c + r * phi.cos());
    let f1 = |phi: f64| u.derivative(c + r * phi.cos()) * phi.cos();
    let g0 = integrate(f0, 0.0, PI, 1e-14, 1e-13) / PI;
    let g1 = 2.0 * integrate(f1, 0.0, PI, 1e-14, 1e-13) / PI;
    (g0, g1)
}

/// `π ×` angular density at the left and right endpoints.
fn edge_values(u: &Potential, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let (g0, g1) = edge_moments(u, c, r);
    (1.0 + 0.5 * r * g0 - 0.25 * r * g1, 1.0 - 0.5 * r * g0 - 0.25 * r * g1)
}

/// Finds `t > 0` with `f(t) = 0`, `f` negative for small `t`, by geometric
/// expansion from `t0` followed by Brent.
fn expand_and_solve<F: Fn(f64) -> f64>(f: F, t0: f64, limit: f64) -> Option<f64> {
    let mut lo = t0;
    let mut hi = t0;
    let mut flo = f(lo);
    let mut fhi = flo;
    for _ in 0..200 {
        if flo == 0.0 {
            return Some(lo);
        }
        if fhi == 0.0 {
            return Some(hi);
        }
        if flo < 0.0 && fhi > 0.0 {
            break;
        }
        if flo >= 0.0 {
            hi = lo;
            fhi = flo;
            lo *= 0.5;
            flo = f(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi = (hi * 2.0).min(limit);
            fhi = f(hi);
            if hi >= limit && fhi <= 0.0 {
                return None;
            }
        }
    }
    if !(flo < 0.0 && fhi > 0.0) {
        return None;
    }
    brent_root(&f, lo, hi, 1e-15 * hi)
}

/// Both edges soft: `g₀ = 0` and `r g₁ = 4`, by damped Newton in `(c, log r)`.
fn solve_soft_soft(u: &Potential, max_iterations: usize) -> Option<(f64, f64, usize)> {
    let m = u.argmin();
    if !m.is_finite() {
        return None;
    }
    let curv = u.second_derivative(m);
    let r_guess = if curv.is_finite() && curv > 1e-8 { 2.0 / curv.sqrt() } else { 1.0 };
    let width = |r: f64| {
        let (_, g1) = edge_moments(u, m, r);
        0.25 * r * g1 - 1.0
    };
    let r0 = expand_and_solve(width, r_guess, 1e8)?;
    let residual = |c: f64, l: f64| {
        let r = l.exp();
        let (g0, g1) = edge_moments(u, c, r);
        [0.5 * r * g0, 0.25 * r * g1 - 1.0]
    };
    let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
    let (mut c, mut l) = (m, r0.ln());
    let mut f = residual(c, l);
    for it in 0..max_iterations {
        if norm(f) < 1e-13 {
            return Some((c, l.exp(), it));
        }
        let r = l.exp();
        let hc = 1e-7 * r;
        let hl = 1e-7;
        let fc = residual(c + hc, l);
        let fl = residual(c, l + hl);
        let j = [[(fc[0] - f[0]) / hc, (fl[0] - f[0]) / hl], [(fc[1] - f[1]) / hc, (fl[1] - f[1]) / hl]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dc = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let dl = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let (cn, ln) = (c - t * dc, l - t * dl);
            let fnew = residual(cn, ln);
            if norm(fnew) < norm(f) {
                c = cn;
                l = ln;
                f = fnew;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            return if norm(f) < 1e-10 { Some((c, l.exp(), it)) } else { None };
        }
    }
    None
}

/// Density coefficients in the angle `s` (with `x = c − r cos s`) from the cosine
/// coefficients of `u'` along `c + r cos φ`.
fn angular_samples(u: &Potential, a: f64, b: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let phis = (0..n).map(|j| (j as f64 + 0.5) * PI / n as f64);
    let g = cosine_coefficients(&phis.map(|p| u.derivative(c + r * p.cos())).collect::<Vec<_>>());
    let gk = |k: usize| g.get(k).copied().unwrap_or(0.0);
    let mut coeffs = vec![0.0; n];
    coeffs[0] = 1.0 / PI;
    for m in 1..n {
        let theta_coeff = if m == 1 {
            -(r / (2.0 * PI)) * (gk(0) - 0.5 * gk(2))
        } else {
            -(r / (4.0 * PI)) * (gk(m - 1) - gk(m + 1))
        };
        coeffs[m] = if m % 2 == 0 { theta_coeff } else { -theta_coeff };
    }
    (0..n).map(|j| cosine_series(&coeffs, (j as f64 + 0.5) * PI / n as f64)).collect()
}

struct Support {
    lo: f64,
    hi: f64,
    method: Method,
    iterations: usize,
}

const EDGE_SLACK: f64 = 1e-12;

fn locate_support(u: &Potential, cfg: &SolverConfig) -> Result<Support> {
    let (dlo, dhi) = u.domain();
    let fits = |a: f64, b: f64| a >= dlo - EDGE_SLACK * (1.0 + dlo.abs()) && b <= dhi + EDGE_SLACK * (1.0 + dhi.abs());
    if let Some((c, r, it)) = solve_soft_soft(u, cfg.max_iterations) {
        if fits(c - r, c + r) {
            return Ok(Support { lo: c - r, hi: c + r, method: Method::OneCut { left: Edge::Soft, right: Edge::Soft }, iterations: it });
        }
    }
    let limit = 1e8;
    if dlo.is_finite() {
        let right = |w: f64| -edge_values(u, dlo, dlo + w).1;
        if let Some(w) = expand_and_solve(right, 1.0, limit) {
            let b = dlo + w;
            if b <= dhi && edge_values(u, dlo, b).0 >= -1e-10 {
                return Ok(Support { lo: dlo, hi: b, method: Method::OneCut { left: Edge::Hard, right: Edge::Soft }, iterations: 1 });
            }
        }
    }
    if dhi.is_finite() {
        let left = |w: f64| -edge_values(u, dhi - w, dhi).0;
        if let Some(w) = expand_and_solve(left, 1.0, limit) {
            let a = dhi - w;
            if a >= dlo && edge_values(u, a, dhi).1 >= -1e-10 {
                return Ok(Support { lo: a, hi: dhi, method: Method::OneCut { left: Edge::Soft, right: Edge::Hard }, iterations: 1 });
            }
        }
    }
    if dlo.is_finite() && dhi.is_finite() {
        let (l, r) = edge_values(u, dlo, dhi);
        if l >= -1e-10 && r >= -1e-10 {
            return Ok(Support { lo: dlo, hi: dhi, method: Method::OneCut { left: Edge::Hard, right: Edge::Hard }, iterations: 0 });
        }
        return Err(FreeError::MultiCutUnsupported(format!(
            "no one-cut support inside [{dlo}, {dhi}] for {}",
            u.label()
        )));
    }
    let (a, b) = particles::particle_edges(u, 400).map_err(|e| FreeError::SolverFailure(format!("endpoint search failed and particle fallback failed: {e}")))?;
    Ok(Support { lo: a, hi: b, method: Method::ParticleEdges, iterations: 0 })
}

/// Polynomial coefficients of `((x − c)/r)^k`.
fn scaled_monomial(k: usize, c: f64, r: f64) -> TestPolynomial {
    let mut coeffs = vec![0.0; k + 1];
    let mut binom = 1.0;
    for j in 0..=k {
        // term C(k,j) x^j (−c)^{k−j} / r^k
        coeffs[j] = binom * (-c).powi((k - j) as i32) / r.powi(k as i32);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    TestPolynomial(coeffs)
}

/// Competitor measures for the variational check, matched to the support
/// `[c − r, c + r]` and restricted to the domain of `u`.
pub fn probe_family(u: &Potential, c: f64, r: f64, n: usize) -> Result<Vec<GridMeasure>> {
    let sc = |mean: f64, radius: f64| make_semicircular_n(mean, radius * radius / 4.0, n);
    let arc = |mean: f64, radius: f64| make_arcsine_n(radius, n).map(|m| m.translate(mean));
    let candidates = vec![
        sc(c, r)?,
        sc(c, 0.9 * r)?,
        sc(c, 1.1 * r)?,
        sc(c + 0.05 * r, r)?,
        sc(c - 0.05 * r, r)?,
        arc(c, r)?,
        arc(c, 0.95 * r)?,
        mixture(&[(0.5, &sc(c, r)?), (0.5, &arc(c, r)?)], n)?,
    ];
    let (dlo, dhi) = u.domain();
    Ok(candidates.into_iter().filter(|m| m.support_lo() >= dlo && m.support_hi() <= dhi).collect())
}

/// Computes the equilibrium measure `ν_u`, the maximizer of `χ(μ) − ∫u dμ`.
pub fn solve_equilibrium(u: &Potential, cfg: &SolverConfig) -> Result<EquilibriumResult> {
    if !u.growth_ok() {
        return Err(FreeError::Precondition(format!("potential {} lacks the logarithmic growth certificate", u.label())));
    }
    if !u.is_convex() && !cfg.allow_nonconvex {
        return Err(FreeError::Precondition(format!("potential {} is not certified convex", u.label())));
    }
    let support = locate_support(u, cfg)?;
    let (a, b) = (support.lo, support.hi);
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    let samples = angular_samples(u, a, b, cfg.nodes);
    let peak = samples.iter().cloned().fold(0.0_f64, f64::max);
    let trough = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    // Particle edges are only accurate to the extrapolation error. Convex
    // potentials are one-cut, so dips there come from truncating a non-smooth u'.
    let floor = if support.method == Method::ParticleEdges {
        1e-3
    } else if u.is_convex() {
        1e-4
    } else {
        1e-6
    };
    if trough < -floor * peak {
        return Err(FreeError::MultiCutUnsupported(format!(
            "one-cut density for {} turns negative ({trough:.3e})",
            u.label()
        )));
    }
    let measure = GridMeasure::from_angular_samples(a, b, samples)?;

    let el_residual = euler_lagrange_residual(&measure, u)?;
    let probes = interior_probes(&measure, 64);
    let gaps: Vec<f64> = probes.iter().map(|&x| 2.0 * log_potential(&measure, x) - u.value(x)).collect();
    let el_constant = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let potential_residual = gaps.iter().map(|g| (g - el_constant).abs()).fold(0.0, f64::max);
    let tests: Vec<TestPolynomial> = (1..=4).map(|k| scaled_monomial(k, c, r)).collect();
    let sd_residual = schwinger_dyson_residual(&measure, u, &tests)?;
    let pressure = chi_rel(&measure, u)?;

    if el_residual > cfg.tolerance && potential_residual > cfg.tolerance {
        return Err(FreeError::SolverFailure(format!(
            "Euler–Lagrange residual {el_residual:.3e} exceeds tolerance {:.1e} for {}",
            cfg.tolerance,
            u.label()
        )));
    }
    let variational_defect = if cfg.check_probes {
        let mut worst = f64::NEG_INFINITY;
        for probe in probe_family(u, c, r, cfg.nodes)? {
            if let Ok(v) = chi_rel(&probe, u) {
                worst = worst.max(v - pressure);
            }
        }
        if worst > cfg.tolerance {
            return Err(FreeError::SolverFailure(format!(
                "probe measure beats the solution by {worst:.3e} for {}",
                u.label()
            )));
        }
        worst
    } else {
        f64::NEG_INFINITY
    };
    Ok(EquilibriumResult {
        measure,
        support_lo: a,
        support_hi: b,
        el_constant,
        el_residual,
        potential_residual,
        sd_residual,
        variational_defect,
        pressure,
        iterations: support.iterations,
        method: support.method,
        potential: u.label().to_string(),
    })
}

/// `η(u) = χ_u(ν_u)`.
pub fn free_pressure(u: &Potential) -> Result<f64> {
    let cfg = SolverConfig { check_probes: false, ..SolverConfig::default() };
    Ok(solve_equilibrium(u, &cfg)?.pressure)
}

/// `min_h (∫h dμ + η(h)) − χ(μ)` over the family.
pub fn entropy_duality_check(mu: &GridMeasure, family: &[Potential]) -> Result<f64> {
    if family.is_empty() {
        return Err(FreeError::Precondition("empty potential family".into()));
    }
    let chi_mu = crate::logpotential::chi(mu)?;
    let mut best = f64::INFINITY;
    for h in family {
        let integral = crate::logpotential::potential_integral(mu, h)?;
        best = best.min(integral + free_pressure(h)?);
    }
    Ok(best - chi_mu)
}

#[derive(Debug, Clone)]
pub struct MomentMapConfig {
    pub solver: SolverConfig,
    /// Bound on the KS distance between `u'_# ν_u` and the target.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MomentMapConfig {
    fn default() -> Self {
        MomentMapConfig {
            solver: SolverConfig { check_probes: false, ..SolverConfig::default() },
            tolerance: 1e-3,
            max_iterations: 80,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentMap {
    pub potential: Potential,
    pub equilibrium: EquilibriumResult,
    /// KS distance between `u'_# ν_u` and the target measure.
    pub pushforward_defect: f64,
    pub iterations: usize,
}

const MAP_SAMPLES: usize = 1024;
const MAP_TERMS: usize = 160;

/// Convex potential whose derivative is the Chebyshev series `Σ a_k T_k((x − c)/r)`
/// on `[c − r, c + r]`, extended affinely outside; normalized by `u(c − r) = 0`.
fn potential_from_series(c: f64, r: f64, a: Vec<f64>, label: &str) -> Result<Potential> {
    let k = a.len();
    let at = |i: usize| a.get(i).copied().unwrap_or(0.0);
    let mut anti = vec![0.0; k + 1];
    for i in 1..=k {
        anti[i] = if i == 1 { at(0) - 0.5 * at(2) } else { (at(i - 1) - at(i + 1)) / (2.0 * i as f64) };
    }
    let base = cosine_series(&anti, PI);
    let anti: Vec<f64> = anti.iter().enumerate().map(|(i, v)| if i == 0 { -base } else { *v }).collect();
    let span = (cosine_series(&a, 0.0) - cosine_series(&a, PI)) / (2.0 * r);
    let end_slope = |sign: f64| {
        let d: f64 = a.iter().enumerate().map(|(i, v)| v * (i * i) as f64 * if sign < 0.0 && i % 2 == 0 { -1.0 } else { 1.0 }).sum();
        (d / r).max(1e-3 * span)
    };
    let (ls, rs) = (end_slope(-1.0), end_slope(1.0));
    let (t_lo, t_hi) = (cosine_series(&a, PI), cosine_series(&a, 0.0));
    let u_hi = r * cosine_series(&anti, 0.0);
    let series = Arc::new((a, anti));
    let (s1, s2) = (series.clone(), series);
    let value = move |x: f64| {
        let xi = (x - c) / r;
        if xi < -1.0 {
            let d = x - (c - r);
            t_lo * d + 0.5 * ls * d * d
        } else if xi > 1.0 {
            let d = x - (c + r);
            u_hi + t_hi * d + 0.5 * rs * d * d
        } else {
            r * cosine_series(&s1.1, xi.acos())
        }
    };
    let derivative = move |x: f64| {
        let xi = (x - c) / r;
        if xi < -1.0 {
            t_lo + ls * (x - (c - r))
        } else if xi > 1.0 {
            t_hi + rs * (x - (c + r))
        } else {
            cosine_series(&s2.0, xi.acos())
        }
    };
    Potential::new(label, (f64::NEG_INFINITY, f64::INFINITY), value, derivative)
}

/// Smoothed `x ↦ Q_μ(F_ρ(x))` on the support of `ρ`, as a truncated Chebyshev series.
fn transport_potential(mu: &GridMeasure, rho: &GridMeasure) -> Result<Potential> {
    let (lo, hi) = rho.support();
    let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let samples: Vec<f64> = (0..MAP_SAMPLES)
        .map(|j| {
            let theta = (j as f64 + 0.5) * PI / MAP_SAMPLES as f64;
            mu.quantile(rho.cdf(c + r * theta.cos()))
        })
        .collect();
    let mut coeffs = cosine_coefficients(&samples);
    coeffs.truncate(MAP_TERMS);
    potential_from_series(c, r, coeffs, "moment-map")
}

/// Finds a convex `u` with `u'_# ν_u = μ` for centered `μ`, by iterating
/// `ρ ↦ ν_u` (recentered) with `u' = Q_μ ∘ F_ρ`.
pub fn moment_map(mu: &GridMeasure, cfg: &MomentMapConfig) -> Result<MomentMap> {
    let bar = mu.barycenter();
    if bar.abs() >= 1e-8 {
        return Err(FreeError::Precondition(format!("target barycenter {bar:.3e} is not zero")));
    }
    let var = mu.variance();
    if !(var > 0.0) {
        return Err(FreeError::Precondition("target is a point mass".into()));
    }
    let n = cfg.solver.nodes;
    let mut rho = make_semicircular_n(0.0, 1.0 / var, n)?;
    let mut iterations = 0;
    let mut last: Option<(Potential, EquilibriumResult)> = None;
    for it in 0..cfg.max_iterations {
        iterations = it + 1;
        let u = transport_potential(mu, &rho)?;
        let eq = solve_equilibrium(&u, &cfg.solver)?;
        let next = eq.measure.translate(-eq.measure.barycenter());
        let change = ks_distance(&next, &rho).max(
            ((next.support_lo() - rho.support_lo()).abs() + (next.support_hi() - rho.support_hi()).abs())
                / (rho.support_hi() - rho.support_lo()),
        );
        rho = next;
        last = Some((u, eq));
        if change < 1e-10 {
            break;
        }
    }
    let u = transport_potential(mu, &rho)?;
    let eq = solve_equilibrium(&u, &cfg.solver).or_else(|e| last.map(|(_, eq)| eq).ok_or(e))?;
    let anchor = u.value(eq.measure.barycenter());
    let potential = u.add_constant(-anchor)?.relabel("moment-map");
    let pushed = pushforward_monotone(&eq.measure, |x| potential.derivative(x))?;
    let pushforward_defect = ks_distance(&pushed, mu);
    if pushforward_defect > cfg.tolerance {
        return Err(FreeError::SolverFailure(format!(
            "moment map pushforward misses the target by {pushforward_defect:.3e} after {iterations} iterations"
        )));
    }
    Ok(MomentMap { potential, equilibrium: eq, pushforward_defect, iterations })
}

#[derive(Debug, Clone)]
pub struct CenteringShift {
    /// `λ` with `|bar ν_{f+λx}| < 1e-6`, when a sign change was found.
    pub lambda: Option<f64>,
    /// Sampled `(λ, barycenter)` pairs, sorted by `λ`.
    pub curve: Vec<(f64, f64)>,
    /// Whether the sampled barycenters are monotone in `λ`.
    pub monotone: bool,
}

/// Searches `λ` in `box_` so that the equilibrium of `f + λx` is centered.
pub fn find_centering_shift(f: &Potential, box_: (f64, f64), cfg: &SolverConfig) -> Result<CenteringShift> {
    if !f.growth_ok() {
        return Err(FreeError::Precondition(format!("potential {} lacks the growth certificate", f.label())));
    }
    let (lo, hi) = box_;
    if !(lo < hi) {
        return Err(FreeError::Domain(format!("empty search box [{lo}, {hi}]")));
    }
    let cfg = SolverConfig { check_probes: false, ..cfg.clone() };
    let mut curve: Vec<(f64, f64)> = Vec::new();
    let bary = |lambda: f64, curve: &mut Vec<(f64, f64)>| -> Result<f64> {
        let tilted = tilt_linear(f, lambda)?;
        match solve_equilibrium(&tilted, &cfg) {
            Ok(eq) => {
                let b = eq.measure.barycenter();
                curve.push((lambda, b));
                Ok(b)
            }
            Err(e) => Err(FreeError::SolverFailure(format!("at λ = {lambda}: {e}; partial curve {curve:?}"))),
        }
    };
    let samples = 9;
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let lambda = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        values.push((lambda, bary(lambda, &mut curve)?));
    }
    let increasing = values.windows(2).all(|w| w[1].1 >= w[0].1);
    let decreasing = values.windows(2).all(|w| w[1].1 <= w[0].1);
    let mut lambda = values.iter().find(|(_, b)| b.abs() < 1e-6).map(|(l, _)| *l);
    if lambda.is_none() {
        if let Some(w) = values.windows(2).find(|w| w[0].1.signum() != w[1].1.signum()) {
            let (mut a, mut fa) = w[0];
            let (mut b, _) = w[1];
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = bary(mid, &mut curve)?;
                if fm.abs() < 1e-6 && (b - a) < 1e-9 * (1.0 + mid.abs()) || fm == 0.0 {
                    lambda = Some(mid);
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a < 1e-14 * (1.0 + mid.abs()) {
                    lambda = (fm.abs() < 1e-6).then_some(mid);
                    break;
                }
            }
        }
    }
    curve.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(CenteringShift { lambda, curve, monotone: increasing || decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logpotential::chi;
    use crate::measures::{make_arcsine, make_marchenko_pastur_family, make_semicircular};
    use crate::potentials::{absolute, hard_wall, linear_on_half_line, quadratic, quartic, shift_potential};

    #[test]
    fn quadratic_gives_semicircle() {
        let eq = solve_equilibrium(&quadratic(1.0).unwrap(), &SolverConfig::default()).unwrap();
        assert!((eq.support_lo + 2.0).abs() < 1e-12 && (eq.support_hi - 2.0).abs() < 1e-12);
        assert!((eq.pressure - 0.5 * (2.0 * PI).ln()).abs() < 1e-8, "{}", eq.pressure);
        assert!(eq.el_residual < 1e-10 && eq.sd_residual < 1e-10, "{eq:?}");
        let s = make_semicircular(0.0, 1.0).unwrap();
        assert!(ks_distance(&eq.measure, &s) < 1e-12);
    }

    #[test]
    fn scaled_quadratic_and_shift() {
        let eq = solve_equilibrium(&quadratic(1.0 / 3.0).unwrap(), &SolverConfig::default()).unwrap();
        assert!((eq.measure.variance() - 3.0).abs() < 1e-10);
        let u = quadratic(1.0).unwrap();
        let p = free_pressure(&shift_potential(&u, 1.3).unwrap()).unwrap();
        assert!((p - free_pressure(&u).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn marchenko_pastur_and_wall() {
        let eq = solve_equilibrium(&linear_on_half_line(1.0).unwrap(), &SolverConfig::default()).unwrap();
        assert!((eq.support_hi - 4.0).abs() < 1e-10 && eq.support_lo == 0.0, "{eq:?}");
        let mp = make_marchenko_pastur_family(1.0).unwrap();
        assert!(ks_distance(&eq.measure, &mp) < 1e-8);

        let eq = solve_equilibrium(&hard_wall(1.0).unwrap(), &SolverConfig::default()).unwrap();
        let arc = make_arcsine(1.0).unwrap();
        assert!(ks_distance(&eq.measure, &arc) < 1e-12);
        assert!((eq.pressure - chi(&arc).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn quartic_matches_particles() {
        let eq = solve_equilibrium(&quartic(0.25).unwrap(), &SolverConfig::default()).unwrap();
        let exact = (16.0f64 / 3.0).powf(0.25);
        assert!((eq.support_hi - exact).abs() < 1e-12, "{}", eq.support_hi);
        assert!(eq.el_residual < 1e-9, "{}", eq.el_residual);
    }

    #[test]
    fn absolute_value_potential() {
        let eq = solve_equilibrium(&absolute().unwrap(), &SolverConfig::default()).unwrap();
        assert!(eq.potential_residual < 1e-5, "{eq:?}");
        let d = eq.measure.density();
        let n = d.len();
        assert!((0..n).all(|i| (d[i] - d[n - 1 - i]).abs() < 1e-8 * (1.0 + d[i])));
    }

    #[test]
    fn duality_and_moment_map() {
        let s = make_semicircular(0.0, 1.0).unwrap();
        let gap = entropy_duality_check(&s, &[quadratic(1.0).unwrap()]).unwrap();
        assert!(gap.abs() < 1e-8, "{gap}");
        let mm = moment_map(&make_semicircular(0.0, 2.0).unwrap(), &MomentMapConfig::default()).unwrap();
        assert!((mm.equilibrium.measure.variance() - 0.5).abs() < 1e-6, "{}", mm.equilibrium.measure.variance());
        assert!((mm.potential.derivative(0.7) - 1.4).abs() < 1e-5);
        assert!(mm.potential.value(0.0).abs() < 1e-6);
    }

    #[test]
    fn centering_shift_of_offset_quadratic() {
        let u = shift_potential(&quadratic(1.0).unwrap(), -1.0).unwrap();
        let found = find_centering_shift(&u, (-3.0, 3.0), &SolverConfig::default()).unwrap();
        assert!((found.lambda.unwrap() - 1.0).abs() < 1e-6, "{found:?}");
        assert!(found.monotone);
    }
}
