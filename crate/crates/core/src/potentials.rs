//! External-field potentials with sampled convexity and growth certificates,
//! the Legendre–Fenchel transform and Moreau–Yosida regularization.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{FreeError, Result};
use crate::numerics::{brent_minimize, brent_root, central_difference, monotone_crossing};

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Half-width of the box on which numerical conjugates are tabulated.
pub const LEGENDRE_BOX: f64 = 64.0;
const PROBE_POINTS: usize = 2048;
const PROBE_HALF_WIDTH: f64 = 16.0;
const SEARCH_LIMIT: f64 = 1e6;

/// A scalar potential `u`, `+∞` outside `[domain_lo, domain_hi]`.
#[derive(Clone)]
pub struct Potential {
    domain_lo: f64,
    domain_hi: f64,
    value: Scalar,
    derivative: Scalar,
    second: Option<Scalar>,
    is_convex: bool,
    growth_ok: bool,
    is_even: bool,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("domain", &(self.domain_lo, self.domain_hi))
            .field("is_convex", &self.is_convex)
            .field("growth_ok", &self.growth_ok)
            .finish()
    }
}

impl Potential {
    /// Builds a potential from closures; certificates are computed by sampling.
    pub fn new<V, D>(label: impl Into<String>, domain: (f64, f64), value: V, derivative: D) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::assemble(label.into(), domain, Arc::new(value), Arc::new(derivative), None)
    }

    /// As [`Potential::new`] with an analytic second derivative.
    pub fn with_second<V, D, S>(
        label: impl Into<String>,
        domain: (f64, f64),
        value: V,
        derivative: D,
        second: S,
    ) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::assemble(label.into(), domain, Arc::new(value), Arc::new(derivative), Some(Arc::new(second)))
    }

    fn assemble(label: String, domain: (f64, f64), value: Scalar, derivative: Scalar, second: Option<Scalar>) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo <= hi) || lo.is_nan() || hi.is_nan() {
            return Err(FreeError::Domain(format!("empty potential domain [{lo}, {hi}]")));
        }
        let mut p = Potential {
            domain_lo: lo,
            domain_hi: hi,
            value,
            derivative,
            second,
            is_convex: false,
            growth_ok: false,
            is_even: false,
            label,
        };
        if !(p.probe_grid().iter().any(|&x| p.value(x).is_finite())) {
            return Err(FreeError::Domain(format!("potential {} is identically +∞", p.label)));
        }
        p.is_convex = p.certify_convexity();
        p.growth_ok = p.certify_growth();
        p.is_even = p.certify_evenness();
        Ok(p)
    }

    fn probe_grid(&self) -> Vec<f64> {
        let a = self.domain_lo.max(-PROBE_HALF_WIDTH);
        let b = self.domain_hi.min(PROBE_HALF_WIDTH);
        if a == b {
            return vec![a];
        }
        (0..PROBE_POINTS)
            .map(|i| a + (b - a) * i as f64 / (PROBE_POINTS - 1) as f64)
            .collect()
    }

    fn certify_convexity(&self) -> bool {
        let grid = self.probe_grid();
        let vals: Vec<f64> = grid.iter().map(|&x| self.value(x)).collect();
        vals.windows(3).all(|w| {
            if !(w[0].is_finite() && w[1].is_finite() && w[2].is_finite()) {
                return true;
            }
            w[0] - 2.0 * w[1] + w[2] >= -1e-9 * (1.0 + w[1].abs())
        })
    }

    fn certify_growth(&self) -> bool {
        let reference = if self.contains(0.0) { 0.0 } else { self.reference_point() };
        let base = self.value(reference);
        let side = |sign: f64| {
            let g: Vec<f64> = [1e2, 1e3, 1e4]
                .iter()
                .map(|&r| {
                    let x = sign * r;
                    let v = self.value(x);
                    if v.is_infinite() { f64::INFINITY } else { v - 2.0 * r.ln() }
                })
                .collect();
            g.windows(2).all(|w| w[1] >= w[0]) && g.iter().all(|&v| v > base + 10.0)
        };
        (self.domain_hi.is_finite() || side(1.0)) && (self.domain_lo.is_finite() || side(-1.0))
    }

    fn certify_evenness(&self) -> bool {
        if self.domain_lo != -self.domain_hi {
            return false;
        }
        self.probe_grid().iter().all(|&x| {
            let (a, b) = (self.value(x), self.value(-x));
            (a.is_infinite() && b.is_infinite() && a == b) || (a - b).abs() <= 1e-10 * (1.0 + a.abs())
        })
    }

    fn reference_point(&self) -> f64 {
        match (self.domain_lo.is_finite(), self.domain_hi.is_finite()) {
            (true, true) => 0.5 * (self.domain_lo + self.domain_hi),
            (true, false) => self.domain_lo + 1.0,
            (false, true) => self.domain_hi - 1.0,
            (false, false) => 0.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain_lo && x <= self.domain_hi
    }

    pub fn value(&self, x: f64) -> f64 {
        if self.contains(x) { (self.value)(x) } else { f64::INFINITY }
    }

    /// Derivative inside the domain; one-sided limits are used at its ends.
    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x.clamp(self.domain_lo, self.domain_hi))
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match &self.second {
            Some(s) => s(x),
            None => {
                let h = 1e-5 * (1.0 + x.abs());
                let a = (x - h).max(self.domain_lo);
                let b = (x + h).min(self.domain_hi);
                (self.derivative(b) - self.derivative(a)) / (b - a)
            }
        }
    }

    pub fn has_second_derivative(&self) -> bool {
        self.second.is_some()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_lo, self.domain_hi)
    }

    pub fn is_convex(&self) -> bool {
        self.is_convex
    }

    pub fn growth_ok(&self) -> bool {
        self.growth_ok
    }

    pub fn is_even(&self) -> bool {
        self.is_even
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Smallest minimizer of a convex potential, searched within ±1e6.
    pub fn argmin(&self) -> f64 {
        let a = self.domain_lo.max(-SEARCH_LIMIT);
        let b = self.domain_hi.min(SEARCH_LIMIT);
        if self.derivative(a) >= 0.0 {
            return a;
        }
        if self.derivative(b) <= 0.0 {
            return b;
        }
        increasing_root(|x| self.derivative(x), a, b)
    }

    /// `x ↦ a·u(x) + b·v(x)` on the intersection of the domains.
    pub fn combine(a: f64, u: &Potential, b: f64, v: &Potential) -> Result<Potential> {
        let lo = u.domain_lo.max(v.domain_lo);
        let hi = u.domain_hi.min(v.domain_hi);
        let (u1, v1, u2, v2) = (u.clone(), v.clone(), u.clone(), v.clone());
        let second = match (&u.second, &v.second) {
            (Some(s), Some(t)) => {
                let (s, t) = (s.clone(), t.clone());
                Some(Arc::new(move |x: f64| a * s(x) + b * t(x)) as Scalar)
            }
            _ => None,
        };
        Self::assemble(
            format!("{a}*{}+{b}*{}", u.label, v.label),
            (lo, hi),
            Arc::new(move |x| a * u1.value(x) + b * v1.value(x)),
            Arc::new(move |x| a * u2.derivative(x) + b * v2.derivative(x)),
            second,
        )
    }

    /// `u + c`.
    pub fn add_constant(&self, c: f64) -> Result<Potential> {
        let u = self.clone();
        let d = self.derivative.clone();
        Self::assemble(
            format!("{}+{c}", self.label),
            self.domain(),
            Arc::new(move |x| u.value(x) + c),
            d,
            self.second.clone(),
        )
    }
}

/// Crossing of a nondecreasing function with `f(a) < 0 < f(b)`, located to
/// machine precision (jumps are handled by the bisection fallback).
fn increasing_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    brent_root(&f, a, b, 1e-300).unwrap_or_else(|| monotone_crossing(&f, a, b, 0.0))
}

/// `c·x²/2`.
pub fn quadratic(c: f64) -> Result<Potential> {
    Potential::with_second(format!("quadratic:c={c}"), (f64::NEG_INFINITY, f64::INFINITY), move |x| 0.5 * c * x * x, move |x| c * x, move |_| c)
}

/// `g·x⁴`.
pub fn quartic(g: f64) -> Result<Potential> {
    Potential::with_second(
        format!("quartic:g={g}"),
        (f64::NEG_INFINITY, f64::INFINITY),
        move |x| g * x.powi(4),
        move |x| 4.0 * g * x.powi(3),
        move |x| 12.0 * g * x * x,
    )
}

/// `Σ a_k x^k`.
pub fn polynomial(coeffs: &[f64]) -> Result<Potential> {
    let c = coeffs.to_vec();
    let d: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
    let dd: Vec<f64> = d.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
    let horner = |p: Vec<f64>| move |x: f64| p.iter().rev().fold(0.0, |acc, a| acc * x + a);
    let label = format!(
        "poly:{}",
        coeffs.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
    );
    Potential::with_second(label, (f64::NEG_INFINITY, f64::INFINITY), horner(c), horner(d), horner(dd))
}

/// `|x|`.
pub fn absolute() -> Result<Potential> {
    Potential::new("abs", (f64::NEG_INFINITY, f64::INFINITY), |x: f64| x.abs(), |x: f64| {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        }
    })
}

/// Zero on `[−radius, radius]`, `+∞` outside; its equilibrium is the arcsine law.
pub fn hard_wall(radius: f64) -> Result<Potential> {
    if !(radius > 0.0) {
        return Err(FreeError::Domain(format!("wall radius must be positive, got {radius}")));
    }
    Potential::with_second(format!("wall:radius={radius}"), (-radius, radius), |_| 0.0, |_| 0.0, |_| 0.0)
}

/// `slope·x` on `[0, ∞)`; slope 1 gives the Marchenko–Pastur potential.
pub fn linear_on_half_line(slope: f64) -> Result<Potential> {
    Potential::with_second(format!("halfline:slope={slope}"), (0.0, f64::INFINITY), move |x| slope * x, move |_| slope, |_| 0.0)
}

/// Reads a CSV table with header `x,u` and builds a C¹ monotone-cubic interpolant
/// on the tabulated range.
pub fn from_table_file(path: &Path) -> Result<Potential> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "x" || &headers[1] != "u" {
        return Err(FreeError::Parse { msg: "expected header `x,u`".into(), pos: 0 });
    }
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let get = |i: usize| {
            rec.get(i)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or(FreeError::Parse { msg: format!("bad number in row {}", line + 2), pos: line + 2 })
        };
        xs.push(get(0)?);
        us.push(get(1)?);
    }
    table_potential(format!("table:{}", path.display()), xs, us)
}

/// Piecewise-cubic Hermite potential through `(xs, us)` with Fritsch–Carlson slopes.
pub fn table_potential(label: String, xs: Vec<f64>, us: Vec<f64>) -> Result<Potential> {
    let n = xs.len();
    if n < 3 || us.len() != n || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FreeError::Parse { msg: "table needs ≥ 3 rows with strictly ascending x".into(), pos: 0 });
    }
    let delta: Vec<f64> = (0..n - 1).map(|i| (us[i + 1] - us[i]) / (xs[i + 1] - xs[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 {
            0.5 * (delta[i - 1] + delta[i])
        } else {
            let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
            (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
        };
    }
    let (lo, hi) = (xs[0], xs[n - 1]);
    let table = Arc::new((xs, us, m));
    let t1 = table.clone();
    let locate = |xs: &[f64], x: f64| xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1) - 1;
    let value = move |x: f64| {
        let (xs, us, m) = &*table;
        let i = locate(xs, x);
        let h = xs[i + 1] - xs[i];
        crate::numerics::hermite((x - xs[i]) / h, us[i], us[i + 1], h * m[i], h * m[i + 1])
    };
    let derivative = move |x: f64| {
        let (xs, us, m) = &*t1;
        let i = locate(xs, x);
        let h = xs[i + 1] - xs[i];
        crate::numerics::hermite_derivative((x - xs[i]) / h, us[i], us[i + 1], h * m[i], h * m[i + 1]) / h
    };
    Potential::new(label, (lo, hi), value, derivative)
}

/// `u_z(x) = u(z + x)`.
pub fn shift_potential(u: &Potential, z: f64) -> Result<Potential> {
    if z == 0.0 {
        return Ok(u.clone());
    }
    let (a, b, c) = (u.clone(), u.clone(), u.clone());
    let second = u.second.as_ref().map(|_| Arc::new(move |x: f64| c.second_derivative(z + x)) as Scalar);
    Potential::assemble(
        format!("shifted:{},z={z}", u.label),
        (u.domain_lo - z, u.domain_hi - z),
        Arc::new(move |x| a.value(z + x)),
        Arc::new(move |x| b.derivative(z + x)),
        second,
    )
}

/// `u(x) + λx`.
pub fn tilt_linear(u: &Potential, lambda: f64) -> Result<Potential> {
    if lambda == 0.0 {
        return Ok(u.clone());
    }
    let (a, b) = (u.clone(), u.clone());
    Potential::assemble(
        format!("tilted:{},lam={lambda}", u.label),
        u.domain(),
        Arc::new(move |x| a.value(x) + lambda * x),
        Arc::new(move |x| b.derivative(x) + lambda),
        u.second.clone(),
    )
}

/// Maximizer of `x·y − u(x)` for a convex `u` over the search window.
#[derive(Clone)]
struct ConvexConjugate {
    u: Potential,
    lo: f64,
    hi: f64,
    lo_genuine: bool,
    hi_genuine: bool,
}

impl ConvexConjugate {
    fn new(u: &Potential) -> Self {
        let (dlo, dhi) = u.domain();
        let lo_genuine = dlo.is_finite() && dlo >= -SEARCH_LIMIT;
        let hi_genuine = dhi.is_finite() && dhi <= SEARCH_LIMIT;
        // Grow the window until the slope leaves the output box or the domain ends.
        let mut hi = if hi_genuine { dhi } else { (u.argmin().max(dlo) + 1.0).min(SEARCH_LIMIT) };
        if !hi_genuine {
            while hi < SEARCH_LIMIT && u.derivative(hi) <= LEGENDRE_BOX {
                hi = (2.0 * hi.abs() + 1.0).min(SEARCH_LIMIT);
            }
        }
        let mut lo = if lo_genuine { dlo } else { (u.argmin().min(dhi) - 1.0).max(-SEARCH_LIMIT) };
        if !lo_genuine {
            while lo > -SEARCH_LIMIT && u.derivative(lo) >= -LEGENDRE_BOX {
                lo = (-2.0 * lo.abs() - 1.0).max(-SEARCH_LIMIT);
            }
        }
        ConvexConjugate { u: u.clone(), lo, hi, lo_genuine, hi_genuine }
    }

    /// Returns the maximizer, or `None` when the supremum is not attained in the window.
    fn argmax(&self, y: f64) -> Option<f64> {
        let slack = 1e-12 * (1.0 + y.abs());
        if self.u.derivative(self.lo) >= y {
            if !self.lo_genuine && self.u.derivative(self.lo) > y + slack {
                return None;
            }
            return Some(self.lo);
        }
        if self.u.derivative(self.hi) < y {
            if !self.hi_genuine && self.u.derivative(self.hi) < y - slack {
                return None;
            }
            return Some(self.hi);
        }
        Some(increasing_root(|x| self.u.derivative(x) - y, self.lo, self.hi))
    }

    fn effective_domain(&self) -> (f64, f64) {
        let ylo = if self.lo_genuine { -LEGENDRE_BOX } else { self.u.derivative(self.lo).max(-LEGENDRE_BOX) };
        let yhi = if self.hi_genuine { LEGENDRE_BOX } else { self.u.derivative(self.hi).min(LEGENDRE_BOX) };
        (ylo, yhi)
    }
}

/// Legendre transform on a sampled grid: lower convex hull followed by a
/// monotone-argmax scan, so the cost is linear in the grid sizes. Ties resolve
/// to the smallest maximizer.
pub fn conjugate_on_grid(xs: &[f64], us: &[f64], ys: &[f64]) -> Vec<(f64, usize)> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        if !us[i].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (us[b] - us[a]) * (xs[i] - xs[a]) - (us[i] - us[a]) * (xs[b] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(ys.len());
    let mut k = 0;
    for &y in ys {
        while k + 1 < hull.len() {
            let (a, b) = (hull[k], hull[k + 1]);
            if xs[b] * y - us[b] > xs[a] * y - us[a] {
                k += 1;
            } else {
                break;
            }
        }
        let i = hull[k];
        out.push((xs[i] * y - us[i], i));
    }
    out
}

/// Numerical Legendre–Fenchel transform `u*(y) = sup_x (x·y − u(x))`, finite on
/// at most the box `[−64, 64]`.
pub fn legendre_transform(u: &Potential) -> Result<Potential> {
    let label = format!("legendre:{}", u.label);
    if u.is_convex() {
        let conj = Arc::new(ConvexConjugate::new(u));
        let (ylo, yhi) = conj.effective_domain();
        let (c1, c2) = (conj.clone(), conj.clone());
        let value = move |y: f64| match c1.argmax(y) {
            Some(x) => x * y - c1.u.value(x),
            None => f64::INFINITY,
        };
        let derivative = move |y: f64| c2.argmax(y).unwrap_or(if y > 0.0 { c2.hi } else { c2.lo });
        return Potential::new(label, (ylo, yhi), value, derivative);
    }
    // Non-convex input: tabulate the biconjugate-consistent hull on a fine grid.
    let (dlo, dhi) = u.domain();
    let a = dlo.max(-4.0 * LEGENDRE_BOX);
    let b = dhi.min(4.0 * LEGENDRE_BOX);
    let n = 1 << 15;
    let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let us: Vec<f64> = xs.iter().map(|&x| u.value(x)).collect();
    let m = 1 << 13;
    let ys: Vec<f64> = (0..m).map(|i| -LEGENDRE_BOX + 2.0 * LEGENDRE_BOX * i as f64 / (m - 1) as f64).collect();
    let conj = conjugate_on_grid(&xs, &us, &ys);
    let vals: Vec<f64> = conj.iter().map(|c| c.0).collect();
    table_potential(label, ys, vals)
}

/// Moreau–Yosida envelope `min_y u(y) + |y − x|²/(2λ)`.
pub fn moreau_yosida(u: &Potential, lambda: f64) -> Result<Potential> {
    if !(lambda > 0.0) {
        return Err(FreeError::Domain(format!("regularization parameter must be positive, got {lambda}")));
    }
    if !u.is_convex() {
        return Err(FreeError::Precondition(format!("Moreau–Yosida needs a convex potential, {} is not", u.label)));
    }
    let m = u.argmin();
    let base = u.clone();
    let prox = Arc::new(move |x: f64| -> f64 {
        let (dlo, dhi) = base.domain();
        let a = x.min(m).max(dlo);
        let b = x.max(m).min(dhi);
        if a >= b {
            return a;
        }
        let phi = |y: f64| base.derivative(y) + (y - x) / lambda;
        if phi(a) >= 0.0 {
            return a;
        }
        if phi(b) <= 0.0 {
            return b;
        }
        let y = increasing_root(phi, a, b);
        // Refine on the envelope itself when u' has a jump at the crossing.
        let obj = |z: f64| base.value(z) + (z - x).powi(2) / (2.0 * lambda);
        let (z, fz) = brent_minimize(obj, (y - 1e-6).max(a), (y + 1e-6).min(b), 1e-14);
        if fz < obj(y) { z } else { y }
    });
    let (p1, p2) = (prox.clone(), prox);
    let u1 = u.clone();
    Potential::new(
        format!("my:{},lam={lambda}", u.label),
        (f64::NEG_INFINITY, f64::INFINITY),
        move |x| {
            let y = p1(x);
            u1.value(y) + (y - x).powi(2) / (2.0 * lambda)
        },
        move |x| (x - p2(x)) / lambda,
    )
}

/// Pointwise derivative check used by tests and diagnostics.
pub fn numeric_derivative(u: &Potential, x: f64) -> f64 {
    central_difference(|t| u.value(t), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates() {
        let q = quadratic(1.0).unwrap();
        assert!(q.is_convex() && q.growth_ok() && q.is_even());
        let w = hard_wall(1.0).unwrap();
        assert!(w.is_convex() && w.growth_ok() && w.is_even());
        assert_eq!(w.value(1.5), f64::INFINITY);
        let t = tilt_linear(&quartic(0.25).unwrap(), 1.0).unwrap();
        assert!(t.growth_ok() && t.is_convex() && !t.is_even());
        let bad = polynomial(&[0.0, 0.0, -1.0, 0.0, 0.25]).unwrap();
        assert!(!bad.is_convex() && bad.growth_ok());
        let weak = Potential::new("log", (f64::NEG_INFINITY, f64::INFINITY), |x: f64| (1.0 + x * x).ln(), |x: f64| 2.0 * x / (1.0 + x * x)).unwrap();
        assert!(!weak.growth_ok());
    }

    #[test]
    fn quadratic_conjugates() {
        let q = legendre_transform(&quadratic(1.0).unwrap()).unwrap();
        for &y in &[-3.0, -0.5, 0.0, 1.2, 7.0] {
            assert!((q.value(y) - 0.5 * y * y).abs() < 1e-9);
        }
        let c = legendre_transform(&quadratic(4.0).unwrap()).unwrap();
        for &y in &[-2.0, 0.3, 5.0] {
            assert!((c.value(y) - y * y / 8.0).abs() < 1e-9);
            assert!((c.derivative(y) - y / 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn abs_and_wall_conjugates() {
        let a = legendre_transform(&absolute().unwrap()).unwrap();
        assert_eq!(a.domain(), (-1.0, 1.0));
        assert!(a.value(0.5).abs() < 1e-12);
        assert_eq!(a.value(1.5), f64::INFINITY);
        let w = legendre_transform(&hard_wall(1.0).unwrap()).unwrap();
        for &y in &[-3.0, -0.2, 0.0, 2.5] {
            assert!((w.value(y) - f64::abs(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_conjugate_matches_scan() {
        let xs: Vec<f64> = (0..2001).map(|i| -5.0 + i as f64 * 0.005).collect();
        let us: Vec<f64> = xs.iter().map(|x| x.powi(4) / 4.0).collect();
        let ys = [-3.0, -1.0, 0.0, 0.5, 2.0];
        let hull = conjugate_on_grid(&xs, &us, &ys);
        for (k, &y) in ys.iter().enumerate() {
            let brute = xs.iter().zip(&us).map(|(x, u)| x * y - u).fold(f64::NEG_INFINITY, f64::max);
            assert!((hull[k].0 - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn double_transform_and_fenchel_young() {
        let u = polynomial(&[0.0, 0.3, 0.5, 0.0, 0.1]).unwrap();
        let us = legendre_transform(&u).unwrap();
        let uss = legendre_transform(&us).unwrap();
        for &x in &[-2.0, -0.7, 0.0, 0.4, 1.9] {
            assert!((uss.value(x) - u.value(x)).abs() < 1e-6, "x={x}");
            let y = u.derivative(x);
            assert!((us.value(y) - (x * y - u.value(x))).abs() < 1e-6);
            assert!((us.derivative(y) - x).abs() < 1e-6);
        }
    }

    #[test]
    fn moreau_yosida_closed_form() {
        let lam = 0.5;
        let m = moreau_yosida(&quadratic(1.0).unwrap(), lam).unwrap();
        for &x in &[-2.0, 0.0, 1.3] {
            assert!((m.value(x) - x * x / (2.0 * (1.0 + lam))).abs() < 1e-10);
        }
        let a = moreau_yosida(&absolute().unwrap(), 1.0).unwrap();
        assert!(a.value(0.0).abs() < 1e-12);
        assert!((a.value(3.0) - 2.5).abs() < 1e-10);
        let q = quartic(0.25).unwrap();
        let tiny = moreau_yosida(&q, 1e-6).unwrap();
        assert!((tiny.value(1.1) - q.value(1.1)).abs() < 1e-4);
        assert!(moreau_yosida(&polynomial(&[0.0, 0.0, -1.0, 0.0, 1.0]).unwrap(), 1.0).is_err());
    }

    #[test]
    fn shift_and_tilt() {
        let q = quadratic(1.0).unwrap();
        let s = shift_potential(&q, 1.0).unwrap();
        assert!((s.value(0.5) - 1.125).abs() < 1e-15);
        let t = tilt_linear(&q, 0.7).unwrap();
        assert!((t.argmin() + 0.7).abs() < 1e-12);
        let w = shift_potential(&hard_wall(1.0).unwrap(), 0.0).unwrap();
        assert_eq!(w.domain(), (-1.0, 1.0));
    }
}
