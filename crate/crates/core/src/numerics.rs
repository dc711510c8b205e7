//! Quadrature rules, scalar optimizers and cosine-series transforms shared by the
//! measure, potential and solver modules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Gauss–Legendre rule on [-1, 1] (nodes ascending, weights summing to 2).
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi initial guess, then Newton on the three-term recurrence.
        let k = (i + 1) as f64;
        let theta = PI * (k - 0.25) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 * x.abs().max(1e-3) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached Gauss–Legendre rule of order `n` on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry(n)
        .or_insert(rule)
        .clone()
}

/// Gauss–Legendre rule mapped to (0, 1).
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(n);
    let p = rule.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let w = rule.weights.iter().map(|w| 0.5 * w).collect();
    (p, w)
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_X[j];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[j] * s;
        if j % 2 == 1 {
            g += GK_WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature with a global error target.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut segments = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    let mut evaluations = 1;
    while err > abs_tol.max(rel_tol * total.abs()) && evaluations < 2000 {
        // Split the segment carrying the largest error estimate.
        let (idx, _) = segments
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, s)| if s.3 > best.1 { (i, s.3) } else { best });
        let (sa, sb, sv, se) = segments.swap_remove(idx);
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            segments.push((sa, sb, sv, 0.0));
            err -= se;
            continue;
        }
        let (v1, e1) = gk15(&f, sa, mid);
        let (v2, e2) = gk15(&f, mid, sb);
        total += v1 + v2 - sv;
        err += e1 + e2 - se;
        segments.push((sa, mid, v1, e1));
        segments.push((mid, sb, v2, e2));
        evaluations += 2;
    }
    // Re-sum in position order so the result does not depend on split history.
    segments.sort_by(|x, y| x.0.total_cmp(&y.0));
    segments.iter().map(|s| s.2).sum()
}

/// Brent minimization of a unimodal function on [a, b]. Returns (argmin, min).
pub fn brent_minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + GOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol * (x.abs() + 1e-2);
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Brent root finder on a sign-changing bracket.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Some(b)
}

/// Bisection for a nondecreasing function, returning the smallest x in [a, b]
/// with f(x) >= 0 to within `xtol`. Works for step functions.
pub fn monotone_crossing<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cosine coefficients of samples taken at the midpoint angles
/// s_j = (j + 1/2)π/n, so that a(s) ≈ Σ_k b_k cos(k s).
pub fn cosine_coefficients(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let len = 2 * n;
    let mut buf: Vec<Complex<f64>> = samples
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat_n(Complex::new(0.0, 0.0), n))
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    (0..n)
        .map(|k| {
            let phase = -(k as f64) * PI / len as f64;
            let z = buf[k] * Complex::new(phase.cos(), phase.sin());
            let scale = if k == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 };
            z.re * scale
        })
        .collect()
}

/// Evaluates Σ b_k cos(k s) and b_0 s + Σ_{k≥1} b_k sin(k s)/k on the uniform grid
/// s_i = iπ/m, i = 0..=m.
pub fn cosine_series_on_grid(coeffs: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let len = 2 * m;
    let mut cos_buf = vec![Complex::new(0.0, 0.0); len];
    let mut sin_buf = vec![Complex::new(0.0, 0.0); len];
    for (k, &b) in coeffs.iter().enumerate() {
        // Fold aliased frequencies when the grid is coarser than the series.
        let idx = k % len;
        cos_buf[idx] += Complex::new(b, 0.0);
        if k > 0 {
            sin_buf[idx] += Complex::new(b / k as f64, 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(len);
    fft.process(&mut cos_buf);
    fft.process(&mut sin_buf);
    let b0 = coeffs.first().copied().unwrap_or(0.0);
    let values = (0..=m).map(|i| cos_buf[i % len].re).collect();
    let integrals = (0..=m)
        .map(|i| {
            let s = PI * i as f64 / m as f64;
            b0 * s + sin_buf[i % len].im
        })
        .collect();
    (values, integrals)
}

/// Clenshaw evaluation of Σ_k c_k cos(k θ).
pub fn cosine_series(coeffs: &[f64], theta: f64) -> f64 {
    let x = theta.cos();
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Cubic Hermite interpolation on [0, 1] given endpoint values and
/// derivatives already scaled by the interval length.
#[inline]
pub fn hermite(t: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * d1
}

#[inline]
pub fn hermite_derivative(t: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * y0
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (-6.0 * t2 + 6.0 * t) * y1
        + (3.0 * t2 - 2.0 * t) * d1
}

/// Solves hermite(t) = target for t in [0, 1] assuming a monotone segment.
pub fn invert_hermite(target: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let span = y1 - y0;
    if span == 0.0 {
        return 0.5;
    }
    let increasing = span > 0.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut t = ((target - y0) / span).clamp(0.0, 1.0);
    for _ in 0..60 {
        let v = hermite(t, y0, y1, d0, d1) - target;
        if v == 0.0 {
            return t;
        }
        if (v < 0.0) == increasing {
            lo = t;
        } else {
            hi = t;
        }
        let d = hermite_derivative(t, y0, y1, d0, d1);
        let mut next = t - v / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() < 1e-15 {
            return next;
        }
        t = next;
    }
    t
}

/// Numerical derivative by a centered difference with a scale-aware step.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-5 * (1.0 + x.abs());
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(12);
        let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let big = gauss_legendre(8192);
        let total: f64 = big.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
        let m2: f64 = big.nodes.iter().zip(&big.weights).map(|(x, w)| w * x * x).sum();
        assert!((m2 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_quadrature_handles_kinks() {
        let v = integrate(|x: f64| x.abs(), -1.0, 2.0, 1e-13, 1e-13);
        assert!((v - 2.5).abs() < 1e-12);
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn brent_finds_minimum_and_root() {
        let (x, _) = brent_minimize(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-8);
        let r = brent_root(|x| x * x * x - 2.0, 0.0, 3.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn cosine_transform_round_trip() {
        let n = 64;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let s = (j as f64 + 0.5) * PI / n as f64;
                1.0 + 0.5 * (2.0 * s).cos() - 0.25 * (5.0 * s).cos()
            })
            .collect();
        let c = cosine_coefficients(&samples);
        assert!((c[0] - 1.0).abs() < 1e-13);
        assert!((c[2] - 0.5).abs() < 1e-13);
        assert!((c[5] + 0.25).abs() < 1e-13);
        let (vals, ints) = cosine_series_on_grid(&c, 32);
        let s = PI * 7.0 / 32.0;
        assert!((vals[7] - (1.0 + 0.5 * (2.0 * s).cos() - 0.25 * (5.0 * s).cos())).abs() < 1e-12);
        let exact = s + 0.25 * (2.0 * s).sin() - 0.05 * (5.0 * s).sin();
        assert!((ints[7] - exact).abs() < 1e-12);
        assert!((cosine_series(&c, s) - vals[7]).abs() < 1e-12);
    }
}
