//! Quadratic optimal transport on the line.
//!
//! Everything runs through quantile functions sampled on one shared
//! Gauss–Legendre grid, so `W₂`, the maximal correlation and the second moments
//! obey the polarization identity to rounding.

use crate::error::{FreeError, Result};
use crate::logpotential::chi;
use crate::measures::{AtomicMeasure, GridMeasure, TRANSPORT_ORDER};
use crate::numerics::{gauss_legendre, gauss_legendre_unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Comonotone,
    LpOracle,
}

impl Coupling {
    pub fn as_str(&self) -> &'static str {
        match self {
            Coupling::Comonotone => "comonotone",
            Coupling::LpOracle => "lp-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportValue {
    /// `W₂`, not squared.
    pub cost: f64,
    pub coupling: Coupling,
    /// Number of quantile nodes, or of atoms in the larger marginal.
    pub resolution: usize,
}

impl TransportValue {
    pub fn squared(&self) -> f64 {
        self.cost * self.cost
    }
}

fn quantile_pairs<F: Fn(f64, f64) -> f64>(mu: &GridMeasure, nu: &GridMeasure, f: F) -> f64 {
    let qm = mu.transport_quantiles();
    let qn = nu.transport_quantiles();
    let (_, w) = gauss_legendre_unit(TRANSPORT_ORDER);
    qm.iter().zip(qn.iter()).zip(&w).map(|((a, b), w)| w * f(*a, *b)).sum()
}

/// `W₂(μ, ν)` through the comonotone coupling.
pub fn w2(mu: &GridMeasure, nu: &GridMeasure) -> TransportValue {
    let sq = quantile_pairs(mu, nu, |a, b| (a - b) * (a - b));
    TransportValue { cost: sq.max(0.0).sqrt(), coupling: Coupling::Comonotone, resolution: TRANSPORT_ORDER }
}

/// `∫₀¹ Q_μ Q_ν dt`.
pub fn max_correlation(mu: &GridMeasure, nu: &GridMeasure) -> f64 {
    quantile_pairs(mu, nu, |a, b| a * b)
}

/// `∫₀¹ Q_μ² dt` on the transport grid.
pub fn quantile_second_moment(mu: &GridMeasure) -> f64 {
    quantile_pairs(mu, mu, |a, _| a * a)
}

/// `∫_{p₀}^{p₁} Q_μ(p) dp` with nodes clustered at both ends.
fn quantile_integral(mu: &GridMeasure, p0: f64, p1: f64) -> f64 {
    let rule = gauss_legendre(256);
    let half = 0.5 * std::f64::consts::PI;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let theta = half * (t + 1.0);
            let p = p0 + (p1 - p0) * 0.5 * (1.0 - theta.cos());
            let jac = (p1 - p0) * 0.5 * theta.sin() * half;
            w * jac * mu.quantile(p)
        })
        .sum()
}

/// Maximal correlation between a continuous and an atomic law.
pub fn max_correlation_atomic(mu: &GridMeasure, nu: &AtomicMeasure) -> f64 {
    let cum = nu.cumulative();
    let mut lo = 0.0;
    let mut acc = 0.0;
    for (k, (x, _)) in nu.atoms().iter().enumerate() {
        let hi = cum[k];
        if hi > lo {
            acc += x * quantile_integral(mu, lo, hi);
        }
        lo = hi;
    }
    acc
}

/// Exact `W₂` between atomic laws from the merged breakpoints of their CDFs.
pub fn w2_atomic(mu: &AtomicMeasure, nu: &AtomicMeasure) -> TransportValue {
    let (a, b) = (mu.atoms(), nu.atoms());
    let (ca, cb) = (mu.cumulative(), nu.cumulative());
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut sq = 0.0;
    while i < a.len() && j < b.len() {
        let next = ca[i].min(cb[j]);
        let d = a[i].0 - b[j].0;
        sq += (next - prev) * d * d;
        prev = next;
        if ca[i] <= next {
            i += 1;
        }
        if cb[j] <= next {
            j += 1;
        }
    }
    TransportValue { cost: sq.max(0.0).sqrt(), coupling: Coupling::Comonotone, resolution: a.len().max(b.len()) }
}

/// Basic cells of the transportation tableau.
struct Tableau {
    rows: usize,
    cols: usize,
    basis: Vec<(usize, usize)>,
    flow: Vec<f64>,
}

impl Tableau {
    fn north_west(supply: &[f64], demand: &[f64]) -> Self {
        let (rows, cols) = (supply.len(), demand.len());
        let (mut s, mut d) = (supply.to_vec(), demand.to_vec());
        let (mut i, mut j) = (0, 0);
        let mut basis = Vec::new();
        let mut flow = Vec::new();
        while i < rows && j < cols {
            let q = s[i].min(d[j]);
            basis.push((i, j));
            flow.push(q);
            s[i] -= q;
            d[j] -= q;
            if i + 1 == rows && j + 1 == cols {
                break;
            }
            // Advance one index at a time so the basis stays a spanning tree.
            if (s[i] <= d[j] && i + 1 < rows) || j + 1 == cols {
                i += 1;
            } else {
                j += 1;
            }
        }
        Tableau { rows, cols, basis, flow }
    }

    /// Dual potentials with `u_i + v_j = c_ij` on the basis.
    fn duals(&self, cost: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![f64::NAN; self.rows];
        let mut v = vec![f64::NAN; self.cols];
        u[0] = 0.0;
        let mut changed = true;
        while changed {
            changed = false;
            for &(i, j) in &self.basis {
                if !u[i].is_nan() && v[j].is_nan() {
                    v[j] = cost[i][j] - u[i];
                    changed = true;
                } else if u[i].is_nan() && !v[j].is_nan() {
                    u[i] = cost[i][j] - v[j];
                    changed = true;
                }
            }
        }
        (u, v)
    }

    /// Basis indices on the tree path from row `i` to column `j`.
    fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let nodes = self.rows + self.cols;
        let mut via = vec![usize::MAX; nodes];
        let mut seen = vec![false; nodes];
        let mut queue = std::collections::VecDeque::from([i]);
        seen[i] = true;
        while let Some(node) = queue.pop_front() {
            for (k, &(r, c)) in self.basis.iter().enumerate() {
                let other = if node == r {
                    self.rows + c
                } else if node == self.rows + c {
                    r
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    via[other] = k;
                    queue.push_back(other);
                }
            }
        }
        let mut edges = Vec::new();
        let mut node = self.rows + j;
        while node != i {
            let k = via[node];
            edges.push(k);
            let (r, c) = self.basis[k];
            node = if node == r { self.rows + c } else { r };
        }
        edges
    }
}

/// Exact discrete optimum by the transportation simplex from a north-west-corner
/// start. Intended as an independent check on [`w2_atomic`].
pub fn w2_atomic_oracle(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<TransportValue> {
    let (a, b) = (mu.atoms(), nu.atoms());
    if a.len() > 8 || b.len() > 8 {
        return Err(FreeError::Size(format!("oracle limited to 8 atoms, got {} and {}", a.len(), b.len())));
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|(x, _)| b.iter().map(|(y, _)| (x - y) * (x - y)).collect()).collect();
    let supply: Vec<f64> = a.iter().map(|p| p.1).collect();
    let demand: Vec<f64> = b.iter().map(|p| p.1).collect();
    let mut tab = Tableau::north_west(&supply, &demand);
    for _ in 0..1000 {
        let (u, v) = tab.duals(&cost);
        let mut entering = None;
        let mut best = -1e-14;
        for (i, row) in cost.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let reduced = c - u[i] - v[j];
                if reduced < best && !tab.basis.contains(&(i, j)) {
                    best = reduced;
                    entering = Some((i, j));
                }
            }
        }
        let Some((i, j)) = entering else { break };
        let path = tab.path(i, j);
        // Signs alternate along the cycle; the first path edge loses flow.
        let theta = path.iter().step_by(2).map(|&k| tab.flow[k]).fold(f64::INFINITY, f64::min);
        let leaving = *path.iter().step_by(2).find(|&&k| tab.flow[k] == theta).expect("cycle has a donor");
        for (pos, &k) in path.iter().enumerate() {
            tab.flow[k] += if pos % 2 == 0 { -theta } else { theta };
        }
        tab.basis[leaving] = (i, j);
        tab.flow[leaving] = theta;
    }
    let sq: f64 = tab.basis.iter().zip(&tab.flow).map(|(&(i, j), f)| f * cost[i][j]).sum();
    Ok(TransportValue { cost: sq.max(0.0).sqrt(), coupling: Coupling::LpOracle, resolution: a.len().max(b.len()) })
}

/// Absolute defect of `½W₂(μ_a, ν)² = ½W₂(μ, ν)² + a·bar(μ) − a·bar(ν) + a²/2`.
pub fn translation_identity_check(mu: &GridMeasure, nu: &GridMeasure, a: f64) -> f64 {
    let lhs = 0.5 * w2(&mu.translate(a), nu).squared();
    let rhs = 0.5 * w2(mu, nu).squared() + a * mu.barycenter() - a * nu.barycenter() + 0.5 * a * a;
    (lhs - rhs).abs()
}

/// `½∫x² dν − χ(ν) − ½W₂(μ, ν)²`; the moment-map equilibrium of a centered `μ`
/// minimizes it over `ν`.
pub fn ssfti_functional(mu: &GridMeasure, nu: &GridMeasure) -> Result<f64> {
    Ok(0.5 * nu.moment(2) - chi(nu)? - 0.5 * w2(mu, nu).squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_arcsine, make_semicircular};

    #[test]
    fn semicircle_scalings() {
        let a = make_semicircular(0.0, 4.0).unwrap();
        let b = make_semicircular(0.0, 0.25).unwrap();
        assert!((w2(&a, &b).squared() - 2.25).abs() < 1e-10);
        assert!((max_correlation(&a, &b) - 1.0).abs() < 1e-10);
        let s = make_semicircular(0.0, 1.0).unwrap();
        assert!(w2(&s, &s).cost == 0.0);
        assert!((w2(&s, &s.translate(0.3)).cost - 0.3).abs() < 1e-12);
    }

    #[test]
    fn polarization_and_translation() {
        let s = make_semicircular(0.2, 1.0).unwrap();
        let a = make_arcsine(1.5).unwrap();
        let lhs = s.moment(2) + a.moment(2) - 2.0 * max_correlation(&s, &a);
        assert!((lhs - w2(&s, &a).squared()).abs() < 1e-8, "{}", lhs - w2(&s, &a).squared());
        assert!(translation_identity_check(&a, &s, -0.7) < 1e-10);
        assert_eq!(translation_identity_check(&a, &s, 0.0), 0.0);
    }

    #[test]
    fn oracle_matches_quantile_formula() {
        let mu = AtomicMeasure::new(vec![(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]).unwrap();
        let nu = AtomicMeasure::new(vec![(-1.0, 0.1), (0.5, 0.6), (2.0, 0.1), (4.0, 0.2)]).unwrap();
        let exact = w2_atomic(&mu, &nu).squared();
        let oracle = w2_atomic_oracle(&mu, &nu).unwrap().squared();
        assert!((exact - oracle).abs() < 1e-12, "{exact} {oracle}");
        let d = w2_atomic_oracle(&AtomicMeasure::point_mass(0.0), &AtomicMeasure::point_mass(1.0)).unwrap();
        assert_eq!(d.cost, 1.0);
    }

    #[test]
    fn correlation_with_point_mass() {
        let s = make_semicircular(0.4, 1.0).unwrap();
        let v = max_correlation_atomic(&s, &AtomicMeasure::point_mass(2.0));
        assert!((v - 0.8).abs() < 1e-9, "{v}");
    }

    #[test]
    fn ssfti_value_at_semicircle() {
        let s = make_semicircular(0.0, 1.0).unwrap();
        let v = ssfti_functional(&s, &s).unwrap();
        assert!((v + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-7);
    }
}
