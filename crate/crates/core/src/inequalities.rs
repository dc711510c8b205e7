//! One dispatcher evaluating both sides of each free functional inequality.
//!
//! Pointwise hypotheses on potentials are checked on a 256 × 256 lattice over
//! a box 1.5 times wider than the equilibrium supports involved.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::equilibrium::{solve_equilibrium, EquilibriumResult, SolverConfig};
use crate::error::{FreeError, Result, Witness};
use crate::logpotential::{chi, chi_plus, log_jacobian, potential_integral, relative_entropy_semicircular};
use crate::measures::GridMeasure;
use crate::potentials::{legendre_transform, shift_potential, Potential};
use crate::transport::w2;

pub const LATTICE_POINTS: usize = 256;
const LATTICE_MARGIN: f64 = 1.5;
const CENTERING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InequalityKind {
    FreeTalagrand,
    Ssfti,
    SsftiGeneral,
    InverseFreeLsi,
    FreeSantalo,
    FreeSantaloShifted,
    InverseSantalo,
    FreeBrunnMinkowski,
    FreeLogPrekopa,
    InverseSsfti,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `lhs ≤ rhs`.
    AtMost,
    /// `lhs ≥ rhs`.
    AtLeast,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 10] = [
        InequalityKind::FreeTalagrand,
        InequalityKind::Ssfti,
        InequalityKind::SsftiGeneral,
        InequalityKind::InverseFreeLsi,
        InequalityKind::FreeSantalo,
        InequalityKind::FreeSantaloShifted,
        InequalityKind::InverseSantalo,
        InequalityKind::FreeBrunnMinkowski,
        InequalityKind::FreeLogPrekopa,
        InequalityKind::InverseSsfti,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityKind::FreeTalagrand => "FREE_TALAGRAND",
            InequalityKind::Ssfti => "SSFTI",
            InequalityKind::SsftiGeneral => "SSFTI_GENERAL",
            InequalityKind::InverseFreeLsi => "INVERSE_FREE_LSI",
            InequalityKind::FreeSantalo => "FREE_SANTALO",
            InequalityKind::FreeSantaloShifted => "FREE_SANTALO_SHIFTED",
            InequalityKind::InverseSantalo => "INVERSE_SANTALO",
            InequalityKind::FreeBrunnMinkowski => "FREE_BRUNN_MINKOWSKI",
            InequalityKind::FreeLogPrekopa => "FREE_LOG_PREKOPA",
            InequalityKind::InverseSsfti => "INVERSE_SSFTI",
        }
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            InequalityKind::InverseFreeLsi | InequalityKind::InverseSantalo | InequalityKind::FreeBrunnMinkowski => {
                Orientation::AtLeast
            }
            _ => Orientation::AtMost,
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityKind {
    type Err = FreeError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        InequalityKind::ALL
            .iter()
            .find(|k| k.name() == key)
            .copied()
            .ok_or_else(|| FreeError::Parse { msg: format!("unknown inequality kind `{s}`"), pos: 0 })
    }
}

/// Arguments for [`verify`]; each kind reads the fields it needs.
#[derive(Debug, Clone, Default)]
pub struct InequalityInputs {
    pub mu: Option<GridMeasure>,
    pub nu: Option<GridMeasure>,
    pub f: Option<Potential>,
    pub g: Option<Potential>,
    /// Third potential of the Brunn–Minkowski triple.
    pub h: Option<Potential>,
    pub theta: Option<f64>,
    /// Human-readable descriptors copied into the report.
    pub labels: BTreeMap<String, String>,
    pub solver: SolverConfig,
}

impl InequalityInputs {
    pub fn new() -> Self {
        InequalityInputs { solver: SolverConfig { check_probes: false, ..SolverConfig::default() }, ..Default::default() }
    }

    pub fn with_mu(mut self, label: &str, mu: GridMeasure) -> Self {
        self.labels.insert("mu".into(), label.into());
        self.mu = Some(mu);
        self
    }

    pub fn with_nu(mut self, label: &str, nu: GridMeasure) -> Self {
        self.labels.insert("nu".into(), label.into());
        self.nu = Some(nu);
        self
    }

    pub fn with_f(mut self, f: Potential) -> Self {
        self.labels.insert("f".into(), f.label().into());
        self.f = Some(f);
        self
    }

    pub fn with_g(mut self, g: Potential) -> Self {
        self.labels.insert("g".into(), g.label().into());
        self.g = Some(g);
        self
    }

    pub fn with_h(mut self, h: Potential) -> Self {
        self.labels.insert("h".into(), h.label().into());
        self.h = Some(h);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.labels.insert("theta".into(), theta.to_string());
        self.theta = Some(theta);
        self
    }

    fn measure(&self, which: &str) -> Result<&GridMeasure> {
        match which {
            "mu" => self.mu.as_ref(),
            _ => self.nu.as_ref(),
        }
        .ok_or_else(|| FreeError::Precondition(format!("missing measure `{which}`")))
    }

    fn potential(&self, which: &str) -> Result<&Potential> {
        match which {
            "f" => self.f.as_ref(),
            "g" => self.g.as_ref(),
            _ => self.h.as_ref(),
        }
        .ok_or_else(|| FreeError::Precondition(format!("missing potential `{which}`")))
    }

    /// Labels joined as `key=value;…` in key order.
    pub fn descriptor(&self) -> String {
        self.labels.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive when the inequality holds with room to spare.
    pub deficit: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub inputs: BTreeMap<String, String>,
    pub resolution: usize,
    pub runtime_ms: u64,
    /// Set when a side is infinite or undefined.
    pub sentinel: Option<String>,
}

fn deficit_of(kind: InequalityKind, lhs: f64, rhs: f64) -> f64 {
    match kind.orientation() {
        Orientation::AtMost => rhs - lhs,
        Orientation::AtLeast => lhs - rhs,
    }
}

fn centered(m: &GridMeasure, name: &str) -> Result<()> {
    let b = m.barycenter();
    if b.abs() >= CENTERING_TOL {
        return Err(FreeError::Precondition(format!("{name} has barycenter {b:.3e}, expected 0")));
    }
    Ok(())
}

fn require_even_convex(u: &Potential) -> Result<()> {
    if !u.is_convex() {
        return Err(FreeError::Precondition(format!("{} is not certified convex", u.label())));
    }
    if !u.is_even() {
        return Err(FreeError::Precondition(format!("{} is not certified even", u.label())));
    }
    Ok(())
}

fn radius(eq: &EquilibriumResult) -> f64 {
    eq.support_lo.abs().max(eq.support_hi.abs())
}

fn lattice(lo: f64, hi: f64) -> Vec<f64> {
    (0..LATTICE_POINTS).map(|i| lo + (hi - lo) * i as f64 / (LATTICE_POINTS - 1) as f64).collect()
}

/// Checks `slack(x, y) ≥ 0` on the lattice, allowing rounding relative to `scale`.
fn check_lattice<S, C>(what: &str, xs: &[f64], ys: &[f64], slack: S, scale: C) -> Result<()>
where
    S: Fn(f64, f64) -> f64,
    C: Fn(f64, f64) -> f64,
{
    let mut worst: Option<Witness> = None;
    for &x in xs {
        for &y in ys {
            let s = slack(x, y);
            let violated = s.is_nan() || s < -1e-8 * (1.0 + scale(x, y));
            if violated && worst.as_ref().is_none_or(|w| s < w.slack || s.is_nan()) {
                worst = Some(Witness { x, y, slack: s });
            }
        }
    }
    match worst {
        Some(w) => Err(FreeError::Hypothesis { msg: format!("{what} fails at ({:.6}, {:.6})", w.x, w.y), witness: w }),
        None => Ok(()),
    }
}

fn equilibrium(u: &Potential, inputs: &InequalityInputs) -> Result<EquilibriumResult> {
    solve_equilibrium(u, &inputs.solver)
}

struct Sides {
    lhs: f64,
    rhs: f64,
}

fn evaluate(kind: InequalityKind, inputs: &InequalityInputs) -> Result<Sides> {
    use InequalityKind::*;
    match kind {
        FreeTalagrand => {
            let mu = inputs.measure("mu")?;
            let sigma = crate::measures::make_semicircular_n(0.0, 1.0, inputs.solver.nodes)?;
            Ok(Sides { lhs: w2(mu, &sigma).squared(), rhs: 2.0 * relative_entropy_semicircular(mu)? })
        }
        Ssfti | SsftiGeneral => {
            let (mu, nu) = (inputs.measure("mu")?, inputs.measure("nu")?);
            if kind == Ssfti {
                centered(mu, "mu")?;
            }
            let mut rhs = 2.0 * relative_entropy_semicircular(mu)? + 2.0 * relative_entropy_semicircular(nu)?;
            if kind == SsftiGeneral {
                rhs -= 2.0 * mu.barycenter() * nu.barycenter();
            }
            Ok(Sides { lhs: w2(mu, nu).squared(), rhs })
        }
        InverseFreeLsi => {
            let u = inputs.potential("f")?;
            if !u.is_convex() {
                return Err(FreeError::Precondition(format!("{} is not certified convex", u.label())));
            }
            let eq = equilibrium(u, inputs)?;
            let chi_sigma = 0.5 * (2.0 * PI * std::f64::consts::E).ln();
            Ok(Sides { lhs: chi_sigma - chi(&eq.measure)?, rhs: 0.5 * log_jacobian(&eq.measure, u) })
        }
        FreeSantalo | FreeSantaloShifted => {
            let (f, g) = (inputs.potential("f")?, inputs.potential("g")?);
            let ef = equilibrium(f, inputs)?;
            let eg = equilibrium(g, inputs)?;
            let (f, g, ef, eg) = if kind == FreeSantaloShifted {
                // Translate f so that its equilibrium is centered; g absorbs the tilt.
                let z = ef.measure.barycenter();
                let fz = shift_potential(f, z)?;
                let gz = crate::potentials::tilt_linear(g, -z)?;
                let (efz, egz) = (equilibrium(&fz, inputs)?, equilibrium(&gz, inputs)?);
                (fz, gz, efz, egz)
            } else {
                (f.clone(), g.clone(), ef, eg)
            };
            if ef.measure.barycenter().abs() >= CENTERING_TOL && eg.measure.barycenter().abs() >= CENTERING_TOL {
                return Err(FreeError::Precondition(format!(
                    "neither equilibrium is centered (barycenters {:.3e}, {:.3e})",
                    ef.measure.barycenter(),
                    eg.measure.barycenter()
                )));
            }
            let l = LATTICE_MARGIN * radius(&ef).max(radius(&eg));
            let grid = lattice(-l, l);
            check_lattice("f(x) + g(y) ≥ xy", &grid, &grid, |x, y| f.value(x) + g.value(y) - x * y, |x, y| {
                (x * y).abs() + f.value(x).abs() + g.value(y).abs()
            })?;
            Ok(Sides { lhs: ef.pressure + eg.pressure, rhs: (2.0 * PI).ln() })
        }
        InverseSantalo => {
            let f = inputs.potential("f")?;
            require_even_convex(f)?;
            let fs = legendre_transform(f)?;
            let (ef, es) = (equilibrium(f, inputs)?, equilibrium(&fs, inputs)?);
            Ok(Sides { lhs: ef.pressure + es.pressure, rhs: 4.0f64.ln() })
        }
        FreeBrunnMinkowski => {
            let (u1, u2, u3) = (inputs.potential("f")?, inputs.potential("g")?, inputs.potential("h")?);
            let theta = inputs.theta.ok_or_else(|| FreeError::Precondition("missing theta".into()))?;
            if !(0.0..=1.0).contains(&theta) {
                return Err(FreeError::Domain(format!("theta = {theta} outside [0, 1]")));
            }
            let (e1, e2, e3) = (equilibrium(u1, inputs)?, equilibrium(u2, inputs)?, equilibrium(u3, inputs)?);
            let l = LATTICE_MARGIN * radius(&e1).max(radius(&e2)).max(radius(&e3));
            let grid = lattice(-l, l);
            check_lattice(
                "U3(θx + (1−θ)y) ≤ θU1(x) + (1−θ)U2(y)",
                &grid,
                &grid,
                |x, y| {
                    let (a, b) = (u1.value(x), u2.value(y));
                    if a.is_infinite() || b.is_infinite() {
                        return f64::INFINITY;
                    }
                    theta * a + (1.0 - theta) * b - u3.value(theta * x + (1.0 - theta) * y)
                },
                |x, y| u1.value(x).abs() + u2.value(y).abs(),
            )?;
            Ok(Sides { lhs: e3.pressure, rhs: theta * e1.pressure + (1.0 - theta) * e2.pressure })
        }
        FreeLogPrekopa => {
            let (u1, u2) = (inputs.potential("f")?, inputs.potential("g")?);
            for u in [u1, u2] {
                if u.domain().0 < 0.0 {
                    return Err(FreeError::Precondition(format!("{} must live on [0, ∞)", u.label())));
                }
            }
            let (e1, e2) = (equilibrium(u1, inputs)?, equilibrium(u2, inputs)?);
            let l = (LATTICE_MARGIN * e1.support_hi.max(e2.support_hi)).sqrt();
            let grid = lattice(0.0, l);
            check_lattice(
                "xy ≤ U1(x²)/2 + U2(y²)/2",
                &grid,
                &grid,
                |x, y| 0.5 * u1.value(x * x) + 0.5 * u2.value(y * y) - x * y,
                |x, y| x * y,
            )?;
            let side = |e: &EquilibriumResult, u: &Potential| -> Result<f64> {
                Ok(chi_plus(&e.measure)? - potential_integral(&e.measure, u)?)
            };
            Ok(Sides { lhs: 0.5 * side(&e1, u1)? + 0.5 * side(&e2, u2)?, rhs: PI.ln() })
        }
        InverseSsfti => {
            let f = inputs.potential("f")?;
            require_even_convex(f)?;
            let fs = legendre_transform(f)?;
            let (ef, es) = (equilibrium(f, inputs)?, equilibrium(&fs, inputs)?);
            let (mu, mus) = (&ef.measure, &es.measure);
            Ok(Sides {
                lhs: relative_entropy_semicircular(mu)? + relative_entropy_semicircular(mus)?,
                rhs: 0.5 * w2(mu, mus).squared() + 0.5 * (PI / 2.0).ln(),
            })
        }
    }
}

/// Evaluates one inequality. Hypothesis violations are errors; infinite
/// entropies give a failed report with `sentinel` set.
pub fn verify(kind: InequalityKind, inputs: &InequalityInputs, tol: f64) -> Result<InequalityReport> {
    let start = Instant::now();
    let (lhs, rhs, sentinel) = match evaluate(kind, inputs) {
        Ok(s) => {
            let note = (!s.lhs.is_finite() || !s.rhs.is_finite()).then(|| "non-finite side".to_string());
            (s.lhs, s.rhs, note)
        }
        Err(FreeError::InfiniteEnergy(msg)) => (f64::NAN, f64::NAN, Some(msg)),
        Err(e) => return Err(e),
    };
    let deficit = if sentinel.is_some() { f64::NEG_INFINITY } else { deficit_of(kind, lhs, rhs) };
    let pass = sentinel.is_none() && deficit >= -tol;
    Ok(InequalityReport {
        kind,
        lhs,
        rhs,
        deficit,
        tolerance: tol,
        pass,
        inputs: inputs.labels.clone(),
        resolution: inputs.solver.nodes,
        runtime_ms: start.elapsed().as_millis() as u64,
        sentinel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::make_semicircular;
    use crate::potentials::{linear_on_half_line, quadratic, quartic};

    #[test]
    fn ssfti_equality_at_two() {
        let inputs = InequalityInputs::new()
            .with_mu("sc:0,4", make_semicircular(0.0, 4.0).unwrap())
            .with_nu("sc:0,0.25", make_semicircular(0.0, 0.25).unwrap());
        let r = verify(InequalityKind::Ssfti, &inputs, 1e-3).unwrap();
        assert!(r.pass && (r.lhs - 2.25).abs() < 1e-6 && r.deficit.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn santalo_equality_and_prekopa() {
        let q = quadratic(1.0).unwrap();
        let inputs = InequalityInputs::new().with_f(q.clone()).with_g(q);
        let r = verify(InequalityKind::FreeSantalo, &inputs, 1e-3).unwrap();
        assert!(r.pass && r.deficit.abs() < 1e-6, "{r:?}");
        let id = linear_on_half_line(1.0).unwrap();
        let inputs = InequalityInputs::new().with_f(id.clone()).with_g(id);
        let r = verify(InequalityKind::FreeLogPrekopa, &inputs, 1e-3).unwrap();
        assert!(r.pass && r.deficit.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn lattice_violation_is_reported() {
        let inputs = InequalityInputs::new().with_f(quadratic(1.0).unwrap()).with_g(quadratic(0.5).unwrap());
        match verify(InequalityKind::FreeSantalo, &inputs, 1e-3) {
            Err(FreeError::Hypothesis { witness, .. }) => assert!(witness.slack < 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inverse_lsi_quartic_is_strict() {
        let inputs = InequalityInputs::new().with_f(quartic(0.25).unwrap());
        let r = verify(InequalityKind::InverseFreeLsi, &inputs, 1e-3).unwrap();
        assert!(r.pass && r.deficit > 1e-3, "{r:?}");
    }
}
