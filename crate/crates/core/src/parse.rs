//! Text descriptors for measures and potentials.
//!
//! Measures: `semicircle:mean=<r>,var=<r>`, `arcsine:radius=<r>`, `mp:c=<r>`,
//! `quartercircle`, `table:<path>` (CSV `x,density`), `eq:<potential>`.
//!
//! Potentials: `quadratic:c=<r>`, `quartic:g=<r>`, `abs`, `wall:radius=<r>`,
//! `halfline:slope=<r>`, `poly:a0;a1;…`, `shifted:<p>,z=<r>`, `tilted:<p>,lam=<r>`,
//! `legendre:<p>`, `my:<p>,lam=<r>`, `table:<path>` (CSV `x,u`).
//!
//! Errors carry the byte offset of the offending token in the original string.

use std::path::Path;

use crate::equilibrium::{solve_equilibrium, SolverConfig};
use crate::error::{FreeError, Result};
use crate::measures::{
    make_arcsine_n, make_marchenko_pastur_family_n, make_quarter_circle, make_semicircular_n, GridMeasure,
};
use crate::potentials::{self, Potential};

fn err(msg: impl Into<String>, pos: usize) -> FreeError {
    FreeError::Parse { msg: msg.into(), pos }
}

fn split_head(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((h, rest)) => (h, Some(rest)),
        None => (s, None),
    }
}

fn number(text: &str, pos: usize) -> Result<f64> {
    let v: f64 = text.trim().parse().map_err(|_| err(format!("expected a number, found `{text}`"), pos))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite number `{text}`"), pos));
    }
    Ok(v)
}

/// Parses `k1=v1,k2=v2` against the allowed keys; missing keys take `defaults`.
fn keyed(args: &str, base: usize, keys: &[(&str, Option<f64>)]) -> Result<Vec<f64>> {
    let mut out: Vec<Option<f64>> = keys.iter().map(|(_, d)| *d).collect();
    let mut pos = base;
    if !args.is_empty() {
        for part in args.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{part}`"), pos))?;
            let slot = keys
                .iter()
                .position(|(name, _)| *name == k.trim())
                .ok_or_else(|| err(format!("unknown key `{k}`"), pos))?;
            out[slot] = Some(number(v, pos + k.len() + 1)?);
            pos += part.len() + 1;
        }
    }
    keys.iter()
        .zip(out)
        .map(|((name, _), v)| v.ok_or_else(|| err(format!("missing key `{name}`"), base)))
        .collect()
}

/// Splits `<inner>,key=<r>` at the last comma.
fn wrapped<'a>(rest: &'a str, base: usize, key: &str) -> Result<(&'a str, f64)> {
    let (inner, tail) = rest.rsplit_once(',').ok_or_else(|| err(format!("expected `,{key}=<r>`"), base + rest.len()))?;
    let tail_pos = base + inner.len() + 1;
    let v = keyed(tail, tail_pos, &[(key, None)])?;
    Ok((inner, v[0]))
}

pub fn parse_potential(s: &str) -> Result<Potential> {
    potential_at(s.trim(), 0)
}

fn potential_at(s: &str, base: usize) -> Result<Potential> {
    let (head, rest) = split_head(s);
    let arg_pos = base + head.len() + 1;
    let args = rest.unwrap_or("");
    let need_rest = || rest.ok_or_else(|| err(format!("`{head}` needs arguments after `:`"), base + head.len()));
    match head {
        "quadratic" => potentials::quadratic(keyed(args, arg_pos, &[("c", Some(1.0))])?[0]),
        "quartic" => potentials::quartic(keyed(args, arg_pos, &[("g", Some(0.25))])?[0]),
        "abs" if rest.is_none() => potentials::absolute(),
        "wall" => potentials::hard_wall(keyed(args, arg_pos, &[("radius", Some(1.0))])?[0]),
        "halfline" => potentials::linear_on_half_line(keyed(args, arg_pos, &[("slope", Some(1.0))])?[0]),
        "poly" => {
            let mut pos = arg_pos;
            let mut coeffs = Vec::new();
            for c in need_rest()?.split(';') {
                coeffs.push(number(c, pos)?);
                pos += c.len() + 1;
            }
            potentials::polynomial(&coeffs)
        }
        "shifted" => {
            let (inner, z) = wrapped(need_rest()?, arg_pos, "z")?;
            potentials::shift_potential(&potential_at(inner, arg_pos)?, z)
        }
        "tilted" => {
            let (inner, lam) = wrapped(need_rest()?, arg_pos, "lam")?;
            potentials::tilt_linear(&potential_at(inner, arg_pos)?, lam)
        }
        "my" => {
            let (inner, lam) = wrapped(need_rest()?, arg_pos, "lam")?;
            potentials::moreau_yosida(&potential_at(inner, arg_pos)?, lam)
        }
        "legendre" => potentials::legendre_transform(&potential_at(need_rest()?, arg_pos)?),
        "table" => potentials::from_table_file(Path::new(need_rest()?)),
        _ => Err(err(format!("unknown potential `{head}`"), base)),
    }
}

pub fn parse_measure(s: &str, nodes: usize) -> Result<GridMeasure> {
    let s = s.trim();
    let (head, rest) = split_head(s);
    let arg_pos = head.len() + 1;
    let args = rest.unwrap_or("");
    match head {
        "semicircle" => {
            let v = keyed(args, arg_pos, &[("mean", Some(0.0)), ("var", Some(1.0))])?;
            make_semicircular_n(v[0], v[1], nodes)
        }
        "arcsine" => make_arcsine_n(keyed(args, arg_pos, &[("radius", Some(1.0))])?[0], nodes),
        "mp" => make_marchenko_pastur_family_n(keyed(args, arg_pos, &[("c", Some(1.0))])?[0], nodes),
        "quartercircle" if rest.is_none() => make_quarter_circle(),
        "table" => {
            let path = rest.ok_or_else(|| err("`table` needs a path", head.len()))?;
            GridMeasure::from_table_file(Path::new(path), nodes)
        }
        "eq" => {
            let inner = rest.ok_or_else(|| err("`eq` needs a potential", head.len()))?;
            let u = potential_at(inner, arg_pos)?;
            let cfg = SolverConfig { nodes, check_probes: false, ..SolverConfig::default() };
            Ok(solve_equilibrium(&u, &cfg)?.measure)
        }
        _ => Err(err(format!("unknown measure `{head}`"), 0)),
    }
}
