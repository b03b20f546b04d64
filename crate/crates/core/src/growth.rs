//! Growth profiling: dimensions of `(k + Vr)^n` and fitted log-log slopes.
//!
//! The span sequence `S_n` of all products of at most `n` factors drawn
//! from `{v*r : v in V}` is computed exactly; the fitted slope is the one
//! floating-point number in this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{self, Matrix, SparseVec};
use crate::kernel::{heis_ball_sizes, AlgebraElement, Truncation};
use crate::rat::Rat;
use crate::SCHEMA_VERSION;

#[derive(Clone, Debug)]
pub struct PowerDims {
    pub points: Vec<(usize, usize)>,
    /// True when the ambient cap cut the sequence short.
    pub truncated: bool,
}

/// Exact dimensions of `S_n = span{products of <= n factors from V*r}`,
/// `n = 0..=n_max`. Hitting the ambient cap returns the computed prefix
/// with the flag set.
pub fn power_dims(v: &[AlgebraElement], r: &AlgebraElement, n_max: usize) -> Result<PowerDims> {
    if v.is_empty() {
        return Err(Error::Invalid("V must contain at least one element".into()));
    }
    let family = r.family().clone();
    let mut factors = Vec::with_capacity(v.len());
    for e in v {
        if e.family() != &family {
            return Err(Error::FamilyMismatch {
                left: e.family().to_string(),
                right: family.to_string(),
            });
        }
        let f = e.mul(r)?;
        if !f.is_zero() {
            factors.push(f);
        }
    }
    let max_deg = factors
        .iter()
        .map(|f| f.degree())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);

    let mut points = vec![(0usize, 1usize)];
    let mut truncated = false;
    // Basis rows of S_n, coordinates over the current truncation; the
    // truncation only grows, and smaller bases are prefixes of larger ones,
    // so the coordinates stay valid across steps.
    let mut trunc = Truncation::new(&family, 0)?;
    let mut rows: Vec<SparseVec> = vec![vec![(0, Rat::one())]];
    let mut dim = 1usize;

    for n in 1..=n_max {
        if factors.is_empty() {
            points.push((n, dim));
            continue;
        }
        let next_trunc = match Truncation::new(&family, n * max_deg) {
            Ok(t) => t,
            Err(Error::CapExceeded { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let mut new_rows = rows.clone();
        for row in &rows {
            let elem = trunc.vec_to_element(row);
            for f in &factors {
                let prod = f.mul(&elem)?;
                new_rows.push(next_trunc.element_to_vec(&prod)?);
            }
        }
        let sub = exactlin::rref(&Matrix::from_rows(next_trunc.len(), new_rows)?);
        let new_dim = sub.dim();
        rows = sub.basis_rows().to_vec();
        trunc = next_trunc;
        points.push((n, new_dim));
        if new_dim == dim {
            // The sequence has stabilized: S_{n+1} = S_n forces S_m = S_n
            // for all larger m.
            for m in (n + 1)..=n_max {
                points.push((m, new_dim));
            }
            dim = new_dim;
            break;
        }
        dim = new_dim;
    }
    Ok(PowerDims { points, truncated })
}

/// Least-squares slope of `log dim` against `log n` over the window.
/// Needs at least three points with `n >= 2`.
pub fn fit_slope(points: &[(usize, usize)], window: (usize, usize)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, d)| *n >= 2 && *n >= window.0 && *n <= window.1 && *d >= 1)
        .map(|(n, d)| ((*n as f64).ln(), (*d as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::WindowTooSmall);
    }
    let k = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let denom = k * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::WindowTooSmall);
    }
    Ok((k * sxy - sx * sy) / denom)
}

/// Exponential-growth heuristic: successive base-2 log-dims grow by more
/// than 0.5 on average. Distinguishes the polynomial regime from
/// free-algebra growth without claiming a proof.
pub fn exponential_flag(points: &[(usize, usize)]) -> bool {
    let mut diffs = Vec::new();
    for pair in points.windows(2) {
        let (_, d0) = pair[0];
        let (_, d1) = pair[1];
        if d0 >= 1 && d1 >= 1 {
            diffs.push((d1 as f64).log2() - (d0 as f64).log2());
        }
    }
    if diffs.is_empty() {
        return false;
    }
    diffs.iter().sum::<f64>() / diffs.len() as f64 > 0.5
}

/// Cayley-ball sizes of the Heisenberg group over `{x,x^-1,y,y^-1}`, the
/// standard degree-4 polynomial-growth specimen.
pub fn heisenberg_growth(n_max: usize) -> Result<Vec<(usize, usize)>> {
    heis_ball_sizes(n_max)
}

/// Serializable growth profile.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub schema_version: u32,
    pub kind: String,
    pub family: String,
    pub v: Vec<String>,
    pub r: String,
    pub points: Vec<(usize, usize)>,
    pub truncated: bool,
    pub fit_window: (usize, usize),
    /// Absent when the window holds fewer than three usable points.
    pub fitted_slope: Option<f64>,
    pub exponential: bool,
}

pub const GROWTH_KIND: &str = "growth_profile";

/// Profile a `(V, r)` pair. The fit window defaults to the top half of the
/// computed points.
pub fn profile(
    v: &[AlgebraElement],
    r: &AlgebraElement,
    n_max: usize,
    window: Option<(usize, usize)>,
) -> Result<GrowthProfile> {
    let dims = power_dims(v, r, n_max)?;
    let last = dims.points.last().map_or(0, |(n, _)| *n);
    let window = window.unwrap_or((last / 2, last));
    let fitted_slope = match fit_slope(&dims.points, window) {
        Ok(s) => Some(s),
        Err(Error::WindowTooSmall) => None,
        Err(e) => return Err(e),
    };
    let exponential = exponential_flag(&dims.points);
    Ok(GrowthProfile {
        schema_version: SCHEMA_VERSION,
        kind: GROWTH_KIND.into(),
        family: r.family().to_string(),
        v: v.iter().map(|e| e.to_string()).collect(),
        r: r.to_string(),
        points: dims.points,
        truncated: dims.truncated,
        fit_window: window,
        fitted_slope,
        exponential,
    })
}
