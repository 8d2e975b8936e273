use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::solve::{CSolution, LinearInC};
use super::{soliton_system, SolitonError, SolitonSystem};
use crate::exactpoly::{rational, Rational};
use crate::geometry::ConnectionKind;
use crate::liealgebras::{sample_parameters, LieAlgebraFamily, ParameterPoint, SampleMode, Value};

/// `lambda0` values scanned by default, as `(numerator, denominator)`.
pub const DEFAULT_LAMBDA0_GRID: [(i64, i64); 5] = [(-1, 1), (0, 1), (1, 4), (1, 2), (1, 1)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    /// Index into [`ScanReport::points`].
    pub point: usize,
    pub lambda0: Value,
    pub solvable: bool,
    pub c: Option<CSolution>,
    /// Largest residual at the solved `c`, or at the least-squares `c` when
    /// the system is inconsistent.
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub family: String,
    pub kind: ConnectionKind,
    pub seed: u64,
    pub points: Vec<ParameterPoint>,
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    pub fn solvable_count(&self) -> usize {
        self.entries.iter().filter(|e| e.solvable).count()
    }
}

/// Samples `count` family points and solves for `c` at each `lambda0`.
/// Entries are ordered by point, then by grid position.
pub fn scan(
    fam: &LieAlgebraFamily,
    kind: ConnectionKind,
    seed: u64,
    count: usize,
    lambda0_grid: &[Rational],
    tol: f64,
) -> Result<ScanReport, SolitonError> {
    let sys = soliton_system(fam, kind);
    let points = sample_parameters(fam, seed, count, SampleMode::Exact);
    let entries = scan_points(&sys, &points, lambda0_grid, tol)?;
    Ok(ScanReport { family: fam.label(), kind, seed, points, entries })
}

/// Solves for `c` at every point and grid value, in parallel over points.
pub fn scan_points(
    sys: &SolitonSystem,
    points: &[ParameterPoint],
    lambda0_grid: &[Rational],
    tol: f64,
) -> Result<Vec<ScanEntry>, SolitonError> {
    let lin = LinearInC::new(&sys.residuals)?;
    let nvars = sys.family.vars().len();
    let per_point: Vec<Result<Vec<ScanEntry>, SolitonError>> = points
        .par_iter()
        .enumerate()
        .map(|(index, point)| {
            let exact = point.exact_assignment(nvars);
            let specialized = exact.as_ref().map(|a| lin.specialize(a));
            lambda0_grid
                .iter()
                .map(|l| match (&specialized, &exact) {
                    (Some(spec), Some(a)) => {
                        let mut a = a.clone();
                        a[lin.lambda_index()] = Some(l.clone());
                        let solved = spec.solve_exact(&a)?;
                        let (ca, cb) = exact_coefficients(spec, &a)?;
                        Ok(entry(index, Value::Exact(l.clone()), solved, &ca, &cb))
                    }
                    _ => {
                        let mut f = point.float_assignment(nvars);
                        f[lin.lambda_index()] = Some(rational::to_f64(l));
                        let solved = lin.solve_float(&f, tol)?;
                        let ca = lin.a.iter().map(|p| p.eval_f64(&f)).collect::<Result<Vec<_>, _>>()?;
                        let cb = lin.b.iter().map(|p| p.eval_f64(&f)).collect::<Result<Vec<_>, _>>()?;
                        Ok(entry(index, Value::Float(rational::to_f64(l)), solved, &ca, &cb))
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(points.len() * lambda0_grid.len());
    for r in per_point {
        out.extend(r?);
    }
    Ok(out)
}

fn exact_coefficients(lin: &LinearInC, a: &[Option<Rational>]) -> Result<(Vec<f64>, Vec<f64>), SolitonError> {
    let conv = |ps: &[crate::exactpoly::Polynomial]| -> Result<Vec<f64>, SolitonError> {
        ps.iter().map(|p| Ok(rational::to_f64(&p.eval_indexed(a)?))).collect()
    };
    Ok((conv(&lin.a)?, conv(&lin.b)?))
}

fn entry(point: usize, lambda0: Value, solved: Option<CSolution>, a: &[f64], b: &[f64]) -> ScanEntry {
    let c = match &solved {
        Some(CSolution::Unique(v)) => v.to_f64(),
        Some(CSolution::Any) => 0.0,
        None => {
            let den: f64 = a.iter().map(|x| x * x).sum();
            if den.is_zero() {
                0.0
            } else {
                -a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / den
            }
        }
    };
    let residual_norm = a.iter().zip(b).map(|(x, y)| (x * c + y).abs()).fold(0.0, f64::max);
    ScanEntry { point, lambda0, solvable: solved.is_some(), c: solved, residual_norm }
}
