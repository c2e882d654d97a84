//! The Kundt normal form 2du(A du + dv + B_k dx^k) + γ_ij dx^i dx^j.

use std::sync::Arc;

use curvscan_symbolic::Expr;

use crate::chart::{det_of, Chart, Metric, Signature};
use crate::error::{CoreError, Result};

/// Builds g = [[2A, 1, B_j], [1, 0, 0], [B_i, 0, γ_ij]] on a chart whose
/// first two coordinates are u and v. γ is assumed positive definite.
pub fn construct_kundt_metric(chart: Arc<Chart>, a: &Expr, b: &[Expr], gamma: &[Vec<Expr>]) -> Result<Metric> {
    let n = chart.dim();
    let m = n - 2;
    if b.len() != m || gamma.len() != m || gamma.iter().any(|r| r.len() != m) {
        return Err(CoreError::BadParameter(format!(
            "dimension {n} needs {m} B components and a {m}x{m} transverse metric"
        )));
    }
    for i in 0..m {
        for j in i + 1..m {
            if !(&gamma[i][j] - &gamma[j][i]).is_zero_checked()? {
                return Err(CoreError::KundtConstraint(format!(
                    "transverse metric is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let det = det_of(gamma);
    if m > 0 && det.is_zero_checked()? {
        return Err(CoreError::KundtConstraint("transverse metric is degenerate".into()));
    }
    if !chart.partial(&det, 1).is_zero_checked()? {
        return Err(CoreError::KundtConstraint(format!(
            "det γ = {det} depends on {}",
            chart.coord(1)
        )));
    }
    let mut rows = vec![vec![Expr::zero(); n]; n];
    rows[0][0] = &Expr::int(2) * a;
    rows[0][1] = Expr::one();
    rows[1][0] = Expr::one();
    for i in 0..m {
        rows[0][i + 2] = b[i].clone();
        rows[i + 2][0] = b[i].clone();
        for j in 0..m {
            rows[i + 2][j + 2] = gamma[i][j].clone();
        }
    }
    Metric::new(chart, rows, Signature::lorentzian(n))
}

/// Whether g has the Kundt pattern in its chart, the first two coordinates
/// playing u and v: g_uv = 1, g_vv = 0, g_vi = 0 and ∂_v det γ = 0.
pub fn kundt_form_check(g: &Metric) -> Result<bool> {
    let n = g.dim();
    if !(g.g(0, 1) - &Expr::one()).is_zero_checked()? || !g.g(1, 1).is_zero_checked()? {
        return Ok(false);
    }
    for i in 2..n {
        if !g.g(1, i).is_zero_checked()? {
            return Ok(false);
        }
    }
    let gamma: Vec<Vec<Expr>> = (2..n).map(|i| (2..n).map(|j| g.g(i, j).clone()).collect()).collect();
    let det = det_of(&gamma);
    Ok(g.chart().partial(&det, 1).is_zero_checked()?)
}
