//! Coordinate charts and metrics.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use curvscan_symbolic::{substitute, Bindings, Expr};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    coords: Vec<String>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Arc<Chart>> {
        if coords.len() < 2 {
            return Err(CoreError::ChartTooSmall(coords.len()));
        }
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(CoreError::DuplicateCoordinate(c.clone()));
            }
        }
        Ok(Arc::new(Chart { coords }))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn coord_expr(&self, i: usize) -> Expr {
        Expr::symbol(&self.coords[i])
    }

    /// Partial derivative along the i-th coordinate.
    pub fn partial(&self, e: &Expr, i: usize) -> Expr {
        e.diff(&self.coords[i])
    }

    /// Partial derivative along a coordinate given by name.
    pub fn partial_named(&self, e: &Expr, name: &str) -> Result<Expr> {
        match self.index_of(name) {
            Some(i) => Ok(self.partial(e, i)),
            None => Err(CoreError::UnknownCoordinate(name.to_string())),
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.join(","))
    }
}

/// Counts of `+` and `-` signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
}

impl Signature {
    pub fn new(plus: usize, minus: usize) -> Self {
        Signature { plus, minus }
    }

    pub fn riemannian(n: usize) -> Self {
        Signature { plus: n, minus: 0 }
    }

    pub fn lorentzian(n: usize) -> Self {
        Signature {
            plus: n - 1,
            minus: 1,
        }
    }

    /// Parses strings such as `-+++`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() || !s.chars().all(|c| c == '+' || c == '-') {
            return None;
        }
        let minus = s.chars().filter(|&c| c == '-').count();
        Some(Signature {
            plus: s.len() - minus,
            minus,
        })
    }

    pub fn dim(&self) -> usize {
        self.plus + self.minus
    }

    pub fn is_definite(&self) -> bool {
        self.plus == 0 || self.minus == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", "-".repeat(self.minus), "+".repeat(self.plus))
    }
}

#[derive(Debug, Clone)]
pub struct Metric {
    chart: Arc<Chart>,
    g: Vec<Expr>,
    inv: Vec<Expr>,
    det: Expr,
    signature: Signature,
}

impl Metric {
    /// Validates symmetry and non-degeneracy, then inverts exactly.
    pub fn new(chart: Arc<Chart>, rows: Vec<Vec<Expr>>, signature: Signature) -> Result<Metric> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CoreError::MetricShape { n });
        }
        if signature.dim() != n {
            return Err(CoreError::SignatureMismatch {
                p: signature.plus,
                q: signature.minus,
                n,
            });
        }
        for a in 0..n {
            for b in a + 1..n {
                if !(&rows[a][b] - &rows[b][a]).is_zero_checked()? {
                    return Err(CoreError::NotSymmetric(a, b));
                }
            }
        }
        let g: Vec<Expr> = rows.into_iter().flatten().collect();
        let det = determinant(&g, n);
        if det.is_zero_checked()? {
            return Err(CoreError::DegenerateMetric);
        }
        let inv = inverse(&g, n, &det)?;
        let m = Metric {
            chart,
            g,
            inv,
            det,
            signature,
        };
        m.verify_inverse()?;
        Ok(m)
    }

    pub fn diagonal(chart: Arc<Chart>, diag: Vec<Expr>, signature: Signature) -> Result<Metric> {
        let n = diag.len();
        let rows = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| if a == b { diag[a].clone() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        Metric::new(chart, rows, signature)
    }

    fn verify_inverse(&self) -> Result<()> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                let mut s: Expr = (0..n).map(|c| self.inv(a, c) * self.g(c, b)).sum();
                if a == b {
                    s = &s - &Expr::one();
                }
                if !s.is_zero_checked()? {
                    return Err(CoreError::DegenerateMetric);
                }
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn g(&self, a: usize, b: usize) -> &Expr {
        &self.g[a * self.dim() + b]
    }

    pub fn inv(&self, a: usize, b: usize) -> &Expr {
        &self.inv[a * self.dim() + b]
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    /// |det g|, with the sign taken from the declared signature.
    pub fn abs_det(&self) -> Expr {
        if self.signature.minus % 2 == 1 {
            -&self.det
        } else {
            self.det.clone()
        }
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        (0..n).map(|a| (0..n).map(|b| self.g(a, b).clone()).collect()).collect()
    }

    /// Function symbols occurring in any component.
    pub fn free_functions(&self) -> std::collections::BTreeSet<String> {
        self.g.iter().flat_map(|e| e.free_functions()).collect()
    }

    /// Constant rescaling g -> c g.
    pub fn scaled(&self, c: &Expr) -> Result<Metric> {
        let rows = self
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|e| c * e).collect())
            .collect();
        Metric::new(self.chart.clone(), rows, self.signature)
    }

    /// Pulls the metric back along a coordinate change: `old_in_new[i]` gives
    /// the i-th old coordinate as an expression in the new chart.
    pub fn pullback(&self, new_chart: Arc<Chart>, old_in_new: &[Expr]) -> Result<Metric> {
        let n = self.dim();
        if new_chart.dim() != n || old_in_new.len() != n {
            return Err(CoreError::ChartMismatch);
        }
        let mut b = Bindings::new();
        for (i, e) in old_in_new.iter().enumerate() {
            b.set_symbol(self.chart.coord(i), e.clone());
        }
        let jac: Vec<Vec<Expr>> = old_in_new
            .iter()
            .map(|x| (0..n).map(|a| new_chart.partial(x, a)).collect())
            .collect();
        let g_sub: Vec<Expr> = self
            .g
            .iter()
            .map(|e| substitute(e, &b))
            .collect::<std::result::Result<_, _>>()?;
        let mut rows = vec![vec![Expr::zero(); n]; n];
        for a in 0..n {
            for bb in a..n {
                let mut terms = Vec::new();
                for c in 0..n {
                    if jac[c][a].is_zero() {
                        continue;
                    }
                    for d in 0..n {
                        let gcd = &g_sub[c * n + d];
                        if gcd.is_zero() || jac[d][bb].is_zero() {
                            continue;
                        }
                        terms.push(&(gcd * &jac[c][a]) * &jac[d][bb]);
                    }
                }
                let v = curvscan_symbolic::sum_exprs(terms);
                rows[a][bb] = v.clone();
                rows[bb][a] = v;
            }
        }
        Metric::new(new_chart, rows, self.signature)
    }
}

fn determinant(g: &[Expr], n: usize) -> Expr {
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    sub_determinant(g, n, &rows, &cols)
}

/// Determinant of the submatrix on the given rows and columns, by Laplace
/// expansion along rows with memoised column subsets.
fn sub_determinant(g: &[Expr], n: usize, rows: &[usize], cols: &[usize]) -> Expr {
    let mut memo: HashMap<u64, Expr> = HashMap::new();
    let full: u64 = cols.iter().fold(0, |m, &c| m | (1 << c));
    laplace(g, n, rows, 0, full, &mut memo)
}

fn laplace(g: &[Expr], n: usize, rows: &[usize], k: usize, mask: u64, memo: &mut HashMap<u64, Expr>) -> Expr {
    if k == rows.len() {
        return Expr::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let r = rows[k];
    let mut terms = Vec::new();
    let mut sign = 1i64;
    for c in 0..n {
        if mask & (1 << c) == 0 {
            continue;
        }
        let e = &g[r * n + c];
        if !e.is_zero() {
            let minor = laplace(g, n, rows, k + 1, mask & !(1 << c), memo);
            if !minor.is_zero() {
                let t = e * &minor;
                terms.push(if sign > 0 { t } else { -t });
            }
        }
        sign = -sign;
    }
    let v = curvscan_symbolic::sum_exprs(terms);
    memo.insert(mask, v.clone());
    v
}

fn inverse(g: &[Expr], n: usize, det: &Expr) -> Result<Vec<Expr>> {
    let dinv = det.try_inv()?;
    let mut inv = vec![Expr::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            // (g^-1)_{ji} = (-1)^{i+j} M_{ij} / det
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = sub_determinant(g, n, &rows, &cols);
            let mut v = &minor * &dinv;
            if (i + j) % 2 == 1 {
                v = -v;
            }
            inv[j * n + i] = v.clone();
            inv[i * n + j] = v;
        }
    }
    Ok(inv)
}

/// Determinant of a square matrix of expressions.
pub fn det_of(rows: &[Vec<Expr>]) -> Expr {
    let n = rows.len();
    if n == 0 {
        return Expr::one();
    }
    let flat: Vec<Expr> = rows.iter().flatten().cloned().collect();
    determinant(&flat, n)
}
