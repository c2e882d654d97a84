//! Floating-point oracle: curvature by finite differences of a metric
//! evaluated pointwise. Shares nothing with the symbolic pipeline except
//! the metric entries themselves.
#![allow(dead_code)]

use std::collections::HashMap;

use curvscan_core::Metric;
use curvscan_core::symbolic::Expr;

pub type Mat = Vec<Vec<f64>>;

pub struct NumericMetric {
    pub coords: Vec<String>,
    pub rows: Vec<Vec<Expr>>,
    pub consts: HashMap<String, f64>,
}

impl NumericMetric {
    pub fn new(g: &Metric, consts: &[(&str, f64)]) -> Self {
        NumericMetric {
            coords: g.chart().coords().to_vec(),
            rows: g.rows(),
            consts: consts.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn env(&self, x: &[f64]) -> HashMap<String, f64> {
        let mut env = self.consts.clone();
        for (c, v) in self.coords.iter().zip(x) {
            env.insert(c.clone(), *v);
        }
        env
    }

    pub fn g(&self, x: &[f64]) -> Mat {
        let env = self.env(x);
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.eval_f64(&env).unwrap()).collect())
            .collect()
    }

    /// Γ^a_mn
    pub fn christoffel(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let gi = invert(&self.g(x));
        let dg: Vec<Mat> = (0..n).map(|k| deriv(|y| self.g(y), x, k, 1e-4)).collect();
        let mut out = vec![0.0; n * n * n];
        for a in 0..n {
            for m in 0..n {
                for nn in 0..n {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += gi[a][d] * (dg[m][d][nn] + dg[nn][d][m] - dg[d][m][nn]);
                    }
                    out[(a * n + m) * n + nn] = 0.5 * s;
                }
            }
        }
        out
    }

    /// R^a_bcd, derivatives of Γ by a second, coarser difference.
    pub fn riemann(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let gam = self.christoffel(x);
        let dgam: Vec<Vec<f64>> = (0..n)
            .map(|k| deriv_vec(|y| self.christoffel(y), x, k, 2e-3))
            .collect();
        let c = |a: usize, m: usize, nn: usize| gam[(a * n + m) * n + nn];
        let mut out = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let mut s = dgam[cc][(a * n + b) * n + d] - dgam[d][(a * n + b) * n + cc];
                        for m in 0..n {
                            s += c(a, m, cc) * c(m, b, d) - c(a, m, d) * c(m, b, cc);
                        }
                        out[((a * n + b) * n + cc) * n + d] = s;
                    }
                }
            }
        }
        out
    }

    /// R_abcd R^abcd
    pub fn kretschmann(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let g = self.g(x);
        let gi = invert(&g);
        let r = self.riemann(x);
        let up = |a: usize, b: usize, c: usize, d: usize| r[((a * n + b) * n + c) * n + d];
        // R_abcd
        let mut low = vec![0.0; n.pow(4)];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        low[((a * n + b) * n + c) * n + d] = (0..n).map(|e| g[a][e] * up(e, b, c, d)).sum();
                    }
                }
            }
        }
        // R^abcd via three more raisings of R^a_bcd
        let mut raised = r.clone();
        for slot in 1..4 {
            let mut next = vec![0.0; n.pow(4)];
            for idx in 0..n.pow(4) {
                let mut digits = [idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n];
                let target = digits[slot];
                let mut s = 0.0;
                for e in 0..n {
                    digits[slot] = e;
                    let j = ((digits[0] * n + digits[1]) * n + digits[2]) * n + digits[3];
                    s += gi[target][e] * raised[j];
                }
                next[idx] = s;
            }
            raised = next;
        }
        low.iter().zip(&raised).map(|(a, b)| a * b).sum()
    }
}

/// Fourth-order central difference of a matrix-valued function.
pub fn deriv(f: impl Fn(&[f64]) -> Mat, x: &[f64], k: usize, h: f64) -> Mat {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[k] += s;
        f(&y)
    };
    let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
    let n = p1.len();
    (0..n)
        .map(|i| {
            (0..p1[i].len())
                .map(|j| (8.0 * (p1[i][j] - m1[i][j]) - (p2[i][j] - m2[i][j])) / (12.0 * h))
                .collect()
        })
        .collect()
}

pub fn deriv_vec(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[k] += s;
        f(&y)
    };
    let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
    (0..p1.len())
        .map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h))
        .collect()
}

pub fn invert(m: &Mat) -> Mat {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        assert!(p.abs() > 1e-14, "singular metric");
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Largest deviation relative to max(|expected|, floor).
pub fn max_rel_dev(actual: &[f64], expected: &[f64], floor: f64) -> f64 {
    actual
        .iter()
        .zip(expected)
        .map(|(a, e)| (a - e).abs() / e.abs().max(floor))
        .fold(0.0, f64::max)
}
