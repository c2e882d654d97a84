//! Riemann, Ricci, Weyl and their covariant derivatives.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use curvscan_symbolic::{sum_exprs, Expr};
use rayon::prelude::*;

use crate::chart::Metric;
use crate::connection::{christoffel, covariant_derivative, covariant_derivative_antisym, Connection};
use crate::error::{CoreError, Result};
use crate::tensor::{levi_civita, Tensor, Variance};

use Variance::{Down, Up};

/// R^a_bcd = ∂_c γ^a_bd − ∂_d γ^a_bc + γ^a_mc γ^m_bd − γ^a_md γ^m_bc
pub fn riemann(conn: &Connection) -> Tensor {
    let n = conn.dim();
    let chart = conn.chart().clone();
    // only c < d is computed; the rest follows from antisymmetry
    let pairs: Vec<(usize, usize, usize, usize)> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).flat_map(move |c| (c + 1..n).map(move |d| (a, b, c, d)))))
        .collect();
    let values: Vec<Expr> = pairs
        .par_iter()
        .map(|&(a, b, c, d)| {
            let mut terms = Vec::new();
            let t1 = chart.partial(conn.get(a, b, d), c);
            let t2 = chart.partial(conn.get(a, b, c), d);
            terms.push(t1);
            terms.push(-t2);
            for m in 0..n {
                let (x, y) = (conn.get(a, m, c), conn.get(m, b, d));
                if !x.is_zero() && !y.is_zero() {
                    terms.push(x * y);
                }
                let (x, y) = (conn.get(a, m, d), conn.get(m, b, c));
                if !x.is_zero() && !y.is_zero() {
                    terms.push(-(x * y));
                }
            }
            sum_exprs(terms)
        })
        .collect();
    let mut r = Tensor::zeros(chart, vec![Up, Down, Down, Down]);
    for (&(a, b, c, d), v) in pairs.iter().zip(values) {
        r.set(&[a, b, d, c], -&v);
        r.set(&[a, b, c, d], v);
    }
    r
}

/// R_ab = R^m_amb
pub fn ricci_from_riemann(riem: &Tensor) -> Tensor {
    let n = riem.dim();
    Tensor::from_fn(riem.chart().clone(), vec![Down, Down], |i| {
        sum_exprs((0..n).map(|m| riem.get(&[m, i[0], m, i[1]]).clone()))
    })
}

/// Weyl tensor (all slots down) from the standard trace-free decomposition.
pub fn weyl_from_parts(g: &Metric, riem_low: &Tensor, ricci: &Tensor, scalar: &Expr) -> Result<Tensor> {
    let n = g.dim();
    if n < 3 {
        return Err(CoreError::Dimension {
            what: "Weyl tensor".into(),
            need: ">= 3".into(),
            n,
        });
    }
    let k1 = Expr::rational(1, n as i64 - 2);
    let k2 = scalar * &Expr::rational(1, ((n - 1) * (n - 2)) as i64);
    Ok(Tensor::from_fn(g.chart().clone(), vec![Down; 4], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let gg = |x, y| g.g(x, y);
        let ric = |x: usize, y: usize| ricci.get(&[x, y]);
        let mut terms = vec![riem_low.get(i).clone()];
        let mut tr = Vec::new();
        for (s, x, y, rx, ry) in [(1, a, c, b, d), (-1, a, d, b, c), (-1, b, c, a, d), (1, b, d, a, c)] {
            let gv = gg(x, y);
            let rv = ric(rx, ry);
            if !gv.is_zero() && !rv.is_zero() {
                let t = gv * rv;
                tr.push(if s > 0 { t } else { -t });
            }
        }
        if !tr.is_empty() {
            terms.push(-(&sum_exprs(tr) * &k1));
        }
        if !k2.is_zero() {
            let q = &(gg(a, c) * gg(b, d)) - &(gg(a, d) * gg(b, c));
            if !q.is_zero() {
                terms.push(&k2 * &q);
            }
        }
        sum_exprs(terms)
    }))
}

/// Tensors a recipe may draw on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorKind {
    Metric,
    Epsilon,
    /// k-th covariant derivative of the Riemann tensor.
    Riemann(usize),
    Ricci,
    Weyl,
    /// Weyl tensor of the Christoffel part of the connection.
    MetricWeyl,
    /// k-th covariant derivative of the Ricci scalar.
    Scalar(usize),
    Torsion,
    /// T_c = τ^b_bc
    TorsionTrace,
    /// A^d = ε^{abcd} τ_abc (n = 4)
    AxialTorsion,
}

impl TensorKind {
    pub fn natural_slots(&self, n: usize) -> Vec<Variance> {
        match self {
            TensorKind::Metric => vec![Down, Down],
            TensorKind::Epsilon => vec![Down; n],
            TensorKind::Riemann(k) => {
                let mut v = vec![Up, Down, Down, Down];
                v.extend(std::iter::repeat(Down).take(*k));
                v
            }
            TensorKind::Ricci => vec![Down, Down],
            TensorKind::Weyl | TensorKind::MetricWeyl => vec![Down; 4],
            TensorKind::Scalar(k) => vec![Down; *k],
            TensorKind::Torsion => vec![Up, Down, Down],
            TensorKind::TorsionTrace => vec![Down],
            TensorKind::AxialTorsion => vec![Up],
        }
    }

    pub fn derivative_order(&self) -> usize {
        match self {
            TensorKind::Riemann(k) | TensorKind::Scalar(k) => *k,
            _ => 0,
        }
    }
}

/// Curvature of a metric connection, with covariant derivatives of the
/// Riemann tensor and of the Ricci scalar up to `order`.
#[derive(Debug)]
pub struct CurvatureBundle {
    metric: Arc<Metric>,
    connection: Arc<Connection>,
    riemann: Vec<Tensor>,
    ricci: Tensor,
    scalar: Vec<Tensor>,
    weyl: Option<Tensor>,
    order: usize,
    cache: Mutex<HashMap<(TensorKind, Vec<Variance>), Arc<Tensor>>>,
}

impl CurvatureBundle {
    /// Bundle of the Levi-Civita connection.
    pub fn new(metric: Arc<Metric>, order: usize) -> Result<CurvatureBundle> {
        let conn = Arc::new(christoffel(&metric));
        CurvatureBundle::with_connection(metric, conn, order)
    }

    pub fn with_connection(metric: Arc<Metric>, connection: Arc<Connection>, order: usize) -> Result<CurvatureBundle> {
        if **metric.chart() != **connection.chart() {
            return Err(CoreError::ChartMismatch);
        }
        let r0 = riemann(&connection);
        let ricci = ricci_from_riemann(&r0);
        let n = metric.dim();
        let s = sum_exprs(
            (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| !metric.inv(a, b).is_zero())
                .map(|(a, b)| metric.inv(a, b) * ricci.get(&[a, b]))
                .collect::<Vec<_>>(),
        );
        let chart = metric.chart().clone();
        let mut riemann = vec![r0];
        let mut scalar = vec![Tensor::scalar(chart, s.clone())];
        for k in 0..order {
            let next = covariant_derivative_antisym(&riemann[k], &connection, Some((2, 3)))?;
            riemann.push(next);
            let next = covariant_derivative(&scalar[k], &connection)?;
            scalar.push(next);
        }
        let weyl = if n >= 3 {
            let low = riemann[0].lower_index(0, &metric)?;
            Some(weyl_from_parts(&metric, &low, &ricci, &s)?)
        } else {
            None
        };
        Ok(CurvatureBundle {
            metric,
            connection,
            riemann,
            ricci,
            scalar,
            weyl,
            order,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn metric(&self) -> &Arc<Metric> {
        &self.metric
    }

    pub fn connection(&self) -> &Arc<Connection> {
        &self.connection
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// R^a_bcd
    pub fn riemann(&self) -> &Tensor {
        &self.riemann[0]
    }

    /// ∇^k Riemann, derivative slots appended in order of application.
    pub fn riemann_derivative(&self, k: usize) -> Option<&Tensor> {
        self.riemann.get(k)
    }

    pub fn ricci(&self) -> &Tensor {
        &self.ricci
    }

    pub fn ricci_scalar(&self) -> &Expr {
        self.scalar[0].as_scalar().expect("rank 0")
    }

    pub fn scalar_derivative(&self, k: usize) -> Option<&Tensor> {
        self.scalar.get(k)
    }

    pub fn weyl(&self) -> Result<&Tensor> {
        self.weyl.as_ref().ok_or_else(|| CoreError::Dimension {
            what: "Weyl tensor".into(),
            need: ">= 3".into(),
            n: self.metric.dim(),
        })
    }

    fn natural(&self, kind: TensorKind) -> Result<Tensor> {
        let g = &self.metric;
        let n = g.dim();
        let missing = |k: usize| CoreError::InsufficientOrder {
            recipe: format!("{kind:?}"),
            needed: k,
            available: self.order,
        };
        Ok(match kind {
            TensorKind::Metric => Tensor::metric(g),
            TensorKind::Epsilon => levi_civita(g),
            TensorKind::Riemann(k) => self.riemann.get(k).ok_or_else(|| missing(k))?.clone(),
            TensorKind::Ricci => self.ricci.clone(),
            TensorKind::Weyl => self.weyl()?.clone(),
            TensorKind::MetricWeyl => {
                if self.connection.is_torsion_free() {
                    self.weyl()?.clone()
                } else {
                    let lc = CurvatureBundle::new(g.clone(), 0)?;
                    lc.weyl()?.clone()
                }
            }
            TensorKind::Scalar(k) => self.scalar.get(k).ok_or_else(|| missing(k))?.clone(),
            TensorKind::Torsion => self.connection.torsion().to_tensor(),
            TensorKind::TorsionTrace => self.connection.torsion().to_tensor().contract(0, 1)?,
            TensorKind::AxialTorsion => {
                if n != 4 {
                    return Err(CoreError::Dimension {
                        what: "axial torsion vector".into(),
                        need: "4".into(),
                        n,
                    });
                }
                let eps = levi_civita(g).with_variance(&[Up; 4], g)?;
                let tau = self.connection.torsion().to_tensor().lower_index(0, g)?;
                let nz = tau.nonzero();
                Tensor::from_fn(g.chart().clone(), vec![Up], |i| {
                    sum_exprs(
                        nz.iter()
                            .map(|(j, v)| eps.get(&[j[0], j[1], j[2], i[0]]) * *v)
                            .collect::<Vec<_>>(),
                    )
                })
            }
        })
    }

    /// The tensor of the given kind with the requested slot variances.
    pub fn tensor(&self, kind: TensorKind, slots: &[Variance]) -> Result<Arc<Tensor>> {
        let key = (kind, slots.to_vec());
        if let Some(t) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.natural(kind)?.with_variance(slots, &self.metric)?);
        self.cache.lock().expect("cache lock").insert(key, t.clone());
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, Signature};

    #[test]
    fn sphere_scalar_curvature() {
        let c = Chart::new(&["θ", "φ"]).unwrap();
        let a = Expr::symbol("a");
        let th = Expr::symbol("θ");
        let a2 = &a * &a;
        let g = Metric::diagonal(c, vec![a2.clone(), &a2 * &Expr::sin(&th).pow(2)], Signature::riemannian(2)).unwrap();
        let b = CurvatureBundle::new(Arc::new(g), 0).unwrap();
        assert_eq!(b.ricci_scalar(), &(&Expr::int(2) / &a2));
        assert!(b.weyl().is_err());
    }

    fn schwarzschild() -> Arc<Metric> {
        let c = Chart::new(&["t", "r", "θ", "φ"]).unwrap();
        let r = Expr::symbol("r");
        let f = &Expr::one() - &(&(&Expr::int(2) * &Expr::symbol("M")) / &r);
        let r2 = &r * &r;
        let diag = vec![-&f, f.try_inv().unwrap(), r2.clone(), &r2 * &Expr::sin(&Expr::symbol("θ")).pow(2)];
        Arc::new(Metric::diagonal(c, diag, Signature::lorentzian(4)).unwrap())
    }

    #[test]
    fn schwarzschild_is_vacuum_with_traceless_weyl() {
        let g = schwarzschild();
        let b = CurvatureBundle::new(g.clone(), 0).unwrap();
        assert!(b.ricci().is_zero().unwrap());
        assert!(b.ricci_scalar().is_zero());
        let w = b.weyl().unwrap();
        assert!(!w.is_zero().unwrap());
        let w_up = w.raise_index(0, &g).unwrap();
        for (i, j) in [(0, 1), (0, 2), (0, 3)] {
            assert!(w_up.contract(i, j).unwrap().is_zero().unwrap(), "trace ({i},{j})");
        }
        // vacuum: Weyl equals the fully lowered Riemann tensor
        let low = b.riemann().lower_index(0, &g).unwrap();
        assert!(low.equals(w).unwrap());
    }

    #[test]
    fn riemann_is_antisymmetric_in_last_pair() {
        let g = schwarzschild();
        let b = CurvatureBundle::new(g, 0).unwrap();
        let swapped = b.riemann().permute(&[0, 1, 3, 2]).unwrap();
        assert!(b.riemann().add(&swapped).unwrap().is_zero().unwrap());
    }

    #[test]
    fn weyl_vanishes_in_three_dimensions() {
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let (x, y) = (Expr::symbol("x"), Expr::symbol("y"));
        let diag = vec![Expr::one(), Expr::exp(&(&Expr::int(2) * &x)), &(&x * &x) + &(&y * &y).pow(2) + Expr::one()];
        let g = Arc::new(Metric::diagonal(c, diag, Signature::riemannian(3)).unwrap());
        let b = CurvatureBundle::new(g, 0).unwrap();
        assert!(!b.riemann().is_zero().unwrap());
        assert!(b.weyl().unwrap().is_zero().unwrap());
    }

    #[test]
    fn flat_derivative_chain_vanishes() {
        let c = Chart::new(&["t", "x", "y"]).unwrap();
        let g = Arc::new(Metric::diagonal(c, vec![Expr::int(-1), Expr::one(), Expr::one()], Signature::lorentzian(3)).unwrap());
        let b = CurvatureBundle::new(g, 2).unwrap();
        assert!(b.riemann().is_zero().unwrap());
        for k in 1..=2 {
            let d = b.riemann_derivative(k).unwrap();
            assert_eq!(d.rank(), 4 + k);
            assert!(d.is_zero().unwrap());
        }
        assert!(b.riemann_derivative(3).is_none());
    }
}
