//! Connection coefficients γ^a_mn in the coordinate frame (derivative index
//! last), torsion, and covariant differentiation.

use std::sync::Arc;

use curvscan_symbolic::{sum_exprs, Expr};
use rayon::prelude::*;

use crate::chart::{Chart, Metric};
use crate::error::{CoreError, Result};
use crate::tensor::{levi_civita, multi_indices, Tensor, Variance};

/// Torsion components τ^a_bc, antisymmetric in b,c.
#[derive(Debug, Clone)]
pub struct Torsion {
    chart: Arc<Chart>,
    comps: Vec<Expr>,
}

impl Torsion {
    pub fn new(chart: Arc<Chart>, comps: Vec<Expr>) -> Result<Torsion> {
        let n = chart.dim();
        if comps.len() != n * n * n {
            return Err(CoreError::SlotVariance(format!(
                "torsion needs {} components",
                n * n * n
            )));
        }
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let s = &comps[(a * n + b) * n + c] + &comps[(a * n + c) * n + b];
                    if !s.is_zero_checked()? {
                        return Err(CoreError::TorsionNotAntisymmetric(a, b, c));
                    }
                }
            }
        }
        Ok(Torsion { chart, comps })
    }

    pub fn zero(chart: Arc<Chart>) -> Torsion {
        let n = chart.dim();
        Torsion {
            chart,
            comps: vec![Expr::zero(); n * n * n],
        }
    }

    pub fn from_tensor(t: &Tensor) -> Result<Torsion> {
        if t.slots() != [Variance::Up, Variance::Down, Variance::Down] {
            return Err(CoreError::SlotVariance("torsion must be (1,2)".into()));
        }
        Torsion::new(t.chart().clone(), t.components().to_vec())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Expr {
        let n = self.chart.dim();
        &self.comps[(a * n + b) * n + c]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|e| e.is_zero())
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_components(
            self.chart.clone(),
            vec![Variance::Up, Variance::Down, Variance::Down],
            self.comps.clone(),
        )
        .expect("component count checked at construction")
    }
}

/// τ^a_bc = δ^a_b ψ_,c − δ^a_c ψ_,b
pub fn torsion_gradient_ansatz(psi: &Expr, chart: &Arc<Chart>) -> Torsion {
    let n = chart.dim();
    let grad: Vec<Expr> = (0..n).map(|c| chart.partial(psi, c)).collect();
    let t = Tensor::from_fn(chart.clone(), vec![Variance::Up, Variance::Down, Variance::Down], |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut v = Expr::zero();
        if a == b {
            v = &v + &grad[c];
        }
        if a == c {
            v = &v - &grad[b];
        }
        v
    });
    Torsion::from_tensor(&t).expect("antisymmetric by construction")
}

/// τ^a_bc = 1/(n−3)! ε^a_{bc i1…i(n−3)} Ψ^{i1…i(n−3)} for a fully
/// antisymmetric contravariant (n−3)-form Ψ.
pub fn torsion_levicivita_ansatz(psi: &Tensor, g: &Metric) -> Result<Torsion> {
    let n = g.dim();
    if n < 3 {
        return Err(CoreError::Dimension {
            what: "Levi-Civita torsion ansatz".into(),
            need: ">= 3".into(),
            n,
        });
    }
    let k = n - 3;
    if psi.rank() != k || psi.slots().iter().any(|v| *v != Variance::Up) {
        return Err(CoreError::SlotVariance(format!(
            "test form must be a contravariant {k}-form"
        )));
    }
    if k >= 2 {
        let all: Vec<usize> = (0..k).collect();
        if !psi.antisymmetrize(&all)?.equals(psi)? {
            return Err(CoreError::NotAntisymmetric("test form".into()));
        }
    }
    let eps = levi_civita(g).raise_index(0, g)?;
    let fact: i64 = (1..=k as i64).product();
    let norm = Expr::rational(1, fact);
    let forms = psi.nonzero();
    let t = Tensor::from_fn(g.chart().clone(), vec![Variance::Up, Variance::Down, Variance::Down], |i| {
        let mut idx = vec![i[0], i[1], i[2]];
        idx.resize(n, 0);
        let terms = forms.iter().filter_map(|(j, v)| {
            idx[3..].copy_from_slice(j);
            let e = eps.get(&idx);
            if e.is_zero() {
                None
            } else {
                Some(e * *v)
            }
        });
        &sum_exprs(terms.collect::<Vec<_>>()) * &norm
    });
    Torsion::from_tensor(&t)
}

#[derive(Debug, Clone)]
pub struct Connection {
    chart: Arc<Chart>,
    gamma: Vec<Expr>,
    torsion_free: bool,
}

impl Connection {
    /// Wraps raw coefficients γ^a_mn; the torsion-free flag is set only if
    /// the coefficients are exactly symmetric in m,n.
    pub fn from_coefficients(chart: Arc<Chart>, gamma: Vec<Expr>) -> Result<Connection> {
        let n = chart.dim();
        if gamma.len() != n * n * n {
            return Err(CoreError::SlotVariance("connection needs n^3 coefficients".into()));
        }
        let mut c = Connection {
            chart,
            gamma,
            torsion_free: false,
        };
        c.torsion_free = c.torsion().to_tensor().is_zero()?;
        Ok(c)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// γ^a_mn
    pub fn get(&self, a: usize, m: usize, n_: usize) -> &Expr {
        let n = self.dim();
        &self.gamma[(a * n + m) * n + n_]
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_free
    }

    pub fn coefficients(&self) -> &[Expr] {
        &self.gamma
    }

    /// τ^a_mn = γ^a_nm − γ^a_mn
    pub fn torsion(&self) -> Torsion {
        let n = self.dim();
        let comps = (0..n * n * n)
            .into_par_iter()
            .map(|k| {
                let (a, m, nn) = (k / (n * n), (k / n) % n, k % n);
                self.get(a, nn, m) - self.get(a, m, nn)
            })
            .collect();
        Torsion {
            chart: self.chart.clone(),
            comps,
        }
    }

    /// Coefficients of the symmetric part γ^a_(mn).
    pub fn symmetric_part(&self) -> Vec<Expr> {
        let n = self.dim();
        let half = Expr::rational(1, 2);
        (0..n * n * n)
            .map(|k| {
                let (a, m, nn) = (k / (n * n), (k / n) % n, k % n);
                &(self.get(a, m, nn) + self.get(a, nn, m)) * &half
            })
            .collect()
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_components(
            self.chart.clone(),
            vec![Variance::Up, Variance::Down, Variance::Down],
            self.gamma.clone(),
        )
        .expect("component count checked at construction")
    }
}

/// Levi-Civita connection of g.
pub fn christoffel(g: &Metric) -> Connection {
    let gamma = lowered_coefficients(g, None);
    Connection {
        chart: g.chart().clone(),
        gamma: raise_first(g, &gamma),
        torsion_free: true,
    }
}

/// Metric connection with prescribed torsion:
/// γ_amn = ½{(g_am,n + g_an,m − g_mn,a) − (τ_amn + τ_mna − τ_nam)}.
pub fn connection_with_torsion(g: &Metric, tau: &Torsion) -> Result<Connection> {
    if **tau.chart() != **g.chart() {
        return Err(CoreError::ChartMismatch);
    }
    if tau.is_zero() {
        return Ok(christoffel(g));
    }
    let gamma = lowered_coefficients(g, Some(tau));
    Connection::from_coefficients(g.chart().clone(), raise_first(g, &gamma))
}

fn lowered_coefficients(g: &Metric, tau: Option<&Torsion>) -> Vec<Expr> {
    let n = g.dim();
    let chart = g.chart();
    let dg: Vec<Expr> = (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b, c) = (k / (n * n), (k / n) % n, k % n);
            chart.partial(g.g(a, b), c)
        })
        .collect();
    let dg = |a: usize, b: usize, c: usize| &dg[(a * n + b) * n + c];
    let tau_low: Option<Vec<Expr>> = tau.map(|t| {
        (0..n * n * n)
            .into_par_iter()
            .map(|k| {
                let (a, m, nn) = (k / (n * n), (k / n) % n, k % n);
                sum_exprs((0..n).filter_map(|b| {
                    let gab = g.g(a, b);
                    let tb = t.get(b, m, nn);
                    if gab.is_zero() || tb.is_zero() {
                        None
                    } else {
                        Some(gab * tb)
                    }
                }))
            })
            .collect()
    });
    let half = Expr::rational(1, 2);
    (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, m, nn) = (k / (n * n), (k / n) % n, k % n);
            let mut s = &(dg(a, m, nn) + dg(a, nn, m)) - dg(m, nn, a);
            if let Some(t) = &tau_low {
                let t = |x: usize, y: usize, z: usize| &t[(x * n + y) * n + z];
                s = &s - &(&(t(a, m, nn) + t(m, nn, a)) - t(nn, a, m));
            }
            &s * &half
        })
        .collect()
}

fn raise_first(g: &Metric, low: &[Expr]) -> Vec<Expr> {
    let n = g.dim();
    (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, m, nn) = (k / (n * n), (k / n) % n, k % n);
            sum_exprs((0..n).filter_map(|b| {
                let gab = g.inv(a, b);
                let l = &low[(b * n + m) * n + nn];
                if gab.is_zero() || l.is_zero() {
                    None
                } else {
                    Some(gab * l)
                }
            }))
        })
        .collect()
}

/// ∇_m T with the derivative slot appended last:
/// +γ^a_zm for each upper slot, −γ^z_bm for each lower slot.
pub fn covariant_derivative(t: &Tensor, conn: &Connection) -> Result<Tensor> {
    covariant_derivative_antisym(t, conn, None)
}

/// As [`covariant_derivative`], for a tensor known to be antisymmetric in
/// the slot pair `(p, q)`; only components with `idx[p] < idx[q]` are
/// computed.
pub fn covariant_derivative_antisym(t: &Tensor, conn: &Connection, pair: Option<(usize, usize)>) -> Result<Tensor> {
    if let Some((p, q)) = pair {
        if p >= t.rank() || q >= t.rank() || p == q || t.slots()[p] != t.slots()[q] {
            return Err(CoreError::SlotVariance(format!("slots {p} and {q} do not form a pair")));
        }
    }
    if **t.chart() != **conn.chart() {
        return Err(CoreError::ChartMismatch);
    }
    let n = t.dim();
    let r = t.rank();
    let mut slots = t.slots().to_vec();
    slots.push(Variance::Down);
    let chart = t.chart().clone();
    let mut out = Tensor::from_fn(chart.clone(), slots, |idx| {
        if let Some((p, q)) = pair {
            if idx[p] >= idx[q] {
                return Expr::zero();
            }
        }
        let m = idx[r];
        let base = &idx[..r];
        let mut terms = Vec::new();
        let d = chart.partial(t.get(base), m);
        if !d.is_zero() {
            terms.push(d);
        }
        let mut j = base.to_vec();
        for s in 0..r {
            let orig = base[s];
            for z in 0..n {
                j[s] = z;
                let v = t.get(&j);
                if v.is_zero() {
                    continue;
                }
                match t.slots()[s] {
                    Variance::Up => {
                        let c = conn.get(orig, z, m);
                        if !c.is_zero() {
                            terms.push(c * v);
                        }
                    }
                    Variance::Down => {
                        let c = conn.get(z, orig, m);
                        if !c.is_zero() {
                            terms.push(-(c * v));
                        }
                    }
                }
            }
            j[s] = orig;
        }
        sum_exprs(terms)
    });
    if let Some((p, q)) = pair {
        for idx in multi_indices(n, r + 1) {
            if idx[p] > idx[q] {
                let mut sw = idx.clone();
                sw.swap(p, q);
                let v = -out.get(&sw);
                out.set(&idx, v);
            }
        }
    }
    Ok(out)
}
