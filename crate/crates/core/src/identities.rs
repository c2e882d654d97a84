//! Metricity and Bianchi identity checks.

use curvscan_symbolic::{sum_exprs, Expr};

use crate::connection::covariant_derivative;
use crate::curvature::CurvatureBundle;
use crate::error::Result;
use crate::tensor::{Tensor, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityReport {
    /// ∇g = 0
    pub metricity: bool,
    /// R^a_[bcd] = 0, or with torsion the first structure set
    /// ∂_[k τ^a_mn] + γ^a_b[k τ^b_mn] − R^a_[nkm] = 0.
    pub first_bianchi: bool,
    /// Exterior covariant derivative of the curvature 2-form vanishes:
    /// ∂_[e R^a_|b|cd] + γ^a_m[e R^m_|b|cd] − γ^m_b[e R^a_|m|cd] = 0.
    pub second_bianchi: bool,
    /// Whether the torsional forms were used.
    pub torsional: bool,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.metricity && self.first_bianchi && self.second_bianchi
    }
}

pub fn metricity_tensor(b: &CurvatureBundle) -> Result<Tensor> {
    covariant_derivative(&Tensor::metric(b.metric()), b.connection())
}

/// The tensor whose vanishing is the first identity set.
pub fn first_bianchi_tensor(b: &CurvatureBundle) -> Result<Tensor> {
    let riem = b.riemann();
    if b.connection().is_torsion_free() {
        return riem.antisymmetrize(&[1, 2, 3]);
    }
    let conn = b.connection();
    let chart = riem.chart().clone();
    let tau = conn.torsion();
    let n = chart.dim();
    let y = Tensor::from_fn(
        chart.clone(),
        vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
        |i| {
            let (a, k, m, nn) = (i[0], i[1], i[2], i[3]);
            let mut terms = vec![chart.partial(tau.get(a, m, nn), k)];
            for bb in 0..n {
                let (g, t) = (conn.get(a, bb, k), tau.get(bb, m, nn));
                if !g.is_zero() && !t.is_zero() {
                    terms.push(g * t);
                }
            }
            terms.push(-riem.get(&[a, nn, k, m]));
            sum_exprs(terms)
        },
    );
    y.antisymmetrize(&[1, 2, 3])
}

pub fn second_bianchi_tensor(b: &CurvatureBundle) -> Result<Tensor> {
    let riem = b.riemann();
    let conn = b.connection();
    if conn.is_torsion_free() {
        let d = match b.riemann_derivative(1) {
            Some(d) => d.clone(),
            None => covariant_derivative(riem, conn)?,
        };
        return d.antisymmetrize(&[2, 3, 4]);
    }
    let chart = riem.chart().clone();
    let n = chart.dim();
    let mut slots = riem.slots().to_vec();
    slots.push(Variance::Down);
    let x = Tensor::from_fn(chart.clone(), slots, |i| {
        let (a, bb, c, d, e) = (i[0], i[1], i[2], i[3], i[4]);
        let mut terms = vec![chart.partial(riem.get(&[a, bb, c, d]), e)];
        for m in 0..n {
            let (g, r) = (conn.get(a, m, e), riem.get(&[m, bb, c, d]));
            if !g.is_zero() && !r.is_zero() {
                terms.push(g * r);
            }
            let (g, r) = (conn.get(m, bb, e), riem.get(&[a, m, c, d]));
            if !g.is_zero() && !r.is_zero() {
                terms.push(-(g * r));
            }
        }
        sum_exprs(terms)
    });
    x.antisymmetrize(&[2, 3, 4])
}

pub fn check_identities(b: &CurvatureBundle) -> Result<IdentityReport> {
    Ok(IdentityReport {
        metricity: metricity_tensor(b)?.is_zero()?,
        first_bianchi: first_bianchi_tensor(b)?.is_zero()?,
        second_bianchi: second_bianchi_tensor(b)?.is_zero()?,
        torsional: !b.connection().is_torsion_free(),
    })
}

/// R_abcd − R_cdab, zero for torsion-free connections.
pub fn pair_symmetry_defect(b: &CurvatureBundle) -> Result<Tensor> {
    let low = b.riemann().lower_index(0, b.metric())?;
    let swapped = low.permute(&[2, 3, 0, 1])?;
    low.sub(&swapped)
}

/// (∇_a∇_b − ∇_b∇_a)φ + τ^c_ab ∂_c φ; zero for every metric connection.
pub fn scalar_commutator_defect(b: &CurvatureBundle, phi: &Expr) -> Result<Tensor> {
    let conn = b.connection();
    let chart = conn.chart().clone();
    let d1 = covariant_derivative(&Tensor::scalar(chart.clone(), phi.clone()), conn)?;
    let d2 = covariant_derivative(&d1, conn)?;
    let tau = conn.torsion();
    let n = chart.dim();
    // d2[b, a] = ∇_a ∇_b φ
    Ok(Tensor::from_fn(chart, vec![Variance::Down; 2], |i| {
        let (a, bb) = (i[0], i[1]);
        let mut terms = vec![d2.get(&[bb, a]).clone(), -d2.get(&[a, bb])];
        for c in 0..n {
            let t = tau.get(c, a, bb);
            if !t.is_zero() {
                terms.push(t * d1.get(&[c]));
            }
        }
        sum_exprs(terms)
    }))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chart::{Chart, Metric, Signature};
    use crate::connection::{christoffel, Connection};

    fn sphere() -> Arc<Metric> {
        let c = Chart::new(&["θ", "φ"]).unwrap();
        let th = Expr::symbol("θ");
        Arc::new(Metric::diagonal(c, vec![Expr::one(), Expr::sin(&th).pow(2)], Signature::riemannian(2)).unwrap())
    }

    #[test]
    fn levi_civita_passes() {
        let b = CurvatureBundle::new(sphere(), 1).unwrap();
        let rep = check_identities(&b).unwrap();
        assert!(rep.all_pass() && !rep.torsional);
        assert!(pair_symmetry_defect(&b).unwrap().is_zero().unwrap());
    }

    #[test]
    fn non_metric_connection_fails_metricity() {
        let g = sphere();
        let mut gamma = christoffel(&g).coefficients().to_vec();
        // γ^θ_φφ doubled, still symmetric
        gamma[3] = &gamma[3] * &Expr::int(2);
        let conn = Arc::new(Connection::from_coefficients(g.chart().clone(), gamma).unwrap());
        assert!(conn.is_torsion_free());
        let b = CurvatureBundle::with_connection(g, conn, 0).unwrap();
        let rep = check_identities(&b).unwrap();
        assert!(!rep.metricity);
        assert!(rep.first_bianchi);
    }

    #[test]
    fn corrupted_riemann_breaks_cyclic_sum() {
        let c = Chart::new(&["t", "x", "y", "z"]).unwrap();
        let mut r = Tensor::zeros(c, vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down]);
        r.set(&[0, 1, 2, 3], Expr::one());
        r.set(&[0, 1, 3, 2], Expr::int(-1));
        assert!(!r.antisymmetrize(&[1, 2, 3]).unwrap().is_zero().unwrap());
    }
}
