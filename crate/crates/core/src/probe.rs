//! Discriminating scalar-degenerate geometries by adding test torsion.

use std::fmt;
use std::sync::Arc;

use curvscan_symbolic::{sum_exprs, Expr};

use crate::chart::Metric;
use crate::connection::{connection_with_torsion, torsion_gradient_ansatz, torsion_levicivita_ansatz, Torsion};
use crate::curvature::CurvatureBundle;
use crate::error::{CoreError, Result};
use crate::invariants::{evaluate_invariants, standard_invariant_set, torsion_invariant_set, InvariantReport, InvariantRecipe};
use crate::tensor::{Tensor, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ansatz {
    /// τ^a_bc = δ^a_b ψ_,c − δ^a_c ψ_,b
    Gradient,
    /// τ^a_bc = 1/(n−3)! ε^a_bc… Ψ^…
    LeviCivita,
}

impl Ansatz {
    pub fn parse(s: &str) -> Option<Ansatz> {
        match s {
            "gradient" => Some(Ansatz::Gradient),
            "levicivita" | "levi-civita" => Some(Ansatz::LeviCivita),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ansatz::Gradient => "gradient",
            Ansatz::LeviCivita => "levicivita",
        }
    }

    /// Number of scalar test functions the ansatz uses in dimension n.
    pub fn test_function_count(&self, n: usize) -> usize {
        match self {
            Ansatz::Gradient => 1,
            Ansatz::LeviCivita => (n.saturating_sub(3)).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Distinguished,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Distinguished => "DISTINGUISHED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Fresh test functions of all chart coordinates, named so they do not
/// clash with the metric's own function symbols.
pub fn fresh_test_functions(gs: &[&Metric], count: usize) -> Result<Vec<Expr>> {
    let taken: std::collections::BTreeSet<String> = gs.iter().flat_map(|g| g.free_functions()).collect();
    let mut stem = "psi".to_string();
    while taken.iter().any(|t| t.starts_with(&stem)) {
        stem.push('_');
    }
    let g = gs[0];
    let coords: Vec<&str> = g.chart().coords().iter().map(|s| s.as_str()).collect();
    (0..count)
        .map(|i| {
            let name = if count == 1 { stem.clone() } else { format!("{stem}{}", i + 1) };
            Ok(Expr::function(&name, &coords)?)
        })
        .collect()
}

/// Torsion from the ansatz with the given scalar test functions. The
/// Levi-Civita ansatz uses Ψ = ψ in three dimensions and the wedge of the
/// raised gradients ∇ψ1 ∧ … ∧ ∇ψ(n−3) otherwise.
pub fn test_torsion(g: &Metric, ansatz: Ansatz, tests: &[Expr]) -> Result<Torsion> {
    let n = g.dim();
    let chart = g.chart();
    match ansatz {
        Ansatz::Gradient => match tests {
            [psi] => Ok(torsion_gradient_ansatz(psi, chart)),
            _ => Err(CoreError::BadParameter("gradient ansatz takes one test function".into())),
        },
        Ansatz::LeviCivita => {
            if n < 3 {
                return Err(CoreError::Dimension {
                    what: "Levi-Civita torsion ansatz".into(),
                    need: ">= 3".into(),
                    n,
                });
            }
            let k = n - 3;
            if tests.len() != k.max(1) {
                return Err(CoreError::BadParameter(format!(
                    "Levi-Civita ansatz in dimension {n} takes {} test functions",
                    k.max(1)
                )));
            }
            let form = if k == 0 {
                Tensor::scalar(chart.clone(), tests[0].clone())
            } else {
                let grads: Vec<Vec<Expr>> = tests
                    .iter()
                    .map(|t| {
                        (0..n)
                            .map(|a| {
                                sum_exprs(
                                    (0..n)
                                        .filter(|&b| !g.inv(a, b).is_zero())
                                        .map(|b| g.inv(a, b) * &chart.partial(t, b))
                                        .collect::<Vec<_>>(),
                                )
                            })
                            .collect()
                    })
                    .collect();
                let prod = Tensor::from_fn(chart.clone(), vec![Variance::Up; k], |idx| {
                    let mut v = Expr::one();
                    for (j, &i) in idx.iter().enumerate() {
                        v = &v * &grads[j][i];
                    }
                    v
                });
                let fact: i64 = (1..=k as i64).product();
                let all: Vec<usize> = (0..k).collect();
                prod.antisymmetrize(&all)?.scale(&Expr::int(fact))
            };
            torsion_levicivita_ansatz(&form, g)
        }
    }
}

/// Curvature bundle of g with the ansatz torsion built from `tests`.
pub fn torsional_bundle(g: &Arc<Metric>, ansatz: Ansatz, tests: &[Expr], order: usize) -> Result<CurvatureBundle> {
    let tau = test_torsion(g, ansatz, tests)?;
    let conn = connection_with_torsion(g, &tau)?;
    CurvatureBundle::with_connection(g.clone(), Arc::new(conn), order)
}

/// Scalars evaluated by the probe: the standard set plus torsion scalars.
pub fn probe_invariant_set(k: usize, n: usize) -> Vec<InvariantRecipe> {
    let mut r = standard_invariant_set(k, n);
    r.extend(torsion_invariant_set(n));
    r
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub ansatz: Ansatz,
    pub order: usize,
    pub test_functions: Vec<String>,
    pub first: InvariantReport,
    pub second: InvariantReport,
    /// Recipes that vanish exactly for one geometry and not for the other.
    pub splits: Vec<String>,
    pub verdict: Verdict,
}

/// Evaluates the torsional scalars of both geometries and reports
/// DISTINGUISHED only on an exact zero/non-zero split. Never asserts
/// equivalence.
pub fn discriminate_with_torsion(g1: &Arc<Metric>, g2: &Arc<Metric>, ansatz: Ansatz, order: usize) -> Result<ProbeReport> {
    let n = g1.dim();
    if g2.dim() != n {
        return Err(CoreError::Incompatible(format!(
            "dimensions {} and {}",
            n,
            g2.dim()
        )));
    }
    if g1.signature() != g2.signature() {
        return Err(CoreError::Incompatible(format!(
            "signatures {} and {}",
            g1.signature(),
            g2.signature()
        )));
    }
    let count = ansatz.test_function_count(n);
    let t1 = fresh_test_functions(&[g1, g2], count)?;
    let t2 = fresh_test_functions(&[g2, g1], count)?;
    let recipes = probe_invariant_set(order, n);
    let b1 = torsional_bundle(g1, ansatz, &t1, order)?;
    let first = evaluate_invariants(&recipes, &b1)?;
    drop(b1);
    let b2 = torsional_bundle(g2, ansatz, &t2, order)?;
    let second = evaluate_invariants(&recipes, &b2)?;
    let splits: Vec<String> = first
        .values
        .iter()
        .zip(&second.values)
        .filter(|(a, b)| a.zero != b.zero)
        .map(|(a, _)| a.name.clone())
        .collect();
    let verdict = if splits.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Distinguished
    };
    let names = t1.iter().map(|e| e.to_string()).collect();
    Ok(ProbeReport {
        ansatz,
        order,
        test_functions: names,
        first,
        second,
        splits,
        verdict,
    })
}
