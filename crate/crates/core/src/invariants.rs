//! Curvature scalars as full contractions of bundle tensors.

use std::collections::BTreeSet;
use std::sync::Arc;

use curvscan_symbolic::{sum_exprs, Expr};
use rayon::prelude::*;

use crate::chart::Metric;
use crate::curvature::{CurvatureBundle, TensorKind};
use crate::error::{CoreError, Result};
use crate::tensor::{Tensor, Variance};

use Variance::{Down, Up};

/// One tensor in a contraction, with a label per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub kind: TensorKind,
    pub labels: Vec<(u8, Variance)>,
}

impl Factor {
    /// One ASCII letter per slot: lowercase is a lower slot, uppercase an
    /// upper slot, and equal letters are contracted.
    pub fn new(kind: TensorKind, spec: &str) -> Result<Factor> {
        if let Some(c) = spec.chars().find(|c| !c.is_ascii_alphabetic()) {
            return Err(CoreError::SlotVariance(format!("index label '{c}' is not an ASCII letter")));
        }
        let labels = spec
            .bytes()
            .map(|c| {
                if c.is_ascii_uppercase() {
                    (c.to_ascii_lowercase(), Up)
                } else {
                    (c, Down)
                }
            })
            .collect();
        Ok(Factor { kind, labels })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantRecipe {
    pub name: String,
    pub order: usize,
    pub factors: Vec<Factor>,
}

impl InvariantRecipe {
    /// Validates that each label pairs one upper with one lower slot.
    pub fn new(name: &str, factors: Vec<Factor>) -> Result<InvariantRecipe> {
        let mut counts: std::collections::BTreeMap<u8, (usize, usize)> = Default::default();
        for f in &factors {
            for &(l, v) in &f.labels {
                let e = counts.entry(l).or_default();
                match v {
                    Up => e.0 += 1,
                    Down => e.1 += 1,
                }
            }
        }
        if let Some((l, _)) = counts.iter().find(|(_, c)| **c != (1, 1)) {
            return Err(CoreError::SlotVariance(format!(
                "recipe '{name}': index '{}' is not paired up/down exactly once",
                *l as char
            )));
        }
        let order = factors.iter().map(|f| f.kind.derivative_order()).max().unwrap_or(0);
        Ok(InvariantRecipe {
            name: name.to_string(),
            order,
            factors,
        })
    }

    /// Pseudoscalar: changes sign under orientation-reversing charts.
    pub fn parity_odd(&self) -> bool {
        self.factors
            .iter()
            .filter(|f| matches!(f.kind, TensorKind::Epsilon | TensorKind::AxialTorsion))
            .count()
            % 2
            == 1
    }

    fn build(name: &str, parts: &[(TensorKind, &str)]) -> InvariantRecipe {
        let factors = parts
            .iter()
            .map(|(k, s)| Factor::new(*k, s))
            .collect::<Result<Vec<_>>>()
            .expect("built-in labels are letters");
        InvariantRecipe::new(name, factors).expect("built-in recipe is well formed")
    }
}

use TensorKind as K;

/// Curated curvature scalars up to derivative order `k` in dimension `n`.
pub fn standard_invariant_set(k: usize, n: usize) -> Vec<InvariantRecipe> {
    let b = InvariantRecipe::build;
    let mut out = vec![
        b("RicciScalar", &[(K::Scalar(0), "")]),
        b("RicciSquared", &[(K::Ricci, "ab"), (K::Ricci, "AB")]),
        b("Kretschmann", &[(K::Riemann(0), "abcd"), (K::Riemann(0), "ABCD")]),
        b(
            "RiemannCubed",
            &[(K::Riemann(0), "ABcd"), (K::Riemann(0), "CDef"), (K::Riemann(0), "EFab")],
        ),
    ];
    if n >= 4 {
        out.push(b("WeylSquared", &[(K::Weyl, "abcd"), (K::Weyl, "ABCD")]));
    }
    out.push(b("RicciCubed", &[(K::Ricci, "aB"), (K::Ricci, "bC"), (K::Ricci, "cA")]));
    if n == 4 {
        out.push(b(
            "ParityOddRiemann",
            &[(K::Epsilon, "ABCD"), (K::Riemann(0), "abEF"), (K::Riemann(0), "cdef")],
        ));
    }
    if n == 6 {
        out.push(b(
            "ParityOddRiemann",
            &[
                (K::Epsilon, "ABCDEF"),
                (K::Riemann(0), "abGH"),
                (K::Riemann(0), "cdhI"),
                (K::Riemann(0), "efig"),
            ],
        ));
    }
    if k >= 1 {
        out.push(b("BeltramiRR", &[(K::Scalar(1), "a"), (K::Scalar(1), "A")]));
        out.push(b(
            "GradRiemannSquared",
            &[(K::Riemann(1), "abcde"), (K::Riemann(1), "ABCDE")],
        ));
    }
    if k >= 2 {
        out.push(b("BoxR", &[(K::Scalar(2), "ab"), (K::Metric, "AB")]));
        out.push(b(
            "RiemannBoxRiemann",
            &[(K::Riemann(2), "abcdef"), (K::Metric, "EF"), (K::Riemann(0), "ABCD")],
        ));
    }
    for j in 3..=k {
        let low: String = "abcd".chars().chain((b'e'..b'e' + j as u8).map(|c| c as char)).collect();
        let up = low.to_ascii_uppercase();
        out.push(InvariantRecipe::build(
            &format!("D{j}RiemannSquared"),
            &[(K::Riemann(j), low.as_str()), (K::Riemann(j), up.as_str())],
        ));
    }
    out
}

/// Extra scalars built from the torsion of a Riemann-Cartan connection.
/// The Weyl-electric scalars couple the trace-free curvature to the torsion
/// vectors; they vanish identically whenever the Weyl part does.
pub fn torsion_invariant_set(n: usize) -> Vec<InvariantRecipe> {
    let b = InvariantRecipe::build;
    let mut out = vec![
        b("TorsionSquared", &[(K::Torsion, "Abc"), (K::Torsion, "aBC")]),
        b("TorsionTraceSquared", &[(K::TorsionTrace, "a"), (K::TorsionTrace, "A")]),
    ];
    if n >= 4 {
        out.push(b(
            "WeylTraceElectric",
            &[
                (K::Weyl, "abcd"),
                (K::TorsionTrace, "A"),
                (K::TorsionTrace, "C"),
                (K::Weyl, "EBFD"),
                (K::TorsionTrace, "e"),
                (K::TorsionTrace, "f"),
            ],
        ));
    }
    if n == 4 {
        out.push(b("AxialTorsionSquared", &[(K::AxialTorsion, "A"), (K::AxialTorsion, "a")]));
        out.push(b(
            "WeylAxialElectric",
            &[
                (K::Weyl, "abcd"),
                (K::AxialTorsion, "A"),
                (K::AxialTorsion, "C"),
                (K::Weyl, "EBFD"),
                (K::AxialTorsion, "e"),
                (K::AxialTorsion, "f"),
            ],
        ));
        out.push(b(
            "MetricWeylAxialElectric",
            &[
                (K::MetricWeyl, "abcd"),
                (K::AxialTorsion, "A"),
                (K::AxialTorsion, "C"),
                (K::MetricWeyl, "EBFD"),
                (K::AxialTorsion, "e"),
                (K::AxialTorsion, "f"),
            ],
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue {
    pub name: String,
    pub order: usize,
    pub value: Expr,
    pub zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    /// Highest derivative order among the evaluated recipes.
    pub order: usize,
    pub values: Vec<InvariantValue>,
    /// Function symbols appearing in any value.
    pub functions: BTreeSet<String>,
}

impl InvariantReport {
    pub fn get(&self, name: &str) -> Option<&InvariantValue> {
        self.values.iter().find(|v| v.name == name)
    }

    pub fn all_zero(&self) -> bool {
        self.values.iter().all(|v| v.zero)
    }
}

pub fn evaluate_invariants(recipes: &[InvariantRecipe], bundle: &CurvatureBundle) -> Result<InvariantReport> {
    let mut values = Vec::with_capacity(recipes.len());
    for r in recipes {
        if r.order > bundle.order() {
            return Err(CoreError::InsufficientOrder {
                recipe: r.name.clone(),
                needed: r.order,
                available: bundle.order(),
            });
        }
        let value = evaluate_recipe(r, bundle)?;
        let zero = value.is_zero_checked()?;
        values.push(InvariantValue {
            name: r.name.clone(),
            order: r.order,
            value,
            zero,
        });
    }
    let functions = values.iter().flat_map(|v| v.value.free_functions()).collect();
    let order = recipes.iter().map(|r| r.order).max().unwrap_or(0);
    Ok(InvariantReport {
        order,
        values,
        functions,
    })
}

struct Operand {
    tensor: Arc<Tensor>,
    labels: Vec<u8>,
    nonzero: Vec<(Vec<usize>, Expr)>,
}

/// Sparse full contraction of the recipe's factors.
pub fn evaluate_recipe(r: &InvariantRecipe, bundle: &CurvatureBundle) -> Result<Expr> {
    let mut ops = Vec::with_capacity(r.factors.len());
    for f in &r.factors {
        let slots: Vec<Variance> = f.labels.iter().map(|(_, v)| *v).collect();
        let t = bundle.tensor(f.kind, &slots)?;
        let nonzero = t.nonzero().into_iter().map(|(i, e)| (i, e.clone())).collect();
        ops.push(Operand {
            tensor: t,
            labels: f.labels.iter().map(|(l, _)| *l).collect(),
            nonzero,
        });
    }
    if ops.iter().any(|o| o.nonzero.is_empty()) {
        return Ok(Expr::zero());
    }
    if ops.len() == 1 && ops[0].labels.is_empty() {
        return Ok(ops[0].tensor.components()[0].clone());
    }
    let first = &ops[0];
    let terms: Vec<Expr> = first
        .nonzero
        .par_iter()
        .flat_map_iter(|(idx, v)| {
            let mut bind = [usize::MAX; 128];
            let mut out = Vec::new();
            if bind_labels(&first.labels, idx, &mut bind) {
                contract_rest(&ops, 1, &mut bind, v.clone(), &mut out);
            }
            out
        })
        .collect();
    Ok(sum_exprs(terms))
}

fn bind_labels(labels: &[u8], idx: &[usize], bind: &mut [usize; 128]) -> bool {
    for (&l, &i) in labels.iter().zip(idx) {
        let slot = &mut bind[l as usize];
        if *slot == usize::MAX {
            *slot = i;
        } else if *slot != i {
            return false;
        }
    }
    true
}

fn contract_rest(ops: &[Operand], k: usize, bind: &mut [usize; 128], acc: Expr, out: &mut Vec<Expr>) {
    if k == ops.len() {
        out.push(acc);
        return;
    }
    let op = &ops[k];
    if op.labels.iter().all(|&l| bind[l as usize] != usize::MAX) {
        let idx: Vec<usize> = op.labels.iter().map(|&l| bind[l as usize]).collect();
        let v = op.tensor.get(&idx);
        if !v.is_zero() {
            contract_rest(ops, k + 1, bind, &acc * v, out);
        }
        return;
    }
    for (idx, v) in &op.nonzero {
        let saved = *bind;
        if bind_labels(&op.labels, idx, bind) {
            contract_rest(ops, k + 1, bind, &acc * v, out);
        }
        *bind = saved;
    }
}

/// Δ₁(φ,φ) = g^ab ∂_a φ ∂_b φ
pub fn beltrami_first(phi: &Expr, g: &Metric) -> Expr {
    let n = g.dim();
    let grad: Vec<Expr> = (0..n).map(|a| g.chart().partial(phi, a)).collect();
    let mut terms = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let gi = g.inv(a, b);
            if gi.is_zero() || grad[a].is_zero() || grad[b].is_zero() {
                continue;
            }
            terms.push(&(gi * &grad[a]) * &grad[b]);
        }
    }
    sum_exprs(terms)
}

/// Function symbols of the metric absent from every computed invariant.
/// Exact for the evaluated set only; the report's order is the truncation.
pub fn detect_phantom_functions(g: &Metric, report: &InvariantReport) -> BTreeSet<String> {
    g.free_functions().difference(&report.functions).cloned().collect()
}
