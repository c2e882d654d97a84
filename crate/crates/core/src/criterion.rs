//! Null, normal, non-diverging vector fields and the classification
//! pipeline built on them.

use std::fmt;
use std::sync::Arc;

use curvscan_symbolic::{sum_exprs, Expr};

use crate::chart::{Chart, Metric};
use crate::connection::{christoffel, Connection};
use crate::error::{CoreError, Result};
use crate::invariants::InvariantReport;

/// Contravariant components N^a.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: Arc<Chart>, comps: Vec<Expr>) -> Result<VectorField> {
        if comps.len() != chart.dim() {
            return Err(CoreError::SlotVariance(format!(
                "vector field needs {} components, got {}",
                chart.dim(),
                comps.len()
            )));
        }
        Ok(VectorField { chart, comps })
    }

    /// The coordinate field ∂_i.
    pub fn coordinate(chart: Arc<Chart>, i: usize) -> VectorField {
        let comps = (0..chart.dim())
            .map(|k| if k == i { Expr::one() } else { Expr::zero() })
            .collect();
        VectorField { chart, comps }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn scaled(&self, k: &Expr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c * k).collect(),
        }
    }

    pub fn is_zero(&self) -> Result<bool> {
        for c in &self.comps {
            if !c.is_zero_checked()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// N_a = g_ab N^b
    pub fn lowered(&self, g: &Metric) -> Vec<Expr> {
        let n = g.dim();
        (0..n).map(|a| dot_row(g, a, &self.comps, false)).collect()
    }

    /// Whether the two fields are pointwise proportional.
    pub fn parallel_to(&self, other: &VectorField) -> Result<bool> {
        let n = self.comps.len();
        for i in 0..n {
            for j in i + 1..n {
                let c = &(&self.comps[i] * &other.comps[j]) - &(&self.comps[j] * &other.comps[i]);
                if !c.is_zero_checked()? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coord = self.chart.coord(i);
            if c.is_one() {
                write!(f, "∂_{coord}")?;
            } else if c.term_count() > 1 {
                write!(f, "({c})∂_{coord}")?;
            } else {
                write!(f, "{c}*∂_{coord}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn dot_row(g: &Metric, a: usize, v: &[Expr], inverse: bool) -> Expr {
    sum_exprs(
        (0..g.dim())
            .filter_map(|b| {
                let m = if inverse { g.inv(a, b) } else { g.g(a, b) };
                if m.is_zero() || v[b].is_zero() {
                    None
                } else {
                    Some(m * &v[b])
                }
            })
            .collect::<Vec<_>>(),
    )
}

fn same_chart(n: &VectorField, g: &Metric) -> Result<()> {
    if **n.chart() != **g.chart() {
        Err(CoreError::ChartMismatch)
    } else {
        Ok(())
    }
}

/// g_ab N^a N^b = 0
pub fn is_null(n: &VectorField, g: &Metric) -> Result<bool> {
    same_chart(n, g)?;
    let low = n.lowered(g);
    let s = sum_exprs(
        low.iter()
            .zip(n.components())
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .collect::<Vec<_>>(),
    );
    Ok(s.is_zero_checked()?)
}

/// N_[a ∇_b N_c] with the Levi-Civita connection, components a < b < c.
pub fn normality_tensor(n: &VectorField, g: &Metric, conn: &Connection) -> Result<Vec<Expr>> {
    let dim = g.dim();
    let low = n.lowered(g);
    let chart = g.chart();
    // ∇_b N_c = ∂_b N_c − γ^z_cb N_z
    let mut dn = vec![Expr::zero(); dim * dim];
    for b in 0..dim {
        for c in 0..dim {
            let mut terms = vec![chart.partial(&low[c], b)];
            for z in 0..dim {
                let gz = conn.get(z, c, b);
                if !gz.is_zero() && !low[z].is_zero() {
                    terms.push(-(gz * &low[z]));
                }
            }
            dn[b * dim + c] = sum_exprs(terms);
        }
    }
    Ok(antisymmetrized_wedge(&low, &dn, dim))
}

/// Components a < b < c of n ∧ dn built from plain partial derivatives.
pub fn n_wedge_dn(n: &VectorField, g: &Metric) -> Vec<Expr> {
    let dim = g.dim();
    let low = n.lowered(g);
    let chart = g.chart();
    let mut dn = vec![Expr::zero(); dim * dim];
    for b in 0..dim {
        for c in 0..dim {
            dn[b * dim + c] = chart.partial(&low[c], b);
        }
    }
    antisymmetrized_wedge(&low, &dn, dim)
}

/// X_abc = N_[a D_bc] for a < b < c, D given row-major. The remaining
/// components follow by antisymmetry.
fn antisymmetrized_wedge(low: &[Expr], d: &[Expr], dim: usize) -> Vec<Expr> {
    let perms: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([1, 0, 2], -1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
    ];
    let mut out = Vec::new();
    for a in 0..dim {
        for b in a + 1..dim {
            for c in b + 1..dim {
                let idx = [a, b, c];
                let mut terms = Vec::new();
                for (p, s) in perms.iter() {
                    let (x, y, z) = (idx[p[0]], idx[p[1]], idx[p[2]]);
                    if low[x].is_zero() || d[y * dim + z].is_zero() {
                        continue;
                    }
                    let t = &low[x] * &d[y * dim + z];
                    terms.push(if *s > 0 { t } else { -t });
                }
                out.push(&sum_exprs(terms) * &Expr::rational(1, 6));
            }
        }
    }
    out
}

fn all_zero(v: &[Expr]) -> Result<bool> {
    for e in v {
        if !e.is_zero_checked()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// N_[a ∇_b N_c] = 0, cross-checked against n ∧ dn = 0.
pub fn is_normal(n: &VectorField, g: &Metric) -> Result<bool> {
    same_chart(n, g)?;
    normal_with(n, g, &christoffel(g))
}

fn normal_with(n: &VectorField, g: &Metric, conn: &Connection) -> Result<bool> {
    let covariant = all_zero(&normality_tensor(n, g, conn)?)?;
    let exterior = all_zero(&n_wedge_dn(n, g))?;
    debug_assert_eq!(covariant, exterior, "normality code paths disagree");
    Ok(covariant && exterior)
}

/// ∇_a N^a = ∂_a N^a + γ^a_ma N^m
pub fn divergence(n: &VectorField, g: &Metric) -> Expr {
    divergence_with(n, g, &christoffel(g))
}

fn divergence_with(n: &VectorField, g: &Metric, conn: &Connection) -> Expr {
    let dim = g.dim();
    let chart = g.chart();
    let mut terms = Vec::new();
    for a in 0..dim {
        terms.push(chart.partial(&n.components()[a], a));
        for m in 0..dim {
            let c = conn.get(a, m, a);
            if !c.is_zero() && !n.components()[m].is_zero() {
                terms.push(c * &n.components()[m]);
            }
        }
    }
    sum_exprs(terms)
}

pub fn is_nondiverging(n: &VectorField, g: &Metric) -> Result<bool> {
    same_chart(n, g)?;
    Ok(divergence(n, g).is_zero_checked()?)
}

/// A^a = N^b ∇_b N^a
pub fn acceleration(n: &VectorField, g: &Metric) -> Vec<Expr> {
    acceleration_with(n, g, &christoffel(g))
}

fn acceleration_with(n: &VectorField, g: &Metric, conn: &Connection) -> Vec<Expr> {
    let dim = g.dim();
    let chart = g.chart();
    let nn = n.components();
    (0..dim)
        .map(|a| {
            let mut terms = Vec::new();
            for b in 0..dim {
                if nn[b].is_zero() {
                    continue;
                }
                terms.push(&nn[b] * &chart.partial(&nn[a], b));
                for z in 0..dim {
                    let c = conn.get(a, z, b);
                    if !c.is_zero() && !nn[z].is_zero() {
                        terms.push(&(c * &nn[z]) * &nn[b]);
                    }
                }
            }
            sum_exprs(terms)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicFlags {
    /// N^b ∇_b N^a = 0
    pub strict: bool,
    /// N^b ∇_b N^a = λ N^a for some λ
    pub projective: bool,
    pub lambda: Option<Expr>,
}

pub fn is_geodesic(n: &VectorField, g: &Metric) -> Result<GeodesicFlags> {
    same_chart(n, g)?;
    geodesic_with(n, &acceleration(n, g))
}

fn geodesic_with(n: &VectorField, acc: &[Expr]) -> Result<GeodesicFlags> {
    let acc = acc.to_vec();
    if all_zero(&acc)? {
        return Ok(GeodesicFlags {
            strict: true,
            projective: true,
            lambda: Some(Expr::zero()),
        });
    }
    let nn = n.components();
    let Some(i) = nn.iter().position(|c| !c.is_zero()) else {
        return Ok(GeodesicFlags {
            strict: false,
            projective: false,
            lambda: None,
        });
    };
    let lambda = &acc[i] / &nn[i];
    let mut ok = true;
    for a in 0..nn.len() {
        if !(&acc[a] - &(&lambda * &nn[a])).is_zero_checked()? {
            ok = false;
            break;
        }
    }
    Ok(GeodesicFlags {
        strict: false,
        projective: ok,
        lambda: ok.then_some(lambda),
    })
}

/// £_N φ = N^a ∂_a φ = 0 for every computed invariant.
pub fn lie_annihilates(n: &VectorField, report: &InvariantReport) -> Result<bool> {
    let chart = n.chart();
    for v in &report.values {
        let d = sum_exprs(
            (0..chart.dim())
                .filter(|&a| !n.components()[a].is_zero())
                .map(|a| &n.components()[a] * &chart.partial(&v.value, a))
                .collect::<Vec<_>>(),
        );
        if !d.is_zero_checked()? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionVerdict {
    CandidateDegenerate,
    Negative,
}

impl fmt::Display for CriterionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CriterionVerdict::CandidateDegenerate => "CANDIDATE-DEGENERATE",
            CriterionVerdict::Negative => "NEGATIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub null: bool,
    pub normal: bool,
    pub nondiverging: bool,
    pub geodesic: GeodesicFlags,
    /// Annihilation of the supplied invariants, with their truncation order.
    pub annihilation: Option<(bool, usize)>,
    pub verdict: CriterionVerdict,
}

pub fn check_theorem_criterion(g: &Metric, n: &VectorField, report: Option<&InvariantReport>) -> Result<CriterionReport> {
    same_chart(n, g)?;
    if n.is_zero()? {
        return Err(CoreError::ZeroField);
    }
    let conn = christoffel(g);
    let null = is_null(n, g)?;
    let normal = normal_with(n, g, &conn)?;
    let nondiverging = divergence_with(n, g, &conn).is_zero_checked()?;
    let geodesic = geodesic_with(n, &acceleration_with(n, g, &conn))?;
    let annihilation = match report {
        Some(r) => Some((lie_annihilates(n, r)?, r.order)),
        None => None,
    };
    let verdict = if null && normal && nondiverging {
        CriterionVerdict::CandidateDegenerate
    } else {
        CriterionVerdict::Negative
    };
    Ok(CriterionReport {
        null,
        normal,
        nondiverging,
        geodesic,
        annihilation,
        verdict,
    })
}

/// Heuristic search for null, normal, non-diverging fields. Candidates:
/// coordinate fields ∂_a; constant combinations α∂_a + ∂_b solving the null
/// quadric where g_aa, g_ab, g_bb are constants; gradient fields g^{ab}∂_b x^c.
/// Every returned field is verified exactly. An empty result does not prove
/// that no such field exists.
pub fn search_null_congruence(g: &Metric) -> Result<Vec<VectorField>> {
    if g.signature().is_definite() {
        return Ok(Vec::new());
    }
    let dim = g.dim();
    let chart = g.chart().clone();
    let mut candidates = Vec::new();
    for a in 0..dim {
        candidates.push(VectorField::coordinate(chart.clone(), a));
    }
    for a in 0..dim {
        for b in 0..dim {
            if a == b {
                continue;
            }
            let (gaa, gab, gbb) = (g.g(a, a), g.g(a, b), g.g(b, b));
            if gaa.is_zero() || !gaa.is_constant() || !gab.is_constant() || !gbb.is_constant() {
                continue;
            }
            let disc = &(gab * gab) - &(gaa * gbb);
            if disc.constant_sign() != Some(std::cmp::Ordering::Greater) {
                continue;
            }
            let root = Expr::sqrt(&disc);
            for sign in [1i64, -1] {
                let alpha = &(&(-gab) + &(&root * &Expr::int(sign))) / gaa;
                let mut comps = vec![Expr::zero(); dim];
                comps[a] = alpha;
                comps[b] = Expr::one();
                candidates.push(VectorField::new(chart.clone(), comps)?);
            }
        }
    }
    for c in 0..dim {
        let comps = (0..dim).map(|a| g.inv(a, c).clone()).collect();
        candidates.push(VectorField::new(chart.clone(), comps)?);
    }
    let conn = christoffel(g);
    let mut out: Vec<VectorField> = Vec::new();
    for cand in candidates {
        if cand.is_zero()? {
            continue;
        }
        if !passes(&cand, g, &conn) {
            continue;
        }
        let mut dup = false;
        for o in &out {
            if o.parallel_to(&cand).unwrap_or(false) {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push(cand);
        }
    }
    Ok(out)
}

fn passes(n: &VectorField, g: &Metric, conn: &Connection) -> bool {
    // undecidable checks count as failures: no false positives
    matches!(is_null(n, g), Ok(true))
        && matches!(normal_with(n, g, conn), Ok(true))
        && matches!(divergence_with(n, g, conn).is_zero_checked(), Ok(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, Signature};
    use crate::curvature::CurvatureBundle;
    use crate::invariants::{evaluate_invariants, standard_invariant_set};

    fn s(n: &str) -> Expr {
        Expr::symbol(n)
    }

    fn field(chart: &Arc<Chart>, comps: Vec<Expr>) -> VectorField {
        VectorField::new(chart.clone(), comps).unwrap()
    }

    fn euclid(names: &[&str]) -> Metric {
        let n = names.len();
        Metric::diagonal(Chart::new(names).unwrap(), vec![Expr::one(); n], Signature::riemannian(n)).unwrap()
    }

    fn minkowski() -> Metric {
        let c = Chart::new(&["t", "x", "y", "z"]).unwrap();
        let mut d = vec![Expr::one(); 4];
        d[0] = Expr::int(-1);
        Metric::diagonal(c, d, Signature::lorentzian(4)).unwrap()
    }

    fn pp_wave() -> Metric {
        let c = Chart::new(&["u", "v", "x", "y"]).unwrap();
        let h = &(&s("x").pow(2) - &s("y").pow(2)) * &Expr::function("f", &["u"]).unwrap();
        let z = Expr::zero;
        let rows = vec![
            vec![h, Expr::one(), z(), z()],
            vec![Expr::one(), z(), z(), z()],
            vec![z(), z(), Expr::one(), z()],
            vec![z(), z(), z(), Expr::one()],
        ];
        Metric::new(c, rows, Signature::lorentzian(4)).unwrap()
    }

    #[test]
    fn nullity() {
        let g = pp_wave();
        let c = g.chart().clone();
        assert!(is_null(&VectorField::coordinate(c.clone(), 1), &g).unwrap());
        assert!(!is_null(&VectorField::coordinate(c.clone(), 0), &g).unwrap());
        assert!(is_null(&field(&c, vec![Expr::zero(); 4]), &g).unwrap());
        let e = euclid(&["x", "y", "z"]);
        let any = field(e.chart(), vec![s("y"), Expr::one(), s("x")]);
        assert!(!is_null(&any, &e).unwrap());
    }

    #[test]
    fn normality_agrees_with_exterior_form() {
        let e = euclid(&["x", "y", "z"]);
        let c = e.chart().clone();
        let rotation = field(&c, vec![-s("y"), s("x"), Expr::one()]);
        let potential = &(&s("x") * &s("y")) + &Expr::sin(&s("z"));
        let gradient = field(&c, (0..3).map(|i| c.partial(&potential, i)).collect());
        let pp = pp_wave();
        let dv = VectorField::coordinate(pp.chart().clone(), 1);
        for (n, g, want) in [(&rotation, &e, false), (&gradient, &e, true), (&dv, &pp, true)] {
            assert_eq!(is_normal(n, g).unwrap(), want);
            let wedge = n_wedge_dn(n, g);
            assert_eq!(wedge.iter().all(|w| w.is_zero_checked().unwrap()), want);
        }
    }

    #[test]
    fn divergence_examples() {
        let e = euclid(&["x", "y"]);
        let radial = field(e.chart(), vec![s("x"), s("y")]);
        assert_eq!(divergence(&radial, &e), Expr::int(2));
        assert!(!is_nondiverging(&radial, &e).unwrap());
        let m = minkowski();
        let constant = field(m.chart(), vec![Expr::one(), Expr::int(2), Expr::zero(), Expr::int(-3)]);
        assert!(is_nondiverging(&constant, &m).unwrap());
    }

    #[test]
    fn geodesic_flags() {
        let g = pp_wave();
        let c = g.chart().clone();
        let dv = VectorField::coordinate(c.clone(), 1);
        assert!(is_geodesic(&dv, &g).unwrap().strict);
        let f = Expr::function("f", &["u"]).unwrap();
        let scaled = dv.scaled(&Expr::exp(&f));
        let flags = is_geodesic(&scaled, &g).unwrap();
        assert!(flags.projective);
        // N^b ∇_b N^a = e^f ∂_v(e^f) ∂_v = 0 since f depends on u only
        assert!(flags.strict);
        let boosted = dv.scaled(&Expr::exp(&s("v")));
        let flags = is_geodesic(&boosted, &g).unwrap();
        assert!(flags.projective && !flags.strict);
        assert!((flags.lambda.unwrap() - Expr::exp(&s("v"))).is_zero_checked().unwrap());

        let e = euclid(&["x", "y", "z"]);
        let rotation = field(e.chart(), vec![-s("y"), s("x"), Expr::zero()]);
        let flags = is_geodesic(&rotation, &e).unwrap();
        assert!(!flags.strict && !flags.projective);
    }

    #[test]
    fn annihilation() {
        let m = Arc::new(minkowski());
        let b = CurvatureBundle::new(m.clone(), 0).unwrap();
        let rep = evaluate_invariants(&standard_invariant_set(0, 4), &b).unwrap();
        let any = field(m.chart(), vec![s("x"), Expr::one(), s("t"), Expr::zero()]);
        assert!(lie_annihilates(&any, &rep).unwrap());

        let c = Chart::new(&["t", "r", "θ", "φ"]).unwrap();
        let r = s("r");
        let f = &Expr::one() - &(&(&Expr::int(2) * &s("M")) / &r);
        let diag = vec![-&f, f.try_inv().unwrap(), r.pow(2), &r.pow(2) * &Expr::sin(&s("θ")).pow(2)];
        let g = Arc::new(Metric::diagonal(c.clone(), diag, Signature::lorentzian(4)).unwrap());
        let b = CurvatureBundle::new(g, 0).unwrap();
        let rep = evaluate_invariants(&standard_invariant_set(0, 4), &b).unwrap();
        assert!(!lie_annihilates(&VectorField::coordinate(c.clone(), 1), &rep).unwrap());
        assert!(lie_annihilates(&VectorField::coordinate(c, 0), &rep).unwrap());
    }

    #[test]
    fn search_examples() {
        assert!(search_null_congruence(&euclid(&["x", "y", "z"])).unwrap().is_empty());
        let m = minkowski();
        let found = search_null_congruence(&m).unwrap();
        let tx = field(m.chart(), vec![Expr::one(), Expr::one(), Expr::zero(), Expr::zero()]);
        assert!(found.iter().any(|f| f.parallel_to(&tx).unwrap()));
        for f in &found {
            assert!(is_null(f, &m).unwrap() && is_normal(f, &m).unwrap() && is_nondiverging(f, &m).unwrap());
        }
    }

    #[test]
    fn verdict_follows_the_three_flags() {
        let g = pp_wave();
        let c = g.chart().clone();
        let rep = check_theorem_criterion(&g, &VectorField::coordinate(c.clone(), 1), None).unwrap();
        assert_eq!(rep.verdict, CriterionVerdict::CandidateDegenerate);
        assert!(rep.annihilation.is_none());
        // null and normal, but diverging
        let diverging = VectorField::coordinate(c, 1).scaled(&s("v"));
        let rep = check_theorem_criterion(&g, &diverging, None).unwrap();
        assert!(rep.null && rep.normal && !rep.nondiverging);
        assert_eq!(rep.verdict, CriterionVerdict::Negative);
    }
}
