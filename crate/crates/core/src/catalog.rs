//! Reference geometries, each with an alternate chart.

use std::collections::BTreeMap;
use std::sync::Arc;

use curvscan_symbolic::Expr;

use crate::chart::{Chart, Metric, Signature};
use crate::error::{CoreError, Result};
use crate::kundt::construct_kundt_metric;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Properties {
    pub flat: bool,
    pub vacuum: bool,
    /// All invariants through order 2 vanish.
    pub vsi: bool,
    pub kundt: bool,
}

/// The same geometry in other coordinates; `old_in_new[i]` expresses the
/// i-th primary coordinate in the alternate chart.
#[derive(Debug, Clone)]
pub struct AlternateChart {
    pub metric: Arc<Metric>,
    pub old_in_new: Vec<Expr>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    /// Constant symbols.
    pub parameters: Vec<String>,
    /// Function symbols with their argument coordinates.
    pub functions: Vec<(String, Vec<String>)>,
    pub metric: Arc<Metric>,
    pub alternate: AlternateChart,
    pub properties: Properties,
}

pub const NAMES: &[&str] = &[
    "minkowski",
    "euclidean",
    "sphere2",
    "schwarzschild",
    "pp_wave_vacuum",
    "pp_wave_general",
    "kundt_generic",
    "walker3",
];

pub type Params = BTreeMap<String, String>;

fn param_usize(p: &Params, key: &str, default: usize) -> Result<usize> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CoreError::BadParameter(format!("{key}={v} is not a non-negative integer"))),
    }
}

fn param_name<'a>(p: &'a Params, key: &str, default: &'a str) -> Result<&'a str> {
    let v = p.get(key).map(|s| s.as_str()).unwrap_or(default);
    let mut chars = v.chars();
    let ok = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_');
    if ok {
        Ok(v)
    } else {
        Err(CoreError::BadParameter(format!("{key}={v} is not an identifier")))
    }
}

fn check_known(p: &Params, allowed: &[&str]) -> Result<()> {
    for k in p.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(CoreError::BadParameter(format!("unknown parameter '{k}'")));
        }
    }
    Ok(())
}

fn s(x: &str) -> Expr {
    Expr::symbol(x)
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn spatial_names(count: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if count <= SHORT.len() {
        SHORT[..count].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=count).map(|i| format!("x{i}")).collect()
    }
}

pub fn get(name: &str, params: &Params) -> Result<CatalogEntry> {
    match name {
        "minkowski" => minkowski(params),
        "euclidean" => euclidean(params),
        "sphere2" => sphere2(params),
        "schwarzschild" => schwarzschild(params),
        "pp_wave_vacuum" => pp_wave(params, true),
        "pp_wave_general" => pp_wave(params, false),
        "kundt_generic" => kundt_generic(params),
        "walker3" => walker3(params),
        _ => Err(CoreError::UnknownEntry(name.to_string())),
    }
}

fn alternate(metric: &Metric, coords: &[String], old_in_new: Vec<Expr>) -> Result<AlternateChart> {
    let chart = Chart::new(coords)?;
    Ok(AlternateChart {
        metric: Arc::new(metric.pullback(chart, &old_in_new)?),
        old_in_new,
    })
}

fn minkowski(p: &Params) -> Result<CatalogEntry> {
    check_known(p, &["n", "signature"])?;
    let n = param_usize(p, "n", 4)?;
    if n < 2 {
        return Err(CoreError::BadParameter("minkowski needs n >= 2".into()));
    }
    let sig = p.get("signature").map(|s| s.as_str()).unwrap_or("-+");
    let time_last = match sig {
        "-+" | "time-first" => false,
        "+-" | "time-last" => true,
        other => match Signature::parse(other) {
            Some(sg) if sg.minus == 1 && sg.dim() == n && other.starts_with('-') => false,
            Some(sg) if sg.minus == 1 && sg.dim() == n && other.ends_with('-') => true,
            _ => {
                return Err(CoreError::BadParameter(format!(
                    "signature '{other}' must put one '-' first or last"
                )))
            }
        },
    };
    let mut coords = spatial_names(n - 1);
    let t_pos = if time_last { n - 1 } else { 0 };
    coords.insert(t_pos, "t".into());
    let chart = Chart::new(&coords)?;
    let diag = (0..n).map(|i| if i == t_pos { Expr::int(-1) } else { Expr::one() }).collect();
    let metric = Metric::diagonal(chart, diag, Signature::lorentzian(n))?;
    // double-null coordinates in the (t, x) plane
    let x_pos = if time_last { 0 } else { 1 };
    let mut alt = coords.clone();
    alt[t_pos] = "U".into();
    alt[x_pos] = "V".into();
    let half = Expr::rational(1, 2);
    let (uu, vv) = (s("U"), s("V"));
    let old_in_new = (0..n)
        .map(|i| {
            if i == t_pos {
                &(&uu + &vv) * &half
            } else if i == x_pos {
                &(&vv - &uu) * &half
            } else {
                s(&coords[i])
            }
        })
        .collect();
    let alternate = alternate(&metric, &alt, old_in_new)?;
    Ok(CatalogEntry {
        name: "minkowski".into(),
        description: format!("flat Lorentzian space, dimension {n}"),
        parameters: vec![],
        functions: vec![],
        metric: Arc::new(metric),
        alternate,
        properties: Properties {
            flat: true,
            vacuum: true,
            vsi: true,
            kundt: false,
        },
    })
}

fn euclidean(p: &Params) -> Result<CatalogEntry> {
    check_known(p, &["n"])?;
    let n = param_usize(p, "n", 3)?;
    if n < 2 {
        return Err(CoreError::BadParameter("euclidean needs n >= 2".into()));
    }
    let coords = spatial_names(n);
    let chart = Chart::new(&coords)?;
    let metric = Metric::diagonal(chart, vec![Expr::one(); n], Signature::riemannian(n))?;
    // shear x = X + Y
    let mut alt = coords.clone();
    alt[0] = "X".into();
    alt[1] = "Y".into();
    let mut old_in_new: Vec<Expr> = coords.iter().map(|c| s(c)).collect();
    old_in_new[0] = &s("X") + &s("Y");
    old_in_new[1] = s("Y");
    let alternate = alternate(&metric, &alt, old_in_new)?;
    Ok(CatalogEntry {
        name: "euclidean".into(),
        description: format!("flat Euclidean space, dimension {n}"),
        parameters: vec![],
        functions: vec![],
        metric: Arc::new(metric),
        alternate,
        properties: Properties {
            flat: true,
            vacuum: true,
            vsi: true,
            kundt: false,
        },
    })
}

fn sphere2(p: &Params) -> Result<CatalogEntry> {
    check_known(p, &["a"])?;
    let a = param_name(p, "a", "a")?;
    let coords = names(&["θ", "φ"]);
    let chart = Chart::new(&coords)?;
    let a2 = s(a).pow(2);
    let th = s("θ");
    let metric = Metric::diagonal(chart, vec![a2.clone(), &a2 * &Expr::sin(&th).pow(2)], Signature::riemannian(2))?;
    let old_in_new = vec![s("Θ"), &s("Φ") + &s("Θ")];
    let alternate = alternate(&metric, &names(&["Θ", "Φ"]), old_in_new)?;
    Ok(CatalogEntry {
        name: "sphere2".into(),
        description: "round 2-sphere of radius a".into(),
        parameters: vec![a.to_string()],
        functions: vec![],
        metric: Arc::new(metric),
        alternate,
        properties: Properties::default(),
    })
}

fn schwarzschild(p: &Params) -> Result<CatalogEntry> {
    check_known(p, &["M"])?;
    let m = param_name(p, "M", "M")?;
    let coords = names(&["t", "r", "θ", "φ"]);
    let chart = Chart::new(&coords)?;
    let r = s("r");
    let f = &Expr::one() - &(&(&Expr::int(2) * &s(m)) / &r);
    let r2 = r.pow(2);
    let metric = Metric::diagonal(
        chart,
        vec![-&f, f.inv(), r2.clone(), &r2 * &Expr::sin(&s("θ")).pow(2)],
        Signature::lorentzian(4),
    )?;
    // r = 1/ρ, t = T + ρ
    let rho = s("ρ");
    let old_in_new = vec![&s("T") + &rho, rho.inv(), s("θ"), s("φ")];
    let alternate = alternate(&metric, &names(&["T", "ρ", "θ", "φ"]), old_in_new)?;
    Ok(CatalogEntry {
        name: "schwarzschild".into(),
        description: "Schwarzschild exterior in Schwarzschild coordinates".into(),
        parameters: vec![m.to_string()],
        functions: vec![],
        metric: Arc::new(metric),
        alternate,
        properties: Properties {
            flat: false,
            vacuum: true,
            vsi: false,
            kundt: false,
        },
    })
}

fn pp_wave(p: &Params, vacuum: bool) -> Result<CatalogEntry> {
    check_known(p, &["f", "H"])?;
    let coords = names(&["u", "v", "x", "y"]);
    let chart = Chart::new(&coords)?;
    let (h, functions, description) = if vacuum {
        let f = param_name(p, "f", "f")?;
        let prof = Expr::function(f, &["u"])?;
        let h = &(&s("x").pow(2) - &s("y").pow(2)) * &prof;
        (h, vec![(f.to_string(), names(&["u"]))], "vacuum pp-wave with H = (x^2 - y^2) f(u)".to_string())
    } else {
        let name = param_name(p, "H", "H")?;
        let h = Expr::function(name, &["u", "x", "y"])?;
        (h, vec![(name.to_string(), names(&["u", "x", "y"]))], "pp-wave with free profile H(u,x,y)".to_string())
    };
    let metric = construct_kundt_metric(
        chart,
        &(&h * &Expr::rational(1, 2)),
        &[Expr::zero(), Expr::zero()],
        &[vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]],
    )?;
    // v = V + X Y, other coordinates renamed
    let old_in_new = vec![s("U"), &s("V") + &(&s("X") * &s("Y")), s("X"), s("Y")];
    let alternate = alternate(&metric, &names(&["U", "V", "X", "Y"]), old_in_new)?;
    Ok(CatalogEntry {
        name: if vacuum { "pp_wave_vacuum" } else { "pp_wave_general" }.into(),
        description,
        parameters: vec![],
        functions,
        metric: Arc::new(metric),
        alternate,
        properties: Properties {
            flat: false,
            vacuum,
            vsi: true,
            kundt: true,
        },
    })
}

fn kundt_generic(p: &Params) -> Result<CatalogEntry> {
    check_known(p, &["n"])?;
    let n = param_usize(p, "n", 4)?;
    if n < 3 {
        return Err(CoreError::BadParameter("kundt_generic needs n >= 3".into()));
    }
    let m = n - 2;
    let trans = spatial_names(m);
    let mut coords = names(&["u", "v"]);
    coords.extend(trans.iter().cloned());
    let chart = Chart::new(&coords)?;
    let all: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    let mut no_v = vec!["u"];
    no_v.extend(trans.iter().map(|s| s.as_str()));
    let mut functions = vec![("A".to_string(), names(&all))];
    let a = Expr::function("A", &all)?;
    let mut b = Vec::new();
    for k in 1..=m {
        let name = format!("B{k}");
        b.push(Expr::function(&name, &all)?);
        functions.push((name, names(&all)));
    }
    let mut gamma = vec![vec![Expr::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let name = format!("G{}{}", i + 1, j + 1);
            let e = Expr::function(&name, &no_v)?;
            functions.push((name, names(&no_v)));
            gamma[i][j] = e.clone();
            gamma[j][i] = e;
        }
    }
    let metric = construct_kundt_metric(chart, &a, &b, &gamma)?;
    // upper-case renaming with the transverse coordinates reversed
    let mut alt: Vec<String> = coords.iter().map(|c| c.to_uppercase()).collect();
    alt[2..].reverse();
    let old_in_new = (0..n)
        .map(|i| if i < 2 { s(&alt[i]) } else { s(&alt[n + 1 - i]) })
        .collect();
    let alternate = alternate(&metric, &alt, old_in_new)?;
    Ok(CatalogEntry {
        name: "kundt_generic".into(),
        description: format!("Kundt normal form in dimension {n} with free A, B_k and v-independent transverse metric"),
        parameters: vec![],
        functions,
        metric: Arc::new(metric),
        alternate,
        properties: Properties {
            kundt: true,
            ..Properties::default()
        },
    })
}

fn walker3(p: &Params) -> Result<CatalogEntry> {
    check_known(p, &["f"])?;
    let f = param_name(p, "f", "f")?;
    let coords = names(&["u", "v", "x"]);
    let chart = Chart::new(&coords)?;
    let prof = Expr::function(f, &["u", "x"])?;
    let metric = construct_kundt_metric(chart, &(&prof * &Expr::rational(1, 2)), &[Expr::zero()], &[vec![Expr::one()]])?;
    // v = V + X^2
    let old_in_new = vec![s("U"), &s("V") + &s("X").pow(2), s("X")];
    let alternate = alternate(&metric, &names(&["U", "V", "X"]), old_in_new)?;
    Ok(CatalogEntry {
        name: "walker3".into(),
        description: "three-dimensional Walker metric 2du dv + f(u,x) du^2 + dx^2".into(),
        parameters: vec![],
        functions: vec![(f.to_string(), names(&["u", "x"]))],
        metric: Arc::new(metric),
        alternate,
        properties: Properties {
            kundt: true,
            ..Properties::default()
        },
    })
}
