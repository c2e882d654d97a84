//! The line-oriented metric file format.
//!
//! ```text
//! # vacuum pp-wave
//! coordinates: u, v, x, y
//! signature: -+++
//! functions: f(u)
//! g(u,u) = (x^2 - y^2)*f(u)
//! g(u,v) = 1
//! g(x,x) = 1
//! g(y,y) = 1
//! ```
//!
//! Headers (`coordinates`, `signature`, `parameters`, `functions`,
//! `torsion`) may appear in any order. `g(a,b)` sets both g_ab and g_ba;
//! components not listed are zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use curvscan_core::catalog::CatalogEntry;
use curvscan_core::probe::Ansatz;
use curvscan_core::symbolic::{parse, Expr, KernelError, SymbolTable};
use curvscan_core::{Chart, Metric, Signature};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct TorsionSpec {
    pub ansatz: Ansatz,
    pub tests: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct MetricFile {
    pub coordinates: Vec<String>,
    pub signature: Signature,
    pub parameters: Vec<String>,
    pub functions: Vec<(String, Vec<String>)>,
    /// Upper-triangular components keyed by (row, column), row <= column.
    pub components: BTreeMap<(usize, usize), Expr>,
    pub torsion: Option<TorsionSpec>,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        col,
        message: msg.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Splits at commas and whitespace outside parentheses, keeping byte offsets.
fn split_items(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let sep = depth == 0 && (c == ',' || c.is_whitespace());
        match (sep, start) {
            (true, Some(st)) => {
                out.push((st, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

fn char_col(line: &str, byte: usize) -> usize {
    line[..byte.min(line.len())].chars().count() + 1
}

impl MetricFile {
    pub fn parse(src: &str) -> Result<MetricFile, CliError> {
        let mut coordinates: Option<(usize, Vec<String>)> = None;
        let mut signature: Option<(usize, usize, String)> = None;
        let mut parameters = Vec::new();
        let mut functions: Vec<(String, Vec<String>)> = Vec::new();
        let mut torsion_line: Option<(usize, usize, String)> = None;
        let mut comp_lines = Vec::new();

        for (ln, raw) in src.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let lead = line.len() - line.trim_start().len();
            let body = line.trim_start();
            if body.starts_with("g(") || body.starts_with("g (") {
                comp_lines.push((ln, raw, lead));
                continue;
            }
            let Some(colon) = body.find(':') else {
                return Err(err(ln, lead + 1, "expected 'key: value' or 'g(a,b) = expr'"));
            };
            let key = body[..colon].trim();
            let value_off = lead + colon + 1;
            let value = &line[value_off..];
            match key {
                "coordinates" => {
                    let mut names = Vec::new();
                    for (off, item) in split_items(value) {
                        if !is_identifier(item) {
                            return Err(err(ln, char_col(line, value_off + off), format!("'{item}' is not an identifier")));
                        }
                        if names.contains(&item.to_string()) {
                            return Err(err(ln, char_col(line, value_off + off), format!("duplicate coordinate '{item}'")));
                        }
                        names.push(item.to_string());
                    }
                    coordinates = Some((ln, names));
                }
                "signature" => {
                    let off = value.len() - value.trim_start().len();
                    signature = Some((ln, char_col(line, value_off + off), value.trim().to_string()));
                }
                "parameters" => {
                    for (off, item) in split_items(value) {
                        if !is_identifier(item) {
                            return Err(err(ln, char_col(line, value_off + off), format!("'{item}' is not an identifier")));
                        }
                        parameters.push(item.to_string());
                    }
                }
                "functions" => {
                    for (off, item) in split_items(value) {
                        let col = char_col(line, value_off + off);
                        let (name, args) = match item.find('(') {
                            Some(p) if item.ends_with(')') => (&item[..p], &item[p + 1..item.len() - 1]),
                            _ => return Err(err(ln, col, format!("'{item}' should look like F(x,y)"))),
                        };
                        if !is_identifier(name) {
                            return Err(err(ln, col, format!("'{name}' is not an identifier")));
                        }
                        let args: Vec<String> = args.split(',').map(|a| a.trim().to_string()).collect();
                        if args.iter().any(|a| !is_identifier(a)) {
                            return Err(err(ln, col, format!("bad argument list in '{item}'")));
                        }
                        functions.push((name.to_string(), args));
                    }
                }
                "torsion" => {
                    let off = value.len() - value.trim_start().len();
                    torsion_line = Some((ln, char_col(line, value_off + off), value.trim().to_string()));
                }
                other => return Err(err(ln, lead + 1, format!("unknown key '{other}'"))),
            }
        }

        let Some((coord_line, coordinates)) = coordinates else {
            return Err(err(1, 1, "missing 'coordinates:' line"));
        };
        let n = coordinates.len();
        if n < 2 {
            return Err(err(coord_line, 1, "at least two coordinates are needed"));
        }
        let Some((sl, sc, sig)) = signature else {
            return Err(err(1, 1, "missing 'signature:' line"));
        };
        let signature = match sig.as_str() {
            "riemannian" => Signature::riemannian(n),
            "lorentzian" => Signature::lorentzian(n),
            s => Signature::parse(s).ok_or_else(|| err(sl, sc, format!("bad signature '{s}'")))?,
        };
        if signature.dim() != n {
            return Err(err(sl, sc, format!("signature has {} entries for {n} coordinates", signature.dim())));
        }

        let mut table = SymbolTable::new();
        for c in &coordinates {
            table.add_symbol(c);
        }
        for p in &parameters {
            if coordinates.contains(p) {
                return Err(err(1, 1, format!("parameter '{p}' is also a coordinate")));
            }
            table.add_symbol(p);
        }
        for (f, args) in &functions {
            if let Some(a) = args.iter().find(|a| !coordinates.contains(a)) {
                return Err(err(1, 1, format!("argument '{a}' of {f} is not a coordinate")));
            }
            let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
            table.add_function(f, &args);
        }

        let torsion = match torsion_line {
            None => None,
            Some((ln, col, text)) => {
                let mut it = text.split_whitespace();
                let kind = it.next().unwrap_or("");
                let ansatz = Ansatz::parse(kind).ok_or_else(|| err(ln, col, format!("unknown torsion ansatz '{kind}'")))?;
                let tests: Vec<String> = it.map(|s| s.trim_matches(',').to_string()).filter(|s| !s.is_empty()).collect();
                let need = ansatz.test_function_count(n);
                if tests.len() != need {
                    return Err(err(ln, col, format!("{} ansatz needs {need} test function name(s)", ansatz.name())));
                }
                for t in &tests {
                    if !is_identifier(t) || coordinates.contains(t) || parameters.contains(t) || functions.iter().any(|(f, _)| f == t) {
                        return Err(err(ln, col, format!("test function name '{t}' is invalid or already taken")));
                    }
                }
                Some(TorsionSpec { ansatz, tests })
            }
        };

        let mut components = BTreeMap::new();
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (ln, raw, lead) in comp_lines {
            let line = raw.split('#').next().unwrap_or("");
            let open = line[lead..].find('(').map(|p| lead + p).unwrap_or(lead);
            let Some(close) = line[open..].find(')').map(|p| open + p) else {
                return Err(err(ln, char_col(line, open), "missing ')' in component index"));
            };
            let idx: Vec<&str> = line[open + 1..close].split(',').map(|s| s.trim()).collect();
            let pos = |name: &str| coordinates.iter().position(|c| c == name);
            let (a, b) = match idx.as_slice() {
                [a, b] => match (pos(a), pos(b)) {
                    (Some(a), Some(b)) => (a.min(b), a.max(b)),
                    _ => return Err(err(ln, char_col(line, open + 1), format!("unknown coordinate in g({a},{b})"))),
                },
                _ => return Err(err(ln, char_col(line, open + 1), "component index needs two coordinates")),
            };
            let rest = &line[close + 1..];
            let eq_rel = rest.find('=').ok_or_else(|| err(ln, char_col(line, close + 1), "expected '='"))?;
            if !rest[..eq_rel].trim().is_empty() {
                return Err(err(ln, char_col(line, close + 1), "expected '=' after the index"));
            }
            let expr_start = close + 1 + eq_rel + 1;
            let text = &line[expr_start..];
            let e = parse(text, &table).map_err(|e| match e {
                KernelError::Parse { message, offset } => err(ln, char_col(line, expr_start + offset), message),
                other => err(ln, char_col(line, expr_start), other.to_string()),
            })?;
            if let Some(prev) = seen.insert((a, b), ln) {
                return Err(err(ln, lead + 1, format!("component g({},{}) already set on line {prev}", coordinates[a], coordinates[b])));
            }
            components.insert((a, b), e);
        }

        Ok(MetricFile {
            coordinates,
            signature,
            parameters,
            functions,
            components,
            torsion,
        })
    }

    pub fn to_metric(&self) -> Result<Metric, CliError> {
        let chart = Chart::new(&self.coordinates)?;
        let n = self.coordinates.len();
        let mut rows = vec![vec![Expr::zero(); n]; n];
        for (&(a, b), e) in &self.components {
            rows[a][b] = e.clone();
            rows[b][a] = e.clone();
        }
        Ok(Metric::new(chart, rows, self.signature)?)
    }

    pub fn chart(&self) -> Result<Arc<Chart>, CliError> {
        Ok(Chart::new(&self.coordinates)?)
    }

    /// Test functions of the torsion block as expressions of all coordinates.
    pub fn test_functions(&self) -> Result<Vec<Expr>, CliError> {
        let coords: Vec<&str> = self.coordinates.iter().map(|s| s.as_str()).collect();
        let Some(t) = &self.torsion else {
            return Ok(Vec::new());
        };
        t.tests
            .iter()
            .map(|name| Expr::function(name, &coords).map_err(|e| CliError::Input(e.to_string())))
            .collect()
    }

    pub fn from_metric(g: &Metric, parameters: &[String], functions: &[(String, Vec<String>)]) -> MetricFile {
        let n = g.dim();
        let mut components = BTreeMap::new();
        for a in 0..n {
            for b in a..n {
                let e = g.g(a, b);
                if !e.is_zero() {
                    components.insert((a, b), e.clone());
                }
            }
        }
        MetricFile {
            coordinates: g.chart().coords().to_vec(),
            signature: g.signature(),
            parameters: parameters.to_vec(),
            functions: functions.to_vec(),
            components,
            torsion: None,
        }
    }

    pub fn from_entry(e: &CatalogEntry, alternate: bool) -> MetricFile {
        let g = if alternate { &e.alternate.metric } else { &e.metric };
        let functions: Vec<(String, Vec<String>)> = if alternate {
            // arguments follow the renamed chart
            let used = g.free_functions();
            e.functions
                .iter()
                .filter(|(f, _)| used.contains(f))
                .map(|(f, args)| {
                    let renamed = args
                        .iter()
                        .map(|a| {
                            let i = e.metric.chart().index_of(a).expect("argument is a coordinate");
                            e.alternate.old_in_new[i].to_string()
                        })
                        .collect();
                    (f.clone(), renamed)
                })
                .collect()
        } else {
            e.functions.clone()
        };
        MetricFile::from_metric(g, &e.parameters, &functions)
    }

    pub fn to_text(&self, title: Option<&str>) -> String {
        let mut s = String::new();
        if let Some(t) = title {
            for l in t.lines() {
                let _ = writeln!(s, "# {l}");
            }
        }
        let _ = writeln!(s, "coordinates: {}", self.coordinates.join(", "));
        let _ = writeln!(s, "signature: {}", self.signature);
        if !self.parameters.is_empty() {
            let _ = writeln!(s, "parameters: {}", self.parameters.join(", "));
        }
        if !self.functions.is_empty() {
            let fs: Vec<String> = self.functions.iter().map(|(f, a)| format!("{f}({})", a.join(","))).collect();
            let _ = writeln!(s, "functions: {}", fs.join(" "));
        }
        if let Some(t) = &self.torsion {
            let _ = writeln!(s, "torsion: {} {}", t.ansatz.name(), t.tests.join(" "));
        }
        for (&(a, b), e) in &self.components {
            let _ = writeln!(s, "g({},{}) = {e}", self.coordinates[a], self.coordinates[b]);
        }
        s
    }
}
