//! Plain-text LP export and a reader for the same dialect.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{MilpError, MilpModel, Sense, VarKind, VariableIndex};

const TERMS_PER_LINE: usize = 8;

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value.
fn number(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

fn write_terms<'a>(out: &mut String, terms: impl Iterator<Item = (&'a VariableIndex, &'a f64)>) {
    let mut empty = true;
    for (n, (v, &c)) in terms.enumerate() {
        if n > 0 && n % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        if n == 0 && sign == '+' {
            let _ = write!(out, " {} {v}", number(c));
        } else {
            let _ = write!(out, " {sign} {} {v}", number(c.abs()));
        }
        empty = false;
    }
    if empty {
        out.push_str(" 0");
    }
}

/// LP text: objective, named rows, bounds for continuous variables and the
/// binary section. Output depends only on the model.
pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ green drone routing problem\n");
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model.objective.iter());
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name());
        write_terms(&mut out, c.coefficients.iter());
        let _ = writeln!(out, " {} {}", c.sense.symbol(), number(c.rhs));
    }
    out.push_str("Bounds\n");
    for (v, var) in &model.variables {
        if var.kind == VarKind::Continuous {
            let _ = writeln!(out, " {} <= {v} <= {}", number(var.lower), number(var.upper));
        }
    }
    out.push_str("Binaries\n");
    for (v, var) in &model.variables {
        if var.kind == VarKind::Binary {
            let _ = writeln!(out, " {v}");
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub name: String,
    pub coefficients: BTreeMap<String, f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Sparse content of an LP file keyed by variable name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedLp {
    pub objective: BTreeMap<String, f64>,
    pub rows: Vec<ParsedRow>,
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub binaries: BTreeSet<String>,
}

impl ParsedLp {
    /// The model as the parser would see it after export: names instead of
    /// indices, numbers rounded to the printed precision.
    pub fn from_model(model: &MilpModel) -> Self {
        let round = |v: f64| number(v).parse::<f64>().unwrap();
        let named = |m: &BTreeMap<VariableIndex, f64>| m.iter().map(|(v, &c)| (v.to_string(), round(c))).collect();
        ParsedLp {
            objective: named(&model.objective),
            rows: model
                .constraints
                .iter()
                .map(|c| ParsedRow { name: c.name(), coefficients: named(&c.coefficients), sense: c.sense, rhs: round(c.rhs) })
                .collect(),
            bounds: model
                .variables
                .iter()
                .filter(|(_, v)| v.kind == VarKind::Continuous)
                .map(|(i, v)| (i.to_string(), (round(v.lower), round(v.upper))))
                .collect(),
            binaries: model.variables.iter().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| i.to_string()).collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Binaries,
    Done,
}

fn parse_error(line: usize, reason: impl Into<String>) -> MilpError {
    MilpError::Parse { line, reason: reason.into() }
}

/// Parses `[+|-] coef name` sequences into a coefficient map.
fn parse_terms(tokens: &[&str], line: usize) -> Result<BTreeMap<String, f64>, MilpError> {
    let mut terms = BTreeMap::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &tok in tokens {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(v) = tok.parse::<f64>() {
                    coef = Some(v);
                } else {
                    let c = sign * coef.take().unwrap_or(1.0);
                    *terms.entry(tok.to_string()).or_insert(0.0) += c;
                    sign = 1.0;
                }
            }
        }
    }
    if coef.is_some() && !(terms.is_empty() && coef == Some(0.0)) {
        return Err(parse_error(line, "dangling coefficient"));
    }
    Ok(terms)
}

pub fn parse_lp(text: &str) -> Result<ParsedLp, MilpError> {
    let mut parsed = ParsedLp::default();
    let mut section = Section::Preamble;
    // (first line number, accumulated tokens) of the statement being read
    let mut pending: Option<(usize, Vec<String>)> = None;
    let mut statements: Vec<(Section, usize, Vec<String>)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let keyword = content.to_ascii_lowercase();
        let next = match keyword.as_str() {
            "minimize" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Rows),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" => Some(Section::Binaries),
            "end" => Some(Section::Done),
            _ => None,
        };
        if let Some(s) = next {
            if let Some((l, toks)) = pending.take() {
                statements.push((section, l, toks));
            }
            section = s;
            continue;
        }
        let tokens = content.split_whitespace().map(String::from);
        match section {
            Section::Objective | Section::Rows => {
                let starts_new = content.split_whitespace().next().is_some_and(|t| t.ends_with(':'));
                if starts_new {
                    if let Some((l, toks)) = pending.take() {
                        statements.push((section, l, toks));
                    }
                    pending = Some((line, tokens.collect()));
                } else if let Some((_, toks)) = pending.as_mut() {
                    toks.extend(tokens);
                } else {
                    return Err(parse_error(line, "continuation without a statement"));
                }
            }
            Section::Bounds | Section::Binaries => statements.push((section, line, tokens.collect())),
            Section::Preamble | Section::Done => return Err(parse_error(line, format!("unexpected text {content:?}"))),
        }
    }
    if let Some((l, toks)) = pending.take() {
        statements.push((section, l, toks));
    }

    for (sec, line, toks) in statements {
        let toks: Vec<&str> = toks.iter().map(String::as_str).collect();
        match sec {
            Section::Objective => {
                parsed.objective = parse_terms(&toks[1..], line)?;
            }
            Section::Rows => {
                let name = toks[0].trim_end_matches(':').to_string();
                let pos = toks
                    .iter()
                    .position(|t| matches!(*t, "<=" | "=" | ">=" | "=<" | "=>"))
                    .ok_or_else(|| parse_error(line, "row without a sense"))?;
                let sense = match toks[pos] {
                    "<=" | "=<" => Sense::Le,
                    "=" => Sense::Eq,
                    _ => Sense::Ge,
                };
                let rhs_toks = &toks[pos + 1..];
                let rhs = match rhs_toks {
                    [v] => v.parse::<f64>().map_err(|_| parse_error(line, format!("bad rhs {v:?}")))?,
                    ["-", v] => -v.parse::<f64>().map_err(|_| parse_error(line, format!("bad rhs {v:?}")))?,
                    _ => return Err(parse_error(line, "bad right-hand side")),
                };
                let coefficients = parse_terms(&toks[1..pos], line)?;
                parsed.rows.push(ParsedRow { name, coefficients, sense, rhs });
            }
            Section::Bounds => match toks.as_slice() {
                [lo, "<=", name, "<=", hi] => {
                    let lo = lo.parse::<f64>().map_err(|_| parse_error(line, "bad lower bound"))?;
                    let hi = hi.parse::<f64>().map_err(|_| parse_error(line, "bad upper bound"))?;
                    parsed.bounds.insert(name.to_string(), (lo, hi));
                }
                _ => return Err(parse_error(line, "expected `lo <= name <= hi`")),
            },
            Section::Binaries => {
                parsed.binaries.extend(toks.iter().map(|t| t.to_string()));
            }
            Section::Preamble | Section::Done => {}
        }
    }
    Ok(parsed)
}
