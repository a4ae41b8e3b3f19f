use std::collections::HashMap;

use super::{CircuitSpec, Diagnostic, DiagnosticKind, Element, ParseError};
use crate::error::{invalid, Error};
use crate::gaussian::{ModeLabel, Sign};

struct Statement<'a> {
    keyword: &'a str,
    positional: Vec<&'a str>,
    pairs: Vec<(&'a str, &'a str)>,
}

fn split(line: &str) -> Option<Statement<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut tokens = code.split_whitespace();
    let keyword = tokens.next()?;
    let mut positional = Vec::new();
    let mut pairs = Vec::new();
    for tok in tokens {
        match tok.split_once('=') {
            Some((k, v)) => pairs.push((k, v)),
            None => positional.push(tok),
        }
    }
    Some(Statement { keyword, positional, pairs })
}

/// `(positional arity, required keys, optional keys)` per keyword.
fn signature(keyword: &str) -> Option<(usize, &'static [&'static str], &'static [&'static str])> {
    Some(match keyword {
        "mode" => (1, &[], &[]),
        "squeeze2" => (2, &["gain"], &[]),
        "loss" => (1, &["t"], &[]),
        "mix" => (1, &["v", "eps"], &["anc_var"]),
        "measure" => (1, &["phase"], &[]),
        "measure_joint" => (2, &["phase_a", "phase_b", "sign"], &[]),
        _ => return None,
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Plain decimal with optional sign, fraction and exponent.
fn parse_float(s: &str) -> Option<f64> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Domain check shared by the parser and [`Override`].
fn check_value(key: &str, value: f64) -> Result<(), String> {
    let ok = match key {
        "gain" | "anc_var" => value >= 1.0,
        "t" | "v" | "eps" => (0.0..=1.0).contains(&value),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        let domain = match key {
            "gain" | "anc_var" => ">= 1",
            _ => "within [0, 1]",
        };
        Err(format!("{key}={value} must be {domain}"))
    }
}

struct Parser {
    modes: Vec<ModeLabel>,
    elements: Vec<Element>,
    diagnostics: Vec<Diagnostic>,
}

impl Parser {
    fn diag(&mut self, line: usize, kind: DiagnosticKind, message: String) {
        self.diagnostics.push(Diagnostic { line, kind, message });
    }

    fn statement(&mut self, line: usize, st: Statement<'_>) {
        let Some((arity, required, optional)) = signature(st.keyword) else {
            self.diag(line, DiagnosticKind::UnknownKeyword, format!("unknown keyword `{}`", st.keyword));
            return;
        };
        if st.positional.len() != arity {
            self.diag(
                line,
                DiagnosticKind::Malformed,
                format!("`{}` takes {arity} mode name(s), found {}", st.keyword, st.positional.len()),
            );
            return;
        }

        if st.keyword == "mode" {
            let name = st.positional[0];
            if !is_identifier(name) {
                self.diag(line, DiagnosticKind::Malformed, format!("`{name}` is not a valid mode name"));
            } else if !st.pairs.is_empty() {
                self.diag(line, DiagnosticKind::Malformed, "`mode` takes no key=value pairs".into());
            } else if self.modes.iter().any(|m| m.name == name) {
                self.diag(line, DiagnosticKind::DuplicateMode, format!("mode `{name}` already declared"));
            } else {
                let index = self.modes.len();
                self.modes.push(ModeLabel { name: name.to_string(), index });
            }
            return;
        }

        let mut modes = Vec::with_capacity(arity);
        for name in &st.positional {
            match self.modes.iter().find(|m| m.name == *name) {
                Some(m) => modes.push(m.index),
                None => {
                    self.diag(line, DiagnosticKind::UndeclaredMode, format!("mode `{name}` used before declaration"));
                    return;
                }
            }
        }
        if arity == 2 && modes[0] == modes[1] {
            self.diag(line, DiagnosticKind::Malformed, format!("`{}` needs two distinct modes", st.keyword));
            return;
        }

        let mut values: HashMap<&str, &str> = HashMap::new();
        for (k, v) in &st.pairs {
            if !required.contains(k) && !optional.contains(k) {
                self.diag(line, DiagnosticKind::Malformed, format!("`{}` does not accept key `{k}`", st.keyword));
                return;
            }
            if values.insert(k, v).is_some() {
                self.diag(line, DiagnosticKind::Malformed, format!("key `{k}` given twice"));
                return;
            }
        }
        if let Some(missing) = required.iter().find(|k| !values.contains_key(*k)) {
            self.diag(line, DiagnosticKind::Malformed, format!("`{}` requires `{missing}=`", st.keyword));
            return;
        }

        let mut numbers: HashMap<&str, f64> = HashMap::new();
        let mut sign = None;
        for (&k, &v) in &values {
            if k == "sign" {
                sign = match v {
                    "+" => Some(Sign::Plus),
                    "-" => Some(Sign::Minus),
                    _ => {
                        self.diag(line, DiagnosticKind::Malformed, format!("sign must be `+` or `-`, found `{v}`"));
                        return;
                    }
                };
                continue;
            }
            let Some(x) = parse_float(v) else {
                self.diag(line, DiagnosticKind::Malformed, format!("`{v}` is not a number (key `{k}`)"));
                return;
            };
            if let Err(msg) = check_value(k, x) {
                self.diag(line, DiagnosticKind::OutOfRange, msg);
                return;
            }
            numbers.insert(k, x);
        }

        let element = match st.keyword {
            "squeeze2" => Element::Squeeze2 { a: modes[0], b: modes[1], gain: numbers["gain"] },
            "loss" => Element::Loss { mode: modes[0], t: numbers["t"] },
            "mix" => Element::Mix {
                mode: modes[0],
                v: numbers["v"],
                eps: numbers["eps"],
                anc_var: numbers.get("anc_var").copied(),
            },
            "measure" => Element::MeasureSingle { mode: modes[0], phase: numbers["phase"] },
            "measure_joint" => Element::MeasureJoint {
                a: modes[0],
                b: modes[1],
                phase_a: numbers["phase_a"],
                phase_b: numbers["phase_b"],
                sign: sign.expect("sign is a required key"),
            },
            _ => unreachable!("keyword validated by signature()"),
        };
        self.elements.push(element);
    }
}

/// Parses `.qnet` source. All problems are collected rather than stopping at
/// the first one.
pub fn parse(text: &str) -> Result<CircuitSpec, ParseError> {
    let mut p = Parser { modes: Vec::new(), elements: Vec::new(), diagnostics: Vec::new() };
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        last_line = i + 1;
        if let Some(st) = split(line) {
            p.statement(i + 1, st);
        }
    }
    if !p.elements.iter().any(Element::is_measurement) {
        p.diag(last_line.max(1), DiagnosticKind::Malformed, "circuit has no measure statement".into());
    }
    if p.diagnostics.is_empty() {
        Ok(CircuitSpec { modes: p.modes, elements: p.elements })
    } else {
        Err(ParseError { diagnostics: p.diagnostics })
    }
}

/// Command-line parameter override: `<keyword>[.<mode>].<key>=<value>`, e.g.
/// `squeeze2.gain=3.5` or `mix.c.eps=1`. Applies to every matching element.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub keyword: String,
    pub mode: Option<String>,
    pub key: String,
    pub value: f64,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (path, value) = s
            .split_once('=')
            .ok_or_else(|| invalid(format!("override `{s}` lacks `=`")))?;
        let value = parse_float(value).ok_or_else(|| invalid(format!("override `{s}`: `{value}` is not a number")))?;
        let parts: Vec<&str> = path.split('.').collect();
        let (keyword, mode, key) = match parts.as_slice() {
            [k, key] => (*k, None, *key),
            [k, m, key] => (*k, Some(m.to_string()), *key),
            _ => return Err(invalid(format!("override `{s}` must look like keyword[.mode].key=value"))),
        };
        let Some((_, required, optional)) = signature(keyword) else {
            return Err(invalid(format!("override `{s}`: unknown keyword `{keyword}`")));
        };
        if !(required.contains(&key) || optional.contains(&key)) || key == "sign" {
            return Err(invalid(format!("override `{s}`: `{keyword}` has no numeric key `{key}`")));
        }
        check_value(key, value).map_err(|m| invalid(format!("override `{s}`: {m}")))?;
        Ok(Override { keyword: keyword.to_string(), mode, key: key.to_string(), value })
    }
}

impl CircuitSpec {
    /// Applies an override; fails when it matches no element.
    pub fn apply_override(&mut self, o: &Override) -> Result<usize, Error> {
        let target = match &o.mode {
            Some(name) => Some(
                self.modes
                    .iter()
                    .find(|m| &m.name == name)
                    .map(|m| m.index)
                    .ok_or_else(|| invalid(format!("override names undeclared mode `{name}`")))?,
            ),
            None => None,
        };
        let mut hits = 0;
        for e in &mut self.elements {
            if e.keyword() != o.keyword || target.is_some_and(|t| !e.modes().contains(&t)) {
                continue;
            }
            let slot = match (e, o.key.as_str()) {
                (Element::Squeeze2 { gain, .. }, "gain") => gain,
                (Element::Loss { t, .. }, "t") => t,
                (Element::Mix { v, .. }, "v") => v,
                (Element::Mix { eps, .. }, "eps") => eps,
                (Element::Mix { anc_var, .. }, "anc_var") => anc_var.insert(o.value),
                (Element::MeasureSingle { phase, .. }, "phase") => phase,
                (Element::MeasureJoint { phase_a, .. }, "phase_a") => phase_a,
                (Element::MeasureJoint { phase_b, .. }, "phase_b") => phase_b,
                _ => continue,
            };
            *slot = o.value;
            hits += 1;
        }
        if hits == 0 {
            return Err(invalid(format!("override `{}.{}` matched no element", o.keyword, o.key)));
        }
        Ok(hits)
    }
}
