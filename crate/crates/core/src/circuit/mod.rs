//! The `.qnet` line format for Gaussian optical networks.
//!
//! ```text
//! # comment
//! mode p
//! mode c
//! squeeze2 p c gain=3.02
//! loss p t=0.73
//! mix p v=0.986 eps=0.9          # optional anc_var=<float>
//! measure p phase=0
//! measure_joint p c phase_a=0 phase_b=0 sign=-
//! ```
//!
//! Elements are applied in file order to an all-vacuum state. Key/value pairs
//! may appear in any order on a line.

mod eval;
mod parse;

use std::fmt;

use serde::Serialize;

use crate::gaussian::{ModeLabel, Sign};

pub use eval::evaluate;
pub use parse::{parse, Override};

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Squeeze2 { a: usize, b: usize, gain: f64 },
    Loss { mode: usize, t: f64 },
    Mix { mode: usize, v: f64, eps: f64, anc_var: Option<f64> },
    MeasureSingle { mode: usize, phase: f64 },
    MeasureJoint { a: usize, b: usize, phase_a: f64, phase_b: f64, sign: Sign },
}

impl Element {
    pub fn keyword(&self) -> &'static str {
        match self {
            Element::Squeeze2 { .. } => "squeeze2",
            Element::Loss { .. } => "loss",
            Element::Mix { .. } => "mix",
            Element::MeasureSingle { .. } => "measure",
            Element::MeasureJoint { .. } => "measure_joint",
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Element::MeasureSingle { .. } | Element::MeasureJoint { .. })
    }

    /// Modes the element acts on, in statement order.
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Element::Squeeze2 { a, b, .. } | Element::MeasureJoint { a, b, .. } => vec![a, b],
            Element::Loss { mode, .. }
            | Element::Mix { mode, .. }
            | Element::MeasureSingle { mode, .. } => vec![mode],
        }
    }
}

/// A parsed network: mode declarations plus the ordered element list.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub modes: Vec<ModeLabel>,
    pub elements: Vec<Element>,
}

impl CircuitSpec {
    pub fn measurements(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| e.is_measurement())
    }

    fn name(&self, mode: usize) -> &str {
        &self.modes[mode].name
    }

    /// One canonical line per element, without the trailing newline.
    pub fn render_element(&self, e: &Element) -> String {
        match *e {
            Element::Squeeze2 { a, b, gain } => {
                format!("squeeze2 {} {} gain={gain}", self.name(a), self.name(b))
            }
            Element::Loss { mode, t } => format!("loss {} t={t}", self.name(mode)),
            Element::Mix { mode, v, eps, anc_var } => {
                let mut s = format!("mix {} v={v} eps={eps}", self.name(mode));
                if let Some(a) = anc_var {
                    s.push_str(&format!(" anc_var={a}"));
                }
                s
            }
            Element::MeasureSingle { mode, phase } => {
                format!("measure {} phase={phase}", self.name(mode))
            }
            Element::MeasureJoint { a, b, phase_a, phase_b, sign } => format!(
                "measure_joint {} {} phase_a={phase_a} phase_b={phase_b} sign={}",
                self.name(a),
                self.name(b),
                sign.symbol()
            ),
        }
    }

    /// Canonical source text; parses back to an identical spec.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.modes {
            out.push_str("mode ");
            out.push_str(&m.name);
            out.push('\n');
        }
        for e in &self.elements {
            out.push_str(&self.render_element(e));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    UnknownKeyword,
    UndeclaredMode,
    OutOfRange,
    DuplicateMode,
    /// Wrong arity, bad or missing key/value pairs, unparsable numbers,
    /// or a circuit with nothing to measure.
    Malformed,
}

impl DiagnosticKind {
    pub const ALL: [DiagnosticKind; 5] = [
        DiagnosticKind::UnknownKeyword,
        DiagnosticKind::UndeclaredMode,
        DiagnosticKind::OutOfRange,
        DiagnosticKind::DuplicateMode,
        DiagnosticKind::Malformed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::UnknownKeyword => "unknown-keyword",
            DiagnosticKind::UndeclaredMode => "undeclared-mode",
            DiagnosticKind::OutOfRange => "out-of-range",
            DiagnosticKind::DuplicateMode => "duplicate-mode",
            DiagnosticKind::Malformed => "malformed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// 1-based source line.
    pub line: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.kind.as_str(), self.message)
    }
}

/// Every diagnostic found in a source text, in line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
