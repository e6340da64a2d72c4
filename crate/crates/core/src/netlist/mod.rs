//! Gate-level stochastic-computing circuits.
//!
//! A [`Netlist`] is a DAG of SBG sources, two-input `AND` gates, `MUX` gates
//! and output counters. Netlists come from the text format handled by
//! [`parse`] or from the builder methods used by the application modules.
//!
//! ```text
//! # one directive per line, '#' starts a comment
//! sbg a p=0.5          # probability source (mapped through the P-V inverse)
//! sbg b v=1.2          # voltage source
//! and c a b            # c = a AND b
//! mux d a b c          # d = c ? a : b   (sel = 1 selects the first input)
//! out d                # attach a counter
//! ```

use std::fmt;

mod eval;
mod parse;
mod report;
mod validate;

pub use eval::{evaluate, EvalResult, OutputValue};
pub use parse::parse;
pub use report::{resource_report, CostModel, ResourceReport};
pub use validate::validate;

/// What drives an SBG source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceValue {
    /// Target `1` density. `0` and `1` are tied to constant logic levels;
    /// anything else is converted to a bias voltage.
    Probability(f64),
    /// Bias voltage (V) applied directly.
    Voltage(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Source {
    pub id: String,
    pub value: SourceValue,
    pub line: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    And { a: String, b: String },
    /// Output follows `a` where `sel` is 1 and `b` where it is 0.
    Mux { a: String, b: String, sel: String },
}

impl GateKind {
    pub fn inputs(&self) -> Vec<&str> {
        match self {
            GateKind::And { a, b } => vec![a, b],
            GateKind::Mux { a, b, sel } => vec![a, b, sel],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    pub line: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub id: String,
    pub line: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Netlist {
    pub sources: Vec<Source>,
    /// Gates in topological order once parsed or validated.
    pub gates: Vec<Gate>,
    pub outputs: Vec<Output>,
    /// Non-fatal findings from parsing, such as a node feeding both inputs
    /// of one gate.
    pub warnings: Vec<Diagnostic>,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_probability_source(&mut self, id: impl Into<String>, p: f64) {
        self.sources.push(Source {
            id: id.into(),
            value: SourceValue::Probability(p),
            line: None,
        });
    }

    pub fn add_voltage_source(&mut self, id: impl Into<String>, volts: f64) {
        self.sources.push(Source {
            id: id.into(),
            value: SourceValue::Voltage(volts),
            line: None,
        });
    }

    pub fn add_and(&mut self, id: impl Into<String>, a: impl Into<String>, b: impl Into<String>) {
        self.gates.push(Gate {
            id: id.into(),
            kind: GateKind::And {
                a: a.into(),
                b: b.into(),
            },
            line: None,
        });
    }

    pub fn add_mux(
        &mut self,
        id: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        sel: impl Into<String>,
    ) {
        self.gates.push(Gate {
            id: id.into(),
            kind: GateKind::Mux {
                a: a.into(),
                b: b.into(),
                sel: sel.into(),
            },
            line: None,
        });
    }

    pub fn add_output(&mut self, id: impl Into<String>) {
        self.outputs.push(Output {
            id: id.into(),
            line: None,
        });
    }

    pub fn and_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g.kind, GateKind::And { .. }))
            .count()
    }

    pub fn mux_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g.kind, GateKind::Mux { .. }))
            .count()
    }
}

/// Serializes in the text format; `parse(&n.to_string())` reproduces `n`
/// up to line numbers.
impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sources {
            match s.value {
                SourceValue::Probability(p) => writeln!(f, "sbg {} p={p:?}", s.id)?,
                SourceValue::Voltage(v) => writeln!(f, "sbg {} v={v:?}", s.id)?,
            }
        }
        for g in &self.gates {
            match &g.kind {
                GateKind::And { a, b } => writeln!(f, "and {} {a} {b}", g.id)?,
                GateKind::Mux { a, b, sel } => writeln!(f, "mux {} {a} {b} {sel}", g.id)?,
            }
        }
        for o in &self.outputs {
            writeln!(f, "out {}", o.id)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A finding about a netlist, located by line and column when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn error(line: Option<usize>, column: Option<usize>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn warning(line: Option<usize>, column: Option<usize>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            line,
            column,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}
