use super::validate::{check_structure, Issue};
use super::{Diagnostic, Gate, GateKind, Netlist, Output, Source, SourceValue};
use crate::error::{Error, Result};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Whitespace-separated tokens with 1-based character columns, comments removed.
fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0;
    for (byte, ch) in body.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &body[b..byte],
                    column: c,
                });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &body[b..],
            column: c,
        });
    }
    tokens
}

fn check_id(tok: &Token<'_>, line: usize, diags: &mut Vec<Diagnostic>) {
    if tok.text.contains('=') {
        diags.push(Diagnostic::error(
            Some(line),
            Some(tok.column),
            format!("'{}' is not a valid node id", tok.text),
        ));
    }
}

fn parse_source_value(tok: &Token<'_>, line: usize) -> std::result::Result<SourceValue, Diagnostic> {
    let (kind, number) = tok.text.split_once('=').ok_or_else(|| {
        Diagnostic::error(
            Some(line),
            Some(tok.column),
            format!("expected p=<float> or v=<float>, found '{}'", tok.text),
        )
    })?;
    let value: f64 = number
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| {
            Diagnostic::error(
                Some(line),
                Some(tok.column + kind.chars().count() + 1),
                format!("bad number '{number}'"),
            )
        })?;
    match kind {
        "p" => Ok(SourceValue::Probability(value)),
        "v" => Ok(SourceValue::Voltage(value)),
        other => Err(Diagnostic::error(
            Some(line),
            Some(tok.column),
            format!("unknown source parameter '{other}' (expected p or v)"),
        )),
    }
}

/// Parse the netlist text format.
///
/// Nodes may be referenced before they are defined; the returned netlist has
/// its gates in dependency order. Every problem found is reported, each with
/// its line and, where it applies, column. A node wired to two inputs of the
/// same gate is accepted and recorded in [`Netlist::warnings`].
pub fn parse(text: &str) -> Result<Netlist> {
    let mut n = Netlist::new();
    let mut diags = Vec::new();
    // column of each gate input token, parallel to n.gates
    let mut input_cols: Vec<Vec<usize>> = Vec::new();
    let mut output_cols: Vec<usize> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        let arity = match head.text {
            "sbg" => 2,
            "and" => 3,
            "mux" => 4,
            "out" => 1,
            other => {
                diags.push(Diagnostic::error(
                    Some(line),
                    Some(head.column),
                    format!("unknown directive '{other}'"),
                ));
                continue;
            }
        };
        if toks.len() != arity + 1 {
            diags.push(Diagnostic::error(
                Some(line),
                Some(head.column),
                format!(
                    "'{}' takes {arity} operand(s), found {}",
                    head.text,
                    toks.len() - 1
                ),
            ));
            continue;
        }
        let ids = if head.text == "sbg" { &toks[1..2] } else { &toks[1..] };
        let before = diags.len();
        for t in ids {
            check_id(t, line, &mut diags);
        }
        if diags.len() > before {
            continue;
        }
        let id = toks[1].text.to_string();
        match head.text {
            "sbg" => match parse_source_value(&toks[2], line) {
                Ok(value) => n.sources.push(Source {
                    id,
                    value,
                    line: Some(line),
                }),
                Err(d) => diags.push(d),
            },
            "and" => {
                n.gates.push(Gate {
                    id,
                    kind: GateKind::And {
                        a: toks[2].text.into(),
                        b: toks[3].text.into(),
                    },
                    line: Some(line),
                });
                input_cols.push(vec![toks[2].column, toks[3].column]);
            }
            "mux" => {
                n.gates.push(Gate {
                    id,
                    kind: GateKind::Mux {
                        a: toks[2].text.into(),
                        b: toks[3].text.into(),
                        sel: toks[4].text.into(),
                    },
                    line: Some(line),
                });
                input_cols.push(vec![toks[2].column, toks[3].column, toks[4].column]);
            }
            _ => {
                n.outputs.push(Output {
                    id,
                    line: Some(line),
                });
                output_cols.push(toks[1].column);
            }
        }
    }

    let st = check_structure(&n);
    let column = |issue: &Issue| match *issue {
        Issue::Undefined { gate, input } | Issue::RepeatedInput { gate, input } => {
            Some(input_cols[gate][input])
        }
        Issue::UndefinedOutput { output } => Some(output_cols[output]),
        _ => None,
    };
    let mut warnings = Vec::new();
    for issue in &st.issues {
        let d = issue.to_diagnostic(&n, column);
        if d.is_error() {
            diags.push(d);
        } else {
            warnings.push(d);
        }
    }
    if !diags.is_empty() {
        diags.sort_by_key(|d| (d.line.unwrap_or(usize::MAX), d.column));
        return Err(Error::Parse(diags));
    }

    let order = st.order;
    let mut slots: Vec<Option<Gate>> = std::mem::take(&mut n.gates).into_iter().map(Some).collect();
    n.gates = order.into_iter().map(|i| slots[i].take().expect("each gate once")).collect();
    n.warnings = warnings;
    Ok(n)
}
