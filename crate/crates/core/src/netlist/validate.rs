use std::collections::{BTreeSet, HashMap};

use super::{Diagnostic, Netlist, SourceValue};
use crate::error::{Error, Result};
use crate::mtj::MtjParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum NodeRef {
    Source(usize),
    Gate(usize),
}

#[derive(Debug)]
pub(crate) enum Issue {
    DuplicateId { node: NodeRef, first: NodeRef },
    Undefined { gate: usize, input: usize },
    UndefinedOutput { output: usize },
    Cycle { gate: usize },
    NoOutputs,
    RepeatedInput { gate: usize, input: usize },
}

pub(crate) struct Structure<'a> {
    pub index: HashMap<&'a str, NodeRef>,
    /// Gate indices in dependency order. Only complete when `issues` has no cycle.
    pub order: Vec<usize>,
    pub issues: Vec<Issue>,
}

impl Issue {
    #[cfg(test)]
    pub(crate) fn is_error(&self) -> bool {
        !matches!(self, Issue::RepeatedInput { .. })
    }

    /// Render with the node's line and, when the caller can supply one, a column.
    pub(crate) fn to_diagnostic(
        &self,
        n: &Netlist,
        column: impl Fn(&Issue) -> Option<usize>,
    ) -> Diagnostic {
        let col = column(self);
        let node_line = |r: NodeRef| match r {
            NodeRef::Source(i) => n.sources[i].line,
            NodeRef::Gate(i) => n.gates[i].line,
        };
        match *self {
            Issue::DuplicateId { node, first } => {
                let id = match node {
                    NodeRef::Source(i) => &n.sources[i].id,
                    NodeRef::Gate(i) => &n.gates[i].id,
                };
                let prev = node_line(first)
                    .map(|l| format!(" (first defined on line {l})"))
                    .unwrap_or_default();
                Diagnostic::error(node_line(node), col, format!("duplicate id '{id}'{prev}"))
            }
            Issue::Undefined { gate, input } => {
                let g = &n.gates[gate];
                let name = g.kind.inputs()[input];
                Diagnostic::error(
                    g.line,
                    col,
                    format!("gate '{}' references undefined node '{name}'", g.id),
                )
            }
            Issue::UndefinedOutput { output } => {
                let o = &n.outputs[output];
                Diagnostic::error(o.line, col, format!("output on undefined node '{}'", o.id))
            }
            Issue::Cycle { gate } => {
                let g = &n.gates[gate];
                Diagnostic::error(g.line, col, format!("gate '{}' is part of a cycle", g.id))
            }
            Issue::NoOutputs => Diagnostic::error(None, None, "netlist has no outputs"),
            Issue::RepeatedInput { gate, input } => {
                let g = &n.gates[gate];
                let name = g.kind.inputs()[input];
                Diagnostic::warning(
                    g.line,
                    col,
                    format!(
                        "node '{name}' drives more than one input of gate '{}'; \
                         the inputs are fully correlated",
                        g.id
                    ),
                )
            }
        }
    }
}

/// Ids, references, outputs and acyclicity.
pub(crate) fn check_structure(n: &Netlist) -> Structure<'_> {
    let mut issues = Vec::new();
    let mut index: HashMap<&str, NodeRef> = HashMap::with_capacity(n.sources.len() + n.gates.len());
    let named = n
        .sources
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), NodeRef::Source(i)))
        .chain(n.gates.iter().enumerate().map(|(i, g)| (g.id.as_str(), NodeRef::Gate(i))));
    for (id, r) in named {
        if let Some(&first) = index.get(id) {
            issues.push(Issue::DuplicateId { node: r, first });
        } else {
            index.insert(id, r);
        }
    }

    let mut deps: Vec<Vec<usize>> = Vec::with_capacity(n.gates.len());
    for (gi, g) in n.gates.iter().enumerate() {
        let inputs = g.kind.inputs();
        let mut d = Vec::with_capacity(inputs.len());
        for (k, name) in inputs.iter().enumerate() {
            match index.get(name) {
                None => issues.push(Issue::Undefined { gate: gi, input: k }),
                Some(NodeRef::Gate(j)) => d.push(*j),
                Some(NodeRef::Source(_)) => {}
            }
            if inputs[..k].contains(name) {
                issues.push(Issue::RepeatedInput { gate: gi, input: k });
            }
        }
        deps.push(d);
    }

    for (oi, o) in n.outputs.iter().enumerate() {
        if !index.contains_key(o.id.as_str()) {
            issues.push(Issue::UndefinedOutput { output: oi });
        }
    }
    if n.outputs.is_empty() {
        issues.push(Issue::NoOutputs);
    }

    // Iterative DFS post-order; a back edge to an on-stack gate is a cycle.
    let mut state = vec![0u8; n.gates.len()];
    let mut order = Vec::with_capacity(n.gates.len());
    let mut cyclic = BTreeSet::new();
    for root in 0..n.gates.len() {
        if state[root] != 0 {
            continue;
        }
        state[root] = 1;
        let mut stack = vec![(root, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (g, k) = *top;
            if k < deps[g].len() {
                top.1 += 1;
                let d = deps[g][k];
                match state[d] {
                    0 => {
                        state[d] = 1;
                        stack.push((d, 0));
                    }
                    1 => {
                        cyclic.insert(d);
                    }
                    _ => {}
                }
            } else {
                state[g] = 2;
                order.push(g);
                stack.pop();
            }
        }
    }
    issues.extend(cyclic.into_iter().map(|gate| Issue::Cycle { gate }));

    Structure {
        index,
        order,
        issues,
    }
}

/// Check a netlist against every structural and range rule, reporting all
/// violations rather than stopping at the first.
///
/// Returns the warnings on success.
pub fn validate(netlist: &Netlist, params: &MtjParams) -> Result<Vec<Diagnostic>> {
    let st = check_structure(netlist);
    let mut diags: Vec<Diagnostic> = st
        .issues
        .iter()
        .map(|i| i.to_diagnostic(netlist, |_| None))
        .collect();

    for s in &netlist.sources {
        match s.value {
            SourceValue::Probability(p) if !(p.is_finite() && (0.0..=1.0).contains(&p)) => {
                diags.push(Diagnostic::error(
                    s.line,
                    None,
                    format!("source '{}' probability {p} outside [0, 1]", s.id),
                ));
            }
            SourceValue::Voltage(v) if !(v.is_finite() && params.in_window(v)) => {
                diags.push(Diagnostic::error(
                    s.line,
                    None,
                    format!(
                        "source '{}' voltage {v} V outside calibrated window [{}, {}]",
                        s.id, params.v_min_v, params.v_max_v
                    ),
                ));
            }
            _ => {}
        }
    }

    // Nodes that reach no output only cost area.
    if !diags.iter().any(Diagnostic::is_error) {
        let mut live = vec![false; netlist.sources.len() + netlist.gates.len()];
        let slot = |r: NodeRef| match r {
            NodeRef::Source(i) => i,
            NodeRef::Gate(i) => netlist.sources.len() + i,
        };
        let mut work: Vec<NodeRef> = netlist
            .outputs
            .iter()
            .map(|o| st.index[o.id.as_str()])
            .collect();
        while let Some(r) = work.pop() {
            if std::mem::replace(&mut live[slot(r)], true) {
                continue;
            }
            if let NodeRef::Gate(g) = r {
                work.extend(netlist.gates[g].kind.inputs().iter().map(|x| st.index[x]));
            }
        }
        for (i, s) in netlist.sources.iter().enumerate() {
            if !live[i] {
                diags.push(Diagnostic::warning(s.line, None, format!("source '{}' reaches no output", s.id)));
            }
        }
        for (i, g) in netlist.gates.iter().enumerate() {
            if !live[netlist.sources.len() + i] {
                diags.push(Diagnostic::warning(g.line, None, format!("gate '{}' reaches no output", g.id)));
            }
        }
    }

    if diags.iter().any(Diagnostic::is_error) {
        Err(Error::Validation(diags))
    } else {
        Ok(diags)
    }
}
