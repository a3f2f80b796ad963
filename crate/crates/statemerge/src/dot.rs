//! Graphviz export.

use std::fmt::Write;

use statemerge_core::Pdfa;

/// Renders `pdfa` as a dot digraph. States show their id and final/path
/// counts, edges their symbol and count. Sink states and every edge into
/// them are left out unless `include_sinks` is set.
pub fn export_dot(pdfa: &Pdfa, include_sinks: bool) -> String {
    let shown = |id: u32| include_sinks || pdfa.state(id).is_some_and(|s| !s.sink);
    let mut out = String::new();
    out.push_str("digraph pdfa {\n");
    out.push_str("\trankdir=LR;\n");
    out.push_str("\tnode [shape=circle, style=bold];\n");
    out.push_str("\tI [label=\"\", shape=none];\n");
    let _ = writeln!(out, "\tI -> {};", pdfa.start);
    for (&id, s) in &pdfa.states {
        if !shown(id) {
            continue;
        }
        let style = if s.sink { ", style=dotted" } else { "" };
        let _ = writeln!(
            out,
            "\t{id} [label=\"{id}\\nfin: {}\\npath: {}\"{style}];",
            s.final_count, s.path_count
        );
    }
    for (&id, s) in &pdfa.states {
        if !shown(id) {
            continue;
        }
        for (&a, t) in &s.transitions {
            if shown(t.target) {
                let _ = writeln!(out, "\t{id} -> {} [label=\"{a}:{}\"];", t.target, t.count);
            }
        }
    }
    out.push_str("}\n");
    out
}
