//! Fixtures shared by unit tests.

use statemerge_core::{Pdfa, PdfaState, Transition};

/// Start 0 -a-> 1; 1 loops on a and goes to 2 on b; 2 returns to 1 on a,
/// loops on b and is the only final state. Symbols: a = 0, b = 1.
pub fn abab_model() -> Pdfa {
    let t = |target, count| Transition { target, count };
    let state = |final_count, path_count, tr: &[(u32, Transition)]| PdfaState {
        final_count,
        path_count,
        transitions: tr.iter().copied().collect(),
        sink: false,
    };
    Pdfa {
        alphabet_size: 2,
        finalprob: true,
        start: 0,
        states: [
            (0, state(0, 20, &[(0, t(1, 20))])),
            (1, state(0, 50, &[(0, t(1, 20)), (1, t(2, 30))])),
            (2, state(20, 50, &[(0, t(1, 10)), (1, t(2, 20))])),
        ]
        .into_iter()
        .collect(),
    }
}

/// Minimal dot checker for the subset we emit: a `digraph` block whose
/// body lines are attribute statements, node statements or edge statements
/// with balanced quotes and brackets. Returns the number of numbered nodes
/// and edges between them.
pub fn validate_dot(text: &str) -> Result<(usize, usize), String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty")?;
    if !(head.starts_with("digraph ") && head.ends_with('{')) {
        return Err(format!("bad header {head:?}"));
    }
    let body: Vec<&str> = lines.collect();
    let (last, body) = body.split_last().ok_or("missing close")?;
    if *last != "}" {
        return Err("missing close".into());
    }
    let id = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    let (mut nodes, mut edges) = (0, 0);
    for line in body {
        let stmt = line
            .trim()
            .strip_suffix(';')
            .ok_or(format!("no ';' in {line:?}"))?;
        if stmt.matches('"').count() % 2 != 0 {
            return Err(format!("unbalanced quotes in {line:?}"));
        }
        let (target, attrs) = match stmt.find('[') {
            Some(i) => {
                let rest = &stmt[i..];
                if !rest.ends_with(']') {
                    return Err(format!("unclosed attributes in {line:?}"));
                }
                (stmt[..i].trim(), Some(&rest[1..rest.len() - 1]))
            }
            None => (stmt, None),
        };
        if let Some(a) = attrs {
            for kv in a.split(", ") {
                let (k, v) = kv.split_once('=').ok_or(format!("bad attribute {kv:?}"))?;
                if !id(k) || v.is_empty() {
                    return Err(format!("bad attribute {kv:?}"));
                }
            }
        }
        if target.contains('=') {
            continue;
        }
        if let Some((from, to)) = target.split_once(" -> ") {
            if !id(from) || !id(to) {
                return Err(format!("bad edge {line:?}"));
            }
            if from.parse::<u32>().is_ok() {
                edges += 1;
            }
        } else if id(target) {
            if target.parse::<u32>().is_ok() {
                nodes += 1;
            }
        } else {
            return Err(format!("bad statement {line:?}"));
        }
    }
    Ok((nodes, edges))
}
