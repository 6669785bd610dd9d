//! The line-oriented model file format.
//!
//! ```text
//! prop: p            # optional embedded signature lines
//! worlds: w0 w1 w2
//! rel D: w0>w1 w1>w2
//! val p: w0 w1
//! ext lt@w0: (t0,t1)
//! assign: a=w0 b=w2
//! ```

use std::sync::Arc;

use super::{Assignment, Model, SemanticsError, World};
use crate::syntax::{strip_comment, Signature};

fn file_err(line: usize, msg: impl Into<String>) -> SemanticsError {
    SemanticsError::File {
        line,
        msg: msg.into(),
    }
}

/// Parses a model file. Signature lines in the file extend `base`.
pub fn parse_model(
    text: &str,
    base: Option<&Signature>,
) -> Result<(Model, Assignment), SemanticsError> {
    let mut sig = base.cloned().unwrap_or_default();
    let mut rigid = Vec::new();
    let mut worlds: Option<(usize, Vec<&str>)> = None;
    let mut body = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let no = i + 1;
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| file_err(no, format!("expected `key: values`, found `{line}`")))?;
        if key.trim() == "worlds" {
            if worlds.is_some() {
                return Err(file_err(no, "duplicate `worlds` line"));
            }
            worlds = Some((no, rest.split_whitespace().collect()));
            continue;
        }
        let is_sig = sig
            .apply_line(line, no, &mut rigid)
            .map_err(|e| file_err(no, e.to_string()))?;
        if !is_sig {
            body.push((no, key.trim(), rest.trim()));
        }
    }
    sig.finish(rigid).map_err(|e| file_err(0, e.to_string()))?;
    let (wline, names) = worlds.ok_or_else(|| file_err(0, "missing `worlds` line"))?;
    let mut m = Model::new(Arc::new(sig), &names).map_err(|e| file_err(wline, e.to_string()))?;
    let mut g = Assignment::new();

    for (no, key, rest) in body {
        let at = |e: SemanticsError| file_err(no, e.to_string());
        let (kind, name) = match key.split_once(char::is_whitespace) {
            Some((k, n)) => (k, n.trim()),
            None => (key, ""),
        };
        match kind {
            "rel" => {
                for edge in rest.split_whitespace() {
                    let (a, b) = edge
                        .split_once('>')
                        .ok_or_else(|| file_err(no, format!("edge `{edge}` needs the form v>w")))?;
                    let (a, b) = (m.world(a).map_err(at)?, m.world(b).map_err(at)?);
                    m.add_edge(name, a, b).map_err(at)?;
                }
                if rest.is_empty() {
                    m.expect_sort(name, crate::syntax::Sort::Modality)
                        .map_err(at)?;
                }
            }
            "val" => {
                for w in rest.split_whitespace() {
                    let w = m.world(w).map_err(at)?;
                    m.set_true(name, w).map_err(at)?;
                }
                if rest.is_empty() {
                    m.expect_sort(name, crate::syntax::Sort::Prop).map_err(at)?;
                }
            }
            "ext" => {
                let (pred, w) = name
                    .split_once('@')
                    .ok_or_else(|| file_err(no, "extension needs the form `ext pred@world:`"))?;
                let w = m.world(w.trim()).map_err(at)?;
                for tuple in parse_tuples(rest).map_err(|msg| file_err(no, msg))? {
                    let refs: Vec<&str> = tuple.iter().map(String::as_str).collect();
                    m.add_tuple(pred.trim(), w, &refs).map_err(at)?;
                }
            }
            "assign" if name.is_empty() => {
                for pair in rest.split_whitespace() {
                    let (a, w) = pair.split_once('=').ok_or_else(|| {
                        file_err(no, format!("assignment `{pair}` needs the form a=w"))
                    })?;
                    m.expect_sort(a, crate::syntax::Sort::Nominal).map_err(at)?;
                    g.set(a, m.world(w).map_err(at)?);
                }
            }
            _ => return Err(file_err(no, format!("unknown line kind `{key}`"))),
        }
    }
    m.check_assignment(&g)?;
    Ok((m, g))
}

fn parse_tuples(text: &str) -> Result<Vec<Vec<String>>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = inner.find(')').ok_or("unclosed tuple")?;
        out.push(
            inner[..close]
                .split(',')
                .map(|t| t.trim().to_string())
                .collect(),
        );
        rest = inner[close + 1..].trim_start();
    }
    Ok(out)
}

/// Renders a model and assignment with the signature embedded. The output
/// parses back to the same model.
pub fn render_model(m: &Model, g: &Assignment) -> String {
    let mut out = m.signature().render();
    let name = |w: World| m.world_name(w).to_string();
    out.push_str(&format!(
        "worlds: {}\n",
        m.worlds().map(name).collect::<Vec<_>>().join(" ")
    ));
    for md in m.signature().modalities() {
        let edges: Vec<String> = m
            .worlds()
            .flat_map(|v| m.successors(md, v).map(move |w| (v, w)))
            .map(|(v, w)| format!("{}>{}", name(v), name(w)))
            .collect();
        if !edges.is_empty() {
            out.push_str(&format!("rel {md}: {}\n", edges.join(" ")));
        }
    }
    for p in m.signature().props() {
        let ws: Vec<String> = m.worlds().filter(|&w| m.is_true(p, w)).map(name).collect();
        if !ws.is_empty() {
            out.push_str(&format!("val {p}: {}\n", ws.join(" ")));
        }
    }
    for p in m.signature().predicates().keys() {
        for w in m.worlds() {
            let tuples: Vec<String> = m
                .extension_at(p, w)
                .map(|t| {
                    format!(
                        "({})",
                        t.iter().map(|x| x.as_str()).collect::<Vec<_>>().join(",")
                    )
                })
                .collect();
            if !tuples.is_empty() {
                out.push_str(&format!("ext {p}@{}: {}\n", name(w), tuples.join(" ")));
            }
        }
    }
    if !g.is_empty() {
        let pairs: Vec<String> = g.iter().map(|(a, w)| format!("{a}={}", name(w))).collect();
        out.push_str(&format!("assign: {}\n", pairs.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval;
    use crate::syntax::parse_formula;

    const TEXT: &str = "\
prop: p q
nom: a b
mod: D
pred: lt/2
time: t0 t1
rigid: lt
worlds: u v
rel D: u>v v>v
val p: v
ext lt@u: (t0,t1)
ext lt@v: (t0,t1)
assign: a=u b=v
";

    #[test]
    fn parse_and_evaluate() {
        let (m, g) = parse_model(TEXT, None).unwrap();
        let sig = m.signature().clone();
        let f = |s| parse_formula(s, &sig).unwrap();
        let u = m.world("u").unwrap();
        assert!(eval(&m, &g, u, &f("D p")).unwrap());
        assert!(eval(&m, &g, u, &f("@b p & lt(t0,t1)")).unwrap());
        assert!(!eval(&m, &g, u, &f("p")).unwrap());
    }

    #[test]
    fn render_round_trips() {
        let (m, g) = parse_model(TEXT, None).unwrap();
        let text = render_model(&m, &g);
        assert_eq!(text, TEXT);
        assert_eq!(parse_model(&text, None).unwrap(), (m, g));
    }

    #[test]
    fn external_signature() {
        let sig = Signature::parse("prop: p\nnom: a\n").unwrap();
        let (m, g) = parse_model("worlds: w0\nval p: w0\nassign: a=w0\n", Some(&sig)).unwrap();
        assert!(m.is_true("p", World(0)));
        assert_eq!(g.get("a"), Some(World(0)));
    }

    #[test]
    fn rejects_bad_files() {
        let sig = Signature::parse("prop: p\nnom: a\nmod: D\n").unwrap();
        for bad in [
            "val p: w0\n",
            "worlds:\n",
            "worlds: w0\nval p: w1\nassign: a=w0\n",
            "worlds: w0\nval q: w0\nassign: a=w0\n",
            "worlds: w0\nrel D: w0-w0\nassign: a=w0\n",
            "worlds: w0\n",
            "worlds: w0\nfoo: bar\nassign: a=w0\n",
            "worlds: w0 w0\nassign: a=w0\n",
        ] {
            assert!(parse_model(bad, Some(&sig)).is_err(), "{bad:?}");
        }
    }
}
