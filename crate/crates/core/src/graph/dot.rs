use std::fmt::Write as _;

use super::{Graph, GraphError};

/// Fill colors for highlight classes, in class order. Class 0 is drawn black
/// and class 1 light gray, matching the usual frame / connector shading.
const PALETTE: &[&str] = &["black", "lightgray", "gray", "lightblue", "orange", "palegreen"];

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders `g` as an undirected DOT graph. Vertices in `highlight[i]` get the
/// i-th palette color; all others are white.
pub fn to_dot(g: &Graph, highlight: Option<&[Vec<usize>]>) -> Result<String, GraphError> {
    let mut class = vec![None; g.vertex_count()];
    if let Some(classes) = highlight {
        for (ci, members) in classes.iter().enumerate() {
            for &v in members {
                g.check_vertex(v)?;
                if class[v].is_some() {
                    return Err(GraphError::OverlappingClasses(v));
                }
                class[v] = Some(ci);
            }
        }
    }
    let mut out = String::from("graph G {\n");
    out.push_str("  node [shape=circle, style=filled, fillcolor=white, fontsize=8];\n");
    for v in g.vertices() {
        let mut attrs = vec![format!("label={}", quote(&g.display_name(v)))];
        if let Some(ci) = class[v] {
            let color = PALETTE[ci % PALETTE.len()];
            attrs.push(format!("fillcolor={color}"));
            if color == "black" {
                attrs.push("fontcolor=white".into());
            }
            attrs.push(format!("class={}", quote(&format!("c{ci}"))));
        }
        let _ = writeln!(out, "  {v} [{}];", attrs.join(", "));
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_dot() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let dot = to_dot(&g, None).unwrap();
        assert_eq!(dot.matches(" [label=").count(), 2);
        assert_eq!(dot.matches(" -- ").count(), 1);
    }

    #[test]
    fn empty_graph_dot() {
        let dot = to_dot(&Graph::empty(0), None).unwrap();
        assert!(dot.starts_with("graph G {") && dot.trim_end().ends_with('}'));
    }

    #[test]
    fn overlapping_classes_rejected() {
        let g = Graph::empty(3);
        let classes = vec![vec![0, 1], vec![1]];
        assert_eq!(to_dot(&g, Some(&classes)), Err(GraphError::OverlappingClasses(1)));
    }

    #[test]
    fn labels_are_escaped() {
        let g = Graph::empty(1).with_labels([(0, "a\"b".to_string())]).unwrap();
        assert!(to_dot(&g, None).unwrap().contains(r#"label="a\"b""#));
    }
}
