//! A quick self-check that exercises every module on small instances.

use std::time::Instant;

use serde::Serialize;

use crate::graph::{are_isomorphic, enumerate_cycles, parse_graph, serialize_graph, shortest_odd_cycle, Coloring, Graph};
use crate::patterns::{grid_skeleton, make_grid, make_wall, wall_skeleton};
use crate::product::{lift_embedding, project_embedding};
use crate::reduction::{colemb_to_emb, decide_via_reduction, ColEmbInstance};
use crate::rigidity::{is_rigid_exhaustive, RigidityConfig, RigidityStatus};
use crate::skeleton::{is_frame, quotient, FrameConfig, FrameVerdict, SkeletonSpec};
use crate::solver::SearchConfig;
use crate::PatternKind;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid_quotients() -> Result<String, String> {
    let mut n = 0;
    for s in 5..=9 {
        for t in 6..=10 {
            let sk = grid_skeleton(s, t).map_err(|e| e.to_string())?;
            let g = make_grid(s, t).map_err(|e| e.to_string())?;
            let q = quotient(&g, &sk.frame, &sk.connectors).map_err(|e| e.to_string())?;
            let shape = make_grid((s - 1) / 2 - 1, (t - 2) / 2 - 1).map_err(|e| e.to_string())?;
            let iso = are_isomorphic(&q.quotient, &shape).map_err(|e| e.to_string())?;
            ensure(iso.is_some(), format!("quotient of S_{{{s},{t}}} has the wrong shape"))?;
            n += 1;
        }
    }
    Ok(format!("{n} grid skeletons"))
}

fn corner_frames() -> Result<String, String> {
    let cfg = FrameConfig::default();
    for (s, t) in [(2, 2), (3, 3), (3, 4)] {
        let g = make_grid(s, t).map_err(|e| e.to_string())?;
        let corners = [0, t - 1, (s - 1) * t, s * t - 1];
        let v = is_frame(&g, &corners, &cfg).map_err(|e| e.to_string())?;
        ensure(v == FrameVerdict::Frame, format!("corners of G_{{{s},{t}}} not a frame"))?;
    }
    let g22 = make_grid(2, 2).map_err(|e| e.to_string())?;
    let v = is_frame(&g22, &[], &cfg).map_err(|e| e.to_string())?;
    ensure(matches!(v, FrameVerdict::NotFrame(_)), "empty set is a frame of G_{2,2}")?;
    Ok("corner sets are frames".into())
}

fn wall_cycles() -> Result<String, String> {
    for (s, t) in [(3, 4), (4, 5), (5, 6)] {
        let w = make_wall(s, t).map_err(|e| e.to_string())?;
        let sk = wall_skeleton(s, t).map_err(|e| e.to_string())?;
        let f1 = sk.meta.f1().unwrap_or(&[]);
        let cycles = enumerate_cycles(&w, 5).map_err(|e| e.to_string())?;
        ensure(
            cycles.iter().all(|c| c.iter().all(|v| f1.binary_search(v).is_ok())),
            format!("5-cycle outside F1 in W_{{{s},{t}}}"),
        )?;
        ensure(shortest_odd_cycle(&w) == Some(5), "odd girth is not 5")?;
    }
    Ok("5-cycles lie in F1".into())
}

fn two_squares() -> (ColEmbInstance, Graph) {
    let pattern = make_grid(2, 2).expect("grid");
    let target = Graph::new(8, [(0, 1), (0, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 7), (6, 7)]).expect("graph");
    let chi = Coloring::new(vec![0, 1, 2, 3, 0, 1, 2, 3], 4).expect("coloring");
    (ColEmbInstance::new(pattern.clone(), target, chi).expect("instance"), pattern)
}

fn product_round_trip() -> Result<String, String> {
    let (inst, _) = two_squares();
    let emb = colemb_to_emb(PatternKind::Grid, &inst).map_err(|e| e.to_string())?;
    let prov = emb.provenance.as_ref().ok_or("no provenance")?;
    let p = &prov.product;
    for &(x, y) in p.graph.edges() {
        ensure(
            p.base().has_edge(p.vertices[x].first(), p.vertices[y].first()),
            "pi1 is not a homomorphism",
        )?;
    }
    let h_bar = crate::graph::VertexMap::new(
        p.quotient.vertex_of.iter().map(|&u| p.chi().class(u)[0]).collect(),
        p.h().vertex_count(),
    )
    .map_err(|e| e.to_string())?;
    let f = lift_embedding(p, &h_bar).map_err(|e| e.to_string())?;
    let back = project_embedding(p, &f).map_err(|e| e.to_string())?;
    ensure(back == h_bar, "project(lift(h)) differs from h")?;
    let d = decide_via_reduction(&emb, &SearchConfig::default()).map_err(|e| e.to_string())?;
    ensure(d.answer() == Some(true), "two-squares instance not decided yes")?;
    Ok(format!("product with {} vertices", p.graph.vertex_count()))
}

fn rigidity_small() -> Result<String, String> {
    let cfg = RigidityConfig::default();
    let p3 = Graph::new(3, [(0, 1), (1, 2)]).map_err(|e| e.to_string())?;
    let s = SkeletonSpec::new(vec![0, 2], vec![]);
    let v = is_rigid_exhaustive(&p3, &s, &cfg).map_err(|e| e.to_string())?;
    let c = v.counterexample().ok_or("P3 ends reported rigid")?;
    c.verify(&p3, &s)?;
    let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).map_err(|e| e.to_string())?;
    let v = is_rigid_exhaustive(&k3, &SkeletonSpec::new(vec![], vec![]), &cfg).map_err(|e| e.to_string())?;
    ensure(v.status == RigidityStatus::RigidExhaustive, "K3 with empty frame not rigid")?;
    Ok("P3 counterexample, K3 rigid".into())
}

fn format_round_trip() -> Result<String, String> {
    let g = make_wall(3, 4).map_err(|e| e.to_string())?;
    let text = serialize_graph(&g);
    let back = parse_graph(&text).map_err(|e| e.to_string())?;
    ensure(back == g && serialize_graph(&back) == text, "round trip changed the graph")?;
    Ok("wall text round trip".into())
}

const CHECKS: &[(&str, Check)] = &[
    ("grid-quotient-shape", grid_quotients),
    ("corner-frame", corner_frames),
    ("wall-five-cycles", wall_cycles),
    ("product-lift-project", product_round_trip),
    ("rigidity-small", rigidity_small),
    ("format-round-trip", format_round_trip),
];

/// Runs every check; never panics on a failed check.
pub fn run_quick() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, check)| {
            let start = Instant::now();
            let r = check();
            CheckResult {
                name,
                passed: r.is_ok(),
                detail: r.unwrap_or_else(|e| e),
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn quick_suite_passes() {
        for r in super::run_quick() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
