use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gridwall::graph::{parse_graph, serialize_graph, to_dot};
use gridwall::patterns::{grid_skeleton, make_grid, make_wall, wall_skeleton, GridCoord};
use gridwall::product::build_product;
use gridwall::reduction::{colemb_to_emb, decide_via_reduction, hom_to_colemb, Decision};
use gridwall::rigidity::{is_rigid_exhaustive, rigidity_random_search};
use gridwall::skeleton::{is_frame, is_skeleton, quotient, FrameConfig, FrameVerdict};
use gridwall::solver::{find_colored_embedding, find_embedding, find_homomorphism};
use gridwall::{
    suite, Coloring, ColEmbInstance, Graph, Outcome, PatternKind, RigidityConfig, RigidityStatus, SearchConfig,
    SkeletonSpec,
};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "gridwall", version, about = "Embedding reductions over grids and walls")]
struct Cli {
    /// Emit one JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the solver and rigidity search.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a grid or wall graph.
    Gen(GenArgs),
    /// Write the standard skeleton of a grid or wall as JSON.
    Skeleton(GenArgs),
    /// Quotient (G - F) / D of a skeleton.
    Quotient {
        #[arg(short = 'g')]
        graph: PathBuf,
        #[arg(long)]
        skel: PathBuf,
    },
    /// Build the product graph P(G, S, H, chi).
    Product {
        #[arg(short = 'g')]
        graph: PathBuf,
        #[arg(long)]
        skel: PathBuf,
        #[arg(short = 'H')]
        host: PathBuf,
        #[arg(long)]
        chi: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Search for a homomorphism, embedding or colored embedding.
    Solve {
        mode: SolveMode,
        #[arg(short = 'g')]
        pattern: PathBuf,
        #[arg(short = 'H')]
        target: PathBuf,
        #[arg(long)]
        chi: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Frame, skeleton and rigidity checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Run one of the two reductions and write pattern.g, target.g, provenance.json.
    Reduce {
        #[command(subcommand)]
        what: ReduceCommand,
    },
    /// Render a graph as DOT, coloring F and D when a skeleton is given.
    Export {
        #[arg(short = 'g')]
        graph: PathBuf,
        #[arg(long)]
        skel: Option<PathBuf>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Run the built-in self checks.
    Suite {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct Limits {
    #[arg(long = "limit-nodes")]
    limit_nodes: Option<u64>,
    /// Seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Grid,
    Wall,
}

impl From<Family> for PatternKind {
    fn from(f: Family) -> Self {
        match f {
            Family::Grid => PatternKind::Grid,
            Family::Wall => PatternKind::Wall,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    Hom,
    Emb,
    Colemb,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Is the given set a frame?
    Frame {
        #[arg(short = 'g')]
        graph: PathBuf,
        /// `corners` (grid labels) or a comma-separated vertex list.
        #[arg(long, conflicts_with = "skel")]
        frame: Option<String>,
        #[arg(long)]
        skel: Option<PathBuf>,
        /// Lift the size guard on exact checks.
        #[arg(long = "unsafe")]
        unguarded: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Check the three skeleton conditions.
    Skeleton {
        #[arg(short = 'g')]
        graph: PathBuf,
        #[arg(long)]
        skel: PathBuf,
        #[arg(long = "unsafe")]
        unguarded: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Exhaustive or randomized rigidity check.
    Rigid {
        #[arg(short = 'g')]
        graph: PathBuf,
        #[arg(long)]
        skel: PathBuf,
        #[arg(long, conflicts_with_all = ["samples", "max_h"])]
        exhaustive: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest H; defaults to min(2|V(G)|, 12).
        #[arg(long = "max-h")]
        max_h: Option<usize>,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Subcommand)]
enum ReduceCommand {
    HomToColemb {
        #[arg(short = 'g')]
        pattern: PathBuf,
        #[arg(short = 'H')]
        host: PathBuf,
        #[arg(long)]
        chi: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    ColembToEmb {
        #[arg(long)]
        family: Family,
        #[arg(short = 'g')]
        pattern: PathBuf,
        #[arg(short = 'H')]
        host: PathBuf,
        #[arg(long)]
        chi: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
        /// Also decide the instance through the quotient side.
        #[arg(long)]
        decide: bool,
        #[command(flatten)]
        limits: Limits,
    },
}

/// What a command produced: a JSON payload, human-readable lines and an exit code.
struct Report {
    result: Value,
    text: String,
    exit: u8,
}

impl Report {
    fn new(result: Value, text: impl Into<String>, exit: u8) -> Self {
        Report {
            result,
            text: text.into(),
            exit,
        }
    }
}

type Phases = Vec<(&'static str, Duration)>;

fn timed<T>(phases: &mut Phases, name: &'static str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    phases.push((name, start.elapsed()));
    out
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph, String> {
    parse_graph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_skeleton(path: &Path) -> Result<SkeletonSpec, String> {
    let s: SkeletonSpec = serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(SkeletonSpec::new(s.frame, s.connectors).with_meta(s.meta))
}

fn load_chi(path: &Path, pattern_size: usize) -> Result<Coloring, String> {
    let colors: Vec<usize> = serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    Coloring::new(colors, pattern_size).map_err(|e| format!("{}: {e}", path.display()))
}

fn search_config(limits: &Limits, workers: usize) -> SearchConfig {
    let mut cfg = SearchConfig::default().parallel(workers > 1);
    if let Some(n) = limits.limit_nodes {
        cfg = cfg.with_node_limit(n);
    }
    if let Some(s) = limits.timeout {
        cfg = cfg.with_time_limit(Duration::from_secs_f64(s.max(0.0)));
    }
    cfg
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// The four corners of a graph whose labels are grid coordinates `(i,j)`.
fn grid_corners(g: &Graph) -> Result<Vec<usize>, String> {
    let mut coords = Vec::new();
    for v in g.vertices() {
        let label = g.label(v).ok_or("--frame corners needs grid labels (i,j)")?;
        let inner = label
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| format!("label {label:?} is not a grid coordinate"))?;
        let (i, j) = inner
            .split_once(',')
            .and_then(|(i, j)| Some((i.trim().parse::<usize>().ok()?, j.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| format!("label {label:?} is not a grid coordinate"))?;
        coords.push((GridCoord { i, j }, v));
    }
    let s = coords.iter().map(|(c, _)| c.i).max().unwrap_or(0);
    let t = coords.iter().map(|(c, _)| c.j).max().unwrap_or(0);
    let mut corners: Vec<usize> = coords
        .iter()
        .filter(|(c, _)| (c.i == 1 || c.i == s) && (c.j == 1 || c.j == t))
        .map(|&(_, v)| v)
        .collect();
    corners.sort_unstable();
    corners.dedup();
    Ok(corners)
}

fn parse_vertex_list(text: &str, g: &Graph) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: usize = tok.parse().map_err(|_| format!("bad vertex {tok:?}"))?;
        g.check_vertex(v).map_err(|e| e.to_string())?;
        out.push(v);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn outcome_report(outcome: &Outcome, nodes: u64, what: &str) -> Report {
    match outcome {
        Outcome::Found(m) => Report::new(
            json!({"status": "found", "map": m.image(), "nodes": nodes}),
            format!("{what} found: {:?}", m.image()),
            EXIT_YES,
        ),
        Outcome::NoSolution => Report::new(
            json!({"status": "none", "nodes": nodes}),
            format!("no {what} ({nodes} nodes)"),
            EXIT_NO,
        ),
        Outcome::LimitExceeded(l) => Report::new(
            json!({"status": "limit", "limit": l.to_string(), "nodes": nodes}),
            format!("undecided: {l}"),
            EXIT_LIMIT,
        ),
    }
}

fn frame_report(v: &FrameVerdict) -> (Value, String, u8) {
    match v {
        FrameVerdict::Frame => (json!({"status": "frame"}), "frame".into(), EXIT_YES),
        FrameVerdict::NotFrame(m) => (
            json!({"status": "not-frame", "endomorphism": m.image()}),
            format!("not a frame; endomorphism {:?}", m.image()),
            EXIT_NO,
        ),
        FrameVerdict::Indeterminate(l) => (
            json!({"status": "limit", "limit": l.to_string()}),
            format!("undecided: {l}"),
            EXIT_LIMIT,
        ),
    }
}

fn frame_config(limits: &Limits, workers: usize, unguarded: bool) -> FrameConfig {
    let mut cfg = FrameConfig {
        search: search_config(limits, workers),
        ..FrameConfig::default()
    };
    if unguarded {
        cfg.guard = None;
    }
    cfg
}

fn run_gen(args: &GenArgs, phases: &mut Phases) -> Result<Report, String> {
    let g = timed(phases, "generate", || match args.family {
        Family::Grid => make_grid(args.s, args.t),
        Family::Wall => make_wall(args.s, args.t),
    })
    .map_err(|e| e.to_string())?;
    let text = serialize_graph(&g);
    let result = json!({"n": g.vertex_count(), "m": g.edge_count(), "path": args.out});
    match &args.out {
        Some(p) => {
            write(p, &text)?;
            Ok(Report::new(result, format!("wrote {} ({} vertices, {} edges)", p.display(), g.vertex_count(), g.edge_count()), EXIT_YES))
        }
        None => Ok(Report::new(json!({"graph": text, "n": g.vertex_count(), "m": g.edge_count()}), text.trim_end(), EXIT_YES)),
    }
}

fn run_skeleton(args: &GenArgs, phases: &mut Phases) -> Result<Report, String> {
    let s = timed(phases, "generate", || match args.family {
        Family::Grid => grid_skeleton(args.s, args.t),
        Family::Wall => wall_skeleton(args.s, args.t),
    })
    .map_err(|e| e.to_string())?;
    let text = serde_json::to_string_pretty(&s).expect("serializable");
    match &args.out {
        Some(p) => {
            write(p, &text)?;
            Ok(Report::new(to_json(&s), format!("wrote {}", p.display()), EXIT_YES))
        }
        None => Ok(Report::new(to_json(&s), text, EXIT_YES)),
    }
}

fn run_quotient(graph: &Path, skel: &Path, phases: &mut Phases) -> Result<Report, String> {
    let g = load_graph(graph)?;
    let s = load_skeleton(skel)?;
    let q = timed(phases, "quotient", || quotient(&g, &s.frame, &s.connectors)).map_err(|e| e.to_string())?;
    let assoc: Vec<Value> = q.association.iter().map(|(d, a)| json!({"d": d, "to": to_json(a)})).collect();
    let result = json!({
        "quotient": to_json(&q.quotient),
        "vertex_of": q.vertex_of,
        "association": assoc,
    });
    let text = format!(
        "quotient: {} vertices, {} edges\nvertex_of: {:?}\n{}",
        q.quotient.vertex_count(),
        q.quotient.edge_count(),
        q.vertex_of,
        serialize_graph(&q.quotient).trim_end()
    );
    Ok(Report::new(result, text, EXIT_YES))
}

fn run_product(
    graph: &Path,
    skel: &Path,
    host: &Path,
    chi: &Path,
    out: &Path,
    provenance: Option<&Path>,
    phases: &mut Phases,
) -> Result<Report, String> {
    let g = load_graph(graph)?;
    let s = load_skeleton(skel)?;
    let h = load_graph(host)?;
    let chi = load_chi(chi, g.vertex_count())?;
    let p = timed(phases, "build", || build_product(&g, &s, &h, &chi)).map_err(|e| e.to_string())?;
    write(out, &serialize_graph(&p.graph))?;
    if let Some(path) = provenance {
        let entries: Vec<Value> = p
            .provenance()
            .iter()
            .enumerate()
            .map(|(id, v)| {
                let mut e = to_json(v);
                e["id"] = json!(id);
                e
            })
            .collect();
        write(path, &serde_json::to_string_pretty(&entries).expect("serializable"))?;
    }
    let sizes = p.class_sizes();
    let result = json!({"n": p.graph.vertex_count(), "m": p.graph.edge_count(), "classes": sizes});
    let text = format!(
        "product: {} vertices, {} edges; |V1..V4| = {:?}",
        p.graph.vertex_count(),
        p.graph.edge_count(),
        sizes
    );
    Ok(Report::new(result, text, EXIT_YES))
}

fn run_solve(
    mode: SolveMode,
    pattern: &Path,
    target: &Path,
    chi: Option<&Path>,
    cfg: &SearchConfig,
    phases: &mut Phases,
) -> Result<Report, String> {
    let g = load_graph(pattern)?;
    let h = load_graph(target)?;
    let (search, what) = match mode {
        SolveMode::Hom => (timed(phases, "search", || find_homomorphism(&g, &h, cfg)), "homomorphism"),
        SolveMode::Emb => (timed(phases, "search", || find_embedding(&g, &h, cfg)), "embedding"),
        SolveMode::Colemb => {
            let chi = load_chi(chi.ok_or("colemb needs --chi")?, g.vertex_count())?;
            let s = timed(phases, "search", || find_colored_embedding(&g, &h, &chi, cfg)).map_err(|e| e.to_string())?;
            (s, "colored embedding")
        }
    };
    Ok(outcome_report(&search.outcome, search.nodes, what))
}

fn run_check(what: &CheckCommand, workers: usize, phases: &mut Phases) -> Result<Report, String> {
    match what {
        CheckCommand::Frame {
            graph,
            frame,
            skel,
            unguarded,
            limits,
        } => {
            let g = load_graph(graph)?;
            let f = match (frame.as_deref(), skel) {
                (Some("corners"), _) => grid_corners(&g)?,
                (Some(list), _) => parse_vertex_list(list, &g)?,
                (None, Some(p)) => load_skeleton(p)?.frame,
                (None, None) => return Err("give --frame or --skel".into()),
            };
            let cfg = frame_config(limits, workers, *unguarded);
            let v = timed(phases, "frame", || is_frame(&g, &f, &cfg)).map_err(|e| e.to_string())?;
            let (mut result, text, exit) = frame_report(&v);
            result["frame"] = json!(f);
            Ok(Report::new(result, format!("{text} (F = {f:?})"), exit))
        }
        CheckCommand::Skeleton {
            graph,
            skel,
            unguarded,
            limits,
        } => {
            let g = load_graph(graph)?;
            let s = load_skeleton(skel)?;
            let cfg = frame_config(limits, workers, *unguarded);
            let r = timed(phases, "skeleton", || is_skeleton(&g, &s.frame, &s.connectors, &cfg)).map_err(|e| e.to_string())?;
            let (s1, s1_text, _) = frame_report(&r.s1);
            let exit = match r.is_skeleton() {
                Some(true) => EXIT_YES,
                Some(false) => EXIT_NO,
                None => EXIT_LIMIT,
            };
            let result = json!({
                "skeleton": r.is_skeleton(),
                "s1": s1,
                "s2_overlap": r.s2_overlap,
                "s3_violations": r.s3_violations,
            });
            let text = format!(
                "S1: {s1_text}\nS2: {}\nS3: {}\nskeleton: {}",
                if r.s2() { "ok".to_string() } else { format!("overlap {:?}", r.s2_overlap) },
                if r.s3() { "ok".to_string() } else { format!("violations {:?}", r.s3_violations) },
                match r.is_skeleton() {
                    Some(b) => b.to_string(),
                    None => "undecided".into(),
                }
            );
            Ok(Report::new(result, text, exit))
        }
        CheckCommand::Rigid {
            graph,
            skel,
            exhaustive,
            samples,
            seed,
            max_h,
            limits,
        } => {
            let g = load_graph(graph)?;
            let s = load_skeleton(skel)?;
            let mut cfg = RigidityConfig {
                parallel: workers > 1,
                ..RigidityConfig::default()
            };
            cfg.search.node_limit = limits.limit_nodes;
            cfg.search.time_limit = limits.timeout.map(|t| Duration::from_secs_f64(t.max(0.0)));
            let verdict = if *exhaustive {
                timed(phases, "exhaustive", || is_rigid_exhaustive(&g, &s, &cfg))
            } else {
                let max_h = max_h.unwrap_or((2 * g.vertex_count()).min(12));
                timed(phases, "random", || rigidity_random_search(&g, &s, *samples, *seed, max_h, &cfg))
            }
            .map_err(|e| e.to_string())?;
            let bound = verdict.search_bound;
            Ok(match &verdict.status {
                RigidityStatus::RigidExhaustive => Report::new(
                    json!({"status": "rigid", "search_bound": bound}),
                    format!("rigid (exhaustive, |V(H)| <= {bound})"),
                    EXIT_YES,
                ),
                RigidityStatus::NoCounterexampleFound { samples, seed } => Report::new(
                    json!({"status": "no-counterexample", "samples": samples, "seed": seed, "search_bound": bound}),
                    format!("no counterexample in {samples} samples (seed {seed}, |V(H)| <= {bound})"),
                    EXIT_YES,
                ),
                RigidityStatus::Counterexample(c) => Report::new(
                    json!({"status": "counterexample", "counterexample": to_json(c)}),
                    format!(
                        "counterexample: |V(H)| = {}, E(H) = {:?}, chi = {:?}, missed frame vertices {:?}",
                        c.h.vertex_count(),
                        c.h.edges(),
                        c.chi.colors(),
                        c.missed
                    ),
                    EXIT_NO,
                ),
                RigidityStatus::Indeterminate { reason } => Report::new(
                    json!({"status": "limit", "reason": reason}),
                    format!("undecided: {reason}"),
                    EXIT_LIMIT,
                ),
            })
        }
    }
}

fn write_instance(out: &Path, pattern: &Graph, target: &Graph, provenance: &Value) -> Result<(), String> {
    fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    write(&out.join("pattern.g"), &serialize_graph(pattern))?;
    write(&out.join("target.g"), &serialize_graph(target))?;
    write(
        &out.join("provenance.json"),
        &serde_json::to_string_pretty(provenance).expect("serializable"),
    )
}

fn run_reduce(what: &ReduceCommand, workers: usize, phases: &mut Phases) -> Result<Report, String> {
    match what {
        ReduceCommand::HomToColemb { pattern, host, chi, out } => {
            let g = load_graph(pattern)?;
            let h = load_graph(host)?;
            let chi = load_chi(chi, g.vertex_count())?;
            let inst = timed(phases, "reduce", || hom_to_colemb(&g, &h, &chi)).map_err(|e| e.to_string())?;
            let prov = json!({
                "chi": inst.chi.colors(),
                "vertices": inst.target.vertices().map(|v| json!({"id": v, "u": inst.chi.color(v), "v": v})).collect::<Vec<_>>(),
            });
            write_instance(out, &inst.pattern, &inst.target, &prov)?;
            Ok(Report::new(
                json!({"n": inst.target.vertex_count(), "m": inst.target.edge_count(), "out": out}),
                format!("colored target: {} vertices, {} edges; wrote {}", inst.target.vertex_count(), inst.target.edge_count(), out.display()),
                EXIT_YES,
            ))
        }
        ReduceCommand::ColembToEmb {
            family,
            pattern,
            host,
            chi,
            out,
            decide,
            limits,
        } => {
            let g = load_graph(pattern)?;
            let h = load_graph(host)?;
            let chi = load_chi(chi, g.vertex_count())?;
            let inst = ColEmbInstance::new(g, h, chi).map_err(|e| e.to_string())?;
            let emb = timed(phases, "reduce", || colemb_to_emb((*family).into(), &inst)).map_err(|e| e.to_string())?;
            let p = emb.provenance.as_ref().expect("reduction records provenance");
            let prov = json!({
                "family": p.family,
                "s": p.s,
                "t": p.t,
                "skeleton": to_json(&p.skeleton),
                "pattern_to_quotient": p.pattern_to_quotient.image(),
                "vertices": p.product.provenance(),
            });
            write_instance(out, &emb.pattern, &emb.target, &prov)?;
            let mut result = json!({
                "family": p.family,
                "s": p.s,
                "t": p.t,
                "n": emb.target.vertex_count(),
                "m": emb.target.edge_count(),
                "out": out,
            });
            let mut text = format!(
                "{} {}x{} into a product with {} vertices, {} edges; wrote {}",
                p.family,
                p.s,
                p.t,
                emb.target.vertex_count(),
                emb.target.edge_count(),
                out.display()
            );
            let mut exit = EXIT_YES;
            if *decide {
                let cfg = search_config(limits, workers);
                let d = timed(phases, "decide", || decide_via_reduction(&emb, &cfg)).map_err(|e| e.to_string())?;
                let (value, line, code) = match &d {
                    Decision::Yes { certificate, colored } => (
                        json!({"answer": true, "certificate": certificate.image(), "colored": colored.image()}),
                        "embedding exists (certificate verified)".to_string(),
                        EXIT_YES,
                    ),
                    Decision::No { nodes } => (json!({"answer": false, "nodes": nodes}), format!("no embedding ({nodes} nodes)"), EXIT_NO),
                    Decision::Indeterminate(l) => (json!({"answer": null, "limit": l.to_string()}), format!("undecided: {l}"), EXIT_LIMIT),
                };
                result["decision"] = value;
                text.push('\n');
                text.push_str(&line);
                exit = code;
            }
            Ok(Report::new(result, text, exit))
        }
    }
}

fn run_export(graph: &Path, skel: Option<&Path>, out: Option<&Path>, phases: &mut Phases) -> Result<Report, String> {
    let g = load_graph(graph)?;
    let classes = skel.map(load_skeleton).transpose()?.map(|s| vec![s.frame, s.connectors]);
    let dot = timed(phases, "render", || to_dot(&g, classes.as_deref())).map_err(|e| e.to_string())?;
    match out {
        Some(p) => {
            write(p, &dot)?;
            Ok(Report::new(json!({"path": p}), format!("wrote {}", p.display()), EXIT_YES))
        }
        None => Ok(Report::new(json!({"dot": dot}), dot.trim_end(), EXIT_YES)),
    }
}

fn run_suite(phases: &mut Phases) -> Report {
    let results = timed(phases, "suite", suite::run_quick);
    let failed = results.iter().filter(|r| !r.passed).count();
    let text = results
        .iter()
        .map(|r| format!("{} {} ({} ms): {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.millis, r.detail))
        .collect::<Vec<_>>()
        .join("\n");
    Report::new(
        json!({"checks": to_json(&results), "failed": failed}),
        text,
        if failed == 0 { EXIT_YES } else { EXIT_NO },
    )
}

fn dispatch(cli: &Cli, phases: &mut Phases) -> Result<Report, String> {
    let workers = cli.workers.max(1);
    match &cli.command {
        Command::Gen(args) => run_gen(args, phases),
        Command::Skeleton(args) => run_skeleton(args, phases),
        Command::Quotient { graph, skel } => run_quotient(graph, skel, phases),
        Command::Product {
            graph,
            skel,
            host,
            chi,
            out,
            provenance,
        } => run_product(graph, skel, host, chi, out, provenance.as_deref(), phases),
        Command::Solve {
            mode,
            pattern,
            target,
            chi,
            limits,
        } => run_solve(*mode, pattern, target, chi.as_deref(), &search_config(limits, workers), phases),
        Command::Check { what } => run_check(what, workers, phases),
        Command::Reduce { what } => run_reduce(what, workers, phases),
        Command::Export { graph, skel, out } => run_export(graph, skel.as_deref(), out.as_deref(), phases),
        Command::Suite { quick: _ } => Ok(run_suite(phases)),
    }
}

/// Writes one line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if cli.workers > 1 {
        // Read once by the global pool, which nothing has touched yet.
        std::env::set_var("RAYON_NUM_THREADS", cli.workers.to_string());
    }
    let mut phases = Phases::new();
    let report = dispatch(&cli, &mut phases);
    let timing: serde_json::Map<String, Value> = phases
        .iter()
        .map(|(name, d)| (name.to_string(), json!(d.as_secs_f64() * 1000.0)))
        .collect();
    let (result, text, exit) = match report {
        Ok(r) => (r.result, r.text, r.exit),
        Err(e) => {
            eprintln!("error: {e}");
            (json!({"error": e}), String::new(), EXIT_USAGE)
        }
    };
    if cli.json {
        let doc = json!({
            "command": argv[1..].join(" "),
            "timing_ms": timing,
            "result": result,
            "exit": exit,
        });
        emit(&doc.to_string());
    } else {
        if !text.is_empty() {
            emit(&text);
        }
        for (name, d) in &phases {
            eprintln!("{name}: {:.1} ms", d.as_secs_f64() * 1000.0);
        }
    }
    ExitCode::from(exit)
}
