use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use homcirc::embedding::EmbeddedDigraph;
use homcirc::homology::Basis;
use homcirc::instances::io::{circulation_to_json, parse_circulation, to_canonical_json};
use homcirc::instances::sat::{
    sat_to_stab, stab_to_circulation, stab_to_circulation_min_genus, CnfFormula,
};
use homcirc::instances::{gen_family, read_instance, write_instance, Instance};
use homcirc::oracle::{
    exact_refutation, oracle_homologous, oracle_solve, oracle_solve_conclusive, EtaBox,
    HomologyVerdict, OracleSolve, Refutation,
};
use homcirc::rational::{format_rational, parse_rational, Rational};
use homcirc::solver::{solve, SolveOptions, SolveResult, SolveStatus, DEFAULT_GENUS_CAP};
use homcirc::Surface;
use serde_json::{json, Value};

/// Minimum-cost homologous circulations on surface-embedded digraphs.
#[derive(Parser, Debug)]
#[command(name = "homcirc", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Surface summary: genus, orientability, counts.
    Info { instance: PathBuf },
    /// The facial walks, in face-index order.
    Faces { instance: PathBuf },
    /// The dual graph as an instance file.
    Dual {
        instance: PathBuf,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Homology basis vectors (and the parity vector when non-orientable).
    Basis {
        instance: PathBuf,
        /// Seed for the spanning trees.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Whether two circulations are homologous.
    Check {
        instance: PathBuf,
        x: PathBuf,
        y: PathBuf,
        /// Also print an integer η with x = y + ∂η.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Minimum-cost non-negative circulation homologous to y.
    Solve(SolveArgs),
    /// Brute-force optimum over a box of face coefficients.
    Oracle {
        instance: PathBuf,
        /// Circulation file overriding the instance's y.
        #[arg(long)]
        y: Option<PathBuf>,
        /// Search η in {-K..K}^F. Without it the solve box is derived from
        /// LP bounds and the answer is conclusive.
        #[arg(long = "box", value_name = "K", conflicts_with = "upper",
              value_parser = clap::value_parser!(i64).range(0..))]
        box_radius: Option<i64>,
        /// Cost bound used to derive the box; needed when the face
        /// coefficients are otherwise unbounded.
        #[arg(long, value_name = "COST", value_parser = parse_cost)]
        upper: Option<Rational>,
        /// Minimise over the box (the default).
        #[arg(long, conflicts_with = "check")]
        solve: bool,
        /// Decide whether X and Y are homologous instead of solving.
        #[arg(long, num_args = 2, value_names = ["X", "Y"], conflicts_with_all = ["y", "upper"])]
        check: Option<Vec<PathBuf>>,
    },
    /// Generate an instance file.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    /// Circulation file overriding the instance's y.
    #[arg(long)]
    y: Option<PathBuf>,
    /// Also print an integer η with x = y + ∂η.
    #[arg(long)]
    witness: bool,
    /// ℓ∞ radius of the search tube of the fixed-row integer program.
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    tube_radius: Option<i64>,
    /// Refuse non-orientable inputs of larger Euler genus.
    #[arg(long, default_value_t = DEFAULT_GENUS_CAP)]
    genus_cap: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the walk enumeration.
    #[arg(long, env = "HOMCIRC_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Family name, or `sat` for the reduction from a DIMACS formula.
    family: String,
    /// Integer parameters of the family.
    params: Vec<u64>,
    /// DIMACS CNF input (for `sat`).
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// Rotation seed (for `sat`).
    #[arg(long)]
    seed: Option<u64>,
    /// Hill-climbing steps lowering the genus (for `sat`; 0 keeps the seeded rotation).
    #[arg(long, default_value_t = 2000)]
    climb: usize,
    #[arg(short, long)]
    output: PathBuf,
}

/// Exit code 1: a negative answer rather than an error.
struct Negative(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(Negative(out))) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<std::result::Result<String, Negative>> {
    let json = cli.format == Format::Json;
    let out = match &cli.command {
        Command::Info { instance } => info(&load(instance)?, json)?,
        Command::Faces { instance } => faces(&load(instance)?, json)?,
        Command::Dual { instance, output } => {
            let inst = load(instance)?;
            let surface = Surface::analyse(&inst.graph)?;
            let dual = Instance::new(surface.dual.to_instance(&inst.graph)?, None);
            match output {
                Some(path) => written(path, &dual, None, json)?,
                None => to_canonical_json(&dual),
            }
        }
        Command::Basis { instance, seed } => basis(&load(instance)?, *seed, json)?,
        Command::Check {
            instance,
            x,
            y,
            witness,
            seed,
        } => return check(&load(instance)?, x, y, *witness, *seed, json),
        Command::Solve(args) => return solve_cmd(args, json),
        Command::Oracle {
            instance,
            y,
            box_radius,
            upper,
            solve: _,
            check,
        } => {
            let inst = load(instance)?;
            return match check {
                Some(pair) => oracle_check(&inst, &pair[0], &pair[1], *box_radius, json),
                None => oracle(&inst, y.as_deref(), *box_radius, upper.as_ref(), json),
            };
        }
        Command::Gen(args) => gen(args, json)?,
    };
    Ok(Ok(out))
}

fn load(path: &Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("reading {}", path.display()))
}

fn load_circulation(path: &Path, graph: &EmbeddedDigraph) -> Result<Vec<i64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_circulation(&text, graph).with_context(|| format!("parsing {}", path.display()))
}

fn render(json: bool, value: Value, text: impl FnOnce() -> String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&value).expect("JSON values always serialise");
        s.push('\n');
        s
    } else {
        text()
    }
}

fn info(inst: &Instance, json: bool) -> Result<String> {
    let g = &inst.graph;
    let s = Surface::analyse(g)?;
    let value = json!({
        "nodes": g.node_count(),
        "arcs": g.arc_count(),
        "faces": s.faces.len(),
        "genus": s.genus,
        "orientable": s.orientable,
    });
    Ok(render(json, value, || {
        format!(
            "nodes: {}\narcs: {}\nfaces: {}\ngenus: {}\norientable: {}\n",
            g.node_count(),
            g.arc_count(),
            s.faces.len(),
            s.genus,
            s.orientable
        )
    }))
}

fn faces(inst: &Instance, json: bool) -> Result<String> {
    let g = &inst.graph;
    let s = Surface::analyse(g)?;
    let walks: Vec<Value> = s
        .faces
        .walks
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let darts: Vec<Value> = w
                .steps
                .iter()
                .map(|st| json!({"arc": g.arc(st.dart.arc).id, "end": st.dart.end.as_str()}))
                .collect();
            json!({"face": i, "start": g.node_id(w.start), "darts": darts})
        })
        .collect();
    Ok(render(json, json!({ "faces": walks }), || {
        let mut t = String::new();
        for (i, w) in s.faces.walks.iter().enumerate() {
            let darts: Vec<String> = w
                .steps
                .iter()
                .map(|st| {
                    format!(
                        "{}{}",
                        g.arc(st.dart.arc).id,
                        if st.forward() { "+" } else { "-" }
                    )
                })
                .collect();
            writeln!(
                t,
                "face {i} (from node {}): {}",
                g.node_id(w.start),
                darts.join(" ")
            )
            .unwrap();
        }
        t
    }))
}

fn vector_json(g: &EmbeddedDigraph, v: &[i64]) -> Value {
    circulation_to_json(g, v)
}

/// `{face index: coefficient}`.
fn face_json(eta: &[i64]) -> Value {
    Value::Object(
        eta.iter()
            .enumerate()
            .map(|(f, &v)| (f.to_string(), json!(v)))
            .collect(),
    )
}

fn arc_list(g: &EmbeddedDigraph, v: &[i64]) -> String {
    let items: Vec<String> = g
        .arcs()
        .iter()
        .zip(v)
        .map(|(a, x)| format!("{}:{x}", a.id))
        .collect();
    items.join(" ")
}

fn face_list(eta: &[i64]) -> String {
    let items: Vec<String> = eta
        .iter()
        .enumerate()
        .map(|(f, x)| format!("{f}:{x}"))
        .collect();
    items.join(" ")
}

fn basis(inst: &Instance, seed: Option<u64>, json: bool) -> Result<String> {
    let g = &inst.graph;
    let s = Surface::analyse(g)?;
    let b = Basis::build(g, &s, seed)?;
    let vectors: Vec<Value> = b.vectors().iter().map(|w| vector_json(g, w)).collect();
    let parity = b.parity().map(|h| {
        let h: Vec<i64> = h.iter().map(|&v| v as i64).collect();
        vector_json(g, &h)
    });
    let value = json!({
        "genus": s.genus,
        "orientable": s.orientable,
        "vectors": vectors,
        "parity": parity,
    });
    Ok(render(json, value, || {
        let mut t = format!("genus: {}\norientable: {}\n", s.genus, s.orientable);
        for (i, w) in b.vectors().iter().enumerate() {
            writeln!(t, "w{i}: {}", arc_list(g, w)).unwrap();
        }
        if let Some(h) = b.parity() {
            let h: Vec<i64> = h.iter().map(|&v| v as i64).collect();
            writeln!(t, "parity: {}", arc_list(g, &h)).unwrap();
        }
        t
    }))
}

fn check(
    inst: &Instance,
    x_path: &Path,
    y_path: &Path,
    witness: bool,
    seed: Option<u64>,
    json: bool,
) -> Result<std::result::Result<String, Negative>> {
    let g = &inst.graph;
    let x = load_circulation(x_path, g)?;
    let y = load_circulation(y_path, g)?;
    let s = Surface::analyse(g)?;
    let b = Basis::build(g, &s, seed)?;
    let homologous = b.check_homologous(g, &x, &y)?;
    let eta = if homologous && witness {
        let z: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        Some(b.witness(&s, &z).context("no integral witness found")?)
    } else {
        None
    };
    let out = render(
        json,
        json!({"homologous": homologous, "witness": eta.as_deref().map(face_json)}),
        || {
            let mut t = format!("homologous: {homologous}\n");
            if let Some(eta) = &eta {
                writeln!(t, "witness: {}", face_list(eta)).unwrap();
            }
            t
        },
    );
    Ok(if homologous {
        Ok(out)
    } else {
        Err(Negative(out))
    })
}

fn solve_cmd(args: &SolveArgs, json: bool) -> Result<std::result::Result<String, Negative>> {
    let inst = load(&args.instance)?;
    let g = &inst.graph;
    let y = match &args.y {
        Some(p) => load_circulation(p, g)?,
        None => inst.y_or_zero(),
    };
    let options = SolveOptions {
        witness: args.witness,
        tube_radius: args.tube_radius,
        genus_cap: args.genus_cap,
        seed: args.seed,
        threads: args.threads.map(|t| t as usize),
    };
    let r = solve(g, &y, &options)?;
    let out = render(json, result_json(g, &r), || result_text(g, &r));
    Ok(match r.status {
        SolveStatus::Optimal => Ok(out),
        SolveStatus::Infeasible => Err(Negative(out)),
    })
}

/// Solver counters; timings are left out so output is reproducible.
fn stats(r: &SolveResult) -> Vec<(&'static str, Option<i64>)> {
    let st = &r.stats;
    let n = |v: Option<usize>| v.map(|v| v as i64);
    vec![
        ("omega_size", n(st.omega_size)),
        ("columns", n(st.columns)),
        ("omega_states", st.omega_states.map(|v| v as i64)),
        ("ip_states", st.ip_states.map(|v| v as i64)),
        ("walk_bound", st.walk_bound),
        ("tube_radius", st.tube_radius),
        ("lp_rows", n(st.lp_rows)),
    ]
}

fn result_json(g: &EmbeddedDigraph, r: &SolveResult) -> Value {
    let mut v = json!({
        "status": r.status.as_str(),
        "objective": r.objective.as_ref().map(format_rational),
        "x": r.x.as_ref().map(|x| vector_json(g, x)),
        "stats": stats(r)
            .into_iter()
            .filter_map(|(k, v)| Some((k.to_string(), json!(v?))))
            .collect::<serde_json::Map<_, _>>(),
    });
    if let Some(eta) = &r.witness {
        v["eta"] = face_json(eta);
    }
    v
}

fn result_text(g: &EmbeddedDigraph, r: &SolveResult) -> String {
    let mut t = format!("status: {}\n", r.status.as_str());
    if let Some(o) = &r.objective {
        writeln!(t, "objective: {}", format_rational(o)).unwrap();
    }
    if let Some(x) = &r.x {
        writeln!(t, "x: {}", arc_list(g, x)).unwrap();
    }
    if let Some(eta) = &r.witness {
        writeln!(t, "eta: {}", face_list(eta)).unwrap();
    }
    for (k, v) in stats(r) {
        if let Some(v) = v {
            writeln!(t, "{k}: {v}").unwrap();
        }
    }
    t
}

fn oracle(
    inst: &Instance,
    y_path: Option<&Path>,
    box_radius: Option<i64>,
    upper: Option<&Rational>,
    json: bool,
) -> Result<std::result::Result<String, Negative>> {
    let g = &inst.graph;
    let y = match y_path {
        Some(p) => load_circulation(p, g)?,
        None => inst.y_or_zero(),
    };
    let s = Surface::analyse(g)?;
    let (outcome, conclusive) = match box_radius {
        Some(k) => {
            let b = EtaBox::new(k, s.faces.len())?;
            (oracle_solve(g, &y, &s.boundary, &b)?, false)
        }
        None => {
            let c = oracle_solve_conclusive(g, &y, &s.boundary, upper)?;
            (c.outcome, c.conclusive)
        }
    };
    let optimal = match &outcome {
        OracleSolve::Optimal { x, objective, eta } => Some((objective, x, eta)),
        OracleSolve::InfeasibleInBox => None,
    };
    let status = if optimal.is_some() {
        "Optimal"
    } else {
        "InfeasibleInBox"
    };
    let objective = optimal.map(|o| o.0);
    let x = optimal.map(|o| o.1);
    let eta = optimal.map(|o| o.2);
    let value = json!({
        "status": status,
        "conclusive": conclusive,
        "objective": objective.map(format_rational),
        "x": x.map(|x| vector_json(g, x)),
        "eta": eta.map(|e| face_json(e)),
    });
    let out = render(json, value, || {
        let mut t = format!("status: {status}\nconclusive: {conclusive}\n");
        if let Some(o) = objective {
            writeln!(t, "objective: {}", format_rational(o)).unwrap();
        }
        if let Some(x) = x {
            writeln!(t, "x: {}", arc_list(g, x)).unwrap();
        }
        if let Some(eta) = eta {
            writeln!(t, "eta: {}", face_list(eta)).unwrap();
        }
        t
    });
    Ok(match outcome {
        OracleSolve::Optimal { .. } => Ok(out),
        OracleSolve::InfeasibleInBox => Err(Negative(out)),
    })
}

fn oracle_check(
    inst: &Instance,
    x_path: &Path,
    y_path: &Path,
    box_radius: Option<i64>,
    json: bool,
) -> Result<std::result::Result<String, Negative>> {
    let g = &inst.graph;
    let x = load_circulation(x_path, g)?;
    let y = load_circulation(y_path, g)?;
    let s = Surface::analyse(g)?;
    let refutation = exact_refutation(&x, &y, &s.boundary);
    let eta = match (refutation, box_radius) {
        (None, Some(k)) => {
            let b = EtaBox::new(k, s.faces.len())?;
            match oracle_homologous(&x, &y, &s.boundary, &b)? {
                HomologyVerdict::Yes(eta) => Some(eta),
                HomologyVerdict::NoWitnessInBox => None,
            }
        }
        _ => None,
    };
    let homologous = refutation.is_none();
    let reason = refutation.map(|r| match r {
        Refutation::NotRealHomologous => "not homologous over the reals",
        Refutation::NotIntegerHomologous => "homologous over the reals only",
    });
    let value = json!({
        "homologous": homologous,
        "reason": reason,
        "witness": eta.as_deref().map(face_json),
    });
    let out = render(json, value, || {
        let mut t = format!("homologous: {homologous}\n");
        if let Some(r) = reason {
            writeln!(t, "reason: {r}").unwrap();
        }
        if let Some(eta) = &eta {
            writeln!(t, "witness: {}", face_list(eta)).unwrap();
        }
        t
    });
    Ok(if homologous {
        Ok(out)
    } else {
        Err(Negative(out))
    })
}

fn gen(args: &GenArgs, json: bool) -> Result<String> {
    let (instance, budget) = if args.family == "sat" {
        let Some(cnf) = &args.cnf else {
            bail!("gen sat needs --cnf <file>");
        };
        if !args.params.is_empty() {
            bail!("gen sat takes no positional parameters");
        }
        let text =
            std::fs::read_to_string(cnf).with_context(|| format!("reading {}", cnf.display()))?;
        let formula = CnfFormula::parse_dimacs(&text)
            .with_context(|| format!("parsing {}", cnf.display()))?;
        let stab = sat_to_stab(&formula);
        let r = if args.climb == 0 {
            stab_to_circulation(&stab, args.seed)?
        } else {
            stab_to_circulation_min_genus(&stab, args.seed.unwrap_or(0), args.climb)?
        };
        (Instance::new(r.digraph, Some(r.y)), Some(r.budget))
    } else {
        if args.cnf.is_some() {
            bail!("--cnf only applies to gen sat");
        }
        (
            Instance::new(gen_family(&args.family, &args.params)?, None),
            None,
        )
    };
    written(&args.output, &instance, budget.as_ref(), json)
}

/// Writes `instance` and reports the file with its surface.
fn written(
    path: &Path,
    instance: &Instance,
    budget: Option<&Rational>,
    json: bool,
) -> Result<String> {
    let s = Surface::analyse(&instance.graph)?;
    write_instance(path, instance).with_context(|| format!("writing {}", path.display()))?;
    let value = json!({
        "written": path.display().to_string(),
        "genus": s.genus,
        "orientable": s.orientable,
        "budget": budget.map(format_rational),
    });
    Ok(render(json, value, || {
        let mut t = format!(
            "wrote {} (genus {}, {})\n",
            path.display(),
            s.genus,
            if s.orientable {
                "orientable"
            } else {
                "non-orientable"
            }
        );
        if let Some(b) = budget {
            writeln!(t, "budget: {}", format_rational(b)).unwrap();
        }
        t
    }))
}

fn parse_cost(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}
