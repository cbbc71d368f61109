use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use steiner_ladder::analysis::{block_decompose, blockwise_maxwell_length, classify, is_decomposable, TreeClass};
use steiner_ladder::dynamics::{derive_params, iterate, periodic_orbit, tree_from_orbit, Direction, OrbitStatus};
use steiner_ladder::io::{
    instance_from_json, instance_to_json, orbit_csv, parse_angle, region_csv, tree_from_json, tree_to_json,
    write_atomic, ResultRecord,
};
use steiner_ladder::ladder::{
    a1_blocks, build_input, build_ladder_tree_a0, build_ladder_tree_a1, closed_form_length_a0, closed_form_length_a1,
    region_grid, FamilySpec, HalfPlane, InputFamily, LadderParams, MirrorWord,
};
use steiner_ladder::melzak::solve_exact;
use steiner_ladder::svg::{render, SvgOptions};
use steiner_ladder::{selftest, EmbeddedTree, Error, Result, Role};

/// Exact small Steiner trees and the ladder constructions on an angle.
#[derive(Parser)]
#[command(name = "steiner-ladder", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Steiner tree of an instance file (at most 9 terminals).
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Tree JSON of the best tree.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit ladder tree, with closed-form and Maxwell lengths.
    Construct {
        #[arg(long, value_parser = parse_family, default_value = "A0")]
        family: InputFamily,
        #[arg(long, value_parser = angle, default_value = "pi/36")]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Mirror bits for the A1 blocks, e.g. 0101; zeros by default.
        #[arg(long, value_parser = parse_word)]
        word: Option<MirrorWord>,
        #[arg(long, value_parser = parse_side, default_value = "upper")]
        side: HalfPlane,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the input terminal set.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Orbit of the interval map as CSV, optionally with its tree.
    Dynamics {
        #[arg(long, value_parser = angle, default_value = "pi/36")]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, value_parser = angle, default_value = "0")]
        beta: f64,
        /// Starting value in [0, 1].
        #[arg(long, conflicts_with = "periodic")]
        t0: Option<f64>,
        /// Start on a periodic point of this period (the largest one).
        #[arg(long)]
        periodic: Option<usize>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tree JSON traced by the orbit.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Hypothesis and rhombus predicates on a grid of (alpha, lambda).
    Region {
        #[arg(long, default_value_t = 100)]
        alpha_steps: usize,
        #[arg(long, default_value_t = 100)]
        lambda_steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG figure of a tree file.
    Render {
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        labels: bool,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
    /// Quick consistency checks.
    Selftest,
}

fn angle(s: &str) -> std::result::Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<InputFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_word(s: &str) -> std::result::Result<MirrorWord, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_side(s: &str) -> std::result::Result<HalfPlane, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            stdout(contents);
            Ok(())
        }
    }
}

/// Like `print!`, but a closed pipe is not an error.
fn stdout(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn print_json(v: &impl Serialize) {
    stdout(&(serde_json::to_string_pretty(v).expect("plain data serialises") + "\n"));
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn labels(t: &EmbeddedTree) -> Vec<String> {
    let mut l: Vec<String> = t
        .vertices
        .iter()
        .filter(|v| v.role == Role::Terminal)
        .filter_map(|v| v.label.clone())
        .collect();
    l.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    l
}

fn class_name(c: TreeClass) -> &'static str {
    match c {
        TreeClass::Full => "full",
        TreeClass::FullStar => "full*",
        TreeClass::Neither => "neither",
    }
}

fn solve(instance: &Path, tol: f64, out: Option<&Path>) -> Result<()> {
    let ts = instance_from_json(&read(instance)?)?;
    if ts.terminals.len() > 9 {
        return Err(Error::Size {
            n: ts.terminals.len(),
            range: "2..=9",
        });
    }
    let start = Instant::now();
    let sol = solve_exact(&ts, tol)?;
    let record = ResultRecord {
        id: instance
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        method: "exact".into(),
        length: sol.length(),
        co_optima: sol.co_optima.len(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    if let Some(p) = out {
        write_atomic(p, &tree_to_json(&sol.best, ts.family.as_ref()))?;
    }
    print_json(&json!({
        "record": record,
        "class": class_name(classify(&sol.best)),
        "blocks": block_decompose(&sol.best).iter().map(labels).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn construct(
    family: InputFamily,
    params: LadderParams,
    word: Option<MirrorWord>,
    side: HalfPlane,
    out: Option<&Path>,
    instance: Option<&Path>,
) -> Result<()> {
    let start = Instant::now();
    let (tree, closed) = match family {
        InputFamily::A0 => (
            build_ladder_tree_a0(&params, side)?,
            closed_form_length_a0(params.alpha, params.lambda),
        ),
        InputFamily::A1 => {
            let word = word.unwrap_or_else(|| MirrorWord::zeros(a1_blocks(params.depth)));
            (
                build_ladder_tree_a1(&params, &word)?,
                closed_form_length_a1(params.alpha, params.lambda),
            )
        }
    };
    let maxwell = blockwise_maxwell_length(&tree)?;
    let elapsed = start.elapsed().as_secs_f64();
    let id = format!("{family:?}-{}-{}-{}", params.alpha, params.lambda, params.depth);
    let spec = FamilySpec { family, params };
    if let Some(p) = instance {
        write_atomic(p, &instance_to_json(&build_input(&params, family)?))?;
    }
    if let Some(p) = out {
        write_atomic(p, &tree_to_json(&tree, Some(&spec)))?;
    }
    let record = |method: &str, length: f64| ResultRecord {
        id: id.clone(),
        method: method.into(),
        length,
        co_optima: 1,
        wall_time_s: elapsed,
    };
    print_json(&json!({
        "records": [record("closed_form", closed), record("maxwell", maxwell)],
        "edge_sum": tree.length,
        "tail_bound": params.lambda.powi(params.depth as i32 - 1) * closed,
        "class": class_name(classify(&tree)),
        "decomposable": is_decomposable(&tree),
        "blocks": block_decompose(&tree).iter().map(labels).collect::<Vec<_>>(),
    }));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dynamics(
    alpha: f64,
    lambda: f64,
    beta: f64,
    t0: Option<f64>,
    periodic: Option<usize>,
    steps: usize,
    out: Option<&Path>,
    tree_out: Option<&Path>,
) -> Result<()> {
    let start = Instant::now();
    let p = derive_params(alpha, lambda, beta)?;
    let orbit = match (t0, periodic) {
        (Some(t), _) => iterate(&p, t, steps, Direction::Forward),
        (None, Some(period)) => {
            let pts = steiner_ladder::dynamics::periodic_points(&p, period)?;
            let t = *pts
                .last()
                .ok_or_else(|| Error::Inadmissible(format!("no points of period {period}")))?;
            periodic_orbit(&p, t, period, steps)?
        }
        (None, None) => return Err(Error::Parse("give --t0 or --periodic".into())),
    };
    emit(out, &orbit_csv(&p, &orbit))?;
    if let Some(path) = tree_out {
        if orbit.values.len() < 2 {
            return Err(Error::Inadmissible("orbit too short for a tree".into()));
        }
        let tree = tree_from_orbit(&p, &orbit, orbit.values.len() - 1)?;
        write_atomic(path, &tree_to_json(&tree, None))?;
        let record = ResultRecord {
            id: format!("orbit-{}", orbit.values[0]),
            method: "dynamics".into(),
            length: tree.length,
            co_optima: 1,
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        eprintln!("{}", serde_json::to_string(&record).expect("plain data serialises"));
    }
    if orbit.status != OrbitStatus::Ok {
        eprintln!("orbit stopped early: {:?}", orbit.status);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve { instance, tol, out } => solve(&instance, tol, out.as_deref()),
        Cmd::Construct {
            family,
            alpha,
            lambda,
            depth,
            word,
            side,
            out,
            instance,
        } => construct(
            family,
            LadderParams::new(alpha, lambda, depth)?,
            word,
            side,
            out.as_deref(),
            instance.as_deref(),
        ),
        Cmd::Dynamics {
            alpha,
            lambda,
            beta,
            t0,
            periodic,
            steps,
            out,
            tree,
        } => dynamics(
            alpha,
            lambda,
            beta,
            t0,
            periodic,
            steps,
            out.as_deref(),
            tree.as_deref(),
        ),
        Cmd::Region {
            alpha_steps,
            lambda_steps,
            out,
        } => emit(out.as_deref(), &region_csv(&region_grid(alpha_steps, lambda_steps))),
        Cmd::Render {
            tree,
            out,
            labels,
            width,
        } => {
            let (t, family) = tree_from_json(&read(&tree)?)?;
            let opts = SvgOptions {
                width,
                labels,
                sides: family.map(|f| f.params.alpha),
                shrink_toward: family.map(|_| steiner_ladder::Point::ORIGIN),
                ..Default::default()
            };
            emit(out.as_deref(), &render(&t, &opts))
        }
        Cmd::Selftest => {
            let checks = selftest::run();
            for c in &checks {
                stdout(&format!(
                    "{} {}: {}\n",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            if checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(Error::Hypothesis("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
