//! One line per acceptance criterion. Tolerances and time limits are pinned
//! here; criterion 4 is a known failure (see the README).

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steiner_ladder::analysis::{
    block_decompose, classify, is_decomposable, local_min_gradient, maxwell_length, trees_match, trees_mirror_equal,
    Axis, TreeClass,
};
use steiner_ladder::dynamics::{
    derive_params, inverse_map, orbit_from_tree, periodic_orbit, periodic_points, tree_from_orbit,
};
use steiner_ladder::ladder::{
    a_point, b_point, build_ladder_tree_a0, closed_form_length_a0, closed_form_length_a1, region_grid,
    self_similarity_defect, HalfPlane, LadderParams,
};
use steiner_ladder::melzak::{realize_full_topology, solve_exact};
use steiner_ladder::topology::enumerate_full_topologies;
use steiner_ladder::{Point, Role, Terminal, TerminalSet};

const ALPHA: f64 = PI / 36.0;
const LAMBDA: f64 = 0.5;
/// For the five-digit constants quoted as approximate.
const APPROX_TOL: f64 = 5e-5;
/// Criteria the implementation is known not to meet.
const KNOWN_FAILURES: &[u32] = &[4];

/// Id, name, time limit, check.
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn seed() -> u64 {
    std::env::var("STEINER_LADDER_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5eed)
}

fn ladder_set(na: usize, nb: usize) -> TerminalSet {
    let a = (1..=na).map(|k| Terminal {
        label: format!("A{k}"),
        pos: a_point(ALPHA, LAMBDA, k),
    });
    let b = (1..=nb).map(|k| Terminal {
        label: format!("B{k}"),
        pos: b_point(ALPHA, LAMBDA, k),
    });
    TerminalSet::new(a.chain(b).collect()).unwrap()
}

fn labels(t: &steiner_ladder::EmbeddedTree) -> Vec<String> {
    t.vertices
        .iter()
        .filter(|v| v.role == Role::Terminal)
        .filter_map(|v| v.label.clone())
        .collect()
}

fn c1_topology_counts() -> Outcome {
    let mut got = Vec::new();
    let mut want = Vec::new();
    for n in 3..=7u32 {
        got.push(enumerate_full_topologies(n as usize).unwrap().len() as u128);
        // (2n-4)! / (2^(n-2) (n-2)!)
        let fact = |m: u32| (1..=m as u128).product::<u128>();
        want.push(fact(2 * n - 4) / (1u128 << (n - 2)) / fact(n - 2));
    }
    outcome(got == want && want == [1, 3, 15, 105, 945], format!("{got:?}"))
}

fn c2_square() -> Outcome {
    let sq = TerminalSet::from_points(&[
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ]);
    let s = solve_exact(&sq, 1e-9).unwrap();
    let err = (s.length() - (1.0 + 3f64.sqrt())).abs();
    outcome(
        err < 1e-9 && s.co_optima.len() == 2,
        format!("error {err:.1e}, {} co-optima", s.co_optima.len()),
    )
}

fn c3_block() -> Outcome {
    let s = solve_exact(&ladder_set(3, 2), 1e-9).unwrap();
    let cf = closed_form_length_a1(ALPHA, LAMBDA);
    let want = (1.0 - LAMBDA * LAMBDA) * cf;
    let rel = (s.length() - want).abs() / want;
    let full = classify(&s.best) == TreeClass::Full;
    outcome(
        full && rel < 1e-9 && (cf - 1.29845).abs() < APPROX_TOL,
        format!("full {full}, relative error {rel:.1e}, closed form {cf:.6}"),
    )
}

fn c4_multiplicity() -> Outcome {
    let s = solve_exact(&ladder_set(5, 4), 1e-8).unwrap();
    let mut shapes = Vec::new();
    let mut all_two_blocks = true;
    let mut all_share_a3 = true;
    for t in &s.co_optima {
        let blocks = block_decompose(t);
        let two = blocks.len() == 2
            && blocks
                .iter()
                .all(|b| labels(b).len() == 5 && classify(b) == TreeClass::Full);
        all_two_blocks &= two;
        let shared: Vec<String> = if blocks.len() == 2 {
            let second = labels(&blocks[1]);
            labels(&blocks[0]).into_iter().filter(|l| second.contains(l)).collect()
        } else {
            Vec::new()
        };
        all_share_a3 &= shared == ["A3"];
        shapes.push(format!("shared {shared:?}"));
    }
    outcome(
        s.co_optima.len() == 3 && all_two_blocks && all_share_a3,
        format!(
            "{} co-optima (expected 3), length {:.12}, two full blocks each: {all_two_blocks}, {}",
            s.co_optima.len(),
            s.length(),
            shapes.join("; ")
        ),
    )
}

fn c5_segment_closed() -> Outcome {
    let k = 20;
    let p = LadderParams::new(ALPHA, LAMBDA, k).unwrap();
    let up = build_ladder_tree_a0(&p, HalfPlane::Upper).unwrap();
    let down = build_ladder_tree_a0(&p, HalfPlane::Lower).unwrap();
    let edge_sum = up.edge_sum();
    let (maxwell, _) = maxwell_length(&up).unwrap();
    let cf = closed_form_length_a0(ALPHA, LAMBDA);
    let bound = 1e-6 + LAMBDA.powi(k as i32 - 1);
    let spread = [edge_sum, maxwell, cf]
        .iter()
        .flat_map(|a| [edge_sum, maxwell, cf].map(|b| (a - b).abs()))
        .fold(0.0, f64::max);
    let offset = (up.vertices[0].pos.y - ALPHA.sin() / (LAMBDA + 1.0)).abs();
    let defect = self_similarity_defect(&up, LAMBDA * LAMBDA, Point::ORIGIN);
    let mirror = trees_mirror_equal(&up, &down, Axis::BISECTOR, 1e-12);
    let indecomposable = !is_decomposable(&up);
    outcome(
        spread <= bound
            && offset < 1e-12
            && indecomposable
            && defect < 1e-6
            && mirror
            && (cf - 2.19368).abs() < APPROX_TOL,
        format!(
            "spread {spread:.1e} (bound {bound:.1e}), offset {offset:.1e}, defect {defect:.1e}, \
             indecomposable {indecomposable}, mirror {mirror}, closed form {cf:.6}"
        ),
    )
}

fn c6_dynamics() -> Outcome {
    let p = derive_params(ALPHA, LAMBDA, 0.0).unwrap();
    let inverse_err = (0..=1000)
        .map(|i| i as f64 / 1000.0)
        .filter(|&t| t != p.q_plus)
        .map(|t| {
            let r = t / 2.0 + 0.75;
            (inverse_map(&p, t).unwrap() - (r - r.floor())).abs()
        })
        .fold(0.0, f64::max);
    let pts = periodic_points(&p, 2).unwrap();
    let exact = pts == [1.0 / 6.0, 5.0 / 6.0];
    let depth = 12;
    let lp = LadderParams::new(ALPHA, LAMBDA, depth).unwrap();
    let orbit = periodic_orbit(&p, 5.0 / 6.0, 2, depth + 1).unwrap();
    let from_orbit = tree_from_orbit(&p, &orbit, depth).unwrap();
    let up = build_ladder_tree_a0(&lp, HalfPlane::Upper).unwrap();
    let down = build_ladder_tree_a0(&lp, HalfPlane::Lower).unwrap();
    let same = trees_match(&from_orbit, &up, 1e-8) && trees_mirror_equal(&from_orbit, &down, Axis::BISECTOR, 1e-8);
    let back = orbit_from_tree(&p, &from_orbit).unwrap();
    let trip = if back.values.len() == orbit.values.len() {
        back.values
            .iter()
            .zip(&orbit.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    outcome(
        inverse_err < 1e-15 && exact && same && trip < 1e-9,
        format!("inverse error {inverse_err:.1e}, period-2 {pts:?}, tree match {same}, round trip {trip:.1e}"),
    )
}

fn c7_maxwell() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let mut done = 0;
    let mut attempts = 0;
    let (mut worst_re, mut worst_im, mut worst_grad): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let topologies: Vec<_> = (4..=6).map(|n| enumerate_full_topologies(n).unwrap()).collect();
    while done < 200 && attempts < 1_000_000 {
        attempts += 1;
        let n = rng.gen_range(4..=6);
        let pts: Vec<Point> = (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        let topo = &topologies[n - 4][rng.gen_range(0..topologies[n - 4].len())];
        let Some(tree) = realize_full_topology(&pts, topo) else {
            continue;
        };
        let (re, im) = maxwell_length(&tree).unwrap();
        let len = tree.edge_sum();
        worst_re = worst_re.max((re - len).abs() / len);
        worst_im = worst_im.max(im.abs() / len);
        worst_grad = worst_grad.max(local_min_gradient(&tree));
        done += 1;
    }
    outcome(
        done == 200 && worst_re < 1e-10 && worst_im < 1e-9 && worst_grad < 1e-9,
        format!(
            "{done} trees from {attempts} draws, real {worst_re:.1e}, imaginary {worst_im:.1e}, gradient {worst_grad:.1e}, seed {}",
            seed()
        ),
    )
}

fn c8_region() -> Outcome {
    let grid = region_grid(100, 100);
    let cond = grid.iter().filter(|c| c.2).count();
    let bad = grid.iter().filter(|c| c.2 && !c.3).count();
    outcome(
        cond > 0 && bad == 0,
        format!("{cond} cells satisfy the hypothesis, {bad} counterexamples"),
    )
}

fn c9_tail() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut parts = Vec::new();
    for k in [10, 14, 18] {
        let t = |d| {
            build_ladder_tree_a0(&LadderParams::new(ALPHA, LAMBDA, d).unwrap(), HalfPlane::Upper)
                .unwrap()
                .edge_sum()
        };
        let (short, long) = (t(k), t(k + 2));
        let bound = LAMBDA.powi(k as i32 - 1) * long;
        let diff = (long - short).abs();
        worst_ratio = worst_ratio.max(diff / bound);
        parts.push(format!("K={k}: {diff:.2e} <= {bound:.2e}"));
    }
    outcome(worst_ratio <= 1.0, parts.join(", "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "topology counts", Duration::from_secs(5), c1_topology_counts),
        (2, "unit square", Duration::from_secs(1), c2_square),
        (3, "five-terminal block", Duration::from_secs(10), c3_block),
        (
            4,
            "nine-terminal multiplicity",
            Duration::from_secs(1800),
            c4_multiplicity,
        ),
        (5, "segment-closed tree", Duration::from_secs(5), c5_segment_closed),
        (6, "interval map", Duration::from_secs(5), c6_dynamics),
        (7, "Maxwell identity", Duration::from_secs(60), c7_maxwell),
        (8, "region predicates", Duration::from_secs(1), c8_region),
        (9, "truncation tail", Duration::from_secs(60), c9_tail),
    ];
    let mut unexpected = 0;
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let pass = o.passed && elapsed <= limit;
        let known = KNOWN_FAILURES.contains(&id);
        if !pass {
            failed += 1;
            if !known {
                unexpected += 1;
            }
        }
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "{tag} {id} {name}: {} [{:.3} s, limit {} s]",
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!(
        "{} of 9 criteria pass, {failed} fail ({unexpected} unexpected)",
        9 - failed
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
