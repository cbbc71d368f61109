//! Browser bindings. Every export returns a JSON string; the `*_json`
//! functions carry the logic and are what the native tests call.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use steiner_ladder::analysis::{block_decompose, blockwise_maxwell_length, classify, TreeClass};
use steiner_ladder::dynamics::{derive_params, iterate, tree_from_orbit, Direction, OrbitStatus};
use steiner_ladder::ladder::{
    a1_blocks, build_ladder_tree_a0, build_ladder_tree_a1, closed_form_length_a0, closed_form_length_a1, HalfPlane,
    InputFamily, LadderParams, MirrorWord,
};
use steiner_ladder::melzak::{minimum_spanning_tree, solve_exact};
use steiner_ladder::svg::{render, SvgOptions};
use steiner_ladder::{EmbeddedTree, Point, Role, TerminalSet};

/// Largest click set the demo will solve; 8 points stay interactive.
pub const MAX_CLICKS: usize = 8;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn figure(tree: &EmbeddedTree, alpha: f64) -> String {
    render(
        tree,
        &SvgOptions {
            width: 720.0,
            sides: Some(alpha),
            shrink_toward: Some(Point::ORIGIN),
            ..Default::default()
        },
    )
}

fn class_name(t: &EmbeddedTree) -> &'static str {
    match classify(t) {
        TreeClass::Full => "full",
        TreeClass::FullStar => "full*",
        TreeClass::Neither => "neither",
    }
}

fn labels(t: &EmbeddedTree) -> Vec<String> {
    t.vertices
        .iter()
        .filter(|v| v.role == Role::Terminal)
        .filter_map(|v| v.label.clone())
        .collect()
}

/// Ladder tree for `family` ("A0" or "A1") with the angle in degrees.
/// `word` mirrors A1 blocks; `side` ("upper"/"lower") picks the A0 tree.
pub fn ladder_json(
    family: &str,
    alpha_deg: f64,
    lambda: f64,
    depth: u32,
    word: &str,
    side: &str,
) -> Result<String, String> {
    let family: InputFamily = family.parse().map_err(err)?;
    let alpha = alpha_deg.to_radians();
    let params = LadderParams::new(alpha, lambda, depth as usize).map_err(err)?;
    let (tree, closed) = match family {
        InputFamily::A0 => (
            build_ladder_tree_a0(&params, side.parse::<HalfPlane>().map_err(err)?).map_err(err)?,
            closed_form_length_a0(alpha, lambda),
        ),
        InputFamily::A1 => {
            let blocks = a1_blocks(params.depth);
            let mut bits: MirrorWord = word.parse().map_err(err)?;
            bits.0.resize(blocks, false);
            (
                build_ladder_tree_a1(&params, &bits).map_err(err)?,
                closed_form_length_a1(alpha, lambda),
            )
        }
    };
    let maxwell = blockwise_maxwell_length(&tree).map_err(err)?;
    Ok(json!({
        "svg": figure(&tree, alpha),
        "closed_form": closed,
        "maxwell": maxwell,
        "edge_sum": tree.edge_sum(),
        "class": class_name(&tree),
        "blocks": block_decompose(&tree).iter().map(labels).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Forward orbit from `t0` with the map's constants, for a cobweb plot, and
/// the tree the orbit traces when it survives long enough.
pub fn orbit_json(alpha_deg: f64, lambda: f64, beta_deg: f64, t0: f64, steps: u32) -> Result<String, String> {
    let alpha = alpha_deg.to_radians();
    let p = derive_params(alpha, lambda, beta_deg.to_radians()).map_err(err)?;
    let orbit = iterate(&p, t0, steps as usize, Direction::Forward);
    let status = match orbit.status {
        OrbitStatus::Ok => json!({"kind": "ok"}),
        OrbitStatus::Escaped(k) => json!({"kind": "escaped", "step": k}),
        OrbitStatus::HitForbidden(k) => json!({"kind": "forbidden", "step": k}),
    };
    let svg = if orbit.values.len() >= 2 {
        tree_from_orbit(&p, &orbit, orbit.values.len() - 1)
            .ok()
            .map(|t| figure(&t, alpha))
    } else {
        None
    };
    Ok(json!({
        "values": orbit.values,
        "status": status,
        "lambda": p.lambda,
        "t_star": p.t_star,
        "q_plus": p.q_plus,
        "q_minus": p.q_minus,
        "svg": svg,
    })
    .to_string())
}

/// Exact tree on clicked points, given as `[[x, y], ...]`.
pub fn solve_json(points: &str) -> Result<String, String> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(points).map_err(err)?;
    if raw.len() > MAX_CLICKS {
        return Err(format!("at most {MAX_CLICKS} points"));
    }
    if raw.len() < 2 {
        return Ok(json!({"length": 0.0, "mst": 0.0, "co_optima": 0, "vertices": [], "edges": []}).to_string());
    }
    let pts: Vec<Point> = raw.iter().map(|&[x, y]| Point::new(x, y)).collect();
    let ts = TerminalSet::from_points(&pts);
    let sol = solve_exact(&ts, 1e-9).map_err(err)?;
    let vertices: Vec<Value> = sol
        .best
        .vertices
        .iter()
        .map(|v| json!([v.pos.x, v.pos.y, v.role == Role::Steiner]))
        .collect();
    Ok(json!({
        "length": sol.length(),
        "mst": minimum_spanning_tree(&ts).edge_sum(),
        "co_optima": sol.co_optima.len(),
        "vertices": vertices,
        "edges": sol.best.edges,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn ladder(
    family: &str,
    alpha_deg: f64,
    lambda: f64,
    depth: u32,
    word: &str,
    side: &str,
) -> Result<String, JsValue> {
    ladder_json(family, alpha_deg, lambda, depth, word, side).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn orbit(alpha_deg: f64, lambda: f64, beta_deg: f64, t0: f64, steps: u32) -> Result<String, JsValue> {
    orbit_json(alpha_deg, lambda, beta_deg, t0, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve(points: &str) -> Result<String, JsValue> {
    solve_json(points).map_err(|e| JsValue::from_str(&e))
}
