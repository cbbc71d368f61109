//! The ladder inputs: terminals `A_k = lambda^(k-1) e^(i alpha)` and their
//! mirror images `B_k`, accumulating at the origin, optionally closed off by
//! the segment `[A_0 B_0]`; closed-form lengths and explicit trees.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify, point_to_tree_dist, Axis, TreeClass};
use crate::error::{Error, Result};
use crate::geom::{Point, SQRT3};
use crate::melzak::solve_exact;
use crate::tree::{EmbeddedTree, Role, Terminal, TerminalSet, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderParams {
    pub alpha: f64,
    pub lambda: f64,
    pub depth: usize,
}

impl LadderParams {
    pub fn new(alpha: f64, lambda: f64, depth: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= PI / 6.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "(0, pi/6]",
            });
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::OutOfRange {
                name: "lambda",
                value: lambda,
                range: "(0, 1)",
            });
        }
        if depth == 0 {
            return Err(Error::Size {
                n: 0,
                range: "depth >= 1",
            });
        }
        Ok(LadderParams { alpha, lambda, depth })
    }

    fn require_condition(&self) -> Result<()> {
        if condition_holds(self.alpha, self.lambda) {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!(
                "sqrt(lambda) < cos(pi/3 + alpha) / cos(pi/3 - alpha) fails at alpha = {}, lambda = {}",
                self.alpha, self.lambda
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputFamily {
    A1,
    A0,
}

impl FromStr for InputFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A1" | "a1" => Ok(InputFamily::A1),
            "A0" | "a0" => Ok(InputFamily::A0),
            _ => Err(Error::Parse(format!("unknown family {s:?}, expected A1 or A0"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: InputFamily,
    pub params: LadderParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl FromStr for HalfPlane {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" | "up" | "+" => Ok(HalfPlane::Upper),
            "lower" | "down" | "-" => Ok(HalfPlane::Lower),
            _ => Err(Error::Parse(format!("unknown side {s:?}, expected upper or lower"))),
        }
    }
}

/// One bit per block; a set bit mirrors that block in the bisector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorWord(pub Vec<bool>);

impl MirrorWord {
    pub fn zeros(n: usize) -> Self {
        MirrorWord(vec![false; n])
    }
}

impl FromStr for MirrorWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("mirror word {s:?} must be binary"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(MirrorWord)
    }
}

impl fmt::Display for MirrorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `sqrt(lambda) < cos(pi/3 + alpha) / cos(pi/3 - alpha)`.
pub fn condition_holds(alpha: f64, lambda: f64) -> bool {
    lambda > 0.0 && lambda.sqrt() < (PI / 3.0 + alpha).cos() / (PI / 3.0 - alpha).cos()
}

/// `cos(a)/l - sin(a)/(sqrt3 l) - cos(a) >= sqrt3 sin(a) / (1 - l)`: the first
/// horizontal edge of the segment-closed tree reaches the first parallelogram.
pub fn rhombus_condition(alpha: f64, lambda: f64) -> bool {
    let (s, c) = alpha.sin_cos();
    c / lambda - s / (SQRT3 * lambda) - c >= SQRT3 * s / (1.0 - lambda)
}

/// `(alpha, lambda, condition, rhombus)` on `alpha = i pi/(6 n_alpha)`,
/// `lambda = j/(2 n_lambda)` for `i, j >= 1`.
pub fn region_grid(n_alpha: usize, n_lambda: usize) -> Vec<(f64, f64, bool, bool)> {
    let mut out = Vec::with_capacity(n_alpha * n_lambda);
    for i in 1..=n_alpha {
        let alpha = PI / 6.0 * i as f64 / n_alpha as f64;
        for j in 1..=n_lambda {
            let lambda = 0.5 * j as f64 / n_lambda as f64;
            out.push((
                alpha,
                lambda,
                condition_holds(alpha, lambda),
                rhombus_condition(alpha, lambda),
            ));
        }
    }
    out
}

pub fn a_point(alpha: f64, lambda: f64, k: usize) -> Point {
    Point::polar(1.0, alpha) * lambda.powi(k as i32 - 1)
}

pub fn b_point(alpha: f64, lambda: f64, k: usize) -> Point {
    a_point(alpha, lambda, k).conj()
}

/// `|A_0 A_inf| = 1/lambda - tan(alpha) / (sqrt3 lambda)`.
pub fn a0_radius(alpha: f64, lambda: f64) -> f64 {
    (1.0 - alpha.tan() / SQRT3) / lambda
}

pub fn build_input(params: &LadderParams, family: InputFamily) -> Result<TerminalSet> {
    params.require_condition()?;
    let LadderParams { alpha, lambda, depth } = *params;
    let mut terminals = Vec::with_capacity(2 * depth + 3);
    let mut segment = None;
    if family == InputFamily::A0 {
        let a0 = Point::polar(a0_radius(alpha, lambda), alpha);
        terminals.push(Terminal {
            label: "A0".into(),
            pos: a0,
        });
        terminals.push(Terminal {
            label: "B0".into(),
            pos: a0.conj(),
        });
        segment = Some((0, 1));
    }
    for k in 1..=depth {
        terminals.push(Terminal {
            label: format!("A{k}"),
            pos: a_point(alpha, lambda, k),
        });
    }
    for k in 1..=depth {
        terminals.push(Terminal {
            label: format!("B{k}"),
            pos: b_point(alpha, lambda, k),
        });
    }
    terminals.push(Terminal {
        label: "Ainf".into(),
        pos: Point::ORIGIN,
    });
    let accumulation = Some(terminals.len() - 1);
    Ok(TerminalSet {
        terminals,
        accumulation,
        segment,
        family: Some(FamilySpec {
            family,
            params: *params,
        }),
    })
}

fn j_form(alpha: f64, a: f64, b: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let z =
        Complex64::new(c + SQRT3 * s, 0.0) + Complex64::from_polar(a, PI / 6.0) + Complex64::from_polar(b, -PI / 6.0);
    z.norm()
}

/// `|cos a + sqrt3 sin a + 2l/(1-l^2) e^(i pi/6) sin a + 2l^2/(1-l^2) e^(-i pi/6) sin a|`.
pub fn closed_form_length_a1(alpha: f64, lambda: f64) -> f64 {
    let s = alpha.sin();
    let d = 1.0 - lambda * lambda;
    j_form(alpha, 2.0 * lambda / d * s, 2.0 * lambda * lambda / d * s)
}

/// `cos a / l - sin a / (sqrt3 l) + sqrt3 sin a / (1 - l)`.
pub fn closed_form_length_a0(alpha: f64, lambda: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    c / lambda - s / (SQRT3 * lambda) + SQRT3 * s / (1.0 - lambda)
}

/// Length of the full* tree whose long edges hit `A_j` first for `j` in `jset`.
pub fn length_by_j(alpha: f64, lambda: f64, jset: &[usize], depth: usize) -> f64 {
    let s = alpha.sin();
    let (mut a, mut b) = (0.0, 0.0);
    for j in 1..=depth {
        let w = 2.0 * s * lambda.powi(j as i32);
        if jset.contains(&j) {
            a += w;
        } else {
            b += w;
        }
    }
    j_form(alpha, a, b)
}

/// The point where the tree meets `[A_0 B_0]`: `sin(alpha)/(1+lambda)` off
/// the bisector, on the side of the nearer endpoint.
pub fn x_point(alpha: f64, lambda: f64, side: HalfPlane) -> Point {
    let re = a0_radius(alpha, lambda) * alpha.cos();
    let im = alpha.sin() / (1.0 + lambda);
    match side {
        HalfPlane::Upper => Point::new(re, im),
        HalfPlane::Lower => Point::new(re, -im),
    }
}

pub fn homothety(tree: &EmbeddedTree, ratio: f64, center: Point) -> EmbeddedTree {
    tree.map_points(|p| center + (p - center) * ratio)
}

const SAMPLES_PER_EDGE: usize = 8;

/// One-sided Hausdorff distance from the scaled tree to the tree, edges sampled.
pub fn self_similarity_defect(tree: &EmbeddedTree, ratio: f64, center: Point) -> f64 {
    self_similarity_defect_beyond(tree, ratio, center, 0.0)
}

/// As `self_similarity_defect`, ignoring samples closer than `min_radius` to
/// the centre (the part a truncated tree cannot contain).
pub fn self_similarity_defect_beyond(tree: &EmbeddedTree, ratio: f64, center: Point, min_radius: f64) -> f64 {
    let scaled = homothety(tree, ratio, center);
    let mut worst: f64 = 0.0;
    for e in 0..scaled.edges.len() {
        let (a, b) = scaled.segment(e);
        for i in 0..=SAMPLES_PER_EDGE {
            let p = a.lerp(b, i as f64 / SAMPLES_PER_EDGE as f64);
            if p.dist(center) >= min_radius {
                worst = worst.max(point_to_tree_dist(tree, p));
            }
        }
    }
    worst
}

/// Radius inside which a depth-`K` segment-closed tree is incomplete.
pub fn truncation_radius(alpha: f64, lambda: f64, depth: usize) -> f64 {
    lambda.powi(depth as i32) * (alpha.cos() + alpha.sin() / SQRT3)
}

/// The exact tree on `{A1, A2, A3, B1, B2}`; it is full and unique.
pub fn ladder_block(alpha: f64, lambda: f64) -> Result<EmbeddedTree> {
    let labels = ["A1", "A2", "A3", "B1", "B2"];
    let pts = [
        a_point(alpha, lambda, 1),
        a_point(alpha, lambda, 2),
        a_point(alpha, lambda, 3),
        b_point(alpha, lambda, 1),
        b_point(alpha, lambda, 2),
    ];
    let ts = TerminalSet::new(
        labels
            .iter()
            .zip(pts)
            .map(|(l, pos)| Terminal {
                label: l.to_string(),
                pos,
            })
            .collect(),
    )?;
    let sol = solve_exact(&ts, 1e-9)?;
    if sol.co_optima.len() != 1 || classify(&sol.best) != TreeClass::Full {
        return Err(Error::Hypothesis(format!(
            "five-terminal block is not a unique full tree ({} co-optima)",
            sol.co_optima.len()
        )));
    }
    Ok(sol.best)
}

fn relabel(label: &str, shift: usize, mirror: bool) -> String {
    let (side, idx) = label.split_at(1);
    let k: usize = idx.parse().expect("ladder label");
    let side = match (side, mirror) {
        ("A", false) | ("B", true) => "A",
        _ => "B",
    };
    format!("{side}{}", k + shift)
}

/// Number of five-terminal blocks at depth `K`: `(K - 1) / 2`.
pub fn a1_blocks(depth: usize) -> usize {
    depth.saturating_sub(1) / 2
}

/// Union of homothetic copies of the five-terminal block, block `j` scaled by
/// `lambda^(2j)` and mirrored when bit `j` of the word is set.
pub fn build_ladder_tree_a1(params: &LadderParams, word: &MirrorWord) -> Result<EmbeddedTree> {
    params.require_condition()?;
    let blocks = a1_blocks(params.depth);
    if blocks == 0 {
        return Err(Error::Size {
            n: params.depth,
            range: "depth >= 3",
        });
    }
    if word.0.len() < blocks {
        return Err(Error::Parse(format!(
            "mirror word has {} bits, depth {} needs {blocks}",
            word.0.len(),
            params.depth
        )));
    }
    let block = ladder_block(params.alpha, params.lambda)?;
    let mut tree = EmbeddedTree::default();
    for j in 0..blocks {
        let mirror = word.0[j];
        let ratio = params.lambda.powi(2 * j as i32);
        let mut copy = homothety(&block, ratio, Point::ORIGIN);
        if mirror {
            copy = Axis::BISECTOR.mirror(&copy);
        }
        for v in copy.vertices.iter_mut() {
            if let Some(l) = &v.label {
                v.label = Some(relabel(l, 2 * j, mirror));
            }
        }
        tree = tree.union(&copy);
    }
    Ok(tree.glue_terminals())
}

/// The full tree for the segment-closed input, built rhombus by rhombus: a
/// horizontal edge at height `h` meets the side through the nearer terminal,
/// crosses to the other side and leaves at height `h -+ lambda^(k-1) sin a`.
/// After `K` rhombi the last horizontal edge stops on the next rhombus at a
/// vertex labelled `cut`.
pub fn build_ladder_tree_a0(params: &LadderParams, side: HalfPlane) -> Result<EmbeddedTree> {
    params.require_condition()?;
    if !rhombus_condition(params.alpha, params.lambda) {
        return Err(Error::Hypothesis(
            "first horizontal edge misses the first rhombus".into(),
        ));
    }
    let LadderParams { alpha, lambda, depth } = *params;
    let x = x_point(alpha, lambda, side);
    let mut vertices = vec![Vertex::terminal(x, "x")];
    let mut edges = Vec::new();
    let mut prev = 0;
    let up = Point::polar(1.0, PI / 3.0);
    let down = up.conj();
    for k in 1..=depth + 1 {
        let a = a_point(alpha, lambda, k);
        let b = a.conj();
        let ay = a.y;
        // the recurrence h -> h -+ ay loses all relative precision
        let h = x.y * (-lambda).powi(k as i32 - 1);
        if h == 0.0 || h.abs() >= ay {
            return Err(Error::Inadmissible(format!("height {h} at rhombus {k}")));
        }
        let (first, second, first_label, second_label, s, t);
        if h > 0.0 {
            first = a;
            second = b;
            first_label = format!("A{k}");
            second_label = format!("B{k}");
            s = a + down * (2.0 * (ay - h) / SQRT3);
            t = b - down * (2.0 * h / SQRT3);
        } else {
            first = b;
            second = a;
            first_label = format!("B{k}");
            second_label = format!("A{k}");
            s = b + up * (2.0 * (ay + h) / SQRT3);
            t = a - up * (2.0 * -h / SQRT3);
        }
        let si = vertices.len();
        if k == depth + 1 {
            vertices.push(Vertex::terminal(s, "cut"));
            edges.push((prev, si));
            break;
        }
        vertices.push(Vertex::steiner(s));
        vertices.push(Vertex::terminal(first, first_label));
        vertices.push(Vertex::steiner(t));
        vertices.push(Vertex::terminal(second, second_label));
        edges.extend([(prev, si), (si, si + 1), (si, si + 2), (si + 2, si + 3)]);
        prev = si + 2;
    }
    Ok(EmbeddedTree::new(vertices, edges))
}

/// Variant where `x` becomes a Steiner point joined at 120 degrees to new
/// terminals on the two sides of the angle. No minimality is claimed.
pub fn build_remark_tree(params: &LadderParams, side: HalfPlane) -> Result<(TerminalSet, EmbeddedTree)> {
    let base = build_ladder_tree_a0(params, side)?;
    let x = base.vertices[0].pos;
    let tan = params.alpha.tan();
    let hit = |dir: Point, sign: f64| {
        // x + t dir on the line y = sign tan(alpha) x
        let t = (sign * tan * x.x - x.y) / (dir.y - sign * tan * dir.x);
        x + dir * t
    };
    let a = hit(Point::polar(1.0, PI / 3.0), 1.0);
    let b = hit(Point::polar(1.0, -PI / 3.0), -1.0);
    let mut vertices = base.vertices.clone();
    vertices[0] = Vertex::steiner(x);
    let ia = vertices.len();
    vertices.push(Vertex::terminal(a, "A0'"));
    vertices.push(Vertex::terminal(b, "B0'"));
    let mut edges = base.edges.clone();
    edges.push((0, ia));
    edges.push((0, ia + 1));
    let tree = EmbeddedTree::new(vertices, edges);
    let terminals = crate::analysis::terminal_set_of(&tree);
    debug_assert!(tree.vertices.iter().filter(|v| v.role == Role::Terminal).count() == terminals.len());
    Ok((terminals, tree))
}
