//! Checks on embedded trees: Maxwell's length identity, directions,
//! classification, geometric validity and decomposition into full blocks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angle_at, convex_hull, diameter, hull_excess, point_segment_dist, reflect, Point, TWO_THIRDS_PI};
use crate::tree::{EmbeddedTree, Role, TerminalSet, Vertex};

pub const ANGLE_TOL: f64 = 1e-9;
pub const ROSE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeClass {
    Full,
    FullStar,
    Neither,
}

fn incident_dirs(tree: &EmbeddedTree, adj: &[Vec<usize>], v: usize) -> Vec<Point> {
    adj[v]
        .iter()
        .map(|&w| (tree.vertices[w].pos - tree.vertices[v].pos).unit())
        .collect()
}

fn is_tree(tree: &EmbeddedTree) -> bool {
    tree.edges.len() + 1 == tree.vertices.len() && tree.is_connected()
}

/// Full*: a tree whose edges meet at exactly 120 degrees wherever they meet.
/// Full additionally has no vertex of degree two and only leaf terminals.
pub fn classify(tree: &EmbeddedTree) -> TreeClass {
    if tree.vertices.is_empty() || !is_tree(tree) {
        return TreeClass::Neither;
    }
    let adj = tree.adjacency();
    let mut full = true;
    for v in 0..tree.vertices.len() {
        let d = adj[v].len();
        if d > 3 {
            return TreeClass::Neither;
        }
        let p = tree.vertices[v].pos;
        for i in 0..d {
            for j in i + 1..d {
                let a = angle_at(tree.vertices[adj[v][i]].pos, p, tree.vertices[adj[v][j]].pos);
                if (a - TWO_THIRDS_PI).abs() > ANGLE_TOL {
                    return TreeClass::Neither;
                }
            }
        }
        if d == 2 || (d > 1 && tree.vertices[v].role == Role::Terminal) {
            full = false;
        }
    }
    if full {
        TreeClass::Full
    } else {
        TreeClass::FullStar
    }
}

/// `sum conj(c_k) p_k` over vertices of degree one and two, where `c_k` is the
/// outward direction at a leaf and the missing tripod direction at a bend.
/// Returns the real part (the length) and the imaginary residual.
pub fn maxwell_length(tree: &EmbeddedTree) -> Result<(f64, f64)> {
    if classify(tree) == TreeClass::Neither {
        return Err(Error::NotFullStar("angles are not all 120 degrees".into()));
    }
    let adj = tree.adjacency();
    let (mut re, mut im) = (0.0, 0.0);
    for v in 0..tree.vertices.len() {
        let dirs = incident_dirs(tree, &adj, v);
        let c = match dirs.len() {
            1 => -dirs[0],
            2 => (-(dirs[0] + dirs[1])).unit(),
            _ => continue,
        };
        let p = tree.vertices[v].pos;
        re += c.dot(p);
        im += c.cross(p);
    }
    Ok((re, im))
}

/// Edge directions modulo pi, merged when closer than `ROSE_TOL`.
pub fn wind_rose(tree: &EmbeddedTree) -> Vec<f64> {
    let mut angles: Vec<f64> = (0..tree.edges.len())
        .map(|e| {
            let (a, b) = tree.segment(e);
            (b - a).arg().rem_euclid(PI)
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let mut rose: Vec<f64> = Vec::new();
    for a in angles {
        match rose.last() {
            Some(&last) if a - last <= ROSE_TOL => {}
            _ => rose.push(a),
        }
    }
    if rose.len() > 1 && rose[0] + PI - rose[rose.len() - 1] <= ROSE_TOL {
        rose.pop();
    }
    rose
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub connected: bool,
    pub acyclic: bool,
    /// Largest shortfall below 120 degrees between two edges at a vertex.
    pub max_angle_violation: f64,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub steiner_degree_three: bool,
    pub terminals_covered: bool,
    pub inside_hull: bool,
    pub wedges_checked: usize,
    pub wedge_violations: usize,
}

impl ValidityReport {
    pub fn passes(&self) -> bool {
        self.connected
            && self.acyclic
            && self.max_angle_violation <= ANGLE_TOL
            && self.steiner_degree_three
            && self.terminals_covered
            && self.inside_hull
            && self.wedge_violations == 0
    }
}

pub fn validate_steiner_geometry(tree: &EmbeddedTree, terminals: &TerminalSet) -> ValidityReport {
    let pts = terminals.points();
    let diam = diameter(&pts).max(tree.diameter()).max(f64::MIN_POSITIVE);
    let eps = 1e-9 * diam;
    let adj = tree.adjacency();
    let degrees = tree.degrees();

    let mut uf: Vec<usize> = (0..tree.vertices.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut acyclic = true;
    for &(a, b) in &tree.edges {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            acyclic = false;
        } else {
            uf[ra] = rb;
        }
    }

    let mut max_violation: f64 = 0.0;
    for v in 0..tree.vertices.len() {
        let p = tree.vertices[v].pos;
        for i in 0..adj[v].len() {
            for j in i + 1..adj[v].len() {
                let a = angle_at(tree.vertices[adj[v][i]].pos, p, tree.vertices[adj[v][j]].pos);
                max_violation = max_violation.max(TWO_THIRDS_PI - a);
            }
        }
    }

    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0) += 1;
    }
    let steiner_degree_three = tree
        .vertices
        .iter()
        .zip(&degrees)
        .all(|(v, &d)| v.role != Role::Steiner || d == 3);

    let mut covered = true;
    for (i, t) in terminals.terminals.iter().enumerate() {
        let skip = Some(i) == terminals.accumulation || terminals.segment.is_some_and(|(a, b)| i == a || i == b);
        if !skip && !tree.vertices.iter().any(|v| v.pos.dist(t.pos) <= eps) {
            covered = false;
        }
    }
    if let Some((a, b)) = terminals.segment {
        let (pa, pb) = (terminals.terminals[a].pos, terminals.terminals[b].pos);
        if !tree.vertices.iter().any(|v| point_segment_dist(v.pos, pa, pb) <= eps) {
            covered = false;
        }
    }

    let hull = convex_hull(&pts);
    let inside_hull = tree.vertices.iter().all(|v| hull_excess(&hull, v.pos) <= eps);

    let (checked, violations) = wedge_check(tree, &pts, diam);

    ValidityReport {
        connected: tree.is_connected(),
        acyclic,
        max_angle_violation: max_violation.max(0.0),
        degree_histogram: histogram,
        steiner_degree_three,
        terminals_covered: covered,
        inside_hull,
        wedges_checked: checked,
        wedge_violations: violations,
    }
}

// A minimal tree meets any closed 120 degree wedge free of terminals in a
// single segment or not at all. Apexes on a grid, twelve orientations each.
fn wedge_check(tree: &EmbeddedTree, terminals: &[Point], diam: f64) -> (usize, usize) {
    if terminals.is_empty() || tree.edges.is_empty() {
        return (0, 0);
    }
    const GRID: usize = 9;
    const TURNS: usize = 12;
    let (mut lo, mut hi) = (terminals[0], terminals[0]);
    for p in terminals {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let eps = 1e-9 * diam;
    let (mut checked, mut bad) = (0, 0);
    for gi in 0..GRID {
        for gj in 0..GRID {
            let apex = Point::new(
                lo.x + (hi.x - lo.x) * (gi as f64 + 0.5) / GRID as f64,
                lo.y + (hi.y - lo.y) * (gj as f64 + 0.5) / GRID as f64,
            );
            for k in 0..TURNS {
                let theta = 2.0 * PI * (k as f64 + 0.25) / TURNS as f64;
                let r1 = Point::polar(1.0, theta - PI / 3.0);
                let r2 = Point::polar(1.0, theta + PI / 3.0);
                // inside: left of r1 and right of r2, closed with slack
                let inside = |p: Point| r1.cross(p - apex) >= -eps && r2.cross(p - apex) <= eps;
                if terminals.iter().any(|&t| inside(t)) {
                    continue;
                }
                checked += 1;
                let mut pieces: Vec<(Point, Point)> = Vec::new();
                for e in 0..tree.edges.len() {
                    let (a, b) = tree.segment(e);
                    if let Some(piece) = clip_to_wedge(a, b, apex, r1, r2) {
                        if piece.0.dist(piece.1) > eps {
                            pieces.push(piece);
                        }
                    }
                }
                if !single_segment(&pieces, eps) {
                    bad += 1;
                }
            }
        }
    }
    (checked, bad)
}

fn clip_to_wedge(a: Point, b: Point, apex: Point, r1: Point, r2: Point) -> Option<(Point, Point)> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    // half-planes as g(p) >= 0
    let planes = [(r1, 1.0), (r2, -1.0)];
    for (r, s) in planes {
        let ga = s * r.cross(a - apex);
        let gb = s * r.cross(b - apex);
        if ga < 0.0 && gb < 0.0 {
            return None;
        }
        if ga < 0.0 {
            t0 = t0.max(ga / (ga - gb));
        } else if gb < 0.0 {
            t1 = t1.min(ga / (ga - gb));
        }
    }
    (t0 < t1).then(|| (a.lerp(b, t0), a.lerp(b, t1)))
}

fn single_segment(pieces: &[(Point, Point)], eps: f64) -> bool {
    if pieces.len() <= 1 {
        return true;
    }
    let (a, b) = pieces[0];
    let d = (b - a).unit();
    let on_line = |p: Point| d.cross(p - a).abs() <= eps;
    if !pieces.iter().all(|&(p, q)| on_line(p) && on_line(q)) {
        return false;
    }
    let mut spans: Vec<(f64, f64)> = pieces
        .iter()
        .map(|&(p, q)| {
            let (s, t) = ((p - a).dot(d), (q - a).dot(d));
            (s.min(t), s.max(t))
        })
        .collect();
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut end = spans[0].1;
    for &(s, t) in &spans[1..] {
        if s > end + eps {
            return false;
        }
        end = end.max(t);
    }
    true
}

/// Largest length of the resultant of unit edge directions at a Steiner point.
pub fn local_min_gradient(tree: &EmbeddedTree) -> f64 {
    let adj = tree.adjacency();
    (0..tree.vertices.len())
        .filter(|&v| tree.vertices[v].role == Role::Steiner)
        .map(|v| {
            incident_dirs(tree, &adj, v)
                .into_iter()
                .fold(Point::ORIGIN, |a, d| a + d)
                .norm()
        })
        .fold(0.0, f64::max)
}

/// True when some terminal has two or more edges.
pub fn is_decomposable(tree: &EmbeddedTree) -> bool {
    tree.degrees()
        .iter()
        .zip(&tree.vertices)
        .any(|(&d, v)| d >= 2 && v.role == Role::Terminal)
}

/// Splits at terminals of degree two or more; each block is a full tree.
pub fn block_decompose(tree: &EmbeddedTree) -> Vec<EmbeddedTree> {
    let m = tree.edges.len();
    let mut uf: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); tree.vertices.len()];
    for (e, &(a, b)) in tree.edges.iter().enumerate() {
        by_vertex[a].push(e);
        by_vertex[b].push(e);
    }
    for (v, es) in by_vertex.iter().enumerate() {
        if tree.vertices[v].role == Role::Steiner {
            for w in es.windows(2) {
                let (x, y) = (find(&mut uf, w[0]), find(&mut uf, w[1]));
                uf[x] = y;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..m {
        let r = find(&mut uf, e);
        groups.entry(r).or_default().push(e);
    }
    let mut blocks: Vec<(usize, EmbeddedTree)> = groups
        .into_values()
        .map(|es| {
            let mut index: BTreeMap<usize, usize> = BTreeMap::new();
            let mut vertices: Vec<Vertex> = Vec::new();
            let mut edges = Vec::new();
            for &e in &es {
                let (a, b) = tree.edges[e];
                let mut map = |v: usize| {
                    *index.entry(v).or_insert_with(|| {
                        vertices.push(tree.vertices[v].clone());
                        vertices.len() - 1
                    })
                };
                let (x, y) = (map(a), map(b));
                edges.push((x, y));
            }
            (es[0], EmbeddedTree::new(vertices, edges))
        })
        .collect();
    blocks.sort_by_key(|b| b.0);
    blocks.into_iter().map(|b| b.1).collect()
}

/// Maxwell length summed over the full blocks, for trees that are
/// full* only piecewise.
pub fn blockwise_maxwell_length(tree: &EmbeddedTree) -> Result<f64> {
    if classify(tree) != TreeClass::Neither {
        return maxwell_length(tree).map(|(re, _)| re);
    }
    block_decompose(tree)
        .iter()
        .map(|b| maxwell_length(b).map(|(re, _)| re))
        .sum()
}

/// Vertex-wise agreement within `tol` (roles must agree) with matching edges.
pub fn trees_match(t1: &EmbeddedTree, t2: &EmbeddedTree, tol: f64) -> bool {
    let n = t1.vertices.len();
    if n != t2.vertices.len() || t1.edges.len() != t2.edges.len() {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in 0..n {
        let p = t1.vertices[i].pos;
        let best = (0..n)
            .filter(|&j| !used[j] && t2.vertices[j].role == t1.vertices[i].role)
            .map(|j| (t2.vertices[j].pos.dist(p), j))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((d, j)) if d <= tol => {
                map[i] = j;
                used[j] = true;
            }
            _ => return false,
        }
    }
    let mut e2: Vec<(usize, usize)> = t2.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut e1: Vec<(usize, usize)> = t1
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (map[a], map[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    e1.sort_unstable();
    e2.sort_unstable();
    e1 == e2
}

/// Line through `point` with direction `dir`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub point: Point,
    pub dir: Point,
}

impl Axis {
    /// The positive real axis, the bisector of the ladder inputs.
    pub const BISECTOR: Axis = Axis {
        point: Point::ORIGIN,
        dir: Point { x: 1.0, y: 0.0 },
    };

    pub fn mirror(&self, tree: &EmbeddedTree) -> EmbeddedTree {
        tree.map_points(|p| reflect(p, self.point, self.dir))
    }
}

/// `t2` is the mirror image of `t1` in `axis`.
pub fn trees_mirror_equal(t1: &EmbeddedTree, t2: &EmbeddedTree, axis: Axis, tol: f64) -> bool {
    trees_match(&axis.mirror(t1), t2, tol)
}

/// Distance from `p` to the nearest point of the tree.
pub fn point_to_tree_dist(tree: &EmbeddedTree, p: Point) -> f64 {
    (0..tree.edges.len())
        .map(|e| {
            let (a, b) = tree.segment(e);
            point_segment_dist(p, a, b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Terminal vertices of a tree, as a terminal set.
pub fn terminal_set_of(tree: &EmbeddedTree) -> TerminalSet {
    let points: Vec<crate::tree::Terminal> = tree
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.role == Role::Terminal)
        .map(|(i, v)| crate::tree::Terminal {
            label: v.label.clone().unwrap_or_else(|| format!("v{i}")),
            pos: v.pos,
        })
        .collect();
    TerminalSet {
        terminals: points,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::SQRT3;

    fn tripod() -> EmbeddedTree {
        let vs = vec![
            Vertex::terminal(Point::polar(1.0, PI / 2.0), "a"),
            Vertex::terminal(Point::polar(1.0, PI / 2.0 + TWO_THIRDS_PI), "b"),
            Vertex::terminal(Point::polar(1.0, PI / 2.0 - TWO_THIRDS_PI), "c"),
            Vertex::steiner(Point::ORIGIN),
        ];
        EmbeddedTree::new(vs, vec![(0, 3), (1, 3), (2, 3)])
    }

    #[test]
    fn tripod_is_full_and_maxwell_exact() {
        let t = tripod();
        assert_eq!(classify(&t), TreeClass::Full);
        let (re, im) = maxwell_length(&t).unwrap();
        assert!((re - 3.0).abs() < 1e-14 && im.abs() < 1e-14);
        assert_eq!(wind_rose(&t).len(), 3);
        assert!(local_min_gradient(&t) < 1e-15);
    }

    #[test]
    fn bend_at_terminal_is_full_star() {
        // two tripod legs meeting at a terminal of degree two
        let vs = vec![
            Vertex::terminal(Point::new(1.0, 0.0), "a"),
            Vertex::terminal(Point::ORIGIN, "m"),
            Vertex::terminal(Point::new(-0.5, SQRT3 / 2.0), "b"),
        ];
        let t = EmbeddedTree::new(vs, vec![(0, 1), (1, 2)]);
        assert_eq!(classify(&t), TreeClass::FullStar);
        let (re, im) = maxwell_length(&t).unwrap();
        assert!((re - 2.0).abs() < 1e-14 && im.abs() < 1e-14);
        assert!(is_decomposable(&t));
        assert_eq!(block_decompose(&t).len(), 2);
    }

    #[test]
    fn straight_path_is_neither() {
        let vs = vec![
            Vertex::terminal(Point::new(-1.0, 0.0), "a"),
            Vertex::terminal(Point::ORIGIN, "m"),
            Vertex::terminal(Point::new(1.0, 0.0), "b"),
        ];
        let t = EmbeddedTree::new(vs, vec![(0, 1), (1, 2)]);
        assert_eq!(classify(&t), TreeClass::Neither);
        assert!(maxwell_length(&t).is_err());
        assert_eq!(wind_rose(&t).len(), 1);
    }

    #[test]
    fn validation_of_tripod() {
        let t = tripod();
        let ts = terminal_set_of(&t);
        let r = validate_steiner_geometry(&t, &ts);
        assert!(r.passes(), "{r:?}");
        assert!(r.wedges_checked > 0);
        assert_eq!(r.degree_histogram.get(&1), Some(&3));
    }

    #[test]
    fn wedge_check_flags_bad_tree() {
        // a tree through a far Steiner point: long detour
        let vs = vec![
            Vertex::terminal(Point::new(0.0, 0.0), "a"),
            Vertex::terminal(Point::new(1.0, 0.0), "b"),
            Vertex::terminal(Point::new(0.5, 0.1), "c"),
            Vertex::steiner(Point::new(0.5, -3.0)),
        ];
        let t = EmbeddedTree::new(vs, vec![(0, 3), (1, 3), (2, 3)]);
        let r = validate_steiner_geometry(&t, &terminal_set_of(&t));
        assert!(!r.passes());
    }

    #[test]
    fn mirror_and_match() {
        let t = tripod();
        let axis = Axis {
            point: Point::ORIGIN,
            dir: Point::new(0.0, 1.0),
        };
        assert!(trees_mirror_equal(&t, &t, axis, 1e-12));
        assert!(!trees_mirror_equal(&t, &t, Axis::BISECTOR, 1e-12));
        assert!(trees_match(&t, &t, 0.0));
    }
}
