//! Exact Euclidean Steiner trees by Melzak's construction.
//!
//! Every full topology of every subset of terminals is realised (both
//! orientations at each merge), and the cheapest union of full blocks is
//! found by a leaf-block recursion over subsets. That recursion ranges over
//! exactly the block decompositions, so the result is the exhaustive optimum.

use std::collections::HashSet;

use crate::analysis::trees_match;
use crate::error::{Error, Result};
use crate::geom::{diameter, equilateral_third, melzak_tau, Point, Side, SQRT3};
use crate::topology::{enumerate_full_topologies, Topology, MAX_ENUMERATED};
use crate::tree::{EmbeddedTree, Role, TerminalSet, Vertex};

/// Relative slack on the arc and segment tests; borderline means infeasible.
pub const ARC_TOL: f64 = 1e-12;
/// Co-optima closer than this fraction of the diameter are the same tree.
pub const DISTINCT_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SteinerSolution {
    pub best: EmbeddedTree,
    /// Every distinct tree within `tol` of the optimum, `best` first.
    pub co_optima: Vec<EmbeddedTree>,
    pub tol: f64,
}

impl SteinerSolution {
    pub fn length(&self) -> f64 {
        self.best.length
    }
}

#[derive(Clone, Copy)]
struct Cand {
    p: Point,
    left: u32,
    right: u32,
}

/// Rooted at terminal 0: each Steiner point with its two children.
struct Rooted {
    root_child: usize,
    children: Vec<[usize; 2]>,
    post: Vec<usize>,
}

fn root(topo: &Topology) -> Option<Rooted> {
    let n = topo.n_terminals;
    let adj = topo.adjacency();
    let total = adj.len();
    if adj[0].len() != 1 {
        return None;
    }
    let mut children = vec![[usize::MAX; 2]; total];
    let mut parent = vec![usize::MAX; total];
    let mut post = Vec::with_capacity(total);
    let mut stack = vec![(adj[0][0], 0usize, false)];
    while let Some((v, p, done)) = stack.pop() {
        if done {
            post.push(v);
            continue;
        }
        parent[v] = p;
        stack.push((v, p, true));
        if v >= n {
            let kids: Vec<usize> = adj[v].iter().copied().filter(|&w| w != p).collect();
            if kids.len() != 2 {
                return None;
            }
            children[v] = [kids[0].min(kids[1]), kids[0].max(kids[1])];
            for &k in &children[v] {
                stack.push((k, v, false));
            }
        } else if adj[v].len() != 1 {
            return None;
        }
    }
    if post.len() != total - 1 {
        return None;
    }
    Some(Rooted {
        root_child: adj[0][0],
        children,
        post,
    })
}

/// Realises `topo` on `terminals` when a non-degenerate realisation exists.
pub fn realize_full_topology(terminals: &[Point], topo: &Topology) -> Option<EmbeddedTree> {
    realize_bounded(terminals, topo, f64::INFINITY).map(|(_, t)| t)
}

fn realize_bounded(terminals: &[Point], topo: &Topology, bound: f64) -> Option<(f64, EmbeddedTree)> {
    let n = topo.n_terminals;
    if n < 2 || terminals.len() != n {
        return None;
    }
    if n == 2 {
        let t = segment_tree(terminals[0], terminals[1]);
        return (t.length <= bound).then_some((t.length, t));
    }
    let rooted = root(topo)?;
    let total = n + topo.n_steiner();
    let mut cands: Vec<Vec<Cand>> = vec![Vec::new(); total];
    for &v in &rooted.post {
        if v < n {
            cands[v] = vec![Cand {
                p: terminals[v],
                left: 0,
                right: 0,
            }];
            continue;
        }
        let [a, b] = rooted.children[v];
        let mut out = Vec::with_capacity(2 * cands[a].len() * cands[b].len());
        for (i, ca) in cands[a].iter().enumerate() {
            for (j, cb) in cands[b].iter().enumerate() {
                for side in [Side::Left, Side::Right] {
                    out.push(Cand {
                        p: equilateral_third(ca.p, cb.p, side),
                        left: i as u32,
                        right: j as u32,
                    });
                }
            }
        }
        cands[v] = out;
    }
    let t0 = terminals[0];
    let mut best: Option<(f64, Vec<Point>)> = None;
    let mut pos = vec![Point::ORIGIN; total];
    let mut stack: Vec<(usize, Point, usize)> = Vec::new();
    for (ci, c) in cands[rooted.root_child].iter().enumerate() {
        let melzak_len = t0.dist(c.p);
        if melzak_len > bound || best.as_ref().is_some_and(|b| melzak_len >= b.0) {
            continue;
        }
        stack.clear();
        stack.push((rooted.root_child, t0, ci));
        let mut ok = true;
        while let Some((v, parent_pos, ci)) = stack.pop() {
            let c = cands[v][ci];
            let [a, b] = rooted.children[v];
            let (pa, pb) = (cands[a][c.left as usize].p, cands[b][c.right as usize].p);
            match place(pa, pb, c.p, parent_pos) {
                Some(s) => {
                    pos[v] = s;
                    if a >= n {
                        stack.push((a, s, c.left as usize));
                    }
                    if b >= n {
                        stack.push((b, s, c.right as usize));
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            pos[..n].copy_from_slice(terminals);
            let len: f64 = topo.edges.iter().map(|&(a, b)| pos[a].dist(pos[b])).sum();
            if len <= bound && best.as_ref().is_none_or(|b| len < b.0) {
                best = Some((len, pos.clone()));
            }
        }
    }
    let (len, pos) = best?;
    let vertices = pos
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i < n {
                Vertex::terminal(p, format!("t{i}"))
            } else {
                Vertex::steiner(p)
            }
        })
        .collect();
    Some((len, EmbeddedTree::new(vertices, topo.edges.clone())))
}

// Steiner point merged into `e` from `p1`, `p2`, lying strictly inside the
// segment `parent -> e` and strictly on the arc of `p1 p2` away from `e`.
fn place(p1: Point, p2: Point, e: Point, parent: Point) -> Option<Point> {
    let chord = p1.dist(p2);
    if !(chord > 0.0) {
        return None;
    }
    let radius = chord / SQRT3;
    let slack = ARC_TOL * radius;
    let reach = parent.dist(e);
    let (tau, dir) = melzak_tau(p1, p2, e, parent);
    if !(tau > slack && tau < reach - slack) {
        return None;
    }
    let s = e + dir * tau;
    let side_e = (p2 - p1).cross(e - p1) / chord;
    let side_s = (p2 - p1).cross(s - p1) / chord;
    (side_e * side_s < 0.0 && side_s.abs() > slack).then_some(s)
}

fn segment_tree(a: Point, b: Point) -> EmbeddedTree {
    EmbeddedTree::new(vec![Vertex::terminal(a, "t0"), Vertex::terminal(b, "t1")], vec![(0, 1)])
}

/// Minimum spanning tree on the terminals alone.
pub fn minimum_spanning_tree(terminals: &TerminalSet) -> EmbeddedTree {
    let pts = terminals.points();
    let n = pts.len();
    let vertices: Vec<Vertex> = terminals
        .terminals
        .iter()
        .map(|t| Vertex::terminal(t.pos, t.label.clone()))
        .collect();
    if n == 0 {
        return EmbeddedTree::default();
    }
    let mut in_tree = vec![false; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    dist[0] = 0.0;
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .expect("vertex left");
        in_tree[v] = true;
        if v != 0 {
            edges.push((from[v], v));
        }
        for w in 0..n {
            let d = pts[v].dist(pts[w]);
            if !in_tree[w] && d < dist[w] {
                dist[w] = d;
                from[w] = v;
            }
        }
    }
    EmbeddedTree::new(vertices, edges)
}

/// Steiner length over spanning-tree length.
pub fn steiner_ratio(terminals: &TerminalSet) -> Result<f64> {
    let mst = minimum_spanning_tree(terminals);
    if !(mst.length > 0.0) {
        return Err(Error::Degenerate("terminals span no length".into()));
    }
    Ok(solve_exact(terminals, 1e-9)?.length() / mst.length)
}

/// A realised full block in local coordinates: edges refer to global terminal
/// indices below `n` and to this block's Steiner points as `n + i`.
#[derive(Clone, Debug)]
struct Block {
    length: f64,
    steiner: Vec<Point>,
    edges: Vec<(usize, usize)>,
    code: String,
}

/// Length, sort key, tree.
type Ranked = (f64, Vec<(usize, String)>, EmbeddedTree);

pub const MAX_TERMINALS: usize = MAX_ENUMERATED;

/// Exhaustive exact Steiner minimal tree with all co-optima within `tol`.
pub fn solve_exact(terminals: &TerminalSet, tol: f64) -> Result<SteinerSolution> {
    let pts = terminals.points();
    let n = pts.len();
    if !(2..=MAX_TERMINALS).contains(&n) {
        return Err(Error::Size {
            n,
            range: "2..=10 terminals",
        });
    }
    let diam = diameter(&pts);
    for i in 0..n {
        for j in i + 1..n {
            if pts[i].dist(pts[j]) <= 1e-12 * diam {
                return Err(Error::Degenerate(format!(
                    "terminals {} and {} coincide",
                    terminals.terminals[i].label, terminals.terminals[j].label
                )));
            }
        }
    }
    let tol = tol.max(0.0);
    let full = (1usize << n) - 1;
    let topologies: Vec<Vec<Topology>> = (0..=n)
        .map(|k| {
            if k >= 3 {
                enumerate_full_topologies(k).unwrap_or_default()
            } else {
                Vec::new()
            }
        })
        .collect();

    let mut options: Vec<Vec<Block>> = vec![Vec::new(); full + 1];
    let mut fst_min = vec![f64::INFINITY; full + 1];
    let mut best = vec![f64::INFINITY; full + 1];

    let mut masks: Vec<usize> = (1..=full).filter(|m| m.count_ones() >= 2).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for &mask in &masks {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let split = best_split(mask, &fst_min, &best).0;
        let found: Vec<Block> = if members.len() == 2 {
            vec![Block {
                length: pts[members[0]].dist(pts[members[1]]),
                steiner: Vec::new(),
                edges: vec![(members[0], members[1])],
                code: "0-1".into(),
            }]
        } else {
            let local: Vec<Point> = members.iter().map(|&i| pts[i]).collect();
            realize_all(&local, &members, n, &topologies[members.len()], split + tol)
        };
        fst_min[mask] = found.iter().map(|b| b.length).fold(f64::INFINITY, f64::min);
        best[mask] = fst_min[mask].min(split);
        let keep = best[mask] + tol;
        options[mask] = found.into_iter().filter(|b| b.length <= keep).collect();
    }

    let budget = best[full] + tol;
    let mut combos: Vec<Vec<(usize, usize)>> = Vec::new();
    collect(full, budget, &options, &fst_min, &best, &mut Vec::new(), &mut combos);
    let mut seen = HashSet::new();
    let mut trees: Vec<Ranked> = Vec::new();
    for mut combo in combos {
        combo.sort_unstable();
        if !seen.insert(combo.clone()) {
            continue;
        }
        let tree = assemble(terminals, &combo, &options);
        let key = combo.iter().map(|&(m, i)| (m, options[m][i].code.clone())).collect();
        trees.push((tree.length, key, tree));
    }
    trees.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut co_optima: Vec<EmbeddedTree> = Vec::new();
    for (_, _, t) in trees {
        if !co_optima.iter().any(|c| trees_match(c, &t, DISTINCT_TOL * diam)) {
            co_optima.push(t);
        }
    }
    let best_tree = co_optima
        .first()
        .cloned()
        .ok_or_else(|| Error::Degenerate("no tree found".into()))?;
    Ok(SteinerSolution {
        best: best_tree,
        co_optima,
        tol,
    })
}

// Cheapest way to write `mask` as a leaf block `b` glued at one terminal to
// a tree on the rest.
fn best_split(mask: usize, fst_min: &[f64], best: &[f64]) -> (f64, Option<(usize, usize)>) {
    let mut out = (f64::INFINITY, None);
    let mut b = (mask - 1) & mask;
    while b > 0 {
        if b.count_ones() >= 2 && fst_min[b].is_finite() {
            let others = mask & !b;
            let mut bits = b;
            while bits > 0 {
                let v = bits & bits.wrapping_neg();
                bits &= bits - 1;
                let rest = others | v;
                let total = fst_min[b] + best[rest];
                if total < out.0 {
                    out = (total, Some((b, rest)));
                }
            }
        }
        b = (b - 1) & mask;
    }
    out
}

fn collect(
    mask: usize,
    budget: f64,
    options: &[Vec<Block>],
    fst_min: &[f64],
    best: &[f64],
    prefix: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    for (i, o) in options[mask].iter().enumerate() {
        if o.length <= budget {
            let mut c = prefix.clone();
            c.push((mask, i));
            out.push(c);
        }
    }
    let mut b = (mask - 1) & mask;
    while b > 0 {
        if b.count_ones() >= 2 && fst_min[b].is_finite() {
            let others = mask & !b;
            let mut bits = b;
            while bits > 0 {
                let v = bits & bits.wrapping_neg();
                bits &= bits - 1;
                let rest = others | v;
                if fst_min[b] + best[rest] > budget {
                    continue;
                }
                for (i, o) in options[b].iter().enumerate() {
                    if o.length + best[rest] <= budget {
                        prefix.push((b, i));
                        collect(rest, budget - o.length, options, fst_min, best, prefix, out);
                        prefix.pop();
                    }
                }
            }
        }
        b = (b - 1) & mask;
    }
}

fn realize_all(local: &[Point], members: &[usize], n: usize, topologies: &[Topology], bound: f64) -> Vec<Block> {
    let job = |topo: &Topology| -> Option<Block> {
        let (length, tree) = realize_bounded(local, topo, bound)?;
        let k = members.len();
        let map = |v: usize| if v < k { members[v] } else { n + v - k };
        Some(Block {
            length,
            steiner: tree.vertices[k..].iter().map(|v| v.pos).collect(),
            edges: tree.edges.iter().map(|&(a, b)| (map(a), map(b))).collect(),
            code: topo.encode(),
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if topologies.len() >= 64 {
            return topologies.par_iter().filter_map(job).collect();
        }
    }
    topologies.iter().filter_map(job).collect()
}

fn assemble(terminals: &TerminalSet, combo: &[(usize, usize)], options: &[Vec<Block>]) -> EmbeddedTree {
    let n = terminals.len();
    let mut vertices: Vec<Vertex> = terminals
        .terminals
        .iter()
        .map(|t| Vertex::terminal(t.pos, t.label.clone()))
        .collect();
    let mut edges = Vec::new();
    for &(m, i) in combo {
        let block = &options[m][i];
        let off = vertices.len();
        vertices.extend(block.steiner.iter().map(|&p| Vertex::steiner(p)));
        let map = |v: usize| if v < n { v } else { off + v - n };
        edges.extend(block.edges.iter().map(|&(a, b)| (map(a), map(b))));
    }
    debug_assert!(vertices[..n].iter().all(|v| v.role == Role::Terminal));
    EmbeddedTree::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify, TreeClass};

    fn square() -> TerminalSet {
        TerminalSet::from_points(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
    }

    #[test]
    fn triangle_matches_fermat_point() {
        let pts = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.7, 1.5)];
        let topo = &enumerate_full_topologies(3).unwrap()[0];
        let t = realize_full_topology(&pts, topo).unwrap();
        let (f, _) = crate::geom::fermat_point(pts[0], pts[1], pts[2]).unwrap();
        assert!(t.vertices[3].pos.dist(f) < 1e-12);
    }

    #[test]
    fn obtuse_triangle_has_no_full_realisation() {
        let pts = [Point::new(-1.0, 0.0), Point::new(0.0, 0.1), Point::new(1.0, 0.0)];
        let topo = &enumerate_full_topologies(3).unwrap()[0];
        assert!(realize_full_topology(&pts, topo).is_none());
        let sol = solve_exact(&TerminalSet::from_points(&pts), 1e-9).unwrap();
        assert_eq!(sol.co_optima.len(), 1);
        assert_eq!(sol.best.edges.len(), 2);
    }

    #[test]
    fn square_two_co_optima() {
        let sol = solve_exact(&square(), 1e-9).unwrap();
        assert!((sol.length() - (1.0 + SQRT3)).abs() < 1e-12);
        assert_eq!(sol.co_optima.len(), 2);
        for t in &sol.co_optima {
            assert_eq!(classify(t), TreeClass::Full);
        }
    }

    #[test]
    fn crossing_topology_is_infeasible_on_square() {
        let pts = square().points();
        let feasible = enumerate_full_topologies(4)
            .unwrap()
            .iter()
            .filter(|t| realize_full_topology(&pts, t).is_some())
            .count();
        assert_eq!(feasible, 2);
    }

    #[test]
    fn two_terminals() {
        let sol = solve_exact(&TerminalSet::from_points(&[Point::ORIGIN, Point::new(3.0, 4.0)]), 0.0).unwrap();
        assert_eq!(sol.length(), 5.0);
    }

    #[test]
    fn rejects_bad_sizes_and_duplicates() {
        assert!(solve_exact(&TerminalSet::from_points(&[Point::ORIGIN]), 0.0).is_err());
        let dup = TerminalSet::from_points(&[Point::ORIGIN, Point::ORIGIN, Point::new(1.0, 0.0)]);
        assert!(matches!(solve_exact(&dup, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn mst_of_square() {
        assert!((minimum_spanning_tree(&square()).length - 3.0).abs() < 1e-15);
        let r = steiner_ratio(&square()).unwrap();
        assert!((r - (1.0 + SQRT3) / 3.0).abs() < 1e-12);
    }
}
