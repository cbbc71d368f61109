use std::f64::consts::PI;

use proptest::prelude::*;

use steiner_ladder::analysis::{
    block_decompose, classify, is_decomposable, local_min_gradient, maxwell_length, validate_steiner_geometry,
    wind_rose, TreeClass,
};
use steiner_ladder::dynamics::{
    derive_params, forward_map, inverse_map, iterate, orbit_from_tree, tree_from_orbit, Direction,
};
use steiner_ladder::geom::{angle_at, equilateral_third, fermat_point, FermatKind, HexFrame, Side};
use steiner_ladder::io::{fmt17, instance_from_json, instance_to_json, parse_f64, tree_from_json, tree_to_json};
use steiner_ladder::ladder::{
    a1_blocks, rhombus_condition, build_ladder_tree_a0, build_ladder_tree_a1, condition_holds, HalfPlane,
    LadderParams, MirrorWord,
};
use steiner_ladder::melzak::{minimum_spanning_tree, realize_full_topology, solve_exact};
use steiner_ladder::svg::{render, SvgOptions};
use steiner_ladder::topology::{count_full_topologies, enumerate_block_decompositions, enumerate_full_topologies};
use steiner_ladder::{Point, Role, TerminalSet};

fn point() -> impl Strategy<Value = Point> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point::new(x, y))
}

/// Points at least `sep` apart.
fn spread_points(n: std::ops::RangeInclusive<usize>, sep: f64) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), n).prop_filter("points too close", move |v| {
        v.iter()
            .enumerate()
            .all(|(i, p)| v[..i].iter().all(|q| p.dist(*q) > sep))
    })
}

/// Admissible `(alpha, lambda)`.
fn ladder_params() -> impl Strategy<Value = (f64, f64)> {
    (0.01..PI / 6.0, 0.01..0.5f64).prop_filter("hypothesis fails", |&(a, l)| condition_holds(a, l))
}

proptest! {
    #[test]
    fn equilateral_third_is_equidistant(a in point(), b in point(), left in any::<bool>()) {
        prop_assume!(a.dist(b) > 1e-6);
        let side = if left { Side::Left } else { Side::Right };
        let e = equilateral_third(a, b, side);
        let d = a.dist(b);
        prop_assert!((e.dist(a) - d).abs() <= 1e-12 * d.max(1.0));
        prop_assert!((e.dist(b) - d).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn interior_fermat_point_has_equal_angles(pts in spread_points(3..=3, 0.1)) {
        let (f, kind) = fermat_point(pts[0], pts[1], pts[2]).unwrap();
        if kind == FermatKind::Interior {
            for i in 0..3 {
                let ang = angle_at(pts[i], f, pts[(i + 1) % 3]);
                prop_assert!((ang - 2.0 * PI / 3.0).abs() < 1e-9, "{}", ang);
            }
        }
    }

    #[test]
    fn hex_round_trip(pts in prop::collection::vec(point(), 1000..=1000), theta in -PI..PI, o in point()) {
        let frame = HexFrame::new(o, theta);
        for p in pts {
            prop_assert!(frame.from_hex(frame.to_hex(p)).dist(p) < 1e-10);
        }
    }

    #[test]
    fn realized_trees_satisfy_angle_and_maxwell(pts in spread_points(4..=6, 0.05), pick in any::<prop::sample::Index>()) {
        let topos = enumerate_full_topologies(pts.len()).unwrap();
        let topo = pick.get(&topos);
        if let Some(tree) = realize_full_topology(&pts, topo) {
            let adj = tree.adjacency();
            for (v, vert) in tree.vertices.iter().enumerate() {
                if vert.role == Role::Steiner {
                    let n = &adj[v];
                    prop_assert_eq!(n.len(), 3);
                    for i in 0..3 {
                        let p = tree.vertices[v].pos;
                        let ang = angle_at(tree.vertices[n[i]].pos, p, tree.vertices[n[(i + 1) % 3]].pos);
                        prop_assert!((ang - 2.0 * PI / 3.0).abs() < 1e-9);
                    }
                }
            }
            let (re, im) = maxwell_length(&tree).unwrap();
            let len = tree.edge_sum();
            prop_assert!((re - len).abs() <= 1e-10 * len);
            prop_assert!(im.abs() <= 1e-9 * len);
        }
    }

    #[test]
    fn solve_is_rigid_and_scales(
        pts in spread_points(3..=6, 0.1),
        theta in -PI..PI,
        shift in point(),
        scale in 0.1..10.0f64,
    ) {
        let base = solve_exact(&TerminalSet::from_points(&pts), 1e-9).unwrap().length();
        let moved: Vec<Point> = pts.iter().map(|p| p.rotate(theta) + shift).collect();
        let moved = solve_exact(&TerminalSet::from_points(&moved), 1e-9).unwrap().length();
        prop_assert!((moved - base).abs() <= 1e-9 * base);
        let scaled: Vec<Point> = pts.iter().map(|&p| p * scale).collect();
        let scaled = solve_exact(&TerminalSet::from_points(&scaled), 1e-9).unwrap().length();
        prop_assert!((scaled - scale * base).abs() <= 1e-9 * scale * base);
    }

    #[test]
    fn solution_is_valid_and_beats_mst(pts in spread_points(2..=6, 0.1)) {
        let ts = TerminalSet::from_points(&pts);
        let sol = solve_exact(&ts, 1e-9).unwrap();
        let mst = minimum_spanning_tree(&ts).edge_sum();
        prop_assert!(sol.length() <= mst * (1.0 + 1e-12));
        prop_assert!(sol.length() >= mst * 3f64.sqrt() / 2.0 * (1.0 - 1e-12));
        let report = validate_steiner_geometry(&sol.best, &ts);
        prop_assert!(report.passes(), "{:?}", report);
        let blocks = block_decompose(&sol.best);
        let sum: f64 = blocks.iter().map(|b| b.edge_sum()).sum();
        prop_assert!((sum - sol.best.edge_sum()).abs() <= 1e-12 * sum.max(1e-300));
        for b in &blocks {
            prop_assert!(local_min_gradient(b) < 1e-9);
        }
    }

    #[test]
    fn four_terminal_solutions_are_local_minima(pts in spread_points(4..=4, 0.1)) {
        let sol = solve_exact(&TerminalSet::from_points(&pts), 1e-9).unwrap();
        prop_assert!(local_min_gradient(&sol.best) < 1e-9);
        if classify(&sol.best) == TreeClass::Full {
            prop_assert!(!is_decomposable(&sol.best));
        }
    }

    #[test]
    fn rhombus_condition_follows_from_hypothesis((a, l) in ladder_params()) {
        prop_assert!(rhombus_condition(a, l));
    }

    #[test]
    fn a0_tree_structure((a, l) in ladder_params(), depth in 2usize..14, lower in any::<bool>()) {
        let side = if lower { HalfPlane::Lower } else { HalfPlane::Upper };
        let t = build_ladder_tree_a0(&LadderParams::new(a, l, depth).unwrap(), side).unwrap();
        let rose = wind_rose(&t);
        prop_assert_eq!(rose.len(), 3);
        prop_assert!(rose.iter().any(|r| r.abs() < 1e-9 || (r - PI).abs() < 1e-9));
        let (re, _) = maxwell_length(&t).unwrap();
        prop_assert!((re - t.edge_sum()).abs() <= 1e-10 * t.edge_sum());
        // horizontal edges alternate between the half planes
        let mut heights: Vec<(f64, f64)> = (0..t.edges.len())
            .map(|e| t.segment(e))
            .filter(|(p, q)| (p.y - q.y).abs() < 1e-12 * p.dist(*q).max(1e-300))
            .map(|(p, q)| (p.x.max(q.x), p.y))
            .collect();
        heights.sort_by(|x, y| y.0.total_cmp(&x.0));
        prop_assert_eq!(heights.len(), depth + 1);
        for w in heights.windows(2) {
            prop_assert!(w[0].1 * w[1].1 < 0.0);
        }
    }

    #[test]
    fn a1_blocks_share_one_terminal(bits in prop::collection::vec(any::<bool>(), 4)) {
        let p = LadderParams::new(PI / 36.0, 0.5, 9).unwrap();
        let t = build_ladder_tree_a1(&p, &MirrorWord(bits)).unwrap();
        let blocks = block_decompose(&t);
        prop_assert_eq!(blocks.len(), a1_blocks(9));
        let term = |b: &steiner_ladder::EmbeddedTree| -> Vec<String> {
            b.vertices.iter().filter(|v| v.role == Role::Terminal).filter_map(|v| v.label.clone()).collect()
        };
        for b in &blocks {
            prop_assert_eq!(wind_rose(b).len(), 3);
            prop_assert_eq!(term(b).len(), 5);
            let (re, _) = maxwell_length(b).unwrap();
            prop_assert!((re - b.edge_sum()).abs() <= 1e-10 * b.edge_sum());
        }
        let deg = t.degrees();
        for w in blocks.windows(2) {
            let next = term(&w[1]);
            let shared: Vec<String> = term(&w[0]).into_iter().filter(|l| next.contains(l)).collect();
            prop_assert_eq!(shared.len(), 1);
            let v = t.vertices.iter().position(|v| v.label.as_deref() == Some(shared[0].as_str())).unwrap();
            prop_assert_eq!(deg[v], 2);
        }
    }

    #[test]
    fn inverse_is_a_right_inverse_and_contracts((a, l) in ladder_params(), frac in -1.0..1.0f64, s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let p = derive_params(a, l, frac * a).unwrap();
        for x in [s, t] {
            if (x - p.q_plus).abs() > 1e-9 {
                let y = inverse_map(&p, x).unwrap();
                prop_assert!((forward_map(&p, y).unwrap() - x).abs() < 1e-12);
                // normal form {lambda x + t2}
                let r = l * x + p.t2;
                prop_assert!((y - (r - r.floor())).abs() < 1e-15);
            }
        }
        let (fs, ft) = (inverse_map(&p, s).unwrap(), inverse_map(&p, t).unwrap());
        let same_branch = (l * s + p.t2).floor() == (l * t + p.t2).floor();
        if same_branch {
            prop_assert!((fs - ft).abs() <= l * (s - t).abs() + 1e-15);
        }
    }

    #[test]
    fn orbit_tree_round_trip((a, l) in ladder_params(), frac in -1.0..1.0f64, start in 0.0..1.0f64) {
        let p = derive_params(a, l, frac * a).unwrap();
        // backward orbits always exist; reversed they are forward orbits
        let back = iterate(&p, start, 8, Direction::Inverse);
        prop_assume!(back.values.len() == 8);
        let mut values = back.values.clone();
        values.reverse();
        prop_assume!(values.iter().all(|v| (v - p.t_star).abs() > 1e-6 && *v > 1e-6 && *v < 1.0 - 1e-6));
        let orbit = steiner_ladder::dynamics::Orbit { values, status: steiner_ladder::dynamics::OrbitStatus::Ok };
        let tree = match tree_from_orbit(&p, &orbit, 7) {
            Ok(t) => t,
            Err(_) => return Ok(()),
        };
        let again = orbit_from_tree(&p, &tree).unwrap();
        prop_assert_eq!(again.values.len(), 8);
        for (x, y) in again.values.iter().zip(&orbit.values) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(parse_f64(&fmt17(x)).unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn instance_and_tree_files_round_trip(pts in spread_points(2..=6, 1e-9)) {
        let ts = TerminalSet::from_points(&pts);
        let back = instance_from_json(&instance_to_json(&ts)).unwrap();
        prop_assert_eq!(&back, &ts);
        let tree = minimum_spanning_tree(&ts);
        let (again, _) = tree_from_json(&tree_to_json(&tree, None)).unwrap();
        prop_assert_eq!(&again, &tree);
        let opts = SvgOptions::default();
        prop_assert_eq!(render(&tree, &opts), render(&again, &opts));
    }
}

#[test]
fn topology_invariants() {
    for n in 3..=7 {
        let all = enumerate_full_topologies(n).unwrap();
        assert_eq!(all.len() as u128, count_full_topologies(n).unwrap());
        for t in &all {
            assert!(t.is_full());
            assert_eq!(t.edges.len(), 2 * n - 3);
        }
    }
    for n in 3..=6 {
        for d in enumerate_block_decompositions(n, 2).unwrap() {
            // union-find over the blocks
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] == x {
                    x
                } else {
                    let r = find(p, p[x]);
                    p[x] = r;
                    r
                }
            }
            for &b in &d.blocks {
                let m: Vec<usize> = (0..n).filter(|i| b >> i & 1 == 1).collect();
                for w in m.windows(2) {
                    let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    parent[x] = y;
                }
            }
            let root = find(&mut parent, 0);
            assert!((0..n).all(|i| find(&mut parent, i) == root));
        }
    }
}
