//! The piecewise-linear interval map that carries the height of one long
//! edge to the next, and the translation between orbits and trees.
//!
//! Heights are normalised per parallelogram: `nu = 0` is the line through
//! `B_k`, `nu = 1` the line through `A_k`, and `nu = t*` the line through
//! the outer vertex `U_k`, which would split the tree.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analysis::wind_rose;
use crate::error::{Error, Result};
use crate::geom::{HexFrame, Point, SQRT3};
use crate::ladder::{a0_radius, a_point, ladder_block};
use crate::tree::{EmbeddedTree, Vertex};

/// Distance to `t*` or `q+` below which a point counts as forbidden.
pub const FORBIDDEN_TOL: f64 = 1e-12;
/// Slack when snapping to the ends of `[0, 1]`.
pub const END_TOL: f64 = 1e-12;
pub const MAX_PERIOD: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DynamicsParams {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
    /// Half side lengths of the first parallelogram along `e3` and `e2`.
    pub a: f64,
    pub b: f64,
    /// Offset of the parallelogram centre from the line through `A_inf`.
    pub delta: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub t1: f64,
    pub t_star: f64,
    pub t2: f64,
    #[serde(skip)]
    pub frame: HexFrame,
}

/// Parallelogram `A_1 V_1 B_1 U_1` with sides along the frame turned by
/// `beta`, and the interval map it induces.
pub fn derive_params(alpha: f64, lambda: f64, beta: f64) -> Result<DynamicsParams> {
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
    if !(beta.abs() <= alpha) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "[-alpha, alpha]",
        });
    }
    let frame = HexFrame::from_e1(Point::ORIGIN, Point::polar(1.0, beta));
    let [_, e2, e3] = frame.e;
    let a1 = a_point(alpha, lambda, 1);
    let b1 = a1.conj();
    let centre = (a1 + b1) / 2.0;
    let d = a1 - b1;
    // d = 2b e2 - 2a e3
    let den = 2.0 * e3.cross(e2);
    let b = e3.cross(d) / den;
    let a = e2.cross(d) / den;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Degenerate("parallelogram collapses".into()));
    }
    let delta = frame.level(centre);
    let q = 0.5 + ((1.0 - lambda) * delta - a) / (lambda * (a + b));
    let q_plus = q + 0.5 / lambda;
    let q_minus = q - 0.5 / lambda;
    Ok(DynamicsParams {
        alpha,
        lambda,
        beta,
        a,
        b,
        delta,
        q_plus,
        q_minus,
        t1: lambda * (1.0 - q_plus),
        t_star: a / (a + b),
        t2: -lambda * q_minus,
        frame,
    })
}

impl DynamicsParams {
    /// Normalised height of a line parallel to `e1` at parallelogram level `k`.
    pub fn nu_of_level(&self, level: f64, k: usize) -> f64 {
        0.5 + (level / self.lambda.powi(k as i32) - self.delta) / (self.a + self.b)
    }

    pub fn level_of_nu(&self, nu: f64, k: usize) -> f64 {
        self.lambda.powi(k as i32) * ((self.a + self.b) * (nu - 0.5) + self.delta)
    }
}

fn snap(t: f64) -> f64 {
    if t.abs() <= END_TOL {
        0.0
    } else if (t - 1.0).abs() <= END_TOL {
        1.0
    } else {
        t
    }
}

pub fn forward_map(p: &DynamicsParams, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Escaped(t));
    }
    if (t - p.t_star).abs() <= FORBIDDEN_TOL {
        return Err(Error::Forbidden(t));
    }
    let q = if t < p.t_star { p.q_plus } else { p.q_minus };
    let r = snap(t / p.lambda + q);
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(Error::Escaped(r))
    }
}

/// `{lambda t + t2}`, the branch of the inverse that stays in `[0, 1)`.
pub fn inverse_map(p: &DynamicsParams, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Escaped(t));
    }
    if (t - p.q_plus).abs() <= FORBIDDEN_TOL {
        return Err(Error::Forbidden(t));
    }
    let r = p.lambda * t + p.t2;
    Ok(r - r.floor())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "step")]
pub enum OrbitStatus {
    Ok,
    HitForbidden(usize),
    Escaped(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub values: Vec<f64>,
    pub status: OrbitStatus,
}

/// Up to `n` values starting with `t0`.
pub fn iterate(p: &DynamicsParams, t0: f64, n: usize, dir: Direction) -> Orbit {
    let mut values = Vec::with_capacity(n);
    if n == 0 {
        return Orbit {
            values,
            status: OrbitStatus::Ok,
        };
    }
    if !(0.0..=1.0).contains(&t0) {
        return Orbit {
            values,
            status: OrbitStatus::Escaped(0),
        };
    }
    values.push(t0);
    while values.len() < n {
        let t = *values.last().expect("non-empty");
        let next = match dir {
            Direction::Forward => forward_map(p, t),
            Direction::Inverse => inverse_map(p, t),
        };
        match next {
            Ok(v) => values.push(v),
            Err(Error::Forbidden(_)) => {
                let step = values.len();
                return Orbit {
                    values,
                    status: OrbitStatus::HitForbidden(step),
                };
            }
            Err(_) => {
                let step = values.len();
                return Orbit {
                    values,
                    status: OrbitStatus::Escaped(step),
                };
            }
        }
    }
    Orbit {
        values,
        status: OrbitStatus::Ok,
    }
}

/// Points with `g^p(t) = t`, found branch word by branch word through the
/// contracting inverse. Sorted, without duplicates.
pub fn periodic_points(p: &DynamicsParams, period: usize) -> Result<Vec<f64>> {
    if !(1..=MAX_PERIOD).contains(&period) {
        return Err(Error::Size {
            n: period,
            range: "1..=12",
        });
    }
    let lp = p.lambda.powi(period as i32);
    let mut out: Vec<f64> = Vec::new();
    for word in 0u32..(1 << period) {
        let mut c = 0.0;
        for i in 0..period {
            let m = (word >> i & 1) as f64;
            c = p.lambda * c + (p.t2 - m);
        }
        let t = c / (1.0 - lp);
        if !(0.0..1.0).contains(&t) {
            continue;
        }
        // the word has to be the one the inverse actually follows
        let mut s = t;
        let mut ok = true;
        for i in 0..period {
            let r = p.lambda * s + p.t2;
            if (s - p.q_plus).abs() <= FORBIDDEN_TOL || r.floor() != (word >> i & 1) as f64 {
                ok = false;
                break;
            }
            s = r - r.floor();
        }
        if ok && (s - t).abs() <= 1e-9 && !out.iter().any(|&o| (o - t).abs() <= 1e-12) {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Forward orbit of a periodic point, `n` values, read off the inverse cycle
/// so that rounding does not grow.
pub fn periodic_orbit(p: &DynamicsParams, t: f64, period: usize, n: usize) -> Result<Orbit> {
    let points = periodic_points(p, period)?;
    let nearest = |x: f64| {
        points
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .filter(|c| (c - x).abs() <= 1e-9)
    };
    let start = nearest(t).ok_or_else(|| Error::Inadmissible(format!("{t} is not {period}-periodic")))?;
    let mut back = vec![start];
    for _ in 1..period {
        let prev = *back.last().expect("non-empty");
        let next = inverse_map(p, prev)?;
        back.push(nearest(next).unwrap_or(next));
    }
    let cycle: Vec<f64> = std::iter::once(start).chain(back[1..].iter().rev().copied()).collect();
    Ok(Orbit {
        values: (0..n).map(|i| cycle[i % period]).collect(),
        status: OrbitStatus::Ok,
    })
}

/// The tree traced by an orbit through `depth` parallelograms. `nu_0` in
/// `(0, 1)` starts at a vertex `x` on the line through the midpoint of
/// `[A_0 B_0]` orthogonal to `e1`; `nu_0` in `{0, 1}` starts at `A_1` or
/// `B_1` with a tripod. The last long edge ends on parallelogram
/// `depth + 1`, at a terminal or at a vertex labelled `cut`. For `beta != 0`
/// the result is a candidate only; nothing here claims it is minimal.
pub fn tree_from_orbit(p: &DynamicsParams, orbit: &Orbit, depth: usize) -> Result<EmbeddedTree> {
    if orbit.values.len() < depth + 1 {
        return Err(Error::Inadmissible(format!(
            "{} values, depth {depth} needs {}",
            orbit.values.len(),
            depth + 1
        )));
    }
    let nus: Vec<f64> = orbit.values[..=depth].iter().map(|&v| snap(v)).collect();
    for (k, &nu) in nus.iter().enumerate() {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::Inadmissible(format!("nu_{k} = {nu} outside [0, 1]")));
        }
        if (nu - p.t_star).abs() <= FORBIDDEN_TOL {
            return Err(Error::Inadmissible(format!("nu_{k} hits the forbidden point")));
        }
        if k < depth {
            let next = forward_map(p, nu).map_err(|e| Error::Inadmissible(format!("step {k}: {e}")))?;
            if (next - nus[k + 1]).abs() > 1e-9 {
                return Err(Error::Inadmissible(format!(
                    "nu_{} = {} but g(nu_{k}) = {next}",
                    k + 1,
                    nus[k + 1]
                )));
            }
        }
    }
    let [e1, e2, e3] = p.frame.e;
    let (a, b) = (p.a, p.b);
    let a1 = a_point(p.alpha, p.lambda, 1);
    let b1 = a1.conj();
    let u1 = (a1 + b1) / 2.0 - e2 * b - e3 * a;

    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges = Vec::new();
    let mut prev: Option<usize> = None;
    let nu0 = nus[0];
    if nu0 != 0.0 && nu0 != 1.0 {
        let m0 = Point::new(a0_radius(p.alpha, p.lambda) * p.alpha.cos(), 0.0);
        let level = p.level_of_nu(nu0, 0);
        let x = m0 + e1.perp() * (SQRT3 * (level - p.frame.level(m0)));
        vertices.push(Vertex::terminal(x, "x"));
        prev = Some(0);
    }
    let push = |v: Vertex, vertices: &mut Vec<Vertex>| {
        vertices.push(v);
        vertices.len() - 1
    };
    for (k, &nu) in nus.iter().enumerate() {
        let s = p.lambda.powi(k as i32);
        let (ak, bk, uk) = (a1 * s, b1 * s, u1 * s);
        let (la, lb) = (format!("A{}", k + 1), format!("B{}", k + 1));
        let green = nu > p.t_star;
        let entry = if nu == 1.0 {
            ak
        } else if nu == 0.0 {
            bk
        } else if green {
            uk + e2 * (2.0 * s * ((a + b) * nu - a))
        } else {
            uk + e3 * (2.0 * s * (a - (a + b) * nu))
        };
        let at_terminal = nu == 0.0 || nu == 1.0;
        if k == depth {
            let v = if at_terminal {
                Vertex::terminal(entry, if nu == 1.0 { la } else { lb })
            } else {
                Vertex::terminal(entry, "cut")
            };
            let i = push(v, &mut vertices);
            if let Some(q) = prev {
                edges.push((q, i));
            }
            break;
        }
        let (near, far, near_label, far_label) = if green { (ak, bk, la, lb) } else { (bk, ak, lb, la) };
        let across = if green { e3 * (2.0 * a * s) } else { e2 * (2.0 * b * s) };
        let si = if at_terminal {
            push(Vertex::terminal(near, near_label), &mut vertices)
        } else {
            let si = push(Vertex::steiner(entry), &mut vertices);
            let ti = push(Vertex::terminal(near, near_label), &mut vertices);
            edges.push((si, ti));
            si
        };
        if let Some(q) = prev {
            edges.push((q, si));
        }
        let qi = push(Vertex::steiner(entry + across), &mut vertices);
        let fi = push(Vertex::terminal(far, far_label), &mut vertices);
        edges.push((si, qi));
        edges.push((qi, fi));
        prev = Some(qi);
    }
    Ok(EmbeddedTree::new(vertices, edges))
}

/// Frame angle under which the unmirrored ladder tree is an orbit: the
/// direction of its long edges, read off the five-terminal block.
pub fn a1_beta(alpha: f64, lambda: f64) -> Result<f64> {
    let block = ladder_block(alpha, lambda)?;
    let third = PI / 3.0;
    wind_rose(&block)
        .into_iter()
        .map(|r| r - third * (r / third).round())
        .find(|b| b.abs() <= alpha)
        .ok_or_else(|| Error::Hypothesis("no block edge within the angle".into()))
}

/// Reads the normalised heights of the long edges (those parallel to `e1`).
/// A tree that starts with a tripod gets `nu_0 = 1`.
pub fn orbit_from_tree(p: &DynamicsParams, tree: &EmbeddedTree) -> Result<Orbit> {
    let e1 = p.frame.e[0];
    let mut by_level: Vec<Option<f64>> = Vec::new();
    for e in 0..tree.edges.len() {
        let (u, v) = tree.segment(e);
        let d = (v - u).unit();
        if d.cross(e1).abs() > 1e-9 {
            continue;
        }
        let m = (u + v) / 2.0;
        let k = (m.norm().ln() / p.lambda.ln()).ceil().max(0.0) as usize;
        if by_level.len() <= k {
            by_level.resize(k + 1, None);
        }
        let nu = snap(p.nu_of_level(p.frame.level(m), k));
        if let Some(old) = by_level[k] {
            if (old - nu).abs() > 1e-9 {
                return Err(Error::Inadmissible(format!("two long edges at level {k}")));
            }
        }
        by_level[k] = Some(nu);
    }
    if by_level.is_empty() {
        return Err(Error::Inadmissible("tree has no long edges".into()));
    }
    if by_level[0].is_none() {
        by_level[0] = Some(1.0);
    }
    let values = by_level
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::Inadmissible(format!("no long edge at level {k}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Orbit {
        values,
        status: OrbitStatus::Ok,
    })
}
