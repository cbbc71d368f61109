//! Deterministic SVG 1.1 output for trees.

use std::fmt::Write as _;

use crate::geom::Point;
use crate::tree::{EmbeddedTree, Role};

#[derive(Clone, Debug)]
pub struct SvgOptions {
    pub width: f64,
    pub margin: f64,
    pub labels: bool,
    /// Draws the two sides of the angle `(-alpha, alpha)` from the origin.
    pub sides: Option<f64>,
    /// Markers shrink toward this point, so deep levels stay readable.
    pub shrink_toward: Option<Point>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            margin: 24.0,
            labels: false,
            sides: None,
            shrink_toward: None,
        }
    }
}

pub fn render(tree: &EmbeddedTree, opts: &SvgOptions) -> String {
    let mut pts: Vec<Point> = tree.points();
    let side_len = pts.iter().map(|p| p.norm()).fold(0.0, f64::max) * 1.05;
    if let Some(alpha) = opts.sides {
        pts.push(Point::ORIGIN);
        pts.push(Point::polar(side_len, alpha));
        pts.push(Point::polar(side_len, -alpha));
    }
    let (mut lo, mut hi) = (Point::new(0.0, 0.0), Point::new(1.0, 1.0));
    if let Some(&first) = pts.first() {
        lo = first;
        hi = first;
        for p in &pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300);
    let inner = opts.width - 2.0 * opts.margin;
    let scale = inner / span;
    let height = (hi.y - lo.y) * scale + 2.0 * opts.margin;
    let map = |p: Point| ((p.x - lo.x) * scale + opts.margin, (hi.y - p.y) * scale + opts.margin);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.6}" height="{:.6}" viewBox="0 0 {:.6} {:.6}">"#,
        opts.width, height, opts.width, height
    );
    if let Some(alpha) = opts.sides {
        let _ = writeln!(s, r##"<g stroke="#222222" stroke-width="1.000000" fill="none">"##);
        for a in [alpha, -alpha] {
            let (x1, y1) = map(Point::ORIGIN);
            let (x2, y2) = map(Point::polar(side_len, a));
            let _ = writeln!(s, r#"<line x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    let mut edges: Vec<(usize, usize)> = tree.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    let _ = writeln!(
        s,
        r##"<g stroke="#1f4e9c" stroke-width="1.500000" stroke-linecap="round">"##
    );
    for (a, b) in edges {
        let (x1, y1) = map(tree.vertices[a].pos);
        let (x2, y2) = map(tree.vertices[b].pos);
        let _ = writeln!(s, r#"<line x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let radius = |p: Point, r: f64| match opts.shrink_toward {
        Some(c) => (r * (p.dist(c) * scale / 60.0).min(1.0)).max(0.3),
        None => r,
    };
    for (role, colour, r) in [(Role::Steiner, "#1f4e9c", 2.0), (Role::Terminal, "#c0392b", 3.5)] {
        let _ = writeln!(s, r#"<g fill="{colour}">"#);
        for v in tree.vertices.iter().filter(|v| v.role == role) {
            let (x, y) = map(v.pos);
            let _ = writeln!(s, r#"<circle cx="{x:.6}" cy="{y:.6}" r="{:.6}"/>"#, radius(v.pos, r));
        }
        let _ = writeln!(s, "</g>");
    }
    if opts.labels {
        let _ = writeln!(s, r##"<g font-family="sans-serif" font-size="11" fill="#333333">"##);
        for v in &tree.vertices {
            if let (Role::Terminal, Some(l)) = (v.role, &v.label) {
                let (x, y) = map(v.pos);
                let _ = writeln!(s, r#"<text x="{:.6}" y="{:.6}">{}</text>"#, x + 4.0, y - 4.0, escape(l));
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
