//! Terminal sets and embedded trees.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{diameter, Point};
use crate::ladder::FamilySpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub label: String,
    pub pos: Point,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TerminalSet {
    pub terminals: Vec<Terminal>,
    /// Index of the accumulation point; it is never a tree vertex.
    pub accumulation: Option<usize>,
    /// Endpoints of a segment that belongs to the input as a whole.
    pub segment: Option<(usize, usize)>,
    pub family: Option<FamilySpec>,
}

impl TerminalSet {
    pub fn new(terminals: Vec<Terminal>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &terminals {
            if !t.pos.is_finite() {
                return Err(Error::Parse(format!("terminal {} is not finite", t.label)));
            }
            if !seen.insert(t.label.as_str()) {
                return Err(Error::Parse(format!("duplicate label {}", t.label)));
            }
        }
        Ok(TerminalSet {
            terminals,
            ..Default::default()
        })
    }

    pub fn from_points(points: &[Point]) -> Self {
        let terminals = points
            .iter()
            .enumerate()
            .map(|(i, &pos)| Terminal {
                label: format!("t{i}"),
                pos,
            })
            .collect();
        TerminalSet {
            terminals,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminals.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.terminals.iter().map(|t| t.pos).collect()
    }

    /// Terminals that a finite tree has to connect: all but the accumulation point.
    pub fn proper(&self) -> Vec<&Terminal> {
        self.terminals
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.accumulation)
            .map(|(_, t)| t)
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.terminals.iter().position(|t| t.label == label)
    }

    pub fn get(&self, label: &str) -> Option<Point> {
        self.index_of(label).map(|i| self.terminals[i].pos)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Terminal,
    Steiner,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub pos: Point,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Vertex {
    pub fn terminal(pos: Point, label: impl Into<String>) -> Self {
        Vertex {
            pos,
            role: Role::Terminal,
            label: Some(label.into()),
        }
    }

    pub fn steiner(pos: Point) -> Self {
        Vertex {
            pos,
            role: Role::Steiner,
            label: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct EmbeddedTree {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    /// Sum of edge lengths, kept in sync by the constructors.
    pub length: f64,
}

impl EmbeddedTree {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Self {
        let mut t = EmbeddedTree {
            vertices,
            edges,
            length: 0.0,
        };
        t.length = t.edge_sum();
        t
    }

    pub fn edge_sum(&self) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b)| self.vertices[a].pos.dist(self.vertices[b].pos))
            .sum()
    }

    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| v.pos).collect()
    }

    pub fn segment(&self, e: usize) -> (Point, Point) {
        let (a, b) = self.edges[e];
        (self.vertices[a].pos, self.vertices[b].pos)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.points())
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Same vertices and edges, every position mapped through `f`.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> EmbeddedTree {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex {
                pos: f(v.pos),
                ..v.clone()
            })
            .collect();
        EmbeddedTree::new(vertices, self.edges.clone())
    }

    /// Merges the endpoints of edges shorter than `eps`. A terminal survives
    /// over a Steiner point; duplicate edges are dropped.
    pub fn contract_short_edges(&self, eps: f64) -> EmbeddedTree {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            if self.vertices[a].pos.dist(self.vertices[b].pos) < eps {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    let keep_a = self.vertices[ra].role == Role::Terminal || self.vertices[rb].role != Role::Terminal;
                    if keep_a {
                        parent[rb] = ra;
                    } else {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut vertices = Vec::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            if index[r] == usize::MAX {
                index[r] = vertices.len();
                vertices.push(self.vertices[r].clone());
            }
            index[v] = index[r];
        }
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            let (x, y) = (index[a], index[b]);
            if x != y && seen.insert((x.min(y), x.max(y))) {
                edges.push((x, y));
            }
        }
        EmbeddedTree::new(vertices, edges)
    }

    /// Disjoint union; vertices of `other` are appended.
    pub fn union(&self, other: &EmbeddedTree) -> EmbeddedTree {
        let off = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().cloned());
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + off, b + off)));
        EmbeddedTree::new(vertices, edges)
    }

    /// Identifies terminals with equal labels, keeping the first occurrence.
    pub fn glue_terminals(&self) -> EmbeddedTree {
        let mut first: std::collections::HashMap<&str, usize> = Default::default();
        let mut index = Vec::with_capacity(self.vertices.len());
        let mut vertices = Vec::new();
        for v in &self.vertices {
            let shared = match (&v.role, &v.label) {
                (Role::Terminal, Some(l)) => first.get(l.as_str()).copied(),
                _ => None,
            };
            match shared {
                Some(i) => index.push(i),
                None => {
                    if let (Role::Terminal, Some(l)) = (&v.role, &v.label) {
                        first.insert(l.as_str(), vertices.len());
                    }
                    index.push(vertices.len());
                    vertices.push(v.clone());
                }
            }
        }
        let edges = self.edges.iter().map(|&(a, b)| (index[a], index[b])).collect();
        EmbeddedTree::new(vertices, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_must_be_unique() {
        let t = vec![
            Terminal {
                label: "a".into(),
                pos: Point::ORIGIN,
            },
            Terminal {
                label: "a".into(),
                pos: Point::new(1.0, 0.0),
            },
        ];
        assert!(TerminalSet::new(t).is_err());
    }

    #[test]
    fn contraction_keeps_terminal() {
        let t = EmbeddedTree::new(
            vec![
                Vertex::terminal(Point::ORIGIN, "a"),
                Vertex::steiner(Point::new(1e-14, 0.0)),
                Vertex::terminal(Point::new(1.0, 0.0), "b"),
            ],
            vec![(0, 1), (1, 2)],
        );
        let c = t.contract_short_edges(1e-12);
        assert_eq!(c.vertices.len(), 2);
        assert!(c.vertices.iter().all(|v| v.role == Role::Terminal));
        assert_eq!(c.edges.len(), 1);
        assert!((c.length - 1.0).abs() < 1e-13);
    }

    #[test]
    fn glue_shared_terminal() {
        let a = EmbeddedTree::new(
            vec![
                Vertex::terminal(Point::ORIGIN, "a"),
                Vertex::terminal(Point::new(1.0, 0.0), "b"),
            ],
            vec![(0, 1)],
        );
        let b = EmbeddedTree::new(
            vec![
                Vertex::terminal(Point::new(1.0, 0.0), "b"),
                Vertex::terminal(Point::new(1.0, 1.0), "c"),
            ],
            vec![(0, 1)],
        );
        let g = a.union(&b).glue_terminals();
        assert_eq!(g.vertices.len(), 3);
        assert!(g.is_connected());
        assert!((g.length - 2.0).abs() < 1e-15);
    }
}
