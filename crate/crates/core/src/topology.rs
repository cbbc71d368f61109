//! Full Steiner topologies and block decompositions of a terminal set.
//!
//! Terminals are labelled `0..n`, Steiner points `n..2n-2`.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Topology {
    pub n_terminals: usize,
    /// Sorted `(min, max)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn n_steiner(&self) -> usize {
        self.n_terminals.saturating_sub(2)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_terminals + self.n_steiner()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Every terminal a leaf, every Steiner point of degree three, connected.
    pub fn is_full(&self) -> bool {
        let n = self.n_terminals;
        let adj = self.adjacency();
        if self.edges.len() != 2 * n - 3 {
            return false;
        }
        let degrees_ok = adj
            .iter()
            .enumerate()
            .all(|(v, a)| a.len() == if v < n { 1 } else { 3 });
        degrees_ok && bfs_order(&adj, 0).len() == adj.len()
    }

    /// Steiner labels renumbered in breadth-first order from terminal 0,
    /// children visited by the smallest terminal below them.
    pub fn canonical(&self) -> Topology {
        let n = self.n_terminals;
        let adj = self.adjacency();
        let total = adj.len();
        let mut parent = vec![usize::MAX; total];
        let order = bfs_order(&adj, 0);
        for &v in &order {
            for &w in &adj[v] {
                if w != 0 && parent[w] == usize::MAX && parent[v] != w {
                    parent[w] = v;
                }
            }
        }
        let mut min_below: Vec<usize> = (0..total).map(|v| if v < n { v } else { usize::MAX }).collect();
        for &v in order.iter().rev() {
            if v != 0 && parent[v] != usize::MAX {
                let p = parent[v];
                min_below[p] = min_below[p].min(min_below[v]);
            }
        }
        let mut relabel = vec![usize::MAX; total];
        let mut next = n;
        let mut queue = VecDeque::from([0usize]);
        let mut seen = vec![false; total];
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            if v >= n {
                relabel[v] = next;
                next += 1;
            } else {
                relabel[v] = v;
            }
            let mut kids: Vec<usize> = adj[v].iter().copied().filter(|&w| !seen[w]).collect();
            kids.sort_by_key(|&w| min_below[w]);
            for w in kids {
                seen[w] = true;
                queue.push_back(w);
            }
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (relabel[a], relabel[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        Topology { n_terminals: n, edges }
    }

    pub fn encode(&self) -> String {
        self.canonical()
            .edges
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn bfs_order(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = Vec::with_capacity(adj.len());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

/// `(2n-4)! / (2^(n-2) (n-2)!)`, i.e. the double factorial `(2n-5)!!`.
pub fn count_full_topologies(n: usize) -> Result<u128> {
    if n < 3 {
        return Err(Error::Size { n, range: "n >= 3" });
    }
    let mut acc: u128 = 1;
    for k in (1..=(2 * n - 5) as u128).step_by(2) {
        acc = acc.checked_mul(k).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

pub const MAX_ENUMERATED: usize = 10;

/// All full topologies on `n` terminals in canonical form, sorted.
pub fn enumerate_full_topologies(n: usize) -> Result<Vec<Topology>> {
    if !(3..=MAX_ENUMERATED).contains(&n) {
        return Err(Error::Size { n, range: "3..=10" });
    }
    // Steiner points get provisional labels above every terminal label
    const BASE: usize = 1 << 20;
    let mut trees: Vec<Vec<(usize, usize)>> = vec![vec![(0, BASE), (1, BASE), (2, BASE)]];
    for k in 3..n {
        let s = BASE + k - 2;
        let mut next = Vec::with_capacity(trees.len() * (2 * k - 3));
        for edges in &trees {
            for i in 0..edges.len() {
                let (u, v) = edges[i];
                let mut e = edges.clone();
                e[i] = (u, s);
                e.push((s, v));
                e.push((k, s));
                next.push(e);
            }
        }
        trees = next;
    }
    let mut out: Vec<Topology> = trees
        .into_iter()
        .map(|edges| {
            let edges = edges
                .into_iter()
                .map(|(a, b)| {
                    let f = |x: usize| if x >= BASE { x - BASE + n } else { x };
                    (f(a), f(b))
                })
                .collect();
            Topology { n_terminals: n, edges }.canonical()
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// A set of blocks (bitmasks over terminal indices) whose sizes are at least
/// two, that pairwise share at most one terminal, and that form a connected
/// acyclic hypergraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockDecomposition {
    pub blocks: Vec<u32>,
}

impl BlockDecomposition {
    pub fn members(mask: u32) -> Vec<usize> {
        (0..32).filter(|i| mask >> i & 1 == 1).collect()
    }

    pub fn is_valid(&self, n: usize) -> bool {
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut rank = 0;
        let mut union = 0;
        for (i, &b) in self.blocks.iter().enumerate() {
            if b.count_ones() < 2 || b & !full != 0 {
                return false;
            }
            for &c in &self.blocks[i + 1..] {
                if (b & c).count_ones() > 1 {
                    return false;
                }
            }
            rank += b.count_ones() as usize - 1;
            union |= b;
        }
        if rank != n - 1 || union != full {
            return false;
        }
        // connected, so with the rank condition also acyclic
        let mut reach = 1u32;
        loop {
            let grown = self
                .blocks
                .iter()
                .filter(|&&b| b & reach != 0)
                .fold(reach, |acc, &b| acc | b);
            if grown == reach {
                break;
            }
            reach = grown;
        }
        reach == full
    }
}

/// Visits each block decomposition of `{0..n}` once. Blocks are sorted.
pub fn for_each_block_decomposition(n: usize, min_block: usize, mut f: impl FnMut(&[u32])) -> Result<()> {
    if !(2..=MAX_ENUMERATED).contains(&n) {
        return Err(Error::Size { n, range: "2..=10" });
    }
    if min_block < 2 {
        return Err(Error::Size {
            n: min_block,
            range: "min_block >= 2",
        });
    }
    let mut queue = vec![0usize];
    let mut blocks = Vec::new();
    let unassigned = ((1u32 << n) - 1) & !1;
    grow(&mut queue, 0, unassigned, &mut blocks, min_block, &mut f);
    Ok(())
}

pub fn enumerate_block_decompositions(n: usize, min_block: usize) -> Result<Vec<BlockDecomposition>> {
    let mut out = Vec::new();
    for_each_block_decomposition(n, min_block, |b| out.push(BlockDecomposition { blocks: b.to_vec() }))?;
    out.sort_unstable();
    Ok(out)
}

// Each vertex, in queue order, picks the blocks hanging below it from the
// still unattached vertices; that choice is forced by the hypergraph, so every
// decomposition is produced exactly once.
fn grow(
    queue: &mut Vec<usize>,
    head: usize,
    unassigned: u32,
    blocks: &mut Vec<u32>,
    min_block: usize,
    f: &mut impl FnMut(&[u32]),
) {
    if head == queue.len() {
        if unassigned == 0 {
            let mut sorted = blocks.clone();
            sorted.sort_unstable();
            f(&sorted);
        }
        return;
    }
    let v = queue[head];
    let avail: Vec<usize> = BlockDecomposition::members(unassigned);
    let mut groups: Vec<u32> = Vec::new();
    choose(queue, head, v, &avail, 0, unassigned, &mut groups, blocks, min_block, f);
}

#[allow(clippy::too_many_arguments)]
fn choose(
    queue: &mut Vec<usize>,
    head: usize,
    v: usize,
    avail: &[usize],
    i: usize,
    unassigned: u32,
    groups: &mut Vec<u32>,
    blocks: &mut Vec<u32>,
    min_block: usize,
    f: &mut impl FnMut(&[u32]),
) {
    if i == avail.len() {
        if groups.iter().any(|g| (g.count_ones() as usize) + 1 < min_block) {
            return;
        }
        let taken = groups.iter().fold(0, |a, g| a | g);
        let old_len = queue.len();
        queue.extend(BlockDecomposition::members(taken));
        for &g in groups.iter() {
            blocks.push(g | 1 << v);
        }
        grow(queue, head + 1, unassigned & !taken, blocks, min_block, f);
        blocks.truncate(blocks.len() - groups.len());
        queue.truncate(old_len);
        return;
    }
    let bit = 1u32 << avail[i];
    choose(queue, head, v, avail, i + 1, unassigned, groups, blocks, min_block, f);
    for g in 0..groups.len() {
        groups[g] |= bit;
        choose(queue, head, v, avail, i + 1, unassigned, groups, blocks, min_block, f);
        groups[g] &= !bit;
    }
    groups.push(bit);
    choose(queue, head, v, avail, i + 1, unassigned, groups, blocks, min_block, f);
    groups.pop();
}
