//! Graphical coefficients: flat 4-valent node diagrams left over when odd
//! crossings are kept as nodes.
//!
//! A node diagram is a ribbon graph. Darts are `(node, slot)` pairs indexed
//! `4 * node + slot`, slots counterclockwise. Every dart is joined to a
//! partner dart by an edge carrying a freely reduced cusp word, read in the
//! direction leaving the dart. A node connects slot `s` straight through
//! to slot `s + 2`.

use std::collections::BTreeSet;

use super::{free_reduce, reduce_cusp_word, reverse_word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeGraph {
    alive: Vec<bool>,
    partner: Vec<usize>,
    word: Vec<Vec<u8>>,
    /// Closed components without nodes, as cyclic cusp words.
    loops: Vec<Vec<u8>>,
}

/// A fully reduced node diagram split into its connected pieces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphicalValue {
    /// Canonical codes of the connected pieces that still carry nodes, sorted.
    pub factors: Vec<String>,
    /// Arrow numbers of closed loops that lost all their nodes (0 = plain).
    pub loops: Vec<u32>,
}

pub fn node_count(code: &str) -> usize {
    if code.is_empty() {
        0
    } else {
        code.split('|').count()
    }
}

fn through(d: usize) -> usize {
    (d & !3) | ((d + 2) & 3)
}

impl NodeGraph {
    pub fn new(nodes: usize) -> Self {
        Self { alive: vec![true; nodes], partner: vec![usize::MAX; 4 * nodes], word: vec![Vec::new(); 4 * nodes], loops: Vec::new() }
    }

    /// Join two darts; `w` is read leaving `a`.
    pub fn connect(&mut self, a: usize, b: usize, w: Vec<u8>) {
        let w = free_reduce(&w);
        self.word[b] = reverse_word(&w);
        self.word[a] = w;
        self.partner[a] = b;
        self.partner[b] = a;
    }

    pub fn add_loop(&mut self, w: Vec<u8>) {
        self.loops.push(w);
    }

    pub fn node_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Treat every crossing of a diagram as a node.
    pub fn from_diagram(d: &crate::knotio::PlanarDiagram) -> Self {
        let mut g = Self::new(d.len());
        for e in d.arc_ends().iter().skip(1) {
            g.connect(e[0].0 * 4 + e[0].1, e[1].0 * 4 + e[1].1, Vec::new());
        }
        for _ in 0..d.free_loops() {
            g.add_loop(Vec::new());
        }
        g
    }

    /// Rebuild a single connected piece from its canonical code.
    pub fn from_code(code: &str) -> Option<Self> {
        let nodes: Vec<&str> = code.split('|').collect();
        let mut g = Self::new(nodes.len());
        for (u, entries) in nodes.iter().enumerate() {
            let entries: Vec<&str> = entries.split(',').collect();
            if entries.len() != 4 {
                return None;
            }
            for (s, e) in entries.iter().enumerate() {
                let (target, w) = match e.split_once(':') {
                    Some((t, w)) => (t, w.as_bytes().to_vec()),
                    None => (*e, Vec::new()),
                };
                let (v, t) = target.split_once('.')?;
                let (v, t): (usize, usize) = (v.parse().ok()?, t.parse().ok()?);
                if v >= nodes.len() || t >= 4 {
                    return None;
                }
                let (a, b) = (4 * u + s, 4 * v + t);
                if g.partner[a] == usize::MAX {
                    g.connect(a, b, w);
                } else if g.partner[a] != b {
                    return None;
                }
            }
        }
        Some(g)
    }

    /// Genus of the closed surface obtained by capping the faces of the
    /// ribbon graph, summed over connected pieces. Cusp words are ignored.
    pub fn surface_genus(&self) -> u32 {
        let darts: Vec<usize> = (0..self.partner.len()).filter(|&d| self.alive[d / 4]).collect();
        let next = |d: usize| {
            let e = self.partner[d];
            (e & !3) | ((e + 1) & 3)
        };
        let mut seen = vec![false; self.partner.len()];
        let mut faces = 0;
        for &d in &darts {
            if !seen[d] {
                faces += 1;
                let mut e = d;
                while !seen[e] {
                    seen[e] = true;
                    e = next(e);
                }
            }
        }
        let mut comp: Vec<usize> = (0..self.alive.len()).collect();
        fn root(c: &mut [usize], mut x: usize) -> usize {
            while c[x] != x {
                c[x] = c[c[x]];
                x = c[x];
            }
            x
        }
        for &d in &darts {
            let (a, b) = (root(&mut comp, d / 4), root(&mut comp, self.partner[d] / 4));
            comp[a] = b;
        }
        let pieces = (0..self.alive.len()).filter(|&u| self.alive[u] && root(&mut comp, u) == u).count();
        // V - E + F with E = 2V
        let chi = faces as i64 - self.node_count() as i64;
        ((2 * pieces as i64 - chi) / 2) as u32
    }

    /// Every pair of distinct nodes bounding a two-sided face, listed by
    /// the smallest dart on the face. With `strict_words` both bigon edges
    /// must be cusp-free.
    fn bigons(&self, strict_words: bool, first_only: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for d in 0..self.partner.len() {
            if !self.alive[d / 4] {
                continue;
            }
            let e = self.partner[d];
            if e / 4 == d / 4 {
                continue;
            }
            let f = (e & !3) | ((e + 1) & 3);
            let back = (d & !3) | ((d + 3) & 3);
            if self.partner[f] != back {
                continue;
            }
            if strict_words && (!self.word[d].is_empty() || !self.word[f].is_empty()) {
                continue;
            }
            out.push((d / 4, e / 4));
            if first_only {
                break;
            }
        }
        out
    }

    /// Delete two nodes, splicing the strands that ran through them.
    fn remove_nodes(&mut self, u: usize, v: usize) {
        let inside = |x: usize| x / 4 == u || x / 4 == v;
        let darts: Vec<usize> = (0..4).map(|s| 4 * u + s).chain((0..4).map(|s| 4 * v + s)).collect();
        let mut seen = BTreeSet::new();
        for &x in &darts {
            let ext = self.partner[x];
            if seen.contains(&x) || inside(ext) {
                continue;
            }
            let mut w = self.word[ext].clone();
            let mut cur = x;
            let end = loop {
                let y = through(cur);
                seen.insert(cur);
                seen.insert(y);
                w.extend_from_slice(&self.word[y]);
                let z = self.partner[y];
                if !inside(z) {
                    break z;
                }
                cur = z;
            };
            self.connect(ext, end, w);
        }
        for &x in &darts {
            if seen.contains(&x) {
                continue;
            }
            let mut w = Vec::new();
            let mut cur = x;
            loop {
                let y = through(cur);
                seen.insert(cur);
                seen.insert(y);
                w.extend_from_slice(&self.word[y]);
                cur = self.partner[y];
                if cur == x {
                    break;
                }
            }
            self.loops.push(w);
        }
        self.alive[u] = false;
        self.alive[v] = false;
    }

    /// Remove bigons until none is left, always taking the first one found.
    pub fn reduce(&mut self, strict_words: bool) {
        while let Some(&(u, v)) = self.bigons(strict_words, true).first() {
            self.remove_nodes(u, v);
        }
    }

    /// Remove bigons in an order chosen by `pick` among all candidates.
    pub fn reduce_with(&mut self, strict_words: bool, mut pick: impl FnMut(usize) -> usize) {
        loop {
            let cands = self.bigons(strict_words, false);
            if cands.is_empty() {
                return;
            }
            let (u, v) = cands[pick(cands.len()) % cands.len()];
            self.remove_nodes(u, v);
        }
    }

    /// Straight-through circuit of every dart, and the arrow number of each
    /// circuit. Cusps slide freely through nodes, so only these survive.
    fn circuits(&self) -> (Vec<usize>, Vec<u32>) {
        let mut circuit = vec![usize::MAX; self.partner.len()];
        let mut arrows = Vec::new();
        for d0 in 0..self.partner.len() {
            if !self.alive[d0 / 4] || circuit[d0] != usize::MAX {
                continue;
            }
            let c = arrows.len();
            let mut w = Vec::new();
            let mut d = d0;
            loop {
                let e = self.partner[d];
                circuit[d] = c;
                circuit[e] = c;
                w.extend_from_slice(&self.word[d]);
                d = through(e);
                if d == d0 {
                    break;
                }
            }
            arrows.push(reduce_cusp_word(&w).0);
        }
        (circuit, arrows)
    }

    fn code_from(&self, start: usize, circuit: &[usize], arrows: &[u32]) -> String {
        // each circuit's cusps are gathered on its first dart in output order
        let mut placed = vec![usize::MAX; arrows.len()];
        let mut order = vec![start / 4];
        let mut offset = vec![usize::MAX; self.alive.len()];
        let mut id = vec![usize::MAX; self.alive.len()];
        offset[start / 4] = start % 4;
        id[start / 4] = 0;
        let mut out = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            let mut entries = Vec::with_capacity(4);
            for ls in 0..4 {
                let d = 4 * u + (offset[u] + ls) % 4;
                let e = self.partner[d];
                let v = e / 4;
                if id[v] == usize::MAX {
                    id[v] = order.len();
                    offset[v] = e % 4;
                    order.push(v);
                }
                let mut s = format!("{}.{}", id[v], (e % 4 + 4 - offset[v]) % 4);
                let c = circuit[d];
                if arrows[c] > 0 {
                    if placed[c] == usize::MAX {
                        placed[c] = d;
                    }
                    if placed[c] == d {
                        s.push(':');
                        s.push_str(&"TH".repeat(arrows[c] as usize));
                    } else if self.partner[placed[c]] == d {
                        s.push(':');
                        s.push_str(&"HT".repeat(arrows[c] as usize));
                    }
                }
                entries.push(s);
            }
            out.push(entries.join(","));
            i += 1;
        }
        out.join("|")
    }

    /// Canonical codes of the connected pieces, plus the leftover loops.
    pub fn canonicalize(&self) -> GraphicalValue {
        let n = self.alive.len();
        let (circuit, arrows) = self.circuits();
        let mut comp = vec![usize::MAX; n];
        let mut factors = Vec::new();
        for root in 0..n {
            if !self.alive[root] || comp[root] != usize::MAX {
                continue;
            }
            let mut members = vec![root];
            comp[root] = root;
            let mut k = 0;
            while k < members.len() {
                let u = members[k];
                for s in 0..4 {
                    let v = self.partner[4 * u + s] / 4;
                    if comp[v] == usize::MAX {
                        comp[v] = root;
                        members.push(v);
                    }
                }
                k += 1;
            }
            let best = members.iter().flat_map(|&u| (0..4).map(move |s| 4 * u + s)).map(|d| self.code_from(d, &circuit, &arrows)).min().unwrap();
            factors.push(best);
        }
        factors.sort();
        let mut loops: Vec<u32> = self.loops.iter().map(|w| reduce_cusp_word(w).0).collect();
        loops.sort();
        GraphicalValue { factors, loops }
    }
}

/// Reduce a flat diagram (every crossing read as a node) and canonicalize.
pub fn reduce_graphical(d: &crate::knotio::PlanarDiagram) -> GraphicalValue {
    let mut g = NodeGraph::from_diagram(d);
    g.reduce(true);
    g.canonicalize()
}
