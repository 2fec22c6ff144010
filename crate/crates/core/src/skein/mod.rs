//! State sums: the bracket, the arrow polynomial and their parity versions.
//!
//! Smoothing conventions per crossing `(i, j, k, l)`:
//! choice 0 at `X` and choice 1 at `Y` join slots (0,1) and (2,3) keeping
//! the orientation; the other choice joins (3,0) and (1,2) against it and
//! leaves a cusp. Walking a cusped join from slot 3 to 0 or from 1 to 2
//! reads `T`, the opposite way reads `H`. Choice 0 is weighted by `A`.

pub mod graphical;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::algebra::{GradedPolynomial, Monomial};
use crate::knotio::{ParityClass, PlanarDiagram, Sign};
use graphical::{GraphicalValue, NodeGraph};

pub use graphical::{node_count, reduce_graphical};

/// How a crossing takes part in a state sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Resolve,
    /// Kept as a graphical node.
    Node,
    /// Replaced by a virtual crossing.
    Pass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateLoop {
    /// Arc labels on the loop, sorted; empty for a crossing-free loop.
    pub arcs: Vec<u32>,
    /// Cusp letters in traversal order.
    pub word: Vec<u8>,
    pub arrow: u32,
    /// `k` with `arrow = 2^(k-1) * odd`, when `arrow > 0`.
    pub order: Option<u32>,
    /// Smallest half-edge `4 * crossing + slot` on the loop. Loops with
    /// no crossings get keys past every half-edge.
    pub key: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedState {
    pub choice: Vec<bool>,
    pub loops: Vec<StateLoop>,
}

pub(crate) fn reverse_word(w: &[u8]) -> Vec<u8> {
    w.iter().rev().map(|&c| if c == b'T' { b'H' } else { b'T' }).collect()
}

/// Cancel adjacent equal letters (`TT`, `HH`).
pub(crate) fn free_reduce(w: &[u8]) -> Vec<u8> {
    let mut st: Vec<u8> = Vec::with_capacity(w.len());
    for &c in w {
        if st.last() == Some(&c) {
            st.pop();
        } else {
            st.push(c);
        }
    }
    st
}

/// Arrow number and order of a cyclic cusp word.
pub fn reduce_cusp_word(w: &[u8]) -> (u32, Option<u32>) {
    let mut st = free_reduce(w);
    while st.len() >= 2 && st.first() == st.last() {
        st.pop();
        st.remove(0);
    }
    let p = (st.len() / 2) as u32;
    (p, (p > 0).then(|| p.trailing_zeros() + 1))
}

fn oriented(sign: Sign, choice: bool) -> bool {
    (sign == Sign::Pos) != choice
}

/// Partner slot inside a crossing and the cusp letter read on the way.
fn join(slot: usize, role: Role, oriented: bool) -> (usize, Option<u8>) {
    match role {
        Role::Pass => ((slot + 2) % 4, None),
        Role::Node => unreachable!("nodes are not walked through"),
        Role::Resolve if oriented => ([1, 0, 3, 2][slot], None),
        Role::Resolve => match slot {
            3 => (0, Some(b'T')),
            1 => (2, Some(b'T')),
            0 => (3, Some(b'H')),
            _ => (1, Some(b'H')),
        },
    }
}

/// Precomputed walking data for one diagram and one role assignment.
pub(crate) struct Walker<'a> {
    d: &'a PlanarDiagram,
    alpha: Vec<usize>,
    roles: Vec<Role>,
}

pub(crate) struct Walk {
    pub loops: Vec<(Vec<usize>, Vec<u8>)>,
    pub graph: Option<NodeGraph>,
}

impl<'a> Walker<'a> {
    pub fn new(d: &'a PlanarDiagram, roles: Vec<Role>) -> Self {
        let ends = d.arc_ends();
        let mut alpha = vec![0; 4 * d.len()];
        for e in ends.iter().skip(1) {
            let (a, b) = (e[0].0 * 4 + e[0].1, e[1].0 * 4 + e[1].1);
            alpha[a] = b;
            alpha[b] = a;
        }
        Self { d, alpha, roles }
    }

    /// Trace a state. `choice[c]` is read only at resolved crossings.
    pub fn walk(&self, choice: &[bool], cusps: bool) -> Walk {
        let n = self.d.len();
        let cross = self.d.crossings();
        let step = |h: usize| -> (usize, Option<u8>) {
            let c = h / 4;
            let (s, letter) = join(h % 4, self.roles[c], oriented(cross[c].sign, choice[c]));
            (c * 4 + s, if cusps { letter } else { None })
        };
        let mut seen = vec![false; 4 * n];
        let nodes: Vec<usize> = (0..n).filter(|&c| self.roles[c] == Role::Node).collect();
        let graph = if nodes.is_empty() {
            None
        } else {
            let mut index = vec![usize::MAX; n];
            for (i, &c) in nodes.iter().enumerate() {
                index[c] = i;
            }
            let mut g = NodeGraph::new(nodes.len());
            for &c in &nodes {
                for s in 0..4 {
                    let start = c * 4 + s;
                    if seen[start] {
                        continue;
                    }
                    seen[start] = true;
                    let mut w = Vec::new();
                    let mut h = self.alpha[start];
                    while self.roles[h / 4] != Role::Node {
                        seen[h] = true;
                        let (nh, l) = step(h);
                        seen[nh] = true;
                        w.extend(l);
                        h = self.alpha[nh];
                    }
                    seen[h] = true;
                    g.connect(index[c] * 4 + s, index[h / 4] * 4 + h % 4, w);
                }
            }
            Some(g)
        };
        let mut loops = Vec::new();
        for start in 0..4 * n {
            if seen[start] {
                continue;
            }
            let mut halves = Vec::new();
            let mut w = Vec::new();
            let mut h = start;
            loop {
                let a = self.alpha[h];
                seen[h] = true;
                seen[a] = true;
                halves.push(h);
                halves.push(a);
                let (nh, l) = step(a);
                w.extend(l);
                h = nh;
                if h == start {
                    break;
                }
            }
            loops.push((halves, w));
        }
        Walk { loops, graph }
    }
}

pub fn resolve_state(d: &PlanarDiagram, choice: &[bool]) -> ResolvedState {
    assert_eq!(choice.len(), d.len(), "one choice per crossing");
    let walker = Walker::new(d, vec![Role::Resolve; d.len()]);
    let walk = walker.walk(choice, true);
    let cross = d.crossings();
    let mut loops: Vec<StateLoop> = walk
        .loops
        .into_iter()
        .map(|(halves, word)| {
            let mut arcs: Vec<u32> = halves.iter().map(|&h| cross[h / 4].slots[h % 4]).collect();
            arcs.sort();
            arcs.dedup();
            let (arrow, order) = reduce_cusp_word(&word);
            let key = *halves.iter().min().unwrap();
            StateLoop { arcs, word, arrow, order, key }
        })
        .collect();
    for f in 0..d.free_loops() as usize {
        loops.push(StateLoop { arcs: Vec::new(), word: Vec::new(), arrow: 0, order: None, key: 4 * d.len() + f });
    }
    loops.sort_by_key(|l| l.key);
    ResolvedState { choice: choice.to_vec(), loops }
}

/// What a single state contributes, before expanding powers of `d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Contribution {
    a: i32,
    plain: u32,
    arrows: Vec<u32>,
    graphical: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Bracket,
    Arrow,
}

fn state_sum(d: &PlanarDiagram, roles: Vec<Role>, mode: Mode) -> GradedPolynomial {
    let resolved: Vec<usize> = (0..d.len()).filter(|&c| roles[c] == Role::Resolve).collect();
    let m = resolved.len();
    assert!(m < 30, "too many crossings for a state sum");
    let walker = Walker::new(d, roles);
    let cusps = mode == Mode::Arrow;
    let counts: BTreeMap<Contribution, i64> = (0u64..1 << m)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc, bits| {
            let mut choice = vec![false; d.len()];
            for (b, &c) in resolved.iter().enumerate() {
                choice[c] = bits >> b & 1 == 1;
            }
            let ones = bits.count_ones() as i32;
            let mut con = Contribution { a: m as i32 - 2 * ones, plain: d.free_loops(), arrows: Vec::new(), graphical: Vec::new() };
            let walk = walker.walk(&choice, cusps);
            let mut tally = |p: u32| {
                if p == 0 {
                    con.plain += 1;
                } else {
                    con.arrows.push(p);
                }
            };
            for (_, w) in &walk.loops {
                tally(reduce_cusp_word(w).0);
            }
            if let Some(mut g) = walk.graph {
                g.reduce(false);
                let GraphicalValue { factors, loops } = g.canonicalize();
                for p in loops {
                    tally(p);
                }
                con.graphical = factors;
            }
            con.arrows.sort();
            *acc.entry(con).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let loop_value = GradedPolynomial::loop_value();
    let mut powers = vec![GradedPolynomial::one()];
    let mut out = GradedPolynomial::zero();
    for (con, count) in counts {
        while powers.len() <= con.plain as usize {
            let next = powers.last().unwrap() * &loop_value;
            powers.push(next);
        }
        let mono = Monomial { a: con.a, arrow: con.arrows, graphical: con.graphical, ..Monomial::default() };
        let term = powers[con.plain as usize].mul_monomial(&mono).scale(BigInt::from(count));
        out = &out + &term;
    }
    out
}

fn normalize(d: &PlanarDiagram, p: &GradedPolynomial) -> GradedPolynomial {
    &GradedPolynomial::minus_a_pow(-3 * d.writhe()) * p
}

fn parity_roles(d: &PlanarDiagram) -> Vec<Role> {
    d.parity().into_iter().map(|p| if p == ParityClass::Even { Role::Resolve } else { Role::Node }).collect()
}

/// Unnormalized bracket; a lone loop is worth `d = -A^2 - A^-2`.
pub fn bracket(d: &PlanarDiagram) -> GradedPolynomial {
    state_sum(d, vec![Role::Resolve; d.len()], Mode::Bracket)
}

pub fn normalized_bracket(d: &PlanarDiagram) -> GradedPolynomial {
    normalize(d, &bracket(d))
}

/// Unnormalized arrow polynomial: a loop with arrow number `p > 0` is
/// worth `K[p]`, any other loop `d`.
pub fn arrow(d: &PlanarDiagram) -> GradedPolynomial {
    state_sum(d, vec![Role::Resolve; d.len()], Mode::Arrow)
}

pub fn normalized_arrow(d: &PlanarDiagram) -> GradedPolynomial {
    normalize(d, &arrow(d))
}

/// Normalized parity bracket with graphical coefficients `D{code}`.
pub fn parity_bracket(d: &PlanarDiagram) -> GradedPolynomial {
    normalize(d, &state_sum(d, parity_roles(d), Mode::Bracket))
}

/// Normalized parity arrow polynomial.
pub fn parity_arrow(d: &PlanarDiagram) -> GradedPolynomial {
    normalize(d, &state_sum(d, parity_roles(d), Mode::Arrow))
}

/// Bracket state sum with odd and link crossings made virtual in place.
pub fn forgetful_bracket(d: &PlanarDiagram) -> GradedPolynomial {
    let roles = parity_roles(d).into_iter().map(|r| if r == Role::Node { Role::Pass } else { r }).collect();
    state_sum(d, roles, Mode::Bracket)
}

/// Exact division by the loop value `d`, for polynomials in `A` alone.
pub fn divide_by_loop(p: &GradedPolynomial) -> Option<GradedPolynomial> {
    // p / (-A^2 - A^-2) = -A^2 p / (A^4 + 1); peel off the top power each time
    let mut rem: BTreeMap<i32, BigInt> = BTreeMap::new();
    for (m, c) in p.terms() {
        if m.a == i32::MIN || *m != Monomial::a_pow(m.a) {
            return None;
        }
        rem.insert(m.a + 2, -c.clone());
    }
    let mut quot = GradedPolynomial::zero();
    while let Some((&top, c)) = rem.iter().next_back() {
        let c = c.clone();
        let low = *rem.keys().next().unwrap();
        if top - 4 < low {
            return None;
        }
        quot.add_term(Monomial::a_pow(top - 4), c.clone());
        for e in [top, top - 4] {
            let v = rem.entry(e).or_default();
            *v -= &c;
            if *v == BigInt::from(0) {
                rem.remove(&e);
            }
        }
    }
    Some(quot)
}

/// Jones polynomial from the normalized bracket. Exponents of `A` are
/// turned into powers of `t` via `A = t^(-1/4)`; when some exponent is not
/// a multiple of 4 the result is written in `q = t^(1/2)` instead.
pub fn jones(d: &PlanarDiagram) -> GradedPolynomial {
    let f = divide_by_loop(&normalized_bracket(d)).expect("every state has a loop");
    let in_t = f.terms().all(|(m, _)| m.a % 4 == 0);
    f.map_monomials(|m| {
        let mono = if in_t { Monomial::qt(0, -m.a / 4) } else { Monomial::qt(-m.a / 2, 0) };
        GradedPolynomial::term(mono, 1)
    })
}
