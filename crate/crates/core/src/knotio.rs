//! Diagram codes: planar diagrams, Gauss codes, chord diagrams, crossing
//! parity, the parity filtration, carrier genus and Reidemeister insertions.
//!
//! Slot conventions. A crossing `X[i,j,k,l]` or `Y[i,j,k,l]` lists its four
//! arcs counterclockwise. One strand runs `i -> k`, the other `l -> j`.
//! At an `X` crossing the `i -> k` strand passes under, at a `Y` crossing it
//! passes over.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arc {arc} is used {count} times (expected 2)")]
    ArcMultiplicity { arc: u32, count: usize },
    #[error("broken strand continuation: {0}")]
    Continuation(String),
    #[error("invalid Gauss code: {0}")]
    Gauss(String),
    #[error("no such arc: {0}")]
    InvalidArc(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub sign: Sign,
    /// Arc labels `(i, j, k, l)`.
    pub slots: [u32; 4],
}

impl Crossing {
    pub fn new(sign: Sign, slots: [u32; 4]) -> Self {
        Self { sign, slots }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarDiagram {
    crossings: Vec<Crossing>,
    /// Inclusive arc-label range per component, ordered by first label.
    components: Vec<(u32, u32)>,
    free_loops: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParityClass {
    Even,
    Odd,
    Link,
}

impl ParityClass {
    pub fn name(self) -> &'static str {
        match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
            ParityClass::Link => "link",
        }
    }
}

impl PlanarDiagram {
    /// Validate a list of crossings plus a number of crossing-free loops.
    pub fn new(crossings: Vec<Crossing>, free_loops: u32) -> Result<Self, DiagramError> {
        let max = crossings.iter().flat_map(|c| c.slots).max().unwrap_or(0);
        let mut count = vec![0usize; max as usize + 1];
        for c in &crossings {
            for &a in &c.slots {
                if a == 0 {
                    return Err(DiagramError::ArcMultiplicity { arc: 0, count: 1 });
                }
                count[a as usize] += 1;
            }
        }
        for a in 1..=max {
            if count[a as usize] != 2 {
                return Err(DiagramError::ArcMultiplicity { arc: a, count: count[a as usize] });
            }
        }

        // each arc must be entered exactly once and left exactly once
        let mut next = vec![0u32; max as usize + 1];
        for c in &crossings {
            let [i, j, k, l] = c.slots;
            for (from, to) in [(i, k), (l, j)] {
                if next[from as usize] != 0 {
                    return Err(DiagramError::Continuation(format!("arc {from} enters two crossings")));
                }
                next[from as usize] = to;
            }
        }

        let mut components = Vec::new();
        let mut seen = vec![false; max as usize + 1];
        for start in 1..=max {
            if seen[start as usize] {
                continue;
            }
            let mut cur = start;
            loop {
                seen[cur as usize] = true;
                let n = next[cur as usize];
                if n == start {
                    components.push((start, cur));
                    break;
                }
                if n != cur + 1 || seen[n as usize] {
                    return Err(DiagramError::Continuation(format!(
                        "arc {cur} continues to {n}; arcs must be labeled consecutively along each component"
                    )));
                }
                cur = n;
            }
        }
        Ok(Self { crossings, components, free_loops })
    }

    pub fn unknot() -> Self {
        Self { crossings: Vec::new(), components: Vec::new(), free_loops: 1 }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn components(&self) -> &[(u32, u32)] {
        &self.components
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Number of arc labels, `2 * crossings`.
    pub fn arc_count(&self) -> u32 {
        2 * self.crossings.len() as u32
    }

    /// Number of link components, counting free loops.
    pub fn component_count(&self) -> usize {
        self.components.len() + self.free_loops as usize
    }

    pub fn positive(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign == Sign::Pos).count()
    }

    pub fn negative(&self) -> usize {
        self.crossings.len() - self.positive()
    }

    pub fn writhe(&self) -> i32 {
        self.crossings.iter().map(|c| c.sign.value()).sum()
    }

    pub fn component_of(&self, arc: u32) -> Option<usize> {
        self.components.iter().position(|&(s, e)| s <= arc && arc <= e)
    }

    /// The two `(crossing, slot)` positions of every arc, indexed by label.
    pub fn arc_ends(&self) -> Vec<[(usize, usize); 2]> {
        let n = self.arc_count() as usize;
        let mut ends = vec![[(usize::MAX, 0); 2]; n + 1];
        for (c, x) in self.crossings.iter().enumerate() {
            for (s, &a) in x.slots.iter().enumerate() {
                let e = &mut ends[a as usize];
                if e[0].0 == usize::MAX {
                    e[0] = (c, s);
                } else {
                    e[1] = (c, s);
                }
            }
        }
        ends
    }

    pub fn to_gauss(&self) -> GaussCode {
        pd_to_gauss(self)
    }

    pub fn parity(&self) -> Vec<ParityClass> {
        let g = pd_to_gauss(self);
        let map = crossing_parity(&g);
        (1..=self.crossings.len() as u32).map(|id| map[&id]).collect()
    }

    /// Parity read directly from arc labels: odd iff `i - j` is odd.
    /// Only meaningful for knots.
    pub fn parity_shortcut(&self) -> Vec<ParityClass> {
        self.crossings
            .iter()
            .map(|c| if (c.slots[0] as i64 - c.slots[1] as i64) % 2 != 0 { ParityClass::Odd } else { ParityClass::Even })
            .collect()
    }

    pub fn is_classical_parity(&self) -> bool {
        self.parity().iter().all(|&p| p == ParityClass::Even)
    }
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_pd(self))
    }
}

impl std::str::FromStr for PlanarDiagram {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pd(s)
    }
}

// ---------------------------------------------------------------------------
// PD text

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DiagramError> {
        Err(DiagramError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), DiagramError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<u32, DiagramError> {
        self.skip();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map_or_else(
                || {
                    self.pos = start;
                    self.err("expected a nonnegative integer")
                },
                Ok,
            )
    }
}

pub fn parse_pd(text: &str) -> Result<PlanarDiagram, DiagramError> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
    lx.expect(b'P')?;
    if lx.src.get(lx.pos) != Some(&b'D') {
        return lx.err("expected 'PD['");
    }
    lx.pos += 1;
    lx.expect(b'[')?;
    let mut crossings = Vec::new();
    let mut free = 0u32;
    if lx.peek() != Some(b']') {
        loop {
            let head = lx.peek();
            match head {
                Some(b'X') | Some(b'Y') => {
                    lx.pos += 1;
                    lx.expect(b'[')?;
                    let mut slots = [0u32; 4];
                    for (n, s) in slots.iter_mut().enumerate() {
                        if n > 0 {
                            lx.expect(b',')?;
                        }
                        *s = lx.number()?;
                        if *s == 0 {
                            return lx.err("arc labels start at 1");
                        }
                    }
                    lx.expect(b']')?;
                    let sign = if head == Some(b'X') { Sign::Pos } else { Sign::Neg };
                    crossings.push(Crossing { sign, slots });
                }
                Some(b'L') => {
                    lx.pos += 1;
                    lx.expect(b'[')?;
                    free += lx.number()?;
                    lx.expect(b']')?;
                }
                _ => return lx.err("expected X[..], Y[..] or L[..]"),
            }
            match lx.peek() {
                Some(b',') => lx.pos += 1,
                Some(b']') => break,
                _ => return lx.err("expected ',' or ']'"),
            }
        }
    }
    lx.expect(b']')?;
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    PlanarDiagram::new(crossings, free)
}

pub fn serialize_pd(d: &PlanarDiagram) -> String {
    let mut items: Vec<String> = d
        .crossings
        .iter()
        .map(|c| {
            let [i, j, k, l] = c.slots;
            let head = if c.sign == Sign::Pos { 'X' } else { 'Y' };
            format!("{head}[{i},{j},{k},{l}]")
        })
        .collect();
    if d.free_loops > 0 {
        items.push(format!("L[{}]", d.free_loops));
    }
    format!("PD[{}]", items.join(","))
}

// ---------------------------------------------------------------------------
// Gauss codes

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pass {
    Over,
    Under,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaussEntry {
    pub pass: Pass,
    pub id: u32,
    pub sign: Sign,
}

/// One sequence of passes per component; an empty sequence is a
/// crossing-free loop.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussCode {
    pub components: Vec<Vec<GaussEntry>>,
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|e| format!("{}{}{}", if e.pass == Pass::Over { 'O' } else { 'U' }, e.id, e.sign.symbol()))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&comps.join(";"))
    }
}

impl GaussCode {
    pub fn validate(&self) -> Result<(), DiagramError> {
        let mut seen: BTreeMap<u32, Vec<&GaussEntry>> = BTreeMap::new();
        for e in self.components.iter().flatten() {
            seen.entry(e.id).or_default().push(e);
        }
        for (id, es) in &seen {
            if es.len() != 2 {
                return Err(DiagramError::Gauss(format!("crossing {id} occurs {} times", es.len())));
            }
            if es[0].pass == es[1].pass {
                return Err(DiagramError::Gauss(format!("crossing {id} needs one O and one U pass")));
            }
            if es[0].sign != es[1].sign {
                return Err(DiagramError::Gauss(format!("crossing {id} has inconsistent signs")));
            }
        }
        Ok(())
    }

    /// Cyclically rotate one component to start at `offset`.
    pub fn rotate(&self, component: usize, offset: usize) -> GaussCode {
        let mut g = self.clone();
        let c = &mut g.components[component];
        if !c.is_empty() {
            let n = offset % c.len();
            c.rotate_left(n);
        }
        g
    }
}

/// Parse `O1-,O2-,U1-` with `;` between components. Signs may be omitted
/// on one or both occurrences; an unsigned crossing defaults to `+`.
pub fn parse_gauss(text: &str) -> Result<GaussCode, DiagramError> {
    let mut raw: Vec<Vec<(Pass, u32, Option<Sign>)>> = Vec::new();
    let mut offset = 0usize;
    for comp in text.split(';') {
        let mut entries = Vec::new();
        let mut local = 0usize;
        for tok in comp.split(',') {
            let pos = offset + local;
            local += tok.len() + 1;
            let t = tok.trim();
            if t.is_empty() {
                if comp.trim().is_empty() {
                    continue;
                }
                return Err(DiagramError::Syntax { pos, msg: "empty Gauss entry".into() });
            }
            let bytes = t.as_bytes();
            let pass = match bytes[0] {
                b'O' | b'o' => Pass::Over,
                b'U' | b'u' => Pass::Under,
                _ => return Err(DiagramError::Syntax { pos, msg: format!("expected O or U in '{t}'") }),
            };
            let (digits, sign) = match bytes[bytes.len() - 1] {
                b'+' => (&t[1..t.len() - 1], Some(Sign::Pos)),
                b'-' => (&t[1..t.len() - 1], Some(Sign::Neg)),
                _ => (&t[1..], None),
            };
            let id: u32 = digits
                .trim()
                .parse()
                .map_err(|_| DiagramError::Syntax { pos, msg: format!("bad crossing id in '{t}'") })?;
            entries.push((pass, id, sign));
        }
        offset += comp.len() + 1;
        raw.push(entries);
    }
    let mut signs: BTreeMap<u32, Sign> = BTreeMap::new();
    for &(_, id, s) in raw.iter().flatten() {
        if let Some(s) = s {
            if let Some(&prev) = signs.get(&id) {
                if prev != s {
                    return Err(DiagramError::Gauss(format!("crossing {id} has inconsistent signs")));
                }
            }
            signs.insert(id, s);
        }
    }
    let g = GaussCode {
        components: raw
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|(pass, id, s)| GaussEntry { pass, id, sign: s.unwrap_or(*signs.get(&id).unwrap_or(&Sign::Pos)) })
                    .collect()
            })
            .collect(),
    };
    g.validate()?;
    Ok(g)
}

/// Walk each component from its smallest arc label; the entry emitted for
/// arc `a` is the crossing `a` runs into. Crossing ids are `index + 1`.
pub fn pd_to_gauss(d: &PlanarDiagram) -> GaussCode {
    let n = d.arc_count() as usize;
    let mut incoming = vec![(0usize, 0usize); n + 1];
    for (c, x) in d.crossings.iter().enumerate() {
        incoming[x.slots[0] as usize] = (c, 0);
        incoming[x.slots[3] as usize] = (c, 3);
    }
    let mut components: Vec<Vec<GaussEntry>> = d
        .components
        .iter()
        .map(|&(s, e)| {
            (s..=e)
                .map(|a| {
                    let (c, slot) = incoming[a as usize];
                    let sign = d.crossings[c].sign;
                    let pass = match (sign, slot) {
                        (Sign::Pos, 0) | (Sign::Neg, 3) => Pass::Under,
                        _ => Pass::Over,
                    };
                    GaussEntry { pass, id: c as u32 + 1, sign }
                })
                .collect()
        })
        .collect();
    components.extend((0..d.free_loops).map(|_| Vec::new()));
    GaussCode { components }
}

pub fn gauss_to_pd(g: &GaussCode) -> Result<PlanarDiagram, DiagramError> {
    g.validate()?;
    // id -> (under (in, out), over (in, out), sign)
    let mut passes: BTreeMap<u32, [Option<(u32, u32)>; 2]> = BTreeMap::new();
    let mut signs: BTreeMap<u32, Sign> = BTreeMap::new();
    let mut base = 0u32;
    let mut free = 0u32;
    for comp in &g.components {
        let n = comp.len() as u32;
        if n == 0 {
            free += 1;
            continue;
        }
        for (t, e) in comp.iter().enumerate() {
            let t = t as u32;
            let arcs = (base + t + 1, base + (t + 1) % n + 1);
            let slot = if e.pass == Pass::Under { 0 } else { 1 };
            passes.entry(e.id).or_default()[slot] = Some(arcs);
            signs.insert(e.id, e.sign);
        }
        base += n;
    }
    let crossings = passes
        .iter()
        .map(|(id, [u, o])| {
            let (u, o) = (u.unwrap(), o.unwrap());
            match signs[id] {
                Sign::Pos => Crossing::new(Sign::Pos, [u.0, o.1, u.1, o.0]),
                Sign::Neg => Crossing::new(Sign::Neg, [o.0, u.1, o.1, u.0]),
            }
        })
        .collect();
    PlanarDiagram::new(crossings, free)
}

pub fn parse_any(text: &str) -> Result<PlanarDiagram, DiagramError> {
    let t = text.trim();
    if t.starts_with("PD") {
        parse_pd(t)
    } else {
        gauss_to_pd(&parse_gauss(t)?)
    }
}

// ---------------------------------------------------------------------------
// chord diagrams and parity

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chord {
    pub id: u32,
    pub sign: Sign,
    /// `(component, position)` of the over pass.
    pub over: (usize, usize),
    /// `(component, position)` of the under pass.
    pub under: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordDiagram {
    /// Crossing ids around each core circle.
    pub marks: Vec<Vec<u32>>,
    /// Chords oriented from the over mark to the under mark.
    pub chords: Vec<Chord>,
}

impl ChordDiagram {
    pub fn from_gauss(g: &GaussCode) -> Self {
        let marks = g.components.iter().map(|c| c.iter().map(|e| e.id).collect()).collect();
        let mut ends: BTreeMap<u32, (Sign, Option<(usize, usize)>, Option<(usize, usize)>)> = BTreeMap::new();
        for (ci, c) in g.components.iter().enumerate() {
            for (p, e) in c.iter().enumerate() {
                let entry = ends.entry(e.id).or_insert((e.sign, None, None));
                match e.pass {
                    Pass::Over => entry.1 = Some((ci, p)),
                    Pass::Under => entry.2 = Some((ci, p)),
                }
            }
        }
        let chords = ends
            .into_iter()
            .map(|(id, (sign, o, u))| Chord { id, sign, over: o.unwrap(), under: u.unwrap() })
            .collect();
        Self { marks, chords }
    }
}

/// Parity by gap counting. Passes of link crossings are not counted when
/// measuring the gap of a self-crossing.
pub fn crossing_parity(g: &GaussCode) -> BTreeMap<u32, ParityClass> {
    let mut where_: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, c) in g.components.iter().enumerate() {
        for (p, e) in c.iter().enumerate() {
            where_.entry(e.id).or_default().push((ci, p));
        }
    }
    let link: BTreeMap<u32, bool> = where_.iter().map(|(&id, w)| (id, w[0].0 != w[1].0)).collect();
    where_
        .iter()
        .map(|(&id, w)| {
            if link[&id] {
                return (id, ParityClass::Link);
            }
            let (c, a, b) = (w[0].0, w[0].1.min(w[1].1), w[0].1.max(w[1].1));
            let gap = g.components[c][a + 1..b].iter().filter(|e| !link[&e.id]).count();
            (id, if gap % 2 == 1 { ParityClass::Odd } else { ParityClass::Even })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// filtration

/// Turn every odd self-crossing and every link crossing into a virtual
/// crossing and relabel.
pub fn filtration_step(d: &PlanarDiagram) -> PlanarDiagram {
    let parity = d.parity();
    if parity.iter().all(|&p| p == ParityClass::Even) {
        return d.clone();
    }
    let g = pd_to_gauss(d);
    let kept = GaussCode {
        components: g
            .components
            .iter()
            .map(|c| c.iter().filter(|e| parity[e.id as usize - 1] == ParityClass::Even).copied().collect())
            .collect(),
    };
    gauss_to_pd(&kept).expect("removing crossings keeps a valid code")
}

/// `[D0, D1, ...]` up to the first diagram with no odd or link crossings.
pub fn filtration(d: &PlanarDiagram) -> Vec<PlanarDiagram> {
    let mut out = vec![d.clone()];
    loop {
        let last = out.last().unwrap();
        if last.is_classical_parity() {
            return out;
        }
        let next = filtration_step(last);
        out.push(next);
    }
}

// ---------------------------------------------------------------------------
// carrier surface

/// Genus of the closed orientable surface carrying the diagram, summed over
/// the connected pieces of the diagram.
pub fn carrier_genus(d: &PlanarDiagram) -> u32 {
    let n = d.crossings.len();
    if n == 0 {
        return 0;
    }
    let ends = d.arc_ends();
    let mut alpha = vec![0usize; 4 * n];
    for e in ends.iter().skip(1) {
        let (h0, h1) = (e[0].0 * 4 + e[0].1, e[1].0 * 4 + e[1].1);
        alpha[h0] = h1;
        alpha[h1] = h0;
    }
    // connected pieces of the crossing graph
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for h in 0..4 * n {
        let (a, b) = (find(&mut parent, h / 4), find(&mut parent, alpha[h] / 4));
        parent[a] = b;
    }
    let mut faces: BTreeMap<usize, i64> = BTreeMap::new();
    let mut verts: BTreeMap<usize, i64> = BTreeMap::new();
    for c in 0..n {
        *verts.entry(find(&mut parent, c)).or_default() += 1;
    }
    let mut seen = vec![false; 4 * n];
    for h in 0..4 * n {
        if seen[h] {
            continue;
        }
        let root = find(&mut parent, h / 4);
        *faces.entry(root).or_default() += 1;
        let mut x = h;
        while !seen[x] {
            seen[x] = true;
            let y = alpha[x];
            x = (y / 4) * 4 + (y % 4 + 1) % 4;
        }
    }
    verts
        .iter()
        .map(|(r, &v)| {
            let chi = v - 2 * v + faces[r];
            ((2 - chi) / 2) as u32
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Reidemeister insertions

/// A place on the diagram: an arc label, or the k-th crossing-free loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcRef {
    Arc(u32),
    FreeLoop(u32),
}

impl PlanarDiagram {
    /// Every position a Reidemeister insertion can use.
    pub fn arc_refs(&self) -> Vec<ArcRef> {
        (1..=self.arc_count()).map(ArcRef::Arc).chain((0..self.free_loops).map(ArcRef::FreeLoop)).collect()
    }

    fn locate(&self, r: ArcRef) -> Result<(usize, usize), DiagramError> {
        match r {
            ArcRef::Arc(a) => {
                let c = self.component_of(a).ok_or_else(|| DiagramError::InvalidArc(format!("arc {a}")))?;
                Ok((c, (a - self.components[c].0) as usize))
            }
            ArcRef::FreeLoop(k) if k < self.free_loops => Ok((self.components.len() + k as usize, 0)),
            ArcRef::FreeLoop(k) => Err(DiagramError::InvalidArc(format!("free loop {k}"))),
        }
    }
}

fn insert_entries(d: &PlanarDiagram, mut inserts: Vec<((usize, usize), Vec<GaussEntry>)>) -> PlanarDiagram {
    let mut g = pd_to_gauss(d);
    // later positions first so earlier indices stay valid
    inserts.sort_by_key(|b| std::cmp::Reverse(b.0));
    for ((c, p), entries) in inserts {
        let comp = &mut g.components[c];
        for (n, e) in entries.into_iter().enumerate() {
            comp.insert(p + n, e);
        }
    }
    gauss_to_pd(&g).expect("Reidemeister insertion keeps a valid code")
}

/// Add a kink of the given sign on `at`. With `under_first` the strand
/// meets the new crossing first as the under pass.
pub fn insert_r1(d: &PlanarDiagram, at: ArcRef, sign: Sign, under_first: bool) -> Result<PlanarDiagram, DiagramError> {
    let pos = d.locate(at)?;
    let id = d.crossings.len() as u32 + 1;
    let (p1, p2) = if under_first { (Pass::Under, Pass::Over) } else { (Pass::Over, Pass::Under) };
    let entries = vec![GaussEntry { pass: p1, id, sign }, GaussEntry { pass: p2, id, sign }];
    Ok(insert_entries(d, vec![(pos, entries)]))
}

/// Push the strand through `over` across the strand through `under`,
/// creating two crossings of opposite sign; `sign` is the sign of the one
/// met first along `over`. With `reversed` the under strand meets them in
/// the opposite order.
pub fn insert_r2(
    d: &PlanarDiagram,
    over: ArcRef,
    under: ArcRef,
    sign: Sign,
    reversed: bool,
) -> Result<PlanarDiagram, DiagramError> {
    let po = d.locate(over)?;
    let pu = d.locate(under)?;
    let c1 = d.crossings.len() as u32 + 1;
    let c2 = c1 + 1;
    let e = |pass, id, sign| GaussEntry { pass, id, sign };
    let top = vec![e(Pass::Over, c1, sign), e(Pass::Over, c2, sign.flip())];
    let mut bottom = vec![e(Pass::Under, c1, sign), e(Pass::Under, c2, sign.flip())];
    if reversed {
        bottom.reverse();
    }
    if po == pu {
        let mut all = top;
        all.extend(bottom);
        return Ok(insert_entries(d, vec![(po, all)]));
    }
    Ok(insert_entries(d, vec![(po, top), (pu, bottom)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const VK31: &str = "PD[X[1,5,2,4],X[5,4,6,3],Y[6,3,1,2]]";

    #[test]
    fn parses_the_three_crossing_example() {
        let d = parse_pd(VK31).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.positive(), 2);
        assert_eq!(d.negative(), 1);
        assert_eq!(d.component_count(), 1);
        assert_eq!(serialize_pd(&d), VK31);
    }

    #[test]
    fn unknot_and_errors() {
        let u = parse_pd("PD[L[1]]").unwrap();
        assert_eq!(u.len(), 0);
        assert_eq!(u.free_loops(), 1);
        assert_eq!(serialize_pd(&u), "PD[L[1]]");
        assert!(matches!(parse_pd("PD[X[1,5,2,4]]"), Err(DiagramError::ArcMultiplicity { .. })));
        assert!(matches!(parse_pd("PD[X[1,2,3,4],X[2,1,4,3]]"), Err(DiagramError::Continuation(_))));
        assert!(matches!(parse_pd("PD[X[1,1,2,2]"), Err(DiagramError::Syntax { .. })));
        assert!(matches!(parse_pd("PD[Z[1]]"), Err(DiagramError::Syntax { pos: 3, .. })));
    }

    #[test]
    fn whitespace_is_ignored() {
        let d = parse_pd(" PD[ X[1, 5, 2, 4],\n X[5,4,6,3], Y[6,3,1,2] ] ").unwrap();
        assert_eq!(serialize_pd(&d), VK31);
    }

    #[test]
    fn gauss_of_three_crossing_example() {
        let d = parse_pd(VK31).unwrap();
        let g = pd_to_gauss(&d);
        assert_eq!(g.to_string(), "U1+,U3-,O2+,O1+,U2+,O3-");
        let parity = d.parity();
        assert_eq!(parity.iter().filter(|&&p| p == ParityClass::Even).count(), 1);
        assert_eq!(parity.iter().filter(|&&p| p == ParityClass::Odd).count(), 2);
        assert_eq!(gauss_to_pd(&g).unwrap(), d);
    }

    #[test]
    fn kink_gauss() {
        let d = parse_pd("PD[X[1,1,2,2]]").unwrap();
        assert_eq!(pd_to_gauss(&d).to_string(), "U1+,O1+");
    }

    #[test]
    fn gauss_parsing() {
        let g = parse_gauss("O1-,O2-,U1-,O3+,U2-,U3+").unwrap();
        assert_eq!(g.components.len(), 1);
        let d = gauss_to_pd(&g).unwrap();
        let signs: Vec<Sign> = d.crossings().iter().map(|c| c.sign).collect();
        assert_eq!(signs, vec![Sign::Neg, Sign::Neg, Sign::Pos]);
        let p = crossing_parity(&g);
        assert_eq!(p[&1], ParityClass::Odd);
        assert_eq!(p[&2], ParityClass::Even);
        assert_eq!(p[&3], ParityClass::Odd);

        let three = parse_gauss("U1;O1,O2;U2").unwrap();
        assert_eq!(three.components.len(), 3);
        assert_eq!(gauss_to_pd(&three).unwrap().component_count(), 3);

        assert!(parse_gauss("O1+,O1+").is_err());
        assert!(parse_gauss("O1+,U1-").is_err());
        assert!(parse_gauss("O1+,U2+").is_err());
        assert!(matches!(parse_gauss("O1+,X1+"), Err(DiagramError::Syntax { pos: 4, .. })));
    }

    #[test]
    fn link_parity_example() {
        let g = parse_gauss("O1,O7,O3,U1,U2,U3,O2; U4,O5,U6,U5,O4,O6,U7").unwrap();
        let p = crossing_parity(&g);
        for id in [1, 2, 4, 5] {
            assert_eq!(p[&id], ParityClass::Odd, "crossing {id}");
        }
        for id in [3, 6] {
            assert_eq!(p[&id], ParityClass::Even, "crossing {id}");
        }
        assert_eq!(p[&7], ParityClass::Link);
    }

    #[test]
    fn classical_trefoil_is_even() {
        let g = parse_gauss("O1+,U2+,O3+,U1+,O2+,U3+").unwrap();
        assert!(crossing_parity(&g).values().all(|&p| p == ParityClass::Even));
        let d = gauss_to_pd(&g).unwrap();
        assert_eq!(filtration(&d), vec![d.clone()]);
        assert_eq!(carrier_genus(&d), 0);
    }

    #[test]
    fn filtration_of_three_crossing_example() {
        let d = parse_pd(VK31).unwrap();
        let f = filtration(&d);
        assert_eq!(f.len(), 2);
        assert_eq!(serialize_pd(&f[1]), "PD[X[1,1,2,2]]");

        let vt = gauss_to_pd(&parse_gauss("O1+,O2+,U1+,U2+").unwrap()).unwrap();
        assert_eq!(serialize_pd(&filtration_step(&vt)), "PD[L[1]]");
        assert_eq!(filtration(&PlanarDiagram::unknot()), vec![PlanarDiagram::unknot()]);
    }

    #[test]
    fn carrier_genus_examples() {
        assert_eq!(carrier_genus(&parse_pd(VK31).unwrap()), 2);
        assert_eq!(carrier_genus(&PlanarDiagram::unknot()), 0);
        assert_eq!(carrier_genus(&parse_pd("PD[X[1,1,2,2]]").unwrap()), 0);
    }

    #[test]
    fn kink_insertion_on_unknot() {
        let k = insert_r1(&PlanarDiagram::unknot(), ArcRef::FreeLoop(0), Sign::Pos, true).unwrap();
        assert_eq!(serialize_pd(&k), "PD[X[1,1,2,2]]");
        assert!(insert_r1(&PlanarDiagram::unknot(), ArcRef::Arc(1), Sign::Pos, true).is_err());
    }

    #[test]
    fn r2_insertion_preserves_parity() {
        let d = parse_pd(VK31).unwrap();
        let before = d.parity();
        for a in d.arc_refs() {
            for b in d.arc_refs() {
                for sign in [Sign::Pos, Sign::Neg] {
                    for rev in [false, true] {
                        let e = insert_r2(&d, a, b, sign, rev).unwrap();
                        let after = e.parity();
                        assert_eq!(&after[..3], &before[..], "{a:?} {b:?}");
                        assert_eq!(after[3], after[4]);
                        assert_eq!(e.writhe(), d.writhe());
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Random Gauss codes: a perfect matching of positions into crossings.
        pub fn gauss_strategy(max_crossings: usize, max_components: usize) -> impl Strategy<Value = GaussCode> {
            (1..=max_crossings, 1..=max_components, any::<u64>()).prop_map(|(n, k, seed)| {
                use rand::{seq::SliceRandom, Rng, SeedableRng};
                let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
                let mut slots: Vec<(Pass, u32, Sign)> = Vec::new();
                for id in 1..=n as u32 {
                    let s = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
                    slots.push((Pass::Over, id, s));
                    slots.push((Pass::Under, id, s));
                }
                slots.shuffle(&mut rng);
                let mut cuts: Vec<usize> = (0..k - 1).map(|_| rng.gen_range(0..=slots.len())).collect();
                cuts.sort();
                let mut comps = Vec::new();
                let mut prev = 0;
                for c in cuts.into_iter().chain([slots.len()]) {
                    comps.push(slots[prev..c].iter().map(|&(pass, id, sign)| GaussEntry { pass, id, sign }).collect());
                    prev = c;
                }
                GaussCode { components: comps }
            })
        }

        proptest! {
            #[test]
            fn pd_round_trip(g in gauss_strategy(6, 3)) {
                let d = gauss_to_pd(&g).unwrap();
                let text = serialize_pd(&d);
                prop_assert_eq!(parse_pd(&text).unwrap(), d.clone());
                prop_assert_eq!(gauss_to_pd(&pd_to_gauss(&d)).unwrap(), d);
            }

            #[test]
            fn shortcut_parity_agrees_for_knots(g in gauss_strategy(7, 1)) {
                let d = gauss_to_pd(&g).unwrap();
                prop_assert_eq!(d.parity(), d.parity_shortcut());
            }

            #[test]
            fn carrier_genus_ignores_basepoint(g in gauss_strategy(6, 2), shift in 0usize..12) {
                let d = gauss_to_pd(&g).unwrap();
                let rotated = gauss_to_pd(&g.rotate(0, shift)).unwrap();
                prop_assert_eq!(carrier_genus(&d), carrier_genus(&rotated));
                let mut rev = g.clone();
                rev.components.reverse();
                prop_assert_eq!(carrier_genus(&d), carrier_genus(&gauss_to_pd(&rev).unwrap()));
            }

            #[test]
            fn filtration_terminates(g in gauss_strategy(7, 2)) {
                let d = gauss_to_pd(&g).unwrap();
                let f = filtration(&d);
                prop_assert!(f.len() <= d.len() + 1);
                prop_assert!(f.last().unwrap().is_classical_parity());
            }
        }
    }
}
