//! Partial Brauer diagrams: set partitions of `{1..r, 1'..r'}` into blocks of
//! size at most two, their stacking product, and the presentation by `s_i`,
//! `e_i`, `p_j`.
//!
//! A diagram is stored as its mate involution over `2r` vertices: top vertex
//! `i` is `i-1`, bottom vertex `i'` is `r+i-1`, and a singleton is its own
//! mate. The involution is already canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalars::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Top(usize),
    Bottom(usize),
}

impl Vertex {
    fn index(self, r: usize) -> usize {
        match self {
            Vertex::Top(i) => i - 1,
            Vertex::Bottom(i) => r + i - 1,
        }
    }

    fn from_index(v: usize, r: usize) -> Self {
        if v < r {
            Vertex::Top(v + 1)
        } else {
            Vertex::Bottom(v - r + 1)
        }
    }

    fn label(self) -> usize {
        match self {
            Vertex::Top(i) | Vertex::Bottom(i) => i,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Top(i) => write!(f, "{i}"),
            Vertex::Bottom(i) => write!(f, "{i}'"),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, bottom) = match s.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let i: usize = body.parse().map_err(|_| Error::Parse(format!("bad vertex `{s}`")))?;
        if i == 0 {
            return Err(Error::Parse("vertices are numbered from 1".into()));
        }
        Ok(if bottom { Vertex::Bottom(i) } else { Vertex::Top(i) })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialDiagram {
    r: usize,
    mate: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    All,
    Brauer,
    Rook,
    Permutation,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "brauer" => Ok(Family::Brauer),
            "rook" => Ok(Family::Rook),
            "permutation" => Ok(Family::Permutation),
            _ => Err(Error::Parse(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gen {
    S(usize),
    E(usize),
    P(usize),
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::S(i) => write!(f, "s{i}"),
            Gen::E(i) => write!(f, "e{i}"),
            Gen::P(i) => write!(f, "p{i}"),
        }
    }
}

impl PartialDiagram {
    pub fn identity(r: usize) -> Self {
        let mate = (0..2 * r).map(|v| if v < r { v + r } else { v - r }).collect();
        PartialDiagram { r, mate }
    }

    /// Builds a diagram from its mate involution, validating it.
    pub fn from_mate(r: usize, mate: Vec<usize>) -> Result<Self> {
        if mate.len() != 2 * r {
            return Err(Error::Dimension(format!("{} vertices for r = {r}", mate.len())));
        }
        for (v, &w) in mate.iter().enumerate() {
            if w >= 2 * r || mate[w] != v {
                return Err(Error::Domain("not an involution of the 2r vertices".into()));
            }
        }
        Ok(PartialDiagram { r, mate })
    }

    /// Blocks must cover every vertex exactly once; singletons are listed explicitly.
    pub fn from_blocks(r: usize, blocks: &[Vec<Vertex>]) -> Result<Self> {
        let mut mate = vec![usize::MAX; 2 * r];
        for block in blocks {
            let idx: Vec<usize> = block
                .iter()
                .map(|v| {
                    if v.label() > r {
                        Err(Error::Index(format!("vertex {v} exceeds r = {r}")))
                    } else {
                        Ok(v.index(r))
                    }
                })
                .collect::<Result<_>>()?;
            let (a, b) = match idx[..] {
                [a] => (a, a),
                [a, b] if a != b => (a, b),
                _ => return Err(Error::Domain("blocks have one or two distinct vertices".into())),
            };
            if mate[a] != usize::MAX || mate[b] != usize::MAX {
                return Err(Error::Domain(format!("vertex repeated in blocks of r = {r}")));
            }
            mate[a] = b;
            mate[b] = a;
        }
        if mate.contains(&usize::MAX) {
            return Err(Error::Domain("blocks do not cover every vertex".into()));
        }
        Ok(PartialDiagram { r, mate })
    }

    /// Parses `"1-2',2-1'"`; every vertex must appear.
    pub fn parse(r: usize, text: &str) -> Result<Self> {
        let blocks = parse_blocks(text)?;
        PartialDiagram::from_blocks(r, &blocks)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mate(&self, v: Vertex) -> Vertex {
        Vertex::from_index(self.mate[v.index(self.r)], self.r)
    }

    pub fn mates(&self) -> &[usize] {
        &self.mate
    }

    /// Blocks in canonical order: by least vertex, top row before bottom row.
    pub fn blocks(&self) -> Vec<Vec<Vertex>> {
        (0..2 * self.r)
            .filter(|&v| self.mate[v] >= v)
            .map(|v| {
                let w = self.mate[v];
                if w == v {
                    vec![Vertex::from_index(v, self.r)]
                } else {
                    vec![Vertex::from_index(v, self.r), Vertex::from_index(w, self.r)]
                }
            })
            .collect()
    }

    pub fn singleton_count(&self) -> usize {
        self.mate.iter().enumerate().filter(|(v, w)| v == *w).count()
    }

    pub fn is_brauer(&self) -> bool {
        self.singleton_count() == 0
    }

    /// No two vertices of the same row are paired.
    pub fn is_rook(&self) -> bool {
        let r = self.r;
        self.mate.iter().enumerate().all(|(v, &w)| v == w || (v < r) != (w < r))
    }

    pub fn is_permutation(&self) -> bool {
        self.is_brauer() && self.is_rook()
    }

    pub fn in_family(&self, family: Family) -> bool {
        match family {
            Family::All => true,
            Family::Brauer => self.is_brauer(),
            Family::Rook => self.is_rook(),
            Family::Permutation => self.is_permutation(),
        }
    }

    /// Number of vertical (top–bottom) blocks, the propagating number.
    pub fn propagating_number(&self) -> usize {
        (0..self.r).filter(|&v| self.mate[v] >= self.r).count()
    }

    /// Flip top and bottom rows.
    pub fn transpose(&self) -> Self {
        let r = self.r;
        let flip = |v: usize| if v < r { v + r } else { v - r };
        let mut mate = vec![0; 2 * r];
        for v in 0..2 * r {
            mate[flip(v)] = flip(self.mate[v]);
        }
        PartialDiagram { r, mate }
    }
}

impl fmt::Display for PartialDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(Vertex::to_string).collect::<Vec<_>>().join("-"))
            .collect();
        write!(f, "{}", text.join(","))
    }
}

impl fmt::Debug for PartialDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialDiagram({}; {})", self.r, self)
    }
}

fn parse_blocks(text: &str) -> Result<Vec<Vec<Vertex>>> {
    text.split(',')
        .filter(|b| !b.trim().is_empty())
        .map(|b| b.split('-').map(str::parse).collect::<Result<Vec<Vertex>>>())
        .collect()
}

/// Parses text with `r` taken as the largest label present.
impl FromStr for PartialDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = parse_blocks(s)?;
        let r = blocks.iter().flatten().map(|v| v.label()).max().unwrap_or(0);
        PartialDiagram::from_blocks(r, &blocks)
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    r: usize,
    blocks: Vec<Vec<String>>,
}

impl Serialize for PartialDiagram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks = self.blocks().iter().map(|b| b.iter().map(Vertex::to_string).collect()).collect();
        DiagramJson { r: self.r, blocks }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartialDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DiagramJson::deserialize(deserializer)?;
        let blocks = raw
            .blocks
            .iter()
            .map(|b| b.iter().map(|v| v.parse()).collect::<Result<Vec<Vertex>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PartialDiagram::from_blocks(raw.r, &blocks).map_err(serde::de::Error::custom)
    }
}

/// `d1 ∘ d2` with the counts of removed middle loops (`N₁`) and non-loops (`N₂`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductTrace {
    pub result: PartialDiagram,
    pub loops: usize,
    pub non_loops: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Stacks `d1` above `d2`.
///
/// Stacked vertices: `d1`'s top row `0..r`, the identified middle row `r..2r`,
/// `d2`'s bottom row `2r..3r`. A component confined to the middle row is a loop
/// when it has as many edges as vertices (a cycle), otherwise a non-loop
/// (a path, possibly a single isolated vertex).
pub fn compose(d1: &PartialDiagram, d2: &PartialDiagram) -> Result<ProductTrace> {
    if d1.r != d2.r {
        return Err(Error::Dimension(format!("cannot stack r = {} over r = {}", d1.r, d2.r)));
    }
    let r = d1.r;
    let mut uf = UnionFind::new(3 * r);
    let mut edges = vec![0usize; 3 * r];
    // d1's vertices map to themselves; d2's are shifted by r
    for (d, shift) in [(d1, 0), (d2, r)] {
        for (v, &w) in d.mate.iter().enumerate() {
            if v < w {
                uf.union(v + shift, w + shift);
                edges[v + shift] += 1;
            }
        }
    }
    let mut comp_vertices: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_edges: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_outer: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..3 * r {
        let root = uf.find(v);
        *comp_vertices.entry(root).or_default() += 1;
        *comp_edges.entry(root).or_default() += edges[v];
        if v < r || v >= 2 * r {
            comp_outer.entry(root).or_default().push(v);
        }
    }
    let (mut loops, mut non_loops) = (0, 0);
    for (root, &nv) in &comp_vertices {
        if !comp_outer.contains_key(root) {
            if comp_edges[root] == nv {
                loops += 1;
            } else {
                non_loops += 1;
            }
        }
    }
    // result vertices: top 0..r stay, bottom 2r..3r become r..2r
    let relabel = |v: usize| if v < r { v } else { v - r };
    let mut mate = vec![0; 2 * r];
    for outer in comp_outer.values() {
        match outer[..] {
            [a] => mate[relabel(a)] = relabel(a),
            [a, b] => {
                mate[relabel(a)] = relabel(b);
                mate[relabel(b)] = relabel(a);
            }
            _ => unreachable!("components have at most two outer endpoints"),
        }
    }
    Ok(ProductTrace { result: PartialDiagram { r, mate }, loops, non_loops })
}

/// The generators `s_i`, `e_i` (`1 ≤ i < r`) and `p_j` (`1 ≤ j ≤ r`).
pub fn generator(g: Gen, r: usize) -> Result<PartialDiagram> {
    let (i, hi) = match g {
        Gen::S(i) | Gen::E(i) => (i, r.saturating_sub(1)),
        Gen::P(j) => (j, r),
    };
    if i < 1 || i > hi {
        return Err(Error::Index(format!("{g} outside 1..={hi} for r = {r}")));
    }
    let mut d = PartialDiagram::identity(r);
    let (t, b) = (|k: usize| k - 1, |k: usize| r + k - 1);
    let mut pair = |x: usize, y: usize| {
        d.mate[x] = y;
        d.mate[y] = x;
    };
    match g {
        Gen::S(i) => {
            pair(t(i), b(i + 1));
            pair(t(i + 1), b(i));
        }
        Gen::E(i) => {
            pair(t(i), t(i + 1));
            pair(b(i), b(i + 1));
        }
        Gen::P(j) => {
            pair(t(j), t(j));
            pair(b(j), b(j));
        }
    }
    Ok(d)
}

/// All diagrams of a family, in canonical (sorted) order.
pub fn enumerate(r: usize, family: Family) -> Vec<PartialDiagram> {
    fn go(r: usize, family: Family, mate: &mut Vec<usize>, out: &mut Vec<PartialDiagram>) {
        let Some(v) = mate.iter().position(|&m| m == usize::MAX) else {
            out.push(PartialDiagram { r, mate: mate.clone() });
            return;
        };
        let singletons = matches!(family, Family::All | Family::Rook);
        let same_row = matches!(family, Family::All | Family::Brauer);
        if singletons {
            mate[v] = v;
            go(r, family, mate, out);
            mate[v] = usize::MAX;
        }
        for w in v + 1..2 * r {
            if mate[w] != usize::MAX || (!same_row && (v < r) == (w < r)) {
                continue;
            }
            mate[v] = w;
            mate[w] = v;
            go(r, family, mate, out);
            mate[v] = usize::MAX;
            mate[w] = usize::MAX;
        }
    }
    let mut out = Vec::new();
    go(r, family, &mut vec![usize::MAX; 2 * r], &mut out);
    out.sort();
    out
}

/// Counts set partitions of `2r` points into blocks of size ≤ 2 by walking
/// restricted growth strings; independent of [`enumerate`].
pub fn brute_force_count(r: usize, family: Family) -> usize {
    let n = 2 * r;
    let mut a = vec![0usize; n];
    let mut count = 0;
    loop {
        let blocks = a.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); blocks];
        for (v, &b) in a.iter().enumerate() {
            members[b].push(v);
        }
        let ok = members.iter().all(|m| {
            m.len() <= 2
                && match family {
                    Family::All => true,
                    Family::Brauer => m.len() == 2,
                    Family::Rook => m.len() == 1 || (m[0] < r) != (m[1] < r),
                    Family::Permutation => m.len() == 2 && (m[0] < r) != (m[1] < r),
                }
        });
        if ok || n == 0 {
            count += 1;
        }
        if n == 0 {
            return count;
        }
        // next restricted growth string: a[0] = 0, a[i] ≤ 1 + max(a[..i])
        let mut i = n - 1;
        loop {
            if i == 0 {
                return count;
            }
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= prefix_max {
                a[i] += 1;
                for x in &mut a[i + 1..] {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// A linear combination of diagrams; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<F: Field> {
    r: usize,
    terms: BTreeMap<PartialDiagram, F>,
}

impl<F: Field> AlgebraElement<F> {
    pub fn zero(r: usize) -> Self {
        AlgebraElement { r, terms: BTreeMap::new() }
    }

    pub fn basis(d: PartialDiagram) -> Self {
        Self::term(F::one(), d)
    }

    pub fn term(c: F, d: PartialDiagram) -> Self {
        let mut e = Self::zero(d.r);
        e.add_term(c, d);
        e
    }

    pub fn identity(r: usize) -> Self {
        Self::basis(PartialDiagram::identity(r))
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn terms(&self) -> &BTreeMap<PartialDiagram, F> {
        &self.terms
    }

    pub fn coefficient(&self, d: &PartialDiagram) -> F {
        self.terms.get(d).cloned().unwrap_or_else(F::zero)
    }

    fn add_term(&mut self, c: F, d: PartialDiagram) {
        let sum = match self.terms.remove(&d) {
            Some(old) => old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(d, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::Dimension("adding elements of different r".into()));
        }
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(c.clone(), d.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = Self::zero(self.r);
        for (d, c) in &self.terms {
            out.add_term(c.clone() * s, d.clone());
        }
        out
    }

    /// Product in `PB_r(δ, δ′)`: each stacked pair picks up `δ^{N₁} δ′^{N₂}`.
    pub fn multiply(&self, other: &Self, delta: &F, delta_prime: &F) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::Dimension(format!("multiplying r = {} by r = {}", self.r, other.r)));
        }
        let mut out = Self::zero(self.r);
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                let t = compose(d1, d2)?;
                let w = delta.powu(t.loops as u32) * &delta_prime.powu(t.non_loops as u32);
                out.add_term(c1.clone() * c2 * &w, t.result);
            }
        }
        Ok(out)
    }

    /// Approximate comparison for floating coefficients.
    pub fn close(&self, other: &Self, tol: f64) -> bool {
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|d| self.coefficient(d).close(&other.coefficient(d), tol))
    }
}

pub fn word_element<F: Field>(word: &[Gen], r: usize, delta: &F, delta_prime: &F) -> Result<AlgebraElement<F>> {
    let mut acc = AlgebraElement::identity(r);
    for &g in word {
        acc = acc.multiply(&AlgebraElement::basis(generator(g, r)?), delta, delta_prime)?;
    }
    Ok(acc)
}

/// Scalar multiplier on one side of a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    One,
    Delta,
    DeltaPrime,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub part: char,
    pub name: String,
    pub lhs: Vec<Gen>,
    pub rhs_weight: Weight,
    pub rhs: Vec<Gen>,
}

fn word_text(w: &[Gen]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter().map(Gen::to_string).collect()
    }
}

/// Every instance of the presentation's relations for a given `r`.
pub fn presentation_relations(r: usize) -> Vec<Relation> {
    use Gen::{E, P, S};
    let mut rels = Vec::new();
    let mut add = |part: char, lhs: Vec<Gen>, rhs_weight: Weight, rhs: Vec<Gen>| {
        let w = match rhs_weight {
            Weight::One => "",
            Weight::Delta => "δ ",
            Weight::DeltaPrime => "δ' ",
        };
        let name = format!("{} = {w}{}", word_text(&lhs), word_text(&rhs));
        rels.push(Relation { part, name, lhs, rhs_weight, rhs });
    };
    let m = r.saturating_sub(1);
    // (a)
    for i in 1..=m {
        add('a', vec![S(i), S(i)], Weight::One, vec![]);
        if i < m {
            add('a', vec![S(i), S(i + 1), S(i)], Weight::One, vec![S(i + 1), S(i), S(i + 1)]);
        }
        for j in i + 2..=m {
            add('a', vec![S(i), S(j)], Weight::One, vec![S(j), S(i)]);
        }
    }
    // (b)
    for i in 1..=m {
        add('b', vec![E(i), E(i)], Weight::Delta, vec![E(i)]);
        add('b', vec![S(i), E(i)], Weight::One, vec![E(i)]);
        add('b', vec![E(i), S(i)], Weight::One, vec![E(i)]);
        let neighbours = [i.checked_sub(1).filter(|&k| k >= 1), (i < m).then_some(i + 1)];
        for k in neighbours.into_iter().flatten() {
            add('b', vec![E(i), E(k), E(i)], Weight::One, vec![E(i)]);
            add('b', vec![S(i), E(k), E(i)], Weight::One, vec![S(k), E(i)]);
            add('b', vec![E(i), E(k), S(i)], Weight::One, vec![E(i), S(k)]);
        }
        for j in 1..=m {
            if i.abs_diff(j) > 1 {
                if i < j {
                    add('b', vec![E(i), E(j)], Weight::One, vec![E(j), E(i)]);
                }
                add('b', vec![E(i), S(j)], Weight::One, vec![S(j), E(i)]);
            }
        }
    }
    // (c)
    for i in 1..=r {
        add('c', vec![P(i), P(i)], Weight::DeltaPrime, vec![P(i)]);
        for j in i + 1..=r {
            add('c', vec![P(i), P(j)], Weight::One, vec![P(j), P(i)]);
        }
    }
    for i in 1..=m {
        add('c', vec![P(i), S(i), P(i)], Weight::One, vec![P(i), P(i + 1)]);
        add('c', vec![S(i), P(i)], Weight::One, vec![P(i + 1), S(i)]);
        for j in (1..=r).filter(|&j| j != i && j != i + 1) {
            add('c', vec![S(i), P(j)], Weight::One, vec![P(j), S(i)]);
        }
    }
    // (d)
    for i in 1..=m {
        add('d', vec![E(i), P(i), E(i)], Weight::DeltaPrime, vec![E(i)]);
        add('d', vec![E(i), P(i), P(i + 1)], Weight::DeltaPrime, vec![E(i), P(i)]);
        add('d', vec![P(i), P(i + 1), E(i)], Weight::DeltaPrime, vec![P(i), E(i)]);
        add('d', vec![P(i), E(i), P(i)], Weight::One, vec![P(i), P(i + 1)]);
        add('d', vec![E(i), P(i)], Weight::One, vec![E(i), P(i + 1)]);
        add('d', vec![P(i), E(i)], Weight::One, vec![P(i + 1), E(i)]);
        for j in (1..=r).filter(|&j| j != i && j != i + 1) {
            add('d', vec![E(i), P(j)], Weight::One, vec![P(j), E(i)]);
        }
    }
    rels
}

/// Evaluates both sides of every relation by diagram multiplication.
pub fn verify_presentation<F: Field>(r: usize, delta: &F, delta_prime: &F) -> Result<Report> {
    if r < 2 {
        return Err(Error::Domain("the presentation needs r >= 2".into()));
    }
    let mut rep = Report::new();
    for rel in presentation_relations(r) {
        let lhs = word_element(&rel.lhs, r, delta, delta_prime)?;
        let w = match rel.rhs_weight {
            Weight::One => F::one(),
            Weight::Delta => delta.clone(),
            Weight::DeltaPrime => delta_prime.clone(),
        };
        let rhs = word_element(&rel.rhs, r, delta, delta_prime)?.scale(&w);
        let pass = lhs == rhs || (!F::EXACT && lhs.close(&rhs, 1e-12));
        rep.flag(format!("({}) {}", rel.part, rel.name), pass);
    }
    Ok(rep)
}

/// `φ(d) = δ′^{-S(d)/2} d`, `S` the singleton count: a homomorphism `PB_r(δ, 1) → PB_r(δ, δ′)`.
pub fn scaling_map<F: Field>(x: &AlgebraElement<F>, delta_prime: &F) -> AlgebraElement<F> {
    let mut out = AlgebraElement::zero(x.r);
    let inv = F::one() / delta_prime.clone();
    for (d, c) in &x.terms {
        out.add_term(c.clone() * &inv.powu((d.singleton_count() / 2) as u32), d.clone());
    }
    out
}

/// Checks `φ(xy) = φ(x)φ(y)` on generator pairs (and on all diagram pairs when `r ≤ 3`).
pub fn scaling_iso_check<F: Field>(r: usize, delta: &F, delta_prime: &F) -> Result<Report> {
    if delta_prime.is_zero() {
        return Err(Error::Domain("δ' = 0: the rescaling is undefined".into()));
    }
    let one = F::one();
    let mut rep = Report::new();
    let mut gens: Vec<Gen> = (1..r).flat_map(|i| [Gen::S(i), Gen::E(i)]).collect();
    gens.extend((1..=r).map(Gen::P));
    let mut items: Vec<(String, PartialDiagram)> =
        gens.iter().map(|&g| Ok((g.to_string(), generator(g, r)?))).collect::<Result<_>>()?;
    items.push(("1".into(), PartialDiagram::identity(r)));
    if r <= 3 {
        items.extend(enumerate(r, Family::All).into_iter().map(|d| (d.to_string(), d)));
    }
    let id = AlgebraElement::<F>::identity(r);
    rep.flag("phi(1) = 1", scaling_map(&id, delta_prime) == id);
    let mut ok = true;
    let mut first_failure = None;
    for (na, a) in &items {
        for (nb, b) in &items {
            let (x, y) = (AlgebraElement::basis(a.clone()), AlgebraElement::basis(b.clone()));
            let lhs = scaling_map(&x.multiply(&y, delta, &one)?, delta_prime);
            let rhs = scaling_map(&x, delta_prime).multiply(&scaling_map(&y, delta_prime), delta, delta_prime)?;
            let pass = lhs == rhs || (!F::EXACT && lhs.close(&rhs, 1e-12));
            if !pass && first_failure.is_none() {
                first_failure = Some(format!("[{na}] * [{nb}]"));
            }
            ok &= pass;
        }
    }
    match first_failure {
        Some(f) => rep.flag_with("phi(xy) = phi(x)phi(y)", false, f),
        None => rep.flag_with("phi(xy) = phi(x)phi(y)", ok, format!("{} pairs", items.len() * items.len())),
    }
    Ok(rep)
}
