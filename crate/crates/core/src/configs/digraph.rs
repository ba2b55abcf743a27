//! Edge-colored digraphs from superimposed configurations: connected
//! components, the three-way component taxonomy, and the reduce/expand
//! correspondence on type-3 components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::configs::{a_name, r_name, x_name};
use crate::error::{Error, Result};
use crate::polyring::{ParamSet, Polynomial, Rat};

/// Per-edge insertion sequences for [`ColoredDigraph::expand_type3`]: the
/// edge identified by `(source, color)` receives the listed fresh labels in
/// path order, each placed in the `B` of the named other owner.
pub type Insertions = BTreeMap<(u32, usize), Vec<(u32, usize)>>;

/// A vertex's two memberships: `(owner, in_cycle)` sorted by owner. A
/// vertex with `in_cycle` for owner `i` lies on a color-`i` cycle; otherwise
/// it sits in that configuration's `B`.
pub type Memberships = [(usize, bool); 2];

/// Superposition of up to `k` disjoint-cycle digraphs over one vertex set,
/// with edges colored by owner. Equality is label-sensitive; no isomorphism
/// testing is ever involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredDigraph {
    k: usize,
    edges: BTreeMap<(u32, usize), u32>,
    memberships: BTreeMap<u32, Memberships>,
}

/// The taxonomy of connected components: an isolated vertex shared by two
/// `B` sets, a single cycle whose vertices appear in no other permutation,
/// or anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentType {
    Type1 { i: usize, j: usize },
    Type2 { i: usize },
    Type3,
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentType::Type1 { i, j } => write!(f, "type1({i},{j})"),
            ComponentType::Type2 { i } => write!(f, "type2({i})"),
            ComponentType::Type3 => write!(f, "type3"),
        }
    }
}

impl ColoredDigraph {
    /// Validating constructor. Edges map `(source, color) -> target`;
    /// memberships give each vertex's two owners. Every vertex marked
    /// `in_cycle` for a color must have exactly one outgoing and one
    /// incoming edge of that color, and no edges of its non-cycle colors.
    pub fn new(
        k: usize,
        edges: BTreeMap<(u32, usize), u32>,
        mut memberships: BTreeMap<u32, Memberships>,
    ) -> Result<Self> {
        for rec in memberships.values_mut() {
            rec.sort();
        }
        let g = ColoredDigraph { k, edges, memberships };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidStructure("need at least two colors".into()));
        }
        for (&v, rec) in &self.memberships {
            let [(i, _), (j, _)] = *rec;
            if !(1 <= i && i < j && j <= self.k) {
                return Err(Error::InvalidStructure(format!(
                    "vertex {v} must have two distinct owners in 1..={}",
                    self.k
                )));
            }
        }
        let mut indegree: BTreeMap<(u32, usize), u32> = BTreeMap::new();
        for (&(src, color), &dst) in &self.edges {
            if color < 1 || color > self.k {
                return Err(Error::InvalidStructure(format!(
                    "edge {src}->{dst} has invalid color {color}"
                )));
            }
            for endpoint in [src, dst] {
                let in_cycle = self
                    .memberships
                    .get(&endpoint)
                    .ok_or_else(|| {
                        Error::InvalidStructure(format!(
                            "edge endpoint {endpoint} is not a vertex"
                        ))
                    })?
                    .iter()
                    .any(|&(o, c)| o == color && c);
                if !in_cycle {
                    return Err(Error::InvalidStructure(format!(
                        "vertex {endpoint} carries a color-{color} edge without being \
                         on a color-{color} cycle"
                    )));
                }
            }
            *indegree.entry((dst, color)).or_default() += 1;
        }
        for (&v, rec) in &self.memberships {
            for &(o, in_cycle) in rec {
                let has_out = self.edges.contains_key(&(v, o));
                let ins = indegree.get(&(v, o)).copied().unwrap_or(0);
                if in_cycle && !(has_out && ins == 1) {
                    return Err(Error::InvalidStructure(format!(
                        "vertex {v} is on a color-{o} cycle but lacks matching edges"
                    )));
                }
                if !in_cycle && (has_out || ins > 0) {
                    return Err(Error::InvalidStructure(format!(
                        "vertex {v} is in B_{o} yet has color-{o} edges"
                    )));
                }
            }
        }
        Ok(())
    }

    fn from_parts(
        k: usize,
        edges: BTreeMap<(u32, usize), u32>,
        memberships: BTreeMap<u32, Memberships>,
    ) -> Self {
        let g = ColoredDigraph { k, edges, memberships };
        debug_assert!(g.validate().is_ok());
        g
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.memberships.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.memberships.len()
    }

    /// Edges as `(source, target, color)`, sorted by `(source, color)`.
    pub fn edge_list(&self) -> Vec<(u32, u32, usize)> {
        self.edges
            .iter()
            .map(|(&(src, color), &dst)| (src, dst, color))
            .collect()
    }

    pub fn edge_target(&self, src: u32, color: usize) -> Option<u32> {
        self.edges.get(&(src, color)).copied()
    }

    pub fn memberships(&self, v: u32) -> Option<Memberships> {
        self.memberships.get(&v).copied()
    }

    /// The two owners of a vertex, ascending.
    fn owner_pair(&self, v: u32) -> (usize, usize) {
        let [(i, _), (j, _)] = self.memberships[&v];
        (i, j)
    }

    /// Weakly connected components (edge direction ignored), ordered by
    /// minimum vertex label.
    pub fn components(&self) -> Vec<ColoredDigraph> {
        let mut adjacency: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (&(src, _), &dst) in &self.edges {
            adjacency.entry(src).or_default().push(dst);
            adjacency.entry(dst).or_default().push(src);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.memberships.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            let mut verts = BTreeSet::new();
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                verts.insert(v);
                if let Some(nbrs) = adjacency.get(&v) {
                    stack.extend(nbrs.iter().copied());
                }
            }
            let edges = self
                .edges
                .iter()
                .filter(|((src, _), _)| verts.contains(src))
                .map(|(&key, &dst)| (key, dst))
                .collect();
            let memberships = verts
                .iter()
                .map(|&v| (v, self.memberships[&v]))
                .collect();
            out.push(ColoredDigraph::from_parts(self.k, edges, memberships));
        }
        out
    }

    /// Classifies a connected component. Meaningful only on the output of
    /// [`ColoredDigraph::components`].
    pub fn classify(&self) -> ComponentType {
        if self.edges.is_empty() && self.memberships.len() == 1 {
            let (&v, _) = self.memberships.iter().next().unwrap();
            let (i, j) = self.owner_pair(v);
            return ComponentType::Type1 { i, j };
        }
        let colors: BTreeSet<usize> = self.edges.keys().map(|&(_, c)| c).collect();
        if colors.len() == 1 {
            let i = *colors.iter().next().unwrap();
            let pure_cycle = self.memberships.values().all(|rec| {
                rec.iter()
                    .all(|&(o, in_cycle)| if o == i { in_cycle } else { !in_cycle })
            });
            if pure_cycle {
                return ComponentType::Type2 { i };
            }
        }
        ComponentType::Type3
    }

    /// Number of color-`i` cycles contained in this digraph.
    fn cycle_count(&self, color: usize) -> u32 {
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut cycles = 0;
        for &(src, c) in self.edges.keys() {
            if c != color || seen.contains(&src) {
                continue;
            }
            cycles += 1;
            let mut v = src;
            while seen.insert(v) {
                v = self.edges[&(v, color)];
            }
        }
        cycles
    }

    /// The digraph's weight: `a_i` per color-`i` cycle, `r_o` per vertex
    /// membership in a `B_o`, and `x_ij` per vertex with owner pair
    /// `{i,j}`. Summed over an entire superposition this reproduces the
    /// tuple weight; on a component it is that component's share.
    pub fn weight(&self, params: &Arc<ParamSet>) -> Polynomial {
        let mut exps: BTreeMap<String, u32> = BTreeMap::new();
        for color in 1..=self.k {
            let cycles = self.cycle_count(color);
            if cycles > 0 {
                *exps.entry(a_name(color)).or_default() += cycles;
            }
        }
        for (&v, rec) in &self.memberships {
            for &(o, in_cycle) in rec {
                if !in_cycle {
                    *exps.entry(r_name(o)).or_default() += 1;
                }
            }
            let (i, j) = self.owner_pair(v);
            *exps.entry(x_name(i, j)).or_default() += 1;
        }
        let pairs: Vec<(&str, u32)> = exps.iter().map(|(s, &e)| (s.as_str(), e)).collect();
        Polynomial::term(params, Rat::one(), &pairs)
    }

    /// Splices out every vertex that lies on only one permutation,
    /// recording, per surviving edge, the removed run and each removed
    /// vertex's `B`-owner. Requires every component to be type 3.
    /// `expand_type3` applied to the result restores `self` exactly.
    pub fn decompose_type3(&self) -> Result<(ColoredDigraph, Insertions)> {
        if self.components().iter().any(|c| c.classify() != ComponentType::Type3) {
            return Err(Error::NotType3);
        }
        let two_perm = |v: u32| self.memberships[&v].iter().all(|&(_, c)| c);
        let free_owner = |v: u32| {
            self.memberships[&v]
                .iter()
                .find(|&&(_, c)| !c)
                .map(|&(o, _)| o)
                .expect("a removable vertex has a free owner")
        };
        let mut edges = BTreeMap::new();
        let mut insertions: Insertions = BTreeMap::new();
        for (&(src, color), &first) in &self.edges {
            if !two_perm(src) {
                continue;
            }
            let mut run = Vec::new();
            let mut dst = first;
            while !two_perm(dst) {
                run.push((dst, free_owner(dst)));
                dst = self.edges[&(dst, color)];
                if run.len() > self.memberships.len() {
                    return Err(Error::InvalidStructure(
                        "color cycle without a two-permutation vertex".into(),
                    ));
                }
            }
            edges.insert((src, color), dst);
            if !run.is_empty() {
                insertions.insert((src, color), run);
            }
        }
        let memberships = self
            .memberships
            .iter()
            .filter(|(&v, _)| two_perm(v))
            .map(|(&v, &rec)| (v, rec))
            .collect();
        Ok((
            ColoredDigraph::from_parts(self.k, edges, memberships),
            insertions,
        ))
    }

    /// [`ColoredDigraph::decompose_type3`] without the insertion record.
    pub fn reduce_type3(&self) -> Result<ColoredDigraph> {
        self.decompose_type3().map(|(d, _)| d)
    }

    /// Replaces each color-`i` edge `(u, v)` that has an insertion sequence
    /// `w_1..w_m` by the color-`i` path `u -> w_1 -> .. -> w_m -> v`; each
    /// `w` joins only `σ_i`, and is placed in the `B` of its recorded other
    /// owner. Requires `self` reduced (every vertex on two permutations),
    /// fresh distinct labels, and other-owners different from the edge
    /// color.
    pub fn expand_type3(&self, insertions: &Insertions) -> Result<ColoredDigraph> {
        if !self
            .memberships
            .values()
            .all(|rec| rec.iter().all(|&(_, c)| c))
        {
            return Err(Error::InvalidStructure(
                "expansion requires a reduced digraph".into(),
            ));
        }
        let mut used: BTreeSet<u32> = self.memberships.keys().copied().collect();
        let mut edges = self.edges.clone();
        let mut memberships = self.memberships.clone();
        for (&(src, color), run) in insertions {
            let end = *self.edges.get(&(src, color)).ok_or_else(|| {
                Error::InvalidStructure(format!(
                    "no color-{color} edge out of {src} to expand"
                ))
            })?;
            let mut prev = src;
            for &(label, owner) in run {
                if !used.insert(label) {
                    return Err(Error::LabelCollision(label));
                }
                if owner == color || owner < 1 || owner > self.k {
                    return Err(Error::InvalidStructure(format!(
                        "inserted vertex {label} must join a configuration other \
                         than {color}"
                    )));
                }
                let mut rec = [(color, true), (owner, false)];
                rec.sort();
                memberships.insert(label, rec);
                edges.insert((prev, color), label);
                prev = label;
            }
            edges.insert((prev, color), end);
        }
        ColoredDigraph::new(self.k, edges, memberships)
    }

    /// Debug listing: one line per edge (`src dst color`), then one line
    /// per vertex (`label` followed by `A<owner>`/`B<owner>` markers).
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .edges
            .iter()
            .map(|(&(src, color), &dst)| format!("{src} {dst} {color}"))
            .collect();
        for (&v, rec) in &self.memberships {
            let marks = rec
                .iter()
                .map(|&(o, c)| format!("{}{o}", if c { "A" } else { "B" }))
                .join(" ");
            lines.push(format!("{v} {marks}"));
        }
        lines.join("\n")
    }
}

impl fmt::Display for ColoredDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

/// Random reduced digraph: distinct labels, a random owner pair per vertex,
/// and a uniform permutation on each induced vertex set, every vertex on
/// both of its permutations. Every component of such a digraph is type 3.
pub fn random_reduced_digraph<R: Rng + ?Sized>(rng: &mut R, k: usize) -> ColoredDigraph {
    assert!(k >= 2);
    let m = rng.gen_range(2..=8usize);
    let mut pool: Vec<u32> = (1..=24).collect();
    pool.shuffle(rng);
    let mut labels: Vec<u32> = pool.into_iter().take(m).collect();
    labels.sort_unstable();

    let mut memberships = BTreeMap::new();
    let mut by_color: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for &v in &labels {
        let i = rng.gen_range(1..=k);
        let j = loop {
            let j = rng.gen_range(1..=k);
            if j != i {
                break j;
            }
        };
        let (i, j) = (i.min(j), i.max(j));
        memberships.insert(v, [(i, true), (j, true)]);
        by_color.entry(i).or_default().push(v);
        by_color.entry(j).or_default().push(v);
    }
    let mut edges = BTreeMap::new();
    for (color, verts) in by_color {
        let mut images = verts.clone();
        images.shuffle(rng);
        for (v, w) in verts.into_iter().zip(images) {
            edges.insert((v, color), w);
        }
    }
    ColoredDigraph::new(k, edges, memberships).expect("construction is valid by design")
}

/// Random insertion sequences for every edge of `d`: up to `max_run` fresh
/// labels per edge, each assigned a random owner other than the edge color.
pub fn random_insertions<R: Rng + ?Sized>(
    rng: &mut R,
    d: &ColoredDigraph,
    max_run: usize,
) -> Insertions {
    let mut fresh = d.vertices().max().unwrap_or(0) + 1;
    let mut insertions = Insertions::new();
    for (src, _, color) in d.edge_list() {
        let len = rng.gen_range(0..=max_run);
        if len == 0 {
            continue;
        }
        let choices: Vec<usize> = (1..=d.k()).filter(|&j| j != color).collect();
        let run: Vec<(u32, usize)> = (0..len)
            .map(|_| {
                let owner = *choices.choose(rng).unwrap();
                let label = fresh;
                fresh += 1;
                (label, owner)
            })
            .collect();
        insertions.insert((src, color), run);
    }
    insertions
}
