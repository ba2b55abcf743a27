//! Charlier configurations, the tuple family behind the multilinear
//! identity, and their weights.
//!
//! A configuration on a finite label set `S` is an ordered partition
//! `(A, B)` of `S` together with a permutation of `A`; summing the weight
//! `a^(cycles) * r^|B|` over all configurations on `[n]` reproduces
//! `charlier_c(n)`. A [`DigraphTuple`] bundles `k` configurations over a
//! shared ground set `[n]` split into blocks indexed by unordered pairs
//! `{i,j}`, so that every label sits in exactly two configurations; the
//! superposition of their functional digraphs, one edge color per
//! configuration, drives the component taxonomy in [`digraph`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num::{BigInt, One};

use crate::budget::EnumerationBudget;
use crate::charlier::{cycle_decomposition, factorial};
use crate::error::{Error, Result};
use crate::polyring::{ParamSet, Polynomial, Rat};

pub mod digraph;
pub use digraph::{ColoredDigraph, ComponentType, Insertions};

/// An ordered partition `(A, B)` of a label set with a permutation of `A`,
/// the permutation held in canonical cycle form (each cycle starts at its
/// minimum; cycles sorted by minimum).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharlierConfig {
    cycles: Vec<Vec<u32>>,
    b: BTreeSet<u32>,
}

impl CharlierConfig {
    /// Builds a configuration from a permutation given as a value map whose
    /// key set is `A`, plus the set `B`.
    pub fn new(sigma: BTreeMap<u32, u32>, b: BTreeSet<u32>) -> Result<Self> {
        let keys: BTreeSet<u32> = sigma.keys().copied().collect();
        let values: BTreeSet<u32> = sigma.values().copied().collect();
        if keys != values {
            return Err(Error::InvalidStructure(
                "sigma must permute its own domain".into(),
            ));
        }
        if !keys.is_disjoint(&b) {
            return Err(Error::InvalidStructure(
                "A and B must be disjoint".into(),
            ));
        }
        Ok(CharlierConfig {
            cycles: cycle_decomposition(&sigma),
            b,
        })
    }

    /// Builds a configuration from explicit cycles (any rotation/order;
    /// they are canonicalized) plus the set `B`.
    pub fn from_cycles<I, C>(cycles: I, b: BTreeSet<u32>) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[u32]>,
    {
        let mut sigma = BTreeMap::new();
        for cycle in cycles {
            let cycle = cycle.as_ref();
            if cycle.is_empty() {
                return Err(Error::InvalidStructure("empty cycle".into()));
            }
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if sigma.insert(from, to).is_some() {
                    return Err(Error::InvalidStructure(format!(
                        "label {from} appears in two cycles"
                    )));
                }
            }
        }
        Self::new(sigma, b)
    }

    /// The domain `A` of the permutation.
    pub fn a_set(&self) -> BTreeSet<u32> {
        self.cycles.iter().flatten().copied().collect()
    }

    pub fn b_set(&self) -> &BTreeSet<u32> {
        &self.b
    }

    /// The whole label set `A ∪ B`.
    pub fn ground(&self) -> BTreeSet<u32> {
        let mut g = self.a_set();
        g.extend(self.b.iter().copied());
        g
    }

    /// Cycles in canonical form.
    pub fn cycles(&self) -> &[Vec<u32>] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// The permutation as a value map.
    pub fn sigma_map(&self) -> BTreeMap<u32, u32> {
        let mut sigma = BTreeMap::new();
        for cycle in &self.cycles {
            for w in 0..cycle.len() {
                sigma.insert(cycle[w], cycle[(w + 1) % cycle.len()]);
            }
        }
        sigma
    }

    /// Whether the label lies in `A` (equivalently, on a cycle).
    pub fn in_a(&self, label: u32) -> bool {
        self.cycles.iter().any(|c| c.contains(&label))
    }

    /// The monomial `a^(cycles) * r^|B|`.
    pub fn weight(&self, params: &Arc<ParamSet>, a: &str, r: &str) -> Polynomial {
        Polynomial::term(
            params,
            Rat::one(),
            &[(a, self.cycles.len() as u32), (r, self.b.len() as u32)],
        )
    }
}

impl fmt::Display for CharlierConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma=")?;
        if self.cycles.is_empty() {
            write!(f, "()")?;
        } else {
            for cycle in &self.cycles {
                write!(f, "({})", cycle.iter().join(" "))?;
            }
        }
        write!(f, " B={}", fmt_set(&self.b))
    }
}

/// See [`CharlierConfig::weight`].
pub fn config_weight(
    c: &CharlierConfig,
    params: &Arc<ParamSet>,
    a: &str,
    r: &str,
) -> Polynomial {
    c.weight(params, a, r)
}

/// Streams every configuration on the given (distinct) labels exactly once:
/// subsets `A` in order of increasing size (index-lexicographic within a
/// size), then permutations of `A` in lexicographic one-line order.
pub fn enumerate_configs(
    s: &[u32],
    budget: &EnumerationBudget,
) -> Result<Box<dyn Iterator<Item = CharlierConfig>>> {
    budget.check_configs(s.len() as u32)?;
    let mut labels = s.to_vec();
    labels.sort_unstable();
    let distinct = labels.windows(2).all(|w| w[0] < w[1]);
    if !distinct {
        return Err(Error::InvalidStructure("duplicate labels".into()));
    }
    let all: BTreeSet<u32> = labels.iter().copied().collect();
    let iter = labels.into_iter().powerset().flat_map(move |a| {
        let b: BTreeSet<u32> = all.difference(&a.iter().copied().collect()).copied().collect();
        let len = a.len();
        a.iter()
            .copied()
            .permutations(len)
            .map(|images| {
                let sigma: BTreeMap<u32, u32> =
                    a.iter().copied().zip(images).collect();
                CharlierConfig::new(sigma, b.clone())
                    .expect("enumeration emits valid configurations")
            })
            .collect::<Vec<_>>()
    });
    Ok(Box::new(iter))
}

/// Number of configurations on `[n]`: `sum_m binom(n,m) * m!`.
pub fn count_configs(n: u32) -> BigInt {
    (0..=n)
        .map(|m| crate::charlier::binomial(n, m) * factorial(m))
        .sum()
}

/// Canonical parameter names for `k` configurations: `a1..ak`, `r1..rk`,
/// and `x12, x13, ..` for unordered pairs.
pub fn a_name(i: usize) -> String {
    format!("a{i}")
}

pub fn r_name(i: usize) -> String {
    format!("r{i}")
}

pub fn x_name(i: usize, j: usize) -> String {
    assert!(i < j, "pair indices must be ordered");
    format!("x{i}{j}")
}

/// The parameter set `(a1..ak, r1..rk, x12..)` used by tuple weights and
/// the multilinear identity.
pub fn multilinear_params(k: usize) -> Arc<ParamSet> {
    assert!((2..=9).contains(&k), "supported range is 2 <= k <= 9");
    let mut names: Vec<String> = (1..=k).map(a_name).collect();
    names.extend((1..=k).map(r_name));
    for i in 1..=k {
        for j in i + 1..=k {
            names.push(x_name(i, j));
        }
    }
    ParamSet::new(names)
}

/// `k` configurations over `[n]`: a block assignment sending each label to
/// an unordered pair `{i,j}`, plus a configuration on each induced set
/// `N_i` (the labels whose pair contains `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigraphTuple {
    k: usize,
    n: u32,
    blocks: BTreeMap<u32, (usize, usize)>,
    configs: Vec<CharlierConfig>,
}

impl DigraphTuple {
    pub fn new(
        k: usize,
        n: u32,
        blocks: BTreeMap<u32, (usize, usize)>,
        configs: Vec<CharlierConfig>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidStructure("need at least two configurations".into()));
        }
        if configs.len() != k {
            return Err(Error::InvalidStructure(format!(
                "expected {k} configurations, got {}",
                configs.len()
            )));
        }
        let expected: BTreeSet<u32> = (1..=n).collect();
        if blocks.keys().copied().collect::<BTreeSet<u32>>() != expected {
            return Err(Error::InvalidStructure(
                "block assignment must cover [n] exactly".into(),
            ));
        }
        for (&v, &(i, j)) in &blocks {
            if !(1 <= i && i < j && j <= k) {
                return Err(Error::InvalidStructure(format!(
                    "label {v} assigned to invalid pair ({i},{j})"
                )));
            }
        }
        let tuple = DigraphTuple { k, n, blocks, configs };
        for i in 1..=k {
            let induced: BTreeSet<u32> = tuple.n_i(i).into_iter().collect();
            if tuple.configs[i - 1].ground() != induced {
                return Err(Error::InvalidStructure(format!(
                    "configuration {i} is not on N_{i}"
                )));
            }
        }
        Ok(tuple)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &BTreeMap<u32, (usize, usize)> {
        &self.blocks
    }

    /// Labels in the block `N_ij`.
    pub fn block(&self, i: usize, j: usize) -> Vec<u32> {
        assert!(i < j);
        self.blocks
            .iter()
            .filter(|(_, &p)| p == (i, j))
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn n_ij(&self, i: usize, j: usize) -> usize {
        self.block(i, j).len()
    }

    /// Labels of `N_i = union of N_ij over j`, sorted.
    pub fn n_i(&self, i: usize) -> Vec<u32> {
        self.blocks
            .iter()
            .filter(|(_, &(p, q))| p == i || q == i)
            .map(|(&v, _)| v)
            .collect()
    }

    /// The configuration `Φ_i` (1-based).
    pub fn config(&self, i: usize) -> &CharlierConfig {
        &self.configs[i - 1]
    }

    /// `prod_i a_i^cyc(σ_i) r_i^|B_i| * prod_{i<j} x_ij^|N_ij|`, computed
    /// directly from the tuple (independent of the digraph view).
    pub fn weight(&self, params: &Arc<ParamSet>) -> Polynomial {
        let mut exps: Vec<(String, u32)> = Vec::new();
        for i in 1..=self.k {
            let c = &self.configs[i - 1];
            exps.push((a_name(i), c.cycle_count() as u32));
            exps.push((r_name(i), c.b_set().len() as u32));
        }
        for i in 1..=self.k {
            for j in i + 1..=self.k {
                exps.push((x_name(i, j), self.n_ij(i, j) as u32));
            }
        }
        let pairs: Vec<(&str, u32)> = exps.iter().map(|(s, e)| (s.as_str(), *e)).collect();
        Polynomial::term(params, Rat::one(), &pairs)
    }

    /// Superimposes the `k` functional digraphs, coloring each edge by its
    /// owner, and records per-vertex memberships.
    pub fn superpose(&self) -> ColoredDigraph {
        let mut edges = BTreeMap::new();
        for i in 1..=self.k {
            for (v, w) in self.configs[i - 1].sigma_map() {
                edges.insert((v, i), w);
            }
        }
        let mut memberships = BTreeMap::new();
        for (&v, &(i, j)) in &self.blocks {
            let rec = [
                (i, self.configs[i - 1].in_a(v)),
                (j, self.configs[j - 1].in_a(v)),
            ];
            memberships.insert(v, rec);
        }
        ColoredDigraph::new(self.k, edges, memberships)
            .expect("a valid tuple superposes to a valid digraph")
    }
}

impl fmt::Display for DigraphTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for i in 1..=self.k {
            for j in i + 1..=self.k {
                let set: BTreeSet<u32> = self.block(i, j).into_iter().collect();
                parts.push(format!("N{i}{j}={}", fmt_set(&set)));
            }
        }
        for i in 1..=self.k {
            parts.push(format!("Phi{i}: {}", self.configs[i - 1]));
        }
        write!(f, "{}", parts.join(" | "))
    }
}

/// See [`DigraphTuple::weight`].
pub fn tuple_weight(t: &DigraphTuple, params: &Arc<ParamSet>) -> Polynomial {
    t.weight(params)
}

/// Streams every tuple for the given `k` and `n` exactly once: block
/// assignments in lexicographic order (labels ascending, pairs ordered
/// `(1,2) < (1,3) < ..`), then configurations per color with the last
/// color's configuration varying fastest.
pub fn enumerate_h(
    k: usize,
    n: u32,
    budget: &EnumerationBudget,
) -> Result<Box<dyn Iterator<Item = DigraphTuple>>> {
    if k < 2 {
        return Err(Error::InvalidStructure("need at least two configurations".into()));
    }
    budget.check_h(k, n, &count_h(k, n))?;
    let pairs: Vec<(usize, usize)> = (1..=k).tuple_combinations().collect();
    if n == 0 {
        let configs = vec![
            CharlierConfig::new(BTreeMap::new(), BTreeSet::new()).unwrap();
            k
        ];
        let tuple = DigraphTuple::new(k, 0, BTreeMap::new(), configs)?;
        return Ok(Box::new(std::iter::once(tuple)));
    }
    let budget = budget.clone();
    let iter = std::iter::repeat_n(0..pairs.len(), n as usize)
        .multi_cartesian_product()
        .flat_map(move |assign| {
            let mut blocks = BTreeMap::new();
            for (idx, &p) in assign.iter().enumerate() {
                blocks.insert(idx as u32 + 1, pairs[p]);
            }
            let lists: Vec<Vec<CharlierConfig>> = (1..=k)
                .map(|i| {
                    let labels: Vec<u32> = blocks
                        .iter()
                        .filter(|(_, &(p, q))| p == i || q == i)
                        .map(|(&v, _)| v)
                        .collect();
                    enumerate_configs(&labels, &budget)
                        .expect("N_i is within the checked budget")
                        .collect()
                })
                .collect();
            lists
                .into_iter()
                .map(|l| l.into_iter())
                .multi_cartesian_product()
                .map(move |combo| {
                    DigraphTuple::new(k, n, blocks.clone(), combo)
                        .expect("enumeration emits valid tuples")
                })
        });
    Ok(Box::new(iter))
}

/// Number of tuples for `(k, n)`: sum over block-size vectors `(n_e)` of
/// the multinomial `n!/prod n_e!` times `prod_i count_configs(n_i)`.
pub fn count_h(k: usize, n: u32) -> BigInt {
    let pairs: Vec<(usize, usize)> = (1..=k).tuple_combinations().collect();
    let mut total = BigInt::from(0u32);
    let mut sizes = vec![0u32; pairs.len()];
    count_h_rec(&pairs, k, n, 0, &mut sizes, &mut total);
    total
}

fn count_h_rec(
    pairs: &[(usize, usize)],
    k: usize,
    remaining: u32,
    pos: usize,
    sizes: &mut Vec<u32>,
    total: &mut BigInt,
) {
    if pos == pairs.len() {
        if remaining != 0 {
            return;
        }
        let n: u32 = sizes.iter().sum();
        let mut ways = factorial(n);
        for &s in sizes.iter() {
            ways /= factorial(s);
        }
        for i in 1..=k {
            let n_i: u32 = pairs
                .iter()
                .zip(sizes.iter())
                .filter(|(&(p, q), _)| p == i || q == i)
                .map(|(_, &s)| s)
                .sum();
            ways *= count_configs(n_i);
        }
        *total += ways;
        return;
    }
    for s in 0..=remaining {
        sizes[pos] = s;
        count_h_rec(pairs, k, remaining - s, pos + 1, sizes, total);
    }
    sizes[pos] = 0;
}

pub(crate) fn fmt_set(set: &BTreeSet<u32>) -> String {
    format!("{{{}}}", set.iter().join(","))
}

/// A worked example: three configurations on `[18]` whose superposed
/// digraph has components of every type, including a reducible type-3
/// component. Used throughout the documentation and tests.
pub fn demo_tuple() -> DigraphTuple {
    let mut blocks = BTreeMap::new();
    for v in [5u32, 8, 9, 11, 14, 16, 17] {
        blocks.insert(v, (1, 2));
    }
    for v in [1u32, 2, 6, 12, 15] {
        blocks.insert(v, (1, 3));
    }
    for v in [3u32, 4, 7, 10, 13, 18] {
        blocks.insert(v, (2, 3));
    }
    let phi1 = CharlierConfig::from_cycles(
        [vec![9u32, 16, 15], vec![1, 12, 11, 8]],
        [2, 5, 6, 14, 17].into_iter().collect(),
    )
    .expect("valid demonstration configuration");
    let phi2 = CharlierConfig::from_cycles(
        [vec![5u32, 17, 8, 11], vec![3, 10, 7, 4, 18]],
        [9, 13, 14, 16].into_iter().collect(),
    )
    .expect("valid demonstration configuration");
    let phi3 = CharlierConfig::from_cycles(
        [vec![6u32, 13], vec![1, 10, 7, 18, 4]],
        [2, 3, 12, 15].into_iter().collect(),
    )
    .expect("valid demonstration configuration");
    DigraphTuple::new(3, 18, blocks, vec![phi1, phi2, phi3])
        .expect("valid demonstration tuple")
}
