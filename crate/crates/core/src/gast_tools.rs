//! Absorbing-set tools for labeled graphs: detection of general absorbing sets
//! of type two (GASTs) and their unlabeled topologies (UGASTs), the
//! minimum-cardinality edge-weight change sets that are candidates for
//! removing a GAST, and a remover that validates each candidate with an
//! exhaustive satisfiability oracle.
//!
//! A configuration is stored locally: `a` variable nodes and the check nodes
//! adjacent to them, with each check's neighbours restricted to the set. The
//! degree of a check always means its degree inside the configuration.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle_analysis::{for_each_cycle4, for_each_cycle6};
use crate::error::{Error, Result};
use crate::gf::{FieldGf, Symbol};
use crate::graph::TannerGraph;
use crate::qc_codes::{apply_edge_changes, EdgeChange, SCCode};

/// Largest `a` accepted by the exhaustive oracle.
pub const IS_GAST_MAX_A: usize = 10;

/// Default and largest subset size explored by the scan.
pub const SCAN_MAX_A: usize = 8;

/// Change-set sizes tried by the generic remover.
pub const GENERIC_MAX_CHANGES: usize = 2;

/// Upper limit on materialized candidate sets.
const MAX_CANDIDATES: u128 = 10_000_000;

/// `(a, d₁, d₂, d₃)` of an unlabeled configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UgastLabel {
    pub a: usize,
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

impl fmt::Display for UgastLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.d1, self.d2, self.d3)
    }
}

/// `(a, b, d₁, d₂, d₃)` of a labeled configuration. Serialized as its
/// display string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GastLabel {
    pub a: usize,
    pub b: usize,
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

impl GastLabel {
    pub fn new(a: usize, b: usize, d1: usize, d2: usize, d3: usize) -> Self {
        Self { a, b, d1, d2, d3 }
    }

    pub fn unlabeled(&self) -> UgastLabel {
        UgastLabel {
            a: self.a,
            d1: self.d1,
            d2: self.d2,
            d3: self.d3,
        }
    }
}

impl fmt::Display for GastLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {})", self.a, self.b, self.d1, self.d2, self.d3)
    }
}

impl FromStr for GastLabel {
    type Err = Error;

    /// Parses `(a,b,d1,d2,d3)`; parentheses and spaces are optional.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<usize> = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad label `{s}`")))?;
        match parts[..] {
            [a, b, d1, d2, d3] => Ok(Self { a, b, d1, d2, d3 }),
            _ => Err(Error::Parse(format!("label `{s}` needs five fields"))),
        }
    }
}

impl From<GastLabel> for String {
    fn from(l: GastLabel) -> Self {
        l.to_string()
    }
}

impl TryFrom<String> for GastLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Parses a list such as `(4,2,2,5,0),(6,0,0,9,0)`.
pub fn parse_labels(s: &str) -> Result<Vec<GastLabel>> {
    s.split(')')
        .map(|x| x.trim().trim_start_matches(',').trim())
        .filter(|x| !x.is_empty())
        .map(str::parse)
        .collect()
}

/// Topology of a VN subset and its adjacent checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawUgastConfig")]
pub struct UgastConfig {
    /// Variable-node identifiers, ascending.
    vns: Vec<usize>,
    /// Check-node identifiers, ascending.
    checks: Vec<usize>,
    /// Local VN indices adjacent to each check, ascending.
    check_vns: Vec<Vec<usize>>,
    #[serde(skip)]
    vn_checks: Vec<Vec<usize>>,
}

impl UgastConfig {
    /// Builds a configuration from explicit adjacency. `check_vns[c]` lists
    /// local VN indices in `0..vns.len()`.
    pub fn new(vns: Vec<usize>, checks: Vec<usize>, mut check_vns: Vec<Vec<usize>>) -> Result<Self> {
        let a = vns.len();
        if checks.len() != check_vns.len() {
            return Err(Error::Construction("one neighbour list per check is required".into()));
        }
        if vns.windows(2).any(|w| w[0] >= w[1]) || checks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Construction(
                "node identifiers must be strictly ascending".into(),
            ));
        }
        for list in &mut check_vns {
            list.sort_unstable();
            if list.is_empty() || list.windows(2).any(|w| w[0] == w[1]) || list.iter().any(|&v| v >= a) {
                return Err(Error::Construction(
                    "check neighbour lists must be non-empty sets of local VNs".into(),
                ));
            }
        }
        let mut vn_checks = vec![Vec::new(); a];
        for (c, list) in check_vns.iter().enumerate() {
            for &v in list {
                vn_checks[v].push(c);
            }
        }
        Ok(Self {
            vns,
            checks,
            check_vns,
            vn_checks,
        })
    }

    /// Configuration with VNs `0..a` and checks `0..n`, for synthetic topologies.
    pub fn synthetic(a: usize, check_vns: Vec<Vec<usize>>) -> Result<Self> {
        let n = check_vns.len();
        Self::new((0..a).collect(), (0..n).collect(), check_vns)
    }

    /// The configuration induced by `vns` in `graph`.
    pub fn from_graph(graph: &TannerGraph, vns: &[usize]) -> Result<Self> {
        let mut vns = vns.to_vec();
        vns.sort_unstable();
        vns.dedup();
        if let Some(&v) = vns.iter().find(|&&v| v >= graph.n_vars()) {
            return Err(Error::Construction(format!("variable node {v} not in graph")));
        }
        let mut checks: Vec<usize> = vns.iter().flat_map(|&v| graph.var_checks(v)).collect();
        checks.sort_unstable();
        checks.dedup();
        let check_vns = checks
            .iter()
            .map(|&c| graph.check_vars(c).filter_map(|v| vns.binary_search(&v).ok()).collect())
            .collect();
        Self::new(vns, checks, check_vns)
    }

    pub fn a(&self) -> usize {
        self.vns.len()
    }

    pub fn vns(&self) -> &[usize] {
        &self.vns
    }

    pub fn checks(&self) -> &[usize] {
        &self.checks
    }

    pub fn check_vns(&self, c: usize) -> &[usize] {
        &self.check_vns[c]
    }

    pub fn vn_checks(&self, v: usize) -> &[usize] {
        &self.vn_checks[v]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_vns[c].len()
    }

    pub fn label(&self) -> UgastLabel {
        let mut d = [0usize; 3];
        for list in &self.check_vns {
            d[list.len().min(3) - 1] += 1;
        }
        UgastLabel {
            a: self.a(),
            d1: d[0],
            d2: d[1],
            d3: d[2],
        }
    }

    /// Both UGAST conditions: `d₂ > d₃`, and every VN has more neighbours of
    /// degree at least two than of degree one.
    pub fn is_ugast(&self) -> bool {
        let l = self.label();
        l.d2 > l.d3
            && self.vn_checks.iter().all(|cs| {
                let ones = cs.iter().filter(|&&c| self.check_degree(c) == 1).count();
                cs.len() - ones > ones
            })
    }

    /// Current weights of the configuration's edges in `graph`, aligned with
    /// the check neighbour lists.
    pub fn weights_in(&self, graph: &TannerGraph) -> Result<Vec<Vec<Symbol>>> {
        self.checks
            .iter()
            .zip(&self.check_vns)
            .map(|(&c, list)| {
                list.iter()
                    .map(|&v| {
                        graph.weight(c, self.vns[v]).ok_or_else(|| {
                            Error::Construction(format!("entry ({c}, {}) is not in the graph", self.vns[v]))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Deserialize)]
struct RawUgastConfig {
    vns: Vec<usize>,
    checks: Vec<usize>,
    check_vns: Vec<Vec<usize>>,
}

impl TryFrom<RawUgastConfig> for UgastConfig {
    type Error = Error;

    fn try_from(raw: RawUgastConfig) -> Result<Self> {
        Self::new(raw.vns, raw.checks, raw.check_vns)
    }
}

/// A weighted configuration together with a VN assignment exhibiting the
/// GAST property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GastConfig {
    pub topology: UgastConfig,
    /// Edge weights aligned with the topology's check neighbour lists.
    pub weights: Vec<Vec<Symbol>>,
    /// Unsatisfied checks under `witness`.
    pub b: usize,
    /// Nonzero VN values, in local VN order.
    pub witness: Vec<Symbol>,
}

impl GastConfig {
    pub fn label(&self) -> GastLabel {
        let u = self.topology.label();
        GastLabel::new(u.a, self.b, u.d1, u.d2, u.d3)
    }
}

/// Outcome of the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GastCheck {
    pub witness: Option<Vec<Symbol>>,
    pub b: Option<usize>,
}

impl GastCheck {
    pub fn is_gast(&self) -> bool {
        self.witness.is_some()
    }
}

fn check_weights(config: &UgastConfig, weights: &[Vec<Symbol>], field: &FieldGf) -> Result<()> {
    if weights.len() != config.checks.len() || weights.iter().zip(&config.check_vns).any(|(w, l)| w.len() != l.len()) {
        return Err(Error::Construction("weights do not match the configuration".into()));
    }
    let q = field.order();
    if let Some(&w) = weights.iter().flatten().find(|&&w| w == 0 || w as usize >= q) {
        return Err(Error::ElementOutOfRange {
            value: w as u32,
            q: q as u32,
        });
    }
    Ok(())
}

/// Unsatisfied-check count of `values` if they exhibit the GAST property.
fn gast_property(config: &UgastConfig, weights: &[Vec<Symbol>], field: &FieldGf, values: &[Symbol]) -> Option<usize> {
    let a = config.a();
    let mut sat = [0u8; IS_GAST_MAX_A];
    let mut unsat = [0u8; IS_GAST_MAX_A];
    let mut b = 0;
    for (list, w) in config.check_vns.iter().zip(weights) {
        // Addition in characteristic 2 is XOR.
        let s = list
            .iter()
            .zip(w)
            .fold(0, |acc, (&v, &wv)| acc ^ field.mul_unchecked(wv, values[v]));
        if s == 0 {
            list.iter().for_each(|&v| sat[v] += 1);
        } else {
            if list.len() > 2 {
                return None;
            }
            b += 1;
            list.iter().for_each(|&v| unsat[v] += 1);
        }
    }
    (0..a).all(|v| sat[v] > unsat[v]).then_some(b)
}

fn scan(config: &UgastConfig, weights: &[Vec<Symbol>], field: &FieldGf, want_b: Option<usize>) -> Result<GastCheck> {
    check_weights(config, weights, field)?;
    let none = GastCheck { witness: None, b: None };
    let a = config.a();
    if a > IS_GAST_MAX_A {
        return Err(Error::Capacity(format!(
            "oracle limited to a <= {IS_GAST_MAX_A}, got {a}"
        )));
    }
    if a == 0 || !config.is_ugast() {
        return Ok(none);
    }
    // Scaling every value by one nonzero constant preserves which checks are
    // satisfied, so the first value is fixed to 1.
    let top = (field.order() - 1) as Symbol;
    let mut values = vec![1 as Symbol; a];
    loop {
        if let Some(b) = gast_property(config, weights, field, &values) {
            if want_b.is_none_or(|w| w == b) {
                return Ok(GastCheck {
                    witness: Some(values),
                    b: Some(b),
                });
            }
        }
        let mut i = a - 1;
        loop {
            if i == 0 {
                return Ok(none);
            }
            if values[i] < top {
                values[i] += 1;
                break;
            }
            values[i] = 1;
            i -= 1;
        }
    }
}

/// Whether some nonzero VN assignment makes the weighted configuration a GAST,
/// with any number of unsatisfied checks. Configurations that are not UGASTs
/// are rejected without scanning.
pub fn is_gast(config: &UgastConfig, weights: &[Vec<Symbol>], field: &FieldGf) -> Result<GastCheck> {
    scan(config, weights, field, None)
}

/// As [`is_gast`], requiring exactly `b` unsatisfied checks.
pub fn is_gast_with_b(config: &UgastConfig, weights: &[Vec<Symbol>], field: &FieldGf, b: usize) -> Result<GastCheck> {
    scan(config, weights, field, Some(b))
}

/// Oracle check returning the full configuration when it is a GAST.
pub fn as_gast(
    config: UgastConfig,
    weights: Vec<Vec<Symbol>>,
    field: &FieldGf,
    b: Option<usize>,
) -> Result<Option<GastConfig>> {
    let check = scan(&config, &weights, field, b)?;
    Ok(check.witness.map(|witness| GastConfig {
        topology: config,
        weights,
        b: check.b.expect("witness comes with b"),
        witness,
    }))
}

/// Topological quantities bounding the number of weight changes needed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalBudget {
    pub g: usize,
    pub b_vm: usize,
    pub d_1vm: usize,
    pub a_vm: usize,
    pub n_co: usize,
    pub e_min: usize,
    pub e_mu: usize,
    /// Local indices of the VNs with `d_1vm` degree-1 checks.
    pub vm: Vec<usize>,
}

/// Budget of a GAST with `b = d₁` in a code of column weight `gamma`.
pub fn removal_budget(config: &GastConfig, gamma: usize) -> Result<RemovalBudget> {
    let t = &config.topology;
    let label = t.label();
    if config.b != label.d1 {
        return Err(Error::OutOfScope(format!(
            "b = {} differs from d1 = {}; use the generic remover",
            config.b, label.d1
        )));
    }
    if let Some(v) = (0..t.a()).find(|&v| t.vn_checks(v).len() != gamma) {
        return Err(Error::Construction(format!(
            "variable node {} has {} checks, expected {gamma}",
            t.vns()[v],
            t.vn_checks(v).len()
        )));
    }
    let ones = |v: usize| t.vn_checks(v).iter().filter(|&&c| t.check_degree(c) == 1).count();
    let d_1vm = (0..t.a()).map(ones).max().unwrap_or(0);
    let vm: Vec<usize> = (0..t.a()).filter(|&v| ones(v) == d_1vm).collect();
    if vm
        .iter()
        .any(|&v| t.vn_checks(v).iter().any(|&c| t.check_degree(c) > 2))
    {
        return Err(Error::OutOfScope(
            "a VN with the most degree-1 checks also touches a check of degree above 2".into(),
        ));
    }
    let g = (gamma - 1) / 2;
    if d_1vm > g {
        return Err(Error::Construction(format!(
            "{d_1vm} degree-1 checks at one VN exceed g = {g}; not an absorbing configuration"
        )));
    }
    // Degree-1 checks are never satisfied, so b = d₁ leaves exactly those unsatisfied.
    let b_vm = d_1vm;
    let n_co = t
        .check_vns
        .iter()
        .filter(|l| l.len() == 2 && vm.binary_search(&l[0]).is_ok() && vm.binary_search(&l[1]).is_ok())
        .count();
    Ok(RemovalBudget {
        g,
        b_vm,
        d_1vm,
        a_vm: vm.len(),
        n_co,
        e_min: g + 1 - b_vm,
        e_mu: g + 1 - d_1vm,
        vm,
    })
}

/// Number of candidate change sets of cardinality `E_mu` over GF(`q`).
pub fn count_candidate_sets(budget: &RemovalBudget, gamma: usize, q: usize) -> u128 {
    let w = 2 * q.saturating_sub(2) as u128;
    if budget.d_1vm != budget.g {
        budget.a_vm as u128 * binomial(gamma - budget.d_1vm, budget.e_mu) * w.pow(budget.e_mu as u32)
    } else {
        let per_vn = (gamma + 2) / 2;
        (budget.a_vm * per_vn - budget.n_co) as u128 * w
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (1..=k.min(n - k)).fold(1u128, |acc, i| acc * (n + 1 - i) as u128 / i as u128)
}

/// A new weight for one edge of a configuration, in local indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalChange {
    pub check: usize,
    pub vn: usize,
    pub weight: Symbol,
}

fn weight_at(config: &GastConfig, check: usize, vn: usize) -> Symbol {
    let pos = config.topology.check_vns[check]
        .iter()
        .position(|&v| v == vn)
        .expect("vn is adjacent to check");
    config.weights[check][pos]
}

/// Expands chosen `(check, vn)` edges into every assignment of new weights,
/// pushing sets not seen before.
fn push_weight_products(
    config: &GastConfig,
    field: &FieldGf,
    edges: &[(usize, usize)],
    seen: &mut HashSet<Vec<LocalChange>>,
    out: &mut Vec<Vec<LocalChange>>,
) {
    let options: Vec<Vec<Symbol>> = edges
        .iter()
        .map(|&(c, v)| {
            let cur = weight_at(config, c, v);
            field.nonzero().filter(|&w| w != cur).collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; edges.len()];
    loop {
        let set: Vec<LocalChange> = edges
            .iter()
            .zip(&idx)
            .enumerate()
            .map(|(k, (&(check, vn), &i))| LocalChange {
                check,
                vn,
                weight: options[k][i],
            })
            .collect();
        let mut key = set.clone();
        key.sort_unstable();
        if seen.insert(key) {
            out.push(set);
        }
        let mut k = edges.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Distinct candidate sets of `E_mu` changes, each on an edge of a degree-2
/// check adjacent to a VN of the budget's `vm` class, with no two changes on
/// one check. Ordered by VN, then check, then new weight.
pub fn enumerate_candidate_sets(
    config: &GastConfig,
    budget: &RemovalBudget,
    field: &FieldGf,
) -> Result<Vec<Vec<LocalChange>>> {
    let t = &config.topology;
    let gamma = t.vn_checks(budget.vm.first().copied().unwrap_or(0)).len();
    let expected = count_candidate_sets(budget, gamma, field.order());
    if expected > MAX_CANDIDATES {
        return Err(Error::Capacity(format!("{expected} candidate sets")));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &v in &budget.vm {
        let deg2: Vec<usize> = t
            .vn_checks(v)
            .iter()
            .copied()
            .filter(|&c| t.check_degree(c) == 2)
            .collect();
        combinations(deg2.len(), budget.e_mu, |pick| {
            for sides in 0..1usize << pick.len() {
                let edges: Vec<(usize, usize)> = pick
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| {
                        let c = deg2[i];
                        (c, t.check_vns(c)[sides >> k & 1])
                    })
                    .collect();
                push_weight_products(config, field, &edges, &mut seen, &mut out);
            }
        });
    }
    Ok(out)
}

/// Every set of 1 to [`GENERIC_MAX_CHANGES`] changes on edges of distinct
/// degree-2 checks, smaller sets first.
pub fn generic_candidate_sets(config: &GastConfig, field: &FieldGf) -> Result<Vec<Vec<LocalChange>>> {
    let t = &config.topology;
    let edges: Vec<(usize, usize)> = (0..t.checks.len())
        .filter(|&c| t.check_degree(c) == 2)
        .flat_map(|c| t.check_vns(c).iter().map(move |&v| (c, v)))
        .collect();
    let per_edge = field.order().saturating_sub(2) as u128;
    let total: u128 = (1..=GENERIC_MAX_CHANGES)
        .map(|k| binomial(edges.len(), k) * per_edge.pow(k as u32))
        .sum();
    if total > MAX_CANDIDATES {
        return Err(Error::Capacity(format!("{total} candidate sets")));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for k in 1..=GENERIC_MAX_CHANGES {
        combinations(edges.len(), k, |pick| {
            let chosen: Vec<(usize, usize)> = pick.iter().map(|&i| edges[i]).collect();
            if chosen.windows(2).any(|w| w[0].0 == w[1].0) {
                return;
            }
            push_weight_products(config, field, &chosen, &mut seen, &mut out);
        });
    }
    Ok(out)
}

/// Which candidate family a removal drew from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalMethod {
    /// Minimum-cardinality sets of a `b = d₁` GAST.
    MinimumSets,
    /// Brute force over small change sets.
    Generic,
}

/// Candidate sets tried by [`remove_gast_local`], in trial order.
pub fn removal_candidates(
    config: &GastConfig,
    gamma: usize,
    field: &FieldGf,
) -> Result<(RemovalMethod, Vec<Vec<LocalChange>>)> {
    match removal_budget(config, gamma) {
        Ok(budget) => Ok((
            RemovalMethod::MinimumSets,
            enumerate_candidate_sets(config, &budget, field)?,
        )),
        Err(Error::OutOfScope(_)) => Ok((RemovalMethod::Generic, generic_candidate_sets(config, field)?)),
        Err(e) => Err(e),
    }
}

/// Weights of `config` after `changes`.
pub fn apply_local_changes(config: &GastConfig, changes: &[LocalChange]) -> Vec<Vec<Symbol>> {
    let mut w = config.weights.clone();
    for ch in changes {
        let pos = config.topology.check_vns[ch.check]
            .iter()
            .position(|&v| v == ch.vn)
            .expect("vn is adjacent to check");
        w[ch.check][pos] = ch.weight;
    }
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemovalOutcome {
    pub success: bool,
    pub method: Option<RemovalMethod>,
    /// Applied set; empty when the configuration was not a GAST to begin with.
    pub changes: Vec<LocalChange>,
    /// Number of candidate sets available.
    pub candidates: usize,
    /// Weights after the removal (unchanged on failure).
    #[serde(skip)]
    pub weights: Vec<Vec<Symbol>>,
}

/// Removes the GAST on `config`'s topology by the first candidate set after
/// which the oracle finds no GAST with any `b` on the same VN set.
pub fn remove_gast_local(config: &GastConfig, gamma: usize, field: &FieldGf) -> Result<RemovalOutcome> {
    let t = &config.topology;
    if !is_gast(t, &config.weights, field)?.is_gast() {
        return Ok(RemovalOutcome {
            success: true,
            method: None,
            changes: Vec::new(),
            candidates: 0,
            weights: config.weights.clone(),
        });
    }
    let (method, candidates) = removal_candidates(config, gamma, field)?;
    let found = candidates
        .par_iter()
        .map(|set| {
            let w = apply_local_changes(config, set);
            is_gast(t, &w, field).map(|c| (!c.is_gast()).then_some(w))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    let n = candidates.len();
    match found {
        Some(Ok(Some(weights))) => {
            let pos = candidates
                .iter()
                .position(|set| apply_local_changes(config, set) == weights)
                .expect("found among candidates");
            Ok(RemovalOutcome {
                success: true,
                method: Some(method),
                changes: candidates[pos].clone(),
                candidates: n,
                weights,
            })
        }
        Some(Err(e)) => Err(e),
        _ => Ok(RemovalOutcome {
            success: false,
            method: Some(method),
            changes: Vec::new(),
            candidates: n,
            weights: config.weights.clone(),
        }),
    }
}

/// [`remove_gast_local`] on a configuration of `code`, reading its current
/// weights from the code and applying the chosen changes to it.
pub fn remove_gast(code: &SCCode, config: &UgastConfig, field: &FieldGf) -> Result<(RemovalOutcome, SCCode)> {
    let weights = config.weights_in(code.graph())?;
    let check = is_gast(config, &weights, field)?;
    let Some(witness) = check.witness else {
        return Ok((
            RemovalOutcome {
                success: true,
                method: None,
                changes: Vec::new(),
                candidates: 0,
                weights,
            },
            code.clone(),
        ));
    };
    let gast = GastConfig {
        topology: config.clone(),
        weights,
        b: check.b.expect("witness comes with b"),
        witness,
    };
    let outcome = remove_gast_local(&gast, code.gamma(), field)?;
    let changes: Vec<EdgeChange> = outcome
        .changes
        .iter()
        .map(|ch| EdgeChange {
            row: config.checks[ch.check],
            col: config.vns[ch.vn],
            weight: ch.weight,
        })
        .collect();
    let updated = apply_edge_changes(code, &changes)?;
    Ok((outcome, updated))
}

/// Edge-level view of a local change set.
pub fn to_edge_changes(config: &UgastConfig, changes: &[LocalChange]) -> Vec<EdgeChange> {
    changes
        .iter()
        .map(|ch| EdgeChange {
            row: config.checks[ch.check],
            col: config.vns[ch.vn],
            weight: ch.weight,
        })
        .collect()
}

/// Label counts and per-VN balance of a VN set during growth.
struct GrowthStats {
    d: [usize; 3],
    /// `|T ∪ H| − |O|` per VN.
    margin: Vec<i64>,
    /// Degree-1 checks per VN.
    ones: Vec<usize>,
}

fn growth_stats(graph: &TannerGraph, vs: &[usize]) -> GrowthStats {
    let mut cs: Vec<usize> = vs.iter().flat_map(|&v| graph.var_checks(v)).collect();
    cs.sort_unstable();
    let count = |c: usize| cs.partition_point(|&x| x <= c) - cs.partition_point(|&x| x < c);
    let mut d = [0usize; 3];
    let mut i = 0;
    while i < cs.len() {
        let n = count(cs[i]);
        d[n.min(3) - 1] += 1;
        i += n;
    }
    let mut margin = Vec::with_capacity(vs.len());
    let mut ones = Vec::with_capacity(vs.len());
    for &v in vs {
        let o = graph.var_checks(v).filter(|&c| count(c) == 1).count();
        margin.push(graph.var_degree(v) as i64 - 2 * o as i64);
        ones.push(o);
    }
    GrowthStats { d, margin, ones }
}

/// Label-level part of [`reachable`]: whether some target can still be hit
/// from a set of size `a` with check-degree counts `d`.
fn label_reachable(d: [usize; 3], a: usize, t: &UgastLabel, max_deg: usize) -> bool {
    if t.a < a {
        return false;
    }
    let r = t.a - a;
    let [d1, d2, d3] = d;
    if r == 0 {
        return [t.d1, t.d2, t.d3] == d && t.d2 > t.d3;
    }
    let step = max_deg * r;
    d3 <= t.d3 && d1 <= t.d1 + step && t.d1 <= d1 + step && d2 <= t.d2 + (t.d3 - d3) && t.d2 <= d2 + step
}

/// Whether some target is still reachable from a set of size `a` with these
/// stats. `max_deg` bounds how many checks one added VN can change, and
/// `share` how many checks an added VN can share with one member.
fn reachable(st: &GrowthStats, a: usize, targets: &[UgastLabel], max_deg: usize, share: usize) -> bool {
    targets.iter().any(|t| {
        label_reachable(st.d, a, t, max_deg) && {
            let r = t.a - a;
            st.margin
                .iter()
                .zip(&st.ones)
                .all(|(&m, &o)| m + 2 * o.min(r * share) as i64 >= 1)
        }
    })
}

fn grow_from_seed(
    graph: &TannerGraph,
    seed: &[usize],
    targets: &[UgastLabel],
    max_deg: usize,
    share: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let a_top = targets.iter().map(|t| t.a).max().unwrap_or(0);
    let any_d3 = targets.iter().any(|t| t.d3 > 0);
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut stack = vec![seed.to_vec()];
    visited.insert(seed.to_vec());
    while let Some(vs) = stack.pop() {
        let st = growth_stats(graph, &vs);
        if !reachable(&st, vs.len(), targets, max_deg, share) {
            continue;
        }
        if targets
            .iter()
            .any(|t| t.a == vs.len() && reachable(&st, vs.len(), std::slice::from_ref(t), max_deg, share))
        {
            out.push(vs.clone());
        }
        if vs.len() >= a_top {
            continue;
        }
        // Without degree>2 targets, growth through a degree-2 check is never useful.
        let mut cand: Vec<usize> = Vec::new();
        for &v in &vs {
            for c in graph.var_checks(v) {
                let inside = graph.check_vars(c).filter(|u| vs.binary_search(u).is_ok()).count();
                if inside == 1 || any_d3 {
                    cand.extend(graph.check_vars(c).filter(|u| vs.binary_search(u).is_err()));
                }
            }
        }
        cand.sort_unstable();
        cand.dedup();
        let mut inside: Vec<usize> = vs.iter().flat_map(|&v| graph.var_checks(v)).collect();
        inside.sort_unstable();
        let count = |c: usize| inside.partition_point(|&x| x <= c) - inside.partition_point(|&x| x < c);
        for u in cand {
            // Degree counts after adding `u`, before the full per-VN check.
            let mut d = st.d;
            for c in graph.var_checks(u) {
                match count(c) {
                    0 => d[0] += 1,
                    1 => {
                        d[0] -= 1;
                        d[1] += 1;
                    }
                    2 => {
                        d[1] -= 1;
                        d[2] += 1;
                    }
                    _ => {}
                }
            }
            if !targets.iter().any(|t| label_reachable(d, vs.len() + 1, t, max_deg)) {
                continue;
            }
            let mut next = vs.clone();
            let pos = next.binary_search(&u).unwrap_err();
            next.insert(pos, u);
            if visited.contains(&next) {
                continue;
            }
            let st = growth_stats(graph, &next);
            if reachable(&st, next.len(), targets, max_deg, share) {
                visited.insert(next.clone());
                stack.push(next);
            }
        }
    }
}

/// VN triples of the 6-cycles of `graph`, ascending and distinct.
pub fn cycle6_seeds(graph: &TannerGraph) -> Vec<[usize; 3]> {
    let mut seeds = Vec::new();
    for_each_cycle6(graph, |e| {
        let mut s = [e[0].1, e[2].1, e[4].1];
        s.sort_unstable();
        seeds.push(s);
    });
    seeds.sort_unstable();
    seeds.dedup();
    seeds
}

/// All connected UGASTs with a label in `targets` (and `a ≤ a_max`) that
/// contain a 6-cycle, found by growing VN sets from every 6-cycle. Sets are
/// returned once each, in ascending order of their VN lists.
pub fn ugast_scan_graph(graph: &TannerGraph, targets: &[UgastLabel], a_max: usize) -> Result<Vec<UgastConfig>> {
    if a_max > SCAN_MAX_A {
        return Err(Error::Capacity(format!(
            "scan limited to a <= {SCAN_MAX_A}, got {a_max}"
        )));
    }
    let targets: Vec<UgastLabel> = targets.iter().copied().filter(|t| (3..=a_max).contains(&t.a)).collect();
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let max_deg = (0..graph.n_vars()).map(|v| graph.var_degree(v)).max().unwrap_or(0);
    let mut has_quad = false;
    for_each_cycle4(graph, |_| has_quad = true);
    let share = if has_quad { max_deg } else { 1 };
    let seeds = cycle6_seeds(graph);
    let mut found: Vec<Vec<usize>> = seeds
        .par_iter()
        .flat_map_iter(|seed| {
            let mut out = Vec::new();
            grow_from_seed(graph, seed, &targets, max_deg, share, &mut out);
            out
        })
        .collect();
    found.sort_unstable();
    found.dedup();
    found.iter().map(|vs| UgastConfig::from_graph(graph, vs)).collect()
}

/// UGASTs matching the targets whose current weights admit the target `b`.
pub fn gast_scan_graph(
    graph: &TannerGraph,
    field: &FieldGf,
    targets: &[GastLabel],
    a_max: usize,
) -> Result<Vec<GastConfig>> {
    let mut unl: Vec<UgastLabel> = targets.iter().map(GastLabel::unlabeled).collect();
    unl.sort_unstable();
    unl.dedup();
    let configs = ugast_scan_graph(graph, &unl, a_max)?;
    let checked: Vec<Option<GastConfig>> = configs
        .into_par_iter()
        .map(|cfg| {
            let weights = cfg.weights_in(graph)?;
            let label = cfg.label();
            for t in targets.iter().filter(|t| t.unlabeled() == label) {
                if let Some(g) = as_gast(cfg.clone(), weights.clone(), field, Some(t.b))? {
                    return Ok(Some(g));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    Ok(checked.into_iter().flatten().collect())
}

/// [`gast_scan_graph`] on a labeled code.
pub fn gast_scan(code: &SCCode, field: &FieldGf, targets: &[GastLabel], a_max: usize) -> Result<Vec<GastConfig>> {
    match code.lambda() {
        Some(l) if l == field.lambda() => gast_scan_graph(code.graph(), field, targets, a_max),
        Some(l) => Err(Error::Construction(format!(
            "code is labeled over GF(2^{l}) but the field is GF(2^{})",
            field.lambda()
        ))),
        None => Err(Error::Construction("code has no edge labels".into())),
    }
}
