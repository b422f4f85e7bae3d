//! Short-cycle enumeration in protographs and lifted graphs, the circulant
//! lifting law for protograph cycles, and the (3, 3, 3, 0) UGAST census of
//! coupled codes.
//!
//! Coupled codes are repetitive, so every count over the full coupled graph is
//! obtained from a window of two consecutive replicas: a cycle whose variable
//! nodes lie in one replica occurs `L` times, one spanning two replicas occurs
//! `L − 1` times.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TannerGraph;
use crate::overlap_opt::{total_cycles, CycleCensus};
use crate::qc_codes::{coupled_entries, PartitionMask, ProtoMatrix, SCCode};

/// A simple cycle given by its nonzero entries `(row, col)`.
///
/// Entries `2k` and `2k+1` share a column, entries `2k+1` and `2k+2` share a
/// row, and the last entry shares a row with the first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProtoCycle {
    pub entries: Vec<(usize, usize)>,
}

impl ProtoCycle {
    /// Canonical representative over rotations and reflections that keep the
    /// column-first alternation.
    pub fn canonical(entries: Vec<(usize, usize)>) -> Self {
        let n = entries.len();
        let mut best = entries.clone();
        for start in (0..n).step_by(2) {
            let fwd: Vec<_> = (0..n).map(|k| entries[(start + k) % n]).collect();
            // Walking backwards from entry `start + 1` also starts with a column step.
            let bwd: Vec<_> = (0..n).map(|k| entries[(start + 1 + n - k) % n]).collect();
            best = best.min(fwd).min(bwd);
        }
        Self { entries: best }
    }

    /// Cycle length in edges.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().skip(1).step_by(2).map(|e| e.0)
    }

    pub fn cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().step_by(2).map(|e| e.1)
    }
}

/// Outcome of lifting a protograph cycle with circulant powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    /// The alternating power sum vanishes mod `p`: the cycle lifts to `p` copies of itself.
    pub is_active: bool,
    /// Number of traversals before the lifted walk closes; the cycle lifts to
    /// `p / beta` cycles of length `beta` times its own. 1 when active.
    pub beta: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lifting law for a cycle of a protograph (or of its coupled version: entries
/// are reduced to circulant `(row mod γ, col mod κ)`).
pub fn lift_count(cycle: &ProtoCycle, powers: &ProtoMatrix) -> Lift {
    let p = powers.p() as i64;
    let (g, k) = (powers.gamma(), powers.kappa());
    let d: i64 = cycle
        .entries
        .iter()
        .enumerate()
        .map(|(e, &(h, l))| {
            let f = powers.power(h % g, l % k) as i64;
            if e % 2 == 0 {
                f
            } else {
                -f
            }
        })
        .sum();
    let d = d.rem_euclid(p) as usize;
    let beta = powers.p() / gcd(d, powers.p());
    Lift {
        is_active: d == 0,
        beta,
    }
}

/// Row-to-sorted-columns view used by the enumerators.
fn row_lists(graph: &TannerGraph) -> Vec<Vec<usize>> {
    (0..graph.n_checks()).map(|c| graph.check_vars(c).collect()).collect()
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Rows sharing at least one column with each row, restricted to larger indices.
fn later_neighbours(graph: &TannerGraph) -> Vec<Vec<usize>> {
    (0..graph.n_checks())
        .map(|a| {
            let mut set: Vec<usize> = graph
                .check_vars(a)
                .flat_map(|v| graph.var_checks(v))
                .filter(|&b| b > a)
                .collect();
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect()
}

/// Calls `visit` once per 6-cycle with its entries in column-first order
/// `(a,x) (b,x) (b,y) (c,y) (c,z) (a,z)`, rows `a < b < c`.
pub fn for_each_cycle6(graph: &TannerGraph, mut visit: impl FnMut(&[(usize, usize); 6])) {
    let rows = row_lists(graph);
    let nb = later_neighbours(graph);
    for a in 0..rows.len() {
        for &b in &nb[a] {
            let ab = intersect(&rows[a], &rows[b]);
            for &c in &nb[b] {
                if nb[a].binary_search(&c).is_err() {
                    continue;
                }
                let bc = intersect(&rows[b], &rows[c]);
                let ac = intersect(&rows[a], &rows[c]);
                for &x in &ab {
                    for &y in bc.iter().filter(|&&y| y != x) {
                        for &z in ac.iter().filter(|&&z| z != x && z != y) {
                            visit(&[(a, x), (b, x), (b, y), (c, y), (c, z), (a, z)]);
                        }
                    }
                }
            }
        }
    }
}

/// Calls `visit` once per 4-cycle `(a,x) (b,x) (b,y) (a,y)`, rows `a < b`, cols `x < y`.
pub fn for_each_cycle4(graph: &TannerGraph, mut visit: impl FnMut(&[(usize, usize); 4])) {
    let rows = row_lists(graph);
    let nb = later_neighbours(graph);
    for a in 0..rows.len() {
        for &b in &nb[a] {
            let ab = intersect(&rows[a], &rows[b]);
            for (i, &x) in ab.iter().enumerate() {
                for &y in &ab[i + 1..] {
                    visit(&[(a, x), (b, x), (b, y), (a, y)]);
                }
            }
        }
    }
}

/// Every simple cycle of length 4 or 6, once each, in canonical form.
pub fn enumerate_cycles(graph: &TannerGraph, length: usize) -> Result<Vec<ProtoCycle>> {
    let mut out = Vec::new();
    match length {
        4 => for_each_cycle4(graph, |e| out.push(ProtoCycle::canonical(e.to_vec()))),
        6 => for_each_cycle6(graph, |e| out.push(ProtoCycle::canonical(e.to_vec()))),
        _ => return Err(Error::Unsupported(format!("cycle length {length} (only 4 and 6)"))),
    }
    Ok(out)
}

/// Number of cycles of length 4 or 6.
pub fn count_cycles(graph: &TannerGraph, length: usize) -> Result<u64> {
    let mut n = 0u64;
    match length {
        4 => for_each_cycle4(graph, |_| n += 1),
        6 => for_each_cycle6(graph, |_| n += 1),
        _ => return Err(Error::Unsupported(format!("cycle length {length} (only 4 and 6)"))),
    }
    Ok(n)
}

/// Replica span of a cycle in a two-replica window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Span {
    /// All variable nodes in replica `0` or `1` of the window.
    Single(u8),
    Double,
}

/// CN/VN placement of a 6-cycle in a two-replica window, one tag per term
/// of the closed-form census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// Single replica, all CNs in `H₀`.
    S0,
    /// Single replica, all CNs in `H₁`.
    S1,
    /// Single replica, two CNs in `H₀` and one in `H₁`.
    S2,
    /// Single replica, one CN in `H₀` and two in `H₁`.
    S3,
    /// Two replicas, all CNs in the shared band, two VNs in the first replica.
    D0,
    /// Two replicas, all CNs in the shared band, two VNs in the second replica.
    D1,
    /// Two replicas, one CN above the shared band.
    D2,
    /// Two replicas, one CN below the shared band.
    D3,
}

impl CaseTag {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Span and case of a window 6-cycle. Window rows are in blocks of γ
/// (block 0: `H₀` of the first replica, block 1: `H₁` of the first and `H₀` of
/// the second, block 2: `H₁` of the second); columns in blocks of κ.
pub fn classify_window_cycle6(entries: &[(usize, usize); 6], gamma: usize, kappa: usize) -> Option<(Span, CaseTag)> {
    let mut blocks = [0usize; 3];
    for r in entries.iter().skip(1).step_by(2).map(|e| e.0) {
        blocks[r / gamma] += 1;
    }
    let mut reps = [0usize; 2];
    for c in entries.iter().step_by(2).map(|e| e.1) {
        reps[c / kappa] += 1;
    }
    if reps[0] == 3 || reps[1] == 3 {
        let r = if reps[0] == 3 { 0 } else { 1 };
        let (h0, h1) = (blocks[r], blocks[r + 1]);
        let tag = match (h0, h1) {
            (3, 0) => CaseTag::S0,
            (0, 3) => CaseTag::S1,
            (2, 1) => CaseTag::S2,
            (1, 2) => CaseTag::S3,
            _ => return None,
        };
        return Some((Span::Single(r as u8), tag));
    }
    let tag = match (blocks, reps[0]) {
        ([0, 3, 0], 2) => CaseTag::D0,
        ([0, 3, 0], 1) => CaseTag::D1,
        ([1, 2, 0], 2) => CaseTag::D2,
        ([0, 2, 1], 1) => CaseTag::D3,
        _ => return None,
    };
    Some((Span::Double, tag))
}

/// Binary protograph of a window of `replicas` consecutive replicas.
pub fn window_graph(proto: &ProtoMatrix, mask: &PartitionMask, replicas: usize) -> TannerGraph {
    let rows = (replicas + 1) * proto.gamma();
    let cols = replicas * proto.kappa();
    let mut lists = vec![Vec::new(); rows];
    for e in coupled_entries(proto, mask, replicas) {
        lists[e.row].push(e.col);
    }
    for l in &mut lists {
        l.sort_unstable();
    }
    TannerGraph::from_rows(cols, &lists).expect("coupled protograph entries are distinct")
}

/// Brute-force protograph census from the window, split by case.
pub fn census_by_enumeration(proto: &ProtoMatrix, mask: &PartitionMask, l: usize) -> Result<CycleCensus> {
    let g = window_graph(proto, mask, 2);
    let (gamma, kappa) = (proto.gamma(), proto.kappa());
    if gamma != 3 {
        return Err(Error::Unsupported(format!("case census needs gamma = 3, got {gamma}")));
    }
    let mut fs = [0u64; 4];
    let mut fd = [0u64; 4];
    let mut bad = 0;
    for_each_cycle6(&g, |e| match classify_window_cycle6(e, gamma, kappa) {
        Some((Span::Single(0), tag)) => fs[tag.index()] += 1,
        Some((Span::Single(_), _)) => {}
        Some((Span::Double, tag)) => fd[tag.index() - 4] += 1,
        None => bad += 1,
    });
    if bad > 0 {
        return Err(Error::Construction(format!("{bad} window cycles fit no case")));
    }
    Ok(CycleCensus::from_parts(fs, fd, l))
}

/// One window cycle as a linear form over the base circulant powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCycle {
    /// `(base index i·κ + j, coefficient)`, merged, zero coefficients dropped.
    terms: Vec<(u32, i32)>,
    /// Base index of each of the cycle's entries, with repetition.
    pub entries: Vec<u32>,
    pub span: Span,
    pub case: Option<CaseTag>,
}

impl WindowCycle {
    fn from_entries(entries: &[(usize, usize)], gamma: usize, kappa: usize, span: Span, case: Option<CaseTag>) -> Self {
        let base: Vec<u32> = entries
            .iter()
            .map(|&(r, c)| ((r % gamma) * kappa + c % kappa) as u32)
            .collect();
        let mut terms: Vec<(u32, i32)> = Vec::with_capacity(base.len());
        for (k, &b) in base.iter().enumerate() {
            let s = if k % 2 == 0 { 1 } else { -1 };
            match terms.iter_mut().find(|t| t.0 == b) {
                Some(t) => t.1 += s,
                None => terms.push((b, s)),
            }
        }
        terms.retain(|t| t.1 != 0);
        Self {
            terms,
            entries: base,
            span,
            case,
        }
    }

    /// Whether the cycle lifts to `p` copies under the row-major `powers`.
    #[inline]
    pub fn is_active(&self, powers: &[u32], p: i64) -> bool {
        let s: i64 = self
            .terms
            .iter()
            .map(|&(b, c)| c as i64 * powers[b as usize] as i64)
            .sum();
        s.rem_euclid(p) == 0
    }

    /// Whether the cycle touches base entry `b`.
    #[inline]
    pub fn touches(&self, b: u32) -> bool {
        self.entries.contains(&b)
    }
}

/// Active-cycle census of a two-replica window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveCensus {
    /// Active single-replica cycles in the first replica (`F^a_s`).
    pub fs_active: u64,
    /// Same count in the second replica; equals `fs_active` by symmetry.
    pub fs_active_second: u64,
    /// Active cycles spanning both replicas (`F^a_d`).
    pub fd_active: u64,
    /// Per base circulant `i·κ + j`: single-span active cycles through it
    /// counted with weight 1, two-replica ones with weight 2.
    pub entry_weights: Vec<u64>,
    /// Active 4-cycles in the window.
    pub quads_active: u64,
}

impl ActiveCensus {
    /// Number of lifted 6-cycles in the coupled code of length `l`.
    pub fn f_sc(&self, l: usize, p: usize) -> u64 {
        total_cycles(self.fs_active, self.fd_active, l) * p as u64
    }
}

/// Precomputed 4- and 6-cycles of the two-replica window of a partitioned
/// protograph. Depends only on the support and the mask, not on the powers.
#[derive(Debug, Clone)]
pub struct WindowCycles {
    gamma: usize,
    kappa: usize,
    replicas: usize,
    pub cycles6: Vec<WindowCycle>,
    pub cycles4: Vec<WindowCycle>,
}

impl WindowCycles {
    /// Window of two replicas, or one when `l == 1`.
    pub fn new(proto: &ProtoMatrix, mask: &PartitionMask, l: usize) -> Self {
        let (gamma, kappa) = (proto.gamma(), proto.kappa());
        let replicas = l.clamp(1, 2);
        let g = window_graph(proto, mask, replicas);
        let mut cycles6 = Vec::new();
        for_each_cycle6(&g, |e| {
            let reps: HashSet<usize> = e.iter().map(|x| x.1 / kappa).collect();
            let span = if reps.len() == 1 {
                Span::Single(*reps.iter().next().unwrap() as u8)
            } else {
                Span::Double
            };
            let case = if gamma == 3 && replicas == 2 {
                classify_window_cycle6(e, gamma, kappa).map(|x| x.1)
            } else {
                None
            };
            cycles6.push(WindowCycle::from_entries(e, gamma, kappa, span, case));
        });
        let mut cycles4 = Vec::new();
        for_each_cycle4(&g, |e| {
            let reps: HashSet<usize> = e.iter().map(|x| x.1 / kappa).collect();
            let span = if reps.len() == 1 {
                Span::Single(*reps.iter().next().unwrap() as u8)
            } else {
                Span::Double
            };
            cycles4.push(WindowCycle::from_entries(e, gamma, kappa, span, None));
        });
        Self {
            gamma,
            kappa,
            replicas,
            cycles6,
            cycles4,
        }
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// `(F^a_s, F^a_d)` under `powers` (row-major).
    pub fn active_counts(&self, powers: &[u32], p: usize) -> (u64, u64) {
        let p = p as i64;
        let (mut s, mut d) = (0, 0);
        for c in &self.cycles6 {
            match c.span {
                Span::Single(0) => s += c.is_active(powers, p) as u64,
                Span::Single(_) => {}
                Span::Double => d += c.is_active(powers, p) as u64,
            }
        }
        (s, d)
    }

    /// Lifted 6-cycle count of the coupled code of length `l`.
    pub fn f_sc(&self, powers: &[u32], p: usize, l: usize) -> u64 {
        let (s, d) = self.active_counts(powers, p);
        total_cycles(s, d, l) * p as u64
    }

    pub fn has_active_quad(&self, powers: &[u32], p: usize) -> bool {
        self.cycles4.iter().any(|c| c.is_active(powers, p as i64))
    }

    /// Full census including the per-entry weighted counts.
    pub fn census(&self, powers: &[u32], p: usize) -> ActiveCensus {
        let pi = p as i64;
        let mut out = ActiveCensus {
            fs_active: 0,
            fs_active_second: 0,
            fd_active: 0,
            entry_weights: vec![0; self.gamma * self.kappa],
            quads_active: self.cycles4.iter().filter(|c| c.is_active(powers, pi)).count() as u64,
        };
        for c in self.cycles6.iter().filter(|c| c.is_active(powers, pi)) {
            let w = match c.span {
                Span::Single(0) => {
                    out.fs_active += 1;
                    1
                }
                Span::Single(_) => {
                    out.fs_active_second += 1;
                    1
                }
                Span::Double => {
                    out.fd_active += 1;
                    2
                }
            };
            for &b in &c.entries {
                out.entry_weights[b as usize] += w;
            }
        }
        if self.replicas == 1 {
            out.fs_active_second = out.fs_active;
        }
        out
    }
}

/// Lifted (3, 3, 3, 0) UGAST census of a γ = 3 code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UgastCensus {
    #[serde(rename = "Fa_s")]
    pub fs_active: u64,
    #[serde(rename = "Fa_d")]
    pub fd_active: u64,
    #[serde(rename = "F_SC")]
    pub f_sc: u64,
}

/// Number of 6-cycles in the lifted graph, `p·(L·F^a_s + (L−1)·F^a_d)`. Every
/// such cycle is a (3, 3, 3, 0) UGAST when the code has no 4-cycles.
pub fn count_ugast_3330(code: &SCCode) -> Result<UgastCensus> {
    if code.gamma() != 3 {
        return Err(Error::Unsupported(format!(
            "(3, 3, 3, 0) census needs gamma = 3, got {}",
            code.gamma()
        )));
    }
    let w = WindowCycles::new(code.proto(), code.mask(), code.coupling_length());
    let (s, d) = w.active_counts(code.proto().powers_flat(), code.p());
    Ok(UgastCensus {
        fs_active: s,
        fd_active: d,
        f_sc: total_cycles(s, d, code.coupling_length()) * code.p() as u64,
    })
}

/// Shortest cycle length class present in the lifted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Girth {
    Four,
    Six,
    AboveSix,
}

/// Reports 4 if an active 4-cycle exists, else 6 if an active 6-cycle exists.
pub fn girth_check(code: &SCCode) -> Girth {
    let w = WindowCycles::new(code.proto(), code.mask(), code.coupling_length());
    let powers = code.proto().powers_flat();
    if w.has_active_quad(powers, code.p()) {
        Girth::Four
    } else if w.cycles6.iter().any(|c| c.is_active(powers, code.p() as i64)) {
        Girth::Six
    } else {
        Girth::AboveSix
    }
}

/// Parallel 6-cycle count of a large graph, split by starting row.
pub fn count_cycles6_parallel(graph: &TannerGraph) -> u64 {
    let rows = row_lists(graph);
    let nb = later_neighbours(graph);
    (0..rows.len())
        .into_par_iter()
        .map(|a| {
            let mut n = 0u64;
            for &b in &nb[a] {
                let ab = intersect(&rows[a], &rows[b]);
                for &c in &nb[b] {
                    if nb[a].binary_search(&c).is_err() {
                        continue;
                    }
                    let bc = intersect(&rows[b], &rows[c]);
                    let ac = intersect(&rows[a], &rows[c]);
                    for &x in &ab {
                        for &y in bc.iter().filter(|&&y| y != x) {
                            n += ac.iter().filter(|&&z| z != x && z != y).count() as u64;
                        }
                    }
                }
            }
            n
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_3x3() {
        let g = TannerGraph::from_rows(3, &[vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        let cycles = enumerate_cycles(&g, 6).unwrap();
        assert_eq!(cycles.len(), 6);
        let distinct: HashSet<_> = cycles.iter().cloned().collect();
        assert_eq!(distinct.len(), 6);
        assert_eq!(count_cycles(&g, 4).unwrap(), 9);
        assert!(enumerate_cycles(&g, 8).is_err());
    }

    #[test]
    fn zero_row_does_not_matter() {
        let a = TannerGraph::from_rows(4, &[vec![0, 1, 2], vec![1, 2, 3], vec![0, 2, 3]]).unwrap();
        let b = TannerGraph::from_rows(4, &[vec![0, 1, 2], vec![], vec![1, 2, 3], vec![0, 2, 3]]).unwrap();
        assert_eq!(count_cycles(&a, 6).unwrap(), count_cycles(&b, 6).unwrap());
    }

    #[test]
    fn canonical_form_is_rotation_invariant() {
        let e = vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)];
        let c = ProtoCycle::canonical(e.clone());
        for s in (0..6).step_by(2) {
            let rot: Vec<_> = (0..6).map(|k| e[(s + k) % 6]).collect();
            assert_eq!(ProtoCycle::canonical(rot), c);
            let rev: Vec<_> = (0..6).map(|k| e[(s + 1 + 6 - k) % 6]).collect();
            assert_eq!(ProtoCycle::canonical(rev), c);
        }
    }

    #[test]
    fn lifting_law() {
        let cyc = ProtoCycle::canonical(vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)]);
        let same = ProtoMatrix::new(7, vec![vec![3; 3]; 3]).unwrap();
        assert_eq!(
            lift_count(&cyc, &same),
            Lift {
                is_active: true,
                beta: 1
            }
        );
        let mut off = same.clone();
        off.set_power(0, 0, 4);
        assert_eq!(
            lift_count(&cyc, &off),
            Lift {
                is_active: false,
                beta: 7
            }
        );
        let mut six = ProtoMatrix::new(6, vec![vec![0; 3]; 3]).unwrap();
        six.set_power(0, 0, 2);
        assert_eq!(lift_count(&cyc, &six).beta, 3);
    }

    #[test]
    fn ab_has_no_four_cycles() {
        let code = crate::qc_codes::couple(
            &ProtoMatrix::array_based(3, 7).unwrap(),
            &PartitionMask::from_bits(3, 7, 0x1b2c3),
            3,
        )
        .unwrap();
        assert_eq!(girth_check(&code), Girth::Six);
        assert_eq!(count_cycles(code.graph(), 4).unwrap(), 0);
    }

    #[test]
    fn equal_powers_give_girth_four() {
        let pm = ProtoMatrix::new(5, vec![vec![0, 1, 2, 3], vec![0, 2, 4, 1], vec![0, 3, 1, 4]]).unwrap();
        let mask = PartitionMask::all_zero(3, 4);
        let mut powers = pm.clone();
        assert_ne!(
            girth_check(&crate::qc_codes::couple(&powers, &mask, 2).unwrap()),
            Girth::Four
        );
        // f00 - f10 + f11 - f01 = 0
        powers.set_power(1, 1, 1);
        assert_eq!(
            girth_check(&crate::qc_codes::couple(&powers, &mask, 2).unwrap()),
            Girth::Four
        );
    }
}
