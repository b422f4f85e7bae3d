//! Oracles and instance builders shared by the integration tests. Everything
//! here is written against the public data types only, without calling into
//! the counting or search code under test.

#![allow(dead_code)]

use nbsc_core::gast_tools::{GastConfig, UgastConfig};
use nbsc_core::{Edge, PartitionMask, Symbol, TannerGraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Number of cycles through exactly `k` variable nodes, by depth-first search
/// from the smallest VN of each cycle.
pub fn dfs_cycle_count(graph: &TannerGraph, k: usize) -> u64 {
    let vc: Vec<Vec<usize>> = (0..graph.n_vars()).map(|v| graph.var_checks(v).collect()).collect();
    let cv: Vec<Vec<usize>> = (0..graph.n_checks()).map(|c| graph.check_vars(c).collect()).collect();
    let mut total = 0;
    for start in 0..graph.n_vars() {
        let mut vns = vec![start];
        let mut cns = Vec::new();
        total += extend(start, k, &mut vns, &mut cns, &vc, &cv);
    }
    // Each cycle is walked once in each direction.
    total / 2
}

fn extend(
    start: usize,
    k: usize,
    vns: &mut Vec<usize>,
    cns: &mut Vec<usize>,
    vc: &[Vec<usize>],
    cv: &[Vec<usize>],
) -> u64 {
    let last = *vns.last().unwrap();
    let mut n = 0;
    for &c in &vc[last] {
        if cns.contains(&c) {
            continue;
        }
        for &v in &cv[c] {
            if vns.len() == k {
                n += u64::from(v == start);
            } else if v > start && !vns.contains(&v) {
                vns.push(v);
                cns.push(c);
                n += extend(start, k, vns, cns, vc, cv);
                vns.pop();
                cns.pop();
            }
        }
    }
    n
}

/// Binary coupled protograph with memory 1: replica `r` places entry `(i, j)`
/// at row `(r + mask[i][j])·γ + i`, column `r·κ + j`.
pub fn coupled_protograph(mask: &PartitionMask, l: usize) -> TannerGraph {
    let (g, k) = (mask.gamma(), mask.kappa());
    let mut edges = Vec::new();
    for r in 0..l {
        for i in 0..g {
            for j in 0..k {
                edges.push(Edge {
                    check: (r + mask.get(i, j) as usize) * g + i,
                    var: r * k + j,
                    weight: 1,
                });
            }
        }
    }
    TannerGraph::from_edges((l + 1) * g, l * k, edges).unwrap()
}

/// Lifts a binary base matrix given as `(row, col, power)` entries with
/// `p × p` circulant permutations: check `row·p + i` meets variable
/// `col·p + (i + power) mod p`.
pub fn lift(entries: &[(usize, usize, usize)], rows: usize, cols: usize, p: usize) -> TannerGraph {
    let edges = entries
        .iter()
        .flat_map(|&(r, c, f)| {
            (0..p).map(move |i| Edge {
                check: r * p + i,
                var: c * p + (i + f) % p,
                weight: 1,
            })
        })
        .collect();
    TannerGraph::from_edges(rows * p, cols * p, edges).unwrap()
}

/// Edge counts of the connected components that contain at least one edge,
/// ascending.
pub fn component_edge_counts(graph: &TannerGraph) -> Vec<usize> {
    let nv = graph.n_vars();
    let mut parent: Vec<usize> = (0..nv + graph.n_checks()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in graph.edges() {
        let (a, b) = (find(&mut parent, e.var), find(&mut parent, nv + e.check));
        parent[a] = b;
    }
    let mut counts = std::collections::BTreeMap::new();
    for e in graph.edges() {
        *counts.entry(find(&mut parent, e.var)).or_insert(0usize) += 1;
    }
    let mut out: Vec<usize> = counts.into_values().collect();
    out.sort_unstable();
    out
}

/// GF(4) multiplication with `x² = x + 1`, written out by hand.
pub const GF4_MUL: [[Symbol; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
pub const GF4_INV: [Symbol; 4] = [0, 1, 3, 2];

/// Whether some nonzero GF(4) assignment leaves every unsatisfied check with
/// at most two neighbours and every VN with more satisfied than unsatisfied
/// checks. Scans all `3^a` assignments.
pub fn brute_gast_gf4(config: &UgastConfig, weights: &[Vec<Symbol>]) -> bool {
    let a = config.a();
    let lists: Vec<&[usize]> = (0..config.checks().len()).map(|c| config.check_vns(c)).collect();
    let mut values = vec![0 as Symbol; a];
    'assign: for code in 0..3usize.pow(a as u32) {
        let mut x = code;
        for v in values.iter_mut() {
            *v = (x % 3) as Symbol + 1;
            x /= 3;
        }
        let mut sat = vec![0usize; a];
        let mut unsat = vec![0usize; a];
        for (list, w) in lists.iter().zip(weights) {
            let s = list
                .iter()
                .zip(w)
                .fold(0, |acc, (&v, &wv)| acc ^ GF4_MUL[wv as usize][values[v] as usize]);
            if s == 0 {
                list.iter().for_each(|&v| sat[v] += 1);
            } else if list.len() > 2 {
                continue 'assign;
            } else {
                list.iter().for_each(|&v| unsat[v] += 1);
            }
        }
        if (0..a).all(|v| sat[v] > unsat[v]) {
            return true;
        }
    }
    false
}

/// A GAST on a synthetic topology. Degree-2 checks come first, one per VN-graph
/// edge, followed by the degree-1 checks in `pendants` order.
pub fn planted(a: usize, vn_edges: &[(usize, usize)], pendants: &[usize], rng: &mut impl Rng) -> GastConfig {
    let mut lists: Vec<Vec<usize>> = vn_edges.iter().map(|&(u, v)| vec![u.min(v), u.max(v)]).collect();
    lists.extend(pendants.iter().map(|&v| vec![v]));
    let values: Vec<Symbol> = (0..a).map(|_| rng.gen_range(1..4)).collect();
    let weights = lists
        .iter()
        .map(|l| match l[..] {
            [u, v] => {
                // w_u·x_u + w_v·x_v = 0 in characteristic 2.
                let wu: Symbol = rng.gen_range(1..4);
                let wv =
                    GF4_MUL[GF4_MUL[wu as usize][values[u] as usize] as usize][GF4_INV[values[v] as usize] as usize];
                vec![wu, wv]
            }
            _ => vec![rng.gen_range(1..4)],
        })
        .collect();
    GastConfig {
        topology: UgastConfig::synthetic(a, lists).unwrap(),
        weights,
        b: pendants.len(),
        witness: values,
    }
}

/// The (7, 9, 9, 13, 0) topology in a γ = 5 code: VNs 0, 1, 2 carry two
/// degree-1 checks each, VNs 3, 4, 5 one each.
pub fn topology_7_9_9_13(rng: &mut impl Rng) -> GastConfig {
    let edges = [
        (0, 1),
        (0, 3),
        (0, 4),
        (1, 3),
        (1, 6),
        (2, 4),
        (2, 5),
        (2, 6),
        (3, 5),
        (3, 6),
        (4, 5),
        (4, 6),
        (5, 6),
    ];
    planted(7, &edges, &[0, 0, 1, 1, 2, 2, 3, 4, 5], rng)
}

/// The (8, 0, 0, 16, 0) topology in a γ = 4 code: the circulant graph C8(1, 2).
pub fn topology_8_0_0_16(rng: &mut impl Rng) -> GastConfig {
    let edges: Vec<(usize, usize)> = (0..8).flat_map(|i| [(i, (i + 1) % 8), (i, (i + 2) % 8)]).collect();
    planted(8, &edges, &[], rng)
}

/// Random simple graph on `a` vertices with every degree 2 or 3, by rejection
/// over stub pairings.
fn random_subcubic(a: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    loop {
        let mut deg: Vec<usize> = (0..a).map(|_| rng.gen_range(2..=3)).collect();
        if a == 3 {
            deg = vec![2; 3];
        }
        if deg.iter().sum::<usize>() % 2 == 1 {
            let v = rng.gen_range(0..a);
            deg[v] = 5 - deg[v];
        }
        let mut stubs: Vec<usize> = deg
            .iter()
            .enumerate()
            .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
            .collect();
        for _ in 0..200 {
            stubs.shuffle(rng);
            let mut edges: Vec<(usize, usize)> = stubs.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
            edges.sort_unstable();
            let simple = edges.iter().all(|e| e.0 != e.1) && edges.windows(2).all(|w| w[0] != w[1]);
            if simple {
                return edges;
            }
        }
    }
}

/// Random GAST instance of a γ = 3 code over GF(4). VNs of VN-graph degree 2
/// get one degree-1 check. With `extra_unsatisfied`, one degree-2 check between
/// two VNs of VN-graph degree 3 is left unsatisfied by the witness, so that
/// `b = d₁ + 1`.
pub fn synthesize_gast(a: usize, extra_unsatisfied: bool, rng: &mut impl Rng) -> GastConfig {
    loop {
        let edges = random_subcubic(a, rng);
        let mut deg = vec![0; a];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let pendants: Vec<usize> = (0..a).filter(|&v| deg[v] == 2).collect();
        let mut g = planted(a, &edges, &pendants, rng);
        if extra_unsatisfied {
            let Some(e) = edges.iter().position(|&(u, v)| deg[u] == 3 && deg[v] == 3) else {
                continue;
            };
            let w = &mut g.weights[e];
            w[1] = w[1] % 3 + 1;
            g.b += 1;
        }
        return g;
    }
}
