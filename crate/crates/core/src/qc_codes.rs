//! Circulant-based block codes, their partition into two components, and
//! memory-one spatial coupling.
//!
//! The circulant `σ^f` is stored implicitly: row `u` of the `p × p` block has
//! its single 1 in column `(u + f) mod p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldGf, Symbol};
use crate::graph::{Edge, TannerGraph};

/// Upper bound on the number of lifted columns `L·κ·p` accepted by [`couple`].
pub const MAX_LIFTED_COLUMNS: usize = 1 << 24;

/// Largest matrix (in entries) for which a dense view may be materialized.
pub const DENSE_LIMIT: usize = 1_000_000;

/// γ×κ protograph with a circulant power per entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtoMatrix {
    gamma: usize,
    kappa: usize,
    p: usize,
    powers: Vec<u32>,
    zero: Vec<bool>,
}

impl ProtoMatrix {
    /// Protograph without zero circulants.
    pub fn new(p: usize, powers: Vec<Vec<u32>>) -> Result<Self> {
        let zero = powers.iter().map(|r| vec![false; r.len()]).collect();
        Self::with_zeros(p, powers, zero)
    }

    /// Protograph where `zero[i][j]` marks a zero circulant at `(i, j)`.
    pub fn with_zeros(p: usize, powers: Vec<Vec<u32>>, zero: Vec<Vec<bool>>) -> Result<Self> {
        let gamma = powers.len();
        if gamma == 0 || p == 0 {
            return Err(Error::Construction("empty protograph".into()));
        }
        let kappa = powers[0].len();
        if kappa == 0
            || powers.iter().any(|r| r.len() != kappa)
            || zero.len() != gamma
            || zero.iter().any(|r| r.len() != kappa)
        {
            return Err(Error::Construction("ragged protograph rows".into()));
        }
        let powers: Vec<u32> = powers.into_iter().flatten().collect();
        let zero: Vec<bool> = zero.into_iter().flatten().collect();
        if let Some(k) = (0..powers.len()).find(|&k| !zero[k] && powers[k] as usize >= p) {
            return Err(Error::Construction(format!(
                "power {} at ({}, {}) not below p = {p}",
                powers[k],
                k / kappa,
                k % kappa
            )));
        }
        Ok(Self {
            gamma,
            kappa,
            p,
            powers,
            zero,
        })
    }

    /// Array-based code: `f[i][j] = i·j mod p`, κ = p, p prime.
    pub fn array_based(gamma: usize, p: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Construction(format!("array-based codes need prime p, got {p}")));
        }
        if gamma > p {
            return Err(Error::Construction(format!("gamma = {gamma} exceeds p = {p}")));
        }
        Self::array_based_prefix(gamma, p, p)
    }

    /// The first κ columns of the array-based power pattern, κ ≤ p.
    pub fn array_based_prefix(gamma: usize, kappa: usize, p: usize) -> Result<Self> {
        if kappa > p {
            return Err(Error::Construction(format!(
                "array-based powers need kappa <= p, got kappa = {kappa}, p = {p}"
            )));
        }
        let powers = (0..gamma)
            .map(|i| (0..kappa).map(|j| ((i * j) % p) as u32).collect())
            .collect();
        Self::new(p, powers)
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn power(&self, i: usize, j: usize) -> u32 {
        self.powers[i * self.kappa + j]
    }

    #[inline]
    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        self.zero[i * self.kappa + j]
    }

    pub fn set_power(&mut self, i: usize, j: usize, f: u32) {
        debug_assert!((f as usize) < self.p);
        self.powers[i * self.kappa + j] = f;
    }

    /// Row-major power slice.
    pub fn powers_flat(&self) -> &[u32] {
        &self.powers
    }

    pub fn powers_rows(&self) -> Vec<Vec<u32>> {
        self.powers.chunks(self.kappa).map(|r| r.to_vec()).collect()
    }

    pub fn zero_rows(&self) -> Vec<Vec<bool>> {
        self.zero.chunks(self.kappa).map(|r| r.to_vec()).collect()
    }

    pub fn has_zero_circulants(&self) -> bool {
        self.zero.iter().any(|&z| z)
    }

    /// Same protograph with all powers replaced; `powers` is row-major.
    pub fn with_powers(&self, powers: &[u32]) -> Self {
        assert_eq!(powers.len(), self.powers.len());
        Self {
            powers: powers.to_vec(),
            ..self.clone()
        }
    }

    /// The `p = 1` protograph: same support, every power zero.
    pub fn binary(&self) -> Self {
        Self {
            p: 1,
            powers: vec![0; self.powers.len()],
            ..self.clone()
        }
    }
}

impl Serialize for ProtoMatrix {
    /// Serializes the powers as rows.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.powers_rows().serialize(s)
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Assignment of each circulant to `H₀` (0) or `H₁` (1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionMask {
    gamma: usize,
    kappa: usize,
    assign: Vec<u8>,
}

impl Serialize for PartitionMask {
    /// Serializes the assignment as rows.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl PartitionMask {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let gamma = rows.len();
        let kappa = rows.first().map_or(0, Vec::len);
        if gamma == 0 || kappa == 0 || rows.iter().any(|r| r.len() != kappa) {
            return Err(Error::Construction("ragged or empty partition mask".into()));
        }
        let assign: Vec<u8> = rows.into_iter().flatten().collect();
        if assign.iter().any(|&a| a > 1) {
            return Err(Error::Construction("mask entries must be 0 or 1".into()));
        }
        Ok(Self { gamma, kappa, assign })
    }

    /// Every circulant in `H₀`: the uncoupled (block-diagonal) arrangement.
    pub fn all_zero(gamma: usize, kappa: usize) -> Self {
        Self {
            gamma,
            kappa,
            assign: vec![0; gamma * kappa],
        }
    }

    /// Mask from the low `γκ` bits of `bits`, bit `i·κ + j` for entry `(i, j)`.
    pub fn from_bits(gamma: usize, kappa: usize, bits: u64) -> Self {
        Self {
            gamma,
            kappa,
            assign: (0..gamma * kappa).map(|k| ((bits >> k) & 1) as u8).collect(),
        }
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Component (0 or 1) of circulant `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.assign[i * self.kappa + j]
    }

    pub fn set(&mut self, i: usize, j: usize, component: u8) {
        assert!(component <= 1);
        self.assign[i * self.kappa + j] = component;
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.assign.chunks(self.kappa).map(|r| r.to_vec()).collect()
    }

    /// Number of circulants assigned to `component` in row `i`.
    pub fn row_population(&self, i: usize, component: u8) -> usize {
        (0..self.kappa).filter(|&j| self.get(i, j) == component).count()
    }

    /// Mask with `H₀` and `H₁` exchanged.
    pub fn complement(&self) -> Self {
        Self {
            assign: self.assign.iter().map(|a| 1 - a).collect(),
            ..self.clone()
        }
    }
}

/// One entry of the coupled protograph together with the circulant it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtoEntry {
    pub row: usize,
    pub col: usize,
    /// Row group in the underlying block code.
    pub base_row: usize,
    /// Column group in the underlying block code.
    pub base_col: usize,
    /// Replica index, `0..L`.
    pub replica: usize,
}

/// Memory-one spatially-coupled code, lifted to its binary (or labeled) image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SCCode {
    proto: ProtoMatrix,
    mask: PartitionMask,
    coupling_length: usize,
    lambda: Option<u32>,
    label_seed: Option<u64>,
    graph: TannerGraph,
}

/// Memory of every coupled code built here.
pub const MEMORY: usize = 1;

/// Entries of the coupled protograph `(L+1)γ × Lκ`, in replica-major order.
pub fn coupled_entries(proto: &ProtoMatrix, mask: &PartitionMask, l: usize) -> Vec<ProtoEntry> {
    let (gamma, kappa) = (proto.gamma(), proto.kappa());
    let mut out = Vec::with_capacity(l * gamma * kappa);
    for r in 0..l {
        for j in 0..kappa {
            for i in 0..gamma {
                if proto.is_zero(i, j) {
                    continue;
                }
                out.push(ProtoEntry {
                    row: (r + mask.get(i, j) as usize) * gamma + i,
                    col: r * kappa + j,
                    base_row: i,
                    base_col: j,
                    replica: r,
                });
            }
        }
    }
    out
}

/// Couples `H₀`/`H₁` `l` times with memory one.
pub fn couple(proto: &ProtoMatrix, mask: &PartitionMask, l: usize) -> Result<SCCode> {
    SCCode::build(proto.clone(), mask.clone(), l, MEMORY)
}

impl SCCode {
    /// Builds the lifted coupled matrix. Only `memory == 1` is supported.
    pub fn build(proto: ProtoMatrix, mask: PartitionMask, l: usize, memory: usize) -> Result<Self> {
        if memory != MEMORY {
            return Err(Error::Unsupported(format!("memory {memory} (only m = 1 is supported)")));
        }
        if l < 1 {
            return Err(Error::Construction("coupling length must be at least 1".into()));
        }
        if (mask.gamma(), mask.kappa()) != (proto.gamma(), proto.kappa()) {
            return Err(Error::Construction(format!(
                "mask is {}x{} but protograph is {}x{}",
                mask.gamma(),
                mask.kappa(),
                proto.gamma(),
                proto.kappa()
            )));
        }
        let p = proto.p();
        let cols = l
            .checked_mul(proto.kappa())
            .and_then(|x| x.checked_mul(p))
            .filter(|&n| n <= MAX_LIFTED_COLUMNS)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "L·κ·p = {}·{}·{p} exceeds {MAX_LIFTED_COLUMNS}",
                    l,
                    proto.kappa()
                ))
            })?;
        let rows = (l + 1) * proto.gamma() * p;
        let entries = coupled_entries(&proto, &mask, l);
        let mut edges = Vec::with_capacity(entries.len() * p);
        for e in &entries {
            let f = proto.power(e.base_row, e.base_col) as usize;
            for u in 0..p {
                edges.push(Edge {
                    check: e.row * p + u,
                    var: e.col * p + (u + f) % p,
                    weight: 1,
                });
            }
        }
        let graph = TannerGraph::from_edges(rows, cols, edges)?;
        Ok(Self {
            proto,
            mask,
            coupling_length: l,
            lambda: None,
            label_seed: None,
            graph,
        })
    }

    pub fn proto(&self) -> &ProtoMatrix {
        &self.proto
    }

    pub fn mask(&self) -> &PartitionMask {
        &self.mask
    }

    pub fn coupling_length(&self) -> usize {
        self.coupling_length
    }

    pub fn memory(&self) -> usize {
        MEMORY
    }

    pub fn gamma(&self) -> usize {
        self.proto.gamma()
    }

    pub fn kappa(&self) -> usize {
        self.proto.kappa()
    }

    pub fn p(&self) -> usize {
        self.proto.p()
    }

    /// Lifted (labeled) parity-check matrix as a Tanner graph.
    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    /// Field extension degree of the labels, if the code has been labeled.
    pub fn lambda(&self) -> Option<u32> {
        self.lambda
    }

    pub fn label_seed(&self) -> Option<u64> {
        self.label_seed
    }

    pub fn is_labeled(&self) -> bool {
        self.lambda.is_some()
    }

    /// `(rows, cols)` of the lifted matrix.
    pub fn dims(&self) -> (usize, usize) {
        (self.graph.n_checks(), self.graph.n_vars())
    }

    /// Coupled protograph entries (the `p = 1` image).
    pub fn proto_entries(&self) -> Vec<ProtoEntry> {
        coupled_entries(&self.proto, &self.mask, self.coupling_length)
    }

    /// Same topology with a new power assignment; labels are dropped.
    pub fn with_proto(&self, proto: ProtoMatrix) -> Result<Self> {
        Self::build(proto, self.mask.clone(), self.coupling_length, MEMORY)
    }

    /// Re-attaches labels; `labels` follows the `(row, col)` order of the edges.
    pub fn with_labels(&self, lambda: u32, seed: Option<u64>, labels: &[Symbol]) -> Result<Self> {
        if labels.len() != self.graph.n_edges() {
            return Err(Error::Construction(format!(
                "{} labels for {} nonzero entries",
                labels.len(),
                self.graph.n_edges()
            )));
        }
        let q = 1usize << lambda;
        if let Some(&w) = labels.iter().find(|&&w| w == 0 || w as usize >= q) {
            return Err(Error::ElementOutOfRange {
                value: w as u32,
                q: q as u32,
            });
        }
        Ok(Self {
            graph: self.graph.map_weights(|k, _| labels[k]),
            lambda: Some(lambda),
            label_seed: seed,
            ..self.clone()
        })
    }

    /// Current edge labels in `(row, col)` order.
    pub fn labels(&self) -> Vec<Symbol> {
        self.graph.edges().iter().map(|e| e.weight).collect()
    }
}

/// The binary protograph `H^bp_SC` of a code: every circulant collapsed to one entry.
pub fn protograph_of(code: &SCCode) -> SCCode {
    SCCode::build(code.proto.binary(), code.mask.clone(), code.coupling_length, MEMORY)
        .expect("the binary protograph is smaller than the code it came from")
}

/// Draws an independent uniformly distributed nonzero label for every lifted entry.
pub fn label_edges(code: &SCCode, field: &FieldGf, seed: u64) -> SCCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.order();
    SCCode {
        graph: code.graph.map_weights(|_, _| rng.gen_range(1..q) as Symbol),
        lambda: Some(field.lambda()),
        label_seed: Some(seed),
        ..code.clone()
    }
}

/// A new weight for an existing lifted entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeChange {
    pub row: usize,
    pub col: usize,
    pub weight: Symbol,
}

/// Replaces the listed weights; the topology is unchanged.
pub fn apply_edge_changes(code: &SCCode, changes: &[EdgeChange]) -> Result<SCCode> {
    let mut graph = code.graph.clone();
    let q = code.lambda.map(|l| 1usize << l);
    for c in changes {
        if c.weight == 0 {
            return Err(Error::InvalidEdgeChange {
                row: c.row,
                col: c.col,
                reason: "new weight is zero",
            });
        }
        if q.is_some_and(|q| c.weight as usize >= q) {
            return Err(Error::InvalidEdgeChange {
                row: c.row,
                col: c.col,
                reason: "new weight outside the field",
            });
        }
        let k = graph.find_edge(c.row, c.col).ok_or(Error::InvalidEdgeChange {
            row: c.row,
            col: c.col,
            reason: "entry is zero",
        })?;
        graph.set_weight(k, c.weight);
    }
    Ok(SCCode { graph, ..code.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab7() -> ProtoMatrix {
        ProtoMatrix::array_based(3, 7).unwrap()
    }

    #[test]
    fn array_based_powers() {
        let pm = ab7();
        assert_eq!(pm.kappa(), 7);
        assert!((0..7).all(|j| pm.power(0, j) == 0));
        assert_eq!(
            (0..7).map(|j| pm.power(1, j)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4, 5, 6]
        );
        assert_eq!(pm.power(2, 3), 6);
        assert!(ProtoMatrix::array_based(3, 9).is_err());
        assert!(ProtoMatrix::array_based(5, 3).is_err());
    }

    #[test]
    fn coupled_dimensions() {
        let code = couple(&ab7(), &PartitionMask::all_zero(3, 7), 30).unwrap();
        assert_eq!(code.dims(), (651, 1470));
        let proto = protograph_of(&code);
        assert_eq!(proto.dims(), (93, 210));
        assert!(SCCode::build(ab7(), PartitionMask::all_zero(3, 7), 3, 2).is_err());
    }

    #[test]
    fn column_weights() {
        let mask = PartitionMask::from_bits(3, 7, 0b1010_0110_0101_1100_1101);
        let code = couple(&ab7(), &mask, 4).unwrap();
        let g = code.graph();
        assert!((0..g.n_vars()).all(|v| g.var_degree(v) == 3));
        let degrees: std::collections::BTreeSet<_> = (0..g.n_checks()).map(|c| g.check_degree(c)).collect();
        assert!(degrees.contains(&7));
    }

    #[test]
    fn overflow_guard() {
        let pm = ProtoMatrix::array_based(3, 101).unwrap();
        let err = couple(&pm, &PartitionMask::all_zero(3, 101), 2000).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn labels_are_nonzero_and_reproducible() {
        let f = FieldGf::new(2).unwrap();
        let code = couple(&ab7(), &PartitionMask::all_zero(3, 7), 2).unwrap();
        let a = label_edges(&code, &f, 9);
        let b = label_edges(&code, &f, 9);
        assert_eq!(a, b);
        assert!(a.labels().iter().all(|&w| (1..=3).contains(&w)));
    }

    #[test]
    fn edge_change_errors() {
        let code = couple(&ab7(), &PartitionMask::all_zero(3, 7), 2).unwrap();
        let e = code.graph().edges()[0];
        assert!(apply_edge_changes(&code, &[]).unwrap() == code);
        let zero_w = EdgeChange {
            row: e.check,
            col: e.var,
            weight: 0,
        };
        assert!(apply_edge_changes(&code, &[zero_w]).is_err());
        let missing = (0..code.dims().1)
            .find(|&v| code.graph().find_edge(0, v).is_none())
            .unwrap();
        let bad = EdgeChange {
            row: 0,
            col: missing,
            weight: 2,
        };
        assert!(matches!(
            apply_edge_changes(&code, &[bad]),
            Err(Error::InvalidEdgeChange {
                reason: "entry is zero",
                ..
            })
        ));
    }
}
