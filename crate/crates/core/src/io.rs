//! JSON code descriptions and alist export/import.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::graph::TannerGraph;
use crate::qc_codes::{PartitionMask, ProtoMatrix, SCCode, MEMORY};

/// Serialized form of an [`SCCode`]; enough to rebuild it bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub gamma: usize,
    pub kappa: usize,
    pub p: usize,
    #[serde(rename = "L")]
    pub coupling_length: usize,
    pub m: usize,
    pub mask: Vec<Vec<u8>>,
    pub powers: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<Vec<Vec<bool>>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub lambda: Option<u32>,
    /// Edge labels in `(row, col)` order of the lifted matrix.
    #[serde(default)]
    pub labels: Option<Vec<Symbol>>,
}

impl CodeFile {
    pub fn from_code(code: &SCCode) -> Self {
        let proto = code.proto();
        Self {
            gamma: code.gamma(),
            kappa: code.kappa(),
            p: code.p(),
            coupling_length: code.coupling_length(),
            m: MEMORY,
            mask: code.mask().rows(),
            powers: proto.powers_rows(),
            zero: proto.has_zero_circulants().then(|| proto.zero_rows()),
            seed: code.label_seed(),
            lambda: code.lambda(),
            labels: code.is_labeled().then(|| code.labels()),
        }
    }

    pub fn to_code(&self) -> Result<SCCode> {
        let proto = match &self.zero {
            Some(z) => ProtoMatrix::with_zeros(self.p, self.powers.clone(), z.clone())?,
            None => ProtoMatrix::new(self.p, self.powers.clone())?,
        };
        if (proto.gamma(), proto.kappa()) != (self.gamma, self.kappa) {
            return Err(Error::Parse(format!(
                "powers are {}x{} but header says {}x{}",
                proto.gamma(),
                proto.kappa(),
                self.gamma,
                self.kappa
            )));
        }
        let mask = PartitionMask::new(self.mask.clone())?;
        let code = SCCode::build(proto, mask, self.coupling_length, self.m)?;
        match (&self.labels, self.lambda) {
            (Some(labels), Some(lambda)) => code.with_labels(lambda, self.seed, labels),
            (Some(_), None) => Err(Error::Parse("labels given without lambda".into())),
            (None, _) => Ok(code),
        }
    }
}

pub fn code_to_json(code: &SCCode) -> String {
    serde_json::to_string_pretty(&CodeFile::from_code(code)).expect("code files always serialize")
}

pub fn code_from_json(text: &str) -> Result<SCCode> {
    let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_code()
}

/// Writes the binary support of `graph` in alist format (1-indexed, zero padded).
pub fn write_alist(graph: &TannerGraph) -> String {
    let n = graph.n_vars();
    let m = graph.n_checks();
    let col_deg: Vec<usize> = (0..n).map(|v| graph.var_degree(v)).collect();
    let row_deg: Vec<usize> = (0..m).map(|c| graph.check_degree(c)).collect();
    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);

    let mut out = String::new();
    let join = |xs: &mut dyn Iterator<Item = usize>| xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "{n} {m}").unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    writeln!(out, "{}", join(&mut col_deg.iter().copied())).unwrap();
    writeln!(out, "{}", join(&mut row_deg.iter().copied())).unwrap();
    for v in 0..n {
        let mut adj: Vec<usize> = graph.var_checks(v).map(|c| c + 1).collect();
        adj.resize(max_col, 0);
        writeln!(out, "{}", join(&mut adj.into_iter())).unwrap();
    }
    for c in 0..m {
        let mut adj: Vec<usize> = graph.check_vars(c).map(|v| v + 1).collect();
        adj.resize(max_row, 0);
        writeln!(out, "{}", join(&mut adj.into_iter())).unwrap();
    }
    out
}

/// Parses an alist file into a binary Tanner graph. Zero padding is accepted
/// and the column and row sections must agree.
pub fn read_alist(text: &str) -> Result<TannerGraph> {
    let mut tokens = text.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|_| Error::Parse(format!("non-integer token `{t}`")))
    });
    let mut next = || {
        tokens
            .next()
            .unwrap_or_else(|| Err(Error::Parse("unexpected end of alist".into())))
    };
    let n = next()?;
    let m = next()?;
    let max_col = next()?;
    let max_row = next()?;
    let col_deg = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let row_deg = (0..m).map(|_| next()).collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (v, &d) in col_deg.iter().enumerate() {
        let entries = (0..max_col.max(d)).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let nz: Vec<usize> = entries.into_iter().filter(|&c| c != 0).collect();
        if nz.len() != d {
            return Err(Error::Parse(format!(
                "column {} lists {} entries, degree {d}",
                v + 1,
                nz.len()
            )));
        }
        for c in nz {
            if c > m {
                return Err(Error::Parse(format!("row index {c} exceeds {m}")));
            }
            rows[c - 1].push(v);
        }
    }
    for (c, &d) in row_deg.iter().enumerate() {
        let entries = (0..max_row.max(d)).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let mut nz: Vec<usize> = entries.into_iter().filter(|&v| v != 0).map(|v| v - 1).collect();
        nz.sort_unstable();
        let mut listed = rows[c].clone();
        listed.sort_unstable();
        if nz != listed {
            return Err(Error::Parse(format!("row {} disagrees with the column lists", c + 1)));
        }
    }
    TannerGraph::from_rows(n, &rows)
}
