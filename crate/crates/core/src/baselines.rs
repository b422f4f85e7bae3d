//! Reference partitions for comparison: the cutting-vector (CV) split and the
//! minimum-overlap (MO) split, each paired with array-based powers.
//!
//! MO admissibility is taken as: the two components hold the same number of
//! circulants up to one, every row of either component holds `⌊κ/2⌋ ± 1`
//! circulants, and among such masks the largest pairwise row overlap (over both
//! components) is minimal, then the sum of those overlaps. The (3, 3, 3, 0)
//! count is minimized over the admissible masks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle_analysis::WindowCycles;
use crate::error::{Error, Result};
use crate::overlap_opt::{enumerate_valid_overlaps, realize_mask, OverlapVector};
use crate::qc_codes::{PartitionMask, ProtoMatrix};

/// Ascending cut positions `ζ₀ ≤ ζ₁ ≤ ζ₂`; row `i` of `H₀` holds the
/// circulants with column index below `ζ_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[usize; 3]", try_from = "[usize; 3]")]
pub struct CuttingVector([usize; 3]);

impl CuttingVector {
    pub fn new(zeta: [usize; 3]) -> Result<Self> {
        if zeta[0] > zeta[1] || zeta[1] > zeta[2] {
            return Err(Error::Construction(format!("cutting vector {zeta:?} is not ascending")));
        }
        Ok(Self(zeta))
    }

    pub fn get(&self) -> [usize; 3] {
        self.0
    }
}

impl TryFrom<[usize; 3]> for CuttingVector {
    type Error = Error;

    fn try_from(zeta: [usize; 3]) -> Result<Self> {
        Self::new(zeta)
    }
}

impl From<CuttingVector> for [usize; 3] {
    fn from(z: CuttingVector) -> Self {
        z.0
    }
}

pub fn cv_mask(zeta: CuttingVector, kappa: usize) -> Result<PartitionMask> {
    let z = zeta.get();
    if z[2] > kappa {
        return Err(Error::Construction(format!("cut {} exceeds kappa = {kappa}", z[2])));
    }
    let rows = z
        .iter()
        .map(|&zi| (0..kappa).map(|j| u8::from(j >= zi)).collect())
        .collect();
    PartitionMask::new(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CvResult {
    pub zeta: CuttingVector,
    pub mask: PartitionMask,
    #[serde(rename = "F_SC")]
    pub f_sc: u64,
}

fn require_gamma3(proto: &ProtoMatrix) -> Result<()> {
    if proto.gamma() != 3 {
        return Err(Error::Unsupported(format!(
            "baselines need gamma = 3, got {}",
            proto.gamma()
        )));
    }
    Ok(())
}

fn ugast_count(proto: &ProtoMatrix, mask: &PartitionMask, l: usize) -> u64 {
    WindowCycles::new(proto, mask, l).f_sc(proto.powers_flat(), proto.p(), l)
}

/// Best cutting vector for `proto` over all ascending `ζ`. Ties go to the
/// lexicographically smallest `ζ`.
pub fn cv_exhaustive_best(proto: &ProtoMatrix, l: usize) -> Result<CvResult> {
    require_gamma3(proto)?;
    let k = proto.kappa();
    let mut zetas = Vec::new();
    for z0 in 0..=k {
        for z1 in z0..=k {
            for z2 in z1..=k {
                zetas.push(CuttingVector([z0, z1, z2]));
            }
        }
    }
    let (f_sc, zeta) = zetas
        .into_par_iter()
        .map(|z| {
            let mask = cv_mask(z, k).expect("enumerated cuts are valid");
            (ugast_count(proto, &mask, l), z)
        })
        .min()
        .expect("at least one cutting vector");
    Ok(CvResult {
        zeta,
        mask: cv_mask(zeta, k)?,
        f_sc,
    })
}

/// `(max, sum)` of the six pairwise row overlaps across both components.
pub fn mo_overlap_key(t: &OverlapVector, kappa: usize) -> (i64, i64) {
    let c = t.complement(kappa);
    let ov = [t.t01, t.t02, t.t12, c.t01, c.t02, c.t12];
    (*ov.iter().max().unwrap(), ov.iter().sum())
}

/// Component and row balance required of an MO mask, from its overlap vector.
pub fn mo_balanced(t: &OverlapVector, kappa: usize) -> bool {
    let k = kappa as i64;
    let h0 = t.t0 + t.t1 + t.t2;
    if (3 * k - 2 * h0).abs() > 1 {
        return false;
    }
    let target = k / 2;
    [t.t0, t.t1, t.t2, k - t.t0, k - t.t1, k - t.t2]
        .iter()
        .all(|&x| (x - target).abs() <= 1)
}

/// Largest κ searched exhaustively over all `2^{3κ}` masks.
pub const MO_EXHAUSTIVE_MAX_KAPPA: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoConfig {
    /// Local-search restarts, used when κ exceeds [`MO_EXHAUSTIVE_MAX_KAPPA`].
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MoConfig {
    fn default() -> Self {
        Self { restarts: 64, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoResult {
    pub mask: PartitionMask,
    pub overlap: OverlapVector,
    /// Largest pairwise row overlap of the admissible masks.
    pub max_overlap: i64,
    pub total_overlap: i64,
    #[serde(rename = "F_SC")]
    pub f_sc: u64,
    /// Whether every admissible mask was evaluated.
    pub exhaustive: bool,
    pub masks_evaluated: u64,
}

/// Optimal MO key over all valid overlap vectors and the vectors attaining it.
fn mo_optimal_overlaps(kappa: usize) -> Result<((i64, i64), Vec<OverlapVector>)> {
    let mut best: Option<(i64, i64)> = None;
    let mut arg = Vec::new();
    for t in enumerate_valid_overlaps(kappa).filter(|t| mo_balanced(t, kappa)) {
        let key = mo_overlap_key(&t, kappa);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
            arg.clear();
        }
        if best == Some(key) {
            arg.push(t);
        }
    }
    best.map(|b| (b, arg))
        .ok_or_else(|| Error::Unsupported(format!("no MO-admissible mask for kappa = {kappa}")))
}

/// Best MO partition for `proto`. Exhaustive up to
/// [`MO_EXHAUSTIVE_MAX_KAPPA`]; beyond that, seeded steepest descent over
/// column swaps (which keep the overlap vector fixed) from random realizations
/// of the optimal-key vectors.
pub fn mo_best(proto: &ProtoMatrix, l: usize, config: &MoConfig) -> Result<MoResult> {
    require_gamma3(proto)?;
    let kappa = proto.kappa();
    let (key, optima) = mo_optimal_overlaps(kappa)?;
    if kappa <= MO_EXHAUSTIVE_MAX_KAPPA {
        mo_exhaustive(proto, l, key)
    } else {
        mo_local(proto, l, key, &optima, config)
    }
}

fn mo_exhaustive(proto: &ProtoMatrix, l: usize, key: (i64, i64)) -> Result<MoResult> {
    let kappa = proto.kappa();
    let best = (0u64..1 << (3 * kappa))
        .into_par_iter()
        .filter_map(|bits| {
            let mask = PartitionMask::from_bits(3, kappa, bits);
            let t = OverlapVector::measure(&mask).ok()?;
            (mo_balanced(&t, kappa) && mo_overlap_key(&t, kappa) == key)
                .then(|| (ugast_count(proto, &mask, l), bits, 1u64))
        })
        .reduce(
            || (u64::MAX, u64::MAX, 0),
            |a, b| {
                let n = a.2 + b.2;
                let (f, bits, _) = a.min(b);
                (f, bits, n)
            },
        );
    let mask = PartitionMask::from_bits(3, kappa, best.1);
    Ok(MoResult {
        overlap: OverlapVector::measure(&mask)?,
        mask,
        max_overlap: key.0,
        total_overlap: key.1,
        f_sc: best.0,
        exhaustive: true,
        masks_evaluated: best.2,
    })
}

fn swap_columns(mask: &mut PartitionMask, a: usize, b: usize) {
    for i in 0..mask.gamma() {
        let (x, y) = (mask.get(i, a), mask.get(i, b));
        mask.set(i, a, y);
        mask.set(i, b, x);
    }
}

fn mo_local(
    proto: &ProtoMatrix,
    l: usize,
    key: (i64, i64),
    optima: &[OverlapVector],
    config: &MoConfig,
) -> Result<MoResult> {
    let kappa = proto.kappa();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(u64, PartitionMask)> = None;
    let mut evaluated = 0u64;
    for _ in 0..config.restarts.max(1) {
        let t = optima[rng.gen_range(0..optima.len())];
        let mut mask = realize_mask(&t, kappa, rng.gen())?;
        let mut f = ugast_count(proto, &mask, l);
        evaluated += 1;
        loop {
            let mut moves: Vec<(usize, usize)> = (0..kappa)
                .flat_map(|a| (a + 1..kappa).map(move |b| (a, b)))
                .filter(|&(a, b)| (0..3).any(|i| mask.get(i, a) != mask.get(i, b)))
                .collect();
            moves.shuffle(&mut rng);
            evaluated += moves.len() as u64;
            let step = moves
                .par_iter()
                .enumerate()
                .map(|(order, &(a, b))| {
                    let mut m = mask.clone();
                    swap_columns(&mut m, a, b);
                    (ugast_count(proto, &m, l), order)
                })
                .min();
            match step {
                Some((g, order)) if g < f => {
                    let (a, b) = moves[order];
                    swap_columns(&mut mask, a, b);
                    f = g;
                }
                _ => break,
            }
        }
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, mask));
        }
    }
    let (f_sc, mask) = best.expect("at least one restart");
    Ok(MoResult {
        overlap: OverlapVector::measure(&mask)?,
        mask,
        max_overlap: key.0,
        total_overlap: key.1,
        f_sc,
        exhaustive: false,
        masks_evaluated: evaluated,
    })
}
