//! Closed-form 6-cycle counting in the binary protograph of a γ = 3, m = 1
//! coupled code as a function of the partition's overlap parameters, and the
//! exhaustive search for the overlap vectors minimizing that count.
//!
//! Overlaps are measured on `H₀`: `t_i` is the population of row `i`, `t_ij`
//! the size of the common support of rows `i` and `j`, and `t_012` the
//! common support of all three rows. The matching quantities of `H₁` follow
//! from complementation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qc_codes::PartitionMask;

/// Largest κ accepted by the solver.
pub const MAX_KAPPA: usize = 64;

/// The seven overlap parameters of a γ = 3 partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 7]", from = "[i64; 7]")]
pub struct OverlapVector {
    pub t0: i64,
    pub t1: i64,
    pub t2: i64,
    pub t01: i64,
    pub t02: i64,
    pub t12: i64,
    pub t012: i64,
}

impl From<[i64; 7]> for OverlapVector {
    fn from(t: [i64; 7]) -> Self {
        Self {
            t0: t[0],
            t1: t[1],
            t2: t[2],
            t01: t[3],
            t02: t[4],
            t12: t[5],
            t012: t[6],
        }
    }
}

impl From<OverlapVector> for [i64; 7] {
    fn from(t: OverlapVector) -> Self {
        t.to_array()
    }
}

impl std::fmt::Display for OverlapVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = self.to_array();
        write!(f, "[{} {} {} {} {} {} {}]", a[0], a[1], a[2], a[3], a[4], a[5], a[6])
    }
}

impl OverlapVector {
    pub fn to_array(&self) -> [i64; 7] {
        [self.t0, self.t1, self.t2, self.t01, self.t02, self.t12, self.t012]
    }

    /// Overlap parameters of `H₁`: `[t3, t4, t5, t34, t35, t45, t345]`.
    pub fn complement(&self, kappa: usize) -> Self {
        let k = kappa as i64;
        Self {
            t0: k - self.t0,
            t1: k - self.t1,
            t2: k - self.t2,
            t01: k - self.t0 - self.t1 + self.t01,
            t02: k - self.t0 - self.t2 + self.t02,
            t12: k - self.t1 - self.t2 + self.t12,
            t012: k - (self.t0 + self.t1 + self.t2) + (self.t01 + self.t02 + self.t12) - self.t012,
        }
    }

    /// Measures the overlaps of `H₀` in a three-row mask.
    pub fn measure(mask: &PartitionMask) -> Result<Self> {
        if mask.gamma() != 3 {
            return Err(Error::Unsupported(format!(
                "overlap vectors need gamma = 3, got {}",
                mask.gamma()
            )));
        }
        let mut t = [0i64; 7];
        for j in 0..mask.kappa() {
            let [a, b, c] = [0, 1, 2].map(|i| mask.get(i, j) == 0);
            t[0] += a as i64;
            t[1] += b as i64;
            t[2] += c as i64;
            t[3] += (a && b) as i64;
            t[4] += (a && c) as i64;
            t[5] += (b && c) as i64;
            t[6] += (a && b && c) as i64;
        }
        Ok(t.into())
    }

    /// Checks every constraint chain, including the balance constraint.
    pub fn validate(&self, kappa: usize) -> Result<()> {
        self.validate_structure(kappa)?;
        let s = self.t0 + self.t1 + self.t2;
        let (lo, hi) = balance_bounds(kappa);
        if !(lo..=hi).contains(&s) {
            return Err(Error::ConstraintViolation {
                chain: "floor(3k/2) <= t0+t1+t2 <= ceil(3k/2)",
            });
        }
        Ok(())
    }

    /// The seven realizability chains without the balance constraint.
    pub fn validate_structure(&self, kappa: usize) -> Result<()> {
        let k = kappa as i64;
        let t = self;
        let chains: [(&'static str, bool); 7] = [
            ("0 <= t0 <= k", 0 <= t.t0 && t.t0 <= k),
            ("0 <= t01 <= t0", 0 <= t.t01 && t.t01 <= t.t0),
            ("t01 <= t1 <= k-t0+t01", t.t01 <= t.t1 && t.t1 <= k - t.t0 + t.t01),
            ("0 <= t012 <= t01", 0 <= t.t012 && t.t012 <= t.t01),
            (
                "t012 <= t02 <= t0-t01+t012",
                t.t012 <= t.t02 && t.t02 <= t.t0 - t.t01 + t.t012,
            ),
            (
                "t012 <= t12 <= t1-t01+t012",
                t.t012 <= t.t12 && t.t12 <= t.t1 - t.t01 + t.t012,
            ),
            (
                "t02+t12-t012 <= t2 <= k-t0-t1+t01+t02+t12-t012",
                t.t02 + t.t12 - t.t012 <= t.t2 && t.t2 <= k - t.t0 - t.t1 + t.t01 + t.t02 + t.t12 - t.t012,
            ),
        ];
        match chains.iter().find(|(_, ok)| !ok) {
            Some((chain, _)) => Err(Error::ConstraintViolation { chain }),
            None => Ok(()),
        }
    }
}

/// Inclusive bounds `⌊3κ/2⌋ ..= ⌈3κ/2⌉` on `t0 + t1 + t2`.
pub fn balance_bounds(kappa: usize) -> (i64, i64) {
    let k3 = 3 * kappa as i64;
    (k3 / 2, (k3 + 1) / 2)
}

#[inline]
fn pos(x: i64) -> i64 {
    x.max(0)
}

/// All three CNs in one component of a single replica.
pub fn fn_a(t01: i64, t02: i64, t12: i64, t012: i64) -> i64 {
    pos(t012 * (t012 - 1) * (t12 - 2))
        + pos(t012 * (t02 - t012) * (t12 - 1))
        + pos((t01 - t012) * t012 * (t12 - 1))
        + pos((t01 - t012) * (t02 - t012) * t12)
}

/// Two CNs in one component and one in the other, single replica.
pub fn fn_b(t: &OverlapVector) -> i64 {
    let OverlapVector {
        t0,
        t1,
        t2,
        t01,
        t02,
        t12,
        t012,
    } = *t;
    pos(t012 * (t01 - t012) * (t1 - t12 - 1))
        + pos(t012 * (t0 - t01 - t02 + t012) * (t1 - t12))
        + pos((t01 - t012) * (t01 - t012 - 1) * (t1 - t12 - 2))
        + pos((t01 - t012) * (t0 - t01 - t02 + t012) * (t1 - t12 - 1))
        + pos(t012 * (t02 - t012) * (t0 - t01 - 1))
        + pos(t012 * (t2 - t02 - t12 + t012) * (t0 - t01))
        + pos((t02 - t012) * (t02 - t012 - 1) * (t0 - t01 - 2))
        + pos((t02 - t012) * (t2 - t02 - t12 + t012) * (t0 - t01 - 1))
        + pos(t012 * (t12 - t012) * (t2 - t02 - 1))
        + pos(t012 * (t1 - t01 - t12 + t012) * (t2 - t02))
        + pos((t12 - t012) * (t12 - t012 - 1) * (t2 - t02 - 2))
        + pos((t12 - t012) * (t1 - t01 - t12 + t012) * (t2 - t02 - 1))
}

/// All CNs in the shared band of two consecutive replicas.
pub fn fn_c(kappa: usize, t: &OverlapVector) -> i64 {
    let OverlapVector {
        t01, t02, t12, t012, ..
    } = *t;
    let h1 = t.complement(kappa);
    let (t34, t35, t45) = (h1.t01, h1.t02, h1.t12);
    pos(t34 * t012 * (t12 - 1))
        + pos(t34 * (t02 - t012) * t12)
        + pos(t35 * t012 * (t01 - 1))
        + pos(t35 * (t12 - t012) * t01)
        + pos(t45 * t012 * (t02 - 1))
        + pos(t45 * (t01 - t012) * t02)
}

/// One CN outside the shared band of two consecutive replicas.
pub fn fn_d(t: &OverlapVector) -> i64 {
    let OverlapVector {
        t0,
        t1,
        t2,
        t01,
        t02,
        t12,
        t012,
    } = *t;
    pos(t01 * (t2 - t02 - t12 + t012) * (t2 - t12 - 1))
        + pos(t01 * (t12 - t012) * (t2 - t12))
        + pos(t02 * (t1 - t01 - t12 + t012) * (t1 - t01 - 1))
        + pos(t02 * (t01 - t012) * (t1 - t01))
        + pos(t12 * (t0 - t01 - t02 + t012) * (t0 - t02 - 1))
        + pos(t12 * (t02 - t012) * (t0 - t02))
}

/// Protograph 6-cycle census split by replica span and CN placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    /// Single-replica terms `F_s0..F_s3`.
    pub fs_parts: [u64; 4],
    /// Two-replica terms `F_d0..F_d3`.
    pub fd_parts: [u64; 4],
    pub fs: u64,
    pub fd: u64,
    #[serde(rename = "L")]
    pub coupling_length: usize,
    /// `L·F_s + (L−1)·F_d`.
    pub total: u64,
}

impl CycleCensus {
    pub fn from_parts(fs_parts: [u64; 4], fd_parts: [u64; 4], l: usize) -> Self {
        let fs = fs_parts.iter().sum();
        let fd = fd_parts.iter().sum();
        Self {
            fs_parts,
            fd_parts,
            fs,
            fd,
            coupling_length: l,
            total: total_cycles(fs, fd, l),
        }
    }
}

/// `L·F_s + (L−1)·F_d`; a single replica has no two-replica cycles.
pub fn total_cycles(fs: u64, fd: u64, l: usize) -> u64 {
    l as u64 * fs + l.saturating_sub(1) as u64 * fd
}

/// Closed-form 6-cycle census of the coupled protograph.
pub fn count_cycles6_formula(t: &OverlapVector, kappa: usize, l: usize) -> Result<CycleCensus> {
    t.validate(kappa)?;
    Ok(count_cycles6_unchecked(t, kappa, l))
}

/// As [`count_cycles6_formula`] without validating `t`.
pub fn count_cycles6_unchecked(t: &OverlapVector, kappa: usize, l: usize) -> CycleCensus {
    let c = t.complement(kappa);
    let fs = [
        fn_a(t.t01, t.t02, t.t12, t.t012),
        fn_a(c.t01, c.t02, c.t12, c.t012),
        fn_b(t),
        fn_b(&c),
    ];
    let fd = [fn_c(kappa, t), fn_c(kappa, &c), fn_d(t), fn_d(&c)];
    CycleCensus::from_parts(fs.map(|x| x as u64), fd.map(|x| x as u64), l)
}

/// Valid vectors with a fixed `t0`, iterated in constraint-nesting order.
pub fn valid_overlaps_with_t0(kappa: usize, t0: i64) -> Vec<OverlapVector> {
    let k = kappa as i64;
    let (lo, hi) = balance_bounds(kappa);
    let mut out = Vec::new();
    if !(0..=k).contains(&t0) {
        return out;
    }
    for t01 in 0..=t0 {
        for t1 in t01..=(k - t0 + t01) {
            for t012 in 0..=t01 {
                for t02 in t012..=(t0 - t01 + t012) {
                    for t12 in t012..=(t1 - t01 + t012) {
                        let t2_min = (t02 + t12 - t012).max(lo - t0 - t1);
                        let t2_max = (k - t0 - t1 + t01 + t02 + t12 - t012).min(hi - t0 - t1);
                        for t2 in t2_min..=t2_max {
                            out.push(OverlapVector {
                                t0,
                                t1,
                                t2,
                                t01,
                                t02,
                                t12,
                                t012,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Every overlap vector satisfying all constraints, each exactly once.
pub fn enumerate_valid_overlaps(kappa: usize) -> impl Iterator<Item = OverlapVector> {
    (0..=kappa as i64).flat_map(move |t0| valid_overlaps_with_t0(kappa, t0))
}

/// Result of the optimal-overlap search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OoSolution {
    pub kappa: usize,
    #[serde(rename = "L")]
    pub coupling_length: usize,
    #[serde(rename = "F_star")]
    pub f_star: u64,
    /// Every minimizer, in lexicographic order.
    pub optima: Vec<OverlapVector>,
    pub alpha: usize,
    /// Census of the first optimum.
    pub census: CycleCensus,
    #[serde(rename = "N_choices")]
    pub n_choices: u128,
}

/// Minimizes the coupled-protograph 6-cycle count over all valid overlap vectors.
pub fn solve_oo(kappa: usize, l: usize) -> Result<OoSolution> {
    if !(2..=MAX_KAPPA).contains(&kappa) {
        return Err(Error::Unsupported(format!("kappa = {kappa} outside 2..={MAX_KAPPA}")));
    }
    let per_t0: Vec<(u64, Vec<OverlapVector>)> = (0..=kappa as i64)
        .into_par_iter()
        .map(|t0| {
            let mut best = u64::MAX;
            let mut arg = Vec::new();
            for t in valid_overlaps_with_t0(kappa, t0) {
                let f = count_cycles6_unchecked(&t, kappa, l).total;
                if f < best {
                    best = f;
                    arg.clear();
                }
                if f == best {
                    arg.push(t);
                }
            }
            (best, arg)
        })
        .collect();
    let f_star = per_t0.iter().map(|(f, _)| *f).min().unwrap_or(u64::MAX);
    let mut optima: Vec<OverlapVector> = per_t0
        .into_iter()
        .filter(|(f, _)| *f == f_star)
        .flat_map(|(_, v)| v)
        .collect();
    optima.sort();
    let first = *optima
        .first()
        .ok_or_else(|| Error::Unsupported(format!("no valid overlap vector for kappa = {kappa}")))?;
    let alpha = optima.len();
    Ok(OoSolution {
        kappa,
        coupling_length: l,
        f_star,
        census: count_cycles6_unchecked(&first, kappa, l),
        n_choices: count_partition_choices(&first, kappa, alpha)?,
        optima,
        alpha,
    })
}

fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Exact at every step: the running value is C(n - k + i, i).
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) as u128 / i as u128)
}

/// Number of masks realizing `t`, times `alpha`.
pub fn count_partition_choices(t: &OverlapVector, kappa: usize, alpha: usize) -> Result<u128> {
    t.validate_structure(kappa)?;
    let k = kappa as i64;
    let factors = [
        binomial(k, t.t0),
        binomial(t.t0, t.t01),
        binomial(k - t.t0, t.t1 - t.t01),
        binomial(t.t01, t.t012),
        binomial(t.t0 - t.t01, t.t02 - t.t012),
        binomial(t.t1 - t.t01, t.t12 - t.t012),
        binomial(k - t.t0 - t.t1 + t.t01, t.t2 - t.t02 - t.t12 + t.t012),
    ];
    factors
        .iter()
        .try_fold(alpha as u128, |acc, &f| acc.checked_mul(f))
        .ok_or_else(|| Error::Capacity("partition choice count overflows 128 bits".into()))
}

/// Builds a mask whose `H₀` has exactly the overlaps of `t`, choosing the
/// positions of each region at random.
pub fn realize_mask(t: &OverlapVector, kappa: usize, seed: u64) -> Result<PartitionMask> {
    t.validate_structure(kappa)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<usize> = (0..kappa).collect();
    cols.shuffle(&mut rng);

    // Region sizes of the 8 cells of the three-row Venn diagram, keyed by which
    // rows hold the circulant in H₀ (bit i set = row i in H₀).
    let only01 = t.t01 - t.t012;
    let only02 = t.t02 - t.t012;
    let only12 = t.t12 - t.t012;
    let only0 = t.t0 - t.t01 - t.t02 + t.t012;
    let only1 = t.t1 - t.t01 - t.t12 + t.t012;
    let only2 = t.t2 - t.t02 - t.t12 + t.t012;
    let in_h0_somewhere = only0 + only1 + only2 + only01 + only02 + only12 + t.t012;
    let none = kappa as i64 - in_h0_somewhere;
    let cells: [(u8, i64); 8] = [
        (0b111, t.t012),
        (0b011, only01),
        (0b101, only02),
        (0b110, only12),
        (0b001, only0),
        (0b010, only1),
        (0b100, only2),
        (0b000, none),
    ];
    if cells.iter().any(|&(_, n)| n < 0) {
        return Err(Error::ConstraintViolation {
            chain: "t2 <= k-t0-t1+t01+t02+t12-t012",
        });
    }
    let mut mask = PartitionMask::all_zero(3, kappa);
    let mut it = cols.into_iter();
    for (rows_in_h0, n) in cells {
        for j in it.by_ref().take(n as usize) {
            for i in 0..3 {
                mask.set(i, j, if rows_in_h0 >> i & 1 == 1 { 0 } else { 1 });
            }
        }
    }
    Ok(mask)
}
