//! Circulant power optimizer: greedy re-powering of the protograph so that as
//! few protograph 6-cycles as possible satisfy the lifting condition, while no
//! 4-cycle does.
//!
//! All counting happens on a two-replica window of the coupled protograph; the
//! lifted count of the length-`L` code is `p·(L·F^a_s + (L−1)·F^a_d)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle_analysis::{ActiveCensus, Span, WindowCycles};
use crate::error::{Error, Result};
use crate::qc_codes::{PartitionMask, ProtoMatrix};

/// Tuning knobs of [`cpo_optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpoConfig {
    /// Maximum number of candidate power assignments evaluated.
    pub budget: u64,
    /// Stop as soon as `F_SC` is at or below this value.
    pub target: u64,
    /// Entries re-powered per block of the sorted list.
    pub top_b: usize,
    /// Random two-entry moves tried per block, in addition to all single-entry moves.
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for CpoConfig {
    fn default() -> Self {
        Self {
            budget: 100_000,
            target: 0,
            top_b: 3,
            random_pairs: 32,
            seed: 0,
        }
    }
}

/// One improvement of the best state found so far.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpoStep {
    /// Candidate evaluations spent when this state was reached.
    pub evaluations: u64,
    #[serde(rename = "F_SC")]
    pub f_sc: u64,
    /// Row-major powers of the state.
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CpoResult {
    /// Best power assignment found.
    pub powers: ProtoMatrix,
    #[serde(rename = "F_SC")]
    pub f_sc: u64,
    #[serde(rename = "F_SC_initial")]
    pub initial_f_sc: u64,
    /// Strictly decreasing sequence of best states, starting with the initial one.
    pub trace: Vec<CpoStep>,
    pub evaluations: u64,
    pub restarts: u64,
}

/// Window cycles indexed for incremental evaluation of power changes.
struct Evaluator {
    window: WindowCycles,
    p: usize,
    /// Objective weight of each 6-cycle: `L` for first-replica cycles,
    /// `L − 1` for two-replica ones, 0 for second-replica duplicates.
    weight: Vec<u64>,
    cycles_at: Vec<Vec<u32>>,
    quads_at: Vec<Vec<u32>>,
}

impl Evaluator {
    fn new(proto: &ProtoMatrix, mask: &PartitionMask, l: usize) -> Self {
        let window = WindowCycles::new(proto, mask, l);
        let n = proto.gamma() * proto.kappa();
        let weight: Vec<u64> = window
            .cycles6
            .iter()
            .map(|c| match c.span {
                Span::Single(0) => l as u64,
                Span::Single(_) => 0,
                Span::Double => l.saturating_sub(1) as u64,
            })
            .collect();
        let mut cycles_at = vec![Vec::new(); n];
        for (k, c) in window.cycles6.iter().enumerate() {
            if weight[k] == 0 {
                continue;
            }
            for b in 0..n as u32 {
                if c.touches(b) {
                    cycles_at[b as usize].push(k as u32);
                }
            }
        }
        let mut quads_at = vec![Vec::new(); n];
        for (k, c) in window.cycles4.iter().enumerate() {
            for b in 0..n as u32 {
                if c.touches(b) {
                    quads_at[b as usize].push(k as u32);
                }
            }
        }
        Self {
            window,
            p: proto.p(),
            weight,
            cycles_at,
            quads_at,
        }
    }

    /// `L·F^a_s + (L−1)·F^a_d`.
    fn objective(&self, powers: &[u32]) -> u64 {
        let p = self.p as i64;
        self.window
            .cycles6
            .iter()
            .zip(&self.weight)
            .filter(|(c, &w)| w > 0 && c.is_active(powers, p))
            .map(|(_, &w)| w)
            .sum()
    }

    fn has_active_quad(&self, powers: &[u32]) -> bool {
        self.window.has_active_quad(powers, self.p)
    }

    /// Objective after applying `moves` to `powers`, or `None` if that creates
    /// an active 4-cycle.
    fn evaluate(&self, powers: &[u32], current: u64, moves: &[(usize, u32)]) -> Option<u64> {
        let p = self.p as i64;
        let mut trial = powers.to_vec();
        for &(b, f) in moves {
            trial[b] = f;
        }
        let mut quads: Vec<u32> = moves
            .iter()
            .flat_map(|&(b, _)| self.quads_at[b].iter().copied())
            .collect();
        quads.sort_unstable();
        quads.dedup();
        if quads
            .iter()
            .any(|&k| self.window.cycles4[k as usize].is_active(&trial, p))
        {
            return None;
        }
        let mut touched: Vec<u32> = moves
            .iter()
            .flat_map(|&(b, _)| self.cycles_at[b].iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let mut value = current as i64;
        for k in touched {
            let c = &self.window.cycles6[k as usize];
            let before = c.is_active(powers, p) as i64;
            let after = c.is_active(&trial, p) as i64;
            value += (after - before) * self.weight[k as usize] as i64;
        }
        Some(value as u64)
    }
}

/// Census of active window cycles with per-entry weights (1 for single-replica
/// cycles, 2 for two-replica ones).
pub fn active_census(proto: &ProtoMatrix, mask: &PartitionMask) -> ActiveCensus {
    WindowCycles::new(proto, mask, 2).census(proto.powers_flat(), proto.p())
}

/// A candidate move and its sort key for tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    value: u64,
    key: Vec<(usize, usize, u32)>,
}

/// Runs the optimizer from array-based initial powers `f = i·j mod p`.
///
/// `proto` supplies γ, κ and p; its own powers are ignored.
pub fn cpo_optimize(proto: &ProtoMatrix, mask: &PartitionMask, l: usize, config: &CpoConfig) -> Result<CpoResult> {
    let init = ProtoMatrix::array_based_prefix(proto.gamma(), proto.kappa(), proto.p())?;
    cpo_optimize_from(&init, mask, l, config)
}

/// Runs the optimizer from the given powers.
pub fn cpo_optimize_from(init: &ProtoMatrix, mask: &PartitionMask, l: usize, config: &CpoConfig) -> Result<CpoResult> {
    if init.gamma() != 3 {
        return Err(Error::Unsupported(format!(
            "the optimizer needs gamma = 3, got {}",
            init.gamma()
        )));
    }
    if init.has_zero_circulants() {
        return Err(Error::Unsupported("protographs with zero circulants".into()));
    }
    let (gamma, kappa, p) = (init.gamma(), init.kappa(), init.p());
    let n = gamma * kappa;
    let eval = Evaluator::new(init, mask, l);
    let mut powers = init.powers_flat().to_vec();
    if eval.has_active_quad(&powers) {
        return Err(Error::Construction("initial powers already have 4-cycles".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current = eval.objective(&powers);
    let mut best = (current, powers.clone());
    let initial_f_sc = current * p as u64;
    let mut trace = vec![CpoStep {
        evaluations: 0,
        f_sc: initial_f_sc,
        powers: powers.clone(),
    }];
    let mut evaluations = 0u64;
    let mut restarts = 0u64;
    let target = config.target / p as u64;
    let top_b = config.top_b.max(1);

    while evaluations < config.budget && best.0 * p as u64 > config.target && best.0 > target {
        let census = eval.window.census(&powers, p);
        let mut order: Vec<usize> = (0..n).filter(|&b| census.entry_weights[b] > 0).collect();
        order.sort_by_key(|&b| (std::cmp::Reverse(census.entry_weights[b]), b));

        let mut accepted = false;
        for block in order.chunks(top_b) {
            let remaining = (config.budget - evaluations) as usize;
            if remaining == 0 {
                break;
            }
            let mut moves: Vec<Vec<(usize, u32)>> = Vec::new();
            for &b in block {
                for f in 0..p as u32 {
                    if f != powers[b] {
                        moves.push(vec![(b, f)]);
                    }
                }
            }
            for _ in 0..config.random_pairs {
                let a = *block.choose(&mut rng).expect("blocks are non-empty");
                let mut c = rng.gen_range(0..n);
                if c == a {
                    c = (c + 1) % n;
                }
                let (fa, fc) = (rng.gen_range(0..p as u32), rng.gen_range(0..p as u32));
                if fa != powers[a] && fc != powers[c] {
                    let mut m = vec![(a, fa), (c, fc)];
                    m.sort_unstable();
                    moves.push(m);
                }
            }
            moves.truncate(remaining);
            evaluations += moves.len() as u64;

            let winner = moves
                .par_iter()
                .filter_map(|m| {
                    let value = eval.evaluate(&powers, current, m)?;
                    (value < current).then(|| Candidate {
                        value,
                        key: m.iter().map(|&(b, f)| (b / kappa, b % kappa, f)).collect(),
                    })
                })
                .min();
            if let Some(w) = winner {
                for &(i, j, f) in &w.key {
                    powers[i * kappa + j] = f;
                }
                current = w.value;
                accepted = true;
                break;
            }
        }

        if !accepted {
            if evaluations >= config.budget {
                break;
            }
            // Local minimum: re-draw one row of the best state.
            restarts += 1;
            let mut trial = best.1.clone();
            let row = rng.gen_range(0..gamma);
            for _ in 0..100 {
                for j in 0..kappa {
                    trial[row * kappa + j] = rng.gen_range(0..p as u32);
                }
                if !eval.has_active_quad(&trial) {
                    powers = trial.clone();
                    current = eval.objective(&powers);
                    break;
                }
            }
        }

        if current < best.0 {
            best = (current, powers.clone());
            trace.push(CpoStep {
                evaluations,
                f_sc: current * p as u64,
                powers: powers.clone(),
            });
        }
    }

    Ok(CpoResult {
        powers: init.with_powers(&best.1),
        f_sc: best.0 * p as u64,
        initial_f_sc,
        trace,
        evaluations,
        restarts,
    })
}
