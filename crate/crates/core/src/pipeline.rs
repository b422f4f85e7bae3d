//! End-to-end design flow for γ = 3, m = 1 codes, and the comparison table of
//! (3, 3, 3, 0) counts across partitioning techniques.
//!
//! Stages, in order: optimal-overlap search, mask realization, circulant power
//! optimization, edge labeling, GAST scan, GAST removal. Reports carry no
//! timestamps, so reruns of one configuration serialize identically.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::baselines::{cv_exhaustive_best, mo_best, CuttingVector, MoConfig};
use crate::cpo::{cpo_optimize, CpoConfig};
use crate::cycle_analysis::{count_ugast_3330, girth_check, Girth, UgastCensus};
use crate::error::{Error, Result};
use crate::gast_tools::{gast_scan, remove_gast, GastLabel, SCAN_MAX_A};
use crate::gf::FieldGf;
use crate::overlap_opt::{realize_mask, solve_oo, OverlapVector};
use crate::qc_codes::{
    apply_edge_changes, couple, is_prime, label_edges, EdgeChange, PartitionMask, ProtoMatrix, SCCode,
};

/// Seeds of every randomized stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Seeds {
    pub partition: u64,
    pub labeling: u64,
    pub cpo: u64,
}

/// Where the CLI writes its artifacts; not used by the library itself.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alist: Option<String>,
}

/// Parameters of one design run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub kappa: usize,
    pub p: usize,
    #[serde(rename = "L")]
    pub coupling_length: usize,
    /// Field GF(2^lambda) of the edge labels.
    pub lambda: u32,
    #[serde(default)]
    pub seeds: Seeds,
    /// Which optimal overlap vector to realize, in lexicographic order.
    #[serde(default)]
    pub optimum_index: usize,
    pub cpo_budget: u64,
    #[serde(default)]
    pub cpo_target: u64,
    pub gast_targets: Vec<GastLabel>,
    pub a_max: usize,
    #[serde(default)]
    pub outputs: OutputPaths,
}

impl DesignConfig {
    /// Defaults for the given size: GF(4), 100 000 optimizer evaluations, and
    /// the (4, 2, 2, 5, 0) and (6, 0, 0, 9, 0) GASTs as removal targets.
    pub fn new(kappa: usize, p: usize, l: usize) -> Self {
        Self {
            kappa,
            p,
            coupling_length: l,
            lambda: 2,
            seeds: Seeds::default(),
            optimum_index: 0,
            cpo_budget: CpoConfig::default().budget,
            cpo_target: 0,
            gast_targets: vec![GastLabel::new(4, 2, 2, 5, 0), GastLabel::new(6, 0, 0, 9, 0)],
            a_max: 6,
            outputs: OutputPaths::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Construction(format!("p = {} is not prime", self.p)));
        }
        if self.kappa > self.p {
            return Err(Error::Construction(format!(
                "kappa = {} exceeds p = {} for array-based initial powers",
                self.kappa, self.p
            )));
        }
        if self.coupling_length == 0 {
            return Err(Error::Construction("L must be positive".into()));
        }
        if self.a_max > SCAN_MAX_A {
            return Err(Error::Capacity(format!("a_max = {} above {SCAN_MAX_A}", self.a_max)));
        }
        FieldGf::new(self.lambda).map(|_| ())
    }
}

/// Outcome of the GAST stages.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GastSummary {
    /// GASTs found per target label, in target order.
    pub found: Vec<(GastLabel, usize)>,
    pub removed: usize,
    /// Found GASTs that an earlier removal had already eliminated.
    pub already_removed: usize,
    pub irremovable: usize,
    /// Every applied weight change, in application order.
    pub changes: Vec<EdgeChange>,
}

/// Everything a run produced. Stage outputs are absent when the run stopped
/// before that stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub config: DesignConfig,
    pub completed_stages: Vec<String>,
    #[serde(rename = "F_star")]
    pub f_star: Option<u64>,
    pub alpha: Option<usize>,
    pub overlap: Option<OverlapVector>,
    pub mask: Option<Vec<Vec<u8>>>,
    /// (3, 3, 3, 0) census with array-based powers on the chosen mask.
    pub census_before_cpo: Option<UgastCensus>,
    pub census_after_cpo: Option<UgastCensus>,
    pub cpo_evaluations: Option<u64>,
    pub powers: Option<Vec<Vec<u32>>>,
    pub girth: Option<Girth>,
    pub gasts: Option<GastSummary>,
}

impl DesignReport {
    fn empty(config: &DesignConfig) -> Self {
        Self {
            config: config.clone(),
            completed_stages: Vec::new(),
            f_star: None,
            alpha: None,
            overlap: None,
            mask: None,
            census_before_cpo: None,
            census_after_cpo: None,
            cpo_evaluations: None,
            powers: None,
            girth: None,
            gasts: None,
        }
    }

    /// Human-readable digest.
    pub fn summary(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        writeln!(
            s,
            "design kappa={} p={} L={} q={}",
            c.kappa,
            c.p,
            c.coupling_length,
            1u32 << c.lambda
        )
        .unwrap();
        if let (Some(f), Some(t), Some(a)) = (self.f_star, self.overlap, self.alpha) {
            writeln!(s, "  overlap optimum F*={f} t={t} (alpha={a})").unwrap();
        }
        if let (Some(b), Some(a)) = (self.census_before_cpo, self.census_after_cpo) {
            writeln!(s, "  (3,3,3,0) UGASTs: {} before CPO, {} after", b.f_sc, a.f_sc).unwrap();
        }
        if let Some(g) = self.girth {
            writeln!(s, "  girth class: {g:?}").unwrap();
        }
        if let Some(g) = &self.gasts {
            for (label, n) in &g.found {
                writeln!(s, "  GASTs {label}: {n} found").unwrap();
            }
            writeln!(
                s,
                "  removed {} (plus {} already gone), irremovable {}, {} weight changes",
                g.removed,
                g.already_removed,
                g.irremovable,
                g.changes.len()
            )
            .unwrap();
        }
        s
    }

    /// Rebuilds the final code from the report's powers, mask, labeling seed
    /// and applied changes.
    pub fn rebuild_code(&self) -> Result<SCCode> {
        let (Some(powers), Some(mask)) = (&self.powers, &self.mask) else {
            return Err(Error::Construction("report has no powers or mask".into()));
        };
        let c = &self.config;
        let code = couple(
            &ProtoMatrix::new(c.p, powers.clone())?,
            &PartitionMask::new(mask.clone())?,
            c.coupling_length,
        )?;
        if !self.completed_stages.iter().any(|s| s == "labeling") {
            return Ok(code);
        }
        let field = FieldGf::new(c.lambda)?;
        let code = label_edges(&code, &field, c.seeds.labeling);
        match &self.gasts {
            Some(g) => apply_edge_changes(&code, &g.changes),
            None => Ok(code),
        }
    }
}

/// A stage failure with everything computed before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineFailure {
    pub error: Error,
    pub partial: Box<DesignReport>,
}

impl std::fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for PipelineFailure {}

/// Successful run: the report and the final labeled code.
#[derive(Debug, Clone)]
pub struct DesignOutput {
    pub report: DesignReport,
    pub code: SCCode,
}

/// Runs every stage of the design flow.
pub fn run_pipeline(config: &DesignConfig) -> std::result::Result<DesignOutput, PipelineFailure> {
    let mut report = DesignReport::empty(config);
    match stages(config, &mut report) {
        Ok(code) => Ok(DesignOutput { report, code }),
        Err((stage, e)) => Err(PipelineFailure {
            error: Error::Stage {
                stage,
                message: e.to_string(),
            },
            partial: Box::new(report),
        }),
    }
}

fn stages(config: &DesignConfig, report: &mut DesignReport) -> std::result::Result<SCCode, (&'static str, Error)> {
    let at = |stage: &'static str| move |e: Error| (stage, e);
    config.validate().map_err(at("config"))?;
    let (kappa, p, l) = (config.kappa, config.p, config.coupling_length);

    let sol = solve_oo(kappa, l).map_err(at("overlap"))?;
    let t = sol.optima[config.optimum_index % sol.alpha];
    report.f_star = Some(sol.f_star);
    report.alpha = Some(sol.alpha);
    report.overlap = Some(t);
    report.completed_stages.push("overlap".into());

    let mask = realize_mask(&t, kappa, config.seeds.partition).map_err(at("partition"))?;
    report.mask = Some(mask.rows());
    report.completed_stages.push("partition".into());

    let init = ProtoMatrix::array_based_prefix(3, kappa, p).map_err(at("cpo"))?;
    let before = couple(&init, &mask, l)
        .and_then(|c| count_ugast_3330(&c))
        .map_err(at("cpo"))?;
    report.census_before_cpo = Some(before);
    let cpo_cfg = CpoConfig {
        budget: config.cpo_budget,
        target: config.cpo_target,
        seed: config.seeds.cpo,
        ..CpoConfig::default()
    };
    let opt = cpo_optimize(&init, &mask, l, &cpo_cfg).map_err(at("cpo"))?;
    let code = couple(&opt.powers, &mask, l).map_err(at("cpo"))?;
    report.census_after_cpo = Some(count_ugast_3330(&code).map_err(at("cpo"))?);
    report.cpo_evaluations = Some(opt.evaluations);
    report.powers = Some(opt.powers.powers_rows());
    report.girth = Some(girth_check(&code));
    report.completed_stages.push("cpo".into());

    let field = FieldGf::new(config.lambda).map_err(at("labeling"))?;
    let mut code = label_edges(&code, &field, config.seeds.labeling);
    report.completed_stages.push("labeling".into());

    let found = gast_scan(&code, &field, &config.gast_targets, config.a_max).map_err(at("gast_scan"))?;
    let mut summary = GastSummary {
        found: config
            .gast_targets
            .iter()
            .map(|t| (*t, found.iter().filter(|g| g.label() == *t).count()))
            .collect(),
        ..GastSummary::default()
    };
    report.gasts = Some(summary.clone());
    report.completed_stages.push("gast_scan".into());

    for g in &found {
        let (outcome, next) = remove_gast(&code, &g.topology, &field).map_err(at("gast_removal"))?;
        match (outcome.success, outcome.changes.is_empty()) {
            (true, true) => summary.already_removed += 1,
            (true, false) => {
                summary.removed += 1;
                summary
                    .changes
                    .extend(crate::gast_tools::to_edge_changes(&g.topology, &outcome.changes));
            }
            (false, _) => summary.irremovable += 1,
        }
        code = next;
    }
    report.gasts = Some(summary);
    report.completed_stages.push("gast_removal".into());
    Ok(code)
}

/// Options of [`table1_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Config {
    #[serde(rename = "L")]
    pub coupling_length: usize,
    pub sizes: Vec<usize>,
    /// Run the MO local search for sizes that are not searched exhaustively.
    pub long: bool,
    pub cpo_budget: u64,
    pub seed: u64,
    pub mo_restarts: usize,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            coupling_length: 30,
            sizes: vec![7, 11, 13, 17],
            long: false,
            cpo_budget: CpoConfig::default().budget,
            seed: 0,
            mo_restarts: MoConfig::default().restarts,
        }
    }
}

/// Counts for one `κ = p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Column {
    pub size: usize,
    pub uncoupled: u64,
    pub cv: u64,
    pub cv_zeta: CuttingVector,
    /// Absent when the MO search was skipped.
    pub mo: Option<u64>,
    pub mo_exhaustive: Option<bool>,
    pub oo_cpo: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1 {
    #[serde(rename = "L")]
    pub coupling_length: usize,
    pub columns: Vec<Table1Column>,
}

/// Formats one cell of a table row.
type CellFn = dyn Fn(&Table1Column) -> String;

impl Table1 {
    /// Techniques as rows and sizes as columns.
    pub fn render(&self) -> String {
        let mut s = String::new();
        write!(s, "{:<22}", "design technique").unwrap();
        for c in &self.columns {
            write!(s, "{:>12}", format!("k=p={}", c.size)).unwrap();
        }
        s.push('\n');
        let rows: [(&str, &CellFn); 4] = [
            ("uncoupled AB", &|c| c.uncoupled.to_string()),
            ("SC CV with AB", &|c| c.cv.to_string()),
            ("SC MO with AB", &|c| c.mo.map_or("-".into(), |x| x.to_string())),
            ("SC OO-CPO", &|c| c.oo_cpo.to_string()),
        ];
        for (name, cell) in rows {
            write!(s, "{name:<22}").unwrap();
            for c in &self.columns {
                write!(s, "{:>12}", cell(c)).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// (3, 3, 3, 0) counts of the uncoupled, CV, MO and OO-CPO designs with
/// array-based powers, one column per size.
pub fn table1_report(config: &Table1Config) -> Result<Table1> {
    let l = config.coupling_length;
    let mut columns = Vec::new();
    for &k in &config.sizes {
        let ab = ProtoMatrix::array_based(3, k)?;
        let uncoupled = count_ugast_3330(&couple(&ab, &PartitionMask::all_zero(3, k), l)?)?.f_sc;
        let cv = cv_exhaustive_best(&ab, l)?;
        let run_mo = config.long || k <= crate::baselines::MO_EXHAUSTIVE_MAX_KAPPA;
        let mo = if run_mo {
            Some(mo_best(
                &ab,
                l,
                &MoConfig {
                    restarts: config.mo_restarts,
                    seed: config.seed,
                },
            )?)
        } else {
            None
        };
        let sol = solve_oo(k, l)?;
        let mask = realize_mask(&sol.optima[0], k, config.seed)?;
        let cpo = cpo_optimize(
            &ab,
            &mask,
            l,
            &CpoConfig {
                budget: config.cpo_budget,
                seed: config.seed,
                ..CpoConfig::default()
            },
        )?;
        columns.push(Table1Column {
            size: k,
            uncoupled,
            cv: cv.f_sc,
            cv_zeta: cv.zeta,
            mo: mo.as_ref().map(|m| m.f_sc),
            mo_exhaustive: mo.as_ref().map(|m| m.exhaustive),
            oo_cpo: cpo.f_sc,
        });
    }
    Ok(Table1 {
        coupling_length: l,
        columns,
    })
}
