use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nbsc_core::baselines::{cv_exhaustive_best, mo_best, MoConfig, MO_EXHAUSTIVE_MAX_KAPPA};
use nbsc_core::cpo::{cpo_optimize, CpoConfig};
use nbsc_core::cycle_analysis::{count_cycles6_parallel, count_ugast_3330, girth_check};
use nbsc_core::gast_tools::{gast_scan, parse_labels, remove_gast, to_edge_changes, SCAN_MAX_A};
use nbsc_core::io::{code_from_json, code_to_json, write_alist};
use nbsc_core::overlap_opt::{realize_mask, solve_oo};
use nbsc_core::pipeline::{run_pipeline, table1_report, DesignConfig, Seeds, Table1Config};
use nbsc_core::qc_codes::{couple, label_edges, protograph_of};
use nbsc_core::{FieldGf, ProtoMatrix, SCCode};

/// Design and analysis of non-binary spatially-coupled QC-LDPC codes.
#[derive(Parser)]
#[command(name = "nbsc", version)]
struct Cli {
    /// Worker threads for parallel stages (defaults to all cores).
    #[arg(long, global = true, env = "NBSC_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the overlap vectors minimizing protograph 6-cycles.
    OoSolve {
        #[arg(long)]
        kappa: usize,
        #[arg(long = "L")]
        l: usize,
    },
    /// Optimize circulant powers on an optimal-overlap partition.
    Cpo(CpoArgs),
    /// Count 6-cycles or (3,3,3,0) UGASTs of a code file.
    Count {
        #[arg(value_enum)]
        what: CountWhat,
        #[arg(long)]
        code: PathBuf,
        /// Count on the binary protograph instead of the lifted graph.
        #[arg(long)]
        protograph: bool,
    },
    /// Best cutting-vector or minimum-overlap partition of an array-based code.
    Baseline {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        kappa: usize,
        #[arg(long = "L")]
        l: usize,
        /// Allow the MO local search for sizes beyond exhaustive reach.
        #[arg(long)]
        long: bool,
        #[arg(long, default_value_t = MoConfig::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scan a labeled code for GASTs, or remove them.
    Gast(GastArgs),
    /// Run the whole design flow.
    Pipeline(PipelineArgs),
    /// Uncoupled / CV / MO / OO-CPO (3,3,3,0) counts side by side.
    Table1 {
        #[arg(long = "L", default_value_t = 30)]
        l: usize,
        #[arg(long, value_delimiter = ',', default_value = "7,11,13,17")]
        sizes: Vec<usize>,
        #[arg(long)]
        long: bool,
        #[arg(long, default_value_t = CpoConfig::default().budget)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Write the binary image of a code in alist format.
    ExportAlist {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CountWhat {
    Cycles6,
    Ugast3330,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Cv,
    Mo,
}

#[derive(Clone, Copy, ValueEnum)]
enum GastAction {
    Scan,
    Remove,
}

#[derive(Args)]
struct CpoArgs {
    #[arg(long)]
    kappa: usize,
    /// Circulant size; defaults to kappa.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long = "L")]
    l: usize,
    #[arg(long, default_value_t = CpoConfig::default().budget)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    target: u64,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed of the mask realization.
    #[arg(long, default_value_t = 0)]
    partition_seed: u64,
    /// Index of the optimal overlap vector to use.
    #[arg(long, default_value_t = 0)]
    optimum: usize,
    /// Write the optimized code here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the improvement trace in the output.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct GastArgs {
    #[arg(value_enum)]
    action: GastAction,
    #[arg(long)]
    code: PathBuf,
    #[arg(long, default_value_t = 4)]
    q: usize,
    #[arg(long, default_value = "(4,2,2,5,0),(6,0,0,9,0)")]
    targets: String,
    #[arg(long, default_value_t = SCAN_MAX_A)]
    amax: usize,
    /// Label an unlabeled code with this seed first.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the code after removal here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// JSON design configuration; the size flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long, default_value_t = 4)]
    q: usize,
    #[arg(long, default_value_t = CpoConfig::default().budget)]
    budget: u64,
    /// Seed used for partition, labeling and optimizer alike.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    targets: Option<String>,
    #[arg(long)]
    amax: Option<usize>,
    /// Directory for report.json, code.json and code.alist.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::OoSolve { kappa, l } => print_json(&solve_oo(kappa, l)?),
        Command::Cpo(args) => cmd_cpo(args),
        Command::Count { what, code, protograph } => cmd_count(what, &code, protograph),
        Command::Baseline {
            method,
            kappa,
            l,
            long,
            restarts,
            seed,
        } => cmd_baseline(method, kappa, l, long, restarts, seed),
        Command::Gast(args) => cmd_gast(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Table1 {
            l,
            sizes,
            long,
            budget,
            seed,
            json,
        } => {
            let table = table1_report(&Table1Config {
                coupling_length: l,
                sizes,
                long,
                cpo_budget: budget,
                seed,
                ..Table1Config::default()
            })?;
            if json {
                print_json(&table)
            } else {
                print!("{}", table.render());
                Ok(())
            }
        }
        Command::ExportAlist { code, out } => {
            let text = write_alist(read_code(&code)?.graph());
            match out {
                Some(path) => write_file(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_code(path: &Path) -> Result<SCCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    code_from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_cpo(args: CpoArgs) -> Result<()> {
    let p = args.p.unwrap_or(args.kappa);
    let sol = solve_oo(args.kappa, args.l)?;
    let t = sol.optima[args.optimum % sol.alpha];
    let mask = realize_mask(&t, args.kappa, args.partition_seed)?;
    let init = ProtoMatrix::array_based_prefix(3, args.kappa, p)?;
    let cfg = CpoConfig {
        budget: args.budget,
        target: args.target,
        seed: args.seed,
        ..CpoConfig::default()
    };
    let res = cpo_optimize(&init, &mask, args.l, &cfg)?;
    let code = couple(&res.powers, &mask, args.l)?;
    if let Some(out) = &args.out {
        write_file(out, &code_to_json(&code))?;
    }
    let mut value = json!({
        "overlap": t,
        "mask": mask,
        "powers": res.powers,
        "F_SC_initial": res.initial_f_sc,
        "F_SC": res.f_sc,
        "evaluations": res.evaluations,
        "restarts": res.restarts,
        "girth": girth_check(&code),
    });
    if args.trace {
        value["trace"] = serde_json::to_value(&res.trace)?;
    }
    print_json(&value)
}

fn cmd_count(what: CountWhat, path: &Path, protograph: bool) -> Result<()> {
    let mut code = read_code(path)?;
    if protograph {
        code = protograph_of(&code);
    }
    match what {
        CountWhat::Cycles6 => print_json(&json!({ "cycles6": count_cycles6_parallel(code.graph()) })),
        CountWhat::Ugast3330 => print_json(&count_ugast_3330(&code)?),
    }
}

fn cmd_baseline(method: Method, kappa: usize, l: usize, long: bool, restarts: usize, seed: u64) -> Result<()> {
    let ab = ProtoMatrix::array_based(3, kappa)?;
    match method {
        Method::Cv => print_json(&cv_exhaustive_best(&ab, l)?),
        Method::Mo => {
            if kappa > MO_EXHAUSTIVE_MAX_KAPPA && !long {
                bail!("MO for kappa > {MO_EXHAUSTIVE_MAX_KAPPA} is a long local search; pass --long");
            }
            print_json(&mo_best(&ab, l, &MoConfig { restarts, seed })?)
        }
    }
}

fn labeled(code: SCCode, field: &FieldGf, seed: Option<u64>) -> Result<SCCode> {
    match (code.lambda(), seed) {
        (Some(l), _) if l != field.lambda() => {
            bail!("code is labeled over GF({}), not GF({})", 1u32 << l, field.order())
        }
        (Some(_), _) => Ok(code),
        (None, Some(s)) => Ok(label_edges(&code, field, s)),
        (None, None) => bail!("code has no edge labels; pass --seed to draw them"),
    }
}

fn cmd_gast(args: GastArgs) -> Result<()> {
    let field = FieldGf::with_order(args.q)?;
    let mut code = labeled(read_code(&args.code)?, &field, args.seed)?;
    let targets = parse_labels(&args.targets)?;
    let found = gast_scan(&code, &field, &targets, args.amax)?;
    match args.action {
        GastAction::Scan => print_json(&found),
        GastAction::Remove => {
            let mut results = Vec::new();
            for g in &found {
                let (outcome, next) = remove_gast(&code, &g.topology, &field)?;
                results.push(json!({
                    "label": g.label(),
                    "vns": g.topology.vns(),
                    "success": outcome.success,
                    "method": outcome.method,
                    "candidates": outcome.candidates,
                    "changes": to_edge_changes(&g.topology, &outcome.changes),
                }));
                code = next;
            }
            if let Some(out) = &args.out {
                write_file(out, &code_to_json(&code))?;
            }
            print_json(&results)
        }
    }
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<DesignConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let (Some(kappa), Some(l)) = (args.kappa, args.l) else {
                bail!("pass --config or both --kappa and --L");
            };
            let mut c = DesignConfig::new(kappa, args.p.unwrap_or(kappa), l);
            c.lambda = FieldGf::with_order(args.q)?.lambda();
            c.cpo_budget = args.budget;
            c.seeds = Seeds {
                partition: args.seed,
                labeling: args.seed,
                cpo: args.seed,
            };
            if let Some(t) = &args.targets {
                c.gast_targets = parse_labels(t)?;
            }
            if let Some(a) = args.amax {
                c.a_max = a;
            }
            c
        }
    };
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let name = |f: &str| Some(dir.join(f).display().to_string());
        config.outputs.report = config.outputs.report.take().or_else(|| name("report.json"));
        config.outputs.code = config.outputs.code.take().or_else(|| name("code.json"));
        config.outputs.alist = config.outputs.alist.take().or_else(|| name("code.alist"));
    }
    let out = match run_pipeline(&config) {
        Ok(out) => out,
        Err(failure) => {
            eprintln!("{}", serde_json::to_string_pretty(&failure.partial)?);
            bail!(failure.error);
        }
    };
    let outputs = &out.report.config.outputs;
    if let Some(p) = &outputs.report {
        write_file(Path::new(p), &serde_json::to_string_pretty(&out.report)?)?;
    }
    if let Some(p) = &outputs.code {
        write_file(Path::new(p), &code_to_json(&out.code))?;
    }
    if let Some(p) = &outputs.alist {
        write_file(Path::new(p), &write_alist(out.code.graph()))?;
    }
    print!("{}", out.report.summary());
    Ok(())
}
