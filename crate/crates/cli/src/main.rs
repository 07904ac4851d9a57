mod output;
mod storage;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use icx_core::classify;
use icx_core::count;
use icx_core::structure;
use icx_core::table::{self, ComplexityTable};
use icx_core::DefectThreshold;

use output::Format;

#[derive(Parser)]
#[command(name = "icx", version, about = "Integer complexity toolkit")]
struct Cli {
    /// Table cache file (created by `table build`, loaded by everything else)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Table limit; builds an in-memory table when no cache file exists
    #[arg(long, global = true)]
    limit: Option<u64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Worker thread hint (reserved; the current build is single-threaded)
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and cache a complexity table
    Table {
        #[command(subcommand)]
        action: TableAction,
    },
    /// Point queries against the table
    Query {
        #[command(subcommand)]
        what: QueryWhat,
    },
    /// Is n additively irreducible?
    Solid { n: u64 },
    /// Is n multiplicatively irreducible?
    Irreducible { n: u64 },
    /// Good factorization of n into m-irreducible factors
    Factor { n: u64 },
    /// Minimal representations of n
    Repr {
        n: u64,
        /// List all canonical minimal trees (up to --cap)
        #[arg(long)]
        all: bool,
        /// Maximum number of trees to materialize
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Is n a leader?
    Leader { n: u64 },
    /// Leader and exponent of n's chain
    Chain { n: u64 },
    /// Stability verdict for n
    Stability {
        n: u64,
        #[arg(long, default_value_t = 3)]
        horizon: u32,
    },
    /// The exceptional set for a step size
    Tset {
        #[arg(long)]
        alpha: String,
    },
    /// Walk the threshold ladder, printing each leader set
    Classify {
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value = "d2*1")]
        alpha: String,
        #[arg(long)]
        x: u64,
    },
    /// Run a verification pass
    Verify {
        #[command(subcommand)]
        what: VerifyWhat,
    },
    /// Count members and leaders below a threshold
    Count {
        #[arg(long)]
        threshold: String,
        #[arg(long)]
        x: u64,
    },
    /// Nested low-defect witnesses
    Witnesses {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: u64,
    },
    /// Growth exponent fit over sample points
    Growth {
        #[arg(long)]
        threshold: String,
        /// Comma-separated bounds, e.g. 1000,10000,100000,1000000
        #[arg(long)]
        points: String,
    },
}

#[derive(Subcommand)]
enum TableAction {
    /// Build the table for --limit and write it to --cache
    Build,
}

#[derive(Subcommand)]
enum QueryWhat {
    Complexity { n: u64 },
    Defect { n: u64 },
}

#[derive(Subcommand)]
enum VerifyWhat {
    /// Template classification at 12*d(2) and the below-one variant
    Classification(VerifyArgs),
    /// c(2^a * 3^k) = 2a + 3k within range
    Powers2(VerifyArgs),
    /// Second-largest value formulas
    Rawsthorne(VerifyArgs),
    /// Largest-value closed forms
    Selfridge(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Scope bound (defaults to the table limit)
    #[arg(long)]
    x: Option<u64>,
}

/// `d2*K`, a plain integer, a decimal or `p/q` rational, or `custom:a,b`.
fn parse_threshold(spec: &str) -> anyhow::Result<DefectThreshold> {
    let spec = spec.trim();
    if let Some(k) = spec.strip_prefix("d2*") {
        let k: u32 = k.parse().context("multiplier in d2*K")?;
        return Ok(DefectThreshold::delta2_multiple(k));
    }
    if spec == "d2" {
        return Ok(DefectThreshold::delta2_multiple(1));
    }
    if let Some(rest) = spec.strip_prefix("custom:") {
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| anyhow!("custom threshold needs custom:a,b"))?;
        let a: i64 = a.trim().parse().context("custom a")?;
        let b: BigUint = b.trim().parse().context("custom b")?;
        return Ok(DefectThreshold::custom(a, b)?);
    }
    if let Some((p, q)) = spec.split_once('/') {
        let p: i64 = p.trim().parse().context("rational numerator")?;
        let q: u32 = q.trim().parse().context("rational denominator")?;
        return Ok(DefectThreshold::rational(p, q)?);
    }
    if let Some((int_part, frac)) = spec.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 9 {
            bail!("decimal threshold has too many digits");
        }
        let scale = 10i64.pow(digits);
        let int_part: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().context("decimal integer part")?
        };
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().context("decimal fraction part")?
        };
        return Ok(DefectThreshold::rational(
            int_part * scale + frac,
            scale as u32,
        )?);
    }
    let r: i64 = spec.parse().context("integer threshold")?;
    Ok(DefectThreshold::integer(r))
}

struct Session {
    table: ComplexityTable,
    format: Format,
}

impl Session {
    fn open(cli: &Cli, min_limit: Option<u64>) -> anyhow::Result<Self> {
        let table = match (&cli.cache, cli.limit) {
            (Some(path), limit) if path.exists() => {
                let t = storage::load_table(path)?;
                if let Some(l) = limit {
                    if t.limit() < l {
                        bail!(
                            "cache at {} holds limit {}, smaller than requested {l}",
                            path.display(),
                            t.limit()
                        );
                    }
                }
                t
            }
            (_, Some(limit)) => ComplexityTable::build(limit)?,
            (Some(path), None) => bail!("cache file {} does not exist; pass --limit to build", path.display()),
            (None, None) => bail!("no table available: pass --cache and/or --limit"),
        };
        if let Some(need) = min_limit {
            if table.limit() < need {
                bail!("table limit {} is too small (need {need})", table.limit());
            }
        }
        Ok(Session {
            table,
            format: cli.format,
        })
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Table { action: TableAction::Build } => {
            let limit = cli
                .limit
                .ok_or_else(|| anyhow!("table build needs --limit"))?;
            let path = cli
                .cache
                .clone()
                .ok_or_else(|| anyhow!("table build needs --cache"))?;
            let started = std::time::Instant::now();
            let table = ComplexityTable::build(limit)?;
            storage::save_table(&table, &path)?;
            output::emit_build(cli.format, limit, &path, started.elapsed())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { what } => {
            let n = match what {
                QueryWhat::Complexity { n } | QueryWhat::Defect { n } => *n,
            };
            let session = Session::open(&cli, Some(n))?;
            match what {
                QueryWhat::Complexity { n } => {
                    output::emit_complexity(session.format, *n, session.table.complexity(*n)?)?
                }
                QueryWhat::Defect { n } => {
                    let d = session.table.defect(*n)?;
                    output::emit_defect(session.format, *n, &d)?
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solid { n } => {
            let session = Session::open(&cli, Some(*n))?;
            output::emit_bool(session.format, "solid", *n, structure::is_solid(&session.table, *n)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Irreducible { n } => {
            let session = Session::open(&cli, Some(*n))?;
            output::emit_bool(
                session.format,
                "m-irreducible",
                *n,
                structure::is_m_irreducible(&session.table, *n)?,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Factor { n } => {
            let session = Session::open(&cli, Some(*n))?;
            let tree = structure::factor_into_m_irreducibles(&session.table, *n)?;
            output::emit_factorization(session.format, &tree)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Repr { n, all, cap } => {
            let session = Session::open(&cli, Some(*n))?;
            if *all {
                let (trees, count) =
                    icx_core::expr::minimal_representations(&session.table, *n, *cap)?;
                output::emit_representations(session.format, *n, &trees, count)?;
            } else {
                let tree = icx_core::expr::preferred_representation(&session.table, *n)?;
                let (_, count) = icx_core::expr::minimal_representations(&session.table, *n, 0)?;
                output::emit_representations(session.format, *n, &[tree], count)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Leader { n } => {
            let session = Session::open(&cli, Some(*n))?;
            output::emit_bool(
                session.format,
                "leader",
                *n,
                structure::is_leader(&session.table, *n)?,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Chain { n } => {
            let session = Session::open(&cli, Some(*n))?;
            let chain = structure::chain_decompose(&session.table, *n)?;
            output::emit_chain(session.format, *n, &chain)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stability { n, horizon } => {
            let session = Session::open(&cli, None)?;
            let verdict = structure::stability_status(&session.table, *n, *horizon)?;
            output::emit_stability(session.format, *n, *horizon, &verdict)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tset { alpha } => {
            let alpha = parse_threshold(alpha)?;
            let session = Session::open(&cli, None)?;
            let tset = classify::compute_t_alpha(&session.table, &alpha)?;
            output::emit_tset(session.format, &tset)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { steps, alpha, x } => {
            let alpha = parse_threshold(alpha)?;
            let session = Session::open(&cli, Some(*x))?;
            let (snaps, report) = classify::ladder_report(&session.table, &alpha, *steps, *x)?;
            output::emit_ladder(session.format, &snaps, &report)?;
            Ok(exit_for(&report))
        }
        Command::Verify { what } => {
            let (args, name) = match what {
                VerifyWhat::Classification(a) => (a, "classification"),
                VerifyWhat::Powers2(a) => (a, "powers2"),
                VerifyWhat::Rawsthorne(a) => (a, "rawsthorne"),
                VerifyWhat::Selfridge(a) => (a, "selfridge"),
            };
            let session = Session::open(&cli, args.x)?;
            let x = args.x.unwrap_or(session.table.limit());
            let reports = match name {
                "classification" => vec![
                    classify::verify_classification(&session.table, x)?,
                    classify::verify_below_one(&session.table, x)?,
                ],
                "powers2" => {
                    let a_max = 21.min(x.ilog2());
                    vec![classify::verify_powers_of_two(&session.table, a_max)?]
                }
                "rawsthorne" => vec![table::rawsthorne_report(&session.table)],
                _ => vec![table::selfridge_report(&session.table)],
            };
            output::emit_reports(session.format, &reports)?;
            let worst = reports.iter().all(|r| r.passed());
            Ok(if worst {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Count { threshold, x } => {
            let threshold = parse_threshold(threshold)?;
            let session = Session::open(&cli, Some(*x))?;
            let (a, b) = count::count_sets(&session.table, &threshold, *x)?;
            output::emit_count(session.format, &threshold, *x, a, b)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Witnesses { k, x } => {
            let session = Session::open(&cli, None)?;
            let (witnesses, report) = count::witness_report(&session.table, *k, *x)?;
            output::emit_witnesses(session.format, &witnesses, &report, *x)?;
            Ok(exit_for(&report))
        }
        Command::Growth { threshold, points } => {
            let threshold = parse_threshold(threshold)?;
            let points: Vec<u64> = points
                .split(',')
                .map(|p| p.trim().parse::<u64>().context("sample point"))
                .collect::<anyhow::Result<_>>()?;
            let max = points.iter().copied().max().unwrap_or(0);
            let session = Session::open(&cli, Some(max))?;
            let report = count::growth_report(&session.table, &threshold, &points)?;
            output::emit_growth(session.format, &threshold, &report)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(report: &icx_core::report::CheckReport) -> ExitCode {
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
