//! `treeboundary`: command-line access to the boundary computations.
//!
//! Exit codes: 0 on success, 2 on invalid input or usage, 3 when a resource
//! bound is exceeded.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use treeboundary::action::{act_cylinder, act_point, RnTable};
use treeboundary::boundary::{BoundaryPoint, Cylinder, CylinderUnion};
use treeboundary::full_group::{transitivity_check_with, PiecewiseTranslation, DEFAULT_MAX_STEP};
use treeboundary::group::DEFAULT_MAX_CELLS;
use treeboundary::ratio_set::{classify, find_witness_with, realized_exponents_with_limit};
use treeboundary::sampler::sample;
use treeboundary::scalar::{fraction_string, parse_fraction};
use treeboundary::{Error, Exact, Presentation, Scalar, Word};

#[derive(Parser)]
#[command(
    name = "treeboundary",
    version,
    about = "Exact measure and group-action computations on the boundary of a homogeneous tree"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Number of order-two generators.
    #[arg(long)]
    s: u32,
    /// Number of infinite-order generators.
    #[arg(long)]
    t: u32,
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Largest number of cells or words a single enumeration may produce.
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced words and the Cayley tree.
    #[command(subcommand)]
    Group(GroupCmd),
    /// ν of a cylinder (`--word`) or of a JSON cylinder union (`--E`).
    Measure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: Option<String>,
        #[arg(long = "E")]
        set: Option<String>,
    },
    /// Image of a cylinder, or of a point written `prefix (cycle)`, under `--g`.
    Act {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: String,
        #[arg(long)]
        word: String,
    },
    /// Radon–Nikodym table of `--g` over the depth-`--depth` cells.
    Rn {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: String,
        #[arg(long)]
        depth: usize,
    },
    /// The involutions k_(x,y).
    #[command(subcommand)]
    Kmap(KmapCmd),
    /// Ergodicity criterion.
    #[command(subcommand)]
    Ergodic(ErgodicCmd),
    /// Ratio-set computations.
    #[command(subcommand)]
    Ratio(RatioCmd),
    /// Factor type with its evidence bundle.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo samples of ν truncated at `--depth`.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: usize,
        #[arg(long = "n-samples")]
        n_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cell depth for the frequency summary.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Words of length `--m`, lexicographic.
    Sphere {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: usize,
        /// Print only the number of words.
        #[arg(long)]
        count: bool,
    },
    /// Letter transition matrix of reduced words.
    CkMatrix {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct KmapArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long = "max-step", default_value_t = DEFAULT_MAX_STEP)]
    max_step: usize,
}

#[derive(Subcommand)]
enum KmapCmd {
    Build(KmapArgs),
    Verify(KmapArgs),
    Apply {
        #[command(flatten)]
        args: KmapArgs,
        /// Boundary point `prefix (cycle)`.
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand)]
enum ErgodicCmd {
    /// Transitivity of the k_(x,y) on radius-`--m` cylinders.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: usize,
        #[arg(long = "max-step", default_value_t = 4)]
        max_step: usize,
    },
}

#[derive(Subcommand)]
enum RatioCmd {
    /// Derivative values of elements with |g| <= `--m` on depth-`--depth` cells.
    Values {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Witness that `--lambda` (a power of n) lies in the ratio set on `--E`.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: String,
        #[arg(long = "E", default_value = "[\"e\"]")]
        set: String,
        #[arg(long = "max-step", default_value_t = 8)]
        max_step: usize,
    },
}

fn presentation(c: &Common) -> Result<Presentation, Error> {
    Presentation::new(c.s, c.t)
}

fn strict_word(p: &Presentation, s: &str) -> Result<Word, Error> {
    let w = p.parse_word(s)?;
    let tokens = s.split_whitespace().filter(|t| *t != "e").count();
    if tokens != w.len() {
        return Err(Error::NotReduced(s.to_string()));
    }
    Ok(w)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Group(GroupCmd::Sphere { common, m, count }) => {
            let p = presentation(&common)?;
            if count {
                return Ok(p.sphere_size(m).to_string());
            }
            let words = p.sphere_with_limit(m, common.max_cells)?;
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&json!(words
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>())),
                _ => words
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join("\n"),
            })
        }
        Command::Group(GroupCmd::CkMatrix { common }) => {
            let p = presentation(&common)?;
            let letters: Vec<String> = p.letters().iter().map(|l| l.to_string()).collect();
            let m = p.cuntz_krieger_matrix();
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&json!({"letters": letters, "matrix": m})),
                Format::Csv => std::iter::once(format!(",{}", letters.join(",")))
                    .chain(letters.iter().zip(&m).map(|(l, row)| {
                        format!(
                            "{l},{}",
                            row.iter()
                                .map(|v| v.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    }))
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Text => m
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            })
        }
        Command::Measure { common, word, set } => {
            let p = presentation(&common)?;
            let value: Exact = match (word, set) {
                (Some(w), None) => Cylinder::new(strict_word(&p, &w)?).measure(&p),
                (None, Some(e)) => CylinderUnion::from_json(&e, &p)?.measure(&p),
                _ => {
                    return Err(Error::Parse {
                        input: String::new(),
                        reason: "give exactly one of --word or --E".into(),
                    })
                }
            };
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&json!({"measure": fraction_string(&value)})),
                _ => fraction_string(&value),
            })
        }
        Command::Act { common, g, word } => {
            let p = presentation(&common)?;
            let g = strict_word(&p, &g)?;
            if word.contains('(') {
                let w: BoundaryPoint = word.parse()?;
                p.check_word(w.prefix())?;
                p.check_word(w.cycle())?;
                let img = act_point(&g, &w);
                return Ok(match common.format.unwrap_or(Format::Text) {
                    Format::Json => pretty(&json!({"point": img.to_string()})),
                    _ => img.to_string(),
                });
            }
            let c = Cylinder::new(strict_word(&p, &word)?);
            let img = act_cylinder(&g, &c, &p);
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Json => img.to_json(),
                _ => img
                    .cylinders()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join("\n"),
            })
        }
        Command::Rn { common, g, depth } => {
            let p = presentation(&common)?;
            let g = strict_word(&p, &g)?;
            let table = RnTable::<Exact>::build_with_limit(&g, depth, &p, common.max_cells)?;
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&table.to_json()),
                Format::Csv => std::iter::once("cell,value,exponent".to_string())
                    .chain(table.cells.iter().map(|c| {
                        format!("{},{},{}", c.cell, fraction_string(&c.value), c.exponent)
                    }))
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Text => table
                    .cells
                    .iter()
                    .map(|c| format!("{}\t{}", c.cell, fraction_string(&c.value)))
                    .collect::<Vec<_>>()
                    .join("\n"),
            })
        }
        Command::Kmap(cmd) => run_kmap(cmd),
        Command::Ergodic(ErgodicCmd::Check {
            common,
            m,
            max_step,
        }) => {
            let p = presentation(&common)?;
            let ok = transitivity_check_with(m, &p, max_step, common.max_cells)?;
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({
                    "s": p.s(), "t": p.t(), "m": m,
                    "pairs": p.sphere_size(m).pow(2).to_string(),
                    "transitive": ok,
                })),
                _ => ok.to_string(),
            })
        }
        Command::Ratio(RatioCmd::Values { common, m, depth }) => {
            let p = presentation(&common)?;
            let exps = realized_exponents_with_limit(&p, m, depth, common.max_cells)?;
            let values: Vec<String> = exps
                .iter()
                .map(|&k| fraction_string(&Exact::powi(p.n(), k)))
                .collect();
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({
                    "n": p.n(),
                    "values": values,
                    "exponents": exps,
                })),
                _ => values.join("\n"),
            })
        }
        Command::Ratio(RatioCmd::Witness {
            common,
            lambda,
            set,
            max_step,
        }) => {
            let p = presentation(&common)?;
            let lambda = parse_fraction(&lambda).ok_or_else(|| Error::Parse {
                input: lambda.clone(),
                reason: "expected p/q".into(),
            })?;
            let e = CylinderUnion::from_json(&set, &p)?;
            let w = find_witness_with(&lambda, &e, &p, max_step)?;
            let mut j = w.to_json(&p);
            j["check"] = serde_json::to_value(w.check(&p)).expect("plain struct");
            Ok(pretty(&j))
        }
        Command::Classify { common } => {
            let p = presentation(&common)?;
            let c = classify(&p)?;
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Text => c.label.clone(),
                _ => pretty(&serde_json::to_value(&c).expect("plain struct")),
            })
        }
        Command::Sample {
            common,
            depth,
            n_samples,
            seed,
            m,
        } => {
            let p = presentation(&common)?;
            let batch = sample(&p, depth, n_samples, seed)?;
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Csv | Format::Text => batch.to_csv().trim_end().to_string(),
                Format::Json => pretty(&batch.summary_json(m)),
            })
        }
    }
}

fn run_kmap(cmd: KmapCmd) -> Result<String, Error> {
    let build = |a: &KmapArgs| -> Result<(Presentation, PiecewiseTranslation), Error> {
        let p = presentation(&a.common)?;
        let x = strict_word(&p, &a.x)?;
        let y = strict_word(&p, &a.y)?;
        Ok((p, PiecewiseTranslation::build_k(&x, &y, a.max_step, &p)?))
    };
    match cmd {
        KmapCmd::Build(a) => {
            let (_, k) = build(&a)?;
            Ok(pretty(&k.to_json()))
        }
        KmapCmd::Verify(a) => {
            let (_, k) = build(&a)?;
            let report = k.verify();
            Ok(pretty(&json!({
                "x": k.x().to_string(),
                "y": k.y().to_string(),
                "step_count": k.step_count(),
                "passed": report.all_passed(),
                "checks": report.checks,
            })))
        }
        KmapCmd::Apply { args, word } => {
            let (p, k) = build(&args)?;
            let w: BoundaryPoint = word.parse()?;
            p.check_word(w.prefix())?;
            p.check_word(w.cycle())?;
            let img = k.apply(&w);
            Ok(match args.common.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&json!({"input": w.to_string(), "image": img.to_string()})),
                _ => img.to_string(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) if e.is_resource_limit() => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
