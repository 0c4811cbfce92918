//! Command-line interface for overlap-free word generation, similarity
//! densities against the Thue-Morse word, and the verification sweeps.
//!
//! Exit codes: 0 success (or PASS), 1 FAIL, 2 usage error, 3 INCONCLUSIVE.

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ovlf_core::fife::{
    build_automaton, classify_path, decoded_length, enumerate_paths_with_cap, fbe_decode_with_cap,
    in_generalized_family, validate_path, FifePath,
};
use ovlf_core::mahler::{empirical_sigma, SigmaTable};
use ovlf_core::powerfree::{find_overlap, fragility_probe, is_pq_power_free, Strictness};
use ovlf_core::similarity::{asymptotic_density, sd, sd_curve_with, weyl_estimate};
use ovlf_core::util::{format_rational, parse_rational, rational_to_f64};
use ovlf_core::verify::{self, SweepOptions, Verdict};
use ovlf_core::words::{FiniteWord, SetOracle, WordSpec};
use ovlf_core::Rational;

#[derive(Parser)]
#[command(
    name = "ovlf",
    version,
    about = "Overlap-free infinite binary words: generation, similarity density, verification",
    long_about = "Generates overlap-free infinite binary words via paths through the Fife \
automaton, computes exact similarity densities against the Thue-Morse word, and machine-checks \
the density bounds at desk scale. Densities are exact rationals; floats appear only in output \
columns."
)]
struct Cli {
    #[command(flatten)]
    config: Config,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Cap on materialized word length, in symbols
    #[arg(long, global = true, env = "OVLF_MEMORY_CAP", default_value_t = 1 << 28)]
    memory_cap: u64,

    /// Default horizon for estimators
    #[arg(long, global = true, env = "OVLF_HORIZON", default_value_t = 1 << 20)]
    horizon: u64,

    /// Fraction of the horizon treated as the tail window (exact rational)
    #[arg(long, global = true, env = "OVLF_TAIL_FRACTION", default_value = "1/2", value_parser = rational_arg)]
    tail_fraction: Rational,

    /// Tolerance for estimator-based verification verdicts (exact rational)
    #[arg(long, global = true, env = "OVLF_TOLERANCE", default_value = "1/100", value_parser = rational_arg)]
    tolerance: Rational,

    /// Output format for tables
    #[arg(long, global = true, env = "OVLF_FORMAT", value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Tsv,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

#[derive(Subcommand)]
enum Command {
    /// Print a prefix of a word given by a spec (t, ~t, h, t>>k, fife:PATH)
    Gen {
        /// Word spec
        spec: String,
        /// Number of symbols
        #[arg(short = 'n', long, default_value_t = 64)]
        length: u64,
        /// Wrap output lines at this many symbols (0 = no wrap)
        #[arg(long, default_value_t = 0)]
        width: u64,
    },

    /// Exact similarity density of two equal-length binary words
    Sd {
        /// First word (over 0/1)
        x: String,
        /// Second word (over 0/1)
        y: String,
        /// Also print a decimal approximation
        #[arg(long)]
        float: bool,
    },

    /// Similarity-density curve of two word specs over growing prefixes
    SdCurve {
        /// First word spec
        x: String,
        /// Second word spec
        y: String,
        /// Largest prefix length
        #[arg(short = 'n', long)]
        length: Option<u64>,
        /// Sample every STRIDE symbols
        #[arg(long, default_value_t = 1)]
        stride: u64,
        /// Write CSV here instead of stdout
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
    },

    /// Autocorrelation of the Thue-Morse word: exact table or one empirical value
    Sigma {
        /// Emit the exact values for k = 0..=MAX as CSV
        #[arg(long)]
        max: Option<u64>,
        /// Compare exact and partial-sum values: --empirical K N
        #[arg(long, num_args = 2, value_names = ["K", "N"])]
        empirical: Option<Vec<u64>>,
    },

    /// Decode a path through the Fife automaton to a binary word
    Decode {
        /// Path, e.g. "2(31)" or "1(0)@0" (0^n sugar accepted)
        path: String,
        /// Number of symbols
        #[arg(short = 'n', long, default_value_t = 64)]
        length: u64,
    },

    /// Check whether a path is accepted by the Fife automaton
    Validate {
        /// Path to check
        path: String,
    },

    /// Classify a valid path into the four-case taxonomy
    Classify {
        /// Path to classify
        path: String,
        /// Also report membership in the generalized regular families
        #[arg(long)]
        family: bool,
    },

    /// List every valid path of exactly DEPTH letters
    Enumerate {
        /// Path length in letters
        #[arg(long)]
        depth: u32,
        /// Append the decoded word (truncated) as a fourth column
        #[arg(long)]
        emit_words: bool,
        /// Truncate emitted words to this many symbols
        #[arg(long, default_value_t = 64)]
        word_length: u64,
    },

    /// Find the leftmost shortest overlap in a word or spec prefix
    Overlap {
        /// Binary word, or a word spec evaluated to a prefix
        input: String,
        /// Prefix length when a spec is given
        #[arg(short = 'n', long, default_value_t = 4096)]
        length: u64,
    },

    /// Check a word for fractional-power freeness
    Powerfree {
        /// Binary word
        word: String,
        /// Exponent numerator
        #[arg(long)]
        p: u64,
        /// Exponent denominator
        #[arg(long)]
        q: u64,
        /// Reject exponents >= p/q instead of > p/q
        #[arg(long)]
        strict: bool,
    },

    /// Flip positions in the Thue-Morse prefix and report the first overlap
    Fragility {
        /// Comma-separated positions to flip
        #[arg(long, value_delimiter = ',', required = true)]
        flips: Vec<u64>,
        /// Prefix length to search in
        #[arg(long, default_value_t = 1024)]
        window: u64,
    },

    /// Extreme window densities at fixed block lengths (Weyl variant)
    Weyl {
        /// First word spec
        x: String,
        /// Second word spec
        y: String,
        /// Block lengths (default: powers of two from 16 to 4096)
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<u64>,
        /// Window positions range over [0, horizon - block]
        #[arg(short = 'n', long)]
        length: Option<u64>,
    },

    /// Tail bracket of the asymptotic density of a set of naturals
    Density {
        /// Named set: evens, odds, powers-of-two, squares, primes
        set: String,
        /// Horizon
        #[arg(short = 'n', long)]
        length: Option<u64>,
    },

    /// Machine-check the density statements
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },

    /// Enumerate all valid paths and sweep their densities against t
    Sweep {
        /// Path letters enumerated
        #[arg(long, default_value_t = 20)]
        depth: u32,
        /// Decoded prefix length compared
        #[arg(long, default_value_t = 1 << 14)]
        length: u64,
        /// Write per-path rows as CSV (serial; may be large at high depth)
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
        /// Worker threads for the aggregate-only run
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Run every check
    All {
        /// Worker threads
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Shifted-window density bounds of the iterates, exhaustively
    Lemma {
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
    /// Aligned-window density bounds (gcd-filtered offsets)
    Cor {
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
    /// Exact 2/3 and 1/3 oscillation of h against t
    PropH {
        #[arg(long, default_value_t = 10)]
        k_max: u32,
    },
    /// Densities of the edge family 0^n 2 (31)^omega
    PropEdge {
        #[arg(long, default_value_t = 3)]
        n_max: u32,
    },
    /// Autocorrelation bounds and partial-sum agreement
    Mahler {
        #[arg(long, default_value_t = 100_000)]
        sigma_max: u64,
        #[arg(long, default_value_t = 10_000)]
        shift_max: u64,
        #[arg(long, default_value_t = 64)]
        empirical_max: u64,
    },
    /// Cross-validate the automaton against the overlap oracle
    Automaton {
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value_t = 64)]
        continuation: u64,
        #[arg(long, default_value_t = 1 << 12)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    // Die quietly when a pipe closes early (e.g. piping into head).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_spec(text: &str) -> Result<WordSpec, ovlf_core::Error> {
    text.parse()
}

/// A literal 0/1 word, or a spec prefix of the given length.
fn word_or_spec_prefix(input: &str, length: u64, cap: u64) -> Result<FiniteWord, ovlf_core::Error> {
    if !input.is_empty() && input.chars().all(|c| c == '0' || c == '1') {
        FiniteWord::from_str(input)
    } else {
        parse_spec(input)?.eval_with_cap(0, length, cap)
    }
}

fn delimiter(format: Format) -> &'static str {
    match format {
        Format::Tsv => "\t",
        _ => ",",
    }
}

fn run(cli: &Cli) -> Result<ExitCode, ovlf_core::Error> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Gen {
            spec,
            length,
            width,
        } => {
            let w = parse_spec(spec)?.eval_with_cap(0, *length, cfg.memory_cap)?;
            let text = w.to_string();
            if *width == 0 {
                println!("{text}");
            } else {
                for chunk in text.as_bytes().chunks(*width as usize) {
                    println!("{}", std::str::from_utf8(chunk).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Sd { x, y, float } => {
            let xw = FiniteWord::from_str(x)?;
            let yw = FiniteWord::from_str(y)?;
            let d = sd(&xw, &yw)?;
            if *float {
                println!("{} {}", format_rational(d), rational_to_f64(d));
            } else {
                println!("{}", format_rational(d));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::SdCurve {
            x,
            y,
            length,
            stride,
            csv,
        } => {
            let horizon = length.unwrap_or(cfg.horizon);
            let xs = parse_spec(x)?;
            let ys = parse_spec(y)?;
            let curve = sd_curve_with(&xs, &ys, horizon, *stride, cfg.tail_fraction)?;
            let data = curve.to_csv();
            match csv {
                Some(path) => {
                    let mut out = format!("# ovlf sd-curve {x} {y} n={horizon} stride={stride}\n");
                    out.push_str(&data);
                    fs::write(path, out).map_err(|e| ovlf_core::Error::Parse(e.to_string()))?;
                    println!(
                        "wrote {} samples; running extrema [{}, {}], tail extrema [{}, {}]",
                        curve.samples.len(),
                        format_rational(curve.running_min),
                        format_rational(curve.running_max),
                        format_rational(curve.tail_min),
                        format_rational(curve.tail_max),
                    );
                }
                None => print!("{data}"),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Sigma { max, empirical } => {
            match (max, empirical) {
                (Some(k_max), None) => {
                    let mut table = SigmaTable::new();
                    let sep = delimiter(cfg.format);
                    println!("k{sep}num{sep}den{sep}float");
                    for k in 0..=*k_max {
                        let v = table.sigma(k);
                        println!(
                            "{k}{sep}{}{sep}{}{sep}{}",
                            v.numer(),
                            v.denom(),
                            rational_to_f64(v)
                        );
                    }
                }
                (None, Some(args)) => {
                    let (k, n) = (args[0], args[1]);
                    if n == 0 {
                        return Err(ovlf_core::Error::Parse("n must be positive".into()));
                    }
                    let exact = SigmaTable::new().sigma(k);
                    let emp = empirical_sigma(k, n);
                    println!("exact {}", format_rational(exact));
                    println!(
                        "empirical {} ({})",
                        format_rational(emp),
                        rational_to_f64(emp)
                    );
                }
                _ => {
                    return Err(ovlf_core::Error::Parse(
                        "use exactly one of --max K or --empirical K N".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Decode { path, length } => {
            let p: FifePath = path.parse()?;
            let w = fbe_decode_with_cap(&p, *length, cfg.memory_cap)?;
            println!("{w}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Validate { path } => {
            let p: FifePath = path.parse()?;
            let aut = build_automaton();
            if validate_path(&aut, &p) {
                println!("valid");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("invalid");
                Ok(ExitCode::from(1))
            }
        }

        Command::Classify { path, family } => {
            let p: FifePath = path.parse()?;
            let aut = build_automaton();
            let tag = classify_path(&aut, &p)?;
            if *family {
                println!("{tag} family={}", in_generalized_family(&p));
            } else {
                println!("{tag}");
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Enumerate {
            depth,
            emit_words,
            word_length,
        } => {
            let aut = build_automaton();
            let paths = enumerate_paths_with_cap(&aut, *depth, ovlf_core::DEFAULT_ENUMERATION_CAP)?;
            let sep = delimiter(cfg.format);
            if *emit_words {
                println!("path{sep}end_state{sep}decoded_length{sep}word");
            } else {
                println!("path{sep}end_state{sep}decoded_length");
            }
            for (letters, state) in paths {
                let text: String = letters.iter().map(|l| (b'0' + l) as char).collect();
                let len = decoded_length(&letters);
                if *emit_words {
                    let take = len.min(*word_length);
                    let p = FifePath::new(letters.clone(), vec![1], None)?;
                    let w = fbe_decode_with_cap(&p, take, cfg.memory_cap)?;
                    println!("{text}{sep}{}{sep}{len}{sep}{w}", aut.name(state));
                } else {
                    println!("{text}{sep}{}{sep}{len}", aut.name(state));
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Overlap { input, length } => {
            let w = word_or_spec_prefix(input, *length, cfg.memory_cap)?;
            match find_overlap(&w) {
                Some(o) => {
                    println!(
                        "overlap at {} period {} length {}",
                        o.position, o.period_length, o.total_length
                    );
                }
                None => println!("overlap-free ({} symbols)", w.len()),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Powerfree { word, p, q, strict } => {
            let w = FiniteWord::from_str(word)?;
            let mode = if *strict {
                Strictness::RejectAtOrAbove
            } else {
                Strictness::RejectAbove
            };
            let free = is_pq_power_free(&w, *p, *q, mode)?;
            println!("{}", if free { "power-free" } else { "not power-free" });
            Ok(if free {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Fragility { flips, window } => match fragility_probe(flips, *window)? {
            Some(o) => {
                println!(
                    "overlap at {} period {} length {}",
                    o.position, o.period_length, o.total_length
                );
                Ok(ExitCode::SUCCESS)
            }
            None => {
                println!("INCONCLUSIVE: no overlap within window {window}; raise --window");
                Ok(ExitCode::from(3))
            }
        },

        Command::Weyl {
            x,
            y,
            blocks,
            length,
        } => {
            let horizon = length.unwrap_or(cfg.horizon);
            let xs = parse_spec(x)?;
            let ys = parse_spec(y)?;
            let block_list: Vec<u64> = if blocks.is_empty() {
                (4..=12).map(|e| 1u64 << e).collect()
            } else {
                blocks.clone()
            };
            let sep = delimiter(cfg.format);
            println!(
                "block{sep}min_num{sep}min_den{sep}max_num{sep}max_den{sep}min_float{sep}max_float"
            );
            for &b in &block_list {
                let (lo, hi) = weyl_estimate(&xs, &ys, b, horizon)?;
                println!(
                    "{b}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}",
                    lo.numer(),
                    lo.denom(),
                    hi.numer(),
                    hi.denom(),
                    rational_to_f64(lo),
                    rational_to_f64(hi)
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Density { set, length } => {
            let horizon = length.unwrap_or(cfg.horizon);
            let oracle = match set.as_str() {
                "evens" => SetOracle::new(|i| i % 2 == 0),
                "odds" => SetOracle::new(|i| i % 2 == 1),
                "powers-of-two" => SetOracle::new(|i| i > 0 && i.is_power_of_two()),
                "squares" => SetOracle::new(|i| {
                    let r = (i as f64).sqrt() as u64;
                    (r.saturating_sub(1)..=r + 1).any(|s| s * s == i)
                }),
                "primes" => SetOracle::new(|i| {
                    i >= 2 && (2..i).take_while(|d| d * d <= i).all(|d| i % d != 0)
                }),
                other => {
                    return Err(ovlf_core::Error::Parse(format!(
                        "unknown set {other:?} (try evens, odds, powers-of-two, squares, primes)"
                    )))
                }
            };
            let (lo, hi) = asymptotic_density(&oracle, horizon)?;
            println!(
                "tail density in [{}, {}] ({} .. {})",
                format_rational(lo),
                format_rational(hi),
                rational_to_f64(lo),
                rational_to_f64(hi)
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { what } => {
            let reports = match what {
                VerifyCommand::All { jobs } => verify::run_all_with_jobs(*jobs),
                VerifyCommand::Lemma { n_max } => vec![verify::lemma_shift_windows(*n_max)],
                VerifyCommand::Cor { n_max } => vec![verify::cor_window_bounds(*n_max)],
                VerifyCommand::PropH { k_max } => {
                    vec![verify::prop_h_densities(*k_max, cfg.horizon, cfg.tolerance)]
                }
                VerifyCommand::PropEdge { n_max } => {
                    vec![verify::prop_edge_densities(*n_max, cfg.tolerance)]
                }
                VerifyCommand::Mahler {
                    sigma_max,
                    shift_max,
                    empirical_max,
                } => vec![verify::mahler_bounds(
                    *sigma_max,
                    *shift_max,
                    *empirical_max,
                    cfg.horizon,
                    cfg.tolerance,
                )],
                VerifyCommand::Automaton {
                    depth,
                    continuation,
                    cap,
                } => vec![verify::automaton_cross_check(*depth, *continuation, *cap)],
            };
            let mut worst = Verdict::Pass;
            for r in &reports {
                println!("{}", r.summary());
                worst = match (worst, r.verdict) {
                    (_, Verdict::Fail) | (Verdict::Fail, _) => Verdict::Fail,
                    (_, Verdict::Inconclusive) | (Verdict::Inconclusive, _) => {
                        Verdict::Inconclusive
                    }
                    _ => Verdict::Pass,
                };
            }
            Ok(match worst {
                Verdict::Pass => ExitCode::SUCCESS,
                Verdict::Fail => ExitCode::from(1),
                Verdict::Inconclusive => ExitCode::from(3),
            })
        }

        Command::Sweep {
            depth,
            length,
            csv,
            jobs,
        } => {
            let opts = SweepOptions {
                depth: *depth,
                prefix_length: *length,
                tail_fraction: cfg.tail_fraction,
            };
            let summary = match csv {
                Some(path) => {
                    // Row emission is serial so the file order is canonical.
                    let file = fs::File::create(path)
                        .map_err(|e| ovlf_core::Error::Parse(e.to_string()))?;
                    let mut out = std::io::BufWriter::new(file);
                    let header = format!(
                        "# ovlf sweep depth={} length={}\npath,case,sd_num,sd_den,tail_min_float,tail_max_float\n",
                        opts.depth, opts.prefix_length
                    );
                    out.write_all(header.as_bytes())
                        .map_err(|e| ovlf_core::Error::Parse(e.to_string()))?;
                    let mut io_error = None;
                    let summary = verify::sweep(&opts, |row| {
                        let line = format!(
                            "{},{},{},{},{},{}\n",
                            row.path_text(),
                            row.case_tag,
                            row.sd.numer(),
                            row.sd.denom(),
                            rational_to_f64(row.tail_min),
                            rational_to_f64(row.tail_max)
                        );
                        if let Err(e) = out.write_all(line.as_bytes()) {
                            io_error.get_or_insert(e);
                        }
                    })?;
                    if let Some(e) = io_error {
                        return Err(ovlf_core::Error::Parse(e.to_string()));
                    }
                    out.flush()
                        .map_err(|e| ovlf_core::Error::Parse(e.to_string()))?;
                    summary
                }
                None => verify::sweep_with_jobs(&opts, *jobs)?,
            };
            println!(
                "rows {} (excluded {}), density extrema [{}, {}] attained by {} and {}, digest {:016x}",
                summary.row_count,
                summary.excluded_count,
                format_rational(summary.global_min),
                format_rational(summary.global_max),
                summary.min_path,
                summary.max_path,
                summary.digest
            );
            println!(
                "conjectured limit window [1/3, 2/3]; finite-scale extrema are empirical, not a theorem"
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
