use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mereology::bitstate::{inner_ontic, overlap_standard, random_ontic};
use mereology::experiment::{
    fmt_f64, plot_spec, run_cycle_census, run_sweep, run_time_series, summarize_by_size,
    write_summary_csv, write_sweep_csv, SamplingLaw, SubsetPolicy, SweepBasis, SweepConfig,
    DEFAULT_GRAM_CAP, TOOL_VERSION,
};
use mereology::indexing::{
    natural_state_lower_bound, orthant_sphere_area, orthant_sphere_log_area,
};
use mereology::permrep::random_permutation;
use mereology::{Error, FactorizationShape, OnticVector, Permutation, SubsystemMask};

#[derive(Parser)]
#[command(
    name = "mereology",
    version,
    about = "Subsystem entropies of states built from ontic bit vectors"
)]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Ontic,
    Energy,
}

#[derive(Subcommand)]
enum Command {
    /// Collision entropy of every selected subsystem for a batch of random states.
    Sweep {
        #[arg(long, default_value = "2^12")]
        shape: String,
        #[arg(long, default_value_t = 10)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BasisArg::Ontic)]
        basis: BasisArg,
        /// Generator in cycle notation, e.g. "(0 1 2)(3 4)". Random from --seed if omitted.
        #[arg(long)]
        generator: Option<String>,
        /// all-proper, sizes:1,2,3 or sampled:K (default: all-proper for K <= 14).
        #[arg(long)]
        subset_policy: Option<String>,
        /// Draw states with a fixed fraction of points set instead of fair bits.
        #[arg(long)]
        density: Option<f64>,
        /// Limit on the smaller-side Gram dimension.
        #[arg(long, default_value_t = DEFAULT_GRAM_CAP)]
        gram_cap: usize,
        /// Records CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-size min/mean/max CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Declarative plot description (JSON) referencing --out and --summary.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// S2 of one subsystem along the orbit of a permutation generator.
    Evolve {
        #[arg(long, default_value = "2^3")]
        shape: String,
        /// Initial ontic vector as "N:0xHEX" (random from --seed if omitted).
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        generator: Option<String>,
        /// Subsystem as 1-based factor list, e.g. "1,3".
        #[arg(long, default_value = "1")]
        subset: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        t_start: i64,
        /// Exclusive end of the time range (default: one period, capped at 10000).
        #[arg(long, allow_hyphen_values = true)]
        t_end: Option<i64>,
        #[arg(long)]
        allow_wrap: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean number of l-cycles in uniformly random permutations.
    Cycles {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ontic inner product and standard-subspace overlap of two vectors.
    Overlap {
        /// First vector as "N:0xHEX" or a 0/1 string.
        q: String,
        r: String,
    },
    /// Count bound and orthant area for the natural states of N points.
    Area {
        #[arg(long)]
        n: usize,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_vector(text: &str) -> Result<OnticVector, Error> {
    if text.contains(':') {
        text.parse()
    } else {
        OnticVector::from_bit_str(text)
    }
}

fn generator_for(text: Option<&str>, n: usize, seed: u64) -> Result<(Permutation, String), Error> {
    match text {
        Some(t) => Ok((Permutation::parse(t, n)?, t.to_string())),
        None => Ok((random_permutation(n, seed), format!("random (seed {seed})"))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    match cli.command {
        Command::Sweep {
            shape,
            states,
            seed,
            basis,
            generator,
            subset_policy,
            density,
            gram_cap,
            out,
            summary,
            plot,
        } => {
            let shape: FactorizationShape = shape.parse()?;
            let mut config = SweepConfig::new(shape, states, seed);
            config.gram_cap = gram_cap;
            if let Some(p) = subset_policy {
                config.policy = SubsetPolicy::parse(&p)?;
            }
            if let Some(d) = density {
                config.sampling = SamplingLaw::FixedDensity(d);
            }
            config.basis = match basis {
                BasisArg::Ontic if generator.is_some() => {
                    return Err(
                        Error::InvalidConfig("--generator requires --basis energy".into()).into(),
                    )
                }
                BasisArg::Ontic => SweepBasis::Ontic,
                BasisArg::Energy => {
                    let (generator, label) =
                        generator_for(generator.as_deref(), config.shape.total(), seed)?;
                    SweepBasis::Energy { generator, label }
                }
            };
            let sweep = run_sweep(&config)?;
            let mut w = output(out.as_deref())?;
            write_sweep_csv(&mut w, &config, &sweep)?;
            w.flush()?;
            let stats = summarize_by_size(&sweep.records, config.shape.num_factors())?;
            if let Some(path) = &summary {
                let mut w = output(Some(path))?;
                write_summary_csv(&mut w, &stats)?;
                w.flush()?;
            }
            if let Some(path) = &plot {
                let name = |p: &Option<PathBuf>, fallback: &str| {
                    p.as_ref()
                        .and_then(|p| p.file_name())
                        .map(|f| f.to_string_lossy().into_owned())
                        .unwrap_or_else(|| fallback.to_string())
                };
                let spec = plot_spec(
                    &config,
                    &name(&out, "sweep.csv"),
                    &name(&summary, "summary.csv"),
                );
                let text = serde_json::to_string_pretty(&spec).map_err(io::Error::other)?;
                std::fs::write(path, text + "\n")?;
            }
            eprintln!(
                "{} records; max |S2(A) - S2(X\\A)| = {:e}",
                sweep.records.len(),
                stats.max_pair_asymmetry
            );
            for row in &stats.rows {
                eprintln!(
                    "|A| = {:>2}: mean {:.6}  min {:.6}  max {:.6}  spread {:.2e}",
                    row.subset_size, row.mean, row.min, row.max, row.state_spread
                );
            }
        }
        Command::Evolve {
            shape,
            q,
            seed,
            generator,
            subset,
            t_start,
            t_end,
            allow_wrap,
            out,
        } => {
            let shape: FactorizationShape = shape.parse()?;
            let n = shape.total();
            let q = match q {
                Some(text) => parse_vector(&text)?,
                None => random_ontic(n, seed)?,
            };
            let (g, label) = generator_for(generator.as_deref(), n, seed)?;
            let mask = SubsystemMask::parse(&subset, shape.num_factors())?;
            let t_end = t_end.unwrap_or_else(|| {
                let period: u64 = g.order().try_into().unwrap_or(u64::MAX);
                t_start.saturating_add(period.min(10_000) as i64)
            });
            let series = run_time_series(&shape, &q, &g, mask, t_start..t_end, allow_wrap)?;
            let mut w = output(out.as_deref())?;
            writeln!(w, "# tool: {TOOL_VERSION}")?;
            writeln!(w, "# shape: {shape}")?;
            writeln!(w, "# q: {q}")?;
            writeln!(w, "# generator: {label}")?;
            writeln!(w, "# order: {}", g.order())?;
            writeln!(w, "# subset: {mask}")?;
            writeln!(w, "# log_base: 2")?;
            writeln!(w, "t,s2_bits")?;
            for (t, s) in series {
                writeln!(w, "{t},{}", fmt_f64(s))?;
            }
            w.flush()?;
        }
        Command::Cycles {
            n,
            samples,
            seed,
            out,
        } => {
            let census = run_cycle_census(n, samples, seed)?;
            let mut w = output(out.as_deref())?;
            writeln!(w, "# tool: {TOOL_VERSION}")?;
            writeln!(w, "# n: {n}")?;
            writeln!(w, "# samples: {samples}")?;
            writeln!(w, "# seed: {seed}")?;
            writeln!(w, "length,mean,std_error,expected,flagged")?;
            for r in &census.rows {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    r.length,
                    fmt_f64(r.mean),
                    fmt_f64(r.std_error),
                    fmt_f64(r.expected),
                    r.flagged
                )?;
            }
            w.flush()?;
            let flagged: Vec<usize> = census.flagged().map(|r| r.length).collect();
            if !flagged.is_empty() {
                eprintln!("lengths outside 3 standard errors of 1/l: {flagged:?}");
            }
        }
        Command::Overlap { q, r } => {
            let q = parse_vector(&q)?;
            let r = parse_vector(&r)?;
            println!("inner_ontic: {}", inner_ontic(&q, &r)?);
            println!("overlap_standard: {}", fmt_f64(overlap_standard(&q, &r)?));
        }
        Command::Area { n } => {
            let bound = natural_state_lower_bound(n)?;
            let digits = bound.to_string();
            println!("natural_state_lower_bound: {digits}");
            println!("decimal_digits: {}", digits.len());
            println!(
                "orthant_sphere_log_area: {}",
                fmt_f64(orthant_sphere_log_area(n)?)
            );
            println!("orthant_sphere_area: {}", fmt_f64(orthant_sphere_area(n)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_invariant_violation() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
