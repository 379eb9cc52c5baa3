use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use serde_json::json;

use theta_refine::fixtures::{self, DEFAULT_GOLDEN};
use theta_refine::ksets::{kset, kset_meets_domain, parse_sets};
use theta_refine::minima::{format_set, min_n, parse_vec_list, ExclusionSet};
use theta_refine::quadform::{reduce_gl2, theta_coeffs, IntBqf, ThetaVariant};
use theta_refine::refinement::{
    run_algorithm_with, GenerationSink, RefinementPair, RunConfig, StopSet,
};
use theta_refine::relations::{
    classify, linset_decompose, parse_rational, verify_relation, verify_sp_relation,
};

#[derive(Parser)]
#[command(
    name = "theta-refine",
    version,
    about = "Search for linear relations between theta series of binary quadratic forms"
)]
struct Cli {
    /// Worker threads for the refinement search.
    #[arg(long, global = true, env = "THETA_REFINE_THREADS", default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Ordinary,
    Sp,
}

#[derive(Subcommand)]
enum Command {
    /// Run the refinement search for weights a/(a+b), b/(a+b).
    Refine {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long = "stop-set", default_value = "diagonal")]
        stop: StopSet,
        #[arg(long, default_value_t = 13)]
        max_iter: usize,
        /// Write every generation as gen_<i>/pair_<j>.json under this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Check a r1(m) + b r2(m) = (a+b) r3(m) for m <= max.
    Verify {
        #[arg(long, allow_hyphen_values = true, value_name = "A,B,C")]
        q1: IntBqf,
        #[arg(long, allow_hyphen_values = true, value_name = "A,B,C")]
        q2: IntBqf,
        #[arg(long, allow_hyphen_values = true, value_name = "A,B,C")]
        q3: IntBqf,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long = "max-coeff", default_value_t = 10_000)]
        max: u64,
        /// Use strongly primitive representation counts.
        #[arg(long)]
        sp: bool,
    },
    /// Name the case a relation a1 θ(Q1) + a2 θ(Q2) + a3 θ(Q3) = 0 falls into.
    Classify {
        /// Three coefficients such as "1/3,2/3,-1".
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        #[arg(long, allow_hyphen_values = true, value_name = "A,B,C")]
        q1: IntBqf,
        #[arg(long, allow_hyphen_values = true, value_name = "A,B,C")]
        q2: IntBqf,
        #[arg(long, allow_hyphen_values = true, value_name = "A,B,C")]
        q3: IntBqf,
        #[arg(long = "max-coeff", default_value_t = 10_000)]
        max: u64,
    },
    /// Write (x, y, z) with a x + b y = (a+b) z as a sum of linset generators.
    Decompose {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, value_delimiter = ',', required = true, value_name = "X,Y,Z")]
        triple: Vec<u64>,
    },
    /// All choices of the next n minimal vectors outside an excluded set.
    Min {
        /// Excluded vectors as "(1,0);(0,1)".
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        exclude: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// The K-set of a sequence of vector sets, e.g. "{(1,0),(0,1)};{};{(-1,1)}".
    Kset {
        #[arg(allow_hyphen_values = true)]
        sets: String,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Reduce a positive definite form into the reduction domain.
    Reduce {
        #[arg(allow_hyphen_values = true, value_name = "A,B,C")]
        form: IntBqf,
    },
    /// Theta series coefficients r(0), ..., r(max).
    Theta {
        #[arg(allow_hyphen_values = true, value_name = "A,B,C")]
        form: IntBqf,
        #[arg(long, default_value_t = 20)]
        max: u64,
        #[arg(long, value_enum, default_value_t = Variant::Ordinary)]
        variant: Variant,
    },
    /// Recompute the worked examples and compare them with golden data.
    Fixtures {
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
}

/// Failures that are the user's fault exit with 2; found counterexamples with 1.
enum Failure {
    Usage(String),
    Negative,
}

type Outcome = Result<(), Failure>;

fn usage<E: ToString>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
    {
        eprintln!("warning: {e}");
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Refine {
            a,
            b,
            stop,
            max_iter,
            out,
            emit,
        } => refine(a, b, stop, max_iter, out.as_deref(), emit),
        Command::Verify {
            q1,
            q2,
            q3,
            a,
            b,
            max,
            sp,
        } => {
            let check = if sp {
                verify_sp_relation
            } else {
                verify_relation
            };
            let r = check(&q1, &q2, &q3, a, b, max).map_err(usage)?;
            match r.first_failure {
                None => {
                    println!("holds for 0 <= m <= {max}");
                    Ok(())
                }
                Some(m) => {
                    println!("fails at m = {m}");
                    Err(Failure::Negative)
                }
            }
        }
        Command::Classify {
            alphas,
            q1,
            q2,
            q3,
            max,
        } => {
            let al: Vec<_> = alphas
                .split(',')
                .map(parse_rational)
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            let al: [_; 3] = al
                .try_into()
                .map_err(|_| usage("expected three coefficients"))?;
            let forms = [q1, q2, q3];
            match classify(&al, &forms, max) {
                Ok(c) => {
                    match c.first_failure {
                        Some(m) => println!("{} (fails at m = {m})", c.label),
                        None => println!("{} (checked to m = {})", c.label, c.bound),
                    }
                    Ok(())
                }
                Err(e) => Err(usage(e)),
            }
        }
        Command::Decompose { a, b, triple } => {
            if a + b == 0 {
                return Err(usage("a + b must be positive"));
            }
            let triple: [u64; 3] = triple
                .try_into()
                .map_err(|_| usage("expected three entries"))?;
            match linset_decompose(a, b, triple) {
                Some([p, q, r]) => {
                    println!("{p} * L1 + {q} * L2 + {r} * L3");
                    Ok(())
                }
                None => {
                    println!("not a non-negative combination");
                    Err(Failure::Negative)
                }
            }
        }
        Command::Min { exclude, n } => {
            let excl: ExclusionSet = parse_vec_list(&exclude)
                .map_err(usage)?
                .into_iter()
                .collect();
            for set in min_n(&excl, n) {
                println!("{}", format_set(&set));
            }
            Ok(())
        }
        Command::Kset { sets, emit } => {
            let sets = parse_sets(&sets).map_err(usage)?;
            let cone = kset(&sets).map_err(usage)?;
            let edges = cone.edges().map_err(usage)?;
            let zero = edges.is_empty();
            let meets = kset_meets_domain(&sets).map_err(usage)?;
            match emit {
                Emit::Json => {
                    let v = json!({
                        "cone": cone.to_json(true),
                        "zero_cone": zero,
                        "meets_domain": meets,
                    });
                    println!("{}", serde_json::to_string_pretty(&v).expect("plain data"));
                }
                Emit::Text => {
                    print!("{}", cone.to_matrix_text());
                    println!("edges:");
                    for e in edges {
                        let parts: Vec<String> = e.iter().map(ToString::to_string).collect();
                        println!("  ({})", parts.join(", "));
                    }
                    println!("zero cone: {zero}");
                    println!("meets reduction domain: {meets}");
                }
            }
            Ok(())
        }
        Command::Reduce { form } => {
            let (r, u) = reduce_gl2(&form).map_err(usage)?;
            println!("{r}");
            println!(
                "U = [[{}, {}], [{}, {}]]",
                u[0][0], u[0][1], u[1][0], u[1][1]
            );
            Ok(())
        }
        Command::Theta { form, max, variant } => {
            let v = match variant {
                Variant::Ordinary => ThetaVariant::Ordinary,
                Variant::Sp => ThetaVariant::StronglyPrimitive,
            };
            let coeffs = theta_coeffs(&form, max, v).map_err(usage)?;
            let parts: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
            println!("{}", parts.join(" "));
            Ok(())
        }
        Command::Fixtures { golden, emit } => {
            let text = match golden {
                Some(p) => {
                    fs::read_to_string(&p).map_err(|e| usage(format!("{}: {e}", p.display())))?
                }
                None => DEFAULT_GOLDEN.to_string(),
            };
            let outcomes = fixtures::run_all(&text).map_err(usage)?;
            match emit {
                Emit::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&outcomes).expect("plain data")
                ),
                Emit::Text => {
                    for o in &outcomes {
                        let mark = if o.passed { "pass" } else { "FAIL" };
                        if o.detail.is_empty() {
                            println!("{mark}  {:<10}  {}", o.kind, o.name);
                        } else {
                            println!("{mark}  {:<10}  {}: {}", o.kind, o.name, o.detail);
                        }
                    }
                    let failed = outcomes.iter().filter(|o| !o.passed).count();
                    println!("{} fixtures, {failed} failed", outcomes.len());
                }
            }
            if outcomes.iter().all(|o| o.passed) {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
    }
}

struct DumpSink<'a> {
    dir: &'a Path,
    error: Option<io::Error>,
}

impl DumpSink<'_> {
    fn write(&self, index: usize, pairs: &[RefinementPair]) -> io::Result<()> {
        let gen = self.dir.join(format!("gen_{index}"));
        fs::create_dir_all(&gen)?;
        for (j, p) in pairs.iter().enumerate() {
            let text = serde_json::to_string_pretty(&p.to_json()).map_err(io::Error::other)?;
            fs::write(gen.join(format!("pair_{j}.json")), text)?;
        }
        Ok(())
    }
}

impl GenerationSink for DumpSink<'_> {
    fn generation(&mut self, index: usize, pairs: &[RefinementPair]) {
        if self.error.is_none() {
            self.error = self.write(index, pairs).err();
        }
    }
}

fn refine(
    a: u64,
    b: u64,
    stop: StopSet,
    max_iter: usize,
    out: Option<&Path>,
    emit: Emit,
) -> Outcome {
    if a.gcd(&b) > 1 {
        eprintln!("warning: gcd({a}, {b}) > 1; the weights equal those of the reduced pair");
    }
    let cfg = RunConfig {
        a,
        b,
        stop,
        max_iter,
    };
    let result = match out {
        Some(dir) => {
            let mut sink = DumpSink { dir, error: None };
            let r = run_algorithm_with(&cfg, &mut sink);
            if let Some(e) = sink.error {
                return Err(usage(format!("{}: {e}", dir.display())));
            }
            r
        }
        None => run_algorithm_with(&cfg, &mut ()),
    };
    let (_, log) = result.map_err(usage)?;
    if let Some(dir) = out {
        let text = serde_json::to_string_pretty(&log).expect("plain data");
        fs::write(dir.join("log.json"), text).map_err(usage)?;
    }
    match emit {
        Emit::Text => print!("{}", log.table()),
        Emit::Json => {
            let v = json!({
                "a": a,
                "b": b,
                "stop_set": stop.to_string(),
                "max_iter": max_iter,
                "records": log.records,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("plain data"));
        }
    }
    Ok(())
}
