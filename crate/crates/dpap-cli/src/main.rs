use std::io::Write as _;
use std::path::Path;

use clap::Parser;

use dpap_cli::args::{BenchArgs, Cli, ClusterArgs, Command, EvalFormat, GenParams, SegsimArgs};
use dpap_cli::error::CliError;
use dpap_cli::formats;
use dpap_cli::ops::{self, Algo, BenchOpts, ClusterOpts, GenOpts, SegsimOpts};

use dpap_core::GenConfig;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successful exits; anything else is a
            // usage error.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn gen_config(p: &GenParams) -> GenConfig {
    GenConfig {
        n: p.n,
        alpha: p.alpha,
        dim: p.dim,
        base_variance: p.base_variance,
        cond_variance: p.cond_variance,
        seed: p.seed,
    }
}

/// Write to the file when one is named, otherwise to standard output.
fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => formats::write_text(path, contents),
        None => {
            std::io::stdout()
                .write_all(contents.as_bytes())
                .map_err(|e| CliError::data(e.to_string()))
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => {
            let opts = GenOpts {
                config: gen_config(&args.params),
                count: args.count,
                out_dir: args.out_dir,
            };
            let written = ops::run_gen(&opts)?;
            for path in &written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Cluster(args) => cmd_cluster(args),
        Command::Eval(args) => {
            let record = ops::run_eval(&args.result, &args.reference)?;
            let text = match args.format {
                EvalFormat::Json => record.to_json(),
                EvalFormat::Csv => record.to_csv(),
            };
            print!("{text}");
            Ok(())
        }
        Command::Bench(args) => cmd_bench(args),
        Command::Segsim(args) => cmd_segsim(args),
    }
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), CliError> {
    let opts = ClusterOpts {
        algo: Algo::parse(&args.algorithm)?,
        input: args.input,
        alpha: args.alpha,
        damping: args.damping,
        tol: args.tol,
        max_iters: args.max_iters,
        prior: args.prior,
        self_sim: args.self_sim,
        scale: args.scale,
        d: args.d,
        seed: args.seed,
    };
    let result = ops::run_cluster(&opts)?;
    emit(args.out.as_deref(), &result.to_json())?;
    if args.strict && !result.converged {
        return Err(CliError::StrictNonConvergence {
            algorithm: result.algorithm,
            iterations: result.iterations,
        });
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let algos = args.algos.as_deref().map(ops::parse_algo_list).transpose()?;
    let opts = BenchOpts {
        config: gen_config(&args.params),
        count: args.count,
        data_dir: args.data_dir,
        algos,
        timings: args.timings,
    };
    let summary = ops::run_bench(&opts)?;
    let written = ops::write_bench_outputs(&summary, args.out_dir.as_deref())?;
    let n_datasets = summary.records.iter().map(|r| r.dataset_id).max().map_or(0, |m| m + 1);
    println!("{} datasets, {} runs", n_datasets, summary.records.len());
    println!("algorithm mean_rand_index mean_delta_loglik convergence_rate hist_tv_to_truth");
    for s in &summary.stats {
        println!(
            "{} {:.4} {:.4} {:.2} {:.4}",
            s.algorithm,
            s.mean_rand_index,
            s.mean_delta_loglik,
            s.convergence_rate,
            s.histogram_tv_to_truth
        );
    }
    for path in &written {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_segsim(args: SegsimArgs) -> Result<(), CliError> {
    let opts = SegsimOpts {
        graph: args.graph,
        tau_color: args.tau_color,
        tau_edge: args.tau_edge,
        self_sim: args.self_sim,
        scale: args.scale,
        rescale: args.rescale,
    };
    let sim = ops::run_segsim(&opts)?;
    emit(args.out.as_deref(), &formats::similarity_to_csv(&sim))
}
