//! `radcheck`: parametric reachability, sweeps, runtime monitoring and
//! simulation for guarded-command DTMC models.

mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radcheck_core::engine::{NumericMethod, NumericOptions};
use radcheck_core::monitor::MonitorConfig;

use args::{Assign, Range};
use commands::{ModelArgs, Outcome};

/// Parametric DTMC checking for guarded-command models.
///
/// Constants left unbound by --const stay symbolic. Exit status: 0 success,
/// 2 usage or parse error, 3 requirement violated, 4 numeric failure.
#[derive(Parser)]
#[command(name = "radcheck", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelOpts {
    /// Model file in the guarded-command language
    model: PathBuf,
    /// Fix a constant, e.g. --const P4=0.88 (repeatable)
    #[arg(long = "const", value_name = "NAME=VALUE", value_parser = args::assign)]
    consts: Vec<Assign>,
    /// Declare the range of a free parameter, e.g. --param P2=0:1
    #[arg(long = "param", value_name = "NAME=LO:HI", value_parser = args::range)]
    params: Vec<Range>,
    /// Output file; `-` or absent writes to stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl ModelOpts {
    fn model(&self) -> ModelArgs<'_> {
        ModelArgs {
            path: &self.model,
            consts: &self.consts,
            params: &self.params,
        }
    }
}

#[derive(Args)]
struct QueryOpts {
    /// Property file, one query per line
    #[arg(long, value_name = "PATH")]
    property: Option<PathBuf>,
    /// Target predicate, checked as P=? [ F target ]
    #[arg(long, value_name = "PRED")]
    target: Option<String>,
}

#[derive(Args)]
struct LearnOpts {
    /// Prior mean of a parameter, e.g. --prior P2=0.9 (one per free parameter)
    #[arg(long = "prior", value_name = "NAME=P0", value_parser = args::assign)]
    priors: Vec<Assign>,
    /// Prior weight
    #[arg(long, default_value_t = 10.0)]
    c0: f64,
    /// Ageing factor per unit time (1 disables ageing)
    #[arg(long, default_value_t = 1.05)]
    alpha: f64,
}

impl LearnOpts {
    fn learning(&self) -> commands::Learning<'_> {
        commands::Learning {
            priors: &self.priors,
            c0: self.c0,
            alpha: self.alpha,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and unfold a model; print its size and free parameters
    Validate {
        #[command(flatten)]
        model: ModelOpts,
    },
    /// Closed-form reachability probabilities by state elimination
    Symbolic {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        query: QueryOpts,
        #[arg(long, value_enum, default_value = "min-fill")]
        order: commands::Order,
        /// Abort elimination when an intermediate function has more terms
        #[arg(long, default_value_t = 200_000)]
        term_cap: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: commands::SymbolicFormat,
    },
    /// Numeric probabilities with every parameter fixed
    Check {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        query: QueryOpts,
        /// Use value iteration instead of the direct linear solve
        #[arg(long)]
        iterate: bool,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Evaluate a closed form over a two-parameter grid; CSV output
    Sweep {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long, value_name = "NAME=LO:HI", value_parser = args::range)]
        x: Range,
        #[arg(long, value_name = "NAME=LO:HI", value_parser = args::range)]
        y: Range,
        /// Grid points per axis
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "reach")]
        quantity: commands::Quantity,
        #[arg(long, value_name = "PRED")]
        target: Option<String>,
    },
    /// Replay an event stream through the learner and requirement monitor
    Monitor {
        #[command(flatten)]
        model: ModelOpts,
        /// JSON-lines events; `-` reads stdin
        #[arg(long, value_name = "PATH")]
        events: PathBuf,
        #[command(flatten)]
        learn: LearnOpts,
        /// Budget for the escalation cost requirement
        #[arg(long, value_name = "COST", value_parser = args::number, default_value = "3.0")]
        max_c2: num_rational::BigRational,
        /// Lower bound for the mitigation reward requirement
        #[arg(long, value_name = "REWARD", value_parser = args::number)]
        h4_lower_bound: Option<num_rational::BigRational>,
        /// Expression cache; created when missing, rejected when stale
        #[arg(long, value_name = "PATH")]
        cache: Option<PathBuf>,
    },
    /// Seeded episodes under a ground truth; JSON-lines traces
    Simulate {
        #[command(flatten)]
        model: ModelOpts,
        /// Ground-truth value of a free parameter (repeatable)
        #[arg(long = "truth", value_name = "NAME=VALUE", value_parser = args::assign)]
        truth: Vec<Assign>,
        #[arg(long, default_value_t = 1000)]
        episodes: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decay rate of the completion reward
        #[arg(long, default_value_t = 0.5)]
        decay: f64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
        /// Learn, monitor and intervene between episodes
        #[arg(long)]
        closed_loop: bool,
        /// Closed loop without interventions
        #[arg(long)]
        no_effects: bool,
        #[command(flatten)]
        learn: LearnOpts,
        /// Per-episode summary CSV
        #[arg(long, value_name = "PATH")]
        summary: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { model } => commands::validate(&model.model(), model.out.as_deref()),
        Command::Symbolic {
            model,
            query,
            order,
            term_cap,
            format,
        } => commands::symbolic(
            &model.model(),
            query.property.as_deref(),
            query.target.as_deref(),
            order,
            term_cap,
            format,
            model.out.as_deref(),
        ),
        Command::Check {
            model,
            query,
            iterate,
            tolerance,
        } => {
            let opts = NumericOptions {
                method: if iterate {
                    NumericMethod::ValueIteration
                } else {
                    NumericMethod::LinearSolve
                },
                tolerance,
                ..NumericOptions::default()
            };
            commands::check(
                &model.model(),
                query.property.as_deref(),
                query.target.as_deref(),
                opts,
                model.out.as_deref(),
            )
        }
        Command::Sweep {
            model,
            x,
            y,
            resolution,
            quantity,
            target,
        } => {
            let spec = commands::SweepSpec {
                x: &x,
                y: &y,
                resolution,
                quantity,
                target: target.as_deref(),
            };
            commands::sweep(&model.model(), &spec, model.out.as_deref())
        }
        Command::Monitor {
            model,
            events,
            learn,
            max_c2,
            h4_lower_bound,
            cache,
        } => {
            let config = MonitorConfig {
                max_c2,
                h4_lower_bound,
                ..MonitorConfig::default()
            };
            let a = commands::MonitorArgs {
                events: &events,
                learning: learn.learning(),
                config,
                cache: cache.as_deref(),
            };
            commands::monitor(&model.model(), &a, model.out.as_deref())
        }
        Command::Simulate {
            model,
            truth,
            episodes,
            seed,
            decay,
            max_steps,
            closed_loop,
            no_effects,
            learn,
            summary,
        } => {
            let a = commands::SimulateArgs {
                truth: &truth,
                episodes,
                seed,
                decay_rate: decay,
                max_steps,
                closed_loop,
                no_effects,
                learning: learn.learning(),
                summary: summary.as_deref(),
            };
            commands::simulate(&model.model(), &a, model.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("radcheck: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
