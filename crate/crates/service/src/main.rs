use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trains_core::corpus::synth::domain_utterances;
use trains_core::corpus::{tokenize, Channel, Token};
use trains_core::grammar::Grammar;
use trains_core::session::Resources;
use trains_core::speechpp::{ChannelConfig, EvalSettings};
use trains_service::commands::{self, ReplayOptions};
use trains_service::config::load_corrector;
use trains_service::{Config, ServiceError, CONFIG_ENV};

#[derive(Parser)]
#[command(name = "trains", version, about = "Route-planning dialogue tools and session service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a bigram language model on the REF side of a corpus.
    TrainLm {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        discount: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a channel model on the aligned pairs of a corpus.
    TrainChannel {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        smoothing: Option<f64>,
        #[arg(long)]
        self_floor: Option<f64>,
        #[arg(long)]
        unk_penalty: Option<f64>,
        #[arg(long)]
        no_fertility: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Post-correct recognizer output (arguments, else stdin lines).
    Correct {
        #[command(flatten)]
        models: Models,
        text: Vec<String>,
    },
    /// Show the speech acts found in each line.
    Parse {
        #[arg(long)]
        grammar: Option<PathBuf>,
        text: Vec<String>,
    },
    /// Replay a transcript and print the evaluation report.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        /// Built-in scenario name or scenario file.
        #[arg(long, default_value = "trains95")]
        scenario: String,
        #[arg(long, default_value = "keyboard")]
        channel: Channel,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        models: Models,
        /// Include every turn record.
        #[arg(long)]
        turn_log: bool,
    },
    /// Build a REF/HYP corpus by corrupting utterances.
    Corrupt {
        /// One utterance per line.
        #[arg(long, conflicts_with = "synthetic")]
        input: Option<PathBuf>,
        /// Draw this many in-domain utterances instead.
        #[arg(long)]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        wer: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learning curve of post-correction over training fractions.
    EvalCurve {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 0.25)]
        holdout: f64,
        #[arg(long, default_value_t = 10)]
        resamples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        beam_width: usize,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct Models {
    #[arg(long)]
    lm: Option<PathBuf>,
    #[arg(long)]
    channel_model: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    beam_width: usize,
}

/// Flags override the config file, which overrides the defaults.
#[derive(Args)]
struct ServeArgs {
    /// Config file; falls back to the path in the environment.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long)]
    bind: Option<String>,
    #[arg(long)]
    lm: Option<PathBuf>,
    #[arg(long)]
    channel_model: Option<PathBuf>,
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    scenario_dir: Option<PathBuf>,
    #[arg(long)]
    event_buffer: Option<usize>,
}

impl ServeArgs {
    fn into_config(self) -> Result<Config, ServiceError> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        macro_rules! flag {
            ($($f:ident),*) => {$(
                if let Some(v) = self.$f { c.$f = v.into(); }
            )*};
        }
        flag!(bind, beam_width, event_buffer, lm, channel_model, map, grammar, rules, templates, scenario_dir);
        Ok(c)
    }
}

fn input_lines(args: Vec<String>) -> io::Result<Vec<String>> {
    if !args.is_empty() {
        return Ok(vec![args.join(" ")]);
    }
    io::stdin().lock().lines().collect()
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ServiceError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| ServiceError::Io {
            path: p.to_path_buf(),
            source,
        }),
        // A closed pipe (`| head`) is not an error worth reporting.
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(ServiceError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

fn stdin_error(source: io::Error) -> ServiceError {
    ServiceError::Io {
        path: "<stdin>".into(),
        source,
    }
}

fn run(cli: Cli) -> Result<(), ServiceError> {
    match cli.command {
        Command::TrainLm { corpus, discount, out } => emit(&commands::train_lm(&corpus, discount)?, out.as_deref()),
        Command::TrainChannel {
            corpus,
            smoothing,
            self_floor,
            unk_penalty,
            no_fertility,
            out,
        } => {
            let d = ChannelConfig::default();
            let config = ChannelConfig {
                smoothing: smoothing.unwrap_or(d.smoothing),
                self_floor: self_floor.unwrap_or(d.self_floor),
                unk_penalty: unk_penalty.unwrap_or(d.unk_penalty),
                fertility: !no_fertility,
            };
            emit(&commands::train_channel(&corpus, config)?, out.as_deref())
        }
        Command::Correct { models, text } => {
            let c = load_corrector(models.lm.as_deref(), models.channel_model.as_deref(), models.beam_width)?;
            let lines = input_lines(text).map_err(stdin_error)?;
            emit(&commands::correct(&c, &lines)?, None)
        }
        Command::Parse { grammar, text } => {
            let g = match grammar {
                Some(p) => Grammar::load(p).map_err(|e| ServiceError::Config(e.to_string()))?,
                None => Grammar::fixture(),
            };
            let lines = input_lines(text).map_err(stdin_error)?;
            emit(&commands::parse(&g, &lines), None)
        }
        Command::Replay {
            transcript,
            scenario,
            channel,
            seed,
            models,
            turn_log,
        } => {
            let mut resources = Resources::fixture();
            if channel == Channel::Speech {
                resources = resources.with_corrector(load_corrector(
                    models.lm.as_deref(),
                    models.channel_model.as_deref(),
                    models.beam_width,
                )?);
            }
            let opts = ReplayOptions {
                scenario: &scenario,
                transcript: &transcript,
                channel,
                seed,
                turn_log,
            };
            emit(&(commands::replay(&resources, &opts)? + "\n"), None)?;
            Ok(())
        }
        Command::Corrupt {
            input,
            synthetic,
            wer,
            seed,
            out,
        } => {
            let utterances: Vec<Vec<Token>> = match (input, synthetic) {
                (Some(p), _) => fs::read_to_string(&p)
                    .map_err(|source| ServiceError::Io { path: p, source })?
                    .lines()
                    .map(tokenize)
                    .filter(|t| !t.is_empty())
                    .collect(),
                (None, Some(n)) => domain_utterances(n, &mut ChaCha8Rng::seed_from_u64(seed))
                    .into_iter()
                    .map(|u| u.tokens)
                    .collect(),
                (None, None) => return Err(ServiceError::Config("corrupt needs --input or --synthetic".into())),
            };
            emit(&commands::corrupt(&utterances, wer, seed)?, out.as_deref())
        }
        Command::EvalCurve {
            corpus,
            fractions,
            holdout,
            resamples,
            seed,
            beam_width,
        } => {
            let settings = EvalSettings {
                beam_width,
                ..EvalSettings::default()
            };
            emit(
                &commands::eval_curve(&corpus, holdout, &fractions, resamples, seed, &settings)?,
                None,
            )
        }
        Command::Serve(args) => {
            let config = args.into_config()?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::Config(e.to_string()))?;
            rt.block_on(trains_service::app::serve(&config))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
