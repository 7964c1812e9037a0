use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ltp_core::eval_harness::{
    cmd_evaluate, cmd_extract_metadata, cmd_fuse, cmd_lanewidths, cmd_report, cmd_train_toy, render_table, EmbedSpec,
    EvaluateArgs, ExtractArgs, FuseArgs, FuseVariant, LaneWidthArgs, LlmSpec, RunConfig, TrainToyArgs,
    DEFAULT_CHUNK_CHARS, DEFAULT_CHUNK_OVERLAP, DEFAULT_PARALLELISM,
};
use ltp_core::topo_metrics::MetricConfig;

/// Language priors for lane-topology prediction: metadata extraction,
/// lane-width retrieval, embedding fusion and evaluation.
#[derive(Parser)]
#[command(name = "ltp", version)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default 4).
    #[arg(short = 'j', long, global = true)]
    parallelism: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EmbedFlags {
    /// `offline` or `remote`.
    #[arg(long)]
    embed: Option<String>,
    #[arg(long)]
    embed_endpoint: Option<String>,
    #[arg(long)]
    embed_model: Option<String>,
    #[arg(long)]
    d_text: Option<usize>,
    /// Disk cache for remote embeddings.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the canonical metadata string of every road.
    ExtractMetadata {
        #[arg(long)]
        osm: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// TOML file with `suffixes = [...]`.
        #[arg(long)]
        suffixes: Option<PathBuf>,
    },
    /// Ask for the lane width of every road.
    Lanewidths {
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[arg(long)]
        manual: Option<PathBuf>,
        /// `remote`, `scripted:<path>` or `table:<path>`.
        #[arg(long)]
        llm: Option<String>,
        #[arg(long)]
        llm_endpoint: Option<String>,
        #[arg(long)]
        llm_model: Option<String>,
        /// OSM extract used to look up road classes.
        #[arg(long)]
        osm: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        chunk_chars: Option<usize>,
        #[arg(long)]
        chunk_overlap: Option<usize>,
        #[arg(long)]
        top_k: Option<usize>,
        #[command(flatten)]
        embed: EmbedFlags,
    },
    /// Fuse text and polyline embeddings per road.
    Fuse {
        /// `eq1`, `eq2` or `eq3`.
        #[arg(long)]
        variant: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[arg(long)]
        osm: Option<PathBuf>,
        #[arg(long)]
        lanewidths: Option<PathBuf>,
        #[arg(long)]
        d_map: Option<usize>,
        #[arg(long)]
        hidden: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the polyline embeddings.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[command(flatten)]
        embed: EmbedFlags,
    },
    /// Score predictions against ground truth.
    Evaluate {
        #[arg(long)]
        gt: Option<PathBuf>,
        #[arg(long)]
        pred: Option<PathBuf>,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `DET_l,DET_t,TOP_ll,TOP_lt`; skips scenario files.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["gt", "pred"])]
        metrics_from_values: Option<Vec<f64>>,
    },
    /// Merge report files into one table.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Recover λ on synthetic data and write parameters and loss curve.
    TrainToy {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        epochs: usize,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda_true: f64,
        #[arg(long)]
        params_out: Option<PathBuf>,
        #[arg(long)]
        loss_out: Option<PathBuf>,
    },
}

fn overlay<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

impl EmbedFlags {
    fn apply(self, cfg: &mut RunConfig) {
        overlay(&mut cfg.embed, self.embed);
        overlay(&mut cfg.embed_endpoint, self.embed_endpoint);
        overlay(&mut cfg.embed_model, self.embed_model);
        overlay(&mut cfg.d_text, self.d_text);
        overlay(&mut cfg.cache_dir, self.cache_dir);
    }
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("--{name} is required (flag or config file)"))
}

fn metric_config(cfg: &RunConfig) -> MetricConfig {
    let mut m = MetricConfig::default();
    if let Some(t) = &cfg.frechet_thresholds {
        m.frechet_thresholds = t.clone();
    }
    if let Some(t) = cfg.topology_threshold {
        m.topology_threshold = t;
    }
    if let Some(t) = cfg.element_iou {
        m.element_iou = t;
    }
    m
}

/// Runs the command; `Ok(true)` means some items only went to a sidecar.
fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    overlay(&mut cfg.parallelism, cli.parallelism);
    let parallelism = cfg.parallelism.unwrap_or(DEFAULT_PARALLELISM);

    match cli.command {
        Command::ExtractMetadata { osm, out, suffixes } => {
            overlay(&mut cfg.osm, osm);
            overlay(&mut cfg.suffixes, suffixes);
            let outcome = cmd_extract_metadata(&ExtractArgs {
                osm: need(cfg.osm, "osm")?,
                out,
                suffixes: cfg.suffixes,
            })?;
            log::info!("{} roads, {} skipped", outcome.records, outcome.skipped.len());
            Ok(!outcome.skipped.is_empty())
        }
        Command::Lanewidths {
            metadata,
            manual,
            llm,
            llm_endpoint,
            llm_model,
            osm,
            out,
            chunk_chars,
            chunk_overlap,
            top_k,
            embed,
        } => {
            overlay(&mut cfg.metadata, metadata);
            overlay(&mut cfg.manual, manual);
            overlay(&mut cfg.llm, llm);
            overlay(&mut cfg.llm_endpoint, llm_endpoint);
            overlay(&mut cfg.llm_model, llm_model);
            overlay(&mut cfg.osm, osm);
            overlay(&mut cfg.chunk_chars, chunk_chars);
            overlay(&mut cfg.chunk_overlap, chunk_overlap);
            overlay(&mut cfg.top_k, top_k);
            embed.apply(&mut cfg);
            cfg.validate()?;
            let mut llm = LlmSpec::parse(&need(cfg.llm.clone(), "llm")?)?;
            if let LlmSpec::Remote { endpoint, model } = &mut llm {
                *endpoint = cfg.llm_endpoint.clone();
                *model = cfg.llm_model.clone();
            }
            let mut args = LaneWidthArgs::new(
                need(cfg.metadata.clone(), "metadata")?,
                need(cfg.manual.clone(), "manual")?,
                llm,
                out,
            );
            args.osm = cfg.osm.clone();
            args.embed = EmbedSpec::from_config(&cfg)?;
            args.chunk_chars = cfg.chunk_chars.unwrap_or(DEFAULT_CHUNK_CHARS);
            args.chunk_overlap = cfg.chunk_overlap.unwrap_or(DEFAULT_CHUNK_OVERLAP);
            args.top_k = cfg.top_k.unwrap_or(args.top_k);
            args.parallelism = parallelism;
            let outcome = cmd_lanewidths(&args)?;
            log::info!("{} answered, {} failed", outcome.answered, outcome.failures.len());
            Ok(!outcome.failures.is_empty())
        }
        Command::Fuse {
            variant,
            params,
            seed,
            lambda,
            metadata,
            osm,
            lanewidths,
            d_map,
            hidden,
            out,
            graph_out,
            embed,
        } => {
            overlay(&mut cfg.params, params);
            overlay(&mut cfg.seed, seed);
            overlay(&mut cfg.lambda, lambda);
            overlay(&mut cfg.metadata, metadata);
            overlay(&mut cfg.osm, osm);
            overlay(&mut cfg.lanewidths, lanewidths);
            overlay(&mut cfg.d_map, d_map);
            overlay(&mut cfg.hidden, hidden);
            embed.apply(&mut cfg);
            cfg.validate()?;
            let variant: FuseVariant = variant.parse()?;
            let mut args = FuseArgs::new(
                variant,
                need(cfg.metadata.clone(), "metadata")?,
                need(cfg.osm.clone(), "osm")?,
                out,
            );
            args.lanewidths = cfg.lanewidths.clone();
            args.params = cfg.params.clone();
            args.seed = cfg.seed.unwrap_or(0);
            args.lambda = cfg.lambda;
            args.d_map = cfg.d_map;
            args.hidden = cfg.hidden;
            args.embed = EmbedSpec::from_config(&cfg)?;
            args.graph_out = graph_out;
            args.parallelism = parallelism;
            let outcome = cmd_fuse(&args)?;
            if !outcome.without_width.is_empty() {
                log::warn!("{} roads fused without a lane width", outcome.without_width.len());
            }
            log::info!("fused {} roads (λ = {})", outcome.roads, outcome.params.lambda);
            Ok(false)
        }
        Command::Evaluate {
            gt,
            pred,
            label,
            out,
            metrics_from_values,
        } => {
            overlay(&mut cfg.gt, gt);
            overlay(&mut cfg.pred, pred);
            overlay(&mut cfg.label, label);
            let label = cfg.label.clone().unwrap_or_default();
            let args = match metrics_from_values {
                Some(v) => {
                    let values: [f64; 4] = v
                        .try_into()
                        .map_err(|_| anyhow!("--metrics-from-values takes 4 numbers"))?;
                    EvaluateArgs::Values { label, values, out }
                }
                None => EvaluateArgs::Files {
                    gt: need(cfg.gt.clone(), "gt")?,
                    pred: need(cfg.pred.clone(), "pred")?,
                    label,
                    out,
                    metrics: metric_config(&cfg),
                    parallelism,
                },
            };
            let report = cmd_evaluate(&args)?;
            print!("{}", render_table(std::slice::from_ref(&report)));
            Ok(false)
        }
        Command::Report { files } => {
            print!("{}", cmd_report(&files)?);
            Ok(false)
        }
        Command::TrainToy {
            seed,
            epochs,
            lr,
            lambda_true,
            params_out,
            loss_out,
        } => {
            if !lr.is_finite() || lr <= 0.0 {
                bail!("--lr must be positive");
            }
            let outcome = cmd_train_toy(&TrainToyArgs {
                seed,
                epochs,
                learning_rate: lr,
                lambda_true,
                params_out,
                loss_out,
                ..TrainToyArgs::default()
            })
            .context("toy training")?;
            println!("lambda={} final_loss={}", outcome.params.lambda, outcome.final_loss);
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors count as fatal input errors; 2 is reserved for partial runs.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
