mod manifest;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bvsp_core::aggregation::{default_tau, AggregationStrategy};
use bvsp_core::data::{self, category_histogram, parse_buckets, Format, STATS_HEADER};
use bvsp_core::evaluation::{evaluate_with, Averaging};
use bvsp_core::fewshot::{run_episodes, sample_episodes, Episode};
use bvsp_core::pipeline::{
    aggregate_records, episode_split, predict_all, run_pipeline, select_templates, to_jsonl,
    PipelineConfig, PipelineOutput, PredictionRecord,
};
use bvsp_core::predict::{parse_prediction, Generator, LexiconGenerator};
use bvsp_core::quad::{project, Dataset, LabeledSentence, SentimentQuad};
use bvsp_core::scoring::{ReferenceScorer, RemoteConfig, RemoteScorer, Scorer};
use bvsp_core::selection::SelectionStrategy;
use bvsp_core::template::{find_template, list_templates};

use manifest::{write_manifest, write_output};

/// Line to stdout. A closed pipe ends the process quietly.
macro_rules! outln {
    ($($arg:tt)*) => {
        emit(format_args!($($arg)*))
    };
}

fn emit(args: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_fmt(args).and_then(|_| out.write_all(b"\n")) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing to stdout: {e}");
        std::process::exit(1);
    }
}

#[derive(Parser)]
#[command(
    name = "bvsp",
    version,
    about = "Multi-template aspect sentiment quad prediction"
)]
struct Cli {
    /// Worker threads for scoring and prediction (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the template registry.
    Templates(TemplatesArgs),
    /// Render quads into a target sequence.
    Render(RenderArgs),
    /// Parse generated text back into quads.
    Parse(ParseArgs),
    /// Build the template correlation matrix on a support set and select templates.
    Select(SelectArgs),
    /// Run templates on query sentences and write per-template predictions.
    Predict(PredictArgs),
    /// Aggregate per-template predictions.
    Vote(VoteArgs),
    /// Score predictions against gold annotations.
    Eval(EvalArgs),
    /// Sample k-shot episodes from a pool.
    Episodes(EpisodesArgs),
    /// Run the full pipeline on every episode and average the results.
    Run(RunArgs),
    /// Corpus statistics.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TableFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DataFormat {
    QuadLines,
    Jsonl,
}

impl From<DataFormat> for Format {
    fn from(f: DataFormat) -> Self {
        match f {
            DataFormat::QuadLines => Format::QuadLines,
            DataFormat::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScorerKind {
    Reference,
    Remote,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SelectionArg {
    JsMin,
    JsMax,
    EntropyMin,
    EntropyMax,
    Random,
}

impl From<SelectionArg> for SelectionStrategy {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::JsMin => SelectionStrategy::JsMin,
            SelectionArg::JsMax => SelectionStrategy::JsMax,
            SelectionArg::EntropyMin => SelectionStrategy::EntropyMin,
            SelectionArg::EntropyMax => SelectionStrategy::EntropyMax,
            SelectionArg::Random => SelectionStrategy::Random,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AggregationArg {
    Vote,
    Rank,
    Rand,
}

impl From<AggregationArg> for AggregationStrategy {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Vote => AggregationStrategy::Vote,
            AggregationArg::Rank => AggregationStrategy::Rank,
            AggregationArg::Rand => AggregationStrategy::Rand,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AverageArg {
    Micro,
    Macro,
}

impl From<AverageArg> for Averaging {
    fn from(a: AverageArg) -> Self {
        match a {
            AverageArg::Micro => Averaging::Micro,
            AverageArg::Macro => Averaging::Macro,
        }
    }
}

#[derive(Args, Clone, Serialize)]
struct ScorerArgs {
    #[arg(long, value_enum, default_value = "reference")]
    scorer: ScorerKind,
    /// Base URL of the scoring service.
    #[arg(long, env = "BVSP_ENDPOINT")]
    endpoint: Option<String>,
    /// Request timeout in milliseconds for the remote scorer.
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,
    /// Allowed deviation from 1 of remote distributions.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
}

enum Backend {
    Reference(ReferenceScorer),
    Remote(RemoteScorer),
}

impl ScorerArgs {
    fn backend(&self, seed: u64) -> Result<Backend> {
        Ok(match self.scorer {
            ScorerKind::Reference => Backend::Reference(ReferenceScorer::new(seed)),
            ScorerKind::Remote => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| anyhow!("--scorer remote needs --endpoint or BVSP_ENDPOINT"))?;
                let mut cfg = RemoteConfig::new(endpoint);
                cfg.timeout = Duration::from_millis(self.timeout_ms);
                cfg.tolerance = self.tolerance;
                Backend::Remote(RemoteScorer::new(cfg))
            }
        })
    }
}

impl Backend {
    fn scorer(&self) -> &dyn Scorer {
        match self {
            Backend::Reference(s) => s,
            Backend::Remote(s) => s,
        }
    }

    fn generator(&self, support: &[LabeledSentence], seed: u64) -> Box<dyn Generator + '_> {
        match self {
            Backend::Reference(_) => Box::new(LexiconGenerator::fit(support, seed)),
            Backend::Remote(s) => Box::new(s),
        }
    }
}

#[derive(Args)]
struct TemplatesArgs {
    #[arg(long, value_enum, default_value = "tsv")]
    format: TableFormat,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    template: String,
    /// JSON list of quads, e.g. '[{"at":"room","ot":"clean","ac":"room_overall","sp":"positive"}]'.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    quads: Option<String>,
    /// Render the gold quads of every sentence in this file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "quad-lines")]
    format: DataFormat,
    /// Print the rendered target with element and separator spans as JSON.
    #[arg(long)]
    spans: bool,
}

#[derive(Args)]
struct ParseArgs {
    #[arg(long)]
    template: String,
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    text: Option<String>,
    /// One generated sequence per line.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SelectArgs {
    #[arg(long)]
    support: PathBuf,
    #[arg(long, value_enum, default_value = "quad-lines")]
    format: DataFormat,
    #[arg(long, default_value_t = 3, value_parser = positive)]
    k_templates: usize,
    #[arg(long, value_enum, default_value = "js-min")]
    strategy: SelectionArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    scorer: ScorerArgs,
    /// Matrix TSV output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct PredictArgs {
    /// Labeled support set used for template selection and generator fitting.
    #[arg(long)]
    support: PathBuf,
    /// Query sentences.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "quad-lines")]
    format: DataFormat,
    #[arg(long, default_value_t = 3, value_parser = positive)]
    k_templates: usize,
    /// Explicit comma-separated template ids instead of selection.
    #[arg(long, value_delimiter = ',')]
    templates: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "js-min")]
    strategy: SelectionArg,
    /// Also score each output so that rank aggregation can be used later.
    #[arg(long)]
    perplexity: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    scorer: ScorerArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct VoteArgs {
    /// Per-template predictions (JSON lines of sentence_id, template_id, quads).
    #[arg(long = "in")]
    input: PathBuf,
    /// Minimum number of templates that must agree; defaults to a majority.
    #[arg(long, value_parser = positive)]
    tau: Option<usize>,
    #[arg(long, value_enum, default_value = "vote")]
    strategy: AggregationArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, value_enum, default_value = "quad-lines")]
    gold_format: DataFormat,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pred_format: DataFormat,
    #[arg(long, value_enum, default_value = "micro")]
    average: AverageArg,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args, Serialize)]
struct EpisodesArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "quad-lines")]
    format: DataFormat,
    #[arg(long, value_parser = positive)]
    shots: usize,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    runs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct RunArgs {
    /// Episode pool.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "quad-lines")]
    format: DataFormat,
    /// Episodes from `bvsp episodes`; sampled from --shots/--runs/--seed otherwise.
    #[arg(long, conflicts_with = "shots")]
    episodes: Option<PathBuf>,
    #[arg(long, required_unless_present = "episodes", value_parser = positive)]
    shots: Option<usize>,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    runs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 3, value_parser = positive)]
    k_templates: usize,
    #[arg(long, value_parser = positive)]
    tau: Option<usize>,
    #[arg(long, value_enum, default_value = "js-min")]
    selection: SelectionArg,
    #[arg(long, value_enum, default_value = "vote")]
    aggregation: AggregationArg,
    #[arg(long, value_enum, default_value = "micro")]
    average: AverageArg,
    #[command(flatten)]
    #[serde(flatten)]
    scorer: ScorerArgs,
    #[arg(long, default_value = "bvsp-run")]
    out_dir: PathBuf,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "quad-lines")]
    format: DataFormat,
    /// Category histogram buckets such as `1-50,51-100,101-`.
    #[arg(long)]
    buckets: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn load(path: &Path, format: DataFormat) -> Result<Dataset> {
    data::load(path, format.into()).with_context(|| format!("loading {}", path.display()))
}

fn read_records(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect()
}

fn templates(args: TemplatesArgs) -> Result<()> {
    let example = project(
        &SentimentQuad::new(
            bvsp_core::Term::Explicit("room".into()),
            bvsp_core::Term::Explicit("clean".into()),
            "room_overall",
            bvsp_core::Polarity::Positive,
        )
        .expect("valid quad"),
    );
    match args.format {
        TableFormat::Tsv => {
            outln!("id\tkind\telement_order\texample");
            for t in list_templates() {
                let rendered = t.render(std::slice::from_ref(&example))?;
                outln!(
                    "{}\t{}\t{}\t{}",
                    t.id,
                    t.kind,
                    t.element_order_string(),
                    rendered.text
                );
            }
        }
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                id: &'a str,
                kind: String,
                element_order: String,
                linking_literals: &'a [String; 5],
                example: String,
            }
            for t in list_templates() {
                let row = Row {
                    id: &t.id,
                    kind: t.kind.to_string(),
                    element_order: t.element_order_string(),
                    linking_literals: &t.linking_literals,
                    example: t.render(std::slice::from_ref(&example))?.text,
                };
                outln!("{}", serde_json::to_string(&row)?);
            }
        }
    }
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let template = find_template(&args.template)?;
    let sentences: Vec<(String, Vec<SentimentQuad>)> = match (&args.quads, &args.data) {
        (Some(json), _) => {
            let quads: Vec<SentimentQuad> =
                serde_json::from_str(json).context("parsing --quads")?;
            vec![(String::new(), quads)]
        }
        (None, Some(path)) => load(path, args.format)?
            .sentences
            .into_iter()
            .map(|s| (s.id, s.quads))
            .collect(),
        (None, None) => unreachable!("clap requires one of --quads and --data"),
    };
    let single = args.quads.is_some();
    for (id, quads) in sentences {
        let surfaces: Vec<_> = quads.iter().map(project).collect();
        let target = template.render(&surfaces)?;
        let line = if args.spans {
            serde_json::to_string(&target)?
        } else {
            target.text
        };
        if single {
            outln!("{line}");
        } else {
            outln!("{id}\t{line}");
        }
    }
    Ok(())
}

fn parse(args: ParseArgs) -> Result<()> {
    let template = find_template(&args.template)?;
    let lines: Vec<String> = match (&args.text, &args.input) {
        (Some(t), _) => vec![t.clone()],
        (None, Some(p)) => fs::read_to_string(p)?.lines().map(str::to_string).collect(),
        (None, None) => unreachable!("clap requires one of --text and --in"),
    };
    #[derive(Serialize)]
    struct Parsed {
        quads: Vec<SentimentQuad>,
        malformed: usize,
    }
    for line in lines {
        let (quads, malformed) = parse_prediction(template, &line);
        outln!("{}", serde_json::to_string(&Parsed { quads, malformed })?);
    }
    Ok(())
}

fn select(args: SelectArgs) -> Result<()> {
    let support = load(&args.support, args.format)?;
    let backend = args.scorer.backend(args.seed)?;
    let outcome = select_templates(
        &support.sentences,
        backend.scorer(),
        args.k_templates,
        args.strategy.into(),
        args.seed,
    )?;
    write_output(&args.out, &outcome.matrix.to_tsv())?;
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a SelectArgs,
        selected: &'a [String],
        instances: usize,
        skipped_instances: usize,
    }
    let config = Config {
        args: &args,
        selected: &outcome.selected,
        instances: outcome.matrix.instances,
        skipped_instances: outcome.matrix.skipped_instances,
    };
    write_manifest(&args.out, "select", &config, &[&args.support])?;
    for id in &outcome.selected {
        outln!("{id}");
    }
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    let support = load(&args.support, args.format)?;
    let query = load(&args.data, args.format)?;
    let backend = args.scorer.backend(args.seed)?;
    let template_ids = match &args.templates {
        Some(ids) => {
            for id in ids {
                find_template(id)?;
            }
            ids.clone()
        }
        None => {
            select_templates(
                &support.sentences,
                backend.scorer(),
                args.k_templates,
                args.strategy.into(),
                args.seed,
            )?
            .selected
        }
    };
    let generator = backend.generator(&support.sentences, args.seed);
    let scorer = args.perplexity.then(|| backend.scorer());
    let records = predict_all(&query.sentences, &template_ids, &generator, scorer)?;
    write_output(&args.out, &to_jsonl(&records))?;
    write_manifest(&args.out, "predict", &args, &[&args.support, &args.data])?;
    Ok(())
}

fn vote(args: VoteArgs) -> Result<()> {
    let records = read_records(&args.input)?;
    let k = records
        .iter()
        .map(|r| r.template_id.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    let tau = args.tau.unwrap_or_else(|| default_tau(k));
    let finals = aggregate_records(&records, args.strategy.into(), tau, args.seed)?;
    let rows: Vec<LabeledSentence> = finals
        .into_iter()
        .map(|(id, quads)| LabeledSentence {
            id,
            text: String::new(),
            quads,
        })
        .collect();
    let text: String = rows
        .iter()
        .map(|s| data::format_json_line(s) + "\n")
        .collect();
    write_output(&args.out, &text)?;
    write_manifest(&args.out, "vote", &args, &[&args.input])?;
    Ok(())
}

fn annotated(d: &Dataset) -> Vec<(String, Vec<SentimentQuad>)> {
    d.sentences
        .iter()
        .map(|s| (s.id.clone(), s.quads.clone()))
        .collect()
}

fn eval(args: EvalArgs) -> Result<()> {
    let gold = load(&args.gold, args.gold_format)?;
    let pred = load(&args.pred, args.pred_format)?;
    let report = evaluate_with(&annotated(&gold), &annotated(&pred), args.average.into())?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_output(&args.report, &text)?;
    write_manifest(&args.report, "eval", &args, &[&args.gold, &args.pred])?;
    outln!(
        "precision {:.6}  recall {:.6}  f1 {:.6}",
        report.quad.precision,
        report.quad.recall,
        report.quad.f1
    );
    Ok(())
}

fn episodes(args: EpisodesArgs) -> Result<()> {
    let pool = load(&args.data, args.format)?;
    let eps = sample_episodes(&pool, args.shots, args.runs, args.seed)?;
    let mut text = serde_json::to_string_pretty(&eps)?;
    text.push('\n');
    write_output(&args.out, &text)?;
    write_manifest(&args.out, "episodes", &args, &[&args.data])?;
    Ok(())
}

fn write_run(dir: &Path, out: &PipelineOutput) -> Result<()> {
    write_output(&dir.join("matrix.tsv"), &out.selection.matrix.to_tsv())?;
    write_output(
        &dir.join("selected.txt"),
        &(out.selection.selected.join("\n") + "\n"),
    )?;
    write_output(&dir.join("predictions.jsonl"), &to_jsonl(&out.predictions))?;
    let finals: String = out
        .final_predictions
        .iter()
        .map(|s| data::format_json_line(s) + "\n")
        .collect();
    write_output(&dir.join("final.jsonl"), &finals)?;
    write_output(
        &dir.join("report.json"),
        &(serde_json::to_string_pretty(&out.report)? + "\n"),
    )
}

fn run(args: RunArgs) -> Result<()> {
    let pool = load(&args.data, args.format)?;
    let mut inputs: Vec<&Path> = vec![&args.data];
    let episodes: Vec<Episode> = match &args.episodes {
        Some(path) => {
            inputs.push(path);
            let text = fs::read_to_string(path)?;
            let eps: Vec<Episode> = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            for ep in &eps {
                for id in ep.support_ids.iter().chain(&ep.query_ids) {
                    if pool.get(id).is_none() {
                        bail!("episode id {id:?} is not in {}", args.data.display());
                    }
                }
            }
            eps
        }
        None => sample_episodes(
            &pool,
            args.shots.expect("clap enforces --shots"),
            args.runs,
            args.seed,
        )?,
    };

    let mut index = 0;
    let summary = run_episodes(&episodes, |ep| -> Result<_> {
        index += 1;
        let (support, query) = episode_split(&pool, ep);
        let config = PipelineConfig {
            k_templates: args.k_templates,
            tau: args.tau,
            selection: args.selection.into(),
            aggregation: args.aggregation.into(),
            averaging: args.average.into(),
            seed: ep.seed,
        };
        let backend = args.scorer.backend(ep.seed)?;
        let generator = backend.generator(&support, ep.seed);
        let out = run_pipeline(&support, &query, &config, backend.scorer(), &*generator)?;
        write_run(&args.out_dir.join(format!("run-{index}")), &out)?;
        Ok(out.report)
    })?;

    let summary_path = args.out_dir.join("summary.json");
    write_output(
        &summary_path,
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    write_manifest(&summary_path, "run", &args, &inputs)?;
    for (name, s) in &summary.summary {
        if matches!(name.as_str(), "precision" | "recall" | "f1") {
            outln!("{name}\t{:.6}\t{:.6}", s.mean, s.std);
        }
    }
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let d = load(&args.data, args.format)?;
    let s = data::stats(&d)?;
    let mut text = format!("{STATS_HEADER}\n{}\n", s.tsv_row());
    if let Some(spec) = &args.buckets {
        let buckets = parse_buckets(spec)?;
        let counts = category_histogram(&d, &buckets)?;
        text.push_str("\nbucket\tcategories\n");
        for ((lo, hi), n) in buckets.iter().zip(counts) {
            let hi = hi.map_or(String::new(), |h| h.to_string());
            text.push_str(&format!("{lo}-{hi}\t{n}\n"));
        }
    }
    match &args.out {
        Some(path) => {
            write_output(path, &text)?;
            write_manifest(path, "stats", &args, &[&args.data])?;
        }
        None => outln!("{}", text.trim_end_matches('\n')),
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Templates(a) => templates(a),
        Command::Render(a) => render(a),
        Command::Parse(a) => parse(a),
        Command::Select(a) => select(a),
        Command::Predict(a) => predict(a),
        Command::Vote(a) => vote(a),
        Command::Eval(a) => eval(a),
        Command::Episodes(a) => episodes(a),
        Command::Run(a) => run(a),
        Command::Stats(a) => stats(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| dispatch(cli.command))),
        None => dispatch(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
