//! `gistvis`: augment documents with word-scale visualizations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gistvis::annotator::{annotate, AnnotationMode};
use gistvis::discoverer::segment_llm;
use gistvis::document::{from_interchange, to_interchange, ARTIFACT_EXTENSION};
use gistvis::eval::{run_annotator_eval, run_discoverer_eval, AnnotatedCorpus, LlmSegmenter, RegexSegmenter, Segmenter};
use gistvis::extractor::extract;
use gistvis::llm::Gateway;
use gistvis::pipeline::{
    build_gateway, emit_html, parse_source, BackendConfig, BackendKind, FileConfig, InputFormat, Pipeline, PipelineConfig,
    SourceDocument,
};
use gistvis::prompts::PromptLibrary;
use gistvis::visualizer::RenderConfig;
use gistvis::{AugmentedDocument, InsightType};

const EXIT_CONFIG: u8 = 1;
const EXIT_EXHAUSTED: u8 = 2;

#[derive(Parser)]
#[command(name = "gistvis", version, about = "Augment data-rich text with word-scale visualizations")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write `<name>.gist.json` and `<name>.html`.
    Augment {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the unit segments of every paragraph as JSON.
    Segment {
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print segments with their insight types as JSON.
    Annotate {
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print extracted facts (no visualizations) as an artifact.
    Extract {
        input: PathBuf,
        /// Treat the whole input as one segment of this type.
        #[arg(long = "type")]
        insight_type: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-emit HTML from an existing artifact without model calls.
    Render {
        artifact: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a stage against an annotated corpus.
    Eval {
        #[command(subcommand)]
        target: EvalTarget,
    },
}

#[derive(Subcommand)]
enum EvalTarget {
    Discoverer {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated: regex, llm.
        #[arg(long, default_value = "regex", value_delimiter = ',')]
        strategy: Vec<Strategy>,
        /// Machine-readable JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    Annotator {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "two_step")]
        mode: AnnotationMode,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Regex,
    Llm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Live,
    Scripted,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Defaults to `scripted` when --script is given, otherwise `live`.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Scripted responses (JSON).
    #[arg(long)]
    script: Option<PathBuf>,
    /// Base URL of a chat-completion API.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Directory with template overrides.
    #[arg(long)]
    prompts: Option<PathBuf>,
    /// Maximum requests per second.
    #[arg(long)]
    rate_limit: Option<f64>,
    /// Paragraphs processed in parallel.
    #[arg(long)]
    concurrency: Option<usize>,
    /// Single seven-way annotation instead of checkers plus moderator.
    #[arg(long)]
    one_step: bool,
    #[arg(long)]
    max_rank: Option<u32>,
    /// Prefer icon variants where one exists.
    #[arg(long)]
    prefer_icons: bool,
}

struct Runtime {
    gateway: Gateway,
    prompts: PromptLibrary,
    config: PipelineConfig,
}

impl RunArgs {
    fn runtime(&self) -> Result<Runtime> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let script = self.script.clone().or(file.script);
        let kind = match (self.backend, file.backend) {
            (Some(Backend::Live), _) => BackendKind::Live,
            (Some(Backend::Scripted), _) => BackendKind::Scripted,
            (None, Some(k)) => k,
            (None, None) if script.is_some() => BackendKind::Scripted,
            (None, None) => BackendKind::Live,
        };
        let backend = match kind {
            BackendKind::Scripted => BackendConfig::Scripted { script: script.context("the scripted backend needs --script")? },
            BackendKind::Live => BackendConfig::LiveHttp {
                endpoint: self.endpoint.clone().or(file.endpoint).context("the live backend needs --endpoint")?,
                model: self.model.clone().or(file.model).context("the live backend needs --model")?,
            },
        };
        let cache_dir = self.cache_dir.clone().or(file.cache_dir);
        let gateway = build_gateway(&backend, cache_dir.as_deref(), self.rate_limit.or(file.rate_limit))?;
        let prompts = match self.prompts.clone().or(file.prompts_dir) {
            Some(dir) => PromptLibrary::with_overrides(&dir)?,
            None => PromptLibrary::builtin(),
        };
        let mut render = RenderConfig::default();
        if let Some(r) = self.max_rank.or(file.max_rank) {
            render.max_rank = r;
        }
        render.prefer_icons = self.prefer_icons || file.prefer_icons.unwrap_or(false);
        let one_step = self.one_step || file.one_step.unwrap_or(false);
        let concurrency = self.concurrency.or(file.concurrency).unwrap_or(4);
        if concurrency == 0 {
            bail!("--concurrency must be at least 1");
        }
        let config = PipelineConfig {
            mode: if one_step { AnnotationMode::OneStep } else { AnnotationMode::TwoStep },
            concurrency,
            render,
        };
        Ok(Runtime { gateway, prompts, config })
    }
}

fn read_source(path: &Path) -> Result<SourceDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_source(&text, InputFormat::from_path(path)))
}

fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("document");
    let name = name.strip_suffix(&format!(".{ARTIFACT_EXTENSION}")).unwrap_or(name);
    Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or("document").to_string()
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn augment(input: &Path, out: &Path, run: &RunArgs) -> Result<u8> {
    let source = read_source(input)?;
    let rt = run.runtime()?;
    let pipeline = Pipeline::new(&rt.gateway, &rt.prompts, rt.config.clone())?;
    let (doc, summary) = pipeline.augment::<f64>(&source)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let name = stem(input);
    let artifact = out.join(format!("{name}.{ARTIFACT_EXTENSION}"));
    write(&artifact, &to_interchange(&doc)?)?;
    write(&out.join(format!("{name}.html")), &emit_html(&doc))?;
    eprintln!(
        "{}: {} paragraphs, {} segments, {} data facts, {} fallbacks, {} flagged",
        artifact.display(),
        summary.paragraphs,
        summary.segments,
        summary.data_facts,
        summary.fallbacks,
        summary.flagged_segments
    );
    if summary.exhausted {
        eprintln!("warning: the backend ran out of retries; affected facts were degraded");
        return Ok(EXIT_EXHAUSTED);
    }
    Ok(0)
}

fn segment(input: &Path, run: &RunArgs) -> Result<u8> {
    let source = read_source(input)?;
    let rt = run.runtime()?;
    let mut paragraphs = Vec::new();
    for block in &source.blocks {
        match segment_llm(&block.text, &rt.gateway, &rt.prompts) {
            Ok(seg) => paragraphs.push(json!({ "spans": seg.spans, "flags": seg.flags })),
            Err(e) if e.is_exhaustion() => {
                eprintln!("error: {e}");
                return Ok(EXIT_EXHAUSTED);
            }
            Err(e) => bail!(e),
        }
    }
    print_json(&json!(paragraphs));
    Ok(0)
}

fn annotate_cmd(input: &Path, run: &RunArgs) -> Result<u8> {
    let source = read_source(input)?;
    let rt = run.runtime()?;
    let mut exhausted = false;
    let mut paragraphs = Vec::new();
    for block in &source.blocks {
        let seg = match segment_llm(&block.text, &rt.gateway, &rt.prompts) {
            Ok(seg) => seg,
            Err(e) if e.is_exhaustion() => {
                eprintln!("error: {e}");
                return Ok(EXIT_EXHAUSTED);
            }
            Err(e) => bail!(e),
        };
        let rows: Vec<_> = seg
            .spans
            .iter()
            .map(|s| {
                let a = annotate(&s.text, rt.config.mode, &rt.gateway, &rt.prompts);
                exhausted |= a.exhausted;
                json!({ "text": s.text, "type": a.final_type, "candidates": a.candidates, "flags": a.flags })
            })
            .collect();
        paragraphs.push(json!(rows));
    }
    print_json(&json!(paragraphs));
    Ok(if exhausted { EXIT_EXHAUSTED } else { 0 })
}

fn extract_cmd(input: &Path, insight_type: Option<&str>, run: &RunArgs) -> Result<u8> {
    let rt = run.runtime()?;
    let (doc, exhausted) = match insight_type {
        Some(t) => {
            let t: InsightType = t.parse()?;
            if !t.is_data() {
                bail!("--type must be one of the six data insight types");
            }
            let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
            let ex = extract::<f64>(text.trim(), t, &rt.gateway, &rt.prompts);
            for f in &ex.flags {
                eprintln!("flag: {f}");
            }
            let mut seg = gistvis::AugmentedSegment::new(ex.fact);
            seg.flags = ex.flags;
            (AugmentedDocument { title: None, paragraphs: vec![vec![seg]] }, ex.exhausted)
        }
        None => {
            let source = read_source(input)?;
            Pipeline::new(&rt.gateway, &rt.prompts, rt.config.clone())?.extract_document::<f64>(&source)?
        }
    };
    print!("{}", to_interchange(&doc)?);
    Ok(if exhausted { EXIT_EXHAUSTED } else { 0 })
}

fn render(artifact: &Path, out: &Path) -> Result<u8> {
    let text = fs::read_to_string(artifact).with_context(|| format!("reading {}", artifact.display()))?;
    let doc: AugmentedDocument = from_interchange(&text)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(format!("{}.html", stem(artifact)));
    write(&path, &emit_html(&doc))?;
    eprintln!("{}", path.display());
    Ok(0)
}

fn eval(target: &EvalTarget) -> Result<u8> {
    match target {
        EvalTarget::Discoverer { corpus, strategy, report, run } => {
            let corpus = AnnotatedCorpus::load_dir(corpus)?;
            let rt = if strategy.contains(&Strategy::Llm) { Some(run.runtime()?) } else { None };
            let llm = rt.as_ref().map(|rt| LlmSegmenter { gateway: &rt.gateway, prompts: &rt.prompts });
            let mut segmenters: Vec<&dyn Segmenter> = Vec::new();
            for s in strategy {
                match s {
                    Strategy::Regex => segmenters.push(&RegexSegmenter),
                    Strategy::Llm => segmenters.push(llm.as_ref().expect("runtime built for llm")),
                }
            }
            let r = run_discoverer_eval(&corpus, &segmenters);
            print!("{}", r.to_table());
            if let Some(path) = report {
                write(path, &serde_json::to_string_pretty(&r)?)?;
            }
            Ok(0)
        }
        EvalTarget::Annotator { corpus, mode, report, run } => {
            let corpus = AnnotatedCorpus::load_dir(corpus)?;
            let rt = run.runtime()?;
            let r = run_annotator_eval(&corpus, *mode, &rt.gateway, &rt.prompts)?;
            print!("{}", r.to_table());
            if let Some(path) = report {
                write(path, &serde_json::to_string_pretty(&r)?)?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Augment { input, out, run } => augment(input, out, run),
        Command::Segment { input, run } => segment(input, run),
        Command::Annotate { input, run } => annotate_cmd(input, run),
        Command::Extract { input, insight_type, run } => extract_cmd(input, insight_type.as_deref(), run),
        Command::Render { artifact, out } => render(artifact, out),
        Command::Eval { target } => eval(target),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
