mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use negscope::eval::{
    aggregate_reports, render_aggregates, render_eval, render_scope_length, render_stats,
};
use negscope::lexicon::detect_cues;
use negscope::pipeline::{apply_splits, score_order, score_report};
use negscope::report::render;
use negscope::starsem::{parse_starsem, write_starsem};
use negscope::{
    assign_splits, corpus_stats, evaluate_run, explode_corpus, load_lexicon, read_sentence_table,
    resolve_corpus, scope_length_report, score_documents, select_top, write_canonical, Corpus,
    EvalMode, Lang, Lexicon, OutputFormat, ScopeRatio, SplitRatios, StarSemOptions,
};

use crate::io::{check_output, emit, open, read_corpus, warn_all, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "negscope",
    version,
    about = "Negation cue and scope corpus toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between *SEM columns, raw sentence tables and .neg.jsonl
    Convert(ConvertArgs),
    /// Sentence, negation and scope statistics per source and language
    Stats(StatsArgs),
    /// Rank documents by negation cue density
    Score(LexiconArgs),
    /// Keep the K documents with the highest negation density
    Select(SelectArgs),
    /// Assign documents to train, test and validation
    Split(SplitArgs),
    /// List lexicon cue matches per sentence
    DetectCues(LexiconArgs),
    /// Rebuild the corpus with one record per detected cue
    Duplicate(DuplicateArgs),
    /// Predict scopes with the rule baseline
    Resolve(ResolveArgs),
    /// Token-level precision, recall and F1 of predicted scopes
    Eval(EvalArgs),
    /// Compare gold and predicted scope lengths
    ScopeLength(ScopeLengthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Starsem,
    Jsonl,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetFormat {
    Jsonl,
    Starsem,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Table,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Tsv => OutputFormat::Tsv,
            FormatArg::Table => OutputFormat::Table,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Lenient,
}

#[derive(Clone, Copy, ValueEnum)]
enum RatioArg {
    Pooled,
    PerInstance,
}

impl From<RatioArg> for ScopeRatio {
    fn from(r: RatioArg) -> Self {
        match r {
            RatioArg::Pooled => ScopeRatio::Pooled,
            RatioArg::PerInstance => ScopeRatio::PerInstance,
        }
    }
}

#[derive(Args)]
struct InOut {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    from: InputFormat,
    #[arg(long, value_enum)]
    to: TargetFormat,
    #[command(flatten)]
    io: InOut,
    /// Language of *SEM or text input
    #[arg(long, value_parser = parse_lang)]
    lang: Option<Lang>,
    /// Source name for *SEM or text input
    #[arg(long)]
    source: Option<String>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "pooled")]
    scope_ratio: RatioArg,
}

#[derive(Args)]
struct LexiconArgs {
    #[arg(long)]
    input: PathBuf,
    /// Lexicon file; the built-in lexicon of the language otherwise
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Required unless the corpus has a single language
    #[arg(long, value_parser = parse_lang)]
    lang: Option<Lang>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    lex: LexiconArgs,
    #[arg(long)]
    top: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    io: InOut,
    /// Train, test and validation percentages
    #[arg(long, default_value = "70,20,10")]
    ratios: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DuplicateArgs {
    #[command(flatten)]
    lex: LexiconArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Drop sentences without any cue
    #[arg(long)]
    drop_negation_free: bool,
}

#[derive(Args)]
struct ResolveArgs {
    #[command(flatten)]
    io: InOut,
    /// Override the language of every record
    #[arg(long, value_parser = parse_lang)]
    lang: Option<Lang>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, required_unless_present = "runs", conflicts_with = "runs")]
    pred: Option<PathBuf>,
    /// Glob of prediction files, one per run, aggregated to mean±std
    #[arg(long)]
    runs: Option<String>,
    #[arg(long, value_enum, default_value = "strict")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Args)]
struct ScopeLengthArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "pooled")]
    scope_ratio: RatioArg,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

fn parse_lang(s: &str) -> Result<Lang, String> {
    s.parse().map_err(|e: negscope::Error| e.to_string())
}

fn main() -> ExitCode {
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Convert(a) => convert(a),
        Command::Stats(a) => {
            let corpus = read_corpus(&a.input)?;
            let report = corpus_stats(&corpus, a.scope_ratio.into());
            emit(None, render_stats(&report, a.format.into()).as_bytes())
        }
        Command::Score(a) => {
            let corpus = read_corpus(&a.input)?;
            let lexicon = lexicon_for(&a, &corpus)?;
            let mut scores =
                score_documents(&corpus, &lexicon).map_err(|e| CliError::from_lib(&a.input, e))?;
            scores.sort_by(score_order);
            emit(None, score_report(&scores).as_bytes())
        }
        Command::Select(a) => {
            check_output(a.output.as_deref())?;
            let corpus = read_corpus(&a.lex.input)?;
            let lexicon = lexicon_for(&a.lex, &corpus)?;
            let scores = score_documents(&corpus, &lexicon)
                .map_err(|e| CliError::from_lib(&a.lex.input, e))?;
            let keep = select_top(&scores, a.top)?;
            emit_corpus(a.output.as_deref(), &corpus.retain_documents(&keep))
        }
        Command::Split(a) => {
            let ratios = SplitRatios::parse(&a.ratios)?;
            check_output(a.io.output.as_deref())?;
            let corpus = read_corpus(&a.io.input)?;
            let assignment = assign_splits(&corpus, ratios, a.seed)?;
            let corpus = apply_splits(corpus, &assignment)?;
            emit_corpus(a.io.output.as_deref(), &corpus)
        }
        Command::DetectCues(a) => {
            let corpus = read_corpus(&a.input)?;
            let lexicon = lexicon_for(&a, &corpus)?;
            let mut rows = Vec::new();
            for s in corpus.sentences() {
                for m in detect_cues(s.tokens, &lexicon) {
                    let cue: Vec<&str> = m.indices.iter().map(|&i| s.tokens[i].as_str()).collect();
                    rows.push(vec![
                        s.doc_id.to_string(),
                        s.sent_id.to_string(),
                        join_indices(&m.indices),
                        cue.join(" "),
                        m.pattern.to_string(),
                    ]);
                }
            }
            let header = ["doc_id", "sent_id", "cue_indices", "cue", "pattern"];
            emit(None, render(OutputFormat::Tsv, &header, &rows).as_bytes())
        }
        Command::Duplicate(a) => {
            check_output(a.output.as_deref())?;
            let corpus = read_corpus(&a.lex.input)?;
            let lexicon = lexicon_for(&a.lex, &corpus)?;
            let out = explode_corpus(&corpus, &lexicon, !a.drop_negation_free)
                .map_err(|e| CliError::from_lib(&a.lex.input, e))?;
            emit_corpus(a.output.as_deref(), &out)
        }
        Command::Resolve(a) => {
            check_output(a.io.output.as_deref())?;
            let corpus = read_corpus(&a.io.input)?;
            let out =
                resolve_corpus(corpus, a.lang).map_err(|e| CliError::from_lib(&a.io.input, e))?;
            emit_corpus(a.io.output.as_deref(), &out)
        }
        Command::Eval(a) => eval(a),
        Command::ScopeLength(a) => {
            let gold = read_corpus(&a.gold)?;
            let pred = read_corpus(&a.pred)?;
            let report = scope_length_report(&gold, &pred, a.scope_ratio.into())
                .map_err(|e| CliError::from_lib(&a.pred, e))?;
            emit(
                None,
                render_scope_length(&report, a.format.into()).as_bytes(),
            )
        }
    }
}

fn convert(a: ConvertArgs) -> CliResult<()> {
    check_output(a.io.output.as_deref())?;
    let input = &a.io.input;
    let corpus = match a.from {
        InputFormat::Jsonl => read_corpus(input)?,
        InputFormat::Starsem => {
            let options = StarSemOptions {
                lang: a.lang.unwrap_or(Lang::En),
                source: a.source.unwrap_or_else(|| "starsem".to_string()),
            };
            let parsed =
                parse_starsem(open(input)?, &options).map_err(|e| CliError::from_lib(input, e))?;
            warn_all(&parsed.warnings);
            parsed.corpus
        }
        InputFormat::Text => {
            let (Some(lang), Some(source)) = (a.lang, a.source.as_deref()) else {
                return Err(CliError::Usage(
                    "text input needs --lang and --source".to_string(),
                ));
            };
            read_sentence_table(open(input)?, lang, source)
                .map_err(|e| CliError::from_lib(input, e))?
        }
    };
    match a.to {
        TargetFormat::Jsonl => emit_corpus(a.io.output.as_deref(), &corpus),
        TargetFormat::Starsem => {
            let mut buf = Vec::new();
            write_starsem(&corpus, &mut buf).map_err(|e| CliError::from_lib(input, e))?;
            emit(a.io.output.as_deref(), &buf)
        }
    }
}

fn eval(a: EvalArgs) -> CliResult<()> {
    let mode = match a.mode {
        ModeArg::Strict => EvalMode::Strict,
        ModeArg::Lenient => EvalMode::Lenient,
    };
    let gold = read_corpus(&a.gold)?;
    if let Some(pred_path) = &a.pred {
        let pred = read_corpus(pred_path)?;
        let report =
            evaluate_run(&gold, &pred, mode).map_err(|e| CliError::from_lib(pred_path, e))?;
        return emit(None, render_eval(&report, a.format.into()).as_bytes());
    }

    let pattern = a.runs.as_deref().expect("clap requires --pred or --runs");
    let paths = run_paths(pattern)?;
    let mut reports = Vec::with_capacity(paths.len());
    for path in &paths {
        let pred = read_corpus(path)?;
        reports.push(evaluate_run(&gold, &pred, mode).map_err(|e| CliError::from_lib(path, e))?);
    }
    let aggregates = aggregate_reports(&reports)?;
    emit(
        None,
        render_aggregates(&aggregates, a.format.into()).as_bytes(),
    )
}

fn run_paths(pattern: &str) -> CliResult<Vec<PathBuf>> {
    let entries =
        glob::glob(pattern).map_err(|e| CliError::Usage(format!("bad --runs pattern: {e}")))?;
    let mut paths = entries.collect::<Result<Vec<_>, _>>().map_err(|e| {
        CliError::Usage(format!("cannot read {}: {}", e.path().display(), e.error()))
    })?;
    paths.sort();
    if paths.len() < 2 {
        return Err(CliError::Usage(format!(
            "--runs `{pattern}` matched {} file(s); at least 2 are needed",
            paths.len()
        )));
    }
    Ok(paths)
}

fn emit_corpus(path: Option<&Path>, corpus: &Corpus) -> CliResult<()> {
    let mut buf = Vec::new();
    write_canonical(corpus, &mut buf)?;
    emit(path, &buf)
}

/// The lexicon language is `--lang`, or the only language in the corpus.
fn lexicon_for(a: &LexiconArgs, corpus: &Corpus) -> CliResult<Lexicon> {
    let lang = match a.lang {
        Some(l) => l,
        None => {
            let langs = corpus.languages();
            match langs.len() {
                1 => *langs.iter().next().unwrap(),
                0 => Lang::De,
                _ => {
                    return Err(CliError::Usage(
                        "corpus has several languages; pass --lang".to_string(),
                    ))
                }
            }
        }
    };
    let Some(path) = &a.lexicon else {
        return Ok(Lexicon::builtin(lang));
    };
    let (lexicon, warnings) =
        load_lexicon(open(path)?, lang).map_err(|e| CliError::from_lib(path, e))?;
    warn_all(&warnings);
    Ok(lexicon)
}

fn join_indices(indices: &[usize]) -> String {
    indices
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
