//! Command-line front end and HTTP server for the morfwork workbench.

pub mod config;
pub mod server;
pub mod views;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use morfwork::analyzer::Parse;
use morfwork::corpus::TaggedCorpus;
use morfwork::error::{AnalysisError, FormatError, ResourceError, SearchError, TagError};
use morfwork::features::Dimension;
use morfwork::index::{build_index, FeatureIndex};
use morfwork::phonology::{check_rule_conflicts, parse_rule_file};
use morfwork::search::{search, Query, SearchOutcome, SentenceHit};
use morfwork::text::ascii_fold;
use morfwork::workbench::bundled;
use morfwork::Workbench;
use thiserror::Error;

use crate::config::{Config, CONFIG_ENV};
use crate::server::AppState;

/// Failure of one command, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unreadable input files.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    /// Unknown words, conflicting queries, corrupt data files.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Config(_) => 2,
        }
    }
}

impl From<ResourceError> for CliError {
    fn from(e: ResourceError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(io) => CliError::Usage(io.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<TagError> for CliError {
    fn from(e: TagError) -> Self {
        match e {
            TagError::Io(io) => CliError::Usage(io.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::UnknownFeatureValue { .. } => CliError::Domain(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "morfwork", version, about = "Turkish morphology and corpus search workbench")]
pub struct Cli {
    /// Config file of key=value lines (default: $MORFWORK_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
    #[arg(long, global = true)]
    pub paradigms: Option<PathBuf>,
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    pub constraints: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stats: Option<PathBuf>,
    #[arg(long, global = true)]
    pub implications: Option<PathBuf>,
    /// Print ç ğ ı ö ş ü as C G I O S U.
    #[arg(long, global = true)]
    pub ascii_fold: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print every parse of each word.
    Analyze {
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Build the surface form of a root and comma-separated morphemes.
    Generate {
        root: String,
        #[arg(default_value = "")]
        morphemes: String,
    },
    /// Disambiguate a corpus (one sentence per line) into a tagged corpus.
    Tag {
        corpus: Option<PathBuf>,
        #[arg(long)]
        interactive: bool,
        /// Fail if any token is left ambiguous.
        #[arg(long)]
        strict: bool,
        /// Output file (default: standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the feature index of a tagged corpus.
    Index {
        tagged: Option<PathBuf>,
        /// Output file (default: the tagged path with an `.index` extension).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Find sentences with a token carrying every given feature.
    Search(SearchArgs),
    /// Serve the HTTP API and the UI bundle.
    Serve {
        #[arg(long)]
        tagged: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        listen: Option<std::net::SocketAddr>,
        /// Directory with the built UI.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Rule file tools.
    Rules {
        #[command(subcommand)]
        command: RulesCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum RulesCommand {
    /// Parse the rules and report conflicting coercions.
    Check,
}

#[derive(Args, Debug, Default)]
pub struct SearchArgs {
    #[arg(long)]
    pub agreement: Option<String>,
    #[arg(long)]
    pub aspect: Option<String>,
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub category: Option<String>,
    #[arg(long)]
    pub possessive: Option<String>,
    #[arg(long)]
    pub sense: Option<String>,
    #[arg(long)]
    pub tense: Option<String>,
    #[arg(long)]
    pub voice: Option<String>,
    #[arg(long)]
    pub suffix: Option<String>,
    #[arg(long)]
    pub root: Option<String>,
    #[arg(long)]
    pub tagged: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

impl SearchArgs {
    fn pairs(&self) -> Vec<(&str, &str)> {
        [
            (Dimension::Agreement.as_str(), &self.agreement),
            (Dimension::Aspect.as_str(), &self.aspect),
            (Dimension::Case.as_str(), &self.case),
            (Dimension::Category.as_str(), &self.category),
            (Dimension::Possessive.as_str(), &self.possessive),
            (Dimension::Sense.as_str(), &self.sense),
            (Dimension::Tense.as_str(), &self.tense),
            (Dimension::Voice.as_str(), &self.voice),
            ("suffix", &self.suffix),
            ("root", &self.root),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

/// Standard streams, swappable in tests.
pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(io.err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, io) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            e.exit_code()
        }
    }
}

fn settings(cli: &Cli) -> Result<Config, CliError> {
    let file = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match file {
        Some(path) => Config::load(&path)?,
        None => Config::default(),
    };
    let r = &mut cfg.resources;
    for (slot, flag) in [
        (&mut r.rules, &cli.rules),
        (&mut r.paradigms, &cli.paradigms),
        (&mut r.lexicon, &cli.lexicon),
        (&mut r.constraints, &cli.constraints),
        (&mut r.stats, &cli.stats),
        (&mut r.implications, &cli.implications),
    ] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    cfg.ascii_fold |= cli.ascii_fold;
    Ok(cfg)
}

fn emit(io: &mut Io<'_>, fold: bool, text: &str) -> Result<(), CliError> {
    let text = if fold { ascii_fold(text) } else { text.to_string() };
    io.out
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Usage(format!("writing output: {e}")))
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))
}

fn execute(cli: Cli, io: &mut Io<'_>) -> Result<(), CliError> {
    let cfg = settings(&cli)?;
    let fold = cfg.ascii_fold;
    match cli.command {
        Command::Rules {
            command: RulesCommand::Check,
        } => rules_check(&cfg, io),
        Command::Analyze { words, json } => {
            let wb = Workbench::load(&cfg.resources)?;
            let text = analyze_words(&wb, &words, json)?;
            emit(io, fold, &text)
        }
        Command::Generate { root, morphemes } => {
            let wb = Workbench::load(&cfg.resources)?;
            let names: Vec<&str> = morphemes.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let surface = wb.analyzer.generate_from_root(&root, &names)?;
            emit(io, fold, &format!("{surface}\n"))
        }
        Command::Tag {
            corpus,
            interactive,
            strict,
            output,
        } => {
            let wb = Workbench::load(&cfg.resources)?;
            let path = corpus
                .or(cfg.corpus.clone())
                .ok_or_else(|| CliError::Usage("no corpus given".into()))?;
            let text = read_input(&path)?;
            let run = if interactive {
                let Io { input, err, .. } = io;
                let mut ask = |tokens: &[String], i: usize, cands: &[Parse]| prompt(&mut **input, &mut **err, tokens, i, cands);
                wb.tag_corpus(&text, Some(&mut ask), strict)?
            } else {
                wb.tag_corpus(&text, None, strict)?
            };
            let _ = writeln!(io.err, "{}", run.report);
            match output {
                Some(p) => run.corpus.save(&p)?,
                None => emit(io, fold, &run.corpus.to_text())?,
            }
            Ok(())
        }
        Command::Index { tagged, output } => {
            let path = tagged
                .or(cfg.tagged.clone())
                .ok_or_else(|| CliError::Usage("no tagged corpus given".into()))?;
            let corpus = TaggedCorpus::load(&path)?;
            let index = build_index(&corpus);
            let out = output.or(cfg.index.clone()).unwrap_or_else(|| path.with_extension("index"));
            index.save(&out)?;
            let _ = writeln!(
                io.err,
                "indexed {} sentences into {} ({} keys)",
                corpus.len(),
                out.display(),
                index.postings.len() + index.suffixes.len() + index.roots.len()
            );
            Ok(())
        }
        Command::Search(args) => {
            let wb = Workbench::load(&cfg.resources)?;
            let (tagged, index) = corpus_and_index(&cfg, args.tagged.clone(), args.index.clone())?;
            let q = Query::from_pairs(args.pairs())?;
            match search(&q, &wb.implications, &wb.vocabulary, &index, &tagged)? {
                SearchOutcome::Conflict(c) => Err(CliError::Domain(format!("conflict: {c}"))),
                SearchOutcome::Hits(hits) => {
                    let text = if args.json {
                        let mut s = serde_json::to_string(&views::search_response(&q, &hits))
                            .expect("views serialize infallibly");
                        s.push('\n');
                        s
                    } else {
                        render_hits(&hits)
                    };
                    emit(io, fold, &text)
                }
            }
        }
        Command::Serve {
            tagged,
            index,
            listen,
            ui,
        } => {
            let workbench = Workbench::load(&cfg.resources)?;
            let (tagged, index) = corpus_and_index(&cfg, tagged, index)?;
            let state = Arc::new(AppState {
                workbench,
                tagged,
                index,
                ascii_fold: fold,
            });
            let addr = listen.unwrap_or(cfg.listen);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Config(e.to_string()))?;
            runtime
                .block_on(server::serve(state, ui.or(cfg.ui.clone()), addr))
                .map_err(|e| CliError::Config(format!("serving on {addr}: {e}")))
        }
    }
}

/// The tagged corpus (the bundled sample when none is configured) and its
/// index (built in memory when no index file is given).
pub fn corpus_and_index(
    cfg: &Config,
    tagged: Option<PathBuf>,
    index: Option<PathBuf>,
) -> Result<(TaggedCorpus, FeatureIndex), CliError> {
    let tagged = match tagged.or(cfg.tagged.clone()) {
        Some(p) => TaggedCorpus::load(&p)?,
        None => TaggedCorpus::from_text(bundled::GOLD)?,
    };
    let index = match index.or(cfg.index.clone()) {
        Some(p) => FeatureIndex::load(&p)?,
        None => build_index(&tagged),
    };
    Ok((tagged, index))
}

fn analyze_words(wb: &Workbench, words: &[String], json: bool) -> Result<String, CliError> {
    let mut out = String::new();
    for word in words {
        let parses = wb.analyzer.analyze(word)?;
        if json {
            let body = views::AnalyzeResponse {
                word: word.clone(),
                parses: parses.iter().map(views::ParseView::from).collect(),
            };
            out.push_str(&serde_json::to_string(&body).expect("views serialize infallibly"));
            out.push('\n');
            continue;
        }
        if words.len() > 1 {
            out.push_str(&format!("{word}\n"));
        }
        for p in &parses {
            let feats: Vec<String> = p.features.scalar_values().map(|(d, v)| format!("{d}={v}")).collect();
            out.push_str(&format!("{}\t{}\t{}\n", p.tag_gloss(), p.gloss, feats.join(",")));
        }
    }
    Ok(out)
}

/// One line per sentence, matching tokens in brackets, then a count line.
fn render_hits(hits: &[SentenceHit]) -> String {
    let mut out = String::new();
    let mut tokens = 0;
    for h in hits {
        let chars: Vec<char> = h.text.chars().collect();
        let mut line = String::new();
        let mut at = 0;
        for &(start, end) in &h.spans {
            line.extend(&chars[at..start]);
            line.push('[');
            line.extend(&chars[start..end]);
            line.push(']');
            at = end;
        }
        line.extend(&chars[at..]);
        let positions: Vec<String> = h.matches.iter().map(|t| format!("{}:{t}", h.sentence_id)).collect();
        out.push_str(&format!("{}\t{}\t{}\n", h.sentence_id, positions.join(","), line));
        tokens += h.matches.len();
    }
    out.push_str(&format!("{} sentences, {tokens} tokens\n", hits.len()));
    out
}

/// Numbered prompt for one ambiguous token. End of input picks the first.
fn prompt(input: &mut dyn BufRead, err: &mut dyn Write, tokens: &[String], i: usize, cands: &[Parse]) -> usize {
    let _ = writeln!(err, "{}", tokens.join(" "));
    let _ = writeln!(err, "token {} `{}`:", i + 1, tokens[i]);
    for (k, p) in cands.iter().enumerate() {
        let _ = writeln!(err, "  {}) {}", k + 1, p.tag_gloss());
    }
    loop {
        let _ = write!(err, "choice [1-{}]: ", cands.len());
        let _ = err.flush();
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => return 0,
            Ok(_) => {}
        }
        match line.trim().parse::<usize>() {
            Ok(n) if (1..=cands.len()).contains(&n) => return n - 1,
            _ => {
                let _ = writeln!(err, "enter a number between 1 and {}", cands.len());
            }
        }
    }
}

fn rules_check(cfg: &Config, io: &mut Io<'_>) -> Result<(), CliError> {
    let text = match &cfg.resources.rules {
        Some(p) => read_input(p)?,
        None => bundled::RULES.to_string(),
    };
    let set = parse_rule_file(&text).map_err(|e| CliError::Config(format!("rule file: {e}")))?;
    let conflicts = check_rule_conflicts(&set.alphabet, &set.rules);
    for c in &conflicts {
        let _ = writeln!(io.err, "conflict: {c}");
    }
    if !conflicts.is_empty() {
        return Err(CliError::Domain(format!("{} rule conflict(s)", conflicts.len())));
    }
    Workbench::load(&cfg.resources)?;
    emit(
        io,
        cfg.ascii_fold,
        &format!(
            "{} rules over {} feasible pairs; no conflicts\n",
            set.rules.len(),
            set.alphabet.feasible_pairs().len()
        ),
    )
}
