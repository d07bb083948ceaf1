//! Command-line front end.
//!
//! Exit codes: 0 verified, 1 usage or parse error, 2 search failure or
//! failed check, 3 unresolved.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cbindex::{self, CbConfig, IndexVerdict};
use crate::error::{Error, Result};
use crate::families::{parse_family, Corpus, Family};
use crate::finset::FinSet;
use crate::ordinal::Ordinal;
use crate::ramsey::{self, ClassifyConfig, NashWilliamsReport, Policy, SearchConfig, SearchOutcome, Witness};
use crate::schreier;
use crate::stream::Stream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "schreier",
    version,
    about = "Complete thin Schreier families and their dichotomies"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Emit one JSON record instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest integer considered by searches and closures.
    #[arg(long, global = true, default_value_t = 40)]
    pub horizon: u64,
    /// Size of the homogeneous set to find.
    #[arg(long, global = true, default_value_t = 6)]
    pub target: usize,
    /// Evaluation and enumeration budget.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Comma-separated ascending ordinals, e.g. "1,2,3,w,w+1".
    #[arg(long, global = true)]
    pub ladder: Option<String>,
    /// majority, prefer-inside or prefer-outside.
    #[arg(long, global = true, default_value = "majority")]
    pub policy: Policy,
    /// Extra corpus file of named families.
    #[arg(long, global = true)]
    pub corpus: Option<std::path::PathBuf>,
}

impl clap::builder::ValueParserFactory for Policy {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Policy>().map_err(|e| e.to_string()))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a finite set against A_ξ and print the peel trace.
    Member { xi: String, set: String },
    /// Split a set or stream into consecutive A_ξ blocks.
    Decompose {
        xi: String,
        /// A finite set `{...}` or a stream.
        input: String,
        /// Number of blocks to take from a stream.
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// The A_ξ initial segment of a stream, checked to avoid a family.
    Segment { family: String, xi: String, stream: String },
    /// Members of A_ξ inside {1..n} or inside a given set.
    Enumerate {
        xi: String,
        ground: String,
        /// Print only the number of members.
        #[arg(long)]
        count: bool,
    },
    /// The peeling step ξ ↦ ξ(n).
    Step { xi: String, n: u64 },
    /// The n-th term of the fundamental sequence of a limit.
    Fund {
        xi: String,
        n: u64,
        /// Use the strictly increasing variant.
        #[arg(long)]
        strict: bool,
    },
    /// Strong Cantor-Bendixson index of a family on a stream.
    Index { family: String, stream: String },
    /// Finite-stage section checks for the derivatives of (A_λ)⋆.
    Lemma28 {
        lam: String,
        stage: String,
        n: u64,
        #[arg(long, default_value = "all")]
        stream: String,
        /// Members examined per direction.
        #[arg(long, default_value_t = 5_000)]
        limit: usize,
    },
    /// Homogeneous set for A_ξ and a family.
    Dichotomy { xi: String, family: String, stream: String },
    /// Homogeneous set for A_ξ inside one part of a partition.
    Partition {
        xi: String,
        stream: String,
        #[arg(required = true)]
        parts: Vec<String>,
    },
    /// Case of the hereditary dichotomy for a target ordinal.
    Classify {
        family: String,
        stream: String,
        target_xi: String,
    },
    /// Inclusions between F_α(L), the tree closure of A_{ω^α}, and F_α.
    Spreadcheck {
        alpha: String,
        stream: String,
        #[arg(long, default_value_t = 12)]
        window: u64,
    },
    /// Nash-Williams probe for the tree of stems given by a family.
    Nwprobe {
        stem: String,
        stream: String,
        /// Subsets of L sampled for segment location.
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
}

/// What a subcommand produced: text lines, a JSON body and an exit code.
struct Output {
    text: String,
    record: Value,
    code: i32,
}

impl Output {
    fn new(text: impl Into<String>, record: impl Serialize, code: i32) -> Result<Self> {
        let record = serde_json::to_value(record).map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(Output {
            text: text.into(),
            record,
            code,
        })
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// to the given sinks. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let _ = writeln!(err, "{}", describe_config(&cli));
    match execute(&cli) {
        Ok(o) => {
            let _ = if cli.opts.json {
                let mut record = Map::new();
                record.insert("op".into(), json!(op_name(&cli.command)));
                record.insert("inputs".into(), inputs(&cli.command));
                record.insert("config".into(), config_value(&cli.opts));
                match o.record {
                    Value::Object(fields) => record.extend(fields),
                    other => {
                        record.insert("result".into(), other);
                    }
                }
                writeln!(out, "{}", Value::Object(record))
            } else {
                writeln!(out, "{}", o.text)
            };
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn op_name(c: &Command) -> &'static str {
    match c {
        Command::Member { .. } => "member",
        Command::Decompose { .. } => "decompose",
        Command::Segment { .. } => "segment",
        Command::Enumerate { .. } => "enumerate",
        Command::Step { .. } => "step",
        Command::Fund { .. } => "fund",
        Command::Index { .. } => "index",
        Command::Lemma28 { .. } => "lemma28",
        Command::Dichotomy { .. } => "dichotomy",
        Command::Partition { .. } => "partition",
        Command::Classify { .. } => "classify",
        Command::Spreadcheck { .. } => "spreadcheck",
        Command::Nwprobe { .. } => "nwprobe",
    }
}

fn inputs(c: &Command) -> Value {
    match c {
        Command::Member { xi, set } => json!({ "xi": xi, "set": set }),
        Command::Decompose { xi, input, blocks } => json!({ "xi": xi, "input": input, "blocks": blocks }),
        Command::Segment { family, xi, stream } => json!({ "family": family, "xi": xi, "stream": stream }),
        Command::Enumerate { xi, ground, count } => json!({ "xi": xi, "ground": ground, "count": count }),
        Command::Step { xi, n } => json!({ "xi": xi, "n": n }),
        Command::Fund { xi, n, strict } => json!({ "xi": xi, "n": n, "strict": strict }),
        Command::Index { family, stream } => json!({ "family": family, "stream": stream }),
        Command::Lemma28 {
            lam,
            stage,
            n,
            stream,
            limit,
        } => json!({ "lam": lam, "stage": stage, "n": n, "stream": stream, "limit": limit }),
        Command::Dichotomy { xi, family, stream } => json!({ "xi": xi, "family": family, "stream": stream }),
        Command::Partition { xi, stream, parts } => json!({ "xi": xi, "stream": stream, "parts": parts }),
        Command::Classify {
            family,
            stream,
            target_xi,
        } => json!({ "family": family, "stream": stream, "target_xi": target_xi }),
        Command::Spreadcheck { alpha, stream, window } => json!({ "alpha": alpha, "stream": stream, "window": window }),
        Command::Nwprobe { stem, stream, samples } => json!({ "stem": stem, "stream": stream, "samples": samples }),
    }
}

fn config_value(o: &Options) -> Value {
    json!({
        "horizon": o.horizon,
        "target": o.target,
        "budget": o.budget,
        "policy": o.policy,
        "ladder": o.ladder,
        "corpus": o.corpus.as_ref().map(|p| p.display().to_string()),
    })
}

fn describe_config(cli: &Cli) -> String {
    let o = &cli.opts;
    format!(
        "{}: horizon={} target={} budget={} policy={} ladder={} corpus={} json={}",
        op_name(&cli.command),
        o.horizon,
        o.target,
        o.budget,
        o.policy,
        o.ladder.as_deref().unwrap_or("default"),
        o.corpus.as_ref().map_or("default".into(), |p| p.display().to_string()),
        o.json
    )
}

/// Splits at top-level commas so that `w^(w+1)` stays whole.
pub fn parse_ladder(text: &str) -> Result<Vec<Ordinal>> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].parse()?);
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(format!("ladder `{text}` is not strictly ascending")));
    }
    Ok(out)
}

fn ladder_or(o: &Options, default: Vec<Ordinal>) -> Result<Vec<Ordinal>> {
    o.ladder.as_deref().map_or(Ok(default), parse_ladder)
}

fn default_probe_ladder() -> Vec<Ordinal> {
    let mut v: Vec<Ordinal> = (1..=6).map(Ordinal::finite).collect();
    v.extend([
        Ordinal::omega(),
        Ordinal::omega().successor(),
        Ordinal::omega().successor().successor(),
    ]);
    v
}

fn corpus(o: &Options) -> Result<Corpus> {
    let mut c = Corpus::default();
    if let Some(path) = &o.corpus {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        c.extend(Corpus::parse(&text)?);
    }
    Ok(c)
}

fn search_config(o: &Options) -> SearchConfig {
    SearchConfig {
        horizon: o.horizon,
        target: o.target,
        budget: o.budget,
        policy: o.policy,
        ..SearchConfig::default()
    }
}

fn join<T: std::fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn execute(cli: &Cli) -> Result<Output> {
    let o = &cli.opts;
    let family = |text: &str| -> Result<Family> { parse_family(text, &corpus(o)?, o.horizon) };
    match &cli.command {
        Command::Member { xi, set } => {
            let xi: Ordinal = xi.parse()?;
            let s: FinSet = set.parse()?;
            let trace = schreier::peel_trace(&xi, &s);
            let text = format!("{}\ntrace: {}", trace.classification, join(&trace.accumulators, " -> "));
            Output::new(text, &trace, EXIT_OK)
        }
        Command::Decompose { xi, input, blocks } => {
            let xi: Ordinal = xi.parse()?;
            if input.trim_start().starts_with('{') {
                let rep = schreier::canonical_rep(&xi, &input.parse()?)?;
                return Output::new(rep.to_string(), &rep, EXIT_OK);
            }
            let stream: Stream = input.parse()?;
            let k = blocks.ok_or_else(|| Error::Invalid("streams need --blocks".into()))?;
            let found: Vec<FinSet> = schreier::canonical_rep_stream(&xi, &stream)?.take(k).collect();
            if found.len() < k {
                return Err(Error::StreamExhausted(format!("{k} blocks of {stream}")));
            }
            Output::new(join(&found, " "), json!({ "blocks": found }), EXIT_OK)
        }
        Command::Segment { family: f, xi, stream } => {
            let f = family(f)?;
            let r = ramsey::locate_segment(&f, &xi.parse()?, &stream.parse()?)?;
            let text = format!(
                "{} {}",
                r.segment,
                if r.in_family { "in family" } else { "not in family" }
            );
            Output::new(text, &r, if r.verified { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Enumerate { xi, ground, count } => {
            let xi: Ordinal = xi.parse()?;
            let ground = if ground.trim_start().starts_with('{') {
                ground.parse()?
            } else {
                let n: u64 = ground
                    .trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("`{ground}` is neither a set nor a bound")))?;
                FinSet::range(1, n)
            };
            let members = schreier::enumerate(&xi, &ground, o.budget)?;
            let text = if *count {
                members.len().to_string()
            } else {
                join(&members, "\n")
            };
            Output::new(text, json!({ "count": members.len(), "members": members }), EXIT_OK)
        }
        Command::Step { xi, n } => {
            let r = schreier::step(&xi.parse()?, *n)?;
            Output::new(r.to_string(), json!({ "step": r }), EXIT_OK)
        }
        Command::Fund { xi, n, strict } => {
            let xi: Ordinal = xi.parse()?;
            let r = if *strict { xi.sfund(*n)? } else { xi.fund(*n)? };
            Output::new(r.to_string(), json!({ "fund": r }), EXIT_OK)
        }
        Command::Index { family: f, stream } => {
            let f = family(f)?;
            let ladder = ladder_or(o, default_probe_ladder())?;
            let r = cbindex::index(&f, &stream.parse()?, &ladder, CbConfig::default())?;
            let code = match r.index {
                IndexVerdict::Exactly(_) => EXIT_OK,
                _ => EXIT_UNRESOLVED,
            };
            Output::new(format!("{}\nresolution: {}", r.index, r.resolution), &r, code)
        }
        Command::Lemma28 {
            lam,
            stage,
            n,
            stream,
            limit,
        } => {
            let r = cbindex::lemma28_check(
                &lam.parse()?,
                &stage.parse()?,
                *n,
                &stream.parse()?,
                CbConfig::default(),
                *limit,
            )?;
            let text = format!(
                "{} (i) {} checked, {} failures; (ii) {} checked, {} witnessed{}",
                if r.passed { "passed" } else { "FAILED" },
                r.checked_i,
                r.failures_i.len(),
                r.checked_ii,
                r.witnessed_ii,
                if r.truncated { "; truncated" } else { "" }
            );
            Output::new(text, &r, if r.passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Dichotomy { xi, family: f, stream } => {
            let f = family(f)?;
            let r = ramsey::dichotomy_search(&xi.parse()?, &f, &stream.parse()?, search_config(o))?;
            match &r {
                SearchOutcome::Found(d) => {
                    Output::new(format!("{} L = {} checked {}", d.horn, d.l, d.checked), &r, EXIT_OK)
                }
                SearchOutcome::Failure(fail) => Output::new(format!("Failure: {}", fail.reason), &r, EXIT_FAILURE),
            }
        }
        Command::Partition { xi, stream, parts } => {
            let parts = parts.iter().map(|p| family(p)).collect::<Result<Vec<_>>>()?;
            match ramsey::partition_search(&xi.parse()?, &parts, &stream.parse()?, search_config(o))? {
                Ok((i, d)) => Output::new(
                    format!("part {i} ({}) L = {} checked {}", parts[i], d.l, d.checked),
                    json!({ "outcome": "Found", "part": i, "horn": d.horn, "L": d.l, "checked": d.checked,
                            "horizon": d.horizon, "policy": d.policy }),
                    EXIT_OK,
                ),
                Err(fail) => Output::new(
                    format!("Failure: {}", fail.reason),
                    json!({ "outcome": "Failure", "failure": fail }),
                    EXIT_FAILURE,
                ),
            }
        }
        Command::Classify {
            family: f,
            stream,
            target_xi,
        } => {
            let f = family(f)?;
            let target: Ordinal = target_xi.parse()?;
            let mut conf = ClassifyConfig::for_target(&target);
            conf.search = search_config(o);
            conf.ladder = ladder_or(o, conf.ladder)?;
            let v = ramsey::classify_hereditary(&f, &stream.parse()?, &target, &conf)?;
            let code = match &v.witness {
                Witness::Failure(_) => EXIT_FAILURE,
                _ if !v.consistent => EXIT_FAILURE,
                _ if v.resolution.contains("unresolved") => EXIT_UNRESOLVED,
                _ => EXIT_OK,
            };
            let witness = match &v.witness {
                Witness::Cube(chain) => format!("cube chain of depth {}", chain.len()),
                Witness::Dichotomies(ds) => ds
                    .iter()
                    .map(|d| format!("{} L = {}", d.horn, d.l))
                    .collect::<Vec<_>>()
                    .join("; "),
                Witness::Failure(fail) => format!("Failure: {}", fail.reason),
            };
            let text = format!(
                "{} estimate {} ({})\n{witness}",
                v.case_tag, v.xi_estimate, v.resolution
            );
            Output::new(text, &v, code)
        }
        Command::Spreadcheck { alpha, stream, window } => {
            let r = ramsey::spreading_inclusion_check(&alpha.parse()?, &stream.parse()?, *window)?;
            let text = format!(
                "{} first {} checked, {} failures; second {} checked, {} failures",
                if r.passed { "passed" } else { "FAILED" },
                r.checked_first,
                r.failures_first.len(),
                r.checked_second,
                r.failures_second.len()
            );
            Output::new(text, &r, if r.passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Nwprobe { stem, stream, samples } => {
            let f = family(stem)?;
            let ladder = ladder_or(o, default_probe_ladder())?;
            let r = ramsey::nash_williams_probe(f, &stream.parse()?, &ladder, search_config(o), *samples)?;
            let (text, code) = match &r {
                NashWilliamsReport::Cube { chain } => (format!("Cube chain of depth {}", chain.len()), EXIT_OK),
                NashWilliamsReport::Segments {
                    xi,
                    l,
                    segments,
                    verified,
                } => {
                    let segs = segments.iter().map(|s| s.segment.to_string()).collect::<Vec<_>>();
                    (
                        format!("Outside at {xi} L = {l} segments {}", segs.join(" ")),
                        if *verified { EXIT_OK } else { EXIT_FAILURE },
                    )
                }
                NashWilliamsReport::Undecided { .. } => ("Undecided".to_string(), EXIT_UNRESOLVED),
            };
            Output::new(text, &r, code)
        }
    }
}
