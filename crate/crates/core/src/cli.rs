//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit code.
//!
//! Exit codes: 0 success, 2 usage or malformed input, 3 domain error,
//! 4 resource cap exceeded. Errors go to stderr as
//! `{"schema":"soficonv/1","error":{"code":…,"message":…}}`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{DescriptorJson, Field, FieldDescriptor};
use crate::automata::{
    fixtures as graph_fixtures, languages_equal_up_to, FullShift, GraphJson, LabeledGraph,
    MorphismImage, WordSource,
};
use crate::bernoulli::{
    count_k, count_representations, matrix_count_table, normalize_digits, symbolic_markov_export,
    BernoulliMeasure, BernoulliSpec,
};
use crate::error::{Error, Result};
use crate::pisot::{
    build_transducer, is_admissible, normalize_pisot, quasi_expansion, word_set, PisotBase,
    PisotMeasure, RedundancyCounter, Window, DEFAULT_STATE_CAP,
};
use crate::rational::{parse_rational, parse_rational_list, Q};
use crate::sofic::{
    linear_to_markov, markov_to_linear, push_forward, LetterMap, LinearRepresentation,
    LinearRepresentationJson, MarkovJson, MarkovMeasure,
};
use crate::spectrum::{
    alpha0_estimate, binary_runs, endpoint_constants, format_significant, growth_ratio, interleave,
    level_set, lyapunov_estimate, profile, profile_csv, stern, DensityTargets, LyapunovMode,
    Sequence,
};
use crate::words::{format_word, parse_word};

pub const SCHEMA: &str = "soficonv/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Parser)]
#[command(
    name = "soficonv",
    version,
    about = "Exact matrix representations of sofic measures and Bernoulli convolutions",
    after_help = "Rationals are written p/q, integers or finite decimals (1.5). \
Words are digit strings (0110) or comma-separated letters (3,11,0).\n\
--minpoly takes integer coefficients constant term first (x²−x−1 is -1,-1,1); \
a list that is not monic in that order but is monic when reversed is read \
leading coefficient first (1,-1,-1)."
)]
pub struct Cli {
    /// Output format where a command supports several.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Seed of the ChaCha8 generator used by stochastic estimators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of carry states explored before giving up.
    #[arg(long = "state-cap", global = true, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    /// Significant digits for floating-point output.
    #[arg(long, global = true, default_value_t = 15)]
    pub precision: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Markov measures and linear representations.
    #[command(subcommand)]
    Sofic(SoficCmd),
    /// Bernoulli convolutions in an integer base.
    #[command(subcommand)]
    Bernoulli(BernoulliCmd),
    /// Pisot-base numeration and measures.
    #[command(subcommand)]
    Pisot(PisotCmd),
    /// Level sets, densities and the base-2 counting function.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Labeled graphs and factor languages.
    #[command(subcommand)]
    Automata(AutomataCmd),
}

#[derive(Debug, Args)]
pub struct MeasureInput {
    /// Linear representation JSON {"R":…,"M":…,"C":…}.
    #[arg(long, conflicts_with = "markov")]
    pub linrep: Option<PathBuf>,
    /// Markov measure JSON {"p":…,"P":…}.
    #[arg(long)]
    pub markov: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SoficCmd {
    /// Value of a cylinder.
    Cylinder {
        #[command(flatten)]
        input: MeasureInput,
        #[arg(long)]
        word: String,
    },
    /// Linear representation of a Markov measure.
    ToLinear {
        #[arg(long)]
        markov: PathBuf,
    },
    /// Image of a linear representation under a letter map.
    PushForward {
        #[arg(long)]
        linrep: PathBuf,
        /// Images of the letters 0, 1, …, e.g. 0,0,1.
        #[arg(long)]
        map: String,
    },
    /// Markov measure and letter map whose image is the given representation.
    ToMarkov {
        #[arg(long)]
        linrep: PathBuf,
    },
    /// Whether the representation satisfies the stationarity condition.
    Stationary {
        #[arg(long)]
        linrep: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BernoulliArgs {
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub d: usize,
    /// Digit probabilities p0,…,p_{d−1}; uniform when omitted.
    #[arg(long)]
    pub p: Option<String>,
}

impl BernoulliArgs {
    fn spec(&self) -> Result<BernoulliSpec> {
        match &self.p {
            Some(p) => BernoulliSpec::new(self.b, self.d, parse_rational_list(p)?),
            None => BernoulliSpec::uniform(self.b, self.d),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum BernoulliCmd {
    /// Matrices M_j and the eigenvector C.
    Matrices {
        #[command(flatten)]
        spec: BernoulliArgs,
    },
    /// η(q + I_ε) for a digit word ε.
    Measure {
        #[command(flatten)]
        spec: BernoulliArgs,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        digits: String,
    },
    /// Number of representations of n (of length k when --k is given).
    Count {
        #[command(flatten)]
        spec: BernoulliArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: Option<usize>,
    },
    /// d^k M_{ε₁}…M_{ε_k} as an integer matrix (uniform p).
    Table {
        #[command(flatten)]
        spec: BernoulliArgs,
        #[arg(long)]
        digits: String,
    },
    /// Canonical base-b digits of a word over {0..d−1}.
    Normalize {
        #[command(flatten)]
        spec: BernoulliArgs,
        #[arg(long)]
        digits: String,
    },
    /// Markov chain of the reversed-word measure.
    Export {
        #[command(flatten)]
        spec: BernoulliArgs,
    },
}

#[derive(Debug, Args)]
pub struct BaseArgs {
    /// Minimal polynomial of β (see the note on coefficient order below).
    #[arg(long, allow_hyphen_values = true, required_unless_present = "integer")]
    pub minpoly: Option<String>,
    /// Isolating interval lo,hi of β.
    #[arg(long, requires = "minpoly")]
    pub interval: Option<String>,
    /// Integer base instead of --minpoly/--interval.
    #[arg(long, conflicts_with = "minpoly")]
    pub integer: Option<u64>,
    /// Digit count; defaults to ⌈β⌉.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum PisotCmd {
    /// Carry states of a window.
    States {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long, default_value = "open")]
        window: String,
    },
    /// Normalization transducer (JSON, or DOT with --format dot / --dot FILE).
    Transducer {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long, default_value = "half-open")]
        window: String,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Quasi-expansion of 1.
    Quasi {
        #[command(flatten)]
        base: BaseArgs,
    },
    /// The block set W.
    Words {
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Parry admissibility of a word.
    Admissible {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        word: String,
    },
    /// Number of digit words with the same value as --word.
    Count {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        word: String,
    },
    /// Admissible form of Σ ωᵢ β^{−i}.
    Normalize {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        word: String,
    },
    /// Matrices M_ℓ, M_w and C of the Bernoulli convolution.
    Matrices {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        p: Option<String>,
    },
    /// η(𝔧ᵢ + I_w) and ηᵢ[w] for a concatenation w of blocks of W.
    Measure {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        state: usize,
        #[arg(long)]
        word: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCmd {
    /// Series (n, log f(n)/log n).
    Profile {
        #[arg(long, default_value = "stern")]
        f: String,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Also write the CSV series to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Level set of f at α ± ε below N.
    Level {
        #[arg(long, default_value = "stern")]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "N")]
        n: u64,
        /// Include the member list in JSON output.
        #[arg(long)]
        members: bool,
    },
    /// Mean of log f(n)/log 2^{K−1} over [2^{K−1}, 2^K).
    Alpha0 {
        #[arg(long = "K")]
        k: u32,
    },
    /// Seeded Lyapunov (binary-drive) or Lévy estimate.
    Lyapunov {
        #[arg(long, default_value = "binary-drive")]
        mode: String,
        #[arg(long)]
        s: usize,
    },
    /// Interleaves the level sets E(α, 1/k) of f.
    Interleave {
        #[arg(long, default_value = "stern")]
        f: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long = "H")]
        h: u64,
        #[arg(long = "kmax", default_value_t = 8)]
        k_max: usize,
    },
    /// Value of the counting function f(n).
    Stern {
        #[arg(long)]
        n: u64,
    },
    /// Binary run decomposition of n.
    Runs {
        #[arg(long)]
        n: u64,
    },
    /// Ends of the singularity spectrum from α₀ (estimated at K) and log₂ φ.
    Endpoints {
        #[arg(long = "K", default_value_t = 14)]
        k: u32,
    },
}

/// A word source: `fixture:NAME`, `file:PATH` (graph JSON) or `full:LETTERS`,
/// optionally followed by `@x=0,y=1` to take the image under a letter map.
#[derive(Debug, Subcommand)]
pub enum AutomataCmd {
    /// Whether a word labels a path from an initial state.
    Accepts {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        word: String,
    },
    /// Images of the length-L path labels under a letter map.
    Image {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        map: String,
        #[arg(long = "L")]
        len: usize,
    },
    /// Compares two factor languages up to length L.
    Compare {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long = "L")]
        len: usize,
    },
    /// Graph as JSON, or DOT with --format dot.
    Show {
        #[arg(long)]
        graph: String,
    },
}

struct Ctx<'a> {
    format: Format,
    seed: u64,
    state_cap: usize,
    precision: usize,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn json(&mut self, value: Value) -> Result<()> {
        let mut obj = serde_json::Map::new();
        obj.insert("schema".into(), SCHEMA.into());
        match value {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("result".into(), other);
            }
        }
        writeln!(self.out, "{}", serde_json::to_string(&Value::Object(obj))?)?;
        Ok(())
    }

    fn line(&mut self, text: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{text}")?;
        Ok(())
    }

    fn raw(&mut self, text: &str) -> Result<()> {
        self.out.write_all(text.as_bytes())?;
        Ok(())
    }

    fn float(&self, x: f64) -> String {
        format_significant(x, self.precision)
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        seed: cli.seed,
        state_cap: cli.state_cap,
        precision: cli.precision,
        out,
    };
    match run(&mut ctx, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let report = json!({
                "schema": SCHEMA,
                "error": {"code": e.code(), "message": e.to_string()},
            });
            let _ = writeln!(err, "{report}");
            e.exit_code()
        }
    }
}

fn run(ctx: &mut Ctx, command: Command) -> Result<()> {
    match command {
        Command::Sofic(c) => run_sofic(ctx, c),
        Command::Bernoulli(c) => run_bernoulli(ctx, c),
        Command::Pisot(c) => run_pisot(ctx, c),
        Command::Spectrum(c) => run_spectrum(ctx, c),
        Command::Automata(c) => run_automata(ctx, c),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn read_linrep(path: &PathBuf) -> Result<LinearRepresentation> {
    LinearRepresentation::from_json(read_json::<LinearRepresentationJson>(path)?)
}

fn read_markov(path: &PathBuf) -> Result<MarkovMeasure> {
    MarkovMeasure::from_json(read_json::<MarkovJson>(path)?)
}

fn to_value<T: Serialize>(x: T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn run_sofic(ctx: &mut Ctx, cmd: SoficCmd) -> Result<()> {
    match cmd {
        SoficCmd::Cylinder { input, word } => {
            let word = parse_word(&word)?;
            let value = match (&input.linrep, &input.markov) {
                (Some(p), _) => read_linrep(p)?.cylinder(&word)?,
                (None, Some(p)) => read_markov(p)?.cylinder(&word)?,
                (None, None) => {
                    return Err(Error::Parse("give --linrep or --markov".into()));
                }
            };
            ctx.line(value)
        }
        SoficCmd::ToLinear { markov } => {
            let lr = markov_to_linear(&read_markov(&markov)?);
            ctx.json(to_value(lr.to_json())?)
        }
        SoficCmd::PushForward { linrep, map } => {
            let images = map
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad letter {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let lr = push_forward(&read_linrep(&linrep)?, &LetterMap::from_images(images))?;
            ctx.json(to_value(lr.to_json())?)
        }
        SoficCmd::ToMarkov { linrep } => {
            let (markov, psi) = linear_to_markov(&read_linrep(&linrep)?)?;
            ctx.json(json!({"markov": to_value(markov.to_json())?, "psi": psi.images()}))
        }
        SoficCmd::Stationary { linrep } => {
            let stationary = read_linrep(&linrep)?.is_stationary();
            ctx.json(json!({ "stationary": stationary }))
        }
    }
}

fn int_rows(rows: Vec<Vec<BigInt>>) -> Vec<Vec<String>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|x| x.to_string()).collect())
        .collect()
}

fn q_rows(rows: Vec<Vec<Q>>) -> Vec<Vec<String>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|x| x.to_string()).collect())
        .collect()
}

fn q_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn run_bernoulli(ctx: &mut Ctx, cmd: BernoulliCmd) -> Result<()> {
    match cmd {
        BernoulliCmd::Matrices { spec } => {
            let eta = BernoulliMeasure::new(spec.spec()?)?;
            ctx.json(to_value(eta.report())?)
        }
        BernoulliCmd::Measure { spec, q, digits } => {
            let eta = BernoulliMeasure::new(spec.spec()?)?;
            ctx.line(eta.interval_measure(q, &parse_word(&digits)?)?)
        }
        BernoulliCmd::Count { spec, n, k } => {
            let spec = spec.spec()?;
            let count = match k {
                Some(k) => count_k(&spec, n, k),
                None => count_representations(&spec, n),
            };
            ctx.line(count)
        }
        BernoulliCmd::Table { spec, digits } => {
            let table = matrix_count_table(&spec.spec()?, &parse_word(&digits)?)?;
            ctx.json(json!({ "table": int_rows(table) }))
        }
        BernoulliCmd::Normalize { spec, digits } => {
            let out = normalize_digits(&spec.spec()?, &parse_word(&digits)?)?;
            ctx.line(format_word(&out))
        }
        BernoulliCmd::Export { spec } => {
            let export = symbolic_markov_export(&spec.spec()?)?;
            let block_p: Vec<Q> = export.markov_block_initial.p().to_vec();
            ctx.json(json!({
                "P": q_rows(export.markov.transition().to_rows()),
                "p": q_vec(export.markov.p()),
                "block_initial": q_vec(&block_p),
                "block_initial_factor": export.block_initial_factor,
                "psi": export.psi.images(),
            }))
        }
    }
}

/// Constant-first coefficients; a list monic only when reversed is read leading-first.
pub fn parse_minpoly(text: &str) -> Result<Vec<BigInt>> {
    let coeffs = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let one = BigInt::from(1);
    if coeffs.last() != Some(&one) && coeffs.first() == Some(&one) && coeffs.len() > 1 {
        return Ok(coeffs.into_iter().rev().collect());
    }
    Ok(coeffs)
}

fn parse_pair(text: &str) -> Result<(Q, Q)> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [lo, hi] => Ok((parse_rational(lo)?, parse_rational(hi)?)),
        _ => Err(Error::Parse(format!("expected lo,hi, got {text:?}"))),
    }
}

impl BaseArgs {
    fn field(&self) -> Result<Field> {
        if let Some(b) = self.integer {
            return FieldDescriptor::integer(b);
        }
        let minpoly = parse_minpoly(self.minpoly.as_deref().unwrap_or_default())?;
        let (lo, hi) = match &self.interval {
            Some(i) => parse_pair(i)?,
            None => return Err(Error::Parse("--interval is required with --minpoly".into())),
        };
        FieldDescriptor::new(minpoly, lo, hi)
    }

    fn base(&self, cap: usize) -> Result<PisotBase> {
        let field = self.field()?;
        let d = match self.d {
            Some(d) => d,
            None => field
                .beta()
                .ceil()
                .try_into()
                .map_err(|_| Error::InvalidInput("β too large".into()))?,
        };
        Ok(PisotBase::new(&field, d)?.with_state_cap(cap))
    }
}

fn probabilities(p: &Option<String>, d: usize) -> Result<Vec<Q>> {
    match p {
        Some(p) => parse_rational_list(p),
        None => Ok(vec![Q::new(1.into(), BigInt::from(d)); d]),
    }
}

fn run_pisot(ctx: &mut Ctx, cmd: PisotCmd) -> Result<()> {
    match cmd {
        PisotCmd::States { base, window } => {
            let pb = base.base(ctx.state_cap)?;
            let window: Window = window.parse()?;
            let t = build_transducer(&pb, window)?;
            let json = t.to_json();
            ctx.json(json!({
                "field": to_value(DescriptorJson::from_field(pb.field()))?,
                "d": pb.d(),
                "window": window,
                "states": json.states,
                "coordinates": json.coordinates,
            }))
        }
        PisotCmd::Transducer { base, window, dot } => {
            let pb = base.base(ctx.state_cap)?;
            let t = build_transducer(&pb, window.parse()?)?;
            if let Some(path) = dot {
                fs::write(path, t.to_dot())?;
            }
            match ctx.format {
                Format::Dot => ctx.raw(&t.to_dot()),
                _ => ctx.json(to_value(t.to_json())?),
            }
        }
        PisotCmd::Quasi { base } => {
            let q = quasi_expansion(&base.base(ctx.state_cap)?)?;
            ctx.json(json!({"digits": format_word(&q.digits), "T": q.period}))
        }
        PisotCmd::Words { base } => {
            let q = quasi_expansion(&base.base(ctx.state_cap)?)?;
            let words: Vec<String> = word_set(&q).iter().map(|w| format_word(w)).collect();
            ctx.json(json!({ "words": words }))
        }
        PisotCmd::Admissible { base, word } => {
            let q = quasi_expansion(&base.base(ctx.state_cap)?)?;
            ctx.json(json!({ "admissible": is_admissible(&parse_word(&word)?, &q) }))
        }
        PisotCmd::Count { base, word } => {
            let counter = RedundancyCounter::new(&base.base(ctx.state_cap)?)?;
            ctx.line(counter.count(&parse_word(&word)?)?)
        }
        PisotCmd::Normalize { base, word } => {
            let form = normalize_pisot(&base.base(ctx.state_cap)?, &parse_word(&word)?)?;
            ctx.json(json!({
                "integer_digits": form.integer_digits,
                "digits": format_word(&form.digits),
            }))
        }
        PisotCmd::Matrices { base, p } => {
            let pb = base.base(ctx.state_cap)?;
            let m = PisotMeasure::new(&pb, probabilities(&p, pb.d())?)?;
            let words: Vec<String> = m.w_set().iter().map(|w| format_word(w)).collect();
            ctx.json(json!({
                "states": m.states().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "M": m.matrices().iter().map(|x| q_rows(x.to_rows())).collect::<Vec<_>>(),
                "W": words,
                "M_W": m.w_matrices().iter().map(|x| q_rows(x.to_rows())).collect::<Vec<_>>(),
                "C": q_vec(m.c()),
                "scale": m.scale(),
            }))
        }
        PisotCmd::Measure {
            base,
            p,
            state,
            word,
        } => {
            let pb = base.base(ctx.state_cap)?;
            let m = PisotMeasure::new(&pb, probabilities(&p, pb.d())?)?;
            let word = parse_word(&word)?;
            ctx.json(json!({
                "value": m.interval_measure(state, &word)?.to_string(),
                "normalized": m.normalized_interval_measure(state, &word)?.to_string(),
                "scale": m.scale(),
            }))
        }
    }
}

fn sequence_fn(name: &str) -> Result<impl Fn(u64) -> f64> {
    let seq: Sequence = name.parse()?;
    Ok(move |n| seq.value(n))
}

fn run_spectrum(ctx: &mut Ctx, cmd: SpectrumCmd) -> Result<()> {
    match cmd {
        SpectrumCmd::Profile { f, lo, hi, csv } => {
            let f = sequence_fn(&f)?;
            let series = profile(&f, lo, hi)?;
            let text = profile_csv(&series, ctx.precision);
            if let Some(path) = csv {
                fs::write(path, &text)?;
            }
            match ctx.format {
                Format::Csv => ctx.raw(&text),
                _ => {
                    let (min, max) = series.iter().fold(
                        (None::<(u64, f64)>, None::<(u64, f64)>),
                        |(lo, hi), &(n, r)| {
                            (
                                Some(lo.filter(|l| l.1 <= r).unwrap_or((n, r))),
                                Some(hi.filter(|h| h.1 >= r).unwrap_or((n, r))),
                            )
                        },
                    );
                    let pt = |p: Option<(u64, f64)>| p.map(|(n, r)| json!({"n": n, "ratio": r}));
                    ctx.json(json!({"lo": lo, "hi": hi, "len": series.len(), "min": pt(min), "max": pt(max)}))
                }
            }
        }
        SpectrumCmd::Level {
            f,
            alpha,
            eps,
            n,
            members,
        } => {
            let f = sequence_fn(&f)?;
            let ls = level_set(&f, alpha, eps, n)?;
            match ctx.format {
                Format::Csv => {
                    let text = ls.profile.to_csv(ctx.precision);
                    ctx.raw(&text)
                }
                _ => {
                    let p = &ls.profile;
                    let mut v = json!({
                        "alpha": alpha,
                        "eps": eps,
                        "N": p.horizon,
                        "count": p.count,
                        "density": p.natural_density().to_string(),
                        "dexp": p.exponential_density(),
                        "d_minus": p.d_minus.to_string(),
                        "d_plus": p.d_plus.to_string(),
                        "dexp_minus": p.dexp_minus,
                        "dexp_plus": p.dexp_plus,
                    });
                    if members {
                        v["members"] = to_value(&ls.members)?;
                    }
                    ctx.json(v)
                }
            }
        }
        SpectrumCmd::Alpha0 { k } => {
            let a = alpha0_estimate(k)?;
            let text = ctx.float(a);
            ctx.line(text)
        }
        SpectrumCmd::Lyapunov { mode, s } => {
            let mode: LyapunovMode = mode.parse()?;
            let est = lyapunov_estimate(mode, ctx.seed, s)?;
            ctx.json(to_value(est)?)
        }
        SpectrumCmd::Interleave { f, alpha, h, k_max } => {
            let f = sequence_fn(&f)?;
            let member = |k: usize, n: u64| {
                n >= 2 && growth_ratio(&f, n).is_ok_and(|r| (r - alpha).abs() <= 1.0 / k as f64)
            };
            let targets = |k: usize| DensityTargets::observed(&|n| member(k, n), h);
            let out = interleave(&member, &targets, h, k_max)?;
            let profile = crate::spectrum::DensityProfile::from_members(&out.members, h);
            ctx.json(json!({
                "cut_points": out.cut_points,
                "count": out.members.len(),
                "density": profile.natural_density().to_string(),
                "dexp": profile.exponential_density(),
            }))
        }
        SpectrumCmd::Stern { n } => ctx.line(stern(n)),
        SpectrumCmd::Runs { n } => {
            let runs = binary_runs(n)?;
            ctx.json(json!({ "a": runs.a }))
        }
        SpectrumCmd::Endpoints { k } => {
            let a = alpha0_estimate(k)?;
            let (typical, golden) = endpoint_constants(a);
            ctx.json(
                json!({"alpha0": a, "log3_minus_alpha0": typical, "log3_minus_log2_phi": golden}),
            )
        }
    }
}

/// `fixture:NAME`, `file:PATH`, `full:LETTERS`, each optionally `@x=0,y=1`.
enum Source {
    Graph(LabeledGraph),
    Image(LabeledGraph, BTreeMap<char, char>),
    Full(FullShift),
}

fn parse_letter_map(text: &str) -> Result<BTreeMap<char, char>> {
    text.split(',')
        .map(|pair| {
            let mut it = pair.trim().split('=');
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) if a.chars().count() == 1 && b.chars().count() == 1 => {
                    Ok((a.chars().next().unwrap(), b.chars().next().unwrap()))
                }
                _ => Err(Error::Parse(format!("bad letter map entry {pair:?}"))),
            }
        })
        .collect()
}

fn load_graph(spec: &str) -> Result<LabeledGraph> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return match name {
            "even-gap" => Ok(graph_fixtures::even_gap_automaton()),
            "even-gap-cover" => Ok(graph_fixtures::even_gap_markov_cover()),
            "three-letter" => Ok(graph_fixtures::three_letter_markov_graph()),
            _ => Err(Error::Parse(format!(
                "unknown fixture {name:?} (even-gap, even-gap-cover, three-letter)"
            ))),
        };
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    LabeledGraph::from_json(&read_json::<GraphJson>(&PathBuf::from(path))?)
}

fn load_source(spec: &str) -> Result<Source> {
    let (base, map) = match spec.split_once('@') {
        Some((b, m)) => (b, Some(parse_letter_map(m)?)),
        None => (spec, None),
    };
    if let Some(letters) = base.strip_prefix("full:") {
        return Ok(Source::Full(FullShift {
            letters: letters.chars().collect(),
        }));
    }
    let g = load_graph(base)?;
    Ok(match map {
        Some(m) => Source::Image(g, m),
        None => Source::Graph(g),
    })
}

fn with_source<T>(source: &Source, f: impl FnOnce(&dyn WordSource) -> T) -> Result<T> {
    Ok(match source {
        Source::Graph(g) => f(g),
        Source::Image(g, m) => f(&MorphismImage::new(g, m.clone())?),
        Source::Full(s) => f(s),
    })
}

fn run_automata(ctx: &mut Ctx, cmd: AutomataCmd) -> Result<()> {
    match cmd {
        AutomataCmd::Accepts { graph, word } => {
            let accepted = load_graph(&graph)?.accepts_factor(&word)?;
            ctx.json(json!({ "accepted": accepted }))
        }
        AutomataCmd::Image { graph, map, len } => {
            let g = load_graph(&graph)?;
            let words =
                crate::automata::morphism_image_language(&g, &parse_letter_map(&map)?, len)?;
            ctx.json(json!({ "words": words }))
        }
        AutomataCmd::Compare { left, right, len } => {
            let (l, r) = (load_source(&left)?, load_source(&right)?);
            let cmp = with_source(&l, |a| {
                with_source(&r, |b| languages_equal_up_to(a, b, len))
            })??;
            ctx.json(to_value(cmp)?)
        }
        AutomataCmd::Show { graph } => {
            let g = load_graph(&graph)?;
            match ctx.format {
                Format::Dot => ctx.raw(&g.to_dot("graph")),
                _ => ctx.json(to_value(g.to_json())?),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("soficonv").chain(args.iter().copied());
        let code = dispatch(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn minpoly_orders() {
        let int = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(parse_minpoly("-1,-1,1").unwrap(), int(&[-1, -1, 1]));
        assert_eq!(parse_minpoly("1,-1,-1").unwrap(), int(&[-1, -1, 1]));
        assert_eq!(parse_minpoly("1,-3,1").unwrap(), int(&[1, -3, 1]));
        assert_eq!(parse_minpoly("-2,1").unwrap(), int(&[-2, 1]));
    }

    #[test]
    fn scalar_outputs() {
        assert_eq!(
            run_cli(&["bernoulli", "count", "--b", "2", "--d", "3", "--n", "6"]).1,
            "3\n"
        );
        assert_eq!(run_cli(&["spectrum", "stern", "--n", "4"]).1, "3\n");
    }

    #[test]
    fn quasi_output() {
        let (code, out, _) = run_cli(&[
            "pisot",
            "quasi",
            "--minpoly",
            "1,-1,-1",
            "--interval",
            "1.5,1.7",
        ]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            "{\"schema\":\"soficonv/1\",\"digits\":\"10\",\"T\":2}\n"
        );
    }

    #[test]
    fn error_codes() {
        let (code, _, err) = run_cli(&[
            "pisot",
            "quasi",
            "--minpoly",
            "1,-3,1",
            "--interval",
            "2.5,2.7",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("NOT_FINITE_RENYI"));
        let (code, _, err) = run_cli(&[
            "pisot",
            "states",
            "--minpoly",
            "-1,-1,1",
            "--interval",
            "1.5,1.7",
            "--d",
            "2",
            "--state-cap",
            "2",
        ]);
        assert_eq!(code, 4);
        assert!(err.contains("STATE_CAP_EXCEEDED"));
        assert_eq!(run_cli(&["bernoulli", "frobnicate"]).0, 2);
        assert_eq!(
            run_cli(&["bernoulli", "count", "--b", "2", "--d", "3", "--n", "x"]).0,
            2
        );
    }
}
