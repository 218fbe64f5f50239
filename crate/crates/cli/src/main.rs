use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use idta::acceptance::{run_criterion, CRITERIA};
use idta::ltl::{diamond_to_rtltl, mitl_eval, mitl_to_diamond, tltl_eval, tltl_to_tfo_sentence};
use idta::mso::{automaton_to_sentence, tmso_eval, tmso_to_idta, Mso, Valuation};
use idta::omega::BoolOp;
use idta::operators::NoResolver;
use idta::parse::{
    fmt_idta, fmt_recursive, parse_mitl, parse_mso, parse_recursive, parse_registry, parse_timed_word,
    parse_tltl,
};
use idta::recursive::{
    ridta_combine, ridta_membership, ridta_to_rtmso, rtltl_eval, rtmso_to_ridta, RecursiveAutomaton, Registry, Session,
};
use idta::symbolic::{complement_idta, from_proper, is_empty_symbolic, to_proper};
use idta::{Action, Config, Error};

#[derive(Parser, Debug)]
#[command(name = "idta", version, about = "Timed automata with input-determined guards")]
struct Cli {
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Minimum number of period blocks tabulated before reading off a periodic pattern.
    #[arg(long = "stabilize-K", global = true)]
    stabilize_k: Option<usize>,
    /// Largest number of states a single construction may create.
    #[arg(long, global = true)]
    state_cap: Option<usize>,
    /// Largest number of clauses guard normalisation may produce.
    #[arg(long, global = true)]
    dnf_cap: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Logic {
    Tltl,
    Rtltl,
    Mitl,
    Tmso,
    Rtmso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Mitl,
    Tltl,
    Rtltl,
    Idta,
    Ridta,
    Tmso,
    Rtmso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// Metric formula in the eventuality fragment.
    Diamond,
    Rtltl,
    Tmso,
    Rtmso,
    Idta,
    Ridta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Union,
    Intersection,
    Difference,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on a timed word at a position.
    Eval {
        #[arg(long, value_enum)]
        logic: Logic,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long, default_value_t = 0)]
        position: usize,
        /// Named floating automata and formulas referenced by the formula.
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Decide whether an automaton accepts a timed word.
    Member {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Translate between logics and automata.
    Translate {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Action alphabet for formula-to-automaton translations, comma separated.
        #[arg(long, value_delimiter = ',')]
        alphabet: Option<Vec<String>>,
    },
    /// Complement an automaton.
    Complement {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boolean combination of two automata.
    Combine {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert an automaton to its proper-alphabet form.
    Proper {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emptiness of the underlying symbolic automaton.
    EmptySymbolic {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn line(&self) -> String {
        match self {
            Failure::Core(e) => format!("{}: {}", e.kind(), e.to_string().replace('\n', " ")),
            Failure::Io(m) => format!("io: {m}"),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

/// Result of a command: stdout text, structured form, and whether the verdict was positive.
struct Report {
    text: String,
    json: Value,
    positive: bool,
}

impl Report {
    fn verdict(verb: &str, word: &str, positive: bool) -> Self {
        Report {
            text: format!("{word}\n"),
            json: json!({ "verb": verb, "verdict": word }),
            positive,
        }
    }
}

fn read(p: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
}

fn emit(verb: &str, text: String, out: &Option<PathBuf>) -> Outcome {
    if let Some(p) = out {
        fs::write(p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
        return Ok(Report {
            text: format!("wrote {}\n", p.display()),
            json: json!({ "verb": verb, "output": p.display().to_string() }),
            positive: true,
        });
    }
    Ok(Report {
        json: json!({ "verb": verb, "result": text }),
        text,
        positive: true,
    })
}

fn registry_of(p: &Option<PathBuf>) -> std::result::Result<Registry, Failure> {
    match p {
        Some(p) => Ok(parse_registry(&read(p)?)?),
        None => Ok(Registry::new()),
    }
}

fn automaton(p: &Path) -> std::result::Result<RecursiveAutomaton, Failure> {
    Ok(parse_recursive(&read(p)?)?)
}

/// Valuation for a monadic formula: a single free first-order variable is bound to `position`.
fn valuation_for(f: &Mso<Action>, position: usize) -> std::result::Result<Valuation, Failure> {
    let (fo, so) = f.free_vars();
    if let Some(x) = so.iter().next() {
        return Err(Error::FreeVariable(x.clone()).into());
    }
    let mut v = Valuation::new();
    let mut fo = fo.into_iter();
    if let Some(x) = fo.next() {
        v = v.with(&x, position);
    }
    if let Some(y) = fo.next() {
        return Err(Error::FreeVariable(y).into());
    }
    Ok(v)
}

fn alphabet_or(given: &Option<Vec<String>>, fallback: Vec<Action>) -> Vec<Action> {
    let mut out = given.clone().unwrap_or(fallback);
    out.sort();
    out.dedup();
    out
}

fn run(cli: &Cli) -> Outcome {
    let mut cfg = Config::default();
    if let Some(k) = cli.stabilize_k {
        cfg.stabilize_k = k;
    }
    if let Some(c) = cli.state_cap {
        cfg.state_cap = c;
    }
    if let Some(c) = cli.dnf_cap {
        cfg.dnf_cap = c;
    }
    match &cli.command {
        Command::Eval {
            logic,
            formula,
            word,
            position,
            registry,
        } => {
            let src = read(formula)?;
            let w = parse_timed_word(&read(word)?)?;
            let reg = registry_of(registry)?;
            let session = Session::new(&reg, &cfg);
            let i = *position;
            let v = match logic {
                Logic::Tltl => tltl_eval(&parse_tltl(&src)?, &w, i, &NoResolver, &cfg)?,
                Logic::Rtltl => rtltl_eval(&parse_tltl(&src)?, &w, i, &session)?,
                Logic::Mitl => mitl_eval(&parse_mitl(&src)?, &w, i, &cfg)?,
                Logic::Tmso => {
                    let f = parse_mso(&src)?;
                    tmso_eval(&f, &w, &valuation_for(&f, i)?, &NoResolver, &cfg)?
                }
                Logic::Rtmso => {
                    let f = parse_mso(&src)?;
                    tmso_eval(&f, &w, &valuation_for(&f, i)?, &session, &cfg)?
                }
            };
            Ok(Report::verdict("eval", if v { "TRUE" } else { "FALSE" }, v))
        }
        Command::Member { automaton: a, word } => {
            let a = automaton(a)?;
            let w = parse_timed_word(&read(word)?)?;
            let v = ridta_membership(&a, &w, &cfg)?;
            Ok(Report::verdict("member", if v { "ACCEPT" } else { "REJECT" }, v))
        }
        Command::Translate {
            from,
            to,
            input,
            out,
            alphabet,
        } => {
            let src = read(input)?;
            let text = match (from, to) {
                (Source::Mitl, Target::Diamond) => format!("{}\n", mitl_to_diamond(&parse_mitl(&src)?)),
                (Source::Mitl, Target::Rtltl) => {
                    format!("{}\n", diamond_to_rtltl(&mitl_to_diamond(&parse_mitl(&src)?))?)
                }
                (Source::Tltl, Target::Tmso) | (Source::Rtltl, Target::Rtmso) => {
                    format!("{}\n", tltl_to_tfo_sentence(&parse_tltl(&src)?))
                }
                (Source::Idta, Target::Tmso) => {
                    let a = automaton(input)?;
                    if !a.registry.entries.is_empty() {
                        return Err(Error::Unsupported("registry blocks in a plain automaton; use ridta".into()).into());
                    }
                    format!("{}\n", automaton_to_sentence(&a.base))
                }
                (Source::Ridta, Target::Rtmso) => format!("{}\n", ridta_to_rtmso(&automaton(input)?)?),
                (Source::Tmso, Target::Idta) => {
                    let f = parse_mso(&src)?;
                    let sigma = alphabet_or(alphabet, f.letters());
                    fmt_idta(&from_proper(&tmso_to_idta(&f, &sigma, &cfg)?))
                }
                (Source::Rtmso, Target::Ridta) => {
                    let f = parse_mso(&src)?;
                    let sigma = alphabet_or(alphabet, f.letters());
                    fmt_recursive(&rtmso_to_ridta(&f, &sigma, &cfg)?)
                }
                (f, t) => {
                    return Err(Error::Unsupported(format!("translation from {f:?} to {t:?}").to_lowercase()).into())
                }
            };
            emit("translate", text, out)
        }
        Command::Complement { automaton: a, out } => {
            let a = automaton(a)?;
            let base = complement_idta(&a.base, &cfg)?;
            emit("complement", fmt_recursive(&RecursiveAutomaton::new(base, a.registry)), out)
        }
        Command::Combine { op, left, right, out } => {
            let (l, r) = (automaton(left)?, automaton(right)?);
            let op = match op {
                Op::Union => BoolOp::Union,
                Op::Intersection => BoolOp::Intersection,
                Op::Difference => BoolOp::Difference,
            };
            emit("combine", fmt_recursive(&ridta_combine(op, &l, &r, &cfg)?), out)
        }
        Command::Proper { automaton: a, out } => {
            let a = automaton(a)?;
            let base = from_proper(&to_proper(&a.base, &cfg)?);
            emit("proper", fmt_recursive(&RecursiveAutomaton::new(base, a.registry)), out)
        }
        Command::EmptySymbolic { automaton: a } => {
            let a = automaton(a)?;
            let (empty, witness) = is_empty_symbolic(&a.base);
            let mut r = Report::verdict("empty-symbolic", if empty { "EMPTY" } else { "NONEMPTY" }, empty);
            if let Some(w) = witness {
                let show = |ls: &[idta::symbolic::SymbolicLetter]| {
                    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
                };
                let (stem, cycle) = (show(&w.stem), show(&w.cycle));
                r.text.push_str(&format!("stem: {stem}\nperiod: {cycle}\n"));
                r.json["witness"] = json!({ "stem": stem, "period": cycle });
            }
            Ok(r)
        }
        Command::Selftest { criterion } => {
            let ids: Vec<usize> = if criterion.is_empty() {
                CRITERIA.iter().map(|c| c.0).collect()
            } else {
                criterion.clone()
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut all = true;
            for id in ids {
                let r = run_criterion(id, cli.seed, &cfg)?;
                let verdict = if r.ok() { "PASS" } else { "FAIL" };
                text.push_str(&format!("[{verdict}] {:>2} {}: {}/{} cases\n", r.id, r.name, r.passed, r.cases));
                for f in &r.failures {
                    text.push_str(&format!("    {}\n", f.replace('\n', "\n    ")));
                }
                eprintln!("criterion {} took {:.2}s", r.id, r.elapsed.as_secs_f64());
                rows.push(json!({
                    "id": r.id,
                    "name": r.name,
                    "cases": r.cases,
                    "passed": r.passed,
                    "within_limit": r.within_limit(),
                    "limit_s": r.limit.map(|l| l.as_secs()),
                    "ok": r.ok(),
                    "failures": r.failures,
                }));
                all &= r.ok();
            }
            Ok(Report {
                text,
                json: json!({ "verb": "selftest", "seed": cli.seed, "ok": all, "criteria": rows }),
                positive: all,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(r) => {
            let mut out = std::io::stdout().lock();
            let _ = match cli.format {
                Format::Text => out.write_all(r.text.as_bytes()),
                Format::JsonReport => writeln!(out, "{}", r.json),
            };
            if r.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(2)
        }
    }
}
