//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::coherence::{
    check_a1, check_a2, check_a3, check_a4, check_all, A3Mode, Analysis, CheckOptions, Status, Verdict,
};
use crate::constructions::{
    fraction_compose, fraction_equal, tietze_script, Fraction, FractionEq, FractionStrategy, DEFAULT_TIETZE_BUDGET,
};
use crate::core::search::SearchLimits;
use crate::core::{parse_path, parse_presentation, parse_word, print_presentation, Path, Presentation};
use crate::critical::{check_cylinder, enumerate_critical_cylinders, enumerate_critical_pairs};
use crate::objects::normalize;
use crate::oracle::{compare_constructions, enumerate_hom_classes};
use crate::residuation::{derive_residual_table, Residuator};

#[derive(Parser, Debug)]
#[command(name = "cohpres", version, about = "Check and compute with presentations modulo equational rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    A1,
    A2,
    A3,
    A3x,
    A4,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Ds2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Auto,
    Nf,
    Mediating,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the coherence assumptions.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        assumption: Which,
        /// Exempt cylinders whose vertical residuals are single steps from the 2-weight check.
        #[arg(long)]
        strong: bool,
        /// Write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        max_named: usize,
    },
    /// Normalize an object word.
    Nf { file: PathBuf, word: String },
    /// Residuals of two coinitial paths, one of them equational.
    Residual {
        file: PathBuf,
        g: String,
        f: String,
        /// Also print the 2-cell from `f ; g/f` to `g ; f/g`.
        #[arg(long)]
        witness: bool,
    },
    /// Critical pairs and cylinders.
    Critical {
        file: PathBuf,
        #[arg(long)]
        pairs: bool,
        #[arg(long)]
        cylinders: bool,
    },
    /// Hom-set classes between two words.
    Enumerate {
        file: PathBuf,
        src: String,
        tgt: String,
        #[arg(long, default_value_t = 5)]
        max_steps: usize,
    },
    /// Compare class counts of the normal-form, quotient and localization constructions.
    Compare {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_word: usize,
        #[arg(long, default_value_t = 5)]
        max_steps: usize,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
    },
    /// Compose or compare fractions, each given as a numerator and an equational denominator.
    Fractions {
        file: PathBuf,
        #[arg(long, num_args = 4, value_names = ["NUM1", "DEN1", "NUM2", "DEN2"], conflicts_with = "equal")]
        compose: Option<Vec<String>>,
        #[arg(long, num_args = 4, value_names = ["NUM1", "DEN1", "NUM2", "DEN2"])]
        equal: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: Strategy,
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Apply a script of Tietze transformations.
    Tietze {
        file: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(short = 'o', long = "output")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TIETZE_BUDGET)]
        budget: usize,
    },
}

struct Failure(i32, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn load(file: &PathBuf) -> Result<Presentation, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    parse_presentation(&text).map_err(|e| usage(format!("{}: {e}", file.display())))
}

fn path_arg(p: &Presentation, s: &str) -> Result<Path, Failure> {
    parse_path(p, s).map_err(|e| usage(format!("`{s}`: {e}")))
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut buf = Vec::new();
    let code = match dispatch(cli.command, &mut buf) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            if code != 2 {
                let _ = writeln!(buf, "WITNESS: {msg}");
            }
            code
        }
    };
    let _ = out.write_all(&buf);
    let _ = out.flush();
    code
}

fn line(out: &mut Vec<u8>, s: impl AsRef<str>) {
    out.extend_from_slice(s.as_ref().as_bytes());
    out.push(b'\n');
}

fn print_verdict(out: &mut Vec<u8>, name: &str, v: &Verdict) {
    let sampled = if v.sampled { " (sampled)" } else { "" };
    match &v.reason {
        Some(r) => line(out, format!("{name}: {}{sampled} ({r})", v.verdict)),
        None => line(out, format!("{name}: {}{sampled}", v.verdict)),
    }
    if v.verdict != Status::Pass {
        for w in &v.witnesses {
            line(out, format!("WITNESS: {name}: {w}"));
        }
        if v.witnesses.is_empty() {
            line(out, format!("WITNESS: {name}: {}", v.reason.as_deref().unwrap_or("inconclusive")));
        }
    }
}

fn dispatch(cmd: Command, out: &mut Vec<u8>) -> Result<i32, Failure> {
    match cmd {
        Command::Check { file, assumption, strong, report, max_named } => {
            let p = load(&file)?;
            let opts = CheckOptions { strong, limits: SearchLimits::depth(max_named), ..CheckOptions::default() };
            if assumption == Which::All {
                let r = check_all(&p, opts);
                for d in &r.diagnostics {
                    line(out, format!("diagnostic: {d}"));
                }
                let s = &r.assumptions;
                print_verdict(out, "A1", &s.a1);
                print_verdict(out, "A2", &s.a2);
                print_verdict(out, "A3", &s.a3);
                if let Some(x) = &s.a3x {
                    print_verdict(out, "A3′", x);
                }
                print_verdict(out, "A4", &s.a4);
                line(out, format!("coherent: {}", r.coherent));
                line(out, format!("faithful embedding: {}", r.faithful_embedding));
                if let Some(path) = report {
                    let json = serde_json::to_string_pretty(&r).expect("reports serialize");
                    std::fs::write(&path, json + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?;
                }
                return Ok(if r.coherent == Status::Pass { 0 } else { 1 });
            }
            if report.is_some() {
                return Err(usage("--report needs --assumption all"));
            }
            let a = Analysis::new(&p, opts.limits);
            let a1 = check_a1(&a, opts.termination_budget);
            let (name, v) = match assumption {
                Which::A1 => ("A1", a1),
                Which::A2 => (
                    "A2",
                    if a1.is_pass() { check_a2(&a, p.weights.own.omega1.as_ref()) } else { Verdict::inconclusive("A1 does not hold") },
                ),
                Which::A3 => ("A3", check_a3(&a, A3Mode::Strict, &a1)),
                Which::A3x => ("A3′", check_a3(&a, A3Mode::UpToExchange, &a1)),
                Which::A4 => {
                    let a3 = check_a3(&a, A3Mode::Strict, &a1);
                    let cyl = if a3.is_fail() { check_a3(&a, A3Mode::UpToExchange, &a1) } else { a3 };
                    ("A4", check_a4(&a, &p.weights.own, strong, &cyl))
                }
                Which::All => unreachable!(),
            };
            print_verdict(out, name, &v);
            Ok(if v.is_pass() { 0 } else { 1 })
        }
        Command::Nf { file, word } => {
            let p = load(&file)?;
            let w = parse_word(&p, &word).map_err(|e| usage(format!("`{word}`: {e}")))?;
            let n = normalize(&p, &w).map_err(|e| Failure(1, e.to_string()))?;
            line(out, p.show_word(&n.normal));
            line(out, p.show_path(&n.path));
            Ok(0)
        }
        Command::Residual { file, g, f, witness } => {
            let p = load(&file)?;
            let (g, f) = (path_arg(&p, &g)?, path_arg(&p, &f)?);
            let table = derive_residual_table(&p);
            let mut r = Residuator::new(&p, &table);
            let (g_f, f_g) = r.residuals(&g, &f).map_err(|e| Failure(1, e.to_string()))?;
            line(out, format!("g/f = {}", p.show_path(&g_f)));
            line(out, format!("f/g = {}", p.show_path(&f_g)));
            if witness {
                let t = r.witness(&g, &f).map_err(|e| Failure(1, e.to_string()))?;
                line(out, format!("witness: {}", t.show(&p)));
            }
            Ok(0)
        }
        Command::Critical { file, pairs, cylinders } => {
            let p = load(&file)?;
            let table = derive_residual_table(&p);
            let (show_pairs, show_cyl) = if !pairs && !cylinders { (true, true) } else { (pairs, cylinders) };
            let mut code = 0;
            if show_pairs {
                for c in enumerate_critical_pairs(&p, &table) {
                    match c.resolved {
                        Some(i) => line(out, format!("pair: {} resolved by {}", c.show(&p), p.rels[table.entries[i].relation].name)),
                        None => {
                            line(out, format!("pair: {} unresolved", c.show(&p)));
                            line(out, format!("WITNESS: unresolved critical pair {}", c.show(&p)));
                            code = 1;
                        }
                    }
                }
            }
            if show_cyl {
                for c in enumerate_critical_cylinders(&p) {
                    let flavor = match c.flavor {
                        crate::core::Flavor::EquationalVertical => "equational vertical",
                        crate::core::Flavor::EquationalBase => "equational base",
                    };
                    match check_cylinder(&p, &table, &c, SearchLimits::default()) {
                        Ok(v) => {
                            let targets = match v.targets {
                                crate::critical::TargetsEqual::Equal => "equal",
                                crate::critical::TargetsEqual::ExchangeEqual => "exchange-equal",
                                crate::critical::TargetsEqual::Unequal => "unequal",
                            };
                            let top = v.top.as_ref().map_or("none".to_string(), |t| t.show(&p));
                            line(out, format!("cylinder: {} ({flavor}); vertical residuals {targets}; top {top}", c.show(&p)));
                        }
                        Err(e) => {
                            line(out, format!("cylinder: {} ({flavor}); {e}", c.show(&p)));
                            line(out, format!("WITNESS: cylinder {}: {e}", c.show(&p)));
                            code = 1;
                        }
                    }
                }
            }
            Ok(code)
        }
        Command::Enumerate { file, src, tgt, max_steps } => {
            let p = load(&file)?;
            let s = parse_word(&p, &src).map_err(|e| usage(format!("`{src}`: {e}")))?;
            let t = parse_word(&p, &tgt).map_err(|e| usage(format!("`{tgt}`: {e}")))?;
            let h = enumerate_hom_classes(&p, &s, &t, max_steps).map_err(|e| Failure(1, e.to_string()))?;
            line(out, format!("{} classes", h.count()));
            for (i, c) in h.classes.iter().enumerate() {
                let paths: Vec<String> = c.iter().map(|q| p.show_path(q)).collect();
                line(out, format!("class {}: {}", i + 1, paths.join(" | ")));
            }
            Ok(0)
        }
        Command::Compare { file, max_word, max_steps, oracle } => {
            let p = load(&file)?;
            let table = derive_residual_table(&p);
            let c = compare_constructions(&p, &table, max_word, max_steps, oracle == Some(Oracle::Ds2), SearchLimits::default())
                .map_err(|e| Failure(1, e.to_string()))?;
            for r in &c.rows {
                let mut parts = Vec::new();
                if let Some(n) = r.normal_form {
                    parts.push(format!("normal forms {n}"));
                }
                if let Some(n) = r.quotient {
                    parts.push(format!("quotient {n}"));
                }
                if let Some(n) = r.localization {
                    parts.push(format!("localization {n}"));
                }
                if let Some(n) = r.surjections {
                    parts.push(format!("surjections {n}"));
                }
                line(out, format!("hom({}, {}): {}", r.source, r.target, parts.join(", ")));
            }
            if let Some(f) = &c.fractions {
                line(out, format!("fractions: {}/{} sampled pairs agree, {} equal", f.agree, f.pairs, f.equal));
            }
            for m in &c.mismatches {
                line(out, format!("WITNESS: {m}"));
            }
            Ok(if c.agrees() { 0 } else { 1 })
        }
        Command::Fractions { file, compose, equal, strategy, budget } => {
            let p = load(&file)?;
            let table = derive_residual_table(&p);
            let args = compose.as_ref().or(equal.as_ref()).ok_or_else(|| usage("give --compose or --equal"))?;
            let paths: Vec<Path> = args.iter().map(|s| path_arg(&p, s)).collect::<Result<_, _>>()?;
            let a = Fraction::new(&p, paths[0].clone(), paths[1].clone()).map_err(|e| usage(e.to_string()))?;
            let b = Fraction::new(&p, paths[2].clone(), paths[3].clone()).map_err(|e| usage(e.to_string()))?;
            if compose.is_some() {
                let c = fraction_compose(&p, &table, &a, &b).map_err(|e| Failure(1, e.to_string()))?;
                line(out, c.show(&p));
                return Ok(0);
            }
            let strategy = match strategy {
                Strategy::Nf => FractionStrategy::NormalForm,
                Strategy::Mediating => FractionStrategy::Mediating,
                Strategy::Auto => {
                    if check_all(&p, CheckOptions::default()).coherent == Status::Pass {
                        FractionStrategy::NormalForm
                    } else {
                        FractionStrategy::Mediating
                    }
                }
            };
            let limits = SearchLimits::depth(budget);
            match fraction_equal(&p, &table, &a, &b, strategy, limits, budget).map_err(|e| usage(e.to_string()))? {
                FractionEq::Equal { w1, w2 } => {
                    line(out, format!("equal (w1 = {}, w2 = {})", p.show_path(&w1), p.show_path(&w2)));
                    Ok(0)
                }
                FractionEq::UnequalAtBudget => {
                    line(out, format!("unequal at budget {budget}"));
                    line(out, format!("WITNESS: no mediating paths for {} and {} within budget {budget}", a.show(&p), b.show(&p)));
                    Ok(1)
                }
            }
        }
        Command::Tietze { file, script, out: target, budget } => {
            let p = load(&file)?;
            let text = std::fs::read_to_string(&script).map_err(|e| usage(format!("{}: {e}", script.display())))?;
            let q = tietze_script(&p, &text, budget).map_err(|e| match e {
                crate::constructions::ConstructionError::Parse(m) => usage(m),
                other => Failure(1, other.to_string()),
            })?;
            std::fs::write(&target, print_presentation(&q)).map_err(|e| usage(format!("{}: {e}", target.display())))?;
            line(out, format!("{} generators, {} relations written to {}", q.gens.len(), q.rels.len(), target.display()));
            Ok(0)
        }
    }
}
