//! Command-line surface.  Every operation delegates to the library; the
//! only state is the files read and written.
//!
//! Exit codes: 0 on success or when every check passes, 1 on usage,
//! parse or validation errors, 2 when a check fails (a witness is
//! printed).  `--json` switches check reports to one JSON object per
//! line; data output (tables, counts, sequence files) is unaffected.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::arithprod::{
    boxtimes, check_normality, check_oplax_axioms, first_cardinality_gap, interchange_tau,
    unit_colours, ThetaMode, UnitSlot,
};
use crate::compose::kleisli_compose;
use crate::error::{Error, Result};
use crate::format::{load_seq, save_seq};
use crate::report::{key_label_in, render_all, Report, Status, Witness};
use crate::seq::{cardinality_table, SeqIso, SymSeq};
use crate::species::{
    analytic_eval, composite_analytic_check, product_count_formula, rectangle_count, species_e,
    species_l, species_x, AnalyticCheck,
};

#[derive(Parser)]
#[command(
    name = "symseq",
    version,
    about = "exact computation kit for coloured symmetric sequences"
)]
struct Cli {
    /// emit check reports as JSON records, one object per line
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a sequence file and check every structural invariant
    Validate {
        file: PathBuf,
    },
    /// Print the cardinality table of a sequence file
    Table {
        file: PathBuf,
    },
    /// Write the substitution composite N after M to a file
    Compose {
        /// outer factor (applied second)
        #[arg(value_name = "N")]
        n: PathBuf,
        /// inner factor (applied first)
        #[arg(value_name = "M")]
        m: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// keep only composite arities up to this bound
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Write the arithmetic product M1 ⊠ M2 to a file
    Boxtimes {
        m1: PathBuf,
        m2: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// keep only product arities up to this bound
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Build the interchange (N1∘M1) ⊠ (N2∘M2) -> (N1⊠N2) ∘ (M1⊠M2)
    /// and report its per-point class counts
    Tau {
        /// first inner factor
        #[arg(value_name = "M1")]
        m1: PathBuf,
        /// first outer factor
        #[arg(value_name = "N1")]
        n1: PathBuf,
        /// second inner factor
        #[arg(value_name = "M2")]
        m2: PathBuf,
        /// second outer factor
        #[arg(value_name = "N2")]
        n2: PathBuf,
        /// write the report records to this file instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
        /// keep only arities up to this bound everywhere
        #[arg(long)]
        max_arity: Option<usize>,
        /// exit 0 exactly when the interchange is not invertible
        #[arg(long)]
        expect_noninvertible: bool,
    },
    /// Structural checks with pass/fail reports
    #[command(subcommand)]
    Check(CheckCommand),
    /// Write a classical single-colour species to a file
    Species {
        kind: SpeciesKind,
        /// largest arity kept
        #[arg(long, value_name = "A")]
        truncate: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Independent counting oracles
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Interchange and unit coherence over every composable triple drawn
    /// from a directory of seed files
    Coherence {
        /// directory of .seq seed files
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        max_arity: usize,
    },
    /// Invertibility of the interchange with an identity pair in one slot
    Normality {
        /// inner factor
        #[arg(value_name = "M")]
        m: PathBuf,
        /// outer factor
        #[arg(value_name = "N")]
        n: PathBuf,
        #[arg(long)]
        side: Side,
        #[arg(long)]
        max_arity: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpeciesKind {
    /// sets: one structure per arity
    #[value(name = "E", alias = "e")]
    E,
    /// linear orders: n! structures at arity n
    #[value(name = "L", alias = "l")]
    L,
    /// the singleton: one structure at arity one
    #[value(name = "X", alias = "x")]
    X,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Arithmetic-product count at arity n by brute rectangle enumeration
    Rectangles {
        #[arg(value_name = "F")]
        f: PathBuf,
        #[arg(value_name = "G")]
        g: PathBuf,
        n: usize,
    },
    /// Structure count of the analytic functor on a k-point set
    Analytic {
        #[arg(value_name = "F")]
        f: PathBuf,
        k: usize,
    },
    /// Arithmetic-product count at arity n by the closed divisor formula
    Dh {
        #[arg(value_name = "F")]
        f: PathBuf,
        #[arg(value_name = "G")]
        g: PathBuf,
        n: usize,
    },
    /// Substitution composite versus analytic evaluation at a k-point set
    Plethysm {
        /// outer factor
        #[arg(value_name = "G")]
        g: PathBuf,
        /// inner factor
        #[arg(value_name = "F")]
        f: PathBuf,
        k: usize,
        /// largest composite arity evaluated before reporting inconclusive
        #[arg(long, default_value_t = 10)]
        budget: usize,
    },
}

/// Parse and run a command line (the first element is the program name);
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests land here too; only real usage
            // errors exit nonzero
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let json = cli.json;
    match cli.command {
        Command::Validate { file } => validate(&file, json),
        Command::Table { file } => {
            let seq = load(&file)?;
            print!("{}", cardinality_table(&seq));
            Ok(0)
        }
        Command::Compose {
            n,
            m,
            out,
            max_arity,
        } => {
            let outer = load(&n)?;
            let inner = load(&m)?;
            let composite = kleisli_compose(&inner, &outer, max_arity)
                .map_err(|e| hint_bound(e, max_arity.is_some()))?;
            save_seq(&out, composite.seq())?;
            println!("wrote {}: {}", out.display(), summary(composite.seq()));
            Ok(0)
        }
        Command::Boxtimes {
            m1,
            m2,
            out,
            max_arity,
        } => {
            let left = load(&m1)?;
            let right = load(&m2)?;
            let product = boxtimes(&left, &right, max_arity)
                .map_err(|e| hint_bound(e, max_arity.is_some()))?;
            save_seq(&out, product.seq())?;
            println!("wrote {}: {}", out.display(), summary(product.seq()));
            Ok(0)
        }
        Command::Tau {
            m1,
            n1,
            m2,
            n2,
            report,
            max_arity,
            expect_noninvertible,
        } => tau(
            &m1,
            &n1,
            &m2,
            &n2,
            report.as_deref(),
            max_arity,
            expect_noninvertible,
            json,
        ),
        Command::Check(check) => match check {
            CheckCommand::Coherence { seeds, max_arity } => coherence(&seeds, max_arity, json),
            CheckCommand::Normality {
                m,
                n,
                side,
                max_arity,
            } => normality(&m, &n, side, max_arity, json),
        },
        Command::Species {
            kind,
            truncate,
            out,
        } => {
            let built = match kind {
                SpeciesKind::E => species_e(truncate),
                SpeciesKind::L => species_l(truncate),
                SpeciesKind::X => species_x(),
            };
            let seq = truncate_seq(&built, truncate);
            save_seq(&out, &seq)?;
            println!("wrote {}: {}", out.display(), summary(&seq));
            Ok(0)
        }
        Command::Oracle(oracle) => match oracle {
            OracleCommand::Rectangles { f, g, n } => {
                let fs = load(&f)?;
                let gs = load(&g)?;
                println!("{}", rectangle_count(&fs, &gs, n)?);
                Ok(0)
            }
            OracleCommand::Analytic { f, k } => {
                let fs = load(&f)?;
                println!("{}", analytic_eval(&fs, k)?);
                Ok(0)
            }
            OracleCommand::Dh { f, g, n } => {
                let fs = load(&f)?;
                let gs = load(&g)?;
                println!("{}", product_count_formula(&fs, &gs, n)?);
                Ok(0)
            }
            OracleCommand::Plethysm { g, f, k, budget } => plethysm(&g, &f, k, budget, json),
        },
    }
}

// Parse and fully validate, naming the file in any failure.
fn load(path: &Path) -> Result<SymSeq> {
    load_seq(path).map_err(|e| Error::Invalid(format!("{}: {}", path.display(), e)))
}

// A construction that overflowed without a bound usually fits with one.
fn hint_bound(e: Error, bounded: bool) -> Error {
    match (&e, bounded) {
        (Error::Invalid(msg), false) => {
            Error::Invalid(format!("{} (a --max-arity bound may help)", msg))
        }
        _ => e,
    }
}

fn validate(file: &Path, json: bool) -> Result<i32> {
    let seq = load(file)?;
    let record = Report::pass("validate", format!("{}: {}", file.display(), summary(&seq)));
    print!("{}", render_all(&[record], json));
    Ok(0)
}

fn summary(seq: &SymSeq) -> String {
    let elements: usize = seq.support().map(|(_, set)| set.len()).sum();
    format!("{} keys, {} elements", seq.support_len(), elements)
}

// Keep keys with arity at most `max`.
fn truncate_seq(seq: &SymSeq, max: usize) -> SymSeq {
    let mut out = SymSeq::new(seq.outputs().clone(), seq.inputs().clone());
    for (key, set) in seq.support() {
        if key.0.len() <= max {
            out.insert(key.0.clone(), key.1, set.clone())
                .expect("filtered key stays valid");
        }
    }
    out
}

fn coherence(seeds: &Path, max_arity: usize, json: bool) -> Result<i32> {
    let mut files: Vec<PathBuf> = fs::read_dir(seeds)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "seq"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Invalid(format!(
            "no .seq files in {}",
            seeds.display()
        )));
    }
    let mut pool = Vec::with_capacity(files.len());
    for path in &files {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        pool.push((label, load(path)?));
    }

    let mut records = vec![];
    let mut failed = false;
    for (la, a) in &pool {
        for (lb, b) in &pool {
            if a.inputs() != b.outputs() {
                continue;
            }
            for (lc, c) in &pool {
                if b.inputs() != c.outputs() {
                    continue;
                }
                let triple = [a.clone(), b.clone(), c.clone()];
                let instance = format!(
                    "outer={} mid={} inner={} max-arity={}",
                    la, lb, lc, max_arity
                );
                match check_oplax_axioms(&triple, &triple, Some(max_arity), ThetaMode::Exchange) {
                    Ok(rep) if rep.all_hold() => records.push(Report::pass("coherence", instance)),
                    Ok(rep) => {
                        failed = true;
                        records.push(Report::fail(
                            "coherence",
                            instance,
                            Witness {
                                point: "axiom pasting".into(),
                                elements: rep.failures,
                            },
                        ));
                    }
                    Err(e) => {
                        failed = true;
                        records.push(Report::fail(
                            "coherence",
                            instance,
                            Witness {
                                point: "construction".into(),
                                elements: vec![e.to_string()],
                            },
                        ));
                    }
                }
            }
        }
    }
    if records.is_empty() {
        return Err(Error::Invalid(
            "no composable triples among the seed files".into(),
        ));
    }
    print!("{}", render_all(&records, json));
    Ok(if failed { 2 } else { 0 })
}

fn normality(
    m: &Path,
    n: &Path,
    side: Side,
    max_arity: Option<usize>,
    json: bool,
) -> Result<i32> {
    let args = load(m)?;
    let head = load(n)?;
    let slot = match side {
        Side::Left => UnitSlot::Left,
        Side::Right => UnitSlot::Right,
    };
    let instance = format!(
        "M={} N={} side={}",
        m.display(),
        n.display(),
        match side {
            Side::Left => "left",
            Side::Right => "right",
        }
    );
    match check_normality(&args, &head, slot, &unit_colours(), max_arity) {
        Ok(_) => {
            print!(
                "{}",
                render_all(&[Report::pass("normality", instance)], json)
            );
            Ok(0)
        }
        Err(Error::NotIso { context }) => {
            let witness = normality_witness(&args, &head, slot, max_arity, context);
            print!(
                "{}",
                render_all(&[Report::fail("normality", instance, witness)], json)
            );
            Ok(2)
        }
        Err(e) => Err(e),
    }
}

// Rebuild the failed interchange to locate the first gap for the report.
fn normality_witness(
    args: &SymSeq,
    head: &SymSeq,
    slot: UnitSlot,
    max_arity: Option<usize>,
    context: String,
) -> Witness {
    let id = crate::seq::identity_seq(&unit_colours());
    let tau = match slot {
        UnitSlot::Left => interchange_tau(&id, &id, args, head, max_arity, ThetaMode::Exchange),
        UnitSlot::Right => interchange_tau(args, head, &id, &id, max_arity, ThetaMode::Exchange),
    };
    if let Ok(tau) = tau {
        if let Some((key, dom, cod)) = first_cardinality_gap(tau.map.source(), tau.map.target()) {
            return Witness {
                point: key_label_in(tau.map.source(), &key),
                elements: vec![
                    format!("domain classes {}", dom),
                    format!("codomain classes {}", cod),
                ],
            };
        }
    }
    Witness {
        point: "(componentwise)".into(),
        elements: vec![context],
    }
}

#[allow(clippy::too_many_arguments)]
fn tau(
    m1: &Path,
    n1: &Path,
    m2: &Path,
    n2: &Path,
    report: Option<&Path>,
    max_arity: Option<usize>,
    expect_noninvertible: bool,
    json: bool,
) -> Result<i32> {
    let a1 = load(m1)?;
    let h1 = load(n1)?;
    let a2 = load(m2)?;
    let h2 = load(n2)?;
    let tau = interchange_tau(&a1, &h1, &a2, &h2, max_arity, ThetaMode::Exchange)
        .map_err(|e| hint_bound(e, max_arity.is_some()))?;
    let instance = format!(
        "(N1={} after M1={}) boxtimes (N2={} after M2={})",
        n1.display(),
        m1.display(),
        n2.display(),
        m2.display()
    );

    let mut records = vec![];
    let mut code = 0;
    match tau.map.check() {
        Ok(()) => records.push(Report::pass("interchange-wellformed", instance.clone())),
        Err(e) => {
            records.push(Report::fail(
                "interchange-wellformed",
                instance.clone(),
                Witness {
                    point: "(componentwise)".into(),
                    elements: vec![e.to_string()],
                },
            ));
            code = 2;
        }
    }

    let dom = tau.map.source();
    let cod = tau.map.target();
    let gap = first_cardinality_gap(dom, cod);
    let invertible = gap.is_none() && SeqIso::try_new(tau.map.clone()).is_ok();

    if expect_noninvertible && code == 0 {
        if invertible {
            records.push(Report::fail(
                "interchange-noninvertible",
                instance.clone(),
                Witness {
                    point: "(all keys)".into(),
                    elements: vec!["every component is a bijection".into()],
                },
            ));
            code = 2;
        } else {
            // a passing expectation still names the witness point
            let witness = match &gap {
                Some((key, d, c)) => Witness {
                    point: key_label_in(dom, key),
                    elements: vec![
                        format!("domain classes {}", d),
                        format!("codomain classes {}", c),
                    ],
                },
                None => Witness {
                    point: "(componentwise)".into(),
                    elements: vec!["equal counts but a non-bijective component".into()],
                },
            };
            records.push(Report {
                check: "interchange-noninvertible".into(),
                instance: instance.clone(),
                status: Status::Pass,
                witness: Some(witness),
            });
        }
    }

    if !json {
        for (key, set) in dom.support() {
            let c = cod.eval(&key.0, key.1).map_or(0, crate::gset::GSet::len);
            println!("{} : dom {}, cod {}", key_label_in(dom, key), set.len(), c);
        }
        for (key, set) in cod.support() {
            if dom.eval(&key.0, key.1).is_none() {
                println!("{} : dom 0, cod {}", key_label_in(cod, key), set.len());
            }
        }
        match &gap {
            Some((key, d, c)) => println!(
                "first class-count gap at {}: dom {}, cod {}",
                key_label_in(dom, key),
                d,
                c
            ),
            None if invertible => println!("componentwise bijective"),
            None => println!("equal counts everywhere but some component is not a bijection"),
        }
    }
    let rendered = render_all(&records, json);
    match report {
        Some(path) => fs::write(path, rendered.as_bytes())?,
        None => print!("{}", rendered),
    }
    Ok(code)
}

fn plethysm(g: &Path, f: &Path, k: usize, budget: usize, json: bool) -> Result<i32> {
    let head = load(g)?;
    let args = load(f)?;
    let stem = format!("G={} F={} k={}", g.display(), f.display(), k);
    let (record, code) = match composite_analytic_check(&args, &head, k, budget)? {
        AnalyticCheck::Agree { lhs, rhs } => (
            Report::pass("plethysm", format!("{}: both sides {}", stem, lhs.max(rhs))),
            0,
        ),
        AnalyticCheck::Disagree { lhs, rhs } => (
            Report::fail(
                "plethysm",
                stem,
                Witness {
                    point: format!("analytic evaluation at k={}", k),
                    elements: vec![
                        format!("composite side {}", lhs),
                        format!("iterated side {}", rhs),
                    ],
                },
            ),
            2,
        ),
        AnalyticCheck::Inconclusive { reason } => (
            Report::inconclusive("plethysm", format!("{}: {}", stem, reason)),
            0,
        ),
    };
    print!("{}", render_all(&[record], json));
    Ok(code)
}
