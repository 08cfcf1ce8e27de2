use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use unimagma::action::{canonical_point, semidirect_product, verify_action};
use unimagma::classify::{
    enumerate_actions, enumerate_points, equivalent_points, phi_of_point, quotient_points,
    SearchLimits,
};
use unimagma::doc::{self, Document, Documented, MagmaDoc, QuotientReport};
use unimagma::gallery::{self, cases, interval, medial, sphere};
use unimagma::magma::{adjoin_poles, verify_unitary_magma};
use unimagma::point::{compose_points, induced_x_magma, pullback_point, verify_point};
use unimagma::{Error, FiniteMagma, Outcome, RetractionPoint, ValidationReport, Violation};

/// Check, build and classify points and actions of finite unitary magmas.
///
/// Documents are JSON files tagged with "kind"; a path of "-" reads standard
/// input. Exit status: 0 valid, 1 invalid or not equivalent, 2 usage, I/O or
/// parse error.
#[derive(Parser)]
#[command(name = "unimagma", version)]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a magma, point or action document against its axioms.
    Verify { file: PathBuf },
    /// Construct a structure from documents.
    #[command(subcommand)]
    Build(Build),
    /// Print the classifying action of a point.
    Classify { point: PathBuf },
    /// Decide whether two points over the same ends are equivalent.
    Equivalent { first: PathBuf, second: PathBuf },
    /// List every action or every point over given ends.
    #[command(subcommand)]
    Enumerate(Enumerate),
    /// Group the enumerated points by classifying action and compare the
    /// class count with an independent action count.
    Quotient(PointSearch),
    /// Run one of the worked examples.
    Examples(ExampleArgs),
}

#[derive(Subcommand)]
enum Build {
    /// Semidirect product of an action.
    Sdp { action: PathBuf },
    /// The canonical point of an action.
    CanonicalPoint { action: PathBuf },
    /// Pull a point back along a morphism `g : Z -> B`.
    Pullback {
        point: PathBuf,
        /// Map document for `g`.
        #[arg(long)]
        g: PathBuf,
        /// Magma document for `Z`.
        #[arg(long)]
        z: PathBuf,
    },
    /// Compose a point with a point whose middle magma is its base.
    Compose { point: PathBuf, upper: PathBuf },
}

#[derive(Subcommand)]
enum Enumerate {
    Actions(ActionSearch),
    Points(PointSearch),
}

#[derive(Args)]
struct ActionSearch {
    /// Size of the kernel set X.
    #[arg(long)]
    x: usize,
    /// Magma document for B.
    #[arg(long)]
    b_file: PathBuf,
    /// Refuse searches with more candidates than this.
    #[arg(long)]
    max_candidates: Option<f64>,
}

#[derive(Args)]
struct PointSearch {
    #[command(flatten)]
    search: ActionSearch,
    /// Largest middle magma to enumerate.
    #[arg(long, default_value_t = 4)]
    max_a: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Interval,
    Sphere,
    Adjoin,
    Medial,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(value_enum)]
    example: Example,
    /// Number of random samples for the sampled checks.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Tolerance; defaults to 1e-12 for interval and 1e-9 for sphere.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = gallery::DEFAULT_SEED)]
    seed: u64,
    /// Magma document: X for adjoin, B for medial. Defaults to Z2.
    #[arg(long)]
    b_file: Option<PathBuf>,
    /// Cap on choice functions for medial.
    #[arg(long)]
    max_candidates: Option<f64>,
}

/// What went wrong, and how the process should exit.
enum Failure {
    /// Usage, I/O, parse or refused search: exit 2.
    Usage(String),
    /// A checked structure failed: exit 1, with the report already written.
    Invalid,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output { path: cli.out };
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn emit<T: Serialize>(&mut self, value: &T) -> Run {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
        text.push('\n');
        match &self.path {
            Some(p) => fs::write(p, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    /// Emits and fails with exit 1 unless `valid`.
    fn verdict<T: Serialize>(&mut self, value: &T, valid: bool) -> Run {
        self.emit(value)?;
        if valid {
            Ok(())
        } else {
            Err(Failure::Invalid)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn read<T: Documented>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    doc::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn limits(max_candidates: Option<f64>) -> Result<SearchLimits, Failure> {
    let mut l = SearchLimits::default();
    if let Some(m) = max_candidates {
        if !(m > 0.0) {
            return Err(Failure::Usage("--max-candidates must be positive".into()));
        }
        l.max_candidates = m;
    }
    Ok(l)
}

#[derive(Serialize)]
struct Verification {
    kind: &'static str,
    document: &'static str,
    valid: bool,
    violations: Vec<Violation>,
}

impl Verification {
    fn new(document: &'static str, report: ValidationReport) -> Self {
        Verification {
            kind: "verification",
            document,
            valid: report.is_valid(),
            violations: report.violations,
        }
    }
}

#[derive(Serialize)]
struct Refusal {
    kind: &'static str,
    operation: &'static str,
    violation: Violation,
}

/// Runs `f` on a point if it is valid; otherwise reports why not and fails.
fn require_point(out: &mut Output, pt: &RetractionPoint, what: &'static str) -> Run {
    let report = verify_point(pt);
    if report.is_valid() {
        Ok(())
    } else {
        out.verdict(&Verification::new(what, report), false)
    }
}

fn require_action(out: &mut Output, a: &unimagma::Action) -> Run {
    let report = verify_action(a);
    if report.is_valid() {
        Ok(())
    } else {
        out.verdict(&Verification::new("action", report), false)
    }
}

fn run(command: Command, out: &mut Output) -> Run {
    match command {
        Command::Verify { file } => {
            let parsed = doc::parse_document(&read_text(&file)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
            let report = match &parsed {
                Document::Magma(m) => verify_unitary_magma(m),
                Document::Point(p) => verify_point(p),
                Document::Action(a) => verify_action(a),
                Document::Map(_) => {
                    return Err(Failure::Usage(
                        "a map has no axioms of its own; verify a magma, point or action".into(),
                    ))
                }
            };
            let v = Verification::new(parsed.kind(), report);
            let valid = v.valid;
            out.verdict(&v, valid)
        }
        Command::Build(b) => build(b, out),
        Command::Classify { point } => {
            let pt: RetractionPoint = read(&point)?;
            require_point(out, &pt, "point")?;
            out.emit(&phi_of_point(&pt)?.to_doc())
        }
        Command::Equivalent { first, second } => {
            let (p1, p2): (RetractionPoint, RetractionPoint) = (read(&first)?, read(&second)?);
            require_point(out, &p1, "point")?;
            require_point(out, &p2, "point")?;
            #[derive(Serialize)]
            struct Equivalence {
                kind: &'static str,
                equivalent: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                alpha: Option<doc::MapDoc>,
                #[serde(skip_serializing_if = "Option::is_none")]
                witness: Option<Violation>,
            }
            let alpha = equivalent_points(&p1, &p2)?;
            let witness = if alpha.is_none() {
                let (a1, a2) = (phi_of_point(&p1)?, phi_of_point(&p2)?);
                let pos = a1
                    .table()
                    .iter()
                    .zip(a2.table())
                    .position(|(u, v)| u != v)
                    .or_else(|| (a1.zero() != a2.zero()).then_some(0))
                    .unwrap_or(0);
                Some(unflatten(&a1, pos))
            } else {
                None
            };
            let equivalent = alpha.is_some();
            out.verdict(
                &Equivalence {
                    kind: "equivalence",
                    equivalent,
                    alpha: alpha.map(|a| a.to_doc()),
                    witness,
                },
                equivalent,
            )
        }
        Command::Enumerate(Enumerate::Actions(s)) => {
            let b: FiniteMagma = read(&s.b_file)?;
            let actions = enumerate_actions(s.x, &b, limits(s.max_candidates)?)?;
            #[derive(Serialize)]
            struct ActionList {
                kind: &'static str,
                count: usize,
                actions: Vec<doc::ActionDoc>,
            }
            out.emit(&ActionList {
                kind: "action-list",
                count: actions.len(),
                actions: actions.iter().map(Documented::to_doc).collect(),
            })
        }
        Command::Enumerate(Enumerate::Points(s)) => {
            let b: FiniteMagma = read(&s.search.b_file)?;
            let points =
                enumerate_points(s.search.x, &b, s.max_a, limits(s.search.max_candidates)?)?;
            #[derive(Serialize)]
            struct PointList {
                kind: &'static str,
                count: usize,
                points: Vec<doc::PointDoc>,
            }
            out.emit(&PointList {
                kind: "point-list",
                count: points.len(),
                points: points.iter().map(Documented::to_doc).collect(),
            })
        }
        Command::Quotient(s) => {
            let b: FiniteMagma = read(&s.search.b_file)?;
            let l = limits(s.search.max_candidates)?;
            let points = enumerate_points(s.search.x, &b, s.max_a, l)?;
            let classes = quotient_points(&points)?;
            let actions = enumerate_actions(s.search.x, &b, l)?
                .iter()
                .filter(|a| semidirect_product(a).is_ok_and(|sdp| sdp.pairs().len() <= s.max_a))
                .count();
            let report = QuotientReport::new(points.len(), &classes, actions);
            let ok = report.all_passed();
            out.verdict(&report, ok)
        }
        Command::Examples(args) => examples(args, out),
    }
}

/// Position in a flat action table back to `(x, b, x', b')`.
fn unflatten(a: &unimagma::Action, pos: usize) -> Violation {
    let (nx, nb) = (a.x_size(), a.b().size());
    let b2 = pos % nb;
    let x2 = pos / nb % nx;
    let b = pos / (nb * nx) % nb;
    let x = pos / (nb * nx * nb);
    Violation::new("classifying-actions-differ", [x, b, x2, b2])
}

fn build(b: Build, out: &mut Output) -> Run {
    match b {
        Build::Sdp { action } => {
            let a: unimagma::Action = read(&action)?;
            require_action(out, &a)?;
            let sdp = semidirect_product(&a)?;
            #[derive(Serialize)]
            struct Sdp {
                kind: &'static str,
                pairs: Vec<(usize, usize)>,
                magma: MagmaDoc,
            }
            out.emit(&Sdp {
                kind: "semidirect-product",
                pairs: sdp.pairs().to_vec(),
                magma: sdp.magma().to_doc(),
            })
        }
        Build::CanonicalPoint { action } => {
            let a: unimagma::Action = read(&action)?;
            require_action(out, &a)?;
            out.emit(&canonical_point(&a)?.to_doc())
        }
        Build::Pullback { point, g, z } => {
            let pt: RetractionPoint = read(&point)?;
            let g: unimagma::ElementMap = read(&g)?;
            let z: FiniteMagma = read(&z)?;
            require_point(out, &pt, "point")?;
            match pullback_point(&pt, &g, &z) {
                Ok(p) => out.emit(&p.to_doc()),
                Err(Error::Precondition(msg)) => {
                    let v = Violation::new("g-morphism", Vec::new()).with_detail(msg);
                    out.verdict(
                        &Verification::new(
                            "map",
                            ValidationReport {
                                violations: vec![v],
                            },
                        ),
                        false,
                    )
                }
                Err(e) => Err(e.into()),
            }
        }
        Build::Compose { point, upper } => {
            let pt: RetractionPoint = read(&point)?;
            let up: RetractionPoint = read(&upper)?;
            require_point(out, &pt, "point")?;
            require_point(out, &up, "point")?;
            match compose_points(&pt, &up)? {
                Outcome::Built(c) => out.emit(&c.to_doc()),
                Outcome::Refuted(v) => out.verdict(
                    &Refusal {
                        kind: "refusal",
                        operation: "compose",
                        violation: v,
                    },
                    false,
                ),
            }
        }
    }
}

fn read_or_z2(path: &Option<PathBuf>) -> Result<FiniteMagma, Failure> {
    match path {
        Some(p) => read(p),
        None => Ok(FiniteMagma::cyclic(2)),
    }
}

#[derive(Serialize)]
struct Sampled {
    kind: &'static str,
    example: &'static str,
    samples: usize,
    tol: f64,
    seed: u64,
    valid: bool,
    violations: Vec<Violation>,
}

fn examples(args: ExampleArgs, out: &mut Output) -> Run {
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    if args.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    match args.example {
        Example::Interval => {
            let tol = args.tol.unwrap_or(1e-12);
            let mut report = interval::halfline_transport_check(args.samples, tol, args.seed)?;
            let (l, r) = interval::nonassociativity_witness();
            if l == r {
                report.push(Violation::new("pole-nonassociativity", Vec::new()));
            }
            let s = sampled("interval", &args, tol, report);
            let valid = s.valid;
            out.verdict(&s, valid)
        }
        Example::Sphere => {
            let tol = args.tol.unwrap_or(1e-9);
            let report = sphere::sphere_verify(args.samples, tol, args.seed)?;
            let s = sampled("sphere", &args, tol, report);
            let valid = s.valid;
            out.verdict(&s, valid)
        }
        Example::Adjoin => {
            let x = read_or_z2(&args.b_file)?;
            let pt = gallery::adjoin_poles_point(&x, &FiniteMagma::trivial());
            let report = verify_point(&pt);
            let valid = report.is_valid();
            let flags = cases::trace_flags(&pt);
            let ladder = if valid {
                Some(cases::particular_case_check(&pt)?)
            } else {
                None
            };
            #[derive(Serialize)]
            struct Flag {
                name: &'static str,
                holds: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                witness: Option<Violation>,
            }
            #[derive(Serialize)]
            struct Adjoin {
                kind: &'static str,
                example: &'static str,
                poles: MagmaDoc,
                associativity_witness: Option<[usize; 3]>,
                point: doc::PointDoc,
                valid: bool,
                violations: Vec<Violation>,
                #[serde(skip_serializing_if = "Option::is_none")]
                induced_x: Option<MagmaDoc>,
                trace_flags: Vec<Flag>,
                #[serde(skip_serializing_if = "Option::is_none")]
                particular_cases: Option<Vec<cases::CaseItem>>,
            }
            let poles = adjoin_poles(&x);
            let flag_list = [
                ("kks", &flags.kks),
                ("sks", &flags.sks),
                ("1ks", &flags.oneks),
                ("kss", &flags.kss),
                ("ksk", &flags.ksk),
                ("ks1", &flags.kso),
            ]
            .into_iter()
            .map(|(name, c)| Flag {
                name,
                holds: c.holds,
                witness: c.witness.clone(),
            })
            .collect();
            let ladder_ok = ladder.as_ref().is_none_or(|l| l.report().is_valid());
            out.verdict(
                &Adjoin {
                    kind: "example",
                    example: "adjoin",
                    associativity_witness: poles.associativity_witness(),
                    poles: poles.to_doc(),
                    point: pt.to_doc(),
                    valid,
                    violations: report.violations,
                    induced_x: if valid {
                        Some(induced_x_magma(&pt)?.to_doc())
                    } else {
                        None
                    },
                    trace_flags: flag_list,
                    particular_cases: ladder.map(|l| l.items),
                },
                valid && ladder_ok,
            )
        }
        Example::Medial => {
            let b = read_or_z2(&args.b_file)?;
            let cap = match args.max_candidates {
                Some(c) if c >= 1.0 => c as usize,
                Some(_) => {
                    return Err(Failure::Usage("--max-candidates must be at least 1".into()))
                }
                None => medial::DEFAULT_CHOICE_CAP,
            };
            let r = medial::medial_order_point(&b, cap)?;
            #[derive(Serialize)]
            struct Medial {
                kind: &'static str,
                example: &'static str,
                carrier: Vec<(usize, usize)>,
                choices_tried: usize,
                points: usize,
                classes: usize,
                actions: Vec<doc::ActionDoc>,
                valid: bool,
                violations: Vec<Violation>,
            }
            let valid = r.report.is_valid();
            out.verdict(
                &Medial {
                    kind: "example",
                    example: "medial",
                    carrier: r.carrier,
                    choices_tried: r.choices_tried,
                    points: r.points.len(),
                    classes: r.classes,
                    actions: r.points.iter().map(|m| m.action.to_doc()).collect(),
                    valid,
                    violations: r.report.violations,
                },
                valid,
            )
        }
    }
}

fn sampled(
    example: &'static str,
    args: &ExampleArgs,
    tol: f64,
    report: ValidationReport,
) -> Sampled {
    Sampled {
        kind: "example",
        example,
        samples: args.samples,
        tol,
        seed: args.seed,
        valid: report.is_valid(),
        violations: report.violations,
    }
}
