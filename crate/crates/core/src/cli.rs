//! Command-line front end. [`run`] is pure apart from file I/O: it returns the exit
//! code and the rendered text instead of printing, so it can be tested directly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::io::{self, DatumDoc};
use crate::linalg::{CMatrix, Complex};
use crate::modular_data::{self, FusionTensor, ModularDatum, Tolerances};
use crate::perm_orbifold::{self, Convention};
use crate::report::{CheckResult, ValidationReport};
use crate::restricted::{self, RestrictedOutputDoc};
use crate::sl2z::{self, Sl2Matrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Pretty,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "modorb",
    version,
    about = "Modular data of rational VOAs and their orbifolds"
)]
pub struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    /// Numerical tolerance (default 1e-9, or $MODORB_EPS).
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Integrality tolerance for fusion coefficients (default 1e-6, or $MODORB_EPS_INT).
    #[arg(long, global = true)]
    pub eps_int: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check unitarity, symmetry, vacuum positivity, S^2, (ST)^3 = S^2 and Verlinde integrality.
    Validate { input: PathBuf },
    /// Fusion rules from the Verlinde formula.
    Fusion { input: PathBuf },
    /// T-matrix phases e^{2πi(h - c/24)}.
    Tmatrix { input: PathBuf },
    /// Modular datum of the cyclic permutation orbifold (V^{⊗k})^{Z_k}.
    Perm {
        /// Prime number of tensor factors.
        #[arg(long)]
        k: usize,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "minus")]
        convention: Convention,
    },
    /// Restricted S-matrix of V^G from orbit, character and cross-block data.
    Restricted {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SL2(Z) utilities.
    Sl2z {
        #[command(subcommand)]
        command: Sl2zCommand,
    },
    #[command(name = "sl2z-decompose", hide = true)]
    Sl2zDecompose(Entries),
    /// Validate a datum document, including orbifold metadata when present.
    Check { input: PathBuf },
    /// Print a shipped fixture (ising, fibonacci, e8).
    Fixture { name: String },
}

#[derive(Debug, Subcommand)]
pub enum Sl2zCommand {
    /// Factor a matrix (a b; c d) into S and T powers.
    Decompose(Entries),
}

#[derive(Debug, clap::Args)]
pub struct Entries {
    #[arg(allow_negative_numbers = true)]
    pub a: i64,
    #[arg(allow_negative_numbers = true)]
    pub b: i64,
    #[arg(allow_negative_numbers = true)]
    pub c: i64,
    #[arg(allow_negative_numbers = true)]
    pub d: i64,
}

/// Exit code plus what goes to stdout and stderr.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn verdict(passed: bool, stdout: String) -> Self {
        Outcome {
            code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(e: &Error) -> Self {
        Outcome {
            code: EXIT_INPUT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let env = Tolerances::from_env();
    let tol = Tolerances {
        eps: cli.eps.unwrap_or(env.eps),
        eps_int: cli.eps_int.unwrap_or(env.eps_int),
    };
    match dispatch(cli, tol) {
        Ok(out) => out,
        Err(e) => Outcome::input_error(&e),
    }
}

fn dispatch(cli: &Cli, tol: Tolerances) -> Result<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { input } => {
            let d = load(input)?;
            let report = modular_data::validate_modular_datum(&d, tol);
            Ok(Outcome::verdict(
                report.passed(),
                render_report(&report, fmt),
            ))
        }
        Command::Check { input } => {
            let text = read_input(input)?;
            let doc: DatumDoc = serde_json::from_str(&text)?;
            let d = doc.to_datum()?;
            let mut report = modular_data::validate_modular_datum(&d, tol);
            if let Some(meta) = &doc.orbifold {
                let expected =
                    perm_orbifold::orbifold_module_count(meta.parent_rank, meta.k as usize);
                report.push(CheckResult::new(
                    perm_orbifold::checks::MODULE_COUNT,
                    expected == d.rank(),
                    (expected as f64 - d.rank() as f64).abs(),
                    0.0,
                ));
            }
            Ok(Outcome::verdict(
                report.passed(),
                render_report(&report, fmt),
            ))
        }
        Command::Fusion { input } => {
            let d = load(input)?;
            let fusion = modular_data::verlinde_fusion(&d)?;
            let passed = fusion.residual <= tol.eps_int;
            let labels: Vec<&str> = d.modules().iter().map(|m| m.label.as_str()).collect();
            let text = match fmt {
                Format::Pretty => {
                    let mut s = render_fusion_table(&fusion.tensor, &labels);
                    if !passed {
                        let _ = writeln!(
                            s,
                            "warning: integrality residual {:e} exceeds {:e}",
                            fusion.residual, tol.eps_int
                        );
                    }
                    s
                }
                Format::Json => {
                    io::to_json_pretty(&FusionDoc::new(&fusion.tensor, &labels, fusion.residual))
                }
                Format::Csv => {
                    let mut s = String::from("i,j,m,N\n");
                    for (i, j, m, n) in nonzero(&fusion.tensor) {
                        let _ = writeln!(
                            s,
                            "{},{},{},{n}",
                            csv_field(labels[i]),
                            csv_field(labels[j]),
                            csv_field(labels[m])
                        );
                    }
                    s
                }
            };
            Ok(Outcome::verdict(passed, text))
        }
        Command::Tmatrix { input } => {
            let d = load(input)?;
            Ok(Outcome::ok(render_t(&d, fmt)))
        }
        Command::Perm {
            k,
            input,
            output,
            convention,
        } => {
            let d = load(input)?;
            let orb = perm_orbifold::build_orbifold_datum(&d, *k, *convention, tol)?;
            let json = orb.to_json();
            let stdout = match output {
                Some(path) => {
                    io::write_string(path, &json)?;
                    render_perm_summary(&orb, fmt, &json)
                }
                None if fmt == Format::Json => json,
                None => render_perm_summary(&orb, fmt, &json),
            };
            Ok(Outcome::verdict(orb.report.passed(), stdout))
        }
        Command::Restricted { spec, output } => {
            let text = read_input(spec)?;
            let input = restricted::parse_restricted_spec(&text)?.to_input()?;
            let mut report = restricted::validate_group_data(&input.group, &input.orbits, tol.eps);
            report.extend(restricted::validate_blocks(&input, tol.eps));
            let out = restricted::assemble_restricted_s(&input)?;
            report.push(restricted::output_symmetry(&out, tol.eps));
            let doc = RestrictedOutputDoc::new(&out, report.clone());
            let json = io::to_json_pretty(&doc);
            let stdout = match (output, fmt) {
                (Some(path), _) => {
                    io::write_string(path, &json)?;
                    render_report(&report, fmt)
                }
                (None, Format::Json) => json,
                (None, Format::Csv) => render_s_csv(&out.labels, &out.s),
                (None, Format::Pretty) => {
                    let mut s = String::new();
                    for (n, l) in out.labels.iter().enumerate() {
                        let _ = writeln!(s, "{n:>4}  {l}");
                    }
                    s.push_str(&render_report(&report, fmt));
                    s
                }
            };
            Ok(Outcome::verdict(report.passed(), stdout))
        }
        Command::Sl2z {
            command: Sl2zCommand::Decompose(e),
        }
        | Command::Sl2zDecompose(e) => {
            let m = Sl2Matrix::new(e.a, e.b, e.c, e.d)?;
            let word = sl2z::decompose_to_generators(&m);
            let back = sl2z::evaluate_word_int(&word);
            let ok = back == m;
            let text = match fmt {
                Format::Json => io::to_json_pretty(&serde_json::json!({
                    "matrix": [[e.a, e.b], [e.c, e.d]],
                    "word": word.to_string(),
                    "round_trip": ok,
                })),
                Format::Csv => format!(
                    "a,b,c,d,word,round_trip\n{},{},{},{},{},{}\n",
                    e.a, e.b, e.c, e.d, word, ok
                ),
                Format::Pretty => format!(
                    "{m} = {word}\nround-trip: {} {back}\n",
                    if ok { "PASS" } else { "FAIL" }
                ),
            };
            Ok(Outcome::verdict(ok, text))
        }
        Command::Fixture { name } => {
            let text = fixtures::json_by_name(name).ok_or_else(|| {
                Error::Parse(format!(
                    "unknown fixture {name:?} (known: {})",
                    fixtures::NAMES.join(", ")
                ))
            })?;
            Ok(Outcome::ok(text.to_string()))
        }
    }
}

/// `fixture:<name>` loads a shipped fixture, anything else is a file path.
fn read_input(path: &Path) -> Result<String> {
    if let Some(name) = path.to_str().and_then(|s| s.strip_prefix("fixture:")) {
        return fixtures::json_by_name(name)
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")));
    }
    io::read_to_string(path)
}

fn load(path: &Path) -> Result<ModularDatum> {
    io::parse_modular_datum(&read_input(path)?)
}

fn nonzero(n: &FusionTensor) -> impl Iterator<Item = (usize, usize, usize, u32)> + '_ {
    let r = n.rank();
    (0..r).flat_map(move |i| {
        (i..r).flat_map(move |j| n.products(i, j).map(move |(m, c)| (i, j, m, c)))
    })
}

/// One line `x × y = a + 2·b` per unordered pair with a nonzero product, in index order.
pub fn render_fusion_table(n: &FusionTensor, labels: &[&str]) -> String {
    let r = n.rank();
    let mut out = String::new();
    for i in 0..r {
        for j in i..r {
            let terms: Vec<String> = n
                .products(i, j)
                .map(|(m, c)| {
                    if c == 1 {
                        labels[m].to_string()
                    } else {
                        format!("{c}·{}", labels[m])
                    }
                })
                .collect();
            if !terms.is_empty() {
                let _ = writeln!(out, "{} × {} = {}", labels[i], labels[j], terms.join(" + "));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct FusionDoc<'a> {
    labels: &'a [&'a str],
    /// Nonzero `N_{ij}^m` with `i <= j`.
    rules: Vec<FusionRule>,
    residual: f64,
}

#[derive(Serialize)]
struct FusionRule {
    i: usize,
    j: usize,
    m: usize,
    n: u32,
}

impl<'a> FusionDoc<'a> {
    fn new(t: &FusionTensor, labels: &'a [&'a str], residual: f64) -> Self {
        let rules = nonzero(t)
            .map(|(i, j, m, n)| FusionRule { i, j, m, n })
            .collect();
        FusionDoc {
            labels,
            rules,
            residual,
        }
    }
}

pub fn render_report(report: &ValidationReport, fmt: Format) -> String {
    match fmt {
        Format::Pretty => report.to_string(),
        Format::Json => io::to_json_pretty(&serde_json::json!({
            "passed": report.passed(),
            "checks": report.checks,
        })),
        Format::Csv => {
            let mut s = String::from("check,passed,residual,tolerance\n");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    c.name,
                    c.passed,
                    io::format_sig(c.residual, 12),
                    io::format_sig(c.tolerance, 12)
                );
            }
            s
        }
    }
}

/// `re+im*i`, each part with 12 significant digits.
pub fn format_complex(z: Complex) -> String {
    let re = io::format_sig(z.re, 12);
    let im = io::format_sig(z.im, 12);
    if im.starts_with('-') {
        format!("{re}{im}*i")
    } else {
        format!("{re}+{im}*i")
    }
}

/// Quoted [`format_complex`], as a CSV field.
pub fn csv_complex(z: Complex) -> String {
    format!("\"{}\"", format_complex(z))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_s_csv(labels: &[String], s: &CMatrix) -> String {
    let mut out = String::from("label");
    for l in labels {
        out.push(',');
        out.push_str(&csv_field(l));
    }
    out.push('\n');
    for (i, row) in s.rows().into_iter().enumerate() {
        out.push_str(&csv_field(&labels[i]));
        for z in row {
            out.push(',');
            out.push_str(&csv_complex(*z));
        }
        out.push('\n');
    }
    out
}

fn render_t(d: &ModularDatum, fmt: Format) -> String {
    let t = d.t_matrix();
    match fmt {
        Format::Pretty => {
            let width = d
                .modules()
                .iter()
                .map(|m| m.label.chars().count())
                .max()
                .unwrap_or(1);
            let mut s = String::new();
            for (m, p) in d.modules().iter().zip(&t) {
                let pad = width - m.label.chars().count();
                let _ = writeln!(
                    s,
                    "{}{}  h={:<8}  T=e^(2πi·{})  {}",
                    m.label,
                    " ".repeat(pad),
                    m.weight.to_string(),
                    p.angle(),
                    format_complex(p.to_complex())
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = d
                .modules()
                .iter()
                .zip(&t)
                .map(|(m, p)| {
                    let z = p.to_complex();
                    serde_json::json!({
                        "label": m.label,
                        "h": m.weight.to_string(),
                        "angle": p.angle().to_string(),
                        "T": io::ComplexDoc::from_complex(z),
                    })
                })
                .collect();
            io::to_json_pretty(&rows)
        }
        Format::Csv => {
            let mut s = String::from("label,h,angle,T\n");
            for (m, p) in d.modules().iter().zip(&t) {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    csv_field(&m.label),
                    m.weight,
                    p.angle(),
                    csv_complex(p.to_complex())
                );
            }
            s
        }
    }
}

fn render_perm_summary(orb: &perm_orbifold::OrbifoldDatum, fmt: Format, json: &str) -> String {
    match fmt {
        Format::Json => json.to_string(),
        Format::Csv => {
            let labels: Vec<String> = orb
                .datum
                .modules()
                .iter()
                .map(|m| m.label.clone())
                .collect();
            render_s_csv(&labels, orb.datum.s_matrix())
        }
        Format::Pretty => {
            let d = &orb.datum;
            let t = d.t_matrix();
            let mut s = format!(
                "k = {}, convention = {}, c = {}, {} modules\n",
                orb.k,
                orb.convention,
                d.central_charge(),
                d.rank()
            );
            for (n, (m, l)) in d.modules().iter().zip(&orb.labels).enumerate() {
                let _ = writeln!(
                    s,
                    "{n:>4}  {:<8} {:<24} h={:<8} T=e^(2πi·{})",
                    l.kind(),
                    m.label,
                    m.weight.to_string(),
                    t[n].angle()
                );
            }
            s.push_str(&orb.report.to_string());
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> Outcome {
        let mut v = vec!["modorb"];
        v.extend_from_slice(args);
        run_args(v)
    }

    #[test]
    fn fusion_table_for_ising() {
        let d = fixtures::ising();
        let f = modular_data::verlinde_fusion(&d).unwrap();
        let labels: Vec<&str> = d.modules().iter().map(|m| m.label.as_str()).collect();
        let table = render_fusion_table(&f.tensor, &labels);
        assert!(table.lines().any(|l| l == "σ × σ = 1 + ψ"));
        assert!(table.lines().any(|l| l == "1 × 1 = 1"));
        assert!(table.lines().any(|l| l == "1 × σ = σ"));
        assert!(table.lines().any(|l| l == "ψ × σ = σ"));
        assert_eq!(table.lines().count(), 6);
    }

    #[test]
    fn multiplicities_render_with_dot() {
        let t = FusionTensor::from_raw(1, vec![2]);
        assert_eq!(render_fusion_table(&t, &["x"]), "x × x = 2·x\n");
    }

    #[test]
    fn csv_complex_format() {
        assert_eq!(csv_complex(Complex::new(0.5, -0.25)), "\"0.5-0.25*i\"");
        assert_eq!(
            csv_complex(Complex::new(1.0 / 3.0, 0.0)),
            "\"0.333333333333+0*i\""
        );
        assert_eq!(csv_complex(Complex::new(-0.0, 1e-20)), "\"0+1e-20*i\"");
    }

    #[test]
    fn fixture_inputs_and_exit_codes() {
        assert_eq!(run_ok(&["validate", "fixture:ising"]).code, EXIT_OK);
        let o = run_ok(&["perm", "--k", "4", "fixture:ising"]);
        assert_eq!(o.code, EXIT_INPUT_ERROR);
        assert!(o.stderr.contains("k must be prime"));
        assert_eq!(run_ok(&["validate", "fixture:nope"]).code, EXIT_INPUT_ERROR);
        assert_eq!(run_ok(&["validate"]).code, EXIT_INPUT_ERROR);
        assert_eq!(run_ok(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn decompose_accepts_negative_entries() {
        let o = run_ok(&["sl2z", "decompose", "-1", "0", "0", "-1"]);
        assert_eq!(o.code, EXIT_OK, "{o:?}");
        assert!(o.stdout.starts_with("(-1, 0; 0, -1) = S S\n"));
        let o = run_ok(&["sl2z-decompose", "2", "1", "1", "1"]);
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(
            run_ok(&["sl2z", "decompose", "2", "0", "0", "1"]).code,
            EXIT_INPUT_ERROR
        );
    }

    #[test]
    fn tolerance_flags() {
        // With eps = 0 exact floating equality is demanded; the √2 entries fail.
        assert_eq!(
            run_ok(&["--eps", "0", "validate", "fixture:ising"]).code,
            EXIT_CHECK_FAILED
        );
    }
}
