//! Command-line front end. Exit status: 0 when every check passed, 1 when a
//! mathematical check failed, 2 on usage or input errors.

use std::io::Read;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{AlgebraJson, LieAlgebra};
use crate::catalog::{e_to_x_permutation, make_extension, make_nilradical, permutation_matrix, BasisKind, ExtensionSpec, Family, NilradicalKind};
use crate::classify::{reduce_pair, reduce_to_canonical};
use crate::derivations::{derivation_algebra, inner_derivations, DerivationParams};
use crate::error::{Error, Result};
use crate::invariants::{coordinate_algebra, invariant_count_seeded, listed_invariants, verify_invariant};
use crate::linear::{format_rational, parse_rational, Matrix};
use crate::sweep::{run_all, SweepConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub report: String,
}

impl CommandResult {
    fn ok(report: String) -> Self {
        CommandResult { exit_code: 0, report }
    }

    fn checked(passed: bool, report: String) -> Self {
        CommandResult {
            exit_code: if passed { 0 } else { 1 },
            report,
        }
    }

    fn usage(report: String) -> Self {
        CommandResult { exit_code: 2, report }
    }
}

#[derive(Parser, Debug)]
#[command(name = "nilext", version, about = "Solvable extensions of the nilradical n_{n,3}: construction, classification and invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Family token, e.g. n_n3, s_n1_1, s_n2, s6_10, sw_m1_6.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    /// x (original) or e (adapted) basis.
    #[arg(long, default_value = "e")]
    basis: String,
    /// Family parameter as name=p/q; repeatable.
    #[arg(long = "param")]
    params: Vec<String>,
}

impl SpecArgs {
    fn spec(&self) -> Result<ExtensionSpec> {
        let family: Family = self.family.parse()?;
        let mut spec = ExtensionSpec::new(family, self.n).with_basis(self.basis.parse()?);
        for p in &self.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("parameter {p:?} is not name=value")))?;
            spec = spec.with_param(k.trim(), parse_rational(v.trim())?);
        }
        spec.validate()?;
        Ok(spec)
    }

    fn algebra(&self) -> Result<LieAlgebra> {
        let spec = self.spec()?;
        if spec.family.is_nilradical() {
            let kind = match spec.family {
                Family::N_M1 => NilradicalKind::M1,
                Family::N_53 => NilradicalKind::Dim5,
                _ if spec.n == 5 => NilradicalKind::Dim5,
                _ => NilradicalKind::N3,
            };
            return make_nilradical(kind, spec.n, spec.basis);
        }
        make_extension(&spec)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print an algebra of the catalog.
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Dimensions of the derived, lower and upper central series.
    Series {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Dimensions and bases of the derivation and inner derivation algebras.
    Derivations {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Reduce a derivation (parameters JSON) or an extension (algebra JSON)
    /// to its family representative. Reads standard input for "-".
    Classify {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the invariants of an algebra; --verify checks each of them.
    Invariants {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Number of functionally independent invariants.
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the whole verification sweep.
    VerifyAll {
        #[arg(long, default_value_t = 7)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Runs the command line `argv` (program name first), reading standard
/// input when a file argument is "-".
pub fn run(argv: &[String]) -> CommandResult {
    run_with_input(argv, &mut std::io::stdin())
}

pub fn run_with_input(argv: &[String], input: &mut dyn Read) -> CommandResult {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandResult {
                exit_code: code,
                report: e.render().to_string(),
            };
        }
    };
    match dispatch(cli.command, input) {
        Ok(r) => r,
        Err(e) => CommandResult::usage(format!("error: {e}\n")),
    }
}

fn dispatch(cmd: Command, input: &mut dyn Read) -> Result<CommandResult> {
    match cmd {
        Command::Gen { spec, format } => {
            let g = spec.algebra()?;
            Ok(CommandResult::ok(match format {
                Format::Json => g.to_json_string() + "\n",
                Format::Text => bracket_table(&g),
            }))
        }
        Command::Series { spec, format } => {
            let p = spec.algebra()?.series_profile();
            Ok(CommandResult::ok(match format {
                Format::Text => format!("{p}\n"),
                Format::Json => json!({"ds": p.ds, "cs": p.cs, "us": p.us}).to_string() + "\n",
            }))
        }
        Command::Derivations { spec, format } => {
            let g = spec.algebra()?;
            let der = derivation_algebra(&g);
            let inn = inner_derivations(&g);
            Ok(CommandResult::ok(match format {
                Format::Json => json!({
                    "dim_der": der.len(),
                    "dim_inn": inn.len(),
                    "der_basis": der.iter().map(matrix_json).collect::<Vec<_>>(),
                    "inn_basis": inn.iter().map(matrix_json).collect::<Vec<_>>(),
                })
                .to_string()
                    + "\n",
                Format::Text => {
                    let mut s = format!("dim Der = {}\ndim Inn = {}\n", der.len(), inn.len());
                    s += "Der basis:\n";
                    for d in &der {
                        s += &format!("  {}\n", describe_map(&g, d));
                    }
                    s += "Inn basis:\n";
                    for d in &inn {
                        s += &format!("  {}\n", describe_map(&g, d));
                    }
                    s
                }
            }))
        }
        Command::Classify { input: path, format } => classify(&read_input(&path, input)?, format),
        Command::Invariants { spec, verify, format } => {
            let spec = spec.spec()?;
            let list = listed_invariants(&spec)?;
            let g = coordinate_algebra(&spec)?;
            let mut all_ok = true;
            let mut lines = Vec::new();
            let mut entries = Vec::new();
            for (k, e) in list.iter().enumerate() {
                let status = if verify {
                    let ok = verify_invariant(&g, e)?;
                    all_ok &= ok;
                    Some(ok)
                } else {
                    None
                };
                let tag = match status {
                    Some(true) => "PASS ",
                    Some(false) => "FAIL ",
                    None => "",
                };
                lines.push(format!("{tag}chi_{} = {e}", k + 1));
                entries.push(json!({"index": k + 1, "expr": e.to_json(), "verified": status}));
            }
            let report = match format {
                Format::Text if list.is_empty() => format!("{spec} has no invariants\n"),
                Format::Text => lines.join("\n") + "\n",
                Format::Json => Value::Array(entries).to_string() + "\n",
            };
            Ok(CommandResult::checked(all_ok, report))
        }
        Command::Count { spec, seed } => {
            let g = spec.algebra()?;
            Ok(CommandResult::ok(format!("{}\n", invariant_count_seeded(&g, seed))))
        }
        Command::VerifyAll { n_min, n_max, seed } => {
            if n_min < 6 || n_min > n_max {
                return Err(Error::InvalidParams(format!("bad range {n_min}..={n_max}; need 6 <= n-min <= n-max")));
            }
            let reports = run_all(&SweepConfig { n_min, n_max, seed });
            let passed = reports.iter().all(|r| r.passed());
            let text: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
            Ok(CommandResult::checked(passed, text.join("\n") + "\n"))
        }
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String> {
    let mut s = String::new();
    if path == "-" {
        stdin.read_to_string(&mut s).map_err(|e| Error::Parse(format!("standard input: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    }
    Ok(s)
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(format_rational(x))).collect()))
            .collect(),
    )
}

fn linear_combination(names: &[String], v: &[crate::linear::Rational]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(names)
        .filter(|(c, _)| !num_traits::Zero::is_zero(*c))
        .map(|(c, n)| match format_rational(c).as_str() {
            "1" => n.clone(),
            "-1" => format!("-{n}"),
            s => format!("{s}*{n}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

fn bracket_table(g: &LieAlgebra) -> String {
    let names = g.basis_names();
    let mut s = String::new();
    for (i, j) in g.brackets().keys() {
        s += &format!("[{},{}] = {}\n", names[*i], names[*j], linear_combination(names, g.basis_bracket(*i, *j)));
    }
    s
}

/// `e1 -> .., e2 -> ..` listing of the nonzero images of a linear map.
fn describe_map(g: &LieAlgebra, d: &Matrix) -> String {
    let names = g.basis_names();
    let parts: Vec<String> = (0..d.cols())
        .filter_map(|j| {
            let col = d.column(j);
            let img = linear_combination(names, &col);
            (img != "0").then(|| format!("{} -> {img}", names[j]))
        })
        .collect();
    parts.join(", ")
}

/// The `f`-actions of an extension given as algebra JSON, in the e basis.
fn actions_from_algebra(g: &LieAlgebra) -> Result<(usize, Vec<Matrix>)> {
    let names = g.basis_names();
    let n = names.iter().filter(|v| !v.starts_with('f')).count();
    let extra = g.dim() - n;
    if !(1..=2).contains(&extra) || n < 6 {
        return Err(Error::InvalidParams(format!(
            "expected an extension of n_{{n,3}} (n >= 6) by one or two elements, got dimension {} with {n} nilradical coordinates",
            g.dim()
        )));
    }
    let x_basis = names[0].starts_with('x');
    let sigma = e_to_x_permutation(n);
    let p = permutation_matrix(&sigma);
    let p_inv = p.inverse()?;
    let nil_e = make_nilradical(NilradicalKind::N3, n, BasisKind::E)?;
    let mut actions = Vec::new();
    for a in 0..extra {
        let full = g.adjoint_of_basis(n + a);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, full.get(i, j).clone());
            }
        }
        if x_basis {
            m = p_inv.mul(&m)?.mul(&p)?;
        }
        actions.push(m);
    }
    let restricted = {
        let mut triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = g.basis_bracket(i, j)[..n].to_vec();
                triples.push((i, j, v));
            }
        }
        let alg = LieAlgebra::new((1..=n).map(|i| format!("e{i}")).collect(), triples)?;
        if x_basis {
            alg.change_basis(&p)?
        } else {
            alg
        }
    };
    let same = (0..n).all(|i| (0..n).all(|j| restricted.basis_bracket(i, j) == nil_e.basis_bracket(i, j)));
    if !same {
        return Err(Error::InvalidParams("the first n basis elements do not span n_{n,3} in the expected basis".into()));
    }
    Ok((n, actions))
}

fn classify(text: &str, format: Format) -> Result<CommandResult> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let (n, actions) = if value.get("dim").is_some() {
        let json: AlgebraJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        actions_from_algebra(&LieAlgebra::from_json(&json)?)?
    } else {
        let list = match value {
            Value::Array(items) => items,
            other => vec![other],
        };
        let params = list
            .iter()
            .map(|v| DerivationParams::from_json_str(&v.to_string()))
            .collect::<Result<Vec<_>>>()?;
        let n = params.first().map(|p| p.n).ok_or_else(|| Error::Parse("no derivation given".into()))?;
        let mats = params.iter().map(crate::derivations::build_derivation).collect::<Result<Vec<_>>>()?;
        (n, mats)
    };
    let params = actions
        .iter()
        .map(|a| DerivationParams::from_matrix(n, a))
        .collect::<Result<Vec<_>>>()?;
    let report = match params.as_slice() {
        [p] => {
            let r = reduce_to_canonical(n, p)?;
            match format {
                Format::Json => serde_json::to_string(&r.to_json()).expect("serializable") + "\n",
                Format::Text => {
                    let scal: Vec<String> = r.scalings.iter().map(format_rational).collect();
                    let inner: Vec<String> = r.inner_correction.iter().map(format_rational).collect();
                    format!(
                        "family: {}\nlabel: {}\nscalings [s, beta, kappa]: [{}]\ninner correction: [{}]\n",
                        r.label.family,
                        r.label,
                        scal.join(", "),
                        inner.join(", ")
                    )
                }
            }
        }
        [p1, p2] => {
            let r = reduce_pair(n, p1, p2)?;
            match format {
                Format::Json => json!({"label": r.label.to_json(), "conjugator": matrix_json(&r.conjugator), "combination": matrix_json(&r.combination)}).to_string() + "\n",
                Format::Text => format!("family: {}\nlabel: {}\n", r.label.family, r.label),
            }
        }
        _ => return Err(Error::InvalidParams("expected one or two derivations".into())),
    };
    Ok(CommandResult::ok(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &str, stdin: &str) -> CommandResult {
        let argv: Vec<String> = std::iter::once("nilext").chain(args.split_whitespace()).map(String::from).collect();
        run_with_input(&argv, &mut stdin.as_bytes())
    }

    #[test]
    fn gen_and_series() {
        let r = run_args("gen --family n_n3 --n 8 --basis e --format json", "");
        assert_eq!(r.exit_code, 0);
        let v: Value = serde_json::from_str(&r.report).unwrap();
        assert_eq!(v["brackets"].as_array().unwrap().len(), 6);
        let r = run_args("series --family s_n1_1 --n 8 --param beta=2", "");
        assert_eq!(r, CommandResult::ok("DS=[9,8,5,0] CS=[9,8] US=[0]\n".into()));
        let r = run_args("gen --family n_n3 --n 8 --format text", "");
        assert!(r.report.contains("[e7,e8] = -e3"), "{}", r.report);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args("series --family nope --n 8", "").exit_code, 2);
        assert_eq!(run_args("series --n 8", "").exit_code, 2);
        assert_eq!(run_args("frobnicate", "").exit_code, 2);
        assert_eq!(run_args("series --family s_n1_1 --n 8 --param beta", "").exit_code, 2);
        assert_eq!(run_args("classify -", "{not json").exit_code, 2);
        assert_eq!(run_args("--help", "").exit_code, 0);
    }

    #[test]
    fn classify_round_trip_through_gen() {
        for (args, token) in [
            ("--family s_n1_9 --n 8 --basis x", "s_n1_9"),
            ("--family s_n1_8 --n 9 --param a3=1", "s_n1_8"),
            ("--family s_n2 --n 7 --basis x", "s_n2"),
        ] {
            let g = run_args(&format!("gen {args}"), "");
            let r = run_args("classify -", &g.report);
            assert_eq!(r.exit_code, 0, "{}", r.report);
            assert!(r.report.starts_with(&format!("family: {token}\n")), "{}", r.report);
        }
        let params = r#"{"n": 8, "c": {"7": "2"}, "d": {"8": "1", "7": "5"}}"#;
        let r = run_args("classify", params);
        assert!(r.report.contains("label: s_n1_1(n=8, beta=2)"), "{}", r.report);
        let r = run_args("classify --format json", params);
        let v: Value = serde_json::from_str(&r.report).unwrap();
        assert_eq!(v["label"]["family"], "s_n1_1");
    }

    #[test]
    fn invariants_and_count() {
        let r = run_args("invariants --family s_n1_9 --n 8 --verify", "");
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.report.lines().count(), 3);
        assert!(r.report.lines().all(|l| l.starts_with("PASS")));
        let r = run_args("count --family n_n3 --n 9", "");
        assert_eq!(r.report, "5\n");
        let r = run_args("invariants --family s6_7 --n 5", "");
        assert!(r.report.contains("no invariants"));
    }

    #[test]
    fn deterministic_output() {
        let a = run_args("derivations --family n_n3 --n 7 --format json", "");
        let b = run_args("derivations --family n_n3 --n 7 --format json", "");
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a.report).unwrap();
        assert_eq!(v["dim_der"], 14);
        assert_eq!(v["dim_inn"], 6);
    }
}
