//! Command-line front end. `run` returns the process exit code.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis;
use crate::catalog::{self, CatalogEntry};
use crate::error::{Error, Result};
use crate::exterior::{AlternatingForm, Subspace, Vector};
use crate::flatten::{self, CoordinateSplit, FlattenParams};
use crate::io;
use crate::isotropic::{self, ComplementMethod, VerticalData};
use crate::report::{self, Report};
use crate::search::{SearchBudget, DEFAULT_SEED};

pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const SEARCH_EXHAUSTED: i32 = 4;
    pub const INCONSISTENT_SYSTEM: i32 = 5;
    pub const RANK_DROP: i32 = 6;
    pub const INTERNAL: i32 = 7;
    pub const IO: i32 = 8;
    pub const TOLERANCE: i32 = 9;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Json(_) => exit::PARSE,
        Error::DimensionMismatch { .. }
        | Error::DegreeOutOfRange { .. }
        | Error::InvalidIndex { .. }
        | Error::TooManyDimensions(_)
        | Error::Precondition(_) => exit::PRECONDITION,
        Error::SearchExhausted(_) => exit::SEARCH_EXHAUSTED,
        Error::InconsistentSystem { .. } => exit::INCONSISTENT_SYSTEM,
        Error::RankDrop { .. } => exit::RANK_DROP,
        Error::Internal(_) => exit::INTERNAL,
        Error::Io(_) => exit::IO,
    }
}

#[derive(Parser, Debug)]
#[command(name = "isodec", version, about = "Exact analysis of forms with maximal isotropic decomposable subspaces")]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Seed for every randomized search.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Coefficient bound of the enumerated basis changes.
    #[arg(long, default_value_t = 2)]
    pub coeff_bound: i64,
    /// Number of seeded random bases tried after enumeration.
    #[arg(long, default_value_t = 200)]
    pub random_trials: usize,
}

impl SearchArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            coeff_bound: self.coeff_bound,
            random_trials: self.random_trials,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Auto,
    Inductive,
    Linear,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kernel, support, decomposability, length and (given L) isotropic structure.
    Analyze {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "L")]
        l: Option<PathBuf>,
        #[arg(long = "F")]
        f: Option<PathBuf>,
        /// Isotropy orders to report for L.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// k-orthogonal complement and isotropy classification.
    Isotropy {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// n-isotropic complement F of a maximal isotropic decomposable L.
    Complement {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        #[arg(long = "V")]
        v: Option<PathBuf>,
        #[arg(long, requires = "v")]
        r: Option<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Output subspace file for F.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Canonical representation from L and a complement F.
    Canonical {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Bounds on the index-count invariant of (ω, L).
    Nl {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Moser flattening of a closed polynomial form.
    Flatten {
        #[arg(long)]
        form: PathBuf,
        /// Two groups, e.g. `--split x=1,2 y=3,4`.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        split: Vec<String>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a catalog entry: omega0, omega0_constrained, r11, max_dim.
    Catalog {
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "N")]
        big_n: Option<usize>,
        /// Momentum pairs kept by omega0_constrained, e.g. `1.1;2.1`.
        #[arg(long)]
        index_set: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long = "L-out")]
        l_out: Option<PathBuf>,
        #[arg(long = "V-out")]
        v_out: Option<PathBuf>,
        #[arg(long = "F-out")]
        f_out: Option<PathBuf>,
        /// Re-derive every expected property and record the checks.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Frobenius involutivity of a polynomial distribution.
    Involutive {
        #[arg(long)]
        fields: PathBuf,
        #[arg(long, default_value_t = 5)]
        probes: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_form(rep: &mut Report, path: &Path) -> Result<AlternatingForm> {
    let (j, bytes) = io::read_json::<io::FormJson>(path)?;
    rep.input("form", &path_str(path), &bytes);
    io::form_from_json(&j)
}

fn load_subspace(rep: &mut Report, role: &str, path: &Path, ambient: usize) -> Result<(Subspace, Vec<Vector>)> {
    let (j, bytes) = io::read_json::<io::SubspaceJson>(path)?;
    rep.input(role, &path_str(path), &bytes);
    if j.ambient != ambient {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            found: j.ambient,
        });
    }
    if j.dual {
        return Err(Error::precondition(format!("{role} must be a subspace of vectors, not covectors")));
    }
    let rows = io::subspace_rows(&j)?;
    let s = Subspace::new(j.ambient, false, &rows)?;
    Ok((s, rows.into_iter().map(Vector::new).collect()))
}

fn error_json(e: &Error) -> Value {
    json!({"error": e.kind(), "message": e.to_string()})
}

/// Result of an optional stage: the value, or a recorded error.
fn stage(r: Result<Value>) -> Value {
    r.unwrap_or_else(|e| error_json(&e))
}

fn catalog_entry(name: &str, n: Option<usize>, big_n: Option<usize>, index_set: Option<&str>) -> Result<CatalogEntry> {
    let dims = || -> Result<String> {
        match (n, big_n) {
            (Some(n), Some(b)) => Ok(format!("{n},{b}")),
            _ => Err(Error::Parse(format!("catalog entry {name} needs --n and --N"))),
        }
    };
    let spec = match name {
        "r11" | "example_r11" => name.to_string(),
        "omega0" | "max_dim" | "max_dim_example" => format!("{name}:{}", dims()?),
        "omega0_constrained" => format!("{name}:{}:{}", dims()?, index_set.unwrap_or("")),
        other => other.to_string(),
    };
    catalog::by_name(&spec)
}

fn parse_split(groups: &[String], d: usize) -> Result<CoordinateSplit> {
    let mut x = None;
    let mut y = None;
    for g in groups {
        let (key, list) = g
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("split group {g:?} must look like x=1,2")))?;
        let idx: Vec<usize> = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad index {s:?} in {g:?}"))))
            .collect::<Result<_>>()?;
        match key.trim() {
            "x" => x = Some(idx),
            "y" => y = Some(idx),
            other => return Err(Error::Parse(format!("unknown split group {other:?}"))),
        }
    }
    let (Some(x), Some(y)) = (x, y) else {
        return Err(Error::Parse("--split needs both x=… and y=…".into()));
    };
    CoordinateSplit::new(d, &x, &y)
}

fn analyze(
    rep: &mut Report,
    form: &Path,
    l: Option<&Path>,
    f: Option<&Path>,
    ks: &[usize],
    budget: &SearchBudget,
) -> Result<()> {
    let omega = load_form(rep, form)?;
    let d = omega.dimension();
    let l = l.map(|p| load_subspace(rep, "L", p, d)).transpose()?;
    let f = f.map(|p| load_subspace(rep, "F", p, d)).transpose()?;
    rep.set(
        "form",
        json!({
            "dimension": d,
            "degree": omega.degree(),
            "num_terms": omega.num_terms(),
            "degenerate": omega.is_zero(),
        }),
    );
    let kernel = rep.timed("kernel", || analysis::kernel(&omega));
    rep.set(
        "kernel",
        stage(kernel.map(|k| json!({"dim": k.dim(), "basis": report::vectors_json(&k.basis_vectors())}))),
    );
    rep.set("support_dim", json!(analysis::support_dim(&omega)));
    let dec = rep.timed("decomposability", || analysis::is_decomposable(&omega));
    rep.set("decomposition", report::decomposition_json(&dec));
    let mut length = rep.timed("length", || analysis::length_bounds(&omega, budget));

    if let Some((l, _)) = &l {
        let mut iso = Vec::new();
        for &k in ks {
            iso.push(stage(analysis::classify_isotropy(l, &omega, k).map(|r| {
                let mut v = serde_json::to_value(&r).expect("serializes");
                v["k_orthogonal"] = report::subspace_json(&r.k_orthogonal);
                v
            })));
        }
        rep.set("isotropy", Value::Array(iso));
        let cert = rep.timed("certify_L", || isotropic::certify_maximal_isotropic_decomposable(&omega, l, budget));
        let certified = match cert {
            Ok(b) => {
                rep.set(
                    "maximal_isotropic_decomposable",
                    json!({"holds": true, "decomposable_basis": report::vectors_json(&b)}),
                );
                true
            }
            Err(e) => {
                rep.set("maximal_isotropic_decomposable", error_json(&e));
                false
            }
        };
        if certified {
            if let Ok(Some(b)) = rep.timed("structural_length", || isotropic::structural_length(&omega, l, budget)) {
                if b.certified || (b.upper - b.lower) < (length.upper - length.lower) {
                    length = b;
                }
            }
            let f_sub = match &f {
                Some((s, _)) => Ok(s.clone()),
                None => rep
                    .timed("complement", || {
                        isotropic::complement_n_isotropic(&omega, l, None, ComplementMethod::Auto, budget)
                    })
                    .map(|c| c.f),
            };
            match f_sub {
                Ok(fs) => {
                    let nl = rep.timed("nl", || isotropic::frak_n_l(&omega, l, &fs, budget));
                    if let Ok(nl) = &nl {
                        if nl.value_upper == 0 && nl.value_lower == 0 {
                            let can = rep.timed("canonical", || {
                                isotropic::canonical_representation(&omega, l, &nl.witness_basis)
                            });
                            rep.set(
                                "canonical",
                                stage(can.map(|c| {
                                    let ok = c.reconstruct() == omega;
                                    report::canonical_json(&c, ok)
                                })),
                            );
                        }
                    }
                    rep.set("F", report::subspace_json(&fs));
                    rep.set("nl", stage(nl.map(|r| report::nl_json(&r))));
                }
                Err(e) => rep.set("nl", error_json(&e)),
            }
        }
    }
    rep.set("length", report::length_json(&length));
    Ok(())
}

fn execute(cli: &Cli) -> Result<(Report, i32)> {
    let code = exit::OK;
    let rep = match &cli.command {
        Command::Analyze { form, l, f, k, search } => {
            let mut rep = Report::new("analyze", Some(search.seed));
            analyze(&mut rep, form, l.as_deref(), f.as_deref(), k, &search.budget())?;
            rep
        }
        Command::Isotropy { form, l, k } => {
            let mut rep = Report::new("isotropy", None);
            let omega = load_form(&mut rep, form)?;
            let (l, _) = load_subspace(&mut rep, "L", l, omega.dimension())?;
            if *k == 0 || *k >= omega.degree() {
                return Err(Error::DegreeOutOfRange {
                    degree: *k,
                    reason: format!("isotropy order must satisfy 1 ≤ k < deg ω = {}", omega.degree()),
                });
            }
            let r = rep.timed("classify", || analysis::classify_isotropy(&l, &omega, *k))?;
            let mut v = serde_json::to_value(&r)?;
            v["k_orthogonal"] = report::subspace_json(&r.k_orthogonal);
            rep.set("isotropy", v);
            rep
        }
        Command::Complement {
            form,
            l,
            v,
            r,
            method,
            output,
            search,
        } => {
            let mut rep = Report::new("complement", Some(search.seed));
            let omega = load_form(&mut rep, form)?;
            let d = omega.dimension();
            let (l, _) = load_subspace(&mut rep, "L", l, d)?;
            let vertical = match v {
                Some(p) => {
                    let (vs, _) = load_subspace(&mut rep, "V", p, d)?;
                    let r = r.ok_or_else(|| Error::Parse("--V needs --r".into()))?;
                    Some(VerticalData { v: vs, r })
                }
                None => None,
            };
            let method = match method {
                MethodArg::Auto => ComplementMethod::Auto,
                MethodArg::Inductive => ComplementMethod::Inductive,
                MethodArg::Linear => ComplementMethod::LinearSolve,
            };
            let res = rep.timed("complement", || {
                isotropic::complement_n_isotropic(&omega, &l, vertical.as_ref(), method, &search.budget())
            })?;
            if let Some(out) = output {
                io::write_json(out, &io::vectors_to_json(d, &res.f_basis))?;
            }
            rep.set("complement", report::complement_json(&res));
            rep
        }
        Command::Canonical {
            form,
            l,
            f,
            output,
            search,
        } => {
            let mut rep = Report::new("canonical", Some(search.seed));
            let omega = load_form(&mut rep, form)?;
            let d = omega.dimension();
            let (l, _) = load_subspace(&mut rep, "L", l, d)?;
            let (_, f_basis) = load_subspace(&mut rep, "F", f, d)?;
            let can = rep.timed("canonical", || isotropic::canonical_representation(&omega, &l, &f_basis))?;
            let ok = can.reconstruct() == omega;
            let v = report::canonical_json(&can, ok);
            if let Some(out) = output {
                io::write_json(out, &v)?;
            }
            rep.set("canonical", v);
            rep
        }
        Command::Nl { form, l, f, search } => {
            let mut rep = Report::new("nl", Some(search.seed));
            let omega = load_form(&mut rep, form)?;
            let d = omega.dimension();
            let (l, _) = load_subspace(&mut rep, "L", l, d)?;
            let (f, _) = load_subspace(&mut rep, "F", f, d)?;
            let nl = rep.timed("nl", || isotropic::frak_n_l(&omega, &l, &f, &search.budget()))?;
            rep.set("nl", report::nl_json(&nl));
            rep
        }
        Command::Flatten {
            form,
            split,
            steps,
            samples,
            tol,
            seed,
            radius,
            output,
        } => {
            let mut rep = Report::new("flatten", Some(*seed));
            let (j, bytes) = io::read_json::<io::PolyFormJson>(form)?;
            rep.input("form", &path_str(form), &bytes);
            let omega = io::polyform_from_json(&j)?;
            let s = parse_split(split, omega.dimension())?;
            let params = FlattenParams {
                steps: *steps,
                samples: *samples,
                tol: *tol,
                seed: *seed,
                radius: *radius,
                ..Default::default()
            };
            let res = rep.timed("flatten", || flatten::moser_flatten(&omega, &s, &params))?;
            let v = report::flatten_json(&res);
            if let Some(out) = output {
                io::write_json(out, &v)?;
            }
            rep.set("flatten", v);
            let code = if res.passed { exit::OK } else { exit::TOLERANCE };
            return Ok((rep, code));
        }
        Command::Catalog {
            name,
            n,
            big_n,
            index_set,
            output,
            meta,
            l_out,
            v_out,
            f_out,
            verify,
            search,
        } => {
            let mut rep = Report::new("catalog", Some(search.seed));
            let e = catalog_entry(name, *n, *big_n, index_set.as_deref())?;
            let checks = if *verify {
                rep.timed("verify", || catalog::verify_expected(&e, &search.budget()))?
            } else {
                Vec::new()
            };
            io::write_json(output, &io::form_to_json(&e.form))?;
            if let Some(p) = l_out {
                io::write_json(p, &io::subspace_to_json(&e.l))?;
            }
            if let Some(p) = v_out {
                let v = e.v.as_ref().ok_or_else(|| Error::precondition(format!("{} has no vertical subspace", e.name)))?;
                io::write_json(p, &io::subspace_to_json(&v.v))?;
            }
            if let Some(p) = f_out {
                let f = e.f.as_ref().ok_or_else(|| Error::precondition(format!("{} has no complement", e.name)))?;
                io::write_json(p, &io::subspace_to_json(f))?;
            }
            let m = report::catalog_meta_json(&e, &checks);
            if let Some(p) = meta {
                io::write_json(p, &m)?;
            }
            rep.set("catalog", m);
            if checks.iter().any(|c| !c.ok) {
                return Ok((rep, exit::INTERNAL));
            }
            rep
        }
        Command::Involutive { fields, probes, seed } => {
            let mut rep = Report::new("involutive", Some(*seed));
            let (j, bytes) = io::read_json::<io::DistributionJson>(fields)?;
            rep.input("fields", &path_str(fields), &bytes);
            let dist = io::distribution_from_json(&j)?;
            let r = rep.timed("involutive", || flatten::involutive(&dist, *probes, *seed))?;
            rep.set("involutive", report::involutive_json(&r));
            rep
        }
    };
    Ok((rep, code))
}

fn emit_error(e: &Error) {
    eprintln!("{}", error_json(e));
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Errors go to stderr as `{"error", "message"}`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return exit::OK;
            }
            eprintln!("{}", json!({"error": "usage", "message": e.to_string()}));
            return exit::PARSE;
        }
    };
    let (rep, code) = match execute(&cli) {
        Ok(x) => x,
        Err(e) => {
            emit_error(&e);
            return exit_code(&e);
        }
    };
    let written = rep.finish().and_then(|v| {
        let text = io::to_pretty(&v)?;
        match &cli.report {
            Some(p) => io::write_atomic(p, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match written {
        Ok(()) => code,
        Err(e) => {
            emit_error(&e);
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_parsing() {
        let s = parse_split(&["x=1,2".into(), "y=3".into()], 3).unwrap();
        assert_eq!(s.y_indices(), &[3]);
        assert!(parse_split(&["x=1".into(), "z=2".into()], 2).is_err());
        assert_eq!(parse_split(&["x=1".into(), "y=1".into()], 2).unwrap_err().kind(), "precondition");
    }

    #[test]
    fn catalog_names() {
        assert_eq!(catalog_entry("omega0", Some(2), Some(2), None).unwrap().form.num_terms(), 5);
        assert!(catalog_entry("omega0", None, Some(2), None).is_err());
        let c = catalog_entry("omega0_constrained", Some(2), Some(2), Some("1.1")).unwrap();
        assert_eq!(c.form.num_terms(), 2);
    }
}
