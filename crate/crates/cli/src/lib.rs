//! Command surface of the `toric` binary. Every command returns its records
//! as JSON values; rendering and exit status are decided here so the binary
//! stays a thin shell and tests can drive commands in-process.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use toric_core::codes::{dual_code_of, primal_code_of, DEFAULT_DUAL_BUDGET, DEFAULT_PRIMAL_BUDGET};
use toric_core::formulas::{verify_formulas, verify_moebius, verify_table1};
use toric_core::stats::{generic_fraction_estimate, mode, relative_mode, ModeConfig};
use toric_core::{
    degree_one_params, dmin_dual, dmin_primal_bruteforce, evaluation_matrix, lawrence_prism, DegreeOneDescriptor,
    DualDistance, Error, Field, LatticePolytope, PolytopeSpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "toric",
    version,
    about = "Toric codes from lattice polytopes over finite fields"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per line.
    Json,
    /// Aligned text table.
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lattice points, h*-vector and degree of a polytope.
    #[command(subcommand)]
    Polytope(PolytopeCommand),
    /// Parameters of the primal and dual codes.
    #[command(subcommand)]
    Code(CodeCommand),
    /// Mode and genericity experiments.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Check closed-form predictions against exhaustive search.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCommand {
    Info(PolytopeArgs),
}

#[derive(Subcommand, Debug)]
pub enum CodeCommand {
    /// n, k and dmin of the primal code.
    Params {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long)]
        q: u64,
        /// Also compute dmin by exhaustive search over projective codewords.
        #[arg(long)]
        brute_force: bool,
        /// Projective codewords the exhaustive search may examine.
        #[arg(long, default_value_t = DEFAULT_PRIMAL_BUDGET)]
        budget: u64,
    },
    /// Minimum distance of the dual code, searched up to a cap.
    DualDmin {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_DUAL_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum StatsCommand {
    /// Histogram of w_S over size-s supports and its mode.
    Mode {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        exhaustive_threshold: u64,
        #[arg(long, default_value_t = 3)]
        max_extension: usize,
        /// Work over GF(q^d) with supports drawn from the GF(q) torus points.
        #[arg(long)]
        ext_degree: Option<u32>,
    },
    /// Fraction of (c+1)-tuples of torus points spanning a c-plane.
    GenericFraction {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct VerifyTarget {
    /// The published table for three-dimensional Lawrence prisms.
    #[arg(long)]
    table1: bool,
    /// Formula against brute force for q <= QMAX and k <= KMAX.
    #[arg(long, num_args = 2, value_names = ["QMAX", "KMAX"])]
    formulas: Option<Vec<u64>>,
    /// Inclusion-exclusion against kernel enumeration on a fixed battery.
    #[arg(long)]
    moebius: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    target: VerifyTarget,
    /// Largest polytope dimension for --formulas.
    #[arg(long, default_value_t = 3)]
    m_max: usize,
}

/// Exactly one polytope source.
#[derive(Args, Debug, Clone, Default)]
#[group(required = true, multiple = false, id = "source")]
pub struct PolytopeSource {
    /// JSON spec file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Lawrence prism L(a_0, ..., a_{s-1}).
    #[arg(long, value_delimiter = ',')]
    pub lawrence: Option<Vec<i64>>,
    /// The exceptional simplex 2Δ_2.
    #[arg(long)]
    pub delta2: bool,
    /// The segment [0, c+1].
    #[arg(long)]
    pub interval: Option<u32>,
    /// Vertex list such as "0,0;2,0;0,2;2,2".
    #[arg(long, allow_hyphen_values = true)]
    pub vertices: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PolytopeArgs {
    #[command(flatten)]
    pub source: PolytopeSource,
    /// Iterated pyramids over a Lawrence prism or Δ_2.
    #[arg(long, default_value_t = 0)]
    pub pyramids: u32,
}

/// A resolved polytope with its classification, when known.
pub struct Resolved {
    pub polytope: LatticePolytope,
    pub descriptor: Option<DegreeOneDescriptor>,
    pub label: String,
}

fn parse_vertices(text: &str) -> anyhow::Result<Vec<Vec<i64>>> {
    text.split(';')
        .map(|v| {
            v.split(',')
                .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad coordinate {x:?}")))
                .collect()
        })
        .collect()
}

impl PolytopeArgs {
    pub fn resolve(&self) -> anyhow::Result<Resolved> {
        let src = &self.source;
        let pyramids_unsupported = || anyhow::anyhow!("--pyramids applies to --lawrence and --delta2 only");
        if let Some(path) = &src.spec {
            if self.pyramids != 0 {
                return Err(pyramids_unsupported());
            }
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let spec = PolytopeSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            let descriptor = spec.descriptor().transpose()?;
            let polytope = spec.build()?;
            let label = descriptor.as_ref().map_or_else(|| spec.to_json(), |d| d.to_string());
            return Ok(Resolved {
                polytope,
                descriptor,
                label,
            });
        }
        let descriptor = if let Some(a) = &src.lawrence {
            Some(DegreeOneDescriptor::lawrence(a.clone(), self.pyramids)?)
        } else if src.delta2 {
            Some(DegreeOneDescriptor::delta2(self.pyramids))
        } else if let Some(c) = src.interval {
            if self.pyramids != 0 {
                return Err(pyramids_unsupported());
            }
            lawrence_prism(&[c as i64 + 1])?;
            return Ok(Resolved {
                polytope: toric_core::interval(c),
                descriptor: Some(DegreeOneDescriptor::lawrence(vec![c as i64 + 1], 0)?),
                label: format!("[0,{}]", c + 1),
            });
        } else {
            None
        };
        if let Some(d) = descriptor {
            return Ok(Resolved {
                polytope: d.realize()?,
                label: d.to_string(),
                descriptor: Some(d),
            });
        }
        let text = src.vertices.as_deref().context("no polytope source given")?;
        if self.pyramids != 0 {
            return Err(pyramids_unsupported());
        }
        let vertices = parse_vertices(text)?;
        let m = vertices.first().map_or(0, Vec::len);
        let polytope = LatticePolytope::from_vertices(m, vertices)?;
        Ok(Resolved {
            polytope,
            descriptor: None,
            label: format!("conv({text})"),
        })
    }
}

/// Rendered output and whether every requested check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub success: bool,
}

fn field(q: u64) -> anyhow::Result<Arc<Field>> {
    Ok(Arc::new(Field::with_order(q)?))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

#[derive(Serialize)]
struct PolytopeInfo<'a> {
    polytope: &'a str,
    #[serde(flatten)]
    report: toric_core::PolytopeReport,
    lattice_points: &'a [Vec<i64>],
}

#[derive(Serialize)]
struct CodeParams {
    polytope: String,
    q: u64,
    n: usize,
    k: usize,
    k_formula: Option<u64>,
    dmin_formula: Option<u64>,
    formula_source: Option<toric_core::ParamSource>,
    formula_note: Option<String>,
    dmin_bruteforce: Option<usize>,
    words_examined: Option<u64>,
    #[serde(rename = "match")]
    matches: Option<bool>,
}

#[derive(Serialize)]
struct DualReport {
    polytope: String,
    q: u64,
    n: usize,
    dual_dimension: usize,
    cap: usize,
    dmin: Option<usize>,
    above_cap: bool,
    witness: Option<Vec<usize>>,
}

fn polytope_info(args: &PolytopeArgs) -> anyhow::Result<Vec<Value>> {
    let r = args.resolve()?;
    let report = r.polytope.report()?;
    Ok(vec![to_value(&PolytopeInfo {
        polytope: &r.label,
        report,
        lattice_points: r.polytope.lattice_points(),
    })])
}

fn code_params(args: &PolytopeArgs, q: u64, brute_force: bool, budget: u64) -> anyhow::Result<Vec<Value>> {
    let r = args.resolve()?;
    let f = field(q)?;
    let a = evaluation_matrix(&r.polytope, &f)?;
    let code = primal_code_of(&a);
    let mut report = CodeParams {
        polytope: r.label,
        q,
        n: code.length(),
        k: code.rank(),
        k_formula: None,
        dmin_formula: None,
        formula_source: None,
        formula_note: None,
        dmin_bruteforce: None,
        words_examined: None,
        matches: None,
    };
    if let Some(desc) = &r.descriptor {
        match degree_one_params(desc, q) {
            Ok(p) => {
                report.k_formula = Some(p.k);
                report.dmin_formula = Some(p.dmin);
                report.formula_source = Some(p.source);
            }
            Err(e @ Error::DoesNotFit(_)) => report.formula_note = Some(e.to_string()),
            Err(e) => return Err(e.into()),
        }
    }
    if brute_force {
        let d = dmin_primal_bruteforce(&code, budget)?;
        report.dmin_bruteforce = Some(d.dmin);
        report.words_examined = Some(d.words_examined);
        if let Some(df) = report.dmin_formula {
            report.matches = Some(df == d.dmin as u64 && report.k_formula == Some(report.k as u64));
        }
    }
    Ok(vec![to_value(&report)])
}

fn dual_dmin(args: &PolytopeArgs, q: u64, cap: usize, budget: u64) -> anyhow::Result<Vec<Value>> {
    let r = args.resolve()?;
    let a = evaluation_matrix(&r.polytope, &field(q)?)?;
    let dual = dual_code_of(&a);
    let (dmin, witness) = match dmin_dual(&a, cap, budget)? {
        DualDistance::Exact { dmin, witness } => (Some(dmin), Some(witness)),
        DualDistance::AboveCap { .. } => (None, None),
    };
    Ok(vec![to_value(&DualReport {
        polytope: r.label,
        q,
        n: a.rows(),
        dual_dimension: dual.rank(),
        cap,
        dmin,
        above_cap: dmin.is_none(),
        witness,
    })])
}

#[derive(Serialize)]
struct Labeled<'a, T> {
    polytope: &'a str,
    #[serde(flatten)]
    report: T,
}

fn verify(args: &VerifyArgs) -> anyhow::Result<(Vec<Value>, bool)> {
    let t = &args.target;
    let (check, records, failed): (&str, Vec<Value>, usize) = if t.table1 {
        let rows = verify_table1()?;
        let failed = rows.iter().filter(|r| !r.matches).count();
        ("table1", rows.iter().map(to_value).collect(), failed)
    } else if let Some(qk) = &t.formulas {
        let rows = verify_formulas(qk[0], qk[1], args.m_max)?;
        let failed = rows.iter().filter(|r| !r.matches).count();
        ("formulas", rows.iter().map(to_value).collect(), failed)
    } else if t.moebius {
        let rows = verify_moebius()?;
        let failed = rows.iter().filter(|r| !r.ok).count();
        ("moebius", rows.iter().map(to_value).collect(), failed)
    } else {
        bail!("nothing to verify");
    };
    let total = records.len();
    let mut out = records;
    out.push(json!({ "summary": check, "checked": total, "failed": failed }));
    Ok((out, failed == 0))
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let (records, success) = pool.install(|| dispatch(&cli.command))?;
    let output = match cli.format {
        Format::Json => render_json(&records),
        Format::Text => render_text(&records),
    };
    Ok(Outcome { output, success })
}

fn dispatch(command: &Command) -> anyhow::Result<(Vec<Value>, bool)> {
    let records = match command {
        Command::Polytope(PolytopeCommand::Info(p)) => polytope_info(p)?,
        Command::Code(CodeCommand::Params {
            polytope,
            q,
            brute_force,
            budget,
        }) => code_params(polytope, *q, *brute_force, *budget)?,
        Command::Code(CodeCommand::DualDmin {
            polytope,
            q,
            cap,
            budget,
        }) => dual_dmin(polytope, *q, *cap, *budget)?,
        Command::Stats(StatsCommand::Mode {
            polytope,
            q,
            s,
            samples,
            seed,
            exhaustive_threshold,
            max_extension,
            ext_degree,
        }) => {
            let r = polytope.resolve()?;
            let config = ModeConfig {
                exhaustive_threshold: *exhaustive_threshold,
                samples: *samples,
                seed: *seed,
                max_extension: *max_extension,
            };
            if config.samples == 0 {
                bail!("--samples must be positive");
            }
            let f = field(*q)?;
            let report = match ext_degree {
                Some(d) => relative_mode(&r.polytope, &f, *d, *s, &config)?,
                None => mode(&evaluation_matrix(&r.polytope, &f)?, *s, &config)?,
            };
            vec![to_value(&Labeled {
                polytope: &r.label,
                report,
            })]
        }
        Command::Stats(StatsCommand::GenericFraction {
            polytope,
            q,
            samples,
            seed,
        }) => {
            let r = polytope.resolve()?;
            let frac = generic_fraction_estimate(&r.polytope, &field(*q)?, *samples, *seed)?;
            let mut v = to_value(&Labeled {
                polytope: &r.label,
                report: &frac,
            });
            v["value"] = json!(frac.value());
            vec![v]
        }
        Command::Verify(args) => return verify(args),
    };
    Ok((records, true))
}

pub fn render_json(records: &[Value]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("values serialize"));
        out.push('\n');
    }
    out
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// One `key  value` block for a single record, a column table otherwise.
/// Records whose keys differ from the first (such as a trailing summary) are
/// printed as their own block.
pub fn render_text(records: &[Value]) -> String {
    let mut out = String::new();
    let Some(Value::Object(first)) = records.first() else {
        return out;
    };
    let keys: Vec<&String> = first.keys().collect();
    let same_shape = |r: &Value| r.as_object().is_some_and(|o| o.keys().eq(keys.iter().copied()));
    let table: Vec<&Value> = records.iter().take_while(|r| same_shape(r)).collect();
    let rest = &records[table.len()..];
    if table.len() == 1 {
        out.push_str(&render_block(table[0]));
    } else {
        let rows: Vec<Vec<String>> = table
            .iter()
            .map(|r| keys.iter().map(|k| cell(&r[k.as_str()])).collect())
            .collect();
        let widths: Vec<usize> = (0..keys.len())
            .map(|i| {
                rows.iter()
                    .map(|r| r[i].len())
                    .chain([keys[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: Vec<&str>| -> String {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(keys.iter().map(|k| k.as_str()).collect()));
        for r in &rows {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
        }
    }
    for r in rest {
        out.push('\n');
        out.push_str(&render_block(r));
    }
    out
}

fn render_block(v: &Value) -> String {
    let Value::Object(map) = v else {
        return cell(v) + "\n";
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    map.iter().map(|(k, v)| format!("{k:<width$}  {}\n", cell(v))).collect()
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> anyhow::Result<Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    run(&cli)
}
