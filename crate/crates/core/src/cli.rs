//! The `lattice` command-line interface.
//!
//! Every subcommand renders either a human-readable table or a JSON document
//! (`--format machine`); `--out` additionally writes the JSON document to a
//! file. Exit codes: 0 on success, 1 when a lattice or check fails
//! validation, 2 on usage and I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::diamond::{diamond_table, hamiltonian};
use crate::lattice::parse::to_document;
use crate::lattice::{parse_lattice, validate, FiniteLattice, LatticeBuilder, ValidationReport};
use crate::operator::Rational;
use crate::product::{convolve_measures, convolve_moments, ProductContext};
use crate::radial::{jacobi_from_compression, jacobi_from_formula, radial_invariance, JacobiData};
use crate::spectral::{
    eigendecompose, resolvent, vacuum_moments_full, vacuum_moments_radial, MomentSequence, RationalFunction,
    SpectralMeasure,
};
use crate::verify::verify;

/// Largest lattice `diamond-table` will print.
pub const DIAMOND_TABLE_LIMIT: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "lattice", version, about = "Diamond-product Hamiltonians on finite geometric lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Also write the machine-readable result to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Decimal places for floating-point display.
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: usize,
    /// Element cap for built lattices (overrides LATTICE_SIZE_CAP).
    #[arg(long, global = true)]
    pub size_cap: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Machine,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyArg {
    Boolean,
    Uniform,
    Projective,
    Affine,
    Product,
    Custom,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Full,
    Radial,
    Both,
}

/// One lattice source: family flags, or a custom document.
#[derive(Args, Debug, Clone, Default)]
pub struct LatticeArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Left factor of a product: a document path or a spec such as `boolean:1`.
    #[arg(long)]
    pub left: Option<String>,
    /// Right factor of a product.
    #[arg(long)]
    pub right: Option<String>,
    /// Custom lattice document.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Custom lattice document (positional form of `--input`).
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a lattice and print its summary (machine format: the lattice document).
    Build(LatticeArgs),
    /// Run the structural checks and print the validation report.
    Validate(LatticeArgs),
    /// Print the diamond-product table (at most 64 elements).
    DiamondTable(LatticeArgs),
    /// Print the Hamiltonian as an exact sparse matrix.
    Hamiltonian(LatticeArgs),
    /// Print the radial Jacobi coefficients.
    Jacobi(LatticeArgs),
    /// Print the vacuum resolvent as numerator and denominator coefficients.
    Resolvent(LatticeArgs),
    /// Print exact vacuum moments.
    Moments {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 10)]
        max_k: usize,
        #[arg(long, value_enum, default_value_t = Via::Both)]
        via: Via,
    },
    /// Print the vacuum spectral measure of the radial Jacobi matrix.
    Spectrum(LatticeArgs),
    /// Check the Kronecker-sum, shuffle and convolution laws for a product.
    ProductCheck {
        /// Left factor: a document path or a spec such as `boolean:1`.
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        #[arg(long, default_value_t = 8)]
        max_k: usize,
    },
    /// Convolve two spectral measures given as `{"atoms": [[x, w], ...]}` files.
    Convolve {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Run every applicable invariant on one lattice.
    Verify(LatticeArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// Input rejected or a check failed; carries the rendered report.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

/// Formats `x` with `decimals` digits after the point, trimming trailing
/// zeros; magnitudes of 1e16 and above switch to scientific notation.
pub fn format_float(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() >= 1e16 {
        return format!("{:.*e}", decimals, x);
    }
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

struct Output {
    table: String,
    machine: Value,
    failed: bool,
}

impl Output {
    fn ok(table: String, machine: Value) -> Self {
        Output { table, machine, failed: false }
    }
}

struct Context {
    builder: LatticeBuilder,
    precision: usize,
}

impl Context {
    fn sig(&self, x: f64) -> String {
        format_float(x, self.precision)
    }

    /// The float as a JSON number rounded to the display precision.
    fn sig_json(&self, x: f64) -> Value {
        self.sig(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
    }

    fn need(&self, v: Option<u32>, flag: &str, family: &str) -> Result<u32, CliError> {
        v.ok_or_else(|| CliError::Usage(format!("--family {family} requires --{flag}")))
    }

    fn lattice(&self, args: &LatticeArgs) -> Result<FiniteLattice, CliError> {
        let path = match (&args.input, &args.file) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("give either --input or a positional file, not both".into()))
            }
            (a, b) => a.as_ref().or(b.as_ref()),
        };
        let family = match (args.family, path) {
            (Some(FamilyArg::Custom), Some(p)) | (None, Some(p)) => return self.load_document(p),
            (Some(FamilyArg::Custom), None) => return Err(CliError::Usage("--family custom requires --input".into())),
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("family flags and a custom input are mutually exclusive".into()))
            }
            (None, None) => return Err(CliError::Usage("no lattice given: use --family or --input".into())),
            (Some(f), None) => f,
        };
        let built = match family {
            FamilyArg::Boolean => self.builder.boolean(self.need(args.n, "n", "boolean")?),
            FamilyArg::Uniform => {
                self.builder.uniform(self.need(args.r, "r", "uniform")?, self.need(args.m, "m", "uniform")?)
            }
            FamilyArg::Projective => {
                self.builder.projective(self.need(args.r, "r", "projective")?, self.need(args.q, "q", "projective")?)
            }
            FamilyArg::Affine => {
                self.builder.affine(self.need(args.r, "r", "affine")?, self.need(args.q, "q", "affine")?)
            }
            FamilyArg::Product => {
                let left =
                    args.left.as_deref().ok_or_else(|| CliError::Usage("--family product requires --left".into()))?;
                let right =
                    args.right.as_deref().ok_or_else(|| CliError::Usage("--family product requires --right".into()))?;
                let (l, r) = (self.factor(left)?, self.factor(right)?);
                self.builder.product(&l, &r)
            }
            FamilyArg::Custom => unreachable!("handled above"),
        };
        built.map_err(|e| CliError::Usage(e.to_string()))
    }

    /// `boolean:N`, `uniform:R:M`, `projective:R:Q`, `affine:R:Q`, or a document path.
    fn factor(&self, spec: &str) -> Result<FiniteLattice, CliError> {
        let mut parts = spec.split(':');
        let head = parts.next().unwrap_or_default();
        let nums: Result<Vec<u32>, _> = parts.map(str::parse).collect();
        let family = match head {
            "boolean" => Some(FamilyArg::Boolean),
            "uniform" => Some(FamilyArg::Uniform),
            "projective" => Some(FamilyArg::Projective),
            "affine" => Some(FamilyArg::Affine),
            _ => None,
        };
        let Some(family) = family else {
            return self.load_document(Path::new(spec));
        };
        let bad = || CliError::Usage(format!("malformed lattice spec {spec:?}"));
        let nums = nums.map_err(|_| bad())?;
        let args = match (family, nums.as_slice()) {
            (FamilyArg::Boolean, &[n]) => LatticeArgs { family: Some(family), n: Some(n), ..Default::default() },
            (FamilyArg::Uniform, &[r, m]) => {
                LatticeArgs { family: Some(family), r: Some(r), m: Some(m), ..Default::default() }
            }
            (_, &[r, q]) if family != FamilyArg::Boolean && family != FamilyArg::Uniform => {
                LatticeArgs { family: Some(family), r: Some(r), q: Some(q), ..Default::default() }
            }
            _ => return Err(bad()),
        };
        self.lattice(&args)
    }

    fn load_document(&self, path: &Path) -> Result<FiniteLattice, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let parsed = parse_lattice(&text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
        if !parsed.report.all_passed() {
            return Err(CliError::Failed(render_validation(&parsed.report)));
        }
        Ok(parsed.lattice)
    }

    /// Like [`Context::lattice`] but keeps non-semimodular custom lattices so
    /// that `validate` can report on them.
    fn lattice_for_validation(&self, args: &LatticeArgs) -> Result<FiniteLattice, CliError> {
        let path = args.input.as_ref().or(args.file.as_ref());
        match (args.family, path) {
            (None | Some(FamilyArg::Custom), Some(p)) if args.input.is_none() || args.file.is_none() => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                parse_lattice(&text)
                    .map(|parsed| parsed.lattice)
                    .map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))
            }
            _ => self.lattice(args),
        }
    }
}

fn render_validation(report: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family: {}", report.family);
    let _ = writeln!(s, "elements: {}", report.elements);
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        let scope = if c.exhaustive { "" } else { " (sampled)" };
        let _ = write!(s, "  {:<18} {status}{scope}", c.name);
        if let Some(ce) = &c.counterexample {
            let ids: Vec<String> = ce.iter().map(|x| x.0.to_string()).collect();
            let _ = write!(s, "  counterexample [{}]", ids.join(", "));
        }
        s.push('\n');
    }
    let _ = writeln!(s, "geometric: {}", report.is_geometric);
    let _ = writeln!(s, "semimodular and atomic: {}", report.is_semimodular_atomic);
    for note in &report.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

fn cmd_build(l: &FiniteLattice) -> Output {
    let layers: Vec<usize> = l.layers().iter().map(Vec::len).collect();
    let mut table = String::new();
    let _ = writeln!(table, "family: {}", l.family());
    let _ = writeln!(table, "elements: {}", l.len());
    let _ = writeln!(table, "rank: {}", l.top_rank());
    let _ = writeln!(table, "layers: {layers:?}");
    let _ = writeln!(table, "atoms: {}", l.atoms().len());
    let _ = writeln!(table, "covers: {}", l.covers().count());
    let machine = serde_json::to_value(to_document(l)).expect("document serializes");
    Output::ok(table, machine)
}

fn cmd_validate(l: &FiniteLattice) -> Output {
    let report = validate(l);
    Output {
        table: render_validation(&report),
        machine: serde_json::to_value(&report).expect("report serializes"),
        failed: !report.all_passed(),
    }
}

fn cmd_diamond_table(l: &FiniteLattice) -> Result<Output, CliError> {
    if l.len() > DIAMOND_TABLE_LIMIT {
        return Err(CliError::Usage(format!(
            "diamond-table prints lattices with at most {DIAMOND_TABLE_LIMIT} elements, this one has {}",
            l.len()
        )));
    }
    let rows: Vec<Vec<Value>> = l
        .elements()
        .map(|x| {
            l.elements()
                .map(|y| crate::diamond::diamond(l, x, y).element().map_or(Value::Null, |z| json!(z.0)))
                .collect()
        })
        .collect();
    let labels: Vec<&str> = l.elements().map(|x| l.label(x)).collect();
    Ok(Output::ok(diamond_table(l), json!({ "labels": labels, "table": rows })))
}

fn cmd_hamiltonian(l: &FiniteLattice) -> Output {
    let h = hamiltonian(l);
    let mut table = String::new();
    let _ = writeln!(table, "dim: {}  nonzeros: {}", h.dim(), h.nnz());
    for (r, c, v) in h.entries() {
        let _ = writeln!(table, "{:>6} {:>6}  {:<12} {} <- {}", r.0, c.0, v.to_string(), l.label(r), l.label(c));
    }
    Output::ok(table, serde_json::to_value(h.to_dump()).expect("dump serializes"))
}

fn cmd_jacobi(ctx: &Context, l: &FiniteLattice) -> Result<Output, CliError> {
    let h = hamiltonian(l);
    let j = jacobi_from_compression(l, &h).map_err(|e| CliError::Failed(e.to_string()))?;
    let agrees = j == jacobi_from_formula(l);
    let inv = radial_invariance(l, &h).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut table = String::new();
    let _ = writeln!(table, "family: {}", l.family());
    let _ = writeln!(table, "{:>3} {:>8} {:>10} {:>16} {:>18}", "k", "n_k", "W_k", "beta_k^2", "beta_k");
    for k in 0..j.r() {
        let _ = writeln!(
            table,
            "{k:>3} {:>8} {:>10} {:>16} {:>18}",
            j.layers.sizes[k],
            j.weights[k],
            j.beta_sq[k].to_string(),
            ctx.sig(j.beta[k])
        );
    }
    let _ = writeln!(table, "layers: {:?}", j.layers.sizes);
    let _ = writeln!(table, "formula agrees: {agrees}");
    let _ = writeln!(table, "radially invariant: {}", inv.invariant);
    if let Some(k) = inv.failing_level {
        let _ = writeln!(table, "first non-invariant level: {k}");
    }
    let machine = json!({
        "family": l.family().to_string(),
        "layers": j.layers.sizes,
        "weights": j.weights,
        "beta_sq": strings(&j.beta_sq),
        "beta": j.beta.iter().map(|&b| ctx.sig_json(b)).collect::<Vec<_>>(),
        "formula_agrees": agrees,
        "invariant": inv.invariant,
        "failing_level": inv.failing_level,
    });
    Ok(Output { table, machine, failed: !agrees })
}

fn jacobi_or_fail(l: &FiniteLattice) -> Result<JacobiData, CliError> {
    jacobi_from_compression(l, &hamiltonian(l)).map_err(|e| CliError::Failed(e.to_string()))
}

fn function_json(g: &RationalFunction) -> Value {
    json!({
        "numerator": g.numerator().coefficient_strings(),
        "denominator": g.denominator().coefficient_strings(),
    })
}

fn cmd_resolvent(l: &FiniteLattice) -> Result<Output, CliError> {
    let g = resolvent(&jacobi_or_fail(l)?);
    let reduced = g.reduce();
    let mut table = String::new();
    let _ = writeln!(table, "numerator:   [{}]", g.numerator().coefficient_strings().join(", "));
    let _ = writeln!(table, "denominator: [{}]", g.denominator().coefficient_strings().join(", "));
    let _ = writeln!(table, "G(t) = {g}");
    if reduced.denominator() != g.denominator() {
        let _ = writeln!(table, "reduced: {reduced}");
    }
    let mut machine = function_json(&g);
    machine["reduced"] = function_json(&reduced);
    Ok(Output::ok(table, machine))
}

fn cmd_moments(l: &FiniteLattice, max_k: usize, via: Via) -> Result<Output, CliError> {
    let full = matches!(via, Via::Full | Via::Both).then(|| vacuum_moments_full(l, &hamiltonian(l), max_k));
    let radial = match via {
        Via::Radial | Via::Both => Some(vacuum_moments_radial(&jacobi_or_fail(l)?, max_k)),
        Via::Full => None,
    };
    let mut table = String::new();
    let header = match via {
        Via::Full => format!("{:>3} {:>24}", "k", "full"),
        Via::Radial => format!("{:>3} {:>24}", "k", "radial"),
        Via::Both => format!("{:>3} {:>24} {:>24}", "k", "full", "radial"),
    };
    let _ = writeln!(table, "{header}");
    let cell = |m: &Option<MomentSequence>, k: usize| m.as_ref().map(|m| m.values[k].to_string());
    for k in 0..=max_k {
        let cells: Vec<String> =
            [cell(&full, k), cell(&radial, k)].into_iter().flatten().map(|c| format!("{c:>24}")).collect();
        let _ = writeln!(table, "{k:>3} {}", cells.join(" "));
    }
    let mut machine = json!({ "max_k": max_k });
    if let Some(m) = &full {
        machine["full"] = json!(strings(&m.values));
    }
    if let Some(m) = &radial {
        machine["radial"] = json!(strings(&m.values));
    }
    if let (Some(f), Some(r)) = (&full, &radial) {
        let agree = f == r;
        let _ = writeln!(table, "agree: {agree}");
        machine["agree"] = json!(agree);
    }
    Ok(Output::ok(table, machine))
}

fn measure_output(ctx: &Context, mu: &SpectralMeasure) -> (String, Value) {
    let mut table = String::new();
    let _ = writeln!(table, "{:>20} {:>20}", "eigenvalue", "weight");
    for &(x, w) in &mu.atoms {
        let _ = writeln!(table, "{:>20} {:>20}", ctx.sig(x), ctx.sig(w));
    }
    let atoms: Vec<[Value; 2]> = mu.atoms.iter().map(|&(x, w)| [ctx.sig_json(x), ctx.sig_json(w)]).collect();
    (table, json!({ "atoms": atoms }))
}

fn cmd_spectrum(ctx: &Context, l: &FiniteLattice) -> Result<Output, CliError> {
    let mu = eigendecompose(&jacobi_or_fail(l)?).map_err(|e| CliError::Failed(e.to_string()))?;
    let (table, machine) = measure_output(ctx, &mu);
    Ok(Output::ok(table, machine))
}

fn cmd_product_check(
    ctx: &Context,
    left: &str,
    right: &str,
    max_degree: u32,
    max_k: usize,
) -> Result<Output, CliError> {
    let (l1, l2) = (ctx.factor(left)?, ctx.factor(right)?);
    let pc = ProductContext::new(&l1, &l2).map_err(|e| CliError::Usage(e.to_string()))?;
    let kron = pc.kronecker_sum_check();
    let shuffle = pc.shuffle_check(max_degree);
    let moments = pc.moment_check(max_k);
    let mu = |l: &FiniteLattice| eigendecompose(&jacobi_or_fail(l)?).map_err(|e| CliError::Failed(e.to_string()));
    let conv = convolve_measures(&mu(&l1)?, &mu(&l2)?);
    let exact = convolve_moments(
        &vacuum_moments_full(&l1, &pc.h_left, max_k),
        &vacuum_moments_full(&l2, &pc.h_right, max_k),
        max_k,
    )
    .expect("computed to max_k");
    let dev = conv
        .moments(max_k as u32)
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| {
            let b = crate::spectral::poly::to_f64(b);
            (a - b).abs() / b.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let measure_ok = dev <= 1e-8;
    let verdict = |b: bool| if b { "pass" } else { "FAIL" };
    let mut table = String::new();
    let _ = writeln!(table, "product: {}", pc.product.family());
    let _ = writeln!(table, "kronecker sum        {}  ({} entries)", verdict(kron.equal), kron.entries_compared);
    let _ = writeln!(
        table,
        "shuffle formula      {}  ({} pairs, d <= {max_degree})",
        verdict(shuffle.passed()),
        shuffle.pairs_checked
    );
    let _ = writeln!(table, "moment convolution   {}  (k <= {max_k})", verdict(moments.equal));
    let _ = writeln!(table, "measure convolution  {}  (max relative moment deviation {dev:.2e})", verdict(measure_ok));
    let machine = json!({
        "product": pc.product.family().to_string(),
        "kronecker": kron,
        "shuffle": shuffle,
        "moments": moments,
        "measure_moment_deviation": dev,
        "measure_convolution": measure_ok,
    });
    let failed = !(kron.equal && shuffle.passed() && moments.equal && measure_ok);
    Ok(Output { table, machine, failed })
}

#[derive(Deserialize)]
struct MeasureFile {
    atoms: Vec<(f64, f64)>,
}

fn read_measure(path: &Path) -> Result<SpectralMeasure, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: MeasureFile =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(SpectralMeasure::new(file.atoms))
}

fn cmd_verify(l: &FiniteLattice) -> Output {
    let report = verify(l);
    let mut table = String::new();
    let _ = writeln!(table, "family: {}  elements: {}", report.family, report.elements);
    for inv in &report.invariants {
        let status = if inv.passed { "pass" } else { "FAIL" };
        let _ = write!(table, "  {:<28} {status}", inv.name);
        if !inv.detail.is_empty() {
            let _ = write!(table, "  {}", inv.detail);
        }
        table.push('\n');
    }
    Output { failed: !report.passed(), machine: serde_json::to_value(&report).expect("report serializes"), table }
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let mut builder = LatticeBuilder::from_env();
    if let Some(cap) = cli.output.size_cap {
        builder = builder.size_cap(cap);
    }
    let ctx = Context { builder, precision: cli.output.precision };
    match &cli.command {
        Command::Build(a) => Ok(cmd_build(&ctx.lattice(a)?)),
        Command::Validate(a) => Ok(cmd_validate(&ctx.lattice_for_validation(a)?)),
        Command::DiamondTable(a) => cmd_diamond_table(&ctx.lattice(a)?),
        Command::Hamiltonian(a) => Ok(cmd_hamiltonian(&ctx.lattice(a)?)),
        Command::Jacobi(a) => cmd_jacobi(&ctx, &ctx.lattice(a)?),
        Command::Resolvent(a) => cmd_resolvent(&ctx.lattice(a)?),
        Command::Moments { lattice, max_k, via } => cmd_moments(&ctx.lattice(lattice)?, *max_k, *via),
        Command::Spectrum(a) => cmd_spectrum(&ctx, &ctx.lattice(a)?),
        Command::ProductCheck { left, right, max_degree, max_k } => {
            cmd_product_check(&ctx, left, right, *max_degree, *max_k)
        }
        Command::Convolve { left, right } => {
            let mu = convolve_measures(&read_measure(left)?, &read_measure(right)?);
            let (table, machine) = measure_output(&ctx, &mu);
            Ok(Output::ok(table, machine))
        }
        Command::Verify(a) => Ok(cmd_verify(&ctx.lattice(a)?)),
    }
}

fn emit(cli: &Cli, out: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    let machine = serde_json::to_string_pretty(&out.machine).expect("JSON value serializes");
    if let Some(path) = &cli.output.out {
        std::fs::write(path, format!("{machine}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let text = match cli.output.format {
        Format::Table => out.table.clone(),
        Format::Machine => format!("{machine}\n"),
    };
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = dispatch(&cli).and_then(|out| {
        emit(&cli, &out, stdout)?;
        Ok(out.failed)
    });
    match result {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) => format!("error: {m}\n\nFor more information, try '--help'.\n"),
                CliError::Io(m) => format!("error: {m}\n"),
                CliError::Failed(m) => m.clone(),
            };
            let _ = stderr.write_all(msg.as_bytes());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("lattice").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn float_display() {
        assert_eq!(format_float(3f64.sqrt() / 2.0, 12), "0.866025403784");
        assert_eq!(format_float(3f64.sqrt(), 12), "1.732050807569");
        assert_eq!(format_float(0.5, 12), "0.5");
        assert_eq!(format_float(-0.0, 12), "0");
        assert_eq!(format_float(-1e-17, 12), "0");
        assert_eq!(format_float(-1.5, 12), "-1.5");
        assert_eq!(format_float(2.5e20, 2), "2.50e20");
    }

    #[test]
    fn jacobi_m3() {
        let (code, out, _) = run_capture(&["jacobi", "--family", "uniform", "--r", "2", "--m", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("3/4") && out.contains("0.866025403784") && out.contains("1.732050807569"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["jacobi", "--family", "boolean"]).0, 2);
        assert_eq!(run_capture(&["jacobi"]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["diamond-table", "--family", "boolean", "--n", "7"]).0, 2);
        assert_eq!(run_capture(&["build", "--family", "projective", "--r", "2", "--q", "4"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("product-check"));
    }
}
