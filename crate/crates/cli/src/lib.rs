//! Command implementations and the text matrix format for the `gf2e` tool.
//!
//! A matrix file is a header line
//! `gf2e-mat v1 e=<e> f=<hex> rows=<m> cols=<n> repr=<packed|sliced>`
//! followed by one line per row of lowercase hex entries separated by single
//! spaces. Every line, the last included, ends in a newline.

use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gf2e::mat_packed::PackedMatrix;
use gf2e::newton_john::{cubic_mul, make_table_counted, nj_gauss, nj_mul, nj_trsm_upper_left};
use gf2e::ple_echelon::{echelonize, ple, trsm_lower_left};
use gf2e::poly_mul::{count_products, default_crossover, karatsuba_mul_counted, strassen_nj_mul};
use gf2e::{cling, slice, FieldCtx, Gf2Tuning, MatrixRng, MulCounters};

pub const CROSSOVER_ENV: &str = "GF2E_CROSSOVER";

/// Failures caused by the caller (bad flags, unreadable or malformed input)
/// rather than by a computation. These map to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Exit code for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Repr {
    Packed,
    Sliced,
}

impl Repr {
    fn as_str(self) -> &'static str {
        match self {
            Repr::Packed => "packed",
            Repr::Sliced => "sliced",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub matrix: PackedMatrix,
    pub repr: Repr,
}

pub fn serialize(a: &PackedMatrix, repr: Repr) -> String {
    let ctx = a.ctx();
    let mut out = format!(
        "gf2e-mat v1 e={} f={:x} rows={} cols={} repr={}\n",
        ctx.degree(),
        ctx.modulus(),
        a.nrows(),
        a.ncols(),
        repr.as_str()
    );
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{:x}", a.get(i, j)).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

fn header_field<'a>(field: Option<&'a str>, key: &str) -> anyhow::Result<&'a str> {
    field
        .and_then(|f| f.strip_prefix(key)?.strip_prefix('='))
        .ok_or_else(|| usage(format!("header: expected `{key}=...`")))
}

fn parse_dec(s: &str, what: &str) -> anyhow::Result<usize> {
    s.parse().map_err(|_| usage(format!("header: bad {what} `{s}`")))
}

pub fn parse(text: &str) -> anyhow::Result<MatrixFile> {
    let mut lines = text.split_inclusive('\n');
    let header = lines.next().ok_or_else(|| usage("empty matrix file"))?;
    let header = header
        .strip_suffix('\n')
        .ok_or_else(|| usage("header line is not newline-terminated"))?;
    let mut fields = header.split(' ');
    if fields.next() != Some("gf2e-mat") || fields.next() != Some("v1") {
        return Err(usage("not a `gf2e-mat v1` file"));
    }
    let e = parse_dec(header_field(fields.next(), "e")?, "degree")? as u32;
    let f_hex = header_field(fields.next(), "f")?;
    let f = u32::from_str_radix(f_hex, 16).map_err(|_| usage(format!("header: bad modulus `{f_hex}`")))?;
    let m = parse_dec(header_field(fields.next(), "rows")?, "row count")?;
    let n = parse_dec(header_field(fields.next(), "cols")?, "column count")?;
    let repr = match header_field(fields.next(), "repr")? {
        "packed" => Repr::Packed,
        "sliced" => Repr::Sliced,
        other => return Err(usage(format!("header: unknown repr `{other}`"))),
    };
    if fields.next().is_some() {
        return Err(usage("header: trailing fields"));
    }
    let ctx = Arc::new(FieldCtx::with_modulus(e, f).map_err(|err| usage(format!("header: {err}")))?);
    let mut a = PackedMatrix::zeros(&ctx, m, n);
    for i in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| usage(format!("expected {m} rows, found {i}")))?;
        let line = line
            .strip_suffix('\n')
            .ok_or_else(|| usage(format!("row {i} is not newline-terminated")))?;
        let entries: Vec<&str> = if line.is_empty() { Vec::new() } else { line.split(' ').collect() };
        if entries.len() != n {
            return Err(usage(format!("row {i}: expected {n} entries, found {}", entries.len())));
        }
        for (j, tok) in entries.into_iter().enumerate() {
            let bad = || usage(format!("row {i}, column {j}: bad entry `{tok}`"));
            if tok.is_empty() || tok.bytes().any(|b| !matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
                return Err(bad());
            }
            let v = u32::from_str_radix(tok, 16).map_err(|_| bad())?;
            let x = ctx.check_elem(v).map_err(|err| usage(format!("row {i}, column {j}: {err}")))?;
            a.set(i, j, x);
        }
    }
    if lines.next().is_some() {
        return Err(usage(format!("more than {m} rows")));
    }
    Ok(MatrixFile { matrix: a, repr })
}

pub fn read_matrix(path: &Path) -> anyhow::Result<MatrixFile> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse(&text).with_context(|| format!("reading {}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

/// Resolves a crossover: explicit flag, then the environment, then the
/// per-field default.
pub fn resolve_crossover(flag: Option<usize>, e: u32) -> anyhow::Result<usize> {
    if let Some(c) = flag {
        return Ok(c.max(1));
    }
    match std::env::var(CROSSOVER_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|c| c.max(1))
            .map_err(|_| usage(format!("{CROSSOVER_ENV}: not a dimension: `{v}`"))),
        Err(_) => Ok(default_crossover(e)),
    }
}

#[derive(Debug, Parser)]
#[command(name = "gf2e", version, about = "Dense linear algebra over GF(2^e)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiply two matrix files.
    Mul(MulArgs),
    /// Bring a matrix into (reduced) row echelon form; prints `rank=<r>`.
    Echelonize(EchelonArgs),
    /// Write a random matrix.
    Random(RandomArgs),
    /// Cross-check every backend against each other on random inputs.
    Selftest(SelftestArgs),
    /// Time an operation; prints one `bench ...` line.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MulBackend {
    Cubic,
    Nj,
    Strassen,
    Karatsuba,
}

#[derive(Debug, Args)]
pub struct MulArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Output file (standard output if omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "nj")]
    pub backend: MulBackend,
    /// Recursion crossover for the Strassen backend.
    #[arg(long)]
    pub crossover: Option<usize>,
    /// Print operation counters to standard error.
    #[arg(long)]
    pub counts: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EchelonBackend {
    Nj,
    Ple,
}

#[derive(Debug, Args)]
pub struct EchelonArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Produce the reduced row echelon form.
    #[arg(long)]
    pub full: bool,
    #[arg(long, value_enum, default_value = "ple")]
    pub backend: EchelonBackend,
    #[arg(long)]
    pub crossover: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub e: u32,
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "packed")]
    pub repr: Repr,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Field degrees to test.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
    pub e: Vec<u32>,
    /// Matrix dimensions to test.
    #[arg(long, value_delimiter = ',', default_value = "1,7,33,64,65,130")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub iters: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Where to write the first counterexample.
    #[arg(long, default_value = "gf2e-counterexample.txt")]
    pub dump: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchOp {
    Cubic,
    Nj,
    Strassen,
    Karatsuba,
    Gauss,
    Ple,
}

impl BenchOp {
    fn as_str(self) -> &'static str {
        match self {
            BenchOp::Cubic => "cubic",
            BenchOp::Nj => "nj",
            BenchOp::Strassen => "strassen",
            BenchOp::Karatsuba => "karatsuba",
            BenchOp::Gauss => "gauss",
            BenchOp::Ple => "ple",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub op: BenchOp,
    pub e: u32,
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub crossover: Option<usize>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Mul(args) => cmd_mul(&args),
        Command::Echelonize(args) => cmd_echelonize(&args),
        Command::Random(args) => cmd_random(&args),
        Command::Selftest(args) => cmd_selftest(&args),
        Command::Bench(args) => cmd_bench(&args),
    }
}

fn field(e: u32) -> anyhow::Result<Arc<FieldCtx>> {
    FieldCtx::new(e).map(Arc::new).map_err(|err| usage(err.to_string()))
}

pub fn multiply(
    a: &PackedMatrix,
    b: &PackedMatrix,
    backend: MulBackend,
    crossover: usize,
) -> gf2e::Result<(PackedMatrix, MulCounters)> {
    Ok(match backend {
        MulBackend::Cubic => (cubic_mul(a, b)?, MulCounters::default()),
        MulBackend::Nj => (nj_mul(a, b)?, MulCounters::default()),
        MulBackend::Strassen => (strassen_nj_mul(a, b, crossover)?, MulCounters::default()),
        MulBackend::Karatsuba => {
            let (c, counters) = karatsuba_mul_counted(&slice(a), &slice(b), &Gf2Tuning::default())?;
            (cling(&c), counters)
        }
    })
}

fn cmd_mul(args: &MulArgs) -> anyhow::Result<()> {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    let ka = a.matrix.ctx();
    let kb = b.matrix.ctx();
    if **ka != **kb {
        return Err(usage(format!(
            "operands use different fields (e={} f={:x} vs e={} f={:x})",
            ka.degree(),
            ka.modulus(),
            kb.degree(),
            kb.modulus()
        )));
    }
    if a.matrix.ncols() != b.matrix.nrows() {
        return Err(usage(format!(
            "cannot multiply {}x{} by {}x{}",
            a.matrix.nrows(),
            a.matrix.ncols(),
            b.matrix.nrows(),
            b.matrix.ncols()
        )));
    }
    let crossover = resolve_crossover(args.crossover, ka.degree())?;
    let (c, counters) = multiply(&a.matrix, &b.matrix, args.backend, crossover)?;
    if args.counts {
        eprintln!(
            "gf2_products={} gf2_additions={} temporaries_peak={}",
            counters.gf2_products, counters.gf2_additions, counters.temporaries_peak
        );
    }
    write_output(args.output.as_deref(), &serialize(&c, a.repr))
}

fn cmd_echelonize(args: &EchelonArgs) -> anyhow::Result<()> {
    let MatrixFile { mut matrix, repr } = read_matrix(&args.input)?;
    let rank = match args.backend {
        EchelonBackend::Nj => nj_gauss(&mut matrix, args.full),
        EchelonBackend::Ple => {
            let crossover = resolve_crossover(args.crossover, matrix.ctx().degree())?;
            echelonize(&mut matrix, args.full, crossover)
        }
    };
    write_output(args.output.as_deref(), &serialize(&matrix, repr))?;
    println!("rank={rank}");
    Ok(())
}

fn cmd_random(args: &RandomArgs) -> anyhow::Result<()> {
    let k = field(args.e)?;
    let a = PackedMatrix::random(&k, args.rows, args.cols, &mut MatrixRng::new(args.seed));
    write_output(args.output.as_deref(), &serialize(&a, args.repr))
}

/// A failed self-test check together with the input that exposed it.
#[derive(Debug)]
pub struct Counterexample {
    pub check: String,
    pub inputs: Vec<PackedMatrix>,
}

/// Writes the counterexample inputs to `path`, one matrix file after another.
pub fn dump_counterexample(cx: &Counterexample, path: &Path) -> anyhow::Result<()> {
    let text: String = cx.inputs.iter().map(|m| serialize(m, Repr::Packed)).collect();
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn fail(check: impl Into<String>, inputs: &[&PackedMatrix]) -> Result<(), Counterexample> {
    Err(Counterexample {
        check: check.into(),
        inputs: inputs.iter().map(|m| (*m).clone()).collect(),
    })
}

/// Runs every self-test check once on fresh random inputs of the given shape.
pub fn selftest_case(k: &Arc<FieldCtx>, n: usize, rng: &mut MatrixRng) -> Result<(), Counterexample> {
    let e = k.degree();
    let l = 1 + rng.below(n as u64 + 8) as usize;
    let a = PackedMatrix::random(k, n, l, rng);
    let b = PackedMatrix::random(k, l, n, rng);

    let (want, _) = multiply(&a, &b, MulBackend::Cubic, 1).expect("conformable");
    for backend in [MulBackend::Nj, MulBackend::Strassen, MulBackend::Karatsuba] {
        let crossover = 1 + rng.below(64) as usize;
        let (got, counters) = multiply(&a, &b, backend, crossover).expect("conformable");
        if got != want {
            return fail(format!("mul backend {backend:?} (crossover {crossover}) disagrees with cubic"), &[&a, &b]);
        }
        if backend == MulBackend::Karatsuba && counters.gf2_products != count_products(e) {
            return fail("karatsuba product count", &[&a, &b]);
        }
    }

    if cling(&slice(&a)) != a {
        return fail("slice/cling round trip", &[&a]);
    }

    let (_, counts) = make_table_counted(&a.copy_window(0, 0, 1, l).expect("row in range")).expect("one row");
    if counts.scalar_row_muls != e as usize || counts.row_additions != (1 << e) - 1 {
        return fail(format!("table counts {counts:?}"), &[&a]);
    }

    for crossover in [4, 16, usize::MAX] {
        let mut c = a.clone();
        let f = ple(&mut c, crossover);
        if f.reconstruct(&c).ok().as_ref() != Some(&a) {
            return fail(format!("PLE reconstruction (crossover {crossover})"), &[&a]);
        }
    }

    let mut u = PackedMatrix::random(k, n, n, rng);
    let mut low = u.transpose();
    for i in 0..n {
        for j in 0..i {
            u.set(i, j, 0);
            low.set(j, i, 0);
        }
        let d = 1 + rng.below(k.order() as u64 - 1) as u16;
        u.set(i, i, d);
        low.set(i, i, d);
    }
    let rhs = PackedMatrix::random(k, n, 1 + n % 9, rng);
    let mut x = rhs.clone();
    nj_trsm_upper_left(&u, &mut x).expect("nonzero diagonal");
    if nj_mul(&u, &x).ok().as_ref() != Some(&rhs) {
        return fail("upper triangular solve", &[&u, &rhs]);
    }
    let mut x = rhs.clone();
    trsm_lower_left(&low, &mut x, false, 8).expect("nonzero diagonal");
    if nj_mul(&low, &x).ok().as_ref() != Some(&rhs) {
        return fail("lower triangular solve", &[&low, &rhs]);
    }

    let mut g = a.clone();
    let r = nj_gauss(&mut g, true);
    let mut p = a.clone();
    if echelonize(&mut p, true, 8) != r || p != g {
        return fail("reduced echelon forms disagree", &[&a]);
    }
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs) -> anyhow::Result<()> {
    if args.sizes.contains(&0) {
        return Err(usage("sizes must be positive"));
    }
    let fields: Vec<Arc<FieldCtx>> = args.e.iter().map(|&e| field(e)).collect::<anyhow::Result<_>>()?;
    let mut rng = MatrixRng::new(args.seed);
    let mut cases = 0;
    for k in &fields {
        for &n in &args.sizes {
            for _ in 0..args.iters {
                if let Err(cx) = selftest_case(k, n, &mut rng) {
                    dump_counterexample(&cx, &args.dump)?;
                    bail!(
                        "selftest failed: {} (e={}, n={n}); inputs written to {}",
                        cx.check,
                        k.degree(),
                        args.dump.display()
                    );
                }
                cases += 1;
            }
        }
    }
    println!("selftest ok: {cases} cases");
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    if args.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let k = field(args.e)?;
    let crossover = resolve_crossover(args.crossover, args.e)?;
    let mut rng = MatrixRng::new(args.seed);
    let a = PackedMatrix::random(&k, args.n, args.n, &mut rng);
    let b = PackedMatrix::random(&k, args.n, args.n, &mut rng);
    let (sa, sb) = (slice(&a), slice(&b));
    let mut gf2_muls = 0;
    let mut times = Vec::with_capacity(args.reps);
    for _ in 0..args.reps {
        let start = Instant::now();
        match args.op {
            BenchOp::Cubic => drop(cubic_mul(&a, &b)?),
            BenchOp::Nj => drop(nj_mul(&a, &b)?),
            BenchOp::Strassen => drop(strassen_nj_mul(&a, &b, crossover)?),
            BenchOp::Karatsuba => {
                let (_, counters) = karatsuba_mul_counted(&sa, &sb, &Gf2Tuning::default())?;
                gf2_muls = counters.gf2_products;
            }
            BenchOp::Gauss => drop(nj_gauss(&mut a.clone(), true)),
            BenchOp::Ple => drop(ple(&mut a.clone(), crossover)),
        }
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    println!(
        "bench op={} e={} n={} reps={} median_s={:.6} gf2_muls={}",
        args.op.as_str(),
        args.e,
        args.n,
        args.reps,
        times[times.len() / 2],
        gf2_muls
    );
    Ok(())
}

/// Parses a command line, runs it and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}
