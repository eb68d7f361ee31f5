//! `modular`: batch front end for modular-core.
//!
//! Every command writes JSON lines. Exit status is 0 when all checks pass,
//! 1 when a check fails or the computation is rejected, 2 when the input
//! cannot be parsed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use modular_core::block_factor;
use modular_core::finite_factor::{identity_residual, vector_norm};
use modular_core::io::{self as mio, BlockFile, SpectrumFile};
use modular_core::linalg;
use modular_core::modular_engine::{modular_objects, polar_decompose, unitarity_residual};
use modular_core::sample::Sampler;
use modular_core::spectral::{self, DeltaSpectrum, FactorType, SpectralData};
use modular_core::verify::{verify_vector, Check};
use modular_core::{BlockVector, Context, Error, Matrix};

const DEFAULT_SEED: u64 = 20240607;

#[derive(Parser)]
#[command(name = "modular", version, about = "Modular objects and spectral classification for finite factor models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative tolerance for rank decisions and residual thresholds.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Polar factors, modular conjugation and modular operator of a matrix.
    Modobj {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Full invariant suite on a vector (read from a file or drawn at random).
    Verify {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Dimension of the random vector when no input is given.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Truncation study of the block model, or a report on one block vector.
    Blocks {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Largest truncation size.
        #[arg(long = "N", default_value_t = 16)]
        size: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Admissibility of spectrum files and their pairwise equivalence.
    Classify {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Target spectrum of Δ₀; defaults to that of the first input.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Inequivalent admissible data for a target within search bounds.
    Enumerate {
        #[arg(long)]
        input: PathBuf,
        /// Overrides the factor type of the request.
        #[arg(long = "type")]
        factor_type: Option<FactorType>,
        /// Overrides the cutoff of the request bounds.
        #[arg(long)]
        cutoff: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Counting formula against the matrix model for finite type I data.
    Crosscheck {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of random cases when no input is given.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Parse(String),
    Compute(Error),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Compute(e)
    }
}

type Outcome = Result<bool, Failure>;

fn parse<T>(r: modular_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Parse(e.to_string()))
}

struct Report {
    out: Box<dyn Write>,
    failures: Vec<String>,
}

impl Report {
    fn open(path: Option<&Path>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out, failures: Vec::new() })
    }

    fn line(&mut self, value: &impl Serialize) -> io::Result<()> {
        let text = serde_json::to_string(value).map_err(io::Error::other)?;
        writeln!(self.out, "{text}")
    }

    fn check(&mut self, c: &Check) -> io::Result<()> {
        if !c.pass {
            self.failures.push(format!("{}: residual {:e} > tolerance {:e}", c.invariant, c.residual, c.tolerance));
        }
        self.line(c)
    }

    fn fail(&mut self, message: String) {
        self.failures.push(message);
    }

    fn finish(mut self) -> Outcome {
        self.out.flush()?;
        for f in &self.failures {
            eprintln!("FAIL {f}");
        }
        Ok(self.failures.is_empty())
    }
}

fn context(n: usize, tol: Option<f64>) -> Result<Context, Failure> {
    let ctx = Context::new(n)?;
    Ok(match tol {
        Some(t) => ctx.with_tol(t)?,
        None => ctx,
    })
}

fn read_matrix(path: &Path) -> Result<Matrix, Failure> {
    parse(mio::read_matrix(path))
}

fn modobj(input: &Path, common: &Common) -> Outcome {
    let t = read_matrix(input)?;
    let ctx = context(t.dim(), common.tol)?;
    let objects = modular_objects(&t, &ctx)?;
    let (h, v) = polar_decompose(&t, &ctx)?;
    let (eigenvalues, _) = linalg::hermitian_eigen(objects.delta0.matrix());
    let mut report = Report::open(common.output.as_deref())?;
    report.line(&json!({
        "n": t.dim(),
        "condition_number": t.condition_number(),
        "h0": mio::matrix_to_json(&objects.h0),
        "v": mio::matrix_to_json(&objects.v),
        "delta_eigenvalues": eigenvalues,
        "delta_identity_residual": identity_residual(&objects.delta0),
    }))?;
    let kappa = t.condition_number();
    let tol = 100.0 * ctx.tol() * kappa * kappa;
    let u_norm = vector_norm(&t, &ctx)?;
    let rel = |x: &Matrix| -> modular_core::Result<f64> { Ok(vector_norm(&(x - &t), &ctx)? / u_norm) };
    let checks = [
        Check::new("polar_reconstruction", (&h * &v).distance(&t) / t.op_norm(), tol),
        Check::new("unitarity", unitarity_residual(&v), tol),
        Check::new("delta_fixes_vector", rel(&objects.delta0.apply(&t)?)?, tol),
        Check::new("conjugation_fixes_vector", rel(&objects.j0.apply(&t)?)?, tol),
        Check::new("conjugation_involution", identity_residual(&(&objects.j0 * &objects.j0)), tol),
        Check::new("tomita_operator_fixes_vector", rel(&objects.s.apply(&t)?)?, tol),
    ];
    for c in &checks {
        report.check(c)?;
    }
    report.finish()
}

fn verify(input: Option<&Path>, seed: u64, n: usize, common: &Common) -> Outcome {
    let u = match input {
        Some(p) => read_matrix(p)?,
        None => Sampler::new(seed).invertible::<f64>(n, 1e3).0,
    };
    let ctx = context(u.dim(), common.tol)?;
    let checks = verify_vector(&u, &ctx)?;
    let mut report = Report::open(common.output.as_deref())?;
    for c in &checks {
        report.check(c)?;
    }
    report.finish()
}

fn blocks(input: Option<&Path>, n: usize, size: usize, common: &Common) -> Outcome {
    let mut report = Report::open(common.output.as_deref())?;
    match input {
        Some(p) => {
            let file: BlockFile = parse(mio::read_text(p).and_then(|t| mio::parse_blocks(&t)))?;
            let u: BlockVector = parse(file.to_vector())?;
            let ctx = context(u.n(), common.tol)?;
            let (tst, tts, norm_sq) = block_factor::block_trace_condition(&u, &ctx)?;
            let (cyclic, separating) = block_factor::block_cyclic_separating(&u, &ctx)?;
            let (left_span, right_span) = block_factor::block_span_oracle(&u, &ctx)?;
            report.line(&json!({
                "n": u.n(), "N": u.size(),
                "trace_t_star_t": tst, "trace_t_t_star": tts, "norm_sq": norm_sq,
                "cyclic": cyclic, "separating": separating,
                "left_orbit_spans": left_span, "right_orbit_spans": right_span,
            }))?;
            let scale = norm_sq.max(f64::MIN_POSITIVE);
            let residual = (tst - norm_sq).abs().max((tts - norm_sq).abs()) / scale;
            report.check(&Check::new("block_trace_condition", residual, ctx.tol()))?;
            if (cyclic, separating) != (left_span, right_span) {
                report.fail("predicates disagree with the span oracle".into());
            }
        }
        None => {
            let ctx = context(n, common.tol)?;
            let mut sizes: Vec<usize> = std::iter::successors(Some(1usize), |s| Some(s * 2)).take_while(|&s| s <= size).collect();
            if sizes.last() != Some(&size) && size > 0 {
                sizes.push(size);
            }
            for row in block_factor::convergence_study(&ctx, &sizes)? {
                report.line(&row)?;
                let residual = (row.trace_t_star_t - row.norm_sq).abs().max((row.trace_t_t_star - row.norm_sq).abs()) / row.norm_sq;
                if residual > ctx.tol() {
                    report.fail(format!("block_trace_condition at N = {}: residual {residual:e}", row.size));
                }
                if !(row.cyclic && row.separating) {
                    report.fail(format!("decaying vector not cyclic and separating at N = {}", row.size));
                }
            }
        }
    }
    report.finish()
}

fn read_spectrum(path: &Path) -> Result<SpectralData, Failure> {
    parse(mio::read_text(path).and_then(|t| mio::parse_spectral_data(&t)))
}

fn classify(inputs: &[PathBuf], target: Option<&Path>, cutoff: usize, common: &Common) -> Outcome {
    let data: Vec<SpectralData> = inputs.iter().map(|p| read_spectrum(p)).collect::<Result<_, _>>()?;
    let target: DeltaSpectrum = match target {
        Some(p) => parse(mio::read_text(p).and_then(|t| mio::parse_target(&t)))?,
        None => spectral::delta_spectrum(&data[0], cutoff)?,
    };
    let mut report = Report::open(common.output.as_deref())?;
    let mut admissible = Vec::with_capacity(data.len());
    for (path, s) in inputs.iter().zip(&data) {
        let r = spectral::is_admissible(s, &target, cutoff)?;
        report.line(&json!({
            "input": path.display().to_string(),
            "admissible": r.admissible,
            "within_cutoff": r.within_cutoff,
            "clauses": r.clauses,
            "second_class_exists": spectral::second_class_exists(s)?,
        }))?;
        if !r.admissible {
            let failed: Vec<&str> = r.clauses.iter().filter(|c| !c.pass).map(|c| c.name).collect();
            report.fail(format!("{} not admissible ({})", path.display(), failed.join(", ")));
        }
        admissible.push(r.admissible);
    }
    let mut all_equivalent = true;
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            let eq = spectral::equivalent(&data[i], &data[j]);
            all_equivalent &= eq;
            report.line(&json!({ "pair": [i, j], "equivalent": eq }))?;
        }
    }
    let which = match (admissible.iter().filter(|&&a| a).count(), data.len()) {
        (0, _) => "none".to_string(),
        (1, 1) => "yes".to_string(),
        (2, 2) => "both".to_string(),
        (k, total) if k == total => "all".to_string(),
        _ => admissible.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i.to_string()).collect::<Vec<_>>().join(","),
    };
    let summary = if data.len() > 1 {
        format!("admissible: {which}; equivalent: {all_equivalent}")
    } else {
        format!("admissible: {which}")
    };
    report.line(&json!({ "summary": summary }))?;
    report.finish()
}

fn enumerate(input: &Path, factor_type: Option<FactorType>, cutoff: Option<usize>, common: &Common) -> Outcome {
    let request = parse(mio::read_text(input).and_then(|t| mio::parse_enumeration_request(&t)))?;
    let target = parse(request.target.to_spectrum())?;
    let mut bounds = request.bounds.clone();
    if let Some(c) = cutoff {
        bounds.cutoff = c;
    }
    let factor_type = factor_type.unwrap_or(request.factor_type);
    let classes = spectral::enumerate_classes(&target, factor_type, &bounds)?;
    let mut report = Report::open(common.output.as_deref())?;
    for s in &classes {
        report.line(&SpectrumFile::from_data(s))?;
    }
    report.line(&json!({ "classes": classes.len() }))?;
    report.finish()
}

fn crosscheck(input: Option<&Path>, seed: u64, count: usize, common: &Common) -> Outcome {
    let data = match input {
        Some(p) => vec![read_spectrum(p)?],
        None => {
            let mut rng = Sampler::new(seed);
            (0..count).map(|_| rng.finite_type_i(spectral::MAX_CROSS_CHECK_DIM)).collect()
        }
    };
    let ctx = context(1, common.tol)?;
    let mut report = Report::open(common.output.as_deref())?;
    for (k, s) in data.iter().enumerate() {
        let r = spectral::cross_check_finite(s, &ctx)?;
        report.line(&json!({ "case": k, "data": SpectrumFile::from_data(s), "report": r }))?;
        if !r.pass {
            report.fail(format!("cross check case {k}: max relative error {:e}", r.max_rel_error));
        }
    }
    report.finish()
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Modobj { input, common } => modobj(input, common),
        Command::Verify { input, seed, n, common } => verify(input.as_deref(), *seed, *n, common),
        Command::Blocks { input, n, size, common } => blocks(input.as_deref(), *n, *size, common),
        Command::Classify { input, target, cutoff, common } => classify(input, target.as_deref(), *cutoff, common),
        Command::Enumerate { input, factor_type, cutoff, common } => enumerate(input, *factor_type, *cutoff, common),
        Command::Crosscheck { input, seed, count, common } => crosscheck(input.as_deref(), *seed, *count, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
