use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::Path;

use critconst::io::{self as cio, Format};
use critconst::lp::{solve_with, SolveOptions};
use critconst::sim::{default_roster, default_true_counts};
use critconst::{
    bh_constants, bound_vector, build_problem, by_constants, gr_sd_constants, lr_fdp_constants,
    lr_kfwer_constants, rescale, run_study, run_with_constants, unit_constants_cached, AssociatedMatrix,
    CriticalVector, ErrorRate, ErrorRateSpec, ProcedureFamily, ProcedureSpec, SimConfig, SolutionCache,
};
use serde::Serialize;

use crate::{Cli, Command, OutputArgs, RateArgs};

pub enum CliError {
    Usage(String),
    Lib(critconst::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<critconst::Error> for CliError {
    fn from(e: critconst::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Matrix { rate, out } => matrix(&rate, &out),
        Command::Constants { family, n, k, gamma, rate, modified, alpha, cache_dir, out } => {
            let opts = ConstantsOpts { family, n, k, gamma, rate, modified, alpha };
            constants(&opts, cache_dir.as_deref(), &out)
        }
        Command::Optimize { rate, family, input, weights, cache_dir, max_pivots, out } => {
            let options = SolveOptions { max_iterations: max_pivots };
            optimize(&rate, family, input.as_deref(), weights.as_deref(), cache_dir.as_deref(), options, &out)
        }
        Command::Verify { rate, input, family, out } => verify(&rate, input.as_deref(), family, &out),
        Command::Adjust { rate, input, family, alpha, modified, cache_dir, out } => {
            adjust(&rate, &input, family, alpha, modified, cache_dir.as_deref(), &out)
        }
        Command::Simulate { n, d, true_counts, reps, seed, rho, alpha, gamma, q, trace, out } => {
            let mut config = SimConfig::with_defaults(n, seed);
            config.effects = d;
            config.true_counts = true_counts.unwrap_or_else(|| default_true_counts(n));
            config.reps = reps;
            config.rho = rho;
            config.alpha = alpha;
            config.gamma = gamma;
            config.fdr_level = q;
            config.procedures = default_roster(n, gamma, alpha, q);
            config.trace = trace.is_some();
            simulate(&config, cli.threads, trace.as_deref(), &out)
        }
    }
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) => usage(format!("cannot open {}: {e}", path.display())),
    }
}

fn write_json<T: Serialize>(value: &T, mut w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(critconst::Error::from)?;
    writeln!(w)?;
    Ok(())
}

impl RateArgs {
    fn spec(&self, n: Option<usize>) -> Result<ErrorRateSpec> {
        let Some(n) = n.or(self.n) else {
            return usage("--n is required");
        };
        if self.rate.is_kfwer() && self.gamma.is_some() {
            return usage(format!("--gamma does not apply to {}", self.rate));
        }
        if !self.rate.is_kfwer() && self.k.is_some() {
            return usage(format!("--k does not apply to {}", self.rate));
        }
        let (k, gamma) = if self.rate.is_kfwer() {
            (Some(self.k.unwrap_or(1)), None)
        } else {
            match self.gamma {
                Some(g) => (None, Some(g)),
                None => return usage(format!("--gamma is required for {}", self.rate)),
            }
        };
        Ok(ErrorRateSpec::new(self.rate, n, k, gamma)?)
    }

    /// `n` from the flag, or from the input length when the flag is absent.
    fn spec_for_len(&self, len: usize) -> Result<ErrorRateSpec> {
        match self.n {
            Some(n) if n != len => {
                usage(format!("--n {n} does not match the {len} values read from the input"))
            }
            _ => self.spec(Some(len)),
        }
    }
}

fn matrix(rate: &RateArgs, out: &OutputArgs) -> Result<()> {
    let a = AssociatedMatrix::build(&rate.spec(None)?)?;
    let w = open_output(out)?;
    match out.format {
        Format::Csv => cio::write_matrix_csv(&a, w)?,
        Format::Json => cio::write_matrix_json(&a, w)?,
    }
    Ok(())
}

struct ConstantsOpts {
    family: ProcedureFamily,
    n: usize,
    k: Option<usize>,
    gamma: Option<f64>,
    rate: Option<ErrorRate>,
    modified: bool,
    alpha: Option<f64>,
}

fn raw_constants(family: ProcedureFamily, n: usize, k: Option<usize>, gamma: Option<f64>) -> Result<CriticalVector> {
    Ok(match (family, k, gamma) {
        (ProcedureFamily::Bh, ..) => bh_constants(n)?,
        (ProcedureFamily::By, ..) => by_constants(n)?,
        (ProcedureFamily::Gr, ..) => gr_sd_constants(n)?,
        (ProcedureFamily::Rs, Some(k), None) => lr_kfwer_constants(n, k)?,
        (ProcedureFamily::Rs, None, Some(g)) => lr_fdp_constants(n, g)?,
        (ProcedureFamily::Rs, ..) => return usage("family rs needs exactly one of --k or --gamma"),
    })
}

fn constants(opts: &ConstantsOpts, cache_dir: Option<&Path>, out: &OutputArgs) -> Result<()> {
    let mut c = raw_constants(opts.family, opts.n, opts.k, opts.gamma)?;
    if let Some(rate) = opts.rate {
        let args = RateArgs { rate, n: Some(opts.n), k: opts.k, gamma: opts.gamma };
        let a = AssociatedMatrix::build(&args.spec(None)?)?;
        let (rescaled, d) = rescale(&c, &a)?;
        log::info!("rescaled {} by D = {d}", opts.family.as_str());
        c = rescaled;
        if opts.modified {
            let problem = build_problem(&a, &c, None)?;
            c = solve_cached(&problem, opts.family.as_str(), cache_dir, SolveOptions::default())?.xi;
        }
    }
    if let Some(alpha) = opts.alpha {
        c = c.scaled(alpha)?;
    }
    let w = open_output(out)?;
    match out.format {
        Format::Csv => cio::write_constants_csv(&c, w)?,
        Format::Json => cio::write_constants_json(&c, w)?,
    }
    Ok(())
}

fn solve_cached(
    problem: &critconst::LpProblem,
    floor_family: &str,
    cache_dir: Option<&Path>,
    options: SolveOptions,
) -> Result<critconst::LpSolution> {
    match cache_dir {
        Some(dir) => {
            let (s, hit) = SolutionCache::open(dir)?.solve_with(problem, floor_family, options)?;
            if hit {
                log::info!("served from cache in {}", dir.display());
            }
            Ok(s)
        }
        None => Ok(solve_with(problem, options, |_| ControlFlow::Continue(()))?),
    }
}

fn read_weights(path: &Path) -> Result<Vec<f64>> {
    let mut weights = Vec::new();
    for (i, line) in open_input(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t.parse::<f64>() {
            Ok(w) => weights.push(w),
            Err(_) => {
                let message = format!("cannot parse weight `{t}`");
                return Err(critconst::Error::Parse { line: i as u64 + 1, message }.into());
            }
        }
    }
    Ok(weights)
}

fn optimize(
    rate: &RateArgs,
    family: ProcedureFamily,
    input: Option<&Path>,
    weights: Option<&Path>,
    cache_dir: Option<&Path>,
    options: SolveOptions,
    out: &OutputArgs,
) -> Result<()> {
    let (floor, label) = match input {
        Some(path) => {
            let c = cio::read_constants(open_input(path)?)?;
            (c, "file".to_string())
        }
        None => {
            if family.is_fdr() {
                return usage("optimize needs a bh or rs floor");
            }
            let spec = rate.spec(None)?;
            let raw = raw_constants(family, spec.n, spec.k, spec.gamma)?;
            let a = AssociatedMatrix::build(&spec)?;
            (rescale(&raw, &a)?.0, family.as_str().to_string())
        }
    };
    let a = AssociatedMatrix::build(&rate.spec_for_len(floor.len())?)?;
    let weights = weights.map(read_weights).transpose()?;
    let problem = build_problem(&a, &floor, weights)?;
    let solution = solve_cached(&problem, &label, cache_dir, options)?;
    let w = open_output(out)?;
    match out.format {
        Format::Csv => cio::write_solution_csv(&floor, &solution, w)?,
        Format::Json => cio::write_solution_json(&floor, &solution, w)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct Verdict {
    max_bound: f64,
    feasible: bool,
    bounds: Vec<f64>,
}

fn verify(rate: &RateArgs, input: Option<&Path>, family: Option<ProcedureFamily>, out: &OutputArgs) -> Result<()> {
    let c = match (input, family) {
        (Some(path), _) => cio::read_constants(open_input(path)?)?,
        (None, Some(family)) => {
            let spec = rate.spec(None)?;
            raw_constants(family, spec.n, spec.k, spec.gamma)?
        }
        (None, None) => return usage("verify needs --input or --family"),
    };
    let a = AssociatedMatrix::build(&rate.spec_for_len(c.len())?)?;
    let bounds = bound_vector(&a, &c)?;
    let max_bound = bounds.iter().copied().fold(0.0, f64::max);
    let feasible = max_bound <= 1.0 + critconst::lp::FEASIBILITY_TOL;
    let mut w = open_output(out)?;
    match out.format {
        Format::Csv => {
            writeln!(w, "# max bound {max_bound:.6}, {}", if feasible { "feasible" } else { "infeasible" })?;
            writeln!(w, "i,bound")?;
            for (i, b) in bounds.iter().enumerate() {
                writeln!(w, "{},{b}", i + 1)?;
            }
        }
        Format::Json => write_json(&Verdict { max_bound, feasible, bounds }, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn adjust(
    rate: &RateArgs,
    input: &Path,
    family: ProcedureFamily,
    alpha: f64,
    modified: bool,
    cache_dir: Option<&Path>,
    out: &OutputArgs,
) -> Result<()> {
    let p = cio::read_pvalues(open_input(input)?)?;
    let (k, gamma) = if family.is_fdr() {
        if let Some(n) = rate.n.filter(|&n| n != p.len()) {
            return usage(format!("--n {n} does not match the {} values read from the input", p.len()));
        }
        (None, None)
    } else {
        let m = rate.spec_for_len(p.len())?;
        (m.k, m.gamma)
    };
    let spec = ProcedureSpec {
        rate: rate.rate,
        n: p.len(),
        k,
        gamma,
        family,
        modified,
        alpha,
    };
    let cache = cache_dir.map(SolutionCache::open).transpose()?;
    let unit = unit_constants_cached(&spec, cache.as_ref())?;
    let (decisions, adjusted) = run_with_constants(&p, &unit, alpha, spec.direction())?;
    let rows = cio::decision_rows(&p, &decisions, &adjusted);
    let w = open_output(out)?;
    let name = spec.name();
    match out.format {
        Format::Csv => cio::write_decisions_csv(&name, &rows, decisions.rejections(), w)?,
        Format::Json => cio::write_decisions_json(&name, &rows, decisions.rejections(), w)?,
    }
    Ok(())
}

fn simulate(config: &SimConfig, threads: Option<usize>, trace: Option<&Path>, out: &OutputArgs) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => return usage(format!("cannot start {threads:?} threads: {e}")),
    };
    let report = pool.install(|| run_study(config))?;
    for f in &report.failures {
        log::warn!("{} skipped: {}", f.procedure, f.message);
    }
    for c in report.containment.iter().filter(|c| c.violations > 0) {
        log::warn!(
            "{} rejected less than {} in {} replications (trueCount {}, d {})",
            c.modified,
            c.original,
            c.violations,
            c.true_count,
            c.d
        );
    }
    if let (Some(path), Some(rows)) = (trace, &report.trace) {
        write_trace(path, rows, out.format)?;
    }
    let w = open_output(out)?;
    match out.format {
        Format::Csv => cio::write_sim_csv(&report, w)?,
        Format::Json => cio::write_sim_json(&report, w)?,
    }
    Ok(())
}

fn write_trace(path: &Path, rows: &[critconst::sim::TraceRow], format: Format) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::Json => write_json(&rows, &mut w)?,
        Format::Csv => {
            writeln!(w, "trueCount,d,rep,procedure,rejections,falseRejections")?;
            for r in rows {
                writeln!(w, "{},{},{},{},{},{}", r.true_count, r.d, r.rep, r.procedure, r.rejections, r.false_rejections)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
