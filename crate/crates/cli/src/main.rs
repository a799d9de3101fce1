mod output;

use bosegas::minimize::{self, HylSolverConfig, MinimizerSolution, SolutionDetail, Truncation};
use bosegas::sim::{self, SimConfig, SimEstimate};
use bosegas::specfun::{self, WBranch};
use bosegas::thermo::{self, Regime, ThermoConfig, ThermoPoint};
use bosegas::{verify, Error, Model, ModelParams, BETA_NORM};
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{ext, num, quantity, write_csv, write_json, Echo, Format};
use serde_json::json;
use std::io::{self, Write};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "bosegas", version, about = "Pressures, zeros and cycle statistics of mean-field Bose gases")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = ModelArg::Ideal, global = true)]
    model: ModelArg,
    /// Dimension
    #[arg(long, default_value_t = 3, global = true)]
    d: u32,
    /// Inverse temperature
    #[arg(long, global = true, conflicts_with = "beta_norm")]
    beta: Option<f64>,
    /// Use beta = 1/(4 pi), so that q_k = k^(-1-d/2) at mu = 0
    #[arg(long, global = true)]
    beta_norm: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, global = true)]
    mu: f64,
    /// Reference chemical potential; only mu + alpha enters the models
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, global = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, global = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, global = true)]
    b: f64,
    /// Explicit entries of zeros (default 4096), or simulated cycle lengths (default 16)
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Drop cycles longer than this from the model
    #[arg(long, global = true)]
    kcut: Option<usize>,
    /// Objective tolerance for ties between HYL solutions
    #[arg(long, default_value_t = 1e-10, global = true)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Output file (standard output if absent)
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Cap on worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report the periodic-boundary ideal condensate at mu + alpha = 0
    #[arg(long, global = true)]
    periodic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Ideal,
    Cmf,
    Pmf,
    Hyl,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ideal => Model::Ideal,
            ModelArg::Cmf => Model::Cmf,
            ModelArg::Pmf => Model::Pmf,
            ModelArg::Hyl => Model::Hyl,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Zero of the rate function (the typical cycle counts)
    Zero,
    /// Pressure and its mu-derivative at one point
    Pressure,
    /// Pressure, slope, condensate and regime over a grid of mu
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long)]
        count: usize,
    },
    /// Free energy f(beta, rho)
    FreeEnergy {
        #[arg(long)]
        rho: f64,
    },
    /// Condensate density at one point
    Condensate,
    /// Monte Carlo estimate of the cycle densities
    Simulate {
        #[arg(long, default_value_t = 1000.0)]
        volume: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        burn_in: usize,
        #[arg(long, default_value_t = 4)]
        chains: usize,
        /// Compare the means with the zero of the model cut at kmax
        #[arg(long)]
        verify_zero: bool,
    },
    /// Run the acceptance criteria
    Verify {
        /// Criterion ids or module names (comma separated)
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Evaluate a special function
    Specfun {
        #[arg(long, value_enum)]
        func: Func,
        /// Argument; for the Bose function this is alpha >= 0 in g(order, alpha)
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Order of the Bose function
        #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
        order: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Func {
    /// zeta(x)
    Zeta,
    /// g(order, x)
    Bose,
    /// principal branch W_0(x)
    W0,
    /// lower branch W_-1(x)
    Wm1,
}

enum Fail {
    Lib(Error),
    Config(String),
    Io(io::Error),
    Verify,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Io(e)
    }
}

type Res<T> = Result<T, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verify) => ExitCode::from(1),
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
        Err(Fail::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Res<()> {
    let c = &cli.common;
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(Fail::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::Config(e.to_string()))?;
    }
    let mut sink: Box<dyn Write> = match &c.out {
        Some(path) => Box::new(io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let w = sink.as_mut();
    match &cli.cmd {
        Cmd::Zero => cmd_zero(c, w)?,
        Cmd::Pressure => cmd_pressure(c, w)?,
        Cmd::Sweep { start, stop, count } => cmd_sweep(c, *start, *stop, *count, w)?,
        Cmd::FreeEnergy { rho } => cmd_free_energy(c, *rho, w)?,
        Cmd::Condensate => cmd_condensate(c, w)?,
        Cmd::Simulate {
            volume,
            samples,
            burn_in,
            chains,
            verify_zero,
        } => {
            let params = params(c)?;
            let cfg = SimConfig {
                burn_in: *burn_in,
                seed: c.seed,
                chains: *chains,
                ..SimConfig::new(params, *volume, c.kmax.unwrap_or(16), *samples)
            };
            cmd_simulate(c, &cfg, *verify_zero, w)?
        }
        Cmd::Verify { only } => {
            let passed = cmd_verify(c, only, w)?;
            w.flush()?;
            if !passed {
                return Err(Fail::Verify);
            }
        }
        Cmd::Specfun { func, x, order } => cmd_specfun(c, *func, *x, *order, w)?,
    }
    w.flush()?;
    Ok(())
}

fn params(c: &Common) -> Res<ModelParams> {
    let beta = match (c.beta, c.beta_norm) {
        (Some(b), false) => b,
        (None, true) => BETA_NORM,
        _ => return Err(Fail::Config("pass --beta or --beta-norm".into())),
    };
    let mut p = ModelParams {
        a: c.a,
        b: c.b,
        ..ModelParams::new(c.model.into(), c.d, beta, c.mu)
    }
    .with_alpha(c.alpha);
    p.k_cut = c.kcut;
    p.validate()?;
    Ok(p)
}

fn thermo_cfg(c: &Common) -> Res<ThermoConfig> {
    let cfg = ThermoConfig {
        trunc: Truncation::new(c.kmax.unwrap_or(4096))?,
        hyl: HylSolverConfig {
            tol: c.tol,
            ..Default::default()
        },
        periodic: c.periodic,
    };
    cfg.hyl.validate()?;
    Ok(cfg)
}

fn echo(cmd: &str, c: &Common, p: &ModelParams) -> Echo {
    let mut e = Echo::default();
    e.text("command", cmd)
        .text("model", p.model.as_str())
        .int("d", p.d as u64)
        .float("beta", p.beta)
        .text("beta_source", if c.beta_norm { "beta-norm" } else { "beta" })
        .float("mu", p.mu)
        .float("alpha", p.alpha)
        .float("mu_eff", p.mu_eff())
        .text("reduction", "mu <- mu + alpha, alpha <- 0")
        .float("a", p.a)
        .float("b", p.b)
        .opt_int("k_cut", p.k_cut)
        .float("tol", c.tol)
        .flag("periodic", c.periodic)
        .int("seed", c.seed)
        .opt_int("threads", c.threads);
    e
}

fn detail_notes(z: &MinimizerSolution) -> Vec<String> {
    let mut n = vec![
        format!("objective: {}", num(z.objective)),
        format!("unique: {}", z.unique),
        format!("residual: {}", num(z.residual)),
        format!("density: {}", ext(z.xi.density())),
    ];
    if let Some(d) = z.delta_star {
        n.push(format!("delta_star: {}", num(d)));
    }
    if !z.chi.is_empty() {
        n.push(format!("chi: {:?}", z.chi));
    }
    match z.detail {
        SolutionDetail::Ideal => {}
        SolutionDetail::Cmf { k, factor, gamma } => {
            n.push(format!("K: {}", num(k)));
            n.push(format!("factor: {}", num(factor)));
            n.push(format!("gamma: {}", num(gamma)));
        }
        SolutionDetail::Pmf { eta, supercritical } => {
            n.push(format!("eta: {}", num(eta)));
            n.push(format!("supercritical: {supercritical}"));
            n.push("fixed point: weights q^(0) with exponent beta k (mu - a delta)_-".into());
        }
        SolutionDetail::Hyl { eta, above_kink } => {
            n.push(format!("eta: {}", num(eta)));
            n.push(format!("above_kink: {above_kink}"));
        }
    }
    n.push(format!("tail: {}", serde_json::to_string(z.xi.tail()).unwrap_or_default()));
    n
}

fn cmd_zero(c: &Common, w: &mut dyn Write) -> Res<()> {
    let p = params(c)?;
    let cfg = thermo_cfg(c)?;
    let mut minimizer_unique = None;
    let (z, all) = if p.model == Model::Hyl {
        let all = minimize::hyl_solutions(&p, &cfg.hyl, cfg.trunc)?;
        let mut z = minimize::zero_hyl(&p, &cfg.hyl, cfg.trunc)?;
        // several chi = 0 families mean the consistency equation has no unique solution
        let families = all.iter().filter(|s| s.chi.iter().all(|&c| c == 0)).count();
        minimizer_unique = Some(z.unique);
        z.unique &= families <= 1;
        (z, Some(all))
    } else {
        (minimize::zero(&p, cfg.trunc, &cfg.hyl)?, None)
    };
    let mut e = echo("zero", c, &p);
    e.int("k_max", cfg.trunc.k_max as u64);
    match c.format {
        Format::Csv => {
            let mut notes = detail_notes(&z);
            if let Some(m) = minimizer_unique {
                notes.push(format!("minimizer_unique: {m}"));
            }
            if let Some(all) = &all {
                notes.push(format!("solutions: {}", all.len()));
                for (i, s) in all.iter().enumerate() {
                    notes.push(format!(
                        "solution {i}: delta = {}, chi = {:?}, objective = {}, residual = {}",
                        num(s.delta_star.unwrap_or(f64::NAN)),
                        s.chi,
                        num(s.objective),
                        num(s.residual)
                    ));
                }
            }
            let rows: Vec<Vec<String>> = z
                .xi
                .values()
                .iter()
                .enumerate()
                .map(|(i, &x)| vec![(i + 1).to_string(), num(x)])
                .collect();
            write_csv(w, &e, &notes, &["k", "xi"], &rows)?;
        }
        Format::Json => {
            let mut body = json!({ "solution": z, "minimizer_unique": minimizer_unique });
            if let Some(all) = all {
                body["solutions"] = json!(all
                    .iter()
                    .map(|s| json!({
                        "delta_star": s.delta_star,
                        "chi": s.chi,
                        "objective": s.objective,
                        "residual": s.residual,
                    }))
                    .collect::<Vec<_>>());
            }
            write_json(w, &e, body)?;
        }
    }
    Ok(())
}

fn cmd_pressure(c: &Common, w: &mut dyn Write) -> Res<()> {
    let p = params(c)?;
    let cfg = thermo_cfg(c)?;
    let pr = thermo::pressure(&p, &cfg)?;
    let dp = thermo::dpressure_dmu(&p, &cfg)?;
    let e = echo("pressure", c, &p);
    match c.format {
        Format::Csv => write_csv(
            w,
            &e,
            &[],
            &["mu_eff", "pressure", "dp_dmu"],
            &[vec![num(p.mu_eff()), num(pr), quantity(dp)]],
        )?,
        Format::Json => write_json(w, &e, json!({ "mu_eff": p.mu_eff(), "pressure": pr, "dp_dmu": dp }))?,
    }
    Ok(())
}

pub const SWEEP_HEADER: [&str; 10] = ["mu_eff", "pressure", "dp_dmu", "condensate", "regime", "model", "d", "beta", "a", "b"];

fn sweep_row(r: &ThermoPoint, p: &ModelParams) -> Vec<String> {
    let regime = if r.error.is_some() { "error" } else { r.regime.as_str() };
    vec![
        num(r.mu_eff),
        num(r.pressure),
        quantity(r.dp_dmu),
        quantity(r.condensate),
        regime.into(),
        p.model.as_str().into(),
        p.d.to_string(),
        num(p.beta),
        num(p.a),
        num(p.b),
    ]
}

fn cmd_sweep(c: &Common, start: f64, stop: f64, count: usize, w: &mut dyn Write) -> Res<()> {
    if count < 2 {
        return Err(Fail::Config("--count must be at least 2".into()));
    }
    if !(stop > start) {
        return Err(Fail::Config("--stop must exceed --start".into()));
    }
    // the template may sit outside the ideal domain; rows are validated one by one
    let p = match params(c) {
        Ok(p) => p,
        Err(Fail::Lib(Error::Domain(_))) if c.model == ModelArg::Ideal || c.model == ModelArg::Cmf => {
            let mut q = params(&Common { mu: -c.alpha - 1.0, ..clone_common(c) })?;
            q.mu = c.mu;
            q
        }
        Err(e) => return Err(e),
    };
    let cfg = thermo_cfg(c)?;
    let grid: Vec<f64> = (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect();
    let rows = thermo::sweep(&p, &grid, &cfg)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    for (i, r) in rows.iter().enumerate() {
        if let Some(msg) = &r.error {
            eprintln!("row {i} (mu = {}): {msg}", grid[i]);
        }
    }
    let mut e = echo("sweep", c, &p);
    e.float("start", start)
        .float("stop", stop)
        .int("count", count as u64)
        .int("k_max", cfg.trunc.k_max as u64);
    match c.format {
        Format::Csv => {
            let notes: Vec<String> = rows
                .iter()
                .filter(|r| r.regime == Regime::NonSmooth)
                .map(|r| format!("non-smooth point near mu_eff = {}", num(r.mu_eff)))
                .collect();
            let table: Vec<Vec<String>> = rows.iter().map(|r| sweep_row(r, &p)).collect();
            write_csv(w, &e, &notes, &SWEEP_HEADER, &table)?;
        }
        Format::Json => write_json(w, &e, json!({ "rows": rows }))?,
    }
    if failed == rows.len() {
        let all_nc = rows
            .iter()
            .all(|r| r.error.as_deref().is_some_and(|m| m.starts_with("no convergence")));
        let msg = "every sweep point failed".to_string();
        return Err(if all_nc {
            Fail::Lib(Error::NonConvergence(msg))
        } else {
            Fail::Config(msg)
        });
    }
    Ok(())
}

fn clone_common(c: &Common) -> Common {
    Common {
        model: c.model,
        d: c.d,
        beta: c.beta,
        beta_norm: c.beta_norm,
        mu: c.mu,
        alpha: c.alpha,
        a: c.a,
        b: c.b,
        kmax: c.kmax,
        kcut: c.kcut,
        tol: c.tol,
        format: c.format,
        out: c.out.clone(),
        seed: c.seed,
        threads: c.threads,
        periodic: c.periodic,
    }
}

fn cmd_free_energy(c: &Common, rho: f64, w: &mut dyn Write) -> Res<()> {
    let p = params(&Common { mu: 0.0, alpha: 0.0, ..clone_common(c) })?;
    let cfg = thermo_cfg(c)?;
    let f = thermo::free_energy(&p, rho, &cfg)?;
    let e = echo("free-energy", c, &p);
    match c.format {
        Format::Csv => write_csv(
            w,
            &e,
            &[],
            &["rho", "f", "maximizing_alpha", "saturated"],
            &[vec![
                num(f.rho),
                num(f.f),
                f.maximizing_alpha.map_or("-inf".into(), num),
                f.saturated.to_string(),
            ]],
        )?,
        Format::Json => write_json(w, &e, json!({ "free_energy": f }))?,
    }
    Ok(())
}

fn cmd_condensate(c: &Common, w: &mut dyn Write) -> Res<()> {
    let p = params(c)?;
    let cfg = thermo_cfg(c)?;
    let q = thermo::condensate(&p, &cfg)?;
    let rc = thermo::critical_density(&p)?;
    let e = echo("condensate", c, &p);
    match c.format {
        Format::Csv => write_csv(
            w,
            &e,
            &[],
            &["mu_eff", "condensate", "critical_density"],
            &[vec![num(p.mu_eff()), quantity(q), ext(rc)]],
        )?,
        Format::Json => write_json(
            w,
            &e,
            json!({ "mu_eff": p.mu_eff(), "condensate": q, "critical_density": rc }),
        )?,
    }
    Ok(())
}

// the zero of the model restricted to cycles of length <= k_max
fn sim_target(p: &ModelParams, k_max: usize, tol: f64) -> Res<(Vec<f64>, Option<String>)> {
    let cut = p.with_cutoff(k_max);
    if p.model == Model::Ideal {
        let w = cut.weights();
        return Ok(((1..=k_max).map(|k| w.q(k, p.mu_eff())).collect(), None));
    }
    let hyl = HylSolverConfig { tol, ..Default::default() };
    let z = minimize::zero(&cut, Truncation::new(k_max)?, &hyl)?;
    let mut warn = None;
    if let Some(d) = z.delta_star {
        if p.mu_eff() - p.a * d > 0.0 {
            warn = Some(format!(
                "mu + alpha - a delta* = {} > 0: the chain samples the raw Hamiltonian, whose law differs from the zero here",
                num(p.mu_eff() - p.a * d)
            ));
        }
    }
    Ok((z.xi.values().to_vec(), warn))
}

fn cmd_simulate(c: &Common, cfg: &SimConfig, verify_zero: bool, w: &mut dyn Write) -> Res<()> {
    let p = cfg.params;
    let est: SimEstimate = if p.model == Model::Ideal {
        sim::sample_ideal(cfg)?
    } else {
        sim::sample_tilted(cfg)?
    };
    let (target, warn) = if verify_zero {
        let (t, warn) = sim_target(&p, cfg.k_max, c.tol)?;
        (Some(t), warn)
    } else {
        (None, None)
    };
    if let Some(msg) = &warn {
        eprintln!("warning: {msg}");
    }
    let z = target.as_ref().map(|t| est.z_scores(t));
    let mut e = echo("simulate", c, &p);
    e.float("volume", cfg.volume)
        .int("k_max", cfg.k_max as u64)
        .int("samples", cfg.n_samples as u64)
        .int("burn_in", cfg.burn_in as u64)
        .int("chains", cfg.chains as u64)
        .flag("verify_zero", verify_zero);
    match c.format {
        Format::Csv => {
            let mut notes = vec![
                format!("total: {} +- {}", num(est.total.0), num(est.total.1)),
                format!("density: {} +- {}", num(est.density.0), num(est.density.1)),
                format!("ess: {}", num(est.ess)),
                format!("tail_expected_cycles: {}", num(est.tail.expected_cycles)),
                format!("tail_density: {}", num(est.tail.density)),
            ];
            if let Some(a) = est.acceptance_rate {
                notes.push(format!("acceptance_rate: {}", num(a)));
            }
            if let Some(msg) = warn {
                notes.push(format!("warning: {msg}"));
            }
            let mut header = vec!["k", "mean", "stderr", "variance"];
            if target.is_some() {
                header.extend(["target", "z"]);
            }
            let rows: Vec<Vec<String>> = (0..cfg.k_max)
                .map(|i| {
                    let mut r = vec![
                        (i + 1).to_string(),
                        num(est.mean[i]),
                        num(est.stderr[i]),
                        num(est.variance[i]),
                    ];
                    if let (Some(t), Some(z)) = (&target, &z) {
                        r.push(num(t[i]));
                        r.push(num(z[i]));
                    }
                    r
                })
                .collect();
            write_csv(w, &e, &notes, &header, &rows)?;
        }
        Format::Json => {
            let mut body = json!({ "estimate": est });
            if let (Some(t), Some(z)) = (target, z) {
                body["target"] = json!(t);
                body["z_scores"] = json!(z);
                body["warning"] = json!(warn);
            }
            write_json(w, &e, body)?;
        }
    }
    Ok(())
}

fn cmd_verify(c: &Common, only: &[String], w: &mut dyn Write) -> Res<bool> {
    for o in only {
        let known = verify::CRITERIA
            .iter()
            .any(|cr| o == &cr.id.to_string() || cr.modules.contains(&o.as_str()));
        if !known {
            return Err(Fail::Config(format!("--only: unknown criterion or module '{o}'")));
        }
    }
    let cfg = verify::VerifyConfig { seed: if c.seed == 0 { verify::VerifyConfig::default().seed } else { c.seed }, ..Default::default() };
    let reports = verify::run(only, &cfg);
    let passed = reports.iter().all(|r| r.passed);
    let mut e = Echo::default();
    e.text("command", "verify")
        .text("only", &only.join(","))
        .int("seed", cfg.seed)
        .int("criteria", reports.len() as u64)
        .flag("passed", passed);
    match c.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.name.clone(),
                        r.anchor.clone(),
                        if r.passed { "PASS" } else { "FAIL" }.into(),
                        r.measured
                            .iter()
                            .map(|(k, v)| format!("{k}={}", num(*v)))
                            .collect::<Vec<_>>()
                            .join(";"),
                        r.detail.join("; "),
                    ]
                })
                .collect();
            write_csv(w, &e, &[], &["id", "name", "anchor", "status", "measured", "detail"], &rows)?;
        }
        Format::Json => write_json(w, &e, json!({ "criteria": reports }))?,
    }
    Ok(passed)
}

fn cmd_specfun(c: &Common, func: Func, x: f64, order: f64, w: &mut dyn Write) -> Res<()> {
    let mut e = Echo::default();
    e.text("command", "specfun").float("x", x);
    let (name, value, method) = match func {
        Func::Zeta => ("zeta", specfun::zeta(x)?, None),
        Func::Bose => {
            e.float("order", order);
            let g = specfun::bose_g_eval(order, x)?;
            ("bose", g.value.to_f64(), Some(g))
        }
        Func::W0 => ("w0", specfun::lambert_w(WBranch::Principal, x)?, None),
        Func::Wm1 => ("wm1", specfun::lambert_w(WBranch::Lower, x)?, None),
    };
    e.text("function", name);
    match c.format {
        Format::Csv => {
            let notes = method
                .map(|g| {
                    vec![
                        format!("method: {}", serde_json::to_string(&g.method).unwrap_or_default().trim_matches('"')),
                        format!("error_bound: {}", num(g.error_bound)),
                        format!("terms: {}", g.terms),
                    ]
                })
                .unwrap_or_default();
            write_csv(w, &e, &notes, &["function", "x", "value"], &[vec![name.into(), num(x), num(value)]])?;
        }
        Format::Json => {
            let value = match method {
                Some(g) => json!(g.value),
                None => json!({ "finite": value }),
            };
            write_json(w, &e, json!({ "function": name, "x": x, "value": value, "details": method }))?;
        }
    }
    Ok(())
}
