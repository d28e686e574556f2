//! `fujita-lab`: command-line front end.
//!
//! Exit status: 0 on success, 2 when the inputs fall outside the hypotheses
//! of the requested operation, 1 on internal errors, 64 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use fujita_core::certify::{
    certify_blowup, ge_exponent_witness, ge_smallness_probe, geometric_ladder, EpsilonRule, TestFunction,
};
use fujita_core::evolve::{picard_iterate, run, ForcingProfile, PicardConfig, Scheme, SolverConfig};
use fujita_core::harness::{
    output_dir, persist_run, phase_csv, run_sweep, SimulationRecord, SweepSpec,
};
use fujita_core::heatsem::{
    critical_test_fields, log_times, standard_test_fields, verify_smoothing_estimate, SmoothingExponents,
};
use fujita_core::params::{
    blowup_threshold, classify_against, fujita_exponent, global_existence_exponents, jks_exponent,
};
use fujita_core::specfun::{check_gronwall_on_trajectory, volterra_equality_trajectory, GronwallData};
use fujita_core::{LabError, Parameters, Profile, RadialGrid};

const USAGE_EXIT: u8 = 64;

#[derive(Parser)]
#[command(name = "fujita-lab", version, about = "Blow-up and global existence laboratory for u_t - Δu = |x|^α |u|^p + ζ(t) w(x)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical exponents for the given parameters.
    #[command(allow_negative_numbers = true)]
    Exponents(ParamArgs),
    /// One solver run.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the `t, dt, sup_norm, ...` trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Store the run record under the output directory.
        #[arg(long)]
        save: bool,
    },
    /// Picard iteration of the mild formulation against the solver.
    #[command(name = "picard-check", allow_negative_numbers = true)]
    PicardCheck {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 16.0)]
        radius: f64,
        #[arg(long, default_value_t = 1280)]
        cells: usize,
        #[arg(long, default_value_t = 0.25)]
        horizon: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        iterations: usize,
    },
    /// Test-function blow-up certificates over a geometric ladder of T.
    #[command(allow_negative_numbers = true)]
    Certify {
        #[command(flatten)]
        params: ParamArgs,
        /// Forcing profile w.
        #[arg(long, default_value = "gaussian:1")]
        w: Profile,
        #[arg(long, default_value_t = 10.0)]
        ladder_base: f64,
        /// Ladder is `base^k`, `k = 0..=ladder_max`.
        #[arg(long, default_value_t = 8)]
        ladder_max: u32,
        #[arg(long, value_enum, default_value_t = Variant::Psi)]
        variant: Variant,
        /// ε for the `phi` variant: `1/T`, `1/sqrtT` or a number.
        #[arg(long, default_value = "1/T")]
        eps: String,
        #[arg(long)]
        save: bool,
    },
    /// Exponent witness for small-data global existence.
    #[command(allow_negative_numbers = true)]
    Witness {
        #[command(flatten)]
        params: ParamArgs,
        /// Also run the smallness probe with scales `2^{-k}`, `k = 0..=probe`.
        #[arg(long)]
        probe: Option<u32>,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Parameter sweep; prints or writes the phase-diagram CSV.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// Flat `key = value` configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// `var:lo:hi:step`, at most twice.
        #[arg(long)]
        axis: Vec<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        u0: Option<Profile>,
        #[arg(long)]
        w: Option<Profile>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compensated ratios of the weighted smoothing estimate.
    #[command(name = "verify-smoothing")]
    VerifySmoothing {
        #[arg(long = "N", default_value_t = 3.0)]
        dim: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        q1: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        q2: f64,
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
        #[arg(long, default_value_t = 2000)]
        cells: usize,
        #[arg(long, default_value_t = 9)]
        times: usize,
        #[arg(long, value_enum, default_value_t = Fields::Critical)]
        fields: Fields,
    },
    /// Singular Gronwall bound on the equality trajectory.
    #[command(name = "verify-gronwall")]
    VerifyGronwall {
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Psi,
    Phi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fields {
    Critical,
    Compact,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long = "N")]
    dim: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    c_inf: Option<f64>,
}

impl ParamArgs {
    fn over(&self, base: Parameters) -> Result<Parameters, LabError> {
        let q = Parameters {
            dim: self.dim.unwrap_or(base.dim),
            alpha: self.alpha.unwrap_or(base.alpha),
            p: self.p.unwrap_or(base.p),
            sigma: self.sigma.unwrap_or(base.sigma),
            m: self.m.unwrap_or(base.m),
            c0: self.c0.unwrap_or(base.c0),
            c_inf: self.c_inf.unwrap_or(base.c_inf),
        };
        q.validate()?;
        Ok(q)
    }

    fn resolve(&self) -> Result<Parameters, LabError> {
        self.over(Parameters { dim: 3.0, alpha: 0.0, p: 2.0, sigma: 0.0, m: 0.0, c0: 1.0, c_inf: 1.0 })
    }
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Initial data profile.
    #[arg(long, default_value = "zero")]
    u0: Profile,
    /// Forcing profile.
    #[arg(long, default_value = "zero")]
    w: Profile,
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    dt_min: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    blow_cap: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Run the convergence gate on global candidates.
    #[arg(long)]
    gate: bool,
}

impl SolverArgs {
    fn over(&self, base: SolverConfig) -> Result<SolverConfig, LabError> {
        let c = SolverConfig {
            radius: self.radius.unwrap_or(base.radius),
            cells: self.cells.unwrap_or(base.cells),
            dt_init: self.dt.unwrap_or(base.dt_init),
            dt_min: self.dt_min.unwrap_or(base.dt_min),
            horizon: self.horizon.unwrap_or(base.horizon),
            blow_cap: self.blow_cap.unwrap_or(base.blow_cap),
            scheme: match (self.theta, base.scheme) {
                (Some(theta), _) => Scheme::Imex { theta },
                (None, s) => s,
            },
            convergence_gate: self.gate || base.convergence_gate,
            ..base
        };
        c.validate()?;
        Ok(c)
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) ends the process quietly.
fn emit(args: std::fmt::Arguments, newline: bool) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let res = stdout.write_fmt(args).and_then(|_| if newline { stdout.write_all(b"\n") } else { Ok(()) });
    if let Err(e) = res {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing to stdout: {e}");
        std::process::exit(1);
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*), false) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(format_args!($($t)*), true) };
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), LabError> {
    outln!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn exponents(args: &ParamArgs) -> Result<(), LabError> {
    let dim = args.dim.unwrap_or(3.0);
    let alpha = args.alpha.unwrap_or(0.0);
    let m = args.m.unwrap_or(0.0);
    outln!("fujita_exponent: {}", fujita_exponent(dim, alpha)?);
    match blowup_threshold(dim, alpha, m) {
        Ok(thr) => {
            outln!("blowup_threshold: {thr}");
            if let Some(p) = args.p {
                outln!("p_side: {:?}", classify_against(p, thr));
            }
        }
        Err(e) => outln!("blowup_threshold: {e}"),
    }
    if let Some(sigma) = args.sigma {
        match jks_exponent(dim, sigma) {
            Ok(e) => outln!("forced_critical_exponent: {e}"),
            Err(e) => outln!("forced_critical_exponent: {e}"),
        }
        if let Some(p) = args.p {
            let params = args.resolve()?;
            match global_existence_exponents(&Parameters { p, sigma, ..params }) {
                Ok(r) => {
                    outln!("global_existence_min_p: {}", r.p_global_min);
                    outln!("p_crit_lebesgue: {}", r.p_crit_lebesgue);
                    outln!("ell: {}", r.ell_lebesgue);
                    outln!("p_in_global_range: {}", r.p_in_global_range);
                }
                Err(e) => outln!("global_existence: {e}"),
            }
        }
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<(), LabError> {
    match command {
        Command::Exponents(args) => exponents(&args),
        Command::Simulate { params, data, solver, trace, save } => {
            let params = params.resolve()?;
            let solver = solver.over(SolverConfig::default())?;
            let forcing = ForcingProfile::from_params(&params)?;
            let out = run(&params, &forcing, &data.u0, &data.w, &solver)?;
            if let Some(path) = trace {
                std::fs::write(path, out.trace_csv())?;
            }
            let record = SimulationRecord::new(&params, &forcing, &data.u0, &data.w, &solver, &out);
            print_json(&record)?;
            if save {
                let stored = persist_run(&output_dir("fujita-lab-out"), &record)?;
                eprintln!("stored {}", stored.path.display());
            }
            Ok(())
        }
        Command::PicardCheck { params, data, radius, cells, horizon, steps, iterations } => {
            let params = params.resolve()?;
            let forcing = ForcingProfile::from_params(&params)?;
            let pc = PicardConfig { radius, cells, horizon, steps, iterations, ..Default::default() };
            let rep = picard_iterate(&params, &forcing, &data.u0, &data.w, &pc)?;
            // Crank-Nicolson: the backward Euler time error alone is about 1e-3.
            let sc = SolverConfig {
                radius,
                cells,
                horizon,
                dt_init: horizon / 2000.0,
                scheme: Scheme::Imex { theta: 0.5 },
                ..Default::default()
            };
            let mol = run(&params, &forcing, &data.u0, &data.w, &sc)?;
            let picard_sup = rep.terminal().map(|f| f.sup_norm()).unwrap_or(f64::NAN);
            let mol_sup = mol.final_state.sup_norm();
            print_json(&serde_json::json!({
                "picard_terminal_sup": picard_sup,
                "mol_terminal_sup": mol_sup,
                "mol_outcome": mol.kind.label(),
                "relative_difference": (picard_sup - mol_sup).abs() / mol_sup.abs().max(1e-300),
                "differences": rep.differences,
                "contraction_ratios": rep.contraction_ratios,
                "diverged_at": rep.diverged_at,
            }))
        }
        Command::Certify { params, w, ladder_base, ladder_max, variant, eps, save } => {
            let params = params.resolve()?;
            let forcing = ForcingProfile::from_params(&params)?;
            let test_function = match variant {
                Variant::Psi => TestFunction::PsiT,
                Variant::Phi => TestFunction::PhiT { epsilon: parse_eps(&eps)? },
            };
            let ladder = geometric_ladder(ladder_base, ladder_max);
            let out = certify_blowup(&params, &forcing, &w, &ladder, test_function)?;
            for c in &out.certificates {
                outln!("T={} L={} Rhs={} verdict={:?}", c.t, c.l_value, c.rhs, c.verdict);
            }
            match out.first_certified {
                Some(t) => outln!("certified at T = {t}: blow-up time <= {}", 0.75 * t),
                None => outln!("no certificate on this ladder"),
            }
            if let Some(s) = &out.scaling {
                outln!(
                    "slopes over [{}, {}]: L {} (expected {}), Rhs {} (expected {})",
                    s.t_low, s.t_high, s.l_slope, s.expected_l_slope, s.rhs_slope, s.expected_rhs_slope
                );
            }
            if save {
                let stored = persist_run(&output_dir("fujita-lab-out"), &out)?;
                eprintln!("stored {}", stored.path.display());
            }
            Ok(())
        }
        Command::Witness { params, probe, data, solver } => {
            let params = params.resolve()?;
            match probe {
                None => print_json(&ge_exponent_witness(&params)?),
                Some(k) => {
                    let solver = solver.over(SolverConfig::default())?;
                    print_json(&ge_smallness_probe(&params, &data.u0, &data.w, k, &solver)?)
                }
            }
        }
        Command::Sweep { config, axis, params, u0, w, solver, output } => {
            let text = match config {
                Some(path) => std::fs::read_to_string(path)?,
                None => String::new(),
            };
            let mut spec = SweepSpec::from_config_text(&text)?;
            spec.base = params.over(spec.base)?;
            if !axis.is_empty() {
                spec.axes = axis.iter().map(|a| a.parse()).collect::<Result<_, _>>()?;
            }
            spec.u0 = u0.unwrap_or(spec.u0);
            spec.w = w.unwrap_or(spec.w);
            spec.solver = solver.over(spec.solver)?;
            spec.output = output.or(spec.output);
            spec.validate()?;
            let rows = run_sweep(&spec)?;
            let csv = phase_csv(&rows);
            match &spec.output {
                Some(path) => {
                    std::fs::write(path, csv)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => out!("{csv}"),
            }
            Ok(())
        }
        Command::VerifySmoothing { dim, gamma, q1, q2, radius, cells, times, fields } => {
            let exps = SmoothingExponents::new(dim, gamma, q1, q2)?;
            let grid = RadialGrid::new(dim, radius, cells)?;
            let tests = match fields {
                Fields::Critical => critical_test_fields(grid, q1),
                Fields::Compact => standard_test_fields(grid),
            };
            let rep = verify_smoothing_estimate(exps, &log_times(1e-2, 1e2, times), &tests)?;
            out!("{}", rep.to_csv());
            eprintln!(
                "sup_ratio={} max_variation={} endpoint={}",
                rep.sup_ratio,
                rep.max_variation(),
                exps.endpoint
            );
            Ok(())
        }
        Command::VerifyGronwall { theta, a, m, t_end, points, tol } => {
            let data = GronwallData::new(a, m, theta, t_end)?;
            let (times, psi) = volterra_equality_trajectory(&data, points)?;
            let rep = check_gronwall_on_trajectory(&times, &psi, &data, tol)?;
            print_json(&rep)?;
            if rep.passed {
                Ok(())
            } else {
                Err(LabError::Numerical(format!("bound exceeded by {}", rep.max_excess)))
            }
        }
    }
}

fn parse_eps(s: &str) -> Result<EpsilonRule, LabError> {
    match s {
        "1/T" => Ok(EpsilonRule::InverseT),
        "1/sqrtT" => Ok(EpsilonRule::InverseSqrtT),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|e| *e > 0.0)
            .map(|eps| EpsilonRule::Fixed { eps })
            .ok_or_else(|| LabError::Parse(format!("eps: expected 1/T, 1/sqrtT or a positive number, got '{other}'"))),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_EXIT),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(LabError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE_EXIT)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
