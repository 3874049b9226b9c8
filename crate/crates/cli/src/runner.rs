//! Drivers for the four subcommands: solve, classify, sweep, check.
//!
//! Every CSV is written through a sibling temp file and renamed into place,
//! so a failed run never leaves a partial file. Floats print with 17
//! significant digits, which round-trips every f64 and keeps repeated runs
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use episcale::{
    regressivity_report, CoefficientFunction, LimitClassification, MonotonicityReport,
    SirScenario, SirState, SolutionSeries,
};

use crate::scenario::{MethodChoice, Scenario};
use crate::CliError;

/// Round-trip-exact decimal form for CSV cells.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_ctx(context: String) -> impl FnOnce(std::io::Error) -> CliError {
    move |source| CliError::Io { context, source }
}

fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).map_err(io_ctx(format!("writing {}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(io_ctx(format!("moving {} into place", tmp.display())))?;
    Ok(())
}

fn series_csv(series: &SolutionSeries) -> String {
    let mut out = String::from("t,sigma_t,mu_t,x,y,z,method\n");
    let method = series.method().name();
    for (gp, state) in series.samples() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{method}",
            num(gp.t),
            num(gp.sigma_t),
            num(gp.mu_t),
            num(state.x),
            num(state.y),
            num(state.z),
        );
    }
    out
}

/// Output directory precedence: `--out` flag, then `EPISCALE_OUT_DIR`, then
/// the working directory.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("EPISCALE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn require_step(h: f64) -> Result<f64, CliError> {
    if h.is_finite() && h > 0.0 {
        Ok(h)
    } else {
        Err(CliError::Scenario(format!(
            "step h must be positive, got {h}"
        )))
    }
}

fn print_classification(class: &LimitClassification) {
    println!("limit outcome: {}", class.outcome.label());
    match &class.certificate {
        Some(cert) => println!("certificate: {}", cert.label()),
        None => println!("certificate: none"),
    }
    if let Some(alpha) = class.alpha_estimate {
        println!("susceptible share estimate at horizon: {}", num(alpha));
    }
    if let Some(lower) = class.alpha_lower_bound {
        println!("susceptible share lower bound: {}", num(lower));
    }
    if let Some(state) = class.limit_state {
        println!(
            "limit state: x = {}, y = {}, z = {}",
            num(state.x),
            num(state.y),
            num(state.z),
        );
    }
}

fn print_monotonicity(report: &MonotonicityReport) {
    println!(
        "removal dominates everywhere: {}",
        report.removal_dominates_everywhere
    );
    println!("mixed band everywhere: {}", report.mixed_band_everywhere);
    println!(
        "infected nonincreasing predicted: {}",
        report.infected_nonincreasing_predicted
    );
    println!(
        "infected nonincreasing observed: {} (max increase {})",
        report.infected_nonincreasing_observed,
        num(report.max_infected_increase),
    );
    println!(
        "initial growth predicted: {}",
        report.initial_growth_predicted
    );
    println!("initial step change: {}", num(report.initial_step_change));
}

pub fn solve(
    sc: &Scenario,
    method: Option<MethodChoice>,
    h: Option<f64>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let h = require_step(h.unwrap_or(sc.h))?;
    let choice = method.unwrap_or(sc.method);
    fs::create_dir_all(out_dir)
        .map_err(io_ctx(format!("creating directory {}", out_dir.display())))?;

    println!("{}", sc.describe());
    let mut runs: Vec<SolutionSeries> = Vec::new();
    for m in choice.methods() {
        let series = sc.scenario.solve(sc.t_end, h, m)?;
        let path = out_dir.join(format!("{}_{}.csv", sc.name, m.name()));
        write_atomic(&path, &series_csv(&series))?;
        let (gp, last) = series.last();
        println!(
            "{}: {} samples, final state at t = {}: x = {}, y = {}, z = {}",
            m.name(),
            series.len(),
            gp.t,
            num(last.x),
            num(last.y),
            num(last.z),
        );
        println!("  wrote {}", path.display());
        println!(
            "  max conservation error: {}",
            num(series.max_conservation_error())
        );
        runs.push(series);
    }
    if let [a, b] = runs.as_slice() {
        if let Some(dev) = a.max_deviation(b) {
            println!("max deviation between methods: {}", num(dev));
        }
    }
    let class = sc.scenario.classify_limit(sc.horizon, h)?;
    print_classification(&class);
    Ok(())
}

pub fn classify(sc: &Scenario, horizon: Option<f64>, h: Option<f64>) -> Result<(), CliError> {
    let horizon = horizon.unwrap_or(sc.horizon);
    let h = require_step(h.unwrap_or(sc.h))?;
    println!("{}", sc.describe());
    let class = sc.scenario.classify_limit(horizon, h)?;
    print_classification(&class);
    let report = sc.scenario.monotonicity_report(horizon, h)?;
    print_monotonicity(&report);
    Ok(())
}

/// Which scenario field a sweep varies. Values for `b` and `c` become
/// constant rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    B,
    C,
    X0,
    Y0,
    Z0,
    H,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::B => "b",
            SweepParam::C => "c",
            SweepParam::X0 => "x0",
            SweepParam::Y0 => "y0",
            SweepParam::Z0 => "z0",
            SweepParam::H => "h",
        }
    }
}

fn vary(sc: &Scenario, param: SweepParam, value: f64) -> Result<Scenario, CliError> {
    let base = &sc.scenario;
    let mut contact = base.contact_rate().clone();
    let mut removal = base.removal_rate().clone();
    let mut init = base.initial_state();
    let mut h = sc.h;
    match param {
        SweepParam::B => contact = CoefficientFunction::Constant(value),
        SweepParam::C => removal = CoefficientFunction::Constant(value),
        SweepParam::X0 => init = SirState::new(value, init.y, init.z),
        SweepParam::Y0 => init = SirState::new(init.x, value, init.z),
        SweepParam::Z0 => init = SirState::new(init.x, init.y, value),
        SweepParam::H => h = require_step(value)?,
    }
    let scenario = SirScenario::new(
        base.time_scale().clone(),
        contact,
        removal,
        init,
        base.initial_time(),
    )
    .map_err(|e| CliError::Scenario(format!("{} = {value}: {e}", param.name())))?;
    Ok(Scenario {
        name: sc.name.clone(),
        scenario,
        t_end: sc.t_end,
        h,
        horizon: sc.horizon,
        method: sc.method,
    })
}

pub fn sweep(
    sc: &Scenario,
    param: SweepParam,
    values: &[f64],
    method: Option<MethodChoice>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let choice = method.unwrap_or(sc.method);
    fs::create_dir_all(out_dir)
        .map_err(io_ctx(format!("creating directory {}", out_dir.display())))?;

    println!("{}", sc.describe());
    let mut aggregate = String::from(
        "param,value,method,t,x,y,z,conservation_error,deviation,outcome,alpha_estimate\n",
    );
    for &value in values {
        let varied = vary(sc, param, value)?;
        let mut runs: Vec<SolutionSeries> = Vec::new();
        for m in choice.methods() {
            let series = varied.scenario.solve(varied.t_end, varied.h, m)?;
            let path = out_dir.join(format!(
                "{}_{}_{}_{}.csv",
                sc.name,
                param.name(),
                value,
                m.name(),
            ));
            write_atomic(&path, &series_csv(&series))?;
            println!("  wrote {}", path.display());
            runs.push(series);
        }
        let deviation = match runs.as_slice() {
            [a, b] => a.max_deviation(b),
            _ => None,
        };
        let class = varied.scenario.classify_limit(varied.horizon, varied.h)?;
        for series in &runs {
            let (gp, last) = series.last();
            let _ = writeln!(
                aggregate,
                "{},{},{},{},{},{},{},{},{},{},{}",
                param.name(),
                num(value),
                series.method().name(),
                num(gp.t),
                num(last.x),
                num(last.y),
                num(last.z),
                num(series.max_conservation_error()),
                deviation.map(num).unwrap_or_default(),
                class.outcome.label(),
                class.alpha_estimate.map(num).unwrap_or_default(),
            );
        }
        println!(
            "{} = {value}: limit outcome {}",
            param.name(),
            class.outcome.label()
        );
    }
    let path = out_dir.join(format!("{}_sweep.csv", sc.name));
    write_atomic(&path, &aggregate)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Prints the hypothesis report. Failing hypotheses are findings, not
/// errors, so this exits successfully either way.
pub fn check(sc: &Scenario, h: Option<f64>) -> Result<(), CliError> {
    let h = require_step(h.unwrap_or(sc.h))?;
    let s = &sc.scenario;
    let (a, b_end) = (s.initial_time(), sc.t_end);
    println!("{}", sc.describe());

    match s
        .contact_rate()
        .validate_on("b", s.time_scale(), a, b_end, h, true)
    {
        Ok(()) => println!("contact rate valid on span: true"),
        Err(e) => println!("contact rate valid on span: false ({e})"),
    }
    match s
        .removal_rate()
        .validate_on("c", s.time_scale(), a, b_end, h, true)
    {
        Ok(()) => println!("removal rate valid on span: true"),
        Err(e) => println!("removal rate valid on span: false ({e})"),
    }

    let (contact, removal) = (s.contact_rate(), s.removal_rate());
    let report = regressivity_report(
        |t| removal.eval(t) - contact.eval(t),
        s.time_scale(),
        a,
        b_end,
        h,
    )?;
    println!("regressive: {}", report.regressive);
    println!("positively regressive: {}", report.positively_regressive);
    println!("min |1 + mu*(c - b)|: {}", num(report.min_abs));
    println!("min 1 + mu*(c - b): {}", num(report.min_value));
    if let Some(t) = report.witness_t {
        println!("violation witness t: {t}");
    }

    let grid = s.time_scale().grid(a, b_end, h)?;
    let max_mu_b = grid
        .iter()
        .map(|gp| gp.mu_t * contact.eval(gp.t))
        .fold(0.0_f64, f64::max);
    println!("max mu*b: {}", num(max_mu_b));
    println!("susceptible positivity at jumps (mu*b <= 1): {}", max_mu_b <= 1.0);

    // Rate-only monotonicity predictions; no solve, so these still print
    // when a hypothesis above fails.
    let init = s.initial_state();
    let share = init.x / (init.x + init.y);
    let removal_dominates = grid.iter().all(|gp| removal.eval(gp.t) >= contact.eval(gp.t));
    let mixed_band = grid.iter().all(|gp| {
        let (b_t, c_t) = (contact.eval(gp.t), removal.eval(gp.t));
        share * b_t <= c_t && c_t <= b_t
    });
    println!("removal dominates everywhere: {removal_dominates}");
    println!("mixed band everywhere: {mixed_band}");
    println!(
        "infected nonincreasing predicted: {}",
        removal_dominates || mixed_band
    );
    println!(
        "initial growth predicted: {}",
        share * contact.eval(a) >= removal.eval(a)
    );
    Ok(())
}
