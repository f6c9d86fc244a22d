//! Command-line front end. Angles on the command line and in every output
//! table are degrees.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::chsh::{evaluate_case, ChshPair, MixedStrategy};
use crate::error::{Error, Result};
use crate::frontier::{equal_point, full_frontier, region_map, region_map_with_fixed, GridSpec, DEFAULT_FRONTIER_SAMPLES};
use crate::shotsim::{run_repeated, ShotConfig};
use crate::states::{prepare, StateSpec, TwoQubitState};
use crate::strategies::{optimal_chi, Lambda, Settings, StrategyCase};
use crate::table::{Format, Table, Value};
use crate::verify::{run_suite, SuiteSize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "bell-recycle", version, about = "CHSH nonlocality recycling with projective measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// CHSH pairs of deterministic strategies over a sweep of their setting.
    Tradeoff(TradeoffArgs),
    /// Mixed CHSH pairs of two strategies over the mixing probability.
    SweepP(SweepArgs),
    /// Optimal trade-off frontier under shared randomness.
    Frontier(FrontierArgs),
    /// Double-violation map over a setting angle and the mixing probability.
    Region(RegionArgs),
    /// Photon-counting emulation of a two-strategy mixture.
    Mc(McArgs),
    /// Run the self-check suite; exits with status 2 on any failure.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// State angle φ of cos φ|00⟩ + sin φ|11⟩, degrees in [0, 45].
    #[arg(long, default_value_t = 45.0, value_parser = parse_finite)]
    pub phi_state: f64,
    /// White-noise weight v of (1 − v)ρ + v·I/4.
    #[arg(long, default_value_t = 0.0, value_parser = parse_finite)]
    pub noise_v: f64,
}

impl StateArgs {
    fn spec(&self) -> Result<StateSpec> {
        StateSpec::new(self.phi_state.to_radians(), self.noise_v)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TradeoffArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Strategies to sweep, e.g. `1,2,3`.
    #[arg(long, default_value = "1,2,3", value_parser = |s: &str| parse_cases(s).map(Cases))]
    pub cases: Cases,
    /// Setting step over [0, 90] degrees.
    #[arg(long, default_value_t = 7.5, value_parser = parse_finite)]
    pub angle_step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Strategy pair `i,j`; p is the probability of `i`.
    #[arg(long, default_value = "1,2", value_parser = parse_pair)]
    pub pair: (Lambda, Lambda),
    /// Settings of the two strategies in degrees, `a,b`; the equal-point
    /// optimum when absent.
    #[arg(long, value_parser = parse_settings)]
    pub settings: Option<(f64, f64)>,
    /// Step of the mixing probability over [0, 1].
    #[arg(long, default_value_t = 0.01, value_parser = parse_finite)]
    pub p_step: f64,
    /// Evaluate a single probability instead of sweeping.
    #[arg(long, value_parser = parse_finite)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FrontierArgs {
    /// State angle, degrees in [0, 45].
    #[arg(long, default_value_t = 45.0, value_parser = parse_finite)]
    pub phi_state: f64,
    /// Settings sampled per deterministic curve.
    #[arg(long, default_value_t = DEFAULT_FRONTIER_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    /// State angle, degrees in [0, 45].
    #[arg(long, default_value_t = 45.0, value_parser = parse_finite)]
    pub phi_state: f64,
    /// Strategy pair `i,j`; the angle of `i` is swept.
    #[arg(long, default_value = "1,2", value_parser = parse_pair)]
    pub pair: (Lambda, Lambda),
    /// Step of the first strategy's angle over [0, 180] degrees.
    #[arg(long, default_value_t = 0.1, value_parser = parse_finite)]
    pub angle_step: f64,
    /// Step of the mixing probability over [0, 1].
    #[arg(long, default_value_t = 0.001, value_parser = parse_finite)]
    pub p_step: f64,
    /// Fixed angle of the second strategy, degrees.
    #[arg(long, value_parser = parse_finite)]
    pub fixed: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Strategy pair `i,j`.
    #[arg(long, default_value = "1,2", value_parser = parse_pair)]
    pub pair: (Lambda, Lambda),
    /// Settings of the two strategies in degrees, `a,b`; the equal-point optimum when absent.
    #[arg(long, value_parser = parse_settings)]
    pub settings: Option<(f64, f64)>,
    /// Probability of the first strategy; the equal-point value when absent.
    #[arg(long, value_parser = parse_finite)]
    pub p: Option<f64>,
    /// Expected coincidences per measurement setting.
    #[arg(long, default_value_t = 1e5, value_parser = parse_finite)]
    pub mean: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs, one row each.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Strategy list of the `--cases` flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cases(pub Vec<Lambda>);

/// A finite decimal number.
pub fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !x.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(x)
}

fn parse_lambda(s: &str) -> std::result::Result<Lambda, String> {
    let i: u8 = s.trim().parse().map_err(|_| format!("'{s}' is not a strategy index"))?;
    Lambda::from_index(i).map_err(|e| e.to_string())
}

/// Comma-separated strategy indices, each of 1, 2, 3 at most once.
pub fn parse_cases(s: &str) -> std::result::Result<Vec<Lambda>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let l = parse_lambda(part)?;
        if out.contains(&l) {
            return Err(format!("strategy {l} listed twice"));
        }
        out.push(l);
    }
    Ok(out)
}

/// Two different strategy indices, `i,j`.
pub fn parse_pair(s: &str) -> std::result::Result<(Lambda, Lambda), String> {
    let cases = parse_cases(s)?;
    match cases[..] {
        [a, b] => Ok((a, b)),
        _ => Err(format!("expected two strategies 'i,j', got '{s}'")),
    }
}

/// Two angles in degrees, `a,b`.
pub fn parse_settings(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two angles 'a,b', got '{s}'"))?;
    Ok((parse_finite(a)?, parse_finite(b)?))
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn check_step(name: &str, step: f64, max: f64) -> Result<()> {
    if !(step > 0.0 && step <= max) {
        return Err(Error::InvalidInput(format!("{name} must lie in (0, {max}], got {step}")));
    }
    Ok(())
}

/// `0, step, 2·step, …` up to `hi`, with `hi` itself always included.
fn grid(hi: f64, step: f64) -> Vec<f64> {
    let n = (hi / step + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(hi)).collect();
    if hi - out[n] > 1e-9 * hi {
        out.push(hi);
    }
    out
}

fn base_table(command: &str, columns: &[&str]) -> Table {
    let mut t = Table::new(columns);
    t.push_meta("command", command);
    t.push_meta("angle_units", "degrees");
    t
}

fn setting_value(case: &StrategyCase) -> Value {
    Value::Num(case.setting().to_degrees())
}

fn cmd_tradeoff(args: &TradeoffArgs) -> Result<Table> {
    check_step("angle step", args.angle_step, 90.0)?;
    let spec = args.state.spec()?;
    let state = prepare(&spec)?;
    let mut t = base_table("tradeoff", &["lambda", "setting_deg", "s_ab", "s_ac"]);
    t.push_meta("phi_state_deg", args.state.phi_state);
    t.push_meta("noise_v", args.state.noise_v);
    for &lambda in &args.cases.0 {
        if lambda == Lambda::IdentityMeasurement {
            // Bob's side is fixed; Charlie uses the optimal χ.
            let chi = optimal_chi(spec.phi_state)?.chi;
            t.push_meta("chi_deg", chi.to_degrees());
            let s = evaluate_case(&state, &StrategyCase::identity_measurement(chi))?;
            t.push_row(vec![lambda.index().into(), Value::Empty, s.s_ab.into(), s.s_ac.into()])?;
            continue;
        }
        for deg in grid(90.0, args.angle_step) {
            let s = evaluate_case(&state, &StrategyCase::new(lambda, deg.to_radians()))?;
            t.push_row(vec![lambda.index().into(), deg.into(), s.s_ab.into(), s.s_ac.into()])?;
        }
    }
    Ok(t)
}

/// Settings from the command line or the equal-point optimum on the pure
/// state with the same angle.
fn pair_settings(
    phi_state: f64,
    pair: (Lambda, Lambda),
    given: Option<(f64, f64)>,
    t: &mut Table,
) -> Result<(Settings, Option<f64>)> {
    if pair.0 == pair.1 {
        return Err(Error::InvalidInput("a mixture needs two different strategies".into()));
    }
    match given {
        Some((a, b)) => Ok((
            Settings::default().with(pair.0, a.to_radians()).with(pair.1, b.to_radians()),
            None,
        )),
        None => {
            let r = equal_point(phi_state, pair)?;
            t.push_meta("p_star", r.p_star);
            t.push_meta("s_star", r.s_star);
            Ok((r.settings, Some(r.p_star)))
        }
    }
}

fn pair_meta(t: &mut Table, pair: (Lambda, Lambda), settings: &Settings) {
    t.push_meta("pair", format!("{},{}", pair.0, pair.1));
    t.push_meta("first_setting_deg", settings.get(pair.0).to_degrees());
    t.push_meta("second_setting_deg", settings.get(pair.1).to_degrees());
}

fn evaluate_pair(state: &TwoQubitState, pair: (Lambda, Lambda), settings: Settings) -> Result<(ChshPair, ChshPair)> {
    let a = evaluate_case(state, &StrategyCase { lambda: pair.0, settings })?;
    let b = evaluate_case(state, &StrategyCase { lambda: pair.1, settings })?;
    Ok((a, b))
}

fn cmd_sweep_p(args: &SweepArgs) -> Result<Table> {
    let spec = args.state.spec()?;
    let mut t = base_table("sweep-p", &["p", "s_ab", "s_ac", "violates_both"]);
    t.push_meta("phi_state_deg", args.state.phi_state);
    t.push_meta("noise_v", args.state.noise_v);
    let (settings, _) = pair_settings(spec.phi_state, args.pair, args.settings, &mut t)?;
    pair_meta(&mut t, args.pair, &settings);
    let ps = match args.p {
        Some(p) => {
            check_unit_interval("p", p)?;
            vec![p]
        }
        None => {
            check_step("p step", args.p_step, 0.5)?;
            grid(1.0, args.p_step)
        }
    };
    let state = prepare(&spec)?;
    let (first, second) = evaluate_pair(&state, args.pair, settings)?;
    for p in ps {
        let s = first.lerp(&second, p);
        t.push_row(vec![p.into(), s.s_ab.into(), s.s_ac.into(), s.violates_both().into()])?;
    }
    Ok(t)
}

fn cmd_frontier(args: &FrontierArgs) -> Result<Table> {
    let curve = full_frontier(args.phi_state.to_radians(), args.samples)?;
    let mut t = base_table("frontier", &["s_ab", "s_ac", "segment", "lambda", "setting_deg"]);
    t.push_meta("phi_state_deg", args.phi_state);
    t.push_meta("samples", args.samples);
    for p in &curve.points {
        t.push_row(vec![
            p.s_ab.into(),
            p.s_ac.into(),
            p.segment.as_str().into(),
            p.case.lambda.index().into(),
            setting_value(&p.case),
        ])?;
    }
    Ok(t)
}

fn cmd_region(args: &RegionArgs) -> Result<Table> {
    let phi = args.phi_state.to_radians();
    let grid = GridSpec { angle_step_deg: args.angle_step, p_step: args.p_step, ..GridSpec::default() };
    let map = match args.fixed {
        Some(deg) => region_map_with_fixed(phi, args.pair, deg.to_radians(), &grid)?,
        None => region_map(phi, args.pair, &grid)?,
    };
    let mut t = base_table("region", &["setting_deg", "p", "double_violation"]);
    t.push_meta("phi_state_deg", args.phi_state);
    t.push_meta("pair", format!("{},{}", args.pair.0, args.pair.1));
    t.push_meta("fixed_setting_deg", map.fixed_setting_deg);
    t.push_meta("area_fraction", map.area_fraction());
    t.rows.reserve(map.mask.len());
    for (i, &deg) in map.angles_deg.iter().enumerate() {
        for (j, &p) in map.ps.iter().enumerate() {
            t.rows.push(vec![deg.into(), p.into(), map.get(i, j).into()]);
        }
    }
    Ok(t)
}

fn cmd_mc(args: &McArgs) -> Result<Table> {
    let spec = args.state.spec()?;
    let cfg = ShotConfig::new(args.mean, args.seed, args.repeats)?;
    if args.repeats == 0 {
        return Err(Error::InvalidInput("at least one repeat is required".into()));
    }
    let mut t = base_table(
        "mc",
        &["repeat", "s_ab", "s_ab_sigma", "s_ac", "s_ac_sigma", "p_hat", "p_hat_sigma"],
    );
    t.push_meta("phi_state_deg", args.state.phi_state);
    t.push_meta("noise_v", args.state.noise_v);
    let (settings, p_star) = pair_settings(spec.phi_state, args.pair, args.settings, &mut t)?;
    let p = match args.p.or(p_star) {
        Some(p) => p,
        None => return Err(Error::InvalidInput("--p is required with --settings".into())),
    };
    check_unit_interval("p", p)?;
    pair_meta(&mut t, args.pair, &settings);
    t.push_meta("p", p);
    t.push_meta("mean_counts_per_setting", args.mean);
    t.push_meta("seed", args.seed);

    let first = StrategyCase { lambda: args.pair.0, settings };
    let second = StrategyCase { lambda: args.pair.1, settings };
    let mixed = MixedStrategy::pair(first, second, p)?;
    let expected = mixed.evaluate(&prepare(&spec)?)?;
    t.push_meta("expected_s_ab", expected.s_ab);
    t.push_meta("expected_s_ac", expected.s_ac);

    for (r, rec) in run_repeated(&spec, &mixed, &cfg)?.iter().enumerate() {
        t.push_row(vec![
            (r as i64).into(),
            rec.s_ab.value.into(),
            rec.s_ab.sigma.into(),
            rec.s_ac.value.into(),
            rec.s_ac.sigma.into(),
            rec.p_hat.value.into(),
            rec.p_hat.sigma.into(),
        ])?;
    }
    Ok(t)
}

/// The subcommand's output table and its exit status.
pub fn execute(command: &Command) -> Result<(Table, i32)> {
    Ok(match command {
        Command::Tradeoff(a) => (cmd_tradeoff(a)?, EXIT_OK),
        Command::SweepP(a) => (cmd_sweep_p(a)?, EXIT_OK),
        Command::Frontier(a) => (cmd_frontier(a)?, EXIT_OK),
        Command::Region(a) => (cmd_region(a)?, EXIT_OK),
        Command::Mc(a) => (cmd_mc(a)?, EXIT_OK),
        Command::Verify(a) => {
            let report = run_suite(a.seed, SuiteSize::default());
            let mut t = report.to_table();
            t.meta.push(("command".into(), "verify".into()));
            t.push_meta("all_passed", report.all_passed());
            let code = if report.all_passed() { EXIT_OK } else { EXIT_VERIFY };
            (t, code)
        }
    })
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Tradeoff(a) => &a.output,
        Command::SweepP(a) => &a.output,
        Command::Frontier(a) => &a.output,
        Command::Region(a) => &a.output,
        Command::Mc(a) => &a.output,
        Command::Verify(a) => &a.output,
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numerical(_) | Error::NotPsd { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn emit(table: &Table, out: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    match &out.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(out.format, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => table.write(out.format, stdout),
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if help { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return if help { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = execute(&cli.command)
        .and_then(|(table, code)| emit(&table, output_args(&cli.command), stdout).map(|_| code));
    match result {
        Ok(code) => {
            if code == EXIT_VERIFY {
                let _ = writeln!(stderr, "error: verification failed");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
