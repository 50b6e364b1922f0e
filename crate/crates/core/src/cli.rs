//! Command-line front end.
//!
//! Exit status is 0 on success, 1 when an input file cannot be read, parsed or
//! validated (diagnostic on stderr), and 2 on a usage error.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::best_response::{br_negative_x, br_negative_y, br_positive_x, br_positive_y, AxisBestResponse};
use crate::equilibrium::{
    adjusted_sabotage_valuation, classify, linspace, region_sample, solve, top_valuation, Classification,
    RegionFigure, RegionSample,
};
use crate::error::Error;
use crate::model::{validate_spec, ContestSpec, RawContestSpec, StrategyProfile};
use crate::verify::{
    best_deviation, best_response_dynamics, default_epsilon, is_epsilon_nash, jittered_zero_profile,
    DynamicsStatus, UpdateOrder,
};

/// Significant digits in every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Renders `v` with nine significant digits in fixed notation. Magnitudes
/// outside `[1e-30, 1e21)` fall back to exponent notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.*}", SIGNIFICANT_DIGITS - 1, v);
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if v.abs() < 1e-30 || exp >= 21 {
        return sci;
    }
    // exponent taken after rounding, so 9.9999999996 becomes 10.0000000
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// JSON formatter that routes floats through [`format_number`].
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedFormatter;

impl Formatter for FixedFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_number(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[derive(Debug, Parser)]
#[command(name = "group-contest", version, about = "Equilibria of two-group contests with within-group sabotage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form equilibrium for the spec's regime.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also report |theta - threshold| for both thresholds.
        #[arg(long)]
        slack: bool,
    },
    /// Regime, both thresholds and their slack.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Accepted for symmetry with `solve`; classify always reports slack.
        #[arg(long)]
        slack: bool,
    },
    /// Certify a profile as an epsilon-Nash equilibrium by deviation search.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        profile: PathBuf,
        /// Defaults to 1e-6 * max |v|.
        #[arg(long, value_name = "F")]
        epsilon: Option<f64>,
    },
    /// Single-axis best response for an explicit player context.
    Br {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "F", allow_hyphen_values = true)]
        v: f64,
        /// Defaults to the spec's theta.
        #[arg(long, value_name = "F")]
        theta: Option<f64>,
        #[arg(long = "z-minus", value_name = "F", allow_hyphen_values = true)]
        z_minus: f64,
        #[arg(long = "z-other", value_name = "F", allow_hyphen_values = true)]
        z_other: f64,
    },
    /// Sample one of the two existence-region charts on a grid.
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "1|2", value_parser = clap::value_parser!(u8).range(1..=2))]
        figure: u8,
        /// Figure 1: w. Figure 2: t or t,theta. Defaults come from the spec.
        #[arg(long, value_name = "F", value_parser = parse_fixed)]
        fixed: Option<Fixed>,
        #[arg(long, value_name = "MIN:MAX:STEPS", default_value = "0.1:10:100", value_parser = parse_axis)]
        axis1: AxisRange,
        #[arg(long, value_name = "MIN:MAX:STEPS", default_value = "0.1:10:100", value_parser = parse_axis)]
        axis2: AxisRange,
    },
    /// Iterated best responses from a profile or from jittered zero efforts.
    Dynamics {
        #[command(flatten)]
        common: Common,
        /// Starting profile; defaults to zero efforts plus seeded jitter.
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-iters", value_name = "N", default_value_t = 1000)]
        max_iters: usize,
        #[arg(long, value_enum, default_value_t = OrderArg::RoundRobin)]
        order: OrderArg,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    spec: PathBuf,
    /// Defaults to csv for `region` and json otherwise.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Simultaneous,
    RoundRobin,
}

impl From<OrderArg> for UpdateOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Simultaneous => UpdateOrder::Simultaneous,
            OrderArg::RoundRobin => UpdateOrder::RoundRobin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct AxisRange {
    min: f64,
    max: f64,
    steps: usize,
}

fn parse_axis(s: &str) -> Result<AxisRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, steps] = parts[..] else {
        return Err(format!("expected MIN:MAX:STEPS, got {s:?}"));
    };
    let min: f64 = min.parse().map_err(|_| format!("bad MIN {min:?}"))?;
    let max: f64 = max.parse().map_err(|_| format!("bad MAX {max:?}"))?;
    let steps: usize = steps.parse().map_err(|_| format!("bad STEPS {steps:?}"))?;
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(format!("need 0 < MIN <= MAX, got {min}:{max}"));
    }
    if steps == 0 {
        return Err("STEPS must be at least 1".into());
    }
    Ok(AxisRange { min, max, steps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Fixed {
    value: f64,
    theta: Option<f64>,
}

fn parse_fixed(s: &str) -> Result<Fixed, String> {
    let number = |t: &str| -> Result<f64, String> {
        let v: f64 = t.trim().parse().map_err(|_| format!("bad number {t:?}"))?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{v} must be positive and finite"))
        }
    };
    match s.split_once(',') {
        None => Ok(Fixed { value: number(s)?, theta: None }),
        Some((value, theta)) => Ok(Fixed { value: number(value)?, theta: Some(number(theta)?) }),
    }
}

/// A failure after argument parsing: either bad usage or bad input.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// result to `out`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                1
            }
        },
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("SpecFileUnreadable: {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("MalformedJson: {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<ContestSpec, Failure> {
    let raw: RawContestSpec = serde_json::from_value(read_json(path)?)
        .map_err(|e| Failure::Input(format!("MalformedJson: {}: {e}", path.display())))?;
    validate_spec(&raw).map_err(|e| Failure::Input(e.to_string()))
}

/// Accepts a bare profile or any document with a `profile` field (such as
/// `solve` output).
fn load_profile(path: &Path, spec: &ContestSpec) -> Result<StrategyProfile, Failure> {
    let mut value = read_json(path)?;
    if let Some(inner) = value.get_mut("profile") {
        value = inner.take();
    }
    if value.is_null() {
        return Err(Failure::Input(format!("MalformedJson: {}: no profile present", path.display())));
    }
    let profile: StrategyProfile = serde_json::from_value(value)
        .map_err(|e| Failure::Input(format!("MalformedJson: {}: {e}", path.display())))?;
    profile.check_shape(spec)?;
    Ok(profile)
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

fn num(v: f64) -> String {
    format_number(v)
}

fn json_line<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = to_json(value);
    s.push('\n');
    s
}

fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Solve { common, slack } => {
            let spec = load_spec(&common.spec)?;
            cmd_solve(&spec, common.format.unwrap_or(OutputFormat::Json), slack)
        }
        Command::Classify { common, .. } => {
            let spec = load_spec(&common.spec)?;
            Ok(cmd_classify(&spec, common.format.unwrap_or(OutputFormat::Json)))
        }
        Command::Verify { common, profile, epsilon } => {
            let spec = load_spec(&common.spec)?;
            let profile = load_profile(&profile, &spec)?;
            let epsilon = match epsilon {
                Some(e) if e > 0.0 && e.is_finite() => e,
                Some(e) => return Err(Failure::Usage(format!("--epsilon must be positive, got {e}"))),
                None => default_epsilon(&spec),
            };
            cmd_verify(&spec, &profile, epsilon, common.format.unwrap_or(OutputFormat::Json))
        }
        Command::Br { common, v, theta, z_minus, z_other } => {
            let spec = load_spec(&common.spec)?;
            let theta = theta.unwrap_or(spec.theta());
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(Failure::Usage(format!("--theta must be positive, got {theta}")));
            }
            cmd_br(theta, v, z_minus, z_other, common.format.unwrap_or(OutputFormat::Json))
        }
        Command::Region { common, figure, fixed, axis1, axis2 } => {
            let spec = load_spec(&common.spec)?;
            let figure = match (figure, fixed) {
                (1, None) => RegionFigure::NoSabotage { w: adjusted_sabotage_valuation(&spec) },
                (1, Some(Fixed { value, theta: None })) => RegionFigure::NoSabotage { w: value },
                (1, Some(_)) => return Err(Failure::Usage("figure 1 takes a single --fixed value w".into())),
                (_, None) => RegionFigure::Sabotage { t: top_valuation(&spec), theta: spec.theta() },
                (_, Some(Fixed { value, theta })) => {
                    RegionFigure::Sabotage { t: value, theta: theta.unwrap_or(spec.theta()) }
                }
            };
            let samples = region_sample(
                figure,
                &linspace(axis1.min, axis1.max, axis1.steps),
                &linspace(axis2.min, axis2.max, axis2.steps),
            )?;
            Ok(render_region(&samples, common.format.unwrap_or(OutputFormat::Csv)))
        }
        Command::Dynamics { common, profile, seed, max_iters, order } => {
            let spec = load_spec(&common.spec)?;
            if max_iters == 0 {
                return Err(Failure::Usage("--max-iters must be at least 1".into()));
            }
            let initial = match profile {
                Some(path) => load_profile(&path, &spec)?,
                None => jittered_zero_profile(&spec, 1e-2 * spec.max_abs_valuation(), seed),
            };
            cmd_dynamics(&spec, &initial, max_iters, order.into(), common.format.unwrap_or(OutputFormat::Json))
        }
    }
}

#[derive(Serialize)]
struct SlackOut {
    theta_no_sabotage: f64,
    theta_sabotage: f64,
}

fn slack_of(c: &Classification, theta: f64) -> SlackOut {
    let (a, b) = c.slack(theta);
    SlackOut { theta_no_sabotage: a, theta_sabotage: b }
}

fn cmd_solve(spec: &ContestSpec, format: OutputFormat, slack: bool) -> Result<String, Failure> {
    let result = solve(spec);
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(flatten)]
                result: &'a crate::equilibrium::EquilibriumResult,
                #[serde(skip_serializing_if = "Option::is_none")]
                slack: Option<SlackOut>,
            }
            let slack = slack.then(|| slack_of(&classify(spec), spec.theta()));
            Ok(json_line(&Out { result: &result, slack }))
        }
        OutputFormat::Csv => {
            let Some(profile) = &result.profile else {
                return Ok(csv_line(&["group".into(), "index".into(), "valuation".into(), "x".into(), "y".into()]));
            };
            let mut s = csv_line(&["group".into(), "index".into(), "valuation".into(), "x".into(), "y".into()]);
            for (player, e) in profile.iter() {
                let v = spec.valuation(player)?;
                s += &csv_line(&[player.group.to_string(), player.index.to_string(), num(v), num(e.x), num(e.y)]);
            }
            Ok(s)
        }
    }
}

fn cmd_classify(spec: &ContestSpec, format: OutputFormat) -> String {
    let c = classify(spec);
    let slack = slack_of(&c, spec.theta());
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                regime: String,
                boundary: bool,
                theta: f64,
                thresholds: &'a crate::equilibrium::Thresholds,
                slack: SlackOut,
            }
            json_line(&Out {
                regime: c.regime.to_string(),
                boundary: c.boundary,
                theta: spec.theta(),
                thresholds: &c.thresholds,
                slack,
            })
        }
        OutputFormat::Csv => {
            let header = ["regime", "boundary", "theta", "theta_no_sabotage", "theta_sabotage", "slack_no_sabotage", "slack_sabotage"];
            csv_line(&header.map(String::from))
                + &csv_line(&[
                    c.regime.to_string(),
                    c.boundary.to_string(),
                    num(spec.theta()),
                    num(c.thresholds.theta_no_sabotage),
                    num(c.thresholds.theta_sabotage),
                    num(slack.theta_no_sabotage),
                    num(slack.theta_sabotage),
                ])
        }
    }
}

fn cmd_verify(spec: &ContestSpec, profile: &StrategyProfile, epsilon: f64, format: OutputFormat) -> Result<String, Failure> {
    let report = is_epsilon_nash(spec, profile, epsilon)?;
    Ok(match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => {
            let header = ["group", "index", "best_improvement", "x", "y", "tie", "within_epsilon"];
            let mut s = csv_line(&header.map(String::from));
            for d in &report.players {
                s += &csv_line(&[
                    d.player.group.to_string(),
                    d.player.index.to_string(),
                    num(d.improvement),
                    num(d.new_x),
                    num(d.new_y),
                    d.tie.to_string(),
                    (d.improvement <= epsilon).to_string(),
                ]);
            }
            s
        }
    })
}

fn cmd_br(theta: f64, v: f64, z_minus: f64, z_other: f64, format: OutputFormat) -> Result<String, Failure> {
    if v == 0.0 || z_other == 0.0 {
        return Err(Failure::Input("DomainError: --v and --z-other must be nonzero".into()));
    }
    let (operation, br): (&str, AxisBestResponse) = match (v > 0.0, z_other > 0.0) {
        (true, true) => ("positive_x", br_positive_x(v, z_minus, z_other)?),
        (false, false) => ("negative_y", br_negative_y(theta, v, z_minus, z_other)?),
        (false, true) => ("positive_y", br_positive_y(theta, v, z_minus, z_other)?),
        (true, false) => ("negative_x", br_negative_x(v, z_minus, z_other)?),
    };
    let axis = if operation.ends_with('x') { "x" } else { "y" };
    Ok(match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                operation: &'a str,
                axis: &'a str,
                effort: f64,
                tie: bool,
            }
            json_line(&Out { operation, axis, effort: br.effort, tie: br.tie })
        }
        OutputFormat::Csv => {
            csv_line(&["operation", "axis", "effort", "tie"].map(String::from))
                + &csv_line(&[operation.into(), axis.into(), num(br.effort), br.tie.to_string()])
        }
    })
}

fn render_region(samples: &[RegionSample], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json_line(samples),
        OutputFormat::Csv => {
            let mut s = String::with_capacity(48 * (samples.len() + 1));
            s.push_str("axis1,axis2,margin,in_region\n");
            for r in samples {
                let _ = writeln!(s, "{},{},{},{}", num(r.axis1), num(r.axis2), num(r.margin), r.in_region);
            }
            s
        }
    }
}

fn cmd_dynamics(
    spec: &ContestSpec,
    initial: &StrategyProfile,
    max_iters: usize,
    order: UpdateOrder,
    format: OutputFormat,
) -> Result<String, Failure> {
    let outcome = best_response_dynamics(spec, initial, max_iters, order)?;
    let (status, period) = match outcome.status {
        DynamicsStatus::Converged => ("Converged", None),
        DynamicsStatus::Cycling { period } => ("Cycling", Some(period)),
        DynamicsStatus::MaxIters => ("MaxIters", None),
    };
    Ok(match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                status: &'a str,
                #[serde(skip_serializing_if = "Option::is_none")]
                period: Option<usize>,
                iterations: usize,
                final_step: f64,
                largest_final_gain: f64,
                initial: &'a StrategyProfile,
                #[serde(rename = "final")]
                last: &'a StrategyProfile,
            }
            let traj = &outcome.trajectory;
            let final_step = traj[traj.len() - 1].max_norm_distance(&traj[traj.len() - 2]);
            let last = outcome.last();
            let mut largest_final_gain = f64::NEG_INFINITY;
            for player in spec.players() {
                largest_final_gain = largest_final_gain.max(best_deviation(spec, last, player)?.improvement);
            }
            json_line(&Out {
                status,
                period,
                iterations: outcome.iterations(),
                final_step,
                largest_final_gain,
                initial,
                last,
            })
        }
        OutputFormat::Csv => {
            let mut s = csv_line(&["iteration", "group", "index", "x", "y"].map(String::from));
            for (it, profile) in outcome.trajectory.iter().enumerate() {
                for (p, e) in profile.iter() {
                    let _ = writeln!(s, "{it},{},{},{},{}", p.group, p.index, num(e.x), num(e.y));
                }
            }
            s
        }
    })
}
