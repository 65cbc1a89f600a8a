//! Command-line front end.
//!
//! Exit codes: 0 success, 1 self-check failure, 2 configuration or usage
//! error, 3 unstable or non-convergent evaluation (or `threshold` at r = 0),
//! 4 more failed sweep points than `--max-errors`.

pub mod config;
pub mod csv;
pub mod selfcheck;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::closedform::{alpha_power_threshold, minimum_power, threshold_alpha, threshold_cooperativity};
use crate::sweep::figures::{figure_spec, run_figure};
use crate::sweep::{evaluate, evaluate_point, run_sweep, Quantity, Scenario, SweepError, SweepSpec};
use config::{ConfigError, Dump, Layer, Resolved, Sources};
use csv::{format_g, Cell, CsvTable};

pub const PRESET_DIR_ENV: &str = "SQUEEZELINK_PRESET_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFCHECK: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_SWEEP_ERRORS: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "squeezelink",
    version,
    about = "Mirror-mirror entanglement from two-mode squeezed light"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Named preset layered under the configuration file
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct EvalFlags {
    /// adiabatic, nonadiabatic or oracle
    #[arg(long, value_name = "R")]
    regime: Option<String>,
    /// mirror or field
    #[arg(long, value_name = "P")]
    pair: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variance sum and entanglement verdict for one configuration
    Duan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Scan one parameter or regenerate a figure dataset as CSV
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        eval: EvalFlags,
        /// fig2, fig3, fig4, fig5a, fig5b, fig6a, fig6b, fig8 or fig9
        #[arg(long, value_name = "ID", conflicts_with = "axis")]
        figure: Option<String>,
        /// Parameter path such as unit2.power_mw or bath.r
        #[arg(long, value_name = "PATH")]
        axis: Option<String>,
        /// MIN:MAX:COUNT[:log]
        #[arg(long, value_name = "RANGE")]
        range: Option<String>,
        /// Write the CSV here instead of standard output
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Failed points tolerated before exiting with status 4
        #[arg(long, value_name = "N")]
        max_errors: Option<u64>,
    },
    /// Minimum cooperativity and drive power for entanglement
    Threshold {
        #[command(flatten)]
        common: Common,
        /// cooperativity, power or both
        #[arg(long, value_name = "Q")]
        quantity: Option<String>,
    },
    /// Run the numerical self-check suite
    Selfcheck {
        /// Comma-separated check names
        #[arg(long, value_name = "CHECK", value_delimiter = ',')]
        only: Vec<String>,
        /// Replace the tolerance of every upper-bound check
        #[arg(long, value_name = "X")]
        tolerance: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(ConfigError),
    Compute(String),
    Io(String),
    SweepErrors { failed: usize, allowed: u64 },
    Selfcheck(usize),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Config(_) | Failure::Io(_) => EXIT_CONFIG,
            Failure::Compute(_) => EXIT_COMPUTE,
            Failure::SweepErrors { .. } => EXIT_SWEEP_ERRORS,
            Failure::Selfcheck(_) => EXIT_SELFCHECK,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Compute(m) | Failure::Io(m) => m.clone(),
            Failure::Config(e) => e.to_string(),
            Failure::SweepErrors { failed, allowed } => {
                format!("{failed} sweep point(s) failed; --max-errors allows {allowed}")
            }
            Failure::Selfcheck(n) => format!("{n} check(s) failed"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        if e.code() == "invalid" {
            Failure::Usage(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Io(e.to_string())
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_CONFIG
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let preset_dir = std::env::var_os(PRESET_DIR_ENV).map(PathBuf::from);
    let result = match cli.command {
        Command::Duan { common, eval } => {
            let flags = Layer {
                regime: eval.regime,
                pair: eval.pair,
                ..Layer::default()
            };
            cmd_duan(&sources(common, preset_dir, flags), out, err)
        }
        Command::Sweep {
            common,
            eval,
            figure,
            axis,
            range,
            out: path,
            max_errors,
        } => {
            let flags = Layer {
                regime: eval.regime,
                pair: eval.pair,
                figure,
                axis,
                range,
                max_errors,
                ..Layer::default()
            };
            cmd_sweep(&sources(common, preset_dir, flags), path, out, err)
        }
        Command::Threshold { common, quantity } => {
            let flags = Layer {
                threshold_quantity: quantity,
                ..Layer::default()
            };
            cmd_threshold(&sources(common, preset_dir, flags), out)
        }
        Command::Selfcheck { only, tolerance } => cmd_selfcheck(&only, tolerance, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn sources(common: Common, preset_dir: Option<PathBuf>, flags: Layer) -> Sources {
    Sources {
        config: common.config,
        preset: common.preset,
        preset_dir,
        flags,
    }
}

fn header_notes(dump: &mut Dump, command: &str) {
    dump.note(&format!("squeezelink {}", env!("CARGO_PKG_VERSION")));
    dump.note(&format!("command: {command}"));
}

/// Parameters of the scenario in the form the config parser reads back.
fn dump_scenario(dump: &mut Dump, resolved: &Resolved, scenario: &Scenario) {
    dump.system(&resolved.system);
    if let Scenario::Reduced(p) = scenario {
        dump.reduced(p);
    }
}

fn regime_pair(q: Quantity) -> (&'static str, &'static str) {
    match q {
        Quantity::MirrorDuanAdiabatic => ("adiabatic", "mirror"),
        Quantity::MirrorDuanNonadiabatic => ("nonadiabatic", "mirror"),
        Quantity::FieldDuan => ("nonadiabatic", "field"),
        Quantity::OracleDuan => ("oracle", "mirror"),
        Quantity::OracleFieldDuan => ("oracle", "field"),
    }
}

fn warn_parameters(scenario: &Scenario, quantity: Quantity, err: &mut dyn Write) {
    let Scenario::Physical(sys) = scenario else { return };
    for (j, unit) in [(1, &sys.unit1), (2, &sys.unit2)] {
        for w in unit.resonator.warnings() {
            let _ = writeln!(err, "warning: unit{j}: {w}");
        }
        let steady = unit.red_sideband_steady_state();
        let mut ws = vec![steady.rotating_wave_warning(unit)];
        if quantity == Quantity::MirrorDuanAdiabatic {
            ws.push(steady.adiabaticity_warning(unit));
        }
        for w in ws.into_iter().flatten() {
            let _ = writeln!(err, "warning: unit{j}: {w}");
        }
    }
}

fn cmd_duan(src: &Sources, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let resolved = config::resolve(src)?;
    let quantity = resolved.quantity()?;
    let scenario = resolved.scenario()?;
    let optimize = resolved.optimize()?;
    warn_parameters(&scenario, quantity, err);

    let (eval, argmin) = evaluate_point(&scenario, quantity, optimize.as_ref())?;

    let mut dump = Dump::new(resolved.layer.preset.as_deref());
    header_notes(&mut dump, "duan");
    dump_scenario(&mut dump, &resolved, &scenario);
    if let Some(o) = &optimize {
        dump.optimize(o);
    }
    let (regime, pair) = regime_pair(quantity);
    dump.evaluate(regime, pair);

    let d = eval.duan;
    let mut report = vec![
        ("scenario", scenario.kind().to_string()),
        ("quantity", quantity.to_string()),
        ("total", format_g(d.total)),
        ("var_x", format_g(d.var_x)),
        ("var_y", format_g(d.var_y)),
        ("cooperativity_1", format_g(eval.cooperativity[0])),
        ("cooperativity_2", format_g(eval.cooperativity[1])),
        ("entangled", d.entangled.to_string()),
    ];
    if let (Some(o), Some(x)) = (&optimize, argmin) {
        report.push(("optimized_axis", o.axis.to_string()));
        report.push(("argmin", format_g(x)));
    }
    write_report(out, dump, &report)
}

fn write_report(out: &mut dyn Write, dump: Dump, report: &[(&str, String)]) -> Result<(), Failure> {
    for line in dump.into_lines() {
        writeln!(out, "# {line}").map_err(io)?;
    }
    for (k, v) in report {
        writeln!(out, "{k} = {v}").map_err(io)?;
    }
    Ok(())
}

fn cmd_sweep(src: &Sources, path: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let resolved = config::resolve(src)?;
    let max_errors = resolved.max_errors();
    let mut dump = Dump::new(resolved.layer.preset.as_deref());
    header_notes(&mut dump, "sweep");

    let (table, failed) = match resolved.figure {
        Some(id) => {
            if resolved.layer.axis.is_some() || resolved.layer.range.is_some() {
                return Err(Failure::Usage(
                    "a figure fixes its own axis and range; drop --axis/--range".into(),
                ));
            }
            if resolved.optimize()?.is_some() {
                return Err(Failure::Usage(
                    "figures fix their own optimization; remove [optimize]".into(),
                ));
            }
            let base = resolved.figure_base();
            let spec = figure_spec(id, &base)?;
            let ds = run_figure(&spec, &base);
            dump.system(&resolved.system);
            if id.is_reduced() {
                dump.reduced(&base.reduced);
            }
            dump.sweep_figure(id, max_errors);
            for (k, v) in &ds.metadata {
                dump.note(&format!("{k}: {v}"));
            }
            let mut header = vec![spec.axis.to_string()];
            header.extend(ds.columns.iter().map(|c| format!("total[{c}]")));
            let rows = ds
                .axis_values
                .iter()
                .zip(&ds.cells)
                .map(|(x, cells)| {
                    let mut row = vec![Cell::Number(*x)];
                    row.extend(cells.iter().map(|c| match c {
                        Ok(v) => Cell::Number(*v),
                        Err(e) => Cell::Text(format!("error:{}", e.code())),
                    }));
                    row
                })
                .collect();
            let table = CsvTable {
                metadata: dump.into_lines(),
                header,
                rows,
            };
            (table, ds.error_count())
        }
        None => {
            let axis = resolved
                .axis()?
                .ok_or_else(|| Failure::Usage("sweep needs --figure or --axis with --range".into()))?;
            let range = resolved
                .range()?
                .ok_or_else(|| Failure::Usage("--axis needs --range MIN:MAX:COUNT[:log]".into()))?;
            let quantity = resolved.quantity()?;
            let scenario = resolved.scenario()?;
            let optimize = resolved.optimize()?;
            warn_parameters(&scenario, quantity, err);
            let spec = SweepSpec {
                base: scenario,
                axis,
                range,
                quantity,
                optimize,
            };
            let rows = run_sweep(&spec)?;

            dump_scenario(&mut dump, &resolved, &scenario);
            dump.sweep_axis(axis, &range, max_errors);
            if let Some(o) = &optimize {
                dump.optimize(o);
            }
            let (regime, pair) = regime_pair(quantity);
            dump.evaluate(regime, pair);
            dump.note(&format!("quantity: {quantity}"));

            let mut header: Vec<String> = [
                axis.to_string().as_str(),
                "status",
                "total",
                "var_x",
                "var_y",
                "entangled",
                "cooperativity_1",
                "cooperativity_2",
            ]
            .map(String::from)
            .to_vec();
            if let Some(o) = &optimize {
                header.push(format!("argmin[{}]", o.axis));
            }
            let failed = rows.iter().filter(|r| r.is_error()).count();
            let rows = rows
                .iter()
                .map(|row| {
                    let mut cells = vec![Cell::Number(row.axis_value)];
                    match &row.result {
                        Ok(e) => {
                            cells.push(Cell::Text("ok".into()));
                            cells.extend([
                                Cell::Number(e.duan.total),
                                Cell::Number(e.duan.var_x),
                                Cell::Number(e.duan.var_y),
                                Cell::Flag(e.duan.entangled),
                                Cell::Number(e.cooperativity[0]),
                                Cell::Number(e.cooperativity[1]),
                            ]);
                        }
                        Err(e) => {
                            cells.push(Cell::Text(e.code().into()));
                            cells.extend(std::iter::repeat_n(Cell::Empty, 6));
                        }
                    }
                    if optimize.is_some() {
                        cells.push(row.argmin.map_or(Cell::Empty, Cell::Number));
                    }
                    cells
                })
                .collect();
            let table = CsvTable {
                metadata: dump.into_lines(),
                header,
                rows,
            };
            (table, failed)
        }
    };

    match &path {
        Some(p) => std::fs::write(p, table.to_bytes()).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        None => table.write_to(out).map_err(io)?,
    }
    if failed as u64 > max_errors {
        return Err(Failure::SweepErrors {
            failed,
            allowed: max_errors,
        });
    }
    if failed > 0 {
        let _ = writeln!(err, "warning: {failed} sweep point(s) failed");
    }
    Ok(())
}

fn cmd_threshold(src: &Sources, out: &mut dyn Write) -> Result<(), Failure> {
    let resolved = config::resolve(src)?;
    let which = resolved
        .layer
        .threshold_quantity
        .clone()
        .unwrap_or_else(|| "both".into());
    let (want_c, want_p) = match which.as_str() {
        "cooperativity" => (true, false),
        "power" => (false, true),
        "both" => (true, true),
        other => {
            return Err(Failure::Usage(format!(
                "unknown threshold quantity '{other}' (cooperativity, power, both)"
            )))
        }
    };
    let scenario = resolved.scenario()?;
    let degenerate = |e: crate::closedform::ClosedFormError| Failure::Compute(e.to_string());

    let mut dump = Dump::new(resolved.layer.preset.as_deref());
    header_notes(&mut dump, "threshold");
    dump_scenario(&mut dump, &resolved, &scenario);
    dump.threshold(&which);

    let mut report: Vec<(&str, String)> = Vec::new();
    match scenario {
        Scenario::Reduced(p) => {
            if want_p {
                return Err(Failure::Usage(
                    "a power threshold needs hardware parameters; remove [reduced] or use --quantity cooperativity"
                        .into(),
                ));
            }
            let c_min = threshold_cooperativity(p.r, p.n_th).map_err(degenerate)?;
            let at = evaluate(
                &Scenario::Reduced(crate::sweep::ReducedParams {
                    cooperativity: c_min,
                    ..p
                }),
                Quantity::MirrorDuanAdiabatic,
            )?;
            report.push(("n_th", format_g(p.n_th)));
            report.push(("c_min", format_g(c_min)));
            report.push(("total_at_c_min", format_g(at.duan.total)));
        }
        Scenario::Physical(sys) => {
            let (mut a, mut b) = (sys.unit1, sys.unit2);
            a.resonator.power = 0.0;
            b.resonator.power = 0.0;
            if a != b {
                return Err(Failure::Usage(
                    "threshold assumes identical units (drive power aside); make [unit1] and [unit2] agree".into(),
                ));
            }
            let unit = &sys.unit1;
            let r = sys.bath.r();
            let t = unit.mirror.temperature;
            let n_th = unit.mirror.thermal_occupation();
            report.push(("n_th", format_g(n_th)));
            if want_c {
                let c_min = threshold_cooperativity(r, n_th).map_err(degenerate)?;
                report.push(("c_min", format_g(c_min)));
            }
            if want_p {
                let p_min = minimum_power(unit, r, t).map_err(degenerate)?;
                let p_alpha = alpha_power_threshold(unit, r, t).map_err(degenerate)?;
                let mut at = sys;
                at.unit1.resonator.power = p_min;
                at.unit2.resonator.power = p_min;
                let total = evaluate(&Scenario::Physical(at), Quantity::MirrorDuanAdiabatic)?
                    .duan
                    .total;
                report.push(("p_min_w", format_g(p_min)));
                report.push(("p_min_mw", format_g(p_min * 1e3)));
                report.push(("total_at_p_min", format_g(total)));
                report.push(("alpha", format_g(threshold_alpha(unit))));
                report.push(("p_alpha_w", format_g(p_alpha)));
                let ratio = if p_min > 0.0 {
                    format_g(p_alpha / p_min)
                } else {
                    "undefined".into()
                };
                report.push(("p_alpha_over_p_min", ratio));
            }
        }
    }
    write_report(out, dump, &report)
}

fn cmd_selfcheck(only: &[String], tolerance: Option<f64>, out: &mut dyn Write) -> Result<(), Failure> {
    let reports = selfcheck::run_checks(only, tolerance).map_err(Failure::Usage)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    for r in &reports {
        writeln!(out, "{}", r.line()).map_err(io)?;
    }
    writeln!(out, "summary passed={} failed={failed}", reports.len() - failed).map_err(io)?;
    if failed > 0 {
        Err(Failure::Selfcheck(failed))
    } else {
        Ok(())
    }
}
