use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conifold_core::ainfinity::{
    check_ainfinity_relations, check_cyclicity, compare_structures, dimer_ainfinity, verify_dictionary, SignConvention,
};
use conifold_core::dimer::{dimer_to_quiver, DimerModel};
use conifold_core::fixtures;
use conifold_core::floer::{RingIsomorphismCheck, LOCALIZED_WINDOW};
use conifold_core::mirror::{large_r_superpotential, verify_wall_crossing};
use conifold_core::paths::{
    bounded_admissibility, is_admissible, is_strongly_admissible, path_from_json, syz_transform_label, winding_number,
    winding_number_bounded, PathKind,
};
use conifold_core::rational::Rational;
use conifold_core::report::{CheckStatus, VerificationReport};
use conifold_core::sheaf::{verify_compositions, BasisMorphism, HalfInteger, Sector};
use conifold_core::skyscraper::{skyscraper_action, skyscraper_report, SkyscraperPoint};
use conifold_core::transfer::{builtin_vanishing_cycle_model, dg_from_json, m3_line_results, merkulov_transfer, transfer_report};

#[derive(Parser)]
#[command(name = "conifold", version, about = "Exact verification of the conifold mirror correspondences")]
struct Cli {
    /// Write the JSON verification report here.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form compositions against the polynomial oracle.
    VerifyCompositions {
        #[arg(long, default_value_t = 3)]
        max_a: i64,
        #[arg(long, default_value_t = 3)]
        max_i: i64,
        /// Also check indices in the localized window.
        #[arg(long)]
        localized: bool,
    },
    /// Triangle products against sheaf compositions.
    VerifyHms {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        max_slope: u32,
        /// Skip the localized label set.
        #[arg(long)]
        standard_only: bool,
        /// Pin the label offset of a composition kind, e.g. `R.Q=1`.
        #[arg(long, value_name = "KIND=N")]
        force_offset: Vec<String>,
    },
    /// Homotopy transfer from a dg presentation.
    Transfer {
        /// dg presentation JSON; the built-in model if omitted.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..))]
        max_arity: u64,
        /// Write the transferred A-infinity presentation as JSON.
        #[arg(long, value_name = "PATH")]
        export: Option<PathBuf>,
        /// Do not search for a dictionary with the conifold dimer structure.
        #[arg(long)]
        no_compare: bool,
    },
    /// Quiver or A-infinity data of a dimer model.
    Dimer {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Quiver)]
        emit: Emit,
        /// Write the emitted JSON here instead of stdout.
        #[arg(long, short, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Winding numbers and bundle labels of path files.
    Paths {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Wall-crossing substitutions.
    Wallcross,
    /// Hom bases acting on a skyscraper sheaf.
    Skyscraper {
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(0..))]
        max_index: i64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(0..))]
        max_a: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Quiver,
    Ainfinity,
}

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// Bad input; exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn print_table(report: &VerificationReport) {
    let width = report.records.iter().map(|r| r.id.chars().count()).max().unwrap_or(0);
    say!("suite {}", report.suite);
    for (k, v) in &report.parameters {
        say!("  {k} = {v}");
    }
    for r in &report.records {
        let tag = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::ReportedDiscrepancy => "NOTE",
        };
        say!("{tag}  {:<width$}  {}", r.id, r.details);
    }
    let s = &report.summary;
    say!("{} checks: {} pass, {} fail, {} reported discrepancies", s.total, s.pass, s.fail, s.reported_discrepancy);
}

fn verify_compositions_cmd(max_a: i64, max_i: i64, localized: bool) -> Result<VerificationReport, InputError> {
    if max_a < 0 || max_i < 0 {
        return Err(InputError("bounds must be non-negative".into()));
    }
    let mut report = verify_compositions(max_a, 0..=max_i);
    if localized {
        let (lo, hi) = LOCALIZED_WINDOW;
        let extra = verify_compositions(max_a, lo..=hi);
        report.param("localized_window", format!("{lo}..={hi}"));
        report.absorb("localized", extra);
    }
    Ok(report)
}

fn verify_hms_cmd(max_slope: u32, standard_only: bool, forced: &[String]) -> Result<VerificationReport, InputError> {
    let mut offsets = BTreeMap::new();
    for f in forced {
        let (k, v) = f.split_once('=').ok_or_else(|| InputError(format!("expected KIND=N, got `{f}`")))?;
        offsets.insert(k.trim().to_string(), v.trim().parse::<i64>()?);
    }
    let mut report = VerificationReport::new("hms");
    report.param("max_slope", max_slope);
    let modes: &[bool] = if standard_only { &[false] } else { &[false, true] };
    for &localized in modes {
        let mut check = RingIsomorphismCheck::new(max_slope, localized);
        if !offsets.is_empty() {
            check.forced_offsets = Some(offsets.clone());
        }
        let result = check.run();
        report.param(if localized { "localized_pairs" } else { "standard_pairs" }, result.pairs_checked);
        report.absorb(if localized { "localized" } else { "standard" }, result.report);
    }
    Ok(report)
}

fn transfer_cmd(input: Option<&Path>, max_arity: usize, export: Option<&Path>, compare: bool) -> Result<VerificationReport, InputError> {
    let (d, h) = match input {
        Some(p) => dg_from_json(&read(p)?)?,
        None => builtin_vanishing_cycle_model(),
    };
    if max_arity < 4 {
        eprintln!("warning: max arity {max_arity} < 4, skipping the vanishing suite for higher products");
    }
    let t = merkulov_transfer(&d, &h, max_arity)?;
    for (label, want, got, ok) in m3_line_results(&t) {
        say!("{label} = {got}{}", if ok { String::new() } else { format!("   (printed: {want})") });
    }
    let mut report = transfer_report(&d, &h, &t);
    report.param("source", input.map_or("builtin".to_string(), |p| p.display().to_string()));
    if compare {
        let dimer = dimer_ainfinity(&fixtures::conifold_dimer());
        match compare_structures(&t.presentation, &dimer, None) {
            Ok(c) => {
                let ok = verify_dictionary(&t.presentation, &dimer, &c).is_ok();
                let dict: Vec<String> =
                    c.entries.iter().map(|e| format!("{} -> {}{}", e.from, if e.sign < 0 { "-" } else { "" }, e.to)).collect();
                report.check("dictionary", ok, dict.join(", "));
            }
            Err(cert) => report.check("dictionary", false, cert.to_string()),
        }
    }
    if let Some(p) = export {
        write(p, &t.presentation.to_json())?;
    }
    Ok(report)
}

fn dimer_cmd(input: &Path, emit: Emit, output: Option<&Path>) -> Result<VerificationReport, InputError> {
    let d = DimerModel::from_json(&read(input)?)?;
    let quiver = dimer_to_quiver(&d);
    let a = dimer_ainfinity(&d);
    let mut report = VerificationReport::new("dimer");
    report.param("input", input.display());
    report.check("faces", true, format!("{} faces, {} arrows", d.faces().len(), quiver.arrows.len()));
    report.absorb("relations", check_ainfinity_relations(&a, 6, SignConvention::default()));
    if let Some(r) = check_cyclicity(&a).records.into_iter().find(|r| r.id == "unsigned") {
        report.record("cyclicity/unsigned", r.status, r.details);
    }
    let json = match emit {
        Emit::Quiver => quiver.to_json(),
        Emit::Ainfinity => a.to_json(),
    };
    match output {
        Some(p) => write(p, &json)?,
        None => say!("{json}"),
    }
    Ok(report)
}

fn paths_cmd(inputs: &[PathBuf]) -> Result<VerificationReport, InputError> {
    let mut report = VerificationReport::new("paths");
    let mut rows = Vec::new();
    for input in inputs {
        let (path, pp) = path_from_json(&read(input)?).map_err(|e| InputError(format!("{}: {e}", input.display())))?;
        let name = input.file_stem().map_or_else(|| input.display().to_string(), |s| s.to_string_lossy().into_owned());
        let (adm, winding) = match path.kind() {
            PathKind::Section => (is_admissible(&path, &pp)?, winding_number(&path, &pp)),
            PathKind::Bounded => (bounded_admissibility(&path, &pp)?, winding_number_bounded(&path, &pp)),
        };
        report.check(format!("{name}/admissible"), adm.admissible, adm.issues.join("; "));
        let strong = is_strongly_admissible(&path);
        match (winding, syz_transform_label(&path, &pp)) {
            (Ok(w), Ok(label)) => {
                report.check(format!("{name}/label"), true, format!("winding {w}, {label}"));
                rows.push(format!("{name:<12} {:<8} {:<6} {:>7}  {label}", path.kind(), if strong { "yes" } else { "no" }, w));
            }
            (Err(e), _) | (_, Err(e)) => report.check(format!("{name}/label"), false, e.to_string()),
        }
    }
    say!("{:<12} {:<8} {:<6} {:>7}  label", "path", "kind", "strong", "winding");
    for r in rows {
        say!("{r}");
    }
    Ok(report)
}

fn wallcross_cmd() -> VerificationReport {
    let report = verify_wall_crossing();
    say!("superpotential: {}", large_r_superpotential());
    report
}

fn skyscraper_cmd(lambda: &str, max_index: i64, max_a: i64) -> Result<VerificationReport, InputError> {
    let lambda: Rational = lambda.parse()?;
    let p = SkyscraperPoint::new(lambda)?;
    for (sector, halves, name) in [(Sector::PP, 0, "p_{0,i1,i2}"), (Sector::Q, 1, "q_{1/2,i1,i2}")] {
        let a = HalfInteger::from_halves(halves);
        say!("{name} on the skyscraper (rows i1, columns i2):");
        for i1 in 0..=max_index {
            let row: Vec<String> =
                (0..=max_index).map(|i2| skyscraper_action(&BasisMorphism { sector, a, i1, i2 }, &p).to_string()).collect();
            say!("  {}", row.join(" | "));
        }
    }
    Ok(skyscraper_report(&p, max_a, max_index))
}

fn run(cli: &Cli) -> Result<VerificationReport, InputError> {
    match &cli.command {
        Command::VerifyCompositions { max_a, max_i, localized } => verify_compositions_cmd(*max_a, *max_i, *localized),
        Command::VerifyHms { max_slope, standard_only, force_offset } => verify_hms_cmd(*max_slope, *standard_only, force_offset),
        Command::Transfer { input, max_arity, export, no_compare } => {
            transfer_cmd(input.as_deref(), *max_arity as usize, export.as_deref(), !no_compare)
        }
        Command::Dimer { input, emit, output } => dimer_cmd(input, *emit, output.as_deref()),
        Command::Paths { inputs } => paths_cmd(inputs),
        Command::Wallcross => Ok(wallcross_cmd()),
        Command::Skyscraper { lambda, max_index, max_a } => skyscraper_cmd(lambda, *max_index, *max_a),
    }
}

fn configure_workers() -> Result<(), InputError> {
    let Ok(v) = std::env::var("CONIFOLD_WORKERS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| InputError(format!("CONIFOLD_WORKERS must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(InputError("CONIFOLD_WORKERS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = configure_workers().and_then(|_| run(&cli));
    let report = match report {
        Ok(r) => r,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    // JSON on stdout must stay parseable
    let emits_json = matches!(cli.command, Command::Dimer { output: None, .. });
    if emits_json {
        let mut err = Vec::new();
        for r in report.failures() {
            err.push(format!("FAIL  {}  {}", r.id, r.details));
        }
        eprintln!("{} checks, {} failures", report.summary.total, report.summary.fail);
        for e in err {
            eprintln!("{e}");
        }
    } else {
        print_table(&report);
    }
    if let Some(p) = &cli.report {
        if let Err(InputError(msg)) = write(p, &report.to_json()) {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
