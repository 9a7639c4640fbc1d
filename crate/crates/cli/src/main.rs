//! `geophase`: data tables for geometric phases of the thermal Kitaev chain.

mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geophase::figures::{self, PhasePoint};
use geophase::kitaev::{DEFAULT_M_GRID, DEFAULT_T_GRID};
use geophase::uhlmann::CriticalTemperature;
use geophase::{ChainParams, Error, Execution, PhaseVerdict};

use output::{Cell, Table};

#[derive(Parser, Debug)]
#[command(
    name = "geophase",
    version,
    about = "Uhlmann and interferometric phases of the thermal Kitaev chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band gap Δ_k over one Brillouin zone for each m.
    Spectrum(Common),
    /// Equatorial Bloch components of the Gibbs states for each (m, T).
    BlochCurves(Common),
    /// Nodes of the Uhlmann holonomy trace.
    Nodes(NodesArgs),
    /// Critical temperatures of every (n1, n2) branch for each m.
    CriticalTemps(Common),
    /// Uhlmann phase factor and interferometric phase for each (m, T).
    Phase(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Single value of the chemical potential m.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "m_grid")]
    m: Option<f64>,
    /// Comma-separated m values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    m_grid: Option<Vec<f64>>,
    /// Single temperature.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "t_grid")]
    t: Option<f64>,
    /// Comma-separated temperatures.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t_grid: Option<Vec<f64>>,
    /// Brillouin-zone turns (maximum n1 for critical temperatures).
    #[arg(long)]
    turns: Option<u32>,
    /// Grid points per turn.
    #[arg(long, default_value_t = 4096)]
    density: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate the sweep on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct NodesArgs {
    #[command(flatten)]
    common: Common,
    /// Flat-band branches that close exactly after n1 turns, instead of
    /// the nodes along the curve.
    #[arg(long)]
    closed: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }

    fn report(&self) -> String {
        let (kind, message) = match self {
            Failure::Invalid(m) => ("invalid_input", m),
            Failure::Numeric(m) => ("numeric_failure", m),
        };
        serde_json::json!({ "error": kind, "message": message }).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::InvalidState(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn ms(&self, default: &[f64]) -> Result<Vec<f64>, Failure> {
        grid("m", self.m, self.m_grid.as_deref(), default)
    }

    fn ts(&self, default: &[f64]) -> Result<Vec<f64>, Failure> {
        let ts = grid("T", self.t, self.t_grid.as_deref(), default)?;
        match ts.iter().find(|t| **t < 0.0) {
            Some(t) => Err(invalid(format!("temperature {t} is negative"))),
            None => Ok(ts),
        }
    }

    fn turns(&self, default: u32) -> Result<u32, Failure> {
        match self.turns.unwrap_or(default) {
            0 => Err(invalid("--turns must be at least 1")),
            n => Ok(n),
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.density < 64 {
            return Err(invalid(format!(
                "--density must be at least 64 (got {})",
                self.density
            )));
        }
        Ok(())
    }
}

fn grid(
    name: &str,
    single: Option<f64>,
    list: Option<&[f64]>,
    default: &[f64],
) -> Result<Vec<f64>, Failure> {
    let values = match (single, list) {
        (Some(v), _) => vec![v],
        (None, Some(l)) => l.to_vec(),
        (None, None) => default.to_vec(),
    };
    if values.is_empty() {
        return Err(invalid(format!("{name} grid is empty")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(invalid(format!("{name} value {v} is not finite")));
    }
    Ok(values)
}

fn spectrum(c: &Common) -> Result<Table, Failure> {
    let rows = figures::spectrum(&c.ms(&DEFAULT_M_GRID)?, c.density, c.exec())?;
    let mut t = Table::new(&["m", "k", "gap"]);
    for r in rows {
        t.push(vec![r.m.into(), r.k.into(), r.gap.into()]);
    }
    Ok(t)
}

fn bloch_curves(c: &Common) -> Result<Table, Failure> {
    let rows = figures::bloch_curves(
        &c.ms(&DEFAULT_M_GRID)?,
        &c.ts(&DEFAULT_T_GRID)?,
        c.density,
        c.exec(),
    )?;
    let mut t = Table::new(&["m", "T", "k", "r_x", "r_y"]);
    for r in rows {
        t.push(vec![
            r.m.into(),
            r.temperature.into(),
            r.k.into(),
            r.rx.into(),
            r.ry.into(),
        ]);
    }
    Ok(t)
}

fn nodes(args: &NodesArgs) -> Result<Table, Failure> {
    let c = &args.common;
    let turns = c.turns(5)?;
    if args.closed {
        if c.m.is_some_and(|m| m != 0.0)
            || c.m_grid.is_some()
            || c.t.is_some()
            || c.t_grid.is_some()
        {
            return Err(invalid(
                "--closed lists the flat band (m = 0) branches and takes no m or T",
            ));
        }
        return Ok(critical_table(figures::closed_curve_nodes(turns)?, true));
    }
    let ts = if c.t.is_some() || c.t_grid.is_some() {
        c.ts(&[])?
    } else {
        figures::default_node_x_grid()
            .into_iter()
            .map(figures::flat_band_temperature)
            .collect::<Result<Vec<_>, _>>()?
    };
    if ts.contains(&0.0) {
        return Err(invalid("nodes need T > 0"));
    }
    let rows = figures::nodes(&c.ms(&[0.0])?, &ts, turns, c.density, c.exec())?;
    let mut t = Table::new(&[
        "m",
        "T",
        "turn",
        "k",
        "phi",
        "x",
        "closed_curve",
        "degenerate",
    ]);
    for r in rows {
        let n = r.node;
        t.push(vec![
            r.m.into(),
            r.temperature.into(),
            n.turn.into(),
            n.k_node.into(),
            n.phi_at_node.into(),
            n.x_at_node.into(),
            n.closed_curve.into(),
            n.degenerate.into(),
        ]);
    }
    Ok(t)
}

fn critical_table(rows: Vec<CriticalTemperature>, with_x: bool) -> Table {
    let mut t = if with_x {
        Table::new(&["m", "n1", "n2", "T", "x"])
    } else {
        Table::new(&["m", "n1", "n2", "T"])
    };
    for r in rows {
        let mut row = vec![r.m.into(), r.n1.into(), r.n2.into(), r.temperature.into()];
        if with_x {
            row.push(r.flat_band_x().into());
        }
        t.push(row);
    }
    t
}

fn critical_temps(c: &Common) -> Result<Table, Failure> {
    if c.t.is_some() || c.t_grid.is_some() {
        return Err(invalid(
            "critical-temps searches T itself and takes no --t or --t-grid",
        ));
    }
    let ms = c.ms(&figures::default_critical_m_grid())?;
    if let Some(m) = ms.iter().find(|m| **m < 0.0) {
        return Err(invalid(format!(
            "critical temperatures need m >= 0 (got {m})"
        )));
    }
    Ok(critical_table(
        figures::critical_temperatures(&ms, c.turns(3)?, c.exec())?,
        false,
    ))
}

fn verdict_cells(v: &PhaseVerdict) -> [Cell; 3] {
    [v.factor().into(), v.phase.into(), v.reason.clone().into()]
}

fn phase(c: &Common) -> Result<Table, Failure> {
    let ms = c.ms(&DEFAULT_M_GRID)?;
    let ts = c.ts(&DEFAULT_T_GRID)?;
    for &m in &ms {
        ChainParams::new(m, 0.0)?;
    }
    let points: Vec<PhasePoint> = figures::phase_grid(&ms, &ts, c.turns(1)?, c.density, c.exec())?;
    let mut t = Table::new(&[
        "m",
        "T",
        "turns",
        "uhlmann_factor",
        "uhlmann_phase",
        "uhlmann_note",
        "interferometric_kind",
        "interferometric_factor",
        "interferometric_phase",
        "interferometric_note",
    ]);
    for p in points {
        let mut row = vec![p.m.into(), p.temperature.into(), p.turns.into()];
        row.extend(verdict_cells(&p.uhlmann));
        row.push(Cell::Text(p.interferometric.invariant.to_string()));
        row.extend(verdict_cells(&p.interferometric));
        t.push(row);
    }
    Ok(t)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Spectrum(c)
        | Command::BlochCurves(c)
        | Command::CriticalTemps(c)
        | Command::Phase(c) => c,
        Command::Nodes(n) => &n.common,
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let c = common(&cli.command);
    c.validate()?;
    let table = match &cli.command {
        Command::Spectrum(c) => spectrum(c)?,
        Command::BlochCurves(c) => bloch_curves(c)?,
        Command::Nodes(n) => nodes(n)?,
        Command::CriticalTemps(c) => critical_temps(c)?,
        Command::Phase(c) => phase(c)?,
    };
    let text = match c.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &c.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| invalid(format!("cannot write to standard output: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                Failure::Invalid(e.to_string().trim_end().to_string()).report()
            );
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code())
        }
    }
}
