use gdl_core::block::{Block, BlockStation};
use gdl_core::fem::{default_schedule, energy_mismatch, run_load_path, Mesh1D, PathOptions};
use gdl_core::material::lambda_warning;
use gdl_core::profile::FieldProfile;
use gdl_core::rod::Rod;
use gdl_core::{GdlError, Strategy};

use crate::args::Command;
use crate::config::{Problem, RunConfig};
use crate::output::{emit, Cell, Column, Table};
use crate::verify;
use crate::{CliError, Result, EXIT_OK, EXIT_VERIFY_FAILED};

pub const ROD_CURVE_SAMPLES: usize = 101;
pub const BLOCK_CURVE_SAMPLES: usize = 51;
pub const PROFILE_SAMPLES: usize = 201;
pub const ROD_STATIONS: [f64; 3] = [0.25, 0.5, 0.75];
/// Process-zone sizes in mm: elastic limit, two nucleation, two growth and
/// one propagation station of the reference block.
pub const BLOCK_STATIONS: [f64; 6] = [0.0, 1.0, 2.0, 4.0, 6.0, 7.0];

pub fn dispatch(command: Command) -> Result<i32> {
    let (problem, config, overrides) = match &command {
        Command::RodCurve(a) => (
            Problem::Rod,
            &a.common.config,
            a.rod.apply(a.common.overrides()),
        ),
        Command::RodProfile(a) => (
            Problem::Rod,
            &a.common.config,
            with_stations(a.rod.apply(a.common.overrides()), &a.stations.stations),
        ),
        Command::BlockCurve(a) => (
            Problem::Block,
            &a.common.config,
            a.block.apply(a.common.overrides()),
        ),
        Command::BlockProfile(a) => (
            Problem::Block,
            &a.common.config,
            with_stations(a.block.apply(a.common.overrides()), &a.stations.stations),
        ),
        Command::FemRun(a) => (
            Problem::Fem,
            &a.common.config,
            a.fem.apply(a.rod.apply(a.common.overrides())),
        ),
        Command::Verify(a) => {
            let mut o = a
                .fem
                .apply(a.interface.apply(a.rod.apply(a.common.overrides())));
            o.phase4 = a.phase4.clone();
            (Problem::Verify, &a.common.config, o)
        }
    };
    let cfg = RunConfig::resolve(problem, config.as_deref(), overrides)?;
    match command {
        Command::RodCurve(_) => write_table(&cfg, &rod_curve(&cfg)?),
        Command::RodProfile(_) => write_table(&cfg, &rod_profile(&cfg)?),
        Command::BlockCurve(_) => write_table(&cfg, &block_curve(&cfg)?),
        Command::BlockProfile(_) => write_table(&cfg, &block_profile(&cfg)?),
        Command::FemRun(_) => write_table(&cfg, &fem_run(&cfg)?),
        Command::Verify(_) => {
            let report = verify::run(&cfg);
            verify::write(&report, &cfg)?;
            Ok(if report.all_passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn with_stations(
    mut o: crate::config::Overrides,
    stations: &Option<Vec<f64>>,
) -> crate::config::Overrides {
    o.stations = stations.clone();
    o
}

fn write_table(cfg: &RunConfig, table: &Table) -> Result<i32> {
    emit(cfg.out.as_deref(), |w| table.write(cfg.format, w))?;
    Ok(EXIT_OK)
}

fn warn_lambda(cfg: &RunConfig) {
    if let Some(w) = lambda_warning(cfg.rod.lambda) {
        eprintln!("gdl: warning: {w}");
    }
}

/// Inelastic branch, normalized by `σ_c` and `σ_c L / E`. The first row is
/// the elastic limit.
pub fn rod_curve(cfg: &RunConfig) -> Result<Table> {
    warn_lambda(cfg);
    let rod = Rod::new(&cfg.rod.spec(), cfg.rod.variant)?;
    let states = rod.equilibrium_curve(cfg.samples_or(ROD_CURVE_SAMPLES), Strategy::default())?;
    let s_scale = rod.params.sigma_c;
    let u_scale = rod.params.displacement_scale();
    let mut t = Table::new(vec![
        Column::new("d_m", "-"),
        Column::new("sigma", "sigma_c"),
        Column::new("u_star", "sigma_c L/E"),
        Column::new("w", "sigma_c L/E"),
    ]);
    for s in states {
        t.push(vec![
            s.d_m.into(),
            (s.sigma / s_scale).into(),
            (s.u_star / u_scale).into(),
            (s.w / u_scale).into(),
        ]);
    }
    Ok(t)
}

fn profile_columns(
    station: &'static str,
    length: &'static str,
    stress: &'static str,
    energy: &'static str,
    multiplier: &'static str,
) -> Vec<Column> {
    vec![
        Column::new("station", station),
        Column::new("x", length),
        Column::new("traction", stress),
        Column::new("Y", energy),
        Column::new("Yc", energy),
        Column::new("gamma2", multiplier),
        Column::new("d", "-"),
    ]
}

fn push_profiles(t: &mut Table, station: f64, fields: [&FieldProfile; 5]) -> Result<()> {
    let x = &fields[0].x;
    if fields.iter().any(|f| &f.x != x) {
        return Err(CliError::Core(GdlError::Model(
            "profiles are not on a shared grid".into(),
        )));
    }
    for i in 0..x.len() {
        let mut row: Vec<Cell> = vec![station.into(), x[i].into()];
        row.extend(fields.iter().map(|f| Cell::Num(f.values[i])));
        t.push(row);
    }
    Ok(())
}

/// Full-bar profiles `x ∈ [−L, L]`; the traction of the rod is its uniform
/// stress. Stations are `d_m ∈ (0, 1)`.
pub fn rod_profile(cfg: &RunConfig) -> Result<Table> {
    warn_lambda(cfg);
    let rod = Rod::new(&cfg.rod.spec(), cfg.rod.variant)?;
    let n = cfg.samples_or(PROFILE_SAMPLES);
    let stations = cfg
        .stations
        .clone()
        .unwrap_or_else(|| ROD_STATIONS.to_vec());
    let mut t = Table::new(profile_columns(
        "-",
        "length",
        "stress",
        "stress",
        "stress*length",
    ));
    for d_m in stations {
        if !(d_m > 0.0 && d_m < 1.0) {
            return Err(CliError::Usage(format!(
                "rod stations must lie in (0, 1), got {d_m}"
            )));
        }
        let sigma = rod.stress(d_m)?;
        let damage = rod.damage_profile(d_m, n)?.mirrored();
        let traction = FieldProfile {
            kind: gdl_core::FieldKind::Traction,
            parameter: d_m,
            x: damage.x.clone(),
            values: vec![sigma; damage.x.len()],
        };
        let y = rod.driving_force_profile(d_m, n)?.mirrored();
        let yc = rod.threshold_profile(d_m, n)?.mirrored();
        let g = rod.gamma2_profile(d_m, n)?.mirrored();
        push_profiles(&mut t, d_m, [&traction, &y, &yc, &g, &damage])?;
    }
    Ok(t)
}

/// Elastic limit, then the three inelastic branches; junction rows appear
/// once at the end of a branch and again at the start of the next.
pub fn block_curve(cfg: &RunConfig) -> Result<Table> {
    let block = Block::new(&cfg.block.spec())?;
    let states =
        block.equilibrium_curve(cfg.samples_or(BLOCK_CURVE_SAMPLES), Strategy::default())?;
    let mut t = Table::new(vec![
        Column::new("phase", "-"),
        Column::new("l_m_or_c", "mm"),
        Column::new("delta", "mm"),
        Column::new("P", "N"),
    ]);
    for s in states {
        let driver = match s.station {
            BlockStation::Elastic { .. } => 0.0,
            other => other.driver(),
        };
        t.push(vec![
            s.phase.label().into(),
            driver.into(),
            s.delta.into(),
            s.p.into(),
        ]);
    }
    Ok(t)
}

/// Interface profiles on `[0, L]` at process-zone sizes `l_m ≥ 0`
/// (`l_m > l_c` means a crack of length `l_m − l_c`).
pub fn block_profile(cfg: &RunConfig) -> Result<Table> {
    let block = Block::new(&cfg.block.spec())?;
    let n = cfg.samples_or(PROFILE_SAMPLES);
    let stations = cfg
        .stations
        .clone()
        .unwrap_or_else(|| BLOCK_STATIONS.to_vec());
    let mut t = Table::new(profile_columns("mm", "mm", "N/mm^2", "N/mm", "N"));
    for l_m in stations {
        let state = block
            .state_at_zone(l_m)
            .map_err(|e| CliError::Usage(format!("station {l_m}: {e}")))?;
        let traction = block.traction_profile(&state, n);
        let y = block.driving_force_profile(&state, n);
        let yc = block.threshold_profile(&state, n);
        let g = block.gamma2_profile(&state, n)?;
        let d = block.damage_profile(&state, n);
        push_profiles(&mut t, l_m, [&traction, &y, &yc, &g, &d])?;
    }
    Ok(t)
}

/// Load path on a uniform mesh of `[−L, L]` with the default schedule.
pub fn fem_run(cfg: &RunConfig) -> Result<Table> {
    warn_lambda(cfg);
    let spec = cfg.rod.spec();
    let mesh = Mesh1D::uniform(cfg.rod.length, cfg.elements)?;
    let schedule = default_schedule(&spec, cfg.rod.variant, cfg.steps)?;
    let path = run_load_path(
        &mesh,
        &spec,
        cfg.rod.variant,
        &schedule,
        &PathOptions::default(),
    )?;
    let mut t = Table::new(vec![
        Column::new("u_star", "length"),
        Column::new("sigma", "stress"),
        Column::new("d_max", "-"),
        Column::new("band_half_width", "length"),
        Column::new("stored", "stress*length"),
        Column::new("dissipation", "stress*length"),
        Column::new("work", "stress*length"),
        Column::new("energy_mismatch", "-"),
        Column::new("kkt_residual", "-"),
        Column::new("stress_spread", "-"),
        Column::new("staggered_iterations", "-"),
        Column::new("bisection_level", "-"),
    ]);
    for (i, s) in path.states.iter().enumerate() {
        let mismatch = if i == 0 {
            0.0
        } else {
            energy_mismatch(&path.states[i - 1], s)
        };
        t.push(vec![
            s.load_factor.into(),
            s.sigma.into(),
            s.d_max.into(),
            s.band_half_width.into(),
            s.stored.into(),
            s.dissipation.into(),
            s.work.into(),
            mismatch.into(),
            s.kkt_residual.into(),
            s.stress_spread.into(),
            s.staggered_iterations.into(),
            (s.bisection_level as usize).into(),
        ]);
    }
    Ok(t)
}
