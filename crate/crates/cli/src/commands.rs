use num_complex::Complex64;
use wavemix_core::bloch::{extract_harmonics, integrate_bloch, BlochOptions, CLOSED_FORM_PHASE};
use wavemix_core::coherent::{
    classical_limit_j, coherent_peak_amplitude, ChannelCoefficients, CoherentDrive, TruncationPolicy,
};
use wavemix_core::diagrams::{extract_gamma, gamma, GammaSource};
use wavemix_core::multiphoton::{grid_222, spectrum_222, PeakChannel};
use wavemix_core::params::validate_config;
use wavemix_core::semiclassical::{spectrum, Regime};
use wavemix_core::verify::run_all;
use wavemix_core::{PeakRecord, PeakSpectrum, RawConfig, Side, SystemParams};

use crate::emit::{Cell, Table, ToTable};
use crate::sweep::{run_sweep, Sweep};
use crate::{
    write_output, ChannelArg, CliError, CliResult, Command, Common, Example222Args, GammaArgs, OracleArgs,
    QuantumArgs, SemiclassicalArgs, SourceArg, VerifyArgs,
};

pub fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::Semiclassical(a) => semiclassical(a),
        Command::Oracle(a) => oracle(a),
        Command::Quantum(a) => quantum(a),
        Command::Gamma(a) => gamma_table(a),
        Command::Example222(a) => example222(a),
        Command::Verify(a) => verify(a),
    }
}

fn flag_name(field: &str) -> String {
    format!("--{}", field.replace('_', "-"))
}

/// Sets a config field by name.
fn set_field(raw: &mut RawConfig, name: &str, value: f64) -> bool {
    let slot = match name {
        "omega01" => &mut raw.omega01,
        "gamma" => &mut raw.gamma,
        "v" => &mut raw.v,
        "rabi_a" => &mut raw.rabi_a,
        "rabi_b" => &mut raw.rabi_b,
        "delta" => &mut raw.delta,
        _ => return false,
    };
    *slot = Some(value);
    true
}

fn field_present(raw: &RawConfig, name: &str) -> bool {
    match name {
        "omega01" => raw.omega01.is_some(),
        "gamma" => raw.gamma.is_some(),
        "v" => raw.v.is_some(),
        "rabi_a" => raw.rabi_a.is_some(),
        "rabi_b" => raw.rabi_b.is_some(),
        "delta" => raw.delta.is_some(),
        _ => false,
    }
}

fn require(raw: &RawConfig, sweep: Option<&Sweep>, fields: &[&str]) -> CliResult<()> {
    for f in fields {
        let swept = sweep.is_some_and(|s| s.name == *f);
        if !swept && !field_present(raw, f) {
            return Err(CliError::Usage(format!("missing required parameter {}", flag_name(f))));
        }
    }
    Ok(())
}

fn system_params(raw: &RawConfig) -> CliResult<SystemParams> {
    // `resolve` fills omega01, gamma and v from the defaults.
    Ok(SystemParams::new(raw.omega01.unwrap_or(10.0), raw.gamma.unwrap_or(1.0), raw.v.unwrap_or(1.0))?)
}

fn parse_sweep(common: &Common) -> CliResult<Option<Sweep>> {
    common.sweep.as_deref().map(Sweep::parse).transpose()
}

/// Runs `point` once, or at every sweep value with the named config field
/// overridden.
fn evaluate<F>(common: &Common, sweep: Option<&Sweep>, extra: &[&str], point: F) -> CliResult<Table>
where
    F: Fn(&RawConfig, Option<(&str, f64)>) -> CliResult<Table> + Sync,
{
    let raw = common.resolve()?;
    match sweep {
        None => point(&raw, None),
        Some(s) => {
            let mut probe = raw.clone();
            if !set_field(&mut probe, &s.name, 0.0) && !extra.contains(&s.name.as_str()) {
                return Err(CliError::Usage(format!("cannot sweep `{}`", s.name)));
            }
            run_sweep(s, |x| {
                let mut r = raw.clone();
                if set_field(&mut r, &s.name, x) {
                    point(&r, None)
                } else {
                    point(&r, Some((s.name.as_str(), x)))
                }
            })
        }
    }
}

fn finish(common: &Common, table: &Table) -> CliResult<()> {
    write_output(common.out.as_ref(), table.render(common.format).as_bytes())
}

fn semiclassical(args: &SemiclassicalArgs) -> CliResult<()> {
    let sweep = parse_sweep(&args.common)?;
    require(&args.common.resolve()?, sweep.as_ref(), &["rabi_a", "rabi_b", "delta"])?;
    let regime = if args.weak { Regime::Weak } else { Regime::Full };
    let table = evaluate(&args.common, sweep.as_ref(), &[], |raw, _| {
        let (params, drive) = validate_config(raw)?;
        Ok(spectrum(&drive, &params, args.orders, regime).to_table())
    })?;
    finish(&args.common, &table)
}

fn oracle(args: &OracleArgs) -> CliResult<()> {
    let sweep = parse_sweep(&args.common)?;
    require(&args.common.resolve()?, sweep.as_ref(), &["rabi_a", "rabi_b", "delta"])?;
    if sweep.is_some() && args.trajectory.is_some() {
        return Err(CliError::Usage("--trajectory cannot be combined with --sweep".into()));
    }
    let table = evaluate(&args.common, sweep.as_ref(), &[], |raw, _| {
        let (params, drive) = validate_config(raw)?;
        let defaults = BlochOptions::defaults_for(&drive, &params);
        let opts = BlochOptions {
            settle_periods: args.settle_periods.unwrap_or(defaults.settle_periods),
            record_periods: args.record_periods,
            rel_tol: args.rel_tol,
            ..defaults
        };
        let traj = integrate_bloch(&drive, &params, &opts)?;
        if let Some(path) = &args.trajectory {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            std::fs::write(path, buf)?;
        }
        let keys: Vec<(u32, Side)> = (0..=args.orders).flat_map(|p| Side::BOTH.map(|s| (p, s))).collect();
        let orders: Vec<i64> = keys.iter().map(|&(p, s)| s.harmonic(p)).collect();
        let c = extract_harmonics(&traj, &orders)?;
        let records = keys.iter().zip(c).map(|(&(p, side), c)| {
            PeakRecord::new(p, side, params.omega01, drive.delta, params.gamma * CLOSED_FORM_PHASE * c)
        });
        Ok(PeakSpectrum::new(records).to_table())
    })?;
    finish(&args.common, &table)
}

fn gamma_source(s: SourceArg) -> GammaSource {
    match s {
        SourceArg::Published => GammaSource::Published,
        SourceArg::Computed => GammaSource::Computed,
    }
}

pub const QUANTUM_COLUMNS: [&str; 8] =
    ["p", "side", "channel", "re_M", "im_M", "abs2_M", "J_classical", "tail_estimate"];

fn quantum(args: &QuantumArgs) -> CliResult<()> {
    let sweep = parse_sweep(&args.common)?;
    let swept = |name: &str| sweep.as_ref().is_some_and(|s| s.name == name);
    if args.alpha2.is_none() && !swept("alpha2") {
        return Err(CliError::Usage("missing required parameter --alpha2".into()));
    }
    if args.beta2.is_none() && !swept("beta2") {
        return Err(CliError::Usage("missing required parameter --beta2".into()));
    }
    if !args.unit_coefficients {
        require(&args.common.resolve()?, sweep.as_ref(), &["delta"])?;
    }
    let channels: Vec<PeakChannel> = match args.channel {
        ChannelArg::E => vec![PeakChannel::EMode],
        ChannelArg::T => vec![PeakChannel::Transmitted],
        ChannelArg::R => vec![PeakChannel::Reflected],
        ChannelArg::All => PeakChannel::ALL.to_vec(),
    };
    let source = gamma_source(args.source);
    let table = evaluate(&args.common, sweep.as_ref(), &["alpha2", "beta2"], |raw, extra| {
        let params = system_params(raw)?;
        let mut alpha2 = args.alpha2.unwrap_or(0.0);
        let mut beta2 = args.beta2.unwrap_or(0.0);
        match extra {
            Some(("alpha2", x)) => alpha2 = x,
            Some(("beta2", x)) => beta2 = x,
            _ => {}
        }
        let drive = CoherentDrive::new(alpha2, beta2, args.phase_a, args.phase_b)?;
        let mirrored = CoherentDrive::new(beta2, alpha2, args.phase_b, args.phase_a)?;
        let mut table = Table::new(&QUANTUM_COLUMNS);
        for p in 1..=args.p_max {
            for side in Side::BOTH {
                let j = classical_limit_j(p, alpha2, beta2, side, &params, source)?;
                for &channel in &channels {
                    let coeffs = if args.unit_coefficients {
                        ChannelCoefficients::unit(channel)
                    } else {
                        let delta = raw.delta.unwrap_or(0.0);
                        let k_a = params.momentum(params.omega01 + delta);
                        let k_b = params.momentum(params.omega01 - delta);
                        ChannelCoefficients::at_momenta(channel, k_a, k_b, &params)
                    };
                    // The left peak is the right peak with the modes exchanged.
                    let (d, c) = match side {
                        Side::Right => (drive, coeffs),
                        Side::Left => (mirrored, ChannelCoefficients { c_a: coeffs.c_b, c_b: coeffs.c_a, ..coeffs }),
                    };
                    let trunc = TruncationPolicy::for_drive(&d, args.tail_bound);
                    let m = coherent_peak_amplitude(p, &d, &c, &params, &trunc, source)?;
                    table.push(row(p, side, channel, m.value, j, m.tail_estimate));
                }
            }
        }
        Ok(table)
    })?;
    finish(&args.common, &table)
}

fn row(p: u32, side: Side, channel: PeakChannel, m: Complex64, j: f64, tail: f64) -> Vec<Cell> {
    vec![
        Cell::Int(i64::from(p)),
        Cell::Text(side.as_str().into()),
        Cell::Text(channel.as_str().into()),
        Cell::Float(m.re),
        Cell::Float(m.im),
        Cell::Float(m.norm_sqr()),
        Cell::Float(j),
        Cell::Float(tail),
    ]
}

fn gamma_table(args: &GammaArgs) -> CliResult<()> {
    let mut table = Table::new(&["p", "order", "gamma"]);
    for p in 0..=args.p_max {
        let value = match args.source {
            SourceArg::Published => Cell::Int(gamma(p, GammaSource::Published)? as i64),
            SourceArg::Computed => {
                let g = extract_gamma(p)?;
                g.as_integer().map_or_else(|| Cell::Text(g.value.to_string()), Cell::Int)
            }
        };
        table.push(vec![Cell::Int(i64::from(p)), Cell::Int(i64::from(2 * p + 1)), value]);
    }
    write_output(args.out.as_ref(), table.render(args.format).as_bytes())
}

fn example222(args: &Example222Args) -> CliResult<()> {
    let sweep = parse_sweep(&args.common)?;
    require(&args.common.resolve()?, sweep.as_ref(), &["delta"])?;
    let table = evaluate(&args.common, sweep.as_ref(), &[], |raw, _| {
        let params = system_params(raw)?;
        let delta = raw.delta.unwrap_or(0.0);
        let k_a = params.momentum(params.omega01 + delta);
        let k_b = params.momentum(params.omega01 - delta);
        let linewidth = args.linewidth.unwrap_or(0.2 * (k_a - k_b).abs());
        if args.points < 3 {
            return Err(wavemix_core::Error::Validation { field: "points", requirement: "at least 3" }.into());
        }
        let grid = grid_222(k_a, k_b, linewidth, args.margin, args.points);
        let without = spectrum_222(&grid, k_a, k_b, linewidth, &params, false)?;
        let with = spectrum_222(&grid, k_a, k_b, linewidth, &params, true)?;
        let mut table = Table::new(&["k", "intensity_without_B", "intensity_with_B"]);
        for ((k, a), b) in grid.iter().zip(&without.intensity).zip(&with.intensity) {
            table.push(vec![Cell::Float(*k), Cell::Float(*a), Cell::Float(*b)]);
        }
        Ok(table)
    })?;
    finish(&args.common, &table)
}

fn verify(args: &VerifyArgs) -> CliResult<()> {
    let checks = run_all();
    let mut text = String::new();
    for c in &checks {
        text.push_str(&c.line());
        text.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    text.push_str(&format!("{} of {} checks passed\n", checks.len() - failed, checks.len()));
    write_output(args.out.as_ref(), text.as_bytes())?;
    if failed > 0 {
        return Err(CliError::Verify(failed, checks.len()));
    }
    Ok(())
}
