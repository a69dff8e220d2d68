//! Command-line front end: closed-form inversion, rank certificates, the
//! 1-D periodic solve sweep, and oracle cross-checks.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad flags, malformed
//! symbols, unsupported sizes), 3 on numerical failures (roots on the unit
//! circle, singular spectra, non-convergence).

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::circulant::{parse_symbol, BandSymbol};
use crate::error::{Error, Result};
use crate::inverse::{inverse_column, root_systems, InverseColumn};
use crate::qtt_build::inverse_qtt;
use crate::roots::RootSystem;
use crate::solver::{solve_1d, write_csv, Experiment1DConfig, DEFAULT_ROUND_TOL};
use crate::tt::dense_unfolding_ranks;

const COLUMN_PRINT_LIMIT: u64 = 32;

/// Largest level for dense unfolding-rank certificates.
const RANKS_LEVEL_CAP: usize = 10;

#[derive(Parser)]
#[command(name = "qttinv", disable_help_subcommand = true)]
#[command(about = "Band circulant inversion with explicit QTT representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form inverse column, roots, and rank bound of a band circulant
    Invert {
        /// Symbol `a_{-n} .. a_{-1} | a_0 .. a_{m-1}` (complex literals as re+imj)
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        /// Matrix size
        #[arg(long = "N")]
        size: u64,
        /// Write the inverse's QTT cores as JSON (size must be a power of two)
        #[arg(long = "json-cores")]
        json_cores: Option<PathBuf>,
    },
    /// Numerical unfolding ranks of the inverse at grid levels lmin..=lmax
    Ranks {
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        #[arg(long)]
        lmin: usize,
        /// Defaults to lmin
        #[arg(long)]
        lmax: Option<usize>,
        /// Relative singular-value threshold
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Periodic convection-reaction-diffusion sweep; writes CSV
    Solve1d {
        #[arg(long)]
        lmin: usize,
        #[arg(long)]
        lmax: usize,
        /// Rounding tolerance for QTT intermediates
        #[arg(long, default_value_t = DEFAULT_ROUND_TOL)]
        tol: f64,
        /// Output CSV path; '-' or absent means stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed form against DFT, dense and contour oracles
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        #[arg(long = "N")]
        size: u64,
    },
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:.12e}", c.re)
    } else if c.im < 0.0 {
        format!("{:.12e}{:.12e}j", c.re, c.im)
    } else {
        format!("{:.12e}+{:.12e}j", c.re, c.im)
    }
}

fn describe_roots(out: &mut impl Write, side: &str, system: &RootSystem) -> std::io::Result<()> {
    let show = |clusters: &[crate::roots::RootCluster]| {
        clusters
            .iter()
            .map(|c| {
                if c.multiplicity == 1 {
                    fmt_complex(c.center)
                } else {
                    format!("{} (x{})", fmt_complex(c.center), c.multiplicity)
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    writeln!(out, "{side} roots inside: [{}]", show(&system.inside))?;
    writeln!(out, "{side} roots outside: [{}]", show(&system.outside))?;
    if system.borderline {
        writeln!(
            out,
            "{side} note: borderline cluster separation; multiplicities ambiguous"
        )?;
    }
    Ok(())
}

fn run_invert(
    out: &mut impl Write,
    symbol: &BandSymbol,
    size: u64,
    json_cores: Option<&PathBuf>,
) -> Result<()> {
    let column = inverse_column(symbol, size)?;
    writeln!(out, "symbol: {symbol}").ok();
    writeln!(out, "N: {size}").ok();
    if symbol.upper() >= 2 {
        let (roots_g, roots_h) = root_systems(symbol)?;
        describe_roots(out, "g", &roots_g).ok();
        describe_roots(out, "h", &roots_h).ok();
    }
    writeln!(out, "qtt rank bound: {}", symbol.band_width()).ok();
    if let InverseColumn::Model { model, .. } = &column {
        let spectrum = symbol.spectrum(size.min(1 << 20) as usize);
        if let Ok(sp) = spectrum {
            writeln!(
                out,
                "condition (max|ev|/min|ev|): {:.6e}",
                sp.condition_number()
            )
            .ok();
        }
        let _ = model;
    }
    let shown = size.min(COLUMN_PRINT_LIMIT);
    for j in 0..shown {
        writeln!(out, "b[{j}] = {}", fmt_complex(column.eval(j)?)).ok();
    }
    if shown < size {
        writeln!(out, "... ({} more entries)", size - shown).ok();
    }
    if let Some(path) = json_cores {
        if !size.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(size as usize));
        }
        let levels = size.ilog2() as usize;
        let qtt = inverse_qtt(symbol, levels)?;
        let json = qtt.to_json();
        std::fs::write(path, serde_json::to_string(&json).expect("serializable"))
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        writeln!(
            out,
            "qtt cores written to {} (ranks {})",
            path.display(),
            qtt.ranks()
        )
        .ok();
    }
    Ok(())
}

fn run_ranks(
    out: &mut impl Write,
    symbol: &BandSymbol,
    lmin: usize,
    lmax: usize,
    tol: f64,
) -> Result<()> {
    if lmin < 2 || lmin > lmax || lmax > RANKS_LEVEL_CAP {
        return Err(Error::InvalidInput(format!(
            "level range must satisfy 2 <= {lmin} <= {lmax} <= {RANKS_LEVEL_CAP}"
        )));
    }
    for level in lmin..=lmax {
        let size = 1u64 << level;
        let column = inverse_column(symbol, size)?;
        let n = size as usize;
        let values: Vec<Complex64> = (0..size).map(|j| column.eval(j).unwrap()).collect();
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| values[(i + n - j) % n]);
        let ranks = dense_unfolding_ranks(&dense, tol);
        writeln!(
            out,
            "L={level} N={size} ranks={ranks} max={} bound={}",
            ranks.max(),
            symbol.band_width()
        )
        .ok();
    }
    Ok(())
}

fn run_solve1d(
    out: &mut impl Write,
    lmin: usize,
    lmax: usize,
    tol: f64,
    path: Option<&PathBuf>,
) -> Result<()> {
    let config = Experiment1DConfig::new(lmin, lmax, tol)?;
    let records = solve_1d(&config)?;
    let to_stdout = path.map(|p| p.as_os_str() == "-").unwrap_or(true);
    if to_stdout {
        write_csv(&records, out).map_err(|e| Error::InvalidInput(e.to_string()))?;
    } else {
        let path = path.unwrap();
        let file = std::fs::File::create(path)
            .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", path.display())))?;
        write_csv(&records, file).map_err(|e| Error::InvalidInput(e.to_string()))?;
        writeln!(out, "wrote {} rows to {}", records.len(), path.display()).ok();
    }
    Ok(())
}

fn run_oracle(out: &mut impl Write, symbol: &BandSymbol, size: u64) -> Result<()> {
    let column = inverse_column(symbol, size)?;
    let n = size as usize;
    let dft = symbol.dft_inverse_column(n)?;
    let scale = dft.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut dev_dft: f64 = 0.0;
    for (j, want) in dft.iter().enumerate() {
        dev_dft = dev_dft.max((column.eval(j as u64)? - want).norm());
    }
    writeln!(
        out,
        "max |closed-form - dft| / max|b|: {:.3e}",
        dev_dft / scale
    )
    .ok();

    if n <= 1 << 10 {
        let dense = symbol.materialize(n)?;
        let mut e0 = nalgebra::DVector::<Complex64>::zeros(n);
        e0[0] = Complex64::new(1.0, 0.0);
        let solved = dense
            .full_piv_lu()
            .solve(&e0)
            .ok_or(Error::SingularSpectrum)?;
        let mut dev_dense: f64 = 0.0;
        for j in 0..n {
            dev_dense = dev_dense.max((column.eval(j as u64)? - solved[j]).norm());
        }
        writeln!(
            out,
            "max |closed-form - dense lu| / max|b|: {:.3e}",
            dev_dense / scale
        )
        .ok();
    }

    // periodized biinfinite entries; only meaningful without column rotation
    if symbol.upper() >= 2 {
        // window from the root decay rate, point count past the alias horizon
        let (roots_g, _) = root_systems(symbol)?;
        let decay = roots_g
            .clusters()
            .map(|c| {
                let r = c.center.norm();
                if r < 1.0 {
                    r
                } else {
                    1.0 / r
                }
            })
            .fold(0.0f64, f64::max)
            .clamp(1e-6, 1.0 - 1e-12);
        let window = ((-21.0 / (size as f64 * decay.ln())).ceil() as i64).clamp(2, 64);
        let points = (512usize)
            .max(8 * symbol.band_width())
            .max(4 * (size as usize) * (window as usize + 1))
            .min(1 << 16);
        let mut dev_contour: f64 = 0.0;
        for j in 0..n.min(64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in -window..=window {
                acc += crate::inverse::contour_oracle(symbol, j as i64 - size as i64 * l, points)?;
            }
            dev_contour = dev_contour.max((column.eval(j as u64)? - acc).norm());
        }
        writeln!(
            out,
            "max |closed-form - periodized contour| / max|b|: {:.3e}",
            dev_contour / scale
        )
        .ok();
    }
    Ok(())
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::Invert {
            symbol,
            size,
            json_cores,
        } => {
            let symbol = parse_symbol(&symbol)?;
            if size < symbol.band_width() as u64 {
                return Err(Error::BandWrap {
                    n: size as usize,
                    m: symbol.upper(),
                    lower: symbol.lower(),
                });
            }
            run_invert(out, &symbol, size, json_cores.as_ref())
        }
        Command::Ranks {
            symbol,
            lmin,
            lmax,
            tol,
        } => {
            let symbol = parse_symbol(&symbol)?;
            run_ranks(out, &symbol, lmin, lmax.unwrap_or(lmin), tol)
        }
        Command::Solve1d {
            lmin,
            lmax,
            tol,
            out: path,
        } => run_solve1d(out, lmin, lmax, tol, path.as_ref()),
        Command::Oracle { symbol, size } => {
            let symbol = parse_symbol(&symbol)?;
            run_oracle(out, &symbol, size)
        }
    }
}

/// Parses and runs a command line (without the program name), writing to
/// `out`. Returns the process exit code.
pub fn run<W: Write>(args: &[String], out: &mut W) -> i32 {
    let mut argv = vec!["qttinv".to_string()];
    argv.extend_from_slice(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

/// CLI entry point over process arguments and stdout.
pub fn cli_main(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(args, &mut lock)
}
