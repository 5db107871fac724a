//! Command-line surface. Exit codes: 0 success, 1 numerical/verification
//! failure, 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::bands::{self, BandMethod};
use crate::butterfly::{self, SvgOptions};
use crate::charpoly::{self, ChambersOptions};
use crate::error::Error;
use crate::flux::FluxRational;
use crate::lattice::ModelSpec;
use crate::semiclassical;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "butterfly-lab",
    version,
    about = "Magnetic lattice spectra: Chambers forms, flat bands, Hofstadter butterflies"
)]
pub struct Cli {
    /// RNG seed for sampled verifications.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// key=value file overriding tolerances; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Square,
    Triangular,
    #[value(alias = "hexagonal")]
    Graphene,
    Kagome,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Chambers,
    Grid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Table,
    Json,
}

/// Shared ω flags: radians directly, or `--omega-pi k/n` for ω = kπ/n.
#[derive(Debug, Args)]
pub struct OmegaArgs {
    #[arg(long, conflicts_with = "omega_pi")]
    pub omega: Option<f64>,
    /// ω as a fraction of π, e.g. `1/8` for π/8.
    #[arg(long, value_name = "K/N")]
    pub omega_pi: Option<String>,
}

impl OmegaArgs {
    fn resolve(&self) -> Result<f64, String> {
        if let Some(frac) = &self.omega_pi {
            let (k, n) = frac
                .split_once('/')
                .ok_or_else(|| format!("--omega-pi expects k/n, got `{frac}`"))?;
            let k: f64 = k.trim().parse().map_err(|_| format!("bad numerator `{k}`"))?;
            let n: f64 = n.trim().parse().map_err(|_| format!("bad denominator `{n}`"))?;
            if n == 0.0 {
                return Err("--omega-pi denominator is zero".into());
            }
            return Ok(k * PI / n);
        }
        Ok(self.omega.unwrap_or(0.0))
    }

    fn given(&self) -> bool {
        self.omega.is_some() || self.omega_pi.is_some()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band structure at one rational flux.
    Bands {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[command(flatten)]
        omega: OmegaArgs,
        /// Triangular phase φ (default −γ/2).
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long, value_enum, default_value = "chambers")]
        method: MethodArg,
        /// θ grid resolution per axis for the grid method.
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
    },
    /// Chambers decomposition of det(λI − M(θ)) at one flux.
    Chambers {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[command(flatten)]
        omega: OmegaArgs,
        #[arg(long)]
        phi: Option<f64>,
        /// Override the fit-residual tolerance.
        #[arg(long)]
        fit_tolerance: Option<f64>,
    },
    /// Kagome flat-band test at one ω, or a scan over ω ∈ [0, 2π/3).
    Flatband {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[command(flatten)]
        omega: OmegaArgs,
        /// Scan [0, 2π/3) for all flat-band ω instead of testing one value.
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 4096)]
        scan_points: usize,
    },
    /// Hofstadter butterfly dataset over all reduced fluxes with q ≤ qmax.
    Butterfly {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        qmax: i64,
        #[command(flatten)]
        omega: OmegaArgs,
        /// Output path; `.json` extension writes JSON, anything else CSV.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG rendering.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 640.0)]
        width: f64,
        #[arg(long, default_value_t = 480.0)]
        height: f64,
        #[arg(long, value_enum, default_value = "chambers")]
        method: MethodArg,
    },
    /// Run every identity suite and print a consolidated report.
    Verify,
    /// Verify the subprincipal-symbol formula and the effective band hull.
    Semiclassical {
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        h: f64,
    },
}

fn model_spec(model: ModelArg, omega: f64, phi: Option<f64>) -> ModelSpec {
    match model {
        ModelArg::Square => ModelSpec::square(),
        ModelArg::Triangular => match phi {
            Some(phi) => ModelSpec::triangular_with_phi(phi),
            None => ModelSpec::triangular(),
        },
        ModelArg::Graphene => ModelSpec::hexagonal(),
        ModelArg::Kagome => ModelSpec::kagome(omega),
    }
}

fn usage(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn numerical(err: &Error) -> i32 {
    eprintln!("error: {err}");
    match err {
        Error::InvalidFlux { .. } | Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Default)]
struct FileConfig {
    seed: Option<u64>,
    fit_tolerance: Option<f64>,
}

fn load_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: `{line}`", lineno + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut cfg = FileConfig::default();
    for (k, v) in map {
        match k.as_str() {
            "seed" => cfg.seed = Some(v.parse().map_err(|_| format!("bad seed `{v}`"))?),
            "fit_tolerance" => {
                cfg.fit_tolerance =
                    Some(v.parse().map_err(|_| format!("bad fit_tolerance `{v}`"))?)
            }
            other => return Err(format!("unknown config key `{other}`")),
        }
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> i32 {
    let file_cfg = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(msg) => return usage(&msg),
        },
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file_cfg.seed).unwrap_or(42);

    match cli.command {
        Command::Bands {
            model,
            p,
            q,
            omega,
            phi,
            method,
            grid,
            format,
        } => {
            let omega = match omega.resolve() {
                Ok(w) => w,
                Err(msg) => return usage(&msg),
            };
            let flux = match FluxRational::new(p, q) {
                Ok(f) => f,
                Err(e) => return numerical(&e),
            };
            let spec = model_spec(model, omega, phi);
            let result = match method {
                MethodArg::Chambers => {
                    bands::bands_from_chambers(&spec, flux, &ChambersOptions::default())
                }
                MethodArg::Grid => bands::bands_from_grid(&spec, flux, grid),
            };
            let bs = match result {
                Ok(bs) => bs,
                Err(e) => return numerical(&e),
            };
            match format {
                FormatArg::Json => {
                    println!("{}", serde_json::to_string_pretty(&bs).unwrap());
                }
                FormatArg::Table => {
                    println!(
                        "# {} p/q = {}/{} ({:?})",
                        spec.kind,
                        flux.p(),
                        flux.q(),
                        bs.method
                    );
                    for (i, b) in bs.bands.iter().enumerate() {
                        if b.flat {
                            println!(
                                "band {i}: flat at {:+.12} (multiplicity {})",
                                b.lo, b.multiplicity
                            );
                        } else {
                            println!("band {i}: [{:+.12}, {:+.12}]", b.lo, b.hi);
                        }
                    }
                    for g in bands::gap_report(&bs) {
                        if g.closed {
                            println!("gap after band {}: closed at {:+.12}", g.below, g.lo);
                        } else {
                            println!(
                                "gap after band {}: ({:+.12}, {:+.12}) width {:.6e}",
                                g.below, g.lo, g.hi, g.width
                            );
                        }
                    }
                }
            }
            EXIT_OK
        }

        Command::Chambers {
            model,
            p,
            q,
            omega,
            phi,
            fit_tolerance,
        } => {
            let omega = match omega.resolve() {
                Ok(w) => w,
                Err(msg) => return usage(&msg),
            };
            let flux = match FluxRational::new(p, q) {
                Ok(f) => f,
                Err(e) => return numerical(&e),
            };
            let spec = model_spec(model, omega, phi);
            let mut options = ChambersOptions::default();
            if let Some(tol) = fit_tolerance.or(file_cfg.fit_tolerance) {
                options.fit_tolerance = tol;
            }
            match charpoly::extract_chambers(&spec, flux, &options) {
                Ok(form) => {
                    println!("{}", serde_json::to_string_pretty(&form).unwrap());
                    EXIT_OK
                }
                Err(e) => numerical(&e),
            }
        }

        Command::Flatband {
            p,
            q,
            omega,
            scan,
            scan_points,
        } => {
            let flux = match FluxRational::new(p, q) {
                Ok(f) => f,
                Err(e) => return numerical(&e),
            };
            if scan {
                match bands::flat_band_omegas_with(flux, scan_points) {
                    Ok(omegas) => {
                        println!("# flat-band ω for p/q = {}/{} in [0, 2π/3)", flux.p(), flux.q());
                        for w in omegas {
                            println!("{:.12}  ({:.6}π)", w, w / PI);
                        }
                        EXIT_OK
                    }
                    Err(e) => numerical(&e),
                }
            } else {
                if !omega.given() {
                    return usage("flatband needs --omega/--omega-pi or --scan");
                }
                let w = match omega.resolve() {
                    Ok(w) => w,
                    Err(msg) => return usage(&msg),
                };
                match bands::flat_band_test(flux, w) {
                    Ok(t) => {
                        println!("{}", serde_json::to_string_pretty(&t).unwrap());
                        EXIT_OK
                    }
                    Err(e) => numerical(&e),
                }
            }
        }

        Command::Butterfly {
            model,
            qmax,
            omega,
            out,
            svg,
            width,
            height,
            method,
        } => {
            let omega = match omega.resolve() {
                Ok(w) => w,
                Err(msg) => return usage(&msg),
            };
            if qmax < 1 {
                return usage("--qmax must be ≥ 1");
            }
            let spec = model_spec(model, omega, None);
            let band_method = match method {
                MethodArg::Chambers => BandMethod::Chambers,
                MethodArg::Grid => BandMethod::Grid,
            };
            let ds = butterfly::generate_butterfly(&spec, qmax, band_method);
            if !ds.fallback_fluxes.is_empty() {
                eprintln!(
                    "note: grid fallback at {} flux(es)",
                    ds.fallback_fluxes.len()
                );
            }
            let write = if out.extension().is_some_and(|e| e == "json") {
                butterfly::write_json(&ds, &out)
            } else {
                butterfly::write_csv(&ds, &out)
            };
            if let Err(e) = write {
                return numerical(&e);
            }
            if let Some(svg_path) = svg {
                if let Err(e) =
                    butterfly::write_svg(&ds, &svg_path, width, height, &SvgOptions::default())
                {
                    return numerical(&e);
                }
            }
            println!(
                "{} records at {} fluxes written to {}",
                ds.records.len(),
                butterfly::enumerate_fluxes(qmax).len(),
                out.display()
            );
            EXIT_OK
        }

        Command::Verify => match verify::verify_all(seed) {
            Ok(report) => {
                for c in &report.checks {
                    println!(
                        "{}  {:<34} residual {:.3e}  (tol {:.1e})",
                        if c.pass() { "PASS" } else { "FAIL" },
                        c.name,
                        c.residual,
                        c.tolerance
                    );
                }
                if report.pass() {
                    println!("all {} checks passed (seed {seed})", report.checks.len());
                    EXIT_OK
                } else {
                    eprintln!("{} check(s) failed", report.failed().len());
                    EXIT_NUMERICAL
                }
            }
            Err(e) => numerical(&e),
        },

        Command::Semiclassical { grid, h } => {
            if grid < 8 {
                return usage("--grid must be ≥ 8");
            }
            let report = match semiclassical::subprincipal_report(grid) {
                Ok(r) => r,
                Err(e) => return numerical(&e),
            };
            let hull = match semiclassical::effective_band_hull(h, grid) {
                Ok(hl) => hl,
                Err(e) => return numerical(&e),
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            println!(
                "effective_band_hull(h = {h}) = [{:.6e}, {:.6e}]  (first order: [{:.6e}, {:.6e}])",
                hull.0,
                hull.1,
                (-0.75 * h).min(0.0),
                (-0.75 * h).max(0.0)
            );
            let ok = report.max_dh_error < 1e-6
                && report.max_correction_error < 1e-5
                && (report.sigma_min + 0.75).abs() < 0.02
                && report.sigma_max.abs() < 0.02;
            if ok {
                EXIT_OK
            } else {
                eprintln!("semiclassical tolerances violated");
                EXIT_NUMERICAL
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_parses() {
        Cli::command().debug_assert();
    }

    #[test]
    fn omega_pi_sugar() {
        let args = OmegaArgs {
            omega: None,
            omega_pi: Some("1/8".into()),
        };
        assert!((args.resolve().unwrap() - PI / 8.0).abs() < 1e-15);
        let bad = OmegaArgs {
            omega: None,
            omega_pi: Some("x".into()),
        };
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn config_parsing() {
        let dir = std::env::temp_dir().join("butterfly-lab-cfg-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg");
        std::fs::write(&path, "# comment\nseed = 7\nfit_tolerance = 1e-6\n").unwrap();
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.fit_tolerance, Some(1e-6));
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(load_config(&path).is_err());
    }
}
