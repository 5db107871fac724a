//! Hofstadter-butterfly datasets: band records over all reduced fluxes
//! p/q ∈ [0,1] with q ≤ qmax, plus CSV/JSON/SVG emitters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use crate::bands::{self, BandMethod};
use crate::error::{Error, Result};
use crate::flux::FluxRational;
use crate::lattice::ModelSpec;

/// One band at one flux; `flat` bands have lo = hi and multiplicity ≥ 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ButterflyRecord {
    pub p: i64,
    pub q: i64,
    pub flux_fraction: f64,
    pub band_index: usize,
    pub lo: f64,
    pub hi: f64,
    pub flat: bool,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ButterflyDataset {
    pub model: ModelSpec,
    pub qmax: i64,
    /// Sorted by (q, p, band_index); deterministic regardless of schedule.
    pub records: Vec<ButterflyRecord>,
    /// Fluxes where the Chambers path failed and the grid fallback was used.
    pub fallback_fluxes: Vec<FluxRational>,
}

/// All reduced p/q ∈ [0,1] with q ≤ qmax, sorted by (q, p).
pub fn enumerate_fluxes(qmax: i64) -> Vec<FluxRational> {
    let mut out = vec![
        FluxRational::new(0, 1).unwrap(),
        FluxRational::new(1, 1).unwrap(),
    ];
    for q in 2..=qmax {
        for p in 1..q {
            if gcd(p, q) == 1 {
                out.push(FluxRational::new(p, q).unwrap());
            }
        }
    }
    out.sort_by_key(|f| (f.q(), f.p()));
    out
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Grid resolution used when a flux falls back from Chambers to sampling.
const FALLBACK_GRID: usize = 33;

pub fn generate_butterfly(
    model: &ModelSpec,
    qmax: i64,
    method: BandMethod,
) -> ButterflyDataset {
    let fluxes = enumerate_fluxes(qmax);
    let mut results: Vec<(FluxRational, Result<crate::bands::BandStructure>, bool)> = fluxes
        .par_iter()
        .map(|&flux| {
            match method {
                BandMethod::Chambers => match bands::bands_direct(model, flux) {
                    Ok(bs) => (flux, Ok(bs), false),
                    Err(_) => (flux, bands::bands_from_grid(model, flux, FALLBACK_GRID), true),
                },
                BandMethod::Grid => (flux, bands::bands_from_grid(model, flux, FALLBACK_GRID), false),
            }
        })
        .collect();
    results.sort_by_key(|(flux, _, _)| (flux.q(), flux.p()));

    let mut records = Vec::new();
    let mut fallback_fluxes = Vec::new();
    for (flux, bs, fell_back) in results {
        // grid fallback itself cannot fail except for backend errors, which
        // would leave a hole in the dataset; treat that as unreachable in
        // practice but skip defensively.
        let Ok(bs) = bs else { continue };
        if fell_back {
            fallback_fluxes.push(flux);
        }
        for (band_index, band) in bs.bands.iter().enumerate() {
            records.push(ButterflyRecord {
                p: flux.p(),
                q: flux.q(),
                flux_fraction: flux.fraction(),
                band_index,
                lo: band.lo,
                hi: band.hi,
                flat: band.flat,
                multiplicity: band.multiplicity,
            });
        }
    }
    ButterflyDataset {
        model: *model,
        qmax,
        records,
        fallback_fluxes,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// 12 significant digits, scientific; fixed format keeps output byte-stable.
fn fmt12(x: f64) -> String {
    format!("{:.11e}", x)
}

pub fn csv_string(ds: &ButterflyDataset) -> String {
    let mut out = String::from("p,q,flux,band_index,lambda_min,lambda_max,flat,multiplicity\n");
    for r in &ds.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.p,
            r.q,
            fmt12(r.flux_fraction),
            r.band_index,
            fmt12(r.lo),
            fmt12(r.hi),
            r.flat,
            r.multiplicity
        );
    }
    out
}

pub fn write_csv(ds: &ButterflyDataset, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(ds)).map_err(io_err(path))
}

pub fn json_string(ds: &ButterflyDataset) -> String {
    // serde_json writes struct fields in declaration order, so this is
    // byte-deterministic for a fixed dataset
    let mut s = serde_json::to_string_pretty(ds).expect("dataset serializes");
    s.push('\n');
    s
}

pub fn write_json(ds: &ButterflyDataset, path: &Path) -> Result<()> {
    std::fs::write(path, json_string(ds)).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy)]
pub struct SvgOptions {
    /// Override the default stroke width max(0.3, plot_height/(2·qmax²)).
    pub stroke_width: Option<f64>,
    pub flat_dot_radius: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            stroke_width: None,
            flat_dot_radius: 0.8,
        }
    }
}

/// Hand-emitted standalone SVG: one horizontal segment per band at height
/// p/q, flat bands as dots, axes labeled λ and γ/2π. All coordinates use a
/// fixed 4-decimal format so output is byte-deterministic.
pub fn render_svg(ds: &ButterflyDataset, width: f64, height: f64, options: &SvgOptions) -> String {
    let (ml, mr, mt, mb) = (46.0, 14.0, 14.0, 38.0);
    let pw = (width - ml - mr).max(1.0);
    let ph = (height - mt - mb).max(1.0);
    let bound = ds.model.spectral_bound();
    let stroke = options
        .stroke_width
        .unwrap_or_else(|| (ph / (2.0 * (ds.qmax * ds.qmax) as f64)).max(0.3));

    let x = |lambda: f64| ml + (lambda + bound) / (2.0 * bound) * pw;
    let y = |frac: f64| mt + (1.0 - frac) * ph;
    let c = |v: f64| format!("{:.4}", v);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        c(width), c(height), c(width), c(height)
    );
    let _ = writeln!(svg, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>", c(width), c(height));

    // axes
    let _ = writeln!(
        svg,
        "<path d=\"M {} {} L {} {} L {} {}\" stroke=\"black\" stroke-width=\"1\" fill=\"none\"/>",
        c(ml), c(mt), c(ml), c(mt + ph), c(ml + pw), c(mt + ph)
    );
    for (lambda, label) in [(-bound, format!("{}", -bound)), (0.0, "0".to_string()), (bound, format!("{}", bound))] {
        let _ = writeln!(
            svg,
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\" stroke-width=\"1\"/>",
            x0 = c(x(lambda)), y0 = c(mt + ph), y1 = c(mt + ph + 4.0)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            c(x(lambda)), c(mt + ph + 15.0), label
        );
    }
    for (frac, label) in [(0.0, "0"), (0.5, "1/2"), (1.0, "1")] {
        let _ = writeln!(
            svg,
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\" stroke-width=\"1\"/>",
            x0 = c(ml - 4.0), x1 = c(ml), y0 = c(y(frac))
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>",
            c(ml - 7.0), c(y(frac) + 3.0), label
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">λ</text>",
        c(ml + pw / 2.0), c(mt + ph + 30.0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">γ/2π</text>",
        c(14.0), c(mt + ph / 2.0), c(14.0), c(mt + ph / 2.0)
    );

    // band segments, one path per flux row
    let mut i = 0;
    while i < ds.records.len() {
        let (p, q) = (ds.records[i].p, ds.records[i].q);
        let yy = y(ds.records[i].flux_fraction);
        let mut d = String::new();
        let mut dots = String::new();
        while i < ds.records.len() && ds.records[i].p == p && ds.records[i].q == q {
            let r = &ds.records[i];
            if r.flat {
                let _ = write!(
                    dots,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>",
                    c(x(r.lo)), c(yy), c(options.flat_dot_radius)
                );
            } else {
                let _ = write!(d, "M {} {} L {} {} ", c(x(r.lo)), c(yy), c(x(r.hi)), c(yy));
            }
            i += 1;
        }
        if !d.is_empty() {
            let _ = writeln!(
                svg,
                "<path d=\"{}\" stroke=\"black\" stroke-width=\"{}\" fill=\"none\"/>",
                d.trim_end(), c(stroke)
            );
        }
        if !dots.is_empty() {
            let _ = writeln!(svg, "{}", dots);
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(
    ds: &ButterflyDataset,
    path: &Path,
    width: f64,
    height: f64,
    options: &SvgOptions,
) -> Result<()> {
    std::fs::write(path, render_svg(ds, width, height, options)).map_err(io_err(path))
}
