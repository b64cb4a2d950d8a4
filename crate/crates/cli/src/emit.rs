//! CSV, JSON and SVG writers. Numbers carry 12 significant digits and never
//! depend on the locale.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::scan::{Fig1Row, ScanRecord, SectorLabel};
use crate::CliError;

pub const CSV_HEADER: [&str; 11] =
    ["model", "n", "chi", "delta", "b", "sector", "l", "concurrence", "kind", "energy", "magnetization"];

/// Shortest plain or scientific rendering of `x` rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let body = if (-5..12).contains(&exp) {
        let point = exp + 1;
        if point <= 0 {
            format!("0.{}{digits}", "0".repeat((-point) as usize))
        } else if point as usize >= digits.len() {
            format!("{digits}{}", "0".repeat(point as usize - digits.len()))
        } else {
            format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
        }
    } else if digits.len() == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    if negative { format!("-{body}") } else { body }
}

fn round12(x: f64) -> f64 {
    if x.is_finite() { format_number(x).parse().expect("round trip") } else { x }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn write_csv<W: Write>(records: &[ScanRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            opt(r.chi),
            opt(r.delta),
            format_number(r.b),
            r.sector.as_str().to_string(),
            r.l.to_string(),
            format_number(r.concurrence),
            r.kind.as_str().to_string(),
            format_number(r.energy),
            format_number(r.magnetization),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ScanRecord>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(CliError::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn rounded(r: &ScanRecord) -> ScanRecord {
    ScanRecord {
        chi: r.chi.map(round12),
        delta: r.delta.map(round12),
        b: round12(r.b),
        concurrence: round12(r.concurrence),
        energy: round12(r.energy),
        magnetization: round12(r.magnetization),
        ..r.clone()
    }
}

pub fn write_json<W: Write>(records: &[ScanRecord], mut out: W) -> Result<(), CliError> {
    let rows: Vec<ScanRecord> = records.iter().map(rounded).collect();
    serde_json::to_writer_pretty(&mut out, &rows).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_fig1_csv<W: Write>(rows: &[Fig1Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delta", "c_plus", "c_minus", "c_zero", "magnetization_jump"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.delta, r.c_plus, r.c_minus, r.c_zero, r.magnetization_jump].map(format_number))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// A named curve for [`svg_plot`].
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// Line plot of concurrence against field, one curve per `(sector, l)`.
pub fn scan_series(records: &[ScanRecord]) -> Vec<Series> {
    let mut groups: BTreeMap<(SectorLabel, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        groups.entry((r.sector, r.l)).or_default().push((r.b, r.concurrence));
    }
    groups
        .into_iter()
        .map(|((sector, l), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label: format!("C{l} ({})", sector.as_str()), points, dashed: sector == SectorLabel::Odd }
        })
        .collect()
}

pub fn fig1_series(rows: &[Fig1Row]) -> Vec<Series> {
    let pick = |f: fn(&Fig1Row) -> f64| rows.iter().map(|r| (r.delta, f(r))).collect();
    vec![
        Series { label: "c+".into(), points: pick(|r| r.c_plus), dashed: false },
        Series { label: "c-".into(), points: pick(|r| r.c_minus), dashed: true },
        Series { label: "c0".into(), points: pick(|r| r.c_zero), dashed: false },
        Series { label: "ΔM".into(), points: pick(|r| r.magnetization_jump), dashed: true },
    ]
}

pub fn svg_plot(series: &[Series], x_label: &str, y_label: &str) -> String {
    let (w, h, margin) = (720.0, 480.0, 60.0);
    let all = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    y1 *= 1.05;
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - y / y1 * (h - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = margin,
        t = margin,
        b = h - margin,
        r = w - margin
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y1 * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(fx), h - margin + 18.0, short(fx));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, margin - 6.0, sy(fy) + 4.0, short(fy));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="15" y="{:.1}" transform="rotate(-90 15 {:.1})" text-anchor="middle">{}</text>"#, h / 2.0, h / 2.0, escape(y_label));
    for (k, series) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if series.dashed { r#" stroke-dasharray="6 3""# } else { "" };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, pts.join(" "));
        let ly = margin + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}"{dash}/>"#, w - margin - 110.0, w - margin - 90.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, w - margin - 85.0, ly + 4.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}

fn short(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `<path>.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn write_metadata<T: Serialize>(path: &Path, meta: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(meta).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(sidecar_path(path), text + "\n")?;
    Ok(())
}

/// Writes scan records in `format`, plus the metadata sidecar.
pub fn write_scan<T: Serialize>(path: &Path, format: Format, records: &[ScanRecord], meta: &T) -> Result<(), CliError> {
    let file = || -> Result<_, CliError> { Ok(std::io::BufWriter::new(std::fs::File::create(path)?)) };
    match format {
        Format::Csv => write_csv(records, file()?)?,
        Format::Json => write_json(records, file()?)?,
        Format::Svg => std::fs::write(path, svg_plot(&scan_series(records), "b / v_x", "concurrence"))?,
    }
    write_metadata(path, meta)
}
