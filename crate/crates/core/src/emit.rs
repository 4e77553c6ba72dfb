//! CSV, JSON and SVG output for experiment results.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{CellStats, Curve, CurveRow, HeatCell, Heatmap};
use crate::pipeline::Method;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn heatmap_csv<W: Write>(h: &Heatmap, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        h.x_name.as_str(),
        &h.y_name,
        "mean_ari",
        "std_ari",
        "trials",
        "invalid",
    ])?;
    for c in &h.cells {
        out.write_record([
            c.x.to_string(),
            c.y.to_string(),
            c.stats.mean_ari.to_string(),
            c.stats.std_ari.to_string(),
            c.stats.trials.to_string(),
            c.stats.invalid.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn curve_csv<W: Write>(c: &Curve, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "rho", "mean_ari", "std_ari", "trials"])?;
    for r in &c.rows {
        out.write_record([
            r.method.name().to_string(),
            r.rho.to_string(),
            r.stats.mean_ari.to_string(),
            r.stats.std_ari.to_string(),
            r.stats.trials.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_heatmap_csv(h: &Heatmap, path: &Path) -> Result<()> {
    heatmap_csv(h, create(path)?)
}

pub fn write_curve_csv(c: &Curve, path: &Path) -> Result<()> {
    curve_csv(c, create(path)?)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or(Error::Parse {
        line,
        msg: format!("bad or missing column {i}"),
    })
}

/// Parse a heatmap CSV back. Axis values are recovered from the cells.
pub fn read_heatmap_csv<R: Read>(r: R, method: Method) -> Result<Heatmap> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let mut cells = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        cells.push(HeatCell {
            x: field(&rec, 0, line)?,
            y: field(&rec, 1, line)?,
            stats: CellStats {
                mean_ari: field(&rec, 2, line)?,
                std_ari: field(&rec, 3, line)?,
                trials: field(&rec, 4, line)?,
                invalid: field(&rec, 5, line)?,
            },
        });
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for c in &cells {
        if !xs.contains(&c.x) {
            xs.push(c.x);
        }
        if !ys.contains(&c.y) {
            ys.push(c.y);
        }
    }
    Ok(Heatmap {
        method,
        x_name: headers.get(0).unwrap_or("x").to_string(),
        y_name: headers.get(1).unwrap_or("y").to_string(),
        x_values: xs,
        y_values: ys,
        cells,
    })
}

pub fn read_curve_csv<R: Read>(r: R) -> Result<Curve> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let method: Method = rec
            .get(0)
            .ok_or(Error::Parse {
                line,
                msg: "missing method".into(),
            })?
            .parse()?;
        rows.push(CurveRow {
            method,
            rho: field(&rec, 1, line)?,
            stats: CellStats {
                mean_ari: field(&rec, 2, line)?,
                std_ari: field(&rec, 3, line)?,
                trials: field(&rec, 4, line)?,
                invalid: 0,
            },
        });
    }
    Ok(Curve { rows })
}

/// Viridis anchor colors at 0, 1/8, ..., 1.
const RAMP: [(u8, u8, u8); 9] = [
    (68, 1, 84),
    (71, 44, 122),
    (59, 81, 139),
    (44, 113, 142),
    (33, 144, 141),
    (39, 173, 129),
    (92, 200, 99),
    (170, 220, 50),
    (253, 231, 37),
];

/// Color for a value in `[0, 1]`; values outside are clamped, NaN is gray.
pub fn ramp_color(v: f64) -> String {
    if v.is_nan() {
        return "#bbbbbb".into();
    }
    let t = v.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (t.floor() as usize).min(RAMP.len() - 2);
    let f = t - i as f64;
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    format!("#{:02x}{:02x}{:02x}", lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (0.01..1000.0).contains(&v.abs()) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap of mean ARI: one `rect` per cell, `x` along columns, `y` along
/// rows (first value at the top), each cell annotated with its mean.
pub fn heatmap_svg(h: &Heatmap) -> String {
    const CELL: f64 = 56.0;
    const LEFT: f64 = 90.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 70.0;
    let (nx, ny) = (h.x_values.len(), h.y_values.len());
    let width = LEFT + CELL * nx as f64 + 20.0;
    let height = TOP + CELL * ny as f64 + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-size="14" text-anchor="middle">mean ARI, {}</text>"#,
        width / 2.0,
        escape(h.method.name())
    );
    for c in &h.cells {
        let (Some(ix), Some(iy)) = (
            h.x_values.iter().position(|&v| v == c.x),
            h.y_values.iter().position(|&v| v == c.y),
        ) else {
            continue;
        };
        let x = LEFT + CELL * ix as f64;
        let y = TOP + CELL * iy as f64;
        let m = c.stats.mean_ari;
        let _ = writeln!(
            s,
            r#"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="white"/>"#,
            ramp_color(m)
        );
        let label = if m.is_nan() { "n/a".to_string() } else { format!("{m:.2}") };
        let ink = if m.is_nan() || m > 0.6 { "black" } else { "white" };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" fill="{ink}">{label}</text>"#,
            x + CELL / 2.0,
            y + CELL / 2.0 + 4.0
        );
    }
    for (i, v) in h.x_values.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            LEFT + CELL * (i as f64 + 0.5),
            TOP + CELL * ny as f64 + 16.0,
            tick(*v)
        );
    }
    for (i, v) in h.y_values.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            TOP + CELL * (i as f64 + 0.5) + 4.0,
            tick(*v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
        LEFT + CELL * nx as f64 / 2.0,
        height - 20.0,
        escape(&h.x_name)
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + CELL * ny as f64 / 2.0,
        TOP + CELL * ny as f64 / 2.0,
        escape(&h.y_name)
    );
    s.push_str("</svg>\n");
    s
}

/// Line chart of mean ARI against ρ, one polyline per method.
pub fn curve_svg(c: &Curve) -> String {
    const W: f64 = 520.0;
    const H: f64 = 360.0;
    const L: f64 = 60.0;
    const R: f64 = 150.0;
    const T: f64 = 30.0;
    const B: f64 = 50.0;
    let mut methods: Vec<Method> = Vec::new();
    for r in &c.rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let (lo, hi) = c
        .rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.rho), b.max(r.rho)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let px = |rho: f64| L + (rho - lo) / span * (W - L - R);
    let py = |ari: f64| T + (1.0 - ari.clamp(-0.1, 1.0)) / 1.1 * (H - T - B);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{L}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{L}" y1="{T}" x2="{L}" y2="{}" stroke="black"/>"#,
        H - B,
        W - R,
        H - B,
        H - B
    );
    for v in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{v}</text>"#,
            L - 6.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{}" y="{}" font-size="13" text-anchor="middle">rho</text>"#,
        (L + W - R) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">mean ARI</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0
    );
    for (mi, m) in methods.iter().enumerate() {
        let color = ramp_color(mi as f64 / (methods.len().max(2) - 1) as f64);
        let pts: Vec<String> = c
            .rows
            .iter()
            .filter(|r| r.method == *m && !r.stats.mean_ari.is_nan())
            .map(|r| format!("{:.2},{:.2}", px(r.rho), py(r.stats.mean_ari)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            W - R + 10.0,
            T + 16.0 * mi as f64 + 10.0,
            escape(m.name())
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_text(text: &str, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat(nx: usize, ny: usize) -> Heatmap {
        let xs: Vec<f64> = (0..nx).map(|i| 0.1 * (i + 1) as f64).collect();
        let ys: Vec<f64> = (0..ny).map(|i| i as f64).collect();
        let cells = xs
            .iter()
            .flat_map(|&x| {
                ys.iter().map(move |&y| HeatCell {
                    x,
                    y,
                    stats: CellStats {
                        mean_ari: x / 3.0 + y * 1e-7,
                        std_ari: 1.0 / 3.0,
                        trials: 20,
                        invalid: 0,
                    },
                })
            })
            .collect();
        Heatmap {
            method: Method::SpongeSym,
            x_name: "tau_plus".into(),
            y_name: "tau_minus".into(),
            x_values: xs,
            y_values: ys,
            cells,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        heatmap_csv(&heat(0, 0), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tau_plus,tau_minus,mean_ari,std_ari,trials,invalid\n");
        let mut buf = Vec::new();
        curve_csv(&Curve { rows: vec![] }, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "method,rho,mean_ari,std_ari,trials\n");
    }

    #[test]
    fn heatmap_round_trip() {
        let h = heat(3, 2);
        let mut buf = Vec::new();
        heatmap_csv(&h, &mut buf).unwrap();
        let back = read_heatmap_csv(&buf[..], Method::SpongeSym).unwrap();
        assert_eq!(back.cells.len(), 6);
        for (a, b) in h.cells.iter().zip(&back.cells) {
            assert!((a.stats.mean_ari - b.stats.mean_ari).abs() <= 1e-12);
            assert!((a.stats.std_ari - b.stats.std_ari).abs() <= 1e-12);
            assert_eq!(a.stats.trials, b.stats.trials);
        }
        assert_eq!(back.x_values, h.x_values);
    }

    #[test]
    fn svg_has_one_rect_per_cell() {
        let svg = heatmap_svg(&heat(2, 2));
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains(">tau_plus<") && svg.contains(">tau_minus<"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn ramp_ends() {
        assert_eq!(ramp_color(0.0), "#440154");
        assert_eq!(ramp_color(1.0), "#fde725");
        assert_eq!(ramp_color(f64::NAN), "#bbbbbb");
    }
}
