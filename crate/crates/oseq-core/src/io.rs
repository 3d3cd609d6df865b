//! Exact dataset persistence and minimal deterministic plot output.
//!
//! Counts travel as plain-decimal CSV (`d,O_d[,A_d]`) so files diff cleanly
//! against published data and round-trip exactly.  Plot series are two-column
//! text files, optionally rendered as a self-contained SVG line chart.  Every
//! emitter produces identical bytes for identical input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::BigCount;

/// Writes the count table as `d,O_d[,A_d]` CSV with plain-decimal integers.
pub fn emit_od_csv(path: &Path, o: &[BigCount], a: Option<&[BigCount]>) -> Result<()> {
    if o.is_empty() {
        return Err(Error::Domain("refusing to emit an empty table".into()));
    }
    if let Some(a) = a {
        if a.len() != o.len() {
            return Err(Error::Domain(format!(
                "increment column has {} entries but counts have {}",
                a.len(),
                o.len()
            )));
        }
    }
    let mut out = String::new();
    match a {
        Some(a) => {
            out.push_str("d,O_d,A_d\n");
            for (i, (ov, av)) in o.iter().zip(a).enumerate() {
                let _ = writeln!(out, "{},{ov},{av}", i + 1);
            }
        }
        None => {
            out.push_str("d,O_d\n");
            for (i, ov) in o.iter().enumerate() {
                let _ = writeln!(out, "{},{ov}", i + 1);
            }
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(e, path))
}

/// Reads a `d,O_d[,A_d]` CSV back as exact integers.
///
/// The header row is optional; multiplicities must start at 1 and increase by
/// one (gaps, duplicates, and reordering are rejected), and every value must
/// be a plain decimal integer.  Errors carry the offending 1-based line
/// number.
pub fn ingest_reference(path: &Path) -> Result<(Vec<BigCount>, Option<Vec<BigCount>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(e, path))?;
    let fail = |line: usize, msg: String| Error::Format {
        path: path.display().to_string(),
        line,
        msg,
    };

    let mut o = Vec::new();
    let mut a: Option<Vec<BigCount>> = None;
    let mut cols = 0usize;
    let mut expected_d = 1u32;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line_no == 1 {
            match line {
                "d,O_d" => {
                    cols = 2;
                    continue;
                }
                "d,O_d,A_d" => {
                    cols = 3;
                    a = Some(Vec::new());
                    continue;
                }
                _ => {}
            }
        }
        if line.is_empty() {
            return Err(fail(line_no, "empty line".into()));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if cols == 0 {
            cols = fields.len();
            if cols == 3 {
                a = Some(Vec::new());
            }
        }
        if cols != 2 && cols != 3 {
            return Err(fail(
                line_no,
                format!("expected 2 or 3 comma-separated fields, found {cols}"),
            ));
        }
        if fields.len() != cols {
            return Err(fail(
                line_no,
                format!("expected {cols} fields, found {}", fields.len()),
            ));
        }
        let d: u32 = fields[0]
            .parse()
            .map_err(|_| fail(line_no, format!("bad multiplicity {:?}", fields[0])))?;
        if d != expected_d {
            return Err(fail(
                line_no,
                format!("expected d = {expected_d}, found {d} (gap, duplicate, or disorder)"),
            ));
        }
        expected_d += 1;
        let parse_big = |s: &str| {
            BigCount::parse_bytes(s.as_bytes(), 10)
                .ok_or_else(|| fail(line_no, format!("{s:?} is not a plain decimal integer")))
        };
        o.push(parse_big(fields[1])?);
        if let Some(a) = a.as_mut() {
            a.push(parse_big(fields[2])?);
        }
    }
    if o.is_empty() {
        return Err(fail(1, "no data rows".into()));
    }
    Ok((o, a))
}

/// Writes a plot series as a two-column `d,<name>` text file.  Values use the
/// shortest round-trip decimal form, so output is deterministic and exact.
pub fn emit_series(path: &Path, name: &str, series: &[(u32, f64)]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Domain("refusing to emit an empty series".into()));
    }
    let mut out = String::new();
    let _ = writeln!(out, "d,{name}");
    for &(d, v) in series {
        let _ = writeln!(out, "{d},{v}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(e, path))
}

/// One named polyline of a chart.
#[derive(Clone, Debug)]
pub struct PlotSeries {
    pub name: String,
    /// Any SVG color string, e.g. `"#1b6ca8"` or `"black"`.
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: &str, color: &str, points: Vec<(f64, f64)>) -> Self {
        PlotSeries {
            name: name.to_owned(),
            color: color.to_owned(),
            points,
        }
    }
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 500.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 52.0;

/// Renders series as a single-file SVG line chart: axes with five ticks per
/// side, light horizontal gridlines, a legend, and one polyline per series.
/// Output bytes are a pure function of the input.
pub fn render_svg_chart(path: &Path, title: &str, series: &[PlotSeries]) -> Result<()> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(Error::Domain("refusing to render an empty chart".into()));
    }
    let finite = series
        .iter()
        .flat_map(|s| &s.points)
        .all(|&(x, y)| x.is_finite() && y.is_finite());
    if !finite {
        return Err(Error::Domain("chart points must be finite".into()));
    }

    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &(x, y) in series.iter().flat_map(|s| &s.points) {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if xmax == xmin {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if ymax == ymin {
        let pad = (ymax.abs() * 0.1).max(1.0);
        ymin -= pad;
        ymax += pad;
    } else {
        let pad = (ymax - ymin) * 0.05;
        ymin -= pad;
        ymax += pad;
    }

    let pw = SVG_W - MARGIN_L - MARGIN_R;
    let ph = SVG_H - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * pw;
    let py = |y: f64| MARGIN_T + (ymax - y) / (ymax - ymin) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_W} {SVG_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r##"<rect width="{SVG_W}" height="{SVG_H}" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        SVG_W / 2.0,
        xml_escape(title)
    );

    // Gridlines, ticks, and labels; five per axis, endpoints included.
    for i in 0..5 {
        let f = f64::from(i) / 4.0;
        let yv = ymin + (ymax - ymin) * f;
        let yp = py(yv);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_L:.2}" y1="{yp:.2}" x2="{:.2}" y2="{yp:.2}" stroke="#dddddd"/>"##,
            MARGIN_L + pw
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_L - 8.0,
            yp + 4.0,
            fmt_tick(yv)
        );
        let xv = xmin + (xmax - xmin) * f;
        let xp = px(xv);
        let _ = writeln!(
            svg,
            r#"<line x1="{xp:.2}" y1="{:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph + 20.0,
            fmt_tick(xv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_L:.2}" y1="{MARGIN_T:.2}" x2="{MARGIN_L:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN_T + ph
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_L:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN_T + ph,
        MARGIN_L + pw,
        MARGIN_T + ph
    );

    for s in series {
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let _ = write!(pts, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            xml_escape(&s.color),
            pts.trim_end()
        );
        if s.points.len() == 1 {
            let (x, y) = s.points[0];
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                px(x),
                py(y),
                xml_escape(&s.color)
            );
        }
    }

    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_T + 10.0 + 16.0 * i as f64;
        let x = MARGIN_L + pw - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="1.5"/>"#,
            x + 24.0,
            xml_escape(&s.color)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 30.0,
            y + 4.0,
            xml_escape(&s.name)
        );
    }

    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| Error::io(e, path))
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e6 || v.abs() < 1e-3) {
        return format!("{v:.3e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigCount> {
        v.iter().map(|&x| BigCount::from(x)).collect()
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("od.csv");
        let mut o = big(&[1, 1, 2, 3, 5]);
        o.push(BigCount::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap());
        let a = big(&[0, 0, 1, 1, 2, 3]);

        emit_od_csv(&path, &o, Some(&a)).unwrap();
        let (o2, a2) = ingest_reference(&path).unwrap();
        assert_eq!(o2, o);
        assert_eq!(a2.as_deref(), Some(&a[..]));

        emit_od_csv(&path, &o, None).unwrap();
        let (o3, a3) = ingest_reference(&path).unwrap();
        assert_eq!(o3, o);
        assert!(a3.is_none());
    }

    #[test]
    fn headerless_two_column_input_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.csv");
        std::fs::write(&path, "1,1\n2,1\n3,2\n").unwrap();
        let (o, a) = ingest_reference(&path).unwrap();
        assert_eq!(o, big(&[1, 1, 2]));
        assert!(a.is_none());
    }

    #[test]
    fn malformed_rows_are_rejected_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let line_of = |content: &str| {
            std::fs::write(&path, content).unwrap();
            match ingest_reference(&path) {
                Err(Error::Format { line, .. }) => line,
                other => panic!("expected a format error, got {other:?}"),
            }
        };
        assert_eq!(line_of("d,O_d\n1,1\n3,2\n"), 3); // gap
        assert_eq!(line_of("1,1\n1,1\n"), 2); // duplicate
        assert_eq!(line_of("1,2.5\n"), 1); // not an integer
        assert_eq!(line_of("d,O_d\n1,1,0\n"), 2); // arity mismatch
        assert_eq!(line_of("1,1\n\n2,1\n"), 2); // interior blank
        assert_eq!(line_of("d,O_d\n"), 1); // no data
        assert_eq!(line_of("1,-4\n"), 1); // negative
    }

    #[test]
    fn series_files_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("s1.csv");
        let p2 = dir.path().join("s2.csv");
        let series = vec![(1u32, 0.0), (2, 0.5), (3, 1.0 / 3.0)];
        emit_series(&p1, "value", &series).unwrap();
        emit_series(&p2, "value", &series).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        let text = std::fs::read_to_string(&p1).unwrap();
        assert!(text.starts_with("d,value\n1,0\n"));
        assert!(emit_series(&p1, "value", &[]).is_err());
    }

    #[test]
    fn svg_chart_is_deterministic_and_survives_constants() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("c1.svg");
        let p2 = dir.path().join("c2.svg");
        let series = vec![
            PlotSeries::new("flat", "black", vec![(1.0, 2.0), (10.0, 2.0)]),
            PlotSeries::new("rise & run", "#1b6ca8", vec![(1.0, 0.0), (10.0, 5.0)]),
        ];
        render_svg_chart(&p1, "test <chart>", &series).unwrap();
        render_svg_chart(&p2, "test <chart>", &series).unwrap();
        let bytes = std::fs::read(&p1).unwrap();
        assert_eq!(bytes, std::fs::read(&p2).unwrap());
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("<svg "));
        assert!(text.contains("polyline"));
        assert!(text.contains("rise &amp; run"));
        assert!(text.contains("test &lt;chart&gt;"));

        assert!(render_svg_chart(&p1, "empty", &[]).is_err());
        let nan = vec![PlotSeries::new("bad", "red", vec![(1.0, f64::NAN)])];
        assert!(render_svg_chart(&p1, "nan", &nan).is_err());
    }
}
