//! Output helpers: atomic file writes, CSV rendering and small SVG figures.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

/// Fixed six-decimal rendering used in every CSV output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        let s = format!("{x:.6}");
        if s == "-0.000000" {
            "0.000000".into()
        } else {
            s
        }
    }
}

pub fn csv_string<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgOptions {
    /// Omit the generation timestamp so output is byte-stable.
    pub deterministic: bool,
}

const W: f64 = 800.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 120.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(title: &str, opts: SvgOptions) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    if !opts.deterministic {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let _ = writeln!(s, "<!-- generated at unix time {now} -->");
    }
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    s
}

struct Scale {
    lo: f64,
    hi: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>) -> Scale {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Scale { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = (hi - lo) * 0.05;
        Scale { lo: lo - pad, hi: hi + pad }
    }

    fn y(&self, v: f64) -> f64 {
        let v = v.clamp(self.lo, self.hi);
        TOP + (H - TOP - BOTTOM) * (1.0 - (v - self.lo) / (self.hi - self.lo))
    }
}

fn y_axis(s: &mut String, scale: &Scale) {
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        H - BOTTOM
    );
    for k in 0..=4 {
        let v = scale.lo + (scale.hi - scale.lo) * k as f64 / 4.0;
        let y = scale.y(v);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{:.2}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            v
        );
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// One box (quartiles, median, 1.5 IQR whiskers) per group.
pub fn box_plot_svg(title: &str, groups: &[(String, Vec<f64>)], opts: SvgOptions) -> String {
    let scale = Scale::new(groups.iter().flat_map(|(_, v)| v.iter().copied()));
    let mut s = open(title, opts);
    y_axis(&mut s, &scale);
    let slot = (W - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (g, (name, values)) in groups.iter().enumerate() {
        let cx = LEFT + slot * (g as f64 + 0.5);
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        if !v.is_empty() {
            let (q1, med, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
            let iqr = q3 - q1;
            let lo = v.iter().copied().find(|&x| x >= q1 - 1.5 * iqr).unwrap_or(q1);
            let hi = v.iter().rev().copied().find(|&x| x <= q3 + 1.5 * iqr).unwrap_or(q3);
            let bw = slot * 0.6;
            let fill = if name.starts_with("shadow") { "#4c72b0" } else { "#55a868" };
            let _ = writeln!(
                s,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                scale.y(hi),
                scale.y(lo)
            );
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{bw:.2}" height="{:.2}" fill="{fill}" stroke="black"/>"#,
                cx - bw / 2.0,
                scale.y(q3),
                (scale.y(q1) - scale.y(q3)).max(0.5)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
                cx - bw / 2.0,
                scale.y(med),
                cx + bw / 2.0,
                scale.y(med)
            );
        }
        let ty = H - BOTTOM + 10.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{ty:.2}" text-anchor="end" transform="rotate(-60 {cx:.2} {ty:.2})">{}</text>"#,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Equal-width histogram of the finite values.
pub fn histogram_svg(title: &str, values: &[f64], bins: usize, opts: SvgOptions) -> String {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let bins = bins.max(1);
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (lo, hi) = if v.is_empty() { (0.0, 1.0) } else if hi - lo < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let mut counts = vec![0usize; bins];
    for &x in &v {
        let b = (((x - lo) / (hi - lo)) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let scale = Scale { lo: 0.0, hi: counts.iter().copied().max().unwrap_or(0).max(1) as f64 };
    let mut s = open(title, opts);
    y_axis(&mut s, &scale);
    let bw = (W - LEFT - RIGHT) / bins as f64;
    for (b, &c) in counts.iter().enumerate() {
        let x = LEFT + bw * b as f64;
        let y = scale.y(c as f64);
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{bw:.2}" height="{:.2}" fill="#4c72b0" stroke="white"/>"##,
            H - BOTTOM - y
        );
    }
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let x = LEFT + (W - LEFT - RIGHT) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.3}</text>"#,
            H - BOTTOM + 16.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Vertical bars from zero; `shade` in [0, 1] sets each bar's colour.
pub fn bar_chart_svg(title: &str, bars: &[(String, f64, f64)], opts: SvgOptions) -> String {
    let scale = Scale::new(bars.iter().map(|b| b.1).chain(std::iter::once(0.0)));
    let mut s = open(title, opts);
    y_axis(&mut s, &scale);
    let slot = (W - LEFT - RIGHT) / bars.len().max(1) as f64;
    let zero = scale.y(0.0);
    for (k, (name, value, shade)) in bars.iter().enumerate() {
        let x = LEFT + slot * k as f64 + slot * 0.1;
        let y = scale.y(*value);
        let t = shade.clamp(0.0, 1.0);
        let (r, g, b) = (
            (215.0 - 150.0 * t) as u8,
            (48.0 + 120.0 * t) as u8,
            (39.0 + 60.0 * t) as u8,
        );
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
            y.min(zero),
            slot * 0.8,
            (y - zero).abs()
        );
        let cx = x + slot * 0.4;
        let ty = H - BOTTOM + 10.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{ty:.2}" text-anchor="end" transform="rotate(-60 {cx:.2} {ty:.2})">{}</text>"#,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, b"a").unwrap();
        write_atomic(&p, b"bb").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"bb");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.25), "0.250000");
        assert_eq!(fmt_f64(-1e-9), "0.000000");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let s = csv_string(&["a", "b"], vec![vec!["x,y".into(), "1".into()]]);
        assert_eq!(s, "a,b\n\"x,y\",1\n");
    }

    #[test]
    fn svg_timestamp_only_when_not_deterministic() {
        let groups = vec![("f".to_string(), vec![1.0, 2.0, 3.0])];
        let det = box_plot_svg("t", &groups, SvgOptions { deterministic: true });
        assert!(!det.contains("<!--"));
        assert_eq!(det, box_plot_svg("t", &groups, SvgOptions { deterministic: true }));
        assert!(box_plot_svg("t", &groups, SvgOptions::default()).contains("<!-- generated"));
        assert!(histogram_svg("h", &[1.0, 2.0, 2.5], 4, SvgOptions { deterministic: true }).ends_with("</svg>\n"));
        assert!(bar_chart_svg("b", &[("a".into(), -1.0, 0.3)], SvgOptions { deterministic: true }).contains("rect"));
    }
}
