//! CSV and SVG geometry dumps.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

pub type Point = Vector3<f64>;

/// One row of a geometry dump.
pub struct Row {
    pub point: Point,
    /// Source direction(s), already formatted.
    pub source: String,
    pub flags: Vec<&'static str>,
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }
}

/// Shortest round-trip form, with an exponent for very large or small values.
fn exact(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "NaN".into())
}

pub fn write_csv(path: &Path, dim: usize, rows: &[Row]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x", "y"];
    if dim == 2 {
        header.push("z");
    }
    header.extend(["source_theta", "flags"]);
    let with_t = rows.iter().any(|r| r.t.is_some());
    if with_t {
        header.push("t");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![exact(r.point.x), exact(r.point.y)];
        if dim == 2 {
            rec.push(exact(r.point.z));
        }
        rec.push(r.source.clone());
        rec.push(r.flags.join("|"));
        if with_t {
            rec.push(r.t.map(exact).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

/// Something to draw: a closed polyline or a cloud of markers.
pub enum Shape {
    Closed { class: &'static str, points: Vec<Point> },
    Markers { class: &'static str, points: Vec<Point>, size: f64 },
}

impl Shape {
    fn points(&self) -> &[Point] {
        match self {
            Shape::Closed { points, .. } | Shape::Markers { points, .. } => points,
        }
    }
}

fn num(x: f64) -> String {
    // 9 significant digits keeps files small and stable
    let s = format!("{x:.9e}");
    s.parse::<f64>().map(|v| (v + 0.0).to_string()).unwrap_or(s)
}

/// Plane figure with y pointing up and a 1-unit margin around all shapes.
pub fn svg(shapes: &[Shape]) -> String {
    let (mut lo, mut hi) = (Point::repeat(f64::INFINITY), Point::repeat(f64::NEG_INFINITY));
    for p in shapes.iter().flat_map(|s| s.points()) {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if !lo.x.is_finite() {
        lo = Point::zeros();
        hi = Point::zeros();
    }
    let (x0, y0) = (lo.x - 1.0, -hi.y - 1.0);
    let (w, h) = (hi.x - lo.x + 2.0, hi.y - lo.y + 2.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    for shape in shapes {
        let mut d = String::new();
        match shape {
            Shape::Closed { class, points } => {
                for (i, p) in points.iter().enumerate() {
                    let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(p.x), num(-p.y));
                }
                d.push('Z');
                let _ = writeln!(
                    out,
                    r#"  <path class="{class}" d="{}" fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke"/>"#,
                    d.trim_end()
                );
            }
            Shape::Markers { class, points, size } => {
                let s = num(*size);
                for p in points {
                    let _ = write!(
                        d,
                        "M{} {} h{s} v{s} h-{s} Z ",
                        num(p.x - size / 2.0),
                        num(-p.y - size / 2.0)
                    );
                }
                let _ = writeln!(out, r#"  <path class="{class}" d="{}" fill="red" stroke="none"/>"#, d.trim_end());
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
