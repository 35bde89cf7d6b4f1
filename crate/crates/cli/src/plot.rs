//! Log-log SVG of a sweep CSV: δλ√T against N for the encoded probe and the
//! baseline columns, with dashed reference slopes.

use std::fmt::Write;

use crate::error::{invalid, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;

struct Series {
    column: &'static str,
    label: &'static str,
    colour: &'static str,
}

const SERIES: [Series; 4] = [
    Series { column: "delta_lambda_sqrtT", label: "encoded", colour: "#1f77b4" },
    Series { column: "baseline_classical", label: "classical", colour: "#2ca02c" },
    Series { column: "baseline_parallel", label: "parallel quantum", colour: "#9467bd" },
    Series { column: "baseline_transversal", label: "transversal", colour: "#d62728" },
];

const GUIDES: [(f64, &str); 3] = [(-1.0, "slope -1"), (-0.5, "slope -1/2"), (-5.0 / 6.0, "slope -5/6")];

fn column(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header.iter().position(|h| h == name).ok_or_else(|| invalid(format!("sweep CSV has no `{name}` column")))
}

/// Renders the plot from the CSV text written by `sweep`.
pub fn sweep_svg(csv_text: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let bad = |e: csv::Error| invalid(format!("bad sweep CSV: {e}"));
    let header = reader.headers().map_err(bad)?.clone();
    let n_col = column(&header, "N")?;
    let cols: Vec<usize> = SERIES.iter().map(|s| column(&header, s.column)).collect::<Result<_>>()?;

    let mut xs = Vec::new();
    let mut ys: Vec<Vec<f64>> = vec![Vec::new(); SERIES.len()];
    for record in reader.records() {
        let record = record.map_err(bad)?;
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| invalid(format!("bad sweep CSV row {record:?}")))
        };
        xs.push(parse(n_col)?.log10());
        for (k, &c) in cols.iter().enumerate() {
            ys[k].push(parse(c)?.log10());
        }
    }
    if xs.is_empty() {
        return Err(invalid("sweep CSV has no rows"));
    }

    let finite = |v: &f64| v.is_finite();
    let (x_lo, x_hi) = bounds(xs.iter().copied().filter(finite));
    let (y_lo, y_hi) = bounds(ys.iter().flatten().copied().filter(finite));
    let px = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for d in (x_lo.ceil() as i32)..=(x_hi.floor() as i32) {
        let x = px(d as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{MARGIN}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"##,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 18.0
        );
    }
    for d in (y_lo.ceil() as i32)..=(y_hi.floor() as i32) {
        let y = py(d as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            WIDTH - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">N</text>"#, WIDTH / 2.0, HEIGHT - 20.0);
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">δλ√T</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    // Guides start from the first encoded point.
    let anchor = xs.iter().zip(&ys[0]).find(|(x, y)| x.is_finite() && y.is_finite());
    if let Some((&x0, &y0)) = anchor {
        for (k, (slope, label)) in GUIDES.iter().enumerate() {
            let y1 = y0 + slope * (x_hi - x0);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="{}"/>"##,
                px(x0),
                py(y0),
                px(x_hi),
                py(y1).clamp(0.0, HEIGHT),
                ["6,4", "2,3", "10,3,2,3"][k]
            );
            let _ = writeln!(
                svg,
                r##"<text x="{:.2}" y="{:.2}" fill="#555">{label}</text>"##,
                WIDTH - MARGIN + 4.0,
                py(y1).clamp(MARGIN, HEIGHT - MARGIN)
            );
        }
    }

    for (k, s) in SERIES.iter().enumerate() {
        let points: Vec<String> = xs
            .iter()
            .zip(&ys[k])
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            points.join(" "),
            s.colour
        );
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            MARGIN + 10.0,
            MARGIN + 30.0,
            s.colour,
            MARGIN + 36.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "N,m,gamma,t_opt,f_per_t,delta_lambda_sqrtT,baseline_parallel,baseline_classical,baseline_transversal,heisenberg_retention,flags\n\
1,5,1e0,1e0,1e0,1e0,1e0,1e0,1e0,1e0,\n\
100,5,1e0,1e0,1e0,1e-2,1e-1,1e-1,2e-2,1e0,\n";

    #[test]
    fn renders_all_series_and_guides() {
        let svg = sweep_svg(CSV).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        for (_, label) in GUIDES {
            assert!(svg.contains(label));
        }
        assert_eq!(svg, sweep_svg(CSV).unwrap());
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(sweep_svg("a,b\n1,2\n").is_err());
    }
}
