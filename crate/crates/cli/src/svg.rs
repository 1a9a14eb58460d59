//! Static SVG scatter of `xi_0`, `xi_1`, `xi_2` over the grade grid.

use std::fmt::Write as _;

use bigraded::BettiTable;

const CELL: f64 = 56.0;
const MARGIN: f64 = 48.0;
const LEGEND: f64 = 150.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

fn marker(out: &mut String, j: usize, cx: f64, cy: f64) {
    let c = COLORS[j];
    match j {
        0 => writeln!(out, r#"<circle cx="{cx:.1}" cy="{cy:.1}" r="7" fill="{c}"/>"#),
        1 => writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="13" height="13" fill="{c}"/>"#,
            cx - 6.5,
            cy - 6.5
        ),
        _ => writeln!(
            out,
            r#"<polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{c}"/>"#,
            cx,
            cy - 8.0,
            cx - 7.5,
            cy + 6.0,
            cx + 7.5,
            cy + 6.0
        ),
    }
    .unwrap();
}

/// Renders the table on a grid covering `[0,s1] x [0,s2]` and every listed grade.
pub fn render(table: &BettiTable, bounds: (usize, usize), title: &str) -> String {
    let mut sx = bounds.0 as i64;
    let mut sy = bounds.1 as i64;
    for b in &table.beta {
        for (g, _) in b.iter() {
            sx = sx.max(g.x);
            sy = sy.max(g.y);
        }
    }
    let width = 2.0 * MARGIN + CELL * sx as f64 + LEGEND;
    let height = 2.0 * MARGIN + CELL * sy as f64 + 24.0;
    let px = |x: i64| MARGIN + CELL * x as f64;
    let py = |y: i64| MARGIN + 24.0 + CELL * (sy - y) as f64;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title)).unwrap();
    for x in 0..=sx {
        writeln!(
            out,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#ddd"/>"##,
            px(x),
            py(0),
            py(sy)
        )
        .unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#, px(x), py(0) + 20.0).unwrap();
    }
    for y in 0..=sy {
        writeln!(
            out,
            r##"<line x1="{1:.1}" y1="{0:.1}" x2="{2:.1}" y2="{0:.1}" stroke="#ddd"/>"##,
            py(y),
            px(0),
            px(sx)
        )
        .unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y}</text>"#, px(0) - 14.0, py(y) + 4.0).unwrap();
    }
    // markers sharing a grade are fanned out horizontally
    let offsets = [-14.0, 0.0, 14.0];
    for (j, b) in table.beta.iter().enumerate() {
        for (g, m) in b.iter() {
            let (cx, cy) = (px(g.x) + offsets[j], py(g.y));
            writeln!(out, "<g><title>xi_{j} at ({},{}): {m}</title>", g.x, g.y).unwrap();
            marker(&mut out, j, cx, cy);
            if m > 1 {
                writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{m}</text>"#, cx, cy - 10.0).unwrap();
            }
            writeln!(out, "</g>").unwrap();
        }
    }
    let lx = px(sx) + 40.0;
    for j in 0..3 {
        let ly = MARGIN + 30.0 + 24.0 * j as f64;
        marker(&mut out, j, lx, ly);
        writeln!(out, r#"<text x="{:.1}" y="{:.1}">xi_{j}</text>"#, lx + 14.0, ly + 4.0).unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
