use std::fmt::Write;

use udnorm_core::constructions::PointSeq;
use udnorm_core::udg::DecoratedUdg;

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;

/// Points and unit-distance edges, one hue per color.
pub fn render(points: &PointSeq, g: &DecoratedUdg) -> String {
    let xy: Vec<(f64, f64)> = points.points().iter().map(|p| p.to_f64()).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in &xy {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * PAD) / span;
    let at = |i: usize| (PAD + (xy[i].0 - x0) * scale, SIZE - PAD - (xy[i].1 - y0) * scale);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let k = g.k().max(1) as f64;
    for (&(a, b), &c) in g.edges().iter().zip(g.colors()) {
        let ((ax, ay), (bx, by)) = (at(a - 1), at(b - 1));
        let hue = 360.0 * (c - 1) as f64 / k;
        writeln!(
            s,
            r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="hsl({hue:.0},70%,45%)" stroke-width="1"><title>color {c}</title></line>"#
        )
        .unwrap();
    }
    for i in 0..xy.len() {
        let (x, y) = at(i);
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="black"><title>{}</title></circle>"#, i + 1).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
