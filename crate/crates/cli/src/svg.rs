//! SVG rendering of 2D hulls and probe witnesses. Pure presentation: the
//! drawings are derived from already-computed results and change no verdict.
//!
//! Coordinates are metric: max-times values as-is, exponentials of max-plus
//! values, so the bottom element sits at the origin.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const SWEEP_STEPS: usize = 64;

struct Frame {
    min: f64,
    span: f64,
}

impl Frame {
    fn around(points: impl Iterator<Item = f64>) -> Frame {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for v in points {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Frame {
            min: lo,
            span: (hi - lo).max(1e-9),
        }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.min) / self.span * (SIZE - 2.0 * MARGIN)
    }

    /// SVG y-axis points down; flip.
    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - (v - self.min) / self.span * (SIZE - 2.0 * MARGIN)
    }

    fn scale(&self, v: f64) -> f64 {
        v / self.span * (SIZE - 2.0 * MARGIN)
    }
}

fn header(out: &mut String) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .expect("string writes");
    writeln!(
        out,
        r##"  <rect width="{SIZE}" height="{SIZE}" fill="white" stroke="#ccc"/>"##
    )
    .expect("string writes");
}

fn circle(out: &mut String, f: &Frame, p: &[f64], r: f64, fill: &str) {
    writeln!(
        out,
        r#"  <circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#,
        f.x(p[0]),
        f.y(p[1])
    )
    .expect("string writes");
}

fn cross(out: &mut String, f: &Frame, p: &[f64], color: &str) {
    let (cx, cy) = (f.x(p[0]), f.y(p[1]));
    writeln!(
        out,
        r#"  <path d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}" stroke="{color}" stroke-width="1.6"/>"#,
        cx - 5.0, cy - 5.0, cx + 5.0, cy + 5.0, cx - 5.0, cy + 5.0, cx + 5.0, cy - 5.0
    )
    .expect("string writes");
}

fn polyline(out: &mut String, f: &Frame, pts: &[Vec<f64>], color: &str, dashed: bool) {
    if pts.len() < 2 {
        return;
    }
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(d, "{cmd} {:.2} {:.2} ", f.x(p[0]), f.y(p[1])).expect("string writes");
    }
    let dash = if dashed {
        r#" stroke-dasharray="4 3""#
    } else {
        ""
    };
    writeln!(
        out,
        r#"  <path d="{d}" fill="none" stroke="{color}" stroke-width="1.2"{dash}/>"#
    )
    .expect("string writes");
}

/// The tropical segment between two metric points, as a sampled polyline:
/// both normalization branches of the binary combination.
fn segment(u: &[f64], v: &[f64]) -> Vec<Vec<f64>> {
    let combine = |a: f64, x: &[f64], b: f64, y: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(y)
            .map(|(xc, yc)| (a * xc).max(b * yc))
            .collect()
    };
    let mut pts = Vec::with_capacity(2 * SWEEP_STEPS + 2);
    for k in 0..=SWEEP_STEPS {
        let s = k as f64 / SWEEP_STEPS as f64;
        pts.push(combine(1.0, u, s, v));
    }
    for k in (0..SWEEP_STEPS).rev() {
        let s = k as f64 / SWEEP_STEPS as f64;
        pts.push(combine(s, u, 1.0, v));
    }
    pts
}

/// Hull picture: generator dots, pairwise tropical segments, queries in
/// green (member) or red, with dotted lines to their projections.
pub fn hull_svg(generators: &[Vec<f64>], queries: &[(Vec<f64>, bool, Vec<f64>)]) -> String {
    let frame = Frame::around(
        generators
            .iter()
            .chain(queries.iter().map(|(q, _, _)| q))
            .flat_map(|p| p.iter().copied()),
    );
    let mut out = String::new();
    header(&mut out);
    for (i, u) in generators.iter().enumerate() {
        for v in generators.iter().skip(i + 1) {
            polyline(&mut out, &frame, &segment(u, v), "#9aa7b1", false);
        }
    }
    for g in generators {
        circle(&mut out, &frame, g, 4.0, "#3465a4");
    }
    for (q, member, projection) in queries {
        polyline(
            &mut out,
            &frame,
            &[q.clone(), projection.clone()],
            "#e08030",
            true,
        );
        cross(&mut out, &frame, projection, "#e08030");
        circle(
            &mut out,
            &frame,
            q,
            3.5,
            if *member { "#4e9a06" } else { "#cc0000" },
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Witness picture: the target hull, the image of the probed point, the
/// delta-ball around it, sampled images of the source ball, and the
/// certified unreachable target as a red cross.
pub fn witness_svg(
    target_generators: &[Vec<f64>],
    image: &[f64],
    target: &[f64],
    delta: f64,
    ball_images: &[Vec<f64>],
) -> String {
    let frame = Frame::around(
        target_generators
            .iter()
            .flat_map(|p| p.iter().copied())
            .chain(image.iter().copied())
            .chain(target.iter().copied()),
    );
    let mut out = String::new();
    header(&mut out);
    for (i, u) in target_generators.iter().enumerate() {
        for v in target_generators.iter().skip(i + 1) {
            polyline(&mut out, &frame, &segment(u, v), "#9aa7b1", false);
        }
    }
    for g in target_generators {
        circle(&mut out, &frame, g, 4.0, "#3465a4");
    }
    for p in ball_images {
        circle(&mut out, &frame, p, 1.5, "#8ae234");
    }
    writeln!(
        out,
        r##"  <circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#888" stroke-dasharray="5 4"/>"##,
        frame.x(image[0]),
        frame.y(image[1]),
        frame.scale(delta)
    )
    .expect("string writes");
    circle(&mut out, &frame, image, 4.0, "#204a87");
    cross(&mut out, &frame, target, "#cc0000");
    out.push_str("</svg>\n");
    out
}
