//! SVG pictures of solved instances: every grid vertex is drawn as its
//! Voronoi cell, cells of set members filled.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid_graph::{GridSpec, VertexId};
use crate::mis::IndependentSet;

pub type Polygon = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    pub cell_fill_in_set: String,
    pub cell_fill_out: String,
    pub stroke_width: f64,
    /// Width of the picture in pixels, at least 64.
    pub canvas_width: u32,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            cell_fill_in_set: "#1f3a93".into(),
            cell_fill_out: "#d9d9d9".into(),
            stroke_width: 1.0,
            canvas_width: 800,
        }
    }
}

impl RenderStyle {
    fn check(&self) -> Result<()> {
        if self.canvas_width < 64 {
            return Err(Error::InvalidConfig(format!(
                "canvas width must be at least 64, got {}",
                self.canvas_width
            )));
        }
        if !(self.stroke_width >= 0.0 && self.stroke_width.is_finite()) {
            return Err(Error::InvalidConfig(
                "stroke width must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Voronoi cell of grid point `v` in Cartesian coordinates, counter-clockwise.
///
/// The cell is a hexagon, or a rectangle when the grid steps are
/// orthogonal. It is computed from a Gauss-reduced basis of the grid
/// lattice, so it lies inside the circumdisks of the triangles around `v`
/// for every angle in range.
pub fn hexagon_cell(spec: &GridSpec, v: VertexId) -> Result<Polygon> {
    if v.i >= spec.n() || v.j >= spec.m() {
        return Err(Error::VertexOutOfRange {
            index: v.i * spec.m() + v.j,
            count: spec.vertex_count(),
        });
    }
    let diameter = 2.0 * spec.circumradius();
    if diameter >= 1.0 || diameter.is_nan() {
        return Err(Error::CircumradiusHypothesis { diameter });
    }
    let t = spec.torus();
    let centre = t.to_cartesian(v.i as f64 / spec.n() as f64, v.j as f64 / spec.m() as f64);
    let cell = lattice_cell(
        t.to_cartesian(1.0 / spec.n() as f64, 0.0),
        t.to_cartesian(0.0, 1.0 / spec.m() as f64),
    );
    if cell.len() < 3 {
        return Err(Error::InvalidGrid("degenerate Voronoi cell".into()));
    }
    Ok(cell
        .into_iter()
        .map(|p| [p[0] + centre[0], p[1] + centre[1]])
        .collect())
}

/// Voronoi cell of the origin in the lattice spanned by `a` and `b`.
fn lattice_cell(a: [f64; 2], b: [f64; 2]) -> Polygon {
    let (a, b) = gauss_reduce(a, b);
    let h = norm(a) + norm(b);
    let mut poly = vec![[-h, -h], [h, -h], [h, h], [-h, h]];
    for s in -2i32..=2 {
        for t in -2i32..=2 {
            if s == 0 && t == 0 {
                continue;
            }
            let w = [
                s as f64 * a[0] + t as f64 * b[0],
                s as f64 * a[1] + t as f64 * b[1],
            ];
            // keep p with p.w <= |w|^2 / 2
            poly = clip(&poly, w, dot(w, w) / 2.0);
        }
    }
    dedup(poly, 1e-12 * h)
}

fn gauss_reduce(mut a: [f64; 2], mut b: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    loop {
        if dot(a, a) > dot(b, b) {
            std::mem::swap(&mut a, &mut b);
        }
        let mu = (dot(a, b) / dot(a, a)).round();
        if mu == 0.0 {
            return (a, b);
        }
        b = [b[0] - mu * a[0], b[1] - mu * a[1]];
    }
}

/// Sutherland-Hodgman step: the part of convex `poly` where `p . w <= c`.
fn clip(poly: &[[f64; 2]], w: [f64; 2], c: f64) -> Polygon {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let fp = dot(p, w) - c;
        let fq = dot(q, w) - c;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let s = fp / (fp - fq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out
}

fn dedup(poly: Polygon, eps: f64) -> Polygon {
    let mut out: Polygon = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last().is_none_or(|q| dist(*q, p) > eps) {
            out.push(p);
        }
    }
    while out.len() > 1 && dist(out[0], *out.last().unwrap()) <= eps {
        out.pop();
    }
    out
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    norm([a[0] - b[0], a[1] - b[1]])
}

/// Signed shoelace area; positive for counter-clockwise polygons.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        s += p[0] * q[1] - q[0] * p[1];
    }
    s / 2.0
}

/// Pieces of a cell folded back into the fundamental parallelogram, in
/// Cartesian coordinates. Their areas add up to the cell area.
pub fn wrapped_cell(spec: &GridSpec, v: VertexId) -> Result<Vec<Polygon>> {
    let t = spec.torus();
    let affine: Polygon = hexagon_cell(spec, v)?
        .into_iter()
        .map(|p| t.to_affine(p))
        .collect();
    let mut pieces = Vec::new();
    for dx in -1i32..=1 {
        for dy in -1i32..=1 {
            let mut p: Polygon = affine
                .iter()
                .map(|q| [q[0] + dx as f64, q[1] + dy as f64])
                .collect();
            for (w, c) in [
                ([1.0, 0.0], 1.0),
                ([-1.0, 0.0], 0.0),
                ([0.0, 1.0], 1.0),
                ([0.0, -1.0], 0.0),
            ] {
                if p.is_empty() {
                    break;
                }
                p = clip(&p, w, c);
            }
            let p = dedup(p, 1e-12);
            if p.len() >= 3 && polygon_area(&p).abs() > 1e-14 {
                pieces.push(p.into_iter().map(|q| t.to_cartesian(q[0], q[1])).collect());
            }
        }
    }
    Ok(pieces)
}

/// Placement of the parallelogram on the canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    /// Pixels per unit length.
    pub scale: f64,
    pub width: f64,
    pub height: f64,
    margin: f64,
    x_min: f64,
    y_max: f64,
}

impl Layout {
    pub fn new(spec: &GridSpec, style: &RenderStyle) -> Self {
        let t = spec.torus();
        let v2 = t.v2();
        let x_min = v2[0].min(0.0);
        let x_max = t.l1() + v2[0].max(0.0);
        let y_max = v2[1];
        let margin = style.stroke_width;
        let width = style.canvas_width as f64;
        let scale = (width - 2.0 * margin) / (x_max - x_min);
        Layout {
            scale,
            width,
            height: (y_max * scale + 2.0 * margin).ceil(),
            margin,
            x_min,
            y_max,
        }
    }

    /// Canvas position of a Cartesian point; the y axis points down.
    pub fn to_canvas(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.margin + (p[0] - self.x_min) * self.scale,
            self.margin + (self.y_max - p[1]) * self.scale,
        ]
    }
}

/// Writes an SVG document with one `<path class="cell ...">` per vertex;
/// members carry the class `in` and the in-set fill.
pub fn render_solution<W: Write>(
    spec: &GridSpec,
    s: &IndependentSet,
    style: &RenderStyle,
    sink: &mut W,
) -> Result<()> {
    style.check()?;
    if s.len() != spec.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: spec.vertex_count(),
            found: s.len(),
        });
    }
    let layout = Layout::new(spec, style);
    let mut doc = String::new();
    doc.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    doc.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = layout.width,
        h = layout.height
    ));
    doc.push_str(&format!(
        "<g stroke=\"#ffffff\" stroke-width=\"{}\" stroke-linejoin=\"round\">\n",
        style.stroke_width
    ));
    for index in 0..spec.vertex_count() {
        let v = spec.vertex(index)?;
        let member = s.contains(index);
        let (class, fill) = if member {
            ("cell in", &style.cell_fill_in_set)
        } else {
            ("cell out", &style.cell_fill_out)
        };
        let mut d = String::new();
        for piece in wrapped_cell(spec, v)? {
            for (k, p) in piece.iter().enumerate() {
                let c = layout.to_canvas(*p);
                d.push_str(if k == 0 { "M" } else { " L" });
                d.push_str(&format!("{:.4} {:.4}", c[0], c[1]));
            }
            d.push_str(" Z ");
        }
        doc.push_str(&format!(
            "<path class=\"{class}\" data-vertex=\"{} {}\" fill=\"{fill}\" d=\"{}\"/>\n",
            v.i,
            v.j,
            d.trim_end()
        ));
    }
    doc.push_str("</g>\n</svg>\n");
    sink.write_all(doc.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::FlatTorus;

    fn spec(l1: f64, l2: f64, deg: f64, n: usize, m: usize) -> GridSpec {
        GridSpec::new(FlatTorus::from_degrees(l1, l2, deg).unwrap(), n, m).unwrap()
    }

    #[test]
    fn right_angle_cells_are_squares() {
        let s = spec(2.0, 2.0, 90.0, 8, 8);
        let cell = hexagon_cell(&s, VertexId::new(3, 5)).unwrap();
        assert_eq!(cell.len(), 4);
        for k in 0..4 {
            let e = dist(cell[k], cell[(k + 1) % 4]);
            assert!((e - 0.25).abs() < 1e-12);
        }
        assert!((polygon_area(&cell) - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn equilateral_cells_are_regular_hexagons() {
        let s = spec(3.331, 3.331, 60.0, 10, 10);
        let r = s.circumradius();
        let v = VertexId::new(2, 7);
        let centre = s.point(v);
        let c = s.torus().to_cartesian(centre.x(), centre.y());
        let cell = hexagon_cell(&s, v).unwrap();
        assert_eq!(cell.len(), 6);
        for p in &cell {
            assert!((dist(*p, c) - r).abs() < 1e-12);
        }
    }

    #[test]
    fn cell_area_is_share_of_torus() {
        for (l1, l2, deg, n, m) in [
            (2.8, 5.2, 25.0, 8, 14),
            (3.4, 3.4, 60.0, 7, 9),
            (4.0, 2.2, 80.0, 11, 5),
        ] {
            let s = spec(l1, l2, deg, n, m);
            let want = s.torus().area() / (n * m) as f64;
            let got = polygon_area(&hexagon_cell(&s, VertexId::new(0, 0)).unwrap());
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
            let wrapped: f64 = (0..n * m)
                .flat_map(|k| wrapped_cell(&s, s.vertex(k).unwrap()).unwrap())
                .map(|p| polygon_area(&p))
                .sum();
            assert!((wrapped - s.torus().area()).abs() < 1e-9);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let s = spec(3.331, 3.331, 60.0, 2, 2);
        assert!(matches!(
            hexagon_cell(&s, VertexId::new(0, 0)),
            Err(Error::CircumradiusHypothesis { .. })
        ));
    }

    #[test]
    fn svg_shape() {
        let s = spec(3.331, 3.331, 60.0, 5, 4);
        let set = IndependentSet::from_members(20, [0, 7]).unwrap();
        let mut out = Vec::new();
        render_solution(&s, &set, &RenderStyle::default(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("<svg").count(), 1);
        assert!(text.contains("viewBox"));
        assert_eq!(text.matches("<path class=\"cell").count(), 20);
        assert_eq!(text.matches("class=\"cell in\"").count(), 2);

        let mut again = Vec::new();
        render_solution(&s, &set, &RenderStyle::default(), &mut again).unwrap();
        assert_eq!(text.as_bytes(), &again[..]);
    }

    #[test]
    fn small_canvas_rejected() {
        let s = spec(3.331, 3.331, 60.0, 5, 4);
        let style = RenderStyle {
            canvas_width: 63,
            ..RenderStyle::default()
        };
        let mut out = Vec::new();
        assert!(render_solution(&s, &IndependentSet::empty(20), &style, &mut out).is_err());
    }
}
