//! SVG output of an approximation in the equilateral embedding.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fractal::FractalApprox;
use crate::geometry::{embedding_side, simplex, to_cartesian, BaryPoint, CartPoint, Tri};

pub const MIN_SIZE_PX: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub width_px: u32,
    pub height_px: u32,
    /// Fill per piece level, cycled when shorter than the level count.
    /// Empty means the graded default.
    pub palette: Vec<String>,
    pub show_residual: bool,
    pub show_labels: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width_px: 800,
            height_px: 720,
            palette: Vec::new(),
            show_residual: true,
            show_labels: false,
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        if self.width_px < MIN_SIZE_PX || self.height_px < MIN_SIZE_PX {
            return Err(Error::Style(format!(
                "viewport {}x{} is below the {MIN_SIZE_PX}px minimum",
                self.width_px, self.height_px
            )));
        }
        Ok(())
    }

    fn fill(&self, level: u32, levels: u32) -> String {
        if !self.palette.is_empty() {
            return self.palette[(level as usize - 1) % self.palette.len()].clone();
        }
        graded_hue(level, levels)
    }
}

/// Hue runs from deep blue at level 1 towards red at the last level.
fn graded_hue(level: u32, levels: u32) -> String {
    let t = if levels <= 1 {
        0.0
    } else {
        f64::from(level - 1) / f64::from(levels - 1)
    };
    format!("hsl({:.1},70%,55%)", 230.0 * (1.0 - t))
}

/// Affine map from the planar embedding to pixel coordinates, y pointing down.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub scale: f64,
    pub offset_x: f64,
    pub offset_y: f64,
}

impl Viewport {
    pub fn fit(width: u32, height: u32) -> Viewport {
        let (w, h) = (f64::from(width), f64::from(height));
        let margin = 0.05 * w.min(h);
        let side = embedding_side();
        let scale = ((w - 2.0 * margin) / side).min(h - 2.0 * margin);
        Viewport {
            scale,
            offset_x: (w - scale * side) / 2.0,
            offset_y: (h + scale) / 2.0,
        }
    }

    pub fn to_pixel(&self, p: CartPoint) -> CartPoint {
        CartPoint {
            x: self.offset_x + self.scale * p.x,
            y: self.offset_y - self.scale * p.y,
        }
    }

    pub fn to_unit(&self, q: CartPoint) -> CartPoint {
        CartPoint {
            x: (q.x - self.offset_x) / self.scale,
            y: (self.offset_y - q.y) / self.scale,
        }
    }
}

fn points_attr(vp: &Viewport, vertices: [&BaryPoint; 3]) -> String {
    vertices
        .iter()
        .map(|v| {
            let q = vp.to_pixel(to_cartesian(v));
            format!("{:.9},{:.9}", q.x, q.y)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn centroid_px(vp: &Viewport, t: &Tri) -> CartPoint {
    let c = t.vertices().map(|v| vp.to_pixel(to_cartesian(v)));
    CartPoint {
        x: (c[0].x + c[1].x + c[2].x) / 3.0,
        y: (c[0].y + c[1].y + c[2].y) / 3.0,
    }
}

/// Renders every kept piece, the residual when requested, and the outline
/// of the simplex. Output depends only on the inputs.
pub fn render_svg(approx: &FractalApprox, style: &RenderStyle) -> Result<String> {
    style.validate()?;
    let (w, h) = (style.width_px, style.height_px);
    let vp = Viewport::fit(w, h);
    let levels = approx.level();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-scale="{:.12}" data-offset-x="{:.12}" data-offset-y="{:.12}">"#,
        vp.scale, vp.offset_x, vp.offset_y
    );
    let _ = writeln!(
        out,
        "<!-- spaghetti-core {} level={} policy={} -->",
        env!("CARGO_PKG_VERSION"),
        levels,
        approx.policy().spec()
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="0.5" stroke-linejoin="round">"#
    );
    for piece in approx.pieces() {
        let _ = writeln!(
            out,
            r#"<polygon data-role="piece" data-level="{}" fill="{}" points="{}"/>"#,
            piece.level,
            style.fill(piece.level, levels),
            points_attr(&vp, piece.triangle.vertices())
        );
    }
    if style.show_residual {
        let _ = writeln!(
            out,
            r##"<polygon data-role="residual" fill="#bbbbbb" points="{}"/>"##,
            points_attr(&vp, approx.residual().vertices())
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<polygon data-role="outline" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
        points_attr(&vp, simplex().vertices())
    );
    if style.show_labels {
        let font = (vp.scale / 30.0).max(6.0);
        for piece in approx.pieces() {
            let c = centroid_px(&vp, &piece.triangle);
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="{:.1}" text-anchor="middle" dominant-baseline="middle">T{}</text>"#,
                c.x,
                c.y,
                font / f64::from(piece.level),
                piece.level
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
