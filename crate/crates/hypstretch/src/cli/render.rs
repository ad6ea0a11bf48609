//! SVG drawings of developed pieces in the upper half-plane.

use crate::hyp_core::{IdealPoint, Isometry, UhpPoint};
use crate::pieces::{foliation, special_points, LeafCoord, Piece, PieceResult, Vertex};
use crate::surface::Surface;
use std::collections::VecDeque;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub foliation: bool,
    /// Top of the drawn window; chosen from the developed vertices when absent.
    pub clip: Option<f64>,
    pub width_px: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { foliation: false, clip: None, width_px: 900.0 }
    }
}

/// Developing maps of a breadth-first spanning tree of the dual graph,
/// rooted at the first piece.
pub fn layout(s: &Surface) -> Vec<Isometry> {
    let mut maps: Vec<Option<Isometry>> = vec![None; s.pieces.len()];
    let mut queue = VecDeque::new();
    for root in 0..s.pieces.len() {
        if maps[root].is_some() {
            continue;
        }
        maps[root] = Some(Isometry::identity());
        queue.push_back(root);
        while let Some(p) = queue.pop_front() {
            let m = maps[p].expect("queued pieces are placed");
            for e in &s.realization(p).edges {
                let Some(other) = s.partner((p, e.label)) else { continue };
                let q = other.slot.0;
                if maps[q].is_none() {
                    if let Ok(g) = s.gluing_map((p, e.label)) {
                        maps[q] = Some(m.compose(&g));
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    maps.into_iter().map(|m| m.unwrap_or_else(Isometry::identity)).collect()
}

fn num(x: f64) -> String {
    let v = format!("{x:.6}");
    if v == "-0.000000" {
        "0.000000".into()
    } else {
        v
    }
}

struct Canvas {
    x0: f64,
    x1: f64,
    clip: f64,
    body: String,
}

impl Canvas {
    fn span(&self) -> f64 {
        self.x1 - self.x0
    }

    fn end(&self, v: Vertex, other_x: f64) -> (f64, f64) {
        match v {
            Vertex::Finite(p) => (p.x, p.y),
            Vertex::Ideal(IdealPoint::Finite(x)) => (x, 0.0),
            Vertex::Ideal(IdealPoint::Infinity) => (other_x, 2.0 * self.clip),
        }
    }

    /// Geodesic segment between two vertices.
    fn segment(&mut self, a: Vertex, b: Vertex, class: &str) {
        let ax = match a {
            Vertex::Ideal(IdealPoint::Infinity) => None,
            v => Some(self.end(v, 0.0).0),
        };
        let bx = match b {
            Vertex::Ideal(IdealPoint::Infinity) => None,
            v => Some(self.end(v, 0.0).0),
        };
        let (p, q) = (self.end(a, bx.unwrap_or(0.0)), self.end(b, ax.unwrap_or(0.0)));
        let vertical = ax.is_none() || bx.is_none() || (p.0 - q.0).abs() < 1e-12 * self.span().max(1.0);
        if vertical {
            let _ = writeln!(self.body, r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#, num(p.0), num(-p.1), num(q.0), num(-q.1));
            return;
        }
        let c = (q.0 * q.0 + q.1 * q.1 - p.0 * p.0 - p.1 * p.1) / (2.0 * (q.0 - p.0));
        let r = ((p.0 - c).powi(2) + p.1 * p.1).sqrt();
        let sweep = u8::from(p.0 < q.0);
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="M {} {} A {} {} 0 0 {sweep} {} {}"/>"#,
            num(p.0),
            num(-p.1),
            num(r),
            num(r),
            num(q.0),
            num(-q.1)
        );
    }

    fn tick(&mut self, x: f64) {
        let h = 0.02 * self.span();
        let _ = writeln!(self.body, r#"<line class="ideal" x1="{}" y1="0" x2="{}" y2="{}"/>"#, num(x), num(x), num(-h));
    }

    fn mark(&mut self, p: UhpPoint, name: &str, class: &str) {
        let r = 0.006 * self.span();
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{}" cy="{}" r="{}"/>"#, num(p.x), num(-p.y), num(r));
        if !name.is_empty() {
            let _ = writeln!(
                self.body,
                r#"<text x="{}" y="{}" font-size="{}">{name}</text>"#,
                num(p.x + 1.5 * r),
                num(-p.y - 1.5 * r),
                num(0.025 * self.span())
            );
        }
    }

    fn polyline(&mut self, pts: &[UhpPoint], class: &str) {
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p.x), num(-p.y))).collect();
        let _ = writeln!(self.body, r#"<polyline class="{class}" points="{}"/>"#, coords.join(" "));
    }
}

fn extent(s: &Surface, maps: &[Isometry]) -> (f64, f64, f64) {
    let (mut x0, mut x1, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for (p, m) in maps.iter().enumerate() {
        for v in &s.realization(p).vertices {
            match v.apply(m) {
                Vertex::Finite(q) => {
                    x0 = x0.min(q.x - q.y);
                    x1 = x1.max(q.x + q.y);
                    ymax = ymax.max(q.y);
                }
                Vertex::Ideal(IdealPoint::Finite(x)) => {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                }
                Vertex::Ideal(IdealPoint::Infinity) => {}
            }
        }
    }
    if !x0.is_finite() {
        (x0, x1) = (-1.0, 1.0);
    }
    let pad = 0.08 * (x1 - x0).max(1.0);
    (x0 - pad, x1 + pad, ymax)
}

fn foliation_leaves(p: &Piece, real: &crate::pieces::PieceRealization) -> PieceResult<Vec<Vec<UhpPoint>>> {
    let f = foliation(p)?;
    let mut out = Vec::new();
    for (i, sector) in f.sectors.iter().enumerate() {
        for k in 0..6 {
            let leaf = LeafCoord { sector: i, d: sector.bound + 0.4 * k as f64 };
            if let Ok(pts) = f.leaf_samples(real, leaf, 40) {
                out.push(pts);
            }
        }
    }
    Ok(out)
}

/// Deterministic SVG of the developed pieces, their leaves and marked points.
pub fn render_svg(s: &Surface, opts: &RenderOptions) -> String {
    let maps = layout(s);
    let (x0, x1, ymax) = extent(s, &maps);
    let clip = opts.clip.unwrap_or_else(|| (1.5 * ymax).max(0.6 * (x1 - x0)));
    let mut cv = Canvas { x0, x1, clip, body: String::new() };
    for (p, m) in maps.iter().enumerate() {
        let real = s.realization(p);
        let _ = writeln!(cv.body, r#"<g id="piece-{}" data-kind="{}">"#, s.ids[p], s.pieces[p].kind_name());
        if opts.foliation {
            if let Ok(leaves) = foliation_leaves(&s.pieces[p], real) {
                for pts in leaves {
                    let img: Vec<UhpPoint> = pts.iter().map(|&q| m.apply(q)).collect();
                    cv.polyline(&img, "horocycle");
                }
            }
        }
        for e in &real.edges {
            let class = if e.label.is_leaf() { "leaf" } else { "arc" };
            cv.segment(real.vertices[e.start].apply(m), real.vertices[e.end].apply(m), class);
        }
        for v in &real.vertices {
            if let Vertex::Ideal(IdealPoint::Finite(x)) = v.apply(m) {
                cv.tick(x);
            }
        }
        if let Ok(sp) = special_points(&s.pieces[p]) {
            for (name, q) in &sp.points {
                cv.mark(m.apply(*q), name, "special");
            }
        }
        let _ = writeln!(cv.body, "</g>");
    }
    let w = x1 - x0;
    let h_px = (opts.width_px * clip / w).clamp(100.0, 4.0 * opts.width_px);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}" preserveAspectRatio="none">"#,
        num(opts.width_px),
        num(h_px),
        num(x0),
        num(-clip),
        num(w),
        num(clip)
    );
    out.push_str(
        "<style>path,line,polyline{fill:none;vector-effect:non-scaling-stroke}.leaf{stroke:#b2182b;stroke-width:2}\
         .arc{stroke:#2166ac;stroke-width:1.5}.ideal{stroke:#000;stroke-width:1}.horocycle{stroke:#4d9221;stroke-width:0.8}\
         .special{fill:#000}text{font-family:sans-serif}</style>\n",
    );
    let _ = writeln!(out, r#"<line class="ideal" x1="{}" y1="0" x2="{}" y2="0"/>"#, num(x0), num(x1));
    out.push_str(&cv.body);
    out.push_str("</svg>\n");
    out
}
