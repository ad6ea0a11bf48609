//! Quasi-random sampling inside pieces and sampled Lipschitz constants.

use super::{PieceRealization, PieceResult, Vertex};
use crate::hyp_core::{dist, midpoint, IdealPoint, UhpPoint};

/// Radical inverse of `i` in base `b` (Halton sequence).
pub fn halton(mut i: u64, b: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `n` deterministic points of the piece, drawn from a Halton sequence in a
/// box around the finite part with heights log-uniform up to `clip` times the
/// tallest finite vertex.
pub fn sample_points(real: &PieceRealization, n: usize, clip: f64) -> Vec<UhpPoint> {
    let (xmin, xmax, ymax) = real.finite_extent();
    let has_inf = real.vertices.iter().any(|v| matches!(v, Vertex::Ideal(IdealPoint::Infinity)));
    let width = (xmax - xmin).max(1e-6);
    let ylo = real.vertices.iter().filter_map(|v| v.finite()).map(|p| p.y).fold(f64::INFINITY, f64::min).min(width) * 1e-2;
    let yhi = if has_inf { ymax.max(1.0) * clip } else { ymax.max(ylo) };
    let (la, lb) = (ylo.ln(), yhi.ln());
    let mut out = Vec::with_capacity(n);
    let mut i = 1u64;
    while out.len() < n && i < 200 * n as u64 + 1000 {
        let x = xmin + width * halton(i, 2);
        let y = (la + (lb - la) * halton(i, 3)).exp();
        i += 1;
        let p = UhpPoint::raw(x, y);
        if real.contains(p, 0.0) {
            out.push(p);
        }
    }
    out
}

/// Largest ratio `d(f p, f q) / d(p, q)` over all pairs of `pts`.
pub fn sampled_lipschitz<F>(pts: &[UhpPoint], f: F) -> PieceResult<f64>
where
    F: Fn(UhpPoint) -> PieceResult<UhpPoint>,
{
    let imgs = pts.iter().map(|&p| f(p)).collect::<PieceResult<Vec<_>>>()?;
    Ok(lipschitz_on_pairs(pts.iter().copied().zip(imgs.iter().copied()).collect::<Vec<_>>().as_slice(), |i, j| (i, j)))
}

/// Sampled constants of `f`, of `g` and of the map sending `p` to the
/// midpoint of `f(p)` and `g(p)`.
pub fn midpoint_average_constants<F, G>(pts: &[UhpPoint], f: F, g: G) -> PieceResult<(f64, f64, f64)>
where
    F: Fn(UhpPoint) -> PieceResult<UhpPoint>,
    G: Fn(UhpPoint) -> PieceResult<UhpPoint>,
{
    let fi = pts.iter().map(|&p| f(p)).collect::<PieceResult<Vec<_>>>()?;
    let gi = pts.iter().map(|&p| g(p)).collect::<PieceResult<Vec<_>>>()?;
    let mi: Vec<UhpPoint> = fi.iter().zip(&gi).map(|(&a, &b)| midpoint(a, b)).collect();
    let lip = |img: &[UhpPoint]| lipschitz_on_pairs(&pts.iter().copied().zip(img.iter().copied()).collect::<Vec<_>>(), |i, j| (i, j));
    Ok((lip(&fi), lip(&gi), lip(&mi)))
}

/// Largest ratio over the pairs of `(point, image)` selected by `pair` for every
/// `i < j`.
fn lipschitz_on_pairs(data: &[(UhpPoint, UhpPoint)], pair: impl Fn(usize, usize) -> (usize, usize)) -> f64 {
    let mut best: f64 = 0.0;
    for j in 0..data.len() {
        for i in 0..j {
            let (a, b) = pair(i, j);
            let d = dist(data[a].0, data[b].0);
            if d > 1e-9 {
                best = best.max(dist(data[a].1, data[b].1) / d);
            }
        }
    }
    best
}

/// Ratio on explicit pairs `(p, q, f p, f q)`.
pub fn pair_ratio_max(pairs: &[(UhpPoint, UhpPoint, UhpPoint, UhpPoint)]) -> f64 {
    pairs
        .iter()
        .filter(|(p, q, ..)| dist(*p, *q) > 1e-9)
        .map(|(p, q, fp, fq)| dist(*fp, *fq) / dist(*p, *q))
        .fold(0.0, f64::max)
}
