//! Deterministic SVG pictures of rank-one and rank-two apartments.
//!
//! All coordinates are printed with three decimals so output is stable
//! byte for byte.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::apartment::ApartmentPoint;
use crate::error::{Error, Result};
use crate::galois_types::{frobenius_invariant, type_from_s_mu, GaloisType};
use crate::iwahori_weyl::{AffineWeylElement, IwahoriWeyl};
use crate::lattice;
use crate::rootdata::{GammaData, RootDatum};

/// Layout constants.
mod style {
    pub const LINE_SCALE: f64 = 400.0;
    pub const A2_SCALE: f64 = 500.0;
    pub const ADM_SCALE: f64 = 100.0;
    pub const SQRT3_2: f64 = 0.866;
    pub const H: f64 = 1.732;
    pub const SMALL_NODE: f64 = 4.0;
    pub const LARGE_NODE: f64 = 6.0;
    pub const VERTEX_DOT: f64 = 2.5;
    pub const GREEN: &str = "#00ff00";
    pub const RED: &str = "#ff0000";
    pub const WHITE: &str = "#ffffff";
    pub const GRAY: &str = "#808080";
    pub const SHADE_OPACITY: &str = "0.15";
    pub const ADM_OPACITY: &str = "0.09";
    /// Wall colors indexed by the type of the opposite vertex.
    pub const WALL: [&str; 3] = ["rgb(240,0,0)", "rgb(240,0,240)", "rgb(0,0,240)"];
    /// Subdivision drawn when `e` exceeds [`DRAW_CAP`].
    pub const REPRESENTATIVE_GRID: u64 = 36;
    pub const DRAW_CAP: u64 = 200;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Rank1Line,
    Rank2A2,
    AdmissibleA2,
}

impl FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl2" | "rank1_line" | "line" => Ok(FigureKind::Rank1Line),
            "genericity" | "rank2_a2" | "a2" => Ok(FigureKind::Rank2A2),
            "adm" | "admissible" | "admissible_a2" => Ok(FigureKind::AdmissibleA2),
            _ => Err(Error::Invalid(format!("unknown figure kind {s:?}"))),
        }
    }
}

/// A labelled point, in ambient coordinates of the drawn group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mark {
    pub eta: Vec<BigRational>,
    pub label: String,
}

impl Mark {
    /// Slot `j`, `GL` factor `comp` of `x`.
    pub fn from_point(rd: &RootDatum, x: &ApartmentPoint, j: usize, comp: usize) -> Result<Self> {
        let slot = x.eta.get(j).ok_or_else(|| Error::Dimension(format!("no slot {j}")))?;
        let c = rd.components.get(comp).ok_or_else(|| Error::Dimension(format!("no component {comp}")))?;
        let amb = rd.to_ambient_q(slot);
        let n = c.factor.n;
        Ok(Mark { eta: amb[c.ambient_offset..c.ambient_offset + n].to_vec(), label: String::new() })
    }
}

#[derive(Clone, Debug)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub p: u64,
    pub e: u64,
    pub marks: Vec<Mark>,
    pub shading_depth: i64,
    /// Alcoves `w̃·C` to shade; `Adm(mu)` when `None`.
    pub highlight: Option<Vec<AffineWeylElement>>,
    pub mu: Vec<i64>,
}

impl FigureSpec {
    pub fn sl2(p: u64, e: u64) -> Self {
        FigureSpec { kind: FigureKind::Rank1Line, p, e, marks: Vec::new(), shading_depth: 0, highlight: None, mu: Vec::new() }
    }

    /// The `A_2` apartment at `p` with `⌊p/3⌋` nested shades.
    pub fn genericity(p: u64, e: u64) -> Self {
        let shading_depth = (p / 3) as i64;
        FigureSpec { kind: FigureKind::Rank2A2, p, e, marks: Vec::new(), shading_depth, highlight: None, mu: Vec::new() }
    }

    /// `p = 19`, `e = 36`, marked with the second `GL_3` factor of the
    /// point attached to `s = ((123),(12))`, `μ = ((16,11,7),(4,2,1))`,
    /// translated by `(1,1,0)`.
    pub fn genericity_example() -> Result<Self> {
        let rd: RootDatum = "GL3xGL3".parse()?;
        let psi = rd.cyclic_factor_shift()?;
        let g = GammaData::new(&rd, 19, 19u64.pow(4) - 1, 4, psi, lattice::identity(6))?;
        let s = rd.weyl_from_cycles("((123),(12))")?;
        let wt = type_from_s_mu(&rd, &s, &[16, 11, 7, 4, 2, 1], &g)?;
        let mut m = Mark::from_point(&rd, &wt.x, 0, 1)?;
        for (k, t) in [1, 1, 0].iter().enumerate() {
            m.eta[k] += BigRational::from_integer((*t).into());
        }
        m.label = "x".into();
        let mut spec = Self::genericity(19, 36);
        spec.marks.push(m);
        Ok(spec)
    }

    pub fn admissible(mu: &[i64]) -> Self {
        FigureSpec { kind: FigureKind::AdmissibleA2, p: 0, e: 1, marks: Vec::new(), shading_depth: 0, highlight: None, mu: mu.to_vec() }
    }
}

/// Classification of a node on the `SL_2` base alcove.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeColor {
    /// Not in the orbit of `o`.
    White,
    /// Classifies a Frobenius-invariant type.
    Green,
    Red,
}

impl NodeColor {
    fn fill(self) -> &'static str {
        match self {
            NodeColor::White => style::WHITE,
            NodeColor::Green => style::GREEN,
            NodeColor::Red => style::RED,
        }
    }
}

/// Node `n ∈ [0, e]` sits at `o + (n/2e)(1,-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub n: u64,
    /// `λ` with `x = u^λ·o`, when the node is in the orbit.
    pub lambda: Option<i64>,
    pub color: NodeColor,
}

fn smallest_r(p: u64, e: u64) -> Result<u32> {
    let mut q = p % e;
    for r in 1..=24 {
        if q == 1 % e {
            return Ok(r);
        }
        q = (q as u128 * p as u128 % e as u128) as u64;
    }
    Err(Error::InvalidGamma(format!("e = {e} divides no p^r - 1 with r ≤ 24")))
}

/// Colors of the nodes `0..=e` of the `SL_2` base alcove.
pub fn sl2_nodes(p: u64, e: u64) -> Result<Vec<Node>> {
    if e > style::DRAW_CAP {
        return Err(Error::CapExceeded { what: format!("e = {e} nodes"), cap: style::DRAW_CAP });
    }
    let rd: RootDatum = "SL2".parse()?;
    let r = smallest_r(p, e)?;
    let g = GammaData::split(&rd, p, e, r)?;
    (0..=e)
        .map(|n| {
            // e·(x - o) = (n/2)(1,-1) must be a cocharacter
            if n % 2 == 1 {
                return Ok(Node { n, lambda: None, color: NodeColor::White });
            }
            let lambda = -((n / 2) as i64);
            let t = GaloisType::from_fixed(&rd, &g, &[lambda])?;
            let color = if frobenius_invariant(&rd, &g, &t)?.is_some() { NodeColor::Green } else { NodeColor::Red };
            Ok(Node { n, lambda: Some(lambda), color })
        })
        .collect()
}

fn f(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        f(w),
        f(h),
        f(w),
        f(h)
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, f(w), f(h));
}

fn text(out: &mut String, x: f64, y: f64, size: u32, s: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="serif" font-size="{size}" text-anchor="middle">{}</text>"#,
        f(x),
        f(y),
        escape(s)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polygon(out: &mut String, pts: &[(f64, f64)], attrs: &str) {
    let p: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", f(*x), f(*y))).collect();
    let _ = writeln!(out, r#"<polygon points="{}" {attrs}/>"#, p.join(" "));
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), attrs: &str) {
    let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {attrs}/>"#, f(a.0), f(a.1), f(b.0), f(b.1));
}

fn circle(out: &mut String, c: (f64, f64), r: f64, attrs: &str) {
    let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}" {attrs}/>"#, f(c.0), f(c.1), f(r));
}

/// Renders the figure as an SVG document.
pub fn render(spec: &FigureSpec) -> Result<String> {
    match spec.kind {
        FigureKind::Rank1Line => render_line(spec),
        FigureKind::Rank2A2 => render_a2(spec),
        FigureKind::AdmissibleA2 => render_admissible(spec),
    }
}

fn render_line(spec: &FigureSpec) -> Result<String> {
    let nodes = sl2_nodes(spec.p, spec.e)?;
    let s = style::LINE_SCALE;
    let map = |x: f64, y: f64| ((x + 0.2) * s, (0.2 - y) * s);
    let mut out = String::new();
    header(&mut out, 1.4 * s, 0.4 * s);
    line(&mut out, map(0.0, 0.0), map(1.0, 0.0), r#"stroke="black" stroke-width="1""#);
    let e = spec.e as f64;
    for node in nodes.iter().filter(|n| n.n > 0) {
        let attrs = format!(r#"fill="{}" stroke="black" stroke-width="0.5" data-n="{}""#, node.color.fill(), node.n);
        circle(&mut out, map(node.n as f64 / e, 0.0), style::SMALL_NODE, &attrs);
    }
    let ends = [(&nodes[0], 0.0, "o"), (&nodes[nodes.len() - 1], 1.0, "o + (1/2,-1/2)")];
    for (node, x, label) in ends {
        let attrs = format!(r#"fill="{}" stroke="black" stroke-width="1""#, node.color.fill());
        let c = map(x, 0.0);
        circle(&mut out, c, style::LARGE_NODE, &attrs);
        text(&mut out, c.0, c.1 - 12.0, 14, label);
    }
    for m in &spec.marks {
        let x = (&m.eta[0] - &m.eta[1]).to_f64().unwrap_or(0.0);
        let c = map(x, 0.0);
        circle(&mut out, c, style::SMALL_NODE / 2.0, r#"fill="black""#);
        text(&mut out, c.0, c.1 + 18.0, 12, &m.label);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `η ↦` plane position with `o` at the apex of the base triangle.
fn a2_position(eta: &[f64]) -> (f64, f64) {
    let (a, b, c) = (eta[0], eta[1], eta[2]);
    (0.5 - 0.5 * a + b - 0.5 * c, style::SQRT3_2 - style::SQRT3_2 * a + style::SQRT3_2 * c)
}

fn to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect()
}

fn render_a2(spec: &FigureSpec) -> Result<String> {
    if spec.marks.iter().any(|m| m.eta.len() != 3) {
        return Err(Error::Invalid("A2 figures take GL3 marks".into()));
    }
    let s = style::A2_SCALE;
    // rotation by π, then flip to screen coordinates
    let map = |p: (f64, f64)| ((1.2 - p.0) * s, (0.173 + p.1) * s);
    let segments = if spec.e <= style::DRAW_CAP { spec.e.max(1) } else { style::REPRESENTATIVE_GRID };
    let p = spec.p as f64;
    let mut out = String::new();
    header(&mut out, 1.4 * s, 1.212 * s);
    let _ = writeln!(out, r#"<clipPath id="frame"><rect x="0" y="0" width="{}" height="{}"/></clipPath>"#, f(1.4 * s), f(1.212 * s));
    out.push_str("<g clip-path=\"url(#frame)\">\n");
    let upright = [(-0.5, -0.866), (0.5, -0.866), (-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (-0.5, 0.866), (0.5, 0.866)];
    let flipped = [(-0.5, -0.866), (0.5, -0.866), (-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, -1.732)];
    let placements = upright.iter().map(|&t| (t, false)).chain(flipped.iter().map(|&t| (t, true)));
    for ((sx, sy), flip) in placements {
        let place = |q: (f64, f64)| {
            let (x, y) = (q.0 + sx, q.1 + sy);
            map(if flip { (x, -y) } else { (x, y) })
        };
        for k in 1..=spec.shading_depth {
            let k = k as f64;
            let tri = [(1.5 * k / p, 0.866 * k / p), (1.0 - 1.5 * k / p, 0.866 * k / p), (0.5, 0.866 * (1.0 - 2.0 * k / p))];
            let pts: Vec<(f64, f64)> = tri.iter().map(|&q| place(q)).collect();
            polygon(&mut out, &pts, &format!(r#"fill="red" fill-opacity="{}" stroke="none""#, style::SHADE_OPACITY));
        }
        let (a, b, c) = ((0.0, 0.0), (1.0, 0.0), (0.5, style::SQRT3_2));
        let lerp = |u: (f64, f64), v: (f64, f64), t: f64| (u.0 + t * (v.0 - u.0), u.1 + t * (v.1 - u.1));
        let grid = format!(r#"stroke="{}" stroke-width="0.3""#, style::GRAY);
        for i in 0..=segments {
            let t = i as f64 / segments as f64;
            let (pp, qq, rr, ss) = (lerp(a, b, t), lerp(a, c, t), lerp(b, c, t), lerp(c, b, t));
            line(&mut out, place(pp), place(qq), &grid);
            line(&mut out, place(pp), place(ss), &grid);
            line(&mut out, place(qq), place(rr), &grid);
        }
        let pts: Vec<(f64, f64)> = [a, b, c].iter().map(|&q| place(q)).collect();
        polygon(&mut out, &pts, r#"fill="none" stroke="black" stroke-width="1.2""#);
    }
    out.push_str("</g>\n");
    let vertices = [([0.0, 0.0, 0.0], "o"), ([1.0, 0.0, 0.0], "o + (1,0,0)"), ([1.0, 1.0, 0.0], "o + (1,1,0)")];
    for (eta, label) in vertices {
        let c = map(a2_position(&eta));
        circle(&mut out, c, style::VERTEX_DOT * 1.5, r#"fill="black""#);
        text(&mut out, c.0, c.1 - 10.0, 16, label);
    }
    for m in &spec.marks {
        let c = map(a2_position(&to_f64(&m.eta)));
        circle(&mut out, c, style::VERTEX_DOT, r#"fill="black""#);
        text(&mut out, c.0, c.1 - 8.0, 16, &m.label);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Lattice point `(a, b, 0)` in grid coordinates `(x, j)`, position `(x, jH)`.
fn grid_of(v: &[i64]) -> (i64, i64) {
    (v[0] - 2 * v[1] + v[2], v[0] - v[2])
}

fn vertex_type(x: i64, j: i64) -> usize {
    // (a, b, 0) with a = j and b = (j - x)/2
    let b = (j - x).div_euclid(2);
    (j + b).rem_euclid(3) as usize
}

/// The vertices of `w̃·(-C)` in grid coordinates.
pub fn alcove_vertices(x: &AffineWeylElement) -> Vec<(i64, i64)> {
    let base = [[0i64, 0, 0], [-1, 0, 0], [-1, -1, 0]];
    base.iter()
        .map(|v| {
            let wv = x.finite.apply(v);
            let img: Vec<i64> = wv.iter().zip(&x.translation).map(|(a, b)| a - b).collect();
            grid_of(&img)
        })
        .collect()
}

fn short_word(iw: &IwahoriWeyl, x: &AffineWeylElement, t_tilde: &AffineWeylElement) -> String {
    let rw = iw.reduced_word(x);
    let mut s: String = rw.word.iter().map(|i| format!("s{i}")).collect::<Vec<_>>().join("·");
    let omega = if rw.omega == *t_tilde {
        "t".to_string()
    } else if rw.omega == AffineWeylElement::identity(&iw.rd) {
        String::new()
    } else {
        rw.omega.display(&iw.rd)
    };
    if !s.is_empty() && !omega.is_empty() {
        s.push('·');
    }
    s.push_str(&omega);
    if s.is_empty() {
        s.push('1');
    }
    s
}

fn render_admissible(spec: &FigureSpec) -> Result<String> {
    let rd: RootDatum = "GL3".parse()?;
    let iw = IwahoriWeyl::new(&rd)?;
    let shaded: Vec<AffineWeylElement> = match &spec.highlight {
        Some(h) => h.clone(),
        None => iw.admissible_set(&spec.mu)?.into_iter().map(|(x, _)| x).collect(),
    };
    if shaded.iter().any(|x| x.translation.len() != 3) {
        return Err(Error::Dimension("admissible figures are drawn for GL3".into()));
    }
    let t_tilde = AffineWeylElement { translation: vec![1, 0, 0], finite: rd.weyl_from_cycles("(123)")? };
    let s = style::ADM_SCALE;
    let h = style::H;
    let map = |x: i64, j: i64| ((x as f64 + 3.0) * s, (1.5 * h - j as f64 * h) * s);
    let (w, hh) = (7.0 * s, 4.0 * h * s);
    let mut out = String::new();
    header(&mut out, w, hh);
    let _ = writeln!(out, r#"<clipPath id="frame"><rect x="0" y="0" width="{}" height="{}"/></clipPath>"#, f(w), f(hh));
    out.push_str("<g clip-path=\"url(#frame)\">\n");
    for x in &shaded {
        let vs = alcove_vertices(x);
        let pts: Vec<(f64, f64)> = vs.iter().map(|&(a, b)| map(a, b)).collect();
        polygon(&mut out, &pts, &format!(r#"fill="black" fill-opacity="{}" stroke="none""#, style::ADM_OPACITY));
    }
    for j in -2..=2i64 {
        for x in -4..=5i64 {
            if (x + j).rem_euclid(2) != 0 {
                continue;
            }
            let tri = [(x, j), (x + 1, j - 1), (x - 1, j - 1)];
            for k in 0..3 {
                let (u, v, opp) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let attrs = format!(r#"stroke="{}" stroke-width="2""#, style::WALL[vertex_type(opp.0, opp.1)]);
                line(&mut out, map(u.0, u.1), map(v.0, v.1), &attrs);
            }
        }
    }
    for j in -3..=2i64 {
        for x in -4..=5i64 {
            if (x + j).rem_euclid(2) == 0 {
                circle(&mut out, map(x, j), style::VERTEX_DOT, r#"fill="black""#);
            }
        }
    }
    out.push_str("</g>\n");
    for x in &shaded {
        let vs = alcove_vertices(x);
        let cx = vs.iter().map(|v| map(v.0, v.1).0).sum::<f64>() / 3.0;
        let cy = vs.iter().map(|v| map(v.0, v.1).1).sum::<f64>() / 3.0;
        text(&mut out, cx, cy + 4.0, 12, &short_word(&iw, x, &t_tilde));
    }
    let labels = [([0i64, 0, 0], "o"), ([-1, 0, 0], "o - (1,0,0)"), ([-1, -1, 0], "o - (1,1,0)")];
    for (v, label) in labels {
        let (x, j) = grid_of(&v);
        let c = map(x, j);
        circle(&mut out, c, style::VERTEX_DOT * 1.5, r#"fill="black""#);
        text(&mut out, c.0, c.1 - 10.0, 14, label);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_colors() {
        let nodes = sl2_nodes(7, 24).unwrap();
        let green: Vec<u64> = nodes.iter().filter(|n| n.color == NodeColor::Green).map(|n| n.n).collect();
        assert_eq!(green, vec![0, 6, 8, 12, 16, 18, 24]);
        assert!(nodes.iter().all(|n| (n.n % 2 == 1) == (n.color == NodeColor::White)));
    }

    #[test]
    fn nested_shades() {
        let svg = render(&FigureSpec::genericity(19, 36)).unwrap();
        assert_eq!(svg.matches("fill=\"red\"").count(), 13 * 6);
    }

    #[test]
    fn base_alcove_walls() {
        // o, o-(1,0,0), o-(1,1,0) have types 0, 2, 1
        assert_eq!(vertex_type(0, 0), 0);
        assert_eq!(vertex_type(-1, -1), 2);
        assert_eq!(vertex_type(1, -1), 1);
    }

    #[test]
    fn deterministic() {
        let spec = FigureSpec::admissible(&[1, 0, 0]);
        assert_eq!(render(&spec).unwrap(), render(&spec).unwrap());
    }
}
