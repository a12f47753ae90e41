use std::fmt;
use std::io::{self, Write};

use cartan_core::correspondence::{geodesic_points, path_points};
use cartan_core::{OrderedPair, PrimeContext, ProjectivePoint, Result, UnorderedPair};

/// The curve the plotted points lie on, with coefficients in `F_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Curve {
    /// `(x - c)^2 - eps (y - k)^2 = rhs`.
    Conic { c: u64, k: u64, eps: u64, rhs: u64 },
    /// `x + slope * y = c`.
    Line { slope: u64, c: u64 },
}

impl Curve {
    pub fn holds(&self, x: u64, y: u64, ctx: &PrimeContext) -> bool {
        match *self {
            Curve::Conic { c, k, eps, rhs } => {
                let dx = ctx.sub(x, c);
                let dy = ctx.sub(y, k);
                ctx.sub(ctx.mul(dx, dx), ctx.mul(eps, ctx.mul(dy, dy))) == rhs
            }
            Curve::Line { slope, c } => ctx.add(x, ctx.mul(slope, y)) == c,
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Conic { c, k, eps, rhs } => write!(f, "(x - {c})^2 - {eps}*(y - {k})^2 = {rhs}"),
            Curve::Line { slope, c } => write!(f, "x + {slope}*y = {c}"),
        }
    }
}

pub struct Figure {
    pub title: String,
    pub ell: u64,
    pub points: Vec<(u64, u64)>,
    pub curve: Curve,
}

/// Geodesic joining `a` and `b`; each class of `H_l` is drawn at its
/// representative with `y <= (l - 1) / 2`.
pub fn geodesic(a: ProjectivePoint, b: ProjectivePoint, ctx: &PrimeContext) -> Result<Figure> {
    let pair = UnorderedPair::new(a, b)?;
    let points = geodesic_points(&pair, ctx).points.iter().map(|w| (w.x(), w.y())).collect();
    let curve = match (pair.lo(), pair.hi()) {
        (ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)) => {
            let half = ctx.inv(2);
            let r = ctx.mul(ctx.sub(b, a), half);
            Curve::Conic { c: ctx.mul(ctx.add(a, b), half), k: 0, eps: ctx.epsilon(), rhs: ctx.mul(r, r) }
        }
        (ProjectivePoint::Affine(a), ProjectivePoint::Infinity) => Curve::Line { slope: 0, c: a },
        _ => unreachable!("infinity sorts last"),
    };
    Ok(Figure { title: format!("geodesic {pair} in H_{}", ctx.ell()), ell: ctx.ell(), points, curve })
}

/// Slope-`s` path from `a` to `b` in `C_l`.
pub fn path(a: ProjectivePoint, b: ProjectivePoint, s: u64, ctx: &PrimeContext) -> Result<Figure> {
    let pair = OrderedPair::new(a, b)?;
    let spec = path_points(&pair, s, ctx)?;
    let s = spec.slope;
    let points = spec.points.iter().map(|z| (z.x(), z.y())).collect();
    let e = ctx.epsilon();
    let curve = match (a, b) {
        (ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)) => {
            let ab = ctx.sub(a, b);
            Curve::Conic {
                c: ctx.div(ctx.add(a, b), 2),
                k: ctx.div(ctx.mul(s, ctx.sub(b, a)), ctx.mul(2, e)),
                eps: e,
                rhs: ctx.div(ctx.mul(ctx.sub(e, ctx.mul(s, s)), ctx.mul(ab, ab)), ctx.mul(4, e)),
            }
        }
        // a + lambda (s + sqrt(eps))
        (ProjectivePoint::Affine(a), ProjectivePoint::Infinity) => Curve::Line { slope: ctx.neg(s), c: a },
        // b + 1 / (lambda (s + sqrt(eps)))
        (ProjectivePoint::Infinity, ProjectivePoint::Affine(b)) => Curve::Line { slope: s, c: b },
        _ => unreachable!("endpoints are distinct"),
    };
    Ok(Figure { title: format!("slope-{s} path {pair} in C_{}", ctx.ell()), ell: ctx.ell(), points, curve })
}

impl Figure {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}; {}", self.title, self.curve)?;
        writeln!(w, "x,y")?;
        for (x, y) in &self.points {
            writeln!(w, "{x},{y}")?;
        }
        Ok(())
    }

    pub fn write_svg<W: Write>(&self, mut w: W) -> io::Result<()> {
        const CELL: u64 = 12;
        let side = self.ell * CELL;
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#
        )?;
        writeln!(w, "  <title>{}</title>", self.title)?;
        writeln!(w, r#"  <metadata>ell={} curve="{}"</metadata>"#, self.ell, self.curve)?;
        writeln!(w, r##"  <rect width="{side}" height="{side}" fill="#fff" stroke="#999"/>"##)?;
        for (x, y) in &self.points {
            let cx = x * CELL + CELL / 2;
            let cy = side - (y * CELL + CELL / 2);
            writeln!(w, r##"  <circle cx="{cx}" cy="{cy}" r="{}" fill="#236"/>"##, CELL / 3)?;
        }
        writeln!(w, "</svg>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(ell: u64) -> Vec<ProjectivePoint> {
        (0..ell).map(ProjectivePoint::Affine).chain([ProjectivePoint::Infinity]).collect()
    }

    #[test]
    fn points_lie_on_reported_curves() {
        for ell in [5u64, 7, 11] {
            let ctx = PrimeContext::new(ell).unwrap();
            for &a in &pts(ell) {
                for &b in &pts(ell) {
                    if a == b {
                        continue;
                    }
                    let f = geodesic(a, b, &ctx).unwrap();
                    assert!(f.points.iter().all(|&(x, y)| f.curve.holds(x, y, &ctx)), "{}", f.title);
                    for s in 1..ell {
                        let f = path(a, b, s, &ctx).unwrap();
                        assert!(f.points.iter().all(|&(x, y)| f.curve.holds(x, y, &ctx)), "{}", f.title);
                    }
                }
            }
        }
    }

    #[test]
    fn vertical_geodesic() {
        let ctx = PrimeContext::new(7).unwrap();
        let f = geodesic(ProjectivePoint::Affine(0), ProjectivePoint::Infinity, &ctx).unwrap();
        assert_eq!(f.points.len(), 3);
        assert!(f.points.iter().all(|&(x, _)| x == 0));
        let mut svg = Vec::new();
        f.write_svg(&mut svg).unwrap();
        assert_eq!(String::from_utf8(svg).unwrap().matches("<circle").count(), 3);
    }
}
