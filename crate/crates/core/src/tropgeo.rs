//! Newton polygons, root valuations, tropicalization and amoeba tentacle
//! directions of polynomials in `omega` with coefficients in `epsilon`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lindblad::{EPSILON, OMEGA};
use crate::polycore::{MultiPoly, Rational};

/// `(ω-degree, ε-valuation of the coefficient)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NewtonPoint {
    pub i: u32,
    pub j: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slope {
    Finite(Rational),
    Vertical,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) => write!(f, "{r}"),
            Slope::Vertical => write!(f, "vertical"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: NewtonPoint,
    pub end: NewtonPoint,
    pub slope: Slope,
    pub hspan: u32,
}

/// Points plus the lower hull, left to right. A vertical segment, present
/// when the polynomial has `omega` as a factor, comes first and sits at the
/// leftmost point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub points: Vec<NewtonPoint>,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Root valuations with multiplicities; identically-zero roots carry
/// [`Valuation::Infinite`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EPReport {
    pub entries: Vec<(Valuation, u32)>,
}

impl EPReport {
    pub fn total_multiplicity(&self) -> u32 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Finite entries as a sorted multiset map.
    pub fn finite(&self) -> BTreeMap<Rational, u32> {
        let mut out = BTreeMap::new();
        for (v, m) in &self.entries {
            if let Valuation::Finite(r) = v {
                *out.entry(r.clone()).or_insert(0) += m;
            }
        }
        out
    }
}

/// `w ↦ min_k (intercept_k + slope_k·w)` with pieces `(slope, intercept)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalFunction {
    pub pieces: Vec<(u32, u32)>,
}

impl TropicalFunction {
    pub fn eval(&self, w: &Rational) -> Rational {
        self.pieces
            .iter()
            .map(|&(i, j)| &Rational::from_int(j) + &(&Rational::from_int(i) * w))
            .min()
            .expect("non-empty tropical function")
    }
}

/// Tentacle of the amoeba, in the `(log|ω|, log|ε|)` plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tentacle {
    pub valuation: Valuation,
    pub multiplicity: u32,
    /// Integer direction vector pointing toward the tentacle's end.
    pub direction: (i64, i64),
    /// `dlog|ε| / dlog|ω|`; `None` for a vertical tentacle.
    pub slope: Option<Rational>,
}

impl Tentacle {
    pub fn is_horizontal(&self) -> bool {
        self.slope.as_ref().is_some_and(Rational::is_zero)
    }
}

fn check_bivariate(f: &MultiPoly, x: &str, y: &str) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if let Some(other) = f.support().into_iter().find(|v| *v != x && *v != y) {
        return Err(Error::Precondition(format!(
            "polynomial still involves `{other}`; substitute parameter values first"
        )));
    }
    Ok(())
}

/// Newton points of `f` viewed as a polynomial in `omega` over `epsilon`.
pub fn newton_points(f: &MultiPoly) -> Result<Vec<NewtonPoint>> {
    newton_points_in(f, OMEGA, EPSILON)
}

/// Newton points with explicit variable names: `x` is the polynomial
/// variable, `y` the valuation variable.
pub fn newton_points_in(f: &MultiPoly, x: &str, y: &str) -> Result<Vec<NewtonPoint>> {
    check_bivariate(f, x, y)?;
    let xi = f.vars().index_of(x)?;
    let yi = f.vars().index_of(y)?;
    let mut lowest: BTreeMap<u32, u32> = BTreeMap::new();
    for (e, _) in f.terms() {
        let (i, j) = (e.exps()[xi], e.exps()[yi]);
        lowest.entry(i).and_modify(|v| *v = (*v).min(j)).or_insert(j);
    }
    Ok(lowest.into_iter().map(|(i, j)| NewtonPoint { i, j }).collect())
}

fn cross(a: NewtonPoint, b: NewtonPoint, c: NewtonPoint) -> i64 {
    let (ax, ay) = (a.i as i64, a.j as i64);
    let (bx, by) = (b.i as i64, b.j as i64);
    let (cx, cy) = (c.i as i64, c.j as i64);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

/// Lower convex hull by monotone chain; collinear points are merged so each
/// segment's horizontal span counts every root of that valuation.
pub fn lower_hull(points: &[NewtonPoint]) -> Result<NewtonPolygon> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no Newton points".into()));
    }
    let mut pts: BTreeMap<u32, u32> = BTreeMap::new();
    for p in points {
        pts.entry(p.i).and_modify(|v| *v = (*v).min(p.j)).or_insert(p.j);
    }
    let sorted: Vec<NewtonPoint> = pts.into_iter().map(|(i, j)| NewtonPoint { i, j }).collect();
    let mut hull: Vec<NewtonPoint> = Vec::new();
    for &p in &sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let mut segments = Vec::new();
    let first = hull[0];
    if first.i > 0 {
        segments.push(Segment {
            start: first,
            end: first,
            slope: Slope::Vertical,
            hspan: 0,
        });
    }
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        segments.push(Segment {
            start: a,
            end: b,
            slope: Slope::Finite(Rational::new(
                b.j as i64 - a.j as i64,
                (b.i - a.i) as i64,
            )?),
            hspan: b.i - a.i,
        });
    }
    Ok(NewtonPolygon {
        points: sorted,
        segments,
    })
}

impl NewtonPolygon {
    pub fn from_poly(f: &MultiPoly) -> Result<Self> {
        lower_hull(&newton_points(f)?)
    }

    pub fn min_degree(&self) -> u32 {
        self.points.first().map_or(0, |p| p.i)
    }

    pub fn degree(&self) -> u32 {
        self.points.last().map_or(0, |p| p.i)
    }

    pub fn has_vertical(&self) -> bool {
        self.segments.iter().any(|s| s.slope == Slope::Vertical)
    }

    /// Compact form such as `vertical:2, -1/2:2`. The vertical entry is
    /// annotated with the number of identically-zero roots.
    pub fn summary(&self) -> String {
        self.segments
            .iter()
            .map(|s| match &s.slope {
                Slope::Vertical => format!("vertical:{}", self.min_degree()),
                Slope::Finite(r) => format!("{r}:{}", s.hspan),
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": self.points.iter().map(|p| [p.i, p.j]).collect::<Vec<_>>(),
            "segments": self.segments.iter().map(|s| json!({
                "start": [s.start.i, s.start.j],
                "end": [s.end.i, s.end.j],
                "slope": s.slope.to_string(),
                "hspan": s.hspan,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Root valuations read off the polygon: `(-slope, hspan)` per finite
/// segment, plus `(inf, min degree)` when `omega` divides the polynomial.
pub fn ep_orders(poly: &NewtonPolygon) -> EPReport {
    let mut entries = Vec::new();
    if poly.min_degree() > 0 {
        entries.push((Valuation::Infinite, poly.min_degree()));
    }
    for s in &poly.segments {
        if let Slope::Finite(r) = &s.slope {
            entries.push((Valuation::Finite(-r), s.hspan));
        }
    }
    EPReport { entries }
}

impl EPReport {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|(v, m)| json!({"valuation": v.to_string(), "multiplicity": m}))
                .collect(),
        )
    }
}

/// Tropical polynomial of `f` in `omega` over `epsilon`-valuations.
pub fn tropicalize(f: &MultiPoly) -> Result<TropicalFunction> {
    Ok(TropicalFunction {
        pieces: newton_points(f)?.into_iter().map(|p| (p.i, p.j)).collect(),
    })
}

/// Breakpoints of the tropical function with multiplicities, ascending.
///
/// Found by intersecting every pair of pieces and keeping the intersections
/// where the minimum is attained by both, independently of any hull.
pub fn tropical_roots(t: &TropicalFunction) -> Result<Vec<(Rational, u32)>> {
    if t.pieces.len() < 2 {
        return Err(Error::InvalidArgument(
            "a single-piece tropical function has no roots".into(),
        ));
    }
    let mut out: BTreeMap<Rational, u32> = BTreeMap::new();
    for (a, &(ia, ja)) in t.pieces.iter().enumerate() {
        for &(ib, jb) in &t.pieces[a + 1..] {
            if ia == ib {
                continue;
            }
            let w = Rational::new(jb as i64 - ja as i64, ia as i64 - ib as i64)?;
            if out.contains_key(&w) {
                continue;
            }
            let min = t.eval(&w);
            let at_a = &Rational::from_int(ja) + &(&Rational::from_int(ia) * &w);
            if at_a != min {
                continue;
            }
            let achieving: Vec<u32> = t
                .pieces
                .iter()
                .filter(|&&(i, j)| &Rational::from_int(j) + &(&Rational::from_int(i) * &w) == min)
                .map(|&(i, _)| i)
                .collect();
            let span = achieving.iter().max().unwrap() - achieving.iter().min().unwrap();
            out.insert(w, span);
        }
    }
    Ok(out.into_iter().collect())
}

/// Tentacle directions: a root valuation `v` traces `log|ω| ≈ v·log|ε|`,
/// so its tentacle heads along `(-v, -1)`, with slope `1/v`.
/// Identically-zero roots give the horizontal tentacle `(-1, 0)`.
pub fn tentacle_directions(poly: &NewtonPolygon) -> Vec<Tentacle> {
    ep_orders(poly)
        .entries
        .into_iter()
        .map(|(valuation, multiplicity)| {
            let (direction, slope) = match &valuation {
                Valuation::Infinite => ((-1, 0), Some(Rational::zero())),
                Valuation::Finite(v) => {
                    let p = v.numer().to_i64().expect("small valuation");
                    let q = v.denom().to_i64().expect("small valuation");
                    let slope = if v.is_zero() { None } else { v.recip().ok() };
                    ((-p, -q), slope)
                }
            };
            Tentacle {
                valuation,
                multiplicity,
                direction,
                slope,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::parse_expr;
    use crate::polycore::Vars;

    fn poly(s: &str) -> MultiPoly {
        parse_expr(s, &Vars::new(&["omega", "epsilon"]).unwrap()).unwrap()
    }

    fn pt(i: u32, j: u32) -> NewtonPoint {
        NewtonPoint { i, j }
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn points() {
        assert_eq!(newton_points(&poly("omega^2 - epsilon")).unwrap(), [pt(0, 1), pt(2, 0)]);
        assert_eq!(
            newton_points(&poly("omega^4 + epsilon*omega + epsilon^2")).unwrap(),
            [pt(0, 2), pt(1, 1), pt(4, 0)]
        );
        assert_eq!(
            newton_points(&poly("omega^4 + epsilon*omega^2 + epsilon^3*omega^2")).unwrap(),
            [pt(2, 1), pt(4, 0)]
        );
        assert!(newton_points(&poly("0")).is_err());
    }

    #[test]
    fn hulls() {
        let h = lower_hull(&[pt(2, 0), pt(0, 1)]).unwrap();
        assert_eq!(h.summary(), "-1/2:2");

        let h = lower_hull(&[pt(4, 0), pt(1, 1), pt(0, 2)]).unwrap();
        assert_eq!(h.summary(), "-1:1, -1/3:3");

        let h = lower_hull(&[pt(4, 0), pt(2, 1)]).unwrap();
        assert_eq!(h.segments[0].slope, Slope::Vertical);
        assert_eq!(h.segments[0].hspan, 0);
        assert_eq!(h.summary(), "vertical:2, -1/2:2");
    }

    #[test]
    fn collinear_points_merge() {
        let h = lower_hull(&[pt(0, 3), pt(1, 2), pt(2, 1), pt(3, 0)]).unwrap();
        assert_eq!(h.segments.len(), 1);
        assert_eq!(h.segments[0].hspan, 3);
    }

    #[test]
    fn orders() {
        let rep = |pts: &[NewtonPoint]| ep_orders(&lower_hull(pts).unwrap()).entries;
        assert_eq!(rep(&[pt(2, 0), pt(0, 1)]), [(Valuation::Finite(r("1/2")), 2)]);
        assert_eq!(
            rep(&[pt(4, 0), pt(1, 1), pt(0, 2)]),
            [(Valuation::Finite(r("1")), 1), (Valuation::Finite(r("1/3")), 3)]
        );
        assert_eq!(
            rep(&[pt(4, 0), pt(2, 1)]),
            [(Valuation::Infinite, 2), (Valuation::Finite(r("1/2")), 2)]
        );
    }

    #[test]
    fn tropical() {
        let roots = |s: &str| tropical_roots(&tropicalize(&poly(s)).unwrap()).unwrap();
        assert_eq!(roots("omega^2 + epsilon"), [(r("1/2"), 2)]);
        assert_eq!(
            roots("omega^4 + epsilon*omega + epsilon^2"),
            [(r("1/3"), 3), (r("1"), 1)]
        );
        assert_eq!(roots("omega + 1"), [(r("0"), 1)]);
        assert!(tropical_roots(&tropicalize(&poly("omega^3")).unwrap()).is_err());
        let t = tropicalize(&poly("omega^4 + epsilon*omega + epsilon^2")).unwrap();
        assert_eq!(t.pieces, [(0, 2), (1, 1), (4, 0)]);
    }

    #[test]
    fn tentacles() {
        let slopes = |pts: &[NewtonPoint]| -> Vec<Option<Rational>> {
            tentacle_directions(&lower_hull(pts).unwrap())
                .into_iter()
                .map(|t| t.slope)
                .collect()
        };
        assert_eq!(slopes(&[pt(2, 0), pt(0, 1)]), [Some(r("2"))]);
        assert_eq!(slopes(&[pt(4, 0), pt(1, 1), pt(0, 2)]), [Some(r("1")), Some(r("3"))]);
        let t = tentacle_directions(&lower_hull(&[pt(4, 0), pt(2, 1)]).unwrap());
        assert!(t[0].is_horizontal());
        assert_eq!(t[0].direction, (-1, 0));
        assert_eq!(t[1].direction, (-1, -2));
    }

    #[test]
    fn json_shape() {
        let h = lower_hull(&[pt(4, 0), pt(2, 1)]).unwrap();
        let j = h.to_json();
        assert_eq!(j["segments"][0]["slope"], "vertical");
        assert_eq!(j["segments"][1]["slope"], "-1/2");
        let rep = ep_orders(&h).to_json();
        assert_eq!(rep[0]["valuation"], "inf");
    }

    #[test]
    fn rejects_unsubstituted_parameters() {
        let f = parse_expr("omega - J", &Vars::new(&["omega", "epsilon", "J"]).unwrap()).unwrap();
        assert!(matches!(newton_points(&f), Err(Error::Precondition(_))));
    }
}
