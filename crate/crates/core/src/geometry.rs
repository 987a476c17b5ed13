//! Planar primitives: points, polylines, deflection angles and
//! critical-point splitting of curved lines.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// A planar point (or displacement vector) in map units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product; positive when `other` lies
    /// counter-clockwise of `self`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (other - self).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl core::ops::Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// A direction vector had zero length.
    DegenerateDirection,
    TooFewPoints { count: usize },
    NonFinite { index: usize },
    RepeatedPoint { index: usize },
    InvalidSplitParams,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DegenerateDirection => write!(f, "degenerate geometry: zero-length direction vector"),
            GeometryError::TooFewPoints { count } => {
                write!(f, "polyline needs at least 2 distinct points, got {count}")
            }
            GeometryError::NonFinite { index } => write!(f, "non-finite coordinate at point {index}"),
            GeometryError::RepeatedPoint { index } => {
                write!(f, "point {index} repeats its predecessor (zero-length edge)")
            }
            GeometryError::InvalidSplitParams => write!(f, "split distance and ratio must both be > 0"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// An ordered list of at least two points with no zero-length edges.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Polyline(Vec<Point>);

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        if points.len() < 2 {
            return Err(GeometryError::TooFewPoints { count: points.len() });
        }
        if let Some(index) = (1..points.len()).find(|&i| points[i] == points[i - 1]) {
            return Err(GeometryError::RepeatedPoint { index });
        }
        Ok(Self(points))
    }

    /// Drops consecutive repeats before validating.
    pub fn from_points_dedup(mut points: Vec<Point>) -> Result<Self, GeometryError> {
        points.dedup();
        Self::new(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn into_points(self) -> Vec<Point> {
        self.0
    }

    pub fn first(&self) -> Point {
        self.0[0]
    }

    pub fn last(&self) -> Point {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        polyline_length(self)
    }

    pub fn reversed(&self) -> Polyline {
        let mut pts = self.0.clone();
        pts.reverse();
        Polyline(pts)
    }

    /// Point at arc-length fraction `t` in `[0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        let t = t.clamp(0.0, 1.0);
        if t == 0.0 {
            return self.first();
        }
        if t == 1.0 {
            return self.last();
        }
        let target = t * self.length();
        let mut walked = 0.0;
        for w in self.0.windows(2) {
            let len = w[0].distance(w[1]);
            if walked + len >= target {
                let local = if len > 0.0 { (target - walked) / len } else { 0.0 };
                return w[0].lerp(w[1], local);
            }
            walked += len;
        }
        self.last()
    }

    /// Sub-line between arc-length fractions `from` and `to`; reversed
    /// when `from > to`. Equal fractions give a single point.
    pub fn slice(&self, from: f64, to: f64) -> Vec<Point> {
        let (lo, hi, reverse) = if from <= to { (from, to, false) } else { (to, from, true) };
        let lo = lo.clamp(0.0, 1.0);
        let hi = hi.clamp(0.0, 1.0);
        let total = self.length();
        let (lo_d, hi_d) = (lo * total, hi * total);
        let mut out = Vec::new();
        out.push(self.point_at(lo));
        let mut walked = 0.0;
        for (i, w) in self.0.windows(2).enumerate() {
            walked += w[0].distance(w[1]);
            let vertex = self.0[i + 1];
            if walked > lo_d && walked < hi_d && *out.last().unwrap() != vertex {
                out.push(vertex);
            }
        }
        let end = self.point_at(hi);
        if *out.last().unwrap() != end {
            out.push(end);
        }
        if reverse {
            out.reverse();
        }
        out
    }

    /// Closest point on the line to `p`: (distance, arc-length fraction).
    pub fn project(&self, p: Point) -> (f64, f64) {
        let total = self.length();
        let mut best = (f64::INFINITY, 0.0);
        let mut walked = 0.0;
        for w in self.0.windows(2) {
            let d = w[1] - w[0];
            let len = d.norm();
            let s = ((p - w[0]).dot(d) / (len * len)).clamp(0.0, 1.0);
            let q = w[0].lerp(w[1], s);
            let dist = p.distance(q);
            if dist < best.0 {
                let along = walked + s * len;
                best = (dist, if total > 0.0 { (along / total).clamp(0.0, 1.0) } else { 0.0 });
            }
            walked += len;
        }
        best
    }
}

/// Thresholds for critical-point splitting.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SplitParams {
    pub distance: f64,
    pub ratio: f64,
}

impl SplitParams {
    pub fn new(distance: f64, ratio: f64) -> Result<Self, GeometryError> {
        if !(distance > 0.0 && ratio > 0.0) || !distance.is_finite() || !ratio.is_finite() {
            return Err(GeometryError::InvalidSplitParams);
        }
        Ok(Self { distance, ratio })
    }

    /// Whether a maximum chord offset triggers a split. A closed chord
    /// (zero length) makes any positive offset an infinite ratio.
    pub fn triggers(&self, offset: f64, chord_length: f64) -> bool {
        if offset >= self.distance {
            return true;
        }
        if chord_length > 0.0 {
            offset / chord_length >= self.ratio
        } else {
            offset > 0.0
        }
    }
}

pub fn polyline_length(p: &Polyline) -> f64 {
    p.0.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Angle in degrees between the straight continuation of `dir_in` and
/// `dir_out`: 0 is straight on, 180 a full reversal.
pub fn deflection_angle(dir_in: Point, dir_out: Point) -> Result<f64, GeometryError> {
    if dir_in.norm() == 0.0 || dir_out.norm() == 0.0 {
        return Err(GeometryError::DegenerateDirection);
    }
    let a = libm::atan2(dir_in.cross(dir_out).abs(), dir_in.dot(dir_out));
    Ok(a.to_degrees())
}

/// Signed variant of [`deflection_angle`]: positive for a left
/// (counter-clockwise) turn, in `(-180, 180]`.
pub fn signed_deflection(dir_in: Point, dir_out: Point) -> Result<f64, GeometryError> {
    if dir_in.norm() == 0.0 || dir_out.norm() == 0.0 {
        return Err(GeometryError::DegenerateDirection);
    }
    Ok(libm::atan2(dir_in.cross(dir_out), dir_in.dot(dir_out)).to_degrees())
}

/// Perpendicular distance from `pt` to the infinite line through the chord;
/// plain distance when the chord endpoints coincide.
pub fn orthogonal_distance(pt: Point, chord: (Point, Point)) -> f64 {
    let (a, b) = chord;
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return pt.distance(a);
    }
    d.cross(pt - a).abs() / len
}

/// Interior point farthest from the first-to-last chord, as
/// (index, offset). Lowest index wins ties. `None` without interior points.
pub fn max_offset_point(points: &[Point]) -> Option<(usize, f64)> {
    if points.len() < 3 {
        return None;
    }
    let chord = (points[0], points[points.len() - 1]);
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in points.iter().enumerate().take(points.len() - 1).skip(1) {
        let d = orthogonal_distance(p, chord);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
    }
    best
}

/// Indices of the critical points at which `points` is split, ascending.
pub fn split_indices(points: &[Point], params: &SplitParams) -> Vec<usize> {
    let mut out = Vec::new();
    split_range(points, 0, points.len() - 1, params, &mut out);
    out
}

fn split_range(points: &[Point], lo: usize, hi: usize, params: &SplitParams, out: &mut Vec<usize>) {
    let window = &points[lo..=hi];
    let Some((rel, offset)) = max_offset_point(window) else {
        return;
    };
    if !params.triggers(offset, window[0].distance(window[window.len() - 1])) {
        return;
    }
    let at = lo + rel;
    split_range(points, lo, at, params, out);
    out.push(at);
    split_range(points, at, hi, params, out);
}

/// Splits a polyline at its critical points. Pieces share their split
/// points, so joining them in order reproduces the input.
pub fn split_polyline(p: &Polyline, params: &SplitParams) -> Vec<Polyline> {
    let pts = p.points();
    let mut bounds = Vec::with_capacity(2);
    bounds.push(0);
    bounds.extend(split_indices(pts, params));
    bounds.push(pts.len() - 1);
    bounds
        .windows(2)
        .map(|w| Polyline(pts[w[0]..=w[1]].to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn pl(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(polyline_length(&pl(&[(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)])), 7.0);
        assert_eq!(polyline_length(&pl(&[(0.0, 0.0), (1.0, 0.0)])), 1.0);
        let diag = polyline_length(&pl(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]));
        assert!((diag - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn deflections() {
        let e = Point::new(1.0, 0.0);
        assert_eq!(deflection_angle(e, e).unwrap(), 0.0);
        assert_eq!(deflection_angle(e, Point::new(0.0, 1.0)).unwrap(), 90.0);
        assert_eq!(deflection_angle(e, Point::new(-1.0, 0.0)).unwrap(), 180.0);
        assert_eq!(
            deflection_angle(Point::default(), e),
            Err(GeometryError::DegenerateDirection)
        );
        assert!(signed_deflection(e, Point::new(0.0, 1.0)).unwrap() > 0.0);
        assert!(signed_deflection(e, Point::new(0.0, -1.0)).unwrap() < 0.0);
    }

    #[test]
    fn orthogonal_distances() {
        let chord = (Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        assert_eq!(orthogonal_distance(Point::new(5.0, 3.0), chord), 3.0);
        assert_eq!(orthogonal_distance(Point::new(7.0, 0.0), chord), 0.0);
        let degenerate = (Point::new(0.0, 0.0), Point::new(0.0, 0.0));
        assert!((orthogonal_distance(Point::new(1.0, 1.0), degenerate) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn polyline_rejects_bad_input() {
        assert_eq!(
            Polyline::new(vec![Point::new(0.0, 0.0)]),
            Err(GeometryError::TooFewPoints { count: 1 })
        );
        assert_eq!(
            Polyline::new(vec![Point::new(0.0, 0.0), Point::new(0.0, 0.0)]),
            Err(GeometryError::RepeatedPoint { index: 1 })
        );
        assert_eq!(
            Polyline::new(vec![Point::new(f64::NAN, 0.0), Point::new(0.0, 1.0)]),
            Err(GeometryError::NonFinite { index: 0 })
        );
        assert!(SplitParams::new(0.0, 1.0).is_err());
        assert!(SplitParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn split_straight_line_is_identity() {
        let line = pl(&[(0.0, 0.0), (10.0, 0.0)]);
        let params = SplitParams::new(1e-6, 1e-6).unwrap();
        assert_eq!(split_polyline(&line, &params), vec![line.clone()]);
        let collinear = pl(&[(0.0, 0.0), (4.0, 0.0), (10.0, 0.0)]);
        assert_eq!(split_polyline(&collinear, &params).len(), 1);
    }

    #[test]
    fn split_right_angle_at_corner() {
        // Brute-force: the only interior point is the corner; its offset
        // from the chord (0,0)-(10,10) is 10/sqrt(2).
        let l = pl(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)]);
        let (idx, off) = max_offset_point(l.points()).unwrap();
        assert_eq!(idx, 1);
        assert!((off - 10.0 / 2f64.sqrt()).abs() < 1e-12);
        let pieces = split_polyline(&l, &SplitParams::new(1.0, 0.1).unwrap());
        assert_eq!(pieces, vec![pl(&[(0.0, 0.0), (10.0, 0.0)]), pl(&[(10.0, 0.0), (10.0, 10.0)])]);
    }

    #[test]
    fn split_shallow_arc_stays_whole() {
        let arc = pl(&[(0.0, 0.0), (5.0, 0.5), (10.0, 0.0)]);
        assert_eq!(split_polyline(&arc, &SplitParams::new(1.0, 0.2).unwrap()).len(), 1);
    }

    #[test]
    fn split_ties_take_lowest_index() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 2.0),
            Point::new(2.0, 2.0),
            Point::new(3.0, 0.0),
        ];
        assert_eq!(max_offset_point(&pts), Some((1, 2.0)));
    }

    #[test]
    fn closed_chord_splits() {
        let ring = pl(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        let pieces = split_polyline(&ring, &SplitParams::new(100.0, 100.0).unwrap());
        assert!(pieces.len() >= 2);
    }

    #[test]
    fn slice_and_project() {
        let l = pl(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)]);
        assert_eq!(l.point_at(0.5), Point::new(2.0, 0.0));
        assert_eq!(
            l.slice(0.25, 0.75),
            vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(2.0, 1.0)]
        );
        assert_eq!(
            l.slice(0.75, 0.25),
            vec![Point::new(2.0, 1.0), Point::new(2.0, 0.0), Point::new(1.0, 0.0)]
        );
        assert_eq!(l.slice(0.5, 0.5), vec![Point::new(2.0, 0.0)]);
        let (d, t) = l.project(Point::new(3.0, 1.0));
        assert_eq!(d, 1.0);
        assert!((t - 0.75).abs() < 1e-12);
    }

    fn arb_polyline() -> impl Strategy<Value = Polyline> {
        prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..12).prop_filter_map(
            "needs distinct consecutive points",
            |v| Polyline::from_points_dedup(v.into_iter().map(|(x, y)| Point::new(x, y)).collect()).ok(),
        )
    }

    proptest! {
        #[test]
        fn split_pieces_concatenate(p in arb_polyline(), d in 0.01f64..50.0, r in 0.01f64..2.0) {
            let params = SplitParams::new(d, r).unwrap();
            let pieces = split_polyline(&p, &params);
            let mut joined: Vec<Point> = pieces[0].points().to_vec();
            for piece in &pieces[1..] {
                prop_assert_eq!(piece.first(), *joined.last().unwrap());
                joined.extend_from_slice(&piece.points()[1..]);
            }
            prop_assert_eq!(joined.as_slice(), p.points());
            for piece in &pieces {
                prop_assert!(piece.len() >= 2);
                prop_assert_eq!(split_polyline(piece, &params), vec![piece.clone()]);
            }
        }

        #[test]
        fn split_monotone_in_thresholds(p in arb_polyline(), d in 0.01f64..50.0, r in 0.01f64..2.0, k in 0.1f64..1.0) {
            let loose = split_polyline(&p, &SplitParams::new(d, r).unwrap()).len();
            let tight_d = split_polyline(&p, &SplitParams::new(d * k, r).unwrap()).len();
            let tight_r = split_polyline(&p, &SplitParams::new(d, r * k).unwrap()).len();
            prop_assert!(tight_d >= loose);
            prop_assert!(tight_r >= loose);
        }

        #[test]
        fn deflection_symmetry_and_scaling(ax in -10.0f64..10.0, ay in -10.0f64..10.0,
                                          bx in -10.0f64..10.0, by in -10.0f64..10.0,
                                          s in 0.01f64..100.0) {
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            prop_assume!(a.norm() > 1e-6 && b.norm() > 1e-6);
            let base = deflection_angle(a, b).unwrap();
            prop_assert!((0.0..=180.0).contains(&base));
            prop_assert!((deflection_angle(-a, -b).unwrap() - base).abs() < 1e-9);
            prop_assert!((deflection_angle(a * s, b).unwrap() - base).abs() < 1e-9);
            prop_assert!((deflection_angle(a, b * s).unwrap() - base).abs() < 1e-9);
        }

        #[test]
        fn length_invariant_under_rigid_motion(p in arb_polyline(), theta in 0.0f64..6.3,
                                               tx in -1e3f64..1e3, ty in -1e3f64..1e3) {
            let (s, c) = (libm::sin(theta), libm::cos(theta));
            let moved: Vec<Point> = p.points().iter()
                .map(|q| Point::new(c * q.x - s * q.y + tx, s * q.x + c * q.y + ty))
                .collect();
            let base = polyline_length(&p);
            let after = moved.windows(2).map(|w| w[0].distance(w[1])).sum::<f64>();
            prop_assert!((base - after).abs() <= 1e-9 * base.max(1.0));
        }
    }
}
