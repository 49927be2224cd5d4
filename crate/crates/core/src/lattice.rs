//! Exact geometry of the nested right-isosceles triangulations.
//!
//! Level 0 is the tiling of the plane by the four triangles of each unit
//! square that have a square edge as hypotenuse and the square's center as
//! apex. Level `k + 1` bisects every level-`k` triangle through the midpoint
//! of its hypotenuse. All coordinates are dyadic rationals, so every
//! construction here is exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Number of triangles in a star.
pub const STAR_SIZE: usize = 15;

/// An exact dyadic rational `num / 2^exp` kept in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i64, exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        Dyadic {
            num: num >> shift,
            exp: exp - shift,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    /// Base-2 logarithm of the denominator.
    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn half(self) -> Self {
        Self::new(self.num, self.exp + 1)
    }

    pub fn signum(self) -> i64 {
        self.num.signum()
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }

    fn aligned(self, other: Self) -> (i128, i128, u32) {
        let e = self.exp.max(other.exp);
        let a = (self.num as i128) << (e - self.exp);
        let b = (other.num as i128) << (e - other.exp);
        (a, b, e)
    }

    fn from_wide(num: i128, exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        let reduced = num >> shift;
        Dyadic {
            num: i64::try_from(reduced).expect("dyadic numerator overflow"),
            exp: exp - shift,
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::from_wide(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::from_wide(a - b, e)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl std::ops::Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::from_wide(self.num as i128 * rhs.num as i128, self.exp + rhs.exp)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

/// A point of the plane with dyadic coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DyadicPoint {
    pub x: Dyadic,
    pub y: Dyadic,
}

impl DyadicPoint {
    pub fn new(x: Dyadic, y: Dyadic) -> Self {
        DyadicPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        DyadicPoint::new(Dyadic::from_int(x), Dyadic::from_int(y))
    }

    /// `(xn / 2^exp, yn / 2^exp)`.
    pub fn from_scaled(xn: i64, yn: i64, exp: u32) -> Self {
        DyadicPoint::new(Dyadic::new(xn, exp), Dyadic::new(yn, exp))
    }

    pub fn midpoint(self, other: Self) -> Self {
        DyadicPoint::new((self.x + other.x).half(), (self.y + other.y).half())
    }

    pub fn dot(self, other: Self) -> Dyadic {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Self) -> Dyadic {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> Dyadic {
        self.dot(self)
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl Add for DyadicPoint {
    type Output = DyadicPoint;
    fn add(self, rhs: DyadicPoint) -> DyadicPoint {
        DyadicPoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for DyadicPoint {
    type Output = DyadicPoint;
    fn sub(self, rhs: DyadicPoint) -> DyadicPoint {
        DyadicPoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Debug for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Twice the signed area of `(a, b, c)`; negative when the vertices run clockwise.
pub fn signed_area2(a: DyadicPoint, b: DyadicPoint, c: DyadicPoint) -> Dyadic {
    (b - a).cross(c - a)
}

/// An unordered segment, used to compare edges exactly.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Segment {
    a: DyadicPoint,
    b: DyadicPoint,
}

impl Segment {
    pub fn new(p: DyadicPoint, q: DyadicPoint) -> Self {
        if p <= q {
            Segment { a: p, b: q }
        } else {
            Segment { a: q, b: p }
        }
    }

    pub fn endpoints(&self) -> (DyadicPoint, DyadicPoint) {
        (self.a, self.b)
    }
}

/// Role of a vertex within its triangle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Corner {
    Left,
    Top,
    Right,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Edge {
    /// From the left vertex to the top vertex.
    Left,
    /// From the top vertex to the right vertex.
    Right,
    Hypotenuse,
}

/// A triangle of the level-`k` triangulation.
///
/// `top` is the right-angle vertex, and `left, top, right` run clockwise
/// (negative signed area, y axis pointing up). Roles are a function of the
/// vertex set, so equality and hashing agree with identity by
/// `(level, vertex set)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeTriangle {
    level: u32,
    left: DyadicPoint,
    top: DyadicPoint,
    right: DyadicPoint,
}

impl fmt::Debug for LatticeTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T{}[L{:?} T{:?} R{:?}]",
            self.level, self.left, self.top, self.right
        )
    }
}

impl LatticeTriangle {
    /// The triangle with vertices (0,0), (1/2,1/2), (1,0).
    pub fn base() -> Self {
        LatticeTriangle {
            level: 0,
            left: DyadicPoint::from_ints(0, 0),
            top: DyadicPoint::from_scaled(1, 1, 1),
            right: DyadicPoint::from_ints(1, 0),
        }
    }

    /// Builds a triangle from an unordered vertex set, assigning roles.
    ///
    /// Fails if the points do not form a right isosceles triangle whose
    /// hypotenuse has squared length `2^-level`.
    pub fn from_vertices(level: u32, points: [DyadicPoint; 3]) -> Result<Self> {
        let hyp2 = Dyadic::new(1, level);
        for i in 0..3 {
            let top = points[i];
            let a = points[(i + 1) % 3];
            let b = points[(i + 2) % 3];
            let (ua, ub) = (a - top, b - top);
            if ua.dot(ub) == Dyadic::ZERO
                && ua.norm_squared() == ub.norm_squared()
                && (a - b).norm_squared() == hyp2
            {
                return Ok(Self::oriented(level, a, top, b));
            }
        }
        Err(Error::NotALatticeTriangle(format!(
            "level {level}: {points:?}"
        )))
    }

    // Assumes `top` is already the right-angle vertex.
    fn oriented(level: u32, a: DyadicPoint, top: DyadicPoint, b: DyadicPoint) -> Self {
        let (left, right) = if signed_area2(a, top, b).signum() < 0 {
            (a, b)
        } else {
            (b, a)
        };
        LatticeTriangle {
            level,
            left,
            top,
            right,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn left(&self) -> DyadicPoint {
        self.left
    }

    pub fn top(&self) -> DyadicPoint {
        self.top
    }

    pub fn right(&self) -> DyadicPoint {
        self.right
    }

    pub fn vertices(&self) -> [DyadicPoint; 3] {
        [self.left, self.top, self.right]
    }

    pub fn corner(&self, corner: Corner) -> DyadicPoint {
        match corner {
            Corner::Left => self.left,
            Corner::Top => self.top,
            Corner::Right => self.right,
        }
    }

    pub fn corner_at(&self, p: DyadicPoint) -> Option<Corner> {
        if p == self.left {
            Some(Corner::Left)
        } else if p == self.top {
            Some(Corner::Top)
        } else if p == self.right {
            Some(Corner::Right)
        } else {
            None
        }
    }

    pub fn edge(&self, edge: Edge) -> Segment {
        match edge {
            Edge::Left => Segment::new(self.left, self.top),
            Edge::Right => Segment::new(self.top, self.right),
            Edge::Hypotenuse => Segment::new(self.left, self.right),
        }
    }

    pub fn hypotenuse_midpoint(&self) -> DyadicPoint {
        self.left.midpoint(self.right)
    }

    /// Twice the signed area; always negative.
    pub fn signed_area2(&self) -> Dyadic {
        signed_area2(self.left, self.top, self.right)
    }

    /// Closed point-in-triangle test.
    pub fn contains_point(&self, p: DyadicPoint) -> bool {
        // every edge taken clockwise must see p on its right or on it
        [
            (self.left, self.top),
            (self.top, self.right),
            (self.right, self.left),
        ]
        .iter()
        .all(|&(a, b)| signed_area2(a, b, p).signum() <= 0)
    }

    pub fn contains_triangle(&self, other: &LatticeTriangle) -> bool {
        other.vertices().iter().all(|&p| self.contains_point(p))
    }

    /// Splits through the hypotenuse midpoint; the first child holds the left vertex.
    pub fn subdivide(&self) -> (LatticeTriangle, LatticeTriangle) {
        let m = self.hypotenuse_midpoint();
        let level = self.level + 1;
        (
            Self::oriented(level, self.left, m, self.top),
            Self::oriented(level, self.top, m, self.right),
        )
    }

    /// The level-`k+1` triangles whose hypotenuses are the left and right
    /// edges of `self` and whose apexes lie outside it.
    pub fn exterior_children(&self) -> (LatticeTriangle, LatticeTriangle) {
        let m = self.hypotenuse_midpoint();
        let level = self.level + 1;
        let left_apex = self.left + self.top - m;
        let right_apex = self.top + self.right - m;
        (
            Self::oriented(level, self.left, left_apex, self.top),
            Self::oriented(level, self.top, right_apex, self.right),
        )
    }

    /// The triangle of the same level on the other side of `edge`.
    pub fn neighbor_across(&self, edge: Edge) -> LatticeTriangle {
        // Mirror image across the edge: both triangles are right isosceles
        // with matching angles at the shared endpoints.
        let (a, top, b) = match edge {
            Edge::Hypotenuse => (self.left, self.left + self.right - self.top, self.right),
            Edge::Left => (self.left, self.top, self.top + self.top - self.right),
            Edge::Right => (self.top + self.top - self.left, self.top, self.right),
        };
        Self::oriented(self.level, a, top, b)
    }

    /// Next triangle clockwise around the vertex `corner`.
    pub fn rotate_clockwise(&self, corner: Corner) -> LatticeTriangle {
        // Sweeping clockwise about a vertex leaves through the edge joining it
        // to its predecessor in the clockwise order left, top, right.
        let edge = match corner {
            Corner::Left => Edge::Hypotenuse,
            Corner::Top => Edge::Left,
            Corner::Right => Edge::Right,
        };
        self.neighbor_across(edge)
    }

    fn rotate_clockwise_about(&self, p: DyadicPoint) -> LatticeTriangle {
        let corner = self
            .corner_at(p)
            .expect("rotation point must be a vertex of the triangle");
        self.rotate_clockwise(corner)
    }

    /// The 15 triangles of the same level meeting `self`, in canonical order.
    pub fn star(&self) -> Star {
        let mut entries = [*self; STAR_SIZE];
        let mut cur = *self;
        for slot in entries.iter_mut().take(8).skip(1) {
            cur = cur.rotate_clockwise_about(self.left);
            *slot = cur;
        }
        entries[8] = entries[7].neighbor_across(Edge::Left);
        cur = self.neighbor_across(Edge::Right);
        entries[9] = cur;
        for slot in entries.iter_mut().skip(10) {
            cur = cur.rotate_clockwise_about(self.right);
            *slot = cur;
        }
        Star { entries }
    }

    /// Position (1-based) of `other` in the star of `self`.
    pub fn star_index(&self, other: &LatticeTriangle) -> Result<Option<usize>> {
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                found: other.level,
            });
        }
        Ok(self.star().position(other))
    }

    /// Translation by an integer vector, which preserves every level of the triangulation.
    pub fn translate(&self, dx: i64, dy: i64) -> LatticeTriangle {
        let v = DyadicPoint::from_ints(dx, dy);
        LatticeTriangle {
            level: self.level,
            left: self.left + v,
            top: self.top + v,
            right: self.right + v,
        }
    }

    /// Maps every vertex through `f` and rebuilds the triangle at `level`.
    pub fn map_vertices<F>(&self, level: u32, f: F) -> Result<LatticeTriangle>
    where
        F: Fn(DyadicPoint) -> DyadicPoint,
    {
        Self::from_vertices(level, [f(self.left), f(self.top), f(self.right)])
    }
}

/// The ordered star of a triangle. Indexing is 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Star {
    entries: [LatticeTriangle; STAR_SIZE],
}

impl Star {
    pub fn center(&self) -> &LatticeTriangle {
        &self.entries[0]
    }

    /// Entry `i` for `1 <= i <= 15`.
    pub fn get(&self, i: usize) -> &LatticeTriangle {
        assert!((1..=STAR_SIZE).contains(&i), "star index {i} out of range");
        &self.entries[i - 1]
    }

    pub fn entries(&self) -> &[LatticeTriangle; STAR_SIZE] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &LatticeTriangle> {
        self.entries.iter()
    }

    pub fn position(&self, t: &LatticeTriangle) -> Option<usize> {
        self.entries.iter().position(|e| e == t).map(|i| i + 1)
    }
}

impl std::ops::Index<usize> for Star {
    type Output = LatticeTriangle;
    fn index(&self, i: usize) -> &LatticeTriangle {
        self.get(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(xn: i64, yn: i64, exp: u32) -> DyadicPoint {
        DyadicPoint::from_scaled(xn, yn, exp)
    }

    fn tri(level: u32, pts: [DyadicPoint; 3]) -> LatticeTriangle {
        LatticeTriangle::from_vertices(level, pts).unwrap()
    }

    fn vertex_set(t: &LatticeTriangle) -> HashSet<DyadicPoint> {
        t.vertices().into_iter().collect()
    }

    /// Random triangle reached from a translate of the base by a random walk
    /// of subdivisions and rotations.
    fn walk(dx: i64, dy: i64, steps: &[u8]) -> LatticeTriangle {
        let mut t = LatticeTriangle::base().translate(dx, dy);
        for &s in steps {
            t = match s % 5 {
                0 => t.subdivide().0,
                1 => t.subdivide().1,
                2 => t.rotate_clockwise(Corner::Left),
                3 => t.rotate_clockwise(Corner::Top),
                _ => t.rotate_clockwise(Corner::Right),
            };
        }
        t
    }

    fn check_invariants(t: &LatticeTriangle) {
        let k = t.level();
        let leg = Dyadic::new(1, k + 1);
        assert_eq!((t.left() - t.top()).norm_squared(), leg);
        assert_eq!((t.right() - t.top()).norm_squared(), leg);
        assert_eq!((t.left() - t.right()).norm_squared(), Dyadic::new(1, k));
        assert!(t.signed_area2().signum() < 0);
        let max_exp = k.div_ceil(2) + 1;
        for v in t.vertices() {
            assert!(v.x.exponent() <= max_exp && v.y.exponent() <= max_exp);
        }
    }

    #[test]
    fn dyadic_canonical_form() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 7), Dyadic::ZERO);
        assert_eq!(Dyadic::new(3, 2) + Dyadic::new(1, 2), Dyadic::ONE);
        assert_eq!(Dyadic::new(1, 1).half(), Dyadic::new(1, 2));
        assert!(Dyadic::new(-1, 1) < Dyadic::new(1, 3));
        assert_eq!(Dyadic::new(3, 1) * Dyadic::new(1, 1), Dyadic::new(3, 2));
    }

    #[test]
    fn base_triangle_roles() {
        let t = LatticeTriangle::base();
        assert_eq!(t.left(), p(0, 0, 0));
        assert_eq!(t.top(), p(1, 1, 1));
        assert_eq!(t.right(), p(1, 0, 0));
        check_invariants(&t);
    }

    #[test]
    fn subdivide_base() {
        let (t1, t2) = LatticeTriangle::base().subdivide();
        assert_eq!(t1.left(), p(1, 1, 1));
        assert_eq!(t1.top(), p(1, 0, 1));
        assert_eq!(t1.right(), p(0, 0, 0));
        assert_eq!(
            vertex_set(&t2),
            [p(1, 1, 1), p(1, 0, 1), p(1, 0, 0)].into_iter().collect()
        );
        check_invariants(&t1);
        check_invariants(&t2);
    }

    #[test]
    fn exterior_children_of_base() {
        let (l, r) = LatticeTriangle::base().exterior_children();
        assert_eq!(l, tri(1, [p(0, 0, 0), p(0, 1, 1), p(1, 1, 1)]));
        assert_eq!(r, tri(1, [p(1, 1, 1), p(2, 1, 1), p(1, 0, 0)]));
    }

    #[test]
    fn star_of_base_matches_worked_example() {
        let t0 = LatticeTriangle::base();
        let star = t0.star();
        assert_eq!(star[1], t0);
        let eighth = tri(0, [p(0, 0, 0), p(0, 1, 0), p(1, 1, 1)]);
        assert_eq!(star[8], eighth);
        assert_eq!(eighth.star().position(&t0), Some(10));
        assert_eq!(t0.star_index(&eighth).unwrap(), Some(8));
        assert_eq!(t0.star_index(&t0).unwrap(), Some(1));
    }

    #[test]
    fn star_index_far_and_mismatched() {
        let t0 = LatticeTriangle::base();
        assert_eq!(t0.star_index(&t0.translate(2, 0)).unwrap(), None);
        let child = t0.subdivide().0;
        assert!(matches!(
            t0.star_index(&child),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn from_vertices_rejects_non_lattice() {
        let bad = [p(0, 0, 0), p(1, 0, 0), p(0, 1, 0)];
        assert!(LatticeTriangle::from_vertices(1, bad).is_err());
        assert!(LatticeTriangle::from_vertices(0, [p(0, 0, 0), p(1, 0, 0), p(3, 0, 0)]).is_err());
    }

    fn check_star(t: &LatticeTriangle) {
        let star = t.star();
        let distinct: HashSet<_> = star.iter().collect();
        assert_eq!(distinct.len(), STAR_SIZE);
        let verts = vertex_set(t);
        for s in star.iter() {
            check_invariants(s);
            assert_eq!(s.level(), t.level());
            assert!(s.vertices().iter().any(|v| verts.contains(v)));
        }
        let around = |v: DyadicPoint| star.iter().filter(|s| s.corner_at(v).is_some()).count();
        assert_eq!(around(t.left()), 8);
        assert_eq!(around(t.right()), 8);
        assert_eq!(around(t.top()), 4);
        for i in 2..=8 {
            assert!(star[i].corner_at(t.left()).is_some());
        }
        assert_eq!(star[8].edge(Edge::Right), t.edge(Edge::Left));
        assert!(star[9].corner_at(t.top()).is_some());
        assert_eq!(star[9].edge(Edge::Right), star[8].edge(Edge::Left));
        assert_eq!(star[10].edge(Edge::Left), t.edge(Edge::Right));
        for i in 11..=15 {
            assert!(star[i].corner_at(t.right()).is_some());
        }
        // one more clockwise step around each end closes the fan
        assert_eq!(star[8].rotate_clockwise(star[8].corner_at(t.left()).unwrap()), *t);
        assert_eq!(
            star[15].rotate_clockwise(star[15].corner_at(t.right()).unwrap()),
            star[2]
        );
    }

    #[test]
    fn star_of_base_is_well_formed() {
        check_star(&LatticeTriangle::base());
    }

    #[test]
    fn deep_nesting_keeps_invariants() {
        let mut t = LatticeTriangle::base();
        for depth in 0..24u8 {
            t = if depth % 3 == 0 {
                t.subdivide().1
            } else {
                t.exterior_children().0
            };
            check_invariants(&t);
            check_star(&t);
        }
        assert_eq!(t.level(), 24);
    }

    proptest! {
        #[test]
        fn star_is_well_formed(dx in -3i64..3, dy in -3i64..3, steps in prop::collection::vec(0u8..5, 0..22)) {
            check_star(&walk(dx, dy, &steps));
        }

        #[test]
        fn subdivision_bisects(dx in -3i64..3, dy in -3i64..3, steps in prop::collection::vec(0u8..5, 0..22)) {
            let t = walk(dx, dy, &steps);
            let (a, b) = t.subdivide();
            check_invariants(&a);
            check_invariants(&b);
            prop_assert_eq!(a.signed_area2() + a.signed_area2(), t.signed_area2());
            prop_assert_eq!(b.signed_area2() + b.signed_area2(), t.signed_area2());
            prop_assert!(a.corner_at(t.left()).is_some());
            prop_assert!(b.corner_at(t.right()).is_some());
            let shared = Segment::new(t.hypotenuse_midpoint(), t.top());
            let ea: HashSet<_> = [Edge::Left, Edge::Right, Edge::Hypotenuse].iter().map(|&e| a.edge(e)).collect();
            let eb: HashSet<_> = [Edge::Left, Edge::Right, Edge::Hypotenuse].iter().map(|&e| b.edge(e)).collect();
            let common: Vec<_> = ea.intersection(&eb).collect();
            prop_assert_eq!(common, vec![&shared]);
            prop_assert!(t.contains_triangle(&a) && t.contains_triangle(&b));
        }

        #[test]
        fn exterior_children_sit_on_legs(dx in -3i64..3, dy in -3i64..3, steps in prop::collection::vec(0u8..5, 0..22)) {
            let t = walk(dx, dy, &steps);
            let (l, r) = t.exterior_children();
            check_invariants(&l);
            check_invariants(&r);
            prop_assert_eq!(l.edge(Edge::Hypotenuse), t.edge(Edge::Left));
            prop_assert_eq!(r.edge(Edge::Hypotenuse), t.edge(Edge::Right));
            prop_assert!(!t.contains_point(l.top()));
            prop_assert!(!t.contains_point(r.top()));
            // exterior child is the subdivision child reflected across the shared leg
            let (s1, s2) = t.subdivide();
            prop_assert_eq!(l, s1.neighbor_across(Edge::Hypotenuse));
            prop_assert_eq!(r, s2.neighbor_across(Edge::Hypotenuse));
            let (tl, tr) = t.translate(5, -2).exterior_children();
            prop_assert_eq!(tl, l.translate(5, -2));
            prop_assert_eq!(tr, r.translate(5, -2));
        }

        #[test]
        fn child_star_nests_in_parent_star(dx in -3i64..3, dy in -3i64..3, steps in prop::collection::vec(0u8..5, 0..22)) {
            let t = walk(dx, dy, &steps);
            let parent_star = t.star();
            let (a, b) = t.subdivide();
            for child in [a, b] {
                for s in child.star().iter() {
                    prop_assert!(parent_star.iter().any(|u| u.contains_triangle(s)));
                }
            }
        }

        #[test]
        fn constructions_are_injective(
            s1 in prop::collection::vec(0u8..5, 0..12),
            s2 in prop::collection::vec(0u8..5, 0..12),
        ) {
            let (a, b) = (walk(0, 0, &s1), walk(0, 0, &s2));
            if a.level() == b.level() && a != b {
                let (sa, sb) = (a.subdivide(), b.subdivide());
                prop_assert!(sa.0 != sb.0 && sa.1 != sb.1);
                let (ea, eb) = (a.exterior_children(), b.exterior_children());
                prop_assert!(ea.0 != eb.0 && ea.1 != eb.1);
            }
        }
    }
}
