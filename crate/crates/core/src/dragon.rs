//! The dragon as exact triangle replacement, and geometric neighborhood types.
//!
//! Everything here works directly on triangles and is the brute-force
//! reference that the symbolic engine in [`crate::typedyn`] is checked against.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Dyadic, DyadicPoint, LatticeTriangle, STAR_SIZE};
use crate::typedyn::TypeCensus;

/// Default bound on the depth accepted by the geometric operations.
pub const DEFAULT_MAX_DEPTH: u32 = 20;

/// Neighborhood occupancy code: bit `i - 1` is set iff star entry `i` is occupied.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeCode(u16);

impl TypeCode {
    pub const EMPTY: TypeCode = TypeCode(0);
    pub const COVERED: TypeCode = TypeCode((1 << STAR_SIZE) - 1);

    pub fn new(code: u16) -> Option<Self> {
        (code <= Self::COVERED.0).then_some(TypeCode(code))
    }

    /// Builds a code from occupancy flags of star entries 1..=15.
    pub fn from_flags(flags: [bool; STAR_SIZE]) -> Self {
        TypeCode(
            flags
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &f)| acc | ((f as u16) << i)),
        )
    }

    /// The code with only star entry `i` occupied.
    pub fn single(i: usize) -> Self {
        assert!((1..=STAR_SIZE).contains(&i));
        TypeCode(1 << (i - 1))
    }

    pub fn value(self) -> u16 {
        self.0
    }

    /// Occupancy of star entry `i` (1-based).
    pub fn bit(self, i: usize) -> bool {
        debug_assert!((1..=STAR_SIZE).contains(&i));
        (self.0 >> (i - 1)) & 1 == 1
    }

    /// The center triangle itself is occupied.
    pub fn is_occupied(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_covered(self) -> bool {
        self == Self::COVERED
    }

    /// Occupied but not covered.
    pub fn is_boundary(self) -> bool {
        self.is_occupied() && !self.is_covered()
    }
}

impl fmt::Display for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeCode({})", self.0)
    }
}

/// One of the two similitudes generating the dragon.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Similitude {
    /// `(x, y) -> ((x - y) / 2, (x + y) / 2)`
    First,
    /// `(x, y) -> ((x + y + 1) / 2, (y - x + 1) / 2)`
    Second,
}

impl Similitude {
    pub const ALL: [Similitude; 2] = [Similitude::First, Similitude::Second];
}

pub fn ifs_map(which: Similitude, p: DyadicPoint) -> DyadicPoint {
    let (x, y) = (p.x, p.y);
    match which {
        Similitude::First => DyadicPoint::new((x - y).half(), (x + y).half()),
        Similitude::Second => DyadicPoint::new(
            (x + y + Dyadic::ONE).half(),
            (y - x + Dyadic::ONE).half(),
        ),
    }
}

/// Image of a level-`k` triangle, which is a level-`k+1` triangle.
pub fn map_triangle(which: Similitude, t: &LatticeTriangle) -> LatticeTriangle {
    t.map_vertices(t.level() + 1, |p| ifs_map(which, p))
        .expect("similitudes map lattice triangles to lattice triangles")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Limits {
    pub max_depth: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl Limits {
    pub fn check(&self, depth: u32) -> Result<()> {
        if depth > self.max_depth {
            Err(Error::ResourceLimit {
                depth,
                limit: self.max_depth,
            })
        } else {
            Ok(())
        }
    }
}

/// The distinct triangles of `F^k(T0)`, each with the number of index
/// sequences that produce it.
#[derive(Clone, Debug)]
pub struct OccupancySet {
    level: u32,
    multiplicity: HashMap<LatticeTriangle, u64>,
}

impl OccupancySet {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn contains(&self, t: &LatticeTriangle) -> bool {
        self.multiplicity.contains_key(t)
    }

    /// Number of distinct triangles.
    pub fn len(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicity.is_empty()
    }

    pub fn triangles(&self) -> impl Iterator<Item = &LatticeTriangle> {
        self.multiplicity.keys()
    }

    pub fn multiplicity(&self, t: &LatticeTriangle) -> u64 {
        self.multiplicity.get(t).copied().unwrap_or(0)
    }

    /// Number of index sequences, `2^k`.
    pub fn sequence_count(&self) -> u64 {
        self.multiplicity.values().sum()
    }

    /// Triangles in a fixed order.
    pub fn sorted(&self) -> Vec<LatticeTriangle> {
        let mut v: Vec<_> = self.multiplicity.keys().copied().collect();
        v.sort_unstable();
        v
    }
}

/// `F^k(T0)` built by replacing every triangle with its two exterior children.
pub fn iterate(k: u32, limits: &Limits) -> Result<OccupancySet> {
    limits.check(k)?;
    let mut multiplicity = HashMap::from([(LatticeTriangle::base(), 1u64)]);
    for _ in 0..k {
        let mut next = HashMap::with_capacity(multiplicity.len() * 2);
        for (t, m) in &multiplicity {
            let (l, r) = t.exterior_children();
            *next.entry(l).or_insert(0) += m;
            *next.entry(r).or_insert(0) += m;
        }
        multiplicity = next;
    }
    Ok(OccupancySet {
        level: k,
        multiplicity,
    })
}

/// All `2^k` images `f_{i1} ∘ ... ∘ f_{ik}(T0)`, computed by composing the maps.
pub fn iterate_by_maps(k: u32, limits: &Limits) -> Result<Vec<LatticeTriangle>> {
    limits.check(k)?;
    let mut images = vec![LatticeTriangle::base()];
    for _ in 0..k {
        images = Similitude::ALL
            .iter()
            .flat_map(|&f| images.iter().map(move |t| map_triangle(f, t)))
            .collect();
    }
    Ok(images)
}

pub fn neighborhood_type(t: &LatticeTriangle, occ: &OccupancySet) -> Result<TypeCode> {
    if t.level() != occ.level {
        return Err(Error::LevelMismatch {
            expected: occ.level,
            found: t.level(),
        });
    }
    Ok(type_of(t, occ))
}

fn type_of(t: &LatticeTriangle, occ: &OccupancySet) -> TypeCode {
    let star = t.star();
    let mut flags = [false; STAR_SIZE];
    for (flag, s) in flags.iter_mut().zip(star.iter()) {
        *flag = occ.contains(s);
    }
    TypeCode::from_flags(flags)
}

/// The triangles of `N_0`, the star of the base triangle.
pub fn base_neighborhood() -> Vec<LatticeTriangle> {
    LatticeTriangle::base().star().entries().to_vec()
}

/// Visits the level-`root.level() + depth` triangles inside `root`,
/// depth-first with the left child first.
pub fn for_each_descendant<F>(root: &LatticeTriangle, depth: u32, f: &mut F)
where
    F: FnMut(&LatticeTriangle),
{
    if depth == 0 {
        f(root);
        return;
    }
    let (a, b) = root.subdivide();
    for_each_descendant(&a, depth - 1, f);
    for_each_descendant(&b, depth - 1, f);
}

/// The triangles of `N_k` in enumeration order.
pub fn neighborhood_subdivision(k: u32) -> Vec<LatticeTriangle> {
    let mut out = Vec::with_capacity(STAR_SIZE << k);
    for root in base_neighborhood() {
        for_each_descendant(&root, k, &mut |t| out.push(*t));
    }
    out
}

// Subtree roots used to spread the census over worker threads.
fn work_roots(k: u32) -> (Vec<LatticeTriangle>, u32) {
    let split = k.min(4);
    let mut roots = Vec::with_capacity(STAR_SIZE << split);
    for root in base_neighborhood() {
        for_each_descendant(&root, split, &mut |t| roots.push(*t));
    }
    (roots, k - split)
}

/// Tally of neighborhood types over `N_k` against an existing occupancy set.
pub fn census_of(occ: &OccupancySet) -> TypeCensus {
    let (roots, rest) = work_roots(occ.level());
    let tally = roots
        .par_iter()
        .map(|root| {
            let mut local: HashMap<TypeCode, u64> = HashMap::new();
            for_each_descendant(root, rest, &mut |t| {
                *local.entry(type_of(t, occ)).or_insert(0) += 1;
            });
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (code, n) in b {
                *a.entry(code).or_insert(0) += n;
            }
            a
        });
    tally.into_iter().collect()
}

/// Geometric type census `V(k)` of `N_k`.
pub fn type_census(k: u32, limits: &Limits) -> Result<TypeCensus> {
    let occ = iterate(k, limits)?;
    Ok(census_of(&occ))
}

/// Counts of occupied, covered and boundary triangles, both as distinct
/// triangles and weighted by the number of index sequences.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct CoverageSummary {
    pub level: u32,
    pub occupied_distinct: u64,
    pub occupied_sequences: u64,
    pub covered_distinct: u64,
    pub covered_sequences: u64,
    pub boundary_distinct: u64,
    pub boundary_sequences: u64,
}

pub fn coverage(occ: &OccupancySet) -> CoverageSummary {
    let mut s = CoverageSummary {
        level: occ.level,
        occupied_distinct: occ.len() as u64,
        occupied_sequences: occ.sequence_count(),
        covered_distinct: 0,
        covered_sequences: 0,
        boundary_distinct: 0,
        boundary_sequences: 0,
    };
    for (t, &m) in &occ.multiplicity {
        if type_of(t, occ).is_covered() {
            s.covered_distinct += 1;
            s.covered_sequences += m;
        } else {
            s.boundary_distinct += 1;
            s.boundary_sequences += m;
        }
    }
    s
}

/// Number of distinct triangles of `F^k(T0)` that are not covered.
pub fn boundary_count_geometric(k: u32, limits: &Limits) -> Result<u64> {
    let occ = iterate(k, limits)?;
    Ok(coverage(&occ).boundary_distinct)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderStyle {
    /// Occupied triangles only.
    Plain,
    /// Unoccupied, occupied and covered triangles in distinct colors.
    ByClass,
}

const SVG_SCALE: f64 = 400.0;
const SVG_MARGIN: f64 = 10.0;

/// SVG drawing of `N_k` with `F^k(T0)` highlighted.
pub fn render(k: u32, style: RenderStyle, limits: &Limits) -> Result<String> {
    let occ = iterate(k, limits)?;
    let cells = neighborhood_subdivision(k);

    let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in base_neighborhood().iter().flat_map(|t| t.vertices()) {
        let (x, y) = p.to_f64();
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let width = (max_x - min_x) * SVG_SCALE + 2.0 * SVG_MARGIN;
    let height = (max_y - min_y) * SVG_SCALE + 2.0 * SVG_MARGIN;
    let project = |p: DyadicPoint| {
        let (x, y) = p.to_f64();
        (
            (x - min_x) * SVG_SCALE + SVG_MARGIN,
            (max_y - y) * SVG_SCALE + SVG_MARGIN,
        )
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    )
    .unwrap();
    writeln!(svg, "<title>N_{k} and F^{k}(T0)</title>").unwrap();
    let stroke_width = (2.0f64).powf(-(k as f64) / 4.0);
    writeln!(
        svg,
        r##"<g stroke="#888888" stroke-width="{stroke_width:.4}" stroke-linejoin="round">"##
    )
    .unwrap();
    for t in &cells {
        let class = if occ.contains(t) {
            if type_of(t, &occ).is_covered() {
                "covered"
            } else {
                "occupied"
            }
        } else {
            "empty"
        };
        let fill = match (style, class) {
            (RenderStyle::Plain, "empty") => "none",
            (RenderStyle::Plain, _) => "#000000",
            (RenderStyle::ByClass, "empty") => "#ffffff",
            (RenderStyle::ByClass, "occupied") => "#4a7ab5",
            (RenderStyle::ByClass, _) => "#d0402b",
        };
        let points: Vec<String> = t
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = project(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(
            svg,
            r#"<polygon class="{class}" fill="{fill}" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p(xn: i64, yn: i64, exp: u32) -> DyadicPoint {
        DyadicPoint::from_scaled(xn, yn, exp)
    }

    fn tri(level: u32, pts: [DyadicPoint; 3]) -> LatticeTriangle {
        LatticeTriangle::from_vertices(level, pts).unwrap()
    }

    #[test]
    fn type_code_bits() {
        assert_eq!(TypeCode::COVERED.value(), 32767);
        assert!(TypeCode::new(32768).is_none());
        assert_eq!(TypeCode::single(10).value(), 512);
        assert!(TypeCode::single(1).is_boundary());
        assert!(!TypeCode::COVERED.is_boundary());
        assert!(TypeCode::new(6).unwrap().bit(2) && TypeCode::new(6).unwrap().bit(3));
    }

    #[test]
    fn map_fixed_points() {
        assert_eq!(ifs_map(Similitude::First, p(0, 0, 0)), p(0, 0, 0));
        assert_eq!(ifs_map(Similitude::Second, p(1, 0, 0)), p(1, 0, 0));
        assert_eq!(ifs_map(Similitude::First, p(1, 0, 0)), p(1, 1, 1));
    }

    #[test]
    fn first_iterates() {
        let limits = Limits::default();
        let occ0 = iterate(0, &limits).unwrap();
        assert_eq!(occ0.sorted(), vec![LatticeTriangle::base()]);
        assert_eq!(occ0.sequence_count(), 1);

        let occ1 = iterate(1, &limits).unwrap();
        let expected: HashSet<_> = [
            tri(1, [p(0, 0, 0), p(0, 1, 1), p(1, 1, 1)]),
            tri(1, [p(1, 1, 1), p(2, 1, 1), p(1, 0, 0)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(occ1.triangles().copied().collect::<HashSet<_>>(), expected);
        let by_maps: HashSet<_> = Similitude::ALL
            .iter()
            .map(|&f| map_triangle(f, &LatticeTriangle::base()))
            .collect();
        assert_eq!(by_maps, expected);
    }

    #[test]
    fn maps_agree_with_replacement() {
        let limits = Limits::default();
        for k in 0..=12 {
            let occ = iterate(k, &limits).unwrap();
            let images = iterate_by_maps(k, &limits).unwrap();
            assert_eq!(images.len(), 1 << k);
            let mut counts: HashMap<LatticeTriangle, u64> = HashMap::new();
            for t in images {
                *counts.entry(t).or_insert(0) += 1;
            }
            assert_eq!(counts, occ.multiplicity, "k = {k}");
        }
    }

    #[test]
    fn occupancy_stays_in_base_neighborhood() {
        let limits = Limits::default();
        let n0 = base_neighborhood();
        let mut prev = iterate(0, &limits).unwrap();
        for k in 1..=12 {
            let occ = iterate(k, &limits).unwrap();
            for t in occ.triangles() {
                assert!(n0.iter().any(|u| u.contains_triangle(t)));
                assert!(prev.triangles().any(|q| {
                    let (l, r) = q.exterior_children();
                    *t == l || *t == r
                }));
            }
            prev = occ;
        }
    }

    #[test]
    fn base_types() {
        let occ = iterate(0, &Limits::default()).unwrap();
        assert_eq!(neighborhood_type(&LatticeTriangle::base(), &occ).unwrap().value(), 1);
        let eighth = tri(0, [p(0, 0, 0), p(0, 1, 0), p(1, 1, 1)]);
        assert_eq!(neighborhood_type(&eighth, &occ).unwrap().value(), 512);
        let far = LatticeTriangle::base().translate(4, 4);
        assert_eq!(neighborhood_type(&far, &occ).unwrap(), TypeCode::EMPTY);
        let child = LatticeTriangle::base().subdivide().0;
        assert!(neighborhood_type(&child, &occ).is_err());
    }

    #[test]
    fn base_census_is_one_of_each_single_bit() {
        let census = type_census(0, &Limits::default()).unwrap();
        let expected: TypeCensus = (1..=STAR_SIZE).map(|i| (TypeCode::single(i), 1u64)).collect();
        assert_eq!(census, expected);
    }

    #[test]
    fn census_mass_and_occupied_mass() {
        let limits = Limits::default();
        for k in 0..=10 {
            let occ = iterate(k, &limits).unwrap();
            let census = census_of(&occ);
            assert_eq!(census.total_mass(), (15u64 << k).into());
            let occupied: u64 = census
                .iter()
                .filter(|(c, _)| c.is_occupied())
                .map(|(_, n)| u64::try_from(n).unwrap())
                .sum();
            assert_eq!(occupied, occ.len() as u64);
        }
    }

    #[test]
    fn small_boundary_counts() {
        let limits = Limits::default();
        assert_eq!(boundary_count_geometric(0, &limits).unwrap(), 1);
        assert_eq!(boundary_count_geometric(1, &limits).unwrap(), 2);
    }

    #[test]
    fn enumeration_covers_base_neighborhood_once() {
        let cells = neighborhood_subdivision(3);
        assert_eq!(cells.len(), 15 * 8);
        let distinct: HashSet<_> = cells.iter().collect();
        assert_eq!(distinct.len(), cells.len());
        assert_eq!(cells[0], LatticeTriangle::base().subdivide().0.subdivide().0.subdivide().0);
    }

    #[test]
    fn resource_limit_is_enforced() {
        let limits = Limits { max_depth: 3 };
        assert!(matches!(
            iterate(4, &limits),
            Err(Error::ResourceLimit { depth: 4, limit: 3 })
        ));
        assert!(type_census(4, &limits).is_err());
    }

    #[test]
    fn render_base_by_class() {
        let svg = render(0, RenderStyle::ByClass, &Limits::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 15);
        assert_eq!(svg.matches(r#"class="occupied""#).count(), 1);
        assert_eq!(svg.matches(r#"class="covered""#).count(), 0);
        let again = render(0, RenderStyle::ByClass, &Limits::default()).unwrap();
        assert_eq!(svg, again);
    }

    #[test]
    fn render_plain_fills_only_occupied() {
        let svg = render(5, RenderStyle::Plain, &Limits::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 15 * 32);
        assert_eq!(svg.matches(r##"fill="#000000""##).count(), 32);
    }
}
