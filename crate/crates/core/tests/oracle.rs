//! Geometry against the symbolic engine.

use std::collections::{BTreeSet, HashSet};

use levy_core::dragon::{self, Limits, TypeCode};
use levy_core::lattice::{Corner, LatticeTriangle};
use levy_core::typedyn::{self, TypeCensus, FIRST_CHILD_SOURCES, SECOND_CHILD_SOURCES};
use rand::{Rng, SeedableRng};

fn random_triangle(rng: &mut impl Rng) -> LatticeTriangle {
    let mut t = LatticeTriangle::base().translate(rng.gen_range(-4..4), rng.gen_range(-4..4));
    for _ in 0..rng.gen_range(0..18) {
        t = match rng.gen_range(0..5) {
            0 => t.subdivide().0,
            1 => t.subdivide().1,
            2 => t.rotate_clockwise(Corner::Left),
            3 => t.rotate_clockwise(Corner::Top),
            _ => t.rotate_clockwise(Corner::Right),
        };
    }
    t
}

/// Every triangle of the child's star is an exterior child of exactly one
/// triangle near the parent, and that triangle sits at the star position
/// named by the child-type formula.
#[test]
fn child_type_formulas_follow_from_geometry() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..300 {
        let t = random_triangle(&mut rng);
        let star = t.star();
        let region: HashSet<LatticeTriangle> =
            star.iter().flat_map(|s| s.star().entries().to_vec()).collect();
        let (c1, c2) = t.subdivide();
        for (child, sources) in [(c1, FIRST_CHILD_SOURCES), (c2, SECOND_CHILD_SOURCES)] {
            let child_star = child.star();
            for j in 1..=15 {
                let target = child_star[j];
                let parents: Vec<&LatticeTriangle> = region
                    .iter()
                    .filter(|s| {
                        let (l, r) = s.exterior_children();
                        l == target || r == target
                    })
                    .collect();
                assert_eq!(parents, vec![&star[sources[j - 1]]], "{t:?} child entry {j}");
            }
        }
    }
}

#[test]
fn census_matches_symbolic_evolution_to_depth_12() {
    let limits = Limits::default();
    let mut symbolic = TypeCensus::seed();
    for k in 0..=12 {
        let geometric = dragon::type_census(k, &limits).unwrap();
        assert_eq!(geometric.first_difference(&symbolic), None, "k = {k}");
        assert_eq!(
            typedyn::boundary_count(&symbolic),
            dragon::boundary_count_geometric(k, &limits).unwrap().into()
        );
        symbolic = typedyn::evolve_step(&symbolic);
    }
}

#[test]
fn covered_triangles_stay_covered() {
    let limits = Limits::default();
    let occ14 = dragon::iterate(14, &limits).unwrap();
    let occ15 = dragon::iterate(15, &limits).unwrap();
    let covered: Vec<_> = occ14
        .triangles()
        .filter(|t| dragon::neighborhood_type(t, &occ14).unwrap().is_covered())
        .copied()
        .collect();
    assert_eq!(covered.len(), 8);
    for t in covered {
        let (a, b) = t.subdivide();
        assert!(dragon::neighborhood_type(&a, &occ15).unwrap().is_covered());
        assert!(dragon::neighborhood_type(&b, &occ15).unwrap().is_covered());
    }
}

#[test]
fn sequence_and_distinct_counts_at_fourteen() {
    let occ = dragon::iterate(14, &Limits::default()).unwrap();
    let s = dragon::coverage(&occ);
    assert_eq!(s.occupied_sequences, 1 << 14);
    assert_eq!(s.covered_distinct, 8);
    assert_eq!(s.covered_sequences, 8);
    assert_eq!(s.boundary_distinct, (1 << 14) - 8);
}

#[test]
fn late_type_sets_stay_inside_stable_set() {
    let stable = typedyn::stable_set().unwrap();
    let mut set: BTreeSet<TypeCode> = TypeCensus::seed().support().collect();
    for k in 1..=60 {
        set = typedyn::successor_set(&set);
        if k >= 19 {
            assert!(set.iter().all(|c| stable.contains(*c)), "k = {k}");
        }
    }
    assert_eq!(&set, stable.codes());
}
