//! Symbolic neighborhood-type dynamics.
//!
//! The type of each subdivision child is a bit-gather of its parent's type,
//! so the whole census of `N_k` evolves without touching geometry.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::dragon::TypeCode;
use crate::error::{Error, Result};
use crate::graph::strongly_connected_components;
use crate::lattice::STAR_SIZE;

/// Star position (1-based) of the parent feeding each star position of the
/// child holding the parent's left vertex.
pub const FIRST_CHILD_SOURCES: [usize; STAR_SIZE] = [8, 1, 9, 8, 10, 9, 1, 10, 15, 3, 2, 5, 4, 7, 6];

/// Same for the child holding the parent's right vertex.
pub const SECOND_CHILD_SOURCES: [usize; STAR_SIZE] =
    [10, 1, 12, 11, 14, 13, 2, 15, 3, 8, 1, 9, 8, 10, 9];

/// Iteration bound for [`stable_set`].
pub const DEFAULT_STABILIZATION_BOUND: usize = 10_000;

fn gather(code: TypeCode, sources: &[usize; STAR_SIZE]) -> TypeCode {
    let mut flags = [false; STAR_SIZE];
    for (flag, &src) in flags.iter_mut().zip(sources) {
        *flag = code.bit(src);
    }
    TypeCode::from_flags(flags)
}

/// Types of the two subdivision children (left-vertex child first).
pub fn child_types(code: TypeCode) -> (TypeCode, TypeCode) {
    (
        gather(code, &FIRST_CHILD_SOURCES),
        gather(code, &SECOND_CHILD_SOURCES),
    )
}

/// Number of triangles of each type. Zero counts are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TypeCensus {
    counts: BTreeMap<TypeCode, BigUint>,
}

impl TypeCensus {
    pub fn new() -> Self {
        Self::default()
    }

    /// The census of `N_0`: each single-bit type exactly once.
    pub fn seed() -> Self {
        (1..=STAR_SIZE).map(|i| (TypeCode::single(i), 1u32)).collect()
    }

    pub fn add(&mut self, code: TypeCode, n: impl Into<BigUint>) {
        let n = n.into();
        if n.is_zero() {
            return;
        }
        *self.counts.entry(code).or_default() += n;
    }

    pub fn get(&self, code: TypeCode) -> BigUint {
        self.counts.get(&code).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TypeCode, &BigUint)> {
        self.counts.iter().map(|(&c, n)| (c, n))
    }

    /// Types with nonzero count, ascending.
    pub fn support(&self) -> impl Iterator<Item = TypeCode> + '_ {
        self.counts.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total_mass(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// First type (ascending) whose count differs between the two censuses.
    pub fn first_difference(&self, other: &TypeCensus) -> Option<(TypeCode, BigUint, BigUint)> {
        let keys: BTreeSet<TypeCode> = self.support().chain(other.support()).collect();
        keys.into_iter().find_map(|c| {
            let (a, b) = (self.get(c), other.get(c));
            (a != b).then_some((c, a, b))
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("census serializes")
    }
}

impl<N: Into<BigUint>> FromIterator<(TypeCode, N)> for TypeCensus {
    fn from_iter<I: IntoIterator<Item = (TypeCode, N)>>(iter: I) -> Self {
        let mut census = TypeCensus::new();
        for (code, n) in iter {
            census.add(code, n);
        }
        census
    }
}

impl fmt::Debug for TypeCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.counts.iter().map(|(c, n)| (c.value(), n.to_string())))
            .finish()
    }
}

/// `{"code": count}` with decimal string keys and exact integer values.
impl Serialize for TypeCensus {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (code, n) in &self.counts {
            let number: serde_json::Number = n
                .to_string()
                .parse()
                .map_err(serde::ser::Error::custom)?;
            map.serialize_entry(&code.value().to_string(), &number)?;
        }
        map.end()
    }
}

pub fn evolve_step(census: &TypeCensus) -> TypeCensus {
    let mut next = TypeCensus::new();
    for (code, n) in census.iter() {
        let (a, b) = child_types(code);
        next.add(a, n.clone());
        next.add(b, n.clone());
    }
    next
}

pub fn evolve(census: &TypeCensus, steps: usize) -> TypeCensus {
    let mut cur = census.clone();
    for _ in 0..steps {
        cur = evolve_step(&cur);
    }
    cur
}

/// Number of occupied, non-covered triangles: the mass on odd codes other than 32767.
pub fn boundary_count(census: &TypeCensus) -> BigUint {
    census
        .iter()
        .filter(|(c, _)| c.is_boundary())
        .map(|(_, n)| n)
        .sum()
}

/// All children of all codes in `set`.
pub fn successor_set(set: &BTreeSet<TypeCode>) -> BTreeSet<TypeCode> {
    set.iter()
        .flat_map(|&c| {
            let (a, b) = child_types(c);
            [a, b]
        })
        .collect()
}

/// The fixed point of the type-set iteration started from the types of `N_0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StableSet {
    codes: BTreeSet<TypeCode>,
    depth: usize,
}

impl StableSet {
    pub fn codes(&self) -> &BTreeSet<TypeCode> {
        &self.codes
    }

    /// Smallest `k` with `S_k = S_{k+1}`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, code: TypeCode) -> bool {
        self.codes.contains(&code)
    }
}

pub fn stable_set() -> Result<StableSet> {
    stable_set_within(DEFAULT_STABILIZATION_BOUND)
}

pub fn stable_set_within(bound: usize) -> Result<StableSet> {
    let mut cur: BTreeSet<TypeCode> = TypeCensus::seed().support().collect();
    for depth in 0..bound {
        let next = successor_set(&cur);
        if next == cur {
            return Ok(StableSet { codes: cur, depth });
        }
        cur = next;
    }
    Err(Error::Diverged(bound))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum TypeClass {
    Transient,
    Core,
    Absorbing,
}

impl fmt::Display for TypeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeClass::Transient => "transient",
            TypeClass::Core => "core",
            TypeClass::Absorbing => "absorbing",
        })
    }
}

/// Partition of a stable set into absorbing, transient and core types,
/// each sorted ascending.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypeClassification {
    pub absorbing: Vec<TypeCode>,
    pub transient: Vec<TypeCode>,
    pub core: Vec<TypeCode>,
}

impl TypeClassification {
    /// Transient types, then core, then absorbing.
    pub fn canonical_order(&self) -> Vec<TypeCode> {
        self.transient
            .iter()
            .chain(&self.core)
            .chain(&self.absorbing)
            .copied()
            .collect()
    }

    pub fn class_of(&self, code: TypeCode) -> Option<TypeClass> {
        if self.transient.binary_search(&code).is_ok() {
            Some(TypeClass::Transient)
        } else if self.core.binary_search(&code).is_ok() {
            Some(TypeClass::Core)
        } else if self.absorbing.binary_search(&code).is_ok() {
            Some(TypeClass::Absorbing)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.absorbing.len() + self.transient.len() + self.core.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Classifies a closed type set from the structure of its child digraph.
///
/// Absorbing types are their own two children. Among the rest, a strongly
/// connected component in which every type has exactly one child inside the
/// component is a permutation cycle and its types are transient; everything
/// else is core.
pub fn classify(stable: &StableSet) -> Result<TypeClassification> {
    let codes: Vec<TypeCode> = stable.codes.iter().copied().collect();
    for &c in &codes {
        let (a, b) = child_types(c);
        if !stable.contains(a) || !stable.contains(b) {
            return Err(Error::Closure(c.value()));
        }
    }

    let (absorbing, rest): (Vec<TypeCode>, Vec<TypeCode>) =
        codes.iter().partition(|&&c| child_types(c) == (c, c));
    if absorbing != [TypeCode::EMPTY, TypeCode::COVERED] {
        return Err(Error::Classification(format!(
            "absorbing types are {absorbing:?}, expected the empty and covered types"
        )));
    }

    let index: HashMap<TypeCode, usize> = rest.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let adj: Vec<Vec<usize>> = rest
        .iter()
        .map(|&c| {
            let (a, b) = child_types(c);
            [a, b].iter().filter_map(|x| index.get(x).copied()).collect()
        })
        .collect();

    let mut transient = Vec::new();
    let mut core = Vec::new();
    for comp in strongly_connected_components(&adj) {
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        let is_cycle = comp
            .iter()
            .all(|&v| adj[v].iter().filter(|w| members.contains(w)).count() == 1);
        let target = if is_cycle { &mut transient } else { &mut core };
        target.extend(comp.iter().map(|&v| rest[v]));
    }
    transient.sort_unstable();
    core.sort_unstable();
    if core.is_empty() {
        return Err(Error::Classification("no core types".into()));
    }
    Ok(TypeClassification {
        absorbing,
        transient,
        core,
    })
}
