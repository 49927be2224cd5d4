//! Cross-checks between the geometric and symbolic computations.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::dragon::{self, CoverageSummary, Limits, TypeCode};
use crate::error::Result;
use crate::spectral;
use crate::typedyn::{self, TypeCensus};

/// Largest depth at which all `2^k` map compositions are enumerated.
pub const MAP_AGREEMENT_DEPTH: u32 = 12;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub depth_max: u32,
    pub checks: Vec<Check>,
    /// First depth with a covered triangle, if any.
    pub first_covered: Option<u32>,
    /// Coverage counts at every depth.
    pub coverage: Vec<CoverageSummary>,
    /// First census entry where geometry and symbolic evolution disagree.
    pub first_divergence: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn final_coverage(&self) -> Option<&CoverageSummary> {
        self.coverage.last()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} {}: {}", c.name, c.detail).unwrap();
        }
        if let Some(s) = self.final_coverage() {
            writeln!(out, "depth={}", s.level).unwrap();
            writeln!(out, "covered={}", s.covered_distinct).unwrap();
            writeln!(out, "covered_sequences={}", s.covered_sequences).unwrap();
            writeln!(out, "boundary={}", s.boundary_distinct).unwrap();
            writeln!(out, "boundary_sequences={}", s.boundary_sequences).unwrap();
        }
        match self.first_covered {
            Some(k) => writeln!(out, "first_covered={k}").unwrap(),
            None => writeln!(out, "first_covered=none").unwrap(),
        }
        if let Some(d) = &self.first_divergence {
            writeln!(out, "first_divergence={d}").unwrap();
        }
        writeln!(out, "result={}", if self.passed() { "pass" } else { "fail" }).unwrap();
        out
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

pub fn verify(depth_max: u32, limits: &Limits) -> Result<VerificationReport> {
    limits.check(depth_max)?;
    let mut checks = Vec::new();
    let mut coverage = Vec::new();
    let mut first_divergence = None;

    let mut symbolic = TypeCensus::seed();
    let mut census_ok = true;
    let mut boundary_ok = true;
    let mut covered_ok = true;
    for k in 0..=depth_max {
        let occ = dragon::iterate(k, limits)?;
        let geometric = dragon::census_of(&occ);
        if let Some((code, g, s)) = geometric.first_difference(&symbolic) {
            census_ok = false;
            first_divergence.get_or_insert(format!(
                "k={k} code={code} geometric={g} symbolic={s}"
            ));
        }
        let summary = dragon::coverage(&occ);
        if typedyn::boundary_count(&symbolic) != summary.boundary_distinct.into() {
            boundary_ok = false;
        }
        if symbolic.get(TypeCode::COVERED) != summary.covered_distinct.into() {
            covered_ok = false;
        }
        coverage.push(summary);
        symbolic = typedyn::evolve_step(&symbolic);
    }
    checks.push(check(
        "census",
        census_ok,
        format!("geometric and symbolic type census for k=0..={depth_max}"),
    ));
    checks.push(check(
        "boundary_count",
        boundary_ok,
        format!("non-covered occupied triangles for k=0..={depth_max}"),
    ));
    checks.push(check(
        "covered_count",
        covered_ok,
        "covered triangles counted geometrically and symbolically",
    ));

    let map_depth = depth_max.min(MAP_AGREEMENT_DEPTH);
    let mut maps_ok = true;
    for k in 0..=map_depth {
        let occ = dragon::iterate(k, limits)?;
        let mut counts: HashMap<_, u64> = HashMap::new();
        for t in dragon::iterate_by_maps(k, limits)? {
            *counts.entry(t).or_insert(0) += 1;
        }
        maps_ok &= counts.len() == occ.len()
            && counts.iter().all(|(t, &m)| occ.multiplicity(t) == m);
    }
    checks.push(check(
        "map_replacement",
        maps_ok,
        format!("composed maps equal exterior replacement for k=0..={map_depth}"),
    ));

    let first_covered = coverage
        .iter()
        .find(|s| s.covered_distinct > 0)
        .map(|s| s.level);

    checks.push(matrix_check());

    Ok(VerificationReport {
        depth_max,
        checks,
        first_covered,
        coverage,
        first_divergence,
    })
}

fn matrix_check() -> Check {
    let result = spectral::core_pipeline().map(|(m, blocks)| {
        let rows_ok = m.matrix().row_sums().iter().all(|&s| s == 2);
        let perm_ok = spectral::check_permutation(&blocks.p);
        let diag_ok = blocks.absorbing_diagonal.iter().all(|&d| d == 2);
        let (t, c, a) = m.block_sizes();
        (
            rows_ok && perm_ok && diag_ok,
            format!(
                "{}x{} with blocks {t}/{c}/{a}, row sums 2: {rows_ok}, permutation block: {perm_ok}, absorbing diagonal {:?}",
                m.dimension(),
                m.dimension(),
                blocks.absorbing_diagonal
            ),
        )
    });
    match result {
        Ok((passed, detail)) => check("matrix_structure", passed, detail),
        Err(e) => check("matrix_structure", false, e.to_string()),
    }
}
