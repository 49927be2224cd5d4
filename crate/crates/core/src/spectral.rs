//! Transition matrix over the stable types, its block structure, and the
//! Perron root of the core block.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::dragon::TypeCode;
use crate::error::{Error, Result};
use crate::graph;
use crate::typedyn::{self, child_types, TypeCensus, TypeClassification};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_BOUNDS_POWER: u32 = 30;
pub const DEFAULT_MAX_POWER: usize = 25;
pub const DEFAULT_DIGITS: u32 = 6;

/// Nonnegative integer matrix stored as sorted `(column, value)` row lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    n_cols: usize,
    rows: Vec<Vec<(usize, u32)>>,
}

impl SparseMatrix {
    pub fn from_rows(n_cols: usize, mut rows: Vec<Vec<(usize, u32)>>) -> Self {
        for row in &mut rows {
            row.retain(|&(_, v)| v != 0);
            row.sort_unstable();
            debug_assert!(row.iter().all(|&(j, _)| j < n_cols));
        }
        SparseMatrix { n_cols, rows }
    }

    pub fn from_dense(dense: &[Vec<u32>]) -> Self {
        let n_cols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| r.iter().copied().enumerate().filter(|&(_, v)| v != 0).collect())
            .collect();
        SparseMatrix { n_cols, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols
    }

    pub fn row(&self, i: usize) -> &[(usize, u32)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map_or(0, |p| self.rows[i][p].1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, v)| v as u64).sum())
            .collect()
    }

    /// Rows `rows.start..rows.end`, columns `cols.start..cols.end`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> SparseMatrix {
        let width = cols.len();
        let picked = self.rows[rows]
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|(j, _)| cols.contains(j))
                    .map(|&(j, v)| (j - cols.start, v))
                    .collect()
            })
            .collect();
        SparseMatrix {
            n_cols: width,
            rows: picked,
        }
    }

    /// `P A P^T` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SparseMatrix {
        assert!(self.is_square() && perm.len() == self.n_rows());
        let mut rows = vec![Vec::new(); self.n_rows()];
        for (i, row) in self.rows.iter().enumerate() {
            rows[perm[i]] = row.iter().map(|&(j, v)| (perm[j], v)).collect();
        }
        SparseMatrix::from_rows(self.n_cols, rows)
    }

    /// Successor lists of the digraph with an edge `i -> j` wherever the entry is nonzero.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, _)| j).collect())
            .collect()
    }

    /// Row vector times matrix.
    pub fn left_multiply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (vi, row) in v.iter().zip(&self.rows) {
            for &(j, a) in row {
                out[j] += vi * a as f64;
            }
        }
        out
    }
}

/// The transition matrix `M` over a canonically ordered stable set:
/// entry `(i, j)` counts the children of type `s_j` of a triangle of type `s_i`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    order: Vec<TypeCode>,
    index: HashMap<TypeCode, usize>,
    matrix: SparseMatrix,
    n_transient: usize,
    n_core: usize,
    n_absorbing: usize,
}

impl TransitionMatrix {
    pub fn order(&self) -> &[TypeCode] {
        &self.order
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.order.len()
    }

    /// `(transient, core, absorbing)` block sizes.
    pub fn block_sizes(&self) -> (usize, usize, usize) {
        (self.n_transient, self.n_core, self.n_absorbing)
    }

    pub fn index_of(&self, code: TypeCode) -> Option<usize> {
        self.index.get(&code).copied()
    }

    pub fn entry(&self, from: TypeCode, to: TypeCode) -> Option<u32> {
        Some(self.matrix.get(self.index_of(from)?, self.index_of(to)?))
    }

    pub fn core_range(&self) -> std::ops::Range<usize> {
        self.n_transient..self.n_transient + self.n_core
    }

    /// Header `rows cols nnz`, then one `i j value` line per nonzero (0-based).
    pub fn to_triplets(&self) -> String {
        let m = &self.matrix;
        let mut out = format!("{} {} {}\n", m.n_rows(), m.n_cols(), m.nnz());
        for (i, row) in m.rows.iter().enumerate() {
            for &(j, v) in row {
                writeln!(out, "{i} {j} {v}").unwrap();
            }
        }
        out
    }

    /// Row order and class boundaries.
    pub fn metadata(&self) -> serde_json::Value {
        let (t, c, a) = self.block_sizes();
        serde_json::json!({
            "rows": self.dimension(),
            "cols": self.dimension(),
            "nnz": self.matrix.nnz(),
            "index_base": 0,
            "order": self.order.iter().map(|c| c.value()).collect::<Vec<_>>(),
            "classes": {
                "transient": [0, t],
                "core": [t, t + c],
                "absorbing": [t + c, t + c + a],
            },
        })
    }
}

pub fn build_matrix(classification: &TypeClassification) -> Result<TransitionMatrix> {
    let order = classification.canonical_order();
    let index: HashMap<TypeCode, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut rows = Vec::with_capacity(order.len());
    for &code in &order {
        let (a, b) = child_types(code);
        let ia = *index.get(&a).ok_or(Error::Closure(code.value()))?;
        let ib = *index.get(&b).ok_or(Error::Closure(code.value()))?;
        rows.push(if ia == ib {
            vec![(ia, 2)]
        } else {
            vec![(ia, 1), (ib, 1)]
        });
    }
    let matrix = SparseMatrix::from_rows(order.len(), rows);
    Ok(TransitionMatrix {
        order,
        index,
        matrix,
        n_transient: classification.transient.len(),
        n_core: classification.core.len(),
        n_absorbing: classification.absorbing.len(),
    })
}

/// The six nonzero blocks of `M = (P Q R; 0 C L; 0 0 A)`.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub p: SparseMatrix,
    pub q: SparseMatrix,
    pub r: SparseMatrix,
    pub c: SparseMatrix,
    pub l: SparseMatrix,
    /// The absorbing block. Its off-diagonal entries are zero.
    pub absorbing: SparseMatrix,
    pub absorbing_diagonal: Vec<u32>,
}

pub fn block_partition(m: &TransitionMatrix) -> Result<BlockPartition> {
    let (t, c, a) = m.block_sizes();
    let (tr, cr, ar) = (0..t, t..t + c, t + c..t + c + a);
    let mx = &m.matrix;
    for (name, rows, cols) in [
        ("core-to-transient", cr.clone(), tr.clone()),
        ("absorbing-to-transient", ar.clone(), tr.clone()),
        ("absorbing-to-core", ar.clone(), cr.clone()),
    ] {
        let block = mx.block(rows, cols);
        if !block.is_zero() {
            return Err(Error::Structure(format!(
                "{name} block has {} nonzero entries",
                block.nnz()
            )));
        }
    }
    let absorbing = mx.block(ar.clone(), ar.clone());
    for i in 0..a {
        if absorbing.row(i).iter().any(|&(j, _)| j != i) {
            return Err(Error::Structure(
                "absorbing block has off-diagonal entries".into(),
            ));
        }
    }
    let absorbing_diagonal = (0..a).map(|i| absorbing.get(i, i)).collect();
    Ok(BlockPartition {
        p: mx.block(tr.clone(), tr.clone()),
        q: mx.block(tr.clone(), cr.clone()),
        r: mx.block(tr, ar.clone()),
        c: mx.block(cr.clone(), cr.clone()),
        l: mx.block(cr, ar),
        absorbing,
        absorbing_diagonal,
    })
}

/// Every row and every column holds exactly one nonzero entry, equal to 1.
pub fn check_permutation(p: &SparseMatrix) -> bool {
    if !p.is_square() {
        return false;
    }
    let mut col_hits = vec![0usize; p.n_cols()];
    for i in 0..p.n_rows() {
        match p.row(i) {
            [(j, 1)] => col_hits[*j] += 1,
            _ => return false,
        }
    }
    col_hits.iter().all(|&h| h == 1)
}

/// Smallest `m <= max_power` with `C^m` entrywise positive.
pub fn primitivity_exponent(c: &SparseMatrix, max_power: usize) -> Result<usize> {
    if !c.is_square() || c.n_rows() == 0 {
        return Err(Error::InvalidArgument("primitivity needs a nonempty square matrix".into()));
    }
    let n = c.n_rows();
    let words = n.div_ceil(64);
    let full_last = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let is_full = |row: &[u64]| {
        row[..words - 1].iter().all(|&w| w == u64::MAX) && row[words - 1] == full_last
    };

    // reach[i] = support of row i of C^m
    let mut reach: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut bits = vec![0u64; words];
            for &(j, _) in c.row(i) {
                bits[j / 64] |= 1 << (j % 64);
            }
            bits
        })
        .collect();
    for m in 1..=max_power {
        if reach.iter().all(|r| is_full(r)) {
            return Ok(m);
        }
        // C^{m+1} = C * C^m: row i is the union of the rows of its successors
        let next: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut bits = vec![0u64; words];
                for &(j, _) in c.row(i) {
                    for (b, r) in bits.iter_mut().zip(&reach[j]) {
                        *b |= r;
                    }
                }
                bits
            })
            .collect();
        reach = next;
    }
    Err(Error::NotPrimitive(format!(
        "no power up to {max_power} is positive"
    )))
}

/// Irreducible with period one.
pub fn is_primitive(c: &SparseMatrix) -> bool {
    c.is_square() && graph::period(&c.adjacency()) == Some(1)
}

/// Perron root estimate by left power iteration.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PowerMethodResult {
    pub lambda: f64,
    pub iterations: usize,
}

/// Iterates `v <- vC` from the all-ones vector with sup-norm renormalization.
///
/// Stops when successive Rayleigh quotients `<v, vC> / <v, v>` differ by less
/// than `tolerance`, or when the normalized iterate itself stops moving.
/// Refuses matrices that are not primitive, since the iteration has no
/// reason to converge for them.
pub fn power_method(c: &SparseMatrix, tolerance: f64, max_iterations: usize) -> Result<PowerMethodResult> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    if !is_primitive(c) {
        return Err(Error::NotPrimitive(
            "power iteration needs a simple dominant eigenvalue".into(),
        ));
    }
    let n = c.n_rows();
    let mut v = vec![1.0; n];
    let mut previous: Option<f64> = None;
    for iteration in 1..=max_iterations {
        let w = c.left_multiply(&v);
        let vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let vv: f64 = v.iter().map(|a| a * a).sum();
        let estimate = vw / vv;
        let scale = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if scale == 0.0 {
            return Err(Error::NoConvergence(iteration));
        }
        let w: Vec<f64> = w.iter().map(|x| x / scale).collect();
        let drift = v.iter().zip(&w).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let settled = previous.is_some_and(|p| (estimate - p).abs() < tolerance);
        if settled || drift < tolerance {
            return Ok(PowerMethodResult {
                lambda: estimate,
                iterations: iteration,
            });
        }
        previous = Some(estimate);
        v = w;
    }
    Err(Error::NoConvergence(max_iterations))
}

/// Row sums of `C^k`, i.e. `C^k · 1`, in exact arithmetic.
pub fn exact_row_sums(c: &SparseMatrix, k: u32) -> Vec<BigUint> {
    let mut w: Vec<BigUint> = vec![BigUint::one(); c.n_rows()];
    for _ in 0..k {
        w = (0..c.n_rows())
            .map(|i| c.row(i).iter().map(|&(j, a)| &w[j] * a).sum())
            .collect();
    }
    w
}

/// Dense `C^k` with checked 128-bit entries.
pub fn exact_power(c: &SparseMatrix, k: u32) -> Result<Vec<Vec<u128>>> {
    let n = c.n_rows();
    let mut acc: Vec<Vec<u128>> = (0..n)
        .map(|i| {
            let mut row = vec![0u128; n];
            row[i] = 1;
            row
        })
        .collect();
    for _ in 0..k {
        let mut next = vec![vec![0u128; n]; n];
        for (i, out) in next.iter_mut().enumerate() {
            for &(j, a) in c.row(i) {
                for (o, x) in out.iter_mut().zip(&acc[j]) {
                    *o = x
                        .checked_mul(a as u128)
                        .and_then(|y| o.checked_add(y))
                        .ok_or(Error::Overflow)?;
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// A nonnegative decimal `scaled / 10^digits`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertifiedDecimal {
    scaled: BigUint,
    digits: u32,
}

impl CertifiedDecimal {
    pub fn new(scaled: BigUint, digits: u32) -> Self {
        CertifiedDecimal { scaled, digits }
    }

    pub fn scaled(&self) -> &BigUint {
        &self.scaled
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().expect("decimal string parses")
    }

    /// `self^k <= n`, exactly.
    pub fn pow_le(&self, k: u32, n: &BigUint) -> bool {
        self.scaled.pow(k) <= n * ten_pow(self.digits * k)
    }

    /// `self^k >= n`, exactly.
    pub fn pow_ge(&self, k: u32, n: &BigUint) -> bool {
        self.scaled.pow(k) >= n * ten_pow(self.digits * k)
    }

    /// Exact comparison against `num / 10^digits` at possibly different precision.
    pub fn cmp_decimal(&self, other: &CertifiedDecimal) -> std::cmp::Ordering {
        let d = self.digits.max(other.digits);
        let a = &self.scaled * ten_pow(d - self.digits);
        let b = &other.scaled * ten_pow(d - other.digits);
        a.cmp(&b)
    }
}

impl fmt::Display for CertifiedDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.scaled.to_string();
        let d = self.digits as usize;
        if d == 0 {
            return f.write_str(&s);
        }
        let s = format!("{s:0>width$}", width = d + 1);
        let (int, frac) = s.split_at(s.len() - d);
        write!(f, "{int}.{frac}")
    }
}

impl std::str::FromStr for CertifiedDecimal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let digits: String = format!("{int}{frac}");
        let scaled = digits
            .parse::<BigUint>()
            .map_err(|e| Error::InvalidArgument(format!("bad decimal {s:?}: {e}")))?;
        Ok(CertifiedDecimal::new(scaled, frac.len() as u32))
    }
}

impl Serialize for CertifiedDecimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn ten_pow(e: u32) -> BigUint {
    BigUint::from(10u32).pow(e)
}

fn serialize_decimal_string<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// Interval for the Perron root from the extreme row sums of `C^k`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CertifiedBounds {
    pub power: u32,
    #[serde(serialize_with = "serialize_decimal_string")]
    pub min_row_sum: BigUint,
    #[serde(serialize_with = "serialize_decimal_string")]
    pub max_row_sum: BigUint,
    /// Largest decimal with `lower^k <= min_row_sum`.
    pub lower: CertifiedDecimal,
    /// Smallest decimal with `upper^k >= max_row_sum`.
    pub upper: CertifiedDecimal,
}

/// Bounds `u_k^{1/k} <= lambda <= U_k^{1/k}` rounded outward to `digits`
/// decimals, with both roots checked by exact integer powers.
pub fn rigorous_bounds(c: &SparseMatrix, k: u32, digits: u32) -> Result<CertifiedBounds> {
    if k == 0 {
        return Err(Error::InvalidArgument("bounds power must be at least 1".into()));
    }
    let sums = exact_row_sums(c, k);
    let min_row_sum = sums.iter().min().cloned().unwrap_or_default();
    let max_row_sum = sums.iter().max().cloned().unwrap_or_default();
    bounds_from_row_sums(k, min_row_sum, max_row_sum, digits)
}

pub fn bounds_from_row_sums(
    k: u32,
    min_row_sum: BigUint,
    max_row_sum: BigUint,
    digits: u32,
) -> Result<CertifiedBounds> {
    let scale = ten_pow(digits * k);
    let lower = CertifiedDecimal::new((&min_row_sum * &scale).nth_root(k), digits);
    let mut upper_scaled = (&max_row_sum * &scale).nth_root(k);
    if upper_scaled.pow(k) < &max_row_sum * &scale {
        upper_scaled += 1u32;
    }
    let upper = CertifiedDecimal::new(upper_scaled, digits);
    if !lower.pow_le(k, &min_row_sum) || !upper.pow_ge(k, &max_row_sum) {
        return Err(Error::Structure("root certificate failed".into()));
    }
    Ok(CertifiedBounds {
        power: k,
        min_row_sum,
        max_row_sum,
        lower,
        upper,
    })
}

/// Solution `s` of `alpha * c^s = 1`.
pub fn dimension_from_growth(alpha: f64, c: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 1.0 || c.is_nan() || c <= 0.0 || c >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "need alpha >= 1 and 0 < c < 1, got alpha = {alpha}, c = {c}"
        )));
    }
    Ok(-alpha.ln() / c.ln())
}

/// Dimension for growth rate `lambda` under contraction ratio `1/sqrt(2)`.
pub fn boundary_dimension(lambda: f64) -> Result<f64> {
    dimension_from_growth(lambda, std::f64::consts::FRAC_1_SQRT_2)
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct GrowthStep {
    pub k: usize,
    #[serde(serialize_with = "serialize_decimal_string")]
    pub boundary: BigUint,
    /// `|B_k| / |B_{k-1}|`.
    pub ratio: Option<f64>,
}

/// `|B_k|` for `k = 0..=k_max` by symbolic evolution of `start`.
pub fn boundary_growth_series(start: &TypeCensus, k_max: usize) -> Vec<GrowthStep> {
    let mut census = start.clone();
    let mut out: Vec<GrowthStep> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let boundary = typedyn::boundary_count(&census);
        let ratio = out.last().and_then(|prev| big_ratio(&boundary, &prev.boundary));
        out.push(GrowthStep { k, boundary, ratio });
        if k < k_max {
            census = typedyn::evolve_step(&census);
        }
    }
    out
}

fn big_ratio(a: &BigUint, b: &BigUint) -> Option<f64> {
    if b.is_zero() {
        return None;
    }
    let shift = a.bits().max(b.bits()).saturating_sub(60);
    Some((a >> shift).to_f64()? / (b >> shift).to_f64()?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub lambda_estimate: f64,
    pub iterations_used: usize,
    pub tolerance: f64,
    pub dimension_estimate: f64,
    pub bounds: CertifiedBounds,
    pub lower_bound: CertifiedDecimal,
    pub upper_bound: CertifiedDecimal,
    /// Certified lower bound squared exceeds 2.
    pub lambda_exceeds_sqrt2: bool,
    pub primitivity_exponent: usize,
    pub matrix_dimension: usize,
    pub core_dimension: usize,
    pub absorbing_diagonal: Vec<u32>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SpectralConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub bounds_power: u32,
    pub max_power: usize,
    pub digits: u32,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            bounds_power: DEFAULT_BOUNDS_POWER,
            max_power: DEFAULT_MAX_POWER,
            digits: DEFAULT_DIGITS,
        }
    }
}

/// Stable set, classification, matrix and blocks in one go.
pub fn core_pipeline() -> Result<(TransitionMatrix, BlockPartition)> {
    let stable = typedyn::stable_set()?;
    let classes = typedyn::classify(&stable)?;
    let m = build_matrix(&classes)?;
    let blocks = block_partition(&m)?;
    Ok((m, blocks))
}

pub fn spectral_report(config: &SpectralConfig) -> Result<SpectralReport> {
    let (m, blocks) = core_pipeline()?;
    let c = &blocks.c;
    let primitivity = primitivity_exponent(c, config.max_power)?;
    let pm = power_method(c, config.tolerance, config.max_iterations)?;
    let bounds = rigorous_bounds(c, config.bounds_power, config.digits)?;
    let lambda_exceeds_sqrt2 = !bounds.lower.pow_le(2, &BigUint::from(2u32));
    Ok(SpectralReport {
        lambda_estimate: pm.lambda,
        iterations_used: pm.iterations,
        tolerance: config.tolerance,
        dimension_estimate: boundary_dimension(pm.lambda)?,
        lower_bound: bounds.lower.clone(),
        upper_bound: bounds.upper.clone(),
        bounds,
        lambda_exceeds_sqrt2,
        primitivity_exponent: primitivity,
        matrix_dimension: m.dimension(),
        core_dimension: c.n_rows(),
        absorbing_diagonal: blocks.absorbing_diagonal.clone(),
    })
}
