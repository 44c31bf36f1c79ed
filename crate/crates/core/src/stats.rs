//! Statistics of short dual words: `w_S`, the mode of size `s`, the relative
//! mode over a subfield's torus points, and genericity of `(c+1)`-tuples.
//!
//! Sampling is seeded per sample index (ChaCha8, stream = sample index), so
//! reports depend only on the inputs and never on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::codes::{evaluation_matrix, has_word_with_support, EvaluationMatrix, MAX_SUPPORT};
use crate::error::{Error, Result};
use crate::gf::{embed, Field, FieldDescriptor};
use crate::linalg::EchelonBasis;
use crate::polytope::{LatticePolytope, Point};

/// Tuple spaces up to this size are counted exhaustively.
pub const EXHAUSTIVE_TUPLE_LIMIT: u128 = 1_000_000;

/// Weight of the shortest dual word whose support contains `S`, or
/// `Unbounded` when none exists within the extension budget.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WValue {
    Finite(usize),
    Unbounded,
}

impl fmt::Display for WValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WValue::Finite(n) => write!(f, "{n}"),
            WValue::Unbounded => write!(f, "unbounded"),
        }
    }
}

impl Serialize for WValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WValue::Finite(n) => s.serialize_u64(*n as u64),
            WValue::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Counts per `w` value, ascending, `unbounded` last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram(pub BTreeMap<WValue, u64>);

impl Histogram {
    pub fn add(&mut self, w: WValue) {
        *self.0.entry(w).or_insert(0) += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn get(&self, w: WValue) -> u64 {
        self.0.get(&w).copied().unwrap_or(0)
    }

    /// Most frequent value; ties go to the smaller value.
    pub fn mode(&self) -> Option<WValue> {
        let mut best: Option<(WValue, u64)> = None;
        for (&w, &n) in &self.0 {
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((w, n));
            }
        }
        best.map(|(w, _)| w)
    }
}

impl Serialize for Histogram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (w, n) in &self.0 {
            map.serialize_entry(&w.to_string(), n)?;
        }
        map.end()
    }
}

/// Calls `visit` on each `k`-subset of `0..n` in lexicographic order until it
/// returns `Some`.
fn find_subset<T>(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<Option<T>>) -> Result<Option<T>> {
    if k > n {
        return Ok(None);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let Some(v) = visit(&idx)? {
            return Ok(Some(v));
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return Ok(None);
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i + 1) as u128)
}

/// `w_S` by iterative deepening over the extension size `e = 0..=max_extension`:
/// the first `e` for which some `S ∪ E` (`|E| = e`, lexicographic over the
/// remaining rows) is exactly the support of a dual word gives `|S| + e`.
/// Only nonzero words count, so `w_∅` is the dual minimum distance.
pub fn w_s(a: &EvaluationMatrix, s: &[usize], max_extension: usize) -> Result<WValue> {
    if s.len() > MAX_SUPPORT {
        return Err(Error::BudgetExceeded(format!("|S| = {} > {MAX_SUPPORT}", s.len())));
    }
    a.rank_of_subset(s)?;
    let mut in_s = vec![false; a.rows()];
    for &i in s {
        in_s[i] = true;
    }
    let rest: Vec<usize> = (0..a.rows()).filter(|&i| !in_s[i]).collect();
    let field = &**a.field();
    let mut base = EchelonBasis::new(field, a.cols());
    for &i in s {
        base.insert(a.row(i));
    }
    for e in 0..=max_extension.min(rest.len()) {
        if s.len() + e > MAX_SUPPORT {
            return Err(Error::BudgetExceeded(format!(
                "support {} > {MAX_SUPPORT}",
                s.len() + e
            )));
        }
        let mut support = s.to_vec();
        let mut basis = base.clone();
        if extend(a, &rest, e, 0, &mut support, &mut basis)? {
            return Ok(WValue::Finite(s.len() + e));
        }
    }
    Ok(WValue::Unbounded)
}

fn extend(
    a: &EvaluationMatrix,
    rest: &[usize],
    remaining: usize,
    from: usize,
    support: &mut Vec<usize>,
    basis: &mut EchelonBasis<'_>,
) -> Result<bool> {
    if remaining == 0 {
        // independent rows carry no word
        if basis.rank() == support.len() {
            return Ok(false);
        }
        return has_word_with_support(a, support);
    }
    for k in from..=rest.len() - remaining {
        let row = rest[k];
        let depth = basis.rank();
        basis.insert(a.row(row));
        support.push(row);
        let found = extend(a, rest, remaining - 1, k + 1, support, basis)?;
        support.pop();
        basis.truncate(depth);
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Budgets and seed for [`mode`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeConfig {
    /// Enumerate every subset when there are at most this many.
    pub exhaustive_threshold: u64,
    pub samples: u64,
    pub seed: u64,
    pub max_extension: usize,
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig {
            exhaustive_threshold: 10_000,
            samples: 2000,
            seed: 0,
            max_extension: 3,
        }
    }
}

/// Report form of a polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolytopeDescriptor {
    pub m: usize,
    pub vertices: Vec<Point>,
    pub lattice_point_count: usize,
}

impl From<&LatticePolytope> for PolytopeDescriptor {
    fn from(p: &LatticePolytope) -> Self {
        PolytopeDescriptor {
            m: p.dim(),
            vertices: p.vertices().to_vec(),
            lattice_point_count: p.lattice_point_count(),
        }
    }
}

/// Histogram of `w_S` over size-`s` supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeReport {
    pub s: usize,
    pub histogram: Histogram,
    /// Restriction of the histogram to supports with `rank(A_S) = |S|`.
    pub independent_histogram: Histogram,
    pub mode: WValue,
    pub sample_count: u64,
    pub exhaustive: bool,
    pub seed: u64,
    pub max_extension: usize,
    pub field: FieldDescriptor,
    /// Present for a relative mode: the subfield whose torus points form `B`.
    pub base_field: Option<FieldDescriptor>,
    /// `|B|`, the number of rows subsets are drawn from.
    pub base_size: usize,
    pub polytope: PolytopeDescriptor,
}

impl ModeReport {
    /// Entries of the independent histogram outside `allowed`.
    pub fn independent_outside(&self, allowed: &[WValue]) -> Vec<(WValue, u64)> {
        self.independent_histogram
            .0
            .iter()
            .filter(|(w, _)| !allowed.contains(w))
            .map(|(&w, &n)| (w, n))
            .collect()
    }
}

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform `s`-subset of `0..n` by rejection over index tuples, sorted.
fn sample_subset(rng: &mut ChaCha8Rng, n: usize, s: usize) -> Vec<usize> {
    loop {
        let mut pick: Vec<usize> = (0..s).map(|_| rng.gen_range(0..n)).collect();
        pick.sort_unstable();
        if pick.windows(2).all(|w| w[0] != w[1]) {
            return pick;
        }
    }
}

/// Mode of size `s` of `C_P^*` over all rows.
pub fn mode(a: &EvaluationMatrix, s: usize, config: &ModeConfig) -> Result<ModeReport> {
    let all: Vec<usize> = (0..a.rows()).collect();
    mode_over(a, &all, s, config)
}

/// Mode of size `s` with `S` ranging over subsets of `base` (sorted rows).
pub fn mode_over(a: &EvaluationMatrix, base: &[usize], s: usize, config: &ModeConfig) -> Result<ModeReport> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    let n = base.len();
    if s > n {
        return Err(Error::InvalidArgument(format!(
            "s = {s} exceeds the {n} available rows"
        )));
    }
    let total = binomial(n, s);
    let exhaustive = total <= config.exhaustive_threshold as u128;
    let subsets: Vec<Vec<usize>> = if exhaustive {
        let mut out = Vec::with_capacity(total as usize);
        find_subset(n, s, |idx| {
            out.push(idx.iter().map(|&i| base[i]).collect());
            Ok(None::<()>)
        })?;
        out
    } else {
        if config.samples == 0 {
            return Err(Error::InvalidArgument("samples must be positive".into()));
        }
        (0..config.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(config.seed, i);
                sample_subset(&mut rng, n, s).into_iter().map(|k| base[k]).collect()
            })
            .collect()
    };

    let results: Vec<(WValue, bool)> = subsets
        .par_iter()
        .map(|sub| {
            let w = w_s(a, sub, config.max_extension)?;
            Ok((w, a.rank_of_subset(sub)? == sub.len()))
        })
        .collect::<Result<_>>()?;

    let mut histogram = Histogram::default();
    let mut independent_histogram = Histogram::default();
    for &(w, independent) in &results {
        histogram.add(w);
        if independent {
            independent_histogram.add(w);
        }
    }
    Ok(ModeReport {
        s,
        mode: histogram.mode().expect("at least one subset"),
        histogram,
        independent_histogram,
        sample_count: results.len() as u64,
        exhaustive,
        seed: config.seed,
        max_extension: config.max_extension,
        field: a.field().descriptor(),
        base_field: None,
        base_size: n,
        polytope: a.polytope().into(),
    })
}

/// Rows of `A(F_r, P)` at torus points with all coordinates in the embedded
/// copy of `F_q^*`, `r = q^ext_degree`.
pub fn subfield_rows(a: &EvaluationMatrix, base_field: &Field) -> Result<Vec<usize>> {
    let big = a.field();
    let emb = embed(base_field, big)?;
    let mut rows: Vec<usize> = crate::codes::torus_points(base_field, a.polytope().dim())
        .iter()
        .map(|pt| {
            let image: Vec<_> = pt.iter().map(|&x| emb.apply(x)).collect();
            a.row_of(&image).expect("embedded units are units")
        })
        .collect();
    rows.sort_unstable();
    Ok(rows)
}

/// Mode of size `s` of `C_P^*(F_r)` relative to the torus points of
/// `base_field`, `r = q^ext_degree`.
pub fn relative_mode(
    p: &LatticePolytope,
    base_field: &Arc<Field>,
    ext_degree: u32,
    s: usize,
    config: &ModeConfig,
) -> Result<ModeReport> {
    if ext_degree == 0 {
        return Err(Error::InvalidArgument("extension degree must be positive".into()));
    }
    let q = base_field.q() as i64;
    if let Some(&bad) = p.lattice_points().iter().flatten().find(|&&x| x < 0 || x > q - 1) {
        return Err(Error::PolytopeTooLargeForField {
            max_exponent: (q - 1) as u32,
            found: bad,
        });
    }
    let big = if ext_degree == 1 {
        base_field.clone()
    } else {
        Arc::new(Field::new(base_field.p(), base_field.e() * ext_degree)?)
    };
    let a = evaluation_matrix(p, &big)?;
    let base = subfield_rows(&a, base_field)?;
    let mut report = mode_over(&a, &base, s, config)?;
    report.base_field = Some(base_field.descriptor());
    Ok(report)
}

/// Genericity data for a `(c+1)`-tuple of torus points.
///
/// Only condition (1) is decided exactly. The other two conditions concern
/// the scheme `H ∩ X_P` and are reported through `F_q`-point proxies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericityReport {
    pub tuple: Vec<usize>,
    pub span_rank: usize,
    /// Rows outside the tuple whose points lie in the span.
    pub points_in_span: Vec<usize>,
    /// The span has projective dimension `c`.
    pub condition1_ok: bool,
    /// Condition (1) holds and the `F_q`-points of `H ∩ X_P°` number at
    /// most `deg X_P`, as they must when the intersection is finite.
    pub proxy2_ok: bool,
    /// Every `F_q`-point found in the span is a torus point; always true
    /// since only torus rows are examined.
    pub proxy3_ok: bool,
}

/// Checks tuples against one evaluation matrix, caching `c` and `deg X_P`.
pub struct GenericityChecker<'a> {
    a: &'a EvaluationMatrix,
    codim: usize,
    degree: usize,
}

impl<'a> GenericityChecker<'a> {
    pub fn new(a: &'a EvaluationMatrix) -> Result<Self> {
        let p = a.polytope();
        Ok(GenericityChecker {
            a,
            codim: p.codim(),
            degree: p.normalized_volume()? as usize,
        })
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.codim + 1 {
            return Err(Error::WrongTupleSize {
                expected: self.codim + 1,
                found: tuple.len(),
            });
        }
        if let Some(&i) = tuple.iter().find(|&&i| i >= self.a.rows()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.a.rows(),
            });
        }
        Ok(())
    }

    fn span(&self, tuple: &[usize]) -> EchelonBasis<'a> {
        let mut b = EchelonBasis::new(self.a.field(), self.a.cols());
        for &i in tuple {
            b.insert(self.a.row(i));
        }
        b
    }

    /// Condition (1) only.
    pub fn condition1(&self, tuple: &[usize]) -> Result<bool> {
        self.check_tuple(tuple)?;
        Ok(self.span(tuple).rank() == self.codim + 1)
    }

    pub fn report(&self, tuple: &[usize]) -> Result<GenericityReport> {
        self.check_tuple(tuple)?;
        let basis = self.span(tuple);
        let span_rank = basis.rank();
        let points_in_span: Vec<usize> = (0..self.a.rows())
            .filter(|j| !tuple.contains(j) && basis.contains(self.a.row(*j)))
            .collect();
        let condition1_ok = span_rank == self.codim + 1;
        let proxy2_ok = condition1_ok && self.codim + 1 + points_in_span.len() <= self.degree;
        Ok(GenericityReport {
            tuple: tuple.to_vec(),
            span_rank,
            points_in_span,
            condition1_ok,
            proxy2_ok,
            proxy3_ok: true,
        })
    }
}

pub fn is_generic_tuple(a: &EvaluationMatrix, tuple: &[usize]) -> Result<GenericityReport> {
    GenericityChecker::new(a)?.report(tuple)
}

/// Fraction of ordered `(c+1)`-tuples of torus points (repetition allowed)
/// that satisfy condition (1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericFraction {
    pub numerator: u64,
    pub denominator: u64,
    pub exhaustive: bool,
    pub seed: u64,
}

impl GenericFraction {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Exact comparison with 1/2.
    pub fn exceeds_half(&self) -> bool {
        2 * self.numerator > self.denominator
    }
}

/// Exhaustive when the tuple space has at most [`EXHAUSTIVE_TUPLE_LIMIT`]
/// elements, otherwise `samples` seeded draws with replacement.
pub fn generic_fraction_estimate(
    p: &LatticePolytope,
    field: &Arc<Field>,
    samples: u64,
    seed: u64,
) -> Result<GenericFraction> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let a = evaluation_matrix(p, field)?;
    generic_fraction_of(&a, samples, seed)
}

pub fn generic_fraction_of(a: &EvaluationMatrix, samples: u64, seed: u64) -> Result<GenericFraction> {
    let checker = GenericityChecker::new(a)?;
    let width = checker.codim + 1;
    let t = a.rows();
    let space = (t as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
    let decode = |mut idx: u64| -> Vec<usize> {
        let mut tuple = vec![0usize; width];
        for slot in tuple.iter_mut().rev() {
            *slot = (idx % t as u64) as usize;
            idx /= t as u64;
        }
        tuple
    };
    if space <= EXHAUSTIVE_TUPLE_LIMIT {
        let hits: u64 = (0..space as u64)
            .into_par_iter()
            .map(|i| checker.condition1(&decode(i)).map(u64::from))
            .sum::<Result<u64>>()?;
        return Ok(GenericFraction {
            numerator: hits,
            denominator: space as u64,
            exhaustive: true,
            seed,
        });
    }
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let tuple: Vec<usize> = (0..width).map(|_| rng.gen_range(0..t)).collect();
            checker.condition1(&tuple).map(u64::from)
        })
        .sum::<Result<u64>>()?;
    Ok(GenericFraction {
        numerator: hits,
        denominator: samples,
        exhaustive: false,
        seed,
    })
}

/// Exact fraction via distinct subsets: a tuple with a repeated point never
/// satisfies condition (1), so the count is `(c+1)!` times the number of
/// independent `(c+1)`-subsets. Dependent prefixes are pruned.
pub fn generic_fraction_exact(a: &EvaluationMatrix, max_subsets: u128) -> Result<GenericFraction> {
    let width = a.polytope().codim() + 1;
    let t = a.rows();
    if binomial(t, width) > max_subsets {
        return Err(Error::BudgetExceeded(format!(
            "C({t}, {width}) subsets exceed {max_subsets}"
        )));
    }
    let overflow = || Error::BudgetExceeded(format!("{t}^{width} tuples overflow"));
    let denominator = (t as u64).checked_pow(width as u32).ok_or_else(overflow)?;
    fn count(a: &EvaluationMatrix, width: usize, from: usize, basis: &mut EchelonBasis<'_>) -> u64 {
        if basis.rank() == width {
            return 1;
        }
        let mut total = 0;
        for i in from..a.rows() {
            let depth = basis.rank();
            if basis.insert(a.row(i)) {
                total += count(a, width, i + 1, basis);
            }
            basis.truncate(depth);
        }
        total
    }
    let mut basis = EchelonBasis::new(a.field(), a.cols());
    let subsets = count(a, width, 0, &mut basis);
    let factorial = (1..=width as u64)
        .try_fold(1u64, |acc, i| acc.checked_mul(i))
        .ok_or_else(overflow)?;
    let numerator = subsets.checked_mul(factorial).ok_or_else(overflow)?;
    Ok(GenericFraction {
        numerator,
        denominator,
        exhaustive: true,
        seed: 0,
    })
}
