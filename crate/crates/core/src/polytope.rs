//! Lattice polytopes: constructors, exact facet description, lattice
//! points, Ehrhart counts and the h*-vector.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Naive hull budget for user-supplied vertex lists.
pub const MAX_INPUT_DIM: usize = 4;
pub const MAX_INPUT_VERTICES: usize = 32;

/// Cap on the number of box points scanned for one dilate.
pub const MAX_SCAN_POINTS: u128 = 50_000_000;

const MAX_HULL_SUBSETS: u128 = 5_000_000;

pub type Point = Vec<i64>;

/// The half-space `normal . x <= offset`, with primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    /// `offset * k - normal . x`; nonnegative iff `x` lies in the half-space of `kP`.
    #[inline]
    fn slack(&self, x: &[i64], k: i64) -> i64 {
        self.offset * k - self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<i64>()
    }
}

/// A full-dimensional lattice polytope with cached H-representation and
/// lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    lattice_points: Vec<Point>,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn integer_rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(p, rank);
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for k in 0..cols {
                row[k] = row[k] * pivot[c] - pivot[k] * f;
            }
            let g = row.iter().fold(0, |acc, &x| gcd(acc, x));
            if g > 1 {
                row.iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

/// Bareiss fraction-free determinant.
fn determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Integer normal to the hyperplane through `pts` (m points in Z^m), or the
/// zero vector if they are affinely dependent.
fn hyperplane_normal(pts: &[&Point]) -> Vec<i64> {
    let m = pts[0].len();
    let diffs: Vec<Vec<i128>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| (*a - *b) as i128).collect())
        .collect();
    let mut normal: Vec<i128> = (0..m)
        .map(|j| {
            let minor: Vec<Vec<i128>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let d = determinant(minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    let g = normal.iter().fold(0, |acc, &x| gcd(acc, x));
    if g > 1 {
        normal.iter_mut().for_each(|x| *x /= g);
    }
    normal.into_iter().map(|x| x as i64).collect()
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Calls `visit` on every m-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    if m > n {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..m).rev().find(|&i| idx[i] != i + n - m) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl LatticePolytope {
    fn build(points: Vec<Point>) -> Result<LatticePolytope> {
        let dim = points.first().map(|p| p.len()).ok_or(Error::NotFullDimensional)?;
        if dim == 0 {
            return Err(Error::NotFullDimensional);
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::InvalidPolytope(format!("point {p:?} is not in Z^{dim}")));
        }
        let points: Vec<Point> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let diffs: Vec<Vec<i128>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(&points[0]).map(|(a, b)| (*a - *b) as i128).collect())
            .collect();
        if points.len() <= dim || integer_rank(&diffs) < dim {
            return Err(Error::NotFullDimensional);
        }
        if binomial(points.len() as u64, dim as u64) > MAX_HULL_SUBSETS {
            return Err(Error::BudgetExceeded(format!(
                "hull of {} points in dimension {dim}",
                points.len()
            )));
        }

        let mut facets = BTreeSet::new();
        for_each_subset(points.len(), dim, |subset| {
            let chosen: Vec<&Point> = subset.iter().map(|&i| &points[i]).collect();
            let normal = hyperplane_normal(&chosen);
            if normal.iter().all(|&x| x == 0) {
                return;
            }
            let offset: i64 = normal.iter().zip(chosen[0]).map(|(a, b)| a * b).sum();
            let (mut below, mut above) = (false, false);
            for p in &points {
                let v: i64 = normal.iter().zip(p).map(|(a, b)| a * b).sum::<i64>() - offset;
                below |= v < 0;
                above |= v > 0;
            }
            match (below, above) {
                (true, false) => {
                    facets.insert(Facet { normal, offset });
                }
                (false, true) => {
                    facets.insert(Facet {
                        normal: normal.iter().map(|x| -x).collect(),
                        offset: -offset,
                    });
                }
                _ => {}
            }
        });
        let facets: Vec<Facet> = facets.into_iter().collect();

        let vertices: Vec<Point> = points
            .iter()
            .filter(|p| {
                let tight: Vec<Vec<i128>> = facets
                    .iter()
                    .filter(|f| f.slack(p, 1) == 0)
                    .map(|f| f.normal.iter().map(|&x| x as i128).collect())
                    .collect();
                integer_rank(&tight) == dim
            })
            .cloned()
            .collect();

        let mut poly = LatticePolytope {
            dim,
            vertices,
            facets,
            lattice_points: Vec::new(),
        };
        poly.lattice_points = poly.dilate_points(1, false)?;
        Ok(poly)
    }

    /// Polytope from a vertex list (m <= 4, at most 32 points). Points that
    /// are not vertices of the hull are dropped.
    pub fn from_vertices(m: usize, vertices: Vec<Point>) -> Result<LatticePolytope> {
        if m > MAX_INPUT_DIM || vertices.len() > MAX_INPUT_VERTICES {
            return Err(Error::BudgetExceeded(format!(
                "naive hull supports m <= {MAX_INPUT_DIM} and <= {MAX_INPUT_VERTICES} vertices"
            )));
        }
        if let Some(p) = vertices.iter().find(|p| p.len() != m) {
            return Err(Error::InvalidPolytope(format!("vertex {p:?} is not in Z^{m}")));
        }
        LatticePolytope::build(vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Lattice points in lexicographic order.
    pub fn lattice_points(&self) -> &[Point] {
        &self.lattice_points
    }

    pub fn lattice_point_count(&self) -> usize {
        self.lattice_points.len()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|f| f.slack(x, 1) >= 0)
    }

    /// Coordinatewise `(min, max)` over the vertices.
    pub fn bounding_box(&self) -> (Point, Point) {
        let lo = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap())
            .collect();
        let hi = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap())
            .collect();
        (lo, hi)
    }

    fn scan_dilate(&self, k: i64, strict: bool, mut visit: impl FnMut(&[i64])) -> Result<()> {
        let (lo, hi) = self.bounding_box();
        let lo: Point = lo.iter().map(|x| x * k).collect();
        let hi: Point = hi.iter().map(|x| x * k).collect();
        let volume: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u128).product();
        if volume > MAX_SCAN_POINTS {
            return Err(Error::BudgetExceeded(format!("{volume} box points for dilate {k}")));
        }
        let mut x = lo.clone();
        loop {
            let inside = self.facets.iter().all(|f| {
                let s = f.slack(&x, k);
                if strict {
                    s > 0
                } else {
                    s >= 0
                }
            });
            if inside {
                visit(&x);
            }
            // odometer, last coordinate fastest: lexicographic order
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if x[i] < hi[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = lo[i];
            }
        }
    }

    /// Lattice points of `kP` (or of its interior when `strict`), lexicographic.
    pub fn dilate_points(&self, k: i64, strict: bool) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        self.scan_dilate(k, strict, |x| out.push(x.to_vec()))?;
        Ok(out)
    }

    pub fn count_dilate(&self, k: i64, strict: bool) -> Result<u64> {
        let mut n = 0u64;
        self.scan_dilate(k, strict, |_| n += 1)?;
        Ok(n)
    }

    /// `|kP ∩ Z^m|` for `k = 0..=kmax`.
    pub fn ehrhart_counts(&self, kmax: usize) -> Result<Vec<u64>> {
        (0..=kmax as i64).map(|k| self.count_dilate(k, false)).collect()
    }

    /// Numerator `(h*_0, ..., h*_m)` of the Ehrhart series
    /// `sum_k |kP ∩ Z^m| t^k = h*(t) / (1 - t)^(m+1)`.
    pub fn h_star(&self) -> Result<Vec<i64>> {
        let m = self.dim;
        let counts = self.ehrhart_counts(m)?;
        Ok((0..=m)
            .map(|j| {
                (0..=j)
                    .map(|i| {
                        let c = binomial(m as u64 + 1, i as u64) as i64 * counts[j - i] as i64;
                        if i % 2 == 0 {
                            c
                        } else {
                            -c
                        }
                    })
                    .sum()
            })
            .collect())
    }

    /// Smallest `k >= 1` such that `kP` has an interior lattice point
    /// (at most `m + 1` for any lattice polytope).
    pub fn first_interior_dilate(&self) -> Result<usize> {
        for k in 1..=self.dim + 1 {
            if self.count_dilate(k as i64, true)? > 0 {
                return Ok(k);
            }
        }
        Err(Error::InternalInconsistency(format!(
            "no interior lattice point in {}P",
            self.dim + 1
        )))
    }

    /// Whether the first dilate with an interior lattice point is the m-th,
    /// cross-checked against the h*-vector having degree exactly one.
    pub fn is_degree_one(&self) -> Result<bool> {
        let by_interior = self.first_interior_dilate()? == self.dim;
        let h = self.h_star()?;
        let by_h_star = h.get(1).is_some_and(|&h1| h1 != 0) && h.iter().skip(2).all(|&x| x == 0);
        if by_interior != by_h_star {
            return Err(Error::InternalInconsistency(format!(
                "interior-point test says {by_interior}, h* = {h:?}"
            )));
        }
        Ok(by_interior)
    }

    /// `m! vol(P)`, the degree of the associated toric variety.
    pub fn normalized_volume(&self) -> Result<i64> {
        Ok(self.h_star()?.iter().sum())
    }

    /// Codimension `|P ∩ Z^m| - 1 - m` of the toric variety in its ambient
    /// projective space.
    pub fn codim(&self) -> usize {
        self.lattice_point_count() - 1 - self.dim
    }

    pub fn report(&self) -> Result<PolytopeReport> {
        Ok(PolytopeReport {
            m: self.dim,
            vertices: self.vertices.clone(),
            lattice_point_count: self.lattice_point_count(),
            h_star: self.h_star()?,
            normalized_volume: self.normalized_volume()?,
            codim: self.codim(),
            is_degree_one: self.is_degree_one()?,
        })
    }
}

/// Summary written by `polytope info`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolytopeReport {
    pub m: usize,
    pub vertices: Vec<Point>,
    pub lattice_point_count: usize,
    pub h_star: Vec<i64>,
    pub normalized_volume: i64,
    pub codim: usize,
    pub is_degree_one: bool,
}

fn unit(dim: usize, i: usize) -> Point {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

fn check_lawrence(a: &[i64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptySequence);
    }
    if a.iter().any(|&x| x <= 0) {
        return Err(Error::NonPositiveEntry);
    }
    if a.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::NotNondecreasing);
    }
    Ok(())
}

/// `L(a_0, ..., a_{s-1}) = Conv(0, e_1, ..., e_{s-1}, a_0 e_s, e_1 + a_1 e_s, ..., e_{s-1} + a_{s-1} e_s)`.
pub fn lawrence_prism(a: &[i64]) -> Result<LatticePolytope> {
    check_lawrence(a)?;
    let s = a.len();
    let mut vertices = Vec::with_capacity(2 * s);
    vertices.push(vec![0; s]);
    let mut lifted = vec![0; s];
    lifted[s - 1] = a[0];
    vertices.push(lifted);
    for (i, &ai) in a.iter().enumerate().skip(1) {
        let base = unit(s, i - 1);
        let mut top = base.clone();
        top[s - 1] = ai;
        vertices.push(base);
        vertices.push(top);
    }
    LatticePolytope::build(vertices)
}

/// `Conv((0,0), (2,0), (0,2))`.
pub fn exceptional_simplex() -> LatticePolytope {
    LatticePolytope::build(vec![vec![0, 0], vec![2, 0], vec![0, 2]]).expect("triangle is full-dimensional")
}

/// `Conv(P × {0} ∪ {e_{m+1}})`.
pub fn pyramid(p: &LatticePolytope) -> Result<LatticePolytope> {
    let m = p.dim();
    let mut vertices: Vec<Point> = p
        .vertices()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.push(0);
            w
        })
        .collect();
    vertices.push(unit(m + 1, m));
    LatticePolytope::build(vertices)
}

/// The f-th dilate of the standard simplex, `{x >= 0 : sum x_i <= f}`.
pub fn dilated_simplex(f: i64, m: usize) -> Result<LatticePolytope> {
    if f < 1 || m < 1 {
        return Err(Error::InvalidArgument(format!(
            "dilated simplex needs f >= 1 and m >= 1 (got f = {f}, m = {m})"
        )));
    }
    let mut vertices = vec![vec![0; m]];
    vertices.extend((0..m).map(|i| {
        let mut v = unit(m, i);
        v[i] = f;
        v
    }));
    LatticePolytope::build(vertices)
}

/// The segment `[0, c + 1]`, whose toric variety is the rational normal curve
/// of codimension `c`.
pub fn interval(c: u32) -> LatticePolytope {
    LatticePolytope::build(vec![vec![0], vec![c as i64 + 1]]).expect("segment is full-dimensional")
}

/// Base of a degree-one polytope in the Batyrev-Nill classification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DegreeOneBase {
    Lawrence { a: Vec<i64> },
    Delta2,
}

/// Iterated pyramid over a Lawrence prism or over the exceptional simplex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DegreeOneDescriptor {
    pub base: DegreeOneBase,
    pub pyramid_levels: u32,
}

impl DegreeOneDescriptor {
    pub fn lawrence(a: Vec<i64>, pyramid_levels: u32) -> Result<Self> {
        check_lawrence(&a)?;
        Ok(DegreeOneDescriptor {
            base: DegreeOneBase::Lawrence { a },
            pyramid_levels,
        })
    }

    pub fn delta2(pyramid_levels: u32) -> Self {
        DegreeOneDescriptor {
            base: DegreeOneBase::Delta2,
            pyramid_levels,
        }
    }

    pub fn base_dim(&self) -> usize {
        match &self.base {
            DegreeOneBase::Lawrence { a } => a.len(),
            DegreeOneBase::Delta2 => 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.base_dim() + self.pyramid_levels as usize
    }

    pub fn lattice_point_count(&self) -> usize {
        let base = match &self.base {
            DegreeOneBase::Lawrence { a } => a.len() + a.iter().sum::<i64>() as usize,
            DegreeOneBase::Delta2 => 6,
        };
        base + self.pyramid_levels as usize
    }

    /// Largest coordinate of the realized polytope.
    pub fn max_coordinate(&self) -> i64 {
        match &self.base {
            DegreeOneBase::Lawrence { a } => a.iter().copied().max().unwrap_or(0).max(1),
            DegreeOneBase::Delta2 => 2,
        }
    }

    pub fn realize(&self) -> Result<LatticePolytope> {
        let mut p = match &self.base {
            DegreeOneBase::Lawrence { a } => lawrence_prism(a)?,
            DegreeOneBase::Delta2 => exceptional_simplex(),
        };
        for _ in 0..self.pyramid_levels {
            p = pyramid(&p)?;
        }
        Ok(p)
    }
}

impl std::fmt::Display for DegreeOneDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let base = match &self.base {
            DegreeOneBase::Lawrence { a } => {
                let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                format!("L({})", parts.join(","))
            }
            DegreeOneBase::Delta2 => "Delta2".to_string(),
        };
        match self.pyramid_levels {
            0 => write!(f, "{base}"),
            1 => write!(f, "pyr({base})"),
            n => write!(f, "pyr^{n}({base})"),
        }
    }
}

/// A polytope description as read from a spec file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PolytopeSpec {
    Constructor(Constructor),
    Vertices { vertices: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "constructor", rename_all = "lowercase")]
pub enum Constructor {
    Lawrence { a: Vec<i64>, pyramids: u32 },
    Delta2 { pyramids: u32 },
    Interval { c: u32 },
    Simplex { f: i64, m: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    constructor: Option<String>,
    a: Option<Vec<i64>>,
    pyramids: Option<u32>,
    c: Option<u32>,
    f: Option<i64>,
    m: Option<usize>,
    vertices: Option<Vec<Point>>,
}

impl PolytopeSpec {
    /// Parses the JSON spec format. Syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<PolytopeSpec> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::InvalidPolytope(e.to_string()))?;
        let invalid = |msg: &str| Error::InvalidPolytope(msg.to_string());
        match (raw.constructor.as_deref(), raw.vertices) {
            (None, Some(vertices)) => {
                if raw.a.is_some() || raw.pyramids.is_some() || raw.c.is_some() || raw.f.is_some() || raw.m.is_some() {
                    return Err(invalid("a vertex spec takes no constructor fields"));
                }
                Ok(PolytopeSpec::Vertices { vertices })
            }
            (None, None) => Err(invalid("expected \"constructor\" or \"vertices\"")),
            (Some(_), Some(_)) => Err(invalid("give either \"constructor\" or \"vertices\", not both")),
            (Some(name), None) => {
                let pyramids = raw.pyramids.unwrap_or(0);
                let ctor = match name {
                    "lawrence" => Constructor::Lawrence {
                        a: raw.a.ok_or_else(|| invalid("lawrence needs \"a\""))?,
                        pyramids,
                    },
                    "delta2" => Constructor::Delta2 { pyramids },
                    "interval" => Constructor::Interval {
                        c: raw.c.ok_or_else(|| invalid("interval needs \"c\""))?,
                    },
                    "simplex" => Constructor::Simplex {
                        f: raw.f.ok_or_else(|| invalid("simplex needs \"f\""))?,
                        m: raw.m.ok_or_else(|| invalid("simplex needs \"m\""))?,
                    },
                    other => return Err(Error::InvalidPolytope(format!("unknown constructor {other:?}"))),
                };
                Ok(PolytopeSpec::Constructor(ctor))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<LatticePolytope> {
        match self {
            PolytopeSpec::Vertices { vertices } => {
                let m = vertices.first().map_or(0, |v| v.len());
                LatticePolytope::from_vertices(m, vertices.clone())
            }
            PolytopeSpec::Constructor(c) => match c {
                Constructor::Lawrence { .. } | Constructor::Delta2 { .. } | Constructor::Interval { .. } => {
                    self.descriptor().unwrap()?.realize()
                }
                Constructor::Simplex { f, m } => dilated_simplex(*f, *m),
            },
        }
    }

    /// Classification data, when the spec names a degree-one construction.
    /// An interval `[0, c+1]` is the prism `L(c+1)`.
    pub fn descriptor(&self) -> Option<Result<DegreeOneDescriptor>> {
        match self {
            PolytopeSpec::Constructor(Constructor::Lawrence { a, pyramids }) => {
                Some(DegreeOneDescriptor::lawrence(a.clone(), *pyramids))
            }
            PolytopeSpec::Constructor(Constructor::Delta2 { pyramids }) => {
                Some(Ok(DegreeOneDescriptor::delta2(*pyramids)))
            }
            PolytopeSpec::Constructor(Constructor::Interval { c }) => {
                Some(DegreeOneDescriptor::lawrence(vec![*c as i64 + 1], 0))
            }
            _ => None,
        }
    }
}
