//! Evaluation matrices, primal and dual toric codes, and their distances.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::linalg::{EchelonBasis, Matrix};
use crate::polytope::LatticePolytope;

pub const MAX_TORUS_POINTS: u64 = 1 << 20;
pub const MAX_MATRIX_ENTRIES: u64 = 50_000_000;
/// Largest support handled by subset-sum formulas (2^|S| terms).
pub const MAX_SUPPORT: usize = 20;
/// Default number of projective coefficient vectors for primal brute force.
pub const DEFAULT_PRIMAL_BUDGET: u64 = 10_000_000;
/// Default number of span-membership tests for the dual search.
pub const DEFAULT_DUAL_BUDGET: u64 = 200_000_000;

/// The matrix `A(F_q, P)`: rows are torus points, columns lattice points,
/// entry `(α, n)` is `α^n`.
#[derive(Clone, Debug)]
pub struct EvaluationMatrix {
    field: Arc<Field>,
    polytope: LatticePolytope,
    torus_points: Vec<Vec<FieldElement>>,
    matrix: Matrix,
}

/// All points of `(F_q^*)^m`, in odometer order over `field.units()` with
/// the last coordinate fastest.
pub fn torus_points(field: &Field, m: usize) -> Vec<Vec<FieldElement>> {
    let units = field.units();
    let n = units.len();
    let total = n.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut pt = vec![FieldElement::ZERO; m];
            for slot in pt.iter_mut().rev() {
                *slot = units[idx % n];
                idx /= n;
            }
            pt
        })
        .collect()
}

/// Builds `A(F_q, P)`. Requires `P ⊆ [0, q-1]^m`.
pub fn evaluation_matrix(p: &LatticePolytope, field: &Arc<Field>) -> Result<EvaluationMatrix> {
    let q = field.q() as i64;
    let m = p.dim();
    if let Some(&bad) = p.lattice_points().iter().flatten().find(|&&x| x < 0 || x > q - 1) {
        return Err(Error::PolytopeTooLargeForField {
            max_exponent: (q - 1) as u32,
            found: bad,
        });
    }
    let t = (q as u64 - 1).checked_pow(m as u32).unwrap_or(u64::MAX);
    let cols = p.lattice_point_count();
    if t > MAX_TORUS_POINTS || t.saturating_mul(cols as u64) > MAX_MATRIX_ENTRIES {
        return Err(Error::BudgetExceeded(format!("{t} torus points x {cols} monomials")));
    }
    let points = torus_points(field, m);
    let mut data = Vec::with_capacity(t as usize * cols);
    for pt in &points {
        let logs: Vec<u64> = pt.iter().map(|&a| field.log(a).unwrap() as u64).collect();
        for n in p.lattice_points() {
            let e: u64 = logs.iter().zip(n).map(|(&l, &ni)| l * ni as u64).sum();
            data.push(field.exp(e));
        }
    }
    let matrix = Matrix::new(field.clone(), points.len(), cols, data)?;
    Ok(EvaluationMatrix {
        field: field.clone(),
        polytope: p.clone(),
        torus_points: points,
        matrix,
    })
}

impl EvaluationMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn torus_points(&self) -> &[Vec<FieldElement>] {
        &self.torus_points
    }

    /// Number of torus points `t = (q-1)^m`.
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        self.matrix.row(i)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn rank_of_subset(&self, rows: &[usize]) -> Result<usize> {
        self.matrix.rank_of_subset(rows)
    }

    /// Row index of a torus point.
    pub fn row_of(&self, point: &[FieldElement]) -> Option<usize> {
        let n = self.field.q() as usize - 1;
        point
            .iter()
            .try_fold(0usize, |acc, &a| Some(acc * n + self.field.log(a)? as usize))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeRole {
    Primal,
    Dual,
}

/// A linear code in `F_q^t` given by a full-row-rank generator matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    generator: Matrix,
    role: CodeRole,
}

impl LinearCode {
    /// Code spanned by the rows of `rows` (any spanning set).
    pub fn from_spanning_rows(rows: &Matrix, role: CodeRole) -> LinearCode {
        let rr = rows.rref();
        let keep: Vec<usize> = (0..rr.rank).collect();
        let generator = rr.matrix.select_rows(&keep).expect("rank rows exist");
        LinearCode { generator, role }
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn field(&self) -> &Arc<Field> {
        self.generator.field()
    }

    pub fn length(&self) -> usize {
        self.generator.cols()
    }

    pub fn rank(&self) -> usize {
        self.generator.rows()
    }

    pub fn role(&self) -> CodeRole {
        self.role
    }

    /// Codeword `c^t G`.
    pub fn encode(&self, coefficients: &[FieldElement]) -> Vec<FieldElement> {
        self.generator.vec_mul(coefficients)
    }
}

/// `C_P(F_q)`: evaluations of the polynomials supported on `P`.
pub fn primal_code(p: &LatticePolytope, field: &Arc<Field>) -> Result<LinearCode> {
    let a = evaluation_matrix(p, field)?;
    Ok(primal_code_of(&a))
}

pub fn primal_code_of(a: &EvaluationMatrix) -> LinearCode {
    LinearCode::from_spanning_rows(&a.matrix.transpose(), CodeRole::Primal)
}

/// `C_P^*(F_q)`: the vectors `y` with `y^t A = 0`.
pub fn dual_code(p: &LatticePolytope, field: &Arc<Field>) -> Result<LinearCode> {
    let a = evaluation_matrix(p, field)?;
    Ok(dual_code_of(&a))
}

pub fn dual_code_of(a: &EvaluationMatrix) -> LinearCode {
    let basis = a.matrix.left_kernel();
    let rows = Matrix::from_rows(a.field.clone(), a.rows(), &basis).expect("kernel vectors have length t");
    LinearCode {
        generator: rows,
        role: CodeRole::Dual,
    }
}

/// `r_S = |S| - rank(A_S)`: dimension of the dual words supported in `S`.
pub fn r_s(a: &EvaluationMatrix, s: &[usize]) -> Result<usize> {
    Ok(s.len() - a.rank_of_subset(s)?)
}

fn check_support(a: &EvaluationMatrix, s: &[usize]) -> Result<()> {
    if s.len() > MAX_SUPPORT {
        return Err(Error::BudgetExceeded(format!("|S| = {} > {MAX_SUPPORT}", s.len())));
    }
    a.rank_of_subset(s).map(|_| ())
}

/// Number of dual words with support exactly `S`, by Möbius inversion of
/// `q^{r_B} = Σ_{A ⊆ B} f_A`: `f_S = Σ_{A ⊆ S} (-1)^{|S|-|A|} q^{r_A}`.
/// `f_∅ = 1` (the zero word).
pub fn f_s(a: &EvaluationMatrix, s: &[usize]) -> Result<u128> {
    check_support(a, s)?;
    let q = a.field.q() as i128;
    let n = s.len();
    let mut total: i128 = 0;
    let mut sub = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        sub.clear();
        sub.extend((0..n).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]));
        let r = sub.len() - a.rank_of_subset(&sub)?;
        let term = q
            .checked_pow(r as u32)
            .ok_or_else(|| Error::BudgetExceeded(format!("q^{r} overflows")))?;
        if (n - sub.len()).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    u128::try_from(total).map_err(|_| Error::InternalInconsistency(format!("f_S = {total} < 0")))
}

/// Number of dual words with support exactly `S`, by listing every element
/// of the left kernel of `A_S`. Independent of [`f_s`].
pub fn f_s_by_enumeration(a: &EvaluationMatrix, s: &[usize], budget: u64) -> Result<u128> {
    check_support(a, s)?;
    let field = &*a.field;
    let basis = a.matrix.select_rows(s)?.left_kernel();
    let q = field.q() as u64;
    let total = q
        .checked_pow(basis.len() as u32)
        .filter(|&x| x <= budget)
        .ok_or_else(|| Error::BudgetExceeded(format!("q^{} kernel vectors", basis.len())))?;
    let mut count = 0u128;
    let mut coeffs = vec![0u32; basis.len()];
    let mut v = vec![FieldElement::ZERO; s.len()];
    for _ in 0..total {
        v.iter_mut().for_each(|x| *x = FieldElement::ZERO);
        for (b, &c) in basis.iter().zip(&coeffs) {
            let c = field.element(c).unwrap();
            for (x, &bx) in v.iter_mut().zip(b) {
                *x = field.add(*x, field.mul(c, bx));
            }
        }
        if v.iter().all(|x| !x.is_zero()) {
            count += 1;
        }
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < q as u32 {
                break;
            }
            *c = 0;
        }
    }
    Ok(count)
}

/// Whether some dual word has support exactly `S` (`S` nonempty, valid).
///
/// Exact: the left kernel `K` of `A_S` has a full-support vector iff no
/// coordinate vanishes on all of `K` and the coordinate hyperplanes do not
/// cover `K`. A vector space over F_q is not a union of `|S| <= q` proper
/// subspaces, so that case needs no search; otherwise the words are counted.
pub(crate) fn has_word_with_support(a: &EvaluationMatrix, s: &[usize]) -> Result<bool> {
    if s.is_empty() || a.rank_of_subset(s)? == s.len() {
        return Ok(false);
    }
    let basis = a.matrix.select_rows(s)?.left_kernel();
    if (0..s.len()).any(|i| basis.iter().all(|b| b[i].is_zero())) {
        return Ok(false);
    }
    if basis.len() == 1 || s.len() <= a.field.q() as usize {
        return Ok(true);
    }
    let q = a.field.q() as u64;
    if q.checked_pow(basis.len() as u32).is_some_and(|n| n <= 4096) {
        return Ok(f_s_by_enumeration(a, s, 4096)? > 0);
    }
    Ok(f_s(a, s)? > 0)
}

/// Result of the primal brute-force search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimalDistance {
    pub dmin: usize,
    /// Coefficients (first nonzero entry 1) of a minimum-weight word.
    pub witness: Vec<FieldElement>,
    pub words_examined: u64,
}

/// Number of projective classes `(q^k - 1)/(q - 1)`, saturating.
pub fn projective_count(q: u64, k: u32) -> u64 {
    match q.checked_pow(k) {
        Some(n) => (n - 1) / (q - 1),
        None => u64::MAX,
    }
}

/// Exact minimum distance of `code` by enumerating one coefficient vector
/// per projective class. Runs in parallel over the leading coefficients.
pub fn dmin_primal_bruteforce(code: &LinearCode, budget: u64) -> Result<PrimalDistance> {
    let field = &**code.field();
    let k = code.rank();
    let _t = code.length();
    if k == 0 {
        return Err(Error::InvalidArgument("the zero code has no minimum distance".into()));
    }
    let q = field.q() as u64;
    let count = projective_count(q, k as u32);
    if count > budget {
        return Err(Error::BudgetExceeded(format!(
            "{count} projective words > budget {budget}"
        )));
    }
    let g = code.generator();
    // scaled[j][c] = c * G_j
    let scaled: Vec<Vec<Vec<FieldElement>>> = (0..k)
        .map(|j| {
            field
                .elements()
                .map(|c| g.row(j).iter().map(|&x| field.mul(c, x)).collect())
                .collect()
        })
        .collect();

    // Task = (lead position, coefficient right after the lead, if any).
    let mut tasks: Vec<(usize, Option<FieldElement>)> = Vec::new();
    for lead in 0..k {
        if lead + 1 < k {
            tasks.extend(field.elements().map(|c| (lead, Some(c))));
        } else {
            tasks.push((lead, None));
        }
    }

    let results: Vec<(usize, Vec<FieldElement>, u64)> = tasks
        .par_iter()
        .map(|&(lead, second)| {
            let mut coeffs = vec![FieldElement::ZERO; k];
            coeffs[lead] = FieldElement::ONE;
            let mut word = g.row(lead).to_vec();
            let start = match second {
                Some(c) => {
                    coeffs[lead + 1] = c;
                    for (w, &s) in word.iter_mut().zip(&scaled[lead + 1][c.index() as usize]) {
                        *w = field.add(*w, s);
                    }
                    lead + 2
                }
                None => lead + 1,
            };
            let mut best = (usize::MAX, Vec::new(), 0u64);
            let mut stack = vec![word];
            search(field, &scaled, start, &mut coeffs, &mut stack, &mut best);
            best
        })
        .collect();

    let words_examined = results.iter().map(|r| r.2).sum();
    let (dmin, witness, _) = results.into_iter().min_by_key(|r| r.0).expect("at least one task");
    Ok(PrimalDistance {
        dmin,
        witness,
        words_examined,
    })
}

fn search(
    field: &Field,
    scaled: &[Vec<Vec<FieldElement>>],
    pos: usize,
    coeffs: &mut Vec<FieldElement>,
    stack: &mut Vec<Vec<FieldElement>>,
    best: &mut (usize, Vec<FieldElement>, u64),
) {
    if pos == scaled.len() {
        let w = stack.last().unwrap();
        let weight = w.iter().filter(|x| !x.is_zero()).count();
        best.2 += 1;
        if weight < best.0 {
            *best = (weight, coeffs.clone(), best.2);
        }
        return;
    }
    for c in field.elements() {
        coeffs[pos] = c;
        if c.is_zero() {
            search(field, scaled, pos + 1, coeffs, stack, best);
            continue;
        }
        let top = stack.last().unwrap();
        let next: Vec<FieldElement> = top
            .iter()
            .zip(&scaled[pos][c.index() as usize])
            .map(|(&a, &b)| field.add(a, b))
            .collect();
        stack.push(next);
        search(field, scaled, pos + 1, coeffs, stack, best);
        stack.pop();
    }
    coeffs[pos] = FieldElement::ZERO;
}

/// Outcome of the dual minimum-distance search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DualDistance {
    /// Smallest dependent row set found, with one witness.
    Exact { dmin: usize, witness: Vec<usize> },
    /// Every row set of size <= cap is independent.
    AboveCap { cap: usize },
}

impl DualDistance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            DualDistance::Exact { dmin, .. } => Some(*dmin),
            DualDistance::AboveCap { .. } => None,
        }
    }
}

fn normalize(field: &Field, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let lead = *v.iter().find(|x| !x.is_zero())?;
    let inv = field.inv(lead).unwrap();
    Some(v.iter().map(|&x| field.mul(x, inv)).collect())
}

/// Minimum weight of `C_P^*`: the smallest `|S|` with `rank(A_S) < |S|`,
/// searched for sizes up to `cap`.
pub fn dmin_dual(a: &EvaluationMatrix, cap: usize, budget: u64) -> Result<DualDistance> {
    if cap < 3 {
        return Err(Error::InvalidArgument(format!("cap must be at least 3 (got {cap})")));
    }
    let field = &*a.field;
    let t = a.rows();

    if let Some(i) = (0..t).find(|&i| a.row(i).iter().all(|x| x.is_zero())) {
        return Ok(DualDistance::Exact {
            dmin: 1,
            witness: vec![i],
        });
    }

    // Sizes 2 and 3 through a table of projectively normalized rows.
    let mut table: HashMap<Vec<FieldElement>, usize> = HashMap::with_capacity(t);
    for i in 0..t {
        let key = normalize(field, a.row(i)).unwrap();
        if let Some(&j) = table.get(&key) {
            return Ok(DualDistance::Exact {
                dmin: 2,
                witness: vec![j, i],
            });
        }
        table.insert(key, i);
    }
    let triple = (0..t).into_par_iter().find_map_first(|i| {
        let mut v = vec![FieldElement::ZERO; a.cols()];
        for j in i + 1..t {
            for lambda in field.units() {
                for ((x, &ri), &rj) in v.iter_mut().zip(a.row(i)).zip(a.row(j)) {
                    *x = field.add(ri, field.mul(lambda, rj));
                }
                if let Some(key) = normalize(field, &v) {
                    if let Some(&k) = table.get(&key) {
                        if k != i && k != j {
                            let mut w = vec![i, j, k];
                            w.sort();
                            return Some(w);
                        }
                    }
                }
            }
        }
        None
    });
    if let Some(witness) = triple {
        return Ok(DualDistance::Exact { dmin: 3, witness });
    }

    // Larger sizes: independent (s-1)-subsets in lex order, then a later row
    // in their span.
    let mut tests = 0u64;
    for size in 4..=cap.min(t) {
        let mut basis = EchelonBasis::new(field, a.cols());
        let mut chosen = Vec::with_capacity(size);
        if let Some(w) = dependent_extension(a, size - 1, 0, &mut basis, &mut chosen, &mut tests, budget)? {
            return Ok(DualDistance::Exact { dmin: size, witness: w });
        }
    }
    Ok(DualDistance::AboveCap { cap })
}

fn dependent_extension(
    a: &EvaluationMatrix,
    target: usize,
    from: usize,
    basis: &mut EchelonBasis<'_>,
    chosen: &mut Vec<usize>,
    tests: &mut u64,
    budget: u64,
) -> Result<Option<Vec<usize>>> {
    let t = a.rows();
    if chosen.len() == target {
        for j in from..t {
            *tests += 1;
            if basis.contains(a.row(j)) {
                let mut w = chosen.clone();
                w.push(j);
                return Ok(Some(w));
            }
        }
        if *tests > budget {
            return Err(Error::BudgetExceeded(format!("{tests} span tests > budget {budget}")));
        }
        return Ok(None);
    }
    let need = target - chosen.len();
    for i in from..t.saturating_sub(need) {
        let depth = basis.rank();
        if !basis.insert(a.row(i)) {
            // a smaller dependent set; impossible once smaller sizes are ruled out
            continue;
        }
        chosen.push(i);
        let found = dependent_extension(a, target, i + 1, basis, chosen, tests, budget)?;
        chosen.pop();
        basis.truncate(depth);
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// `{length, rank, dmin, dmin_exact, method}` report of a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub length: usize,
    pub rank: usize,
    pub dmin: Option<usize>,
    pub dmin_exact: bool,
    pub method: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{exceptional_simplex, interval, lawrence_prism, pyramid};
    use proptest::prelude::*;

    fn gf(q: u64) -> Arc<Field> {
        Arc::new(Field::with_order(q).unwrap())
    }

    fn segment(n: i64) -> LatticePolytope {
        LatticePolytope::from_vertices(1, vec![vec![0], vec![n]]).unwrap()
    }

    fn unit_square() -> LatticePolytope {
        lawrence_prism(&[1, 1]).unwrap()
    }

    /// Minimum weight over every nonzero vector of the code (not projective).
    fn dmin_exhaustive(code: &LinearCode) -> usize {
        let f = code.field();
        let k = code.rank();
        let q = f.q() as u64;
        let mut best = usize::MAX;
        for n in 1..q.pow(k as u32) {
            let mut rest = n;
            let c: Vec<FieldElement> = (0..k)
                .map(|_| {
                    let d = rest % q;
                    rest /= q;
                    f.element(d as u32).unwrap()
                })
                .collect();
            let w = code.encode(&c);
            best = best.min(w.iter().filter(|x| !x.is_zero()).count());
        }
        best
    }

    /// Smallest dependent row set by plain enumeration of all subsets.
    fn dual_dmin_exhaustive(a: &EvaluationMatrix, cap: usize) -> Option<usize> {
        fn rec(a: &EvaluationMatrix, size: usize, from: usize, cur: &mut Vec<usize>) -> bool {
            if cur.len() == size {
                return a.rank_of_subset(cur).unwrap() < size;
            }
            for i in from..a.rows() {
                cur.push(i);
                if rec(a, size, i + 1, cur) {
                    return true;
                }
                cur.pop();
            }
            false
        }
        (1..=cap).find(|&s| rec(a, s, 0, &mut Vec::new()))
    }

    #[test]
    fn evaluation_matrix_of_segment() {
        let f = gf(7);
        let a = evaluation_matrix(&segment(2), &f).unwrap();
        assert_eq!((a.rows(), a.cols()), (6, 3));
        let nodes = [1u32, 3, 2, 6, 4, 5];
        for (r, &t) in nodes.iter().enumerate() {
            let row: Vec<u32> = a.row(r).iter().map(|x| x.index()).collect();
            assert_eq!(row, vec![1, t, t * t % 7]);
        }
    }

    #[test]
    fn evaluation_matrix_rank_and_fit() {
        let f = gf(5);
        let a = evaluation_matrix(&unit_square(), &f).unwrap();
        assert_eq!((a.rows(), a.cols()), (16, 4));
        assert_eq!(a.rank(), 4);
        assert!(matches!(
            evaluation_matrix(&segment(5), &f),
            Err(Error::PolytopeTooLargeForField {
                max_exponent: 4,
                found: 5
            })
        ));
        // exponent q-1 is admissible but collides with exponent 0 on the torus
        let a4 = evaluation_matrix(&segment(4), &f).unwrap();
        assert_eq!(a4.rank(), 4);
    }

    #[test]
    fn entries_are_monomial_values() {
        let f = gf(4);
        let p = lawrence_prism(&[1, 2]).unwrap();
        let a = evaluation_matrix(&p, &f).unwrap();
        for (r, pt) in a.torus_points().iter().enumerate() {
            assert_eq!(a.row_of(pt), Some(r));
            for (c, n) in p.lattice_points().iter().enumerate() {
                let expect = pt
                    .iter()
                    .zip(n)
                    .fold(FieldElement::ONE, |acc, (&x, &e)| f.mul(acc, f.pow(x, e as u64)));
                assert_eq!(a.matrix().get(r, c), expect);
            }
        }
    }

    #[test]
    fn primal_ranks() {
        let c = primal_code(&exceptional_simplex(), &gf(5)).unwrap();
        assert_eq!((c.length(), c.rank()), (16, 6));
        let c = primal_code(&lawrence_prism(&[1, 2, 3]).unwrap(), &gf(7)).unwrap();
        assert_eq!((c.length(), c.rank()), (216, 9));
        let c = primal_code(&pyramid(&exceptional_simplex()).unwrap(), &gf(5)).unwrap();
        assert_eq!((c.length(), c.rank()), (64, 7));
    }

    #[test]
    fn dual_code_is_orthogonal() {
        let f = gf(5);
        let a = evaluation_matrix(&exceptional_simplex(), &f).unwrap();
        let primal = primal_code_of(&a);
        let dual = dual_code_of(&a);
        assert_eq!(dual.rank() + primal.rank(), a.rows());
        for i in 0..dual.rank() {
            let y = dual.generator().row(i);
            assert!(a.matrix().vec_mul(y).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn r_s_on_vandermonde() {
        let a = evaluation_matrix(&segment(2), &gf(7)).unwrap();
        assert_eq!(r_s(&a, &[]).unwrap(), 0);
        assert_eq!(r_s(&a, &[0, 2, 5]).unwrap(), 0);
        assert_eq!(r_s(&a, &[0, 1, 2, 5]).unwrap(), 1);
        assert!(matches!(r_s(&a, &[9]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn f_s_on_vandermonde() {
        let a = evaluation_matrix(&segment(2), &gf(7)).unwrap();
        assert_eq!(f_s(&a, &[]).unwrap(), 1);
        assert_eq!(f_s(&a, &[0, 1, 3, 4]).unwrap(), 6);
        assert_eq!(f_s(&a, &[1, 2, 5]).unwrap(), 0);
        let big: Vec<usize> = (0..21).collect();
        let a = evaluation_matrix(&segment(1), &gf(23)).unwrap();
        assert!(matches!(f_s(&a, &big), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn small_primal_distances() {
        for (p, q, expect) in [
            (exceptional_simplex(), 5, 8),
            (lawrence_prism(&[1, 2]).unwrap(), 5, 8),
            (lawrence_prism(&[2, 2]).unwrap(), 5, 6),
        ] {
            let code = primal_code(&p, &gf(q)).unwrap();
            let d = dmin_primal_bruteforce(&code, DEFAULT_PRIMAL_BUDGET).unwrap();
            assert_eq!(d.dmin, expect);
            assert_eq!(d.dmin, dmin_exhaustive(&code));
            assert_eq!(d.words_examined, projective_count(q, code.rank() as u32));
            let w = code.encode(&d.witness);
            assert_eq!(w.iter().filter(|x| !x.is_zero()).count(), expect);
        }
    }

    #[test]
    fn primal_budget() {
        let code = primal_code(&lawrence_prism(&[1, 2, 3]).unwrap(), &gf(7)).unwrap();
        assert!(matches!(
            dmin_primal_bruteforce(&code, 1000),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn dual_distances() {
        let a = evaluation_matrix(&unit_square(), &gf(5)).unwrap();
        let d = dmin_dual(&a, 6, DEFAULT_DUAL_BUDGET).unwrap();
        assert_eq!(d.exact(), Some(3));
        let DualDistance::Exact { witness, .. } = &d else {
            panic!()
        };
        assert_eq!(a.rank_of_subset(witness).unwrap(), 2);

        let a = evaluation_matrix(&interval(2), &gf(7)).unwrap();
        assert_eq!(dmin_dual(&a, 6, DEFAULT_DUAL_BUDGET).unwrap().exact(), Some(5));
        assert_eq!(dual_dmin_exhaustive(&a, 6), Some(5));
        assert_eq!(
            dmin_dual(&a, 4, DEFAULT_DUAL_BUDGET).unwrap(),
            DualDistance::AboveCap { cap: 4 }
        );

        let a = evaluation_matrix(&exceptional_simplex(), &gf(7)).unwrap();
        assert_eq!(dmin_dual(&a, 6, DEFAULT_DUAL_BUDGET).unwrap().exact(), Some(4));
        assert!(matches!(dmin_dual(&a, 2, 10), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dual_search_matches_plain_enumeration() {
        for (p, q) in [
            (unit_square(), 4),
            (exceptional_simplex(), 4),
            (exceptional_simplex(), 5),
            (interval(1), 5),
            (lawrence_prism(&[1, 2]).unwrap(), 4),
        ] {
            let a = evaluation_matrix(&p, &gf(q)).unwrap();
            let fast = dmin_dual(&a, 8, DEFAULT_DUAL_BUDGET).unwrap().exact();
            assert_eq!(fast, dual_dmin_exhaustive(&a, 8), "q = {q}");
            // minimum weight of the dual code itself
            let dual = dual_code_of(&a);
            if dual.rank() > 0 && projective_count(q, dual.rank() as u32) < 2_000_000 {
                assert_eq!(fast, Some(dmin_primal_bruteforce(&dual, u64::MAX).unwrap().dmin));
            }
        }
    }

    #[test]
    fn pyramid_multiplies_primal_distance() {
        let q = 4;
        for p in [exceptional_simplex(), unit_square(), segment(2)] {
            let d0 = dmin_primal_bruteforce(&primal_code(&p, &gf(q)).unwrap(), u64::MAX)
                .unwrap()
                .dmin;
            let d1 = dmin_primal_bruteforce(&primal_code(&pyramid(&p).unwrap(), &gf(q)).unwrap(), u64::MAX)
                .unwrap()
                .dmin;
            assert_eq!(d1, (q as usize - 1) * d0);
        }
    }

    fn arb_instance() -> impl Strategy<Value = (usize, u64, Vec<usize>)> {
        (0usize..4, prop::sample::select(vec![3u64, 4, 5, 7])).prop_flat_map(|(which, q)| {
            let t = match which {
                0 | 1 => (q - 1) as usize,
                _ => ((q - 1) * (q - 1)) as usize,
            };
            (
                Just(which),
                Just(q),
                prop::sample::subsequence((0..t).collect::<Vec<_>>(), 0..t.min(9)),
            )
        })
    }

    fn instance_polytope(which: usize, q: u64) -> LatticePolytope {
        match which {
            0 => segment(1),
            1 => segment((q as i64 - 2).max(1)),
            2 => unit_square(),
            _ => {
                if q >= 4 {
                    exceptional_simplex()
                } else {
                    unit_square()
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn counting_identity((which, q, s) in arb_instance()) {
            let a = evaluation_matrix(&instance_polytope(which, q), &gf(q)).unwrap();
            let n = s.len();
            let mut sum = 0u128;
            for mask in 0u32..(1 << n) {
                let sub: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]).collect();
                sum += f_s(&a, &sub).unwrap();
            }
            let r = r_s(&a, &s).unwrap();
            prop_assert_eq!(sum, (q as u128).pow(r as u32));
            prop_assert_eq!(f_s(&a, &s).unwrap(), f_s_by_enumeration(&a, &s, 100_000).unwrap());
            prop_assert_eq!(has_word_with_support(&a, &s).unwrap(), !s.is_empty() && f_s(&a, &s).unwrap() > 0);
        }
    }
}
