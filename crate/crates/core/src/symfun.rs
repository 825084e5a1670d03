//! Symmetric-function primitives: complete homogeneous and elementary
//! symmetric polynomials, Schur polynomials via Jacobi-Trudi, partitions,
//! and a fraction-free determinant.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::ring::{LaurentPoly, Monomial, Rational, RingError, VarId, VarTable};

/// Errors from symmetric-function operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymfunError {
    /// Partition has more parts than there are variables.
    PartitionTooLong { len: usize, rank: usize },
    /// Parts not weakly decreasing, or unparseable text.
    InvalidPartition(String),
    Ring(RingError),
}

impl fmt::Display for SymfunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymfunError::PartitionTooLong { len, rank } => {
                write!(f, "partition has {len} parts but only {rank} variables")
            }
            SymfunError::InvalidPartition(text) => write!(f, "invalid partition `{text}`"),
            SymfunError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SymfunError {}

impl From<RingError> for SymfunError {
    fn from(e: RingError) -> Self {
        SymfunError::Ring(e)
    }
}

/// A weakly decreasing sequence of nonnegative integers.
///
/// The length is significant: trailing zero parts are kept, since the rank
/// they encode matters to the determinantal formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, SymfunError> {
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            use alloc::string::ToString;
            return Err(SymfunError::InvalidPartition(
                parts
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `lambda_i` with 1-based index; zero beyond the recorded length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn first(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Pad with zero parts up to length `len`.
    pub fn padded(&self, len: usize) -> Partition {
        let mut parts = self.parts.clone();
        while parts.len() < len {
            parts.push(0);
        }
        Partition { parts }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = SymfunError;

    /// Parse a comma-separated list, e.g. `2,1,0`. Empty input is the empty
    /// partition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
        let parts = parts.map_err(|_| SymfunError::InvalidPartition(String::from(s)))?;
        Partition::new(parts)
    }
}

/// Complete homogeneous symmetric polynomial `h_k` of the given monomials:
/// the sum over all size-`k` multisets of products. Zero for `k < 0`, one
/// for `k = 0`. Arguments are monomials, so evaluation at inverses like
/// `x_i^-1` needs no substitution pass.
pub fn h_k(table: &Arc<VarTable>, k: i32, items: &[Monomial]) -> LaurentPoly {
    if k < 0 {
        return LaurentPoly::zero(table);
    }
    let k = k as usize;
    let mut h: Vec<LaurentPoly> = Vec::with_capacity(k + 1);
    h.push(LaurentPoly::one(table));
    for _ in 0..k {
        h.push(LaurentPoly::zero(table));
    }
    for m in items {
        for j in 1..=k {
            let shifted = h[j - 1].mul_term(m, &Rational::one());
            h[j] = h[j].add_ref(&shifted);
        }
    }
    h.pop().unwrap_or_else(|| LaurentPoly::one(table))
}

/// Elementary symmetric polynomial `e_k`: sum over size-`k` subsets. Zero
/// outside `0 <= k <= items.len()`.
pub fn e_k(table: &Arc<VarTable>, k: i32, items: &[Monomial]) -> LaurentPoly {
    if k < 0 || k as usize > items.len() {
        return LaurentPoly::zero(table);
    }
    let k = k as usize;
    let mut e: Vec<LaurentPoly> = Vec::with_capacity(k + 1);
    e.push(LaurentPoly::one(table));
    for _ in 0..k {
        e.push(LaurentPoly::zero(table));
    }
    for m in items {
        for j in (1..=k).rev() {
            let shifted = e[j - 1].mul_term(m, &Rational::one());
            e[j] = e[j].add_ref(&shifted);
        }
    }
    e.pop().unwrap_or_else(|| LaurentPoly::one(table))
}

/// Fraction-free Bareiss determinant over the exact ring.
///
/// Every division in the elimination is exact by Sylvester's identity; a
/// failed division therefore signals a logic error and panics.
pub fn determinant(matrix: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n), "determinant of non-square matrix");
    if n == 0 {
        panic!("determinant of empty matrix has no table to build 1 in");
    }
    let table = Arc::clone(matrix[0][0].table());
    if n == 1 {
        return matrix[0][0].clone();
    }
    let mut m: Vec<Vec<LaurentPoly>> = matrix.to_vec();
    let mut sign = false;
    let mut prev = LaurentPoly::one(&table);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return LaurentPoly::zero(&table),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k]
                    .mul_ref(&m[i][j])
                    .sub_ref(&m[i][k].mul_ref(&m[k][j]));
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("Bareiss elimination divides exactly");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg_ref()
    } else {
        det
    }
}

/// Schur polynomial `S_lambda(x_1..x_r)` by the Jacobi-Trudi formula
/// `det(h_{lambda_i - i + j})`.
pub fn schur(
    table: &Arc<VarTable>,
    lambda: &Partition,
    xs: &[VarId],
) -> Result<LaurentPoly, SymfunError> {
    let r = xs.len();
    if lambda.len() > r {
        return Err(SymfunError::PartitionTooLong { len: lambda.len(), rank: r });
    }
    if r == 0 {
        // S_() over zero variables is 1; no nonzero lambda is allowed here.
        return Ok(LaurentPoly::one(table));
    }
    let items: Vec<Monomial> = xs.iter().map(|&v| Monomial::var(v)).collect();
    let matrix: Vec<Vec<LaurentPoly>> = (1..=r)
        .map(|i| {
            (1..=r)
                .map(|j| {
                    let k = lambda.part(i) as i64 - i as i64 + j as i64;
                    h_k(table, k as i32, &items)
                })
                .collect()
        })
        .collect();
    Ok(determinant(&matrix))
}

/// Whether `p` is invariant under every adjacent transposition of `vars`.
pub fn is_symmetric(p: &LaurentPoly, vars: &[VarId]) -> bool {
    vars.windows(2).all(|w| {
        let swapped = LaurentPoly::from_terms(
            p.table(),
            p.terms()
                .iter()
                .map(|(m, c)| (m.swap_vars(w[0], w[1]), c.clone())),
        );
        swapped == *p
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{VarRole, VarTable};
    use alloc::string::ToString;
    use alloc::vec;

    fn xs_table(r: usize) -> (Arc<VarTable>, Vec<VarId>) {
        let mut b = VarTable::builder();
        let xs = b.add_family("x", r, VarRole::Torus).unwrap();
        (b.finish(), xs)
    }

    fn var_monos(xs: &[VarId]) -> Vec<Monomial> {
        xs.iter().map(|&v| Monomial::var(v)).collect()
    }

    #[test]
    fn h_basics() {
        let (t, xs) = xs_table(3);
        let items2 = var_monos(&xs[..2]);
        assert_eq!(h_k(&t, 2, &items2).to_string(), "x1^2 + x1*x2 + x2^2");
        assert!(h_k(&t, 0, &var_monos(&xs)).is_one());
        assert!(h_k(&t, -3, &var_monos(&xs[..1])).is_zero());
        // h_1 at inverse monomials
        let inv: Vec<Monomial> = xs[..2]
            .iter()
            .map(|&v| Monomial::var_pow(&t, v, -1).unwrap())
            .collect();
        assert_eq!(h_k(&t, 1, &inv).to_string(), "x1^-1 + x2^-1");
    }

    #[test]
    fn e_basics() {
        let mut b = VarTable::builder();
        let us = b.add_family("u", 2, VarRole::Residue).unwrap();
        let t = b.finish();
        let items = var_monos(&us);
        assert_eq!(e_k(&t, 1, &items).to_string(), "u1 + u2");
        assert_eq!(e_k(&t, 2, &items).to_string(), "u1*u2");
        assert!(e_k(&t, 3, &items).is_zero());
        assert!(e_k(&t, 0, &items).is_one());
    }

    #[test]
    fn partition_parse_and_padding() {
        let p: Partition = "2,1,0".parse().unwrap();
        assert_eq!(p.parts(), &[2, 1, 0]);
        assert_eq!(p.len(), 3);
        assert_eq!(p.to_string(), "2,1,0");
        assert_eq!(p.part(2), 1);
        assert_eq!(p.part(5), 0);
        assert!("1,2".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
        let e: Partition = "".parse().unwrap();
        assert!(e.is_empty());
        assert_eq!(e.padded(2).parts(), &[0, 0]);
    }

    #[test]
    fn schur_small_cases() {
        let (t, xs) = xs_table(2);
        let s1 = schur(&t, &Partition::new(vec![1]).unwrap(), &xs).unwrap();
        assert_eq!(s1.to_string(), "x1 + x2");
        let s11 = schur(&t, &Partition::new(vec![1, 1]).unwrap(), &xs).unwrap();
        assert_eq!(s11.to_string(), "x1*x2");
        let s21 = schur(&t, &Partition::new(vec![2, 1]).unwrap(), &xs).unwrap();
        assert_eq!(s21.to_string(), "x1^2*x2 + x1*x2^2");
        assert!(schur(&t, &Partition::new(vec![1, 1, 1]).unwrap(), &xs).is_err());
    }

    /// Brute-force oracle: sum over semistandard tableaux of shape `lambda`
    /// with entries in `1..=r`, rows weakly increasing, columns strictly
    /// increasing.
    fn schur_by_tableaux(
        table: &Arc<VarTable>,
        lambda: &Partition,
        xs: &[VarId],
    ) -> LaurentPoly {
        fn fill(
            rows: &[u32],
            row: usize,
            col: usize,
            current: &mut Vec<Vec<usize>>,
            acc: &mut Vec<Monomial>,
            table: &Arc<VarTable>,
            xs: &[VarId],
        ) {
            if row == rows.len() {
                let pairs = current
                    .iter()
                    .flatten()
                    .map(|&e| (xs[e], 1i32))
                    .collect::<Vec<_>>();
                acc.push(Monomial::try_from_pairs(table, pairs).unwrap());
                return;
            }
            if col == rows[row] as usize {
                fill(rows, row + 1, 0, current, acc, table, xs);
                return;
            }
            let min_left = if col > 0 { current[row][col - 1] } else { 0 };
            let above_plus = if row > 0 && col < rows[row - 1] as usize {
                current[row - 1][col] + 1
            } else {
                0
            };
            for entry in min_left.max(above_plus)..xs.len() {
                current[row].push(entry);
                fill(rows, row, col + 1, current, acc, table, xs);
                current[row].pop();
            }
        }
        let rows: Vec<u32> = lambda.parts().iter().copied().filter(|&p| p > 0).collect();
        let mut acc = Vec::new();
        let mut current: Vec<Vec<usize>> = alloc::vec![Vec::new(); rows.len()];
        fill(&rows, 0, 0, &mut current, &mut acc, table, xs);
        LaurentPoly::from_terms(
            table,
            acc.into_iter().map(|m| (m, Rational::one())),
        )
    }

    #[test]
    fn schur_matches_tableau_enumeration() {
        for r in 1..=3 {
            let (t, xs) = xs_table(r);
            let lambdas: Vec<Vec<u32>> = match r {
                1 => vec![vec![], vec![1], vec![3]],
                2 => vec![vec![1], vec![2], vec![1, 1], vec![2, 1], vec![3, 2]],
                _ => vec![vec![2, 1], vec![2, 2, 1], vec![3, 1], vec![1, 1, 1]],
            };
            for parts in lambdas {
                let lambda = Partition::new(parts).unwrap();
                let a = schur(&t, &lambda, &xs).unwrap();
                let b = schur_by_tableaux(&t, &lambda, &xs);
                assert_eq!(a, b, "lambda={lambda} r={r}");
            }
        }
    }

    #[test]
    fn schur_specializations() {
        let (t, xs) = xs_table(3);
        let items = var_monos(&xs);
        assert!(schur(&t, &Partition::empty(), &xs).unwrap().is_one());
        for k in 1..=3 {
            let row = Partition::new(vec![k]).unwrap();
            assert_eq!(schur(&t, &row, &xs).unwrap(), h_k(&t, k as i32, &items));
            let col = Partition::new(alloc::vec![1; k as usize]).unwrap();
            assert_eq!(schur(&t, &col, &xs).unwrap(), e_k(&t, k as i32, &items));
        }
    }

    #[test]
    fn newton_identity() {
        for r in 1..=4usize {
            let (t, xs) = xs_table(r);
            let items = var_monos(&xs);
            for k in 1..=(2 * r) as i32 {
                let mut acc = LaurentPoly::zero(&t);
                for i in 0..=k {
                    let term = e_k(&t, i, &items).mul_ref(&h_k(&t, k - i, &items));
                    acc = if i % 2 == 0 {
                        acc.add_ref(&term)
                    } else {
                        acc.sub_ref(&term)
                    };
                }
                assert!(acc.is_zero(), "newton identity failed r={r} k={k}");
            }
        }
    }

    #[test]
    fn schur_is_symmetric() {
        let (t, xs) = xs_table(3);
        let s = schur(&t, &Partition::new(vec![3, 1]).unwrap(), &xs).unwrap();
        assert!(is_symmetric(&s, &xs));
        let asym = LaurentPoly::var(&t, xs[0]).sub_ref(&LaurentPoly::var(&t, xs[1]));
        assert!(!is_symmetric(&asym, &xs));
        // 1/(x1*x2) is symmetric
        let inv = LaurentPoly::from_monomial(
            &t,
            Monomial::try_from_pairs(&t, [(xs[0], -1), (xs[1], -1)]).unwrap(),
            Rational::one(),
        );
        assert!(is_symmetric(&inv, &xs[..2]));
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        let (t, xs) = xs_table(2);
        let zero = LaurentPoly::zero(&t);
        let one = LaurentPoly::one(&t);
        let x = LaurentPoly::var(&t, xs[0]);
        // [[0, 1], [x, 0]] -> det = -x
        let det = determinant(&[
            vec![zero.clone(), one.clone()],
            vec![x.clone(), zero.clone()],
        ]);
        assert_eq!(det, x.neg_ref());
        // Singular matrix
        let det = determinant(&[
            vec![x.clone(), x.clone()],
            vec![x.clone(), x.clone()],
        ]);
        assert!(det.is_zero());
    }
}
