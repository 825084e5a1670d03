//! Sparse multivariate Laurent polynomials over exact rationals.
//!
//! Terms are kept in canonical order (greatest monomial first under the
//! canonical order on [`Monomial`]) with no zero coefficients, so structural
//! equality is semantic equality and display output is deterministic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{BuildHasherDefault, Hasher};

use hashbrown::HashMap;

use super::monomial::Monomial;
use super::rational::Rational;
use super::vars::{VarId, VarRole, VarTable};
use super::RingError;

/// Degree truncation for formal series in parameter variables.
///
/// Multiplying under an active truncation drops every product term whose
/// total degree in the truncation set exceeds `limit`; this realizes the
/// quotient ring in which infinite parameter series become finite objects.
/// Truncation is idempotent and a ring morphism onto the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    mask: u64,
    limit: u32,
}

impl Truncation {
    /// Truncation in the given parameter variables at total degree `limit`.
    pub fn new(table: &VarTable, vars: &[VarId], limit: u32) -> Result<Self, RingError> {
        let mut mask = 0u64;
        for &v in vars {
            if table.role(v) != VarRole::Parameter {
                return Err(RingError::NonParameterTruncation {
                    var: String::from(table.name(v)),
                });
            }
            mask |= 1u64 << v.index();
        }
        Ok(Truncation { mask, limit })
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    /// Total degree of `m` in the truncation variables. Parameter exponents
    /// are nonnegative by the monomial invariant.
    pub fn degree_of(&self, m: &Monomial) -> u32 {
        m.degree_in_mask(self.mask) as u32
    }

    pub fn keeps(&self, m: &Monomial) -> bool {
        self.degree_of(m) <= self.limit
    }
}

/// A finite sum of monomials with exact rational coefficients.
#[derive(Clone)]
pub struct LaurentPoly {
    table: Arc<VarTable>,
    /// Sorted descending by the canonical monomial order; no zero
    /// coefficients.
    terms: Vec<(Monomial, Rational)>,
}

impl LaurentPoly {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        LaurentPoly { table: Arc::clone(table), terms: Vec::new() }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::constant(table, Rational::one())
    }

    pub fn constant(table: &Arc<VarTable>, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero(table);
        }
        LaurentPoly { table: Arc::clone(table), terms: alloc::vec![(Monomial::one(), c)] }
    }

    pub fn var(table: &Arc<VarTable>, v: VarId) -> Self {
        LaurentPoly {
            table: Arc::clone(table),
            terms: alloc::vec![(Monomial::var(v), Rational::one())],
        }
    }

    pub fn from_monomial(table: &Arc<VarTable>, m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero(table);
        }
        LaurentPoly { table: Arc::clone(table), terms: alloc::vec![(m, c)] }
    }

    /// Build from arbitrary terms: merges duplicates, drops zeros, sorts.
    pub fn from_terms(
        table: &Arc<VarTable>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut terms: Vec<(Monomial, Rational)> = terms.into_iter().collect();
        Self::sort_canonical(&mut terms);
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => {
                    *lc = lc.add_ref(&c);
                }
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        LaurentPoly { table: Arc::clone(table), terms: out }
    }

    /// Sort descending by the canonical order. Large lists are sorted by a
    /// precomputed flat key when the monomials fit (memcmp beats re-deriving
    /// the graded comparison per probe).
    fn sort_canonical(terms: &mut Vec<(Monomial, Rational)>) {
        if terms.len() > 1024 {
            if let Some(mut keyed) = Monomial::sort_keys(terms.iter().map(|(m, _)| m)) {
                keyed.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                let mut reordered: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
                let src = core::mem::take(terms);
                let mut taken: Vec<Option<(Monomial, Rational)>> =
                    src.into_iter().map(Some).collect();
                for (_, idx) in keyed {
                    reordered.push(taken[idx as usize].take().expect("unique index"));
                }
                *terms = reordered;
                return;
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    /// Terms in canonical (display) order.
    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// `Some(c)` if the polynomial is the constant `c` (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    /// `Some((monomial, coefficient))` if this is a single nonzero term.
    pub fn as_unit(&self) -> Option<(&Monomial, &Rational)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((m, c)),
            _ => None,
        }
    }

    /// Constant (monomial-free) coefficient.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    fn same_table(&self, other: &LaurentPoly) {
        assert!(
            Arc::ptr_eq(&self.table, &other.table) || *self.table == *other.table,
            "variable table mismatch"
        );
    }

    pub fn neg_ref(&self) -> LaurentPoly {
        LaurentPoly {
            table: Arc::clone(&self.table),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect(),
        }
    }

    pub fn add_ref(&self, other: &LaurentPoly) -> LaurentPoly {
        self.same_table(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1.add_ref(&b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LaurentPoly { table: Arc::clone(&self.table), terms: out }
    }

    pub fn sub_ref(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add_ref(&other.neg_ref())
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        LaurentPoly {
            table: Arc::clone(&self.table),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k.mul_ref(c))).collect(),
        }
    }

    /// Multiply by a single term. Preserves canonical order directly.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        let terms: Vec<(Monomial, Rational)> = self
            .terms
            .iter()
            .map(|(tm, tc)| (tm.mul(m), tc.mul_ref(c)))
            .collect();
        // Translation by a monomial does not preserve the abs-graded
        // canonical order in general, so re-sort.
        Self::from_terms(&self.table, terms)
    }

    pub fn mul_ref(&self, other: &LaurentPoly) -> LaurentPoly {
        self.mul_trunc(other, None)
    }

    /// Product, dropping terms beyond the truncation while multiplying.
    pub fn mul_trunc(&self, other: &LaurentPoly, trunc: Option<&Truncation>) -> LaurentPoly {
        self.same_table(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.table);
        }
        if let Some((m, c)) = other.as_unit() {
            let p = self.mul_term(m, c);
            return match trunc {
                Some(t) => p.truncate(t),
                None => p,
            };
        }
        if let Some((m, c)) = self.as_unit() {
            let p = other.mul_term(m, c);
            return match trunc {
                Some(t) => p.truncate(t),
                None => p,
            };
        }

        // Group term indices by truncation degree so only compatible blocks
        // are multiplied at all.
        let blocks = |p: &LaurentPoly| -> Vec<(u32, Vec<usize>)> {
            match trunc {
                None => alloc::vec![(0, (0..p.terms.len()).collect())],
                Some(t) => {
                    let mut map: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                    for (i, (m, _)) in p.terms.iter().enumerate() {
                        let d = t.degree_of(m);
                        if d <= t.limit() {
                            map.entry(d).or_default().push(i);
                        }
                    }
                    map.into_iter().collect()
                }
            }
        };
        let ab = blocks(self);
        let bb = blocks(other);
        let limit = trunc.map(|t| t.limit()).unwrap_or(0);

        let packed_a: Option<Vec<u128>> = if self.table.len() <= 16 {
            self.terms.iter().map(|(m, _)| m.pack64()).collect()
        } else {
            None
        };
        let packed_b: Option<Vec<u128>> = if self.table.len() <= 16 {
            other.terms.iter().map(|(m, _)| m.pack64()).collect()
        } else {
            None
        };

        // Size the accumulator from the kept pair count to avoid rehashing
        // while large products stream in.
        let mut kept_pairs: usize = 0;
        for &(da, ref ia) in &ab {
            for &(db, ref ib) in &bb {
                if trunc.is_some() && da + db > limit {
                    break;
                }
                kept_pairs = kept_pairs.saturating_add(ia.len() * ib.len());
            }
        }
        let capacity = kept_pairs.min(1 << 22).max(16);

        let terms = match (packed_a, packed_b) {
            (Some(pa), Some(pb)) => {
                let mut acc: HashMap<u128, Rational, FxBuild> =
                    HashMap::with_capacity_and_hasher(capacity, FxBuild::default());
                for &(da, ref ia) in &ab {
                    for &(db, ref ib) in &bb {
                        if trunc.is_some() && da + db > limit {
                            break;
                        }
                        for &i in ia {
                            let (_, ref ca) = self.terms[i];
                            let ka = pa[i];
                            for &j in ib {
                                let (_, ref cb) = other.terms[j];
                                let c = ca.mul_ref(cb);
                                match acc.entry(ka + pb[j]) {
                                    hashbrown::hash_map::Entry::Occupied(mut e) => {
                                        let s = e.get().add_ref(&c);
                                        if s.is_zero() {
                                            e.remove();
                                        } else {
                                            *e.get_mut() = s;
                                        }
                                    }
                                    hashbrown::hash_map::Entry::Vacant(e) => {
                                        e.insert(c);
                                    }
                                }
                            }
                        }
                    }
                }
                acc.into_iter()
                    .map(|(k, c)| (Monomial::unpack_product(k), c))
                    .collect::<Vec<_>>()
            }
            _ => {
                let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
                for &(da, ref ia) in &ab {
                    for &(db, ref ib) in &bb {
                        if trunc.is_some() && da + db > limit {
                            break;
                        }
                        for &i in ia {
                            let (ref ma, ref ca) = self.terms[i];
                            for &j in ib {
                                let (ref mb, ref cb) = other.terms[j];
                                let m = ma.mul(mb);
                                let c = ca.mul_ref(cb);
                                match acc.entry(m) {
                                    alloc::collections::btree_map::Entry::Occupied(mut e) => {
                                        let s = e.get().add_ref(&c);
                                        if s.is_zero() {
                                            e.remove();
                                        } else {
                                            *e.get_mut() = s;
                                        }
                                    }
                                    alloc::collections::btree_map::Entry::Vacant(e) => {
                                        e.insert(c);
                                    }
                                }
                            }
                        }
                    }
                }
                acc.into_iter().collect::<Vec<_>>()
            }
        };

        Self::from_terms(&self.table, terms)
    }

    /// `self^k`, optionally under truncation.
    pub fn pow_trunc(&self, k: u32, trunc: Option<&Truncation>) -> LaurentPoly {
        let mut acc = Self::one(&self.table);
        for _ in 0..k {
            acc = acc.mul_trunc(self, trunc);
        }
        acc
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        self.pow_trunc(k, None)
    }

    /// Drop terms beyond the truncation.
    pub fn truncate(&self, t: &Truncation) -> LaurentPoly {
        LaurentPoly {
            table: Arc::clone(&self.table),
            terms: self.terms.iter().filter(|(m, _)| t.keeps(m)).cloned().collect(),
        }
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(v) != 0)
    }

    /// Bitmask of variables occurring with nonzero exponent.
    pub fn occurring_mask(&self) -> u64 {
        self.terms.iter().fold(0u64, |acc, (m, _)| acc | m.occurring_mask())
    }

    /// `(min, max)` exponent of `v` over all terms, `None` if `self` is zero.
    /// Terms not containing `v` contribute exponent 0.
    pub fn degree_range(&self, v: VarId) -> Option<(i32, i32)> {
        if self.is_zero() {
            return None;
        }
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for (m, _) in &self.terms {
            let e = m.exponent(v);
            lo = lo.min(e);
            hi = hi.max(e);
        }
        Some((lo, hi))
    }

    /// Coefficient of `v^k`: a polynomial in the remaining variables
    /// (over the same table).
    pub fn coefficient_of(&self, v: VarId, k: i32) -> LaurentPoly {
        let terms: Vec<(Monomial, Rational)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(v) == k)
            .map(|(m, c)| (m.without(v), c.clone()))
            .collect();
        Self::from_terms(&self.table, terms)
    }

    /// Split into coefficient polynomials keyed by the exponent of `v`.
    pub fn split_by(&self, v: VarId) -> BTreeMap<i32, LaurentPoly> {
        let mut groups: BTreeMap<i32, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            groups.entry(m.exponent(v)).or_default().push((m.without(v), c.clone()));
        }
        groups
            .into_iter()
            .map(|(k, terms)| (k, Self::from_terms(&self.table, terms)))
            .collect()
    }

    /// Substitute `value` for `v`.
    ///
    /// A general polynomial value is allowed when `v` occurs only with
    /// nonnegative exponents; otherwise `value` must be a unit (a single
    /// term with nonzero coefficient) so that negative powers stay in the
    /// ring.
    pub fn substitute(&self, v: VarId, value: &LaurentPoly) -> Result<LaurentPoly, RingError> {
        self.same_table(value);
        let (lo, hi) = match self.degree_range(v) {
            None => return Ok(self.clone()),
            Some((0, 0)) => return Ok(self.clone()),
            Some(r) => r,
        };
        if lo >= 0 {
            // Polynomial occurrence: Horner-style sum of coefficient polys.
            let groups = self.split_by(v);
            let mut acc = Self::zero(&self.table);
            let mut power = Self::one(&self.table);
            let mut at = 0i32;
            for (k, coef) in groups {
                while at < k {
                    power = power.mul_ref(value);
                    at += 1;
                }
                acc = acc.add_ref(&coef.mul_ref(&power));
            }
            let _ = hi;
            Ok(acc)
        } else {
            let (um, uc) = value.as_unit().ok_or(RingError::NonUnitSubstitution)?;
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let e = m.exponent(v);
                let mono = m.without(v).mul(&um.try_pow(&self.table, e)?);
                let coef = c.mul_ref(&uc.try_pow(e).ok_or(RingError::NonUnitSubstitution)?);
                terms.push((mono, coef));
            }
            Ok(Self::from_terms(&self.table, terms))
        }
    }

    /// Exact evaluation at a rational point. Every occurring variable must
    /// be assigned; variables with negative exponents must be nonzero.
    pub fn eval(&self, assignment: &[(VarId, Rational)]) -> Result<Rational, RingError> {
        let value = |v: VarId| assignment.iter().find(|(w, _)| *w == v).map(|(_, r)| r);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.iter() {
                let val = value(v).ok_or_else(|| RingError::UnassignedVariable {
                    var: String::from(self.table.name(v)),
                })?;
                let p = val.try_pow(e).ok_or_else(|| RingError::EvalAtPole {
                    var: String::from(self.table.name(v)),
                })?;
                term = term.mul_ref(&p);
            }
            acc = acc.add_ref(&term);
        }
        Ok(acc)
    }

    /// Exact division: `self / divisor` with zero remainder, or an error.
    ///
    /// Works over the Laurent ring; the quotient support is confined to the
    /// per-variable exponent box implied by `deg(q) = deg(self) - deg(divisor)`
    /// in every variable, which both guarantees termination and detects
    /// inexact divisions.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly, RingError> {
        self.same_table(divisor);
        if divisor.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(&self.table));
        }

        let mask = self.occurring_mask() | divisor.occurring_mask();
        let mut bounds: Vec<(VarId, i32, i32)> = Vec::new();
        for idx in 0..self.table.len() {
            if mask & (1u64 << idx) == 0 {
                continue;
            }
            let v = VarId(idx as u16);
            let (plo, phi) = self.degree_range(v).unwrap();
            let (glo, ghi) = divisor.degree_range(v).unwrap();
            let (qlo, qhi) = (plo - glo, phi - ghi);
            if qlo > qhi {
                return Err(RingError::InexactDivision);
            }
            bounds.push((v, qlo, qhi));
        }

        // Work under the division order (graded signed-lex), which is
        // compatible with multiplication.
        let mut rem: Vec<(Monomial, Rational)> = self.terms.clone();
        rem.sort_unstable_by(|a, b| b.0.cmp_div(&a.0));
        let mut div: Vec<(Monomial, Rational)> = divisor.terms.clone();
        div.sort_unstable_by(|a, b| b.0.cmp_div(&a.0));

        let mut quotient: Vec<(Monomial, Rational)> = Vec::new();
        while let Some((lead_m, lead_c)) = rem.first().cloned() {
            let t_mono = lead_m.div_unchecked(&div[0].0);
            let in_box = bounds.iter().all(|&(v, lo, hi)| {
                let e = t_mono.exponent(v);
                lo <= e && e <= hi
            });
            if !in_box || !t_mono.roles_ok(&self.table) {
                return Err(RingError::InexactDivision);
            }
            let t_coef = lead_c.div_ref(&div[0].1);

            // rem -= t * divisor, merging two div-ordered lists.
            let sub: Vec<(Monomial, Rational)> = div
                .iter()
                .map(|(m, c)| (m.mul(&t_mono), c.mul_ref(&t_coef).neg_ref()))
                .collect();
            rem = merge_divord(rem, sub);
            quotient.push((t_mono, t_coef));
        }
        Ok(Self::from_terms(&self.table, quotient))
    }

    /// Exact division by the binomial `vp - vm` via synthetic division in
    /// `vp`; the remainder must vanish.
    pub fn div_exact_linear(&self, vp: VarId, vm: VarId) -> Result<LaurentPoly, RingError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        if let Some(result) = self.div_exact_linear_packed(vp, vm) {
            return result;
        }
        let (lo, hi) = self.degree_range(vp).unwrap();
        // Shift so vp occurs polynomially; vp is a unit in the Laurent ring.
        let shifted = if lo < 0 {
            self.mul_term(
                &Monomial::var_pow(&self.table, vp, -lo)?,
                &Rational::one(),
            )
        } else {
            self.clone()
        };
        let top = (hi - lo.min(0)) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = alloc::vec![Vec::new(); top + 1];
        for (m, c) in &shifted.terms {
            buckets[m.exponent(vp) as usize].push((m.without(vp), c.clone()));
        }
        let coeffs: Vec<LaurentPoly> = buckets
            .into_iter()
            .map(|terms| Self::from_terms(&self.table, terms))
            .collect();

        let vm_mono = Monomial::var(vm);
        let mut quotient_coeffs: Vec<LaurentPoly> = alloc::vec![Self::zero(&self.table); top];
        let mut carry = Self::zero(&self.table); // b_k while descending
        for k in (1..=top).rev() {
            let b = coeffs[k].add_ref(&carry.mul_term(&vm_mono, &Rational::one()));
            quotient_coeffs[k - 1] = b.clone();
            carry = b;
        }
        let remainder = coeffs[0].add_ref(&carry.mul_term(&vm_mono, &Rational::one()));
        if !remainder.is_zero() {
            return Err(RingError::InexactDivision);
        }

        let mut terms: Vec<(Monomial, Rational)> = Vec::new();
        for (k, b) in quotient_coeffs.into_iter().enumerate() {
            let shift_back = k as i32 + lo.min(0);
            let m = Monomial::var_pow(&self.table, vp, shift_back)?;
            for (tm, tc) in b.terms {
                terms.push((tm.mul(&m), tc));
            }
        }
        Ok(Self::from_terms(&self.table, terms))
    }

    /// Packed fast path of [`LaurentPoly::div_exact_linear`]: synthetic
    /// division carried out on `u128`-packed monomials with hash-map
    /// coefficient buckets, avoiding the per-step re-sorting of the generic
    /// version. `None` when the polynomial does not fit the packing.
    fn div_exact_linear_packed(
        &self,
        vp: VarId,
        vm: VarId,
    ) -> Option<Result<LaurentPoly, RingError>> {
        if self.table.len() > 16 || vp.index() >= 16 || vm.index() >= 16 {
            return None;
        }
        let (lo, hi) = self.degree_range(vp)?;
        let (_, vm_hi) = self.degree_range(vm).unwrap_or((0, 0));
        // The quotient's vm exponent can grow by one per division step.
        if vm_hi + (hi - lo) > 62 || hi - lo > 120 {
            return None;
        }
        let vp_shift = vp.index() * 8;
        let vm_step: u128 = 1u128 << (vm.index() * 8);
        let base = lo.min(0);
        let top = (hi - base) as usize;

        let mut buckets: Vec<Vec<(u128, Rational)>> = alloc::vec![Vec::new(); top + 1];
        for (m, c) in &self.terms {
            let packed = m.pack64()?;
            let e = m.exponent(vp);
            // Strip the vp byte down to exponent zero. The wrapping
            // subtraction is exact: the true result has every byte in range.
            let stripped = packed.wrapping_sub(((e as i128) << vp_shift) as u128);
            buckets[(e - base) as usize].push((stripped, c.clone()));
        }

        let mut b: HashMap<u128, Rational, FxBuild> =
            HashMap::with_capacity_and_hasher(64, FxBuild::default());
        let mut quotient: Vec<(Monomial, Rational)> = Vec::new();
        for k in (0..=top).rev() {
            // b_{k-1} = a_k + vm * b_k  (descending), remainder at k = 0.
            let mut next: HashMap<u128, Rational, FxBuild> =
                HashMap::with_capacity_and_hasher(b.len() + buckets[k].len(), FxBuild::default());
            for (key, coef) in b.drain() {
                next.insert(key + vm_step, coef);
            }
            for (key, coef) in buckets[k].drain(..) {
                match next.entry(key) {
                    hashbrown::hash_map::Entry::Occupied(mut e) => {
                        let s = e.get().add_ref(&coef);
                        if s.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = s;
                        }
                    }
                    hashbrown::hash_map::Entry::Vacant(e) => {
                        e.insert(coef);
                    }
                }
            }
            if k == 0 {
                if !next.is_empty() {
                    return Some(Err(RingError::InexactDivision));
                }
            } else {
                let vp_exp = (k as i32 - 1) + base;
                debug_assert!((-63..=63).contains(&vp_exp));
                for (key, coef) in next.iter() {
                    let with_vp = key.wrapping_add(((vp_exp as i128) << vp_shift) as u128);
                    // Rebias from single-pack (64) to product (128) bytes.
                    quotient.push((Monomial::unpack_product(with_vp + PACK_REBIAS), coef.clone()));
                }
                b = next;
            }
        }
        Some(Ok(Self::from_terms(&self.table, quotient)))
    }

    /// Re-express over another table, matching variables by name.
    pub fn retable(&self, new_table: &Arc<VarTable>) -> Result<LaurentPoly, RingError> {
        let mut mapping: Vec<Option<VarId>> = alloc::vec![None; self.table.len()];
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut pairs: Vec<(VarId, i32)> = Vec::new();
            for (v, e) in m.iter() {
                let target = match mapping[v.index()] {
                    Some(t) => t,
                    None => {
                        let name = self.table.name(v);
                        let t = new_table.lookup(name).ok_or_else(|| {
                            RingError::UnknownVariable { var: String::from(name) }
                        })?;
                        mapping[v.index()] = Some(t);
                        t
                    }
                };
                pairs.push((target, e));
            }
            terms.push((Monomial::try_from_pairs(new_table, pairs)?, c.clone()));
        }
        Ok(Self::from_terms(new_table, terms))
    }
}

/// The `pack64` image of the empty monomial: adding it turns single-packed
/// bytes (bias 64) into product-packed bytes (bias 128).
const PACK_REBIAS: u128 = u128::from_le_bytes([64u8; 16]);

/// Flat term list over product-packed (bias 128) monomial keys, unsorted
/// and duplicate-free. The internal currency of the heavy determinant
/// pipelines: sums of products accumulate in hash maps keyed by `u128`,
/// and only the final conversion back to a [`LaurentPoly`] pays for a sort.
#[derive(Clone, Debug)]
pub(crate) struct PackedPoly {
    pub(crate) keys: Vec<u128>,
    pub(crate) coefs: Vec<Rational>,
}

pub(crate) type AccMap = HashMap<u128, Rational, FxBuild>;

#[inline]
pub(crate) fn acc_add(map: &mut AccMap, key: u128, coef: Rational) {
    match map.entry(key) {
        hashbrown::hash_map::Entry::Occupied(mut e) => {
            let s = e.get().add_ref(&coef);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
        hashbrown::hash_map::Entry::Vacant(e) => {
            e.insert(coef);
        }
    }
}

impl PackedPoly {
    pub(crate) fn len(&self) -> usize {
        self.keys.len()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub(crate) fn from_poly(p: &LaurentPoly) -> Option<PackedPoly> {
        if p.table.len() > 16 {
            return None;
        }
        let mut keys = Vec::with_capacity(p.terms.len());
        for (m, _) in &p.terms {
            keys.push(m.pack64()? + PACK_REBIAS);
        }
        let coefs = p.terms.iter().map(|(_, c)| c.clone()).collect();
        Some(PackedPoly { keys, coefs })
    }

    pub(crate) fn from_map(map: AccMap) -> PackedPoly {
        let mut keys = Vec::with_capacity(map.len());
        let mut coefs = Vec::with_capacity(map.len());
        for (k, c) in map {
            keys.push(k);
            coefs.push(c);
        }
        PackedPoly { keys, coefs }
    }

    /// Total degree in the byte positions selected by `byte_mask`,
    /// assuming those exponents are nonnegative (parameter variables).
    #[inline]
    pub(crate) fn block_degree(key: u128, byte_mask: u128) -> u32 {
        let mut masked = key & byte_mask;
        let mut deg: i32 = 0;
        while masked != 0 {
            let shift = masked.trailing_zeros() & !7;
            deg += ((masked >> shift) & 0xff) as i32 - 128;
            masked &= !(0xffu128 << shift);
        }
        deg.max(0) as u32
    }

    /// One sort at the end of a packed pipeline: canonical order derived
    /// straight from the packed bytes.
    pub(crate) fn into_poly(self, table: &Arc<VarTable>) -> LaurentPoly {
        let mut keyed: Vec<((u16, u128), u32)> = Vec::with_capacity(self.keys.len());
        for (i, &k) in self.keys.iter().enumerate() {
            keyed.push((canonical_sort_key(k), i as u32));
        }
        keyed.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut coefs = self.coefs;
        let mut terms: Vec<(Monomial, Rational)> = Vec::with_capacity(keyed.len());
        for (_, idx) in keyed {
            let i = idx as usize;
            if coefs[i].is_zero() {
                continue;
            }
            terms.push((
                Monomial::unpack_product(self.keys[i]),
                core::mem::take(&mut coefs[i]),
            ));
        }
        LaurentPoly { table: Arc::clone(table), terms }
    }
}

/// The canonical-order sort key of a product-packed monomial; mirrors
/// [`Monomial::sort_keys`].
#[inline]
fn canonical_sort_key(packed: u128) -> (u16, u128) {
    let bytes = packed.to_le_bytes();
    let mut out = [0u8; 16];
    let mut degree: u16 = 0;
    for (i, &b) in bytes.iter().enumerate() {
        let e = b as i32 - 128;
        let mag = e.unsigned_abs() as u16;
        degree += mag;
        out[i] = ((mag as u8) << 1) | u8::from(e > 0);
    }
    (degree, u128::from_be_bytes(out))
}

/// `acc += (sign) * a * b` over packed terms, pruning by truncation degree.
pub(crate) fn acc_product(
    map: &mut AccMap,
    a: &PackedPoly,
    b: &PackedPoly,
    trunc_bytes: u128,
    limit: u32,
    negate: bool,
) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    let da: Vec<u32> = if trunc_bytes != 0 {
        a.keys.iter().map(|&k| PackedPoly::block_degree(k, trunc_bytes)).collect()
    } else {
        alloc::vec![0; a.keys.len()]
    };
    let db: Vec<u32> = if trunc_bytes != 0 {
        b.keys.iter().map(|&k| PackedPoly::block_degree(k, trunc_bytes)).collect()
    } else {
        alloc::vec![0; b.keys.len()]
    };
    for (i, &ka) in a.keys.iter().enumerate() {
        let ca = if negate { a.coefs[i].neg_ref() } else { a.coefs[i].clone() };
        for (j, &kb) in b.keys.iter().enumerate() {
            if da[i].saturating_add(db[j]) > limit {
                continue;
            }
            acc_add(map, ka.wrapping_add(kb).wrapping_sub(PACK_REBIAS), ca.mul_ref(&b.coefs[j]));
        }
    }
}

/// Accumulates a sum of polynomial products into one packed map, so chains
/// like `sum_t minor_t * d_t` pay one merge at the end instead of one per
/// addend. Falls back to ordinary arithmetic when a monomial cannot be
/// packed.
pub struct ProductAccumulator {
    table: Arc<VarTable>,
    map: HashMap<u128, Rational, FxBuild>,
    overflow: Option<LaurentPoly>,
}

impl ProductAccumulator {
    pub fn new(table: &Arc<VarTable>) -> Self {
        ProductAccumulator {
            table: Arc::clone(table),
            map: HashMap::with_capacity_and_hasher(1 << 12, FxBuild::default()),
            overflow: None,
        }
    }

    /// Add `a * b`, dropping terms beyond the truncation.
    pub fn add_product(&mut self, a: &LaurentPoly, b: &LaurentPoly, trunc: Option<&Truncation>) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let packed_a: Option<Vec<u128>> = if self.table.len() <= 16 {
            a.terms.iter().map(|(m, _)| m.pack64()).collect()
        } else {
            None
        };
        let packed_b: Option<Vec<u128>> = if self.table.len() <= 16 {
            b.terms.iter().map(|(m, _)| m.pack64()).collect()
        } else {
            None
        };
        match (packed_a, packed_b) {
            (Some(pa), Some(pb)) => {
                let degree = |p: &LaurentPoly| -> Vec<u32> {
                    match trunc {
                        Some(t) => p.terms.iter().map(|(m, _)| t.degree_of(m)).collect(),
                        None => alloc::vec![0; p.terms.len()],
                    }
                };
                let da = degree(a);
                let db = degree(b);
                let limit = trunc.map(|t| t.limit()).unwrap_or(u32::MAX);
                for (i, &ka) in pa.iter().enumerate() {
                    let ca = &a.terms[i].1;
                    for (j, &kb) in pb.iter().enumerate() {
                        if da[i].saturating_add(db[j]) > limit {
                            continue;
                        }
                        let c = ca.mul_ref(&b.terms[j].1);
                        match self.map.entry(ka + kb) {
                            hashbrown::hash_map::Entry::Occupied(mut e) => {
                                let s = e.get().add_ref(&c);
                                if s.is_zero() {
                                    e.remove();
                                } else {
                                    *e.get_mut() = s;
                                }
                            }
                            hashbrown::hash_map::Entry::Vacant(e) => {
                                e.insert(c);
                            }
                        }
                    }
                }
            }
            _ => {
                let product = a.mul_trunc(b, trunc);
                self.overflow = Some(match self.overflow.take() {
                    Some(acc) => acc.add_ref(&product),
                    None => product,
                });
            }
        }
    }

    pub fn finish(self) -> LaurentPoly {
        let terms: Vec<(Monomial, Rational)> = self
            .map
            .into_iter()
            .map(|(k, c)| (Monomial::unpack_product(k), c))
            .collect();
        let main = LaurentPoly::from_terms(&self.table, terms);
        match self.overflow {
            Some(extra) => main.add_ref(&extra),
            None => main,
        }
    }
}

/// Accumulates sums of products, bucketed by the byte pattern of a chosen
/// variable block (typically the torus characters). Each bucket's map is
/// keyed only by the complementary bytes and stays small enough to be
/// cache-resident, which matters once outputs reach millions of terms;
/// bucket entries are globally unique so finishing needs one sort and no
/// second merge pass.
pub struct BlockedAccumulator {
    table: Arc<VarTable>,
    byte_mask: u128,
    groups: HashMap<u128, HashMap<u128, Rational, FxBuild>, FxBuild>,
    overflow: Option<LaurentPoly>,
}

impl BlockedAccumulator {
    /// Block on the variables in `vars` (a table-index bitmask).
    pub fn new(table: &Arc<VarTable>, vars: u64) -> Self {
        let mut byte_mask: u128 = 0;
        for i in 0..16u32 {
            if vars & (1u64 << i) != 0 {
                byte_mask |= 0xffu128 << (i * 8);
            }
        }
        BlockedAccumulator {
            table: Arc::clone(table),
            byte_mask,
            groups: HashMap::with_capacity_and_hasher(1 << 10, FxBuild::default()),
            overflow: None,
        }
    }

    /// Add `a * b`, dropping terms beyond the truncation.
    pub fn add_product(&mut self, a: &LaurentPoly, b: &LaurentPoly, trunc: Option<&Truncation>) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let pack = |p: &LaurentPoly| -> Option<Vec<u128>> {
            if self.table.len() <= 16 {
                p.terms.iter().map(|(m, _)| m.pack64()).collect()
            } else {
                None
            }
        };
        let (pa, pb) = match (pack(a), pack(b)) {
            (Some(pa), Some(pb)) => (pa, pb),
            _ => {
                let product = a.mul_trunc(b, trunc);
                self.overflow = Some(match self.overflow.take() {
                    Some(acc) => acc.add_ref(&product),
                    None => product,
                });
                return;
            }
        };
        let degree = |p: &LaurentPoly| -> Vec<u32> {
            match trunc {
                Some(t) => p.terms.iter().map(|(m, _)| t.degree_of(m)).collect(),
                None => alloc::vec![0; p.terms.len()],
            }
        };
        let da = degree(a);
        let db = degree(b);
        let limit = trunc.map(|t| t.limit()).unwrap_or(u32::MAX);

        // Group the outer (blocked) byte patterns of each side, then work
        // pair-of-groups at a time so every insert hits one small map.
        let group_of = |packed: &[u128]| -> BTreeMap<u128, Vec<usize>> {
            let mut g: BTreeMap<u128, Vec<usize>> = BTreeMap::new();
            for (i, &k) in packed.iter().enumerate() {
                g.entry(k & self.byte_mask).or_default().push(i);
            }
            g
        };
        let ga = group_of(&pa);
        let gb = group_of(&pb);
        for (ka, ia) in &ga {
            for (kb, ib) in &gb {
                let outer = ka + kb;
                let inner_map = self
                    .groups
                    .entry(outer)
                    .or_insert_with(|| HashMap::with_capacity_and_hasher(16, FxBuild::default()));
                for &i in ia {
                    let inner_a = pa[i] & !self.byte_mask;
                    let ca = &a.terms[i].1;
                    for &j in ib {
                        if da[i].saturating_add(db[j]) > limit {
                            continue;
                        }
                        let c = ca.mul_ref(&b.terms[j].1);
                        match inner_map.entry(inner_a + (pb[j] & !self.byte_mask)) {
                            hashbrown::hash_map::Entry::Occupied(mut e) => {
                                let s = e.get().add_ref(&c);
                                if s.is_zero() {
                                    e.remove();
                                } else {
                                    *e.get_mut() = s;
                                }
                            }
                            hashbrown::hash_map::Entry::Vacant(e) => {
                                e.insert(c);
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn finish(self) -> LaurentPoly {
        let mut terms: Vec<(Monomial, Rational)> = Vec::new();
        for (outer, inner_map) in self.groups {
            for (inner, coef) in inner_map {
                terms.push((Monomial::unpack_product(outer | inner), coef));
            }
        }
        let main = LaurentPoly::from_terms(&self.table, terms);
        match self.overflow {
            Some(extra) => main.add_ref(&extra),
            None => main,
        }
    }
}

/// Merge two descending div-ordered term lists, summing equal monomials.
fn merge_divord(
    a: Vec<(Monomial, Rational)>,
    b: Vec<(Monomial, Rational)>,
) -> Vec<(Monomial, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ai = a.into_iter().peekable();
    let mut bi = b.into_iter().peekable();
    loop {
        let take_a = match (ai.peek(), bi.peek()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some((ma, _)), Some((mb, _))) => match ma.cmp_div(mb) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    let (m, ca) = ai.next().unwrap();
                    let (_, cb) = bi.next().unwrap();
                    let c = ca.add_ref(&cb);
                    if !c.is_zero() {
                        out.push((m, c));
                    }
                    continue;
                }
            },
        };
        if take_a {
            out.push(ai.next().unwrap());
        } else {
            out.push(bi.next().unwrap());
        }
    }
    out
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.table, &other.table) || *self.table == *other.table)
            && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

impl core::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl core::ops::$trait<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$imp(rhs)
            }
        }
    };
}

poly_binop!(Add, add, add_ref);
poly_binop!(Sub, sub, sub_ref);
poly_binop!(Mul, mul, mul_ref);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if m.is_one() {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                let mut first = true;
                for (v, e) in m.iter() {
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    write!(f, "{}", self.table.name(v))?;
                    if e != 1 {
                        write!(f, "^{}", e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// FxHash-style hasher for the packed-monomial multiplication path.
#[derive(Default)]
struct FxHasher {
    hash: u64,
}

impl FxHasher {
    #[inline]
    fn mix(&mut self, v: u64) {
        self.hash = (self.hash.rotate_left(5) ^ v).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }
}

impl Hasher for FxHasher {
    #[inline]
    fn finish(&self) -> u64 {
        self.hash
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.mix(b as u64);
        }
    }

    #[inline]
    fn write_u128(&mut self, v: u128) {
        self.mix(v as u64);
        self.mix((v >> 64) as u64);
    }
}

type FxBuild = BuildHasherDefault<FxHasher>;
