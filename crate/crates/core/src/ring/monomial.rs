//! Monomials: finite maps variable -> integer exponent.

use core::cmp::Ordering;

use alloc::vec::Vec;

use smallvec::SmallVec;

use super::vars::{VarId, VarTable};
use super::RingError;

/// A monomial over a [`VarTable`].
///
/// Stored sparsely as `(variable index, exponent)` pairs sorted by variable
/// index; zero exponents are never stored. Parameter- and cohomology-role
/// variables must keep exponents >= 0; this is checked at every construction
/// site that could break it (products of valid monomials stay valid).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: SmallVec<[(u16, i32); 4]>,
}

impl Monomial {
    /// The empty monomial `1`.
    pub fn one() -> Self {
        Monomial { exps: SmallVec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Single variable to the first power.
    pub fn var(v: VarId) -> Self {
        let mut exps = SmallVec::new();
        exps.push((v.0, 1));
        Monomial { exps }
    }

    /// `v^k`, validated against the variable's role.
    pub fn var_pow(table: &VarTable, v: VarId, k: i32) -> Result<Self, RingError> {
        Self::try_from_pairs(table, [(v, k)])
    }

    /// Build from pairs, merging duplicates and dropping zeros, with role
    /// validation.
    pub fn try_from_pairs(
        table: &VarTable,
        pairs: impl IntoIterator<Item = (VarId, i32)>,
    ) -> Result<Self, RingError> {
        let mut exps: SmallVec<[(u16, i32); 4]> = SmallVec::new();
        for (v, k) in pairs {
            if let Some(entry) = exps.iter_mut().find(|(i, _)| *i == v.0) {
                entry.1 += k;
            } else {
                exps.push((v.0, k));
            }
        }
        exps.retain(|&mut (_, k)| k != 0);
        exps.sort_unstable_by_key(|&(i, _)| i);
        for &(i, k) in &exps {
            let v = VarId(i);
            if k < 0 && !table.role(v).allows_negative() {
                return Err(RingError::NegativeExponent {
                    var: alloc::string::String::from(table.name(v)),
                });
            }
        }
        Ok(Monomial { exps })
    }

    pub fn exponent(&self, v: VarId) -> i32 {
        self.exps
            .iter()
            .find(|(i, _)| *i == v.0)
            .map(|&(_, k)| k)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, i32)> + '_ {
        self.exps.iter().map(|&(i, k)| (VarId(i), k))
    }

    /// Sum of exponents (signed).
    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|&(_, k)| k as i64).sum()
    }

    /// Sum of absolute exponents; the grading used by the canonical order.
    pub fn abs_degree(&self) -> i64 {
        self.exps.iter().map(|&(_, k)| k.unsigned_abs() as i64).sum()
    }

    /// Sum of exponents over the variables in `mask` (by table index).
    pub fn degree_in_mask(&self, mask: u64) -> i64 {
        self.exps
            .iter()
            .filter(|&&(i, _)| mask & (1u64 << i) != 0)
            .map(|&(_, k)| k as i64)
            .sum()
    }

    /// Bitmask of occurring variables.
    pub fn occurring_mask(&self) -> u64 {
        self.exps.iter().fold(0u64, |m, &(i, _)| m | (1u64 << i))
    }

    /// Product of two valid monomials; always valid.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps: SmallVec<[(u16, i32); 4]> = SmallVec::new();
        let (a, b) = (&self.exps, &other.exps);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    exps.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let k = a[i].1 + b[j].1;
                    if k != 0 {
                        exps.push((a[i].0, k));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&a[i..]);
        exps.extend_from_slice(&b[j..]);
        Monomial { exps }
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        let exps = self
            .exps
            .iter()
            .map(|&(i, e)| (i, e * k as i32))
            .collect();
        Monomial { exps }
    }

    /// `self^k` for any integer `k`, validated against roles.
    pub fn try_pow(&self, table: &VarTable, k: i32) -> Result<Monomial, RingError> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        for &(i, _) in &self.exps {
            let v = VarId(i);
            if !table.role(v).allows_negative() {
                return Err(RingError::NegativeExponent {
                    var: alloc::string::String::from(table.name(v)),
                });
            }
        }
        let exps = self.exps.iter().map(|&(i, e)| (i, e * k)).collect();
        Ok(Monomial { exps })
    }

    /// Multiplicative inverse, validated against roles.
    pub fn try_inv(&self, table: &VarTable) -> Result<Monomial, RingError> {
        self.try_pow(table, -1)
    }

    /// Remove the variable `v` entirely (used by coefficient extraction).
    pub fn without(&self, v: VarId) -> Monomial {
        let exps = self
            .exps
            .iter()
            .copied()
            .filter(|&(i, _)| i != v.0)
            .collect();
        Monomial { exps }
    }

    /// Swap the exponents of two variables.
    pub fn swap_vars(&self, a: VarId, b: VarId) -> Monomial {
        let mut exps: SmallVec<[(u16, i32); 4]> = self
            .exps
            .iter()
            .map(|&(i, k)| {
                if i == a.0 {
                    (b.0, k)
                } else if i == b.0 {
                    (a.0, k)
                } else {
                    (i, k)
                }
            })
            .collect();
        exps.sort_unstable_by_key(|&(i, _)| i);
        Monomial { exps }
    }

    /// Division-compatible order: graded by signed degree, then lex by
    /// exponent. Unlike the canonical order this is translation-invariant
    /// (`a < b` implies `a*c < b*c`), which exact division relies on.
    pub fn cmp_div(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut i = 0;
        let mut j = 0;
        loop {
            let a = self.exps.get(i);
            let b = other.exps.get(j);
            match (a, b) {
                (None, None) => return Ordering::Equal,
                _ => {}
            }
            let ai = a.map(|&(v, _)| v).unwrap_or(u16::MAX);
            let bi = b.map(|&(v, _)| v).unwrap_or(u16::MAX);
            let v = ai.min(bi);
            let ea = if ai == v { a.unwrap().1 } else { 0 };
            let eb = if bi == v { b.unwrap().1 } else { 0 };
            match ea.cmp(&eb) {
                Ordering::Equal => {}
                ord => return ord,
            }
            if ai == v {
                i += 1;
            }
            if bi == v {
                j += 1;
            }
        }
    }

    /// Pointwise exponent difference `self / other`, unchecked against roles.
    /// Callers must validate the result (exact division does).
    pub fn div_unchecked(&self, other: &Monomial) -> Monomial {
        let inv: SmallVec<[(u16, i32); 4]> =
            other.exps.iter().map(|&(i, k)| (i, -k)).collect();
        self.mul(&Monomial { exps: inv })
    }

    /// Whether all exponents satisfy their role constraints in `table`.
    pub fn roles_ok(&self, table: &VarTable) -> bool {
        self.exps
            .iter()
            .all(|&(i, k)| k >= 0 || table.role(VarId(i)).allows_negative())
    }

    /// Pack into a `u128` with one byte per variable and bias 64, for the
    /// fast multiplication path. Two packed values can be added without
    /// inter-byte carries as long as both stay within bias 64, and the sum
    /// decodes with bias 128 via [`Monomial::unpack_product`]. `None` if the
    /// table is too wide or an exponent is out of `[-63, 63]`.
    pub fn pack64(&self) -> Option<u128> {
        let mut bytes = [64u8; 16];
        for &(i, k) in &self.exps {
            if i >= 16 || !(-63..=63).contains(&k) {
                return None;
            }
            bytes[i as usize] = (k + 64) as u8;
        }
        Some(u128::from_le_bytes(bytes))
    }

    /// Flat sort key whose plain ordering equals the canonical monomial
    /// order: total absolute degree, then per variable (in table order) the
    /// byte `2|e| + (e > 0)`, which is monotone in `(|e|, e)`. `None` when
    /// any monomial is too wide or steep to encode.
    pub fn sort_keys<'a>(
        monos: impl Iterator<Item = &'a Monomial>,
    ) -> Option<Vec<((u16, u128), u32)>> {
        let mut keys = Vec::new();
        for (idx, m) in monos.enumerate() {
            let mut bytes = [0u8; 16];
            let mut degree: u16 = 0;
            for &(i, e) in &m.exps {
                if i >= 16 || !(-63..=63).contains(&e) {
                    return None;
                }
                bytes[i as usize] = ((e.unsigned_abs() << 1) as u8) | u8::from(e > 0);
                degree += e.unsigned_abs() as u16;
            }
            keys.push(((degree, u128::from_be_bytes(bytes)), idx as u32));
        }
        Some(keys)
    }

    /// Inverse of adding two `pack64` values (bias 128 per byte).
    pub fn unpack_product(packed: u128) -> Monomial {
        let bytes = packed.to_le_bytes();
        let mut exps: SmallVec<[(u16, i32); 4]> = SmallVec::new();
        for (i, &b) in bytes.iter().enumerate() {
            let e = b as i32 - 128;
            if e != 0 {
                exps.push((i as u16, e));
            }
        }
        Monomial { exps }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: graded by total absolute degree, ties broken variable by
/// variable in table order, comparing `(|e|, e)` so that within a grade the
/// earliest variable with the largest exponent magnitude wins and positive
/// beats negative. Polynomials store terms with the greatest monomial first;
/// display order is iteration order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.abs_degree().cmp(&other.abs_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut i = 0;
        let mut j = 0;
        loop {
            let a = self.exps.get(i);
            let b = other.exps.get(j);
            if a.is_none() && b.is_none() {
                return Ordering::Equal;
            }
            let ai = a.map(|&(v, _)| v).unwrap_or(u16::MAX);
            let bi = b.map(|&(v, _)| v).unwrap_or(u16::MAX);
            let v = ai.min(bi);
            let ea = if ai == v { a.unwrap().1 } else { 0 };
            let eb = if bi == v { b.unwrap().1 } else { 0 };
            match (ea.unsigned_abs(), ea).cmp(&(eb.unsigned_abs(), eb)) {
                Ordering::Equal => {}
                ord => return ord,
            }
            if ai == v {
                i += 1;
            }
            if bi == v {
                j += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::vars::{VarRole, VarTable};

    fn xy_table() -> (alloc::sync::Arc<VarTable>, VarId, VarId) {
        let mut b = VarTable::builder();
        let x = b.add("x1", VarRole::Torus).unwrap();
        let y = b.add("x2", VarRole::Torus).unwrap();
        (b.finish(), x, y)
    }

    #[test]
    fn mul_and_cancel() {
        let (t, x, y) = xy_table();
        let a = Monomial::try_from_pairs(&t, [(x, 2), (y, -1)]).unwrap();
        let b = Monomial::try_from_pairs(&t, [(x, -2), (y, 3)]).unwrap();
        let p = a.mul(&b);
        assert_eq!(p.exponent(x), 0);
        assert_eq!(p.exponent(y), 2);
    }

    #[test]
    fn role_checks() {
        let mut b = VarTable::builder();
        let x = b.add("x1", VarRole::Torus).unwrap();
        let p = b.add("b1", VarRole::Parameter).unwrap();
        let t = b.finish();
        assert!(Monomial::var_pow(&t, x, -2).is_ok());
        assert!(Monomial::var_pow(&t, p, -1).is_err());
        let m = Monomial::var(p);
        assert!(m.try_inv(&t).is_err());
        assert!(Monomial::var(x).try_inv(&t).is_ok());
    }

    #[test]
    fn canonical_order_matches_display_contract() {
        let (t, x, y) = xy_table();
        let m = |px, py| Monomial::try_from_pairs(&t, [(x, px), (y, py)]).unwrap();
        // x1^2*x2 before x1*x2^2
        assert!(m(2, 1) > m(1, 2));
        // x1^-1*x2 before the constant
        assert!(m(-1, 1) > Monomial::one());
        // x1^-1 before x2^-1, and x1 before x1^-1
        assert!(m(-1, 0) > m(0, -1));
        assert!(m(1, 0) > m(-1, 0));
    }

    #[test]
    fn div_order_is_translation_invariant() {
        let (t, x, y) = xy_table();
        let m = |px, py| Monomial::try_from_pairs(&t, [(x, px), (y, py)]).unwrap();
        let a = m(1, -1);
        let b = m(0, 0);
        let c = m(-3, 2);
        let before = a.cmp_div(&b);
        assert_eq!(a.mul(&c).cmp_div(&b.mul(&c)), before);
    }

    #[test]
    fn pack_roundtrip() {
        let (t, x, y) = xy_table();
        let a = Monomial::try_from_pairs(&t, [(x, 5), (y, -3)]).unwrap();
        let b = Monomial::try_from_pairs(&t, [(x, -2), (y, 7)]).unwrap();
        let packed = a.pack64().unwrap() + b.pack64().unwrap();
        assert_eq!(Monomial::unpack_product(packed), a.mul(&b));
    }
}
