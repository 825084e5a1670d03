//! Residues at 0 and infinity for the integrand shape produced by the
//! push-forward formulas: a Laurent-polynomial numerator over a multiset of
//! binomial factors `1 - c*m`.
//!
//! Both residues are computed by exact geometric-series expansion to the
//! finitely many orders needed to reach the `v^-1` coefficient. The residue
//! at infinity follows the convention
//! `Res_{v=inf} f dv = -Res_{w=0} f(1/w) w^-2 dw`,
//! equivalently minus the `v^-1` coefficient of the expansion of `f` at
//! infinity; the closed-form residue table pins the convention.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ring::{LaurentPoly, Monomial, Rational, RingError, VarId, VarTable};
use crate::symfun::h_k;

/// Errors from residue extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueError {
    /// A denominator factor carries the residue variable with exponent
    /// other than 0 or +1.
    BadFactorShape { var: String },
    /// `1 - c` with a constant monomial cannot be series-expanded.
    ConstantFactor,
    /// Expanding at infinity would invert a variable whose role forbids
    /// negative exponents.
    NonInvertibleAtInfinity { var: String },
    Ring(RingError),
}

impl fmt::Display for ResidueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueError::BadFactorShape { var } => {
                write!(f, "denominator factor has `{var}`-exponent outside {{0, +1}}")
            }
            ResidueError::ConstantFactor => write!(f, "denominator factor `1 - c` is constant"),
            ResidueError::NonInvertibleAtInfinity { var } => {
                write!(f, "expansion at infinity would invert non-Laurent variable `{var}`")
            }
            ResidueError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ResidueError {}

impl From<RingError> for ResidueError {
    fn from(e: RingError) -> Self {
        ResidueError::Ring(e)
    }
}

/// A denominator factor `1 - c*m` with `c` a nonzero rational and `m` a
/// nonconstant monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BinomFactor {
    mono: Monomial,
    coef: Rational,
}

impl BinomFactor {
    pub fn new(coef: Rational, mono: Monomial) -> Result<Self, ResidueError> {
        if coef.is_zero() || mono.is_one() {
            return Err(ResidueError::ConstantFactor);
        }
        Ok(BinomFactor { mono, coef })
    }

    /// `1 - m` for a plain monomial.
    pub fn from_monomial(mono: Monomial) -> Result<Self, ResidueError> {
        Self::new(Rational::one(), mono)
    }

    pub fn mono(&self) -> &Monomial {
        &self.mono
    }

    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    /// The factor as a polynomial `1 - c*m`.
    pub fn expand(&self, table: &Arc<VarTable>) -> LaurentPoly {
        LaurentPoly::one(table).sub_ref(&LaurentPoly::from_monomial(
            table,
            self.mono.clone(),
            self.coef.clone(),
        ))
    }
}

/// A Laurent-polynomial numerator over a multiset of [`BinomFactor`]s.
///
/// The representation is not reduced: no cancellation between numerator and
/// denominator is attempted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredRational {
    numerator: LaurentPoly,
    denom: Vec<BinomFactor>,
}

impl FactoredRational {
    pub fn new(numerator: LaurentPoly, mut denom: Vec<BinomFactor>) -> Self {
        denom.sort();
        FactoredRational { numerator, denom }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        FactoredRational { numerator: p, denom: Vec::new() }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.numerator
    }

    pub fn denominators(&self) -> &[BinomFactor] {
        &self.denom
    }

    pub fn table(&self) -> &Arc<VarTable> {
        self.numerator.table()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Whether the denominator is empty, i.e. the value is a polynomial.
    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        if self.denom.is_empty() {
            Some(&self.numerator)
        } else {
            None
        }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        FactoredRational {
            numerator: self.numerator.mul_ref(p),
            denom: self.denom.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FactoredRational {
            numerator: self.numerator.scale(c),
            denom: self.denom.clone(),
        }
    }

    /// Append denominator factors.
    pub fn with_factors(&self, extra: impl IntoIterator<Item = BinomFactor>) -> Self {
        let mut denom = self.denom.clone();
        denom.extend(extra);
        denom.sort();
        FactoredRational { numerator: self.numerator.clone(), denom }
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerator)?;
        for b in &self.denom {
            let table = self.numerator.table();
            write!(f, " / ({})", b.expand(table))?;
        }
        Ok(())
    }
}

/// Split denominator factors by whether they carry `v`, validating shape.
fn split_factors(
    f: &FactoredRational,
    v: VarId,
) -> Result<(Vec<BinomFactor>, Vec<BinomFactor>), ResidueError> {
    let mut with_v = Vec::new();
    let mut without_v = Vec::new();
    for b in &f.denom {
        match b.mono.exponent(v) {
            0 => without_v.push(b.clone()),
            1 => with_v.push(b.clone()),
            _ => {
                return Err(ResidueError::BadFactorShape {
                    var: String::from(f.table().name(v)),
                })
            }
        }
    }
    Ok((with_v, without_v))
}

/// Drop terms whose `v`-exponent exceeds `hi`.
fn truncate_var_above(p: &LaurentPoly, v: VarId, hi: i32) -> LaurentPoly {
    LaurentPoly::from_terms(
        p.table(),
        p.terms()
            .iter()
            .filter(|(m, _)| m.exponent(v) <= hi)
            .cloned(),
    )
}

/// Drop terms whose `v`-exponent is below `lo`.
fn truncate_var_below(p: &LaurentPoly, v: VarId, lo: i32) -> LaurentPoly {
    LaurentPoly::from_terms(
        p.table(),
        p.terms()
            .iter()
            .filter(|(m, _)| m.exponent(v) >= lo)
            .cloned(),
    )
}

/// Formal residue at `v = 0`.
///
/// Every `v`-dependent denominator factor is expanded as a geometric series
/// around 0; the required order is read off the numerator's minimum
/// `v`-degree, never from a tolerance.
pub fn residue_at_zero(f: &FactoredRational, v: VarId) -> Result<FactoredRational, ResidueError> {
    let (with_v, without_v) = split_factors(f, v)?;
    let table = f.table();
    if f.numerator.is_zero() {
        return Ok(FactoredRational::new(LaurentPoly::zero(table), without_v));
    }
    let (lo, _) = f.numerator.degree_range(v).unwrap();
    let order = -1 - lo; // highest series order that can still reach v^-1
    if order < 0 {
        return Ok(FactoredRational::new(LaurentPoly::zero(table), without_v));
    }
    let mut product = f.numerator.clone();
    for b in &with_v {
        // 1/(1 - c*mu*v) = sum_n (c*mu)^n v^n with mu = m/v
        let mu = b.mono.without(v);
        let mut series_terms = Vec::with_capacity(order as usize + 1);
        let mut mono = Monomial::one();
        let mut coef = Rational::one();
        let v_mono = Monomial::var(v);
        for _ in 0..=order {
            series_terms.push((mono.clone(), coef.clone()));
            mono = mono.mul(&mu).mul(&v_mono);
            coef = coef.mul_ref(&b.coef);
        }
        let series = LaurentPoly::from_terms(table, series_terms);
        product = truncate_var_above(&product.mul_ref(&series), v, -1);
    }
    let res = product.coefficient_of(v, -1);
    Ok(FactoredRational::new(res, without_v))
}

/// Formal residue at `v = infinity`, as minus the `v^-1` coefficient of the
/// expansion of `f` at infinity.
pub fn residue_at_infinity(
    f: &FactoredRational,
    v: VarId,
) -> Result<FactoredRational, ResidueError> {
    let (with_v, without_v) = split_factors(f, v)?;
    let table = f.table();
    if f.numerator.is_zero() {
        return Ok(FactoredRational::new(LaurentPoly::zero(table), without_v));
    }
    let (_, hi) = f.numerator.degree_range(v).unwrap();
    let s = with_v.len() as i32;
    // Each factor contributes at least v^-1; total must reach -1 - hi.
    let max_order = hi + 2 - s;
    if s > 0 && max_order < 1 {
        return Ok(FactoredRational::new(LaurentPoly::zero(table), without_v));
    }
    let mut product = f.numerator.clone();
    for b in &with_v {
        // 1/(1 - c*mu*v) = -sum_{n>=1} (c*mu)^-n v^-n at infinity
        let mu = b.mono.without(v);
        let mu_inv = mu.try_inv(table).map_err(|e| match e {
            RingError::NegativeExponent { var } => {
                ResidueError::NonInvertibleAtInfinity { var }
            }
            other => ResidueError::Ring(other),
        })?;
        let c_inv = Rational::one().div_ref(&b.coef);
        let v_inv = Monomial::var_pow(table, v, -1)?;
        let mut series_terms = Vec::with_capacity(max_order as usize);
        let mut mono = mu_inv.clone().mul(&v_inv);
        let mut coef = c_inv.neg_ref();
        for _ in 1..=max_order {
            series_terms.push((mono.clone(), coef.clone()));
            mono = mono.mul(&mu_inv).mul(&v_inv);
            coef = coef.mul_ref(&c_inv);
        }
        let series = LaurentPoly::from_terms(table, series_terms);
        product = truncate_var_below(&product.mul_ref(&series), v, -1);
    }
    let res = product.coefficient_of(v, -1).neg_ref();
    Ok(FactoredRational::new(res, without_v))
}

/// Sum of the residues at 0 and infinity:
/// `Res_{v=0} f dv + Res_{v=inf} f dv`.
///
/// The result's denominator consists of exactly the input factors that do
/// not involve `v`.
pub fn residue_sum(f: &FactoredRational, v: VarId) -> Result<FactoredRational, ResidueError> {
    let zero = residue_at_zero(f, v)?;
    let inf = residue_at_infinity(f, v)?;
    debug_assert_eq!(zero.denom, inf.denom);
    Ok(FactoredRational::new(
        zero.numerator.add_ref(&inf.numerator),
        zero.denom,
    ))
}

/// Iterated residue: the composition of [`residue_sum`] over the variables,
/// innermost last. `iterated_residue(f, [u1, u2])` computes
/// `Res_{u1=0,inf} Res_{u2=0,inf} f du2 du1`.
pub fn iterated_residue(
    f: &FactoredRational,
    vars: &[VarId],
) -> Result<FactoredRational, ResidueError> {
    let mut acc = f.clone();
    for &v in vars.iter().rev() {
        acc = residue_sum(&acc, v)?;
    }
    Ok(acc)
}

/// Closed form of `Res_{u=0,inf} u^k / prod_a (1 - u/x_a) du/u` over the
/// torus variables `xs`:
///
/// - `h_{-k}(x^-1)` for `k <= 0`,
/// - `0` for `0 < k < r`,
/// - `(-1)^(r-1) * x_1..x_r * h_{k-r}(x)` for `k >= r`.
pub fn residue_k_closed(table: &Arc<VarTable>, xs: &[VarId], k: i32) -> LaurentPoly {
    let r = xs.len() as i32;
    if k <= 0 {
        let inv: Vec<Monomial> = xs
            .iter()
            .map(|&x| Monomial::var_pow(table, x, -1).expect("torus variable"))
            .collect();
        h_k(table, -k, &inv)
    } else if k < r {
        LaurentPoly::zero(table)
    } else {
        let items: Vec<Monomial> = xs.iter().map(|&x| Monomial::var(x)).collect();
        let prod = xs
            .iter()
            .fold(Monomial::one(), |m, &x| m.mul(&Monomial::var(x)));
        let sign = if r % 2 == 1 { Rational::one() } else { Rational::from_i64(-1) };
        h_k(table, k - r, &items).mul_term(&prod, &sign)
    }
}

/// The linear map `Phi` on Laurent polynomials in `u`:
///
/// - `Phi(u^k) = h_{-k}(x^-1) / (x_1..x_r)` for `k <= 0`,
/// - `Phi(u^k) = (-1)^(r-1) h_{k-r}(x)` for `k > 0`,
///
/// extended linearly; coefficients (which may involve `x` and parameters)
/// pass through untouched.
pub fn phi(p: &LaurentPoly, u: VarId, xs: &[VarId]) -> LaurentPoly {
    let table = p.table();
    let r = xs.len() as i32;
    let inv_monos: Vec<Monomial> = xs
        .iter()
        .map(|&x| Monomial::var_pow(table, x, -1).expect("torus variable"))
        .collect();
    let monos: Vec<Monomial> = xs.iter().map(|&x| Monomial::var(x)).collect();
    let all_inv = xs.iter().fold(Monomial::one(), |m, &x| {
        m.mul(&Monomial::var_pow(table, x, -1).expect("torus variable"))
    });
    let sign = if r % 2 == 1 { Rational::one() } else { Rational::from_i64(-1) };

    let mut acc = LaurentPoly::zero(table);
    for (k, coef) in p.split_by(u) {
        let image = if k <= 0 {
            h_k(table, -k, &inv_monos).mul_term(&all_inv, &Rational::one())
        } else {
            h_k(table, k - r, &monos).scale(&sign)
        };
        acc = acc.add_ref(&coef.mul_ref(&image));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{VarRole, VarTable};
    use alloc::string::ToString;
    use alloc::vec;

    /// Table with x1..xr and u.
    fn setup(r: usize) -> (Arc<VarTable>, Vec<VarId>, VarId) {
        let mut b = VarTable::builder();
        let xs = b.add_family("x", r, VarRole::Torus).unwrap();
        let u = b.add("u", VarRole::Residue).unwrap();
        (b.finish(), xs, u)
    }

    /// The integrand `u^k / prod_a (1 - u/x_a) * du/u`.
    fn table_integrand(
        t: &Arc<VarTable>,
        xs: &[VarId],
        u: VarId,
        k: i32,
    ) -> FactoredRational {
        let num = LaurentPoly::from_monomial(
            t,
            Monomial::var_pow(t, u, k - 1).unwrap(),
            Rational::one(),
        );
        let denom = xs
            .iter()
            .map(|&x| {
                BinomFactor::from_monomial(
                    Monomial::try_from_pairs(t, [(u, 1), (x, -1)]).unwrap(),
                )
                .unwrap()
            })
            .collect();
        FactoredRational::new(num, denom)
    }

    #[test]
    fn residue_table_spec_examples() {
        let (t, xs, u) = setup(2);
        // k = 0 -> 1
        let got = residue_sum(&table_integrand(&t, &xs, u, 0), u).unwrap();
        assert!(got.denominators().is_empty());
        assert!(got.numerator().is_one());
        // k = 1 -> 0
        let got = residue_sum(&table_integrand(&t, &xs, u, 1), u).unwrap();
        assert!(got.numerator().is_zero());
        // k = 2 -> -x1*x2
        let got = residue_sum(&table_integrand(&t, &xs, u, 2), u).unwrap();
        assert_eq!(got.numerator().to_string(), "-x1*x2");
    }

    #[test]
    fn residue_of_polynomial_vanishes() {
        let (t, xs, u) = setup(1);
        let p = LaurentPoly::from_monomial(
            &t,
            Monomial::var_pow(&t, u, 3).unwrap(),
            Rational::one(),
        )
        .add_ref(&LaurentPoly::var(&t, xs[0]))
        .add_ref(&LaurentPoly::from_monomial(
            &t,
            Monomial::var_pow(&t, u, -2).unwrap(),
            Rational::from_pair(5, 3),
        ));
        let got = residue_sum(&FactoredRational::from_poly(p), u).unwrap();
        assert!(got.numerator().is_zero());
        assert!(got.denominators().is_empty());
    }

    #[test]
    fn closed_form_spec_examples() {
        let (t2, xs2, _) = setup(2);
        assert_eq!(residue_k_closed(&t2, &xs2, -1).to_string(), "x1^-1 + x2^-1");
        assert_eq!(
            residue_k_closed(&t2, &xs2, 3).to_string(),
            "-x1^2*x2 - x1*x2^2"
        );
        let (t3, xs3, _) = setup(3);
        assert!(residue_k_closed(&t3, &xs3, 1).is_zero());
    }

    #[test]
    fn engine_matches_closed_form() {
        for r in 1..=3 {
            let (t, xs, u) = setup(r);
            for k in -4..=4 {
                let engine = residue_sum(&table_integrand(&t, &xs, u, k), u).unwrap();
                let closed = residue_k_closed(&t, &xs, k);
                assert_eq!(
                    *engine.numerator(),
                    closed,
                    "k={k} r={r}"
                );
            }
        }
    }

    #[test]
    fn phi_spec_examples() {
        let (t, xs, u) = setup(2);
        let upow = |k: i32| {
            LaurentPoly::from_monomial(
                &t,
                Monomial::var_pow(&t, u, k).unwrap(),
                Rational::one(),
            )
        };
        assert_eq!(phi(&upow(0), u, &xs).to_string(), "x1^-1*x2^-1");
        assert!(phi(&upow(1), u, &xs).is_zero());
        assert_eq!(phi(&upow(2), u, &xs).to_string(), "-1");
        // linearity with a coefficient free of u
        let c = LaurentPoly::var(&t, xs[0]);
        let p = c.mul_ref(&upow(2)).add_ref(&upow(0));
        let expect = c.neg_ref().add_ref(&phi(&upow(0), u, &xs));
        assert_eq!(phi(&p, u, &xs), expect);
    }

    #[test]
    fn phi_consistent_with_closed_form() {
        for r in 1..=3 {
            let (t, xs, u) = setup(r);
            let all = xs
                .iter()
                .fold(Monomial::one(), |m, &x| m.mul(&Monomial::var(x)));
            for k in -4..=4 {
                let upow = LaurentPoly::from_monomial(
                    &t,
                    Monomial::var_pow(&t, u, k).unwrap(),
                    Rational::one(),
                );
                let lhs = phi(&upow, u, &xs).mul_term(&all, &Rational::one());
                assert_eq!(lhs, residue_k_closed(&t, &xs, k), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn bad_factor_shapes_rejected() {
        let (t, xs, u) = setup(1);
        // (1 - u^2) has u-exponent 2
        let f = FactoredRational::new(
            LaurentPoly::one(&t),
            vec![BinomFactor::from_monomial(Monomial::var_pow(&t, u, 2).unwrap()).unwrap()],
        );
        assert!(matches!(
            residue_sum(&f, u),
            Err(ResidueError::BadFactorShape { .. })
        ));
        // (1 - x1/u) has u-exponent -1
        let f = FactoredRational::new(
            LaurentPoly::one(&t),
            vec![BinomFactor::from_monomial(
                Monomial::try_from_pairs(&t, [(xs[0], 1), (u, -1)]).unwrap(),
            )
            .unwrap()],
        );
        assert!(matches!(
            residue_sum(&f, u),
            Err(ResidueError::BadFactorShape { .. })
        ));
        // constant factor rejected at construction
        assert!(matches!(
            BinomFactor::new(Rational::one(), Monomial::one()),
            Err(ResidueError::ConstantFactor)
        ));
        assert!(matches!(
            BinomFactor::new(Rational::zero(), Monomial::var(u)),
            Err(ResidueError::ConstantFactor)
        ));
    }

    #[test]
    fn parameter_inversion_at_infinity_rejected() {
        let mut b = VarTable::builder();
        let al = b.add("al1", VarRole::Parameter).unwrap();
        let u = b.add("u", VarRole::Residue).unwrap();
        let t = b.finish();
        // u / (1 - al1*u): residue at infinity needs al1^-1
        let f = FactoredRational::new(
            LaurentPoly::var(&t, u),
            vec![BinomFactor::from_monomial(
                Monomial::try_from_pairs(&t, [(al, 1), (u, 1)]).unwrap(),
            )
            .unwrap()],
        );
        assert!(matches!(
            residue_at_infinity(&f, u),
            Err(ResidueError::NonInvertibleAtInfinity { .. })
        ));
        // ... but the residue at zero is fine
        assert!(residue_at_zero(&f, u).is_ok());
    }

    #[test]
    fn linearity_over_shared_denominator() {
        let (t, xs, u) = setup(2);
        let f = table_integrand(&t, &xs, u, 2);
        let g = table_integrand(&t, &xs, u, -1);
        let a = Rational::from_pair(3, 7);
        let b = Rational::from_i64(-2);
        let combined = FactoredRational::new(
            f.numerator().scale(&a).add_ref(&g.numerator().scale(&b)),
            f.denominators().to_vec(),
        );
        let lhs = residue_sum(&combined, u).unwrap();
        let rhs = residue_sum(&f, u)
            .unwrap()
            .numerator()
            .scale(&a)
            .add_ref(&residue_sum(&g, u).unwrap().numerator().scale(&b));
        assert_eq!(*lhs.numerator(), rhs);
    }

    #[test]
    fn v_free_factors_pass_through() {
        let (t, xs, u) = setup(2);
        let spectator = BinomFactor::from_monomial(
            Monomial::try_from_pairs(&t, [(xs[0], 1), (xs[1], -1)]).unwrap(),
        )
        .unwrap();
        let f = table_integrand(&t, &xs, u, 0).with_factors([spectator.clone()]);
        let got = residue_sum(&f, u).unwrap();
        assert_eq!(got.denominators(), &[spectator]);
        assert!(got.numerator().is_one());
    }
}
