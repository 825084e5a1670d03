//! Refined shifted factorial Grothendieck polynomials and their
//! determinantal formulas.
//!
//! `G_lambda(x | b, alpha, beta)` is defined as a Vandermonde quotient of the
//! determinant built from the factors
//! `g_i(u) = [u|b]^{lambda_i + r - i} (1 - beta_1 u)..(1 - beta_{i-1} u)
//!           / ((1 - alpha_1 u)..(1 - alpha_{lambda_i} u)) * u`
//! with the factorial bracket `[u|b]^k = (u + b_1 + beta_0 u b_1)..`.
//!
//! Everything `alpha`-dependent is an infinite formal series, so all
//! computations happen in the ring truncated at a chosen total
//! `alpha`-degree; the determinantal identity is checked modulo that degree.
//! Two independent routes are implemented: [`groth_direct`] (the definition:
//! determinant, then exact Vandermonde division) and [`groth_determinant`]
//! (entries pushed through the residue functional `Phi`), plus the Lenart
//! specialization [`lenart_det`] and the general identity behind them,
//! [`theorem_det_check`].

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::residue::{phi, BinomFactor, FactoredRational, ResidueError};
use crate::ring::{
    binomial, BlockedAccumulator, LaurentPoly, Monomial, ProductAccumulator, Rational, RingError,
    Truncation, VarId, VarRole, VarTable,
};
use crate::symfun::{determinant, h_k, Partition, SymfunError};

/// Errors from Grothendieck-polynomial operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrothError {
    /// A parameter family has fewer entries than the shape requires.
    NotEnoughParams { family: &'static str, needed: usize, got: usize },
    /// Nonzero rational `alpha` values have no finite truncation; `alpha`
    /// entries must be symbolic or zero.
    NonSymbolicAlpha,
    /// The Vandermonde division left a remainder: the determinant was not
    /// antisymmetric, which indicates a bug.
    AntisymmetryBroken,
    /// Family lengths or lambda out of range.
    InvalidShape(String),
    Symfun(SymfunError),
    Ring(RingError),
    Residue(ResidueError),
}

impl fmt::Display for GrothError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrothError::NotEnoughParams { family, needed, got } => {
                write!(f, "family `{family}` needs {needed} entries, got {got}")
            }
            GrothError::NonSymbolicAlpha => {
                write!(f, "alpha entries must be symbolic or zero (series would be infinite)")
            }
            GrothError::AntisymmetryBroken => {
                write!(f, "Vandermonde division left a remainder; determinant not antisymmetric")
            }
            GrothError::InvalidShape(msg) => write!(f, "invalid shape: {msg}"),
            GrothError::Symfun(e) => write!(f, "{e}"),
            GrothError::Ring(e) => write!(f, "{e}"),
            GrothError::Residue(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GrothError {}

impl From<SymfunError> for GrothError {
    fn from(e: SymfunError) -> Self {
        GrothError::Symfun(e)
    }
}

impl From<RingError> for GrothError {
    fn from(e: RingError) -> Self {
        GrothError::Ring(e)
    }
}

impl From<ResidueError> for GrothError {
    fn from(e: ResidueError) -> Self {
        GrothError::Residue(e)
    }
}

/// How a parameter family is supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Fresh symbolic variables.
    Symbolic,
    /// Explicit rational values. For `alpha` only zeros are accepted.
    Values(Vec<Rational>),
}

/// An `alpha_m` entry: zero or a symbolic variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AlphaEntry {
    Zero,
    Var(VarId),
}

/// The parameter data of a refined shifted factorial Grothendieck
/// polynomial: rank, shape, the families `b`, `alpha`, `beta` (including
/// `beta_0`), and the `alpha`-truncation order.
#[derive(Clone, Debug)]
pub struct GrothParams {
    table: Arc<VarTable>,
    r: usize,
    lambda: Partition,
    xs: Vec<VarId>,
    u: VarId,
    b: Vec<LaurentPoly>,
    beta0: LaurentPoly,
    beta: Vec<LaurentPoly>,
    alpha: Vec<AlphaEntry>,
    trunc: Option<Truncation>,
    trunc_order: u32,
}

impl GrothParams {
    /// Build the table `x_1..x_r, u` plus whatever symbolic parameters the
    /// family specs ask for, and validate entry counts:
    /// `b` needs `lambda_1 + r - 1` entries, `beta` needs `beta_0` plus
    /// `beta_1..beta_{r-1}`, `alpha` needs `lambda_1`.
    pub fn new(
        r: usize,
        lambda: Partition,
        b: FamilySpec,
        alpha: FamilySpec,
        beta: FamilySpec,
        trunc_order: u32,
    ) -> Result<Self, GrothError> {
        if r == 0 {
            return Err(GrothError::InvalidShape(String::from("r must be positive")));
        }
        if lambda.len() > r {
            return Err(GrothError::InvalidShape(alloc::format!(
                "lambda has {} parts but r = {r}",
                lambda.len()
            )));
        }
        let lambda1 = lambda.first() as usize;
        let need_b = (lambda1 + r).saturating_sub(1);
        let need_beta = r; // beta_0 .. beta_{r-1}
        let need_alpha = lambda1;

        if let FamilySpec::Values(vs) = &b {
            if vs.len() < need_b {
                return Err(GrothError::NotEnoughParams {
                    family: "b",
                    needed: need_b,
                    got: vs.len(),
                });
            }
        }
        if let FamilySpec::Values(vs) = &beta {
            if vs.len() < need_beta {
                return Err(GrothError::NotEnoughParams {
                    family: "beta",
                    needed: need_beta,
                    got: vs.len(),
                });
            }
        }
        if let FamilySpec::Values(vs) = &alpha {
            if vs.len() < need_alpha {
                return Err(GrothError::NotEnoughParams {
                    family: "alpha",
                    needed: need_alpha,
                    got: vs.len(),
                });
            }
            if vs.iter().any(|v| !v.is_zero()) {
                return Err(GrothError::NonSymbolicAlpha);
            }
        }

        let mut builder = VarTable::builder();
        let xs = builder.add_family("x", r, VarRole::Torus)?;
        let u = builder.add("u", VarRole::Residue)?;
        let b_vars = match &b {
            FamilySpec::Symbolic => Some(builder.add_family("b", need_b, VarRole::Parameter)?),
            FamilySpec::Values(_) => None,
        };
        let beta_vars = match &beta {
            FamilySpec::Symbolic => {
                Some(builder.add_family_from("be", 0, need_beta, VarRole::Parameter)?)
            }
            FamilySpec::Values(_) => None,
        };
        let alpha_vars = match &alpha {
            FamilySpec::Symbolic => {
                Some(builder.add_family("al", need_alpha, VarRole::Parameter)?)
            }
            FamilySpec::Values(_) => None,
        };
        let table = builder.finish();

        let b_entries: Vec<LaurentPoly> = match (&b, &b_vars) {
            (FamilySpec::Symbolic, Some(vars)) => {
                vars.iter().map(|&v| LaurentPoly::var(&table, v)).collect()
            }
            (FamilySpec::Values(vs), _) => vs[..need_b]
                .iter()
                .map(|c| LaurentPoly::constant(&table, c.clone()))
                .collect(),
            _ => unreachable!(),
        };
        let (beta0, beta_entries): (LaurentPoly, Vec<LaurentPoly>) = match (&beta, &beta_vars) {
            (FamilySpec::Symbolic, Some(vars)) => (
                LaurentPoly::var(&table, vars[0]),
                vars[1..].iter().map(|&v| LaurentPoly::var(&table, v)).collect(),
            ),
            (FamilySpec::Values(vs), _) => (
                LaurentPoly::constant(&table, vs[0].clone()),
                vs[1..need_beta]
                    .iter()
                    .map(|c| LaurentPoly::constant(&table, c.clone()))
                    .collect(),
            ),
            _ => unreachable!(),
        };
        let alpha_entries: Vec<AlphaEntry> = match (&alpha, &alpha_vars) {
            (FamilySpec::Symbolic, Some(vars)) => {
                vars.iter().map(|&v| AlphaEntry::Var(v)).collect()
            }
            (FamilySpec::Values(_), _) => alloc::vec![AlphaEntry::Zero; need_alpha],
            _ => unreachable!(),
        };
        let trunc = match &alpha_vars {
            Some(vars) if !vars.is_empty() => Some(Truncation::new(&table, vars, trunc_order)?),
            _ => None,
        };

        Ok(GrothParams {
            table,
            r,
            lambda,
            xs,
            u,
            b: b_entries,
            beta0,
            beta: beta_entries,
            alpha: alpha_entries,
            trunc,
            trunc_order,
        })
    }

    /// The Lenart specialization `beta_1 = .. = beta_{r-1} = -beta_0`.
    /// Requires a symbolic (or at least non-empty) `beta_0`.
    pub fn set_beta_to_neg_beta0(&mut self) {
        let neg = self.beta0.neg_ref();
        for entry in self.beta.iter_mut() {
            *entry = neg.clone();
        }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    pub fn xs(&self) -> &[VarId] {
        &self.xs
    }

    pub fn u(&self) -> VarId {
        self.u
    }

    pub fn beta0(&self) -> &LaurentPoly {
        &self.beta0
    }

    pub fn trunc(&self) -> Option<&Truncation> {
        self.trunc.as_ref()
    }

    pub fn trunc_order(&self) -> u32 {
        self.trunc_order
    }

    /// `lambda_i + r - i` for the 1-based row index.
    fn bracket_exponent(&self, i: usize) -> usize {
        (self.lambda.part(i) as usize + self.r).saturating_sub(i)
    }
}

/// The factorial bracket `[t|b]^k = prod_{m=1..k} (t + b_m + beta_0 t b_m)`
/// at the variable `t`; `k = 0` gives 1.
pub fn bracket_power(params: &GrothParams, k: usize, at: VarId) -> Result<LaurentPoly, GrothError> {
    if k > params.b.len() {
        return Err(GrothError::NotEnoughParams { family: "b", needed: k, got: params.b.len() });
    }
    let table = &params.table;
    let t = LaurentPoly::var(table, at);
    let mut acc = LaurentPoly::one(table);
    for b_m in &params.b[..k] {
        let factor = t
            .add_ref(b_m)
            .add_ref(&params.beta0.mul_ref(&t).mul_ref(b_m));
        acc = acc.mul_ref(&factor);
    }
    Ok(acc)
}

/// `prod_{m=1}^{i-1} (1 - beta_m t)` at the variable `t`.
fn beta_prefix(params: &GrothParams, i: usize, at: VarId) -> LaurentPoly {
    let table = &params.table;
    let t = LaurentPoly::var(table, at);
    let mut acc = LaurentPoly::one(table);
    for beta_m in params.beta.iter().take(i.saturating_sub(1)) {
        acc = acc.mul_ref(&LaurentPoly::one(table).sub_ref(&beta_m.mul_ref(&t)));
    }
    acc
}

/// `prod_{m=1}^{lambda_i} 1/(1 - alpha_m t)` expanded to the truncation
/// order; 1 when every factor is zero or `lambda_i = 0`.
fn alpha_series(params: &GrothParams, i: usize, at: VarId) -> LaurentPoly {
    let table = &params.table;
    let mut acc = LaurentPoly::one(table);
    let count = params.lambda.part(i) as usize;
    for entry in params.alpha.iter().take(count) {
        let v = match entry {
            AlphaEntry::Zero => continue,
            AlphaEntry::Var(v) => *v,
        };
        let order = params.trunc_order;
        let mut terms = Vec::with_capacity(order as usize + 1);
        let step = Monomial::try_from_pairs(table, [(v, 1), (at, 1)]).expect("alpha * t");
        let mut mono = Monomial::one();
        for _ in 0..=order {
            terms.push((mono.clone(), Rational::one()));
            mono = mono.mul(&step);
        }
        let series = LaurentPoly::from_terms(table, terms);
        acc = acc.mul_trunc(&series, params.trunc());
    }
    acc
}

/// The `alpha`-expanded `g_i(t)/t`:
/// `[t|b]^{lambda_i+r-i} * prod_{m<i}(1 - beta_m t) * prod_{m<=lambda_i} 1/(1 - alpha_m t)`
/// truncated at the `alpha` order.
fn g_series(params: &GrothParams, i: usize, at: VarId) -> Result<LaurentPoly, GrothError> {
    let bracket = bracket_power(params, params.bracket_exponent(i), at)?;
    let prefix = beta_prefix(params, i, at);
    let series = alpha_series(params, i, at);
    Ok(bracket.mul_ref(&prefix).mul_trunc(&series, params.trunc()))
}

/// The exact rational function `g_i(u)` as numerator and binomial
/// denominator factors (no `alpha` expansion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFactor {
    index: usize,
    fr: FactoredRational,
}

impl GFactor {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn as_factored(&self) -> &FactoredRational {
        &self.fr
    }
}

/// Build `g_i(u)` exactly: numerator
/// `[u|b]^{lambda_i+r-i} * prod_{m<i}(1 - beta_m u) * u`, denominator
/// `{(1 - alpha_m u)}_{m=1}^{lambda_i}` (empty when `lambda_i = 0` or
/// `alpha = 0`).
pub fn build_g_i(params: &GrothParams, i: usize) -> Result<GFactor, GrothError> {
    if i == 0 || i > params.r {
        return Err(GrothError::InvalidShape(alloc::format!(
            "row index {i} out of 1..={}",
            params.r
        )));
    }
    let table = &params.table;
    let u = params.u;
    let num = bracket_power(params, params.bracket_exponent(i), u)?
        .mul_ref(&beta_prefix(params, i, u))
        .mul_ref(&LaurentPoly::var(table, u));
    let mut denom = Vec::new();
    for entry in params.alpha.iter().take(params.lambda.part(i) as usize) {
        if let AlphaEntry::Var(v) = entry {
            let mono = Monomial::try_from_pairs(table, [(*v, 1), (u, 1)])?;
            denom.push(BinomFactor::from_monomial(mono)?);
        }
    }
    Ok(GFactor { index: i, fr: FactoredRational::new(num, denom) })
}

/// Determinant by Laplace expansion over column subsets, with every product
/// running under the truncation. No divisions, so intermediate truncation is
/// sound (truncation is a ring morphism). The last row streams into a single
/// accumulator instead of merging full-size polynomials per cofactor.
fn det_trunc(entries: &[Vec<LaurentPoly>], trunc: Option<&Truncation>) -> LaurentPoly {
    let n = entries.len();
    let table = entries[0][0].table();
    if n == 0 {
        return LaurentPoly::one(table);
    }
    if n == 1 {
        return entries[0][0].clone();
    }
    let full = (1usize << n) - 1;
    let mut minors: Vec<Option<LaurentPoly>> = alloc::vec![None; full + 1];
    minors[0] = Some(LaurentPoly::one(table));
    for row in 0..n - 1 {
        let mut next: Vec<Option<LaurentPoly>> = alloc::vec![None; full + 1];
        for mask in 0..=full {
            let Some(minor) = &minors[mask] else { continue };
            if (mask as u32).count_ones() as usize != row {
                continue;
            }
            let mut position = 0usize;
            for j in 0..n {
                let bit = 1usize << j;
                if mask & bit != 0 {
                    position += 1;
                    continue;
                }
                let term = entries[row][j].mul_trunc(minor, trunc);
                let signed = if (row + position) % 2 == 0 { term } else { term.neg_ref() };
                let slot = &mut next[mask | bit];
                *slot = Some(match slot.take() {
                    Some(acc) => acc.add_ref(&signed),
                    None => signed,
                });
            }
        }
        minors = next;
    }
    let mut acc = ProductAccumulator::new(table);
    for j in 0..n {
        let mask = full & !(1usize << j);
        if let Some(minor) = &minors[mask] {
            // The missing column j sits at position j of the full set.
            let signed = if (n - 1 + j) % 2 == 0 {
                entries[n - 1][j].clone()
            } else {
                entries[n - 1][j].neg_ref()
            };
            acc.add_product(&signed, minor, trunc);
        }
    }
    acc.finish()
}

/// Successive exact division by `(x_i - x_j)` for `i < j`; a remainder at
/// any step signals broken antisymmetry.
fn divide_vandermonde(p: &LaurentPoly, xs: &[VarId]) -> Result<LaurentPoly, GrothError> {
    let mut acc = p.clone();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            acc = acc
                .div_exact_linear(xs[i], xs[j])
                .map_err(|_| GrothError::AntisymmetryBroken)?;
        }
    }
    Ok(acc)
}

/// The refined shifted factorial Grothendieck polynomial by definition:
/// `det(g_i(x_j)/x_j) / prod_{i<j}(x_i - x_j)` with every entry
/// `alpha`-expanded to the truncation order.
///
/// The full `alpha`-series `prod_{m<=lambda_1} 1/(1 - alpha_m x_j)` is a
/// common factor of column `j` up to the polynomial corrections
/// `prod_{lambda_i < m <= lambda_1} (1 - alpha_m x_j)`, so it is pulled out
/// of the determinant and multiplied back in after the Vandermonde
/// division. Since truncation is a ring morphism, the result is identical
/// to expanding every entry first, at a fraction of the cost.
pub fn groth_direct(params: &GrothParams) -> Result<LaurentPoly, GrothError> {
    let r = params.r;
    let table = &params.table;
    let lambda1 = params.lambda.first() as usize;
    let mut entries: Vec<Vec<LaurentPoly>> = Vec::with_capacity(r);
    for i in 1..=r {
        let mut row = Vec::with_capacity(r);
        for j in 0..r {
            let at = params.xs[j];
            let mut entry = bracket_power(params, params.bracket_exponent(i), at)?
                .mul_ref(&beta_prefix(params, i, at));
            // Column correction: the series factors missing from row i.
            let t = LaurentPoly::var(table, at);
            for entry_m in params.alpha[params.lambda.part(i) as usize..lambda1].iter() {
                if let AlphaEntry::Var(v) = entry_m {
                    let alpha_poly = LaurentPoly::var(table, *v);
                    entry = entry
                        .mul_trunc(
                            &LaurentPoly::one(table).sub_ref(&alpha_poly.mul_ref(&t)),
                            params.trunc(),
                        );
                }
            }
            row.push(entry);
        }
        entries.push(row);
    }
    let det = det_trunc(&entries, params.trunc());
    let quotient = divide_vandermonde(&det, &params.xs)?;
    // Multiply the factored-out symmetric series product back in (built
    // small-first so only one product touches the big quotient).
    let mut sfactor = LaurentPoly::one(table);
    for j in 0..r {
        sfactor = sfactor.mul_trunc(&alpha_series(params, 1, params.xs[j]), params.trunc());
    }
    let xmask = params.xs.iter().fold(0u64, |m, x| m | (1u64 << x.index()));
    let mut blocked = BlockedAccumulator::new(table, xmask);
    blocked.add_product(&quotient, &sfactor, params.trunc());
    let result = blocked.finish();
    Ok(match params.trunc() {
        Some(t) => result.truncate(t),
        None => result,
    })
}

/// The same polynomial through the residue functional:
/// `det(Phi(g_i(u)/u * u^j))_{i,j}` with `alpha`-expanded entries.
///
/// The determinant is expanded by `u`-degree tuples:
/// `det(sum_k c_{ik} Phi(u^{k+j})) = sum_{t_1<..<t_r} det(c_{i,t_j}) *
/// det(Phi(u^{t_i+j}))`, which keeps the parameter coefficients (no `x`)
/// and the small `Phi` determinants apart until the final assembly.
pub fn groth_determinant(params: &GrothParams) -> Result<LaurentPoly, GrothError> {
    let r = params.r;
    let u = params.u;
    let table = &params.table;

    // u-coefficients of each row's series.
    let mut coeffs: Vec<alloc::collections::BTreeMap<i32, LaurentPoly>> = Vec::with_capacity(r);
    let mut degrees: alloc::collections::BTreeSet<i32> = alloc::collections::BTreeSet::new();
    for i in 1..=r {
        let series = g_series(params, i, u)?;
        let split = series.split_by(u);
        degrees.extend(split.keys().copied());
        coeffs.push(split);
    }
    let degrees: Vec<i32> = degrees.into_iter().collect();

    // Phi(u^k) cache over the offsets that can occur.
    let mut phi_cache: alloc::collections::BTreeMap<i32, LaurentPoly> =
        alloc::collections::BTreeMap::new();
    for &t in &degrees {
        for j in 1..=r as i32 {
            phi_cache.entry(t + j).or_insert_with(|| {
                let upow = LaurentPoly::from_monomial(
                    table,
                    Monomial::var_pow(table, u, t + j).expect("residue variable"),
                    Rational::one(),
                );
                phi(&upow, u, &params.xs)
            });
        }
    }

    let zero = LaurentPoly::zero(table);
    let n = degrees.len();
    let coeff = |i: usize, t: usize| coeffs[i].get(&degrees[t]).unwrap_or(&zero);
    let phi_det_of = |ts: &[i32]| -> LaurentPoly {
        let phi_mat: Vec<Vec<LaurentPoly>> = ts
            .iter()
            .map(|&t| (1..=r as i32).map(|j| phi_cache[&(t + j)].clone()).collect())
            .collect();
        det_trunc(&phi_mat, None)
    };

    let xmask = params.xs.iter().fold(0u64, |m, x| m | (1u64 << x.index()));
    let mut acc = BlockedAccumulator::new(table, xmask);
    if n >= r {
        match r {
            1 => {
                for t in 0..n {
                    acc.add_product(coeff(0, t), &phi_det_of(&[degrees[t]]), params.trunc());
                }
            }
            2 => {
                for a in 0..n {
                    for b in a + 1..n {
                        let minor = coeff(0, a)
                            .mul_trunc(coeff(1, b), params.trunc())
                            .sub_ref(&coeff(0, b).mul_trunc(coeff(1, a), params.trunc()));
                        if !minor.is_zero() {
                            let d = phi_det_of(&[degrees[a], degrees[b]]);
                            acc.add_product(&minor, &d, params.trunc());
                        }
                    }
                }
            }
            3 => {
                // Share the row-(1,2) subminors across all column triples.
                let mut m2: alloc::collections::BTreeMap<(usize, usize), LaurentPoly> =
                    alloc::collections::BTreeMap::new();
                for a in 0..n {
                    for b in a + 1..n {
                        let m = coeff(0, a)
                            .mul_trunc(coeff(1, b), params.trunc())
                            .sub_ref(&coeff(0, b).mul_trunc(coeff(1, a), params.trunc()));
                        if !m.is_zero() {
                            m2.insert((a, b), m);
                        }
                    }
                }
                let zero_poly = LaurentPoly::zero(table);
                let sub = |a: usize, b: usize| m2.get(&(a, b)).unwrap_or(&zero_poly);
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            // Expansion along the last row.
                            let minor = coeff(2, a)
                                .mul_trunc(sub(b, c), params.trunc())
                                .sub_ref(&coeff(2, b).mul_trunc(sub(a, c), params.trunc()))
                                .add_ref(&coeff(2, c).mul_trunc(sub(a, b), params.trunc()));
                            if !minor.is_zero() {
                                let d = phi_det_of(&[degrees[a], degrees[b], degrees[c]]);
                                acc.add_product(&minor, &d, params.trunc());
                            }
                        }
                    }
                }
            }
            _ => {
                // General rank: plain tuple sweep.
                let mut tuple: Vec<usize> = (0..r).collect();
                loop {
                    let cmat: Vec<Vec<LaurentPoly>> = (0..r)
                        .map(|i| tuple.iter().map(|&t| coeff(i, t).clone()).collect())
                        .collect();
                    let minor = det_trunc(&cmat, params.trunc());
                    if !minor.is_zero() {
                        let ts: Vec<i32> = tuple.iter().map(|&t| degrees[t]).collect();
                        acc.add_product(&minor, &phi_det_of(&ts), params.trunc());
                    }
                    // Next strictly increasing tuple.
                    let mut pos = r;
                    for p in (0..r).rev() {
                        if tuple[p] + (r - p) < n {
                            pos = p;
                            break;
                        }
                    }
                    if pos == r {
                        break;
                    }
                    tuple[pos] += 1;
                    for later in pos + 1..r {
                        tuple[later] = tuple[later - 1] + 1;
                    }
                }
            }
        }
    }
    let acc = acc.finish();
    Ok(match params.trunc() {
        Some(t) => acc.truncate(t),
        None => acc,
    })
}

/// The determinantal formula for `G_lambda(x | 0, 0, beta)` under
/// `beta_1 = .. = beta_r = -beta_0`:
/// `det( sum_{m=0}^{i-1} C(i-1, m) beta_0^m h_{lambda_i - i + j + m}(x) )`.
///
/// The `h`-index follows the row shape `lambda_i - i + j` (plain
/// Jacobi-Trudi at `beta_0 = 0`). The printed form pairs `C(i-1, m)` with
/// the column index `lambda_j - i + j + m`, which makes the matrix singular
/// already for `lambda = (2,1)`; the reading used here is pinned by the
/// cross-check against [`groth_direct`] under the specialization.
pub fn lenart_det(
    table: &Arc<VarTable>,
    lambda: &Partition,
    xs: &[VarId],
    beta0: &LaurentPoly,
) -> Result<LaurentPoly, GrothError> {
    let r = xs.len();
    if lambda.len() > r {
        return Err(GrothError::InvalidShape(alloc::format!(
            "lambda has {} parts but r = {r}",
            lambda.len()
        )));
    }
    if r == 0 {
        return Ok(LaurentPoly::one(table));
    }
    let items: Vec<Monomial> = xs.iter().map(|&x| Monomial::var(x)).collect();
    let mut beta_pows: Vec<LaurentPoly> = Vec::with_capacity(r);
    beta_pows.push(LaurentPoly::one(table));
    for m in 1..r {
        beta_pows.push(beta_pows[m - 1].mul_ref(beta0));
    }
    let matrix: Vec<Vec<LaurentPoly>> = (1..=r)
        .map(|i| {
            (1..=r)
                .map(|j| {
                    let mut acc = LaurentPoly::zero(table);
                    for m in 0..i {
                        let k = lambda.part(i) as i64 - i as i64 + j as i64 + m as i64;
                        let term = h_k(table, k as i32, &items)
                            .mul_ref(&beta_pows[m])
                            .scale(&binomial(i - 1, m));
                        acc = acc.add_ref(&term);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(determinant(&matrix))
}

/// Both sides of the general determinantal identity for a family of
/// one-variable Laurent polynomials `g_1..g_r` in `u`:
///
/// - left: `(-1)^{r(r-1)/2} f(x_1..x_r) / (x_1..x_r)^r` where
///   `f = det(g_i(x_j)) / prod_{i<j}(1/x_i - 1/x_j)`, the division done
///   exactly via `prod(1/x_i - 1/x_j) = prod_{i<j}(x_j - x_i) / (prod x)^{r-1}`;
/// - right: `det(Phi(g_i(u) u^{j-1}))`.
pub fn theorem_det_sides(
    g_list: &[LaurentPoly],
    u: VarId,
    xs: &[VarId],
) -> Result<(LaurentPoly, LaurentPoly), GrothError> {
    let r = xs.len();
    if g_list.len() != r {
        return Err(GrothError::InvalidShape(alloc::format!(
            "{} polynomials for r = {r}",
            g_list.len()
        )));
    }
    if r == 0 {
        return Err(GrothError::InvalidShape(String::from("r must be positive")));
    }
    let table = g_list[0].table();

    // f = det(g_i(x_j)) * (prod x)^{r-1} / prod_{i<j}(x_j - x_i)
    let matrix: Vec<Vec<LaurentPoly>> = g_list
        .iter()
        .map(|g| {
            xs.iter()
                .map(|&x| g.substitute(u, &LaurentPoly::var(table, x)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let det = determinant(&matrix);
    let all_x = xs.iter().fold(Monomial::one(), |m, &x| m.mul(&Monomial::var(x)));
    let mut f = det.mul_term(&all_x.pow((r - 1) as u32), &Rational::one());
    for i in 0..r {
        for j in i + 1..r {
            f = f
                .div_exact_linear(xs[j], xs[i])
                .map_err(|_| GrothError::AntisymmetryBroken)?;
        }
    }
    let sign = if (r * (r - 1) / 2) % 2 == 0 { Rational::one() } else { Rational::from_i64(-1) };
    let lhs = f.mul_term(&all_x.try_pow(table, -(r as i32))?, &sign);

    let entries: Vec<Vec<LaurentPoly>> = g_list
        .iter()
        .map(|g| {
            (1..=r)
                .map(|j| {
                    let shifted = g.mul_term(
                        &Monomial::var_pow(table, u, j as i32 - 1).expect("residue variable"),
                        &Rational::one(),
                    );
                    phi(&shifted, u, xs)
                })
                .collect()
        })
        .collect();
    let rhs = determinant(&entries);
    Ok((lhs, rhs))
}

/// Entry matrices of both determinant routes, for size probing in tests.
#[doc(hidden)]
pub fn groth_probe_entries(
    params: &GrothParams,
) -> Result<(Vec<Vec<LaurentPoly>>, Vec<Vec<LaurentPoly>>), GrothError> {
    let r = params.r;
    let mut direct = Vec::with_capacity(r);
    let mut phi_route = Vec::with_capacity(r);
    for i in 1..=r {
        let mut row = Vec::with_capacity(r);
        for j in 0..r {
            row.push(g_series(params, i, params.xs[j])?);
        }
        direct.push(row);
        let series = g_series(params, i, params.u)?;
        let mut row = Vec::with_capacity(r);
        for j in 1..=r {
            let shifted = series.mul_term(
                &Monomial::var_pow(&params.table, params.u, j as i32)?,
                &Rational::one(),
            );
            row.push(phi(&shifted, params.u, &params.xs));
        }
        phi_route.push(row);
    }
    Ok((direct, phi_route))
}

/// Whether the determinantal identity holds for the family; exact equality
/// of both sides.
pub fn theorem_det_check(
    g_list: &[LaurentPoly],
    u: VarId,
    xs: &[VarId],
) -> Result<bool, GrothError> {
    let (lhs, rhs) = theorem_det_sides(g_list, u, xs)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::{is_symmetric, schur};
    use alloc::string::ToString;
    use alloc::vec;

    fn symbolic(r: usize, parts: Vec<u32>, t: u32) -> GrothParams {
        GrothParams::new(
            r,
            Partition::new(parts).unwrap(),
            FamilySpec::Symbolic,
            FamilySpec::Symbolic,
            FamilySpec::Symbolic,
            t,
        )
        .unwrap()
    }

    fn zeros(n: usize) -> FamilySpec {
        FamilySpec::Values(alloc::vec![Rational::zero(); n])
    }

    fn zero_params(r: usize, parts: Vec<u32>) -> GrothParams {
        let lambda1 = parts.first().copied().unwrap_or(0) as usize;
        GrothParams::new(
            r,
            Partition::new(parts).unwrap(),
            zeros(lambda1 + r),
            zeros(lambda1 + 1),
            zeros(r + 1),
            4,
        )
        .unwrap()
    }

    #[test]
    fn bracket_power_examples() {
        let p = symbolic(1, vec![1], 4);
        let u = p.u();
        assert!(bracket_power(&p, 0, u).unwrap().is_one());
        assert_eq!(bracket_power(&p, 1, u).unwrap().to_string(), "u*b1*be0 + u + b1");

        // k=2 with b1=b2=1, beta0=0: (u+1)^2
        let q = GrothParams::new(
            2,
            Partition::new(vec![1, 0]).unwrap(),
            FamilySpec::Values(vec![Rational::one(), Rational::one()]),
            zeros(1),
            zeros(2),
            4,
        )
        .unwrap();
        let got = bracket_power(&q, 2, q.u()).unwrap();
        assert_eq!(got.to_string(), "u^2 + 2*u + 1");
    }

    #[test]
    fn g_factor_examples() {
        // all parameters zero, lambda=(1,0), r=2, i=1: g_1 = u^3
        let p = zero_params(2, vec![1, 0]);
        let g1 = build_g_i(&p, 1).unwrap();
        assert!(g1.as_factored().denominators().is_empty());
        assert_eq!(g1.as_factored().numerator().to_string(), "u^3");

        // r=1, lambda=(1) symbolic: numerator (u+b1+be0*u*b1)*u, one factor
        let p = symbolic(1, vec![1], 4);
        let g1 = build_g_i(&p, 1).unwrap();
        assert_eq!(g1.as_factored().denominators().len(), 1);
        assert_eq!(
            g1.as_factored().numerator().to_string(),
            "u^2*b1*be0 + u^2 + u*b1"
        );

        // lambda_i = 0 with symbolic alpha: denominator empty
        let p = symbolic(2, vec![1, 0], 4);
        let g2 = build_g_i(&p, 2).unwrap();
        assert!(g2.as_factored().denominators().is_empty());
        assert!(build_g_i(&p, 3).is_err());
    }

    #[test]
    fn groth_direct_rank_one() {
        // r=1, lambda=(1): (x1 + b1 + be0*x1*b1) * sum_t (al1*x1)^t mod T
        let p = symbolic(1, vec![1], 2);
        let got = groth_direct(&p).unwrap();
        let t = p.table();
        let x1 = p.xs()[0];
        let al1 = t.lookup("al1").unwrap();
        let b1 = t.lookup("b1").unwrap();
        let be0 = t.lookup("be0").unwrap();
        let bracket = LaurentPoly::var(t, x1)
            .add_ref(&LaurentPoly::var(t, b1))
            .add_ref(&LaurentPoly::from_monomial(
                t,
                Monomial::try_from_pairs(t, [(be0, 1), (x1, 1), (b1, 1)]).unwrap(),
                Rational::one(),
            ));
        let mut series_terms = Vec::new();
        for n in 0..=2 {
            series_terms.push((
                Monomial::try_from_pairs(t, [(al1, n), (x1, n)]).unwrap(),
                Rational::one(),
            ));
        }
        let series = LaurentPoly::from_terms(t, series_terms);
        let expect = bracket.mul_trunc(&series, p.trunc());
        assert_eq!(got, expect);
    }

    #[test]
    fn groth_zero_params_collapses_to_schur() {
        for (r, parts) in [(1usize, vec![2u32]), (2, vec![1, 0]), (2, vec![2, 1]), (3, vec![2, 1, 0])] {
            let p = zero_params(r, parts.clone());
            let got = groth_direct(&p).unwrap();
            let expect = schur(p.table(), p.lambda(), p.xs()).unwrap();
            assert_eq!(got, expect, "lambda={parts:?} r={r}");
            assert!(is_symmetric(&got, p.xs()));
        }
    }

    #[test]
    fn groth_empty_shape_matches_brute_force() {
        // The hand-expanded r=2 determinant gives
        // G_() = 1 + b1*(be0 + be1) for generic b, beta.
        let mut p = symbolic(2, vec![], 4);
        let got = groth_direct(&p).unwrap();
        let t = p.table();
        let b1 = t.lookup("b1").unwrap();
        let be0 = t.lookup("be0").unwrap();
        let be1 = t.lookup("be1").unwrap();
        let expect = LaurentPoly::one(t)
            .add_ref(&LaurentPoly::from_monomial(
                t,
                Monomial::try_from_pairs(t, [(b1, 1), (be0, 1)]).unwrap(),
                Rational::one(),
            ))
            .add_ref(&LaurentPoly::from_monomial(
                t,
                Monomial::try_from_pairs(t, [(b1, 1), (be1, 1)]).unwrap(),
                Rational::one(),
            ));
        assert_eq!(got, expect);

        // Under beta_1 = -beta_0 it collapses to 1.
        p.set_beta_to_neg_beta0();
        assert!(groth_direct(&p).unwrap().is_one());
    }

    #[test]
    fn central_identity_small() {
        // alpha = 0, symbolic b and beta: exact equality.
        for (r, parts) in [(1usize, vec![1u32]), (2, vec![1, 0]), (2, vec![2, 1])] {
            let lambda1 = parts.first().copied().unwrap_or(0) as usize;
            let p = GrothParams::new(
                r,
                Partition::new(parts.clone()).unwrap(),
                FamilySpec::Symbolic,
                zeros(lambda1),
                FamilySpec::Symbolic,
                4,
            )
            .unwrap();
            assert_eq!(
                groth_determinant(&p).unwrap(),
                groth_direct(&p).unwrap(),
                "alpha=0 lambda={parts:?} r={r}"
            );
        }
        // symbolic alpha: equality modulo the truncation order.
        for (r, parts) in [(1usize, vec![1u32]), (2, vec![1, 0]), (2, vec![2, 1])] {
            let p = symbolic(r, parts.clone(), 3);
            assert_eq!(
                groth_determinant(&p).unwrap(),
                groth_direct(&p).unwrap(),
                "symbolic alpha lambda={parts:?} r={r}"
            );
        }
    }

    #[test]
    fn lenart_examples() {
        // beta0 = 0 reduces to the (transposed) Jacobi-Trudi determinant.
        let p = zero_params(2, vec![2, 1]);
        let t = p.table();
        let zero = LaurentPoly::zero(t);
        let got = lenart_det(t, p.lambda(), p.xs(), &zero).unwrap();
        assert_eq!(got, schur(t, p.lambda(), p.xs()).unwrap());

        // lambda=(1), r=1: h_1 = x1
        let p1 = zero_params(1, vec![1]);
        let got = lenart_det(p1.table(), p1.lambda(), p1.xs(), &LaurentPoly::zero(p1.table()))
            .unwrap();
        assert_eq!(got.to_string(), "x1");
    }

    #[test]
    fn lenart_matches_specialized_direct() {
        // b = 0, alpha = 0, beta_i = -beta_0 with symbolic beta_0.
        for (r, parts) in [(1usize, vec![1u32]), (2, vec![1, 1]), (2, vec![2, 0]), (3, vec![2, 1, 0])] {
            let lambda1 = parts.first().copied().unwrap_or(0) as usize;
            let mut p = GrothParams::new(
                r,
                Partition::new(parts.clone()).unwrap(),
                zeros(lambda1 + r),
                zeros(lambda1),
                FamilySpec::Symbolic,
                4,
            )
            .unwrap();
            p.set_beta_to_neg_beta0();
            let direct = groth_direct(&p).unwrap();
            let lenart = lenart_det(p.table(), p.lambda(), p.xs(), p.beta0()).unwrap();
            assert_eq!(direct, lenart, "lambda={parts:?} r={r}");
        }
    }

    #[test]
    fn theorem_det_hand_cases() {
        let mut b = VarTable::builder();
        let xs = b.add_family("x", 1, VarRole::Torus).unwrap();
        let u = b.add("u", VarRole::Residue).unwrap();
        let t = b.finish();
        // r=1, g=u: both sides 1
        let g = LaurentPoly::var(&t, u);
        let (lhs, rhs) = theorem_det_sides(&[g], u, &xs).unwrap();
        assert!(lhs.is_one());
        assert!(rhs.is_one());
        // r=1, g=1: both sides 1/x1
        let g = LaurentPoly::one(&t);
        let (lhs, rhs) = theorem_det_sides(&[g], u, &xs).unwrap();
        assert_eq!(lhs.to_string(), "x1^-1");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn theorem_det_jacobi_trudi_family() {
        // g_i(u) = u^{lambda_i + r - i + 1} makes the right side the Schur
        // polynomial.
        let mut b = VarTable::builder();
        let xs = b.add_family("x", 2, VarRole::Torus).unwrap();
        let u = b.add("u", VarRole::Residue).unwrap();
        let t = b.finish();
        let lambda = Partition::new(vec![2, 1]).unwrap();
        let r = 2usize;
        let gs: Vec<LaurentPoly> = (1..=r)
            .map(|i| {
                LaurentPoly::from_monomial(
                    &t,
                    Monomial::var_pow(
                        &t,
                        u,
                        lambda.part(i) as i32 + r as i32 - i as i32 + 1,
                    )
                    .unwrap(),
                    Rational::one(),
                )
            })
            .collect();
        let (lhs, rhs) = theorem_det_sides(&gs, u, &xs).unwrap();
        let s = schur(&t, &lambda, &xs).unwrap();
        assert_eq!(rhs, s);
        assert_eq!(lhs, s);
    }

    #[test]
    fn inverse_vandermonde_reconciliation() {
        // prod_{i<j}(1/u_i - 1/u_j) * (u_1..u_r)^{r-1}
        //   = (-1)^{r(r-1)/2} prod_{i<j}(u_i - u_j)
        for r in 2..=3usize {
            let mut b = VarTable::builder();
            let us = b.add_family("u", r, VarRole::Residue).unwrap();
            let t = b.finish();
            let mut lhs = LaurentPoly::one(&t);
            for i in 0..r {
                for j in i + 1..r {
                    let term = LaurentPoly::from_monomial(
                        &t,
                        Monomial::var_pow(&t, us[i], -1).unwrap(),
                        Rational::one(),
                    )
                    .sub_ref(&LaurentPoly::from_monomial(
                        &t,
                        Monomial::var_pow(&t, us[j], -1).unwrap(),
                        Rational::one(),
                    ));
                    lhs = lhs.mul_ref(&term);
                }
            }
            let all = us.iter().fold(Monomial::one(), |m, &v| m.mul(&Monomial::var(v)));
            let lhs = lhs.mul_term(&all.pow((r - 1) as u32), &Rational::one());

            let mut rhs = LaurentPoly::one(&t);
            for i in 0..r {
                for j in i + 1..r {
                    let term = LaurentPoly::var(&t, us[i]).sub_ref(&LaurentPoly::var(&t, us[j]));
                    rhs = rhs.mul_ref(&term);
                }
            }
            let sign = if (r * (r - 1) / 2) % 2 == 0 {
                Rational::one()
            } else {
                Rational::from_i64(-1)
            };
            assert_eq!(lhs, rhs.scale(&sign), "r={r}");
        }
    }

    #[test]
    fn padding_recomputes_consistently() {
        // Appending a zero part and incrementing r changes the polynomial;
        // both routes must still agree at the padded shape.
        let p2 = symbolic(2, vec![2, 1], 3);
        let p3 = symbolic(3, vec![2, 1, 0], 3);
        let g2 = groth_direct(&p2).unwrap();
        let g3 = groth_direct(&p3).unwrap();
        assert_eq!(groth_determinant(&p3).unwrap(), g3);
        // Not claimed equal; just both well-formed and symmetric.
        assert!(is_symmetric(&g2, p2.xs()));
        assert!(is_symmetric(&g3, p3.xs()));
    }

    #[test]
    fn alpha_value_restrictions() {
        assert!(matches!(
            GrothParams::new(
                1,
                Partition::new(vec![1]).unwrap(),
                zeros(1),
                FamilySpec::Values(vec![Rational::from_pair(1, 2)]),
                zeros(1),
                4,
            ),
            Err(GrothError::NonSymbolicAlpha)
        ));
        assert!(matches!(
            GrothParams::new(
                2,
                Partition::new(vec![3, 1]).unwrap(),
                FamilySpec::Values(vec![Rational::one()]),
                zeros(3),
                zeros(2),
                4,
            ),
            Err(GrothError::NotEnoughParams { family: "b", .. })
        ));
    }
}
