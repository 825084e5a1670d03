//! Push-forwards from the Grassmann bundle as executable operations.
//!
//! The K-theoretic push-forward of a polynomial in the exterior powers of
//! the tautological sub-bundle is computed as an iterated residue of the
//! closed-form integrand ([`psi_d_integrand`]); the same integrand arises by
//! unrolling the wall-crossing recursion one residue variable at a time
//! ([`WallcrossState`]). Torus fixed-point localization
//! ([`fixed_point_oracle_k`]) provides an independent check that shares no
//! code path with the residue engine. The cohomological analogue
//! ([`pushforward_cohom`]) iterates a closed form whose index is pinned by a
//! brute-force series oracle ([`cohom_series_oracle`]).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::residue::{
    iterated_residue, residue_at_zero, BinomFactor, FactoredRational, ResidueError,
};
use crate::ring::{
    binomial, factorial, LaurentPoly, Monomial, Rational, RingError, VarId, VarRole, VarTable,
};
use crate::symfun::{e_k, h_k, is_symmetric};

/// Errors from push-forward operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PushforwardError {
    /// `d` out of range or slot counts disagree.
    InvalidSpec(String),
    /// Wrong number of line classes passed to a wedge substitution.
    SlotMismatch { expected: usize, got: usize },
    /// The iterated residue left residue variables or denominator factors
    /// behind, which the integrand shape rules out.
    NonPolynomialResult,
    /// Wall-crossing step requested past `ell = d`.
    StepPastEnd,
    /// Fixed-point assignment with repeated or zero coordinates.
    BadAssignment,
    Residue(ResidueError),
    Ring(RingError),
}

impl fmt::Display for PushforwardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PushforwardError::InvalidSpec(msg) => write!(f, "invalid push-forward spec: {msg}"),
            PushforwardError::SlotMismatch { expected, got } => {
                write!(f, "expected {expected} line classes, got {got}")
            }
            PushforwardError::NonPolynomialResult => {
                write!(f, "iterated residue did not collapse to a polynomial")
            }
            PushforwardError::StepPastEnd => write!(f, "wall-crossing step past ell = d"),
            PushforwardError::BadAssignment => {
                write!(f, "fixed-point assignment must have distinct nonzero values")
            }
            PushforwardError::Residue(e) => write!(f, "{e}"),
            PushforwardError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PushforwardError {}

impl From<ResidueError> for PushforwardError {
    fn from(e: ResidueError) -> Self {
        PushforwardError::Residue(e)
    }
}

impl From<RingError> for PushforwardError {
    fn from(e: RingError) -> Self {
        PushforwardError::Ring(e)
    }
}

/// A polynomial in formal exterior-power slots `Y_1..Y_d` with Laurent
/// polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgePoly {
    d: usize,
    table: Arc<VarTable>,
    /// Slot exponent vector (length `d`) -> coefficient.
    terms: BTreeMap<Vec<u32>, LaurentPoly>,
}

impl WedgePoly {
    pub fn zero(table: &Arc<VarTable>, d: usize) -> Self {
        WedgePoly { d, table: Arc::clone(table), terms: BTreeMap::new() }
    }

    pub fn constant(table: &Arc<VarTable>, d: usize, coef: LaurentPoly) -> Self {
        let mut w = Self::zero(table, d);
        if !coef.is_zero() {
            w.terms.insert(alloc::vec![0; d], coef);
        }
        w
    }

    pub fn one(table: &Arc<VarTable>, d: usize) -> Self {
        Self::constant(table, d, LaurentPoly::one(table))
    }

    /// The slot `Y_k` (1-based).
    pub fn slot(table: &Arc<VarTable>, d: usize, k: usize) -> Result<Self, PushforwardError> {
        if k == 0 || k > d {
            return Err(PushforwardError::InvalidSpec(alloc::format!(
                "slot Y{k} out of range for d={d}"
            )));
        }
        let mut exps = alloc::vec![0u32; d];
        exps[k - 1] = 1;
        let mut w = Self::zero(table, d);
        w.terms.insert(exps, LaurentPoly::one(table));
        Ok(w)
    }

    /// A single monomial `Y_1^{e_1} .. Y_d^{e_d}`.
    pub fn monomial(table: &Arc<VarTable>, exps: Vec<u32>, coef: LaurentPoly) -> Self {
        let d = exps.len();
        let mut w = Self::zero(table, d);
        if !coef.is_zero() {
            w.terms.insert(exps, coef);
        }
        w
    }

    pub fn add_term(&mut self, exps: Vec<u32>, coef: &LaurentPoly) {
        assert_eq!(exps.len(), self.d, "slot exponent vector length mismatch");
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                let sum = c.add_ref(coef);
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(exps, coef.clone());
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &LaurentPoly)> {
        self.terms.iter()
    }

    /// Coefficient of the slot-free monomial.
    pub fn constant_term(&self) -> LaurentPoly {
        self.terms
            .get(&alloc::vec![0u32; self.d])
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(&self.table))
    }

    /// Substitute arbitrary ring values for the slots.
    pub fn substitute_values(
        &self,
        values: &[LaurentPoly],
    ) -> Result<LaurentPoly, PushforwardError> {
        if values.len() != self.d {
            return Err(PushforwardError::SlotMismatch {
                expected: self.d,
                got: values.len(),
            });
        }
        let mut acc = LaurentPoly::zero(&self.table);
        for (exps, coef) in &self.terms {
            let mut term = coef.clone();
            for (k, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul_ref(&values[k].pow(e));
                }
            }
            acc = acc.add_ref(&term);
        }
        Ok(acc)
    }

    /// Substitute a sum of line classes: `Y_k -> e_k(lines)`.
    pub fn substitute_lines(&self, lines: &[Monomial]) -> Result<LaurentPoly, PushforwardError> {
        if lines.len() != self.d {
            return Err(PushforwardError::SlotMismatch {
                expected: self.d,
                got: lines.len(),
            });
        }
        let values: Vec<LaurentPoly> = (1..=self.d)
            .map(|k| e_k(&self.table, k as i32, lines))
            .collect();
        self.substitute_values(&values)
    }
}

/// Substitute a sum of line classes into `g`: the exterior power `Y_k`
/// becomes the elementary symmetric polynomial `e_k` of the lines.
pub fn wedge_substitute(
    g: &WedgePoly,
    lines: &[Monomial],
) -> Result<LaurentPoly, PushforwardError> {
    g.substitute_lines(lines)
}

/// `(r, d, g)`: push forward `g` applied to the exterior powers of the
/// rank-`d` tautological sub-bundle of a rank-`r` bundle split into
/// characters `x_1..x_r`.
#[derive(Clone, Debug)]
pub struct PushforwardSpec {
    r: usize,
    d: usize,
    g: WedgePoly,
    table: Arc<VarTable>,
    xs: Vec<VarId>,
    us: Vec<VarId>,
}

/// Build the standard table `x_1..x_r` (torus), `u_1..u_d` (residue).
pub fn standard_table(r: usize, d: usize) -> (Arc<VarTable>, Vec<VarId>, Vec<VarId>) {
    let mut b = VarTable::builder();
    let xs = b.add_family("x", r, VarRole::Torus).expect("standard table");
    let us = b.add_family("u", d, VarRole::Residue).expect("standard table");
    (b.finish(), xs, us)
}

impl PushforwardSpec {
    /// Validates `0 <= d <= r`, the slot count of `g`, and that `g`'s table
    /// carries `x_1..x_r` and `u_1..u_d`.
    pub fn new(r: usize, d: usize, g: WedgePoly) -> Result<Self, PushforwardError> {
        if d > r {
            return Err(PushforwardError::InvalidSpec(alloc::format!("d={d} exceeds r={r}")));
        }
        if g.d() != d {
            return Err(PushforwardError::InvalidSpec(alloc::format!(
                "g has {} slots, expected {d}",
                g.d()
            )));
        }
        let table = Arc::clone(g.table());
        let look = |name: &str| {
            table.lookup(name).ok_or_else(|| {
                PushforwardError::InvalidSpec(alloc::format!("table lacks variable {name}"))
            })
        };
        let xs: Vec<VarId> = (1..=r)
            .map(|i| look(&alloc::format!("x{i}")))
            .collect::<Result<_, _>>()?;
        let us: Vec<VarId> = (1..=d)
            .map(|i| look(&alloc::format!("u{i}")))
            .collect::<Result<_, _>>()?;
        Ok(PushforwardSpec { r, d, g, table, xs, us })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn g(&self) -> &WedgePoly {
        &self.g
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn xs(&self) -> &[VarId] {
        &self.xs
    }

    pub fn us(&self) -> &[VarId] {
        &self.us
    }
}

/// `prod_{i != j} (1 - v_i / v_j)` over the given variables.
fn cross_ratio_product(table: &Arc<VarTable>, vars: &[VarId]) -> LaurentPoly {
    let mut acc = LaurentPoly::one(table);
    for (a, &vi) in vars.iter().enumerate() {
        for (b, &vj) in vars.iter().enumerate() {
            if a == b {
                continue;
            }
            let ratio = Monomial::try_from_pairs(table, [(vi, 1), (vj, -1)])
                .expect("residue variables are Laurent");
            let factor = LaurentPoly::one(table).sub_ref(&LaurentPoly::from_monomial(
                table,
                ratio,
                Rational::one(),
            ));
            acc = acc.mul_ref(&factor);
        }
    }
    acc
}

/// The factors `(1 - u/x_a)` for all residue/torus pairs.
fn euler_factors(table: &Arc<VarTable>, us: &[VarId], xs: &[VarId]) -> Vec<BinomFactor> {
    let mut denom = Vec::with_capacity(us.len() * xs.len());
    for &u in us {
        for &x in xs {
            let mono = Monomial::try_from_pairs(table, [(u, 1), (x, -1)])
                .expect("torus and residue variables are Laurent");
            denom.push(BinomFactor::from_monomial(mono).expect("nonconstant factor"));
        }
    }
    denom
}

/// The closed-form integrand
/// `psi_d = g(wedge(u_1 + .. + u_d)) * prod_{i != j}(1 - u_i/u_j)
///          / (d! * prod_{i,a} (1 - u_i/x_a))`,
/// with the `1/d!` carried in the numerator.
pub fn psi_d_integrand(spec: &PushforwardSpec) -> Result<FactoredRational, PushforwardError> {
    let table = spec.table();
    let lines: Vec<Monomial> = spec.us.iter().map(|&u| Monomial::var(u)).collect();
    let mut num = spec.g.substitute_lines(&lines)?;
    num = num.mul_ref(&cross_ratio_product(table, &spec.us));
    let inv_dfact = Rational::one().div_ref(&factorial(spec.d));
    num = num.scale(&inv_dfact);
    Ok(FactoredRational::new(num, euler_factors(table, &spec.us, &spec.xs)))
}

/// K-theoretic push-forward: the iterated residue of
/// `psi_d * du_1/u_1 .. du_d/u_d` over `u_1..u_d` (innermost `u_d`).
///
/// The result must come out with an empty denominator, free of the residue
/// variables, and symmetric in `x_1..x_r`; anything else signals a broken
/// integrand and is reported as an error.
pub fn pushforward_k(spec: &PushforwardSpec) -> Result<LaurentPoly, PushforwardError> {
    let integrand = psi_d_integrand(spec)?;
    let measure = spec.us.iter().fold(Monomial::one(), |m, &u| {
        m.mul(&Monomial::var_pow(spec.table(), u, -1).expect("residue variable"))
    });
    let f = FactoredRational::new(
        integrand.numerator().mul_term(&measure, &Rational::one()),
        integrand.denominators().to_vec(),
    );
    let res = iterated_residue(&f, &spec.us)?;
    let poly = match res.as_poly() {
        Some(p) => p.clone(),
        None => return Err(PushforwardError::NonPolynomialResult),
    };
    if spec.us.iter().any(|&u| poly.contains_var(u)) {
        return Err(PushforwardError::NonPolynomialResult);
    }
    assert!(
        is_symmetric(&poly, &spec.xs),
        "push-forward result must be symmetric in the torus characters"
    );
    Ok(poly)
}

/// Symbolic state of the wall-crossing recursion after `ell` steps.
///
/// The wedge part is a polynomial in the exterior-power slots of the current
/// rank `d - ell` sub-bundle with coefficients in the torus characters and
/// the residue variables introduced so far. The factors
/// `wedge_-1(u_i (x) V^dual + u_i^-1 (x) V)` stay pending — they are
/// determined by the introduced variables — and each step converts their
/// growth into explicit cross factors `(1 - u_i/u_new)(1 - u_new/u_i)`; at
/// `ell = d` they all collapse to 1 and the state reproduces
/// [`psi_d_integrand`] exactly.
#[derive(Clone, Debug)]
pub struct WallcrossState {
    d: usize,
    table: Arc<VarTable>,
    xs: Vec<VarId>,
    used: Vec<VarId>,
    wedge: WedgePoly,
    cross: LaurentPoly,
    scale: Rational,
    denom: Vec<BinomFactor>,
}

impl WallcrossState {
    /// `psi_0 = g` on the full flag.
    pub fn start(spec: &PushforwardSpec) -> Self {
        WallcrossState {
            d: spec.d,
            table: Arc::clone(spec.table()),
            xs: spec.xs.clone(),
            used: Vec::new(),
            wedge: spec.g.clone(),
            cross: LaurentPoly::one(spec.table()),
            scale: Rational::one(),
            denom: Vec::new(),
        }
    }

    pub fn ell(&self) -> usize {
        self.used.len()
    }

    /// One application of the wall-crossing recursion: specialize
    /// `V -> V' + u` and multiply by
    /// `wedge_-1(u (x) V'^dual + u^-1 (x) V') / ((d - ell) * wedge_-1(u (x) E^dual))`.
    pub fn step(&mut self, next_u: VarId) -> Result<(), PushforwardError> {
        let ell = self.used.len();
        if ell >= self.d {
            return Err(PushforwardError::StepPastEnd);
        }
        let m = self.d - ell; // current rank of V
        let table = &self.table;

        // Y_k -> Y'_k + u * Y'_{k-1}, with Y'_0 = 1 and Y'_m = 0.
        let mut new_wedge = WedgePoly::zero(table, m - 1);
        let old_terms: Vec<(Vec<u32>, LaurentPoly)> = self
            .wedge
            .terms()
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        for (exps, coef) in old_terms {
            let mut parts: Vec<(Vec<u32>, LaurentPoly)> =
                alloc::vec![(alloc::vec![0u32; m - 1], coef)];
            for (k0, &a) in exps.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let k = k0 + 1; // slot index, 1-based
                let mut next: Vec<(Vec<u32>, LaurentPoly)> = Vec::new();
                for (base_exps, base_coef) in &parts {
                    for t in 0..=a {
                        // Y'_k^{a-t} * (u * Y'_{k-1})^t
                        if k == m && t < a {
                            continue; // Y'_m = 0
                        }
                        if k == 1 && t > 0 {
                            // Y'_0 = 1: the power of u carries everything.
                        }
                        let mut e = base_exps.clone();
                        if a - t > 0 {
                            e[k - 1] += a - t;
                        }
                        if t > 0 && k >= 2 {
                            e[k - 2] += t;
                        }
                        let u_pow = Monomial::var_pow(table, next_u, t as i32)?;
                        let c = base_coef.mul_term(&u_pow, &binomial(a as usize, t as usize));
                        next.push((e, c));
                    }
                }
                parts = next;
            }
            for (e, c) in parts {
                new_wedge.add_term(e, &c);
            }
        }
        self.wedge = new_wedge;

        // Pending dual factors gain explicit cross terms against the new line.
        for &ui in &self.used {
            for (a, b) in [(ui, next_u), (next_u, ui)] {
                let ratio = Monomial::try_from_pairs(table, [(a, 1), (b, -1)])?;
                let factor = LaurentPoly::one(table).sub_ref(&LaurentPoly::from_monomial(
                    table,
                    ratio,
                    Rational::one(),
                ));
                self.cross = self.cross.mul_ref(&factor);
            }
        }

        self.denom.extend(euler_factors(table, &[next_u], &self.xs));
        self.scale = self.scale.div_ref(&Rational::from_i64((self.d - ell) as i64));
        self.used.push(next_u);
        Ok(())
    }

    /// After `d` steps the state is the full integrand `psi_d`.
    pub fn into_integrand(self) -> Result<FactoredRational, PushforwardError> {
        if self.used.len() != self.d {
            return Err(PushforwardError::InvalidSpec(alloc::format!(
                "unrolled {} of {} steps",
                self.used.len(),
                self.d
            )));
        }
        let num = self.wedge.constant_term().mul_ref(&self.cross).scale(&self.scale);
        Ok(FactoredRational::new(num, self.denom))
    }
}

/// Unroll the recursion over the spec's own residue variables.
pub fn unroll_wallcross(spec: &PushforwardSpec) -> Result<FactoredRational, PushforwardError> {
    let mut state = WallcrossState::start(spec);
    for &u in spec.us() {
        state.step(u)?;
    }
    state.into_integrand()
}

/// All size-`d` subsets of `0..r` in lexicographic order.
fn subsets(r: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, d: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for i in start..r {
            current.push(i);
            rec(i + 1, r, d, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    rec(0, r, d, &mut current, &mut out);
    out
}

/// Torus fixed-point localization on the Grassmannian, evaluated exactly at
/// a rational point with pairwise distinct nonzero coordinates:
///
/// `sum_{|S| = d} g(wedge(x_S)) / prod_{i in S, j not in S} (1 - x_i/x_j)`.
///
/// This is an independent oracle for [`pushforward_k`]; the sign/dual
/// convention in the denominator is pinned by the `r=2, d=1`,
/// `g in {1, Y1, Y1^2}` agreement tests before the oracle is trusted
/// anywhere else.
pub fn fixed_point_oracle_k(
    spec: &PushforwardSpec,
    values: &[Rational],
) -> Result<Rational, PushforwardError> {
    if values.len() != spec.r {
        return Err(PushforwardError::BadAssignment);
    }
    for (i, v) in values.iter().enumerate() {
        if v.is_zero() || values[..i].contains(v) {
            return Err(PushforwardError::BadAssignment);
        }
    }
    let assignment: Vec<(VarId, Rational)> =
        spec.xs.iter().copied().zip(values.iter().cloned()).collect();

    let mut acc = Rational::zero();
    for subset in subsets(spec.r, spec.d) {
        let lines: Vec<Monomial> = subset.iter().map(|&i| Monomial::var(spec.xs[i])).collect();
        let restricted = spec.g.substitute_lines(&lines)?;
        let num = restricted.eval(&assignment)?;
        let mut den = Rational::one();
        for &i in &subset {
            for j in 0..spec.r {
                if subset.contains(&j) {
                    continue;
                }
                let ratio = values[i].div_ref(&values[j]);
                den = den.mul_ref(&Rational::one().sub_ref(&ratio));
            }
        }
        acc = acc.add_ref(&num.div_ref(&den));
    }
    Ok(acc)
}

/// Build the standard cohomology table: `z_1..z_d`, `a_1..a_r` (polynomial
/// variables) and a scratch residue variable `w` for the series route.
pub fn standard_cohom_table(r: usize, d: usize) -> (Arc<VarTable>, Vec<VarId>, Vec<VarId>, VarId) {
    let mut b = VarTable::builder();
    let zs = b.add_family("z", d, VarRole::Cohomology).expect("cohom table");
    let avars = b.add_family("a", r, VarRole::Cohomology).expect("cohom table");
    let w = b.add("w", VarRole::Residue).expect("cohom table");
    (b.finish(), zs, avars, w)
}

/// Closed-form single-variable building block of the cohomological residue:
///
/// `Res_{z=inf} z^k dz / prod_a (-z + a_a) = (-1)^(r-1) h_{k-r+1}(a)` for
/// `k >= r - 1`, else `0`.
///
/// The index `k - r + 1` and threshold `k >= r - 1` are the derived,
/// oracle-validated reading (see [`cohom_series_oracle`]); the printed
/// source formula has `h_{k+r-1}` with threshold `k >= r`, which fails the
/// direct `r = 1, k = 0` expansion.
fn cohom_closed_form(table: &Arc<VarTable>, avars: &[VarId], k: i32) -> LaurentPoly {
    let r = avars.len() as i32;
    if k < r - 1 {
        return LaurentPoly::zero(table);
    }
    let items: Vec<Monomial> = avars.iter().map(|&a| Monomial::var(a)).collect();
    let sign = if r % 2 == 1 { Rational::one() } else { Rational::from_i64(-1) };
    h_k(table, k - r + 1, &items).scale(&sign)
}

/// Attach the `prod_{i != j} (z_i - z_j) / d!` prefactor of the
/// cohomological integrand.
fn cohom_integrand_numerator(f: &LaurentPoly, zs: &[VarId]) -> LaurentPoly {
    let table = f.table();
    let mut num = f.clone();
    for (i, &zi) in zs.iter().enumerate() {
        for (j, &zj) in zs.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = LaurentPoly::var(table, zi).sub_ref(&LaurentPoly::var(table, zj));
            num = num.mul_ref(&diff);
        }
    }
    num.scale(&Rational::one().div_ref(&factorial(zs.len())))
}

/// Cohomological push-forward: iterated residue at infinity of
/// `f * prod_{i != j} (z_i - z_j) / (d! * prod_i Eu(e^{-z_i} (x) E))` with
/// `Eu = prod_a (-z_i + a_a)`, applied via the closed form variable by
/// variable (innermost `z_d`). Returns a polynomial in the `a` variables.
pub fn pushforward_cohom(
    f: &LaurentPoly,
    zs: &[VarId],
    avars: &[VarId],
) -> Result<LaurentPoly, PushforwardError> {
    let table = f.table();
    let mut num = cohom_integrand_numerator(f, zs);
    for &z in zs.iter().rev() {
        let mut next = LaurentPoly::zero(table);
        for (k, coef) in num.split_by(z) {
            debug_assert!(k >= 0, "cohomology variables are polynomial");
            next = next.add_ref(&coef.mul_ref(&cohom_closed_form(table, avars, k)));
        }
        num = next;
    }
    Ok(num)
}

/// `Res_{z=inf}` of `p(z, ..) / prod_a (-z + a_a) dz` computed by brute
/// force: substitute `z -> 1/w` and expand every factor as a geometric
/// series, then read off the residue at `w = 0`. Independent of the
/// closed-form route through `h_k`.
pub fn cohom_residue_series(
    p: &LaurentPoly,
    z: VarId,
    w: VarId,
    avars: &[VarId],
) -> Result<LaurentPoly, PushforwardError> {
    let table = p.table();
    let r = avars.len();
    // 1 / prod(-z + a) = (-1)^r w^r / prod(1 - a*w) at z = 1/w, and
    // Res_inf = -Res_{w=0} f(1/w) w^-2 dw; the signs fold together.
    let w_inv =
        LaurentPoly::from_monomial(table, Monomial::var_pow(table, w, -1)?, Rational::one());
    let substituted = p.substitute(z, &w_inv)?;
    let shift = Monomial::var_pow(table, w, r as i32 - 2)?;
    let sign = if r % 2 == 0 { Rational::from_i64(-1) } else { Rational::one() };
    let num = substituted.mul_term(&shift, &sign);
    let denom: Vec<BinomFactor> = avars
        .iter()
        .map(|&a| {
            BinomFactor::from_monomial(
                Monomial::try_from_pairs(table, [(a, 1), (w, 1)]).expect("a*w"),
            )
            .expect("nonconstant")
        })
        .collect();
    let res = residue_at_zero(&FactoredRational::new(num, denom), w)?;
    Ok(res.as_poly().expect("every factor carries w").clone())
}

/// Brute-force value of `Res_{z=inf} z^k dz / prod_a (-z + a_a)` via the
/// series expansion; pins the index and sign of the closed form used by
/// [`pushforward_cohom`].
pub fn cohom_series_oracle(
    table: &Arc<VarTable>,
    avars: &[VarId],
    w: VarId,
    k: u32,
) -> Result<LaurentPoly, PushforwardError> {
    let r = avars.len();
    // z^k at z = 1/w is w^-k; fold it into the shift directly.
    let shift = Monomial::var_pow(table, w, r as i32 - 2 - k as i32)?;
    let sign = if r % 2 == 0 { Rational::from_i64(-1) } else { Rational::one() };
    let num = LaurentPoly::from_monomial(table, shift, sign);
    let denom: Vec<BinomFactor> = avars
        .iter()
        .map(|&a| {
            BinomFactor::from_monomial(
                Monomial::try_from_pairs(table, [(a, 1), (w, 1)]).expect("a*w"),
            )
            .expect("nonconstant")
        })
        .collect();
    let res = residue_at_zero(&FactoredRational::new(num, denom), w)?;
    Ok(res.as_poly().expect("every factor carries w").clone())
}

/// The series-expansion route for the full cohomological push-forward: same
/// integrand as [`pushforward_cohom`], residues taken by
/// [`cohom_residue_series`] instead of the closed form.
pub fn cohom_pushforward_series(
    f: &LaurentPoly,
    zs: &[VarId],
    w: VarId,
    avars: &[VarId],
) -> Result<LaurentPoly, PushforwardError> {
    let mut num = cohom_integrand_numerator(f, zs);
    for &z in zs.iter().rev() {
        num = cohom_residue_series(&num, z, w, avars)?;
    }
    Ok(num)
}
