//! Variable tables.
//!
//! Every polynomial is expressed over a fixed, ordered table of named
//! variables. The order is fixed at creation and determines the canonical
//! monomial order; the role of each variable fixes its exponent rules.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::RingError;

/// What a variable is allowed to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRole {
    /// Torus characters `x_i`; Laurent, negative exponents allowed.
    Torus,
    /// Residue variables `u_i`; Laurent.
    Residue,
    /// Deformation parameters `b_m`, `al_m`, `be_m`; exponents must stay >= 0.
    Parameter,
    /// Cohomology variables `z_i`, `a_i`; plain polynomial variables.
    Cohomology,
}

impl VarRole {
    /// Whether monomials may carry negative exponents of this variable.
    pub fn allows_negative(self) -> bool {
        matches!(self, VarRole::Torus | VarRole::Residue)
    }
}

/// Index of a variable inside its [`VarTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) u16);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered list of named, role-tagged variables.
///
/// Names are unique; the order fixes the canonical monomial order. Tables are
/// immutable once built and are shared behind an [`Arc`].
#[derive(Debug, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    roles: Vec<VarRole>,
}

/// Tables are capped so variable sets fit in a 64-bit mask.
pub const MAX_VARS: usize = 64;

impl VarTable {
    pub fn builder() -> VarTableBuilder {
        VarTableBuilder { names: Vec::new(), roles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn role(&self, v: VarId) -> VarRole {
        self.roles[v.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(|i| VarId(i as u16))
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len()).map(|i| VarId(i as u16))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Incremental construction of a [`VarTable`]; returns ids as it goes.
pub struct VarTableBuilder {
    names: Vec<String>,
    roles: Vec<VarRole>,
}

impl VarTableBuilder {
    pub fn add(&mut self, name: &str, role: VarRole) -> Result<VarId, RingError> {
        if self.names.iter().any(|n| n == name) {
            return Err(RingError::DuplicateVariable(String::from(name)));
        }
        if self.names.len() >= MAX_VARS {
            return Err(RingError::TableTooLarge);
        }
        self.names.push(String::from(name));
        self.roles.push(role);
        Ok(VarId((self.names.len() - 1) as u16))
    }

    /// Add `prefix1 .. prefixN` (N = `count`), e.g. `x1, x2, x3`.
    pub fn add_family(
        &mut self,
        prefix: &str,
        count: usize,
        role: VarRole,
    ) -> Result<Vec<VarId>, RingError> {
        self.add_family_from(prefix, 1, count, role)
    }

    /// Add `count` variables numbered from `start`, e.g. `be0, be1, be2`.
    pub fn add_family_from(
        &mut self,
        prefix: &str,
        start: usize,
        count: usize,
        role: VarRole,
    ) -> Result<Vec<VarId>, RingError> {
        (start..start + count)
            .map(|i| self.add(&format!("{prefix}{i}"), role))
            .collect()
    }

    pub fn finish(self) -> Arc<VarTable> {
        Arc::new(VarTable { names: self.names, roles: self.roles })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_lookup() {
        let mut b = VarTable::builder();
        let xs = b.add_family("x", 2, VarRole::Torus).unwrap();
        let u = b.add("u", VarRole::Residue).unwrap();
        let t = b.finish();
        assert_eq!(t.len(), 3);
        assert_eq!(t.name(xs[1]), "x2");
        assert_eq!(t.lookup("u"), Some(u));
        assert_eq!(t.lookup("x3"), None);
        assert_eq!(t.role(u), VarRole::Residue);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut b = VarTable::builder();
        b.add("x1", VarRole::Torus).unwrap();
        assert!(matches!(
            b.add("x1", VarRole::Parameter),
            Err(RingError::DuplicateVariable(_))
        ));
    }
}
