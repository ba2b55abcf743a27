//! Guardrails for factorial-scale enumerations.
//!
//! Exhaustive enumeration of configurations and tuple sets grows factorially,
//! so every enumerating entry point takes an [`EnumerationBudget`] and
//! refuses inputs outside it. `force` lifts the soft caps for callers who
//! know what they are asking for; a hard cap on materialized tuples stays in
//! place regardless, because past it the process dies to memory pressure
//! rather than to a clean error.

use num::BigInt;

use crate::error::{Error, Result};

/// Absolute ceiling on tuples a single enumeration may materialize.
/// Not lifted by `force`.
pub const HARD_TUPLE_CAP: u64 = 5_000_000;

/// Soft caps for the enumerating operations, plus the `force` escape hatch.
#[derive(Debug, Clone)]
pub struct EnumerationBudget {
    /// Largest ground set for configuration enumeration.
    pub config_cap: u32,
    /// Largest `n` for brute-force sums over all permutations of `[n]`.
    pub perm_cap: u32,
    /// Largest `n` for tuple-set enumeration with two configurations.
    pub h_cap_k2: u32,
    /// Largest `n` for tuple-set enumeration with three configurations.
    pub h_cap_k3: u32,
    /// Largest truncation order for identity verification.
    pub order_cap: u32,
    /// Lifts the soft caps above (never the hard tuple cap).
    pub force: bool,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            config_cap: 10,
            perm_cap: 10,
            h_cap_k2: 6,
            h_cap_k3: 4,
            order_cap: 12,
            force: false,
        }
    }
}

impl EnumerationBudget {
    pub fn forced() -> Self {
        EnumerationBudget {
            force: true,
            ..Self::default()
        }
    }

    pub fn check_configs(&self, n: u32) -> Result<()> {
        if !self.force && n > self.config_cap {
            return Err(Error::BudgetExceeded(format!(
                "configuration enumeration on {n} points exceeds the default cap of {}; \
                 use force to override",
                self.config_cap
            )));
        }
        Ok(())
    }

    pub fn check_perms(&self, n: u32) -> Result<()> {
        if !self.force && n > self.perm_cap {
            return Err(Error::BudgetExceeded(format!(
                "summing over all permutations of [{n}] exceeds the default cap of {}; \
                 use force to override",
                self.perm_cap
            )));
        }
        Ok(())
    }

    pub fn check_order(&self, order: u32) -> Result<()> {
        if !self.force && order > self.order_cap {
            return Err(Error::BudgetExceeded(format!(
                "truncation order {order} exceeds the default cap of {}; use force to override",
                self.order_cap
            )));
        }
        Ok(())
    }

    /// Gate for tuple-set enumeration: `tuple_count` is the exact number of
    /// tuples the enumeration would yield (cheap to compute in closed form).
    pub fn check_h(&self, k: usize, n: u32, tuple_count: &BigInt) -> Result<()> {
        if *tuple_count > BigInt::from(HARD_TUPLE_CAP) {
            return Err(Error::BudgetExceeded(format!(
                "k={k}, n={n} would materialize {tuple_count} tuples, above the hard cap \
                 of {HARD_TUPLE_CAP}"
            )));
        }
        if self.force {
            return Ok(());
        }
        let within = match k {
            2 => n <= self.h_cap_k2,
            3 => n <= self.h_cap_k3,
            // No tuned cap for other k; allow only clearly small runs.
            _ => *tuple_count <= BigInt::from(10_000u32),
        };
        if !within {
            return Err(Error::BudgetExceeded(format!(
                "k={k}, n={n} is outside the default enumeration budget (k=2 allows n<={}, \
                 k=3 allows n<={}); use force to override",
                self.h_cap_k2, self.h_cap_k3
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_caps_and_force() {
        let b = EnumerationBudget::default();
        assert!(b.check_configs(10).is_ok());
        assert!(matches!(b.check_configs(11), Err(Error::BudgetExceeded(_))));
        assert!(b.check_perms(10).is_ok());
        assert!(matches!(b.check_perms(11), Err(Error::BudgetExceeded(_))));
        assert!(matches!(b.check_order(13), Err(Error::BudgetExceeded(_))));

        let f = EnumerationBudget::forced();
        assert!(f.check_configs(11).is_ok());
        assert!(f.check_perms(11).is_ok());
        assert!(f.check_order(13).is_ok());
    }

    #[test]
    fn tuple_cap_is_hard() {
        let small = BigInt::from(100u32);
        let huge = BigInt::from(HARD_TUPLE_CAP + 1);
        let b = EnumerationBudget::default();
        assert!(b.check_h(2, 6, &small).is_ok());
        assert!(matches!(b.check_h(2, 7, &small), Err(Error::BudgetExceeded(_))));
        assert!(matches!(b.check_h(3, 5, &small), Err(Error::BudgetExceeded(_))));
        assert!(b.check_h(4, 2, &small).is_ok());

        let f = EnumerationBudget::forced();
        assert!(f.check_h(2, 7, &small).is_ok());
        // the hard cap survives force
        assert!(matches!(f.check_h(2, 9, &huge), Err(Error::BudgetExceeded(_))));
    }
}
