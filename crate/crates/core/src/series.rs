//! Truncated formal power series with polynomial coefficients.
//!
//! A [`TruncatedSeries`] is a polynomial-coefficient power series in a
//! declared set of series variables, truncated at a total degree across all
//! of them. The algebra here (Cauchy product, exponential, negative-binomial
//! power) is exactly what exponential-generating-function bookkeeping for
//! labeled structures needs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::One;

use crate::error::{Error, Result};
use crate::polyring::{Monomial, ParamSet, Polynomial, Rat};

/// Formal power series truncated at a total degree, with `Polynomial`
/// coefficients over a shared parameter set.
///
/// Invariants: no stored term has total degree above `order`, no stored
/// coefficient is zero, and all coefficients share one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    vars: Arc<ParamSet>,
    params: Arc<ParamSet>,
    order: u32,
    coeffs: BTreeMap<Monomial, Polynomial>,
}

impl TruncatedSeries {
    pub fn zero(vars: &Arc<ParamSet>, params: &Arc<ParamSet>, order: u32) -> Self {
        TruncatedSeries {
            vars: Arc::clone(vars),
            params: Arc::clone(params),
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Arc<ParamSet>, params: &Arc<ParamSet>, order: u32) -> Self {
        Self::constant(vars, Polynomial::one(params), order)
    }

    pub fn constant(vars: &Arc<ParamSet>, value: Polynomial, order: u32) -> Self {
        let params = Arc::clone(value.params());
        let mut s = Self::zero(vars, &params, order);
        s.add_term(Monomial::unit(vars.arity()), value);
        s
    }

    /// Series consisting of the single term `coeff * vars^exponents`.
    /// Terms past the truncation order are dropped.
    pub fn monomial(
        vars: &Arc<ParamSet>,
        exponents: &[u32],
        coeff: Polynomial,
        order: u32,
    ) -> Self {
        assert_eq!(exponents.len(), vars.arity(), "exponent arity mismatch");
        let params = Arc::clone(coeff.params());
        let mut s = Self::zero(vars, &params, order);
        s.add_term(Monomial::from_exponents(exponents.to_vec()), coeff);
        s
    }

    pub fn vars(&self) -> &Arc<ParamSet> {
        &self.vars
    }

    pub fn params(&self) -> &Arc<ParamSet> {
        &self.params
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Polynomial)> {
        self.coeffs.iter()
    }

    /// Accumulates one term, enforcing truncation and zero-dropping.
    pub fn add_term(&mut self, degree: Monomial, coeff: Polynomial) {
        if degree.total_degree() > self.order || coeff.is_zero() {
            return;
        }
        debug_assert_eq!(degree.exponents().len(), self.vars.arity());
        match self.coeffs.entry(degree) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff).expect("coefficients share one ring");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::SeriesVarMismatch(
                format!("({})", self.vars.names().join(",")),
                format!("({})", other.vars.names().join(",")),
            ));
        }
        if !(Arc::ptr_eq(&self.params, &other.params) || self.params == other.params) {
            return Err(Error::ParamSetMismatch(
                format!("({})", self.params.names().join(",")),
                format!("({})", other.params.names().join(",")),
            ));
        }
        Ok(())
    }

    /// Coefficient-wise sum; the result is truncated at the smaller order.
    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.vars, &self.params, order);
        for (m, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncatedSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, c)| (m.clone(), c.neg()))
            .collect();
        TruncatedSeries {
            vars: Arc::clone(&self.vars),
            params: Arc::clone(&self.params),
            order: self.order,
            coeffs,
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.vars, &self.params, order);
        for (m1, c1) in &self.coeffs {
            let d1 = m1.total_degree();
            if d1 > order {
                continue;
            }
            for (m2, c2) in &other.coeffs {
                if d1 + m2.total_degree() > order {
                    continue;
                }
                out.add_term(m1.mul(m2), c1.mul(c2).expect("coefficients share one ring"));
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scale(&self, factor: &Polynomial) -> Result<TruncatedSeries> {
        let mut out = Self::zero(&self.vars, &self.params, self.order);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), c.mul(factor)?);
        }
        Ok(out)
    }

    pub fn scale_rat(&self, factor: &Rat) -> TruncatedSeries {
        let mut out = Self::zero(&self.vars, &self.params, self.order);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), c.scale(factor));
        }
        out
    }

    /// Lowers the truncation order, dropping higher terms.
    pub fn truncate(&self, order: u32) -> TruncatedSeries {
        let order = order.min(self.order);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(m, _)| m.total_degree() <= order)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        TruncatedSeries {
            vars: Arc::clone(&self.vars),
            params: Arc::clone(&self.params),
            order,
            coeffs,
        }
    }

    /// `exp(f) = sum_m f^m / m!` for a series with zero constant term.
    pub fn exp(&self) -> Result<TruncatedSeries> {
        if !self.constant_coefficient().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut acc = Self::one(&self.vars, &self.params, self.order);
        let mut power = acc.clone();
        let mut m_fact = Rat::one();
        for m in 1..=self.order {
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
            m_fact *= Rat::from_integer(m.into());
            acc = acc.add(&power.scale_rat(&m_fact.recip()))?;
        }
        Ok(acc)
    }

    /// `(1 - u)^{-exponent} = sum_m (exponent)_m u^m / m!` where `(p)_m` is
    /// the rising factorial. The exponent may be any polynomial; `u` must
    /// have a zero constant term.
    pub fn neg_binomial(exponent: &Polynomial, u: &TruncatedSeries) -> Result<TruncatedSeries> {
        if !u.constant_coefficient().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut acc = TruncatedSeries::one(&u.vars, &u.params, u.order);
        let mut power = acc.clone();
        let mut rising = Polynomial::one(&u.params);
        let mut m_fact = Rat::one();
        for m in 1..=u.order {
            power = power.mul(u)?;
            if power.is_zero() {
                break;
            }
            // (p)_m = (p)_{m-1} * (p + m - 1)
            rising = rising.mul(&exponent.add_constant(Rat::from_integer((m - 1).into())))?;
            if rising.is_zero() {
                break;
            }
            m_fact *= Rat::from_integer(m.into());
            acc = acc.add(&power.scale(&rising.scale(&m_fact.recip()))?)?;
        }
        Ok(acc)
    }

    /// Stored coefficient at the exact exponent vector `degree`, or zero.
    /// Errors if the total degree exceeds the truncation order.
    pub fn coefficient(&self, degree: &[u32]) -> Result<Polynomial> {
        assert_eq!(degree.len(), self.vars.arity(), "exponent arity mismatch");
        let total: u32 = degree.iter().sum();
        if total > self.order {
            return Err(Error::DegreeExceedsOrder {
                degree: total,
                order: self.order,
            });
        }
        Ok(self
            .coeffs
            .get(&Monomial::from_exponents(degree.to_vec()))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.params)))
    }

    pub fn constant_coefficient(&self) -> Polynomial {
        self.coeffs
            .get(&Monomial::unit(self.vars.arity()))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.params))
    }

    /// Applies `f` to every coefficient, producing a series over the
    /// parameter set of the mapped coefficients.
    pub fn map_coeffs<F>(&self, new_params: &Arc<ParamSet>, mut f: F) -> Result<TruncatedSeries>
    where
        F: FnMut(&Polynomial) -> Result<Polynomial>,
    {
        let mut out = TruncatedSeries::zero(&self.vars, new_params, self.order);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Sets the series variable `name` to zero: keeps the exponent-zero
    /// slice and drops the variable from the variable set.
    pub fn set_var_zero(&self, name: &str) -> Result<TruncatedSeries> {
        let idx = self
            .vars
            .index_of(name)
            .ok_or_else(|| Error::UnknownIndeterminate(name.to_string()))?;
        let remaining: Vec<String> = self
            .vars
            .names()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, n)| n.clone())
            .collect();
        let new_vars = ParamSet::new(remaining);
        let mut out = TruncatedSeries::zero(&new_vars, &self.params, self.order);
        for (m, c) in &self.coeffs {
            if m.exponents()[idx] != 0 {
                continue;
            }
            let e: Vec<u32> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, &x)| x)
                .collect();
            out.add_term(Monomial::from_exponents(e), c.clone());
        }
        Ok(out)
    }

    /// Reinterprets the series over a new variable set of equal arity
    /// (positional renaming).
    pub fn rename_vars(&self, new_vars: &Arc<ParamSet>) -> Result<TruncatedSeries> {
        if new_vars.arity() != self.vars.arity() {
            return Err(Error::SeriesVarMismatch(
                format!("({})", self.vars.names().join(",")),
                format!("({})", new_vars.names().join(",")),
            ));
        }
        Ok(TruncatedSeries {
            vars: Arc::clone(new_vars),
            params: Arc::clone(&self.params),
            order: self.order,
            coeffs: self.coeffs.clone(),
        })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O(^{})", self.order + 1);
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in &self.coeffs {
            let mut vars_part = String::new();
            for (idx, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => vars_part.push_str(&format!("*{}", self.vars.name(idx))),
                    _ => vars_part.push_str(&format!("*{}^{}", self.vars.name(idx), e)),
                }
            }
            parts.push(format!("({}){}", c, vars_part));
        }
        write!(f, "{} + O(^{})", parts.join(" + "), self.order + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{int, rat};

    fn setup() -> (Arc<ParamSet>, Arc<ParamSet>) {
        (ParamSet::new(["z"]), ParamSet::new(["a", "r", "s", "x"]))
    }

    fn var_z(params: &Arc<ParamSet>, order: u32) -> TruncatedSeries {
        let vars = ParamSet::new(["z"]);
        TruncatedSeries::monomial(&vars, &[1], Polynomial::one(params), order)
    }

    #[test]
    fn add_and_truncation_rules() {
        let (vars, params) = setup();
        let one = TruncatedSeries::one(&vars, &params, 5);
        let z = TruncatedSeries::monomial(&vars, &[1], Polynomial::one(&params), 5);
        let f = one.add(&z).unwrap(); // 1 + z
        assert_eq!(f.add(&TruncatedSeries::zero(&vars, &params, 5)).unwrap(), f);

        let two_z = z.scale_rat(&int(2));
        let g = f.add(&two_z).unwrap(); // 1 + 3z
        assert_eq!(g.coefficient(&[1]).unwrap(), Polynomial::constant(&params, int(3)));

        // order follows the smaller operand
        let h3 = TruncatedSeries::one(&vars, &params, 3);
        assert_eq!(f.add(&h3).unwrap().order(), 3);
    }

    #[test]
    fn mul_truncates_by_total_degree() {
        let (vars, params) = setup();
        let one = TruncatedSeries::one(&vars, &params, 2);
        let z = TruncatedSeries::monomial(&vars, &[1], Polynomial::one(&params), 2);
        let f = one.add(&z).unwrap();
        let g = one.sub(&z).unwrap();
        let prod = f.mul(&g).unwrap(); // 1 - z^2 at order 2
        assert!(prod.coefficient(&[1]).unwrap().is_zero());
        assert_eq!(
            prod.coefficient(&[2]).unwrap(),
            Polynomial::constant(&params, int(-1))
        );
        assert_eq!(f.mul(&TruncatedSeries::one(&vars, &params, 2)).unwrap(), f);

        // (1+az)(1+bz) at order 1 drops the ab z^2 term
        let ab = ParamSet::new(["a", "b"]);
        let vars1 = ParamSet::new(["z"]);
        let az = TruncatedSeries::monomial(&vars1, &[1], Polynomial::var(&ab, "a"), 1);
        let bz = TruncatedSeries::monomial(&vars1, &[1], Polynomial::var(&ab, "b"), 1);
        let lhs = TruncatedSeries::one(&vars1, &ab, 1).add(&az).unwrap();
        let rhs = TruncatedSeries::one(&vars1, &ab, 1).add(&bz).unwrap();
        let prod = lhs.mul(&rhs).unwrap();
        let expected_z = Polynomial::var(&ab, "a").add(&Polynomial::var(&ab, "b")).unwrap();
        assert_eq!(prod.coefficient(&[1]).unwrap(), expected_z);
        assert_eq!(prod.order(), 1);
    }

    #[test]
    fn var_mismatch_errors() {
        let params = ParamSet::new(["a"]);
        let f = TruncatedSeries::one(&ParamSet::new(["z"]), &params, 2);
        let g = TruncatedSeries::one(&ParamSet::new(["w"]), &params, 2);
        assert!(matches!(f.add(&g), Err(Error::SeriesVarMismatch(..))));
        assert!(matches!(f.mul(&g), Err(Error::SeriesVarMismatch(..))));
    }

    #[test]
    fn exp_of_zero_and_inverse_law() {
        let (vars, params) = setup();
        let zero = TruncatedSeries::zero(&vars, &params, 4);
        assert_eq!(zero.exp().unwrap(), TruncatedSeries::one(&vars, &params, 4));

        let z = var_z(&params, 6);
        let prod = z.exp().unwrap().mul(&z.neg().exp().unwrap()).unwrap();
        assert_eq!(prod, TruncatedSeries::one(&vars, &params, 6));
    }

    #[test]
    fn exp_of_weighted_monomial() {
        // exp(r*s*x*z) to order 2: 1 + rsx z + r^2 s^2 x^2 z^2 / 2
        let (vars, params) = setup();
        let rsx = Polynomial::term(&params, int(1), &[("r", 1), ("s", 1), ("x", 1)]);
        let f = TruncatedSeries::monomial(&vars, &[1], rsx.clone(), 2);
        let e = f.exp().unwrap();
        assert_eq!(e.coefficient(&[0]).unwrap(), Polynomial::one(&params));
        assert_eq!(e.coefficient(&[1]).unwrap(), rsx);
        let sq = Polynomial::term(&params, rat(1, 2), &[("r", 2), ("s", 2), ("x", 2)]);
        assert_eq!(e.coefficient(&[2]).unwrap(), sq);
    }

    #[test]
    fn exp_rejects_constant_term() {
        let (vars, params) = setup();
        let f = TruncatedSeries::one(&vars, &params, 3);
        assert!(matches!(f.exp(), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn neg_binomial_matches_rising_factorials() {
        // (1-z)^{-a} to order 2: 1 + a z + a(a+1) z^2/2
        let (_, params) = setup();
        let a = Polynomial::var(&params, "a");
        let z = var_z(&params, 2);
        let s = TruncatedSeries::neg_binomial(&a, &z).unwrap();
        assert_eq!(s.coefficient(&[1]).unwrap(), a);
        let expected = Polynomial::term(&params, rat(1, 2), &[("a", 2)])
            .add(&Polynomial::term(&params, rat(1, 2), &[("a", 1)]))
            .unwrap();
        assert_eq!(s.coefficient(&[2]).unwrap(), expected);
    }

    #[test]
    fn neg_binomial_zero_exponent_is_one() {
        let (vars, params) = setup();
        let z = var_z(&params, 4);
        let s = TruncatedSeries::neg_binomial(&Polynomial::zero(&params), &z).unwrap();
        assert_eq!(s, TruncatedSeries::one(&vars, &params, 4));
    }

    #[test]
    fn neg_binomial_one_is_geometric() {
        let (_, params) = setup();
        let z = var_z(&params, 3);
        let s = TruncatedSeries::neg_binomial(&Polynomial::one(&params), &z).unwrap();
        for d in 0..=3 {
            assert_eq!(s.coefficient(&[d]).unwrap(), Polynomial::one(&params));
        }
    }

    #[test]
    fn neg_binomial_rejects_constant_term() {
        let (vars, params) = setup();
        let u = TruncatedSeries::one(&vars, &params, 3);
        assert!(matches!(
            TruncatedSeries::neg_binomial(&Polynomial::var(&params, "a"), &u),
            Err(Error::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn coefficient_contract() {
        let (vars, params) = setup();
        let f = TruncatedSeries::one(&vars, &params, 3);
        assert!(f.coefficient(&[2]).unwrap().is_zero());
        assert!(matches!(
            f.coefficient(&[4]),
            Err(Error::DegreeExceedsOrder { degree: 4, order: 3 })
        ));
    }

    #[test]
    fn set_var_zero_slices() {
        let vars = ParamSet::new(["y", "z"]);
        let params = ParamSet::new(["a"]);
        let a = Polynomial::var(&params, "a");
        let mut f = TruncatedSeries::zero(&vars, &params, 3);
        f.add_term(Monomial::from_exponents(vec![0, 2]), a.clone());
        f.add_term(Monomial::from_exponents(vec![1, 1]), Polynomial::one(&params));
        let sliced = f.set_var_zero("y").unwrap();
        assert_eq!(sliced.vars().names(), &["z".to_string()]);
        assert_eq!(sliced.coefficient(&[2]).unwrap(), a);
        assert!(sliced.coefficient(&[1]).unwrap().is_zero());
    }
}
