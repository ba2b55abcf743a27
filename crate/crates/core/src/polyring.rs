//! Exact rational scalars and a sparse multivariate polynomial ring.
//!
//! Every series coefficient and combinatorial weight in this crate lives in
//! `Q[params]` for some declared [`ParamSet`]. Polynomials are stored as a
//! sparse map from dense exponent vectors to nonzero rational coefficients,
//! so structural equality is canonical-form equality.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Exact rational scalar.
///
/// `BigRational` always stores values in lowest terms with a positive
/// denominator, which is the canonical form the coefficient maps rely on.
pub type Rat = BigRational;

/// Integer as an exact rational.
pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Exact fraction `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Random rational with numerator in `[-20, 20] \ {0}` and denominator in
/// `[1, 20]`. Nonzero numerators keep random evaluation points away from
/// trivial vanishing; the small bounds keep bignum growth manageable.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rat {
    let mut num = 0i64;
    while num == 0 {
        num = rng.gen_range(-20..=20);
    }
    let den = rng.gen_range(1..=20);
    rat(num, den)
}

/// An ordered set of named indeterminates.
///
/// The declaration order is fixed and defines both the exponent-vector layout
/// and the lexicographic monomial order, so two polynomials over equal
/// `ParamSet`s compare canonically. Also used as the variable set of a
/// truncated series.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamSet {
    names: Vec<String>,
}

impl ParamSet {
    /// Declares an indeterminate set. Panics on duplicate names.
    pub fn new<I, S>(names: I) -> Arc<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            assert!(
                !names[..i].contains(name),
                "duplicate indeterminate `{name}`"
            );
        }
        Arc::new(ParamSet { names })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn describe(&self) -> String {
        format!("({})", self.names.join(","))
    }
}

/// Dense exponent vector over a `ParamSet`, ordered lexicographically in the
/// declared indeterminate order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    /// The empty product (all exponents zero).
    pub fn unit(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// Single indeterminate to the first power.
    pub fn var(arity: usize, idx: usize) -> Self {
        let mut e = vec![0; arity];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariants: no stored zero coefficients, every exponent vector has the
/// arity of the parameter set, and the empty map is the canonical zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    params: Arc<ParamSet>,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero(params: &Arc<ParamSet>) -> Self {
        Polynomial {
            params: Arc::clone(params),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(params: &Arc<ParamSet>) -> Self {
        Self::constant(params, Rat::one())
    }

    pub fn constant(params: &Arc<ParamSet>, value: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Monomial::unit(params.arity()), value);
        }
        Polynomial {
            params: Arc::clone(params),
            terms,
        }
    }

    /// The indeterminate `name` as a polynomial. Panics if undeclared.
    pub fn var(params: &Arc<ParamSet>, name: &str) -> Self {
        let idx = params
            .index_of(name)
            .unwrap_or_else(|| panic!("indeterminate `{name}` not in {}", params.describe()));
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(params.arity(), idx), Rat::one());
        Polynomial {
            params: Arc::clone(params),
            terms,
        }
    }

    /// Single term `coeff * prod(name^exp)`. Panics on undeclared names.
    pub fn term(params: &Arc<ParamSet>, coeff: Rat, exps: &[(&str, u32)]) -> Self {
        let mut e = vec![0u32; params.arity()];
        for (name, exp) in exps {
            let idx = params
                .index_of(name)
                .unwrap_or_else(|| panic!("indeterminate `{name}` not in {}", params.describe()));
            e[idx] += exp;
        }
        let mut p = Self::zero(params);
        p.add_term(Monomial(e), coeff);
        p
    }

    pub fn params(&self) -> &Arc<ParamSet> {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_unit() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Stored coefficient of `mono`, or zero.
    pub fn coefficient(&self, mono: &Monomial) -> Rat {
        self.terms.get(mono).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coefficient(&Monomial::unit(self.params.arity()))
    }

    /// Accumulates one term, dropping the entry if the sum cancels.
    pub fn add_term(&mut self, mono: Monomial, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(mono.exponents().len(), self.params.arity());
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_params(&self, other: &Polynomial) -> Result<()> {
        if Arc::ptr_eq(&self.params, &other.params) || self.params == other.params {
            Ok(())
        } else {
            Err(Error::ParamSetMismatch(
                self.params.describe(),
                other.params.describe(),
            ))
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_params(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        Polynomial {
            params: Arc::clone(&self.params),
            terms,
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_params(other)?;
        let mut out = Polynomial::zero(&self.params);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rat) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(&self.params);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c * factor))
            .collect();
        Polynomial {
            params: Arc::clone(&self.params),
            terms,
        }
    }

    /// Adds the constant `value` (handy for rising-factorial products).
    pub fn add_constant(&self, value: Rat) -> Polynomial {
        let mut out = self.clone();
        out.add_term(Monomial::unit(self.params.arity()), value);
        out
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut out = Polynomial::one(&self.params);
        for _ in 0..exp {
            out = out.mul(self).expect("same parameter set");
        }
        out
    }

    /// Exact evaluation at a full assignment of the occurring indeterminates.
    pub fn eval(&self, point: &BTreeMap<String, Rat>) -> Result<Rat> {
        // Resolve each declared indeterminate once; missing ones only error
        // if they actually occur.
        let values: Vec<Option<&Rat>> = self
            .params
            .names()
            .iter()
            .map(|n| point.get(n))
            .collect();
        let mut acc = Rat::zero();
        for (mono, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (idx, &e) in mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values[idx].ok_or_else(|| {
                    Error::MissingAssignment(self.params.name(idx).to_string())
                })?;
                term *= pow_rat(v, e);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Replaces `name` by `replacement` (a polynomial over the same set).
    pub fn substitute(&self, name: &str, replacement: &Polynomial) -> Result<Polynomial> {
        self.check_params(replacement)?;
        let idx = self
            .params
            .index_of(name)
            .ok_or_else(|| Error::UnknownIndeterminate(name.to_string()))?;
        let mut out = Polynomial::zero(&self.params);
        for (mono, coeff) in &self.terms {
            let e = mono.exponents()[idx];
            let mut stripped = mono.exponents().to_vec();
            stripped[idx] = 0;
            let base = {
                let mut p = Polynomial::zero(&self.params);
                p.add_term(Monomial(stripped), coeff.clone());
                p
            };
            let contrib = base.mul(&replacement.pow(e))?;
            out = out.add(&contrib)?;
        }
        Ok(out)
    }

    /// Replaces `name` by a rational constant.
    pub fn substitute_value(&self, name: &str, value: &Rat) -> Result<Polynomial> {
        self.substitute(name, &Polynomial::constant(&self.params, value.clone()))
    }

    /// Re-expresses the polynomial over `new_params`, sending each occurring
    /// indeterminate through `mapping` (pairs of old and new names).
    /// Indeterminates that occur with a nonzero exponent must be mapped.
    pub fn rename(
        &self,
        new_params: &Arc<ParamSet>,
        mapping: &[(&str, &str)],
    ) -> Result<Polynomial> {
        let mut idx_map: Vec<Option<usize>> = vec![None; self.params.arity()];
        for (old, new) in mapping {
            let oi = self
                .params
                .index_of(old)
                .ok_or_else(|| Error::UnknownIndeterminate(old.to_string()))?;
            let ni = new_params
                .index_of(new)
                .ok_or_else(|| Error::UnknownIndeterminate(new.to_string()))?;
            idx_map[oi] = Some(ni);
        }
        let mut out = Polynomial::zero(new_params);
        for (mono, coeff) in &self.terms {
            let mut e = vec![0u32; new_params.arity()];
            for (oi, &exp) in mono.exponents().iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let ni = idx_map[oi].ok_or_else(|| {
                    Error::UnknownIndeterminate(self.params.name(oi).to_string())
                })?;
                e[ni] += exp;
            }
            out.add_term(Monomial(e), coeff.clone());
        }
        Ok(out)
    }

    /// Coefficient of the exact powers `exps` of the named indeterminates, as
    /// a polynomial in the remaining ones (over the same parameter set).
    pub fn coefficient_of(&self, exps: &[(&str, u32)]) -> Result<Polynomial> {
        let mut wanted: Vec<Option<u32>> = vec![None; self.params.arity()];
        for (name, exp) in exps {
            let idx = self
                .params
                .index_of(name)
                .ok_or_else(|| Error::UnknownIndeterminate(name.to_string()))?;
            wanted[idx] = Some(*exp);
        }
        let mut out = Polynomial::zero(&self.params);
        'terms: for (mono, coeff) in &self.terms {
            let mut stripped = mono.exponents().to_vec();
            for (idx, want) in wanted.iter().enumerate() {
                if let Some(w) = want {
                    if mono.exponents()[idx] != *w {
                        continue 'terms;
                    }
                    stripped[idx] = 0;
                }
            }
            out.add_term(Monomial(stripped), coeff.clone());
        }
        Ok(out)
    }
}

fn pow_rat(base: &Rat, exp: u32) -> Rat {
    let mut out = Rat::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, coeff) in self.terms.iter().rev() {
            let abs = coeff.abs();
            if first {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || mono.is_unit() {
                factors.push(abs.to_string());
            }
            for (idx, &e) in mono.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.params.name(idx).to_string()),
                    _ => factors.push(format!("{}^{}", self.params.name(idx), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
