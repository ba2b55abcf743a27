//! Closed-form polynomial families and the integer helpers behind them.
//!
//! The central family is `charlier_c`: the binomial/rising-factorial sum
//! whose value at nonnegative integers enumerates weighted configurations
//! (see the `configs` module). Alongside it live the classical variant of
//! the same family, the two-parameter permutation-statistic polynomials that
//! it transforms into, Stirling cycle numbers, and brute-force permutation
//! sums used as independent cross-checks throughout the test suite.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use num::{BigInt, One, Zero};

use crate::budget::EnumerationBudget;
use crate::error::Result;
use crate::polyring::{ParamSet, Polynomial, Rat};

pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Rising factorial `(p)_m = p (p+1) ... (p+m-1)` of a polynomial, with
/// `(p)_0 = 1`.
pub fn rising_factorial(p: &Polynomial, m: u32) -> Polynomial {
    let mut acc = Polynomial::one(p.params());
    for i in 0..m {
        acc = acc
            .mul(&p.add_constant(Rat::from_integer(i.into())))
            .expect("shifts stay in the same ring");
    }
    acc
}

/// Unsigned Stirling number of the first kind: permutations of `[n]` with
/// exactly `k` cycles.
pub fn stirling_cycle(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    // row-by-row recurrence: c(n, k) = c(n-1, k-1) + (n-1) c(n-1, k)
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); (m + 1) as usize];
        for (j, v) in row.iter().enumerate() {
            next[j + 1] += v;
            next[j] += v * (m - 1);
        }
        row = next;
    }
    row[k as usize].clone()
}

/// The polynomial `sum_k binom(n,k) (a)_k r^(n-k)` in the named
/// indeterminates `a` and `r`.
pub fn charlier_c(n: u32, params: &Arc<ParamSet>, a: &str, r: &str) -> Polynomial {
    let a = Polynomial::var(params, a);
    let r = Polynomial::var(params, r);
    let mut acc = Polynomial::zero(params);
    for k in 0..=n {
        let term = rising_factorial(&a, k)
            .mul(&r.pow(n - k))
            .unwrap()
            .scale(&Rat::from_integer(binomial(n, k)));
        acc = acc.add(&term).unwrap();
    }
    acc
}

/// The classical variant, kept in polynomial form by premultiplying with
/// `r^n`: returns `r^n c_n(a, r) = sum_k binom(n,k) (-a)_k r^(n-k)`.
///
/// Substituting `a -> -a` recovers `charlier_c`, which the tests check.
pub fn charlier_classical(n: u32, params: &Arc<ParamSet>, a: &str, r: &str) -> Polynomial {
    let minus_a = Polynomial::var(params, a).neg();
    let r = Polynomial::var(params, r);
    let mut acc = Polynomial::zero(params);
    for k in 0..=n {
        let term = rising_factorial(&minus_a, k)
            .mul(&r.pow(n - k))
            .unwrap()
            .scale(&Rat::from_integer(binomial(n, k)));
        acc = acc.add(&term).unwrap();
    }
    acc
}

/// Two-parameter permutation statistic, summed by brute force over all
/// permutations of `[n]`: each permutation contributes
/// `alpha^(cycles of length >= 2) * u^(fixed points)`.
pub fn derangement_poly2(
    n: u32,
    params: &Arc<ParamSet>,
    alpha: &str,
    u: &str,
    budget: &EnumerationBudget,
) -> Result<Polynomial> {
    budget.check_perms(n)?;
    let mut counts: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for perm in (0..n as usize).permutations(n as usize) {
        let (big, fix) = perm_cycle_stats(&perm);
        *counts.entry((big, fix)).or_default() += 1;
    }
    Ok(assemble(params, &counts, alpha, u))
}

/// Cycle-counting polynomial of fixed-point-free permutations of `[n]`,
/// summed by brute force: each contributes `alpha^(number of cycles)`.
pub fn derangement_poly(
    n: u32,
    params: &Arc<ParamSet>,
    alpha: &str,
    budget: &EnumerationBudget,
) -> Result<Polynomial> {
    budget.check_perms(n)?;
    let mut counts: BTreeMap<u32, BigInt> = BTreeMap::new();
    for perm in (0..n as usize).permutations(n as usize) {
        let (big, fix) = perm_cycle_stats(&perm);
        if fix == 0 {
            *counts.entry(big).or_default() += 1;
        }
    }
    let mut acc = Polynomial::zero(params);
    for (c, count) in counts {
        let term = Polynomial::term(params, Rat::from_integer(count), &[(alpha, c)]);
        acc = acc.add(&term).unwrap();
    }
    Ok(acc)
}

/// Number of fixed-point-free permutations of `[n]`, by the recurrence
/// `d_n = (n-1)(d_{n-1} + d_{n-2})`.
pub fn subfactorial(n: u32) -> BigInt {
    let (mut prev, mut cur) = (BigInt::one(), BigInt::zero());
    if n == 0 {
        return prev;
    }
    for m in 2..=n {
        let next = (cur.clone() + &prev) * (m - 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Cycles of a permutation given as a value map. Each cycle starts at its
/// smallest element and cycles are ordered by those minima.
pub fn cycle_decomposition(perm: &BTreeMap<u32, u32>) -> Vec<Vec<u32>> {
    let mut seen = BTreeSet::new();
    let mut cycles = Vec::new();
    for &start in perm.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while seen.insert(i) {
            cycle.push(i);
            i = *perm
                .get(&i)
                .expect("permutation maps its domain into itself");
        }
        cycles.push(cycle);
    }
    cycles
}

/// `(cycles of length >= 2, fixed points)` of a one-line permutation of
/// `0..len`.
fn perm_cycle_stats(perm: &[usize]) -> (u32, u32) {
    let mut seen = vec![false; perm.len()];
    let (mut big, mut fix) = (0, 0);
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len == 1 {
            fix += 1;
        } else {
            big += 1;
        }
    }
    (big, fix)
}

fn assemble(
    params: &Arc<ParamSet>,
    counts: &BTreeMap<(u32, u32), BigInt>,
    alpha: &str,
    u: &str,
) -> Polynomial {
    let mut acc = Polynomial::zero(params);
    for (&(c, f), count) in counts {
        let term = Polynomial::term(
            params,
            Rat::from_integer(count.clone()),
            &[(alpha, c), (u, f)],
        );
        acc = acc.add(&term).unwrap();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::int;

    fn ar() -> Arc<ParamSet> {
        ParamSet::new(["a", "r"])
    }

    #[test]
    fn integer_helpers() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(7, 3), BigInt::from(35));
        assert_eq!(binomial(5, 0), BigInt::one());
        assert_eq!(binomial(5, 7), BigInt::zero());
        let sub: Vec<BigInt> = (0..=6).map(subfactorial).collect();
        let expected = [1, 0, 1, 2, 9, 44, 265].map(BigInt::from);
        assert_eq!(sub, expected);
    }

    #[test]
    fn rising_factorial_basics() {
        let params = ar();
        let a = Polynomial::var(&params, "a");
        assert!(rising_factorial(&a, 0).is_one());
        // (a)_2 = a^2 + a
        let expected = Polynomial::term(&params, int(1), &[("a", 2)]).add(&a).unwrap();
        assert_eq!(rising_factorial(&a, 2), expected);
        // (3)_2 = 12
        let three = Polynomial::constant(&params, int(3));
        assert_eq!(rising_factorial(&three, 2), Polynomial::constant(&params, int(12)));
    }

    #[test]
    fn stirling_cycle_against_brute_force() {
        assert_eq!(stirling_cycle(3, 2), BigInt::from(3));
        assert_eq!(stirling_cycle(4, 1), BigInt::from(6));
        assert_eq!(stirling_cycle(0, 0), BigInt::one());
        assert_eq!(stirling_cycle(3, 5), BigInt::zero());
        // rows sum to n!
        for n in 0..=6 {
            let row: BigInt = (0..=n).map(|k| stirling_cycle(n, k)).sum();
            assert_eq!(row, factorial(n), "row {n}");
        }
        // direct comparison with cycle counts over S_n
        for n in 1..=5u32 {
            let mut by_cycles = vec![BigInt::zero(); (n + 1) as usize];
            for perm in (0..n as usize).permutations(n as usize) {
                let (big, fix) = perm_cycle_stats(&perm);
                by_cycles[(big + fix) as usize] += 1;
            }
            for k in 0..=n {
                assert_eq!(by_cycles[k as usize], stirling_cycle(n, k), "c({n},{k})");
            }
        }
    }

    #[test]
    fn stirling_row_generates_rising_factorial() {
        // sum_k c(n,k) a^k = (a)_n
        let params = ar();
        let a = Polynomial::var(&params, "a");
        for n in 0..=5u32 {
            let mut lhs = Polynomial::zero(&params);
            for k in 0..=n {
                let term = Polynomial::term(
                    &params,
                    Rat::from_integer(stirling_cycle(n, k)),
                    &[("a", k)],
                );
                lhs = lhs.add(&term).unwrap();
            }
            assert_eq!(lhs, rising_factorial(&a, n), "n = {n}");
        }
    }

    #[test]
    fn charlier_c_small_cases() {
        let params = ar();
        assert!(charlier_c(0, &params, "a", "r").is_one());
        // C_1 = r + a
        let c1 = Polynomial::var(&params, "r").add(&Polynomial::var(&params, "a")).unwrap();
        assert_eq!(charlier_c(1, &params, "a", "r"), c1);
        // C_2 = r^2 + 2ar + a^2 + a
        let c2 = Polynomial::term(&params, int(1), &[("r", 2)])
            .add(&Polynomial::term(&params, int(2), &[("a", 1), ("r", 1)]))
            .unwrap()
            .add(&Polynomial::term(&params, int(1), &[("a", 2)]))
            .unwrap()
            .add(&Polynomial::var(&params, "a"))
            .unwrap();
        assert_eq!(charlier_c(2, &params, "a", "r"), c2);
    }

    #[test]
    fn charlier_c_special_evaluations() {
        let params = ar();
        for n in 0..=7u32 {
            let c = charlier_c(n, &params, "a", "r");
            // at a=0, r=1 every rising factorial with k >= 1 vanishes
            let mut at = BTreeMap::new();
            at.insert("a".to_string(), int(0));
            at.insert("r".to_string(), int(1));
            assert_eq!(c.eval(&at).unwrap(), int(1), "n = {n}");
            // at a=1, r=1 the sum counts ordered-subset choices
            at.insert("a".to_string(), int(1));
            let expected: BigInt = (0..=n).map(|k| binomial(n, k) * factorial(k)).sum();
            assert_eq!(c.eval(&at).unwrap(), Rat::from_integer(expected), "n = {n}");
        }
    }

    #[test]
    fn classical_variant_is_sign_twist() {
        let params = ar();
        // n = 1: r^1 c_1 = r - a
        let expected = Polynomial::var(&params, "r")
            .sub(&Polynomial::var(&params, "a"))
            .unwrap();
        assert_eq!(charlier_classical(1, &params, "a", "r"), expected);
        // substituting a -> -a recovers the main family
        let minus_a = Polynomial::var(&params, "a").neg();
        for n in 0..=8u32 {
            let twisted = charlier_classical(n, &params, "a", "r")
                .substitute("a", &minus_a)
                .unwrap();
            assert_eq!(twisted, charlier_c(n, &params, "a", "r"), "n = {n}");
        }
    }

    #[test]
    fn derangement_poly2_small_cases() {
        let params = ParamSet::new(["alpha", "u"]);
        let budget = EnumerationBudget::default();
        assert!(derangement_poly2(0, &params, "alpha", "u", &budget).unwrap().is_one());
        // D_2 = u^2 + alpha
        let d2 = Polynomial::term(&params, int(1), &[("u", 2)])
            .add(&Polynomial::var(&params, "alpha"))
            .unwrap();
        assert_eq!(derangement_poly2(2, &params, "alpha", "u", &budget).unwrap(), d2);
        // D_4 at alpha=1, u=0 counts fixed-point-free permutations of [4]
        let d4 = derangement_poly2(4, &params, "alpha", "u", &budget).unwrap();
        let mut at = BTreeMap::new();
        at.insert("alpha".to_string(), int(1));
        at.insert("u".to_string(), int(0));
        assert_eq!(d4.eval(&at).unwrap(), int(9));
    }

    #[test]
    fn derangement_poly_matches_two_parameter_slice() {
        let params = ParamSet::new(["alpha", "u"]);
        let budget = EnumerationBudget::default();
        // D_3 restricted to no fixed points: two 3-cycles, weight 2*alpha
        let d3 = derangement_poly(3, &params, "alpha", &budget).unwrap();
        assert_eq!(d3, Polynomial::var(&params, "alpha").scale(&int(2)));
        for n in 0..=6u32 {
            let sliced = derangement_poly2(n, &params, "alpha", "u", &budget)
                .unwrap()
                .substitute_value("u", &int(0))
                .unwrap();
            assert_eq!(
                derangement_poly(n, &params, "alpha", &budget).unwrap(),
                sliced,
                "n = {n}"
            );
            // alpha = 1 counts fixed-point-free permutations
            let mut at = BTreeMap::new();
            at.insert("alpha".to_string(), int(1));
            at.insert("u".to_string(), int(1));
            assert_eq!(
                sliced.eval(&at).unwrap(),
                Rat::from_integer(subfactorial(n)),
                "n = {n}"
            );
        }
    }

    #[test]
    fn permutation_statistic_transforms() {
        // D_n(alpha, u) = C_n(alpha, u - alpha), equivalently
        // C_n(a, r) = D_n(a, a + r)
        let params = ParamSet::new(["a", "r", "u"]);
        let budget = EnumerationBudget::default();
        let a = Polynomial::var(&params, "a");
        let u_minus_a = Polynomial::var(&params, "u").sub(&a).unwrap();
        let a_plus_r = a.add(&Polynomial::var(&params, "r")).unwrap();
        for n in 0..=6u32 {
            let d = derangement_poly2(n, &params, "a", "u", &budget).unwrap();
            let c = charlier_c(n, &params, "a", "r");
            assert_eq!(c.substitute("r", &u_minus_a).unwrap(), d, "n = {n}");
            assert_eq!(d.substitute("u", &a_plus_r).unwrap(), c, "n = {n}");
        }
    }

    #[test]
    fn derangement_polys_via_charlier_specialization() {
        // fixed-point-free cycle polynomial equals C_n(alpha, -alpha)
        let params = ParamSet::new(["alpha", "r"]);
        let budget = EnumerationBudget::default();
        let minus_alpha = Polynomial::var(&params, "alpha").neg();
        for n in 0..=6u32 {
            let specialized = charlier_c(n, &params, "alpha", "r")
                .substitute("r", &minus_alpha)
                .unwrap();
            assert_eq!(
                derangement_poly(n, &params, "alpha", &budget).unwrap(),
                specialized,
                "n = {n}"
            );
        }
    }

    #[test]
    fn budget_guards_brute_force() {
        let params = ParamSet::new(["alpha", "u"]);
        let budget = EnumerationBudget::default();
        assert!(derangement_poly2(11, &params, "alpha", "u", &budget).is_err());
        assert!(derangement_poly(11, &params, "alpha", &budget).is_err());
    }

    #[test]
    fn cycle_decomposition_is_canonical() {
        // permutation (1 5 10 3)(4 9 6)(7) on its own support
        let pairs = [(1, 5), (5, 10), (10, 3), (3, 1), (4, 9), (9, 6), (6, 4), (7, 7)];
        let perm: BTreeMap<u32, u32> = pairs.into_iter().collect();
        let cycles = cycle_decomposition(&perm);
        assert_eq!(
            cycles,
            vec![vec![1, 5, 10, 3], vec![4, 9, 6], vec![7]]
        );
    }
}
