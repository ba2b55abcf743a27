//! Series builders for both sides of every registered identity.
//!
//! Left sides are assembled from `charlier_c` (or its derangement
//! specialization) term by term; right sides from exponentials,
//! negative-binomial factors, and rising factorials. The two routes share
//! no simplification machinery, so agreement of the resulting series is a
//! genuine check. Every right side is built as an exponential prefactor
//! times a body; the comparison engine can drop the prefactor on purpose to
//! prove the check can fail.

use std::sync::Arc;

use num::One;

use crate::charlier::{binomial, charlier_c, factorial, rising_factorial};
use crate::configs::{a_name, multilinear_params, r_name, x_name};
use crate::error::{Error, Result};
use crate::polyring::{Monomial, ParamSet, Polynomial, Rat};
use crate::series::TruncatedSeries;

/// Which side of an identity to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

fn inv_factorial(n: u32) -> Rat {
    Rat::from_integer(factorial(n)).recip()
}

/// `1/(l! m! ..)` for a multi-index.
fn inv_factorials(idx: &[u32]) -> Rat {
    idx.iter().map(|&i| inv_factorial(i)).product()
}

/// The tower `(1-u)^{-(p+d)}` for `d = 0..=order`.
fn nb_tower(
    p: &Polynomial,
    u: &TruncatedSeries,
    order: u32,
) -> Result<Vec<TruncatedSeries>> {
    let step = TruncatedSeries::neg_binomial(&Polynomial::one(p.params()), u)?;
    let mut tower = vec![TruncatedSeries::neg_binomial(p, u)?];
    for d in 1..=order as usize {
        tower.push(tower[d - 1].mul(&step)?);
    }
    Ok(tower)
}

/// A series with one linear term per `(variable, coefficient)` pair.
fn linear_series(
    vars: &Arc<ParamSet>,
    params: &Arc<ParamSet>,
    order: u32,
    terms: &[(&str, Polynomial)],
) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(vars, params, order);
    for (var, coeff) in terms {
        let mut exps = vec![0u32; vars.arity()];
        exps[vars.index_of(var).expect("declared variable")] = 1;
        s.add_term(Monomial::from_exponents(exps), coeff.clone());
    }
    s
}

/// The derangement-by-cycles polynomial as the specialization
/// `charlier_c(n)` at `r = -alpha`, written out directly:
/// `sum_k binom(n,k) (alpha)_k (-alpha)^(n-k)`.
pub fn d_poly(n: u32, params: &Arc<ParamSet>, alpha: &str) -> Polynomial {
    let a = Polynomial::var(params, alpha);
    let neg = a.neg();
    let mut acc = Polynomial::zero(params);
    for k in 0..=n {
        let term = rising_factorial(&a, k)
            .mul(&neg.pow(n - k))
            .unwrap()
            .scale(&Rat::from_integer(binomial(n, k)));
        acc = acc.add(&term).unwrap();
    }
    acc
}

fn assemble(side: Side, lhs: TruncatedSeries, rhs: Result<(TruncatedSeries, TruncatedSeries)>)
    -> Result<TruncatedSeries>
{
    match side {
        Side::Lhs => Ok(lhs),
        Side::Rhs => {
            let (prefactor, body) = rhs?;
            prefactor.mul(&body)
        }
    }
}

// ---------------------------------------------------------------------------
// single-variable families

/// `sum_n C_n(a,r) x^n/n!  =  e^{rx} (1-x)^{-a}`.
pub fn build_egf_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["x"]);
    let params = ParamSet::new(["a", "r"]);
    match side {
        Side::Lhs => {
            let mut acc = TruncatedSeries::zero(&vars, &params, order);
            for n in 0..=order {
                let coeff = charlier_c(n, &params, "a", "r").scale(&inv_factorial(n));
                acc.add_term(Monomial::from_exponents(vec![n]), coeff);
            }
            Ok(acc)
        }
        Side::Rhs => {
            let (p, b) = egf_rhs_parts(order)?;
            p.mul(&b)
        }
    }
}

pub(crate) fn egf_rhs_parts(order: u32) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["x"]);
    let params = ParamSet::new(["a", "r"]);
    let prefactor =
        linear_series(&vars, &params, order, &[("x", Polynomial::var(&params, "r"))]).exp()?;
    let x = linear_series(&vars, &params, order, &[("x", Polynomial::one(&params))]);
    let body = TruncatedSeries::neg_binomial(&Polynomial::var(&params, "a"), &x)?;
    Ok((prefactor, body))
}

/// `sum_n C_n(a,r) C_n(b,s) x^n/n!` against
/// `e^{rsx} sum_n (a)_n (b)_n x^n / [n! (1-sx)^{n+a} (1-rx)^{n+b}]`.
pub fn build_bilinear_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["x"]);
    let params = ParamSet::new(["a", "b", "r", "s"]);
    let lhs = {
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for n in 0..=order {
            let coeff = charlier_c(n, &params, "a", "r")
                .mul(&charlier_c(n, &params, "b", "s"))?
                .scale(&inv_factorial(n));
            acc.add_term(Monomial::from_exponents(vec![n]), coeff);
        }
        acc
    };
    assemble(side, lhs, bilinear_rhs_parts(order))
}

pub(crate) fn bilinear_rhs_parts(order: u32) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["x"]);
    let params = ParamSet::new(["a", "b", "r", "s"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[("x", var("r").mul(&var("s"))?)],
    )
    .exp()?;
    let u_s = linear_series(&vars, &params, order, &[("x", var("s"))]);
    let u_r = linear_series(&vars, &params, order, &[("x", var("r"))]);
    let tower_a = nb_tower(&var("a"), &u_s, order)?;
    let tower_b = nb_tower(&var("b"), &u_r, order)?;
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for n in 0..=order {
        let coeff = rising_factorial(&var("a"), n)
            .mul(&rising_factorial(&var("b"), n))?
            .scale(&inv_factorial(n));
        let term = TruncatedSeries::monomial(&vars, &[n], coeff, order)
            .mul(&tower_a[n as usize])?
            .mul(&tower_b[n as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

/// `sum_n D_n(alpha) D_n(beta) x^n/n!` against
/// `e^{ab x} sum_n (a)_n (b)_n x^n / [n! (1+bx)^{n+a} (1+ax)^{n+b}]`
/// with `a = alpha`, `b = beta`.
pub fn build_derangement_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["x"]);
    let params = ParamSet::new(["alpha", "beta"]);
    let lhs = {
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for n in 0..=order {
            let coeff = d_poly(n, &params, "alpha")
                .mul(&d_poly(n, &params, "beta"))?
                .scale(&inv_factorial(n));
            acc.add_term(Monomial::from_exponents(vec![n]), coeff);
        }
        acc
    };
    assemble(side, lhs, derangement_rhs_parts(order))
}

pub(crate) fn derangement_rhs_parts(order: u32) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["x"]);
    let params = ParamSet::new(["alpha", "beta"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[("x", var("alpha").mul(&var("beta"))?)],
    )
    .exp()?;
    // (1 + beta x)^{-(n+alpha)} = (1 - u)^{-(n+alpha)} with u = -beta x
    let u_b = linear_series(&vars, &params, order, &[("x", var("beta").neg())]);
    let u_a = linear_series(&vars, &params, order, &[("x", var("alpha").neg())]);
    let tower_a = nb_tower(&var("alpha"), &u_b, order)?;
    let tower_b = nb_tower(&var("beta"), &u_a, order)?;
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for n in 0..=order {
        let coeff = rising_factorial(&var("alpha"), n)
            .mul(&rising_factorial(&var("beta"), n))?
            .scale(&inv_factorial(n));
        let term = TruncatedSeries::monomial(&vars, &[n], coeff, order)
            .mul(&tower_a[n as usize])?
            .mul(&tower_b[n as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

// ---------------------------------------------------------------------------
// three-variable families over (x, y, z) and their (y, z) slices

/// All multi-indices of the given length with entry sum at most `order`,
/// lexicographic.
fn indices_up_to(len: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn rec(pos: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=rem {
            cur[pos] = v;
            rec(pos + 1, rem - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, order, &mut cur, &mut out);
    out
}

/// `sum C_{l+m}(a,r) C_{l+n}(b,s) C_{m+n}(c,t) x^l y^m z^n/(l!m!n!)` against
/// the `e^{rsx+rty+stz}`-prefixed triple-denominator sum.
pub fn build_trilinear_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["x", "y", "z"]);
    let params = ParamSet::new(["a", "b", "c", "r", "s", "t"]);
    let lhs = {
        let ca: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "a", "r")).collect();
        let cb: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "b", "s")).collect();
        let cc: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "c", "t")).collect();
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for idx in indices_up_to(3, order) {
            let (l, m, n) = (idx[0], idx[1], idx[2]);
            let coeff = ca[(l + m) as usize]
                .mul(&cb[(l + n) as usize])?
                .mul(&cc[(m + n) as usize])?
                .scale(&inv_factorials(&idx));
            acc.add_term(Monomial::from_exponents(idx), coeff);
        }
        acc
    };
    assemble(side, lhs, trilinear_rhs_parts(order))
}

pub(crate) fn trilinear_rhs_parts(order: u32) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["x", "y", "z"]);
    let params = ParamSet::new(["a", "b", "c", "r", "s", "t"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[
            ("x", var("r").mul(&var("s"))?),
            ("y", var("r").mul(&var("t"))?),
            ("z", var("s").mul(&var("t"))?),
        ],
    )
    .exp()?;
    // denominators: (1-sx-ty)^{l+m+a}, (1-rx-tz)^{l+n+b}, (1-ry-sz)^{m+n+c}
    let u1 = linear_series(&vars, &params, order, &[("x", var("s")), ("y", var("t"))]);
    let u2 = linear_series(&vars, &params, order, &[("x", var("r")), ("z", var("t"))]);
    let u3 = linear_series(&vars, &params, order, &[("y", var("r")), ("z", var("s"))]);
    let t1 = nb_tower(&var("a"), &u1, order)?;
    let t2 = nb_tower(&var("b"), &u2, order)?;
    let t3 = nb_tower(&var("c"), &u3, order)?;
    let ra: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("a"), d)).collect();
    let rb: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("b"), d)).collect();
    let rc: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("c"), d)).collect();
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for idx in indices_up_to(3, order) {
        let (l, m, n) = (idx[0], idx[1], idx[2]);
        let coeff = ra[(l + m) as usize]
            .mul(&rb[(l + n) as usize])?
            .mul(&rc[(m + n) as usize])?
            .scale(&inv_factorials(&idx));
        let term = TruncatedSeries::monomial(&vars, &idx, coeff, order)
            .mul(&t1[(l + m) as usize])?
            .mul(&t2[(l + n) as usize])?
            .mul(&t3[(m + n) as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

/// The `x = 0` slice of the trilinear identity, over `(y, z)`:
/// `sum C_m(a,r) C_n(b,s) C_{m+n}(c,t) y^m z^n/(m!n!)` against the
/// `e^{(ry+sz)t}`-prefixed sum.
pub fn build_carlitz_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["y", "z"]);
    let params = ParamSet::new(["a", "b", "c", "r", "s", "t"]);
    let lhs = {
        let ca: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "a", "r")).collect();
        let cb: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "b", "s")).collect();
        let cc: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "c", "t")).collect();
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for idx in indices_up_to(2, order) {
            let (m, n) = (idx[0], idx[1]);
            let coeff = ca[m as usize]
                .mul(&cb[n as usize])?
                .mul(&cc[(m + n) as usize])?
                .scale(&inv_factorials(&idx));
            acc.add_term(Monomial::from_exponents(idx), coeff);
        }
        acc
    };
    assemble(side, lhs, carlitz_rhs_parts(order))
}

pub(crate) fn carlitz_rhs_parts(order: u32) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["y", "z"]);
    let params = ParamSet::new(["a", "b", "c", "r", "s", "t"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[
            ("y", var("r").mul(&var("t"))?),
            ("z", var("s").mul(&var("t"))?),
        ],
    )
    .exp()?;
    // denominators: (1-ty)^{m+a}, (1-tz)^{n+b}, (1-ry-sz)^{m+n+c}
    let u1 = linear_series(&vars, &params, order, &[("y", var("t"))]);
    let u2 = linear_series(&vars, &params, order, &[("z", var("t"))]);
    let u3 = linear_series(&vars, &params, order, &[("y", var("r")), ("z", var("s"))]);
    let t1 = nb_tower(&var("a"), &u1, order)?;
    let t2 = nb_tower(&var("b"), &u2, order)?;
    let t3 = nb_tower(&var("c"), &u3, order)?;
    let ra: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("a"), d)).collect();
    let rb: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("b"), d)).collect();
    let rc: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("c"), d)).collect();
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for idx in indices_up_to(2, order) {
        let (m, n) = (idx[0], idx[1]);
        let coeff = ra[m as usize]
            .mul(&rb[n as usize])?
            .mul(&rc[(m + n) as usize])?
            .scale(&inv_factorials(&idx));
        let term = TruncatedSeries::monomial(&vars, &idx, coeff, order)
            .mul(&t1[m as usize])?
            .mul(&t2[n as usize])?
            .mul(&t3[(m + n) as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

/// The `c = 0, t = 1` slice of the trilinear identity, over `(x, y, z)`:
/// `sum C_{l+m}(a,r) C_{l+n}(b,s) x^l y^m z^n/(l!m!n!)` against the
/// `e^{rsx+ry+sz}`-prefixed single sum over `l`.
pub fn build_bilinear_general_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["x", "y", "z"]);
    let params = ParamSet::new(["a", "b", "r", "s"]);
    let lhs = {
        let ca: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "a", "r")).collect();
        let cb: Vec<Polynomial> = (0..=order).map(|d| charlier_c(d, &params, "b", "s")).collect();
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for idx in indices_up_to(3, order) {
            let (l, m, n) = (idx[0], idx[1], idx[2]);
            let coeff = ca[(l + m) as usize]
                .mul(&cb[(l + n) as usize])?
                .scale(&inv_factorials(&idx));
            acc.add_term(Monomial::from_exponents(idx), coeff);
        }
        acc
    };
    assemble(side, lhs, bilinear_general_rhs_parts(order))
}

pub(crate) fn bilinear_general_rhs_parts(
    order: u32,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["x", "y", "z"]);
    let params = ParamSet::new(["a", "b", "r", "s"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[
            ("x", var("r").mul(&var("s"))?),
            ("y", var("r")),
            ("z", var("s")),
        ],
    )
    .exp()?;
    // denominators: (1-sx-y)^{l+a}, (1-rx-z)^{l+b}
    let u1 = linear_series(
        &vars,
        &params,
        order,
        &[("x", var("s")), ("y", Polynomial::one(&params))],
    );
    let u2 = linear_series(
        &vars,
        &params,
        order,
        &[("x", var("r")), ("z", Polynomial::one(&params))],
    );
    let t1 = nb_tower(&var("a"), &u1, order)?;
    let t2 = nb_tower(&var("b"), &u2, order)?;
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for l in 0..=order {
        let coeff = rising_factorial(&var("a"), l)
            .mul(&rising_factorial(&var("b"), l))?
            .scale(&inv_factorial(l));
        let term = TruncatedSeries::monomial(&vars, &[l, 0, 0], coeff, order)
            .mul(&t1[l as usize])?
            .mul(&t2[l as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

/// Derangement form of the `(y, z)` slice:
/// `sum D_m(alpha) D_n(beta) D_{m+n}(gamma) y^m z^n/(m!n!)` against the
/// `e^{(alpha y + beta z) gamma}`-prefixed sum.
pub fn build_derangement_trilinear_side(side: Side, order: u32) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["y", "z"]);
    let params = ParamSet::new(["alpha", "beta", "gamma"]);
    let lhs = {
        let da: Vec<Polynomial> = (0..=order).map(|d| d_poly(d, &params, "alpha")).collect();
        let db: Vec<Polynomial> = (0..=order).map(|d| d_poly(d, &params, "beta")).collect();
        let dc: Vec<Polynomial> = (0..=order).map(|d| d_poly(d, &params, "gamma")).collect();
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for idx in indices_up_to(2, order) {
            let (m, n) = (idx[0], idx[1]);
            let coeff = da[m as usize]
                .mul(&db[n as usize])?
                .mul(&dc[(m + n) as usize])?
                .scale(&inv_factorials(&idx));
            acc.add_term(Monomial::from_exponents(idx), coeff);
        }
        acc
    };
    assemble(side, lhs, derangement_trilinear_rhs_parts(order))
}

pub(crate) fn derangement_trilinear_rhs_parts(
    order: u32,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["y", "z"]);
    let params = ParamSet::new(["alpha", "beta", "gamma"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[
            ("y", var("alpha").mul(&var("gamma"))?),
            ("z", var("beta").mul(&var("gamma"))?),
        ],
    )
    .exp()?;
    // denominators: (1+gamma y)^{m+alpha}, (1+gamma z)^{n+beta},
    // (1+alpha y+beta z)^{m+n+gamma}
    let u1 = linear_series(&vars, &params, order, &[("y", var("gamma").neg())]);
    let u2 = linear_series(&vars, &params, order, &[("z", var("gamma").neg())]);
    let u3 = linear_series(
        &vars,
        &params,
        order,
        &[("y", var("alpha").neg()), ("z", var("beta").neg())],
    );
    let t1 = nb_tower(&var("alpha"), &u1, order)?;
    let t2 = nb_tower(&var("beta"), &u2, order)?;
    let t3 = nb_tower(&var("gamma"), &u3, order)?;
    let ra: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("alpha"), d)).collect();
    let rb: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("beta"), d)).collect();
    let rc: Vec<Polynomial> = (0..=order).map(|d| rising_factorial(&var("gamma"), d)).collect();
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for idx in indices_up_to(2, order) {
        let (m, n) = (idx[0], idx[1]);
        let coeff = ra[m as usize]
            .mul(&rb[n as usize])?
            .mul(&rc[(m + n) as usize])?
            .scale(&inv_factorials(&idx));
        let term = TruncatedSeries::monomial(&vars, &idx, coeff, order)
            .mul(&t1[m as usize])?
            .mul(&t2[n as usize])?
            .mul(&t3[(m + n) as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

/// Derangement form of the `c = 0, t = 1` slice:
/// `sum D_{l+m}(alpha) D_{l+n}(beta) x^l y^m z^n/(l!m!n!)` against the
/// `e^{alpha beta x - alpha y - beta z}`-prefixed single sum over `l`.
pub fn build_derangement_bilinear_general_side(
    side: Side,
    order: u32,
) -> Result<TruncatedSeries> {
    let vars = ParamSet::new(["x", "y", "z"]);
    let params = ParamSet::new(["alpha", "beta"]);
    let lhs = {
        let da: Vec<Polynomial> = (0..=order).map(|d| d_poly(d, &params, "alpha")).collect();
        let db: Vec<Polynomial> = (0..=order).map(|d| d_poly(d, &params, "beta")).collect();
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for idx in indices_up_to(3, order) {
            let (l, m, n) = (idx[0], idx[1], idx[2]);
            let coeff = da[(l + m) as usize]
                .mul(&db[(l + n) as usize])?
                .scale(&inv_factorials(&idx));
            acc.add_term(Monomial::from_exponents(idx), coeff);
        }
        acc
    };
    assemble(side, lhs, derangement_bilinear_general_rhs_parts(order))
}

pub(crate) fn derangement_bilinear_general_rhs_parts(
    order: u32,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let vars = ParamSet::new(["x", "y", "z"]);
    let params = ParamSet::new(["alpha", "beta"]);
    let var = |n: &str| Polynomial::var(&params, n);
    let prefactor = linear_series(
        &vars,
        &params,
        order,
        &[
            ("x", var("alpha").mul(&var("beta"))?),
            ("y", var("alpha").neg()),
            ("z", var("beta").neg()),
        ],
    )
    .exp()?;
    // denominators: (1+beta x-y)^{l+alpha}, (1+alpha x-z)^{l+beta}
    let u1 = linear_series(
        &vars,
        &params,
        order,
        &[("x", var("beta").neg()), ("y", Polynomial::one(&params))],
    );
    let u2 = linear_series(
        &vars,
        &params,
        order,
        &[("x", var("alpha").neg()), ("z", Polynomial::one(&params))],
    );
    let t1 = nb_tower(&var("alpha"), &u1, order)?;
    let t2 = nb_tower(&var("beta"), &u2, order)?;
    let mut body = TruncatedSeries::zero(&vars, &params, order);
    for l in 0..=order {
        let coeff = rising_factorial(&var("alpha"), l)
            .mul(&rising_factorial(&var("beta"), l))?
            .scale(&inv_factorial(l));
        let term = TruncatedSeries::monomial(&vars, &[l, 0, 0], coeff, order)
            .mul(&t1[l as usize])?
            .mul(&t2[l as usize])?;
        body = body.add(&term)?;
    }
    Ok((prefactor, body))
}

// ---------------------------------------------------------------------------
// the multilinear identity in z, any number of configurations

/// The full identity for `k` configurations as a series in `z` with
/// coefficients in `(a_i, r_i, x_ij)`: block-size matrices `(n_ij)` with
/// `C_{n_i}` products on the left; an exponential prefactor, the factors
/// `(1 - z sum_j r_j x_ij)^{-a_i}`, and a matrix sum with rising factorials
/// and the matching `-n_i` powers on the right.
pub fn build_multilinear_side(side: Side, k: usize, order: u32) -> Result<TruncatedSeries> {
    check_k(k)?;
    let vars = ParamSet::new(["z"]);
    let params = multilinear_params(k);
    let pairs = pair_list(k);
    let lhs = {
        let c: Vec<Vec<Polynomial>> = (1..=k)
            .map(|i| {
                (0..=order)
                    .map(|d| charlier_c(d, &params, &a_name(i), &r_name(i)))
                    .collect()
            })
            .collect();
        let mut acc = TruncatedSeries::zero(&vars, &params, order);
        for matrix in indices_up_to(pairs.len(), order) {
            let total: u32 = matrix.iter().sum();
            let mut coeff = x_monomial(&params, &pairs, &matrix);
            for i in 1..=k {
                coeff = coeff.mul(&c[i - 1][color_sum(&pairs, &matrix, i) as usize])?;
            }
            acc.add_term(Monomial::from_exponents(vec![total]), coeff);
        }
        acc
    };
    assemble(side, lhs, multilinear_rhs_parts(k, order))
}

pub(crate) fn multilinear_rhs_parts(
    k: usize,
    order: u32,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    check_k(k)?;
    let vars = ParamSet::new(["z"]);
    let params = multilinear_params(k);
    let pairs = pair_list(k);

    // prefactor: exp of z * sum over pairs of r_i r_j x_ij
    let mut exp_arg = Polynomial::zero(&params);
    for &(i, j) in &pairs {
        exp_arg = exp_arg.add(&Polynomial::term(
            &params,
            Rat::one(),
            &[(&r_name(i), 1), (&r_name(j), 1), (&x_name(i, j), 1)],
        ))?;
    }
    let prefactor = linear_series(&vars, &params, order, &[("z", exp_arg)]).exp()?;

    // per color: u_i = z * s_i with s_i = sum_{j != i} r_j x_ij
    let mut nb_factors = Vec::new();
    let mut towers = Vec::new();
    for i in 1..=k {
        let mut s_i = Polynomial::zero(&params);
        for j in 1..=k {
            if j == i {
                continue;
            }
            let (p, q) = (i.min(j), i.max(j));
            s_i = s_i.add(&Polynomial::term(
                &params,
                Rat::one(),
                &[(&r_name(j), 1), (&x_name(p, q), 1)],
            ))?;
        }
        let u_i = linear_series(&vars, &params, order, &[("z", s_i)]);
        nb_factors.push(TruncatedSeries::neg_binomial(
            &Polynomial::var(&params, &a_name(i)),
            &u_i,
        )?);
        towers.push(nb_tower(&Polynomial::zero(&params), &u_i, order)?);
    }

    let rf: Vec<Vec<Polynomial>> = (1..=k)
        .map(|i| {
            let a = Polynomial::var(&params, &a_name(i));
            (0..=order).map(|d| rising_factorial(&a, d)).collect()
        })
        .collect();
    let mut matrix_sum = TruncatedSeries::zero(&vars, &params, order);
    for matrix in indices_up_to(pairs.len(), order) {
        let total: u32 = matrix.iter().sum();
        let mut coeff = x_monomial(&params, &pairs, &matrix);
        let mut factors = TruncatedSeries::monomial(
            &vars,
            &[total],
            Polynomial::one(&params),
            order,
        );
        for i in 1..=k {
            let n_i = color_sum(&pairs, &matrix, i) as usize;
            coeff = coeff.mul(&rf[i - 1][n_i])?;
            factors = factors.mul(&towers[i - 1][n_i])?;
        }
        matrix_sum = matrix_sum.add(&factors.scale(&coeff)?)?;
    }

    let mut body = matrix_sum;
    for nb in &nb_factors {
        body = body.mul(nb)?;
    }
    Ok((prefactor, body))
}

fn check_k(k: usize) -> Result<()> {
    if !(2..=9).contains(&k) {
        return Err(Error::InvalidStructure(format!(
            "the multilinear identity needs 2 <= k <= 9, got {k}"
        )));
    }
    Ok(())
}

fn pair_list(k: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            pairs.push((i, j));
        }
    }
    pairs
}

/// `prod_e x_e^{n_e} / n_e!` for a block-size matrix.
fn x_monomial(
    params: &Arc<ParamSet>,
    pairs: &[(usize, usize)],
    matrix: &[u32],
) -> Polynomial {
    let names: Vec<String> = pairs.iter().map(|&(i, j)| x_name(i, j)).collect();
    let exps: Vec<(&str, u32)> = names
        .iter()
        .zip(matrix.iter())
        .map(|(n, &e)| (n.as_str(), e))
        .collect();
    Polynomial::term(params, inv_factorials(matrix), &exps)
}

/// `n_i = sum of matrix entries whose pair contains i`.
fn color_sum(pairs: &[(usize, usize)], matrix: &[u32], i: usize) -> u32 {
    pairs
        .iter()
        .zip(matrix.iter())
        .filter(|(&(p, q), _)| p == i || q == i)
        .map(|(_, &e)| e)
        .sum()
}
