//! Rotation blocks `S̄_i S̄_{i+1}`, their Chebyshev power formula and orders,
//! the Lie elements `L_{r,s}`, and the alternative-density hypotheses.
//!
//! `N_i` needs `√[3]_q`, which is rarely rational, so the exact pipeline works
//! with `L_{i,i+1} = √[3]_q N_i` and divides by `[3]_q` where `N²` appears:
//! `S̄_{i,i+1} = I + (2√q/[2]²) L + (1-c) L²/[3]`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hecke_twin::{check_index, RepContext};
use crate::linalg::{span_dimension, Matrix};
use crate::report::Report;
use crate::scalars::{approx_eq, Complex64, Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChebyshevKind {
    First,
    Second,
}

/// Coefficients (low degree first) of `T_k` or `U_k`.
pub fn chebyshev(kind: ChebyshevKind, k: usize) -> Vec<BigInt> {
    let mut prev = vec![BigInt::one()];
    let mut cur = match kind {
        ChebyshevKind::First => vec![BigInt::zero(), BigInt::one()],
        ChebyshevKind::Second => vec![BigInt::zero(), BigInt::from(2)],
    };
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (d, c) in cur.iter().enumerate() {
            next[d + 1] += c * 2;
        }
        for (d, c) in prev.iter().enumerate() {
            next[d] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `T_k(x)` and `U_k(x)` by the three-term recurrence.
pub fn chebyshev_eval<F: Field>(kind: ChebyshevKind, k: usize, x: &F) -> F {
    let two_x = F::from_i64(2) * x;
    let mut prev = F::one();
    let mut cur = match kind {
        ChebyshevKind::First => x.clone(),
        ChebyshevKind::Second => two_x.clone(),
    };
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = two_x.clone() * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Smallest `k ≤ k_max` with `U_{k-1}(c) = 0` and `T_k(c) = 1`.
///
/// Rational `c = p/d` runs the integer recurrences for `d^k T_k` and `d^k U_k`.
/// At `c = ±1` the sine vanishes, the `U` term drops out of the power formula,
/// and the order is 1 or 2 directly.
pub fn chebyshev_order(c: &Scalar, k_max: usize, tol: f64) -> Option<usize> {
    match c {
        Scalar::Exact(c) => {
            if c.is_one() {
                return (k_max >= 1).then_some(1);
            }
            if (-c.clone()).is_one() {
                return (k_max >= 2).then_some(2);
            }
            let (p, d) = (c.numer().clone(), c.denom().clone());
            let d2 = &d * &d;
            let two_p = &p * BigInt::from(2);
            // k = 1: T_1 = c, U_0 = 1 never vanishes
            let (mut t_prev, mut t_cur) = (BigInt::one(), p.clone());
            let (mut u_prev, mut u_cur) = (BigInt::one(), two_p.clone());
            let mut d_pow = d.clone();
            for k in 2..=k_max {
                let t_next = &two_p * &t_cur - &d2 * &t_prev;
                t_prev = std::mem::replace(&mut t_cur, t_next);
                d_pow *= &d;
                // u_cur holds d^{k-1} U_{k-1}
                if u_cur.is_zero() && t_cur == d_pow {
                    return Some(k);
                }
                let u_next = &two_p * &u_cur - &d2 * &u_prev;
                u_prev = std::mem::replace(&mut u_cur, u_next);
            }
            None
        }
        Scalar::Approx(c) => {
            let two_c = 2.0 * c;
            let one = Complex64::new(1.0, 0.0);
            if approx_eq(*c, one, tol) {
                return (k_max >= 1).then_some(1);
            }
            if approx_eq(*c, -one, tol) {
                return (k_max >= 2).then_some(2);
            }
            let (mut t_prev, mut t_cur) = (one, *c);
            let (mut u_prev, mut u_cur) = (one, two_c);
            for k in 2..=k_max {
                let t_next = two_c * t_cur - t_prev;
                t_prev = std::mem::replace(&mut t_cur, t_next);
                let scale = (k as f64).max(1.0);
                if u_cur.norm() <= tol * scale && approx_eq(t_cur, one, tol * scale) {
                    return Some(k);
                }
                let u_next = two_c * u_cur - u_prev;
                u_prev = std::mem::replace(&mut u_cur, u_next);
            }
            None
        }
    }
}

/// Smallest `k ≤ k_max` with `m^k = I`, by repeated multiplication in doubles.
pub fn power_order(m: &Matrix<Complex64>, k_max: usize, tol: f64) -> Option<usize> {
    let id = Matrix::identity(m.rows());
    let mut acc = m.clone();
    for k in 1..=k_max {
        if acc.close(&id, tol) {
            return Some(k);
        }
        acc = acc.mul(m);
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderVerdict {
    Finite(usize),
    NoOrderUpTo(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub block: usize,
    pub verdict: OrderVerdict,
    pub power_order: Option<usize>,
    pub chebyshev_order: Option<usize>,
    /// The power check and the Chebyshev criterion reached the same answer.
    pub agree: bool,
    pub cos_alpha: Scalar,
}

fn order_report(block: usize, m: &Matrix<Complex64>, cos_alpha: Scalar, k_max: usize, tol: f64) -> OrderReport {
    let power = power_order(m, k_max, tol);
    let cheb = chebyshev_order(&cos_alpha, k_max, tol);
    let verdict = match power {
        Some(k) => OrderVerdict::Finite(k),
        None => OrderVerdict::NoOrderUpTo(k_max),
    };
    if power != cheb {
        log::warn!("block {block}: power check {power:?} disagrees with Chebyshev criterion {cheb:?}");
    }
    OrderReport { block, verdict, power_order: power, chebyshev_order: cheb, agree: power == cheb, cos_alpha }
}

/// `c = -[2]_{q²}/[2]_q² = cos α` for the rotation `S̄_i S̄_{i+1}`.
pub fn rotation_cosine<F: Field>(rc: &RepContext<F>) -> F {
    let two = rc.ctx().q_int(2);
    -(rc.ctx().q_int_sq(2) / (two.clone() * &two))
}

/// `z = 2√(q[3])/[2]²`, when `√[3]` lies in the field.
pub fn rotation_sine<F: Field>(rc: &RepContext<F>) -> Option<F> {
    let two = rc.ctx().q_int(2);
    let root3 = rc.ctx().q_int(3).sqrt()?;
    Some(F::from_i64(2) * rc.sqrt_q() * &root3 / (two.clone() * &two))
}

/// `z² + c² = 1` with `z²` formed without square roots.
pub fn sine_cosine_identity<F: Field>(rc: &RepContext<F>) -> (F, F) {
    let two = rc.ctx().q_int(2);
    let two4 = two.clone() * &two * &two * &two;
    let z_sq = F::from_i64(4) * rc.q() * &rc.ctx().q_int(3) / two4;
    let c = rotation_cosine(rc);
    (z_sq + &(c.clone() * &c), F::one())
}

/// The `3x3` block `[[0,-q,√q],[q,0,-1],[-√q,1,0]]` embedded at rows `i..i+2`.
pub fn build_l_base<F: Field>(i: usize, rc: &RepContext<F>) -> Result<Matrix<F>> {
    check_index(i, 1, rc.n().saturating_sub(2))?;
    let q = rc.q().clone();
    let s = rc.sqrt_q().clone();
    let (zero, one) = (F::zero(), F::one());
    let block = Matrix::from_rows(vec![
        vec![zero.clone(), -q.clone(), s.clone()],
        vec![q, zero.clone(), -one.clone()],
        vec![-s, one, zero],
    ])?;
    Ok(Matrix::embed_block(rc.n(), i - 1, &block, false))
}

/// `N_i = L_{i,i+1}/√[3]_q`; needs `√[3]_q` in the field.
pub fn build_n<F: Field>(i: usize, rc: &RepContext<F>) -> Result<Matrix<F>> {
    let three = rc.ctx().q_int(3);
    if three.is_negligible(rc.tol()) {
        return Err(Error::Domain("[3]_q = 0: N is undefined".into()));
    }
    let root = three
        .sqrt()
        .ok_or_else(|| Error::Domain("sqrt([3]_q) is not in the field; use the scaled form".into()))?;
    Ok(build_l_base(i, rc)?.scale(&(F::one() / root)))
}

/// `S̄_i S̄_{i+1}`.
pub fn build_s_pair<F: Field>(i: usize, rc: &RepContext<F>) -> Result<Matrix<F>> {
    check_index(i, 1, rc.n().saturating_sub(2))?;
    Ok(rc.build_s(i)?.mul(&rc.build_s(i + 1)?))
}

/// The displayed rotation block `[[a, ab, b²], [b, -a², -ab], [0, b, -a]]`.
pub fn rotation_block_formula<F: Field>(rc: &RepContext<F>) -> Matrix<F> {
    let q = rc.q();
    let a = (F::one() - q) / (F::one() + q);
    let b = F::from_i64(2) * rc.sqrt_q() / (F::one() + q);
    let ab = a.clone() * &b;
    Matrix::from_rows(vec![
        vec![a.clone(), ab.clone(), b.clone() * &b],
        vec![b.clone(), -(a.clone() * &a), -ab],
        vec![F::zero(), b, -a],
    ])
    .expect("3x3")
}

/// `I + (2√q/[2]²) U_{k-1}(c) L + (1 - T_k(c)) L²/[3]`.
pub fn power_closed_form<F: Field>(i: usize, k: usize, rc: &RepContext<F>) -> Result<Matrix<F>> {
    let l = build_l_base(i, rc)?;
    let c = rotation_cosine(rc);
    let two = rc.ctx().q_int(2);
    let lin = F::from_i64(2) * rc.sqrt_q() / (two.clone() * &two) * &chebyshev_eval(ChebyshevKind::Second, k.saturating_sub(1), &c);
    let quad = (F::one() - chebyshev_eval(ChebyshevKind::First, k, &c)) / rc.ctx().q_int(3);
    let id = Matrix::identity(rc.n());
    id.try_add(&l.scale(&lin))?.try_add(&l.mul(&l).scale(&quad))
}

pub fn check_n<F: Field>(rc: &RepContext<F>) -> Result<Report> {
    let mut rep = Report::new();
    let tol = rc.tol();
    let three = rc.ctx().q_int(3);
    for i in 1..rc.n() - 1 {
        let l = build_l_base(i, rc)?;
        rep.matrices_equal(format!("L{i}^T = -L{i}"), &l.transpose(), &l.scale(&-F::one()), tol);
        // N³ = -N, scaled by [3]^{3/2}
        rep.matrices_equal(format!("L{i}^3 = -[3] L{i}"), &l.mul(&l).mul(&l), &l.scale(&-three.clone()), tol);
        if let Ok(n) = build_n(i, rc) {
            rep.matrices_equal(format!("N{i}^3 = -N{i}"), &n.mul(&n).mul(&n), &n.scale(&-F::one()), tol);
        }
    }
    Ok(rep)
}

pub fn rodrigues_check<F: Field>(rc: &RepContext<F>) -> Result<Report> {
    let mut rep = Report::new();
    let tol = rc.tol();
    let (lhs, rhs) = sine_cosine_identity(rc);
    rep.scalars_equal("z^2 + c^2 = 1", &lhs, &rhs, tol);
    let block = rotation_block_formula(rc);
    for i in 1..rc.n() - 1 {
        let s = build_s_pair(i, rc)?;
        rep.matrices_equal(format!("S{i}S{} middle block", i + 1), &s.submatrix(i - 1, i - 1, 3, 3), &block, tol);
        rep.scalars_equal(format!("det S{i}S{} = 1", i + 1), &s.determinant()?, &F::one(), tol);
        rep.matrices_equal(format!("S{i}S{} = I + zN + (1-c)N^2", i + 1), &s, &power_closed_form(i, 1, rc)?, tol);
        if let (Ok(n), Some(z)) = (build_n(i, rc), rotation_sine(rc)) {
            let c = rotation_cosine(rc);
            let rod = Matrix::identity(rc.n()).try_add(&n.scale(&z))?.try_add(&n.mul(&n).scale(&(F::one() - c)))?;
            rep.matrices_equal(format!("S{i}S{} = Rodrigues(N{i})", i + 1), &s, &rod, tol);
        }
    }
    Ok(rep)
}

pub fn power_formula_check<F: Field>(i: usize, k: usize, rc: &RepContext<F>) -> Result<Report> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut rep = Report::new();
    let s = build_s_pair(i, rc)?;
    rep.matrices_equal(format!("(S{i}S{})^{k} = Chebyshev form", i + 1), &s.powu(k as u32), &power_closed_form(i, k, rc)?, rc.tol());
    Ok(rep)
}

/// Order of `S̄_i S̄_{i+1}`: a power check on its active block, cross-checked
/// against the Chebyshev criterion at `c`.
pub fn finite_order_detect<F: Field>(i: usize, rc: &RepContext<F>, k_max: usize) -> Result<OrderReport> {
    let block = build_s_pair(i, rc)?.submatrix(i - 1, i - 1, 3, 3).to_complex();
    Ok(order_report(i, &block, rotation_cosine(rc).to_scalar(), k_max, rc.tol()))
}

/// `L_{r,s}` by the bracket recursion `L_{r,s+1} = [L_{r,s}, L_{s,s+1}]`.
pub fn build_l_recursive<F: Field>(r: usize, s: usize, rc: &RepContext<F>) -> Result<Matrix<F>> {
    check_l_indices(r, s, rc.n())?;
    let mut l = build_l_base(r, rc)?;
    for j in r + 1..s {
        l = l.commutator(&build_l_base(j, rc)?)?;
    }
    Ok(l)
}

fn check_l_indices(r: usize, s: usize, n: usize) -> Result<()> {
    if r < 1 || r >= s || s > n - 1 {
        return Err(Error::Index(format!("L_({r},{s}) needs 1 <= r < s <= {}", n - 1)));
    }
    Ok(())
}

/// Closed form of `L_{r,s}`, `t = s - r`:
/// `(-1)^t ( q^{3/2}[t-1] ē_{r,s-1} + q^t ē_{r,s} - √q[t] ē_{r,s+1}
///  - Σ_{i=1}^{t-2} q^{(i+1)/2} ē_{r+i,s-1} + Σ_{j=1}^{t} q^{(j-1)/2} ē_{r+j,s+1} )`.
///
/// The first coefficient is what the recursion produces for every `t ≥ 2`.
pub fn build_l_closed_form<F: Field>(r: usize, s: usize, rc: &RepContext<F>) -> Result<Matrix<F>> {
    check_l_indices(r, s, rc.n())?;
    let n = rc.n();
    let t = s - r;
    let hp = |k: usize| rc.ctx().half_pow(k as u32);
    let mut m: Matrix<F> = Matrix::zeros(n, n);
    let mut add = |i: usize, j: usize, c: F| {
        m[(i - 1, j - 1)] = m[(i - 1, j - 1)].clone() + &c;
        m[(j - 1, i - 1)] = m[(j - 1, i - 1)].clone() - &c;
    };
    if t >= 2 {
        add(r, s - 1, hp(3) * &rc.ctx().q_int(t as u32 - 1));
    }
    add(r, s, hp(2 * t));
    add(r, s + 1, -(hp(1) * &rc.ctx().q_int(t as u32)));
    for i in 1..t.saturating_sub(1) {
        add(r + i, s - 1, -hp(i + 1));
    }
    for j in 1..=t {
        add(r + j, s + 1, hp(j - 1));
    }
    Ok(if t % 2 == 1 { m.scale(&-F::one()) } else { m })
}

pub fn all_l<F: Field>(rc: &RepContext<F>) -> Result<Vec<((usize, usize), Matrix<F>)>> {
    let n = rc.n();
    let mut out = Vec::new();
    for s in 2..n {
        for r in 1..s {
            out.push(((r, s), build_l_recursive(r, s, rc)?));
        }
    }
    Ok(out)
}

pub fn check_l_forms<F: Field>(rc: &RepContext<F>) -> Result<Report> {
    let mut rep = Report::new();
    let tol = rc.tol();
    for ((r, s), l) in all_l(rc)? {
        rep.matrices_equal(format!("L({r},{s}) recursive = closed form"), &l, &build_l_closed_form(r, s, rc)?, tol);
        rep.matrices_equal(format!("L({r},{s}) antisymmetric"), &l.transpose(), &l.scale(&-F::one()), tol);
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub n: usize,
    pub span_dimension: usize,
    pub expected: usize,
    pub independent: bool,
    /// `[n-2]_q! ≠ 0`, the hypothesis under which independence is claimed.
    pub hypothesis_holds: bool,
    /// When dependent: the first `j ≤ n-2` with `[j]_q = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing_q_int: Option<usize>,
}

pub fn independence_test<F: Field>(rc: &RepContext<F>) -> Result<IndependenceReport> {
    let n = rc.n();
    let mats: Vec<Matrix<F>> = all_l(rc)?.into_iter().map(|(_, m)| m).collect();
    let dim = span_dimension(&mats, rc.tol())?;
    let expected = (n - 1) * (n - 2) / 2;
    let vanishing = (1..=n.saturating_sub(2)).find(|&j| rc.ctx().q_int(j as u32).is_negligible(rc.tol()));
    Ok(IndependenceReport {
        n,
        span_dimension: dim,
        expected,
        independent: dim == expected,
        hypothesis_holds: vanishing.is_none(),
        vanishing_q_int: vanishing,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AltDensityReport {
    pub n: usize,
    pub orders: Vec<OrderReport>,
    /// Every `D_i Δ_{i+1}` had no order up to `k_max`.
    pub hypothesis_holds: bool,
    pub checks: Report,
}

/// Orders of `D_i Δ_{i+1}` (`i = 1..n-2`) on `F` in the `u` basis.
///
/// The active block is `[[-a, -b], [b, -a]]` with `a = a_{i+1}`, a rotation with
/// `cos α = -a`; `a` is exact whenever `q` is, `b` is formed from `b²` in doubles.
pub fn alt_density_check<F: Field>(rc: &RepContext<F>, k_max: usize) -> Result<AltDensityReport> {
    let n = rc.n();
    let gs = rc.gram_schmidt()?;
    let tol = rc.tol();
    let mut checks = Report::new();
    let d1 = rc.s_action_on_v(1, &gs)?;
    let mut sign = Matrix::identity(n - 1);
    sign[(0, 0)] = -F::one();
    checks.matrices_equal("D_1 = Delta_1", &d1, &sign, tol);
    let mut orders = Vec::new();
    for i in 1..=n.saturating_sub(2) {
        let a = rc.a_coeff(i + 1);
        let b_sq = rc.b_coeff_sq(i + 1);
        checks.scalars_equal(format!("det of active block of D_{i}Delta_{} = 1", i + 1), &(a.clone() * &a + &b_sq), &F::one(), tol);
        let (ac, bc) = (a.to_complex(), b_sq.to_complex().sqrt());
        let block = Matrix::from_rows(vec![vec![-ac, -bc], vec![bc, -ac]])?;
        orders.push(order_report(i, &block, (-a).to_scalar(), k_max, tol));
    }
    if let Some(u) = gs.orthonormal() {
        for i in 1..=n.saturating_sub(2) {
            let mut d = Matrix::identity(n - 1);
            d[(i - 1, i - 1)] = -F::one();
            let prod = d.mul(&rc.s_action_on_u(i + 1, &u)?);
            let active = prod.submatrix(i - 1, i - 1, 2, 2);
            checks.scalars_equal(format!("det active block (u basis) {i}"), &active.determinant()?, &F::one(), tol);
            let mut outside = prod.clone();
            for r in 0..2 {
                for c in 0..2 {
                    outside[(i - 1 + r, i - 1 + c)] = if r == c { F::one() } else { F::zero() };
                }
            }
            checks.matrices_equal(format!("D_{i}Delta_{} is identity off (i,i+1)", i + 1), &outside, &Matrix::identity(n - 1), tol);
        }
    }
    let hypothesis_holds = orders.iter().all(|o| o.verdict == OrderVerdict::NoOrderUpTo(k_max));
    Ok(AltDensityReport { n, orders, hypothesis_holds, checks })
}

/// The dependence relation as printed in the remark at `[j]_q = 0`; its indices
/// look garbled, so this only reports the residual's magnitude.
pub fn printed_dependence_residual<F: Field>(j: usize, rc: &RepContext<F>) -> Result<f64> {
    let l1 = build_l_recursive(1, j + 1, rc)?;
    let l2 = build_l_recursive(2, j + 1, rc)?;
    let pair = l1.try_add(&l2)?;
    let mut acc = l1;
    for i in 1..j {
        acc = acc.try_add(&pair.scale(&rc.ctx().half_pow((j - i) as u32)))?;
    }
    Ok(acc.max_abs())
}
