//! Burau matrices of the Hecke algebra, the twin-group reflections `S̄_i`,
//! the splitting `E = L ⊕ F`, and the orthogonal bases of `F`.
//!
//! Bases: `e` is the standard basis with `⟨e_i, e_j⟩ = δ_ij q^{j-1}`; `e′_i =
//! q^{-(i-1)/2} e_i` is orthonormal. Coordinates convert by `x′ = D x` with
//! `D = diag(√q^{i-1})`. Vectors below are in `e′` coordinates unless named
//! otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::report::Report;
use crate::scalars::{Field, QContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    E,
    EPrime,
    U,
}

impl BasisTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisTag::E => "e",
            BasisTag::EPrime => "e_prime",
            BasisTag::U => "u",
        }
    }
}

/// Bilinear (not sesquilinear) pairing of coordinate vectors in an orthonormal basis.
pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc + &(x.clone() * y))
}

fn axpy<F: Field>(alpha: &F, x: &[F], y: &[F]) -> Vec<F> {
    x.iter().zip(y).map(|(a, b)| alpha.clone() * a + b).collect()
}

fn scaled<F: Field>(alpha: &F, x: &[F]) -> Vec<F> {
    x.iter().map(|a| alpha.clone() * a).collect()
}

/// `T̄_i` for general `(q₁, q₂)` in the `e` basis.
pub fn burau_t<F: Field>(n: usize, i: usize, q1: &F, q2: &F) -> Result<Matrix<F>> {
    check_index(i, 1, n - 1)?;
    let block = Matrix::from_rows(vec![
        vec![q1.clone() + q2, -q2.clone()],
        vec![q1.clone(), F::zero()],
    ])?;
    let mut t = Matrix::identity(n).scale(q1);
    for r in 0..2 {
        for c in 0..2 {
            t[(i - 1 + r, i - 1 + c)] = block[(r, c)].clone();
        }
    }
    Ok(t)
}

pub(crate) fn check_index(i: usize, lo: usize, hi: usize) -> Result<()> {
    if i < lo || i > hi {
        return Err(Error::Index(format!("index {i} outside {lo}..={hi}")));
    }
    Ok(())
}

/// Tridiagonal Gram matrix of `f_1..f_k`: `[2]_q` on the diagonal, `-√q` beside it.
pub fn gram_matrix_f_size<F: Field>(k: usize, ctx: &QContext<F>) -> Matrix<F> {
    let two = ctx.q_int(2);
    let off = -ctx.sqrt_q.clone();
    Matrix::from_fn(k, k, |r, c| {
        if r == c {
            two.clone()
        } else if r.abs_diff(c) == 1 {
            off.clone()
        } else {
            F::zero()
        }
    })
}

#[derive(Clone, Debug)]
pub struct RepContext<F: Field> {
    n: usize,
    ctx: QContext<F>,
    s_prime: Vec<Matrix<F>>,
}

impl<F: Field> RepContext<F> {
    pub fn new(n: usize, ctx: QContext<F>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("n = {n}: need n >= 2")));
        }
        let mut rc = RepContext { n, ctx, s_prime: Vec::new() };
        rc.s_prime = (1..n).map(|i| rc.s_block_matrix(i)).collect();
        Ok(rc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> &QContext<F> {
        &self.ctx
    }

    pub fn q(&self) -> &F {
        &self.ctx.q
    }

    pub fn sqrt_q(&self) -> &F {
        &self.ctx.sqrt_q
    }

    pub fn tol(&self) -> f64 {
        self.ctx.tol
    }

    pub fn q1(&self) -> F {
        F::one()
    }

    pub fn q2(&self) -> F {
        -self.ctx.q.clone()
    }

    fn qi(&self, k: usize) -> F {
        self.ctx.q_int(k as u32)
    }

    /// `T̄_i` in the `e` basis with `q₁ = 1`, `q₂ = -q`.
    pub fn build_burau_t(&self, i: usize) -> Result<Matrix<F>> {
        burau_t(self.n, i, &self.q1(), &self.q2())
    }

    fn s_block_matrix(&self, i: usize) -> Matrix<F> {
        let q = &self.ctx.q;
        let inv = F::one() / (F::one() + q);
        let a = (F::one() - q) * &inv;
        let b = F::from_i64(2) * &self.ctx.sqrt_q * &inv;
        let block = Matrix::from_rows(vec![vec![a.clone(), b.clone()], vec![b, -a]]).expect("2x2");
        Matrix::embed_block(self.n, i - 1, &block, true)
    }

    /// `S̄_i` in the orthonormal `e′` basis.
    pub fn build_s(&self, i: usize) -> Result<Matrix<F>> {
        check_index(i, 1, self.n - 1)?;
        Ok(self.s_prime[i - 1].clone())
    }

    pub fn s_generators(&self) -> &[Matrix<F>] {
        &self.s_prime
    }

    /// `S_i = (2T_i - (q₁+q₂)) / (q₁-q₂)` in the `e` basis.
    pub fn build_s_e(&self, i: usize) -> Result<Matrix<F>> {
        let t = self.build_burau_t(i)?;
        let (q1, q2) = (self.q1(), self.q2());
        let shift = Matrix::identity(self.n).scale(&(q1.clone() + &q2));
        Ok(t.scale(&F::from_i64(2)).try_sub(&shift)?.scale(&(F::one() / (q1 - q2))))
    }

    /// `D = diag(√q^{i-1})`, taking `e` coordinates to `e′` coordinates.
    pub fn basis_change(&self) -> Matrix<F> {
        Matrix::diagonal(&(0..self.n).map(|k| self.ctx.half_pow(k as u32)).collect::<Vec<_>>())
    }

    pub fn basis_change_inv(&self) -> Matrix<F> {
        let d: Vec<F> = (0..self.n).map(|k| F::one() / self.ctx.half_pow(k as u32)).collect();
        Matrix::diagonal(&d)
    }

    /// Gram matrix of the form: `J` in the `e` basis, identity otherwise.
    pub fn form_matrix(&self, basis: BasisTag) -> Matrix<F> {
        match basis {
            BasisTag::E => Matrix::diagonal(&(0..self.n).map(|k| self.ctx.q.powu(k as u32)).collect::<Vec<_>>()),
            BasisTag::EPrime | BasisTag::U => Matrix::identity(self.n),
        }
    }

    /// `ℓ₀ = e_1 + ... + e_n`.
    pub fn ell0(&self) -> Vec<F> {
        (0..self.n).map(|k| self.ctx.half_pow(k as u32)).collect()
    }

    /// `f_i = √q e′_i - e′_{i+1}`, proportional to `q e_i - e_{i+1}`.
    pub fn f_vector(&self, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.n];
        v[i - 1] = self.ctx.sqrt_q.clone();
        v[i] = -F::one();
        v
    }

    pub fn unit(&self, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.n];
        v[i - 1] = F::one();
        v
    }

    pub fn check_twin_relations(&self) -> Report {
        let mut rep = Report::new();
        let id = Matrix::identity(self.n);
        let tol = self.tol();
        for i in 1..self.n {
            let s = &self.s_prime[i - 1];
            rep.matrices_equal(format!("S{i}^2 = 1"), &s.mul(s), &id, tol);
            for j in i + 2..self.n {
                let t = &self.s_prime[j - 1];
                rep.matrices_equal(format!("S{i}S{j} = S{j}S{i}"), &s.mul(t), &t.mul(s), tol);
            }
        }
        rep
    }

    /// Hecke relations for `T̄`, the eigenvectors, orthogonality of `S̄`, and the splitting determinant.
    pub fn check_hecke(&self) -> Result<Report> {
        let mut rep = Report::new();
        let tol = self.tol();
        let n = self.n;
        let id: Matrix<F> = Matrix::identity(n);
        let (q1, q2) = (self.q1(), self.q2());
        let j = self.form_matrix(BasisTag::E);
        let d = self.basis_change();
        let d_inv = self.basis_change_inv();
        let ell_e = vec![F::one(); n];
        for i in 1..n {
            let t = self.build_burau_t(i)?;
            let a = t.try_sub(&id.scale(&q1))?;
            let b = t.try_sub(&id.scale(&q2))?;
            rep.is_zero(format!("(T{i}-q1)(T{i}-q2) = 0"), &a.mul(&b), tol);
            if i + 1 < n {
                let u = self.build_burau_t(i + 1)?;
                rep.matrices_equal(format!("T{i}T{}T{i} = T{}T{i}T{}", i + 1, i + 1, i + 1), &t.mul(&u).mul(&t), &u.mul(&t).mul(&u), tol);
            }
            for k in i + 2..n {
                let u = self.build_burau_t(k)?;
                rep.matrices_equal(format!("T{i}T{k} = T{k}T{i}"), &t.mul(&u), &u.mul(&t), tol);
            }
            // eigenvectors, as kernel checks
            for k in 1..=n {
                if k == i || k == i + 1 {
                    continue;
                }
                let e_k: Vec<F> = (0..n).map(|r| if r + 1 == k { F::one() } else { F::zero() }).collect();
                rep.vectors_equal(format!("(T{i}-q1) e{k} = 0"), &a.apply(&e_k)?, &vec![F::zero(); n], tol);
            }
            let mut sum = vec![F::zero(); n];
            sum[i - 1] = F::one();
            sum[i] = F::one();
            rep.vectors_equal(format!("(T{i}-q1)(e{i}+e{}) = 0", i + 1), &a.apply(&sum)?, &vec![F::zero(); n], tol);
            let mut fe = vec![F::zero(); n];
            fe[i - 1] = self.q().clone();
            fe[i] = -F::one();
            rep.vectors_equal(format!("(T{i}-q2)(q e{i} - e{}) = 0", i + 1), &b.apply(&fe)?, &vec![F::zero(); n], tol);
            rep.vectors_equal(format!("(T{i}-q1) l0 = 0"), &a.apply(&ell_e)?, &vec![F::zero(); n], tol);

            let s_e = self.build_s_e(i)?;
            let s = &self.s_prime[i - 1];
            rep.matrices_equal(format!("S{i}^T J S{i} = J"), &s_e.transpose().mul(&j).mul(&s_e), &j, tol);
            rep.matrices_equal(format!("S'{i}^T S'{i} = I"), &s.transpose().mul(s), &id, tol);
            rep.matrices_equal(format!("S'{i} = D S{i} D^-1"), s, &d.mul(&s_e).mul(&d_inv), tol);
        }
        rep.scalars_equal("det[qe_1-e_2, ..., l0] = [n]_q", &self.splitting_determinant()?, &self.qi(n), tol);
        Ok(rep)
    }

    /// Determinant of the matrix with columns `q e_i - e_{i+1}` (i < n) and `ℓ₀`, in `e` coordinates.
    pub fn splitting_determinant(&self) -> Result<F> {
        let n = self.n;
        let mut cols: Vec<Vec<F>> = (1..n)
            .map(|i| {
                let mut v = vec![F::zero(); n];
                v[i - 1] = self.q().clone();
                v[i] = -F::one();
                v
            })
            .collect();
        cols.push(vec![F::one(); n]);
        Matrix::from_columns(&cols)?.determinant()
    }

    pub fn braid_deviation(&self, i: usize) -> Result<Matrix<F>> {
        check_index(i, 1, self.n.saturating_sub(2))?;
        let (a, b) = (&self.s_prime[i - 1], &self.s_prime[i]);
        a.mul(b).mul(a).try_sub(&b.mul(a).mul(b))
    }

    /// `-(1-q)²/(1+q)²`.
    pub fn braid_deviation_coefficient(&self) -> F {
        let q = self.q();
        let num = (F::one() - q) * &(F::one() - q);
        let den = (F::one() + q) * &(F::one() + q);
        -(num / den)
    }

    pub fn check_braid_deviation(&self) -> Result<Report> {
        let mut rep = Report::new();
        let c = self.braid_deviation_coefficient();
        for i in 1..self.n - 1 {
            let lhs = self.braid_deviation(i)?;
            let rhs = self.s_prime[i - 1].try_sub(&self.s_prime[i])?.scale(&c);
            rep.matrices_equal(format!("S{i}S{}S{i} - S{}S{i}S{} = c (S{i} - S{})", i + 1, i + 1, i + 1, i + 1), &lhs, &rhs, self.tol());
        }
        Ok(rep)
    }

    /// Orthogonal projection onto `L`, `P_ij = q^{(i+j-2)/2} / [n]_q`.
    pub fn projection_matrix(&self) -> Result<Matrix<F>> {
        let qn = self.qi(self.n);
        if qn.is_negligible(self.tol()) {
            return Err(Error::Domain(format!("[{}]_q = 0: L is not a complement of F", self.n)));
        }
        let inv = F::one() / qn;
        Ok(Matrix::from_fn(self.n, self.n, |r, c| self.ctx.half_pow((r + c) as u32) * &inv))
    }

    pub fn check_projection(&self) -> Result<Report> {
        let mut rep = Report::new();
        let tol = self.tol();
        let p = self.projection_matrix()?;
        rep.matrices_equal("P^2 = P", &p.mul(&p), &p, tol);
        rep.scalars_equal("tr P = 1", &p.trace(), &F::one(), tol);
        for (k, s) in self.s_prime.iter().enumerate() {
            rep.is_zero(format!("[P, S{}] = 0", k + 1), &p.commutator(s)?, tol);
        }
        let ell = self.ell0();
        let qn = self.qi(self.n);
        for j in 1..=self.n {
            let coeff = self.ctx.half_pow(j as u32 - 1) / &qn;
            rep.vectors_equal(format!("P e'{j} = c l0"), &p.apply(&self.unit(j))?, &scaled(&coeff, &ell), tol);
        }
        Ok(rep)
    }

    /// Gram matrix `A_{n-1}` of `f_1..f_{n-1}`.
    pub fn gram_matrix_f(&self) -> Matrix<F> {
        gram_matrix_f_size(self.n - 1, &self.ctx)
    }

    /// Orthogonal basis `v′_i` of `F` by the recurrence `v′_i = [i] f_i + √q v′_{i-1}`.
    pub fn gram_schmidt(&self) -> Result<GramSchmidt<F>> {
        for k in 1..=self.n {
            if self.qi(k).is_negligible(self.tol()) {
                return Err(Error::Domain(format!("[{k}]_q = 0: Gram-Schmidt breaks down")));
            }
        }
        let mut v_prime: Vec<Vec<F>> = Vec::with_capacity(self.n - 1);
        for i in 1..self.n {
            let f = scaled(&self.qi(i), &self.f_vector(i));
            let v = match v_prime.last() {
                Some(prev) => axpy(self.sqrt_q(), prev, &f),
                None => f,
            };
            v_prime.push(v);
        }
        let norms_sq = (1..self.n).map(|i| self.qi(i) * &self.qi(i + 1)).collect();
        Ok(GramSchmidt { v_prime, norms_sq })
    }

    /// `v′_i = Σ_j q^{(i-j)/2} [j] f_j`.
    pub fn v_prime_closed_form(&self, i: usize) -> Vec<F> {
        (1..=i).fold(vec![F::zero(); self.n], |acc, j| {
            let c = self.ctx.half_pow((i - j) as u32) * &self.qi(j);
            axpy(&c, &self.f_vector(j), &acc)
        })
    }

    /// `a_i = [2]_{q^i} / ([2] [i])`.
    pub fn a_coeff(&self, i: usize) -> F {
        let qi_pow = self.q().powu(i as u32);
        (F::one() + &qi_pow) / (self.qi(2) * &self.qi(i))
    }

    /// `a_i = [i]_{q²} / [i]²`.
    pub fn a_coeff_alt(&self, i: usize) -> F {
        self.ctx.q_int_sq(i as u32) / (self.qi(i) * &self.qi(i))
    }

    /// `b_i² = 4q [i+1][i-1] / ([2][i])²`, exact in any field.
    pub fn b_coeff_sq(&self, i: usize) -> F {
        let den = self.qi(2) * &self.qi(i);
        F::from_i64(4) * self.q() * &self.qi(i + 1) * &self.qi(i - 1) / (den.clone() * &den)
    }

    /// `b_i = 2√q √([i+1][i-1]) / ([2][i])`, when the root exists in the field.
    pub fn b_coeff(&self, i: usize) -> Option<F> {
        let root = (self.qi(i + 1) * &self.qi(i - 1)).sqrt()?;
        Some(F::from_i64(2) * self.sqrt_q() * &root / (self.qi(2) * &self.qi(i)))
    }

    /// Matrix of `S_i` on `F` in the orthogonal basis `v′`: `⟨v′_j, S v′_k⟩ / ⟨v′_j, v′_j⟩`.
    pub fn s_action_on_v(&self, i: usize, gs: &GramSchmidt<F>) -> Result<Matrix<F>> {
        let s = self.build_s(i)?;
        let images: Vec<Vec<F>> = gs.v_prime.iter().map(|v| s.apply(v)).collect::<Result<_>>()?;
        let m = self.n - 1;
        Ok(Matrix::from_fn(m, m, |j, k| dot(&gs.v_prime[j], &images[k]) / &gs.norms_sq[j]))
    }

    /// `Δ_i`: the matrix of `S_i` on `F` in the orthonormal basis `u`.
    pub fn s_action_on_u(&self, i: usize, u: &[Vec<F>]) -> Result<Matrix<F>> {
        let s = self.build_s(i)?;
        let images: Vec<Vec<F>> = u.iter().map(|v| s.apply(v)).collect::<Result<_>>()?;
        let m = self.n - 1;
        Ok(Matrix::from_fn(m, m, |j, k| dot(&u[j], &images[k])))
    }

    /// The displayed block form of `Δ_i`: `-1` at position 1 for `i = 1`, otherwise
    /// `[[a_i, b_i], [b_i, -a_i]]` on coordinates `(i-1, i)`.
    pub fn delta_formula(&self, i: usize) -> Option<Matrix<F>> {
        let m = self.n - 1;
        if i == 1 {
            let mut d = Matrix::identity(m);
            d[(0, 0)] = -F::one();
            return Some(d);
        }
        let (a, b) = (self.a_coeff(i), self.b_coeff(i)?);
        let block = Matrix::from_rows(vec![vec![a.clone(), b.clone()], vec![b, -a]]).ok()?;
        Some(Matrix::embed_block(m, i - 2, &block, true))
    }

    pub fn check_appendix(&self) -> Result<Report> {
        let mut rep = Report::new();
        let tol = self.tol();
        let n = self.n;
        for k in 1..n {
            let det = gram_matrix_f_size(k, &self.ctx).determinant()?;
            rep.scalars_equal(format!("det A_{k} = [{}]_q", k + 1), &det, &self.qi(k + 1), tol);
        }
        let a = self.gram_matrix_f();
        rep.flag("A symmetric", a.is_symmetric(tol));
        for i in 1..n {
            for j in 1..n {
                rep.scalars_equal(format!("<f{i},f{j}> = A_{i}{j}"), &dot(&self.f_vector(i), &self.f_vector(j)), &a[(i - 1, j - 1)], tol);
            }
        }
        let gs = self.gram_schmidt()?;
        rep.vectors_equal("v'_1 = f_1", &gs.v_prime[0], &self.f_vector(1), tol);
        for i in 1..n {
            let v = &gs.v_prime[i - 1];
            rep.vectors_equal(format!("v'_{i} recurrence = closed form"), v, &self.v_prime_closed_form(i), tol);
            rep.scalars_equal(format!("<v'_{i},v'_{i}> = [{i}][{}]", i + 1), &dot(v, v), &gs.norms_sq[i - 1], tol);
            // v_i = v′_i / [i]
            let vi = scaled(&(F::one() / self.qi(i)), v);
            rep.scalars_equal(format!("<v_{i},v_{i}> = [{}]/[{i}]", i + 1), &dot(&vi, &vi), &(self.qi(i + 1) / self.qi(i)), tol);
            for j in 1..n {
                let pair = dot(&self.f_vector(i), &gs.v_prime[j - 1]);
                if j != i && j + 1 != i {
                    rep.scalars_equal(format!("<f{i},v'_{j}> = 0"), &pair, &F::zero(), tol);
                } else if j + 1 == i {
                    let expected = -(self.sqrt_q().clone() * &self.qi(i - 1));
                    rep.scalars_equal(format!("<f{i},v'_{j}> = -sqrt(q)[{}]", i - 1), &pair, &expected, tol);
                }
                if j < i {
                    rep.scalars_equal(format!("<v'_{i},v'_{j}> = 0"), &dot(v, &gs.v_prime[j - 1]), &F::zero(), tol);
                }
            }
        }
        // action of S_i on F in the v′ basis: diagonal entries are a_i, off-diagonal products b_i²
        for i in 1..n {
            let dv = self.s_action_on_v(i, &gs)?;
            if i == 1 {
                rep.scalars_equal("Delta_1[1,1] = -1", &dv[(0, 0)], &-F::one(), tol);
            } else {
                let (r, c) = (i - 2, i - 1);
                rep.scalars_equal(format!("Delta_{i} diagonal = a_{i}"), &dv[(r, r)], &self.a_coeff(i), tol);
                rep.scalars_equal(format!("Delta_{i} diagonal' = -a_{i}"), &dv[(c, c)], &-self.a_coeff(i), tol);
                let prod = dv[(r, c)].clone() * &dv[(c, r)];
                rep.scalars_equal(format!("Delta_{i} off-diagonal product = b_{i}^2"), &prod, &self.b_coeff_sq(i), tol);
                rep.scalars_equal(format!("a_{i}^2 + b_{i}^2 = 1"), &(self.a_coeff(i) * &self.a_coeff(i) + &self.b_coeff_sq(i)), &F::one(), tol);
                rep.scalars_equal(format!("a_{i} = [{i}]_(q^2)/[{i}]^2"), &self.a_coeff(i), &self.a_coeff_alt(i), tol);
            }
            // outside the active block S_i fixes each v′_j
            let active = if i == 1 { vec![0] } else { vec![i - 2, i - 1] };
            let mut outside_ok = true;
            for r in 0..n - 1 {
                for c in 0..n - 1 {
                    if active.contains(&r) && active.contains(&c) {
                        continue;
                    }
                    let expected = if r == c { F::one() } else { F::zero() };
                    outside_ok &= dv[(r, c)].close(&expected, tol);
                }
            }
            rep.flag(format!("Delta_{i} is the identity off its block"), outside_ok);
        }
        // orthonormal u-basis, when the norms have square roots in the field
        if let Some(u) = gs.orthonormal() {
            let deltas: Vec<Matrix<F>> = (1..n).map(|i| self.s_action_on_u(i, &u)).collect::<Result<_>>()?;
            let id = Matrix::identity(n - 1);
            for (k, d) in deltas.iter().enumerate() {
                let i = k + 1;
                rep.matrices_equal(format!("Delta_{i}^T Delta_{i} = I"), &d.transpose().mul(d), &id, tol);
                rep.matrices_equal(format!("Delta_{i}^2 = I"), &d.mul(d), &id, tol);
                for (l, e) in deltas.iter().enumerate().skip(k + 2) {
                    rep.matrices_equal(format!("Delta_{i}Delta_{} = Delta_{}Delta_{i}", l + 1, l + 1), &d.mul(e), &e.mul(d), tol);
                }
                if let Some(f) = self.delta_formula(i) {
                    // the formula fixes b_i > 0; compare up to the sign of the off-diagonal pair
                    let matches = d.close(&f, tol) || {
                        let mut g = f.clone();
                        if i > 1 {
                            g[(i - 2, i - 1)] = -g[(i - 2, i - 1)].clone();
                            g[(i - 1, i - 2)] = -g[(i - 1, i - 2)].clone();
                        }
                        d.close(&g, tol)
                    };
                    rep.flag(format!("Delta_{i} matches block formula"), matches);
                }
            }
        }
        Ok(rep)
    }

    /// The reflection formula on all `e′_j` and `f_j`, the four `f`-basis formulas, and `S_i ℓ₀ = ℓ₀`.
    pub fn reflection_formula_check(&self, i: usize) -> Result<Report> {
        let s = self.build_s(i)?;
        let tol = self.tol();
        let mut rep = Report::new();
        let fi = self.f_vector(i);
        let ff = dot(&fi, &fi);
        rep.scalars_equal("<f_i,f_i> = 1+q", &ff, &(F::one() + self.q()), tol);
        let reflect = |v: &[F]| -> Vec<F> {
            let c = -(F::from_i64(2) * &dot(&fi, v) / &ff);
            axpy(&c, &fi, v)
        };
        for j in 1..=self.n {
            let v = self.unit(j);
            rep.vectors_equal(format!("S{i} e'{j} = reflection"), &s.apply(&v)?, &reflect(&v), tol);
        }
        let coeff = F::from_i64(2) * self.sqrt_q() / (F::one() + self.q());
        for j in 1..self.n {
            let fj = self.f_vector(j);
            let img = s.apply(&fj)?;
            rep.vectors_equal(format!("S{i} f{j} = reflection"), &img, &reflect(&fj), tol);
            let expected = if j == i {
                scaled(&-F::one(), &fj)
            } else if j + 1 == i || j == i + 1 {
                axpy(&coeff, &fi, &fj)
            } else {
                fj.clone()
            };
            rep.vectors_equal(format!("S{i} f{j} (itemized)"), &img, &expected, tol);
        }
        let ell = self.ell0();
        rep.vectors_equal(format!("S{i} l0 = l0"), &s.apply(&ell)?, &ell, tol);
        Ok(rep)
    }
}

/// The orthogonal basis `v′_1..v′_{n-1}` of `F` (in `e′` coordinates) and its squared norms.
#[derive(Clone, Debug)]
pub struct GramSchmidt<F: Field> {
    pub v_prime: Vec<Vec<F>>,
    pub norms_sq: Vec<F>,
}

impl<F: Field> GramSchmidt<F> {
    /// `u_i = v′_i / √([i][i+1])`; `None` if a root leaves the field.
    pub fn orthonormal(&self) -> Option<Vec<Vec<F>>> {
        self.v_prime
            .iter()
            .zip(&self.norms_sq)
            .map(|(v, n2)| {
                let inv = F::one() / n2.sqrt()?;
                Some(scaled(&inv, v))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rational, Complex64, Rational, DEFAULT_TOL};

    fn exact(n: usize, s: i64) -> RepContext<Rational> {
        RepContext::new(n, QContext::exact(rational(s, 1)).unwrap()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn burau_block_at_q_one() {
        let rc = exact(2, 1);
        let t = rc.build_burau_t(1).unwrap();
        assert_eq!(t, Matrix::from_rows(vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]).unwrap());
        assert!(rc.build_burau_t(2).is_err());
    }

    #[test]
    fn s_block_at_q_one_is_a_swap() {
        let rc = exact(3, 1);
        let s = rc.build_s(2).unwrap();
        assert_eq!(s[(1, 2)], r(1, 1));
        assert_eq!(s[(2, 1)], r(1, 1));
        assert_eq!(s[(1, 1)], r(0, 1));
        assert_eq!(s[(0, 0)], r(1, 1));
    }

    #[test]
    fn form_matrix_e_basis() {
        // q = 2 has no rational square root
        let rc = RepContext::new(3, QContext::approx(Complex64::new(2.0, 0.0), DEFAULT_TOL).unwrap()).unwrap();
        let j = rc.form_matrix(BasisTag::E);
        let expected = Matrix::diagonal(&[1.0, 2.0, 4.0].map(|x| Complex64::new(x, 0.0)));
        assert!(j.close(&expected, 1e-12));
    }

    #[test]
    fn relation_suites_at_q_four() {
        for n in 3..=6 {
            let rc = exact(n, 2);
            for rep in [rc.check_twin_relations(), rc.check_hecke().unwrap(), rc.check_braid_deviation().unwrap(), rc.check_projection().unwrap(), rc.check_appendix().unwrap()] {
                let bad: Vec<_> = rep.failures().map(|c| c.relation.clone()).collect();
                assert!(bad.is_empty(), "n={n}: {bad:?}");
            }
        }
    }

    #[test]
    fn braid_deviation_examples() {
        let rc = exact(3, 1);
        assert!(rc.braid_deviation(1).unwrap().is_zero_within(0.0));
        let rc = exact(3, 2);
        let rhs = rc.build_s(1).unwrap().try_sub(&rc.build_s(2).unwrap()).unwrap().scale(&r(-9, 25));
        assert_eq!(rc.braid_deviation(1).unwrap(), rhs);
        let rc = exact(4, 3);
        let rhs = rc.build_s(2).unwrap().try_sub(&rc.build_s(3).unwrap()).unwrap().scale(&r(-64, 100));
        assert_eq!(rc.braid_deviation(2).unwrap(), rhs);
    }

    #[test]
    fn projection_at_q_one() {
        let rc = exact(2, 1);
        let half = r(1, 2);
        assert_eq!(rc.projection_matrix().unwrap(), Matrix::from_fn(2, 2, |_, _| half.clone()));
    }

    #[test]
    fn gram_f_at_q_one() {
        let rc = exact(3, 1);
        let a = rc.gram_matrix_f();
        assert_eq!(a, Matrix::from_rows(vec![vec![r(2, 1), r(-1, 1)], vec![r(-1, 1), r(2, 1)]]).unwrap());
        assert_eq!(a.determinant().unwrap(), r(3, 1));
    }

    #[test]
    fn gram_schmidt_at_q_one() {
        let rc = exact(3, 1);
        let gs = rc.gram_schmidt().unwrap();
        let expected: Vec<Rational> = rc.f_vector(2).iter().zip(rc.f_vector(1)).map(|(a, b)| a * r(2, 1) + b).collect();
        assert_eq!(gs.v_prime[1], expected);
        assert_eq!(dot(&gs.v_prime[1], &gs.v_prime[1]), r(6, 1));
    }

    #[test]
    fn a_b_at_q_one() {
        let rc = RepContext::new(4, QContext::approx(Complex64::new(1.0, 0.0), DEFAULT_TOL).unwrap()).unwrap();
        assert!((rc.a_coeff(2) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        let b = rc.b_coeff(2).unwrap();
        assert!((b - Complex64::new(3f64.sqrt() / 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn appendix_in_approx_mode() {
        for q in [4.0, 9.0, 0.25] {
            for n in 3..=6 {
                let rc = RepContext::new(n, QContext::approx(Complex64::new(q, 0.0), DEFAULT_TOL).unwrap()).unwrap();
                let rep = rc.check_appendix().unwrap();
                let bad: Vec<_> = rep.failures().map(|c| c.relation.clone()).collect();
                assert!(bad.is_empty(), "q={q} n={n}: {bad:?}");
                assert!(rep.checks.iter().any(|c| c.relation.contains("matches block formula")));
            }
        }
    }

    #[test]
    fn reflection_formulas() {
        let rc = exact(5, 2);
        for i in 1..5 {
            let rep = rc.reflection_formula_check(i).unwrap();
            assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn twin_relations_complex_q() {
        let rc = RepContext::new(4, QContext::approx(Complex64::new(2.0, 1.0), DEFAULT_TOL).unwrap()).unwrap();
        assert!(rc.check_twin_relations().all_pass());
        let rc = exact(5, 1);
        assert!(rc.check_twin_relations().all_pass());
    }
}
