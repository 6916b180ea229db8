//! The twin group acting diagonally on `E^{⊗r}` (or `F^{⊗r}`) and the commuting
//! action of partial Brauer diagrams.
//!
//! Everything is expressed in a split-compatible orthogonal basis `b_0, b_1, …`
//! of `E` (`b_0 ∝ ℓ₀`, the rest spanning `F`) whose Gram matrix `diag(g)` is
//! tracked explicitly. Approximate contexts normalize (`g = 1`); exact ones keep
//! the unnormalized Gram–Schmidt vectors so that no square roots are needed.
//! Tensor indices are lexicographic with slot 1 most significant; matrix rows
//! are top (output) indices and columns bottom (input) indices.

use crate::diagrams::{AlgebraElement, Gen, PartialDiagram, Vertex};
use crate::error::{Error, Result};
use crate::hecke_twin::{check_index, RepContext};
use crate::linalg::Matrix;
use crate::scalars::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// `E = L ⊕ F`, slot value 0 is the `L` direction.
    E,
    /// `F` alone; partial diagrams with singletons have no meaning here.
    F,
}

#[derive(Clone, Debug)]
pub struct TensorContext<F: Field> {
    rc: RepContext<F>,
    r: usize,
    space: Space,
    /// Basis vectors in `e′` coordinates.
    basis: Vec<Vec<F>>,
    gram: Vec<F>,
    /// The single-factor generators in this basis.
    factors: Vec<Matrix<F>>,
}

impl<F: Field> TensorContext<F> {
    pub fn new(rc: RepContext<F>, r: usize) -> Result<Self> {
        Self::build(rc, r, Space::E)
    }

    pub fn on_f(rc: RepContext<F>, r: usize) -> Result<Self> {
        Self::build(rc, r, Space::F)
    }

    fn build(rc: RepContext<F>, r: usize, space: Space) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("tensor power r must be at least 1".into()));
        }
        let n = rc.n();
        let gs = rc.gram_schmidt()?;
        let n_int = rc.ctx().q_int(n as u32);
        let mut basis = Vec::with_capacity(n);
        let mut gram = Vec::with_capacity(n);
        if space == Space::E {
            basis.push(rc.ell0());
            gram.push(n_int);
        }
        basis.extend(gs.v_prime.iter().cloned());
        gram.extend(gs.norms_sq.iter().cloned());
        if !F::EXACT {
            for (b, g) in basis.iter_mut().zip(gram.iter_mut()) {
                let s = g.sqrt().ok_or_else(|| Error::Domain("norm without a square root".into()))?;
                for x in b.iter_mut() {
                    *x = x.clone() / &s;
                }
                *g = F::one();
            }
        }
        Self::from_basis(rc, r, space, basis, gram)
    }

    fn from_basis(rc: RepContext<F>, r: usize, space: Space, basis: Vec<Vec<F>>, gram: Vec<F>) -> Result<Self> {
        let mut tc = TensorContext { rc, r, space, basis, gram, factors: Vec::new() };
        tc.factors = (1..tc.rc.n()).map(|i| tc.restrict(&tc.rc.s_generators()[i - 1])).collect::<Result<_>>()?;
        Ok(tc)
    }

    /// Replaces the `F` part of the basis by `u′_j = Σ_k R_{kj} u_k`.
    ///
    /// The new vectors must again be orthogonal; their Gram entries are recomputed.
    pub fn with_f_rotation(&self, rot: &Matrix<F>) -> Result<Self> {
        let offset = usize::from(self.space == Space::E);
        let k = self.basis.len() - offset;
        if rot.rows() != k || rot.cols() != k {
            return Err(Error::Dimension(format!("rotation must be {k}x{k}")));
        }
        let n = self.rc.n();
        let mut basis: Vec<Vec<F>> = self.basis[..offset].to_vec();
        for j in 0..k {
            let v = (0..n)
                .map(|c| (0..k).fold(F::zero(), |acc, i| acc + &(rot[(i, j)].clone() * &self.basis[offset + i][c])))
                .collect();
            basis.push(v);
        }
        let tol = self.rc.tol();
        let mut gram = Vec::with_capacity(basis.len());
        for (a, u) in basis.iter().enumerate() {
            for (b, v) in basis.iter().enumerate() {
                let d = crate::hecke_twin::dot(u, v);
                if a == b {
                    gram.push(d);
                } else if !d.is_negligible(tol) {
                    return Err(Error::Domain("rotated basis is not orthogonal".into()));
                }
            }
        }
        Self::from_basis(self.rc.clone(), self.r, self.space, basis, gram)
    }

    pub fn rc(&self) -> &RepContext<F> {
        &self.rc
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn gram(&self) -> &[F] {
        &self.gram
    }

    /// Dimension of one tensor factor.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the tensor power.
    pub fn size(&self) -> usize {
        self.dim().pow(self.r as u32)
    }

    /// Coordinates in this basis of the image of an `e′`-basis operator preserving the span.
    fn restrict(&self, m: &Matrix<F>) -> Result<Matrix<F>> {
        let d = self.dim();
        let images: Vec<Vec<F>> = self.basis.iter().map(|b| m.apply(b)).collect::<Result<_>>()?;
        Ok(Matrix::from_fn(d, d, |j, k| crate::hecke_twin::dot(&self.basis[j], &images[k]) / &self.gram[j]))
    }

    /// `S̄_i` on one factor in this basis.
    pub fn factor_generator(&self, i: usize) -> Result<Matrix<F>> {
        check_index(i, 1, self.rc.n() - 1)?;
        Ok(self.factors[i - 1].clone())
    }

    /// `S̄_i ⊗ … ⊗ S̄_i`.
    pub fn diagonal_group_action(&self, i: usize) -> Result<Matrix<F>> {
        Ok(self.factor_generator(i)?.kron_power(self.r))
    }

    pub fn group_generators(&self) -> Result<Vec<Matrix<F>>> {
        (1..self.rc.n()).map(|i| self.diagonal_group_action(i)).collect()
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let d = self.dim();
        let mut out = vec![0; self.r];
        for slot in (0..self.r).rev() {
            out[slot] = idx % d;
            idx /= d;
        }
        out
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.dim() + x)
    }

    /// Place permutation of slots `i, i+1`.
    pub fn op_s(&self, i: usize) -> Result<Matrix<F>> {
        check_index(i, 1, self.r.saturating_sub(1))?;
        let m = self.size();
        let mut out = Matrix::zeros(m, m);
        for col in 0..m {
            let mut k = self.digits(col);
            k.swap(i - 1, i);
            out[(self.index(&k), col)] = F::one();
        }
        Ok(out)
    }

    /// Contract slots `i, i+1` with the form and insert `Σ_k u_k ⊗ u_k`.
    pub fn op_e(&self, i: usize) -> Result<Matrix<F>> {
        check_index(i, 1, self.r.saturating_sub(1))?;
        let (m, d) = (self.size(), self.dim());
        let mut out = Matrix::zeros(m, m);
        for col in 0..m {
            let kp = self.digits(col);
            if kp[i - 1] != kp[i] {
                continue;
            }
            let g_in = &self.gram[kp[i - 1]];
            for a in 0..d {
                let mut k = kp.clone();
                k[i - 1] = a;
                k[i] = a;
                out[(self.index(&k), col)] = g_in.clone() / &self.gram[a];
            }
        }
        Ok(out)
    }

    /// `δ′` times the orthogonal projection onto `u₀` in slot `j`.
    pub fn op_p(&self, j: usize, delta_prime: &F) -> Result<Matrix<F>> {
        self.require_l()?;
        check_index(j, 1, self.r)?;
        let m = self.size();
        let mut out = Matrix::zeros(m, m);
        for col in 0..m {
            if self.digits(col)[j - 1] == 0 {
                out[(col, col)] = delta_prime.clone();
            }
        }
        Ok(out)
    }

    fn require_l(&self) -> Result<()> {
        match self.space {
            Space::E => Ok(()),
            Space::F => Err(Error::Domain("singleton blocks need the L summand (use E, not F)".into())),
        }
    }

    /// The image of a diagram in `PB_r(n, δ′)`.
    ///
    /// Built at `δ′ = 1` block by block and rescaled by `δ′^{S/2}`, `S` the
    /// singleton count, so that `p_j ↦ δ′ π_j`.
    pub fn diagram_to_matrix(&self, d: &PartialDiagram, delta_prime: &F) -> Result<Matrix<F>> {
        if d.r() != self.r {
            return Err(Error::Dimension(format!("diagram has r = {}, tensor power is {}", d.r(), self.r)));
        }
        let singles = d.singleton_count();
        if singles > 0 {
            self.require_l()?;
        }
        enum Kind {
            Vertical(usize, usize),
            TopPair(usize, usize),
            BottomPair(usize, usize),
        }
        let mut free = Vec::new();
        let (mut top_single, mut bottom_single) = (Vec::new(), Vec::new());
        for block in d.blocks() {
            match block[..] {
                [Vertex::Top(a)] => top_single.push(a - 1),
                [Vertex::Bottom(a)] => bottom_single.push(a - 1),
                [Vertex::Top(a), Vertex::Bottom(b)] | [Vertex::Bottom(b), Vertex::Top(a)] => free.push(Kind::Vertical(a - 1, b - 1)),
                [Vertex::Top(a), Vertex::Top(b)] => free.push(Kind::TopPair(a - 1, b - 1)),
                [Vertex::Bottom(a), Vertex::Bottom(b)] => free.push(Kind::BottomPair(a - 1, b - 1)),
                _ => unreachable!("blocks have one or two vertices"),
            }
        }
        // u₀ = b₀/√g₀ on top, ⟨u₀, ·⟩ = √g₀ [k = 0] below; the counts differ by an even number
        let g0 = self.gram.first().cloned().unwrap_or_else(F::one);
        let shift = (bottom_single.len() as i64 - top_single.len() as i64) / 2;
        let mut scale = if shift >= 0 { g0.powu(shift as u32) } else { F::one() / g0.powu((-shift) as u32) };
        scale = scale * &delta_prime.powu((singles / 2) as u32);

        let (m, dim) = (self.size(), self.dim());
        let mut out = Matrix::zeros(m, m);
        let (mut top, mut bottom) = (vec![0usize; self.r], vec![0usize; self.r]);
        let mut choice = vec![0usize; free.len()];
        loop {
            let mut w = scale.clone();
            for (kind, &x) in free.iter().zip(&choice) {
                match *kind {
                    Kind::Vertical(a, b) => {
                        top[a] = x;
                        bottom[b] = x;
                    }
                    Kind::TopPair(a, b) => {
                        top[a] = x;
                        top[b] = x;
                        w = w / &self.gram[x];
                    }
                    Kind::BottomPair(a, b) => {
                        bottom[a] = x;
                        bottom[b] = x;
                        w = w * &self.gram[x];
                    }
                }
            }
            for &a in &top_single {
                top[a] = 0;
            }
            for &a in &bottom_single {
                bottom[a] = 0;
            }
            out[(self.index(&top), self.index(&bottom))] = w;
            // mixed-radix increment
            let mut pos = choice.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < dim {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }

    /// Linear extension of [`Self::diagram_to_matrix`].
    pub fn element_to_matrix(&self, x: &AlgebraElement<F>, delta_prime: &F) -> Result<Matrix<F>> {
        let m = self.size();
        let mut out = Matrix::zeros(m, m);
        for (d, c) in x.terms() {
            out = out.try_add(&self.diagram_to_matrix(d, delta_prime)?.scale(c))?;
        }
        Ok(out)
    }

    pub fn generator_matrix(&self, g: Gen, delta_prime: &F) -> Result<Matrix<F>> {
        match g {
            Gen::S(i) => self.op_s(i),
            Gen::E(i) => self.op_e(i),
            Gen::P(j) => self.op_p(j, delta_prime),
        }
    }

    /// All generator images: `s_i`, `e_i`, then `δ′ p_j` (the last only on `E`).
    pub fn algebra_generators(&self, delta_prime: &F) -> Result<Vec<Matrix<F>>> {
        let mut out = Vec::new();
        for i in 1..self.r {
            out.push(self.op_s(i)?);
            out.push(self.op_e(i)?);
        }
        if self.space == Space::E {
            for j in 1..=self.r {
                out.push(self.op_p(j, delta_prime)?);
            }
        }
        Ok(out)
    }

    /// `B^{⊗r} M (B⁺)^{⊗r}`: an operator in this basis rewritten in `e′` coordinates.
    pub fn to_e_prime(&self, m: &Matrix<F>) -> Result<Matrix<F>> {
        let b = Matrix::from_columns(&self.basis)?;
        let d = self.dim();
        let b_plus = Matrix::from_fn(d, self.rc.n(), |j, c| self.basis[j][c].clone() / &self.gram[j]);
        b.kron_power(self.r).try_mul(m)?.try_mul(&b_plus.kron_power(self.r))
    }
}
