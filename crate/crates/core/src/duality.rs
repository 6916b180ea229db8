//! Commutants, enveloping algebras and the double-centralizer comparison on
//! `E^{⊗r}` (partial Brauer diagrams) and `F^{⊗r}` (Brauer diagrams).

use serde::Serialize;

use crate::diagrams::{enumerate, Family};
use crate::error::{Error, Result};
use crate::hecke_twin::RepContext;
use crate::linalg::{span_dimension, Matrix};
use crate::report::Report;
use crate::scalars::{is_q_admissible, Field, Scalar};
use crate::tensor_action::{Space, TensorContext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Commutant {
    pub dimension: usize,
    /// Unknowns left after restricting by the diagonal generators.
    pub unknowns: usize,
    pub equations: usize,
}

/// `{X : XG = GX for every G}`.
///
/// Generators that are diagonal are used first: `X_{ab}` must vanish unless
/// `a` and `b` carry the same diagonal entries. The remaining generators give
/// sparse equations `(GX − XG)_{ab} = 0` in the surviving unknowns.
pub fn commutant_dimension<F: Field>(gens: &[Matrix<F>], tol: f64) -> Result<Commutant> {
    let Some(first) = gens.first() else {
        return Err(Error::Domain("commutant of an empty generator list".into()));
    };
    let m = first.rows();
    if gens.iter().any(|g| g.rows() != m || g.cols() != m) {
        return Err(Error::Dimension("generators must be square of one size".into()));
    }
    let (diag, rest): (Vec<&Matrix<F>>, Vec<&Matrix<F>>) = gens.iter().partition(|g| g.is_diagonal(tol));

    // class of each index under the joint diagonal entries
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0usize; m];
    for a in 0..m {
        let found = reps.iter().position(|&b| diag.iter().all(|g| g[(a, a)].close(&g[(b, b)], tol)));
        class[a] = found.unwrap_or_else(|| {
            reps.push(a);
            reps.len() - 1
        });
    }
    let mut column = vec![usize::MAX; m * m];
    let mut unknowns = 0;
    for a in 0..m {
        for b in 0..m {
            if class[a] == class[b] {
                column[a * m + b] = unknowns;
                unknowns += 1;
            }
        }
    }

    let mut rows = Vec::new();
    for g in rest {
        let by_row: Vec<Vec<(usize, F)>> =
            (0..m).map(|a| (0..m).filter(|&c| !g[(a, c)].is_zero()).map(|c| (c, g[(a, c)].clone())).collect()).collect();
        let by_col: Vec<Vec<(usize, F)>> =
            (0..m).map(|b| (0..m).filter(|&c| !g[(c, b)].is_zero()).map(|c| (c, g[(c, b)].clone())).collect()).collect();
        for a in 0..m {
            for b in 0..m {
                let mut acc: std::collections::BTreeMap<usize, F> = std::collections::BTreeMap::new();
                for (c, x) in &by_row[a] {
                    let col = column[c * m + b];
                    if col != usize::MAX {
                        let e = acc.entry(col).or_insert_with(F::zero);
                        *e = e.clone() + x;
                    }
                }
                for (c, x) in &by_col[b] {
                    let col = column[a * m + c];
                    if col != usize::MAX {
                        let e = acc.entry(col).or_insert_with(F::zero);
                        *e = e.clone() - x.clone();
                    }
                }
                let row: Vec<(usize, F)> = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let equations = rows.len();
    let dimension = if unknowns == 0 {
        0
    } else if rows.is_empty() {
        unknowns
    } else {
        F::sparse_nullspace(rows, unknowns, tol).dimension
    };
    Ok(Commutant { dimension, unknowns, equations })
}

/// Single-factor basis diagonalizing every odd `S̄_i` (they act on disjoint
/// coordinate pairs): `(1, √q)` for `+1` and `(√q, −1)` for `−1` on each pair.
fn odd_eigenbasis<F: Field>(rc: &RepContext<F>) -> Matrix<F> {
    let n = rc.n();
    let s = rc.sqrt_q().clone();
    let norm = if F::EXACT { F::one() } else { F::one() / (F::one() + rc.q()).sqrt().unwrap_or_else(F::one) };
    let mut p = Matrix::identity(n);
    for i in (0..n - 1).step_by(2) {
        p[(i, i)] = norm.clone();
        p[(i + 1, i)] = s.clone() * &norm;
        p[(i, i + 1)] = s.clone() * &norm;
        p[(i + 1, i + 1)] = -norm.clone();
    }
    p
}

/// Commutant of the diagonal twin action.
///
/// On `E` the generators are first conjugated into [`odd_eigenbasis`], which
/// makes the odd ones diagonal and cuts the unknowns by roughly a factor of four.
pub fn twin_commutant<F: Field>(tc: &TensorContext<F>) -> Result<Commutant> {
    let rc = tc.rc();
    let tol = rc.tol();
    let gens = match tc.space() {
        Space::E => {
            let p = odd_eigenbasis(rc);
            let p_inv = p.inverse(tol).ok_or_else(|| Error::Domain("eigenbasis is singular (q = -1?)".into()))?;
            rc.s_generators()
                .iter()
                .map(|s| p_inv.mul(s).mul(&p).kron_power(tc.r()))
                .collect::<Vec<_>>()
        }
        Space::F => tc.group_generators()?,
    };
    commutant_dimension(&gens, tol)
}

/// Matrices commuting with both lists.
pub fn center_dimension<F: Field>(algebra_basis: &[Matrix<F>], group_generators: &[Matrix<F>], tol: f64) -> Result<usize> {
    let all: Vec<Matrix<F>> = algebra_basis.iter().chain(group_generators).cloned().collect();
    Ok(commutant_dimension(&all, tol)?.dimension)
}

fn partitions(k: usize, max_part: usize, out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
    if k == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=k.min(max_part)).rev() {
        prefix.push(part);
        partitions(k - part, part, out, prefix);
        prefix.pop();
    }
}

pub fn partitions_of(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    partitions(k, k, &mut out, &mut Vec::new());
    out
}

/// `λ′₁ + λ′₂`: the number of rows of length ≥ 1 plus those of length ≥ 2.
fn first_two_columns(lambda: &[usize]) -> usize {
    lambda.iter().filter(|&&x| x >= 1).count() + lambda.iter().filter(|&&x| x >= 2).count()
}

/// Partitions of `0..=r` with `λ′₁ + λ′₂ ≤ n − 1`.
pub fn lambda_count(n: usize, r: usize) -> usize {
    (0..=r).flat_map(partitions_of).filter(|l| first_two_columns(l) < n).count()
}

/// Partitions of `r, r−2, …` with `λ′₁ + λ′₂ ≤ n − 1`: the `O(n−1)` summands of `F^{⊗r}`.
pub fn brauer_lambda_count(n: usize, r: usize) -> usize {
    (0..=r).rev().step_by(2).flat_map(partitions_of).filter(|l| first_two_columns(l) < n).count()
}

/// Row-echelon span accumulator used for enveloping algebras.
struct SpanBuilder<F: Field> {
    rows: Vec<(usize, Vec<F>)>,
    tol: f64,
}

impl<F: Field> SpanBuilder<F> {
    fn new(tol: f64) -> Self {
        SpanBuilder { rows: Vec::new(), tol }
    }

    fn insert(&mut self, mut v: Vec<F>) -> bool {
        let scale = v.iter().map(Field::magnitude).fold(0.0, f64::max);
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.clone() - c.clone() * y;
                }
            }
        }
        let (pivot, mag) = v.iter().enumerate().map(|(i, x)| (i, x.magnitude())).fold((0, 0.0), |b, c| if c.1 > b.1 { c } else { b });
        let independent = if F::EXACT { mag > 0.0 || v.iter().any(|x| !x.is_zero()) } else { mag > self.tol * scale.max(1.0) };
        if !independent {
            return false;
        }
        let pivot = if F::EXACT { v.iter().position(|x| !x.is_zero()).unwrap_or(pivot) } else { pivot };
        let inv = F::one() / v[pivot].clone();
        let v = v.into_iter().map(|x| x * &inv).collect();
        self.rows.push((pivot, v));
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Envelope {
    pub dimension: usize,
    /// A word length added nothing new, so the span is closed under products.
    pub saturated: bool,
    pub max_length: usize,
}

/// Span of all words in the generators, grown one length at a time.
pub fn enveloping_dimension<F: Field>(gens: &[Matrix<F>], max_length: usize, tol: f64) -> Result<Envelope> {
    let Some(first) = gens.first() else {
        return Err(Error::Domain("enveloping algebra of no generators".into()));
    };
    let m = first.rows();
    let mut span = SpanBuilder::new(tol);
    let id = Matrix::<F>::identity(m);
    span.insert(id.entries().to_vec());
    let mut frontier = vec![id];
    for length in 1..=max_length {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = g.try_mul(x)?;
                if span.insert(y.entries().to_vec()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            return Ok(Envelope { dimension: span.len(), saturated: true, max_length: length });
        }
        frontier = next;
    }
    Ok(Envelope { dimension: span.len(), saturated: false, max_length })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReverseCheck {
    pub dim_algebra_commutant: usize,
    pub dim_group_envelope: usize,
    pub saturated: bool,
    pub word_length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub space: &'static str,
    pub mode: &'static str,
    pub n: usize,
    pub r: usize,
    pub q: Scalar,
    pub delta_prime: Scalar,
    pub dim_commutant: usize,
    pub dim_diagram_image: usize,
    pub dim_pb_abstract: usize,
    pub faithful: bool,
    /// The theorem's threshold: `n > r` on `E`, `n − 1 ≥ 2r` on `F`.
    pub faithful_predicted: bool,
    pub double_centralizer_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverse: Option<ReverseCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverse_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_dim: Option<usize>,
    pub lambda_count: usize,
    pub checks: Report,
}

impl DualityReport {
    pub fn pass(&self) -> bool {
        self.checks.all_pass()
    }
}

#[derive(Clone, Debug)]
pub struct DualityOptions<F: Field> {
    pub delta_prime: F,
    pub center: bool,
    /// Run the reverse direction only when `m² ≤ reverse_limit`.
    pub reverse_limit: usize,
    pub max_word_length: usize,
    pub force: bool,
}

impl<F: Field> Default for DualityOptions<F> {
    fn default() -> Self {
        DualityOptions { delta_prime: F::one(), center: false, reverse_limit: 1024, max_word_length: 12, force: false }
    }
}

/// Refuses inadmissible `q` (decided on `q_spec`, the value as the user gave it).
pub fn gate(q_spec: &Scalar, n: usize, tol: f64, force: bool) -> Result<()> {
    let adm = is_q_admissible(q_spec, n as u32, tol);
    match adm.failure() {
        Some(why) if !force => Err(Error::Inadmissible(why)),
        Some(why) => {
            log::warn!("running at inadmissible q ({why}) because of --force");
            Ok(())
        }
        None => Ok(()),
    }
}

pub fn schur_weyl_check<F: Field>(rc: &RepContext<F>, r: usize, q_spec: &Scalar, opts: &DualityOptions<F>) -> Result<DualityReport> {
    gate(q_spec, rc.n(), rc.tol(), opts.force)?;
    run_duality(TensorContext::new(rc.clone(), r)?, q_spec, opts)
}

/// The same pipeline on `F^{⊗r}` with Brauer diagrams and `δ = n − 1`.
pub fn brauer_duality_check<F: Field>(rc: &RepContext<F>, r: usize, q_spec: &Scalar, opts: &DualityOptions<F>) -> Result<DualityReport> {
    gate(q_spec, rc.n(), rc.tol(), opts.force)?;
    run_duality(TensorContext::on_f(rc.clone(), r)?, q_spec, opts)
}

fn run_duality<F: Field>(tc: TensorContext<F>, q_spec: &Scalar, opts: &DualityOptions<F>) -> Result<DualityReport> {
    let dp = &opts.delta_prime;
    if dp.is_zero() {
        return Err(Error::Domain("δ' must be nonzero".into()));
    }
    let (n, r, tol) = (tc.rc().n(), tc.r(), tc.rc().tol());
    let space = tc.space();
    let family = if space == Space::E { Family::All } else { Family::Brauer };
    let mut checks = Report::new();

    let group = tc.group_generators()?;
    let mut algebra = tc.algebra_generators(dp)?;
    if algebra.is_empty() {
        // B_1 is spanned by the identity
        algebra.push(Matrix::identity(tc.size()));
    }
    let commute = algebra.iter().all(|a| group.iter().all(|g| a.commutator(g).is_ok_and(|c| c.is_zero_within(tol))));
    checks.flag("diagram generators commute with the twin action", commute);

    let commutant = twin_commutant(&tc)?;
    let diagrams = enumerate(r, family);
    let images = diagrams.iter().map(|d| tc.diagram_to_matrix(d, dp)).collect::<Result<Vec<_>>>()?;
    let dim_image = span_dimension(&images, tol)?;
    let dim_pb = diagrams.len();
    checks.flag_with(
        "dim commutant = dim diagram image",
        commutant.dimension == dim_image,
        format!("{} vs {}", commutant.dimension, dim_image),
    );
    checks.flag("dim diagram image <= number of diagrams", dim_image <= dim_pb);

    let faithful = dim_image == dim_pb;
    let faithful_predicted = match space {
        Space::E => n > r,
        Space::F => n > 2 * r,
    };
    let rule = if space == Space::E { "faithful iff n > r" } else { "faithful iff n - 1 >= 2r" };
    checks.flag_with(rule, faithful == faithful_predicted, format!("image {dim_image} of {dim_pb}"));

    let m = tc.size();
    let (reverse, reverse_skipped) = if m * m <= opts.reverse_limit {
        let alg = commutant_dimension(&algebra, tol)?.dimension;
        let env = enveloping_dimension(&group, opts.max_word_length, tol)?;
        checks.flag_with(
            "dim commutant of diagram algebra = dim twin envelope",
            alg == env.dimension,
            format!("{} vs {}", alg, env.dimension),
        );
        if !env.saturated {
            checks.flag_with("word-length saturation", false, format!("cutoff {} reached", env.max_length));
        }
        let rc = ReverseCheck { dim_algebra_commutant: alg, dim_group_envelope: env.dimension, saturated: env.saturated, word_length: env.max_length };
        (Some(rc), None)
    } else {
        (None, Some(format!("{m}² unknowns exceed the limit {}", opts.reverse_limit)))
    };
    let double_centralizer_ok = commutant.dimension == dim_image && reverse.as_ref().is_none_or(|x| x.dim_algebra_commutant == x.dim_group_envelope);

    let lambda = match space {
        Space::E => lambda_count(n, r),
        Space::F => brauer_lambda_count(n, r),
    };
    let center_dim = if opts.center {
        let c = center_dimension(&algebra, &group, tol)?;
        checks.flag_with("center dimension = lambda count", c == lambda, format!("{c} vs {lambda}"));
        Some(c)
    } else {
        None
    };

    Ok(DualityReport {
        space: if space == Space::E { "E" } else { "F" },
        mode: if F::EXACT { "exact" } else { "approx" },
        n,
        r,
        q: q_spec.clone(),
        delta_prime: dp.to_scalar(),
        dim_commutant: commutant.dimension,
        dim_diagram_image: dim_image,
        dim_pb_abstract: dim_pb,
        faithful,
        faithful_predicted,
        double_centralizer_ok,
        reverse,
        reverse_skipped,
        center_dim,
        lambda_count: lambda,
        checks,
    })
}
