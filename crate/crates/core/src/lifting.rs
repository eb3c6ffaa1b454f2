//! Operators `S: Lip0(M) -> Lip0(N)` and their liftings along the De Leeuw
//! embeddings.
//!
//! A lifting is a matrix `L` with rows indexed by the pairs of `N` and
//! columns by the pairs of `M` such that `L * Phi_M(f) = Phi_N(S f)` for every
//! `f`. Row `(p, q)` is a finitely supported measure on the pairs of `M`
//! whose image under the adjoint of `Phi_M` is `S^*(m_pq)`. Choosing each row
//! as a minimum-ℓ¹ molecular representation of `S^*(m_pq)` makes the
//! largest row ℓ¹ norm, which is the norm of `L` on sup-normed functions,
//! equal to `||S||`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::free_space::FreeVector;
use crate::lipschitz::{apply_de_leeuw, same_space, LipschitzFunction, PointMap, SpaceRef};
use crate::lp::LpOptions;
use crate::matrix::Matrix;
use crate::metric_space::PairSet;
use crate::scalar::{self, Scalar};

/// A linear map on value vectors: `(S f)(p) = sum_z A[p][z] f(z)`, rows over
/// the non-base points of the codomain, columns over those of the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LipOperator<S> {
    domain: SpaceRef<S>,
    codomain: SpaceRef<S>,
    matrix: Matrix<S>,
}

impl<S: Scalar> LipOperator<S> {
    pub fn new(domain: SpaceRef<S>, codomain: SpaceRef<S>, matrix: Matrix<S>) -> Result<Self> {
        if matrix.rows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim(),
                got: matrix.rows(),
            });
        }
        if matrix.cols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: matrix.cols(),
            });
        }
        Ok(Self {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(space: SpaceRef<S>) -> Self {
        let matrix = Matrix::identity(space.dim());
        Self {
            domain: space.clone(),
            codomain: space,
            matrix,
        }
    }

    pub fn zero(domain: SpaceRef<S>, codomain: SpaceRef<S>) -> Self {
        let matrix = Matrix::zeros(codomain.dim(), domain.dim());
        Self {
            domain,
            codomain,
            matrix,
        }
    }

    /// Entries uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        domain: SpaceRef<S>,
        codomain: SpaceRef<S>,
    ) -> Self {
        let mut matrix = Matrix::zeros(codomain.dim(), domain.dim());
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                matrix[(i, j)] = S::sample(rng, -1.0, 1.0);
            }
        }
        Self {
            domain,
            codomain,
            matrix,
        }
    }

    /// `f -> r * (f o gamma)` for `gamma` mapping the codomain into the domain.
    pub fn composition(gamma: &PointMap<S>, r: &S) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let codomain = gamma.source().clone();
        let domain = gamma.target().clone();
        let mut matrix = Matrix::zeros(codomain.dim(), domain.dim());
        for p in codomain.non_base_points() {
            let row = codomain.coord(p).expect("non-base point");
            if let Some(col) = domain.coord(gamma.image(p)) {
                matrix[(row, col)] = r.clone();
            }
        }
        Ok(Self {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn domain(&self) -> &SpaceRef<S> {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceRef<S> {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.scale(c),
        }
    }

    pub fn apply(&self, f: &LipschitzFunction<S>) -> Result<LipschitzFunction<S>> {
        if !same_space(&self.domain, f.space()) {
            return Err(Error::SpaceMismatch);
        }
        LipschitzFunction::new(self.codomain.clone(), self.matrix.mul_vec(f.values()))
    }

    /// Value of row `p` of the matrix; the base row is identically zero.
    fn row_or_zero(&self, p: usize, col: usize) -> S {
        match self.codomain.coord(p) {
            Some(row) => self.matrix[(row, col)].clone(),
            None => S::zero(),
        }
    }

    /// `S^*(m_pq)`, the functional `f -> ((S f)(p) - (S f)(q)) / d_N(p, q)`.
    pub fn adjoint_molecule(&self, p: usize, q: usize) -> Result<FreeVector<S>> {
        let n = self.codomain.len();
        if p >= n {
            return Err(Error::PointOutOfRange(p));
        }
        if q >= n {
            return Err(Error::PointOutOfRange(q));
        }
        if p == q {
            return Err(Error::EqualPoints(p));
        }
        let d = self.codomain.d(p, q).clone();
        let coeffs = (0..self.domain.dim())
            .map(|z| (self.row_or_zero(p, z) - self.row_or_zero(q, z)) / d.clone())
            .collect();
        FreeVector::new(self.domain.clone(), coeffs)
    }

    pub fn operator_norm(&self) -> Result<S> {
        Ok(self.operator_norm_certificate()?.norm)
    }

    /// `||S|| = max over pairs (p, q) of N of ||S^*(m_pq)||_F`. A one-point
    /// codomain has no pairs and norm zero.
    pub fn operator_norm_certificate(&self) -> Result<NormCertificate<S>> {
        let mut best = NormCertificate {
            norm: S::zero(),
            pair: None,
            witness: LipschitzFunction::zero(self.domain.clone()),
        };
        for (p, q) in self.codomain.pair_set().iter() {
            let fnorm = self.adjoint_molecule(p, q)?.free_norm_with_witness()?;
            if best.pair.is_none() || fnorm.value > best.norm {
                best = NormCertificate {
                    norm: fnorm.value,
                    pair: Some((p, q)),
                    witness: fnorm.witness,
                };
            }
        }
        Ok(best)
    }
}

/// The operator norm together with the pair and unit-ball function that
/// attain it: `lip_norm(S witness) >= |(S witness)(p) - (S witness)(q)| / d(p, q) = norm`.
#[derive(Clone, Debug)]
pub struct NormCertificate<S> {
    pub norm: S,
    pub pair: Option<(usize, usize)>,
    pub witness: LipschitzFunction<S>,
}

/// A matrix from functions on the pairs of `M` to functions on the pairs of `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingMatrix<S> {
    row_pairs: PairSet,
    col_pairs: PairSet,
    matrix: Matrix<S>,
    row_norms: Vec<S>,
}

impl<S: Scalar> LiftingMatrix<S> {
    /// `matrix` must be `|N~| x |M~|`.
    pub fn new(domain: &SpaceRef<S>, codomain: &SpaceRef<S>, matrix: Matrix<S>) -> Result<Self> {
        let row_pairs = codomain.pair_set();
        let col_pairs = domain.pair_set();
        if matrix.rows() != row_pairs.len() {
            return Err(Error::DimensionMismatch {
                expected: row_pairs.len(),
                got: matrix.rows(),
            });
        }
        if matrix.cols() != col_pairs.len() {
            return Err(Error::DimensionMismatch {
                expected: col_pairs.len(),
                got: matrix.cols(),
            });
        }
        let row_norms = matrix.iter_rows().map(scalar::l1_norm).collect();
        Ok(Self {
            row_pairs,
            col_pairs,
            matrix,
            row_norms,
        })
    }

    pub fn zero(domain: &SpaceRef<S>, codomain: &SpaceRef<S>) -> Self {
        let m = Matrix::zeros(codomain.pair_set().len(), domain.pair_set().len());
        Self::new(domain, codomain, m).expect("shape matches by construction")
    }

    pub fn row_pairs(&self) -> &PairSet {
        &self.row_pairs
    }

    pub fn col_pairs(&self) -> &PairSet {
        &self.col_pairs
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn row_norms(&self) -> &[S] {
        &self.row_norms
    }

    /// The measure `g(p, q)` on the pairs of `M`.
    pub fn row(&self, p: usize, q: usize) -> Option<&[S]> {
        self.row_pairs.index(p, q).map(|i| self.matrix.row(i))
    }

    /// Largest row ℓ¹ norm, i.e. the operator norm for sup norms.
    pub fn norm(&self) -> S {
        self.row_norms
            .iter()
            .fold(S::zero(), |acc, v| S::max_of(acc, v.clone()))
    }

    pub fn apply(&self, values: &[S]) -> Result<Vec<S>> {
        if values.len() != self.matrix.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.cols(),
                got: values.len(),
            });
        }
        Ok(self.matrix.mul_vec(values))
    }

    /// Diagnostic only; nothing here depends on invertibility.
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Copy with row `(p, q)` multiplied by `c`.
    pub fn with_scaled_row(&self, p: usize, q: usize, c: &S) -> Option<Self> {
        let i = self.row_pairs.index(p, q)?;
        let mut out = self.clone();
        for v in out.matrix.row_mut(i) {
            *v = v.clone() * c.clone();
        }
        out.row_norms[i] = scalar::l1_norm(out.matrix.row(i));
        Some(out)
    }
}

pub fn lifting_norm<S: Scalar>(lifting: &LiftingMatrix<S>) -> S {
    lifting.norm()
}

/// Row `(p, q)` of the minimal lifting: a minimum-ℓ¹ representation of
/// `S^*(m_pq)` by molecules of the domain.
pub fn lifting_row<S: Scalar>(
    op: &LipOperator<S>,
    p: usize,
    q: usize,
    opts: &LpOptions,
) -> Result<Vec<S>> {
    let target = op.adjoint_molecule(p, q)?;
    Ok(target.optimal_representation_with(opts)?.coeffs)
}

/// Builds a lifting with `||L|| <= ||S|| + epsilon`. Each row is an exact
/// minimizer, so in fact `||L|| = ||S||`; `epsilon` only widens what callers
/// may accept.
pub fn build_lifting<S: Scalar>(op: &LipOperator<S>, epsilon: &S) -> Result<LiftingMatrix<S>> {
    build_lifting_with(op, epsilon, &LpOptions::default())
}

pub fn build_lifting_with<S: Scalar>(
    op: &LipOperator<S>,
    epsilon: &S,
    opts: &LpOptions,
) -> Result<LiftingMatrix<S>> {
    if epsilon.is_negative() {
        return Err(Error::NegativeEpsilon);
    }
    let rows = op
        .codomain
        .pair_set()
        .iter()
        .map(|(p, q)| lifting_row(op, p, q, opts))
        .collect::<Result<Vec<_>>>()?;
    assemble_lifting(op, rows)
}

/// Stacks precomputed rows (in pair order of the codomain) into a lifting.
pub fn assemble_lifting<S: Scalar>(
    op: &LipOperator<S>,
    rows: Vec<Vec<S>>,
) -> Result<LiftingMatrix<S>> {
    let cols = op.domain.pair_set().len();
    let nrows = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            got: bad.len(),
        });
    }
    let matrix = Matrix::from_flat(nrows, cols, rows.into_iter().flatten().collect())
        .expect("row lengths checked");
    LiftingMatrix::new(&op.domain, &op.codomain, matrix)
}

/// Result of checking `L * Phi_M(e_z) = Phi_N(S e_z)` on the coordinate basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Commutation<S> {
    /// Largest entrywise deviation over all basis functions and pairs.
    pub residual: S,
    /// `sum_z d(z, 0)`: for `lip_norm(f) <= 1`, `|f(z)| <= d(z, 0)`, so the
    /// deviation for any such `f` is at most `residual * basis_bound`.
    pub basis_bound: S,
}

pub fn verify_commutation<S: Scalar>(
    op: &LipOperator<S>,
    lifting: &LiftingMatrix<S>,
) -> Result<Commutation<S>> {
    let rows = op.codomain.pair_set().len();
    let cols = op.domain.pair_set().len();
    if lifting.matrix.rows() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: lifting.matrix.rows(),
        });
    }
    if lifting.matrix.cols() != cols {
        return Err(Error::DimensionMismatch {
            expected: cols,
            got: lifting.matrix.cols(),
        });
    }
    let mut residual = S::zero();
    let mut basis_bound = S::zero();
    for z in op.domain.non_base_points() {
        basis_bound = basis_bound + op.domain.d(z, op.domain.base()).clone();
        let e = LipschitzFunction::basis(op.domain.clone(), z)?;
        let lifted = lifting.matrix.mul_vec(&apply_de_leeuw(&e));
        let direct = apply_de_leeuw(&op.apply(&e)?);
        for (a, b) in lifted.into_iter().zip(direct) {
            residual = S::max_of(residual, (a - b).abs());
        }
    }
    Ok(Commutation {
        residual,
        basis_bound,
    })
}

/// The explicit lifting of `f -> r * (f o gamma)`: row `(x, y)` has the single
/// entry `r * d_M(gamma x, gamma y) / d_N(x, y)` in column
/// `(gamma x, gamma y)`, or is zero when `gamma x = gamma y`.
pub fn composition_lifting<S: Scalar>(gamma: &PointMap<S>, r: &S) -> Result<LiftingMatrix<S>> {
    if r.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let n_space = gamma.source();
    let m_space = gamma.target();
    let rows = n_space.pair_set();
    let cols = m_space.pair_set();
    let mut matrix = Matrix::zeros(rows.len(), cols.len());
    for (i, (x, y)) in rows.iter().enumerate() {
        let (gx, gy) = (gamma.image(x), gamma.image(y));
        if let Some(j) = cols.index(gx, gy) {
            matrix[(i, j)] = r.clone() * m_space.d(gx, gy).clone() / n_space.d(x, y).clone();
        }
    }
    LiftingMatrix::new(m_space, n_space, matrix)
}

/// Largest `|r| d_M(gamma x, gamma y) / d_N(x, y)` over the pairs of the source.
pub fn composition_norm_bound<S: Scalar>(gamma: &PointMap<S>, r: &S) -> S {
    let n_space = gamma.source();
    let m_space = gamma.target();
    n_space.pair_set().iter().fold(S::zero(), |acc, (x, y)| {
        let v =
            r.abs() * m_space.d(gamma.image(x), gamma.image(y)).clone() / n_space.d(x, y).clone();
        S::max_of(acc, v)
    })
}

/// Samples pairs `(x, y)`, `(p, q)` of the codomain and `f` in the unit ball of
/// `Lip0(M)`, and returns the largest value of
///
/// ```text
/// |<S^*(m_xy) - S^*(m_pq), f>|
///   - ||S|| / d(x,y) * (d(x,p) + d(y,q))
///   - ||S|| / (d(x,y) d(p,q)) * (d(p,0) + d(q,0)) * |d(p,q) - d(x,y)|
/// ```
///
/// which the estimate guarantees is `<= 0`. The first trial uses
/// `(x, y) = (p, q)`. Returns zero when there are no pairs or no trials.
pub fn continuity_modulus_check<S: Scalar>(
    op: &LipOperator<S>,
    trials: usize,
    seed: u64,
) -> Result<S> {
    let pairs = op.codomain.pair_set();
    if pairs.is_empty() || trials == 0 {
        return Ok(S::zero());
    }
    let norm = op.operator_norm()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = &op.codomain;
    let base = n.base();
    let mut worst: Option<S> = None;
    for t in 0..trials {
        let (x, y) = pairs.get(rng.gen_range(0..pairs.len()));
        let (p, q) = if t == 0 {
            (x, y)
        } else {
            pairs.get(rng.gen_range(0..pairs.len()))
        };
        let f = LipschitzFunction::random_unit_ball(&mut rng, op.domain.clone());
        let lhs =
            op.adjoint_molecule(x, y)?.pairing(&f)? - op.adjoint_molecule(p, q)?.pairing(&f)?;
        let dxy = n.d(x, y).clone();
        let dpq = n.d(p, q).clone();
        let first = norm.clone() / dxy.clone() * (n.d(x, p).clone() + n.d(y, q).clone());
        let second = norm.clone() / (dxy.clone() * dpq.clone())
            * (n.d(p, base).clone() + n.d(q, base).clone())
            * (dpq - dxy).abs();
        let violation = lhs.abs() - first - second;
        worst = Some(match worst {
            None => violation,
            Some(w) => S::max_of(w, violation),
        });
    }
    Ok(worst.unwrap_or_else(S::zero))
}
