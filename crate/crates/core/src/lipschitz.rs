//! Elements of `Lip0(M)` and the De Leeuw embedding.
//!
//! A function is stored by its values at the non-base points; the value at
//! the base point is zero and never stored. The De Leeuw embedding sends `f`
//! to its table of difference quotients `(f(x) - f(y)) / d(x, y)` over the
//! ordered off-diagonal pairs.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metric_space::{PairSet, PointedMetricSpace};
use crate::scalar::{self, Scalar};

/// Shared handle to a validated space.
pub type SpaceRef<S> = Arc<PointedMetricSpace<S>>;

pub(crate) fn same_space<S: Scalar>(a: &SpaceRef<S>, b: &SpaceRef<S>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzFunction<S> {
    space: SpaceRef<S>,
    values: Vec<S>,
}

impl<S: Scalar> LipschitzFunction<S> {
    /// `values` lists the non-base points in coordinate order.
    pub fn new(space: SpaceRef<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn zero(space: SpaceRef<S>) -> Self {
        let values = alloc::vec![S::zero(); space.dim()];
        Self { space, values }
    }

    /// The coordinate function `e_z`: 1 at the non-base point `z`, 0 elsewhere.
    pub fn basis(space: SpaceRef<S>, z: usize) -> Result<Self> {
        let c = space.coord(z).ok_or(Error::PointOutOfRange(z))?;
        let mut f = Self::zero(space);
        f.values[c] = S::one();
        Ok(f)
    }

    /// Values uniform in `[-1, 1]` at every non-base point.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, space: SpaceRef<S>) -> Self {
        let values = (0..space.dim())
            .map(|_| S::sample(rng, -1.0, 1.0))
            .collect();
        Self { space, values }
    }

    /// A random function rescaled so that its Lipschitz norm is at most 1.
    pub fn random_unit_ball<R: Rng + ?Sized>(rng: &mut R, space: SpaceRef<S>) -> Self {
        let f = Self::random(rng, space);
        let norm = f.lip_norm();
        if norm.is_zero() {
            return f;
        }
        // Shrink by a random radius in (0, 1] so interior points are sampled too.
        let radius = S::sample(rng, 0.0, 1.0);
        let radius = if radius.is_zero() { S::one() } else { radius };
        f.scale(&(radius / norm))
    }

    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn value_at(&self, point: usize) -> S {
        match self.space.coord(point) {
            Some(c) => self.values[c].clone(),
            None => S::zero(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: &S, other: &Self, b: &S) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a.clone() * x.clone() + b.clone() * y.clone())
            .collect();
        Ok(Self {
            space: self.space.clone(),
            values,
        })
    }

    /// `(f(x) - f(y)) / d(x, y)`; both norms and the embedding go through here.
    pub fn difference_quotient(&self, x: usize, y: usize) -> S {
        (self.value_at(x) - self.value_at(y)) / self.space.d(x, y).clone()
    }

    /// Best Lipschitz constant: the largest `|f(x) - f(y)| / d(x, y)`.
    pub fn lip_norm(&self) -> S {
        scalar::max_abs(&apply_de_leeuw(self))
    }
}

/// The difference-quotient table of `f`, indexed like
/// [`PointedMetricSpace::pair_set`].
pub fn apply_de_leeuw<S: Scalar>(f: &LipschitzFunction<S>) -> Vec<S> {
    f.space
        .pair_set()
        .iter()
        .map(|(x, y)| f.difference_quotient(x, y))
        .collect()
}

/// The De Leeuw embedding as an explicit `|M~| x (|M| - 1)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DeLeeuwMatrix<S> {
    space: SpaceRef<S>,
    pairs: PairSet,
    matrix: Matrix<S>,
}

impl<S: Scalar> DeLeeuwMatrix<S> {
    /// A one-point space yields a `0 x 0` matrix.
    pub fn new(space: SpaceRef<S>) -> Self {
        let pairs = space.pair_set();
        let mut matrix = Matrix::zeros(pairs.len(), space.dim());
        for (row, (x, y)) in pairs.iter().enumerate() {
            let w = S::one() / space.d(x, y).clone();
            if let Some(c) = space.coord(x) {
                matrix[(row, c)] = w.clone();
            }
            if let Some(c) = space.coord(y) {
                matrix[(row, c)] = -w;
            }
        }
        Self {
            space,
            pairs,
            matrix,
        }
    }

    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    /// Matrix-vector product. Agrees with [`apply_de_leeuw`] up to rounding in
    /// the float backend and exactly in the rational one.
    pub fn apply(&self, f: &LipschitzFunction<S>) -> Result<Vec<S>> {
        if !same_space(&self.space, &f.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.matrix.mul_vec(&f.values))
    }
}

/// A map `gamma: N -> M` between point sets sending base to base.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMap<S> {
    source: SpaceRef<S>,
    target: SpaceRef<S>,
    images: Vec<usize>,
}

impl<S: Scalar> PointMap<S> {
    pub fn new(source: SpaceRef<S>, target: SpaceRef<S>, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::MapLength {
                got: images.len(),
                expected: source.len(),
            });
        }
        if let Some(index) = images.iter().position(|&z| z >= target.len()) {
            return Err(Error::MapOutOfRange { index });
        }
        let base_image = images[source.base()];
        if base_image != target.base() {
            return Err(Error::BaseNotPreserved(base_image));
        }
        Ok(Self {
            source,
            target,
            images,
        })
    }

    pub fn identity(space: SpaceRef<S>) -> Self {
        let images = (0..space.len()).collect();
        Self {
            source: space.clone(),
            target: space,
            images,
        }
    }

    /// Everything goes to the base of `target`.
    pub fn to_base(source: SpaceRef<S>, target: SpaceRef<S>) -> Self {
        let images = alloc::vec![target.base(); source.len()];
        Self {
            source,
            target,
            images,
        }
    }

    /// A uniformly random bijection fixing the base; `None` if the sizes differ.
    pub fn random_bijection<R: Rng + ?Sized>(
        rng: &mut R,
        source: SpaceRef<S>,
        target: SpaceRef<S>,
    ) -> Option<Self> {
        use rand::seq::SliceRandom;
        if source.len() != target.len() {
            return None;
        }
        let mut free: Vec<usize> = target.non_base_points().collect();
        free.shuffle(rng);
        let mut rest = free.into_iter();
        let images = (0..source.len())
            .map(|p| {
                if p == source.base() {
                    target.base()
                } else {
                    rest.next().expect("sizes match")
                }
            })
            .collect();
        Some(Self {
            source,
            target,
            images,
        })
    }

    pub fn source(&self) -> &SpaceRef<S> {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef<S> {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, p: usize) -> usize {
        self.images[p]
    }
}

/// `p -> r * f(gamma(p))`, a function on the source of `gamma`.
pub fn composition_function_map<S: Scalar>(
    gamma: &PointMap<S>,
    r: &S,
    f: &LipschitzFunction<S>,
) -> Result<LipschitzFunction<S>> {
    if !same_space(&gamma.target, &f.space) {
        return Err(Error::SpaceMismatch);
    }
    if r.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let values = gamma
        .source
        .non_base_points()
        .map(|p| r.clone() * f.value_at(gamma.image(p)))
        .collect();
    LipschitzFunction::new(gamma.source.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::vec;

    fn two_point(d: f64) -> SpaceRef<f64> {
        Arc::new(PointedMetricSpace::line(&[0.0, d]).unwrap())
    }

    fn equilateral3() -> SpaceRef<Rational> {
        Arc::new(PointedMetricSpace::equilateral(3, Rational::from_ratio(1, 1)).unwrap())
    }

    fn q(n: i64) -> Rational {
        Rational::from_ratio(n, 1)
    }

    #[test]
    fn lip_norm_examples() {
        let f = LipschitzFunction::new(two_point(1.0), vec![1.0]).unwrap();
        assert_eq!(f.lip_norm(), 1.0);
        assert_eq!(LipschitzFunction::zero(equilateral3()).lip_norm(), q(0));
        let g = LipschitzFunction::new(equilateral3(), vec![q(1), q(-1)]).unwrap();
        assert_eq!(g.lip_norm(), q(2));
        let single = Arc::new(PointedMetricSpace::<f64>::singleton("0"));
        assert_eq!(LipschitzFunction::zero(single).lip_norm(), 0.0);
    }

    #[test]
    fn wrong_length_rejected() {
        assert_eq!(
            LipschitzFunction::new(two_point(1.0), vec![]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 1,
                got: 0
            }
        );
    }

    #[test]
    fn de_leeuw_matrices() {
        let m = DeLeeuwMatrix::new(two_point(1.0));
        assert_eq!(
            m.matrix(),
            &Matrix::from_rows(vec![vec![-1.0], vec![1.0]]).unwrap()
        );
        // pair order is (0, a), (a, 0): row (a, 0) is +1.
        assert_eq!(m.pairs().pairs(), &[(0, 1), (1, 0)]);

        let m = DeLeeuwMatrix::new(two_point(2.0));
        let row = m.pairs().index(1, 0).unwrap();
        assert_eq!(m.matrix().row(row), &[0.5]);

        let e = DeLeeuwMatrix::new(equilateral3());
        let row = e.pairs().index(1, 2).unwrap();
        assert_eq!(e.matrix().row(row), &[q(1), q(-1)]);

        let single = Arc::new(PointedMetricSpace::<f64>::singleton("0"));
        let m = DeLeeuwMatrix::new(single);
        assert_eq!((m.matrix().rows(), m.matrix().cols()), (0, 0));
    }

    #[test]
    fn apply_examples() {
        let space = two_point(1.0);
        let f = LipschitzFunction::new(space.clone(), vec![1.0]).unwrap();
        // pairs (0,a), (a,0)
        assert_eq!(apply_de_leeuw(&f), vec![-1.0, 1.0]);
        assert_eq!(
            apply_de_leeuw(&LipschitzFunction::zero(space)),
            vec![0.0, 0.0]
        );

        let s = equilateral3();
        let f = LipschitzFunction::new(s.clone(), vec![q(1), q(0)]).unwrap();
        let v = apply_de_leeuw(&f);
        let at = |x, y| v[s.pair_set().index(x, y).unwrap()].clone();
        assert_eq!((at(1, 0), at(0, 1)), (q(1), q(-1)));
        assert_eq!((at(1, 2), at(2, 1)), (q(1), q(-1)));
        assert_eq!((at(2, 0), at(0, 2)), (q(0), q(0)));
        assert_eq!(DeLeeuwMatrix::new(s).apply(&f).unwrap(), v);
    }

    #[test]
    fn apply_rejects_other_space() {
        let m = DeLeeuwMatrix::new(two_point(1.0));
        let f = LipschitzFunction::zero(two_point(2.0));
        assert_eq!(m.apply(&f).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn composition_examples() {
        let s = equilateral3();
        let f = LipschitzFunction::new(s.clone(), vec![q(3), q(-2)]).unwrap();
        let id = PointMap::identity(s.clone());
        assert_eq!(composition_function_map(&id, &q(1), &f).unwrap(), f);
        assert_eq!(
            composition_function_map(&id, &q(2), &f).unwrap().values(),
            &[q(6), q(-4)]
        );
        let to_base = PointMap::to_base(s.clone(), s.clone());
        assert_eq!(
            composition_function_map(&to_base, &q(5), &f).unwrap(),
            LipschitzFunction::zero(s.clone())
        );
        assert_eq!(
            PointMap::new(s.clone(), s.clone(), vec![1, 0, 2]).unwrap_err(),
            Error::BaseNotPreserved(1)
        );
        assert_eq!(
            composition_function_map(&id, &q(0), &f).unwrap_err(),
            Error::ZeroScalar
        );
    }
}
