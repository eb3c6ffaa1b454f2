//! The Lipschitz-free space `F(M)`, i.e. the dual of `Lip0(M)` for finite `M`.
//!
//! Elements are stored in Dirac coordinates: `coeffs[c]` is the weight of
//! `delta_z` for the non-base point `z` with coordinate `c`. Two routes to
//! the norm are provided and must agree:
//!
//! * [`FreeVector::free_norm`]: maximize `<mu, f>` over the Lipschitz unit ball.
//! * [`FreeVector::optimal_representation`]: the cheapest way to write `mu` as
//!   a combination of normalized molecules `m_xy`, measured in ℓ¹.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, LpError, Result};
use crate::lipschitz::{same_space, LipschitzFunction, SpaceRef};
use crate::lp::{self, LpOptions};
use crate::matrix::Matrix;
use crate::metric_space::{PairSet, PointedMetricSpace};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct FreeVector<S> {
    space: SpaceRef<S>,
    coeffs: Vec<S>,
}

impl<S: Scalar> FreeVector<S> {
    pub fn new(space: SpaceRef<S>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: SpaceRef<S>) -> Self {
        let coeffs = vec![S::zero(); space.dim()];
        Self { space, coeffs }
    }

    /// Point evaluation `f -> f(z)`; the zero functional when `z` is the base.
    pub fn dirac(space: SpaceRef<S>, z: usize) -> Result<Self> {
        if z >= space.len() {
            return Err(Error::PointOutOfRange(z));
        }
        let mut mu = Self::zero(space);
        if let Some(c) = mu.space.coord(z) {
            mu.coeffs[c] = S::one();
        }
        Ok(mu)
    }

    /// The normalized molecule `m_xy = (delta_x - delta_y) / d(x, y)`.
    pub fn molecule(space: SpaceRef<S>, x: usize, y: usize) -> Result<Self> {
        let n = space.len();
        if x >= n {
            return Err(Error::PointOutOfRange(x));
        }
        if y >= n {
            return Err(Error::PointOutOfRange(y));
        }
        if x == y {
            return Err(Error::EqualPoints(x));
        }
        let w = S::one() / space.d(x, y).clone();
        let mut mu = Self::zero(space);
        if let Some(c) = mu.space.coord(x) {
            mu.coeffs[c] = w.clone();
        }
        if let Some(c) = mu.space.coord(y) {
            mu.coeffs[c] = -w;
        }
        Ok(mu)
    }

    /// Coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, space: SpaceRef<S>) -> Self {
        let coeffs = (0..space.dim())
            .map(|_| S::sample(rng, -1.0, 1.0))
            .collect();
        Self { space, coeffs }
    }

    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self {
            space: self.space.clone(),
            coeffs,
        })
    }

    pub fn pairing(&self, f: &LipschitzFunction<S>) -> Result<S> {
        if !same_space(&self.space, f.space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(lp::dot(&self.coeffs, f.values()))
    }

    pub fn free_norm(&self) -> Result<S> {
        Ok(self.free_norm_with_witness()?.value)
    }

    /// Maximizes `<mu, f>` subject to `f(x) - f(y) <= d(x, y)` for every
    /// ordered pair; the maximizer is returned as the witness.
    pub fn free_norm_with_witness(&self) -> Result<FreeNorm<S>> {
        self.free_norm_with(&LpOptions::default())
    }

    pub fn free_norm_with(&self, opts: &LpOptions) -> Result<FreeNorm<S>> {
        if self.space.dim() == 0 {
            return Ok(FreeNorm {
                value: S::zero(),
                witness: LipschitzFunction::zero(self.space.clone()),
            });
        }
        let (g, h) = lipschitz_ball(&self.space);
        let sol = lp::max_linear_with(&self.coeffs, &g, &h, opts)?;
        Ok(FreeNorm {
            value: sol.value,
            witness: LipschitzFunction::new(self.space.clone(), sol.argmax)?,
        })
    }

    /// A minimum-ℓ¹ molecular representation `mu = sum a_xy m_xy` over
    /// the ordered pairs of the space.
    pub fn optimal_representation(&self) -> Result<MoleculeDecomposition<S>> {
        self.optimal_representation_with(&LpOptions::default())
    }

    pub fn optimal_representation_with(
        &self,
        opts: &LpOptions,
    ) -> Result<MoleculeDecomposition<S>> {
        let pairs = self.space.pair_set();
        if pairs.is_empty() {
            return Ok(MoleculeDecomposition {
                pairs,
                coeffs: Vec::new(),
                l1_value: S::zero(),
            });
        }
        let a = molecule_matrix(&self.space);
        let sol = match lp::min_l1_with(&a, &self.coeffs, opts) {
            Ok(sol) => sol,
            // The molecules m_z0 span the whole space, so this cannot happen
            // for a valid vector.
            Err(LpError::NoPreimage) => panic!("molecules failed to span the free space"),
            Err(e) => return Err(e.into()),
        };
        let l1_value = scalar::l1_norm(&sol.coeffs);
        Ok(MoleculeDecomposition {
            pairs,
            coeffs: sol.coeffs,
            l1_value,
        })
    }

    /// `|free_norm - optimal_representation.l1_value|`.
    pub fn duality_gap(&self) -> Result<S> {
        let sup = self.free_norm()?;
        let inf = self.optimal_representation()?.l1_value;
        Ok((sup - inf).abs())
    }
}

#[derive(Clone, Debug)]
pub struct FreeNorm<S> {
    pub value: S,
    /// A function in the Lipschitz unit ball attaining the norm.
    pub witness: LipschitzFunction<S>,
}

/// Coefficients `a` over the ordered pairs with `sum a_xy m_xy = mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoleculeDecomposition<S> {
    pub pairs: PairSet,
    pub coeffs: Vec<S>,
    pub l1_value: S,
}

impl<S: Scalar> MoleculeDecomposition<S> {
    /// Sums the molecules back into Dirac coordinates.
    pub fn reconstruct(&self, space: &SpaceRef<S>) -> Result<FreeVector<S>> {
        if self.pairs != space.pair_set() {
            return Err(Error::SpaceMismatch);
        }
        let a = molecule_matrix(space);
        FreeVector::new(space.clone(), a.mul_vec(&self.coeffs))
    }

    pub fn coefficient(&self, x: usize, y: usize) -> Option<&S> {
        self.pairs.index(x, y).map(|i| &self.coeffs[i])
    }
}

/// `(|M| - 1) x |M~|` matrix whose column `(x, y)` is `m_xy` in Dirac coordinates.
pub fn molecule_matrix<S: Scalar>(space: &PointedMetricSpace<S>) -> Matrix<S> {
    let pairs = space.pair_set();
    let mut a = Matrix::zeros(space.dim(), pairs.len());
    for (col, (x, y)) in pairs.iter().enumerate() {
        let w = S::one() / space.d(x, y).clone();
        if let Some(c) = space.coord(x) {
            a[(c, col)] = w.clone();
        }
        if let Some(c) = space.coord(y) {
            a[(c, col)] = -w;
        }
    }
    a
}

/// Constraints `f(x) - f(y) <= d(x, y)` over every ordered pair, as `G f <= h`
/// in Dirac coordinates.
pub fn lipschitz_ball<S: Scalar>(space: &PointedMetricSpace<S>) -> (Matrix<S>, Vec<S>) {
    let pairs = space.pair_set();
    let mut g = Matrix::zeros(pairs.len(), space.dim());
    let mut h = Vec::with_capacity(pairs.len());
    for (row, (x, y)) in pairs.iter().enumerate() {
        if let Some(c) = space.coord(x) {
            g[(row, c)] = S::one();
        }
        if let Some(c) = space.coord(y) {
            g[(row, c)] = -S::one();
        }
        h.push(space.d(x, y).clone());
    }
    (g, h)
}
