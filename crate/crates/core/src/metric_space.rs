//! Finite pointed metric spaces and their off-diagonal pair sets.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::MetricError;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// First coordinate index of the ultrametric cube; distances are
/// `2^-(first differing coordinate)`, so depth-`k` cubes have distances in
/// `{2^-1, ..., 2^-k}`.
pub const CUBE_FIRST_COORDINATE: u32 = 1;

/// Default upper bound on the number of points a generator may produce.
pub const DEFAULT_POINT_CAP: usize = 64;

/// A finite metric space with a distinguished base point.
///
/// Construction validates every metric axiom, so a value of this type is
/// always a metric space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedMetricSpace<S> {
    labels: Vec<String>,
    dist: Matrix<S>,
    base: usize,
}

impl<S: Scalar> PointedMetricSpace<S> {
    pub fn new(labels: Vec<String>, dist: Matrix<S>, base: usize) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if dist.rows() != n || dist.cols() != n {
            return Err(MetricError::Shape {
                rows: dist.rows(),
                cols: dist.cols(),
                expected: n,
            });
        }
        if base >= n {
            return Err(MetricError::BaseOutOfRange { base, points: n });
        }
        for i in 0..n {
            for j in i + 1..n {
                if labels[i] == labels[j] {
                    return Err(MetricError::DuplicateLabel {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        check_axioms(&dist)?;
        Ok(Self { labels, dist, base })
    }

    /// The only point is the base; Lip0 and the pair set are empty.
    pub fn singleton(label: impl Into<String>) -> Self {
        Self {
            labels: alloc::vec![label.into()],
            dist: Matrix::zeros(1, 1),
            base: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn distances(&self) -> &Matrix<S> {
        &self.dist
    }

    pub fn d(&self, i: usize, j: usize) -> &S {
        &self.dist[(i, j)]
    }

    /// Dimension of Lip0 (and of the free space): one coordinate per non-base point.
    pub fn dim(&self) -> usize {
        self.len() - 1
    }

    /// Non-base points in coordinate order.
    pub fn non_base_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| i != self.base)
    }

    /// Coordinate of a point in Lip0 / free-space vectors; `None` for the base.
    pub fn coord(&self, point: usize) -> Option<usize> {
        use core::cmp::Ordering;
        match point.cmp(&self.base) {
            Ordering::Less => Some(point),
            Ordering::Equal => None,
            Ordering::Greater => Some(point - 1),
        }
    }

    /// Inverse of [`coord`](Self::coord).
    pub fn point_of_coord(&self, coord: usize) -> usize {
        if coord < self.base {
            coord
        } else {
            coord + 1
        }
    }

    pub fn pair_set(&self) -> PairSet {
        PairSet::new(self.len())
    }

    /// Re-checks every axiom by exhaustive enumeration.
    pub fn validate(&self) -> Result<(), MetricError> {
        check_axioms(&self.dist)
    }

    /// `true` if `d(x,z) <= max(d(x,y), d(y,z))` for every triple.
    pub fn is_ultrametric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    self.dist[(i, k)]
                        <= S::max_of(self.dist[(i, j)].clone(), self.dist[(j, k)].clone())
                })
            })
        })
    }

    /// Every pair of distinct points at distance `d`; base is the first point.
    pub fn equilateral(n: usize, d: S) -> Result<Self, MetricError> {
        let mut dist = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dist[(i, j)] = d.clone();
                }
            }
        }
        Self::new(default_labels(n), dist, 0)
    }

    /// Points on the real line at the given positions; base is the first point.
    pub fn line(positions: &[S]) -> Result<Self, MetricError> {
        let n = positions.len();
        let mut dist = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                dist[(i, j)] = (positions[i].clone() - positions[j].clone()).abs();
            }
        }
        Self::new(default_labels(n), dist, 0)
    }

    /// Same points and base with every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &S) -> Result<Self, MetricError> {
        Self::new(self.labels.clone(), self.dist.scale(factor), self.base)
    }

    /// Shortest-path metric of a complete graph with edge weights drawn
    /// uniformly from `[1, 10]`. Base is point 0.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let mut dist = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let w = S::sample(rng, 1.0, 10.0);
                dist[(i, j)] = w.clone();
                dist[(j, i)] = w;
            }
        }
        metric_closure(&mut dist);
        Self::new(default_labels(n), dist, 0)
    }

    /// Finite truncation `{0,1}^depth` of the binary sequence space with
    /// `d(x, y) = 2^-min{n : x_n != y_n}`, coordinates numbered from
    /// [`CUBE_FIRST_COORDINATE`]. The base point is the all-zeros word; labels are
    /// the words themselves, coordinate 1 first.
    pub fn ultrametric_cube(depth: u32, cap: usize) -> Result<Self, MetricError> {
        if depth == 0 {
            return Err(MetricError::ZeroDepth);
        }
        let n = 1usize
            .checked_shl(depth)
            .filter(|&n| depth < usize::BITS && n <= cap)
            .ok_or(MetricError::CapExceeded {
                points: 1usize.checked_shl(depth).unwrap_or(usize::MAX),
                cap,
            })?;
        let bit = |w: usize, coordinate: u32| (w >> (depth - coordinate)) & 1;
        let mut dist = Matrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let first_diff = (1..=depth)
                    .find(|&c| bit(x, c) != bit(y, c))
                    .expect("distinct words differ somewhere");
                let exponent = first_diff - 1 + CUBE_FIRST_COORDINATE;
                dist[(x, y)] = S::from_ratio(1, 1i64 << exponent);
            }
        }
        let labels = (0..n)
            .map(|w| {
                (1..=depth)
                    .map(|c| if bit(w, c) == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        Self::new(labels, dist, 0)
    }
}

/// Labels `0, p1, p2, ...` used by the generators.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i == 0 {
                String::from("0")
            } else {
                format!("p{i}")
            }
        })
        .collect()
}

/// Relaxes `d(i,k) <- min(d(i,k), d(i,j) + d(j,k))` until no entry changes,
/// so the result satisfies the triangle inequality in the active arithmetic.
pub fn metric_closure<S: Scalar>(dist: &mut Matrix<S>) {
    let n = dist.rows();
    loop {
        let mut changed = false;
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let via = dist[(i, j)].clone() + dist[(j, k)].clone();
                    if via < dist[(i, k)] {
                        dist[(i, k)] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn check_axioms<S: Scalar>(dist: &Matrix<S>) -> Result<(), MetricError> {
    let n = dist.rows();
    for i in 0..n {
        if !dist[(i, i)].is_zero() {
            return Err(MetricError::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if dist[(i, j)] != dist[(j, i)] {
                return Err(MetricError::AsymmetricMatrix {
                    i: i.min(j),
                    j: i.max(j),
                });
            }
            if dist[(i, j)].is_negative() {
                return Err(MetricError::NegativeDistance { i, j });
            }
            if dist[(i, j)].is_zero() {
                return Err(MetricError::ZeroDistanceDistinctPoints { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let via = dist[(i, j)].clone() + dist[(j, k)].clone();
                if dist[(i, k)].exceeds(&via) {
                    return Err(MetricError::TriangleViolation { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// The ordered off-diagonal pairs `(i, j)`, `i != j`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    points: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn new(points: usize) -> Self {
        let pairs = (0..points)
            .flat_map(|i| (0..points).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        Self { points, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn get(&self, row: usize) -> (usize, usize) {
        self.pairs[row]
    }

    /// Row position of `(i, j)`; `None` on the diagonal or out of range.
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        if i == j || i >= self.points || j >= self.points {
            return None;
        }
        Some(i * (self.points - 1) + if j < i { j } else { j - 1 })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::string::ToString;
    use alloc::vec;

    fn m(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    fn labels(n: usize) -> Vec<String> {
        default_labels(n)
    }

    #[test]
    fn two_point_space() {
        let s = PointedMetricSpace::new(
            vec!["0".to_string(), "a".to_string()],
            m(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            0,
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.pair_set().pairs(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn triangle_violation_reports_witness() {
        let err = PointedMetricSpace::new(
            labels(3),
            m(vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 1.0],
                vec![3.0, 1.0, 0.0],
            ]),
            0,
        )
        .unwrap_err();
        assert_eq!(err, MetricError::TriangleViolation { i: 0, j: 1, k: 2 });
    }

    #[test]
    fn asymmetric_rejected() {
        let err = PointedMetricSpace::new(labels(2), m(vec![vec![0.0, 1.0], vec![2.0, 0.0]]), 0)
            .unwrap_err();
        assert_eq!(err, MetricError::AsymmetricMatrix { i: 0, j: 1 });
    }

    #[test]
    fn other_axiom_failures() {
        let neg = PointedMetricSpace::new(labels(2), m(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]), 0);
        assert_eq!(
            neg.unwrap_err(),
            MetricError::NegativeDistance { i: 0, j: 1 }
        );
        let zero = PointedMetricSpace::new(labels(2), m(vec![vec![0.0, 0.0], vec![0.0, 0.0]]), 0);
        assert_eq!(
            zero.unwrap_err(),
            MetricError::ZeroDistanceDistinctPoints { i: 0, j: 1 }
        );
        let diag = PointedMetricSpace::new(labels(2), m(vec![vec![1.0, 1.0], vec![1.0, 0.0]]), 0);
        assert_eq!(diag.unwrap_err(), MetricError::NonzeroDiagonal { i: 0 });
        let base = PointedMetricSpace::new(labels(2), m(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), 2);
        assert!(matches!(
            base.unwrap_err(),
            MetricError::BaseOutOfRange { .. }
        ));
        let dup = PointedMetricSpace::new(
            vec!["a".to_string(), "a".to_string()],
            m(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            0,
        );
        assert!(matches!(
            dup.unwrap_err(),
            MetricError::DuplicateLabel { .. }
        ));
        let shape = PointedMetricSpace::new(labels(3), m(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), 0);
        assert!(matches!(shape.unwrap_err(), MetricError::Shape { .. }));
    }

    #[test]
    fn pair_sets() {
        assert_eq!(
            PairSet::new(3).pairs(),
            &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        );
        assert!(PairSet::new(1).is_empty());
        let ps = PairSet::new(5);
        for (row, (i, j)) in ps.iter().enumerate() {
            assert_eq!(ps.index(i, j), Some(row));
            assert!(ps.index(j, i).is_some());
        }
        assert_eq!(ps.index(2, 2), None);
    }

    #[test]
    fn coordinates_skip_the_base() {
        let mut d = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    d[(i, j)] = 1.0;
                }
            }
        }
        let s = PointedMetricSpace::new(labels(3), d, 1).unwrap();
        assert_eq!(s.coord(0), Some(0));
        assert_eq!(s.coord(1), None);
        assert_eq!(s.coord(2), Some(1));
        assert_eq!(s.point_of_coord(1), 2);
        assert_eq!(s.non_base_points().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn cube_depth_one_and_two() {
        let c1 = PointedMetricSpace::<Rational>::ultrametric_cube(1, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(c1.len(), 2);
        assert_eq!(*c1.d(0, 1), Rational::from_ratio(1, 2));

        let c2 = PointedMetricSpace::<Rational>::ultrametric_cube(2, DEFAULT_POINT_CAP).unwrap();
        let idx = |w: &str| c2.index_of(w).unwrap();
        assert_eq!(c2.base(), idx("00"));
        assert_eq!(*c2.d(idx("00"), idx("01")), Rational::from_ratio(1, 4));
        assert_eq!(*c2.d(idx("00"), idx("10")), Rational::from_ratio(1, 2));
        assert_eq!(*c2.d(idx("01"), idx("10")), Rational::from_ratio(1, 2));
        assert!(c2.is_ultrametric());
    }

    #[test]
    fn cube_cap_and_depth() {
        assert_eq!(
            PointedMetricSpace::<f64>::ultrametric_cube(4, 8).unwrap_err(),
            MetricError::CapExceeded { points: 16, cap: 8 }
        );
        assert_eq!(
            PointedMetricSpace::<f64>::ultrametric_cube(0, 8).unwrap_err(),
            MetricError::ZeroDepth
        );
    }

    #[test]
    fn singleton() {
        let s = PointedMetricSpace::<f64>::singleton("0");
        assert_eq!(s.dim(), 0);
        assert!(s.pair_set().is_empty());
        assert!(s.validate().is_ok());
    }
}
