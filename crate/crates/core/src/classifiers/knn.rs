//! k-nearest-neighbour voting over the stored training rows.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::ClassifierError;
use crate::vectorize::{FeatureMatrix, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Euclidean,
    Manhattan,
    /// Minkowski distance of order `p >= 1`.
    Minkowski(f64),
}

impl Distance {
    /// Distance between a sparse query and a sparse stored row. Terms are
    /// accumulated in ascending feature order; coordinates that are zero in
    /// both vectors contribute exactly zero and are skipped.
    pub fn between(&self, a: &SparseVector, b: &SparseVector) -> f64 {
        let term = |d: f64| match *self {
            Distance::Euclidean => d * d,
            Distance::Manhattan => d.abs(),
            Distance::Minkowski(p) => libm::pow(d.abs(), p),
        };
        let (ai, av) = (a.indices(), a.values());
        let (bi, bv) = (b.indices(), b.values());
        let (mut i, mut j) = (0, 0);
        let mut sum = 0.0;
        while i < ai.len() || j < bi.len() {
            let d = match (ai.get(i), bi.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                    av[i - 1] - bv[j - 1]
                }
                (Some(x), Some(y)) if x < y => {
                    i += 1;
                    av[i - 1]
                }
                (Some(_), None) => {
                    i += 1;
                    av[i - 1]
                }
                _ => {
                    j += 1;
                    -bv[j - 1]
                }
            };
            sum += term(d);
        }
        match *self {
            Distance::Euclidean => sum.sqrt(),
            Distance::Manhattan => sum,
            Distance::Minkowski(p) => libm::pow(sum, 1.0 / p),
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        match *self {
            Distance::Minkowski(p) if !(p >= 1.0 && p.is_finite()) => Err(ClassifierError::Hyperparameter(
                format!("Minkowski order must be >= 1, got {p}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Euclidean => f.write_str("euclidean"),
            Distance::Manhattan => f.write_str("manhattan"),
            Distance::Minkowski(p) => write!(f, "minkowski:{p:?}"),
        }
    }
}

impl FromStr for Distance {
    type Err = String;

    /// `euclidean`, `manhattan`, or `minkowski:<p>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Distance::Euclidean),
            "manhattan" => Ok(Distance::Manhattan),
            _ => s
                .strip_prefix("minkowski:")
                .and_then(|p| p.parse::<f64>().ok())
                .map(Distance::Minkowski)
                .ok_or_else(|| format!("unknown distance '{s}' (euclidean, manhattan, minkowski:<p>)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnParams {
    pub k: usize,
    pub distance: Distance,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            k: 1,
            distance: Distance::Euclidean,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KNearest {
    pub(crate) params: KnnParams,
    pub(crate) num_classes: usize,
    pub(crate) rows: Vec<SparseVector>,
    pub(crate) labels: Vec<usize>,
}

impl KNearest {
    pub fn fit(matrix: &FeatureMatrix, params: &KnnParams) -> Result<Self, ClassifierError> {
        params.distance.validate()?;
        if params.k == 0 || params.k > matrix.len() {
            return Err(ClassifierError::Hyperparameter(format!(
                "k must lie in 1..={}, got {}",
                matrix.len(),
                params.k
            )));
        }
        Ok(KNearest {
            params: *params,
            num_classes: matrix.num_classes(),
            rows: matrix.rows().to_vec(),
            labels: matrix.labels().to_vec(),
        })
    }

    pub fn params(&self) -> &KnnParams {
        &self.params
    }

    /// Training indices of the `k` nearest rows, nearest first; equal
    /// distances go to the lower training index.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let query = SparseVector::from_dense(x);
        let mut scored: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (self.params.distance.between(&query, r), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| -> Ordering { a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) };
        let k = self.params.k;
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_by(cmp);
        scored.into_iter().map(|(_, i)| i).collect()
    }

    pub fn vote_fractions(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.num_classes];
        for i in self.neighbors(x) {
            votes[self.labels[i]] += 1.0;
        }
        let k = self.params.k as f64;
        votes.into_iter().map(|v| v / k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::argmax;

    fn fit(rows: &[Vec<f64>], labels: Vec<usize>, k: usize) -> KNearest {
        let m = FeatureMatrix::from_dense(rows, labels, ["neg", "pos"]).unwrap();
        KNearest::fit(
            &m,
            &KnnParams {
                k,
                distance: Distance::Euclidean,
            },
        )
        .unwrap()
    }

    #[test]
    fn nearest_point() {
        let knn = fit(&[vec![0.0, 0.0], vec![5.0, 5.0]], vec![0, 1], 1);
        assert_eq!(argmax(&knn.vote_fractions(&[1.0, 0.0])), 0);
        assert_eq!(argmax(&knn.vote_fractions(&[4.0, 6.0])), 1);
    }

    #[test]
    fn k_equals_n_gives_global_majority() {
        let knn = fit(&[vec![0.0], vec![1.0], vec![9.0]], vec![0, 1, 1], 3);
        for q in [-5.0, 0.0, 100.0] {
            assert_eq!(argmax(&knn.vote_fractions(&[q])), 1);
        }
    }

    #[test]
    fn vote_fractions_two_to_one() {
        let knn = fit(&[vec![0.0], vec![1.0], vec![2.0], vec![50.0]], vec![1, 1, 0, 0], 3);
        let s = knn.vote_fractions(&[0.5]);
        assert_eq!(s, vec![1.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn equal_distances_prefer_lower_index() {
        let knn = fit(&[vec![1.0], vec![-1.0]], vec![1, 0], 1);
        assert_eq!(knn.neighbors(&[0.0]), vec![0]);
    }

    #[test]
    fn distances() {
        let a = SparseVector::from_dense(&[0.0, 3.0, 0.0]);
        let b = SparseVector::from_dense(&[4.0, 0.0, 0.0]);
        assert_eq!(Distance::Euclidean.between(&a, &b), 5.0);
        assert_eq!(Distance::Manhattan.between(&a, &b), 7.0);
        let m3 = Distance::Minkowski(3.0).between(&a, &b);
        assert!((m3 - 91f64.cbrt()).abs() < 1e-12);
        assert!(Distance::Minkowski(0.5).validate().is_err());
        assert_eq!("minkowski:3".parse::<Distance>().unwrap(), Distance::Minkowski(3.0));
    }

    #[test]
    fn k_out_of_range() {
        let m = FeatureMatrix::from_dense(&[vec![0.0]], vec![0], ["neg", "pos"]).unwrap();
        let p = KnnParams {
            k: 2,
            distance: Distance::Euclidean,
        };
        assert!(KNearest::fit(&m, &p).is_err());
    }
}
