use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttributeValue, Interval};

/// Cut points `b0 < b1 < ... < bk` defining `[b0,b1), ..., [b(k-1), bk]`.
///
/// A chain of two equal points is the degenerate single interval `[v, v]`
/// fitted on a constant column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BoundaryChain {
    boundaries: Vec<f64>,
}

impl BoundaryChain {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::Parameter(format!(
                "a boundary chain needs at least two points, got {}",
                boundaries.len()
            )));
        }
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::Parameter("boundaries must be finite".into()));
        }
        let degenerate = boundaries.len() == 2 && boundaries[0] == boundaries[1];
        if !degenerate && boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!(
                "boundaries must be strictly increasing: {boundaries:?}"
            )));
        }
        Ok(BoundaryChain { boundaries })
    }

    pub fn degenerate(v: f64) -> Result<Self> {
        Self::new(vec![v, v])
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn interval_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.boundaries[0] == self.boundaries[1]
    }

    pub fn lo(&self) -> f64 {
        self.boundaries[0]
    }

    pub fn hi(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub fn interval(&self, index: usize) -> Interval {
        let closed = index + 1 == self.interval_count();
        Interval::new(self.boundaries[index], self.boundaries[index + 1], closed)
            .expect("chain boundaries are validated on construction")
    }

    pub fn intervals(&self) -> Vec<Interval> {
        (0..self.interval_count()).map(|i| self.interval(i)).collect()
    }

    /// Index of the interval holding `v`.
    pub fn locate(&self, v: f64) -> Result<usize> {
        let (lo, hi) = (self.lo(), self.hi());
        if !(v >= lo && v <= hi) {
            return Err(Error::OutOfRange { value: v, lo, hi });
        }
        // Number of interior boundaries <= v.
        let inner = &self.boundaries[1..self.boundaries.len() - 1];
        Ok(inner.partition_point(|b| *b <= v))
    }
}

impl TryFrom<Vec<f64>> for BoundaryChain {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        BoundaryChain::new(value)
    }
}

impl From<BoundaryChain> for Vec<f64> {
    fn from(chain: BoundaryChain) -> Self {
        chain.boundaries
    }
}

/// The interval of `chain` containing `v`.
pub fn assign_interval(chain: &BoundaryChain, v: f64) -> Result<AttributeValue> {
    let index = chain.locate(v)?;
    Ok(AttributeValue::Interval(chain.interval(index)))
}
