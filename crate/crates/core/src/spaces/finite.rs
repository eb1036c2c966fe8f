use rand::Rng;

use super::{MetricSpace, SampleRng};
use crate::{Error, Result};

/// A finite metric space given by its distance table; points are indices.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    table: Vec<Vec<f64>>,
    diameter: f64,
}

impl FiniteMetricSpace {
    /// Validates symmetry, the zero diagonal, positivity off the diagonal and
    /// the triangle inequality.
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::EmptySample("finite metric table"));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &d) in row.iter().enumerate() {
                let ok = if i == j { d == 0.0 } else { d > 0.0 && d.is_finite() };
                if !ok || d != table[j][i] {
                    return Err(Error::InvalidParameter(format!("entry ({i}, {j}) = {d} is not a metric value")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[i][k] > table[i][j] + table[j][k] {
                        return Err(Error::InvalidParameter(format!("triangle inequality fails for ({i}, {j}, {k})")));
                    }
                }
            }
        }
        let diameter = table.iter().flatten().cloned().fold(0.0, f64::max);
        Ok(Self { table, diameter })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl MetricSpace for FiniteMetricSpace {
    type Point = usize;

    fn distance(&self, p: &usize, q: &usize) -> f64 {
        self.table[*p][*q]
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }

    fn random_point(&self, rng: &mut SampleRng) -> usize {
        rng.gen_range(0..self.table.len())
    }

    fn random_near(&self, p: &usize, radius: f64, rng: &mut SampleRng) -> Option<usize> {
        let near: Vec<usize> = (0..self.table.len()).filter(|&q| self.table[*p][q] <= radius).collect();
        // `near` always contains p itself
        Some(near[rng.gen_range(0..near.len())])
    }
}
