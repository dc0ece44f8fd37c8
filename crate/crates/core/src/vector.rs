//! Dense real vectors, the state representation for every solver.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};

/// A real coordinate vector of fixed dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Self(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Euclidean inner product `Σ aᵢbᵢ`.
    pub fn inner_product(&self, other: &DenseVector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    /// Returns `ca·self + cb·other`.
    pub fn combine(&self, ca: f64, other: &DenseVector, cb: f64) -> Result<DenseVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(DenseVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| ca * a + cb * b)
                .collect(),
        ))
    }

    /// `self − other`.
    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector> {
        self.combine(1.0, other, -1.0)
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &DenseVector) -> Result<DenseVector> {
        self.combine(1.0, other, c)
    }

    pub fn scale(&self, c: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|a| c * a).collect())
    }

    pub fn distance(&self, other: &DenseVector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for DenseVector {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Free-function form of [`DenseVector::inner_product`].
pub fn inner_product(a: &DenseVector, b: &DenseVector) -> Result<f64> {
    a.inner_product(b)
}

pub fn norm(a: &DenseVector) -> f64 {
    a.norm()
}

pub fn combine(a: &DenseVector, ca: f64, b: &DenseVector, cb: f64) -> Result<DenseVector> {
    a.combine(ca, b, cb)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
