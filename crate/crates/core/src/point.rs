use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense parameter vector. Every coordinate is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T: Scalar = f64> {
    coords: Vec<T>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point dimension must be at least 1".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteValue(format!("coordinate {i} is {}", coords[i])));
        }
        Ok(Self { coords })
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![T::zero(); dim])
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Self::new(vec![T::one(); dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<T> {
        self.coords
    }

    /// `self - eta * direction`, or `None` if any coordinate of the result is
    /// not finite.
    pub fn step(&self, eta: T, direction: &[T]) -> Option<Self> {
        debug_assert_eq!(self.coords.len(), direction.len());
        let coords: Vec<T> = self.coords.iter().zip(direction).map(|(&x, &d)| x - eta * d).collect();
        coords.iter().all(|c| c.is_finite()).then_some(Self { coords })
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Self) -> T {
        self.coords.iter().zip(&other.coords).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)).sqrt()
    }

    /// Point on the segment `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        let coords =
            self.coords.iter().zip(&other.coords).map(|(&a, &b)| (T::one() - t) * a + t * b).collect();
        Self { coords }
    }
}

/// Euclidean norm of a gradient (or any vector).
pub fn grad_norm<T: Scalar>(v: &[T]) -> Result<T> {
    if let Some(i) = v.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFiniteValue(format!("entry {i} is {}", v[i])));
    }
    Ok(norm_unchecked(v))
}

pub(crate) fn norm_unchecked<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert_eq!(grad_norm(&[0.0_f64, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(grad_norm(&[3.0_f64, 4.0]).unwrap(), 5.0);
        assert_eq!(grad_norm(&[1.0_f64, 1.0, 1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(grad_norm(&[3.0_f32, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn norm_rejects_non_finite() {
        assert!(matches!(grad_norm(&[1.0, f64::NAN]), Err(Error::NonFiniteValue(_))));
        assert!(matches!(grad_norm(&[f64::INFINITY]), Err(Error::NonFiniteValue(_))));
    }

    #[test]
    fn point_rejects_bad_coordinates() {
        assert!(Point::<f64>::new(vec![]).is_err());
        assert!(Point::<f64>::new(vec![0.0, f64::NAN]).is_err());
        assert!(Point::<f64>::from_f64(&[1.0, 2.0]).is_ok());
    }

    #[test]
    fn step_overflow_is_none() {
        let p = Point::<f64>::ones(2).unwrap();
        assert!(p.step(1e308, &[-1e308, 0.0]).is_none());
        assert_eq!(p.step(0.5, &[2.0, -2.0]).unwrap().as_slice(), &[0.0, 2.0]);
    }
}
