//! Small generic 2×2 matrix, shared by the transfer-matrix and orbit code.

use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub e: [[T; 2]; 2],
}

impl<T> Mat2<T> {
    pub fn new(e: [[T; 2]; 2]) -> Self {
        Mat2 { e }
    }
}

impl<T: Clone + Zero + One> Mat2<T> {
    pub fn identity() -> Self {
        Mat2::new([[T::one(), T::zero()], [T::zero(), T::one()]])
    }
}

impl<T> Mat2<T>
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    pub fn mul(&self, other: &Mat2<T>) -> Mat2<T> {
        let a = &self.e;
        let b = &other.e;
        Mat2::new([
            [
                a[0][0].clone() * b[0][0].clone() + a[0][1].clone() * b[1][0].clone(),
                a[0][0].clone() * b[0][1].clone() + a[0][1].clone() * b[1][1].clone(),
            ],
            [
                a[1][0].clone() * b[0][0].clone() + a[1][1].clone() * b[1][0].clone(),
                a[1][0].clone() * b[0][1].clone() + a[1][1].clone() * b[1][1].clone(),
            ],
        ])
    }

    pub fn trace(&self) -> T {
        self.e[0][0].clone() + self.e[1][1].clone()
    }

    pub fn scale(&self, s: &T) -> Mat2<T> {
        Mat2::new([
            [
                s.clone() * self.e[0][0].clone(),
                s.clone() * self.e[0][1].clone(),
            ],
            [
                s.clone() * self.e[1][0].clone(),
                s.clone() * self.e[1][1].clone(),
            ],
        ])
    }
}

impl<T> Mat2<T>
where
    T: Clone + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    pub fn det(&self) -> T {
        self.e[0][0].clone() * self.e[1][1].clone() - self.e[0][1].clone() * self.e[1][0].clone()
    }
}

impl<T> Mat2<T>
where
    T: Clone + Add<Output = T> + Mul<Output = T> + Sub<Output = T> + Neg<Output = T>,
{
    /// Adjugate: `self · adjugate = det · 1`.
    pub fn adjugate(&self) -> Mat2<T> {
        Mat2::new([
            [self.e[1][1].clone(), -self.e[0][1].clone()],
            [-self.e[1][0].clone(), self.e[0][0].clone()],
        ])
    }
}

impl<T> Mat2<T>
where
    T: Clone
        + Zero
        + One
        + Add<Output = T>
        + Mul<Output = T>
        + Sub<Output = T>
        + Neg<Output = T>
        + Div<Output = T>,
{
    pub fn inverse(&self) -> Mat2<T> {
        let det = self.det();
        let adj = self.adjugate();
        Mat2::new([
            [
                adj.e[0][0].clone() / det.clone(),
                adj.e[0][1].clone() / det.clone(),
            ],
            [adj.e[1][0].clone() / det.clone(), adj.e[1][1].clone() / det],
        ])
    }

    /// Integer power, negative exponents via the inverse.
    pub fn pow(&self, n: i64) -> Mat2<T> {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Mat2::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_trace_det() {
        let a = Mat2::new([[1.0, 2.0], [3.0, 4.0]]);
        let b = Mat2::new([[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(a.mul(&b).e, [[2.0, 1.0], [4.0, 3.0]]);
        assert_eq!(a.trace(), 5.0);
        assert_eq!(a.det(), -2.0);
    }

    #[test]
    fn inverse_and_pow() {
        let a = Mat2::new([[2.0f64, 1.0], [1.0, 1.0]]);
        let inv = a.inverse();
        let id = a.mul(&inv);
        assert!((id.e[0][0] - 1.0).abs() < 1e-12 && id.e[0][1].abs() < 1e-12);
        assert_eq!(a.pow(0).e, Mat2::<f64>::identity().e);
        let cube = a.mul(&a).mul(&a);
        assert_eq!(a.pow(3).e, cube.e);
        let back = a.pow(-2).mul(&a.pow(2));
        assert!((back.e[0][0] - 1.0).abs() < 1e-12);
        assert!((back.e[1][1] - 1.0).abs() < 1e-12);
    }
}
