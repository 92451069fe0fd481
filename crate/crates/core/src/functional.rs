/// A differentiable scalar function of the coefficient vector.
pub trait Functional {
    fn value(&self, u: &[f64]) -> f64;

    fn gradient(&self, u: &[f64]) -> Vec<f64>;

    /// `F(u + du) - F(u)`. Implementations should override this when they
    /// can avoid the cancellation of the direct difference; the Gonzalez
    /// discrete gradient divides the defect of this quantity by `|du|^2`.
    fn increment(&self, u: &[f64], du: &[f64]) -> f64 {
        let moved: Vec<f64> = u.iter().zip(du).map(|(a, b)| a + b).collect();
        self.value(&moved) - self.value(u)
    }

    /// Exact `int_0^1 grad F(u + xi (u_next - u)) dxi`, when the functional
    /// admits a closed form. The averaged discrete gradient falls back to
    /// Gauss quadrature in ξ otherwise.
    fn average_gradient(&self, _u: &[f64], _u_next: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<T: Functional + ?Sized> Functional for &T {
    fn value(&self, u: &[f64]) -> f64 {
        (**self).value(u)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        (**self).gradient(u)
    }

    fn increment(&self, u: &[f64], du: &[f64]) -> f64 {
        (**self).increment(u, du)
    }

    fn average_gradient(&self, u: &[f64], u_next: &[f64]) -> Option<Vec<f64>> {
        (**self).average_gradient(u, u_next)
    }
}
