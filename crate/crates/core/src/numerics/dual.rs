//! Forward-mode differentiation scalars.

/// Arithmetic needed to evaluate an [`super::Expression`].
pub trait Scalar: Clone {
    /// Whether evaluation propagates derivatives (affects sqrt at zero).
    const CARRIES_DERIVATIVES: bool;

    fn constant(c: f64, ndim: usize) -> Self;
    fn ndim(&self) -> usize;
    fn value(&self) -> f64;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
}

impl Scalar for f64 {
    const CARRIES_DERIVATIVES: bool = false;

    fn constant(c: f64, _: usize) -> Self {
        c
    }
    fn ndim(&self) -> usize {
        0
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
}

/// Value with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub partials: Vec<f64>,
}

impl DualValue {
    pub fn variable(value: f64, index: usize, ndim: usize) -> Self {
        let mut partials = vec![0.0; ndim];
        partials[index] = 1.0;
        DualValue { value, partials }
    }

    /// Seeds every coordinate of `x` as an independent variable.
    pub fn seed(x: &[f64]) -> Vec<Self> {
        x.iter().enumerate().map(|(i, &v)| Self::variable(v, i, x.len())).collect()
    }

    /// Applies a scalar function with known value and derivative.
    fn chain(&self, f: f64, df: f64) -> Self {
        DualValue { value: f, partials: self.partials.iter().map(|p| df * p).collect() }
    }
}

impl Scalar for DualValue {
    const CARRIES_DERIVATIVES: bool = true;

    fn constant(c: f64, ndim: usize) -> Self {
        DualValue { value: c, partials: vec![0.0; ndim] }
    }
    fn ndim(&self) -> usize {
        self.partials.len()
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(&self, o: &Self) -> Self {
        DualValue {
            value: self.value + o.value,
            partials: self.partials.iter().zip(&o.partials).map(|(a, b)| a + b).collect(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        DualValue {
            value: self.value * o.value,
            partials: self
                .partials
                .iter()
                .zip(&o.partials)
                .map(|(a, b)| a * o.value + self.value * b)
                .collect(),
        }
    }
    fn neg(&self) -> Self {
        self.chain(-self.value, -1.0)
    }
    fn powi(&self, k: i32) -> Self {
        let d = if k == 0 { 0.0 } else { k as f64 * self.value.powi(k - 1) };
        self.chain(self.value.powi(k), d)
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
}

/// Value, gradient and Hessian, propagated together.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `ndim × ndim`.
    pub hess: Vec<f64>,
}

impl Dual2 {
    pub fn seed(x: &[f64]) -> Vec<Self> {
        let n = x.len();
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut grad = vec![0.0; n];
                grad[i] = 1.0;
                Dual2 { value: v, grad, hess: vec![0.0; n * n] }
            })
            .collect()
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.grad.len() + j]
    }

    /// Composition with a scalar function given its first two derivatives.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let n = self.grad.len();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = df * self.hess[i * n + j] + d2f * self.grad[i] * self.grad[j];
            }
        }
        Dual2 { value: f, grad: self.grad.iter().map(|g| df * g).collect(), hess }
    }
}

impl Scalar for Dual2 {
    const CARRIES_DERIVATIVES: bool = true;

    fn constant(c: f64, ndim: usize) -> Self {
        Dual2 { value: c, grad: vec![0.0; ndim], hess: vec![0.0; ndim * ndim] }
    }
    fn ndim(&self) -> usize {
        self.grad.len()
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(&self, o: &Self) -> Self {
        Dual2 {
            value: self.value + o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a + b).collect(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.grad.len();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * o.value
                    + o.hess[i * n + j] * self.value
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i];
            }
        }
        Dual2 {
            value: self.value * o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a * o.value + self.value * b).collect(),
            hess,
        }
    }
    fn neg(&self) -> Self {
        self.chain(-self.value, -1.0, 0.0)
    }
    fn powi(&self, k: i32) -> Self {
        let v = self.value;
        let (d1, d2) = match k {
            0 => (0.0, 0.0),
            1 => (1.0, 0.0),
            _ => (k as f64 * v.powi(k - 1), (k * (k - 1)) as f64 * v.powi(k - 2)),
        };
        self.chain(v.powi(k), d1, d2)
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
}
