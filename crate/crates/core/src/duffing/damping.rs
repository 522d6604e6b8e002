use super::DuffingError;

/// Polynomial with coefficients in ascending order (constant term first).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, DuffingError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(DuffingError::InvalidDamping("coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative_at(&self, t: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &c)| acc * t + k as f64 * c)
    }

    /// Antiderivative vanishing at zero.
    fn primitive(&self, t: f64) -> f64 {
        t * self.coeffs.iter().enumerate().rev().fold(0.0, |acc, (k, &c)| acc * t + c / (k + 1) as f64)
    }

    /// `int_c^t p(s) ds`.
    pub fn integral(&self, c: f64, t: f64) -> f64 {
        self.primitive(t) - self.primitive(c)
    }
}

/// Time-dependent damping `beta(t) x'` with the integration anchor `c` of
/// the exponential envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Damping {
    pub beta: Polynomial,
    pub c: f64,
}

impl Damping {
    pub fn new(beta: Polynomial, c: f64) -> Result<Self, DuffingError> {
        if !c.is_finite() {
            return Err(DuffingError::InvalidDamping("anchor must be finite"));
        }
        Ok(Self { beta, c })
    }

    /// `int_c^t beta`.
    pub fn integral(&self, t: f64) -> f64 {
        self.beta.integral(self.c, t)
    }

    pub fn envelope(&self, t: f64) -> f64 {
        damped_transform(&self.beta, self.c, t)
    }
}

/// Envelope `exp(-1/2 int_c^t beta)` that turns an undamped solution into a
/// damped one.
pub fn damped_transform(beta: &Polynomial, c: f64, t: f64) -> f64 {
    (-0.5 * beta.integral(c, t)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_calculus() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0]).unwrap();
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative_at(2.0), 10.0);
        assert!((p.integral(1.0, 2.0) - (2.0 - 4.0 + 8.0 - (1.0 - 1.0 + 1.0))).abs() < 1e-15);
        assert_eq!(Polynomial::default().eval(3.0), 0.0);
        assert!(Polynomial::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn constant_damping_envelope() {
        let d = Damping::new(Polynomial::constant(0.5), 1.0).unwrap();
        assert!((d.envelope(5.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(d.envelope(1.0), 1.0);
    }
}
