//! Extended-Euclid loop state used by FTRR.


use crate::error::{Error, Result};
use crate::int::{self, Int};

/// Triples `(coeff of M, coeff of X, value)` with
/// `value = coeff_m * M + coeff_x * X` for both `u` and `v`.
///
/// Starting from `u = (1, 0, M)`, `v = (0, 1, X)`, after `k` steps
/// `-u.0/u.1` and `-v.0/v.1` are approximants `k-1` and `k` of `X/M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofactorLoop<T> {
    pub u: (T, T, T),
    pub v: (T, T, T),
}

impl<T: Int> CofactorLoop<T> {
    pub fn new(m: &T, x: &T) -> Self {
        Self {
            u: (T::one(), T::zero(), m.clone()),
            v: (T::zero(), T::one(), x.clone()),
        }
    }

    /// `q = floor(u3 / v3); u = u - q v; swap(u, v)`. Returns `q`.
    pub fn step(&mut self) -> Result<T> {
        if self.v.2.is_zero() {
            return Err(Error::PreconditionViolated(
                "continued fraction exhausted before the loop guard triggered".into(),
            ));
        }
        let q = self.u.2.div_floor(&self.v.2);
        let next = (
            int::sub_mul(&self.u.0, &q, &self.v.0)?,
            int::sub_mul(&self.u.1, &q, &self.v.1)?,
            int::sub_mul(&self.u.2, &q, &self.v.2)?,
        );
        self.u = std::mem::replace(&mut self.v, next);
        Ok(q)
    }

    /// Checks `u3 = u1 M + u2 X` and `v3 = v1 M + v2 X`.
    pub fn certificate_holds(&self, m: &T, x: &T) -> bool {
        let ok = |t: &(T, T, T)| t.0.clone() * m.clone() + t.1.clone() * x.clone() == t.2;
        ok(&self.u) && ok(&self.v)
    }
}
