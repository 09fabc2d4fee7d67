use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationVariant {
    /// `x^γ` for `x > 0`, else 0.
    #[default]
    Power,
    /// `(x^γ - 1)/γ` for `x > 0`, else 0. Tends to `ln x` as `γ → 0`.
    BoxCox,
}

/// Element-wise rectifying power law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Activation {
    pub gamma: f64,
    #[serde(default)]
    pub variant: ActivationVariant,
}

impl Activation {
    pub fn new(gamma: f64, variant: ActivationVariant) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(Error::param(format!(
                "activation exponent must lie in (0, 2], got {gamma}"
            )));
        }
        Ok(Self { gamma, variant })
    }

    pub fn power(gamma: f64) -> Result<Self> {
        Self::new(gamma, ActivationVariant::Power)
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        if x <= 0.0 || x.is_nan() {
            return 0.0;
        }
        match self.variant {
            ActivationVariant::Power => pow(x, self.gamma),
            ActivationVariant::BoxCox => (self.gamma * x.ln()).exp_m1() / self.gamma,
        }
    }
}

#[inline]
fn pow(x: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        x
    } else if gamma == 2.0 {
        x * x
    } else if gamma == 0.5 {
        x.sqrt()
    } else {
        x.powf(gamma)
    }
}

pub fn activate(v: &[f64], spec: Activation) -> Vec<f64> {
    v.iter().map(|&x| spec.apply(x)).collect()
}

pub fn activate_in_place(v: &mut [f64], spec: Activation) {
    v.iter_mut().for_each(|x| *x = spec.apply(*x));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn relu_at_gamma_one() {
        let a = Activation::power(1.0).unwrap();
        assert_eq!(activate(&[-2.0, 0.0, 3.0], a), vec![0.0, 0.0, 3.0]);
    }

    #[test]
    fn square_root_at_half() {
        let a = Activation::power(0.5).unwrap();
        assert_eq!(activate(&[4.0], a), vec![2.0]);
    }

    #[test]
    fn box_cox_tends_to_log() {
        let a = Activation::new(1e-4, ActivationVariant::BoxCox).unwrap();
        let v = a.apply(std::f64::consts::E);
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_maps_to_zero_in_both_variants() {
        for variant in [ActivationVariant::Power, ActivationVariant::BoxCox] {
            let a = Activation::new(0.3, variant).unwrap();
            assert_eq!(a.apply(0.0), 0.0);
            assert_eq!(a.apply(-1.0), 0.0);
        }
    }

    #[test]
    fn exponent_range_enforced() {
        assert!(Activation::power(0.0).is_err());
        assert!(Activation::power(2.5).is_err());
        assert!(Activation::power(f64::NAN).is_err());
        assert!(Activation::power(2.0).is_ok());
    }

    proptest! {
        #[test]
        fn monotone_and_rectifying(gamma in 0.01f64..=2.0, a in -10.0f64..10.0, b in -10.0f64..10.0) {
            for variant in [ActivationVariant::Power, ActivationVariant::BoxCox] {
                let s = Activation::new(gamma, variant).unwrap();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                if lo > 0.0 {
                    prop_assert!(s.apply(lo) <= s.apply(hi));
                }
                if lo <= 0.0 {
                    prop_assert_eq!(s.apply(lo), 0.0);
                }
            }
            let p = Activation::power(gamma).unwrap();
            prop_assert!(p.apply(a) >= 0.0);
        }

        #[test]
        fn power_is_scale_equivariant(gamma in 0.01f64..=2.0, c in 1e-3f64..1e3, x in 1e-6f64..1e3) {
            let s = Activation::power(gamma).unwrap();
            let lhs = s.apply(c * x);
            let rhs = c.powf(gamma) * s.apply(x);
            prop_assert!(((lhs - rhs) / rhs).abs() < 1e-9);
        }
    }
}
