//! Log-log regression of measured norms against a scale parameter.

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::ols;

/// Conditions attached to a fit instead of perturbing the data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FitFlag {
    /// Nonpositive or non-finite values were dropped.
    ZeroData,
    /// Fewer than three usable samples remained; the fit is rejected.
    TooFewPoints,
    /// The measured quantity sits at its trivial ceiling (no decay or growth).
    Saturated,
    /// Decay accelerates across the window, faster than any fixed power.
    SuperPolynomial,
}

impl FitFlag {
    pub fn name(self) -> &'static str {
        match self {
            FitFlag::ZeroData => "zero_data",
            FitFlag::TooFewPoints => "too_few_points",
            FitFlag::Saturated => "saturated",
            FitFlag::SuperPolynomial => "super_polynomial",
        }
    }
}

/// Exponent, constant and goodness of fit of `log2 value ~ a + b * x`.
///
/// For decay fits `exponent = -b`, for growth fits `exponent = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    /// Fitted `log2` constant.
    pub intercept: f64,
    pub r_squared: f64,
    /// `(x, log2 value)` pairs used in the fit.
    pub samples: Vec<(f64, f64)>,
    pub flags: Vec<FitFlag>,
}

impl DecayFit {
    /// Fits `values ~ C 2^(-exponent * x)`.
    pub fn decay(xs: &[f64], values: &[f64]) -> Self {
        Self::fit(xs, values, -1.0)
    }

    /// Fits `values ~ C 2^(exponent * x)`.
    pub fn growth(xs: &[f64], values: &[f64]) -> Self {
        Self::fit(xs, values, 1.0)
    }

    fn fit(xs: &[f64], values: &[f64], sign: f64) -> Self {
        let mut flags = Vec::new();
        let samples: Vec<(f64, f64)> = xs
            .iter()
            .zip(values)
            .filter(|(x, v)| x.is_finite() && v.is_finite() && **v > 0.0)
            .map(|(&x, &v)| (x, v.log2()))
            .collect();
        if samples.len() < xs.len().min(values.len()) {
            flags.push(FitFlag::ZeroData);
        }
        if samples.len() < 3 {
            flags.push(FitFlag::TooFewPoints);
            return Self {
                exponent: f64::NAN,
                intercept: f64::NAN,
                r_squared: 0.0,
                samples,
                flags,
            };
        }
        let (sx, sy): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        let (a, b, r2) = ols(&sx, &sy);
        Self {
            exponent: sign * b,
            intercept: a,
            r_squared: r2,
            samples,
            flags,
        }
    }

    pub fn has(&self, flag: FitFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn push_flag(&mut self, flag: FitFlag) {
        if !self.has(flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
    }

    /// At least four samples, not rejected, and `R^2` at or above `min_r2`.
    pub fn accepted(&self, min_r2: f64) -> bool {
        !self.has(FitFlag::TooFewPoints) && self.samples.len() >= 4 && self.r_squared >= min_r2
    }
}
