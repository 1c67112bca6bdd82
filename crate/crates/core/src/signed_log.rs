//! Signed log-space arithmetic.
//!
//! Quantities in the density formulas alternate in sign and span hundreds of
//! orders of magnitude, so they are carried as `(sign, ln|x|)` pairs.
//! Products are exact up to one rounding of the exponent sum; sums go through
//! [`SignedSum`], which keeps the positive and negative parts apart and
//! reports how much cancellation happened when they are finally combined.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

/// Relative error threshold above which a result carries a precision warning.
pub const PRECISION_WARNING_THRESHOLD: f64 = 1e-8;

/// A real number stored as a sign and the natural log of its magnitude.
///
/// `sign == 0` exactly when the value is zero, in which case `logmag` is
/// negative infinity.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    logmag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        logmag: 0.0,
    };

    /// Builds a value from a sign and a log-magnitude. A sign of zero or a
    /// log-magnitude of negative infinity both produce [`SignedLog::ZERO`].
    pub fn new(sign: i8, logmag: f64) -> Self {
        debug_assert!(!logmag.is_nan(), "NaN log-magnitude");
        if sign == 0 || logmag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                logmag,
            }
        }
    }

    /// A positive value given by its logarithm.
    pub fn from_ln(logmag: f64) -> Self {
        Self::new(1, logmag)
    }

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => SignedLog::new(1, x.ln()),
            Some(Ordering::Less) => SignedLog::new(-1, (-x).ln()),
            _ => Self::ZERO,
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.logmag.exp()
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn ln_abs(self) -> f64 {
        self.logmag
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        SignedLog {
            sign: self.sign.abs(),
            logmag: self.logmag,
        }
    }

    /// Multiplies by `(-1)^k`.
    pub fn alternate(self, k: usize) -> Self {
        if k % 2 == 1 {
            -self
        } else {
            self
        }
    }

    /// Integer power; `x^0 == 1` including for zero.
    pub fn powi(self, k: usize) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && k % 2 == 1 { -1 } else { 1 };
        SignedLog::new(sign, self.logmag * k as f64)
    }

    /// Sum of two values. Use [`SignedSum`] when the cancellation estimate
    /// matters.
    pub fn add(self, other: Self) -> Self {
        let mut acc = SignedSum::new();
        acc.push(self);
        acc.push(other);
        acc.value()
    }
}

impl Default for SignedLog {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "+" }, self.logmag),
        }
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;
    fn neg(self) -> SignedLog {
        SignedLog {
            sign: -self.sign,
            logmag: self.logmag,
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        SignedLog::new(self.sign * rhs.sign, self.logmag + rhs.logmag)
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        assert!(!rhs.is_zero(), "division by zero in signed log space");
        if self.is_zero() {
            return Self::ZERO;
        }
        SignedLog::new(self.sign * rhs.sign, self.logmag - rhs.logmag)
    }
}

/// `ln(sum(exp(x_i)))` with the usual max shift. Empty input or all `-inf`
/// gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp over positive terms given by their logs.
#[derive(Clone, Copy, Debug)]
struct LogAccumulator {
    max: f64,
    scaled: f64,
}

impl LogAccumulator {
    const EMPTY: LogAccumulator = LogAccumulator {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Sum of signed log-space terms with the positive and negative parts
/// accumulated separately.
#[derive(Clone, Copy, Debug)]
pub struct SignedSum {
    pos: LogAccumulator,
    neg: LogAccumulator,
    /// Largest cancellation factor carried by any pushed term.
    inherited: f64,
}

impl Default for SignedSum {
    fn default() -> Self {
        Self::new()
    }
}

impl SignedSum {
    pub fn new() -> Self {
        SignedSum {
            pos: LogAccumulator::EMPTY,
            neg: LogAccumulator::EMPTY,
            inherited: 1.0,
        }
    }

    pub fn push(&mut self, x: SignedLog) {
        match x.sign {
            1 => self.pos.push(x.logmag),
            -1 => self.neg.push(x.logmag),
            _ => {}
        }
    }

    /// Pushes a term that was itself computed with the given cancellation
    /// factor (see [`Approx`]).
    pub fn push_approx(&mut self, x: Approx) {
        self.push(x.value);
        if !x.value.is_zero() {
            self.inherited = self.inherited.max(x.cancellation);
        }
    }

    pub fn value(&self) -> SignedLog {
        self.finish().value
    }

    /// Combines the two accumulators.
    ///
    /// The cancellation factor is `(P + N) / |P - N|`; the relative rounding
    /// error of the result is roughly that factor times machine epsilon.
    pub fn finish(&self) -> Approx {
        let lp = self.pos.ln();
        let ln = self.neg.ln();
        let (value, cancel) = match (lp == f64::NEG_INFINITY, ln == f64::NEG_INFINITY) {
            (true, true) => (SignedLog::ZERO, 1.0),
            (false, true) => (SignedLog::new(1, lp), 1.0),
            (true, false) => (SignedLog::new(-1, ln), 1.0),
            (false, false) => {
                let (big, small, sign) = if lp >= ln { (lp, ln, 1) } else { (ln, lp, -1) };
                let r = (small - big).exp();
                if r == 1.0 {
                    (SignedLog::ZERO, f64::INFINITY)
                } else {
                    let value = SignedLog::new(sign, big + (-r).ln_1p());
                    (value, (1.0 + r) / (1.0 - r))
                }
            }
        };
        Approx {
            value,
            cancellation: cancel * self.inherited,
        }
    }
}

/// A signed log-space value together with an estimate of how much relative
/// precision was lost to cancellation while computing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: SignedLog,
    /// Ratio of the summed magnitudes to the magnitude of the result (>= 1).
    pub cancellation: f64,
}

impl Approx {
    pub fn exact(value: SignedLog) -> Self {
        Approx {
            value,
            cancellation: 1.0,
        }
    }

    /// Estimated relative error of `value`.
    pub fn rel_error_estimate(&self) -> f64 {
        self.cancellation * f64::EPSILON
    }

    pub fn precision_warning(&self) -> bool {
        self.rel_error_estimate() > PRECISION_WARNING_THRESHOLD
    }
}
