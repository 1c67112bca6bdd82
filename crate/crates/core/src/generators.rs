//! Archimedean generator families.
//!
//! Every family exposes `psi`, its inverse, the sign-adjusted log-derivatives
//! `ln((-1)^k psi^(k)(t))` and `ln(-(psi^-1)'(u))`. All derivative formulas
//! are written as sums of same-signed terms so that they can be evaluated in
//! log space without cancellation.

use std::fmt;

use crate::combinatorics::{ln_eulerian_row, ln_factorial, s_poly_row, StirlingTables};
use crate::error::{Error, Result};
use crate::signed_log::log_sum_exp;

/// Base generator of a tilted outer power family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiltBase {
    /// `psi(t) = exp(-t)`; with zero tilt this is the Gumbel family.
    Exp,
    /// `psi(t) = 1/(1+t)`; with unit tilt this is the Clayton family.
    Inverse,
}

impl TiltBase {
    fn psi(self, x: f64) -> f64 {
        match self {
            TiltBase::Exp => (-x).exp(),
            TiltBase::Inverse => 1.0 / (1.0 + x),
        }
    }

    fn psi_inv(self, u: f64) -> f64 {
        match self {
            TiltBase::Exp => -u.ln(),
            TiltBase::Inverse => 1.0 / u - 1.0,
        }
    }

    /// `ln |psi^(k)(x)|`.
    fn ln_abs_deriv(self, k: usize, x: f64) -> f64 {
        match self {
            TiltBase::Exp => -x,
            TiltBase::Inverse => ln_factorial(k) - (k as f64 + 1.0) * x.ln_1p(),
        }
    }

    /// `ln(-(psi^-1)'(u))`.
    fn ln_neg_inv_prime(self, u: f64) -> f64 {
        match self {
            TiltBase::Exp => -u.ln(),
            TiltBase::Inverse => -2.0 * u.ln(),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            TiltBase::Exp => "exp",
            TiltBase::Inverse => "inv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Clayton,
    Gumbel,
    Frank,
    Joe,
    Amh,
    /// `psi_theta(t) = psi((c^theta + t)^(1/theta) - c)`.
    Tilted { base: TiltBase, c: f64 },
}

impl Family {
    pub fn letter(&self) -> char {
        match self {
            Family::Clayton => 'C',
            Family::Gumbel => 'G',
            Family::Frank => 'F',
            Family::Joe => 'J',
            Family::Amh => 'A',
            Family::Tilted { .. } => 'T',
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Clayton => "Clayton",
            Family::Gumbel => "Gumbel",
            Family::Frank => "Frank",
            Family::Joe => "Joe",
            Family::Amh => "AMH",
            Family::Tilted { .. } => "tilted outer power",
        }
    }

    /// Infimum of the admissible parameter range, and whether it is attained.
    pub fn lower_bound(&self) -> (f64, bool) {
        match self {
            Family::Clayton | Family::Frank | Family::Amh => (0.0, false),
            Family::Gumbel | Family::Joe | Family::Tilted { .. } => (1.0, true),
        }
    }

    /// Whether this family and `other` are the same family (for tilted
    /// families: same base and tilt).
    pub fn same_as(&self, other: &Family) -> bool {
        self == other
    }
}

/// A generator family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    family: Family,
    theta: f64,
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Tilted { base, c } => write!(f, "{}({}, {c}, {})", self.family.name(), self.theta, base.keyword()),
            _ => write!(f, "{}({})", self.family.name(), self.theta),
        }
    }
}

impl GeneratorSpec {
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        let ok = theta.is_finite()
            && match family {
                Family::Clayton | Family::Frank => theta > 0.0,
                Family::Gumbel | Family::Joe => theta >= 1.0,
                Family::Amh => theta > 0.0 && theta < 1.0,
                Family::Tilted { c, .. } => theta >= 1.0 && c.is_finite() && c >= 0.0,
            };
        if !ok {
            return Err(Error::Config(format!(
                "parameter {theta} is outside the admissible range of the {} family{}",
                family.name(),
                match family {
                    Family::Tilted { c, .. } => format!(" (tilt {c})"),
                    _ => String::new(),
                }
            )));
        }
        Ok(GeneratorSpec { family, theta })
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        Self::new(Family::Clayton, theta)
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        Self::new(Family::Gumbel, theta)
    }

    pub fn frank(theta: f64) -> Result<Self> {
        Self::new(Family::Frank, theta)
    }

    pub fn joe(theta: f64) -> Result<Self> {
        Self::new(Family::Joe, theta)
    }

    pub fn amh(theta: f64) -> Result<Self> {
        Self::new(Family::Amh, theta)
    }

    pub fn tilted(base: TiltBase, c: f64, theta: f64) -> Result<Self> {
        Self::new(Family::Tilted { base, c }, theta)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same family with a different parameter.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.family, theta)
    }

    /// Whether this generator yields the independence copula.
    pub fn is_independence(&self) -> bool {
        match self.family {
            Family::Gumbel => self.theta == 1.0,
            Family::Tilted { base: TiltBase::Exp, c } => self.theta == 1.0 && c == 0.0,
            _ => false,
        }
    }

    /// The generator `psi(t)` for `t` in `[0, inf]`.
    pub fn psi(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 0.0;
        }
        let th = self.theta;
        match self.family {
            Family::Clayton => (-t.ln_1p() / th).exp(),
            Family::Gumbel => (-t.powf(1.0 / th)).exp(),
            Family::Amh => (1.0 - th) / (t.exp() - th),
            Family::Joe => -(ln_one_minus_exp_neg(t) / th).exp_m1(),
            Family::Frank => {
                let p = -(-th).exp_m1();
                -(-p * (-t).exp()).ln_1p() / th
            }
            Family::Tilted { base, c } => base.psi(tilt_arg(c, th, t)),
        }
    }

    /// `ln psi(t)`, accurate where `psi` underflows.
    pub fn ln_psi(&self, t: f64) -> f64 {
        let th = self.theta;
        match self.family {
            Family::Clayton => -t.ln_1p() / th,
            Family::Gumbel => -t.powf(1.0 / th),
            Family::Amh => (1.0 - th).ln() - t - (-th * (-t).exp()).ln_1p(),
            Family::Tilted { base: TiltBase::Exp, c } => -tilt_arg(c, th, t),
            _ => self.psi(t).ln(),
        }
    }

    /// The inverse generator. `u = 0` maps to `+inf`.
    pub fn psi_inv(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::arg(format!("generator inverse needs u in [0,1], got {u}")));
        }
        if u == 0.0 {
            return Ok(f64::INFINITY);
        }
        if u == 1.0 {
            return Ok(0.0);
        }
        let th = self.theta;
        let v = match self.family {
            Family::Clayton => (-th * u.ln()).exp_m1(),
            Family::Gumbel => (-u.ln()).powf(th),
            Family::Amh => (-th * (1.0 - u)).ln_1p() - u.ln(),
            Family::Joe => -(-(th * (-u).ln_1p()).exp_m1()).ln(),
            Family::Frank => {
                let num = (-th * u).exp_m1();
                let den = (-th).exp_m1();
                -(num / den).ln()
            }
            Family::Tilted { base, c } => {
                let x = base.psi_inv(u);
                (c + x).powf(th) - c.powf(th)
            }
        };
        Ok(v.max(0.0))
    }

    /// `ln((-1)^k psi^(k)(t))` for `t > 0`.
    pub fn log_abs_psi_deriv(&self, k: usize, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Boundary {
                what: "generator derivative argument",
                value: t,
            });
        }
        let nmax = StirlingTables::global().nmax();
        if k > nmax {
            return Err(Error::arg(format!("derivative order {k} exceeds {nmax}")));
        }
        if k == 0 {
            return Ok(self.ln_psi(t));
        }
        let th = self.theta;
        let v = match self.family {
            Family::Clayton => {
                let rising: f64 = (0..k).map(|i| (1.0 / th + i as f64).ln()).sum();
                rising - (k as f64 + 1.0 / th) * t.ln_1p()
            }
            Family::Gumbel => {
                let row = s_poly_row(k, 1.0 / th)?;
                let lt = t.ln();
                let terms: Vec<f64> = (1..=k).map(|j| row[j].value.ln_abs() + j as f64 * lt / th).collect();
                -t.powf(1.0 / th) - k as f64 * lt + log_sum_exp(&terms)
            }
            Family::Amh => {
                let z = th * (-t).exp();
                ((1.0 - th) / th).ln() + polylog_neg(k, z)?
            }
            Family::Frank => {
                let p = -(-th).exp_m1();
                polylog_neg(k - 1, p * (-t).exp())? - th.ln()
            }
            Family::Joe => {
                let lx = -ln_expm1(t);
                let terms: Vec<f64> = (1..=k)
                    .map(|l| {
                        let tables = StirlingTables::global();
                        let ff: f64 = (1..l).map(|j| (j as f64 - 1.0 / th).ln()).sum();
                        tables.ln_s2(k, l) + ff + l as f64 * lx
                    })
                    .collect();
                ln_one_minus_exp_neg(t) / th - th.ln() + log_sum_exp(&terms)
            }
            Family::Tilted { base, c } => {
                let y = c.powf(th) + t;
                let x = y.powf(1.0 / th) - c;
                let row = s_poly_row(k, 1.0 / th)?;
                let ly = y.ln();
                let terms: Vec<f64> = (1..=k)
                    .map(|j| base.ln_abs_deriv(j, x) + (j as f64 / th - k as f64) * ly + row[j].value.ln_abs())
                    .collect();
                log_sum_exp(&terms)
            }
        };
        Ok(v)
    }

    /// `ln(-(psi^-1)'(u))` for `u` in `(0, 1)`.
    pub fn log_neg_psi_inv_prime(&self, u: f64) -> Result<f64> {
        check_open_unit(u)?;
        let th = self.theta;
        let v = match self.family {
            Family::Clayton => th.ln() - (1.0 + th) * u.ln(),
            Family::Gumbel => th.ln() + (th - 1.0) * (-u.ln()).ln() - u.ln(),
            Family::Amh => (1.0 - th).ln() - u.ln() - (-th * (1.0 - u)).ln_1p(),
            Family::Joe => {
                let l1u = (-u).ln_1p();
                th.ln() + (th - 1.0) * l1u - (-(th * l1u).exp_m1()).ln()
            }
            Family::Frank => th.ln() - (th * u).exp_m1().ln(),
            Family::Tilted { base, c } => {
                let x = base.psi_inv(u);
                th.ln() + (th - 1.0) * (c + x).ln() + base.ln_neg_inv_prime(u)
            }
        };
        Ok(v)
    }
}

pub(crate) fn check_open_unit(u: f64) -> Result<()> {
    if u == 0.0 || u == 1.0 {
        return Err(Error::Boundary {
            what: "copula argument",
            value: u,
        });
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::arg(format!("copula argument {u} is outside (0,1)")));
    }
    Ok(())
}

fn tilt_arg(c: f64, theta: f64, t: f64) -> f64 {
    if c == 0.0 {
        t.powf(1.0 / theta)
    } else {
        (c.powf(theta) + t).powf(1.0 / theta) - c
    }
}

/// `ln(1 - exp(-t))` for `t > 0`.
pub(crate) fn ln_one_minus_exp_neg(t: f64) -> f64 {
    if t > std::f64::consts::LN_2 {
        (-(-t).exp()).ln_1p()
    } else {
        (-(-t).exp_m1()).ln()
    }
}

/// `ln(exp(t) - 1)` for `t > 0`.
pub(crate) fn ln_expm1(t: f64) -> f64 {
    if t > 30.0 {
        t + (-(-t).exp()).ln_1p()
    } else {
        t.exp_m1().ln()
    }
}

/// `ln Li_{-n}(z)` for `z` in `(0, 1)`.
///
/// Uses `Li_0(z) = z/(1-z)` and, for `n >= 1`,
/// `Li_{-n}(z) = z sum_k A(n,k) z^k / (1-z)^(n+1)` with Eulerian numbers,
/// whose terms are all positive on `(0, 1)`.
pub fn polylog_neg(n: usize, z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::arg(format!("negative-order polylogarithm needs z in (0,1), got {z}")));
    }
    let lz = z.ln();
    let l1z = (-z).ln_1p();
    if n == 0 {
        return Ok(lz - l1z);
    }
    let row = ln_eulerian_row(n);
    let terms: Vec<f64> = row.iter().enumerate().map(|(k, &la)| la + k as f64 * lz).collect();
    Ok(lz + log_sum_exp(&terms) - (n as f64 + 1.0) * l1z)
}

/// Generator parameter for a given Kendall's tau (Gumbel and Clayton only).
pub fn tau_to_theta(family: Family, tau: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::arg(format!("Kendall's tau {tau} is outside [0,1)")));
    }
    match family {
        Family::Gumbel => Ok(1.0 / (1.0 - tau)),
        Family::Clayton if tau > 0.0 => Ok(2.0 * tau / (1.0 - tau)),
        Family::Clayton => Err(Error::arg("Clayton needs tau > 0")),
        other => Err(Error::unsupported(format!(
            "tau conversion is only provided for Gumbel and Clayton, not {}",
            other.name()
        ))),
    }
}

/// Kendall's tau of the bivariate copula generated by `g`.
pub fn theta_to_tau(g: &GeneratorSpec) -> Result<f64> {
    match g.family() {
        Family::Gumbel => Ok(1.0 - 1.0 / g.theta()),
        Family::Clayton => Ok(g.theta() / (g.theta() + 2.0)),
        other => Err(Error::unsupported(format!(
            "tau conversion is only provided for Gumbel and Clayton, not {}",
            other.name()
        ))),
    }
}
