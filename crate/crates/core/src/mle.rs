//! Two-parameter likelihood: the root generator gets `theta0`, every other
//! node `theta1`.

use std::io::Write;

use rayon::prelude::*;

use crate::density::log_density;
use crate::error::{Error, Result};
use crate::sampling::SampleMatrix;
use crate::tree::NacTree;

/// Copy of `template` with the root parameter set to `theta[0]` and all
/// other node parameters set to `theta[1]`.
pub fn instantiate(template: &NacTree, theta: [f64; 2]) -> Result<NacTree> {
    template.map_generators(&|depth, g| g.with_theta(if depth == 0 { theta[0] } else { theta[1] }))
}

/// Checks every row of `data` against the dimension of `template` and the
/// open unit interval.
pub fn check_data(template: &NacTree, data: &SampleMatrix) -> Result<()> {
    let d = template.dim();
    if data.ncols() != d && data.nrows() > 0 {
        return Err(Error::Data {
            row: 1,
            msg: format!("data has {} columns, structure has {d}", data.ncols()),
        });
    }
    for (i, r) in data.rows().enumerate() {
        if let Some(x) = r.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
            return Err(Error::Data {
                row: i + 1,
                msg: format!("value {x} is not in (0, 1)"),
            });
        }
    }
    Ok(())
}

fn nll_checked(template: &NacTree, theta: [f64; 2], data: &SampleMatrix, parallel: bool) -> Result<f64> {
    let tree = match instantiate(template, theta) {
        Ok(t) => t,
        Err(Error::Config(_)) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    let eval = |(i, r): (usize, &[f64])| {
        log_density(&tree, r).map(|l| l.value).map_err(|e| match e {
            Error::Boundary { value, .. } => Error::Data {
                row: i + 1,
                msg: format!("value {value} is not in (0, 1)"),
            },
            other => other,
        })
    };
    let logs: Vec<f64> = if parallel {
        data.rows().collect::<Vec<_>>().into_par_iter().enumerate().map(eval).collect::<Result<_>>()?
    } else {
        data.rows().enumerate().map(eval).collect::<Result<_>>()?
    };
    Ok(-logs.iter().sum::<f64>())
}

/// `-sum_i log c(u_i)`; `+inf` when `theta` violates the nesting or
/// parameter constraints.
pub fn nll(template: &NacTree, theta: [f64; 2], data: &SampleMatrix) -> Result<f64> {
    check_data(template, data)?;
    nll_checked(template, theta, data, true)
}

/// Evenly spaced grid including both end points.
pub fn linspace(a: f64, b: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![a],
        _ => (0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect(),
    }
}

/// Negative log-likelihood over a `theta0 x theta1` grid, row-major with
/// `theta0` varying slowest. Infeasible cells hold `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub theta0: Vec<f64>,
    pub theta1: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridScan {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.theta1.len() + j]
    }

    /// Grid indices of the smallest finite value.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        let m = self.theta1.len();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(idx, _)| (idx / m, idx % m))
    }

    /// Writes `theta0,theta1,nll` rows (header optional); infeasible cells
    /// are written as `inf`.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        let io = |e: std::io::Error| Error::arg(format!("write failed: {e}"));
        if header {
            writeln!(w, "theta0,theta1,nll").map_err(io)?;
        }
        for (i, t0) in self.theta0.iter().enumerate() {
            for (j, t1) in self.theta1.iter().enumerate() {
                let v = self.get(i, j);
                if v.is_finite() {
                    writeln!(w, "{t0},{t1},{v}").map_err(io)?;
                } else {
                    writeln!(w, "{t0},{t1},inf").map_err(io)?;
                }
            }
        }
        w.flush().map_err(io)
    }
}

pub fn grid_scan(template: &NacTree, theta0: &[f64], theta1: &[f64], data: &SampleMatrix) -> Result<GridScan> {
    check_data(template, data)?;
    let cells: Vec<(f64, f64)> = theta0.iter().flat_map(|&a| theta1.iter().map(move |&b| (a, b))).collect();
    let values = cells
        .par_iter()
        .map(|&(a, b)| {
            if a > b {
                Ok(f64::INFINITY)
            } else {
                nll_checked(template, [a, b], data, false)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GridScan {
        theta0: theta0.to_vec(),
        theta1: theta1.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: [f64; 2],
    pub nll_min: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `theta0` and `theta1` ended up (numerically) equal.
    pub constraint_active: bool,
}

pub const FIT_MAX_ITER: usize = 500;
pub const FIT_TOL: f64 = 1e-6;
const MIN_GAP: f64 = 1e-8;

/// Minimizes [`nll`] with Nelder-Mead over
/// `(ln(theta0 - L), ln(theta1 - theta0))`, `L` the root family's lower
/// bound, so that `L <= theta0 <= theta1` holds throughout.
pub fn fit2(template: &NacTree, data: &SampleMatrix, init: [f64; 2]) -> Result<FitResult> {
    check_data(template, data)?;
    let lower = template.generator().family().lower_bound().0;
    let to_theta = |x: &[f64; 2]| {
        let t0 = lower + x[0].exp();
        [t0, t0 + x[1].exp()]
    };
    let x0 = [(init[0] - lower).max(MIN_GAP).ln(), (init[1] - init[0]).max(MIN_GAP).ln()];
    let mut err = None;
    let mut f = |x: &[f64; 2]| -> f64 {
        match nll_checked(template, to_theta(x), data, true) {
            Ok(v) if v.is_nan() => f64::INFINITY,
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let nm = nelder_mead(&mut f, x0, 0.25, FIT_TOL, FIT_MAX_ITER);
    if let Some(e) = err {
        return Err(e);
    }
    let theta_hat = to_theta(&nm.x);
    Ok(FitResult {
        theta_hat,
        nll_min: nm.fx,
        iterations: nm.iterations,
        converged: nm.converged,
        constraint_active: theta_hat[1] - theta_hat[0] < 1e-4,
    })
}

struct NmResult {
    x: [f64; 2],
    fx: f64,
    iterations: usize,
    converged: bool,
}

fn nelder_mead<F: FnMut(&[f64; 2]) -> f64>(f: &mut F, x0: [f64; 2], step: f64, tol: f64, max_iter: usize) -> NmResult {
    let mut simplex = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut fs = [f(&simplex[0]), f(&simplex[1]), f(&simplex[2])];
    let lin = |a: &[f64; 2], b: &[f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        fs = [fs[order[0]], fs[order[1]], fs[order[2]]];
        let diameter = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| ((simplex[i][0] - simplex[j][0]).powi(2) + (simplex[i][1] - simplex[j][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        if diameter < tol {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let worst = simplex[2];
        let xr = lin(&centroid, &worst, -1.0);
        let fr = f(&xr);
        if fr < fs[0] {
            let xe = lin(&centroid, &worst, -2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[2] = xe;
                fs[2] = fe;
            } else {
                simplex[2] = xr;
                fs[2] = fr;
            }
        } else if fr < fs[1] {
            simplex[2] = xr;
            fs[2] = fr;
        } else {
            let (xc, fc) = if fr < fs[2] {
                let xc = lin(&centroid, &xr, 0.5);
                (xc, f(&xc))
            } else {
                let xc = lin(&centroid, &worst, 0.5);
                (xc, f(&xc))
            };
            if fc < fs[2].min(fr) {
                simplex[2] = xc;
                fs[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lin(&simplex[0], &simplex[i], 0.5);
                    fs[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).unwrap_or(0);
    NmResult {
        x: simplex[best],
        fx: fs[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::sampling::sample_nested;

    #[test]
    fn nelder_mead_rosenbrock() {
        let mut f = |x: &[f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&mut f, [-1.2, 1.0], 0.5, 1e-9, 5000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn instantiate_sets_levels() {
        let t = parse("G(1.1; 1, G(1.2; G(1.3; 2, 3), 4))").unwrap();
        let s = instantiate(&t, [1.5, 2.5]).unwrap();
        assert_eq!(s.to_string(), "G(1.5; 1, G(2.5; G(2.5; 2, 3), 4))");
        assert!(matches!(instantiate(&t, [2.5, 1.5]), Err(Error::Config(_))));
    }

    #[test]
    fn independence_nll_zero_and_infeasible_inf() {
        let t = parse("G(1; 1, G(1; 2, 3))").unwrap();
        let data = SampleMatrix::from_rows(vec![vec![0.2, 0.5, 0.7], vec![0.9, 0.1, 0.4]]).unwrap();
        assert!(nll(&t, [1.0, 1.0], &data).unwrap().abs() < 1e-13);
        assert_eq!(nll(&t, [2.0, 1.5], &data).unwrap(), f64::INFINITY);
    }

    #[test]
    fn data_errors_name_row() {
        let t = parse("G(1.5; 1, G(2; 2, 3))").unwrap();
        let data = SampleMatrix::from_rows(vec![vec![0.2, 0.5, 0.7], vec![0.9, 1.0, 0.4]]).unwrap();
        assert!(matches!(nll(&t, [1.5, 2.0], &data), Err(Error::Data { row: 2, .. })));
    }

    #[test]
    fn grid_matches_pointwise_and_csv() {
        let t = parse("G(1.5; 1, G(2; 2, 3))").unwrap();
        let data = sample_nested(&t, 40, 5).unwrap();
        let g0 = linspace(1.1, 2.0, 3);
        let g1 = linspace(1.5, 2.5, 4);
        let scan = grid_scan(&t, &g0, &g1, &data).unwrap();
        assert_eq!(scan.values.len(), 12);
        for (i, &a) in g0.iter().enumerate() {
            for (j, &b) in g1.iter().enumerate() {
                let v = nll(&t, [a, b], &data).unwrap();
                assert_eq!(scan.get(i, j).to_bits(), v.to_bits());
            }
        }
        let mut buf = Vec::new();
        scan.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta0,theta1,nll\n"));
        assert_eq!(text.lines().count(), 13);
        assert!(text.contains(",inf\n"));
    }

    #[test]
    fn fit_descends_from_truth() {
        let t = parse("G(1.3333333333333333; 1, G(2; 2, 3, 4))").unwrap();
        let data = sample_nested(&t, 100, 9).unwrap();
        let init = [4.0 / 3.0, 2.0];
        let r = fit2(&t, &data, init).unwrap();
        assert!(r.converged);
        assert!(r.nll_min <= nll(&t, init, &data).unwrap());
    }
}
