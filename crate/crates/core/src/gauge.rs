//! Monotone gauges: nondecreasing maps R with R(0) = 0 and R(t) > 0 for
//! t > 0, used to weight the summation criteria.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum MonotoneGauge {
    Identity,
    /// R(t) = t^p with p > 0.
    Power(f64),
    /// Piecewise-linear table through the listed knots, extrapolated
    /// beyond the last knot with the final slope.
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl MonotoneGauge {
    pub fn identity() -> Self {
        MonotoneGauge::Identity
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gauge power exponent must be > 0, got {p}"
            )));
        }
        Ok(MonotoneGauge::Power(p))
    }

    pub fn table(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InvalidParameter(
                "gauge table needs at least two knots".into(),
            ));
        }
        if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter(
                "gauge table knots must be finite".into(),
            ));
        }
        if pairs[0] != (0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "gauge table must start at the knot (0, 0)".into(),
            ));
        }
        for w in pairs.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter(
                    "gauge table abscissae must be strictly increasing".into(),
                ));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidParameter(
                    "gauge table values must be nondecreasing".into(),
                ));
            }
        }
        if pairs.iter().skip(1).any(|&(_, y)| y <= 0.0) {
            return Err(Error::InvalidParameter(
                "gauge table must be positive beyond zero".into(),
            ));
        }
        Ok(MonotoneGauge::Table {
            xs: pairs.iter().map(|p| p.0).collect(),
            ys: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self {
            MonotoneGauge::Identity => t,
            MonotoneGauge::Power(p) => t.powf(*p),
            MonotoneGauge::Table { xs, ys } => {
                let n = xs.len();
                if t >= xs[n - 1] {
                    let slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
                    return ys[n - 1] + slope * (t - xs[n - 1]);
                }
                let k = xs.partition_point(|&x| x <= t);
                if k == 0 {
                    return ys[0];
                }
                if xs[k - 1] == t {
                    return ys[k - 1];
                }
                let w = (t - xs[k - 1]) / (xs[k] - xs[k - 1]);
                ys[k - 1] + w * (ys[k] - ys[k - 1])
            }
        }
    }

    /// Inverse at `y >= 0`. Closed form for identity and powers; monotone
    /// bisection to 1e-12 absolute for tables (which must be strictly
    /// increasing on the inverted range for the answer to be unique).
    pub fn inverse(&self, y: f64) -> f64 {
        debug_assert!(y >= 0.0);
        match self {
            MonotoneGauge::Identity => y,
            MonotoneGauge::Power(p) => y.powf(1.0 / *p),
            MonotoneGauge::Table { xs, .. } => {
                if y <= 0.0 {
                    return 0.0;
                }
                // bracket, extending past the table by its final slope
                let mut hi = xs[xs.len() - 1].max(1.0);
                while self.eval(hi) < y {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return hi;
                    }
                }
                let mut lo = 0.0f64;
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MonotoneGauge::Identity => "identity".into(),
            MonotoneGauge::Power(p) => format!("power({p})"),
            MonotoneGauge::Table { xs, .. } => format!("table({} knots)", xs.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_power() {
        let id = MonotoneGauge::identity();
        assert_eq!(id.eval(2.5), 2.5);
        assert_eq!(id.inverse(2.5), 2.5);
        let sq = MonotoneGauge::power(2.0).unwrap();
        assert_eq!(sq.eval(3.0), 9.0);
        assert!((sq.inverse(9.0) - 3.0).abs() < 1e-12);
        assert!(MonotoneGauge::power(0.0).is_err());
    }

    #[test]
    fn table_eval_and_inverse() {
        let g = MonotoneGauge::table(&[(0.0, 0.0), (1.0, 2.0), (3.0, 8.0)]).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(1.0), 2.0);
        assert!((g.eval(2.0) - 5.0).abs() < 1e-12);
        // extrapolation with final slope 3
        assert!((g.eval(4.0) - 11.0).abs() < 1e-12);
        assert!((g.inverse(5.0) - 2.0).abs() < 1e-10);
        assert!((g.inverse(11.0) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn table_validation() {
        assert!(MonotoneGauge::table(&[(0.0, 0.0)]).is_err());
        assert!(MonotoneGauge::table(&[(0.5, 0.0), (1.0, 1.0)]).is_err());
        assert!(MonotoneGauge::table(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(MonotoneGauge::table(&[(0.0, 0.0), (1.0, 2.0), (0.5, 3.0)]).is_err());
        assert!(MonotoneGauge::table(&[(0.0, 0.0), (f64::NAN, 1.0)]).is_err());
        assert!(MonotoneGauge::table(&[(0.0, 0.0), (1.0, f64::INFINITY)]).is_err());
    }
}
