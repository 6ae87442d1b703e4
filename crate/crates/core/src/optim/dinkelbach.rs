use crate::error::{Error, Result};

/// A ratio `numerator(x) / denominator(x)` to maximize over some feasible set,
/// together with an oracle for the parametric problem
/// `max_x numerator(x) - lambda * denominator(x)`.
pub trait FractionalProgram {
    type Point: Clone;

    fn numerator(&self, x: &Self::Point) -> f64;

    /// Must be strictly positive on the feasible set.
    fn denominator(&self, x: &Self::Point) -> f64;

    fn maximize_parametric(&self, lambda: f64) -> Result<Self::Point>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DinkelbachOptions {
    pub lambda0: f64,
    pub eps: f64,
    pub max_iters: usize,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        DinkelbachOptions {
            lambda0: 0.01,
            eps: 1e-5,
            max_iters: 50,
        }
    }
}

/// One outer step: the parameter used and the parametric optimum `F(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DinkelbachStep {
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DinkelbachOutcome<P> {
    pub point: P,
    /// Ratio at `point`.
    pub ratio: f64,
    pub iterations: usize,
    pub trace: Vec<DinkelbachStep>,
}

/// Dinkelbach's parametric method. Stops as soon as `F(lambda_n) < eps`.
pub fn dinkelbach<P: FractionalProgram>(
    program: &P,
    opts: DinkelbachOptions,
) -> Result<DinkelbachOutcome<P::Point>> {
    if !(opts.eps > 0.0) {
        return Err(Error::domain("dinkelbach eps must be positive"));
    }
    let mut lambda = opts.lambda0;
    let mut trace = Vec::new();
    for it in 1..=opts.max_iters {
        let x = program.maximize_parametric(lambda)?;
        let num = program.numerator(&x);
        let den = program.denominator(&x);
        if !(den > 0.0) {
            return Err(Error::domain(format!(
                "denominator must be positive, got {den}"
            )));
        }
        let value = num - lambda * den;
        trace.push(DinkelbachStep { lambda, value });
        if value < opts.eps {
            return Ok(DinkelbachOutcome {
                point: x,
                ratio: num / den,
                iterations: it,
                trace,
            });
        }
        lambda = num / den;
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iters,
        trace: trace.iter().map(|s| s.value).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::golden::golden_section_max;
    use approx::assert_abs_diff_eq;

    struct OneDim<N, D> {
        lo: f64,
        hi: f64,
        num: N,
        den: D,
    }

    impl<N: Fn(f64) -> f64, D: Fn(f64) -> f64> FractionalProgram for OneDim<N, D> {
        type Point = f64;
        fn numerator(&self, x: &f64) -> f64 {
            (self.num)(*x)
        }
        fn denominator(&self, x: &f64) -> f64 {
            (self.den)(*x)
        }
        fn maximize_parametric(&self, lambda: f64) -> Result<f64> {
            golden_section_max(|x| (self.num)(x) - lambda * (self.den)(x), self.lo, self.hi, 1e-12)
                .map(|(x, _)| x)
        }
    }

    #[test]
    fn linear_over_constant() {
        let p = OneDim {
            lo: 0.0,
            hi: 1.0,
            num: |x| x,
            den: |_| 1.0,
        };
        let out = dinkelbach(&p, DinkelbachOptions::default()).unwrap();
        assert_abs_diff_eq!(out.point, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.ratio, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn log_over_linear_hits_left_end() {
        let p = OneDim {
            lo: 0.5,
            hi: 2.0,
            num: |x: f64| (1.0 + x).ln(),
            den: |x| x,
        };
        let out = dinkelbach(&p, DinkelbachOptions::default()).unwrap();
        assert_abs_diff_eq!(out.point, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(out.ratio, 1.5f64.ln() / 0.5, epsilon = 1e-9);
        assert!(out.iterations <= 50);
        // lambda sequence is non-decreasing and F is decreasing
        for w in out.trace.windows(2) {
            assert!(w[1].lambda >= w[0].lambda);
            assert!(w[1].value <= w[0].value + 1e-12);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = OneDim {
            lo: 0.5,
            hi: 2.0,
            num: |x: f64| (1.0 + x).ln(),
            den: |x| x,
        };
        let opts = DinkelbachOptions {
            max_iters: 1,
            eps: 1e-300,
            ..Default::default()
        };
        assert!(matches!(dinkelbach(&p, opts), Err(Error::NonConvergence { iterations: 1, .. })));
    }
}
