use super::{RadialEigenpair, RadialProblem};

/// Piecewise quintic Hermite interpolant of a radial eigenfunction, built from
/// the stored g, g' and g'' taken from the ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    start: f64,
    step: f64,
    g: Vec<f64>,
    gp: Vec<f64>,
    gpp: Vec<f64>,
}

impl RadialProfile {
    pub fn new(pair: &RadialEigenpair, problem: &RadialProblem) -> Self {
        let n = pair.grid.len();
        let start = pair.grid[0];
        let step = (pair.grid[n - 1] - start) / (n - 1) as f64;
        let mut gpp = Vec::with_capacity(n);
        for i in 0..n {
            let r = pair.grid[i];
            let (g, gp) = (pair.g_values[i], pair.g_prime_values[i]);
            let value = if r > 0.0 {
                problem.second_derivative(pair.mu, r, g, gp)
            } else {
                match problem.angular_index_l {
                    0 => 2.0 * problem.series_coefficient(pair.mu) * g,
                    2 => 2.0 * pair.g_values[1] / (pair.grid[1] * pair.grid[1]),
                    _ => 0.0,
                }
            };
            gpp.push(value);
        }
        Self { start, step, g: pair.g_values.clone(), gp: pair.g_prime_values.clone(), gpp }
    }

    pub fn inner_radius(&self) -> f64 {
        self.start
    }

    pub fn outer_radius(&self) -> f64 {
        self.start + self.step * (self.g.len() - 1) as f64
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let last = self.g.len() - 2;
        let x = ((r - self.start) / self.step).max(0.0);
        let i = (x.floor() as usize).min(last);
        (i, x - i as f64)
    }

    /// (g(r), g'(r)); r is clamped to the stored interval.
    pub fn evaluate(&self, r: f64) -> (f64, f64) {
        let (i, t) = self.locate(r.clamp(self.start, self.outer_radius()));
        let h = self.step;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);

        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;

        let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let d2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let d3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
        let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let d5 = -d0;

        let (p0, p1) = (self.g[i], self.g[i + 1]);
        let (q0, q1) = (self.gp[i], self.gp[i + 1]);
        let (s0, s1) = (self.gpp[i], self.gpp[i + 1]);
        let value = h0 * p0 + h * h1 * q0 + h * h * h2 * s0 + h5 * p1 + h * h4 * q1 + h * h * h3 * s1;
        let slope = (d0 * p0 + h * d1 * q0 + h * h * d2 * s0 + d5 * p1 + h * d4 * q1 + h * h * d3 * s1) / h;
        (value, slope)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.evaluate(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.evaluate(r).1
    }
}
