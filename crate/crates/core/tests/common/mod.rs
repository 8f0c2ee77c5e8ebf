//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use statrs::function::erf::erfc;

/// Logistic `p0 / (1 + exp(-(a t - b)))` and its first two derivatives,
/// written out directly.
#[derive(Debug, Clone, Copy)]
pub struct Logistic {
    pub p0: f64,
    pub a: f64,
    pub b: f64,
}

impl Logistic {
    pub fn value(&self, t: f64) -> f64 {
        self.p0 / (1.0 + (-(self.a * t - self.b)).exp())
    }

    pub fn slope(&self, t: f64) -> f64 {
        let e = (-(self.a * t - self.b)).exp();
        self.p0 * self.a * e / ((1.0 + e) * (1.0 + e))
    }

    pub fn curvature(&self, t: f64) -> f64 {
        let e = (-(self.a * t - self.b)).exp();
        self.p0 * self.a * self.a * e * (e - 1.0) / (1.0 + e).powi(3)
    }
}

/// First-passage accuracy `Phi((beta t - eta) / (sigma sqrt t))` with the
/// closed-form second derivative.
#[derive(Debug, Clone, Copy)]
pub struct DriftDiffusion {
    pub drift: f64,
    pub diffusion: f64,
    pub threshold: f64,
}

impl DriftDiffusion {
    fn z(&self, t: f64) -> f64 {
        (self.drift * t - self.threshold) / (self.diffusion * t.sqrt())
    }

    fn dz(&self, t: f64) -> f64 {
        (self.drift * t + self.threshold) / (2.0 * self.diffusion * t.powf(1.5))
    }

    fn d2z(&self, t: f64) -> f64 {
        -(self.drift * t + 3.0 * self.threshold) / (4.0 * self.diffusion * t.powf(2.5))
    }

    fn pdf(z: f64) -> f64 {
        (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    pub fn value(&self, t: f64) -> f64 {
        0.5 * erfc(-self.z(t) / std::f64::consts::SQRT_2)
    }

    pub fn slope(&self, t: f64) -> f64 {
        Self::pdf(self.z(t)) * self.dz(t)
    }

    pub fn curvature(&self, t: f64) -> f64 {
        let z = self.z(t);
        let dz = self.dz(t);
        Self::pdf(z) * (self.d2z(t) - z * dz * dz)
    }
}

/// Five-point central difference.
pub fn derivative_fd(g: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (g(t - 2.0 * h) - 8.0 * g(t - h) + 8.0 * g(t + h) - g(t + 2.0 * h)) / (12.0 * h)
}

/// Queue problem used by the grid oracles.
#[derive(Debug, Clone, Copy)]
pub struct GridProblem {
    pub initial_queue: f64,
    pub arrival_rate: f64,
    pub penalty_rate: f64,
    pub horizon: usize,
}

pub const QUEUE_TOLERANCE: f64 = 1e-12;

impl GridProblem {
    /// Staged objective: mean over stages of reward minus waiting penalty
    /// minus within-service arrival penalty, with the unclipped queue.
    pub fn staged_objective(&self, f: &dyn Fn(f64) -> f64, t: &[f64]) -> f64 {
        let (n1, lambda, c) = (self.initial_queue, self.arrival_rate, self.penalty_rate);
        let mut sum = 0.0;
        for l in 0..t.len() {
            let before: f64 = t[..l].iter().sum();
            let queue = n1 - l as f64 + lambda * before;
            sum += f(t[l]) - c * queue * t[l] - 0.5 * c * lambda * t[l] * t[l];
        }
        sum / t.len() as f64
    }

    /// Every clipped expected queue length stays positive.
    pub fn feasible(&self, t: &[f64]) -> bool {
        let mut n = self.initial_queue;
        for &tl in t {
            if n <= QUEUE_TOLERANCE {
                return false;
            }
            n = (n - 1.0 + self.arrival_rate * tl).max(0.0);
        }
        true
    }

    /// Best objective over the grid `{0, h, 2h, ..} ^ N` within `[0, t_max]`
    /// among feasible points, together with the zero allocation.
    ///
    /// Exact search by dynamic programming over the prefix sum: the objective
    /// is `sum_l g_l(t_l) - c lambda S^2 / 2` with `S = sum t`, and queue
    /// positivity at stage `l` depends on the prefix sum before it.
    pub fn grid_optimum(&self, f: &dyn Fn(f64) -> f64, step: f64, t_max: f64) -> f64 {
        let (n1, lambda, c) = (self.initial_queue, self.arrival_rate, self.penalty_rate);
        let points = (t_max / step).round() as usize + 1;
        let big = self.horizon * (points - 1) + 1;
        let mut best = vec![f64::NEG_INFINITY; big];
        best[0] = 0.0;
        for l in 0..self.horizon {
            let rate = c * (n1 - l as f64);
            let gain: Vec<f64> = (0..points)
                .map(|i| {
                    let t = i as f64 * step;
                    f(t) - rate * t
                })
                .collect();
            let mut next = vec![f64::NEG_INFINITY; big];
            for (k, &acc) in best.iter().enumerate() {
                if acc == f64::NEG_INFINITY {
                    continue;
                }
                let queue = n1 - l as f64 + lambda * k as f64 * step;
                if queue <= QUEUE_TOLERANCE {
                    continue;
                }
                for (i, g) in gain.iter().enumerate() {
                    let v = acc + g;
                    if v > next[k + i] {
                        next[k + i] = v;
                    }
                }
            }
            best = next;
        }
        let grid = best
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > f64::NEG_INFINITY)
            .map(|(k, v)| {
                let s = k as f64 * step;
                (v - 0.5 * c * lambda * s * s) / self.horizon as f64
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let zero = self.staged_objective(f, &vec![0.0; self.horizon]);
        grid.max(zero)
    }

    /// Plain nested-loop version for `N <= 2`.
    pub fn brute_force(&self, f: &dyn Fn(f64) -> f64, step: f64, t_max: f64) -> f64 {
        let points = (t_max / step).round() as usize + 1;
        let zero = self.staged_objective(f, &vec![0.0; self.horizon]);
        let mut best = f64::NEG_INFINITY;
        match self.horizon {
            1 => {
                for i in 0..points {
                    let t = [i as f64 * step];
                    if self.feasible(&t) {
                        best = best.max(self.staged_objective(f, &t));
                    }
                }
            }
            2 => {
                for i in 0..points {
                    for j in 0..points {
                        let t = [i as f64 * step, j as f64 * step];
                        if self.feasible(&t) {
                            best = best.max(self.staged_objective(f, &t));
                        }
                    }
                }
            }
            _ => panic!("brute force only for horizons 1 and 2"),
        }
        best.max(zero)
    }
}
