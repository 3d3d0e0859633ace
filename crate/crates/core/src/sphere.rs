//! Riemannian gradient ascent on the unit sphere of state vectors.
//!
//! Steps move along the tangent-projected gradient, retract by
//! renormalization and are accepted by a backtracking Armijo test.

use serde::Serialize;

use crate::error::Result;
use crate::tensor::matrix::{dot, norm_sqr, C64};
use crate::tensor::PureState;

/// A smooth function on normalized states with a gradient for its natural
/// extension to unnormalized vectors.
pub trait SphereObjective: Sync {
    /// Value at a normalized state.
    fn value(&self, s: &PureState) -> Result<f64>;

    /// Euclidean gradient with respect to (Re, Im) of each amplitude, packed
    /// as complex numbers: `df = Re⟨g|dψ⟩`.
    fn euclidean_gradient(&self, s: &PureState) -> Result<Vec<C64>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AscentConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub backtrack: f64,
    pub min_step: f64,
    pub armijo: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            grad_tol: 1e-8,
            initial_step: 0.1,
            max_step: 10.0,
            backtrack: 0.5,
            min_step: 1e-20,
            armijo: 1e-4,
        }
    }
}

/// Expected gains below this many ulps of |f| are not tested on values.
const RESOLUTION_ULPS: f64 = 1e3;
/// Largest value loss tolerated for a step accepted on slope alone.
const MONOTONE_SLACK: f64 = 1e-12;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    #[serde(skip)]
    pub state: PureState,
    pub start_value: f64,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Objective after every accepted step, starting with the initial value.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl Trajectory {
    pub fn converged(&self) -> bool {
        self.termination == Termination::GradientTolerance
    }
}

/// `g − Re⟨s|g⟩ s` for normalized `s`.
pub fn tangent_project(s: &[C64], g: &[C64]) -> Vec<C64> {
    let radial = dot(s, g).re;
    g.iter().zip(s).map(|(gi, si)| gi - si * radial).collect()
}

/// Tangent-space gradient of `objective` at normalized `s`.
pub fn riemannian_gradient<O: SphereObjective + ?Sized>(
    objective: &O,
    s: &PureState,
) -> Result<Vec<C64>> {
    Ok(tangent_project(s.amps(), &objective.euclidean_gradient(s)?))
}

/// Ascends (or descends) `objective` from `start` until the tangent gradient
/// norm drops below `config.grad_tol`.
pub fn optimize<O: SphereObjective + ?Sized>(
    objective: &O,
    start: &PureState,
    sense: Sense,
    config: &AscentConfig,
) -> Result<Trajectory> {
    let sign = sense.sign();
    let mut x = start.normalized()?;
    let mut f = sign * objective.value(&x)?;
    let start_value = sign * f;
    let mut history = vec![start_value];
    let mut step = config.initial_step;
    let mut iterations = 0;
    let ascent_gradient = |s: &PureState| -> Result<Vec<C64>> {
        Ok(riemannian_gradient(objective, s)?
            .into_iter()
            .map(|z| z * sign)
            .collect())
    };
    let mut g = ascent_gradient(&x)?;

    loop {
        let gn2 = norm_sqr(&g);
        let grad_norm = gn2.sqrt();
        let termination = if grad_norm < config.grad_tol {
            Some(Termination::GradientTolerance)
        } else if iterations >= config.max_iters {
            Some(Termination::MaxIterations)
        } else {
            None
        };
        if let Some(termination) = termination {
            return Ok(Trajectory {
                state: x,
                start_value,
                value: sign * f,
                grad_norm,
                iterations,
                termination,
                history,
            });
        }

        // Once the expected gain t·‖g‖² drops to the rounding level of f, value
        // comparisons are meaningless; steps are then accepted when the slope
        // along the search direction at the trial point is still nonnegative.
        let noise = RESOLUTION_ULPS * f64::EPSILON * f.abs().max(1.0);
        let mut t = step;
        let accepted = loop {
            let y_amps: Vec<C64> = x.amps().iter().zip(&g).map(|(a, b)| a + b * t).collect();
            let y = x.with_amps(y_amps)?.normalized()?;
            let fy = sign * objective.value(&y)?;
            if t * gn2 > noise {
                if fy - f >= config.armijo * t * gn2 {
                    break Some((y, fy, t, None));
                }
            } else {
                let gy = ascent_gradient(&y)?;
                if dot(&gy, &g).re >= 0.0 && fy - f >= -MONOTONE_SLACK {
                    break Some((y, fy, t, Some(gy)));
                }
            }
            t *= config.backtrack;
            if t < config.min_step {
                break None;
            }
        };
        match accepted {
            Some((y, fy, t, gy)) => {
                g = match gy {
                    Some(gy) => gy,
                    None => ascent_gradient(&y)?,
                };
                x = y;
                f = fy;
                history.push(sign * f);
                step = (t / config.backtrack).min(config.max_step);
                iterations += 1;
            }
            None => {
                return Ok(Trajectory {
                    state: x,
                    start_value,
                    value: sign * f,
                    grad_norm,
                    iterations,
                    termination: Termination::LineSearchFailed,
                    history,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rayleigh quotient `⟨ψ|H|ψ⟩` of a real diagonal H.
    struct Rayleigh(Vec<f64>);

    impl SphereObjective for Rayleigh {
        fn value(&self, s: &PureState) -> Result<f64> {
            Ok(s.amps()
                .iter()
                .zip(&self.0)
                .map(|(z, h)| z.norm_sqr() * h)
                .sum())
        }

        fn euclidean_gradient(&self, s: &PureState) -> Result<Vec<C64>> {
            Ok(s.amps()
                .iter()
                .zip(&self.0)
                .map(|(z, h)| z * (2.0 * h))
                .collect())
        }
    }

    #[test]
    fn finds_top_and_bottom_eigenvalue() {
        let h = Rayleigh(vec![0.3, -1.0, 2.5, 1.0]);
        let start = PureState::from_real(vec![2, 2], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let top = optimize(&h, &start, Sense::Maximize, &AscentConfig::default()).unwrap();
        assert!(top.converged());
        assert!((top.value - 2.5).abs() < 1e-12);
        let bottom = optimize(&h, &start, Sense::Minimize, &AscentConfig::default()).unwrap();
        assert!(bottom.converged());
        assert!((bottom.value + 1.0).abs() < 1e-12);
        assert!(top.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(bottom.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn stationary_start_stops_immediately() {
        let h = Rayleigh(vec![1.0, 0.0]);
        let start = PureState::zeros(1).unwrap();
        let t = optimize(&h, &start, Sense::Maximize, &AscentConfig::default()).unwrap();
        assert_eq!(t.iterations, 0);
        assert_eq!(t.termination, Termination::GradientTolerance);
    }

    #[test]
    fn projection_is_tangent() {
        let s = PureState::from_real(vec![2], &[0.6, 0.8]).unwrap();
        let g = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25)];
        let t = tangent_project(s.amps(), &g);
        assert!(dot(s.amps(), &t).re.abs() < 1e-15);
    }
}
