//! Maximisation of scale-invariant ratios over coefficient space.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{try_map_range, Exec};
use crate::rng::task_rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereOpts {
    pub restarts: usize,
    /// Random directions drawn for the cross-check.
    pub samples: usize,
    /// Forward-difference step on the unit sphere.
    pub fd_step: f64,
    /// Stop once an accepted step improves by less than this, relatively.
    pub rel_improvement: f64,
    pub max_iter: usize,
    /// Allowed relative shortfall of the optimizer against the sampler.
    pub agreement: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SphereOpts {
    fn default() -> Self {
        SphereOpts {
            restarts: 16,
            samples: 10_000,
            fd_step: 1e-6,
            rel_improvement: 1e-8,
            max_iter: 500,
            agreement: 1e-6,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereMax {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub sampled: f64,
    pub iterations: usize,
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

pub fn random_direction<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if normalize(&mut v) > 0.0 {
            return v;
        }
    }
}

/// Projected ascent from `x` with an adaptive step.
fn ascend<F>(f: &F, mut x: Vec<f64>, opts: &SphereOpts) -> Result<(f64, Vec<f64>, usize)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d = x.len();
    let mut fx = f(&x)?;
    let mut step = 0.1;
    let mut iters = 0;
    while iters < opts.max_iter {
        iters += 1;
        let mut grad = vec![0.0; d];
        for i in 0..d {
            let mut y = x.clone();
            y[i] += opts.fd_step;
            grad[i] = (f(&y)? - fx) / opts.fd_step;
        }
        let radial: f64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
        grad.iter_mut().zip(&x).for_each(|(g, xi)| *g -= radial * xi);
        if normalize(&mut grad) == 0.0 {
            break;
        }
        let mut accepted = None;
        while step > 1e-12 {
            let mut y: Vec<f64> = x.iter().zip(&grad).map(|(xi, g)| xi + step * g).collect();
            normalize(&mut y);
            let fy = f(&y)?;
            if fy > fx {
                accepted = Some((y, fy));
                step = (2.0 * step).min(1.0);
                break;
            }
            step *= 0.5;
        }
        let Some((y, fy)) = accepted else { break };
        let gain = fy - fx;
        x = y;
        fx = fy;
        if gain <= opts.rel_improvement * fx.abs() {
            break;
        }
    }
    Ok((fx, x, iters))
}

/// sup of `f` over the unit sphere in R^d by multi-start ascent, checked
/// against uniform random sampling. `f` must be defined on all of R^d∖{0}.
pub fn maximize<F>(f: F, d: usize, opts: &SphereOpts, stream: &[u64]) -> Result<SphereMax>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if d == 1 {
        let v = f(&[1.0])?;
        return Ok(SphereMax { value: v, argmax: vec![1.0], sampled: v, iterations: 0 });
    }
    let path = |tag: u64, i: usize| {
        let mut p = stream.to_vec();
        p.extend([tag, i as u64]);
        p
    };
    let runs = try_map_range(opts.exec, opts.restarts.max(1), |i| {
        let x0 = random_direction(&mut task_rng(opts.seed, &path(0, i)), d);
        ascend(&f, x0, opts)
    })?;
    let sampled = try_map_range(opts.exec, opts.samples, |i| {
        f(&random_direction(&mut task_rng(opts.seed, &path(1, i)), d))
    })?
    .into_iter()
    .fold(0.0, f64::max);
    let iterations = runs.iter().map(|r| r.2).sum();
    let (value, argmax, _) =
        runs.into_iter().fold((f64::NEG_INFINITY, Vec::new(), 0), |a, b| if b.0 > a.0 { b } else { a });
    if value < sampled * (1.0 - opts.agreement) {
        return Err(Error::Nonconvergence { optimizer: value, sampler: sampled });
    }
    Ok(SphereMax { value, argmax, sampled, iterations })
}
