//! Fixed-step RK4 with step halving until successive resolutions agree.

use crate::Result;

/// Outcome of a refined integration.
#[derive(Debug, Clone)]
pub struct Refined {
    pub state: Vec<f64>,
    pub steps: usize,
    /// Max-abs difference between the last two resolutions.
    pub change: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Refinement {
    pub initial_steps: usize,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            initial_steps: 16,
            max_steps: 1 << 14,
            tol: 1e-8,
        }
    }
}

impl Refinement {
    pub fn with_tol(tol: f64) -> Self {
        Refinement {
            tol,
            ..Refinement::default()
        }
    }
}

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let k1 = f(t, y)?;
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
    let k2 = f(t + 0.5 * h, &y2)?;
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
    let k3 = f(t + 0.5 * h, &y3)?;
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
    let k4 = f(t + h, &y4)?;
    Ok((0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Integrate from `t0` to `t1` in `steps` equal steps, returning every state.
pub fn rk4_path<F>(f: &F, t0: f64, t1: f64, y0: &[f64], steps: usize) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.to_vec());
    let mut y = y0.to_vec();
    for s in 0..steps {
        y = rk4_step(f, t0 + s as f64 * h, &y, h)?;
        out.push(y.clone());
    }
    Ok(out)
}

pub fn rk4<F>(f: &F, t0: f64, t1: f64, y0: &[f64], steps: usize) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    for s in 0..steps {
        y = rk4_step(f, t0 + s as f64 * h, &y, h)?;
    }
    Ok(y)
}

/// Halve the step until two successive end states agree to `tol` (relative to 1 + |y|).
pub fn rk4_refined<F>(f: &F, t0: f64, t1: f64, y0: &[f64], cfg: Refinement) -> Result<Refined>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    if t0 == t1 {
        return Ok(Refined {
            state: y0.to_vec(),
            steps: 0,
            change: 0.0,
            converged: true,
        });
    }
    let mut steps = cfg.initial_steps.max(1);
    let mut prev = rk4(f, t0, t1, y0, steps)?;
    loop {
        steps *= 2;
        let next = rk4(f, t0, t1, y0, steps)?;
        let scale = 1.0 + next.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let change = prev
            .iter()
            .zip(&next)
            .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()))
            / scale;
        if change <= cfg.tol || steps >= cfg.max_steps {
            return Ok(Refined {
                state: next,
                steps,
                change,
                converged: change <= cfg.tol,
            });
        }
        prev = next;
    }
}

/// Gauss-Legendre 8-point nodes and weights on [0, 1].
pub fn gauss_legendre_unit() -> [(f64, f64); 8] {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (0.5 * (1.0 - X[i]), 0.5 * W[i]);
        out[2 * i + 1] = (0.5 * (1.0 + X[i]), 0.5 * W[i]);
    }
    out
}
