//! Curves, piecewise paths and geodesic integration.

use serde::Serialize;

use super::ChartModel;
use crate::expr::Expr;
use crate::ode::rk4_step;
use crate::{Error, Result};

/// Smooth curve `x(t)` given by expressions in the single parameter `t`.
#[derive(Debug, Clone)]
pub struct Curve {
    pub x: Vec<Expr>,
    pub v: Vec<Expr>,
    pub t0: f64,
    pub t1: f64,
}

impl Curve {
    pub fn new(x: Vec<Expr>, t0: f64, t1: f64) -> Curve {
        let v = x.iter().map(|e| e.diff(0)).collect();
        Curve { x, v, t0, t1 }
    }

    pub fn position(&self, t: f64) -> Result<Vec<f64>> {
        self.x.iter().map(|e| e.eval(&[t])).collect()
    }

    pub fn velocity(&self, t: f64) -> Result<Vec<f64>> {
        self.v.iter().map(|e| e.eval(&[t])).collect()
    }
}

/// One smooth piece of a path.
#[derive(Debug, Clone)]
pub enum Piece {
    Curve(Curve),
    /// Straight segment `a + t (b − a)`, `t ∈ [0, 1]`.
    Segment { a: Vec<f64>, b: Vec<f64> },
}

impl Piece {
    pub fn range(&self) -> (f64, f64) {
        match self {
            Piece::Curve(c) => (c.t0, c.t1),
            Piece::Segment { .. } => (0.0, 1.0),
        }
    }

    pub fn position(&self, t: f64) -> Result<Vec<f64>> {
        match self {
            Piece::Curve(c) => c.position(t),
            Piece::Segment { a, b } => Ok(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()),
        }
    }

    pub fn velocity(&self, t: f64) -> Result<Vec<f64>> {
        match self {
            Piece::Curve(c) => c.velocity(t),
            Piece::Segment { a, b } => Ok(a.iter().zip(b).map(|(x, y)| y - x).collect()),
        }
    }

    fn reversed(&self) -> Piece {
        match self {
            Piece::Segment { a, b } => Piece::Segment {
                a: b.clone(),
                b: a.clone(),
            },
            Piece::Curve(c) => {
                // t ↦ t0 + t1 − t
                let shift = Expr::num(c.t0 + c.t1).sub(&Expr::var(0));
                let x = c.x.iter().map(|e| e.substitute(std::slice::from_ref(&shift))).collect();
                Piece::Curve(Curve::new(x, c.t0, c.t1))
            }
        }
    }
}

/// Concatenation of smooth pieces.
#[derive(Debug, Clone)]
pub struct Path {
    pub pieces: Vec<Piece>,
}

impl Path {
    pub fn curve(c: Curve) -> Path {
        Path {
            pieces: vec![Piece::Curve(c)],
        }
    }

    pub fn polyline(points: &[Vec<f64>]) -> Path {
        Path {
            pieces: points
                .windows(2)
                .map(|w| Piece::Segment {
                    a: w[0].clone(),
                    b: w[1].clone(),
                })
                .collect(),
        }
    }

    pub fn start(&self) -> Result<Option<Vec<f64>>> {
        match self.pieces.first() {
            None => Ok(None),
            Some(p) => p.position(p.range().0).map(Some),
        }
    }

    pub fn end(&self) -> Result<Option<Vec<f64>>> {
        match self.pieces.last() {
            None => Ok(None),
            Some(p) => p.position(p.range().1).map(Some),
        }
    }

    pub fn reversed(&self) -> Path {
        Path {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }

    /// Gap between end and start.
    pub fn closure_gap(&self) -> Result<f64> {
        match (self.start()?, self.end()?) {
            (Some(a), Some(b)) => Ok(a
                .iter()
                .zip(&b)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))),
            _ => Ok(0.0),
        }
    }

    pub fn require_closed(&self, tol: f64) -> Result<()> {
        let gap = self.closure_gap()?;
        if gap > tol {
            return Err(Error::NotClosed { gap });
        }
        Ok(())
    }
}

/// Sampled geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct Geodesic {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    /// Parameter at which the trajectory left the domain, if it did.
    pub left_domain: Option<f64>,
}

/// ẍ^k = −Γ^k_{ij} ẋ^i ẋ^j.
pub fn geodesic_acceleration(c: &ChartModel, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = c.dim();
    let g = c.gamma_at(x)?;
    Ok((0..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += g[(k * n + i) * n + j] * v[i] * v[j];
                }
            }
            -s
        })
        .collect())
}

/// Fixed-step RK4 geodesic from `(p0, v0)`; stops early when the chart domain is left.
pub fn integrate_geodesic(
    c: &ChartModel,
    p0: &[f64],
    v0: &[f64],
    h: f64,
    steps: usize,
) -> Result<Geodesic> {
    let n = c.dim();
    c.check_point(p0)?;
    if v0.len() != n {
        return Err(Error::Dimension("initial velocity has wrong length".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Precondition("step size must be positive".into()));
    }
    if !c.domain().contains(p0) {
        return Err(Error::Precondition("initial point outside the chart domain".into()));
    }
    let f = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (x, v) = y.split_at(n);
        let mut out = v.to_vec();
        out.extend(geodesic_acceleration(c, x, v)?);
        Ok(out)
    };
    let mut y: Vec<f64> = p0.iter().chain(v0).copied().collect();
    let mut out = Geodesic {
        t: vec![0.0],
        x: vec![p0.to_vec()],
        v: vec![v0.to_vec()],
        left_domain: None,
    };
    for s in 0..steps {
        let t = s as f64 * h;
        let next = match rk4_step(&f, t, &y, h) {
            Ok(next) => next,
            Err(Error::Domain(_)) => {
                out.left_domain = Some(t);
                break;
            }
            Err(e) => return Err(e),
        };
        if !c.domain().contains(&next[..n]) {
            out.left_domain = Some(t + h);
            break;
        }
        y = next;
        out.t.push(t + h);
        out.x.push(y[..n].to_vec());
        out.v.push(y[n..].to_vec());
    }
    Ok(out)
}
