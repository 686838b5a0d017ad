//! Bounded triangle potentials and the hard-core constraint.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point2, Tile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteractionError {
    #[error("a marked potential was evaluated on a tile with an unmarked vertex")]
    MissingMark,
    #[error("invalid potential parameter: {0}")]
    InvalidParameter(String),
}

/// Bounded pair potential on Delaunay edges, folded into tiles by
/// [`TrianglePotential::EdgeFold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EdgePotential {
    Constant { value: f64 },
    /// `near` for edges of length at most `radius`, `far` otherwise.
    Step { radius: f64, near: f64, far: f64 },
}

impl EdgePotential {
    pub fn eval(&self, a: &Point2, b: &Point2) -> f64 {
        match *self {
            EdgePotential::Constant { value } => value,
            EdgePotential::Step { radius, near, far } => {
                if a.dist(b) <= radius {
                    near
                } else {
                    far
                }
            }
        }
    }

    pub fn bound(&self) -> f64 {
        match *self {
            EdgePotential::Constant { value } => value.abs(),
            EdgePotential::Step { near, far, .. } => near.abs().max(far.abs()),
        }
    }
}

/// A shift-invariant, bounded energy per Delaunay tile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrianglePotential {
    /// The same value on every tile.
    Constant { value: f64 },
    /// `β |c(τ) − b(τ)| / ρ(τ)`.
    Phi1 { beta: f64 },
    /// `−β A(τ) / ρ(τ)²`.
    Phi2 { beta: f64 },
    /// The inner potential below radius `r`, the constant `k` from `r` on.
    Truncated { inner: Box<TrianglePotential>, r: f64, k: f64 },
    /// `β` on tiles of radius at most `r1` whose vertex colours are not all
    /// equal, 0 otherwise.
    Potts { beta: f64, r1: f64, q: u8 },
    /// Half the sum of an edge potential over the three tile edges.
    EdgeFold { edge: EdgePotential },
}

/// Eventually-increasing declaration: `φ(τ) = ψ(ρ(τ))` for `ρ(τ) ≥ r_phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventuallyIncreasing {
    pub r_phi: f64,
    /// Value of the (constant) tail function `ψ`.
    pub psi: f64,
}

pub fn phi1(beta: f64) -> TrianglePotential {
    TrianglePotential::Phi1 { beta }
}

pub fn phi2(beta: f64) -> TrianglePotential {
    TrianglePotential::Phi2 { beta }
}

pub fn truncate(inner: TrianglePotential, r: f64, k: f64) -> TrianglePotential {
    TrianglePotential::Truncated { inner: Box::new(inner), r, k }
}

pub fn potts(beta: f64, r1: f64, q: u8) -> TrianglePotential {
    TrianglePotential::Potts { beta, r1, q }
}

pub fn edge_fold(edge: EdgePotential) -> TrianglePotential {
    TrianglePotential::EdgeFold { edge }
}

pub fn constant(value: f64) -> TrianglePotential {
    TrianglePotential::Constant { value }
}

impl TrianglePotential {
    /// Checks parameter ranges.
    pub fn validate(&self) -> Result<(), InteractionError> {
        let bad = |m: &str| Err(InteractionError::InvalidParameter(m.to_string()));
        match self {
            TrianglePotential::Constant { value } if !value.is_finite() => bad("constant value"),
            TrianglePotential::Phi1 { beta } | TrianglePotential::Phi2 { beta }
                if !(beta.is_finite() && *beta > 0.0) =>
            {
                bad("beta must be positive")
            }
            TrianglePotential::Truncated { inner, r, k } => {
                if !(r.is_finite() && *r > 0.0) || !k.is_finite() {
                    return bad("truncation radius must be positive and K finite");
                }
                inner.validate()
            }
            TrianglePotential::Potts { beta, r1, q } => {
                if !(beta.is_finite() && *beta > 0.0) || !(r1.is_finite() && *r1 > 0.0) || *q < 2 {
                    return bad("potts needs beta > 0, r1 > 0, q >= 2");
                }
                Ok(())
            }
            TrianglePotential::EdgeFold { edge } if !edge.bound().is_finite() => bad("edge potential"),
            _ => Ok(()),
        }
    }

    /// Tile energy. Fails only for marked potentials on unmarked tiles.
    pub fn try_eval(&self, t: &Tile) -> Result<f64, InteractionError> {
        Ok(match self {
            TrianglePotential::Constant { value } => *value,
            TrianglePotential::Phi1 { beta } => {
                beta * t.circumcenter.dist(&t.barycentre) / t.circumradius
            }
            TrianglePotential::Phi2 { beta } => -beta * t.area / (t.circumradius * t.circumradius),
            TrianglePotential::Truncated { inner, r, k } => {
                if t.circumradius < *r {
                    inner.try_eval(t)?
                } else {
                    *k
                }
            }
            TrianglePotential::Potts { beta, r1, .. } => {
                let m = t.marks();
                let (Some(a), Some(b), Some(c)) = (m[0], m[1], m[2]) else {
                    return Err(InteractionError::MissingMark);
                };
                if t.circumradius <= *r1 && !(a == b && b == c) {
                    *beta
                } else {
                    0.0
                }
            }
            TrianglePotential::EdgeFold { edge } => {
                0.5 * t.edges().iter().map(|(a, b)| edge.eval(a, b)).sum::<f64>()
            }
        })
    }

    /// Tile energy. Marked potentials must only be used on marked points;
    /// an unmarked vertex panics.
    pub fn eval(&self, t: &Tile) -> f64 {
        self.try_eval(t).expect("tile marks required by the potential")
    }

    /// Declared bound `c_φ` with `|φ| ≤ c_φ`.
    pub fn bound(&self) -> f64 {
        match self {
            TrianglePotential::Constant { value } => value.abs(),
            TrianglePotential::Phi1 { beta } => *beta,
            TrianglePotential::Phi2 { beta } => 0.75 * 3f64.sqrt() * beta,
            TrianglePotential::Truncated { inner, k, .. } => inner.bound().max(k.abs()),
            TrianglePotential::Potts { beta, .. } => *beta,
            TrianglePotential::EdgeFold { edge } => 1.5 * edge.bound(),
        }
    }

    pub fn eventually_increasing(&self) -> Option<EventuallyIncreasing> {
        match self {
            TrianglePotential::Constant { value } => Some(EventuallyIncreasing { r_phi: 0.0, psi: *value }),
            TrianglePotential::Truncated { r, k, .. } => Some(EventuallyIncreasing { r_phi: *r, psi: *k }),
            TrianglePotential::Potts { r1, .. } => {
                Some(EventuallyIncreasing { r_phi: f64::from_bits(r1.to_bits() + 1), psi: 0.0 })
            }
            TrianglePotential::EdgeFold { edge: EdgePotential::Constant { value } } => {
                Some(EventuallyIncreasing { r_phi: 0.0, psi: 1.5 * value })
            }
            _ => None,
        }
    }

    /// The single value taken on every tile, if the potential is constant.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            TrianglePotential::Constant { value } => Some(*value),
            TrianglePotential::EdgeFold { edge: EdgePotential::Constant { value } } => Some(1.5 * value),
            TrianglePotential::Truncated { inner, k, .. } => {
                inner.constant_value().filter(|v| v == k)
            }
            _ => None,
        }
    }

    /// Whether evaluation reads vertex marks.
    pub fn is_marked(&self) -> bool {
        match self {
            TrianglePotential::Potts { .. } => true,
            TrianglePotential::Truncated { inner, .. } => inner.is_marked(),
            _ => false,
        }
    }

    /// Number of colours for marked potentials.
    pub fn colours(&self) -> Option<u8> {
        match self {
            TrianglePotential::Potts { q, .. } => Some(*q),
            TrianglePotential::Truncated { inner, .. } => inner.colours(),
            _ => None,
        }
    }
}

/// Minimal admissible pair distance: pairs at distance at most `r0` are
/// forbidden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardCore {
    pub r0: f64,
}

impl HardCore {
    pub fn forbids(&self, a: &Point2, b: &Point2) -> bool {
        a.dist2(b) <= self.r0 * self.r0
    }
}

/// Whether two distinct points of the set are at distance at most `r0`.
pub fn violates_hard_core(points: &[Point2], hc: HardCore) -> bool {
    if points.len() < 2 {
        return false;
    }
    if hc.r0 <= 0.0 {
        return has_duplicates(points);
    }
    let cell = hc.r0;
    let idx = |p: &Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = idx(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = grid.get(&(cx + dx, cy + dy)) {
                    if v.iter().any(|&j| hc.forbids(p, &points[j])) {
                        return true;
                    }
                }
            }
        }
        grid.entry((cx, cy)).or_default().push(i);
    }
    false
}

fn has_duplicates(points: &[Point2]) -> bool {
    let mut keys: Vec<(u64, u64)> = points.iter().map(|p| p.key()).collect();
    keys.sort_unstable();
    keys.windows(2).any(|w| w[0] == w[1])
}
