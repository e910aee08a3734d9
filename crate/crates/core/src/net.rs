//! Sphere coverings in dimension 2 and 3 and the net-based spectral check.
//!
//! In dimension 2 the net is an angular grid whose spacing θ satisfies
//! 2 sin(θ/2) <= ε, so adjacent points are within ε by construction. In
//! dimension 3 it is a Fibonacci lattice whose point count doubles until a
//! sampled certification (100k seeded random unit vectors, each within ε of
//! some net point) passes. The certified radius is the largest sampled
//! nearest-point distance.

use crate::linalg::{Matrix, Vector};
use crate::samplers::sample_spherical;
use crate::seed::{derive_seed, Seed};
use crate::{Error, Result};

/// Number of random directions used to certify a covering.
pub const CERTIFICATION_SAMPLES: u64 = 100_000;

/// Fixed seed for certification sampling, so nets are deterministic.
const CERTIFICATION_SEED: Seed = Seed(0xC0_4E11_CE27);

const MAX_DOUBLINGS: usize = 20;

/// An ε-covering of the unit sphere with a sampled certificate.
#[derive(Debug, Clone)]
pub struct NetPoints {
    pub d: usize,
    pub eps: f64,
    pub points: Vec<Vector>,
    /// Largest nearest-net distance observed during certification.
    pub certified_radius: f64,
    /// The covering-number budget (1 + 2/ε)^d.
    pub budget: f64,
    /// Whether the realized point count stays within the budget.
    pub within_budget: bool,
}

/// Builds a certified ε-net of the unit sphere for d in {2, 3}.
pub fn epsilon_net(d: usize, eps: f64) -> Result<NetPoints> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    let points = match d {
        2 => circle_grid(eps),
        3 => {
            let mut count = 16usize;
            let mut chosen = None;
            for _ in 0..=MAX_DOUBLINGS {
                let candidate = fibonacci_sphere(count);
                if certify(&candidate, d, eps).is_some() {
                    chosen = Some(candidate);
                    break;
                }
                count *= 2;
            }
            chosen.ok_or(Error::CertificationFailed {
                doublings: MAX_DOUBLINGS,
            })?
        }
        _ => {
            return Err(Error::OutOfRange(format!(
                "explicit nets are built for d in {{2, 3}}, got {d}"
            )))
        }
    };
    let certified_radius = certify(&points, d, eps).ok_or(Error::CertificationFailed {
        doublings: MAX_DOUBLINGS,
    })?;
    let budget = (1.0 + 2.0 / eps).powi(d as i32);
    let within_budget = (points.len() as f64) <= budget;
    Ok(NetPoints {
        d,
        eps,
        points,
        certified_radius,
        budget,
        within_budget,
    })
}

/// ceil(2π / (2 asin(ε/2))) equally spaced points on the circle.
fn circle_grid(eps: f64) -> Vec<Vector> {
    let theta = 2.0 * (eps / 2.0).asin();
    let count = (std::f64::consts::TAU / theta).ceil() as usize;
    (0..count)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / count as f64;
            Vector::new(vec![angle.cos(), angle.sin()])
        })
        .collect()
}

/// Fibonacci lattice: points at golden-angle increments with uniformly
/// spaced heights.
fn fibonacci_sphere(count: usize) -> Vec<Vector> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            let v = Vector::new(vec![r * phi.cos(), r * phi.sin(), z]);
            let norm = v.norm();
            v.scaled(1.0 / norm)
        })
        .collect()
}

/// Samples random unit vectors and returns the largest nearest-net distance,
/// or `None` as soon as one sample lies farther than `eps` from every point.
fn certify(points: &[Vector], d: usize, eps: f64) -> Option<f64> {
    let mut worst = 0.0f64;
    let eps_sq = eps * eps;
    for i in 0..CERTIFICATION_SAMPLES {
        let x = sample_spherical(d, derive_seed(CERTIFICATION_SEED, i));
        let mut best = f64::INFINITY;
        for p in points {
            let mut dist_sq = 0.0;
            for k in 0..d {
                let delta = x[k] - p[k];
                dist_sq += delta * delta;
            }
            best = best.min(dist_sq);
            if best <= 1e-30 {
                break;
            }
        }
        if best > eps_sq {
            return None;
        }
        worst = worst.max(best.sqrt());
    }
    Some(worst)
}

/// Result of comparing a spectral norm against its net-based certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct NetNormCheck {
    /// max over the net of |xᵀ A x|.
    pub net_max: f64,
    /// Power-iteration spectral norm of A.
    pub spectral: f64,
    /// (1 - 2ε)⁻¹ times the net maximum.
    pub bound: f64,
    pub holds: bool,
}

/// Verifies ‖A‖₂ <= (1 - 2ε)⁻¹ max_{x in net} |xᵀ A x| for a symmetric A.
/// Requires net.eps < 1/2.
pub fn net_norm_check(a: &Matrix, net: &NetPoints) -> Result<NetNormCheck> {
    if net.eps >= 0.5 {
        return Err(Error::OutOfRange(format!(
            "net-based spectral bound needs eps < 1/2, got {}",
            net.eps
        )));
    }
    if !a.is_square() || a.rows() != net.d {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but net has dimension {}",
            a.rows(),
            a.cols(),
            net.d
        )));
    }
    let spectral = a.spectral_norm_symmetric(1e-10)?;
    let net_max = net
        .points
        .iter()
        .map(|x| x.dot(&a.matvec(x)).abs())
        .fold(0.0f64, f64::max);
    let bound = net_max / (1.0 - 2.0 * net.eps);
    Ok(NetNormCheck {
        net_max,
        spectral,
        bound,
        holds: spectral <= bound * (1.0 + 1e-12) + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::random_symmetric;

    #[test]
    fn circle_net_at_half_eps_has_thirteen_points() {
        let net = epsilon_net(2, 0.5).unwrap();
        assert_eq!(net.points.len(), 13);
        assert!(net.certified_radius <= 0.5);
        assert!(net.within_budget);
        assert!((net.budget - 25.0).abs() < 1e-12);
        for p in &net.points {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_net_adjacent_chords_within_eps() {
        for eps in [0.2, 0.25, 0.5, 0.9] {
            let net = epsilon_net(2, eps).unwrap();
            let n = net.points.len();
            for i in 0..n {
                let a = &net.points[i];
                let b = &net.points[(i + 1) % n];
                let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!(chord <= eps + 1e-12, "eps={eps}: chord {chord}");
            }
        }
    }

    #[test]
    fn sphere_net_certifies_within_budget_at_half_eps() {
        let net = epsilon_net(3, 0.5).unwrap();
        assert!(net.certified_radius <= 0.5);
        assert!((net.budget - 125.0).abs() < 1e-9);
        // The doubling search should land well inside the covering budget;
        // if it ever exceeds it the report flags it rather than failing.
        assert!(
            net.within_budget,
            "net used {} points over budget {}",
            net.points.len(),
            net.budget
        );
        for p in &net.points {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_net_certifies_at_smaller_radii() {
        for eps in [0.2, 0.25] {
            let net = epsilon_net(3, eps).unwrap();
            assert!(net.certified_radius <= eps, "eps={eps}");
        }
    }

    #[test]
    fn invalid_net_requests_are_rejected() {
        assert!(epsilon_net(4, 0.5).is_err());
        assert!(epsilon_net(2, 0.0).is_err());
        assert!(epsilon_net(2, 1.0).is_err());
    }

    #[test]
    fn net_norm_check_identity() {
        let net = epsilon_net(2, 0.25).unwrap();
        let check = net_norm_check(&Matrix::identity(2), &net).unwrap();
        assert!(check.holds);
        assert!((check.spectral - 1.0).abs() < 1e-9);
        assert!((check.net_max - 1.0).abs() < 1e-9);
    }

    #[test]
    fn net_norm_check_indefinite_diagonal() {
        let net = epsilon_net(2, 0.25).unwrap();
        let a = Matrix::new(2, 2, vec![2.0, 0.0, 0.0, -1.0]);
        let check = net_norm_check(&a, &net).unwrap();
        assert!(check.holds);
        assert!((check.spectral - 2.0).abs() < 1e-9);
        assert!(check.net_max <= 2.0 + 1e-12);
        assert!(check.bound >= check.spectral);
    }

    #[test]
    fn net_norm_check_random_batch_has_no_violations() {
        for d in [2usize, 3] {
            for eps in [0.2, 0.25] {
                let net = epsilon_net(d, eps).unwrap();
                for trial in 0..25u64 {
                    let a = random_symmetric(d, Seed(4000 + 100 * d as u64 + trial));
                    let check = net_norm_check(&a, &net).unwrap();
                    assert!(check.holds, "d={d} eps={eps} trial={trial}");
                }
            }
        }
    }

    #[test]
    fn net_norm_check_rejects_wide_eps() {
        let mut net = epsilon_net(2, 0.25).unwrap();
        net.eps = 0.5;
        assert!(net_norm_check(&Matrix::identity(2), &net).is_err());
    }
}
