//! Shape classification of a particle cloud.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{SystemState, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Spear,
    Ring,
    Other,
}

impl std::fmt::Display for Structure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Spear => "spear",
            Self::Ring => "ring",
            Self::Other => "other",
        })
    }
}

/// Root-mean-square extents along the principal axes, largest first, with
/// the matching axes.
pub fn principal_extents(s: &SystemState) -> ([f64; 3], [Vec3; 3]) {
    let c = s.centroid();
    let n = s.particles.len().max(1) as f64;
    let cov: Matrix3<f64> = s.particles.iter().map(|q| (q.x - c) * (q.x - c).transpose()).sum::<Matrix3<f64>>() / n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let ext = order.map(|i| eig.eigenvalues[i].max(0.0).sqrt());
    let axes = order.map(|i| eig.eigenvectors.column(i).into_owned());
    (ext, axes)
}

/// Spear when both minor extents are below a tenth of the major one; ring
/// when the cloud is planar (smallest extent below a tenth of the largest)
/// and the in-plane distances to the centroid vary by less than 5% of their
/// mean.
pub fn classify(s: &SystemState) -> Structure {
    if s.particles.len() < 3 {
        return Structure::Spear;
    }
    let (ext, axes) = principal_extents(s);
    if ext[1] < 0.1 * ext[0] && ext[2] < 0.1 * ext[0] {
        return Structure::Spear;
    }
    if ext[2] < 0.1 * ext[0] {
        let c = s.centroid();
        let radii: Vec<f64> = s
            .particles
            .iter()
            .map(|q| {
                let d = q.x - c;
                (d.dot(&axes[0]).powi(2) + d.dot(&axes[1]).powi(2)).sqrt()
            })
            .collect();
        let n = radii.len() as f64;
        let mean = radii.iter().sum::<f64>() / n;
        let std = (radii.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt();
        if std < 0.05 * mean {
            return Structure::Ring;
        }
    }
    Structure::Other
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{arc_state, Particle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recognizes_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(classify(&arc_state(12, 1.1, 0.0, 0.0, &mut rng).unwrap()), Structure::Spear);
        assert_eq!(classify(&arc_state(12, 1.1, 1.0, 0.0, &mut rng).unwrap()), Structure::Ring);
        assert_eq!(classify(&arc_state(12, 1.1, 0.5, 0.0, &mut rng).unwrap()), Structure::Other);
        let blob = SystemState::new(
            (0..12)
                .map(|k| Particle::at_rest(Vec3::new((k % 2) as f64, ((k / 2) % 2) as f64, (k / 4) as f64), Vec3::x()))
                .collect(),
        )
        .unwrap();
        assert_eq!(classify(&blob), Structure::Other);
    }

    #[test]
    fn tilted_ring_is_still_a_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = arc_state(10, 1.0, 1.0, 0.0, &mut rng).unwrap();
        let rot = nalgebra::Rotation3::from_euler_angles(0.4, -1.1, 0.3);
        for q in &mut s.particles {
            q.x = rot * q.x + Vec3::new(3.0, -2.0, 7.0);
        }
        assert_eq!(classify(&s), Structure::Ring);
        assert_eq!(Structure::Ring.to_string(), "ring");
    }
}
