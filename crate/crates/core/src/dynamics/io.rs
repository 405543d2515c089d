//! Snapshot tables and run summaries.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Structure, SystemState, Trajectory};

pub const SNAPSHOT_HEADER: &str = "t,k,x1,x2,x3,m1,m2,m3,v1,v2,v3,w1,w2,w3";

/// One row per particle per state, floats with 17 significant digits.
pub fn write_snapshots_csv<W: Write>(mut w: W, states: &[SystemState]) -> std::io::Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for s in states {
        for (k, q) in s.particles.iter().enumerate() {
            write!(w, "{:.16e},{k}", s.time)?;
            for v in [q.x, q.m, q.v, q.omega] {
                for c in v.iter() {
                    write!(w, ",{c:.16e}")?;
                }
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Serializable digest of a [`Trajectory`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n_particles: usize,
    pub steps: usize,
    pub final_time: f64,
    pub converged: bool,
    pub structure: Structure,
    pub final_grad_norm: f64,
    /// Largest coordinate displacement from the initial state.
    pub max_drift: f64,
    pub times: Vec<f64>,
    pub mechanical_energy: Vec<f64>,
    pub potential_energy: Vec<f64>,
    pub grad_norms: Vec<f64>,
}

impl RunSummary {
    pub fn new(traj: &Trajectory, initial: &SystemState) -> Self {
        Self {
            n_particles: traj.final_state.len(),
            steps: traj.steps,
            final_time: traj.final_state.time,
            converged: traj.converged,
            structure: traj.structure(),
            final_grad_norm: traj.grad_norms.last().copied().unwrap_or(f64::NAN),
            max_drift: traj.max_drift(initial),
            times: traj.times.clone(),
            mechanical_energy: traj.mechanical.clone(),
            potential_energy: traj.potential.clone(),
            grad_norms: traj.grad_norms.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Particle, Vec3};

    #[test]
    fn snapshot_rows_round_trip() {
        let q = Particle {
            x: Vec3::new(0.1, 1.0 / 3.0, -2.5e-7),
            m: Vec3::new(0.0, 0.6, 0.8),
            v: Vec3::new(1e-300, -0.0, 7.0),
            omega: Vec3::new(std::f64::consts::PI, 0.0, -1.0),
        };
        let s = SystemState { particles: vec![q, q], time: 0.125 };
        let mut buf = Vec::new();
        write_snapshots_csv(&mut buf, std::slice::from_ref(&s)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SNAPSHOT_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 14);
        assert_eq!(row[1], "0");
        let parsed: Vec<f64> = row[2..].iter().map(|v| v.parse().unwrap()).collect();
        let expected: Vec<f64> = [q.x, q.m, q.v, q.omega].iter().flat_map(|v| v.iter().copied()).collect();
        assert_eq!(parsed, expected);
        assert_eq!(text.lines().count(), 3);
    }
}
