//! Curvature report rows, their summary, and the OBJ/CSV/JSON writers.

use std::fmt::Write as _;

use isor_core::Mesh;
use serde::Serialize;

use crate::config::{Job, JobConfig};

/// Measured and expected quantities at one grid vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub u: f64,
    pub v: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
    /// Principal angle of `λ₁`; `None` at umbilics.
    pub theta: Option<f64>,
    pub gauss_residual: f64,
    pub codazzi_residual: f64,
    /// `None` for untwisted data, which has no master equation.
    pub master_residual: Option<f64>,
    /// Largest residual after dividing by the size of its terms.
    pub scaled_residual: f64,
    /// `max(|E − ρ²|, |G − ρ²|, |F|)/ρ²` against the claimed `ρ`.
    pub metric_error: f64,
    /// Principal curvature mismatch relative to `max(1, |λ|)`.
    pub curvature_error: f64,
    pub mean_curvature_error: f64,
}

pub const CSV_HEADER: &str = "u,v,E,F,G,lambda1,lambda2,H,K,theta,gauss_residual,codazzi_residual,master_residual,scaled_residual,metric_error,curvature_error,mean_curvature_error";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Row {
    fn csv(&self) -> String {
        [
            num(self.u),
            num(self.v),
            num(self.e),
            num(self.f),
            num(self.g),
            num(self.lambda1),
            num(self.lambda2),
            num(self.mean_curvature),
            num(self.gauss_curvature),
            opt(self.theta),
            num(self.gauss_residual),
            num(self.codazzi_residual),
            opt(self.master_residual),
            num(self.scaled_residual),
            num(self.metric_error),
            num(self.curvature_error),
            num(self.mean_curvature_error),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxResiduals {
    pub gauss: f64,
    pub codazzi: f64,
    pub master_ode: Option<f64>,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxOracleErrors {
    pub metric: f64,
    pub curvature: f64,
    pub mean_curvature: f64,
    /// `|a_est − a|` against the claimed twist.
    pub twist: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeInfo {
    pub nodes: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub frame_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TolerancesUsed {
    pub ode: f64,
    pub residual: f64,
    pub oracle: f64,
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: JobConfig,
    pub samples: usize,
    pub max_residuals: MaxResiduals,
    pub max_oracle_errors: MaxOracleErrors,
    pub a_est: Option<f64>,
    pub period_vector: Option<[f64; 3]>,
    pub ode: Option<OdeInfo>,
    pub tolerances: TolerancesUsed,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

fn max_of(rows: &[Row], f: impl Fn(&Row) -> f64) -> f64 {
    rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max)
}

impl Report {
    pub fn new(job: &Job, rows: Vec<Row>, a_est: Option<f64>, claimed_twist: f64) -> Self {
        let master = if rows.iter().all(|r| r.master_residual.is_some()) {
            Some(max_of(&rows, |r| r.master_residual.unwrap_or(0.0)))
        } else {
            None
        };
        let max_residuals = MaxResiduals {
            gauss: max_of(&rows, |r| r.gauss_residual),
            codazzi: max_of(&rows, |r| r.codazzi_residual),
            master_ode: master,
            scaled: max_of(&rows, |r| r.scaled_residual),
        };
        let max_oracle_errors = MaxOracleErrors {
            metric: max_of(&rows, |r| r.metric_error),
            curvature: max_of(&rows, |r| r.curvature_error),
            mean_curvature: max_of(&rows, |r| r.mean_curvature_error),
            twist: a_est.map(|a| (a - claimed_twist).abs()),
        };
        let t = job.tol;
        let pass = max_residuals.scaled < t.residual
            && max_oracle_errors.metric < t.oracle
            && max_oracle_errors.curvature < t.oracle
            && max_oracle_errors.twist.is_none_or(|e| e < t.oracle);
        let summary = Summary {
            config: job.config.clone(),
            samples: rows.len(),
            max_residuals,
            max_oracle_errors,
            a_est,
            period_vector: None,
            ode: None,
            tolerances: TolerancesUsed { ode: t.ode, residual: t.residual, oracle: t.oracle, fd_step: t.fd_step },
            pass,
        };
        Report { rows, summary }
    }

    pub fn csv(&self) -> String {
        let mut s = String::with_capacity(256 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv());
            s.push('\n');
        }
        s
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }
}

/// Wavefront OBJ: vertices, per-vertex normals, two triangles per quad.
pub fn obj(mesh: &Mesh<f64>) -> String {
    let mut s = String::with_capacity(64 * 3 * mesh.vertices.len());
    let _ = writeln!(s, "# isor mesh {} x {}", mesh.nu, mesh.nv);
    for p in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", num(p.x), num(p.y), num(p.z));
    }
    for n in &mesh.normals {
        let _ = writeln!(s, "vn {} {} {}", num(n.x), num(n.y), num(n.z));
    }
    for [a, b, c] in mesh.triangles() {
        let (a, b, c) = (a + 1, b + 1, c + 1);
        let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use isor_core::Vec3;

    #[test]
    fn obj_lists_vertices_normals_and_triangles() {
        let mesh = Mesh {
            nu: 2,
            nv: 2,
            u_samples: vec![0.0, 1.0],
            v_samples: vec![0.0, 1.0],
            vertices: vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0)],
            normals: vec![Vec3::unit_z(); 4],
        };
        let text = obj(&mesh);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), 4);
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(faces, ["f 1//1 3//3 4//4", "f 1//1 4//4 2//2"]);
        assert!(text.contains("v 1.0000000000000000e0 1.0000000000000000e0 0.0000000000000000e0"));
    }

    #[test]
    fn empty_optionals_leave_csv_fields_blank() {
        assert_eq!(opt(None), "");
        assert_eq!(opt(Some(0.5)), "5.0000000000000000e-1");
    }
}
