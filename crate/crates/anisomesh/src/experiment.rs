//! Reproducible adaptive-solve experiments with on-disk artifacts.
//!
//! An [`ExperimentSpec`] pins down one run completely: the reference
//! problem and its sharpness parameter, the metric kind and its element
//! budget, the iteration count, and the output directory. Running it
//! leaves a CSV convergence report plus per-iteration mesh, metric, and
//! SVG snapshots, so runs with different metrics can be compared side by
//! side from the artifacts alone.

use std::fs;
use std::path::PathBuf;

use crate::adapt::{adaptive_solve_with, AdaptConfig, AdaptReport};
use crate::fem::ProblemSpec;
use crate::mesh::{structured_unit_square, write_medit, write_sol_tensor};
use crate::metric::{MetricKind, MetricParams};
use crate::problems;
use crate::svg::render_svg;
use crate::Result;

/// Resolution of the structured starting mesh for every experiment.
const INITIAL_RESOLUTION: usize = 16;

/// Which of the three reference problems an experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleId {
    /// Convection-diffusion with a boundary layer of width κ at x₁ = 1.
    Ex1,
    /// Poisson problem with an exponential layer of sharpness α at x₁ = 0.
    Ex2,
    /// Poisson problem with corner layers steered by the exponent β.
    Ex3,
}

impl std::fmt::Display for ExampleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::Ex3 => "ex3",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for ExampleId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ex1" => Ok(ExampleId::Ex1),
            "ex2" => Ok(ExampleId::Ex2),
            "ex3" => Ok(ExampleId::Ex3),
            other => Err(format!(
                "unknown example {other:?}, expected one of ex1, ex2, ex3"
            )),
        }
    }
}

/// A fully described experiment: problem, metric, budget, and output
/// directory. Only the parameter matching the chosen example is used;
/// the others keep their defaults.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub example: ExampleId,
    /// Diffusion coefficient for [`ExampleId::Ex1`].
    pub kappa: f64,
    /// Layer sharpness for [`ExampleId::Ex2`].
    pub alpha: f64,
    /// Corner-layer exponent for [`ExampleId::Ex3`].
    pub beta: f64,
    pub metric: MetricKind,
    pub n_target: usize,
    pub iterations: usize,
    /// Explicit flooring for the L² metrics; derived from the Hessian
    /// field when absent.
    pub alpha0: Option<f64>,
    /// Explicit flooring for the H¹ and Hessian metrics; derived from
    /// the Hessian field when absent.
    pub alpha1: Option<f64>,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(
        example: ExampleId,
        metric: MetricKind,
        n_target: usize,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            example,
            kappa: 0.0015,
            alpha: 1000.0,
            beta: 40.0,
            metric,
            n_target,
            iterations: 10,
            alpha0: None,
            alpha1: None,
            out_dir: out_dir.into(),
        }
    }

    /// Instantiate the reference problem this spec selects.
    pub fn problem(&self) -> Result<ProblemSpec> {
        match self.example {
            ExampleId::Ex1 => problems::convection_layer(self.kappa),
            ExampleId::Ex2 => problems::exponential_layer(self.alpha),
            ExampleId::Ex3 => problems::corner_layers(self.beta),
        }
    }

    fn config(&self) -> AdaptConfig {
        let mut params = MetricParams::new(self.metric, self.n_target);
        params.alpha0 = self.alpha0;
        params.alpha1 = self.alpha1;
        let mut config = AdaptConfig::new(params);
        config.iterations = self.iterations;
        config
    }
}

/// Run the adaptive loop for `spec` and write its artifacts.
///
/// Every completed iteration `k` leaves `mesh_iter_k.mesh` (the adapted
/// mesh), `metric_iter_k.sol` (the nodal metric carried through
/// remeshing), and `mesh_iter_k.svg` (the mesh shaded by the discrete
/// solution) in the output directory; `report.csv` summarizes the whole
/// run at the end.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<AdaptReport> {
    let problem = spec.problem()?;
    let config = spec.config();
    fs::create_dir_all(&spec.out_dir)?;

    let initial = structured_unit_square(INITIAL_RESOLUTION);
    let out = spec.out_dir.as_path();
    let output = adaptive_solve_with(&problem, &initial, &config, |iter, mesh, solution, metric| {
        write_medit(mesh, out.join(format!("mesh_iter_{iter}.mesh")))?;
        write_sol_tensor(metric, out.join(format!("metric_iter_{iter}.sol")))?;
        fs::write(
            out.join(format!("mesh_iter_{iter}.svg")),
            render_svg(mesh, Some(solution)),
        )?;
        Ok(())
    })?;
    fs::write(out.join("report.csv"), output.report.to_csv())?;
    Ok(output.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{read_medit, read_sol_tensor};
    use crate::TensorRole;

    fn short_spec(out_dir: impl Into<PathBuf>) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(ExampleId::Ex3, MetricKind::NewH1, 150, out_dir);
        spec.beta = 5.0;
        spec.iterations = 2;
        spec
    }

    #[test]
    fn example_ids_round_trip_through_strings() {
        for id in [ExampleId::Ex1, ExampleId::Ex2, ExampleId::Ex3] {
            assert_eq!(id.to_string().parse::<ExampleId>().unwrap(), id);
        }
        assert!("ex4".parse::<ExampleId>().is_err());
    }

    #[test]
    fn defaults_match_the_studied_parameters() {
        let spec = ExperimentSpec::new(ExampleId::Ex2, MetricKind::ModifiedHessian, 4000, "/tmp/x");
        assert_eq!(spec.kappa, 0.0015);
        assert_eq!(spec.alpha, 1000.0);
        assert_eq!(spec.beta, 40.0);
        assert_eq!(spec.iterations, 10);
        assert_eq!(spec.alpha0, None);
        assert_eq!(spec.alpha1, None);
    }

    #[test]
    fn a_short_run_writes_every_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let spec = short_spec(dir.path());
        let report = run_experiment(&spec).unwrap();
        assert_eq!(report.records.len(), 2);

        for iter in 1..=2 {
            let mesh = read_medit(dir.path().join(format!("mesh_iter_{iter}.mesh"))).unwrap();
            let metric = read_sol_tensor(
                dir.path().join(format!("metric_iter_{iter}.sol")),
                TensorRole::Metric,
            )
            .unwrap();
            assert_eq!(metric.len(), mesh.n_vertices());
            let svg = fs::read_to_string(dir.path().join(format!("mesh_iter_{iter}.svg"))).unwrap();
            assert_eq!(svg.matches("<polygon").count(), mesh.n_triangles());
        }

        let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
        assert_eq!(csv, report.to_csv());
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn reruns_reproduce_identical_artifacts() {
        let first_dir = tempfile::tempdir().unwrap();
        let second_dir = tempfile::tempdir().unwrap();
        run_experiment(&short_spec(first_dir.path())).unwrap();
        run_experiment(&short_spec(second_dir.path())).unwrap();

        for name in ["report.csv", "mesh_iter_2.mesh", "mesh_iter_2.svg"] {
            let a = fs::read(first_dir.path().join(name)).unwrap();
            let b = fs::read(second_dir.path().join(name)).unwrap();
            assert_eq!(a, b, "artifact {name} differs between reruns");
        }
    }
}
