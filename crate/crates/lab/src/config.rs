//! Experiment configuration (TOML). Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use steklov_core::assembly::AssemblyOptions;
use steklov_core::geometry::{
    generate_annulus_mesh, generate_disk_mesh, refine, ConformalSampler, DomainShape, Mesh, MetricField,
    PerturbationDirection,
};
use steklov_core::genericity::ScanTolerances;

use crate::error::{LabError, LabResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spectrum,
    VariationCheck,
    Split,
    Scan,
    Wucp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disk {
        #[serde(default = "one")]
        radius: f64,
        h: f64,
    },
    Annulus {
        inner: f64,
        outer: f64,
        h: f64,
    },
    /// Text mesh file, relative paths resolved against the config file.
    Mesh { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

/// Degenerate traces used to check that the scans fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticTrace {
    /// `sin²(s − 0.3)`
    TangentZero,
    /// `sin³(s − 0.7)`
    CubicFlat,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbationSpec {
    pub seed: u64,
    pub modes: u32,
    pub amplitude: f64,
    pub trials: usize,
    /// nonzero eigenvalues / non-constant eigenfunctions examined per trial
    pub eigenfunctions: usize,
    /// step list; per-experiment default when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<f64>>,
    /// split direction (default: conformal, σ = Re (x+iy)²)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<PerturbationDirection>,
    /// finite-difference directions (default: five fixed non-conformal ones)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<PerturbationDirection>>,
    /// eigenvalue index whose cluster is split (default: first multiple one)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticTrace>,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            seed: 0,
            modes: 3,
            amplitude: 0.1,
            trials: 100,
            eigenfunctions: 10,
            steps: None,
            direction: None,
            directions: None,
            cluster: None,
            synthetic: None,
        }
    }
}

impl PerturbationSpec {
    pub fn sampler(&self) -> ConformalSampler {
        ConformalSampler { modes: self.modes, amplitude: self.amplitude }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSpec {
    /// seeded σ fields for the conformal closed-form check
    pub conformal_samples: usize,
    /// random (ψ, σ) pairs for the integral identity
    pub density_pairs: usize,
    /// eigenpairs per density pair
    pub density_modes: usize,
}

impl Default for VariationSpec {
    fn default() -> Self {
        VariationSpec { conformal_samples: 10, density_pairs: 20, density_modes: 5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub gap_tol: f64,
    pub zero_tol: f64,
    pub deriv_tol: f64,
    pub second_deriv_tol: f64,
    pub vanish_tol: f64,
    pub arc_fraction: f64,
    /// `‖dΛf + σλf/2‖ / (λ‖f‖)`
    pub conformal: f64,
    /// entries of `DK` for conformal directions
    pub conformal_dk: f64,
    /// finite-difference mismatch at the smallest step (relative)
    pub fd_mismatch: f64,
    /// admissible deviation of observed orders from 2
    pub order_band: f64,
    /// integral identity residual relative to its scale
    pub density: f64,
    /// relative deviation of gap/t from the closed-form splitting rate
    pub split_rate: f64,
    pub orthonormality: f64,
    /// relative eigenvalue error against the closed form at the finest level
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gap_tol: 1e-6,
            zero_tol: 1e-6,
            deriv_tol: 1e-3,
            second_deriv_tol: 1e-3,
            vanish_tol: 1e-8,
            arc_fraction: 0.05,
            conformal: 1e-10,
            conformal_dk: 1e-14,
            fd_mismatch: 1e-6,
            order_band: 0.2,
            density: 1e-10,
            split_rate: 0.02,
            orthonormality: 1e-8,
            oracle: None,
        }
    }
}

impl Tolerances {
    pub fn scan(&self) -> ScanTolerances {
        ScanTolerances { zero_tol: self.zero_tol, deriv_tol: self.deriv_tol, second_deriv_tol: self.second_deriv_tol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: PathBuf::from("out"), svg: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub domain: DomainSpec,
    #[serde(default = "euclidean")]
    pub metric: MetricField,
    /// uniform refinements of the generated (or loaded) mesh
    #[serde(default)]
    pub refinement: u32,
    #[serde(default = "default_count")]
    pub eigen_count: usize,
    #[serde(default)]
    pub assembly: AssemblyOptions,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    #[serde(default)]
    pub variation: VariationSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

fn euclidean() -> MetricField {
    MetricField::Euclidean
}

fn default_count() -> usize {
    11
}

fn positive(name: &str, x: f64) -> LabResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(LabError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

impl ExperimentConfig {
    /// Default configuration of an experiment on the unit disk.
    pub fn disk(experiment: ExperimentKind, h: f64) -> Self {
        ExperimentConfig {
            experiment,
            domain: DomainSpec::Disk { radius: 1.0, h },
            metric: MetricField::Euclidean,
            refinement: 0,
            eigen_count: default_count(),
            assembly: AssemblyOptions::default(),
            perturbation: PerturbationSpec::default(),
            variation: VariationSpec::default(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> LabResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> LabResult<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> LabResult<()> {
        match &self.domain {
            DomainSpec::Disk { radius, h } => {
                positive("domain.radius", *radius)?;
                positive("domain.h", *h)?;
            }
            DomainSpec::Annulus { inner, outer, h } => {
                positive("domain.inner", *inner)?;
                positive("domain.h", *h)?;
                if !(inner < outer) {
                    return Err(LabError::Config(format!("annulus needs inner < outer, got {inner} ≥ {outer}")));
                }
            }
            DomainSpec::Mesh { .. } => {}
        }
        if self.refinement > 6 {
            return Err(LabError::Config(format!("refinement {} is beyond desk scale (max 6)", self.refinement)));
        }
        if self.eigen_count < 2 {
            return Err(LabError::Config("eigen_count must be at least 2".into()));
        }
        let p = &self.perturbation;
        positive("perturbation.amplitude", p.amplitude)?;
        if p.modes == 0 || p.trials == 0 || p.eigenfunctions == 0 {
            return Err(LabError::Config("perturbation.modes, trials and eigenfunctions must be ≥ 1".into()));
        }
        if let Some(steps) = &p.steps {
            if steps.is_empty() {
                return Err(LabError::Config("perturbation.steps must not be empty".into()));
            }
            for &t in steps {
                positive("perturbation.steps[]", t)?;
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("gap_tol", t.gap_tol),
            ("zero_tol", t.zero_tol),
            ("deriv_tol", t.deriv_tol),
            ("second_deriv_tol", t.second_deriv_tol),
            ("vanish_tol", t.vanish_tol),
            ("conformal", t.conformal),
            ("conformal_dk", t.conformal_dk),
            ("fd_mismatch", t.fd_mismatch),
            ("order_band", t.order_band),
            ("density", t.density),
            ("split_rate", t.split_rate),
            ("orthonormality", t.orthonormality),
        ] {
            positive(&format!("tolerances.{name}"), v)?;
        }
        if !(t.arc_fraction > 0.0 && t.arc_fraction < 1.0) {
            return Err(LabError::Config(format!("tolerances.arc_fraction must lie in (0, 1), got {}", t.arc_fraction)));
        }
        if let Some(o) = t.oracle {
            positive("tolerances.oracle", o)?;
        }
        Ok(())
    }

    /// Mesh at refinement level 0 (before the configured refinements).
    pub fn base_mesh(&self, base_dir: &Path) -> LabResult<Mesh> {
        Ok(match &self.domain {
            DomainSpec::Disk { radius, h } => generate_disk_mesh(*radius, *h)?,
            DomainSpec::Annulus { inner, outer, h } => generate_annulus_mesh(*inner, *outer, *h)?,
            DomainSpec::Mesh { path } => {
                let p = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                crate::meshio::read_mesh(&p)?
            }
        })
    }

    /// Meshes at levels `0..=refinement`.
    pub fn mesh_levels(&self, base_dir: &Path) -> LabResult<Vec<Mesh>> {
        let mut out = vec![self.base_mesh(base_dir)?];
        for _ in 0..self.refinement {
            let next = refine(out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn mesh(&self, base_dir: &Path) -> LabResult<Mesh> {
        Ok(self.mesh_levels(base_dir)?.pop().expect("non-empty"))
    }

    /// Radius of a Euclidean disk (closed-form spectrum available).
    pub fn euclidean_disk(&self) -> Option<f64> {
        match (&self.domain, &self.metric) {
            (DomainSpec::Disk { radius, .. }, MetricField::Euclidean) => Some(*radius),
            _ => None,
        }
    }

    pub fn euclidean_annulus(&self) -> Option<(f64, f64)> {
        match (&self.domain, &self.metric) {
            (DomainSpec::Annulus { inner, outer, .. }, MetricField::Euclidean) => Some((*inner, *outer)),
            _ => None,
        }
    }

    pub fn domain_shape(&self) -> Option<DomainShape> {
        match self.domain {
            DomainSpec::Disk { radius, .. } => Some(DomainShape::Disk { center: [0.0, 0.0], radius }),
            DomainSpec::Annulus { inner, outer, .. } => Some(DomainShape::Annulus { center: [0.0, 0.0], inner, outer }),
            DomainSpec::Mesh { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use steklov_core::geometry::ScalarField;

    #[test]
    fn round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::disk(ExperimentKind::Split, 0.05);
        cfg.metric = MetricField::conformal(ScalarField::linear(0.0, 0.1, -0.2));
        cfg.perturbation.steps = Some(vec![1e-2, 5e-3, 2.5e-3]);
        cfg.perturbation.direction = Some(PerturbationDirection::conformal(ScalarField::harmonic_cos(2)));
        cfg.tolerances.oracle = Some(0.01);
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let ok = "experiment = \"spectrum\"\n[domain]\nkind = \"disk\"\nh = 0.2\n";
        assert!(ExperimentConfig::from_toml(ok).is_ok());
        for bad in [
            "experiment = \"spectrum\"\ncolour = 1\n[domain]\nkind = \"disk\"\nh = 0.2\n",
            "experiment = \"spectrum\"\n[domain]\nkind = \"disk\"\nh = 0.2\nwidth = 3\n",
            "experiment = \"spectrum\"\n[domain]\nkind = \"disk\"\nh = 0.2\n[tolerances]\ngap = 1e-6\n",
            "experiment = \"spectrum\"\n[domain]\nkind = \"disk\"\nh = 0.2\n[metric]\nkind = \"conformal\"\nlog_factor = { kind = \"constant\", value = 1.0, extra = 2 }\nbase = { kind = \"euclidean\" }\n",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(bad), Err(LabError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut cfg = ExperimentConfig::disk(ExperimentKind::Spectrum, -0.1);
        assert!(cfg.validate().is_err());
        cfg.domain = DomainSpec::Annulus { inner: 1.0, outer: 0.5, h: 0.1 };
        assert!(cfg.validate().is_err());
        cfg.domain = DomainSpec::Disk { radius: 1.0, h: 0.1 };
        cfg.perturbation.steps = Some(vec![]);
        assert!(cfg.validate().is_err());
    }
}
