//! Job files: the JSON input accepted by every command.

use std::collections::BTreeMap;
use std::sync::Arc;

use coloc_core::colocal::{StabilizationPolicy, Window};
use coloc_core::module::{Generator, GradedModule, IdealSpec};
use coloc_core::ring::{GradedRing, Variable};
use coloc_core::{FGAbGroup, Scalars};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub scalars: Scalars,
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub relations: Vec<String>,
}

/// A finitely presented module. Each relation lists one polynomial per generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

/// What the `page` command compares the abutment against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Universal coefficients applied to the ring's own additive groups,
    /// `H^m` placed at total degree `-shift - m`.
    RingHomology { shift: i64 },
    /// Groups given outright, keyed by total degree.
    Table {
        #[serde(with = "degree_keys")]
        degrees: BTreeMap<i64, FGAbGroup>,
    },
}

/// Integer map keys written as JSON strings. Needed because the tagged enum
/// above buffers its content and loses serde_json's key coercion.
mod degree_keys {
    use std::collections::BTreeMap;

    use coloc_core::FGAbGroup;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, FGAbGroup>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<i64, FGAbGroup>, D::Error> {
        BTreeMap::<String, FGAbGroup>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("degree `{k}` is not an integer")))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ring: RingSpec,
    /// Absent means the ring as a module over itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSpec>,
    /// Absent or empty means the ideal generated by all variables.
    #[serde(default)]
    pub ideal: Vec<String>,
    pub window: Window,
    #[serde(default)]
    pub policy: StabilizationPolicy,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: JobOptions,
}

fn is_default(o: &JobOptions) -> bool {
    *o == JobOptions::default()
}

/// Parameters for the built-in equivariant examples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuilderSpec {
    pub builder: String,
    pub n: u32,
    pub window: Window,
}

/// A validated job, ready to run.
#[derive(Clone, Debug)]
pub struct Job {
    pub spec: JobSpec,
    pub ring: Arc<GradedRing>,
    pub module: GradedModule,
    pub ideal: IdealSpec,
}

impl JobSpec {
    pub fn from_json(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::Validation(format!("job file: {e}")))
    }

    pub fn build(&self) -> Result<Job, CliError> {
        let w = self.window;
        if w.min > w.max {
            return Err(CliError::Validation(format!(
                "window [{}, {}] is empty",
                w.min, w.max
            )));
        }
        if self.policy.max_power == 0 || self.policy.stable_steps == 0 {
            return Err(CliError::Validation(
                "max_power and stable_steps must be positive".into(),
            ));
        }
        let relations: Vec<&str> = self.ring.relations.iter().map(String::as_str).collect();
        let ring = Arc::new(
            GradedRing::parse(self.ring.scalars, self.ring.variables.clone(), &relations)
                .map_err(invalid)?,
        );
        let module = match &self.module {
            None => GradedModule::ring_itself(ring.clone()),
            Some(spec) => {
                let rels = spec
                    .relations
                    .iter()
                    .map(|rel| {
                        if rel.len() != spec.generators.len() {
                            return Err(CliError::Validation(format!(
                                "relation has {} components for {} generators",
                                rel.len(),
                                spec.generators.len()
                            )));
                        }
                        rel.iter()
                            .map(|p| ring.parse_element(p).map_err(invalid))
                            .collect()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GradedModule::new(ring.clone(), spec.generators.clone(), rels).map_err(invalid)?
            }
        };
        let ideal = if self.ideal.is_empty() {
            IdealSpec::maximal(&ring)
        } else {
            let gens: Vec<&str> = self.ideal.iter().map(String::as_str).collect();
            IdealSpec::parse(&ring, &gens).map_err(invalid)?
        };
        if ideal.degrees().iter().any(|&d| d <= 0) {
            return Err(CliError::Validation(
                "ideal generators must have positive degree".into(),
            ));
        }
        Ok(Job {
            spec: self.clone(),
            ring,
            module,
            ideal,
        })
    }
}

impl BuilderSpec {
    pub fn from_json(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::Validation(format!("builder file: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.builder != "rp2n" {
            return Err(CliError::Validation(format!(
                "unknown builder `{}`",
                self.builder
            )));
        }
        if self.n == 0 {
            return Err(CliError::Validation("n must be positive".into()));
        }
        if self.window.min > self.window.max {
            return Err(CliError::Validation("window is empty".into()));
        }
        Ok(())
    }
}

fn invalid(e: coloc_core::Error) -> CliError {
    CliError::Validation(e.to_string())
}

/// `MIN:MAX`
pub fn parse_window(src: &str) -> Result<Window, CliError> {
    let bad = || CliError::Validation(format!("window `{src}` is not MIN:MAX"));
    let (a, b) = src.split_once(':').ok_or_else(bad)?;
    let min = a.trim().parse().map_err(|_| bad())?;
    let max = b.trim().parse().map_err(|_| bad())?;
    Window::new(min, max).map_err(invalid)
}
