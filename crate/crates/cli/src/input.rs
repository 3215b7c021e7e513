//! Input files. A JSON object with a `queues` key is a network; one with a
//! `mix` key is a vMME scenario. Both are parsed strictly: unknown or
//! missing fields are errors that name the field.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use sha2::{Digest, Sha256};
use vnfperf_core::vmme::{self, VmmeScenario};
use vnfperf_core::{NetworkSpec, ValidatedNetwork};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Network(ValidatedNetwork),
    Scenario(VmmeScenario),
}

impl Model {
    /// The queueing network to hand to the analytical solvers. Scenarios are
    /// expanded at their configured tier sizes.
    pub fn network(&self) -> Result<ValidatedNetwork, CliError> {
        match self {
            Model::Network(n) => Ok(n.clone()),
            Model::Scenario(sc) => Ok(vmme::build_network(sc)?),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Network(_) => "network",
            Model::Scenario(_) => "scenario",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Input {
    pub path: PathBuf,
    pub sha256: String,
    pub model: Model,
}

fn strict<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Input(format!("{what}: {inner}"))
        } else {
            CliError::Input(format!("{what}: field `{path}`: {inner}"))
        }
    })
}

/// Parses and validates a model from JSON text.
pub fn parse(text: &str) -> Result<Model, CliError> {
    let probe: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    let obj = probe.as_object().ok_or_else(|| CliError::Input("top level must be a JSON object".into()))?;
    if obj.contains_key("queues") {
        let spec: NetworkSpec = strict(text, "network")?;
        Ok(Model::Network(spec.validate()?))
    } else if obj.contains_key("mix") {
        let sc: VmmeScenario = strict(text, "scenario")?;
        sc.check()?;
        Ok(Model::Scenario(sc))
    } else {
        Err(CliError::Input("cannot tell the input kind: expected a `queues` (network) or `mix` (scenario) key".into()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<Input, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let model = parse(text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(Input { path: path.to_path_buf(), sha256: sha256_hex(&bytes), model })
}
