use std::path::{Path, PathBuf};

use clap::Args;
use qpurify::septest::OracleInstance;
use qpurify::sim::Budget;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const MANIFEST_SCHEMA: &str = "qpurify.manifest/1";

/// Flags shared by every experiment.
#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// Experiment manifest (JSON)
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    /// Root seed; overrides the manifest's
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory that receives the report files
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Largest number of amplitudes held at once
    #[arg(long, value_name = "DIMS")]
    pub budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    schema: String,
    experiment: String,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    parameters: Value,
    #[serde(default)]
    out: Option<PathBuf>,
}

/// Everything a command needs, with flags applied over the manifest.
#[derive(Debug)]
pub struct Run<P> {
    pub params: P,
    seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budget: Budget,
    /// Manifest paths are relative to this directory.
    base: PathBuf,
}

impl<P> Run<P> {
    pub fn seed(&self) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Usage("a seed is required: pass --seed or set `seed` in the manifest".into()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

pub fn load<P: DeserializeOwned + Default>(experiment: &str, common: &Common) -> CliResult<Run<P>> {
    let (manifest, base) = match &common.manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("manifest {}: {e}", path.display())))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (Some(m), base)
        }
        None => (None, PathBuf::new()),
    };
    let mut seed = None;
    let mut out = None;
    let mut params = P::default();
    if let Some(m) = manifest {
        if m.schema != MANIFEST_SCHEMA {
            return Err(CliError::Usage(format!(
                "manifest schema `{}`, expected `{MANIFEST_SCHEMA}`",
                m.schema
            )));
        }
        if m.experiment != experiment {
            return Err(CliError::Usage(format!(
                "manifest is for `{}`, not `{experiment}`",
                m.experiment
            )));
        }
        seed = m.seed;
        out = m.out;
        if !m.parameters.is_null() {
            params = serde_json::from_value(m.parameters)
                .map_err(|e| CliError::Usage(format!("parameters of `{experiment}`: {e}")))?;
        }
    }
    let budget = match common.budget {
        Some(0) => return Err(CliError::Usage("--budget must be positive".into())),
        Some(dims) => Budget {
            amplitudes: dims,
            density_dim: Budget::default().density_dim.min(dims),
        },
        None => Budget::default(),
    };
    Ok(Run {
        params,
        seed: common.seed.or(seed),
        out: common.out.clone().or(out),
        budget,
        base,
    })
}

/// An oracle instance file, optionally pinned by content hash.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRef {
    pub path: PathBuf,
    #[serde(default)]
    pub sha256: Option<String>,
}

pub fn read_instance(path: &Path, sha256: Option<&str>) -> CliResult<OracleInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read instance {}: {e}", path.display())))?;
    let inst = OracleInstance::from_json(&text)?;
    if let Some(want) = sha256 {
        let got = inst.content_hash();
        if !got.eq_ignore_ascii_case(want) {
            return Err(CliError::Usage(format!(
                "instance {} has hash {got}, manifest pins {want}",
                path.display()
            )));
        }
    }
    Ok(inst)
}
