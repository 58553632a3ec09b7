use std::path::PathBuf;

use clap::Args;
use qpurify::circuit::deserialize;
use qpurify::septest::{build_oracle, ORACLE};
use qpurify::sim::{OracleRegistry, Simulator};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::manifest::{read_instance, InstanceRef, Run};
use crate::output;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub circuit: Option<PathBuf>,
    /// Oracle gate the instance is bound to; `O` when absent.
    pub oracle: Option<String>,
    pub instance: Option<InstanceRef>,
    /// Input bits, first input qubit leftmost.
    pub input: String,
}

/// Flags that override the manifest; their paths are relative to the working directory.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// Circuit JSON file
    #[arg(long, value_name = "PATH")]
    pub circuit: Option<PathBuf>,
    /// Oracle instance JSON file
    #[arg(long, value_name = "PATH")]
    pub instance: Option<PathBuf>,
    /// Oracle gate name the instance is bound to
    #[arg(long)]
    pub oracle: Option<String>,
    /// Input bit string
    #[arg(long)]
    pub input: Option<String>,
}

fn parse_bits(s: &str) -> CliResult<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("input `{s}` is not a bit string"))),
        })
        .collect()
}

pub fn run(run: &Run<Params>, flags: &Overrides) -> CliResult<()> {
    let p = &run.params;
    let circuit_path = match (&flags.circuit, &p.circuit) {
        (Some(f), _) => f.clone(),
        (None, Some(m)) => run.resolve(m),
        (None, None) => return Err(CliError::Usage("no circuit given".into())),
    };
    let text = std::fs::read_to_string(&circuit_path)
        .map_err(|e| CliError::Usage(format!("cannot read circuit {}: {e}", circuit_path.display())))?;
    let circuit = deserialize(&text)?;

    let instance = match (&flags.instance, &p.instance) {
        (Some(f), _) => Some(read_instance(f, None)?),
        (None, Some(r)) => Some(read_instance(&run.resolve(&r.path), r.sha256.as_deref())?),
        (None, None) => None,
    };
    let mut registry = OracleRegistry::new();
    if let Some(inst) = instance {
        let name = flags
            .oracle
            .clone()
            .or_else(|| p.oracle.clone())
            .unwrap_or_else(|| ORACLE.to_string());
        registry.insert(name, build_oracle(&inst)?);
    }
    let input = parse_bits(flags.input.as_deref().unwrap_or(&p.input))?;

    let dist = Simulator::new(run.budget).run_distribution(&circuit, &input, &registry)?;
    let json = serde_json::to_string(&dist).expect("distribution serialises") + "\n";
    output::emit(run.out.as_deref(), "distribution.json", &json)
}
