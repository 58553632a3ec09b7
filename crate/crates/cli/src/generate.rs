use clap::{Args, ValueEnum};
use qpurify::circuit::serialize;
use qpurify::harness::rng_for;
use qpurify::purify::DelayedMeasurement;
use qpurify::septest::{build_measurement_algorithm, OracleInstance};

use crate::error::{CliError, CliResult};
use crate::manifest::Common;
use crate::output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// A Haar-random oracle instance
    Instance,
    /// The measurement algorithm as circuit JSON
    Algorithm,
    /// The measurement algorithm after delayed measurement
    Purified,
}

#[derive(Args, Clone, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub what: What,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// The instance's hidden bit
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub out_bit: u8,
}

pub fn run(args: &GenerateArgs, common: &Common) -> CliResult<()> {
    if common.manifest.is_some() {
        return Err(CliError::Usage("generate takes flags only, not a manifest".into()));
    }
    let (text, file) = match args.what {
        What::Instance => {
            let seed = common
                .seed
                .ok_or_else(|| CliError::Usage("a seed is required: pass --seed".into()))?;
            if args.n == 0 || args.t == 0 {
                return Err(CliError::Usage("instances need n, t >= 1".into()));
            }
            let inst = OracleInstance::random(args.n, args.t, args.out_bit == 1, &mut rng_for(seed, 0));
            eprintln!("sha256 {}", inst.content_hash());
            (inst.to_json(), "instance.json")
        }
        What::Algorithm => (serialize(&build_measurement_algorithm(args.n, args.t)?), "circuit.json"),
        What::Purified => {
            let c = build_measurement_algorithm(args.n, args.t)?;
            (
                serialize(&DelayedMeasurement::default().purify(&c)?.circuit),
                "circuit.json",
            )
        }
    };
    output::emit(common.out.as_deref(), file, &(text + "\n"))
}
