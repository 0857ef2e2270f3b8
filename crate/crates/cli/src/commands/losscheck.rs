use textkernel_core::loss::{run_gradient_suite, GradCheckConfig, Precision};

use crate::error::{CliError, CliResult};
use crate::{LosscheckArgs, PrecisionArg};

pub fn run(args: &LosscheckArgs) -> CliResult<()> {
    let precisions: &[Precision] = match args.precision {
        PrecisionArg::Single => &[Precision::Single],
        PrecisionArg::Double => &[Precision::Double],
        PrecisionArg::Both => &[Precision::Single, Precision::Double],
    };
    let (height, width) = args.size;
    let mut failed = 0;
    for &precision in precisions {
        let cfg = GradCheckConfig {
            seed: args.seed,
            width,
            height,
            coords: args.coords,
            precision,
            corrupt: args.corrupt_gradient,
        };
        for c in run_gradient_suite(&cfg)? {
            if !c.passed {
                failed += 1;
            }
            println!(
                "{} {:<10} {}-bit max rel err {:.3e} (tol {:.0e}, {} coords)",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                precision.bits(),
                c.max_rel_error,
                c.tolerance,
                c.checked
            );
        }
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} gradient checks failed")));
    }
    Ok(())
}
