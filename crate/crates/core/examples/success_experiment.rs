//! Monte-Carlo success rate against the bound, plus the exact cyclic-case error.
//!
//! ```text
//! cargo run --release --example success_experiment -- 3 5 10000
//! ```

use std::env;

use semidirect_hsp::experiments;
use semidirect_hsp::{GroupSpec, Result, SubgroupDesc};

fn main() -> Result<()> {
    let mut args = env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let p = args.next().unwrap_or(3);
    let k = args.next().unwrap_or(5) as u32;
    let trials = args.next().unwrap_or(2_000);
    let g = GroupSpec::canonical(p, 2, 1)?;

    for hidden in [SubgroupDesc::TwoGen { t: 0, s: 2, h: 1 }, SubgroupDesc::CyclicX { t: 1, s: 1 }] {
        let report = experiments::estimate_success(&g, &hidden, k, trials, 1)?;
        println!(
            "{hidden}: success {:.4} (sigma {:.4}), bound {:.4}, failures {:?}",
            report.success_rate, report.sigma, report.success_bound, report.failures
        );
    }

    if let Ok(counts) = experiments::exact_cyclic_decision(p, k) {
        println!(
            "exact cyclic-case error {}/{} = {:.5}, bound {:.5}",
            counts.two_gen,
            counts.total,
            counts.error(),
            experiments::cyclic_error_bound(p, k)?
        );
    }
    Ok(())
}
