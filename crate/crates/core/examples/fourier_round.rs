//! One `Z_p x Z_p` sampling round: the exact law of `(c, d)` and a few samples.

use semidirect_hsp::oracle;
use semidirect_hsp::qsim;
use semidirect_hsp::{GroupSpec, Result, SubgroupDesc};

fn main() -> Result<()> {
    let g = GroupSpec::canonical(5, 2, 1)?;
    let (t, s) = (0, 1);
    for hidden in [SubgroupDesc::TwoGen { t, s, h: 3 }, SubgroupDesc::CyclicX { t, s }] {
        let dist = qsim::post_collapse_distribution(&g, t, s, &hidden)?;
        println!("{hidden}: support {:?}", dist.support(1e-12));

        let f = oracle::make_oracle(&g, &hidden)?;
        let mut rng = qsim::derive_rng(1, 0);
        let rounds = (0..6)
            .map(|_| qsim::run_round(&g, t, s, &f, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        for r in &rounds {
            println!("  c = {}, d = {}, h = {:?}", r.c_tilde, r.d_tilde, r.h_tilde);
        }
        println!("  verdict: {:?}", qsim::decide(&rounds));
    }
    Ok(())
}
