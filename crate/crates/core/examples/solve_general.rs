//! Recovers subgroups of groups outside the `2^t0 p^r` family: a twisted
//! `Z_45 x| Z_3` through the decomposition and `Z_15 x Z_3` directly.

use semidirect_hsp::oracle::{self, HidingFunction};
use semidirect_hsp::qsim;
use semidirect_hsp::subgroups;
use semidirect_hsp::{GroupSpec, Result, SubgroupDesc};

fn main() -> Result<()> {
    let mut rng = qsim::derive_rng(7, 0);
    for (n, phi) in [(45u64, 31u64), (15, 1)] {
        let g = GroupSpec::new(n, 3, phi)?;
        let lattice = subgroups::all_subgroups_brute(&g)?;
        let mut recovered = 0;
        for set in &lattice {
            let f = oracle::make_oracle(&g, &SubgroupDesc::ExplicitSet(set.clone()))?;
            let sol = qsim::solve_general(&g, &f, qsim::DEFAULT_ROUNDS, &mut rng, true)?;
            if &sol.elements(&g)? == set {
                recovered += 1;
            }
            if set.len() == 15 {
                println!("  |H| = 15: {} queries, {}", f.query_count(), serde_json::to_string(&sol).unwrap());
            }
        }
        println!("{g}: recovered {recovered} of {} subgroups", lattice.len());
    }
    Ok(())
}
