//! Recovers hidden subgroups of `Z_18 x| Z_3` from a scrambled oracle.

use semidirect_hsp::oracle::{self, HidingFunction};
use semidirect_hsp::qsim;
use semidirect_hsp::subgroups;
use semidirect_hsp::{GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::canonical(3, 2, 1)?;
    let mut rng = qsim::derive_rng(2024, 0);
    for hidden in subgroups::enumerate_subgroups(&g)? {
        let f = oracle::make_permuted_oracle(&g, &hidden, 99)?;
        let sol = qsim::solve_2pr(&g, &f, qsim::DEFAULT_ROUNDS, &mut rng)?;
        let ok = sol.subgroup.elements(&g)? == hidden.elements(&g)?;
        println!(
            "{:<9} -> {:<9} {}  ({} queries)",
            hidden.to_string(),
            sol.subgroup.to_string(),
            if ok { "ok" } else { "WRONG" },
            f.query_count()
        );
    }
    Ok(())
}
