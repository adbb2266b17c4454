//! Splits `Z_45 x| Z_3` into `Z_5 x (Z_9 x| Z_3)` and checks a subgroup splits with it.

use semidirect_hsp::decomposition;
use semidirect_hsp::subgroups;
use semidirect_hsp::{GroupSpec, Result};

fn main() -> Result<()> {
    for n in [18u64, 45, 63, 90] {
        println!(
            "N = {n}: p = 3 divides no q - 1 for q | N: {}",
            decomposition::check_hypothesis(n, 3)?
        );
    }

    for phi in [31u64, 16] {
        let g = GroupSpec::new(45, 3, phi)?;
        let d = decomposition::decompose(&g)?;
        println!(
            "{g}: M0 = {}, inner {} = Psi_{} of {}",
            d.m0, d.inner, d.twist_index, d.canonical_inner
        );
        let h = subgroups::closure(&["x^15".parse()?, "x^3*y".parse()?], &g)?;
        let (h0, h1) = d.split_in_g(&h)?;
        println!("  |H| = {} = {} x {}", h.len(), h0.len(), h1.len());
    }
    println!("{}", serde_json::to_string_pretty(&decomposition::decompose(&GroupSpec::new(45, 3, 31)?)?).unwrap());
    Ok(())
}
