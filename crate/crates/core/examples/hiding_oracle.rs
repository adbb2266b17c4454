//! Builds hiding functions, counts queries and checks the hiding condition.

use semidirect_hsp::oracle::{self, HidingFunction};
use semidirect_hsp::{GroupSpec, Result, SubgroupDesc};

fn main() -> Result<()> {
    let g = GroupSpec::canonical(3, 2, 1)?;
    let h = SubgroupDesc::TwoGen { t: 1, s: 1, h: 1 };
    let f = oracle::make_oracle(&g, &h)?;
    println!("{h} in {g}: {} cosets, hiding condition holds: {}", f.distinct_labels(), f.verify_hiding()?);

    for s in ["e", "x^6", "x^2*y", "x"] {
        let x = s.parse()?;
        println!("  f({s}) = {} (coset of {})", f.query(x), f.label_of(x).rep.power_form());
    }
    println!("queries so far: {}", f.query_count());

    let scrambled = oracle::make_permuted_oracle(&g, &h, 7)?;
    println!(
        "scrambled labels still hide {h}: {}",
        oracle::verify_hiding(&scrambled, &h)?
    );
    Ok(())
}
