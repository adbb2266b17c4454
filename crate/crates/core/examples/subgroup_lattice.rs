//! Every subgroup of `Z_18 x| Z_3`, its order and the number of cosets.

use std::env;

use semidirect_hsp::subgroups::{self, SubgroupDesc};
use semidirect_hsp::{Element, GroupSpec, Result};

fn main() -> Result<()> {
    let mut args = env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let p = args.next().unwrap_or(3);
    let r = args.next().unwrap_or(2) as u32;
    let t0 = args.next().unwrap_or(1) as u32;
    let g = GroupSpec::canonical(p, r, t0)?;

    let list = subgroups::enumerate_subgroups(&g)?;
    println!("{g}: {} subgroups", list.len());
    for d in &list {
        let order = d.order(&g)?;
        let gens: Vec<String> = d.generators(&g)?.iter().map(Element::power_form).collect();
        println!("  {:<10} order {order:>3}  index {:>3}  <{}>", d.to_string(), g.order() / order, gens.join(", "));
    }

    let brute = subgroups::all_subgroups_brute(&g)?;
    println!("brute-force lattice has {} subgroups", brute.len());

    let h = SubgroupDesc::TwoGen { t: 0, s: 1, h: 1 };
    let x = "x^4*y^2".parse()?;
    println!(
        "{} in {h}: {}; its coset is labelled {}",
        Element::power_form(&x),
        subgroups::membership(&h, x, &g)?,
        subgroups::coset_label(&h, x, &g)?.rep
    );
    Ok(())
}
