//! Normal-form arithmetic in `Z_18 x| Z_3` with the canonical twist `phi11 = 7`.

use semidirect_hsp::{Element, GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::canonical(3, 2, 1)?;
    println!("{g}, |G| = {}", g.order());

    let u: Element = "x^2*y".parse()?;
    let v: Element = "(5,2)".parse()?;
    println!("{} * {} = {}", u.power_form(), v.power_form(), g.mul(u, v).power_form());
    println!("inverse of {} is {}", u.power_form(), g.inv(u).power_form());

    // y x y^-1 = x^phi11
    let conj = g.mul(g.mul(g.y(), g.x()), g.inv(g.y()));
    println!("y x y^-1 = {}", conj.power_form());

    for k in [2i64, 3, -1] {
        println!("({})^{k} = {}", u.power_form(), g.pow(u, k).power_form());
    }
    println!("closed form ({})^5 = {}", u.power_form(), g.pow_closed_form_2pr(u, 5)?.power_form());

    for s in ["x^9*y", "y", "x^6", "x"] {
        let e: Element = s.parse()?;
        println!("ord({s}) = {}", g.element_order(e));
    }
    Ok(())
}
