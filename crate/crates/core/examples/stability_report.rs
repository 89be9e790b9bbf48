//! Courant bounds of both schemes and a verdict for a concrete configuration.

use sgfd::coeffs::{table1_coefficients, taylor_coefficients};
use sgfd::kernel::Scheme;
use sgfd::stability::{bound_balanced, bound_nonbalanced, check_config};
use sgfd::workbench::experiments::bench_reference;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(" M  balanced(taylor)  non-balanced(taylor)");
    for m in 1..=8 {
        let c = taylor_coefficients(m)?;
        println!("{m:2}  {:.6}          {:.6}", bound_balanced(&c).bound, bound_nonbalanced(&c)?.bound);
    }
    let t1 = bound_nonbalanced(&table1_coefficients(7)?)?;
    println!("table1 M=7 non-balanced: {:.6} at k h = {:?}", t1.bound, t1.extremizer);

    let (mut config, model) = bench_reference()?;
    for scheme in [Scheme::NonBalanced, Scheme::Balanced] {
        config.scheme = scheme;
        println!("\n{scheme}:\n{}", check_config(&config, &model)?.to_text());
    }
    Ok(())
}
