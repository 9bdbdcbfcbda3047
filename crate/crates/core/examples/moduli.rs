//! Moduli of continuity, second-order and weighted moduli, Holder constants.

use qdunkl::moduli::{lipschitz_estimate, modulus, modulus2, weighted_modulus, DomainGrid};
use qdunkl::operators::TestFunction;

fn main() -> qdunkl::Result<()> {
    let grid = DomainGrid::new(4.0, 2001)?;
    let wide = DomainGrid::new(40.0, 8001)?;
    let fs = [
        TestFunction::Sine,
        TestFunction::ExpDecay { c: 1.0 },
        TestFunction::AbsShift { x0: 1.0 },
        TestFunction::holder_cusp(0.5),
        TestFunction::Monomial { p: 2 },
    ];
    for f in &fs {
        println!("{f}");
        for d in [0.01, 0.1, 0.5] {
            println!(
                "  delta={d:<5} omega={:.6} omega2={:.6} weighted={:.6}",
                modulus(f, d, &grid),
                modulus2(f, d.sqrt(), &grid),
                weighted_modulus(f, d, &wide)
            );
        }
        println!("  sup |f(x)-f(y)|/|x-y|^0.5 = {:.6}", lipschitz_estimate(f, 0.5, &grid));
    }
    Ok(())
}
