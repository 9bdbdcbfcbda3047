//! Dunkl coefficients and the Dunkl q-exponential with its truncation report.

use qdunkl::dunkl::{e_mu_q, e_mu_q_radius, gamma_classical, gamma_q, GammaTable};
use qdunkl::qcore::QContext;

fn main() -> qdunkl::Result<()> {
    let ctx = QContext::new(0.9, 0.75)?;
    let mut table = GammaTable::new(ctx, 16);
    for k in 0..6 {
        println!("gamma(k={k}) = {:.12}", gamma_q(k, &mut table)?);
    }
    println!("radius of convergence = {:.6}", e_mu_q_radius(&ctx));
    for x in [0.5, 2.0, 9.0] {
        let s = e_mu_q(x, &table, 1e-14)?;
        println!(
            "e(x={x}) = {:.12e}  terms={} relative tail <= {:.1e}",
            s.value()?,
            s.truncation_index + 1,
            s.relative_tail
        );
    }
    let near_one = QContext::new(1.0 - 1e-7, 0.75)?;
    let mut t = GammaTable::new(near_one, 16);
    for k in [3, 10] {
        println!(
            "q -> 1: gamma_q({k}) = {:.8e}  classical = {:.8e}",
            gamma_q(k, &mut t)?,
            gamma_classical(k, 0.75)?
        );
    }
    Ok(())
}
