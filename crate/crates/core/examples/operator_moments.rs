//! Moments of T* and D: exact series values against the closed bounds.

use qdunkl::operators::{
    central_moment_T_exact, central_moment_bound, eval_d, eval_t, moment_T1, moment_T_bounds, phi_n, Kernel,
    StancuParams, TestFunction,
};
use qdunkl::qcore::QContext;

fn main() -> qdunkl::Result<()> {
    let params = StancuParams::new(QContext::new(0.95, 1.0)?, 20, 1.0, 2.0)?;
    let kernel = Kernel::new(params);
    println!("convergence radius in x: {:.4}", params.convergence_radius());
    for x in [0.0, 0.5, 1.0] {
        let w = kernel.weights(x, 1e-13)?;
        println!("x={x}: {} weights, tail mass {:.1e}", w.values.len(), w.tail_mass);
        println!(
            "  T(1)={:.14} T(t)={:.14} closed={:.14}",
            eval_t(&TestFunction::constant(), x, &params, 1e-13)?,
            eval_t(&TestFunction::Monomial { p: 1 }, x, &params, 1e-13)?,
            moment_T1(x, &params)
        );
        for j in 2..=4 {
            let v = eval_t(&TestFunction::Monomial { p: j }, x, &params, 1e-13)?;
            let b = moment_T_bounds(j, x, &params)?;
            println!("  T(t^{j})={v:.10} in [{:.10}, {:.10}]", b.lower, b.upper);
        }
        println!(
            "  T((t-x)^2)={:.3e} <= {:.3e} (phi_n={:.3e})  T((t-x)^4)={:.3e} <= {:.3e}",
            central_moment_T_exact(2, &kernel, &w),
            central_moment_bound(2, x, &params)?,
            phi_n(x, &params),
            central_moment_T_exact(4, &kernel, &w),
            central_moment_bound(4, x, &params)?
        );
        println!(
            "  D(t)={:.14}",
            eval_d(&TestFunction::Monomial { p: 1 }, x, &params, 1e-13)?
        );
    }
    Ok(())
}
