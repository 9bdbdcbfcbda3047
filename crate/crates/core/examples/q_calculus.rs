//! q-integers, q-factorials, q-binomials and the two q-exponentials.

use qdunkl::qcore::{q_binomial, q_bracket, q_exp_big, q_exp_small, q_exp_small_product, q_factorial, QContext};

fn main() -> qdunkl::Result<()> {
    for q in [0.5, 0.9, 0.999] {
        let ctx = QContext::new(q, 1.0)?;
        println!(
            "q={q:<6} [5]_q={:.10} [2.5]_q={:.10} [6]_q!={:.6} C(6,3)_q={:.6}",
            q_bracket(5.0, &ctx)?,
            q_bracket(2.5, &ctx)?,
            q_factorial(6, &ctx),
            q_binomial(6, 3, &ctx)?
        );
    }
    let ctx = QContext::new(0.7, 1.0)?;
    for z in [0.5, 1.5, 3.0] {
        let series = q_exp_small(z, &ctx, 1e-15)?;
        let product = q_exp_small_product(z, &ctx, 1e-15)?;
        let big = q_exp_big(-z, &ctx, 1e-15)?;
        println!(
            "z={z}: e_q series={:.15} product={:.15} E_q(-z) e_q(z)={:.15}",
            series.value,
            product.value,
            big.value * series.value
        );
    }
    Ok(())
}
