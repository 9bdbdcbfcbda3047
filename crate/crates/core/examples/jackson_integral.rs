//! Jackson integrals from zero, over operator cells, and their closed forms.

use qdunkl::qcore::QContext;
use qdunkl::qintegral::{jackson_integral, jackson_integral_zero, monomial_cell_integral, Polynomial, QCell};

fn main() -> qdunkl::Result<()> {
    let ctx = QContext::new(0.8, 1.0)?;
    println!(
        "int_0^2 t^2 d_q t = {:.15}",
        jackson_integral_zero(|t| t * t, 2.0, &ctx, 1e-16)
    );
    println!("8 / [3]_q          = {:.15}", 8.0 / ctx.bracket(3.0));
    for k in 0..4 {
        let cell = QCell::new(k, &ctx, 10);
        println!(
            "cell k={k}: [{:.6}, {:.6}] width*[n]={:.15}",
            cell.lower,
            cell.upper,
            cell.width() * cell.bracket_n
        );
        for p in [1, 4] {
            let exact = monomial_cell_integral(p, &cell)?;
            let numeric = jackson_integral(|t| t.powi(p as i32), &cell, 1e-16);
            println!("  p={p}: closed={exact:.15e} numeric={numeric:.15e}");
        }
    }
    let poly = Polynomial::new(vec![1.0, -3.0, 0.5]);
    let cell = QCell::new(2, &ctx, 4);
    println!(
        "1 - 3t + t^2/2 on cell 2: exact={:.15e} numeric={:.15e}",
        poly.jackson_cell(&cell),
        jackson_integral(|t| poly.eval(t), &cell, 1e-16)
    );
    Ok(())
}
