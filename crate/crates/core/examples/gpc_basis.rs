//! Total-degree gPC basis in two uniform variables: the multi-index order,
//! orthonormality under the tensor Gauss rule, and a projection.

use wave_sgldg::gpc::GpcBasis;

fn main() -> wave_sgldg::Result<()> {
    let basis = GpcBasis::new(2, 3)?;
    println!(
        "N = {}, P = {}, M = {}",
        basis.dims(),
        basis.order(),
        basis.len()
    );
    for (m, alpha) in basis.index_set().iter().enumerate() {
        println!("  Phi_{m}: alpha = {alpha:?}");
    }

    let m = basis.len();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let gram = basis
                .rule()
                .expectation(|y| basis.eval(i, y).unwrap() * basis.eval(j, y).unwrap());
            worst = worst.max((gram - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    println!("max |E[Phi_i Phi_j] - delta_ij| = {worst:.2e}");

    let f = |y: &[f64]| (0.3 * y[0] - 0.2 * y[1]).exp();
    let coeffs = basis.project(f);
    let y = [0.4, -0.7];
    println!(
        "exp(0.3 y1 - 0.2 y2) at {y:?}: exact {:.8}, P = 3 expansion {:.8}",
        f(&y),
        basis.evaluate_expansion(&coeffs, &y)
    );
    Ok(())
}
