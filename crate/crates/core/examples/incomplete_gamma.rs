// Complex-order incomplete gamma and the incomplete Fox H kernel.

use num_complex::Complex64;
use xpharq::exact::{foxh_upper_incomplete_11, FoxHParams11};
use xpharq::special::{bessel_k1, gamma, upper_incomplete_gamma};

fn main() -> xpharq::Result<()> {
    for a in [Complex64::new(0.5, 0.0), Complex64::new(0.5, 10.0), Complex64::new(2.0, -3.0)] {
        let inc = upper_incomplete_gamma(a, 1.0)?;
        println!("Gamma({a}, 1) = {inc:.10}   Gamma({a}) = {:.10}", gamma(a));
    }
    for z in [0.25, 1.0, 4.0] {
        let h = foxh_upper_incomplete_11(&FoxHParams11::new(z, 0.0))?;
        let k = 2.0 * z.sqrt() * bessel_k1(2.0 * z.sqrt())?;
        println!("H({z} | 0) = {h:.12}   2 sqrt(z) K1(2 sqrt(z)) = {k:.12}");
    }
    let h = foxh_upper_incomplete_11(&FoxHParams11::new(1.0, 0.5))?;
    println!("H(1 | 0.5) = {h:.12}");
    Ok(())
}
