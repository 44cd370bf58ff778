//! Iterative leak against the closed-form exponential, in both numeric modes.
//!
//! ```text
//! cargo run --example leak_kernels -- [tau] [x0]
//! ```

use aern::numerics::{exp_decay_reference, to_fixed, to_real, DecayParams, Numeric, QFormat};

fn main() -> aern::Result<()> {
    let mut args = std::env::args().skip(1);
    let tau: f64 = args.next().map_or(Ok(20.0), |s| s.parse()).expect("tau");
    let x0: f64 = args.next().map_or(Ok(10.0), |s| s.parse()).expect("x0");
    let p = DecayParams::new(tau, 1.0)?;
    println!(
        "tau = {tau}, x0 = {x0}, dt/tau in Q16.16 = {:?}",
        to_real(p.coefficient())
    );
    println!(
        "{:>4} {:>12} {:>12} {:>9} {:>12} {:>9}",
        "k", "exact", "float", "rel err", "Q8.8", "bound"
    );

    let mut x = x0;
    let mut q = to_fixed(x0, QFormat::Q8_8);
    for k in 1..=(3.0 * tau) as u32 {
        x = x.leak_decay(&p);
        q = q.leak_decay(&p);
        let exact = exp_decay_reference(x0, f64::from(k), tau);
        if k % (tau as u32 / 4).max(1) == 0 {
            println!(
                "{k:>4} {exact:>12.6} {x:>12.6} {:>9.2e} {:>12.6} {:>9.2e}",
                ((x - exact) / exact).abs(),
                to_real(q),
                f64::from(k) / (2.0 * tau),
            );
        }
    }
    println!(
        "fixed mode stalls once x * dt/tau drops below one LSB ({})",
        QFormat::Q8_8.resolution()
    );
    Ok(())
}
