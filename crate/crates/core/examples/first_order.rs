//! Prints the first-order polynomials of every built-in protocol.

use purecliff::perturbative::expand;
use purecliff::protocols::{builtin, BUILTIN_NAMES};
use purecliff::{Rational, RationalNoiseModel};

fn main() -> purecliff::Result<()> {
    let one = Rational::from_integer(1);
    let mut model = RationalNoiseModel::noiseless();
    model.epsilon = one;
    model.p_gate = one;
    model.p_meas = one;
    for name in BUILTIN_NAMES {
        let report = expand(&builtin(name)?.circuit, &model)?;
        println!("{name} ({} branches)", report.branch_count);
        print!("{}", report.to_text());
    }
    Ok(())
}
