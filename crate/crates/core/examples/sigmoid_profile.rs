//! Prints the shape of the two performance models: inflection point, peak
//! slope, and the two branches of the derivative inverse.

use decision_queue::{Branch, Sigmoid, SigmoidModel};

fn main() -> decision_queue::Result<()> {
    let models = [
        ("logistic p0=1 a=1 b=5", SigmoidModel::pew(1.0, 1.0, 5.0)?),
        ("drift-diffusion drift=1 sigma=1 eta=2", SigmoidModel::drift_diffusion(1.0, 1.0, 2.0)?),
    ];
    for (name, model) in models {
        let s = Sigmoid::new(model)?;
        let p = s.profile();
        println!("{name}");
        println!("  inflection {:.6} s, peak slope {:.6}", p.inflection, p.max_slope);
        println!("  f(0) = {:.6}, f'(0) = {:.6}", s.f(0.0), p.slope_at_zero);
        let level = 0.5 * p.max_slope;
        let lower = s.derivative_inverse(level, Branch::Lower)?;
        let upper = s.derivative_inverse(level, Branch::Upper)?;
        println!("  f'(t) = {level:.6} at t = {lower:.6} and t = {upper:.6}");
        for t in [0.5, 1.0, 2.0, 4.0, 8.0] {
            println!("  t={t:<4} f={:.6} f'={:.6} f''={:+.6}", s.f(t), s.df(t), s.d2f(t));
        }
    }
    Ok(())
}
