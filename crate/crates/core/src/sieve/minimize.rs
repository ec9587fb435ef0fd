/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let x = golden_section(|x| (x - 1.3).powi(2) + 2.0, -4.0, 7.0, 1e-10);
        // f is flat to within ε near the minimum, so x is only good to ≈ √ε.
        assert!((x - 1.3).abs() < 1e-7);
    }

    #[test]
    fn boundary_minimum() {
        let x = golden_section(|x| x, 0.5, 2.0, 1e-10);
        assert!((x - 0.5).abs() < 1e-8);
    }
}
