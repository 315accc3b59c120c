//! Quadrature and bracketing root-finding used by the closed forms and the
//! translator routines.

/// Relative error below which a subinterval is not split further.
const ROUNDING_FLOOR: f64 = 1e-14;
const MAX_DEPTH: u32 = 12;

/// Integrates `f` over `[a, b]` to roughly `abs_tol`.
///
/// Double-exponential quadrature, split in halves while the reported error is
/// above the target. The nodes stop short of the endpoints, so an integrable
/// endpoint singularity loses the mass of that gap (about `4e-9` for `y^(-1/2)`
/// on the unit interval); substitute such singularities away first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    integrate_rec(&f, a, b, abs_tol, 0)
}

fn integrate_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, depth: u32) -> f64 {
    let out = quadrature::double_exponential::integrate(f, a, b, abs_tol);
    let floor = ROUNDING_FLOOR * out.integral.abs();
    if out.error_estimate <= abs_tol.max(floor) || depth >= MAX_DEPTH {
        return out.integral;
    }
    let m = 0.5 * (a + b);
    integrate_rec(f, a, m, 0.5 * abs_tol, depth + 1) + integrate_rec(f, m, b, 0.5 * abs_tol, depth + 1)
}

/// Bisection on a sign-changing bracket `[lo, hi]`.
///
/// Stops when the bracket can no longer be split or when `done(lo, hi)` says
/// it is narrow enough; returns the midpoint.
pub fn bisect<F, D>(f: F, mut lo: f64, mut hi: f64, done: D) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64, f64) -> bool,
{
    let f_lo = f(lo);
    debug_assert!(f_lo * f(hi) <= 0.0, "bracket does not change sign");
    let lo_negative = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) || done(lo, hi) {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_singularity() {
        // int_0^1 y^(-1/2) dy = 2
        let v = integrate(|y: f64| y.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn smooth_integrand() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn bisection_reaches_adjacent_floats() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, |_, _| false);
        assert!((r - std::f64::consts::SQRT_2).abs() <= 4e-16);
        let r = bisect(|x| 2.0 - x * x, 0.0, 2.0, |lo, hi| hi - lo < 1e-6);
        assert!((r - std::f64::consts::SQRT_2).abs() <= 1e-6);
    }
}
