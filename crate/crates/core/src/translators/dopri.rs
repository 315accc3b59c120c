//! Dormand-Prince 5(4) for small autonomous-in-form systems `y' = f(x, y)`.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

pub(crate) struct Trial<const D: usize> {
    pub y: [f64; D],
    /// Scaled error norm; the step is acceptable when it is at most 1.
    pub err: f64,
}

/// One trial step of size `h` from `(x, y)`.
pub(crate) fn trial<const D: usize, F>(f: &F, x: f64, y: &[f64; D], h: f64, rtol: f64, atol: f64) -> Trial<D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut k = [[0.0; D]; 7];
    k[0] = f(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (d, v) in ys.iter_mut().enumerate() {
            *v += h * (0..s).map(|j| A[s][j] * k[j][d]).sum::<f64>();
        }
        k[s] = f(x + C[s] * h, &ys);
    }
    let mut y_new = *y;
    for (d, v) in y_new.iter_mut().enumerate() {
        *v += h * (0..6).map(|j| A[6][j] * k[j][d]).sum::<f64>();
    }
    let mut err = 0.0f64;
    for d in 0..D {
        let e = h * (0..7).map(|j| E[j] * k[j][d]).sum::<f64>();
        let scale = atol + rtol * y[d].abs().max(y_new[d].abs());
        err = err.max((e / scale).abs());
    }
    if !y_new.iter().all(|v| v.is_finite()) {
        err = f64::INFINITY;
    }
    Trial { y: y_new, err }
}

/// Step-size factor after a trial with scaled error `err`.
pub(crate) fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        5.0
    } else if !err.is_finite() {
        0.1
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.1, 5.0)
    }
}
