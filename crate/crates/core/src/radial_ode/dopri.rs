//! Dormand–Prince 5(4) with FSAL and a simple proportional step controller,
//! specialized to two-component real systems.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn scaled_norm(v: &State, y0: &State, y1: &State, tol: Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        acc += (v[i] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

fn initial_step<F: Fn(f64, &State) -> State>(f: &F, t: f64, y: &State, f0: &State, dir: f64, tol: Tolerances) -> f64 {
    let d0 = scaled_norm(y, y, y, tol);
    let d1 = scaled_norm(f0, y, y, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, dir * h0, &[(1.0, f0)]);
    let f1 = f(t + dir * h0, &y1);
    let diff = [f1[0] - f0[0], f1[1] - f0[1]];
    let d2 = scaled_norm(&diff, y, y, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Integrates `y' = f(t, y)` from `t0` through each of `stops` (monotone, all on one
/// side of `t0`), returning the state at every stop. When `trace` is given, every
/// accepted step is appended to it.
pub(crate) fn integrate<F>(
    f: &F,
    t0: f64,
    y0: State,
    stops: &[f64],
    tol: Tolerances,
    mut trace: Option<&mut Vec<(f64, State)>>,
) -> Result<Vec<State>>
where
    F: Fn(f64, &State) -> State,
{
    let mut out = Vec::with_capacity(stops.len());
    let Some(&last) = stops.last() else {
        return Ok(out);
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(f, t, &y, &k1, dir, tol);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push((t, y));
    }
    let mut steps = 0usize;
    for &stop in stops {
        while dir * (stop - t) > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Solver { radius: t, reason: "step budget exhausted".into() });
            }
            let remaining = (stop - t).abs();
            let mut hs = h.min(remaining);
            let landing = hs >= remaining * (1.0 - 1e-12);
            if landing {
                hs = remaining;
            }
            if hs <= 1e-14 * t.abs().max(1e-10) && !landing {
                return Err(Error::Solver { radius: t, reason: "step size underflow".into() });
            }
            let s = dir * hs;
            let k2 = f(t + C2 * s, &axpy(&y, s, &[(A21, &k1)]));
            let k3 = f(t + C3 * s, &axpy(&y, s, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * s, &axpy(&y, s, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * s, &axpy(&y, s, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + s, &axpy(&y, s, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(&y, s, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + s, &y_new);
            let mut err = [0.0; 2];
            for i in 0..2 {
                err[i] = s * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let en = scaled_norm(&err, &y, &y_new, tol);
            if !en.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
                h = hs * 0.2;
                if !(h > 0.0) {
                    return Err(Error::Solver { radius: t, reason: "non-finite state".into() });
                }
                continue;
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                t = if landing { stop } else { t + s };
                y = y_new;
                k1 = k7;
                if let Some(tr) = trace.as_deref_mut() {
                    tr.push((t, y));
                }
                // keep the unclamped proposal when the step was shortened to land on a stop
                h = if landing { h.max(hs * factor) } else { hs * factor };
            } else {
                h = hs * factor.min(1.0);
            }
        }
        out.push(y);
    }
    Ok(out)
}
