use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Bisection on a sign-changing bracket. Stops when the bracket is no wider
/// than `tol` (or cannot shrink further in floating point) and returns the
/// endpoint with the smaller residual.
pub fn solve_bracketed_root(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("bad bracket [{a}, {b}]")));
    }
    let (mut lo, mut hi) = (a, b);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bracket { a, b, fa: flo, fb: fhi });
    }
    let mut fhi = fhi;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}

fn root(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    solve_bracketed_root(f, a, b, 0.0).expect("bracket verified analytically")
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// A transcendental constant with its defining equation and residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constant {
    pub name: String,
    pub equation: String,
    pub value: f64,
    pub residual: f64,
}

/// Positive root of `t = coth t`.
pub fn t_1_0() -> f64 {
    root(|t| t - coth(t), 1.0, 2.0)
}

/// Positive root of `k tanh(kt) = coth t`, defined for `k ≥ 2`.
pub fn t_k_1(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(invalid(format!("k tanh(kt) = coth t has no positive root for k = {k}")));
    }
    let k = k as f64;
    Ok(root(|t| k * (k * t).tanh() - coth(t), 1e-6, 10.0))
}

/// Positive root of `k tanh(kt) = 1.2 / t`.
pub fn t_k(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(invalid("t_k needs k ≥ 1"));
    }
    let kf = k as f64;
    Ok(root(|t| kf * (kf * t).tanh() - 1.2 / t, 1e-6, 10.0))
}

/// `t_k` together with the scaling identity `k t_k = t_1`; errors if the
/// identity fails beyond `1e-10`.
pub fn constant_tk(k: u32) -> Result<(Constant, f64)> {
    let v = t_k(k)?;
    let t1 = t_k(1)?;
    let defect = (k as f64 * v - t1).abs();
    if defect > 1e-10 {
        return Err(Error::Internal(format!("k t_k - t_1 = {defect} for k = {k}")));
    }
    let kf = k as f64;
    Ok((
        Constant {
            name: format!("t_{k}"),
            equation: format!("{k} tanh({k} t) = 1.2 / t"),
            value: v,
            residual: (kf * (kf * v).tanh() - 1.2 / v).abs(),
        },
        defect,
    ))
}

/// `T_{1,0}`, `T_{k,1}` for `k = 2..=k_max`, `t_k` for `k = 1..=k_max`.
pub fn constants(k_max: u32) -> Result<Vec<Constant>> {
    let mut out = Vec::new();
    let t10 = t_1_0();
    out.push(Constant {
        name: "T_1_0".into(),
        equation: "t = coth t".into(),
        value: t10,
        residual: (t10 - coth(t10)).abs(),
    });
    for k in 2..=k_max {
        let v = t_k_1(k)?;
        let kf = k as f64;
        out.push(Constant {
            name: format!("T_{k}_1"),
            equation: format!("{k} tanh({k} t) = coth t"),
            value: v,
            residual: (kf * (kf * v).tanh() - coth(v)).abs(),
        });
    }
    for k in 1..=k_max {
        out.push(constant_tk(k)?.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_sign_change_is_a_bracket_error() {
        let e = solve_bracketed_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(e, Error::Bracket { .. }));
    }

    #[test]
    fn bracket_width_meets_tolerance() {
        let r = solve_bracketed_root(|x| x * x - 2.0, 0.0, 2.0, 1e-6).unwrap();
        assert!((r - 2f64.sqrt()).abs() <= 1e-6);
    }

    #[test]
    fn k_equal_one_has_no_crossing() {
        assert!(t_k_1(1).is_err());
    }
}
