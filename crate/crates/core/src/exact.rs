//! Closed-form solutions used as oracles.
//!
//! * the four-dimensional solution space of `v⁗ − v″ = 0` and its clamped sub-basis;
//! * the clamped solution of `ε²u⁗ − u″ = amp` on an interval;
//! * the radial clamped solution on a disk, built from modified Bessel functions that
//!   are only ever evaluated in exponentially scaled form;
//! * the half-space boundary-layer profile `β(e^{−t} − 1 + t)`;
//! * the bounded solution `1 − cos t` of the wrong-sign operator `v⁗ + v″`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest argument for which `cosh`/`sinh` stay finite in f64.
pub const ODE_BASIS_MAX_T: f64 = 709.0;

/// Power series is used up to this argument, the asymptotic expansion beyond. The
/// asymptotic series for `e^{−x}I_ν(x)` misses an `O(e^{−2x})` term, so the switch must
/// sit well above 8 for 1e-10 relative accuracy.
const BESSEL_SERIES_MAX: f64 = 25.0;

/// Evaluations of `cosh t, sinh t, 1, t` and the clamped pair
/// `v₁ = cosh t − 1`, `v₂ = sinh t − t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeBasis {
    pub cosh: f64,
    pub sinh: f64,
    pub one: f64,
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
}

pub fn ode_basis(t: f64) -> Result<OdeBasis> {
    if !t.is_finite() || t.abs() > ODE_BASIS_MAX_T {
        return Err(Error::Range(format!("|t| = {} exceeds the overflow threshold {ODE_BASIS_MAX_T}", t.abs())));
    }
    let half = (0.5 * t).sinh();
    let v1 = 2.0 * half * half;
    let v2 = if t.abs() < 1.0 {
        // t³/3! + t⁵/5! + …
        let t2 = t * t;
        let mut term = t * t2 / 6.0;
        let mut sum: f64 = 0.0;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            term *= t2 / ((k + 1.0) * (k + 2.0));
            k += 2.0;
        }
        sum
    } else {
        t.sinh() - t
    };
    Ok(OdeBasis { cosh: t.cosh(), sinh: t.sinh(), one: 1.0, t, v1, v2 })
}

/// `v₁`, `v₂` and their first four derivatives at `t`, as `[v, v′, v″, v‴, v⁗]`.
pub fn clamped_basis_derivatives(t: f64) -> Result<([f64; 5], [f64; 5])> {
    let b = ode_basis(t)?;
    Ok(([b.v1, b.sinh, b.cosh, b.sinh, b.cosh], [b.v2, b.v1, b.sinh, b.cosh, b.sinh]))
}

fn check_bessel_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Range(format!("modified Bessel argument must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

/// `e^{−x} I_ν(x)` for ν ∈ {0, 1}.
fn bessel_scaled(nu: u32, x: f64) -> f64 {
    if x <= BESSEL_SERIES_MAX {
        // Σ (x/2)^{2k+ν} / (k! (k+ν)!), every term positive.
        let q = 0.25 * x * x;
        let mut term = if nu == 0 { 1.0 } else { 0.5 * x };
        let mut sum = 0.0;
        let mut k = 0.0;
        loop {
            sum += term;
            k += 1.0;
            term *= q / (k * (k + nu as f64));
            if term < 1e-17 * sum || term == 0.0 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // 1/√(2πx) Σ (−1)^k Π_{j≤k} (μ − (2j−1)²) / (k! (8x)^k), μ = 4ν².
        let mu = 4.0 * (nu * nu) as f64;
        let mut term = 1.0_f64;
        let mut sum = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            let next = -term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    Ok(bessel_scaled(0, x))
}

pub fn bessel_i1_scaled(x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    Ok(bessel_scaled(1, x))
}

fn check_eps_amp(eps: f64, amp: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if !(amp.is_finite() && amp >= 0.0) {
        return Err(Error::InvalidParameter(format!("amplitude must be nonnegative, got {amp}")));
    }
    Ok(())
}

/// Clamped solution of `ε²u⁗ − u″ = amp` on `[0, L]`:
///
/// `u(x) = a + b·x + c·e^{−x/ε} + d·e^{−(L−x)/ε} − amp·x²/2`.
///
/// The decaying exponentials span the same space as `cosh(x/ε), sinh(x/ε)` but stay
/// bounded for small ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneDimSolution {
    pub length: f64,
    pub eps: f64,
    pub amp: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub fn solve_exact_1d(length: f64, eps: f64, amp: f64) -> Result<OneDimSolution> {
    check_eps_amp(eps, amp)?;
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidParameter(format!("length must be positive, got {length}")));
    }
    let e = (-length / eps).exp();
    // Rows: u(0), ε·u′(0), u(L), ε·u′(L).
    #[rustfmt::skip]
    let m = Matrix4::new(
        1.0, 0.0,    1.0, e,
        0.0, eps,   -1.0, e,
        1.0, length, e,   1.0,
        0.0, eps,   -e,   1.0,
    );
    let rhs = Vector4::new(0.0, 0.0, amp * length * length / 2.0, eps * amp * length);
    let sol = m.lu().solve(&rhs).expect("clamped 4×4 system is nonsingular for eps > 0");
    Ok(OneDimSolution { length, eps, amp, a: sol[0], b: sol[1], c: sol[2], d: sol[3] })
}

impl OneDimSolution {
    fn layers(&self, x: f64) -> (f64, f64) {
        ((-x / self.eps).exp(), (-(self.length - x) / self.eps).exp())
    }

    /// k-th derivative, k ≤ 4.
    pub fn derivative(&self, x: f64, k: u32) -> f64 {
        let (el, er) = self.layers(x);
        let s = self.eps.powi(-(k as i32));
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let layer = sign * s * self.c * el + s * self.d * er;
        let poly = match k {
            0 => self.a + self.b * x - self.amp * x * x / 2.0,
            1 => self.b - self.amp * x,
            2 => -self.amp,
            _ => 0.0,
        };
        poly + layer
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.derivative(x, 1)
    }

    pub fn second(&self, x: f64) -> f64 {
        self.derivative(x, 2)
    }
}

/// Radial clamped solution of `ε²Δ²u − Δu = amp` on the disk of radius `R`:
///
/// `u(r) = b − amp·r²/4 + A·ε²·I₀(r/ε)`, with `A = amp·R / (2ε·I₁(R/ε))`.
///
/// `A` overflows for small ε, so it is stored as `a_scaled = A·e^{R/ε}` and every
/// evaluation works with ratios `e^{(r−R)/ε}·Ĩ₀(r/ε)/Ĩ₁(R/ε)` of scaled functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub radius: f64,
    pub eps: f64,
    pub amp: f64,
    pub a_scaled: f64,
    pub b: f64,
    i1_boundary: f64,
    i0_boundary: f64,
}

pub fn solve_exact_radial(radius: f64, eps: f64, amp: f64) -> Result<RadialSolution> {
    check_eps_amp(eps, amp)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let z = radius / eps;
    let i0 = bessel_scaled(0, z);
    let i1 = bessel_scaled(1, z);
    let a_scaled = amp * radius / (2.0 * eps * i1);
    let b = amp * radius * radius / 4.0 - amp * radius * eps * i0 / (2.0 * i1);
    Ok(RadialSolution { radius, eps, amp, a_scaled, b, i1_boundary: i1, i0_boundary: i0 })
}

impl RadialSolution {
    /// `e^{(r−R)/ε}·Ĩ_ν(r/ε)/Ĩ₁(R/ε)`, which equals `I_ν(r/ε)/I₁(R/ε)`.
    fn ratio(&self, nu: u32, r: f64) -> f64 {
        let z = r / self.eps;
        ((r - self.radius) / self.eps).exp() * bessel_scaled(nu, z) / self.i1_boundary
    }

    pub fn value(&self, r: f64) -> f64 {
        let (amp, rr, eps) = (self.amp, self.radius, self.eps);
        let shifted = self.ratio(0, r) - self.i0_boundary / self.i1_boundary;
        amp * (rr * rr - r * r) / 4.0 + amp * rr * eps / 2.0 * shifted
    }

    pub fn slope(&self, r: f64) -> f64 {
        -self.amp * r / 2.0 + self.amp * self.radius / 2.0 * self.ratio(1, r)
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        -self.amp + self.amp * self.radius / (2.0 * self.eps) * self.ratio(0, r)
    }

    pub fn second(&self, r: f64) -> f64 {
        if r == 0.0 {
            0.5 * self.laplacian(0.0)
        } else {
            self.laplacian(r) - self.slope(r) / r
        }
    }
}

/// `t ↦ β(e^{−t} − 1 + t)`, the one-dimensional blow-up limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceProfile {
    pub beta: f64,
}

impl HalfspaceProfile {
    pub fn new(beta: f64) -> Self {
        HalfspaceProfile { beta }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.beta * ((-t).exp_m1() + t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        -self.beta * (-t).exp_m1()
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.beta * (-t).exp()
    }
}

pub fn halfspace_profile(beta: f64, t: f64) -> f64 {
    HalfspaceProfile::new(beta).value(t)
}

/// `1 − cos t`, bounded and clamped at 0, solving `v⁗ + v″ = 0`.
pub fn wrong_sign_solution(t: f64) -> f64 {
    1.0 - t.cos()
}

/// `v⁗ + v″` for `v = 1 − cos t`, from its closed-form derivatives
/// `v″ = cos t`, `v⁗ = −cos t`.
pub fn wrong_sign_residual(t: f64) -> f64 {
    let c = t.cos();
    let d2 = c;
    let d4 = -c;
    d4 + d2
}
