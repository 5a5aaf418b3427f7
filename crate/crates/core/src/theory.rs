//! Closed-form convergence factors and optimal relaxation parameters.
//!
//! For both methods the one-step interface multiplier has the form
//! `1 − θ·B`, where the bracket `B` depends on the decay rates of the two
//! subdomain solutions:
//!
//! * DN: `B = 1 + tanh(x_r)·coth(x_l)`
//! * NN: `B = (tanh(x_l) + tanh(x_r))·(coth(x_l) + coth(x_r))`
//!
//! In the continuum `x_l = a·α`, `x_r = a·(1−α)` with `a = √(1/ν + k²π²)`
//! (k = 0 is the 1D case). The discrete symbol replaces these with the exact
//! decay rates of the finite-difference recurrence, `x_l = μ·m`,
//! `x_r = μ·(N−m)`, `sinh(μ/2) = (h/2)·√(1/ν + λ_k)`, where
//! `λ_k = (4/h²)·sin²(kπh/2)` is the discrete x₂ eigenvalue. The discrete
//! symbol reproduces the solvers' per-iteration ratios to round-off.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Beyond this argument tanh and coth equal 1 in double precision.
const CLAMP: f64 = 40.0;

fn tanh_c(x: f64) -> f64 {
    if x > CLAMP {
        1.0
    } else {
        x.tanh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dn,
    Nn,
}

impl Method {
    /// Bracket value as k → ∞ (both decay rates blow up, tanh = coth = 1).
    pub fn limit_bracket(self) -> f64 {
        match self {
            Method::Dn => 2.0,
            Method::Nn => 4.0,
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dn" => Ok(Method::Dn),
            "nn" => Ok(Method::Nn),
            other => Err(Error::invalid("method", format!("unknown method {other:?} (expected dn or nn)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dn => "dn",
            Method::Nn => "nn",
        })
    }
}

/// x₂ frequency of the Fourier-reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frequency {
    Mode(usize),
    Limit,
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Mode(k) => write!(f, "{k}"),
            Frequency::Limit => f.write_str("limit"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Continuum,
    /// Finite-difference grid with `n_cells` per direction; α must be m/N.
    Discrete { n_cells: usize },
}

/// A fully specified convergence-factor evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorQuery {
    pub method: Method,
    pub nu: f64,
    pub alpha: f64,
    pub theta: f64,
    pub frequency: Frequency,
    pub symbol: Symbol,
}

impl FactorQuery {
    pub fn new(method: Method, nu: f64, alpha: f64, theta: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::invalid("nu", format!("must be positive, got {nu}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        Ok(Self {
            method,
            nu,
            alpha,
            theta,
            frequency: Frequency::Mode(0),
            symbol: Symbol::Continuum,
        })
    }

    pub fn at(mut self, frequency: Frequency) -> Self {
        self.frequency = frequency;
        self
    }

    pub fn with_symbol(mut self, symbol: Symbol) -> Self {
        self.symbol = symbol;
        self
    }

    pub fn bracket(&self) -> f64 {
        bracket(self.method, self.nu, self.alpha, self.frequency, self.symbol)
    }

    /// Signed one-step multiplier of the interface error.
    pub fn multiplier(&self) -> f64 {
        1.0 - self.theta * self.bracket()
    }

    pub fn rho(&self) -> f64 {
        self.multiplier().abs()
    }
}

fn check(nu: f64, alpha: f64) {
    assert!(nu > 0.0, "nu must be positive, got {nu}");
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
}

/// Decay-rate arguments (x_l, x_r) of the two subdomains.
fn arguments(nu: f64, alpha: f64, k: usize, symbol: Symbol) -> (f64, f64) {
    let kf = k as f64;
    match symbol {
        Symbol::Continuum => {
            let a = (1.0 / nu + kf * kf * PI * PI).sqrt();
            (a * alpha, a * (1.0 - alpha))
        }
        Symbol::Discrete { n_cells } => {
            let n = n_cells as f64;
            let h = 1.0 / n;
            let m = (alpha * n).round();
            let lambda = 4.0 / (h * h) * (0.5 * kf * PI * h).sin().powi(2);
            let mu = 2.0 * (0.5 * h * (1.0 / nu + lambda).sqrt()).asinh();
            (mu * m, mu * (n - m))
        }
    }
}

fn bracket_from_args(method: Method, xl: f64, xr: f64) -> f64 {
    match method {
        Method::Dn => 1.0 + tanh_c(xr) / tanh_c(xl),
        Method::Nn => {
            // the two factors are O(x) and O(1/x) for small arguments; form
            // the product from ratios so neither underflows nor overflows
            let (tl, tr) = (tanh_c(xl), tanh_c(xr));
            2.0 + tl / tr + tr / tl
        }
    }
}

/// The bracket `B` with multiplier `1 − θ·B`.
pub fn bracket(method: Method, nu: f64, alpha: f64, frequency: Frequency, symbol: Symbol) -> f64 {
    check(nu, alpha);
    match frequency {
        Frequency::Limit => method.limit_bracket(),
        Frequency::Mode(k) => {
            let (xl, xr) = arguments(nu, alpha, k, symbol);
            bracket_from_args(method, xl, xr)
        }
    }
}

/// Weight ν/(1 + ν·λ_k) of the line problem obtained by transforming the
/// square problem in x₂ at frequency k.
pub fn reduced_nu(nu: f64, k: usize, symbol: Symbol) -> f64 {
    let kf = k as f64;
    let lambda = match symbol {
        Symbol::Continuum => kf * kf * PI * PI,
        Symbol::Discrete { n_cells } => {
            let h = 1.0 / n_cells as f64;
            4.0 / (h * h) * (0.5 * kf * PI * h).sin().powi(2)
        }
    };
    1.0 / (1.0 / nu + lambda)
}

/// Signed DN multiplier `(1−θ) − θ·tanh(a(1−α))·coth(aα)`.
pub fn dn_trace_map(nu: f64, alpha: f64, theta: f64) -> f64 {
    1.0 - theta * bracket(Method::Dn, nu, alpha, Frequency::Mode(0), Symbol::Continuum)
}

/// Signed NN multiplier `1 − θ·S·C`.
pub fn nn_trace_map(nu: f64, alpha: f64, theta: f64) -> f64 {
    1.0 - theta * bracket(Method::Nn, nu, alpha, Frequency::Mode(0), Symbol::Continuum)
}

pub fn rho_dn_1d(nu: f64, alpha: f64, theta: f64) -> f64 {
    dn_trace_map(nu, alpha, theta).abs()
}

pub fn rho_nn_1d(nu: f64, alpha: f64, theta: f64) -> f64 {
    nn_trace_map(nu, alpha, theta).abs()
}

pub fn theta_star_dn_1d(nu: f64, alpha: f64) -> f64 {
    1.0 / bracket(Method::Dn, nu, alpha, Frequency::Mode(0), Symbol::Continuum)
}

pub fn theta_star_nn_1d(nu: f64, alpha: f64) -> f64 {
    1.0 / bracket(Method::Nn, nu, alpha, Frequency::Mode(0), Symbol::Continuum)
}

/// θ that annihilates frequency `frequency` under `symbol`; with
/// `Mode(0)` and a discrete symbol this is the exact two-step θ of a 1D grid.
pub fn theta_star(method: Method, nu: f64, alpha: f64, frequency: Frequency, symbol: Symbol) -> f64 {
    1.0 / bracket(method, nu, alpha, frequency, symbol)
}

/// Convergence factor of one x₂ frequency of the square problem.
pub fn rho_2d(method: Method, nu: f64, alpha: f64, theta: f64, frequency: Frequency, symbol: Symbol) -> f64 {
    (1.0 - theta * bracket(method, nu, alpha, frequency, symbol)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupRho {
    pub sup: f64,
    pub argmax: Frequency,
    /// Whether every scanned interior frequency stays below the larger of
    /// the k = 0 and limit values (+1e−12).
    pub endpoint_dominated: bool,
}

pub const DEFAULT_K_SCAN: usize = 1000;

/// Supremum of [`rho_2d`] over k = 0..=k_scan and the analytic limit.
pub fn sup_rho_2d(method: Method, nu: f64, alpha: f64, theta: f64, k_scan: usize, symbol: Symbol) -> SupRho {
    let limit = rho_2d(method, nu, alpha, theta, Frequency::Limit, symbol);
    let at_zero = rho_2d(method, nu, alpha, theta, Frequency::Mode(0), symbol);
    let mut sup = limit;
    let mut argmax = Frequency::Limit;
    let mut interior_max = 0.0f64;
    for k in 0..=k_scan {
        let r = rho_2d(method, nu, alpha, theta, Frequency::Mode(k), symbol);
        if k > 0 {
            interior_max = interior_max.max(r);
        }
        if r > sup {
            sup = r;
            argmax = Frequency::Mode(k);
        }
    }
    SupRho {
        sup,
        argmax,
        endpoint_dominated: interior_max <= limit.max(at_zero) + 1e-12,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquioscillationResult {
    pub theta_star: f64,
    pub rho_at_zero: f64,
    pub rho_at_limit: f64,
    pub sup_rho: f64,
    pub argmax_k: Frequency,
    /// 2/(B_limit + B_0), the explicit solution of the balance equation.
    pub closed_form: f64,
    /// The balance equation had no sign change or the endpoints did not
    /// dominate, and θ* came from golden-section minimization instead.
    pub fallback_used: bool,
}

/// θ balancing the factor at k = 0 against k → ∞, which minimizes the
/// supremum over frequencies when the bracket is monotone in k.
pub fn theta_star_2d(method: Method, nu: f64, alpha: f64) -> EquioscillationResult {
    let b0 = bracket(method, nu, alpha, Frequency::Mode(0), Symbol::Continuum);
    let binf = method.limit_bracket();
    let closed_form = 2.0 / (b0 + binf);
    let balance = |theta: f64| (1.0 - theta * b0).abs() - (1.0 - theta * binf).abs();

    let (mut lo, mut hi) = if b0 > binf { (1.0 / b0, 1.0 / binf) } else { (1.0 / binf, 1.0 / b0) };
    let mut theta = if lo == hi {
        lo
    } else {
        let (flo, fhi) = (balance(lo), balance(hi));
        if flo.signum() == fhi.signum() {
            f64::NAN
        } else {
            while hi - lo > 1e-15 {
                let mid = 0.5 * (lo + hi);
                if balance(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if mid == lo && mid == hi {
                    break;
                }
            }
            0.5 * (lo + hi)
        }
    };

    let mut fallback_used = false;
    let dominated = theta.is_finite()
        && sup_rho_2d(method, nu, alpha, theta, DEFAULT_K_SCAN, Symbol::Continuum).endpoint_dominated;
    if !dominated {
        fallback_used = true;
        theta = golden_section(
            |t| sup_rho_2d(method, nu, alpha, t, DEFAULT_K_SCAN, Symbol::Continuum).sup,
            0.0,
            2.0 / binf,
            1e-12,
        );
    }
    let sup = sup_rho_2d(method, nu, alpha, theta, DEFAULT_K_SCAN, Symbol::Continuum);
    EquioscillationResult {
        theta_star: theta,
        rho_at_zero: rho_2d(method, nu, alpha, theta, Frequency::Mode(0), Symbol::Continuum),
        rho_at_limit: rho_2d(method, nu, alpha, theta, Frequency::Limit, Symbol::Continuum),
        sup_rho: sup.sup,
        argmax_k: sup.argmax,
        closed_form,
        fallback_used,
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
