//! Time integration of the truncated full and near-resonant systems.
//!
//! The state is the transformed variable `u = e^{−Ωtℒ}U`, which obeys
//!
//! ```text
//! ∂t u + B̃(Ωt; u, u) = μΔu
//! ```
//!
//! so rotation never enters the time step. Viscosity is handled by an exact
//! integrating factor and the nonlinearity by classical RK4 (Lawson form).

use std::sync::Arc;

use num_complex::Complex64;

use crate::bilinear::TriadPlan;
use crate::error::{Error, Result};
use crate::field::{from_transformed, random_field_on, to_transformed, SpectralField};
use crate::helical::{self, CVec3};
use crate::lattice::{ModeTable, TorusGeometry};
use crate::par;
use crate::resonance::BandwidthSpec;

/// Which right-hand side to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// Every triad of the truncation.
    Full,
    /// Triads admitted by the configured bandwidth.
    NearResonant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub geom: TorusGeometry,
    pub radius: f64,
    pub omega: f64,
    pub mu: f64,
    pub spec: BandwidthSpec,
    pub t_end: f64,
    pub dt: f64,
    pub seed: u64,
    pub record_stride: usize,
    /// Extra Sobolev exponents recorded at each sample.
    pub s_list: Vec<f64>,
    /// Switches the nonlinear term off.
    pub nonlinear: bool,
    /// Keep a field snapshot at every sample.
    pub keep_snapshots: bool,
    /// Growth of `‖u‖₀²` over its initial value treated as blow-up.
    pub blowup_factor: f64,
}

impl SimConfig {
    pub fn new(radius: f64, omega: f64, mu: f64, spec: BandwidthSpec, t_end: f64, dt: f64) -> Self {
        SimConfig {
            geom: TorusGeometry::unit(),
            radius,
            omega,
            mu,
            spec,
            t_end,
            dt,
            seed: 0,
            record_stride: 1,
            s_list: Vec::new(),
            nonlinear: true,
            keep_snapshots: false,
            blowup_factor: 1e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if !(self.radius >= 2.0) {
            return Err(Error::invalid(format!("radius must be at least 2, got {}", self.radius)));
        }
        if !(self.mu >= 0.0 && self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::invalid("mu and omega must be nonnegative"));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride must be at least 1"));
        }
        self.spec.validate()
    }

    /// Number of steps and the step actually used, `t_end / steps`.
    pub fn grid(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let steps = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }

    pub fn table(&self) -> Result<Arc<ModeTable>> {
        Ok(Arc::new(ModeTable::new(self.radius, self.geom)?))
    }
}

/// Diagnostics at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// `‖U‖₀²`.
    pub l2_sq: f64,
    /// `‖∇U‖₀² = ‖U‖₁²`.
    pub grad_sq: f64,
    /// `‖U‖_s²` for each configured exponent.
    pub hs_sq: Vec<f64>,
    /// `2μ∫₀ᵗ‖∇U‖₀²`, accumulated with the RK stages.
    pub dissipation: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Fields `U` (not `u`) at the sample times, when requested.
    pub snapshots: Vec<SpectralField>,
    pub s_list: Vec<f64>,
    pub mu: f64,
}

/// The per-run constant data: plan, viscous factors.
pub struct Integrator {
    plan: TriadPlan,
    axes: Vec<[f64; 3]>,
    grad_w: Vec<f64>,
    mu: f64,
    omega: f64,
    nonlinear: bool,
}

impl Integrator {
    pub fn new(cfg: &SimConfig, table: Arc<ModeTable>, system: System) -> Result<Self> {
        cfg.validate()?;
        let spec = match system {
            System::Full => BandwidthSpec::all_pass(),
            System::NearResonant => cfg.spec,
        };
        let plan = TriadPlan::new(table.clone(), spec)?;
        let modes = table.modes();
        Ok(Integrator {
            plan,
            axes: modes.iter().map(|w| w.adjusted.map(|x| x / w.norm)).collect(),
            grad_w: modes.iter().map(|w| w.norm_sq()).collect(),
            mu: cfg.mu,
            omega: cfg.omega,
            nonlinear: cfg.nonlinear,
        })
    }

    pub fn spec(&self) -> &BandwidthSpec {
        self.plan.spec()
    }

    fn rotate_all(&self, u: &[CVec3], tau: f64) -> Vec<CVec3> {
        par::map_range(u.len(), |i| {
            let a = &self.axes[i];
            let (s, c) = (tau * a[2]).sin_cos();
            helical::rotate(a, c, s, &u[i])
        })
    }

    /// `−B̃(τ; u, u)`.
    fn rhs(&self, t: f64, u: &[CVec3]) -> Vec<CVec3> {
        if !self.nonlinear {
            return vec![helical::ZERO3; u.len()];
        }
        let tau = self.omega * t;
        let ur = if tau == 0.0 { u.to_vec() } else { self.rotate_all(u, tau) };
        let b = self.plan.apply_raw(&ur, &ur);
        let b = if tau == 0.0 { b } else { self.rotate_all(&b, -tau) };
        b.into_iter().map(|v| helical::scale(&v, Complex64::new(-1.0, 0.0))).collect()
    }

    fn grad_sq_raw(&self, u: &[CVec3], volume: f64) -> f64 {
        volume * u.iter().zip(&self.grad_w).map(|(v, w)| w * helical::norm_sq(v)).sum::<f64>()
    }

    /// One Lawson RK4 step of length `dt` from time `t`.
    ///
    /// Returns the new state and the increment of `2μ∫‖∇u‖₀²` integrated with
    /// the same stages.
    pub fn step_raw(&self, u: &[CVec3], t: f64, dt: f64, volume: f64) -> (Vec<CVec3>, f64) {
        let half: Vec<f64> = self.grad_w.iter().map(|w| (-self.mu * w * dt * 0.5).exp()).collect();
        let full: Vec<f64> = half.iter().map(|h| h * h).collect();
        let comb = |a: &[CVec3], fa: Option<&[f64]>, b: &[CVec3], fb: Option<&[f64]>, cb: f64| -> Vec<CVec3> {
            (0..a.len())
                .map(|i| {
                    let sa = fa.map_or(1.0, |f| f[i]);
                    let sb = fb.map_or(1.0, |f| f[i]) * cb;
                    [0, 1, 2].map(|d| a[i][d] * sa + b[i][d] * sb)
                })
                .collect()
        };
        let zero = vec![helical::ZERO3; u.len()];
        let u1 = u.to_vec();
        let k1 = self.rhs(t, &u1);
        let u2 = comb(&u1, Some(&half), &k1, Some(&half), 0.5 * dt);
        let k2 = self.rhs(t + 0.5 * dt, &u2);
        let u3 = comb(&u1, Some(&half), &k2, None, 0.5 * dt);
        let k3 = self.rhs(t + 0.5 * dt, &u3);
        let u4 = comb(&u1, Some(&full), &k3, Some(&half), dt);
        let k4 = self.rhs(t + dt, &u4);
        let mut out = comb(&u1, Some(&full), &zero, None, 0.0);
        for i in 0..u.len() {
            for d in 0..3 {
                let inc = k1[i][d] * full[i] + (k2[i][d] + k3[i][d]) * (2.0 * half[i]) + k4[i][d];
                out[i][d] += inc * (dt / 6.0);
            }
        }
        let g = |x: &[CVec3]| 2.0 * self.mu * self.grad_sq_raw(x, volume);
        let diss = dt / 6.0 * (g(&u1) + 2.0 * g(&u2) + 2.0 * g(&u3) + g(&u4));
        (out, diss)
    }

    /// Exact flow with the nonlinearity off: `e^{−μ|ň|²t}u₀` and the matching
    /// `2μ∫₀ᵗ‖∇u‖₀²`, evaluated directly at `t` so no per-step error accumulates.
    fn linear_flow(&self, u0: &[CVec3], t: f64, volume: f64) -> (Vec<CVec3>, f64) {
        let mut diss = 0.0;
        let out = u0
            .iter()
            .zip(&self.grad_w)
            .map(|(v, w)| {
                let e = -self.mu * w * t;
                diss -= volume * helical::norm_sq(v) * (2.0 * e).exp_m1();
                v.map(|c| c * e.exp())
            })
            .collect();
        (out, diss)
    }
}

/// One step on a field in the transformed variable.
pub fn step(u: &SpectralField, t: f64, dt: f64, integrator: &Integrator) -> Result<SpectralField> {
    if !integrator.plan.table().same_truncation(u.table()) {
        return Err(Error::TruncationMismatch);
    }
    let (out, _) = integrator.step_raw(u.coeffs(), t, dt, u.geometry().volume());
    check_finite(&out, t + dt)?;
    Ok(SpectralField::from_raw(u.table().clone(), out))
}

fn check_finite(u: &[CVec3], t: f64) -> Result<()> {
    if u.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite coefficient at t = {t}")))
    }
}

fn sample(f: &SpectralField, t: f64, s_list: &[f64], dissipation: f64) -> Sample {
    Sample {
        t,
        l2_sq: f.hs_norm_sq(0.0),
        grad_sq: f.hs_norm_sq(1.0),
        hs_sq: s_list.iter().map(|&s| f.hs_norm_sq(s)).collect(),
        dissipation,
    }
}

/// Integrates from `U0` and records diagnostics every `record_stride` steps
/// (and at the final time).
pub fn run(cfg: &SimConfig, u0: &SpectralField, system: System) -> Result<Trajectory> {
    let integrator = Integrator::new(cfg, u0.table().clone(), system)?;
    run_with(cfg, u0, &integrator, |_, _| {})
}

/// As [`run`] with a prebuilt integrator and a per-step observer receiving
/// `(t, u)` in the transformed variable.
pub fn run_with<F: FnMut(f64, &[CVec3])>(
    cfg: &SimConfig,
    u0: &SpectralField,
    integrator: &Integrator,
    mut observe: F,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !u0.table().same_truncation(integrator.plan.table()) {
        return Err(Error::TruncationMismatch);
    }
    u0.validate()?;
    let volume = u0.geometry().volume();
    let (steps, dt) = cfg.grid();
    let mut u = to_transformed(u0, cfg.omega, 0.0).coeffs().to_vec();
    let e0 = u0.hs_norm_sq(0.0);
    let mut traj = Trajectory { samples: Vec::new(), snapshots: Vec::new(), s_list: cfg.s_list.clone(), mu: cfg.mu };
    traj.samples.push(sample(u0, 0.0, &cfg.s_list, 0.0));
    if cfg.keep_snapshots {
        traj.snapshots.push(u0.clone());
    }
    observe(0.0, &u);
    let start = u.clone();
    let mut dissipation = 0.0;
    for i in 0..steps {
        let t = i as f64 * dt;
        let t_next = (i + 1) as f64 * dt;
        if integrator.nonlinear {
            let (next, d) = integrator.step_raw(&u, t, dt, volume);
            u = next;
            dissipation += d;
        } else {
            (u, dissipation) = integrator.linear_flow(&start, t_next, volume);
        }
        check_finite(&u, t_next)?;
        observe(t_next, &u);
        let l2: f64 = volume * u.iter().map(helical::norm_sq).sum::<f64>();
        if l2 > cfg.blowup_factor * e0.max(f64::MIN_POSITIVE) {
            return Err(Error::Numeric(format!("blow-up at t = {t_next}: ‖u‖² = {l2:.3e}")));
        }
        if (i + 1) % cfg.record_stride == 0 || i + 1 == steps {
            let uf = SpectralField::from_raw(u0.table().clone(), u.clone());
            let big = from_transformed(&uf, cfg.omega, t_next);
            traj.samples.push(sample(&big, t_next, &cfg.s_list, dissipation));
            if cfg.keep_snapshots {
                traj.snapshots.push(big);
            }
        }
    }
    Ok(traj)
}

/// Energy balance at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    /// `‖U(t)‖₀² + 2μ∫₀ᵗ‖∇U‖₀²` with the stage-accumulated integral.
    pub left: f64,
    /// `‖U₀‖₀²`.
    pub right: f64,
    pub residual: f64,
    /// Same residual with the integral replaced by the trapezoid rule on samples.
    pub residual_trapezoid: f64,
}

pub fn energy_report(traj: &Trajectory) -> Vec<EnergyRow> {
    let Some(first) = traj.samples.first() else {
        return Vec::new();
    };
    let right = first.l2_sq;
    let rel = |x: f64| if right == 0.0 { x.abs() } else { x.abs() / right };
    let mut trap = 0.0;
    let mut prev: Option<&Sample> = None;
    traj.samples
        .iter()
        .map(|s| {
            if let Some(p) = prev {
                trap += (s.t - p.t) * traj.mu * (s.grad_sq + p.grad_sq);
            }
            prev = Some(s);
            let left = s.l2_sq + s.dissipation;
            EnergyRow {
                t: s.t,
                left,
                right,
                residual: rel(left - right),
                residual_trapezoid: rel(s.l2_sq + trap - right),
            }
        })
        .collect()
}

/// `max_t ‖U(t)‖_s² / ‖U₀‖_s²` for each recorded exponent.
pub fn growth_factors(traj: &Trajectory) -> Vec<f64> {
    let Some(first) = traj.samples.first() else {
        return Vec::new();
    };
    (0..traj.s_list.len())
        .map(|j| {
            let max = traj.samples.iter().map(|s| s.hs_sq[j]).fold(0.0, f64::max);
            if first.hs_sq[j] == 0.0 {
                0.0
            } else {
                max / first.hs_sq[j]
            }
        })
        .collect()
}

/// One row of an `Ω` scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub omega: f64,
    pub dt: f64,
    /// `sup_t ‖U(t) − Ũ(t)‖_{s'}`, or `None` when the full run blew up.
    pub sup_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorScan {
    pub rows: Vec<ErrorRow>,
    /// Least-squares slope of `log(error)` against `log(Ω)` over rows with `Ω > 0`.
    pub slope: Option<f64>,
}

/// Options of [`error_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub s_prime: f64,
    /// Upper bound on `Ω·dt`; rows refine `dt` to honour it.
    pub max_phase_step: f64,
    /// Target `‖U₀‖₀²` for the normalised initial datum.
    pub energy: f64,
    /// Sobolev exponent of the random initial datum.
    pub data_s: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { s_prime: 0.0, max_phase_step: 0.05, energy: 1.0, data_s: 4.0 }
    }
}

/// Random initial datum with `‖U₀‖₀² = energy`.
pub fn normalized_initial(table: Arc<ModeTable>, s: f64, energy: f64, seed: u64) -> Result<SpectralField> {
    let raw = random_field_on(table, s, 1.0, seed)?;
    let e = raw.hs_norm_sq(0.0);
    if e == 0.0 {
        return Err(Error::invalid("initial datum vanished"));
    }
    Ok(raw.scaled((energy / e).sqrt()))
}

/// Runs the full and near-resonant systems from identical data for each
/// `Ω`, stepping both in lockstep, and records the sup-in-time distance.
pub fn error_scan(base: &SimConfig, omegas: &[f64], opts: &ScanOptions) -> Result<ErrorScan> {
    base.validate()?;
    let table = base.table()?;
    let u0 = normalized_initial(table.clone(), opts.data_s, opts.energy, base.seed)?;
    let volume = u0.geometry().volume();
    let weights: Vec<f64> = table
        .modes()
        .iter()
        .map(|w| if opts.s_prime == 0.0 { 1.0 } else { w.norm.powf(2.0 * opts.s_prime) })
        .collect();
    let distance = |a: &[CVec3], b: &[CVec3]| -> f64 {
        let d: f64 = a
            .iter()
            .zip(b)
            .zip(&weights)
            .map(|((x, y), w)| w * helical::norm_sq(&helical::sub(x, y)))
            .sum();
        (volume * d).sqrt()
    };
    let e0 = u0.hs_norm_sq(0.0);
    let mut rows = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let mut cfg = base.clone();
        cfg.omega = omega;
        if omega > 0.0 {
            cfg.dt = cfg.dt.min(opts.max_phase_step / omega);
        }
        let (steps, dt) = cfg.grid();
        let full = Integrator::new(&cfg, table.clone(), System::Full)?;
        let nr = Integrator::new(&cfg, table.clone(), System::NearResonant)?;
        let mut a = to_transformed(&u0, omega, 0.0).coeffs().to_vec();
        let mut b = a.clone();
        let mut worst = 0.0f64;
        let mut blew_up = false;
        for i in 0..steps {
            let t = i as f64 * dt;
            a = full.step_raw(&a, t, dt, volume).0;
            b = nr.step_raw(&b, t, dt, volume).0;
            check_finite(&b, t + dt)?;
            let l2: f64 = volume * a.iter().map(helical::norm_sq).sum::<f64>();
            if !l2.is_finite() || l2 > cfg.blowup_factor * e0 {
                blew_up = true;
                break;
            }
            worst = worst.max(distance(&a, &b));
        }
        let sup_error = if blew_up { None } else { Some(worst) };
        rows.push(ErrorRow { omega, dt, sup_error });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| match r.sup_error {
            Some(e) if r.omega > 0.0 && e > 0.0 => Some((r.omega.ln(), e.ln())),
            _ => None,
        })
        .collect();
    Ok(ErrorScan { rows, slope: fit_slope(&pts) })
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rounds_to_whole_steps() {
        let cfg = SimConfig::new(4.0, 0.0, 0.1, BandwidthSpec::theorem(1.0), 1.0, 0.3);
        let (n, dt) = cfg.grid();
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
        let cfg = SimConfig::new(4.0, 0.0, 0.1, BandwidthSpec::theorem(1.0), 1.0, 1e-3);
        assert_eq!(cfg.grid().0, 1000);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SimConfig::new(4.0, 0.0, 0.1, BandwidthSpec::theorem(1.0), 1.0, 0.0);
        assert!(cfg.validate().is_err());
        cfg.dt = 0.1;
        cfg.radius = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn slope_of_a_line() {
        let pts = [(0.0, 1.0), (1.0, -1.0), (2.0, -3.0)];
        assert!((fit_slope(&pts).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(fit_slope(&pts[..1]), None);
    }
}
