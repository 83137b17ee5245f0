use std::f64::consts::PI;

use nearres::counting::{
    fit_planar_constant, jordan_count_check, lower_bound_fast_fast, lower_bound_slow_fast, planar_bound_holds,
    planar_slice_check, random_family,
};
use nearres::resonance::count_report;
use nearres::solver::{energy_report, error_scan, normalized_initial, run, ScanOptions, SimConfig, System};
use nearres::sublevel::{
    correspondence_check, elliptic_substitution_check, lambda_roots, q_quartic, theorem_volume_bound, volume_mc,
    AngleTriple, SublevelProblem,
};
use nearres::{Result, Sign, TorusGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::output::{format_float, Cell, Table};

fn sign_label(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

pub fn triads(a: &TriadsArgs, g: &TorusGeometry) -> Result<Table> {
    let ns: Vec<[i64; 3]> = a.n.iter().map(|t| t.0).collect();
    let rows = count_report(&ns, g, &a.bandwidth.spec(), a.c_bound)?;
    let mut t = Table::new(&["n1", "n2", "n3", "norm", "count", "bound", "ratio"]);
    for r in rows {
        t.push(vec![
            r.n[0].into(),
            r.n[1].into(),
            r.n[2].into(),
            r.norm.into(),
            r.count.into(),
            r.bound.into(),
            r.ratio.into(),
        ]);
    }
    Ok(t)
}

pub fn count_lower(a: &CountLowerArgs) -> Result<Table> {
    let (lo, f): (i64, fn(i64, f64) -> Result<_>) = match a.variant {
        Variant::SlowFast => (4, lower_bound_slow_fast),
        Variant::FastFast => (8, lower_bound_fast_fast),
    };
    let mut t = Table::new(&["n", "delta", "exact_count", "formula_count", "scaling", "violations", "max_abs_triplet"]);
    for n in a.n_min.unwrap_or(lo)..=a.n_max {
        let r = f(n, a.delta)?;
        t.push(vec![
            n.into(),
            a.delta.into(),
            r.exact_count.into(),
            r.formula_count.into(),
            r.scaling.into(),
            r.violations.into(),
            r.max_abs_triplet.into(),
        ]);
    }
    Ok(t)
}

pub fn volume(a: &VolumeArgs, g: &TorusGeometry) -> Result<Table> {
    let mut t = Table::new(&[
        "n1", "n2", "n3", "sigma1", "sigma2", "delta", "samples", "hits", "estimate", "std_error", "bound", "ratio",
    ]);
    for s1 in a.sigma1.signs() {
        for s2 in a.sigma2.signs() {
            let p = SublevelProblem::new(a.n.0, s1, s2, a.delta, *g)?;
            let v = volume_mc(&p, a.samples, a.seed)?;
            let b = theorem_volume_bound(&p)?;
            t.push(vec![
                a.n.0[0].into(),
                a.n.0[1].into(),
                a.n.0[2].into(),
                sign_label(s1).into(),
                sign_label(s2).into(),
                a.delta.into(),
                v.samples.into(),
                v.hits.into(),
                v.estimate.into(),
                v.std_error.into(),
                b.into(),
                (v.estimate / b).into(),
            ]);
        }
    }
    Ok(t)
}

fn random_angles(rng: &mut ChaCha8Rng) -> (AngleTriple, [f64; 4]) {
    loop {
        let th: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..PI));
        if let Ok(a) = AngleTriple::new(th[0], th[1], th[2]) {
            if let Ok(roots) = lambda_roots(&a) {
                return (a, roots);
            }
        }
    }
}

fn random_quintuple(rng: &mut ChaCha8Rng) -> [f64; 5] {
    loop {
        let mut v: [f64; 5] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        v.sort_by(|x, y| y.total_cmp(x));
        if v.windows(2).all(|w| w[0] - w[1] >= 1e-3) {
            return v;
        }
    }
}

pub fn elliptic_check(a: &EllipticArgs) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut t = Table::new(&[
        "trial",
        "theta_n",
        "theta_k",
        "theta_m",
        "correspondence_first",
        "correspondence_second",
        "same_coset",
        "root_residual",
        "substitution_residual",
    ]);
    for trial in 0..a.trials {
        let (angles, roots) = random_angles(&mut rng);
        let c = correspondence_check(&angles);
        let [_, _, cm] = angles.cosines();
        let root_res = roots
            .iter()
            .filter(|l| l.is_finite())
            .map(|&l| q_quartic(l, angles.theta_k, cm, angles.theta_n).abs() / (1.0 + l.abs()).powi(4))
            .fold(0.0, f64::max);
        let v = random_quintuple(&mut rng);
        let (lhs, rhs) = elliptic_substitution_check(v[0], v[1], v[2], v[3], v[4])?;
        t.push(vec![
            trial.into(),
            angles.theta_n.into(),
            angles.theta_k.into(),
            angles.theta_m.into(),
            c.first.into(),
            c.second.into(),
            c.same_coset.into(),
            root_res.into(),
            ((lhs - rhs).abs() / rhs.abs().max(1.0)).into(),
        ]);
    }
    Ok(t)
}

pub fn jordan_check(a: &JordanArgs) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let first_adversarial = a.trials.saturating_sub(a.adversarial);
    let mut t = Table::new(&["trial", "adversarial", "curves", "lattice_count", "area", "length", "exceptional", "holds"]);
    for trial in 0..a.trials {
        let adversarial = trial >= first_adversarial;
        let fam = random_family(&mut rng, adversarial);
        let r = jordan_count_check(&fam);
        t.push(vec![
            trial.into(),
            adversarial.into(),
            (fam.curves().len() as u64).into(),
            r.lattice_count.into(),
            r.area.into(),
            r.length.into(),
            r.exceptional.into(),
            r.holds.into(),
        ]);
    }
    Ok(t)
}

/// Runs a simulation; also returns the final field as text.
pub fn simulate(a: &SimulateArgs, g: &TorusGeometry) -> Result<(Table, String)> {
    let mut cfg = SimConfig::new(a.radius, a.omega, a.mu, a.bandwidth.spec(), a.t_end, a.dt);
    cfg.geom = *g;
    cfg.seed = a.seed;
    cfg.record_stride = a.stride as usize;
    cfg.s_list = a.hs.clone();
    cfg.nonlinear = !a.linear;
    let u0 = normalized_initial(cfg.table()?, a.data_s, a.energy, a.seed)?;
    let system = match a.system {
        SystemArg::Nr => System::NearResonant,
        SystemArg::Full => System::Full,
    };
    cfg.keep_snapshots = a.snapshot.is_some();
    let traj = run(&cfg, &u0, system)?;
    let mut header = vec!["t".to_string(), "l2_sq".into(), "grad_sq".into()];
    header.extend(a.hs.iter().map(|s| format!("hs_sq[{}]", format_float(*s))));
    header.push("energy_residual".into());
    let mut t = Table::new(&header);
    for (s, e) in traj.samples.iter().zip(energy_report(&traj)) {
        let mut row: Vec<Cell> = vec![s.t.into(), s.l2_sq.into(), s.grad_sq.into()];
        row.extend(s.hs_sq.iter().map(|&x| x.into()));
        row.push(e.residual.into());
        t.push(row);
    }
    let last = traj.snapshots.last().map_or_else(String::new, |f| f.to_text());
    Ok((t, last))
}

pub fn error_scan_cmd(a: &ErrorScanArgs, g: &TorusGeometry) -> Result<Table> {
    let mut base = SimConfig::new(a.radius, 0.0, a.mu, a.bandwidth.spec(), a.t_end, a.dt);
    base.geom = *g;
    base.seed = a.seed;
    let opts = ScanOptions { s_prime: a.s_prime, max_phase_step: a.max_phase_step, energy: a.energy, data_s: a.data_s };
    let scan = error_scan(&base, &a.omegas, &opts)?;
    let mut t = Table::new(&["omega", "dt", "sup_error", "slope"]);
    for r in &scan.rows {
        t.push(vec![r.omega.into(), r.dt.into(), r.sup_error.into(), scan.slope.into()]);
    }
    Ok(t)
}

pub fn planar_check(a: &PlanarArgs, g: &TorusGeometry) -> Result<Table> {
    let mut slices = Vec::new();
    for s1 in a.sigma1.signs() {
        for s2 in a.sigma2.signs() {
            let p = SublevelProblem::new(a.n.0, s1, s2, a.delta, *g)?;
            for (i, &k3) in a.k3.iter().enumerate() {
                let s = planar_slice_check(&p, k3, a.samples, a.seed.wrapping_add(i as u64))?;
                slices.push((s1, s2, s));
            }
        }
    }
    let fitted: Vec<_> = slices.iter().map(|x| x.2).collect();
    let c = a.c.unwrap_or_else(|| fit_planar_constant(&fitted));
    let mut t = Table::new(&[
        "sigma1",
        "sigma2",
        "k3",
        "count_strict",
        "count_relaxed",
        "area",
        "area_std_error",
        "r_out",
        "boundary_scale",
        "c",
        "holds",
    ]);
    for (s1, s2, s) in slices {
        t.push(vec![
            sign_label(s1).into(),
            sign_label(s2).into(),
            s.k3.into(),
            s.count.strict.into(),
            s.count.relaxed.into(),
            s.area.into(),
            s.area_std_error.into(),
            s.r_out.into(),
            s.boundary_scale.into(),
            c.into(),
            planar_bound_holds(&s, c).into(),
        ]);
    }
    Ok(t)
}
