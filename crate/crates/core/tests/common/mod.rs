//! Shared test support: spec generators and oracles written independently of
//! the library's own arithmetic.
#![allow(dead_code)]

use group_contest::model::ContestSpec;
use group_contest::{thresholds, StrategyProfile};
use rand::Rng;

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Valuations for one group: sizes 2..=5, magnitudes log-uniform in
/// [1e-2, 1e2], at least one of each sign, sorted descending. Top and bottom
/// pairs are strictly ordered as validation demands.
pub fn random_group(rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let n = rng.random_range(2..=5usize);
        let positives = rng.random_range(1..n);
        let mut v: Vec<f64> = (0..n)
            .map(|k| {
                let m = log_uniform(rng, 1e-2, 1e2);
                if k < positives { m } else { -m }
            })
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v[0] > v[1] && v[n - 2] > v[n - 1] {
            return v;
        }
    }
}

pub fn random_valuations(rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    (random_group(rng), random_group(rng))
}

/// Thresholds recomputed from the raw valuation lists.
pub fn oracle_thresholds(g1: &[f64], g2: &[f64]) -> (f64, f64) {
    let (a1, a2) = (g1[0], g2[0]);
    let (b1, b2) = (-g1[g1.len() - 1], -g2[g2.len() - 1]);
    let low = (a1 * a2 / (a1 + a2)) / b1.max(b2);
    let high = a1.max(a2) * (b1 + b2) / (b1 * b2);
    (low, high)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    NoSabotage,
    Sabotage,
    Gap,
}

/// A random spec whose theta lands in the requested regime. About one draw
/// in ten sits exactly on the library's threshold for the existence regimes.
pub fn random_spec_in(rng: &mut impl Rng, want: Want) -> ContestSpec {
    let (g1, g2) = random_valuations(rng);
    let probe = ContestSpec::new(1.0, &g1, &g2).expect("generator emits valid groups");
    let t = thresholds(&probe);
    let on_boundary = rng.random_bool(0.1);
    let theta = match want {
        Want::NoSabotage if on_boundary => t.theta_no_sabotage,
        Want::NoSabotage => t.theta_no_sabotage * log_uniform(rng, 1e-2, 1.0),
        Want::Sabotage if on_boundary => t.theta_sabotage,
        Want::Sabotage => t.theta_sabotage * log_uniform(rng, 1.0, 1e2),
        Want::Gap => {
            let f: f64 = rng.random_range(0.05..0.95);
            (t.theta_no_sabotage.ln() * (1.0 - f) + t.theta_sabotage.ln() * f).exp()
        }
    };
    ContestSpec::new(theta, &g1, &g2).expect("positive theta")
}

pub fn random_spec(rng: &mut impl Rng) -> ContestSpec {
    let (g1, g2) = random_valuations(rng);
    ContestSpec::new(log_uniform(rng, 1e-2, 1e2), &g1, &g2).unwrap()
}

/// Group 1's winning probability, case by case on the sign pattern.
pub fn oracle_p1(z1: f64, z2: f64) -> f64 {
    match (z1 >= 0.0, z2 >= 0.0) {
        (true, true) if z1 == 0.0 && z2 == 0.0 => 0.5,
        (true, true) => z1 / (z1 + z2),
        (true, false) => 1.0,
        (false, true) => 0.0,
        (false, false) => 1.0 - z1 / (z1 + z2),
    }
}

pub fn oracle_own_p(group: usize, z_own: f64, z_rival: f64) -> f64 {
    if group == 1 {
        oracle_p1(z_own, z_rival)
    } else {
        1.0 - oracle_p1(z_rival, z_own)
    }
}

/// Payoff from raw sums over the profile.
pub fn oracle_payoff(spec: &ContestSpec, profile: &StrategyProfile, group: usize, index: usize) -> f64 {
    let theta = spec.theta();
    let z = |g: usize| -> f64 {
        let efforts = profile.group(g);
        let x: f64 = efforts.iter().map(|e| e.x).sum();
        let y: f64 = efforts.iter().map(|e| e.y).sum();
        x - theta * y
    };
    let p = oracle_own_p(group, z(group), z(3 - group));
    let e = profile.group(group)[index - 1];
    spec.group(group).value(index) * p - e.x - e.y
}

/// Maximizer of `f` on `[0, range]`: a step-1e-4 scan, then two rounds of
/// refinement around the winner so kinked optima are located to ~1e-10.
pub fn grid_argmax(f: impl Fn(f64) -> f64, range: f64) -> (f64, f64) {
    let step = 1e-4;
    let n = (range / step).ceil() as usize;
    let mut best = (0.0, f(0.0));
    for k in 1..=n {
        let e = (k as f64 * step).min(range);
        let v = f(e);
        if v > best.1 {
            best = (e, v);
        }
    }
    for fine in [1e-7, 1e-10] {
        let centre = best.0;
        let half = 1000;
        for k in -half..=half {
            let e = centre + k as f64 * fine;
            if !(0.0..=range).contains(&e) {
                continue;
            }
            let v = f(e);
            if v > best.1 {
                best = (e, v);
            }
        }
    }
    best
}

/// Single-axis payoff: own group starts at `z_minus`, moves by `shift(e)`.
pub fn axis_payoff(v: f64, z_minus: f64, z_other: f64, shift: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    move |e| v * oracle_own_p(1, z_minus + shift(e), z_other) - e
}

/// A coordinate for CSF grids: exact zeros (both signs), and positive or
/// negative magnitudes log-uniform over [1e-3, 1e3].
pub fn csf_coordinate(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => -0.0,
        k => {
            let m = log_uniform(rng, 1e-3, 1e3);
            if k % 2 == 0 { m } else { -m }
        }
    }
}

/// Normalization, branch agreement (against the compact form and the test
/// oracle), symmetry and scale invariance at one point.
pub fn check_csf_point(z1: f64, z2: f64, lambda: f64) -> Result<(), String> {
    use group_contest::csf::{win_probability, win_probability_compact};
    let p = win_probability(z1, z2).map_err(|e| e.to_string())?;
    if !((0.0..=1.0).contains(&p.p1) && (0.0..=1.0).contains(&p.p2)) {
        return Err(format!("({z1},{z2}): probabilities out of range {p:?}"));
    }
    if (p.p1 + p.p2 - 1.0).abs() > f64::EPSILON {
        return Err(format!("({z1},{z2}): p1 + p2 = {}", p.p1 + p.p2));
    }
    let compact = win_probability_compact(z1, z2).map_err(|e| e.to_string())?;
    if compact.p1 != p.p1 {
        return Err(format!("({z1},{z2}): branches {} vs compact {}", p.p1, compact.p1));
    }
    if (oracle_p1(z1, z2) - p.p1).abs() > 1e-15 {
        return Err(format!("({z1},{z2}): oracle {} vs {}", oracle_p1(z1, z2), p.p1));
    }
    let diag = win_probability(z1, z1).map_err(|e| e.to_string())?;
    if diag.p1 != 0.5 || diag.p2 != 0.5 {
        return Err(format!("({z1},{z1}): symmetric pair gives {diag:?}"));
    }
    let scaled = win_probability(lambda * z1, lambda * z2).map_err(|e| e.to_string())?;
    if (scaled.p1 - p.p1).abs() > 1e-14 {
        return Err(format!("({z1},{z2}) scaled by {lambda}: {} vs {}", scaled.p1, p.p1));
    }
    let k = lambda.log2().round().clamp(-60.0, 60.0);
    let pow2 = k.exp2();
    if win_probability(pow2 * z1, pow2 * z2).unwrap().p1 != p.p1 {
        return Err(format!("({z1},{z2}) scaled by 2^{k}: not exact"));
    }
    Ok(())
}

/// Relative tolerance for finite differences against analytic derivatives.
pub const FD_RELATIVE_TOL: f64 = 1e-4;

/// Finite-difference step `1e-5 * max(1, |z1| + |z2|)`.
pub fn fd_step(z1: f64, z2: f64) -> f64 {
    1e-5 * (z1.abs() + z2.abs()).max(1.0)
}

/// Central first and second differences of `p1` in `z1` against the analytic
/// derivatives, and their signs, at a point with `z1, z2` of equal sign.
pub fn check_csf_derivatives(z1: f64, z2: f64) -> Result<(), String> {
    use group_contest::csf::win_probability;
    assert!(z1 * z2 > 0.0, "derivative checks need a same-sign interior point");
    let p = |z: f64| win_probability(z, z2).unwrap().p1;
    let h = fd_step(z1, z2);
    let s = z1 + z2;
    // p1 = z1 / s when both are positive and z2 / s when both are negative
    let (d1, d2) = if z1 > 0.0 {
        (z2 / (s * s), -2.0 * z2 / (s * s * s))
    } else {
        (-z2 / (s * s), 2.0 * z2 / (s * s * s))
    };
    let fd1 = (p(z1 + h) - p(z1 - h)) / (2.0 * h);
    let fd2 = (p(z1 + h) - 2.0 * p(z1) + p(z1 - h)) / (h * h);
    if !(fd1 > 0.0 && d1 > 0.0) {
        return Err(format!("({z1},{z2}): first difference {fd1} not positive"));
    }
    let second_sign_ok = if z1 > 0.0 { fd2 < 0.0 && d2 < 0.0 } else { fd2 > 0.0 && d2 > 0.0 };
    if !second_sign_ok {
        return Err(format!("({z1},{z2}): second difference {fd2} has the wrong sign"));
    }
    if (fd1 - d1).abs() > FD_RELATIVE_TOL * d1.abs() {
        return Err(format!("({z1},{z2}): first difference {fd1} vs analytic {d1}"));
    }
    if (fd2 - d2).abs() > FD_RELATIVE_TOL * d2.abs() {
        return Err(format!("({z1},{z2}): second difference {fd2} vs analytic {d2}"));
    }
    Ok(())
}

/// Same-sign interior point for the derivative checks: total magnitude
/// log-uniform in [0.1, 1e3] and the rival's share in [0.05, 0.95].
pub fn csf_interior_point(rng: &mut impl Rng) -> (f64, f64) {
    let total = log_uniform(rng, 0.1, 1e3);
    let share = rng.random_range(0.05..=0.95);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    (sign * total * (1.0 - share), sign * total * share)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrOp {
    PositiveX,
    PositiveY,
    NegativeY,
    NegativeX,
    GroupBest,
}

impl BrOp {
    pub const ALL: [BrOp; 5] = [BrOp::PositiveX, BrOp::PositiveY, BrOp::NegativeY, BrOp::NegativeX, BrOp::GroupBest];
}

#[derive(Debug, Clone, Copy)]
pub struct BrCase {
    pub op: BrOp,
    pub theta: f64,
    pub v: f64,
    pub z_minus: f64,
    pub z_other: f64,
}

fn magnitude(rng: &mut impl Rng) -> f64 {
    log_uniform(rng, 0.1, 3.0)
}

fn any_sign(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        k if k % 2 == 0 => magnitude(rng),
        _ => -magnitude(rng),
    }
}

/// Random arguments satisfying the operation's sign preconditions.
pub fn draw_br_case(op: BrOp, rng: &mut impl Rng) -> BrCase {
    let theta = log_uniform(rng, 0.2, 3.0);
    let (v, z_minus, z_other) = match op {
        BrOp::PositiveX => (magnitude(rng), any_sign(rng), magnitude(rng)),
        BrOp::PositiveY => (-magnitude(rng), magnitude(rng), magnitude(rng)),
        BrOp::NegativeY => (-magnitude(rng), any_sign(rng), -magnitude(rng)),
        BrOp::NegativeX => (magnitude(rng), -magnitude(rng), -magnitude(rng)),
        BrOp::GroupBest => (magnitude(rng), 0.0, magnitude(rng)),
    };
    BrCase { op, theta, v, z_minus, z_other }
}

impl BrCase {
    /// Closed-form effort and tie flag from the library.
    pub fn closed_form(&self) -> (f64, bool) {
        use group_contest::best_response::*;
        let BrCase { theta, v, z_minus, z_other, .. } = *self;
        let br = match self.op {
            BrOp::PositiveX => br_positive_x(v, z_minus, z_other),
            BrOp::PositiveY => br_positive_y(theta, v, z_minus, z_other),
            BrOp::NegativeY => br_negative_y(theta, v, z_minus, z_other),
            BrOp::NegativeX => br_negative_x(v, z_minus, z_other),
            BrOp::GroupBest => {
                return (group_best_effective_effort(v, z_other).unwrap(), false);
            }
        }
        .unwrap();
        (br.effort, br.tie)
    }

    /// The objective the operation maximizes, from the test-side success function.
    pub fn objective(&self) -> Box<dyn Fn(f64) -> f64> {
        let BrCase { theta, v, z_minus, z_other, .. } = *self;
        match self.op {
            BrOp::PositiveX | BrOp::NegativeX => Box::new(axis_payoff(v, z_minus, z_other, |e| e)),
            BrOp::PositiveY | BrOp::NegativeY => Box::new(axis_payoff(v, z_minus, z_other, move |e| -theta * e)),
            BrOp::GroupBest => Box::new(move |z| v * z / (z + z_other) - z),
        }
    }

    pub fn range(&self) -> f64 {
        4.0 * (self.v.abs() + self.z_other.abs() + self.z_minus.abs())
    }
}

pub const BR_EFFORT_TOL: f64 = 1e-3;
pub const BR_PAYOFF_TOL: f64 = 1e-6;

/// Closed form against the grid oracle: effort within 1e-3, payoff within 1e-6.
pub fn check_br_case(case: &BrCase) -> Result<(), String> {
    let (effort, _) = case.closed_form();
    if !(effort >= 0.0 && effort.is_finite()) {
        return Err(format!("{case:?}: effort {effort}"));
    }
    let f = case.objective();
    let (arg, best) = grid_argmax(&f, case.range());
    let achieved = f(effort);
    if (effort - arg).abs() > BR_EFFORT_TOL {
        return Err(format!("{case:?}: closed form {effort} vs grid {arg}"));
    }
    if (achieved - best).abs() > BR_PAYOFF_TOL {
        return Err(format!("{case:?}: payoff {achieved} vs grid {best}"));
    }
    Ok(())
}
