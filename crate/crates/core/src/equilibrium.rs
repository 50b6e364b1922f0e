//! Existence thresholds, regime classification and the closed-form
//! pure-strategy equilibria.
//!
//! For fixed valuations two thresholds on `theta` split the half-line into
//! three regimes: low effectiveness (the top player of each group competes to
//! win, nobody sabotages), high effectiveness (the bottom player of each
//! group sabotages, nobody helps), and the open interval between them where
//! no pure profile is an equilibrium.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{effective_efforts, ContestSpec, EffectiveEffort, Effort, PlayerId, StrategyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Largest `theta` with an equilibrium free of sabotage.
    pub theta_no_sabotage: f64,
    /// Smallest `theta` with a sabotage equilibrium.
    pub theta_sabotage: f64,
}

pub fn thresholds(spec: &ContestSpec) -> Thresholds {
    let (top1, top2) = (spec.group(1).top(), spec.group(2).top());
    let (bottom1, bottom2) = (spec.group(1).bottom(), spec.group(2).bottom());
    let max_bottom = bottom1.abs().max(bottom2.abs());
    let theta_no_sabotage = top1 * top2 / ((top1 + top2) * max_bottom);
    // both bottoms are negative, so their product is positive
    let theta_sabotage = (bottom1 + bottom2).abs() * top1.max(top2) / (bottom1 * bottom2);
    Thresholds { theta_no_sabotage, theta_sabotage }
}

/// `w = theta * max(|v_{1n_1}|, |v_{2n_2}|)`, the strongest adjusted sabotage valuation.
pub fn adjusted_sabotage_valuation(spec: &ContestSpec) -> f64 {
    spec.theta() * spec.group(1).bottom().abs().max(spec.group(2).bottom().abs())
}

/// `t = max(v_11, v_21)`, the strongest constructive valuation.
pub fn top_valuation(spec: &ContestSpec) -> f64 {
    spec.group(1).top().max(spec.group(2).top())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    NoSabotageEquilibrium,
    SabotageEquilibrium,
    NoPureEquilibrium,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Regime::NoSabotageEquilibrium => "NoSabotageEquilibrium",
            Regime::SabotageEquilibrium => "SabotageEquilibrium",
            Regime::NoPureEquilibrium => "NoPureEquilibrium",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub regime: Regime,
    /// `theta` sits exactly on the binding threshold.
    pub boundary: bool,
    pub thresholds: Thresholds,
}

impl Classification {
    /// `|theta - threshold|` for each threshold, for spotting classifications
    /// that hinge on the last few bits of a double.
    pub fn slack(&self, theta: f64) -> (f64, f64) {
        (
            (theta - self.thresholds.theta_no_sabotage).abs(),
            (theta - self.thresholds.theta_sabotage).abs(),
        )
    }
}

pub fn classify(spec: &ContestSpec) -> Classification {
    let thresholds = thresholds(spec);
    let theta = spec.theta();
    let (regime, boundary) = if theta <= thresholds.theta_no_sabotage {
        (Regime::NoSabotageEquilibrium, theta == thresholds.theta_no_sabotage)
    } else if theta >= thresholds.theta_sabotage {
        (Regime::SabotageEquilibrium, theta == thresholds.theta_sabotage)
    } else {
        (Regime::NoPureEquilibrium, false)
    };
    Classification { regime, boundary, thresholds }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub regime: Regime,
    pub boundary: bool,
    pub thresholds: Thresholds,
    pub profile: Option<StrategyProfile>,
    pub effective: Option<EffectiveEffort>,
}

/// Efforts of the two active players: `(a^2 b, a b^2) / (a + b)^2`.
fn active_pair(a: f64, b: f64) -> (f64, f64) {
    let denom = (a + b) * (a + b);
    (a * a * b / denom, a * b * b / denom)
}

pub fn solve(spec: &ContestSpec) -> EquilibriumResult {
    let Classification { regime, boundary, thresholds } = classify(spec);
    let profile = match regime {
        Regime::NoSabotageEquilibrium => {
            let (x1, x2) = active_pair(spec.group(1).top(), spec.group(2).top());
            Some(single_active(spec, [(PlayerId::new(1, 1), Effort { x: x1, y: 0.0 }),
                (PlayerId::new(2, 1), Effort { x: x2, y: 0.0 })]))
        }
        Regime::SabotageEquilibrium => {
            let (b1, b2) = (spec.group(1).bottom(), spec.group(2).bottom());
            // -(b1^2 b2, b1 b2^2) / (b1 + b2)^2, positive since b1, b2 < 0
            let (y1, y2) = active_pair(b1, b2);
            let [n1, n2] = spec.sizes();
            Some(single_active(spec, [(PlayerId::new(1, n1), Effort { x: 0.0, y: -y1 }),
                (PlayerId::new(2, n2), Effort { x: 0.0, y: -y2 })]))
        }
        Regime::NoPureEquilibrium => None,
    };
    let effective = profile
        .as_ref()
        .map(|p| effective_efforts(spec, p).expect("profile built from the spec's shape"));
    EquilibriumResult { regime, boundary, thresholds, profile, effective }
}

fn single_active(spec: &ContestSpec, active: [(PlayerId, Effort); 2]) -> StrategyProfile {
    let mut profile = StrategyProfile::zeros(spec);
    for (player, effort) in active {
        profile.set(player, effort).expect("closed-form efforts are finite and nonnegative");
    }
    profile
}

/// Which parameter-region chart to sample, with its fixed quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionFigure {
    /// Axes `(v_11, v_21)`; inside when `v_11 v_21 / (v_11 + v_21) >= w`.
    NoSabotage { w: f64 },
    /// Axes `(|v_1n_1|, |v_2n_2|)`; inside when `theta m_1 m_2 / (m_1 + m_2) >= t`.
    Sabotage { t: f64, theta: f64 },
}

impl RegionFigure {
    pub fn margin(&self, axis1: f64, axis2: f64) -> f64 {
        let harmonic = axis1 * axis2 / (axis1 + axis2);
        match *self {
            RegionFigure::NoSabotage { w } => harmonic - w,
            RegionFigure::Sabotage { t, theta } => theta * harmonic - t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSample {
    pub axis1: f64,
    pub axis2: f64,
    pub margin: f64,
    pub in_region: bool,
}

/// Evaluates the region condition on the product grid, axis1-major.
pub fn region_sample(figure: RegionFigure, axis1_grid: &[f64], axis2_grid: &[f64]) -> Result<Vec<RegionSample>> {
    if axis1_grid.is_empty() || axis2_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&bad) = axis1_grid.iter().chain(axis2_grid).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveGridPoint(bad));
    }
    Ok(axis1_grid
        .par_iter()
        .flat_map_iter(|&a1| {
            axis2_grid.iter().map(move |&a2| {
                let margin = figure.margin(a1, a2);
                RegionSample { axis1: a1, axis2: a2, margin, in_region: margin >= 0.0 }
            })
        })
        .collect())
}

/// `steps` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let span = max - min;
            let last = (steps - 1) as f64;
            (0..steps).map(|k| min + span * (k as f64) / last).collect()
        }
    }
}
