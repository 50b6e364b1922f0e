//! Sabotage-aware contest success function and player payoffs.
//!
//! A group with negative effective effort is trying to lose; the function
//! uses `|Z_i|` in that case, and a group with nonnegative effort always beats
//! a group with negative effort.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{effective_efforts, ContestSpec, PlayerId, StrategyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WinProbabilities {
    pub p1: f64,
    pub p2: f64,
}

impl WinProbabilities {
    /// Winning probability of the 1-based group.
    pub fn of(&self, group: usize) -> f64 {
        if group == 1 { self.p1 } else { self.p2 }
    }
}

/// Group 1's winning probability, selected branch by branch with exact
/// comparisons against zero.
fn p1_branches(z1: f64, z2: f64) -> f64 {
    if z1 == 0.0 && z2 == 0.0 {
        0.5
    } else if z1 > 0.0 && z2 >= 0.0 {
        z1 / (z1 + z2)
    } else if z1 >= 0.0 && z2 < 0.0 {
        1.0
    } else if z1 <= 0.0 && z2 > 0.0 {
        0.0
    } else {
        // z1 < 0 and z2 <= 0
        z2.abs() / (z1.abs() + z2.abs())
    }
}

pub fn win_probability(z1: f64, z2: f64) -> Result<WinProbabilities> {
    if !(z1.is_finite() && z2.is_finite()) {
        return Err(Error::NonFiniteInput { z1, z2 });
    }
    let p1 = p1_branches(z1, z2);
    Ok(WinProbabilities { p1, p2: 1.0 - p1 })
}

/// The single-expression form `(max(Z1,0) - min(0,Z2)) / (|Z1| + |Z2|)`,
/// with 1/2 when both effective efforts vanish.
pub fn win_probability_compact(z1: f64, z2: f64) -> Result<WinProbabilities> {
    if !(z1.is_finite() && z2.is_finite()) {
        return Err(Error::NonFiniteInput { z1, z2 });
    }
    let total = z1.abs() + z2.abs();
    let p1 = if total > 0.0 { (z1.max(0.0) - z2.min(0.0)) / total } else { 0.5 };
    Ok(WinProbabilities { p1, p2: 1.0 - p1 })
}

/// Probability that `group` wins given its own and the rival's effective effort.
pub fn own_win_probability(group: usize, z_own: f64, z_rival: f64) -> Result<f64> {
    let probs = if group == 1 {
        win_probability(z_own, z_rival)?
    } else {
        win_probability(z_rival, z_own)?
    };
    Ok(probs.of(group))
}

/// Expected payoff `v_ik * p_i - x_ik - y_ik`.
pub fn payoff(spec: &ContestSpec, profile: &StrategyProfile, player: PlayerId) -> Result<f64> {
    spec.check_player(player)?;
    let eff = effective_efforts(spec, profile)?;
    let probs = win_probability(eff.z1, eff.z2)?;
    let v = spec.valuation(player)?;
    let e = profile.effort(player);
    Ok(v * probs.of(player.group) - e.x - e.y)
}
