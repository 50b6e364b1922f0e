//! Closed-form single-axis best responses.
//!
//! Each function takes the player's valuation, the residual effective effort
//! of the player's own group (`z_minus`, everyone else in the group) and the
//! rival group's effective effort (`z_other`). Only the axis named by the
//! function moves; the other effort type is held at zero.
//!
//! When the own group and the rival share a sign the payoff along the moving
//! axis is concave and the first-order condition gives the answer. When own
//! effort has to push the group across zero the payoff is convex up to the
//! crossing, so the answer is one of the two endpoints.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisBestResponse {
    pub effort: f64,
    /// Set when a second, distinct effort attains the same payoff.
    pub tie: bool,
}

impl AxisBestResponse {
    fn unique(effort: f64) -> Self {
        Self { effort, tie: false }
    }
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

fn finite(values: &[f64]) -> Result<()> {
    require(values.iter().all(|v| v.is_finite()), "arguments must be finite")
}

/// Picks between an interior optimum and zero effort when reaching the
/// interior requires first covering a residual of `gap`; `surplus` is the
/// interior optimum's payoff advantage before that gap is paid.
fn interior_or_zero(interior: f64, surplus: f64, gap: f64) -> AxisBestResponse {
    if surplus > gap {
        AxisBestResponse::unique(interior)
    } else {
        AxisBestResponse { effort: 0.0, tie: surplus == gap }
    }
}

/// Constructive effort of a positive-valuation player facing a rival with
/// positive effective effort.
///
/// Solves `v * z_other / (Z_i + z_other)^2 = 1`; the own group ends at
/// `Z_i = sqrt(v * z_other) - z_other`. A negative residual has to be covered
/// at a loss before the group can win at all, so in that case the interior
/// point is compared against staying out.
pub fn br_positive_x(v: f64, z_minus: f64, z_other: f64) -> Result<AxisBestResponse> {
    finite(&[v, z_minus, z_other])?;
    require(v > 0.0, "br_positive_x needs a positive valuation")?;
    require(z_other > 0.0, "br_positive_x needs a positive rival effective effort")?;
    let target = (v * z_other).sqrt() - z_other;
    if target <= 0.0 {
        return Ok(AxisBestResponse::unique(0.0));
    }
    let interior = (target - z_minus).max(0.0);
    if z_minus >= 0.0 {
        return Ok(AxisBestResponse::unique(interior));
    }
    let surplus = (v.sqrt() - z_other.sqrt()).powi(2);
    Ok(interior_or_zero(interior, surplus, -z_minus))
}

/// Sabotage effort of a negative-valuation player whose group and rival both
/// have positive effective effort without her.
///
/// The only candidates are no sabotage and exactly neutralising the group,
/// `z_minus / theta`. Zero wins (with a tie flag) when
/// `theta * |v| <= z_minus + z_other`.
pub fn br_positive_y(theta: f64, v: f64, z_minus: f64, z_other: f64) -> Result<AxisBestResponse> {
    finite(&[theta, v, z_minus, z_other])?;
    require(theta > 0.0, "theta must be positive")?;
    require(v < 0.0, "br_positive_y needs a negative valuation")?;
    require(z_minus > 0.0, "br_positive_y needs a positive own-group residual")?;
    require(z_other > 0.0, "br_positive_y needs a positive rival effective effort")?;
    let adjusted = theta * v.abs();
    let threshold = z_minus + z_other;
    Ok(if adjusted > threshold {
        AxisBestResponse::unique(z_minus / theta)
    } else {
        AxisBestResponse { effort: 0.0, tie: adjusted == threshold }
    })
}

/// Sabotage effort of a negative-valuation player facing a rival with
/// negative effective effort.
///
/// Solves `theta * |v| * |z_other| / (|Z_i| + |z_other|)^2 = 1`, i.e. the own
/// group ends at `Z_i = -(sqrt(theta |v| |z_other|) - |z_other|)`. A positive
/// residual is first burned off at a loss, so then the interior point is
/// compared against doing nothing.
pub fn br_negative_y(theta: f64, v: f64, z_minus: f64, z_other: f64) -> Result<AxisBestResponse> {
    finite(&[theta, v, z_minus, z_other])?;
    require(theta > 0.0, "theta must be positive")?;
    require(v < 0.0, "br_negative_y needs a negative valuation")?;
    require(z_other < 0.0, "br_negative_y needs a negative rival effective effort")?;
    let adjusted = theta * v.abs();
    let rival = z_other.abs();
    let target = (adjusted * rival).sqrt() - rival;
    if target <= 0.0 {
        return Ok(AxisBestResponse::unique(0.0));
    }
    let interior = ((target + z_minus) / theta).max(0.0);
    if z_minus <= 0.0 {
        return Ok(AxisBestResponse::unique(interior));
    }
    let surplus = (adjusted.sqrt() - rival.sqrt()).powi(2);
    Ok(interior_or_zero(interior, surplus, z_minus))
}

/// Constructive effort of a positive-valuation player whose group and rival
/// both have negative effective effort without her.
///
/// The only candidates are no effort and exactly lifting the group to zero,
/// `|z_minus|`. Zero wins (with a tie flag) when `v <= |z_minus + z_other|`.
pub fn br_negative_x(v: f64, z_minus: f64, z_other: f64) -> Result<AxisBestResponse> {
    finite(&[v, z_minus, z_other])?;
    require(v > 0.0, "br_negative_x needs a positive valuation")?;
    require(z_minus < 0.0, "br_negative_x needs a negative own-group residual")?;
    require(z_other < 0.0, "br_negative_x needs a negative rival effective effort")?;
    let threshold = (z_minus + z_other).abs();
    Ok(if v > threshold {
        AxisBestResponse::unique(z_minus.abs())
    } else {
        AxisBestResponse { effort: 0.0, tie: v == threshold }
    })
}

/// Effective effort a group would choose against `z_other > 0` if it were
/// run by a single player of valuation `v`: the maximiser of
/// `v * Z / (Z + z_other) - Z` over `Z >= 0`.
pub fn group_best_effective_effort(v: f64, z_other: f64) -> Result<f64> {
    finite(&[v, z_other])?;
    require(v > 0.0, "group best response needs a positive valuation")?;
    require(z_other > 0.0, "group best response needs a positive rival effective effort")?;
    Ok(((v * z_other).sqrt() - z_other).max(0.0))
}
