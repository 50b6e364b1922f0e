//! Contest data: valuations, sabotage effectiveness, strategy profiles and
//! the effective efforts they induce.
//!
//! Players are addressed with 1-based `(group, index)` pairs, where index 1 is
//! the highest valuation in the group and index `n_i` the lowest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};

/// A player's (nonzero) valuation for the prize, in utility units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Valuation(f64);

impl Valuation {
    pub fn new(value: f64) -> std::result::Result<Self, ValidationError> {
        Self::checked(value, 0, 0)
    }

    fn checked(value: f64, group: usize, index: usize) -> std::result::Result<Self, ValidationError> {
        if !value.is_finite() {
            return Err(ValidationError::NonFiniteValuation { group, index });
        }
        if value == 0.0 {
            return Err(ValidationError::ZeroValuation { group, index });
        }
        Ok(Self(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// One group's valuations, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSpec {
    valuations: Vec<Valuation>,
}

impl GroupSpec {
    fn validate(group: usize, raw: &[f64]) -> std::result::Result<Self, ValidationError> {
        let n = raw.len();
        if n < 2 {
            return Err(ValidationError::GroupTooSmall { group, len: n });
        }
        let valuations = raw
            .iter()
            .enumerate()
            .map(|(k, &v)| Valuation::checked(v, group, k + 1))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for k in 0..n - 1 {
            let (hi, lo) = (raw[k], raw[k + 1]);
            let strict = k == 0 || k + 1 == n - 1;
            let ok = if strict { hi > lo } else { hi >= lo };
            if !ok {
                return Err(ValidationError::OrderingViolated { group, index: k + 1 });
            }
        }
        if !(raw[0] > 0.0 && raw[n - 1] < 0.0) {
            return Err(ValidationError::SignViolated { group });
        }
        Ok(Self { valuations })
    }

    pub fn len(&self) -> usize {
        self.valuations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valuations.is_empty()
    }

    /// Valuation of the player at 1-based `index`.
    pub fn value(&self, index: usize) -> f64 {
        self.valuations[index - 1].get()
    }

    /// `v_{i1}`, the unique highest valuation.
    pub fn top(&self) -> f64 {
        self.valuations[0].get()
    }

    /// `v_{i n_i}`, the unique lowest valuation.
    pub fn bottom(&self) -> f64 {
        self.valuations[self.valuations.len() - 1].get()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.valuations.iter().map(|v| v.get())
    }
}

/// Exogenous data of the game: two groups and the sabotage effectiveness `theta`.
///
/// A `ContestSpec` can only be obtained through [`validate_spec`] (or
/// deserialization, which calls it), so every instance satisfies the ordering
/// and sign requirements on valuations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawContestSpec", into = "RawContestSpec")]
pub struct ContestSpec {
    groups: [GroupSpec; 2],
    theta: f64,
}

/// Unvalidated contest spec, mirroring the canonical JSON document
/// `{"theta": .., "groups": [{"valuations": [..]}, {"valuations": [..]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawContestSpec {
    pub theta: f64,
    pub groups: Vec<RawGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawGroup {
    pub valuations: Vec<f64>,
}

impl RawContestSpec {
    pub fn new(theta: f64, group1: &[f64], group2: &[f64]) -> Self {
        Self {
            theta,
            groups: vec![
                RawGroup { valuations: group1.to_vec() },
                RawGroup { valuations: group2.to_vec() },
            ],
        }
    }
}

/// Checks every contest invariant, returning the first violation found.
///
/// Check order: theta, group count, then for each group in turn its size,
/// finiteness and nonzero valuations, descending order, and sign pattern.
pub fn validate_spec(raw: &RawContestSpec) -> std::result::Result<ContestSpec, ValidationError> {
    if !(raw.theta > 0.0 && raw.theta.is_finite()) {
        return Err(ValidationError::NonPositiveTheta(raw.theta));
    }
    if raw.groups.len() != 2 {
        return Err(ValidationError::GroupCount(raw.groups.len()));
    }
    let g1 = GroupSpec::validate(1, &raw.groups[0].valuations)?;
    let g2 = GroupSpec::validate(2, &raw.groups[1].valuations)?;
    Ok(ContestSpec { groups: [g1, g2], theta: raw.theta })
}

impl TryFrom<RawContestSpec> for ContestSpec {
    type Error = ValidationError;

    fn try_from(raw: RawContestSpec) -> std::result::Result<Self, Self::Error> {
        validate_spec(&raw)
    }
}

impl From<ContestSpec> for RawContestSpec {
    fn from(spec: ContestSpec) -> Self {
        spec.to_raw()
    }
}

impl ContestSpec {
    pub fn new(theta: f64, group1: &[f64], group2: &[f64]) -> std::result::Result<Self, ValidationError> {
        validate_spec(&RawContestSpec::new(theta, group1, group2))
    }

    pub fn to_raw(&self) -> RawContestSpec {
        RawContestSpec {
            theta: self.theta,
            groups: self
                .groups
                .iter()
                .map(|g| RawGroup { valuations: g.values().collect() })
                .collect(),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same valuations under a different sabotage effectiveness.
    pub fn with_theta(&self, theta: f64) -> std::result::Result<Self, ValidationError> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(ValidationError::NonPositiveTheta(theta));
        }
        Ok(Self { groups: self.groups.clone(), theta })
    }

    /// Group by 1-based number.
    pub fn group(&self, group: usize) -> &GroupSpec {
        &self.groups[group - 1]
    }

    pub fn groups(&self) -> &[GroupSpec; 2] {
        &self.groups
    }

    pub fn sizes(&self) -> [usize; 2] {
        [self.groups[0].len(), self.groups[1].len()]
    }

    pub fn valuation(&self, player: PlayerId) -> Result<f64> {
        self.check_player(player)?;
        Ok(self.group(player.group).value(player.index))
    }

    pub fn check_player(&self, player: PlayerId) -> Result<()> {
        let ok = (1..=2).contains(&player.group)
            && (1..=self.group(player.group).len()).contains(&player.index);
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownPlayer { group: player.group, index: player.index })
        }
    }

    /// Largest valuation magnitude across both groups.
    pub fn max_abs_valuation(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|g| g.values())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// All players in group-major, index-ascending order.
    pub fn players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        (1..=2).flat_map(move |g| (1..=self.group(g).len()).map(move |k| PlayerId::new(g, k)))
    }
}

/// A player, addressed by 1-based group number and within-group index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlayerId {
    pub group: usize,
    pub index: usize,
}

impl PlayerId {
    pub const fn new(group: usize, index: usize) -> Self {
        Self { group, index }
    }

    /// Number of the opposing group.
    pub const fn rival(self) -> usize {
        3 - self.group
    }
}

impl std::fmt::Display for PlayerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.group, self.index)
    }
}

/// A player's pair of efforts: constructive `x` and sabotage `y`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Effort {
    pub x: f64,
    pub y: f64,
}

impl Effort {
    pub const ZERO: Effort = Effort { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        let e = Self { x, y };
        e.check()?;
        Ok(e)
    }

    pub fn constructive(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn sabotage(y: f64) -> Result<Self> {
        Self::new(0.0, y)
    }

    fn check(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.x) && ok(self.y) {
            Ok(())
        } else {
            Err(Error::InvalidEffort { x: self.x, y: self.y })
        }
    }
}

/// Efforts of every player, grouped and ordered like the valuations.
///
/// Serialized as `{"efforts": [[{"x":..,"y":..}, ..], [..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct StrategyProfile {
    efforts: [Vec<Effort>; 2],
}

#[derive(Debug, Clone, Deserialize)]
struct RawProfile {
    efforts: Vec<Vec<Effort>>,
}

impl TryFrom<RawProfile> for StrategyProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        let [g1, g2]: [Vec<Effort>; 2] = raw.efforts.try_into().map_err(|v: Vec<_>| {
            Error::ShapeMismatch(format!("profile must list exactly two groups, got {}", v.len()))
        })?;
        Self::new(g1, g2)
    }
}

impl StrategyProfile {
    pub fn new(group1: Vec<Effort>, group2: Vec<Effort>) -> Result<Self> {
        for e in group1.iter().chain(&group2) {
            e.check()?;
        }
        Ok(Self { efforts: [group1, group2] })
    }

    pub fn zeros(spec: &ContestSpec) -> Self {
        let [n1, n2] = spec.sizes();
        Self { efforts: [vec![Effort::ZERO; n1], vec![Effort::ZERO; n2]] }
    }

    pub fn sizes(&self) -> [usize; 2] {
        [self.efforts[0].len(), self.efforts[1].len()]
    }

    pub fn group(&self, group: usize) -> &[Effort] {
        &self.efforts[group - 1]
    }

    /// Panics if `player` is outside the profile; use [`StrategyProfile::get`] for checked access.
    pub fn effort(&self, player: PlayerId) -> Effort {
        self.efforts[player.group - 1][player.index - 1]
    }

    pub fn get(&self, player: PlayerId) -> Option<Effort> {
        self.efforts
            .get(player.group.wrapping_sub(1))?
            .get(player.index.wrapping_sub(1))
            .copied()
    }

    pub fn set(&mut self, player: PlayerId, effort: Effort) -> Result<()> {
        effort.check()?;
        let slot = self
            .efforts
            .get_mut(player.group.wrapping_sub(1))
            .and_then(|g| g.get_mut(player.index.wrapping_sub(1)))
            .ok_or(Error::UnknownPlayer { group: player.group, index: player.index })?;
        *slot = effort;
        Ok(())
    }

    pub fn with(mut self, player: PlayerId, effort: Effort) -> Result<Self> {
        self.set(player, effort)?;
        Ok(self)
    }

    pub fn check_shape(&self, spec: &ContestSpec) -> Result<()> {
        if self.sizes() == spec.sizes() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "profile has group sizes {:?}, contest has {:?}",
                self.sizes(),
                spec.sizes()
            )))
        }
    }

    /// Largest absolute difference between corresponding efforts.
    ///
    /// Profiles of different shapes are infinitely far apart.
    pub fn max_norm_distance(&self, other: &Self) -> f64 {
        if self.sizes() != other.sizes() {
            return f64::INFINITY;
        }
        self.efforts
            .iter()
            .flatten()
            .zip(other.efforts.iter().flatten())
            .fold(0.0_f64, |m, (a, b)| m.max((a.x - b.x).abs()).max((a.y - b.y).abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlayerId, Effort)> + '_ {
        self.efforts.iter().enumerate().flat_map(|(g, efforts)| {
            efforts
                .iter()
                .enumerate()
                .map(move |(k, &e)| (PlayerId::new(g + 1, k + 1), e))
        })
    }
}

/// Effective efforts `z_i = X_i - theta * Y_i` and the per-player residuals
/// `z_{-ik}`, the group's effective effort without player k's contribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveEffort {
    pub z1: f64,
    pub z2: f64,
    pub residuals: [Vec<f64>; 2],
}

impl EffectiveEffort {
    /// Effective effort of the 1-based group.
    pub fn z(&self, group: usize) -> f64 {
        if group == 1 { self.z1 } else { self.z2 }
    }

    pub fn z_minus(&self, player: PlayerId) -> f64 {
        self.residuals[player.group - 1][player.index - 1]
    }
}

/// `X - theta * Y` over a slice of efforts, summing each effort type in index order.
pub fn group_effective_effort(theta: f64, efforts: impl IntoIterator<Item = Effort>) -> f64 {
    let (total_x, total_y) = efforts
        .into_iter()
        .fold((0.0, 0.0), |(sx, sy), e| (sx + e.x, sy + e.y));
    total_x - theta * total_y
}

pub fn effective_efforts(spec: &ContestSpec, profile: &StrategyProfile) -> Result<EffectiveEffort> {
    profile.check_shape(spec)?;
    let theta = spec.theta();
    let z = |g: usize| group_effective_effort(theta, profile.group(g).iter().copied());
    let residuals = |g: usize| -> Vec<f64> {
        let efforts = profile.group(g);
        (0..efforts.len())
            .map(|k| {
                let others = efforts
                    .iter()
                    .enumerate()
                    .filter(|&(z, _)| z != k)
                    .map(|(_, &e)| e);
                group_effective_effort(theta, others)
            })
            .collect()
    };
    Ok(EffectiveEffort { z1: z(1), z2: z(2), residuals: [residuals(1), residuals(2)] })
}
