//! Certification and refutation of strategy profiles by unilateral deviation
//! search.
//!
//! A player's payoff along either effort axis is piecewise smooth with a
//! single seam, where the player's own group crosses zero effective effort.
//! On each smooth piece it is either concave (maximised at a first-order
//! point) or convex (maximised at an end). [`best_deviation`] therefore
//! evaluates the corners, the seam, the first-order points, and a safety grid
//! with one-step neighbourhoods, which turns the infinite-action Nash check
//! into a finite certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::best_response::{br_negative_x, br_negative_y, br_positive_x, br_positive_y, AxisBestResponse};
use crate::csf::{own_win_probability, payoff};
use crate::error::{Error, Result};
use crate::model::{
    effective_efforts, group_effective_effort, ContestSpec, Effort, PlayerId, StrategyProfile,
};

/// Points per axis in the safety grid.
pub const AXIS_GRID_POINTS: usize = 512;
/// Points per axis in the two-axis straddling guard.
pub const JOINT_GRID_POINTS: usize = 32;
/// Offsets this small (relative to the search range) probe the discontinuity
/// at `Z_1 = Z_2 = 0`.
pub const MICRO_STEP: f64 = 1e-9;

/// Default certification tolerance, `1e-6 * max |v|`.
pub fn default_epsilon(spec: &ContestSpec) -> f64 {
    1e-6 * spec.max_abs_valuation()
}

/// A unilateral change of efforts and the payoff it gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub player: PlayerId,
    pub new_x: f64,
    pub new_y: f64,
    /// Payoff after the deviation minus payoff before it.
    pub improvement: f64,
    /// A closed-form best response consulted during the search was indifferent
    /// between zero and a positive effort.
    pub tie: bool,
}

impl Deviation {
    pub fn effort(&self) -> Effort {
        Effort { x: self.new_x, y: self.new_y }
    }

    /// The profile with this deviation applied.
    pub fn apply(&self, profile: &StrategyProfile) -> Result<StrategyProfile> {
        profile.clone().with(self.player, self.effort())
    }
}

impl Serialize for Deviation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Xy(f64, f64);
        impl Serialize for Xy {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("x", &self.0)?;
                m.serialize_entry("y", &self.1)?;
                m.end()
            }
        }
        let mut s = serializer.serialize_struct("Deviation", 5)?;
        s.serialize_field("group", &self.player.group)?;
        s.serialize_field("index", &self.player.index)?;
        s.serialize_field("best_improvement", &self.improvement)?;
        s.serialize_field("deviation", &Xy(self.new_x, self.new_y))?;
        s.serialize_field("tie", &self.tie)?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub epsilon: f64,
    pub is_epsilon_nash: bool,
    pub candidate_count: usize,
    pub players: Vec<Deviation>,
}

impl VerificationReport {
    pub fn worst(&self) -> Option<&Deviation> {
        self.players
            .iter()
            .max_by(|a, b| a.improvement.total_cmp(&b.improvement))
    }
}

/// Payoff evaluator for one player with everyone else held fixed.
struct DeviationSearch<'a> {
    player: PlayerId,
    own_group: &'a [Effort],
    theta: f64,
    valuation: f64,
    rival_z: f64,
    z_minus: f64,
    current: Effort,
}

impl<'a> DeviationSearch<'a> {
    fn new(spec: &ContestSpec, profile: &'a StrategyProfile, player: PlayerId) -> Result<Self> {
        spec.check_player(player)?;
        let eff = effective_efforts(spec, profile)?;
        Ok(Self {
            player,
            own_group: profile.group(player.group),
            theta: spec.theta(),
            valuation: spec.valuation(player)?,
            rival_z: eff.z(player.rival()),
            z_minus: eff.z_minus(player),
            current: profile.effort(player),
        })
    }

    /// Same arithmetic as `csf::payoff`, with the player's efforts swapped in.
    fn payoff_at(&self, x: f64, y: f64) -> f64 {
        let own = self.player.index - 1;
        let efforts = self
            .own_group
            .iter()
            .enumerate()
            .map(|(k, &e)| if k == own { Effort { x, y } } else { e });
        let z_own = group_effective_effort(self.theta, efforts);
        let p = own_win_probability(self.player.group, z_own, self.rival_z)
            .expect("finite efforts give finite effective efforts");
        self.valuation * p - x - y
    }

    fn range(&self, max_abs_valuation: f64) -> f64 {
        4.0 * (max_abs_valuation + self.z_minus.abs() + self.rival_z.abs())
    }

    /// Efforts along the constructive axis (y = 0) that must be checked, with
    /// any tie flag raised by the closed forms.
    fn x_points(&self) -> (Vec<f64>, bool) {
        let (v, zm, zj) = (self.valuation, self.z_minus, self.rival_z);
        let mut pts = vec![0.0, self.current.x];
        let mut tie = false;
        // seam: own group exactly at zero
        if zm <= 0.0 {
            pts.push(-zm);
        }
        if v > 0.0 && zj != 0.0 {
            // stationary point of whichever smooth piece shares the rival's sign
            let magnitude = (v * zj.abs()).sqrt() - zj.abs();
            pts.push(zj.signum() * magnitude - zm);
        }
        let mut consult = |br: Result<AxisBestResponse>| {
            if let Ok(br) = br {
                pts.push(br.effort);
                tie |= br.tie;
            }
        };
        if v > 0.0 && zj > 0.0 {
            consult(br_positive_x(v, zm, zj));
        }
        if v > 0.0 && zm < 0.0 && zj < 0.0 {
            consult(br_negative_x(v, zm, zj));
        }
        (pts, tie)
    }

    /// Efforts along the sabotage axis (x = 0) that must be checked.
    fn y_points(&self) -> (Vec<f64>, bool) {
        let (v, zm, zj, theta) = (self.valuation, self.z_minus, self.rival_z, self.theta);
        let mut pts = vec![0.0, self.current.y];
        let mut tie = false;
        if zm >= 0.0 {
            pts.push(zm / theta);
        }
        if v < 0.0 && zj != 0.0 {
            let magnitude = (theta * v.abs() * zj.abs()).sqrt() - zj.abs();
            pts.push((zm - zj.signum() * magnitude) / theta);
        }
        let mut consult = |br: Result<AxisBestResponse>| {
            if let Ok(br) = br {
                pts.push(br.effort);
                tie |= br.tie;
            }
        };
        if v < 0.0 && zj < 0.0 {
            consult(br_negative_y(theta, v, zm, zj));
        }
        if v < 0.0 && zm > 0.0 && zj > 0.0 {
            consult(br_positive_y(theta, v, zm, zj));
        }
        (pts, tie)
    }
}

/// Adds each point's one-grid-step and micro-step neighbours, then the grid itself.
fn with_neighbourhood(points: Vec<f64>, range: f64) -> Vec<f64> {
    let step = range / (AXIS_GRID_POINTS - 1) as f64;
    let micro = MICRO_STEP * range;
    let mut out = Vec::with_capacity(points.len() * 5 + AXIS_GRID_POINTS);
    for p in points {
        out.extend([p, p - step, p + step, p - micro, p + micro]);
    }
    out.extend((0..AXIS_GRID_POINTS).map(|k| range * k as f64 / (AXIS_GRID_POINTS - 1) as f64));
    out.retain(|e| e.is_finite() && *e >= 0.0);
    out
}

struct SearchOutcome {
    deviation: Deviation,
    candidates: usize,
}

fn search(spec: &ContestSpec, profile: &StrategyProfile, player: PlayerId) -> Result<SearchOutcome> {
    let ctx = DeviationSearch::new(spec, profile, player)?;
    let range = ctx.range(spec.max_abs_valuation());
    let (xs, tie_x) = ctx.x_points();
    let (ys, tie_y) = ctx.y_points();
    let cur = ctx.current;

    let mut candidates: Vec<(f64, f64)> = vec![(cur.x, 0.0), (0.0, cur.y)];
    candidates.extend(with_neighbourhood(xs, range).into_iter().map(|x| (x, 0.0)));
    candidates.extend(with_neighbourhood(ys, range).into_iter().map(|y| (0.0, y)));
    let joint_step = range / (JOINT_GRID_POINTS - 1) as f64;
    for i in 0..JOINT_GRID_POINTS {
        for j in 0..JOINT_GRID_POINTS {
            candidates.push((i as f64 * joint_step, j as f64 * joint_step));
        }
    }

    let base = ctx.payoff_at(cur.x, cur.y);
    let (mut best, mut best_payoff) = ((cur.x, cur.y), base);
    for &(x, y) in &candidates {
        let value = ctx.payoff_at(x, y);
        if value > best_payoff {
            best = (x, y);
            best_payoff = value;
        }
    }

    let moved = profile.clone().with(player, Effort { x: best.0, y: best.1 })?;
    let improvement = payoff(spec, &moved, player)? - payoff(spec, profile, player)?;
    Ok(SearchOutcome {
        deviation: Deviation { player, new_x: best.0, new_y: best.1, improvement, tie: tie_x || tie_y },
        candidates: candidates.len() + 1,
    })
}

/// Most profitable unilateral deviation found for `player`, others held
/// fixed. Returns the player's current efforts (improvement 0) when nothing
/// strictly better is found.
pub fn best_deviation(spec: &ContestSpec, profile: &StrategyProfile, player: PlayerId) -> Result<Deviation> {
    Ok(search(spec, profile, player)?.deviation)
}

pub fn is_epsilon_nash(spec: &ContestSpec, profile: &StrategyProfile, epsilon: f64) -> Result<VerificationReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    profile.check_shape(spec)?;
    let players: Vec<PlayerId> = spec.players().collect();
    let outcomes = players
        .par_iter()
        .map(|&p| search(spec, profile, p))
        .collect::<Result<Vec<_>>>()?;
    let candidate_count = outcomes.iter().map(|o| o.candidates).sum();
    let players: Vec<Deviation> = outcomes.into_iter().map(|o| o.deviation).collect();
    let is_epsilon_nash = players.iter().all(|d| d.improvement <= epsilon);
    Ok(VerificationReport { epsilon, is_epsilon_nash, candidate_count, players })
}

/// Families of profiles that can never be pure-strategy equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ForbiddenClass {
    /// One group's effective effort positive, the other's negative.
    OppositeSigns,
    /// Some group's effective effort exactly zero.
    SomeZeroZ,
    /// A positive-valuation player sabotages or a negative-valuation player helps.
    StraddleOrWrongSign,
    /// With both effective efforts positive, someone other than the top player
    /// helps or anyone sabotages; with both negative, someone other than the
    /// bottom player sabotages or anyone helps.
    FreeRiderViolation,
}

impl ForbiddenClass {
    pub const ALL: [ForbiddenClass; 4] = [
        ForbiddenClass::OppositeSigns,
        ForbiddenClass::SomeZeroZ,
        ForbiddenClass::StraddleOrWrongSign,
        ForbiddenClass::FreeRiderViolation,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refutation {
    pub profile: StrategyProfile,
    /// The player whose deviation the class's argument predicts, if any.
    pub target: Option<PlayerId>,
    /// Best deviation found; on success, one with improvement above the threshold.
    pub deviation: Deviation,
    pub refuted: bool,
}

/// Improvements must exceed `1e-9 * max |v|` to count as a refutation.
pub fn refutation_threshold(spec: &ContestSpec) -> f64 {
    1e-9 * spec.max_abs_valuation()
}

/// Draws `samples` random profiles from `class` and searches each for a
/// strictly profitable deviation. Deterministic for a given `seed`.
pub fn refute_class(spec: &ContestSpec, class: ForbiddenClass, samples: usize, seed: u64) -> Result<Vec<Refutation>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generator = ProfileGenerator { spec };
    let threshold = refutation_threshold(spec);
    (0..samples)
        .map(|_| {
            let (profile, target) = generator.draw(class, &mut rng)?;
            refute_profile(spec, profile, target, threshold)
        })
        .collect()
}

fn refute_profile(
    spec: &ContestSpec,
    profile: StrategyProfile,
    target: Option<PlayerId>,
    threshold: f64,
) -> Result<Refutation> {
    let order = target.into_iter().chain(spec.players().filter(|p| Some(*p) != target));
    let mut best: Option<Deviation> = None;
    for player in order {
        let dev = best_deviation(spec, &profile, player)?;
        if dev.improvement > threshold {
            return Ok(Refutation { profile, target, deviation: dev, refuted: true });
        }
        if best.is_none_or(|b| dev.improvement > b.improvement) {
            best = Some(dev);
        }
    }
    let deviation = best.expect("every contest has players");
    Ok(Refutation { profile, target, deviation, refuted: false })
}

struct ProfileGenerator<'a> {
    spec: &'a ContestSpec,
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

impl ProfileGenerator<'_> {
    fn scale(&self) -> f64 {
        self.spec.max_abs_valuation()
    }

    fn magnitude(&self, rng: &mut impl Rng) -> f64 {
        self.scale() * log_uniform(rng, 1e-3, 1.0)
    }

    /// Each effort type of each player independently active with probability 1/2.
    fn random_group(&self, group: usize, rng: &mut impl Rng) -> Vec<Effort> {
        (0..self.spec.group(group).len())
            .map(|_| {
                let x = if rng.random_bool(0.5) { self.magnitude(rng) } else { 0.0 };
                let y = if rng.random_bool(0.5) { self.magnitude(rng) } else { 0.0 };
                Effort { x, y }
            })
            .collect()
    }

    fn z(&self, efforts: &[Effort]) -> f64 {
        group_effective_effort(self.spec.theta(), efforts.iter().copied())
    }

    /// Pushes the group's effective effort strictly positive or strictly negative.
    fn force_sign(&self, efforts: &mut [Effort], positive: bool, rng: &mut impl Rng) {
        let theta = self.spec.theta();
        loop {
            let z = self.z(efforts);
            if (positive && z > 0.0) || (!positive && z < 0.0) {
                return;
            }
            let k = rng.random_range(0..efforts.len());
            let push = z.abs() + self.magnitude(rng);
            if positive {
                efforts[k].x += push;
            } else {
                efforts[k].y += push / theta;
            }
        }
    }

    /// A group with effective effort exactly zero: either idle, or one
    /// player's constructive effort cancelling everyone's sabotage.
    fn zero_group(&self, group: usize, rng: &mut impl Rng) -> Vec<Effort> {
        let n = self.spec.group(group).len();
        let mut efforts = vec![Effort::ZERO; n];
        if rng.random_bool(0.5) {
            for e in efforts.iter_mut() {
                if rng.random_bool(0.5) {
                    e.y = self.magnitude(rng);
                }
            }
            let total_y = efforts.iter().fold(0.0, |s, e| s + e.y);
            efforts[rng.random_range(0..n)].x = self.spec.theta() * total_y;
        }
        efforts
    }

    fn assemble(&self, first: usize, own: Vec<Effort>, rival: Vec<Effort>) -> Result<StrategyProfile> {
        if first == 1 {
            StrategyProfile::new(own, rival)
        } else {
            StrategyProfile::new(rival, own)
        }
    }

    fn draw(&self, class: ForbiddenClass, rng: &mut impl Rng) -> Result<(StrategyProfile, Option<PlayerId>)> {
        let i = rng.random_range(1..=2usize);
        let j = 3 - i;
        match class {
            ForbiddenClass::OppositeSigns => {
                let mut own = self.random_group(i, rng);
                let mut rival = self.random_group(j, rng);
                self.force_sign(&mut own, true, rng);
                self.force_sign(&mut rival, false, rng);
                Ok((self.assemble(i, own, rival)?, None))
            }
            ForbiddenClass::SomeZeroZ => {
                let own = self.zero_group(i, rng);
                let rival = match rng.random_range(0..3) {
                    0 => self.zero_group(j, rng),
                    sign => {
                        let mut g = self.random_group(j, rng);
                        self.force_sign(&mut g, sign == 1, rng);
                        g
                    }
                };
                let profile = self.assemble(i, own, rival)?;
                debug_assert_eq!(effective_efforts(self.spec, &profile)?.z(i), 0.0);
                Ok((profile, None))
            }
            ForbiddenClass::StraddleOrWrongSign => {
                let mut own = self.random_group(i, rng);
                let rival = self.random_group(j, rng);
                let group = self.spec.group(i);
                let k = rng.random_range(0..group.len());
                if group.value(k + 1) > 0.0 {
                    own[k].y += self.magnitude(rng);
                } else {
                    own[k].x += self.magnitude(rng);
                }
                Ok((self.assemble(i, own, rival)?, Some(PlayerId::new(i, k + 1))))
            }
            ForbiddenClass::FreeRiderViolation => self.free_rider(i, rng),
        }
    }

    /// Profiles where the player the argument singles out sits at its
    /// first-order condition, so a different player has the profitable move.
    fn free_rider(&self, i: usize, rng: &mut impl Rng) -> Result<(StrategyProfile, Option<PlayerId>)> {
        let spec = self.spec;
        let theta = spec.theta();
        let group = spec.group(i);
        let rival_group = spec.group(3 - i);
        let n = group.len();
        let positives: Vec<usize> = (1..=n).filter(|&k| group.value(k) > 0.0).collect();
        let negatives: Vec<usize> = (1..=n).filter(|&k| group.value(k) < 0.0).collect();

        #[derive(Clone, Copy)]
        enum Case {
            SecondaryHelper,
            SabotageAgainstWinners,
            SecondarySaboteur,
            HelpAgainstLosers,
        }
        let mut cases = vec![Case::SabotageAgainstWinners, Case::HelpAgainstLosers];
        if positives.len() >= 2 {
            cases.push(Case::SecondaryHelper);
        }
        if negatives.len() >= 2 {
            cases.push(Case::SecondarySaboteur);
        }
        if cases.is_empty() {
            return Err(Error::ClassUnsatisfiable(format!("group {i} cannot host a free-rider violation")));
        }
        let case = cases[rng.random_range(0..cases.len())];

        let u = rng.random_range(0.05..0.8);
        let mut own = vec![Effort::ZERO; n];
        let mut rival = vec![Effort::ZERO; rival_group.len()];
        let pick = |list: &[usize], rng: &mut dyn rand::RngCore| list[rng.random_range(0..list.len())];

        let target = match case {
            Case::SecondaryHelper => {
                // helper k at its first-order point; the top player gains by helping more
                let k = pick(&positives[1..], rng);
                let v = group.value(k);
                let z_rival = v * u;
                let z_own = (v * z_rival).sqrt() - z_rival;
                let share = rng.random_range(0.2..=1.0);
                own[k - 1].x = share * z_own;
                own[0].x = z_own - own[k - 1].x;
                rival[0].x = z_rival;
                PlayerId::new(i, 1)
            }
            Case::SabotageAgainstWinners => {
                // top player at its first-order point while some saboteur is active
                let h = pick(&negatives, rng);
                let v1 = group.top();
                let z_rival = v1 * u;
                let z_own = (v1 * z_rival).sqrt() - z_rival;
                let y = z_own * log_uniform(rng, 1e-2, 2.0) / theta;
                own[h - 1].y = y;
                own[0].x = z_own + theta * y;
                rival[0].x = z_rival;
                PlayerId::new(i, h)
            }
            Case::SecondarySaboteur => {
                // saboteur h above the bottom at its first-order point; the bottom gains
                let h = pick(&negatives[..negatives.len() - 1], rng);
                let adjusted = theta * group.value(h).abs();
                let rival_mag = adjusted * u;
                let own_mag = (adjusted * rival_mag).sqrt() - rival_mag;
                let share = rng.random_range(0.2..=1.0);
                own[h - 1].y = share * own_mag / theta;
                own[n - 1].y = (1.0 - share) * own_mag / theta;
                rival[rival_group.len() - 1].y = rival_mag / theta;
                PlayerId::new(i, n)
            }
            Case::HelpAgainstLosers => {
                // bottom player at its first-order point while some helper is active
                let k = pick(&positives, rng);
                let adjusted = theta * group.bottom().abs();
                let rival_mag = adjusted * u;
                let own_mag = (adjusted * rival_mag).sqrt() - rival_mag;
                let x = own_mag * log_uniform(rng, 1e-2, 2.0);
                own[k - 1].x = x;
                own[n - 1].y = (own_mag + x) / theta;
                rival[rival_group.len() - 1].y = rival_mag / theta;
                PlayerId::new(i, k)
            }
        };
        Ok((self.assemble(i, own, rival)?, Some(target)))
    }
}

/// All-zero profile plus independent uniform jitter in `[0, scale)` on every effort.
pub fn jittered_zero_profile(spec: &ContestSpec, scale: f64, seed: u64) -> StrategyProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profile = StrategyProfile::zeros(spec);
    for player in spec.players().collect::<Vec<_>>() {
        let effort = Effort { x: scale * rng.random::<f64>(), y: scale * rng.random::<f64>() };
        profile.set(player, effort).expect("player from spec");
    }
    profile
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpdateOrder {
    /// Every player responds to the same profile, then all move at once.
    Simultaneous,
    /// Players respond one at a time to the latest profile.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum DynamicsStatus {
    Converged,
    Cycling { period: usize },
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsOutcome {
    pub status: DynamicsStatus,
    /// Initial profile followed by the profile after each iteration.
    pub trajectory: Vec<StrategyProfile>,
}

impl DynamicsOutcome {
    pub fn iterations(&self) -> usize {
        self.trajectory.len() - 1
    }

    pub fn last(&self) -> &StrategyProfile {
        self.trajectory.last().expect("trajectory holds the initial profile")
    }
}

/// A profile where no player can gain more than this is a fixed point.
pub const DYNAMICS_FIXED_POINT_GAIN: f64 = 1e-9;
/// Successive profiles this close (max-norm) may count as converged.
pub const DYNAMICS_CONVERGENCE_TOL: f64 = 1e-8;
/// A profile this close to an earlier one (two or more steps back) is a recurrence.
pub const DYNAMICS_CYCLE_TOL: f64 = 1e-6;

/// Iterated best responses. Every strictly profitable deviation is taken;
/// `Converged` needs both a step within the convergence tolerance and no gain
/// above the fixed-point threshold in that iteration, so that tiny moves
/// around the `Z_1 = Z_2 = 0` discontinuity are not mistaken for rest.
pub fn best_response_dynamics(
    spec: &ContestSpec,
    initial: &StrategyProfile,
    max_iters: usize,
    order: UpdateOrder,
) -> Result<DynamicsOutcome> {
    if max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
    }
    initial.check_shape(spec)?;
    let players: Vec<PlayerId> = spec.players().collect();
    let mut trajectory = vec![initial.clone()];

    for _ in 0..max_iters {
        let current = trajectory.last().expect("nonempty");
        let (next, largest_gain) = match order {
            UpdateOrder::RoundRobin => {
                let mut next = current.clone();
                let mut largest = 0.0_f64;
                for &p in &players {
                    let dev = best_deviation(spec, &next, p)?;
                    largest = largest.max(dev.improvement);
                    if dev.improvement > 0.0 {
                        next.set(p, dev.effort())?;
                    }
                }
                (next, largest)
            }
            UpdateOrder::Simultaneous => {
                let devs = players
                    .par_iter()
                    .map(|&p| best_deviation(spec, current, p))
                    .collect::<Result<Vec<_>>>()?;
                let mut next = current.clone();
                let mut largest = 0.0_f64;
                for dev in devs {
                    largest = largest.max(dev.improvement);
                    if dev.improvement > 0.0 {
                        next.set(dev.player, dev.effort())?;
                    }
                }
                (next, largest)
            }
        };
        let step = next.max_norm_distance(current);
        trajectory.push(next);
        if step <= DYNAMICS_CONVERGENCE_TOL && largest_gain <= DYNAMICS_FIXED_POINT_GAIN {
            return Ok(DynamicsOutcome { status: DynamicsStatus::Converged, trajectory });
        }
        if let Some(period) = recurrence(&trajectory) {
            return Ok(DynamicsOutcome { status: DynamicsStatus::Cycling { period }, trajectory });
        }
    }
    Ok(DynamicsOutcome { status: DynamicsStatus::MaxIters, trajectory })
}

/// Period of the most recent recurrence of the newest profile, if the
/// trajectory left the recurring profile's neighbourhood in between.
fn recurrence(trajectory: &[StrategyProfile]) -> Option<usize> {
    let n = trajectory.len() - 1;
    let newest = &trajectory[n];
    (0..n.saturating_sub(1)).rev().find_map(|k| {
        let anchor = &trajectory[k];
        let returned = newest.max_norm_distance(anchor) <= DYNAMICS_CYCLE_TOL;
        let left = || {
            trajectory[k + 1..n]
                .iter()
                .any(|p| p.max_norm_distance(anchor) > DYNAMICS_CYCLE_TOL)
        };
        (returned && left()).then_some(n - k)
    })
}
