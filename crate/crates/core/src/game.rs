//! N-coalition game structure.
//!
//! Every player controls one scalar action inside a closed interval. Players are
//! grouped into coalitions, and the actions of all players are laid out in one
//! global vector, coalition by coalition, so that coalition `i` owns the
//! contiguous block `offset_i .. offset_i + n_i`.

use std::fmt;
use std::ops::{Deref, DerefMut, Range};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::CoalitionGraph;

/// Closed interval `[lower, upper]` holding one player's action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConstraint {
    lower: f64,
    upper: f64,
}

impl BoxConstraint {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower > upper {
            return Err(Error::InvalidBox { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    /// Euclidean projection onto the interval.
    pub fn project(&self, v: f64) -> f64 {
        project_box(v, self)
    }
}

/// Clamp `v` into `bounds`. NaN is passed through so callers can detect it.
pub fn project_box(v: f64, bounds: &BoxConstraint) -> f64 {
    v.max(bounds.lower).min(bounds.upper)
}

type CostFn = dyn Fn(&[f64]) -> std::result::Result<f64, String> + Send + Sync;
type SubgradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Black-box local cost of a single player.
///
/// The oracle receives the full action profile and returns a value only;
/// gradient information is never exposed through it.
#[derive(Clone)]
pub struct CostOracle {
    f: Arc<CostFn>,
    declared_lipschitz: Option<f64>,
}

impl CostOracle {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(move |x: &[f64]| Ok(f(x))),
            declared_lipschitz: None,
        }
    }

    /// Oracle whose evaluation may fail with a reason string.
    pub fn fallible<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> std::result::Result<f64, String> + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            declared_lipschitz: None,
        }
    }

    pub fn with_lipschitz(mut self, bound: f64) -> Self {
        self.declared_lipschitz = Some(bound);
        self
    }

    pub fn declared_lipschitz(&self) -> Option<f64> {
        self.declared_lipschitz
    }

    pub fn evaluate(&self, x: &[f64]) -> std::result::Result<f64, String> {
        let v = (self.f)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite cost {v}"))
        }
    }
}

impl fmt::Debug for CostOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostOracle")
            .field("declared_lipschitz", &self.declared_lipschitz)
            .finish_non_exhaustive()
    }
}

/// Analytic partial subgradient of a local cost with respect to the owning
/// coalition's block. Only the reference solver uses it.
#[derive(Clone)]
pub struct Subgradient(Arc<SubgradientFn>);

impl Subgradient {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.0)(x)
    }
}

impl fmt::Debug for Subgradient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Subgradient(..)")
    }
}

/// `(coalition, player)` pair, both zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerId {
    pub coalition: usize,
    pub player: usize,
}

impl PlayerId {
    pub fn new(coalition: usize, player: usize) -> Self {
        Self { coalition, player }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.coalition, self.player)
    }
}

#[derive(Debug, Clone)]
pub struct PlayerSpec {
    pub id: PlayerId,
    pub bounds: BoxConstraint,
    pub cost: CostOracle,
    pub subgradient: Option<Subgradient>,
}

impl PlayerSpec {
    pub fn new(coalition: usize, player: usize, bounds: BoxConstraint, cost: CostOracle) -> Self {
        Self {
            id: PlayerId::new(coalition, player),
            bounds,
            cost,
            subgradient: None,
        }
    }

    pub fn with_subgradient(mut self, g: Subgradient) -> Self {
        self.subgradient = Some(g);
        self
    }
}

/// Joint action vector of all players in global coordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionProfile(Vec<f64>);

impl ActionProfile {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ActionProfile {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ActionProfile {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ActionProfile {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone)]
pub struct Coalition {
    players: Vec<PlayerSpec>,
    graph: CoalitionGraph,
    offset: usize,
}

impl Coalition {
    pub fn players(&self) -> &[PlayerSpec] {
        &self.players
    }

    pub fn graph(&self) -> &CoalitionGraph {
        &self.graph
    }

    pub fn size(&self) -> usize {
        self.players.len()
    }

    pub fn block(&self) -> Range<usize> {
        self.offset..self.offset + self.players.len()
    }
}

/// Validated game: coalitions, their players and communication graphs.
#[derive(Debug, Clone)]
pub struct GameSpec {
    coalitions: Vec<Coalition>,
    // global coordinate -> player
    owners: Vec<PlayerId>,
}

/// Group `players` by coalition and pair each coalition with its graph.
///
/// Coalition ids must be `0..graphs.len()` and player ids inside each
/// coalition must be exactly `0..n_i`.
pub fn assemble_game(players: Vec<PlayerSpec>, graphs: Vec<CoalitionGraph>) -> Result<GameSpec> {
    let num_coalitions = graphs.len();
    if num_coalitions == 0 {
        return Err(Error::InvalidInput("a game needs at least one coalition".into()));
    }
    let mut grouped: Vec<Vec<PlayerSpec>> = vec![Vec::new(); num_coalitions];
    for p in players {
        if p.id.coalition >= num_coalitions {
            return Err(Error::InvalidIndex(format!(
                "player {} refers to coalition {} but only {} graphs were given",
                p.id, p.id.coalition, num_coalitions
            )));
        }
        grouped[p.id.coalition].push(p);
    }

    let mut coalitions = Vec::with_capacity(num_coalitions);
    let mut owners = Vec::new();
    for (i, (mut members, graph)) in grouped.into_iter().zip(graphs).enumerate() {
        if members.is_empty() {
            return Err(Error::EmptyCoalition(i));
        }
        members.sort_by_key(|p| p.id.player);
        for w in members.windows(2) {
            if w[0].id.player == w[1].id.player {
                return Err(Error::DuplicatePlayer {
                    coalition: i,
                    player: w[0].id.player,
                });
            }
        }
        if let Some((pos, p)) = members.iter().enumerate().find(|(pos, p)| p.id.player != *pos) {
            return Err(Error::InvalidIndex(format!(
                "coalition {i}: expected player index {pos}, found {}",
                p.id.player
            )));
        }
        if graph.size() != members.len() {
            return Err(Error::DimensionMismatch(format!(
                "coalition {i} has {} players but its graph has size {}",
                members.len(),
                graph.size()
            )));
        }
        let offset = owners.len();
        owners.extend(members.iter().map(|p| p.id));
        coalitions.push(Coalition {
            players: members,
            graph,
            offset,
        });
    }
    Ok(GameSpec { coalitions, owners })
}

impl GameSpec {
    pub fn assemble(players: Vec<PlayerSpec>, graphs: Vec<CoalitionGraph>) -> Result<Self> {
        assemble_game(players, graphs)
    }

    pub fn num_coalitions(&self) -> usize {
        self.coalitions.len()
    }

    /// Total number of players `n`.
    pub fn num_players(&self) -> usize {
        self.owners.len()
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn coalition(&self, i: usize) -> &Coalition {
        &self.coalitions[i]
    }

    pub fn coalition_size(&self, i: usize) -> usize {
        self.coalitions[i].size()
    }

    pub fn coalition_sizes(&self) -> Vec<usize> {
        self.coalitions.iter().map(Coalition::size).collect()
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        self.coalitions[i].block()
    }

    pub fn coord(&self, id: PlayerId) -> usize {
        self.coalitions[id.coalition].offset + id.player
    }

    pub fn owner(&self, coord: usize) -> PlayerId {
        self.owners[coord]
    }

    pub fn player(&self, id: PlayerId) -> &PlayerSpec {
        &self.coalitions[id.coalition].players[id.player]
    }

    /// Players in global coordinate order.
    pub fn players(&self) -> impl Iterator<Item = &PlayerSpec> {
        self.coalitions.iter().flat_map(|c| c.players.iter())
    }

    pub fn bounds(&self) -> Vec<BoxConstraint> {
        self.players().map(|p| p.bounds).collect()
    }

    pub fn check_profile(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.num_players() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} entries, game has {} players",
                x.len(),
                self.num_players()
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.num_players() && self.players().zip(x).all(|(p, &v)| p.bounds.contains(v))
    }

    pub fn project(&self, x: &mut [f64]) {
        for (p, v) in self.players().zip(x.iter_mut()) {
            *v = p.bounds.project(*v);
        }
    }

    /// Local cost `f^i_j(x)` of one player.
    pub fn evaluate(&self, id: PlayerId, x: &[f64]) -> Result<f64> {
        self.player(id)
            .cost
            .evaluate(x)
            .map_err(|reason| Error::OracleFailure {
                coalition: id.coalition,
                player: id.player,
                reason,
            })
    }

    /// Coalition cost: the mean of its members' local costs.
    pub fn coalition_cost(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_profile(x)?;
        let c = &self.coalitions[i];
        let mut total = 0.0;
        for p in &c.players {
            total += self.evaluate(p.id, x)?;
        }
        Ok(total / c.size() as f64)
    }

    /// Analytic subgradient of `f^i_j` with respect to coalition `i`'s block.
    pub fn subgradient(&self, id: PlayerId, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.player(id);
        let g = p.subgradient.as_ref().ok_or(Error::NoAnalyticGradient {
            coalition: id.coalition,
            player: id.player,
        })?;
        let v = g.eval(x);
        let n_i = self.coalition_size(id.coalition);
        if v.len() != n_i {
            return Err(Error::DimensionMismatch(format!(
                "subgradient of {id} has {} entries, coalition has {n_i}",
                v.len()
            )));
        }
        Ok(v)
    }

    pub fn has_subgradients(&self) -> bool {
        self.players().all(|p| p.subgradient.is_some())
    }
}
