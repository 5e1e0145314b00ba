//! Runtime mode dispatcher.
//!
//! The engine runs each iteration in one of two modes and re-decides at
//! every iteration barrier from counters of the iteration that just ended:
//!
//! * **LowParallel** — vertex-centric push over the active list; right when
//!   frontiers are small.
//! * **HighParallel** — edge-centric pull over active blocks through the
//!   class pipelines; right when activity is wide or a hub vertex just
//!   activated (its huge out-neighborhood makes the next frontier wide).
//!
//! Switching up (low to high) happens when a newly activated vertex's
//! out-degree reaches the hub threshold, or when the active/inactive vertex
//! ratio `Na/Ni` passes alpha (`Ni = 0` counts as passing). Switching down
//! needs two conditions over block counters: the active small+middle block
//! ratio `Na/Nb` against beta (condition C2) and the fraction `Fl/Nl` of
//! large blocks whose last processing changed nothing against gamma
//! (condition C3, vacuously true without large blocks). C2 and C3 together
//! switch immediately; C2 alone schedules the switch for one iteration
//! later — the flags usually need one more round to catch up — and the
//! scheduled switch then happens unconditionally.
//!
//! Decisions always take effect at the next barrier: the iteration in
//! flight completes in its mode, so every iteration runs whole in exactly
//! one mode. `literal_inequalities` flips the direction of the alpha and
//! beta comparisons, for comparing both readings of the switch rules.

use serde::Serialize;

use crate::frontier::Bitmap;
use crate::gas::InitialFrontier;
use crate::graph_io::CsrGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    LowParallel,
    HighParallel,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::LowParallel => "low",
            Mode::HighParallel => "high",
        }
    }
}

/// What the low-switch test concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchDecision {
    Stay,
    SwitchNow,
    /// C2 held but C3 did not: run one more HighParallel iteration, then
    /// switch regardless.
    SwitchNextIteration,
}

/// Why a mode switch fired (recorded in run reports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSwitchReason {
    HubActivation,
    ActiveRatio,
    BlockAndFlagRatios,
    DeferredFlagRatio,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DispatcherParams {
    /// Active/inactive vertex ratio bound for switching up.
    pub alpha: f64,
    /// Active small+middle block ratio bound for switching down (C2).
    pub beta: f64,
    /// Idle-flag fraction over large blocks for switching down (C3).
    pub gamma: f64,
    /// Out-degree from which a vertex counts as a hub.
    pub hub_degree_threshold: u32,
    /// Flip the alpha/beta comparison directions.
    pub literal_inequalities: bool,
}

impl Default for DispatcherParams {
    fn default() -> Self {
        DispatcherParams {
            alpha: 0.05,
            beta: 0.05,
            gamma: 0.9,
            hub_degree_threshold: 2048,
            literal_inequalities: false,
        }
    }
}

/// Barrier counters of the iteration that just ended.
#[derive(Debug, Clone, Copy, Default)]
pub struct IterationCounters {
    pub active_vertices: u64,
    pub vertex_count: u64,
    /// Small+middle blocks holding edges from changed sources.
    pub active_small_middle_blocks: u64,
    pub total_small_middle_blocks: u64,
    /// Large blocks whose inactive flag is currently set.
    pub large_inactive_flags: u64,
    pub total_large_blocks: u64,
    /// Did a hub vertex activate this iteration?
    pub hub_activated: bool,
}

/// Ratio snapshot for reports; `None` marks an undefined (0-denominator)
/// ratio, which the switch rules treat as passing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RatioSnapshot {
    /// `Na / Ni` over vertices.
    pub active: Option<f64>,
    /// `Na / Nb` over small+middle blocks.
    pub block: Option<f64>,
    /// `Fl / Nl` over large blocks.
    pub flag: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DispatcherState {
    pub mode: Mode,
    pub params: DispatcherParams,
    /// Active count: vertices in LowParallel, small+middle blocks in
    /// HighParallel (what each mode's switch rule compares).
    pub na: u64,
    /// Inactive vertices (`vertex_count - active_vertices`).
    pub ni: u64,
    /// Total small+middle blocks.
    pub nb: u64,
    /// Total large blocks.
    pub nl: u64,
    /// Large blocks flagged idle.
    pub fl: u64,
    pub hub_activated: bool,
    pub pending_switch_to_low: bool,
}

impl DispatcherState {
    pub fn new(params: DispatcherParams, initial_mode: Mode) -> Self {
        DispatcherState {
            mode: initial_mode,
            params,
            na: 0,
            ni: 0,
            nb: 0,
            nl: 0,
            fl: 0,
            hub_activated: false,
            pending_switch_to_low: false,
        }
    }

    /// Mode the first iteration runs in: wide initial frontiers start high,
    /// single sources start low.
    pub fn initial_mode(frontier: InitialFrontier) -> Mode {
        match frontier {
            InitialFrontier::AllVertices => Mode::HighParallel,
            InitialFrontier::SingleSource(_) => Mode::LowParallel,
        }
    }

    /// Fold one iteration's barrier counters into the state.
    pub fn record_iteration(&mut self, c: &IterationCounters) {
        self.na = match self.mode {
            Mode::LowParallel => c.active_vertices,
            Mode::HighParallel => c.active_small_middle_blocks,
        };
        self.ni = c.vertex_count.saturating_sub(c.active_vertices);
        self.nb = c.total_small_middle_blocks;
        self.nl = c.total_large_blocks;
        self.fl = c.large_inactive_flags;
        self.hub_activated = c.hub_activated;
    }

    /// Up-switch test (consulted in LowParallel): hub activation always
    /// trips it; otherwise the Na/Ni ratio against alpha, with Ni = 0
    /// counting as beyond any bound.
    pub fn should_switch_to_high(&self, hub_activated: bool) -> bool {
        vertex_activity_high(&self.params, self.na, self.ni, hub_activated)
    }

    /// Down-switch test (consulted in HighParallel): C2 over block counts,
    /// C3 over large-block idle flags.
    pub fn should_switch_to_low(&self) -> SwitchDecision {
        let c2 = if self.nb == 0 {
            true
        } else {
            let ratio = self.na as f64 / self.nb as f64;
            if self.params.literal_inequalities {
                ratio > self.params.beta
            } else {
                ratio < self.params.beta
            }
        };
        let c3 = if self.nl == 0 {
            true
        } else {
            (self.fl as f64 / self.nl as f64) > self.params.gamma
        };
        match (c2, c3) {
            (true, true) => SwitchDecision::SwitchNow,
            (true, false) => SwitchDecision::SwitchNextIteration,
            _ => SwitchDecision::Stay,
        }
    }

    /// Fold counters and advance the mode for the next iteration. Returns
    /// the reason when a switch fired.
    pub fn barrier_transition(&mut self, c: &IterationCounters) -> Option<ModeSwitchReason> {
        self.record_iteration(c);
        match self.mode {
            Mode::LowParallel => {
                if self.should_switch_to_high(c.hub_activated) {
                    self.mode = Mode::HighParallel;
                    Some(if c.hub_activated {
                        ModeSwitchReason::HubActivation
                    } else {
                        ModeSwitchReason::ActiveRatio
                    })
                } else {
                    None
                }
            }
            Mode::HighParallel => {
                if self.pending_switch_to_low {
                    self.pending_switch_to_low = false;
                    self.mode = Mode::LowParallel;
                    return Some(ModeSwitchReason::DeferredFlagRatio);
                }
                match self.should_switch_to_low() {
                    SwitchDecision::SwitchNow => {
                        self.mode = Mode::LowParallel;
                        Some(ModeSwitchReason::BlockAndFlagRatios)
                    }
                    SwitchDecision::SwitchNextIteration => {
                        self.pending_switch_to_low = true;
                        None
                    }
                    SwitchDecision::Stay => None,
                }
            }
        }
    }

    pub fn ratios(&self) -> RatioSnapshot {
        RatioSnapshot {
            active: (self.ni > 0).then(|| self.na as f64 / self.ni as f64),
            block: (self.nb > 0).then(|| self.na as f64 / self.nb as f64),
            flag: (self.nl > 0).then(|| self.fl as f64 / self.nl as f64),
        }
    }
}

/// Did any vertex that changed this iteration have hub-scale out-degree?
pub fn hub_activated(csr: &CsrGraph, changed: &Bitmap, threshold: u32) -> bool {
    changed.iter_ones().any(|v| csr.out_degree(v) >= threshold)
}

/// The vertex-activity test shared by the dispatcher's up-switch and the
/// hybrid strategies' dense/sparse choice: hub activation always counts as
/// high activity, an empty inactive set counts as beyond any bound, and
/// otherwise Na/Ni is compared against alpha.
pub fn vertex_activity_high(
    params: &DispatcherParams,
    na: u64,
    ni: u64,
    hub_activated: bool,
) -> bool {
    if hub_activated {
        return true;
    }
    if ni == 0 {
        return true;
    }
    let ratio = na as f64 / ni as f64;
    if params.literal_inequalities {
        ratio < params.alpha
    } else {
        ratio > params.alpha
    }
}

/// Report-friendly ratio snapshot taken straight from barrier counters,
/// independent of the mode the dispatcher happens to be in.
pub fn counters_snapshot(c: &IterationCounters) -> RatioSnapshot {
    let ni = c.vertex_count.saturating_sub(c.active_vertices);
    RatioSnapshot {
        active: (ni > 0).then(|| c.active_vertices as f64 / ni as f64),
        block: (c.total_small_middle_blocks > 0)
            .then(|| c.active_small_middle_blocks as f64 / c.total_small_middle_blocks as f64),
        flag: (c.total_large_blocks > 0)
            .then(|| c.large_inactive_flags as f64 / c.total_large_blocks as f64),
    }
}
