//! Concrete policies behind the staged pipeline.
//!
//! * [`OraclePolicy`] reads simulator truth and applies the instruction rule
//!   table.
//! * [`AblationPolicy`] maps observations straight to a decision without the
//!   per-object attention step.
//! * [`RemotePolicy`] forwards every stage to an external model over the
//!   newline-delimited JSON protocol.

mod ablation;
pub mod echo;
mod oracle;
mod remote;

pub use ablation::{ablation_decide, AblationPolicy};
pub use oracle::{
    attention, oracle_decide, oracle_plan, select_template, DecisionFeatures, Hysteresis, OraclePolicy, PlanLimits,
    CRUISE_SPEED, HOLD_CLEAR_TICKS, SAME_LANE_HALF_WIDTH,
};
pub use remote::{Endpoint, RemoteConfig, RemotePolicy, WireRequest, WireResponse, PROTOCOL_VERSION};

use crate::cot::{Decision, LaneReport, LightReport, ObjectReport, SignReport, StageContext, StageError, Staged, WaypointPlan};

/// What a policy wants in [`crate::cot::Observation::input`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Scene,
    Images,
}

/// Stage handlers of a driving policy. Handlers are pure in the observation,
/// earlier reports and history, apart from state a policy declares (the
/// oracle's stop hysteresis, the remote connection).
pub trait Policy: Send {
    fn name(&self) -> &str;

    fn input_kind(&self) -> InputKind {
        InputKind::Scene
    }

    fn objects(&mut self, ctx: &StageContext<'_>) -> Result<Staged<ObjectReport>, StageError>;
    fn light(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LightReport>, StageError>;
    fn signs(&mut self, ctx: &StageContext<'_>) -> Result<Staged<SignReport>, StageError>;
    fn lane(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LaneReport>, StageError>;
    fn decide(&mut self, ctx: &StageContext<'_>) -> Result<Staged<Decision>, StageError>;
    fn plan(&mut self, ctx: &StageContext<'_>) -> Result<Staged<WaypointPlan>, StageError>;
}

pub(crate) fn canonical<T: crate::parse::CanonicalText>(value: T) -> Staged<T> {
    let raw = value.to_text();
    Staged { value, raw }
}
