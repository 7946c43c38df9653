use super::oracle::{build_decision, perceive_light, perceive_lane, perceive_objects, perceive_signs};
use super::{canonical, oracle_plan, select_template, DecisionFeatures, Hysteresis, Policy};
use crate::cot::{
    Decision, LaneReport, LightReport, ObjectReport, SignReport, Stage, StageContext, StageError, StageReports, Staged,
    WaypointPlan,
};
use crate::world::{NavKind, SceneTruth};

/// Decision without per-object attention. Object boxes still feed the lead
/// vehicle gap, but no pedestrian or cutting-in vehicle is ever singled out,
/// so the rule table only sees lights, lead gaps and navigation.
pub fn ablation_decide(reports: &StageReports, ego_speed: f64, nav: NavKind, hysteresis: &mut Hysteresis) -> Decision {
    let mut unattended = reports.clone();
    for o in &mut unattended.objects.objects {
        o.attend = false;
        o.reason.clear();
    }
    let features = DecisionFeatures::extract(&unattended, ego_speed, nav);
    let (id, held) = hysteresis.apply(select_template(&features), ego_speed);
    build_decision(id, held, &features, &unattended)
}

/// Same perception and planner as the oracle with the attention step removed.
#[derive(Debug, Clone, Default)]
pub struct AblationPolicy {
    hysteresis: Hysteresis,
}

impl AblationPolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

fn scene<'a>(ctx: &'a StageContext<'_>, stage: Stage) -> Result<&'a SceneTruth, StageError> {
    ctx.obs.scene().ok_or_else(|| StageError {
        stage,
        message: "ground-truth policy needs scene input".into(),
        raw: String::new(),
    })
}

impl Policy for AblationPolicy {
    fn name(&self) -> &str {
        "ablation"
    }

    fn objects(&mut self, ctx: &StageContext<'_>) -> Result<Staged<ObjectReport>, StageError> {
        Ok(canonical(perceive_objects(scene(ctx, Stage::Objects)?, false)))
    }

    fn light(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LightReport>, StageError> {
        Ok(canonical(perceive_light(scene(ctx, Stage::Light)?)))
    }

    fn signs(&mut self, ctx: &StageContext<'_>) -> Result<Staged<SignReport>, StageError> {
        Ok(canonical(perceive_signs(scene(ctx, Stage::Signs)?)))
    }

    fn lane(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LaneReport>, StageError> {
        Ok(canonical(perceive_lane(scene(ctx, Stage::Lane)?)))
    }

    fn decide(&mut self, ctx: &StageContext<'_>) -> Result<Staged<Decision>, StageError> {
        let reports = ctx.prior.complete();
        Ok(canonical(ablation_decide(&reports, ctx.obs.ego_speed, ctx.obs.nav_command.kind, &mut self.hysteresis)))
    }

    fn plan(&mut self, ctx: &StageContext<'_>) -> Result<Staged<WaypointPlan>, StageError> {
        let reports = ctx.prior.complete();
        let decision = ctx.prior.decision.as_ref().expect("decision precedes planning");
        Ok(canonical(oracle_plan(decision, ctx.obs, &reports)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cot::{DetectedObject, LightReport, Motion, ObjectCategory, SignReport, TemplateId, VisibleLight};
    use crate::world::{Box3, LaneSpecial, LightPhase, LineType};

    fn reports(objects: Vec<DetectedObject>, light: Option<(LightPhase, f64)>) -> StageReports {
        StageReports {
            objects: ObjectReport { objects },
            light: LightReport {
                light: light.map(|(phase, d)| VisibleLight { phase, distance_to_stop_line: d }),
            },
            signs: SignReport::default(),
            lane: LaneReport {
                lane_id: "L1".into(),
                left_line: LineType::Solid,
                right_line: LineType::Solid,
                legal_left: false,
                legal_right: false,
                special: LaneSpecial::None,
            },
        }
    }

    fn pedestrian_12m() -> DetectedObject {
        DetectedObject {
            category: ObjectCategory::Pedestrian,
            bbox: Box3::new([15.9, -1.0, 0.9], [0.5, 0.5, 1.8]),
            motion: Motion::CrossingLeft,
            attend: true,
            reason: "crossing".into(),
        }
    }

    #[test]
    fn crossing_pedestrian_does_not_stop_the_ablation() {
        let r = reports(vec![pedestrian_12m()], None);
        let d = ablation_decide(&r, 8.0, NavKind::Follow, &mut Hysteresis::default());
        assert_eq!(d.template_id, TemplateId::DefaultDriving);
        let with_green = reports(vec![pedestrian_12m()], Some((LightPhase::Green, 30.0)));
        let d = ablation_decide(&with_green, 8.0, NavKind::Follow, &mut Hysteresis::default());
        assert!(!d.template_id.is_stop());
    }

    #[test]
    fn red_light_still_handled() {
        let d = ablation_decide(&reports(vec![], Some((LightPhase::Red, 25.0))), 7.0, NavKind::Follow, &mut Hysteresis::default());
        assert_eq!(d.template_id, TemplateId::RedLightApproach);
    }

    #[test]
    fn empty_road() {
        let d = ablation_decide(&reports(vec![], None), 5.0, NavKind::Follow, &mut Hysteresis::default());
        assert_eq!(d.template_id, TemplateId::DefaultDriving);
    }
}
