use serde_json::Value;
use xdrive::cot::{
    DetectedObject, LaneReport, LightReport, Motion, ObjectCategory, ObjectReport, SignReport, Stage, StageReports,
    TemplateId, VisibleLight,
};
use xdrive::harness::{run_episode, EpisodeLog, PolicyKind, RunConfig, TerminalCause};
use xdrive::parse::CanonicalText;
use xdrive::metrics::{detection_summary, match_boxes, IOU_THRESHOLD};
use xdrive::policies::{oracle_decide, Hysteresis};
use xdrive::scenario::{load_scenario, parse_scenario, ScenarioError};
use xdrive::world::{Box3, LightPhase, NavKind};

const STAGES: [Stage; 6] = [Stage::Objects, Stage::Light, Stage::Signs, Stage::Lane, Stage::Decision, Stage::Waypoints];

#[test]
fn log_is_complete_and_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { out_dir: Some(dir.path().into()), ..RunConfig::new("junction_turn", PolicyKind::Oracle) };
    let log = run_episode(&cfg).unwrap();
    let path = dir.path().join(EpisodeLog::file_name("junction_turn", "oracle"));
    assert_eq!(EpisodeLog::read(&path).unwrap(), log);

    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), log.ticks.len() + 2);
    assert_eq!(lines[0]["type"], "header");
    assert_eq!(lines.last().unwrap()["type"], "end");
    assert!(lines.iter().all(|l| l["v"] == 1));

    assert_eq!(log.end.ticks as usize, log.ticks.len());
    for (i, tick) in log.ticks.iter().enumerate() {
        assert_eq!(tick.tick as usize, i);
        assert!((tick.t - i as f64 * log.header.dt).abs() < 1e-9);
        assert!(tick.reports.is_some() && tick.decision.is_some() && tick.plan.is_some());
        assert_eq!(tick.obs_digest.len(), 16);
        let stages: Vec<Stage> = tick.trace.stages.iter().map(|s| s.stage).collect();
        assert_eq!(stages, STAGES);
        assert!(tick.trace.stages.windows(2).all(|w| w[0].seq < w[1].seq));
        assert!(tick.trace.history.len() <= 4);
    }
    assert!(log.ticks.iter().any(|t| t.decision.as_ref().unwrap().template_id == TemplateId::JunctionTurn));
}

#[test]
fn oracle_perception_matches_its_own_ground_truth() {
    let log = run_episode(&RunConfig::new("lead_vehicle_lane_change", PolicyKind::Oracle)).unwrap();
    let samples: Vec<_> = log
        .ticks
        .iter()
        .map(|t| {
            let preds: Vec<Box3> = t.reports.as_ref().unwrap().objects.objects.iter().map(|o| o.bbox).collect();
            match_boxes(&preds, &t.gt_objects, IOU_THRESHOLD)
        })
        .collect();
    let s = detection_summary(&samples);
    assert!(s.gt_total > 0);
    assert_eq!((s.precision, s.recall), (1.0, 1.0));
    assert!(log.ticks.iter().all(|t| t.plan == Some(t.gt_plan)));
}

#[test]
fn red_light_outranks_crossing_pedestrian() {
    let pedestrian = DetectedObject {
        category: ObjectCategory::Pedestrian,
        bbox: Box3::new([15.0, 0.5, 0.9], [0.6, 0.6, 1.8]),
        motion: Motion::CrossingLeft,
        attend: true,
        reason: "crossing in front of the ego".into(),
    };
    let reports = StageReports {
        objects: ObjectReport { objects: vec![pedestrian] },
        light: LightReport { light: Some(VisibleLight { phase: LightPhase::Red, distance_to_stop_line: 20.0 }) },
        signs: SignReport::default(),
        lane: LaneReport::from_text("lane L1 left solid right solid legal_left no legal_right no special none").unwrap(),
    };
    let d = oracle_decide(&reports, 6.0, NavKind::Follow, &mut Hysteresis::default());
    assert_eq!(d.template_id, TemplateId::RedLightApproach);
    let green = StageReports {
        light: LightReport { light: Some(VisibleLight { phase: LightPhase::Green, distance_to_stop_line: 20.0 }) },
        ..reports
    };
    let d = oracle_decide(&green, 6.0, NavKind::Follow, &mut Hysteresis::default());
    assert_eq!(d.template_id, TemplateId::PedestrianCrossing);
}

#[test]
fn ticks_max_ends_with_timeout() {
    let cfg = RunConfig { ticks_max: Some(12), ..RunConfig::new("default_driving", PolicyKind::NoCot) };
    let log = run_episode(&cfg).unwrap();
    assert_eq!(log.end.terminal, TerminalCause::Timeout);
    assert_eq!(log.ticks.len(), 12);
    assert!(!log.end.result.success);
}

#[test]
fn scenario_errors_carry_positions_and_names() {
    match parse_scenario("[meta]\nname=x\n[lanes]\nL1 width=3.5 left=solid right=solid pts=0,0;10,0 colour=red\n") {
        Err(ScenarioError::Syntax { line, message, .. }) => {
            assert_eq!(line, 4);
            assert!(message.contains("colour"), "{message}");
        }
        other => panic!("expected a syntax error, got {other:?}"),
    }
    let err = parse_scenario("[meta]\nname=x\n[lanes]\nL1 width=3.5 left=solid right=solid pts=0,0;10,0\n[route]\nlanes=L1,L7\n").unwrap_err();
    assert_eq!(err.to_string(), "unknown lane id L7");
    assert!(matches!(load_scenario("definitely_missing"), Err(ScenarioError::NotFound(_))));
}

#[test]
fn scenario_file_on_disk_loads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.scn");
    std::fs::write(&path, "[meta]\nname=short\n[lanes]\nL1 width=3.5 left=solid right=solid pts=0,0;60,0\n[route]\nlanes=L1\n").unwrap();
    let spec = load_scenario(path.to_str().unwrap()).unwrap();
    assert_eq!(spec.name, "short");
    let log = run_episode(&RunConfig::new(path.to_str().unwrap(), PolicyKind::Oracle)).unwrap();
    assert_eq!(log.end.terminal, TerminalCause::Destination);
}
