use crate::cot::Attachment;
use crate::world::{Box3, ObjectCategory, SceneTruth};

pub const BEV_SIZE_PX: usize = 128;
pub const BEV_M_PER_PX: f64 = 0.5;

/// Bird's-eye raster of the scene as a binary PGM, ego at the bottom center
/// facing up. Route samples are mid-gray; objects are filled by category.
pub fn render_bev(scene: &SceneTruth) -> Attachment {
    let n = BEV_SIZE_PX;
    let mut px = vec![0u8; n * n];
    let to_px = |x: f64, y: f64| -> Option<(usize, usize)> {
        let col = (n as f64 / 2.0 - y / BEV_M_PER_PX).floor();
        let row = (n as f64 - 1.0 - x / BEV_M_PER_PX).floor();
        (col >= 0.0 && row >= 0.0 && col < n as f64 && row < n as f64).then(|| (row as usize, col as usize))
    };
    for p in &scene.route_ahead {
        if let Some((r, c)) = to_px(p.x, p.y) {
            px[r * n + c] = 96;
        }
    }
    let mut fill = |b: &Box3, value: u8| {
        let steps = |extent: f64| (extent / BEV_M_PER_PX).ceil().max(1.0) as usize * 2;
        let (sx, sy) = (steps(b.length), steps(b.width));
        for i in 0..=sx {
            for j in 0..=sy {
                let x = b.center_x - b.length / 2.0 + b.length * i as f64 / sx as f64;
                let y = b.center_y - b.width / 2.0 + b.width * j as f64 / sy as f64;
                if let Some((r, c)) = to_px(x, y) {
                    px[r * n + c] = value;
                }
            }
        }
    };
    fill(&Box3::ego(), 255);
    for o in &scene.objects {
        let v = match o.category {
            ObjectCategory::Vehicle => 200,
            ObjectCategory::Pedestrian => 160,
            ObjectCategory::Cyclist => 140,
            ObjectCategory::Static => 120,
        };
        fill(&o.bbox, v);
    }
    let mut bytes = format!("P5\n{n} {n}\n255\n").into_bytes();
    bytes.extend_from_slice(&px);
    Attachment { name: "bev.pgm".into(), media_type: "image/x-portable-graymap".into(), bytes }
}
