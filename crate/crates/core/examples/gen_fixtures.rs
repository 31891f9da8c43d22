//! Regenerates the files under `fixtures/` from the synthetic hand and clouds.
//!
//! Run from the workspace root: `cargo run -p handover-core --example gen_fixtures`.

use handover_core::fixtures::*;
use handover_core::hand_model::*;
use handover_core::intent::TaskDescription;
use handover_core::io::*;
use handover_core::pipeline::*;
use std::path::Path;
use std::sync::Arc;

fn main() {
    let dir = Path::new("crates/core/fixtures");
    let models = Arc::new(HandModels::synthetic());
    for (h, name) in [(Handedness::Right, "right_hand.json"), (Handedness::Left, "left_hand.json")] {
        let k = reference_keypoints(models.get(h));
        let arr: Vec<[f64; 3]> = k.iter().map(|p| [p.x, p.y, p.z]).collect();
        std::fs::write(dir.join(name), serde_json::to_string_pretty(&arr).unwrap() + "\n").unwrap();
    }
    let cyl = cylinder_cloud(0.03, 0.15, 400);
    let bx = box_cloud([0.05, 0.04, 0.12], 6);
    save_ply(&cyl, &dir.join("cylinder.ply"), PlyEncoding::Ascii).unwrap();
    save_ply(&bx, &dir.join("box.ply"), PlyEncoding::BinaryLittleEndian).unwrap();
    let placer = PalmUpPlacement::new(models.clone());
    let mut lib = CannedPoseLibrary::default();
    for (obj, cloud) in [("bottle", &cyl), ("flashlight", &cyl), ("stapler", &bx), ("mug", &cyl)] {
        for h in [Handedness::Left, Handedness::Right] {
            let p = placer.hand_pose(&TaskDescription::new(obj, h), cloud).unwrap();
            lib.insert(obj, &p);
        }
    }
    write_json(&dir.join("poses.json"), &lib).unwrap();
}
