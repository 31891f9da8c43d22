//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use handover_core::cloud::ObjectCloud;
use handover_core::geometry::{matching_transform, transform_pose, RigidTransform, RotationMatrix, Vec3};
use handover_core::grasp::{
    clearance_check, select_grasp, CandidateSource, CosineMode, GraspCandidate, GripperGeometry,
    SelectionConfig, Sphere,
};
use handover_core::hand_model::{
    lbs_forward, synthetic_hand_model, HandPose, Handedness, PosedHand, SkinningRig,
};
use handover_core::intent::{
    average_accuracy, canonical_wrist_poses, parse_task_description, GripType, TaskDescription, ToolCatalog,
    WristBounds,
};
use handover_core::io::load_ply;
use handover_core::pipeline::{
    imagine_configuration, imagined_frame, match_to_observation, validate_configuration, AntipodalProvider,
    CannedPoseLibrary, FileGraspProvider, HandModels, HardwareLimits, ImagineConfig,
};
use nalgebra::{Matrix3, Vector4};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn frame_matching() -> Outcome {
    let mut r = rng(1);
    let start = Instant::now();
    let (mut worst_o, mut worst_dot, mut worst_ang) = (0.0f64, 1.0f64, 0.0f64);
    for _ in 0..1000 {
        let imagined = random_frame(&mut r);
        let real = random_frame(&mut r);
        let h = matching_transform(&imagined, &real);
        let ri = oracle_frame_axes(&imagined.direction(), &imagined.normal());
        let rr = oracle_frame_axes(&real.direction(), &real.normal());
        let moved = h.rotation.matrix() * ri;
        worst_o = worst_o.max((h.apply_point(&imagined.centre()) - real.centre()).norm());
        worst_dot = worst_dot.min(moved.column(0).dot(&rr.column(0)));
        worst_ang = worst_ang.max(moved.column(2).dot(&rr.column(2)).clamp(-1.0, 1.0).acos());
    }
    let elapsed = start.elapsed();
    ensure(worst_o <= 1e-9, || format!("origin error {worst_o:e}"))?;
    ensure(worst_dot >= 1.0 - 1e-9, || format!("direction dot {worst_dot}"))?;
    ensure(worst_ang <= 1e-6, || format!("normal angle {worst_ang:e}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "origin {worst_o:.1e} m, 1-dot {:.1e}, angle {worst_ang:.1e} rad, {elapsed:.0?}",
        1.0 - worst_dot
    ))
}

fn quaternion_consistency() -> Outcome {
    let mut r = rng(2);
    let (mut worst_r, mut worst_p) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p0 = random_vec(&mut r, 1.0);
        let q0 = random_quaternion(&mut r);
        let h = random_transform(&mut r, 1.0);
        let (p, q) = transform_pose(&p0, &q0, &h);
        worst_r =
            worst_r.max((oracle_quat_matrix(&q) - h.rotation.matrix() * oracle_quat_matrix(&q0)).norm());
        let hp = homogeneous(h.rotation.matrix(), &h.translation) * Vector4::new(p0.x, p0.y, p0.z, 1.0);
        worst_p = worst_p.max((p - hp.xyz()).norm());
    }
    ensure(worst_r <= 1e-9, || format!("rotation error {worst_r:e}"))?;
    ensure(worst_p <= 1e-9, || format!("position error {worst_p:e}"))?;
    Ok(format!("rotation {worst_r:.1e}, position {worst_p:.1e} m"))
}

fn relative_pose_preservation() -> Outcome {
    let models = Arc::new(HandModels::synthetic());
    let library = CannedPoseLibrary::load(&fixture("poses.json")).map_err(|e| e.to_string())?;
    let cloud = load_ply(&fixture("cylinder.ply")).map_err(|e| e.to_string())?;
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for hand in [Handedness::Right, Handedness::Left] {
        let base = imagine_configuration(
            &TaskDescription::new("bottle", hand),
            &cloud,
            &library,
            &AntipodalProvider::default(),
            &models,
            &ImagineConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        for _ in 0..500 {
            let mut config = base.clone();
            let g = random_transform(&mut r, 0.5);
            config.hand = config.hand.transformed(&g);
            config.imagined_frame = imagined_frame(&config.hand).map_err(|e| e.to_string())?;
            config.grasp.pose = random_transform(&mut r, 0.3);
            let world = random_transform(&mut r, 2.0);
            let observed: Vec<Vec3> = config.hand.joints.iter().map(|j| world.apply_point(j)).collect();
            let target = match_to_observation(&config, &observed).map_err(|e| e.to_string())?;
            let right = hand == Handedness::Right;
            let (ci, ri) = oracle_keypoint_frame(&config.hand.joints, right);
            let (cr, rr) = oracle_keypoint_frame(&observed, right);
            let before = homogeneous(&ri, &ci).try_inverse().unwrap() * config.grasp.pose.to_homogeneous();
            let after = homogeneous(&rr, &cr).try_inverse().unwrap() * target.pose().to_homogeneous();
            worst = worst.max((before - after).norm());
        }
    }
    ensure(worst <= 1e-9, || format!("relative pose error {worst:e}"))?;
    Ok(format!("1000 configurations, worst {worst:.1e}"))
}

fn tiny_rig() -> (SkinningRig, Vec<RotationMatrix>) {
    // joint 1 at (1, 0, 0) turned 90° about z: A_1 x = Rz(x − j1) + j1, A_0 = I
    //   (0.5,0,0) w=(1,0)     -> (0.5, 0, 0)
    //   (1.5,0,0) w=(0,1)     -> (1, 0.5, 0)
    //   (1.5,0,0) w=(0.5,0.5) -> (1.25, 0.25, 0)
    //   (2,1,0)   w=(0,1)     -> (0, 1, 0)
    let rig = SkinningRig {
        rest_vertices: vec![
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(1.5, 0.0, 0.0),
            Vec3::new(1.5, 0.0, 0.0),
            Vec3::new(2.0, 1.0, 0.0),
        ],
        weights: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5], vec![0.0, 1.0]],
        rest_joints: vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)],
        parents: vec![None, Some(0)],
    };
    let quarter = RotationMatrix::from_rot6d(&[0.0, 1.0, 0.0, -1.0, 0.0, 0.0]).expect("exact 90° block");
    (rig, vec![RotationMatrix::identity(), quarter])
}

fn lbs() -> Outcome {
    let model = synthetic_hand_model();
    let posed = lbs_forward(&model, &HandPose::identity(Handedness::Right)).map_err(|e| e.to_string())?;
    let id_err = posed.vertices.iter().zip(&model.template).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    ensure(id_err <= 1e-12, || format!("identity error {id_err:e}"))?;

    let mut r = rng(4);
    let j0 = model.rig(&[0.0; 10]).1[0];
    let mut eq_err = 0.0f64;
    for _ in 0..100 {
        let g = random_transform(&mut r, 0.5);
        let mut pose = HandPose::identity(Handedness::Right);
        for k in 1..16 {
            let a = random_unit(&mut r);
            pose.pose[k] = RotationMatrix::from_axis_angle(&a, r.random_range(-0.5..0.5)).unwrap().to_rot6d();
        }
        let base = lbs_forward(&model, &pose).map_err(|e| e.to_string())?;
        let moved = pose.clone().with_root(&g.rotation, g.rotation.apply(&j0) + g.translation - j0);
        let out = lbs_forward(&model, &moved).map_err(|e| e.to_string())?;
        for (a, b) in out.vertices.iter().zip(&base.vertices) {
            eq_err = eq_err.max((a - g.apply_point(b)).norm());
        }
    }
    ensure(eq_err <= 1e-9, || format!("equivariance error {eq_err:e}"))?;

    let (rig, local) = tiny_rig();
    let (verts, _) = rig.skin(&local, &Vec3::zeros()).map_err(|e| e.to_string())?;
    let expected = [
        Vec3::new(0.5, 0.0, 0.0),
        Vec3::new(1.0, 0.5, 0.0),
        Vec3::new(1.25, 0.25, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
    ];
    let rig_err = verts.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    ensure(verts[..] == expected[..], || format!("tiny rig mismatch: {verts:?}"))?;
    Ok(format!("identity {id_err:.1e}, equivariance {eq_err:.1e} (100 roots), tiny rig {rig_err:.1e}"))
}

fn rot6d() -> Outcome {
    let mut r = rng(5);
    let mut rt = 0.0f64;
    for _ in 0..1000 {
        let m = random_rotation(&mut r);
        let back = RotationMatrix::from_rot6d(&m.to_rot6d()).map_err(|e| e.to_string())?;
        rt = rt.max((back.matrix() - m.matrix()).norm());
    }
    let mut ortho = 0.0f64;
    let mut done = 0;
    while done < 1000 {
        let a: [f64; 6] = std::array::from_fn(|_| r.random_range(-5.0..5.0));
        let Ok(m) = RotationMatrix::from_rot6d(&a) else { continue };
        let m = m.matrix();
        ortho =
            ortho.max((m.transpose() * m - Matrix3::identity()).norm()).max((m.determinant() - 1.0).abs());
        done += 1;
    }
    ensure(rt <= 1e-12, || format!("round trip {rt:e}"))?;
    ensure(ortho <= 1e-12, || format!("orthonormality {ortho:e}"))?;
    Ok(format!("round trip {rt:.1e}, orthonormality {ortho:.1e}"))
}

fn oracle_argmin(c: &[GraspCandidate], hand: &PosedHand, cfg: &SelectionConfig) -> usize {
    let d = hand.joints[12] - hand.joints[0];
    let v_h = d / d.norm();
    let p_h = hand.vertices.iter().fold(Vec3::zeros(), |a, v| a + v) / hand.vertices.len() as f64;
    let mut best = (f64::INFINITY, 0);
    for (i, g) in c.iter().enumerate() {
        let m = g.pose.to_homogeneous();
        let v_g = Vec3::new(m[(0, 2)], m[(1, 2)], m[(2, 2)]);
        let mut cos = v_g.dot(&v_h);
        if cfg.cosine_mode == CosineMode::Absolute {
            cos = cos.abs();
        }
        let s = cos - cfg.lambda * (Vec3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]) - p_h).norm();
        if s < best.0 {
            best = (s, i);
        }
    }
    best.1
}

fn grasp_selection() -> Outcome {
    let mut r = rng(6);
    for trial in 0..1000 {
        let hand = PosedHand {
            handedness: Handedness::Right,
            joints: (0..21).map(|_| random_vec(&mut r, 0.1)).collect(),
            vertices: (0..40).map(|_| random_vec(&mut r, 0.1)).collect(),
        };
        let n = r.random_range(1..=64);
        let cands: Vec<GraspCandidate> = (0..n)
            .map(|_| {
                GraspCandidate::new(random_transform(&mut r, 0.3), 0.05, CandidateSource::External).unwrap()
            })
            .collect();
        let cfg = SelectionConfig {
            lambda: r.random_range(0.0..3.0),
            cosine_mode: if trial % 2 == 0 { CosineMode::Signed } else { CosineMode::Absolute },
            ..Default::default()
        };
        let got = select_grasp(&cands, &hand, &cfg).map_err(|e| e.to_string())?.index;
        let want = oracle_argmin(&cands, &hand, &cfg);
        ensure(got == want, || format!("trial {trial}: selected {got}, oracle {want}"))?;
    }

    let joints: Vec<Vec3> = (0..21).map(|i| if i == 12 { Vec3::x() * 0.1 } else { Vec3::zeros() }).collect();
    let hand = PosedHand { handedness: Handedness::Right, vertices: vec![Vec3::zeros()], joints };
    let at = |deg: f64, p: Vec3| {
        let rot = RotationMatrix::rot_z(deg.to_radians())
            .compose(&RotationMatrix::rot_y(std::f64::consts::FRAC_PI_2));
        GraspCandidate::new(RigidTransform::new(rot, p), 0.05, CandidateSource::External).unwrap()
    };
    let cands = [at(90.0, Vec3::new(0.0, 0.0, 0.1)), at(170.0, Vec3::new(0.0, 0.1, 0.0))];
    let signed = select_grasp(&cands, &hand, &SelectionConfig::default()).unwrap().index;
    let literal_cfg = SelectionConfig { cosine_mode: CosineMode::Absolute, ..Default::default() };
    let literal = select_grasp(&cands, &hand, &literal_cfg).unwrap().index;
    ensure(signed == 1 && literal == 0, || format!("signed picked {signed}, absolute picked {literal}"))?;
    Ok("1000 sets match the exhaustive oracle; 170° (signed) vs 90° (absolute)".into())
}

fn grammar_round_trip() -> Outcome {
    let catalog = ToolCatalog::fixture();
    let mut ok = 0;
    let mut total = 0;
    for name in catalog.names() {
        for hand in [Handedness::Left, Handedness::Right] {
            total += 1;
            let t = TaskDescription::new(name, hand);
            if parse_task_description(&t.render(), &catalog).ok() == Some(t) {
                ok += 1;
            }
        }
    }
    ensure(ok == 32 && total == 32, || format!("{ok}/{total}"))?;
    Ok(format!("{ok}/{total}"))
}

fn accuracy_aggregation() -> Outcome {
    let avg = average_accuracy(&[50.11, 40.51, 42.09]);
    ensure((avg - 44.24).abs() <= 0.005, || format!("average {avg}"))?;
    Ok(format!("average {avg:.4}%"))
}

fn hardware_constraints() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("grasps.json");
    let m = RigidTransform::identity().to_row_major();
    let record = serde_json::json!([{ "matrix": m, "width_m": 0.08, "source": "file" }]);
    std::fs::write(&path, record.to_string()).map_err(|e| e.to_string())?;
    ensure(FileGraspProvider::load(&path).is_err(), || "0.08 m candidate accepted at load".into())?;
    ensure(GraspCandidate::new(RigidTransform::identity(), 0.08, CandidateSource::File).is_err(), || {
        "0.08 m candidate constructed".into()
    })?;

    let models = Arc::new(HandModels::synthetic());
    let library = CannedPoseLibrary::load(&fixture("poses.json")).map_err(|e| e.to_string())?;
    let cloud = load_ply(&fixture("cylinder.ply")).map_err(|e| e.to_string())?;
    let mut config = imagine_configuration(
        &TaskDescription::new("bottle", Handedness::Right),
        &cloud,
        &library,
        &AntipodalProvider::default(),
        &models,
        &ImagineConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    config.grasp.width = 0.08;
    let report = validate_configuration(&config, &HardwareLimits::default());
    ensure(!report.check("width").unwrap().passed, || "width 0.08 m passed validation".into())?;

    let geom = GripperGeometry::new(vec![Sphere { centre: Vec3::zeros(), radius: 0.01 }]).unwrap();
    let overlap = GraspCandidate::new(
        RigidTransform::from_translation(Vec3::new(0.004, 0.0, 0.0)),
        0.05,
        CandidateSource::External,
    )
    .unwrap();
    let c = clearance_check(&overlap, &geom, &[Vec3::zeros()], 0.005);
    ensure(!c.passed && c.min_distance < 0.0, || format!("overlap not flagged: {c:?}"))?;
    Ok(format!("0.08 m rejected at load and validation; overlap distance {:.4} m", c.min_distance))
}

fn end_to_end() -> Outcome {
    let models = Arc::new(HandModels::synthetic());
    let library = CannedPoseLibrary::load(&fixture("poses.json")).map_err(|e| e.to_string())?;
    let clouds: Vec<(ObjectCloud, &str)> = vec![
        (load_ply(&fixture("cylinder.ply")).map_err(|e| e.to_string())?, "bottle"),
        (load_ply(&fixture("box.ply")).map_err(|e| e.to_string())?, "stapler"),
    ];
    let mut slowest = Duration::ZERO;
    for (cloud, object) in &clouds {
        for hand in [Handedness::Right, Handedness::Left] {
            let mut outputs = Vec::new();
            for _ in 0..2 {
                let start = Instant::now();
                let config = imagine_configuration(
                    &TaskDescription::new(*object, hand),
                    cloud,
                    &library,
                    &AntipodalProvider::default(),
                    &models,
                    &ImagineConfig::default(),
                )
                .map_err(|e| format!("{object}/{hand}: {e}"))?;
                let json = serde_json::to_string_pretty(&config).map_err(|e| e.to_string())?;
                let elapsed = start.elapsed();
                slowest = slowest.max(elapsed);
                ensure(elapsed < Duration::from_secs(1), || format!("{object}/{hand} took {elapsed:?}"))?;
                let report = validate_configuration(&config, &HardwareLimits::default());
                ensure(report.passed, || format!("{object}/{hand}: {:?}", report.failures()))?;
                outputs.push(json);
            }
            ensure(outputs[0] == outputs[1], || format!("{object}/{hand}: outputs differ"))?;
        }
    }
    Ok(format!("cylinder and box, both hands, byte-identical reruns, slowest {slowest:.0?}"))
}

fn wrist_sampler() -> Outcome {
    let b = WristBounds::default();
    let published = [b.pronation, b.supination, b.flexion, b.extension, b.radial, b.ulnar];
    ensure(published == [76.0, 85.0, 75.0, 75.0, 20.0, 45.0], || format!("bounds {published:?}"))?;
    for hand in [Handedness::Left, Handedness::Right] {
        for grip in [GripType::Open, GripType::PreciseGrip, GripType::PowerGrip] {
            let poses = canonical_wrist_poses(grip, hand, &b);
            ensure(poses.len() == 9, || format!("{} poses", poses.len()))?;
            ensure(poses.iter().all(|p| b.contains(&p.angles) && !p.clipped), || {
                "pose out of bounds".into()
            })?;
        }
    }
    Ok("9 poses per hand and grip, all within 76/85, 75/75, 20/45 degrees".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("frame matching exactness", frame_matching),
        ("quaternion/matrix consistency", quaternion_consistency),
        ("relative-pose preservation", relative_pose_preservation),
        ("linear blend skinning", lbs),
        ("6D rotation", rot6d),
        ("grasp selection", grasp_selection),
        ("intent grammar round trip", grammar_round_trip),
        ("accuracy aggregation", accuracy_aggregation),
        ("hardware constraints", hardware_constraints),
        ("end-to-end desk run", end_to_end),
        ("wrist sampler", wrist_sampler),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
