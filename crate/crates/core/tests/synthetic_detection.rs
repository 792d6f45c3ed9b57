use varroa_core::annotations::mite_mask_of;
use varroa_core::components::{connected_components, regions_to_mask};
use varroa_core::pipeline::{detect_mites, detect_mites_staged, run_batch, PipelineConfig};
use varroa_core::synth::{
    generate_scene, generate_suite, generate_suite_with_dims, BeeSpec, Difficulty, Levels, MiteSpec, SceneSpec,
};
use varroa_core::{evaluate_image, SbmCounts};

fn planted_mite_scene(radius: u32) -> SceneSpec {
    let mut spec = SceneSpec::empty(9, (160, 80));
    spec.noise_amplitude = 4;
    spec.bees.push(BeeSpec {
        center: (80, 40),
        radii: (50, 28),
        levels: Levels {
            white: [190, 150, 60],
            infrared: 210,
            turquoise: 140,
        },
    });
    spec.mites.push(MiteSpec {
        center: (70, 36),
        radius,
        levels: Levels {
            white: [110, 50, 30],
            infrared: 50,
            turquoise: 138,
        },
        host: Some(0),
    });
    spec
}

#[test]
fn planted_mite_matches_oracle_composition() {
    // radius 3 disc = 29 px; opening with a 3x3 square trims the four tips.
    let scene = generate_scene(&planted_mite_scene(3)).unwrap();
    let cfg = PipelineConfig::default();
    let r = detect_mites(&scene.capture, &scene.background, &cfg).unwrap();
    assert_eq!(r.regions.len(), 1);
    assert_eq!(r.regions[0].area(), 25);

    // Per-pixel oracle: composition by hand on the known level differences.
    let (w, h) = scene.spec.dims;
    let tq = scene.capture.turquoise.as_ref().unwrap();
    let tq_bg = scene.background.turquoise.as_ref().unwrap();
    let ir = scene.capture.infrared.as_ref().unwrap();
    let ir_bg = scene.background.infrared.as_ref().unwrap();
    let mut combined = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let d = |a: &varroa_core::RgbImage, b: &varroa_core::RgbImage| {
                (a.get(x, y)[0] as i32 - b.get(x, y)[0] as i32).abs()
            };
            let minuend = if d(tq, tq_bg) > 25 { 255 } else { 0 };
            let sub = (2 * d(ir, ir_bg)).min(255);
            combined[y * w + x] = (minuend - sub).max(0) > 10;
        }
    }
    let stages = detect_mites_staged(&scene.capture, &scene.background, &cfg).unwrap();
    let got: Vec<bool> = stages.combined.data().iter().map(|&v| v > 10).collect();
    assert_eq!(got, combined);
    assert_eq!(combined.iter().filter(|&&b| b).count(), 29);

    let strict = PipelineConfig {
        min_mite_area: 26,
        ..cfg.clone()
    };
    assert!(detect_mites(&scene.capture, &scene.background, &strict)
        .unwrap()
        .regions
        .is_empty());
}

#[test]
fn area_36_mite_and_filter_boundary() {
    // A 6x6 square mite gives exactly 36 px after opening.
    let mut spec = planted_mite_scene(3);
    spec.mites.clear();
    let mut scene = generate_scene(&spec).unwrap();
    let ir = scene.capture.infrared.as_mut().unwrap();
    for y in 30..36 {
        for x in 60..66 {
            ir.put(x, y, [45, 45, 45]);
        }
    }
    let mut cfg = PipelineConfig::default();
    assert_eq!(
        detect_mites(&scene.capture, &scene.background, &cfg)
            .unwrap()
            .regions
            .len(),
        1
    );
    cfg.min_mite_area = 36;
    assert_eq!(
        detect_mites(&scene.capture, &scene.background, &cfg)
            .unwrap()
            .regions
            .len(),
        1
    );
    cfg.min_mite_area = 37;
    assert_eq!(
        detect_mites(&scene.capture, &scene.background, &cfg)
            .unwrap()
            .regions
            .len(),
        0
    );
}

#[test]
fn clean_suite_is_detected_perfectly() {
    let cfg = PipelineConfig::default();
    for scene in generate_suite(8, 1234, Difficulty::Clean).unwrap() {
        let r = detect_mites(&scene.capture, &scene.background, &cfg).unwrap();
        let gt = mite_mask_of(&scene.ground_truth);
        let counts = evaluate_image(&r.mite_mask, &gt, cfg.min_mite_area).unwrap();
        assert_eq!(
            counts,
            SbmCounts::new(scene.spec.mites.len() as u64, 0, 0),
            "seed {}",
            scene.spec.seed
        );
    }
}

#[test]
fn result_invariants_hold_on_every_difficulty() {
    for difficulty in [Difficulty::Clean, Difficulty::Noisy, Difficulty::Crowded] {
        for scene in generate_suite_with_dims(3, 77, difficulty, (400, 150)).unwrap() {
            let cfg = PipelineConfig::default();
            let r = detect_mites(&scene.capture, &scene.background, &cfg).unwrap();
            let (w, h) = r.mite_mask.dims();
            assert_eq!(regions_to_mask(&r.regions, w, h), r.mite_mask);
            assert!(r.regions.iter().all(|reg| reg.area() >= cfg.min_mite_area));
            assert!(r
                .regions
                .iter()
                .all(|reg| reg.pixels.iter().all(|&(x, y)| r.mite_mask.get(x as usize, y as usize))));
            assert_eq!(connected_components(&r.mite_mask).len(), r.regions.len());

            // Determinism.
            assert_eq!(detect_mites(&scene.capture, &scene.background, &cfg).unwrap(), r);

            // Background against itself is empty.
            let empty = detect_mites(&scene.background, &scene.background, &cfg).unwrap();
            assert_eq!(empty.mite_mask.count(), 0);

            // Area filter is monotone.
            let mut last = usize::MAX;
            for min_area in [0, 5, 10, 20, 40, 80] {
                let c = PipelineConfig {
                    min_mite_area: min_area,
                    ..cfg.clone()
                };
                let n = detect_mites(&scene.capture, &scene.background, &c)
                    .unwrap()
                    .regions
                    .len();
                assert!(n <= last);
                last = n;
            }

            // More infrared gain never adds combined foreground.
            let mut prev: Option<Vec<u8>> = None;
            for gain in [0.0, 0.5, 1.0, 2.0, 3.5] {
                let c = PipelineConfig {
                    ir_gain: gain,
                    ..cfg.clone()
                };
                let s = detect_mites_staged(&scene.capture, &scene.background, &c).unwrap();
                if let Some(p) = &prev {
                    assert!(s.combined.data().iter().zip(p).all(|(&now, &before)| now <= before));
                }
                prev = Some(s.combined.data().to_vec());
            }
        }
    }
}

#[test]
fn batch_equals_sequential() {
    let scenes = generate_suite_with_dims(5, 900, Difficulty::Noisy, (300, 120)).unwrap();
    let background = scenes[0].background.clone();
    let captures: Vec<_> = scenes.iter().map(|s| s.capture.clone()).collect();
    let cfg = PipelineConfig::default();
    let batch = run_batch(&captures, &background, &cfg).unwrap();
    let sequential: Vec<_> = captures
        .iter()
        .map(|c| detect_mites(c, &background, &cfg).unwrap())
        .collect();
    assert_eq!(batch, sequential);
    let ids: Vec<_> = batch.iter().map(|r| r.capture_id.as_str()).collect();
    assert_eq!(
        ids,
        [
            "synth_000900",
            "synth_000901",
            "synth_000902",
            "synth_000903",
            "synth_000904"
        ]
    );
}
