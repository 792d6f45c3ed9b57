use std::fs;
use std::path::Path;

use varroa_core::annotations::{load_dataset, Category, IssueLevel, Treatment};
use varroa_core::pipeline::{detect_mites, PipelineConfig};
use varroa_core::synth::{export_scenes, generate_suite_with_dims, Difficulty};

fn touch(dir: &Path, files: &[&str]) {
    fs::create_dir_all(dir).unwrap();
    for f in files {
        fs::write(dir.join(f), b"").unwrap();
    }
}

#[test]
fn empty_directory_gives_empty_index() {
    let dir = tempfile::tempdir().unwrap();
    let index = load_dataset(dir.path()).unwrap();
    assert!(index.entries.is_empty());
    assert!(index.counts().values().all(|&n| n == 0));
}

#[test]
fn missing_root_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_dataset(dir.path().join("nope")).is_err());
}

#[test]
fn category_counts_mirror_the_collected_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let table = [
        (Treatment::Before, Category::Mite, 78),
        (Treatment::Before, Category::Bee, 110),
        (Treatment::Before, Category::BeeWithMite, 113),
        (Treatment::After, Category::Mite, 113),
        (Treatment::After, Category::Bee, 113),
        (Treatment::After, Category::BeeWithMite, 120),
    ];
    for (t, c, n) in table {
        for i in 0..n {
            let id = format!("{}_{}_{i:03}", t.dir_name(), c.dir_name());
            touch(
                &dir.path().join(t.dir_name()).join(c.dir_name()).join(id),
                &["white.png", "ir.png", "turquoise.png"],
            );
        }
    }
    let index = load_dataset(dir.path()).unwrap();
    assert_eq!(index.entries.len(), 647);
    let counts = index.counts();
    for (t, c, n) in table {
        assert_eq!(counts[&(t, c)], n, "{t:?}/{c:?}");
    }
    // Each capture lacks only its mask, which is a warning.
    assert_eq!(index.issues.len(), 647);
    assert!(index.issues.iter().all(|i| i.level == IssueLevel::Warning));
    let ids: Vec<_> = index.entries.iter().map(|e| e.capture_id.clone()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(load_dataset(dir.path()).unwrap(), index);
}

#[test]
fn partial_triplet_and_unreadable_mask() {
    let dir = tempfile::tempdir().unwrap();
    let cap = dir.path().join("after/bee/c1");
    touch(&cap, &["white.png", "turquoise.png"]);
    fs::write(cap.join("mask.png"), b"garbage").unwrap();
    let index = load_dataset(dir.path()).unwrap();
    let e = index.entry("c1").unwrap();
    assert!(e.photos.infrared.is_none());
    assert!(e.photos.white.is_some());
    assert!(e.mask.is_none());
    assert_eq!(index.errors().count(), 1);
    assert!(index
        .issues
        .iter()
        .any(|i| i.level == IssueLevel::Warning && i.message.contains("ir")));
}

#[test]
fn duplicate_ids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    touch(&dir.path().join("before/bee/x"), &[]);
    touch(&dir.path().join("after/mite/x"), &[]);
    assert!(load_dataset(dir.path()).is_err());
}

#[test]
fn synthetic_export_loads_back_through_the_same_path() {
    let dir = tempfile::tempdir().unwrap();
    let scenes = generate_suite_with_dims(3, 50, Difficulty::Clean, (240, 100)).unwrap();
    export_scenes(dir.path(), &scenes).unwrap();

    let index = load_dataset(dir.path()).unwrap();
    assert_eq!(index.entries.len(), 3);
    assert_eq!(index.backgrounds.len(), 1);
    assert_eq!(index.errors().count(), 0);
    assert!(index.issues.is_empty());

    let bg = index
        .background_photos("background_000050")
        .unwrap()
        .load("background_000050")
        .unwrap();
    assert_eq!(bg, scenes[0].background);
    for scene in &scenes {
        let entry = index.entry(&scene.capture.capture_id).unwrap();
        assert_eq!(entry.category, scene.category());
        let capture = entry.load_capture().unwrap();
        assert_eq!(capture, scene.capture);
        assert_eq!(entry.load_class_mask().unwrap(), scene.ground_truth);
        let boxes = entry.load_boxes((240, 100)).unwrap();
        assert_eq!(boxes.len(), scene.spec.bees.len() + scene.spec.mites.len());
        assert_eq!(
            detect_mites(&capture, &bg, &PipelineConfig::default()).unwrap(),
            detect_mites(&scene.capture, &scene.background, &PipelineConfig::default()).unwrap()
        );
    }
}

#[test]
fn manifest_overrides_directory_discovery() {
    let dir = tempfile::tempdir().unwrap();
    let scenes = generate_suite_with_dims(1, 7, Difficulty::Clean, (120, 64)).unwrap();
    export_scenes(&dir.path().join("raw"), &scenes).unwrap();
    let cat = scenes[0].category().dir_name();
    let id = &scenes[0].capture.capture_id;
    let base = format!("raw/before/{cat}/{id}");
    let manifest = format!(
        "# remapped\n\
         capture renamed after {cat} white={base}/white.png ir={base}/ir.png turquoise={base}/turquoise.png mask={base}/mask.png\n\
         background bg ir=raw/background/background_000007/ir.png turquoise=raw/background/background_000007/turquoise.png\n"
    );
    fs::write(dir.path().join("manifest.txt"), manifest).unwrap();
    let index = load_dataset(dir.path()).unwrap();
    assert_eq!(index.entries.len(), 1);
    let e = index.entry("renamed").unwrap();
    assert_eq!(e.treatment, Treatment::After);
    assert!(e.photos.is_complete());
    assert!(e.boxes.is_none());
    // Background without a white image: one warning, still usable.
    assert_eq!(index.issues.len(), 1);
    let bg = index.background_photos("bg").unwrap().load("bg").unwrap();
    assert!(bg.white.is_none() && bg.infrared.is_some());
}
