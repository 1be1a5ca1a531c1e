//! On-disk dataset loading, track extraction, and validation.

use uwvos::dataset::{DatasetIndex, Split, Violation};
use uwvos::mask::MaskFrame;
use uwvos::Error;

use uwvos_testkit::fixture::{
    encode_gray_png, rect_labels, stamp_rect, SyntheticVideo, TempDataset,
};

fn two_video_fixture() -> Vec<SyntheticVideo> {
    let mut a = SyntheticVideo::new("vid_a", 16, 12).category(1, "goldfish");
    a.push_frame(rect_labels(16, 12, 1, 2, 2, 5, 5));
    a.push_frame(rect_labels(16, 12, 1, 3, 2, 6, 5));
    a.push_frame(rect_labels(16, 12, 1, 4, 2, 7, 5));

    let mut b = SyntheticVideo::new("vid_b", 10, 10)
        .category(1, "crab")
        .category(2, "goldfish");
    let mut f0 = rect_labels(10, 10, 1, 0, 0, 3, 3);
    stamp_rect(&mut f0, 10, 2, 6, 6, 8, 8);
    b.push_frame(f0.clone());
    b.push_frame(f0);

    vec![a, b]
}

#[test]
fn loads_a_two_video_fixture() {
    let data = TempDataset::new(&two_video_fixture());
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();

    assert_eq!(index.len(), 2);
    assert_eq!(index.split(), Split::Val);
    let a = index.video("vid_a").unwrap();
    assert_eq!(a.frame_count(), 3);
    assert_eq!(a.resolution, (16, 12));
    assert_eq!(a.objects[&1].category, "goldfish");
    assert_eq!(a.objects[&1].first_frame, "00000");
    let b = index.video("vid_b").unwrap();
    assert_eq!(b.frame_count(), 2);
    assert_eq!(b.object_ids().collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(index.instance_count(), 3);
}

#[test]
fn missing_meta_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let err = DatasetIndex::load(dir.path(), Split::Val).unwrap_err();
    assert!(matches!(err, Error::MissingMeta(_)));
}

#[test]
fn meta_video_without_annotations_is_empty_video() {
    let data = TempDataset::new(&two_video_fixture());
    // Add a meta entry with no Annotations folder.
    let meta_path = data.root.join("meta.json");
    let mut meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
    meta["videos"]["vid_ghost"] = serde_json::json!({
        "objects": {"1": {"category": "squid", "frames": ["00000"]}}
    });
    std::fs::write(&meta_path, serde_json::to_string(&meta).unwrap()).unwrap();

    let err = DatasetIndex::load(&data.root, Split::Val).unwrap_err();
    match err {
        Error::EmptyVideo(id) => assert_eq!(id, "vid_ghost"),
        other => panic!("expected EmptyVideo, got {other:?}"),
    }
}

#[test]
fn malformed_meta_is_reported() {
    let data = TempDataset::new(&two_video_fixture());
    std::fs::write(data.root.join("meta.json"), "{\"videos\": 3}").unwrap();
    assert!(matches!(
        DatasetIndex::load(&data.root, Split::Val),
        Err(Error::MalformedMeta(_))
    ));
}

#[test]
fn decoder_reads_the_independent_encoder_exactly() {
    // 100 random rasters written by the image crate must decode
    // label-for-label.
    let mut state = 0x5eed_f00du64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        state
    };
    for round in 0..100 {
        let width = 1 + (next() % 24) as u32;
        let height = 1 + (next() % 24) as u32;
        let labels: Vec<u8> = (0..width * height).map(|_| (next() >> 56) as u8).collect();
        let bytes = encode_gray_png(width, height, &labels);
        let frame = MaskFrame::decode(&bytes).unwrap();
        assert_eq!(frame.resolution(), (width, height), "round {round}");
        assert_eq!(frame.labels(), labels.as_slice(), "round {round}");
    }
}

#[test]
fn extract_track_masks_equal_label_comparison() {
    let data = TempDataset::new(&two_video_fixture());
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let track = index.extract_track("vid_b", 2).unwrap();
    assert_eq!(track.len(), 2);
    assert!(track.entries().iter().all(|e| e.present()));
    let mask = &track.entry(0).mask;
    assert_eq!(mask.area(), 9);
    assert!(mask.get(6, 6) && mask.get(8, 8) && !mask.get(0, 0));
}

#[test]
fn extract_track_rejects_unknown_ids() {
    let data = TempDataset::new(&two_video_fixture());
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    assert!(matches!(
        index.extract_track("nope", 1),
        Err(Error::UnknownVideo(_))
    ));
    assert!(matches!(
        index.extract_track("vid_a", 9),
        Err(Error::UnknownObject { .. })
    ));
}

#[test]
fn all_absent_object_extracts_as_all_absent_track() {
    // Object 5 is declared with a first frame whose raster exists but
    // carries no pixels of it.
    let mut video = SyntheticVideo::new("vid", 8, 8)
        .category(1, "goldfish")
        .category_with_frames(5, "crab", &["00000"]);
    video.push_frame(rect_labels(8, 8, 1, 0, 0, 2, 2));
    video.push_frame(rect_labels(8, 8, 1, 0, 0, 2, 2));
    let data = TempDataset::new(&[video]);
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();

    let track = index.extract_track("vid", 5).unwrap();
    assert!(track.entries().iter().all(|e| !e.present()));
    assert_eq!(track.first_present_index(), None);

    // Validation flags the empty first frame.
    let report = uwvos::dataset::validate_sequence(&index, "vid").unwrap();
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::EmptyFirstFrame { object_id: 5, .. })));
}

#[test]
fn presence_pattern_reflects_rasters() {
    let mut video = SyntheticVideo::new("vid", 8, 8).category(3, "eel");
    video.push_frame(rect_labels(8, 8, 3, 1, 1, 2, 2));
    video.push_frame(vec![0; 64]);
    video.push_frame(rect_labels(8, 8, 3, 4, 4, 6, 6));
    let data = TempDataset::new(&[video]);
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let track = index.extract_track("vid", 3).unwrap();
    assert_eq!(track.presence(), vec![true, false, true]);
}

#[test]
fn clean_fixture_validates_clean() {
    let data = TempDataset::new(&two_video_fixture());
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    for vid in ["vid_a", "vid_b"] {
        let report = uwvos::dataset::validate_sequence(&index, vid).unwrap();
        assert!(report.is_clean(), "{vid}: {:?}", report.violations);
    }
}

#[test]
fn undeclared_label_is_flagged() {
    let mut video = SyntheticVideo::new("vid", 8, 8).category(1, "goldfish");
    video.push_frame(rect_labels(8, 8, 1, 0, 0, 2, 2));
    let mut bad = rect_labels(8, 8, 1, 0, 0, 2, 2);
    stamp_rect(&mut bad, 8, 9, 5, 5, 6, 6);
    video.push_frame(bad);
    let data = TempDataset::new(&[video]);
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let report = uwvos::dataset::validate_sequence(&index, "vid").unwrap();
    let undeclared: Vec<&Violation> = report
        .violations
        .iter()
        .filter(|v| matches!(v, Violation::UndeclaredLabel { label: 9, .. }))
        .collect();
    assert_eq!(undeclared.len(), 1);
}

#[test]
fn ignore_label_is_not_a_violation() {
    let mut video = SyntheticVideo::new("vid", 8, 8).category(1, "goldfish");
    let mut labels = rect_labels(8, 8, 1, 0, 0, 2, 2);
    stamp_rect(&mut labels, 8, 255, 6, 6, 7, 7);
    video.push_frame(labels.clone());
    video.push_frame(labels);
    let data = TempDataset::new(&[video]);
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let report = uwvos::dataset::validate_sequence(&index, "vid").unwrap();
    assert!(report.is_clean(), "{:?}", report.violations);
}

#[test]
fn resolution_drift_is_flagged() {
    let mut video = SyntheticVideo::new("vid", 8, 8).category(1, "goldfish");
    video.push_frame(rect_labels(8, 8, 1, 0, 0, 2, 2));
    video.push_frame(rect_labels(8, 8, 1, 0, 0, 2, 2));
    let data = TempDataset::new(&[video]);
    // Overwrite the second frame with a 6x8 raster.
    let drifted = encode_gray_png(6, 8, &rect_labels(6, 8, 1, 0, 0, 2, 2));
    std::fs::write(
        data.root.join("Annotations").join("vid").join("00001.png"),
        drifted,
    )
    .unwrap();
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let report = uwvos::dataset::validate_sequence(&index, "vid").unwrap();
    assert!(report.violations.iter().any(|v| matches!(
        v,
        Violation::ResolutionDrift {
            expected: (8, 8),
            found: (6, 8),
            ..
        }
    )));
}

#[test]
fn meta_frame_without_raster_is_flagged() {
    let mut video = SyntheticVideo::new("vid", 8, 8)
        .category(1, "goldfish")
        .category_with_frames(2, "crab", &["00000", "00009"]);
    let mut labels = rect_labels(8, 8, 1, 0, 0, 2, 2);
    stamp_rect(&mut labels, 8, 2, 5, 5, 6, 6);
    video.push_frame(labels.clone());
    video.push_frame(labels);
    let data = TempDataset::new(&[video]);
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let report = uwvos::dataset::validate_sequence(&index, "vid").unwrap();
    assert!(report.violations.iter().any(|v| matches!(
        v,
        Violation::MissingMetaFrame { object_id: 2, frame } if frame == "00009"
    )));
}

#[test]
fn object_masks_tile_the_raster() {
    // Every pixel belongs to exactly one label's mask.
    let data = TempDataset::new(&two_video_fixture());
    let index = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let raster = index.load_annotation("vid_b", "00000").unwrap();
    let masks: Vec<_> = raster
        .distinct_labels()
        .into_iter()
        .map(|l| raster.object_mask(l))
        .collect();
    for y in 0..raster.height() {
        for x in 0..raster.width() {
            let owners = masks.iter().filter(|m| m.get(x, y)).count();
            assert_eq!(owners, 1, "pixel ({x},{y})");
        }
    }
}

#[test]
fn loading_is_deterministic() {
    let data = TempDataset::new(&two_video_fixture());
    let a = DatasetIndex::load(&data.root, Split::Val).unwrap();
    let b = DatasetIndex::load(&data.root, Split::Val).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
