use fbod::io::{
    load_csv, load_frames, read_labels, read_scores, write_csv, write_frames, write_labels, write_scores, CsvSchema,
    LabelColumn,
};
use fbod::*;
use proptest::prelude::*;

fn labelled() -> CsvSchema {
    CsvSchema::default().with_label(LabelColumn::Name("label".into()))
}

#[test]
fn synthetic_frames_survive_disk() {
    let dir = tempfile::tempdir().unwrap();
    let frames = synth::make_frames(&synth::FrameSpec::sequence(21)).unwrap();
    write_frames(&frames, dir.path()).unwrap();
    let back = load_frames(dir.path()).unwrap();
    assert_eq!(back.pixels(), frames.pixels());
    assert_eq!((back.width, back.height, back.frame_count()), (40, 30, 63));
    let labels = read_labels(dir.path().join("labels.txt")).unwrap();
    assert_eq!(labels, frames.labels().unwrap());

    let ds: Dataset64 = back.to_dataset().unwrap();
    assert_eq!(ds.dim(), 1200);
    assert_eq!(ds.len(), 63);
}

#[test]
fn cluster_csv_feeds_detect() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clusters.csv");
    let ds: Dataset64 = synth::make_clusters(&synth::ClusterSpec::planted(7)).unwrap();
    write_csv(&ds, &path).unwrap();
    let back: Dataset64 = load_csv(&path, &labelled()).unwrap();
    assert_eq!(back.values(), ds.values());
    assert_eq!(back.labels(), ds.labels());
    let params = FbodParams64::new(5, 3, 4, 7);
    assert_eq!(detect(&back, &params).unwrap(), detect(&ds, &params).unwrap());
}

#[test]
fn score_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scores.csv");
    let ds: Dataset64 = synth::make_clusters(&synth::ClusterSpec::planted(2)).unwrap();
    let report = detect(&ds, &FbodParams64::new(5, 3, 4, 2)).unwrap();
    write_scores(&report, &path).unwrap();
    assert_eq!(read_scores::<f64>(&path).unwrap(), report);
}

#[test]
fn parse_errors_name_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b,label\n1,2,0\n3,x,1\n").unwrap();
    let err = load_csv::<f64>(&path, &labelled()).unwrap_err();
    match &err {
        Error::Parse { line, column, .. } => assert_eq!((*line, *column), (3, 2)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("line 3, column 2"), "{err}");

    std::fs::write(&path, "a,b,label\n1,2,0\n3,4,2\n").unwrap();
    assert!(load_csv::<f64>(&path, &labelled()).is_err());
}

#[test]
fn labels_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.txt");
    let labels = vec![true, false, false, true];
    write_labels(&labels, &path).unwrap();
    assert_eq!(read_labels(&path).unwrap(), labels);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(
        rows in prop::collection::vec(prop::collection::vec(-1e12f64..1e12, 3), 2..30),
        flags in prop::collection::vec(any::<bool>(), 30),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let labels = flags[..rows.len()].to_vec();
        let ds = Dataset64::from_columns(&rows).unwrap().with_labels(labels).unwrap();
        write_csv(&ds, &path).unwrap();
        let back: Dataset64 = load_csv(&path, &labelled()).unwrap();
        prop_assert_eq!(back.values(), ds.values());
        prop_assert_eq!(back.labels(), ds.labels());
    }

    #[test]
    fn scores_round_trip_bitwise(of in prop::collection::vec(0.0f64..1e6, 2..50), p in 0usize..50) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let p = p.min(of.len());
        let report = ScoreReport64::from_scores(of, p).unwrap();
        write_scores(&report, &path).unwrap();
        prop_assert_eq!(read_scores::<f64>(&path).unwrap(), report);
    }
}
