use super::*;
use crate::linalg::haar_unitary;
use crate::matprod::standard_units;

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tracelab-io-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn samples() -> Vec<DataFile> {
    let u = haar_unitary::<f64>(4, 1);
    let e = standard_units::<f64>(2, 2);
    let f = e.iter().map(|x| u.matmul(x).matmul(&u.adjoint())).collect();
    let rep = MnMnRep::new(2, e, f, &Default::default()).unwrap();
    vec![
        DataFile::Matrix(haar_unitary(3, 2)),
        DataFile::Unitaries(UnitaryTuple::haar(2, 3, 3)),
        DataFile::Channel(crate::channels::channel_from_rep(&rep).unwrap()),
        DataFile::MnMn(rep),
        DataFile::Table(CharacterTable::bundled("s3").unwrap()),
    ]
}

#[test]
fn every_type_round_trips() {
    for sample in samples() {
        let text = sample.to_json().unwrap();
        let parsed = DataFile::parse(&text).unwrap();
        assert_eq!(parsed.kind(), sample.kind());
        // Floats survive exactly.
        assert_eq!(parsed, sample);
        assert!(roundtrip_text(&text).unwrap(), "{}", sample.kind());
    }
}

#[test]
fn truncated_and_unknown_files_fail() {
    for sample in samples() {
        let text = sample.to_json().unwrap();
        assert!(DataFile::parse(&text[..text.len() / 2]).is_err());
    }
    assert!(matches!(DataFile::parse(r#"{"foo": 1}"#), Err(Error::Parse(_))));
    assert!(DataFile::parse("[1, 2]").is_err());
}

#[test]
fn invalid_content_is_rejected() {
    // A non-unitary tuple and a non-orthogonal table parse as JSON but fail validation.
    let bad = r#"{"d": 1, "k": 1, "unitaries": [{"dim": 1, "data": [[2.0, 0.0]]}]}"#;
    assert!(DataFile::parse(bad).is_err());
    let bad = r#"{"class_sizes": [1, 1], "characters": [[[1,0],[1,0]], [[1,0],[0.5,0]]]}"#;
    assert!(DataFile::parse(bad).is_err());
}

#[test]
fn atomic_write_replaces_file() {
    let dir = scratch_dir("atomic");
    let path = dir.join("out.json");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "second");
    let leftovers: Vec<_> = fs::read_dir(&dir).unwrap().filter_map(|e| e.ok()).collect();
    assert_eq!(leftovers.len(), 1);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn file_round_trip() {
    let dir = scratch_dir("file");
    let path = dir.join("table.json");
    write_atomic(&path, DataFile::Table(CharacterTable::bundled("z3").unwrap()).to_json().unwrap().as_bytes()).unwrap();
    assert!(roundtrip(&path).unwrap());
    assert_eq!(read_data_file(&path).unwrap().kind(), "character-table");
    assert!(read_data_file(&dir.join("missing.json")).is_err());
    fs::remove_dir_all(&dir).unwrap();
}
