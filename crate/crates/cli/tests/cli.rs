use std::path::Path;
use std::process::{Command, Output};

use cell24::covers::GeographyReport;
use cell24::homology::{truncated_homology, HomologyReport};
use cell24::pairing::{parse_pairing, verify_poincare, SidePairing, VerificationReport};
use cell24::polytope::symmetry_group;
use cell24::search::prefix_of;
use cell24::BUNDLED_PAIRING;
use serde_json::Value;

fn cell24(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cell24"))
        .args(args)
        .env_remove("CELL24_DATA")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn payload(o: &Output) -> Value {
    let env: Value = serde_json::from_slice(&o.stdout).expect("json envelope");
    env["payload"].clone()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn bundled() -> SidePairing {
    parse_pairing(BUNDLED_PAIRING).unwrap()
}

/// The bundled pairing with the map of side 1 composed with an orientation-reversing
/// symmetry of that side.
fn reflected() -> SidePairing {
    let sp = bundled();
    let g = symmetry_group();
    let k = g.facet_maps(0, 0).iter().copied().find(|&k| g.get(k).det == -1).unwrap();
    let mut elems: [usize; 24] = std::array::from_fn(|s| sp.symmetry(s));
    elems[0] = g.compose(elems[0], k);
    elems[sp.partner(0)] = g.inverse(elems[0]);
    SidePairing::from_symmetries(*sp.partners(), &elems).unwrap()
}

#[test]
fn verify_bundled() {
    let o = cell24(&["verify"]);
    assert_eq!(code(&o), 0);
    let env: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(env["command"], "verify");
    assert_eq!(env["schema"], 1);
    assert_eq!(env["input_digest"].as_str().unwrap().len(), 64);
    assert_eq!(env["payload"]["overall"], true);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "bad.pairing", "side one -> two\n");
    assert_eq!(code(&cell24(&["verify", &garbage])), 2);

    let truncated: String = BUNDLED_PAIRING.lines().take(10).collect::<Vec<_>>().join("\n");
    let short = write(dir.path(), "short.pairing", &truncated);
    assert_eq!(code(&cell24(&["verify", &short])), 2);

    assert_eq!(code(&cell24(&["verify", "/nonexistent/file.pairing"])), 2);

    let flipped = write(dir.path(), "flipped.pairing", &reflected().to_text());
    let o = cell24(&["verify", &flipped]);
    assert_eq!(code(&o), 1);
    let p = payload(&o);
    assert_eq!(p["orientable"], false);
    assert_eq!(p["overall"], false);

    // commands that need a verified pairing refuse it
    assert_eq!(code(&cell24(&["cusps", &flipped])), 1);
}

#[test]
fn verification_round_trips() {
    let o = cell24(&["verify"]);
    let back: VerificationReport = serde_json::from_value(payload(&o)).unwrap();
    assert_eq!(back, verify_poincare(&bundled()));
}

#[test]
fn report_of_bundled() {
    let o = cell24(&["report"]);
    assert_eq!(code(&o), 0);
    let p = payload(&o);
    assert_eq!(p["chi"], 1);
    assert_eq!(p["sigma_abs"], 1);
    assert_eq!(p["slope"], serde_json::json!({ "num": 1, "den": 1 }));
    assert_eq!(p["homology_ranks"], serde_json::json!([1, 3, 5, 2, 0]));
    let mut cusps: Vec<String> = p["cusps"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    cusps.sort();
    assert_eq!(cusps, ["F1", "F1", "F4"]);

    let geo: GeographyReport = serde_json::from_value(p["geography"].clone()).unwrap();
    assert_eq!(geo, cell24::covers::geography(&bundled(), 1, 1).unwrap());
    let hom: HomologyReport = serde_json::from_value(p["homology"].clone()).unwrap();
    assert_eq!(hom, truncated_homology(&bundled()).unwrap());
}

#[test]
fn report_of_covers() {
    let p = payload(&cell24(&["report", "--n", "3"]));
    assert_eq!((p["chi"].as_i64(), p["sigma_abs"].as_i64()), (Some(3), Some(3)));

    let p = payload(&cell24(&["report", "--n", "1", "--m", "3"]));
    assert_eq!((p["chi"].as_i64(), p["sigma_abs"].as_i64()), (Some(3), Some(1)));
    assert_eq!(p["slope"], serde_json::json!({ "num": 1, "den": 3 }));
}

#[test]
fn cover_fields() {
    let o = cell24(&["cover", "--n", "2", "--m", "3"]);
    assert_eq!(code(&o), 0);
    let p = payload(&o);
    assert_eq!(p["degree"], 6);
    assert_eq!(p["chi"], 6);
    assert_eq!(p["sigma_abs"], 2);
    assert_eq!((p["slope_num"].as_i64(), p["slope_den"].as_i64()), (Some(1), Some(3)));
    assert_eq!(p["bounds_ok"], true);

    let p = payload(&cell24(&["signature", "--m", "4"]));
    assert_eq!(p["sigma_signed"], 0);

    assert_eq!(code(&cell24(&["cover", "--n", "0"])), 2);
}

#[test]
fn export_cusps() {
    let o = cell24(&["export-cusp", "--cusp", "3"]);
    assert_eq!(code(&o), 0);
    let p = payload(&o);
    assert_eq!(p["type"], "F4");
    assert_eq!(p["cubes"].as_array().unwrap().len(), 8);
    assert_eq!(p["face_gluings"].as_array().unwrap().len(), 48);
    assert_eq!(p["screw"]["rotation_order"], 4);
    assert_eq!(p["section_volume_cubes"], serde_json::json!({ "num": 8, "den": 1 }));

    let p = payload(&cell24(&["export-cusp", "--cusp", "1"]));
    assert_eq!(p["type"], "F1");
    assert_eq!(p["lattice_basis"].as_array().unwrap().len(), 3);
    assert_eq!(p["lattice_covolume_cubes"], serde_json::json!({ "num": 8, "den": 1 }));
    assert!(p["screw"].is_null());

    assert_eq!(code(&cell24(&["export-cusp", "--cusp", "9"])), 2);
    assert_eq!(code(&cell24(&["export-cusp", "--cusp", "0"])), 2);
}

#[test]
fn output_is_byte_identical() {
    for args in [&["report", "--m", "3"][..], &["cusps"], &["export-cusp", "--cusp", "3"]] {
        let a = cell24(args);
        let b = cell24(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let mut one = vec!["--threads", "1"];
    one.extend(["cover", "--n", "2", "--m", "2"]);
    let mut four = vec!["--threads", "4"];
    four.extend(["cover", "--n", "2", "--m", "2"]);
    assert_eq!(cell24(&one).stdout, cell24(&four).stdout);
}

#[test]
fn data_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m_paper.pairing", &reflected().to_text());
    let o = Command::new(env!("CARGO_BIN_EXE_cell24"))
        .arg("verify")
        .env("CELL24_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);

    let empty = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cell24"))
        .arg("verify")
        .env("CELL24_DATA", empty.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn search_from_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let sp = bundled();
    let sides: Vec<usize> = prefix_of(&sp, 10).iter().map(|a| a.side + 1).collect();
    let lines: Vec<&str> = BUNDLED_PAIRING
        .lines()
        .filter(|l| {
            l.split_whitespace()
                .nth(1)
                .and_then(|s| s.parse::<usize>().ok())
                .is_some_and(|s| sides.contains(&s))
        })
        .collect();
    let prefix = write(dir.path(), "prefix.pairing", &lines.join("\n"));
    let out = dir.path().join("found");
    let o = cell24(&["search", "--prefix", &prefix, "--filter", "one-f4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let found = payload(&o)["found"].as_array().unwrap().clone();
    assert!(!found.is_empty());
    let index: Value = serde_json::from_str(&std::fs::read_to_string(out.join("index.json")).unwrap()).unwrap();
    assert_eq!(index.as_array().unwrap().len(), found.len());
    for f in &found {
        let file = out.join(f["file"].as_str().unwrap());
        let o = cell24(&["verify", file.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }

    // nothing can be found without any nodes to spend
    assert_eq!(code(&cell24(&["search", "--nodes", "0"])), 3);
    assert_eq!(code(&cell24(&["search", "--filter", "nonsense", "--nodes", "1"])), 2);
}
