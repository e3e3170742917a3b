//! CLI-level checks: exit-code triage, artifact formats, and the
//! documented sample spec files.

use nonauto::cli::{run, CliArgs, Command, CommonOpts, EXIT_CLAIM_FAILED, EXIT_INPUT_ERROR, EXIT_OK};
use std::path::PathBuf;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn common(out: PathBuf, grid: usize, depth: Option<usize>) -> CommonOpts {
    CommonOpts {
        grid,
        half_width: None,
        depth,
        out: Some(out),
        seed: 42,
    }
}

#[test]
fn render_writes_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z2.pgm");
    let code = run(CliArgs {
        command: Command::Render {
            seq: data("z2.json"),
            time: 0,
            components_out: None,
            common: common(out.clone(), 256, Some(40)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let bytes = std::fs::read(&out).unwrap();
    assert!(bytes.starts_with(b"P5\n256 256\n255\n"));
    assert_eq!(bytes.len(), 15 + 256 * 256);
    // the filled set renders at full intensity: the unit disc covers
    // about pi / (6/256)^2 ~ 5.7k of the 65k cells on this chart
    let pixels = &bytes[15..];
    assert!(pixels.iter().filter(|&&p| p == 255).count() > 5_000);
}

#[test]
fn render_writes_png_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z2.png");
    let code = run(CliArgs {
        command: Command::Render {
            seq: data("z2.json"),
            time: 0,
            components_out: None,
            common: common(out.clone(), 128, Some(30)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let bytes = std::fs::read(&out).unwrap();
    assert_eq!(&bytes[1..4], b"PNG");
}

#[test]
fn unreadable_spec_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"nope\"").unwrap();
    let code = run(CliArgs {
        command: Command::Render {
            seq: bad,
            time: 0,
            components_out: None,
            common: common(dir.path().join("x.pgm"), 256, Some(10)),
        },
    });
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn hypothesis_refusal_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(CliArgs {
        command: Command::Thm71 {
            seq: data("c03.json"),
            common: common(dir.path().join("t.json"), 256, Some(20)),
        },
    });
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn thm72_row_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.json");
    // n = 2, j = 1: the four-piece time resolves and the claim check passes
    let code = run(CliArgs {
        command: Command::Thm72 {
            n: "2".into(),
            j: 1,
            common: common(out.clone(), 512, Some(12)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["row"]["component_count"], 4);
    assert_eq!(v["row"]["time_index"], 2);
    assert!(v["row"]["min_single_step_derivative_on_j"].as_f64().unwrap() > 1.9);
}

#[test]
fn invariance_resolution_must_be_power_of_two() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(CliArgs {
        command: Command::Invariance {
            seq: data("z2.json"),
            time: 0,
            n: 3,
            samples: 10,
            tolerance: 10.0,
            common: common(dir.path().join("i.json"), 300, Some(10)),
        },
    });
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn caratheodory_families_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let code = run(CliArgs {
        command: Command::Caratheodory {
            seq: data("family_annuli.json"),
            common: common(out.clone(), 256, None),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["outcome"], "domain");

    let out2 = dir.path().join("d.json");
    let code = run(CliArgs {
        command: Command::Caratheodory {
            seq: data("family_discs.json"),
            common: common(out2.clone(), 256, None),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out2).unwrap()).unwrap();
    assert_eq!(v["outcome"], "degenerate-point");
}

#[test]
fn separation_command_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sep.json");
    let code = run(CliArgs {
        command: Command::Separation {
            common: common(out.clone(), 512, Some(5)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["delta"].as_f64().unwrap() > 0.0);
    assert_eq!(v["components"], 2);
}

/// Writes a small-horizon polynomial-like spec for the squaring map.
fn write_small_pl_spec(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("pl_small.json");
    std::fs::write(
        &path,
        r#"{
  "from_sequence": {
    "kind": "explicit-prefix-with-periodic-tail",
    "bounds": { "d": 2, "K": 1.0, "M": 0.0 },
    "prefix": [],
    "tail": [[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]
  },
  "rho": 4.0,
  "horizon": 10
}"#,
    )
    .unwrap();
    path
}

#[test]
fn plbuild_restrict_lemma_commands() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_small_pl_spec(dir.path());

    let out = dir.path().join("pl.json");
    let code = run(CliArgs {
        command: Command::Plbuild {
            seq: spec.clone(),
            common: common(out.clone(), 256, None),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pl1_pass"], true);
    assert_eq!(v["pl2_degrees"][0], 2);

    let curves = dir.path().join("curves");
    let rout = dir.path().join("restrict.json");
    let code = run(CliArgs {
        command: Command::Restrict {
            seq: spec.clone(),
            b: 4.0,
            curves_dir: Some(curves.clone()),
            common: common(rout.clone(), 256, None),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rout).unwrap()).unwrap();
    assert_eq!(v["stages"][0]["separating"], true);
    assert!(v["stages"][0]["equator_length_cells"].as_f64().unwrap() > 100.0);
    assert_eq!(v["pl_report"]["pl1_pass"], true);
    // exported curves: header comment plus re,im rows
    let csv = std::fs::read_to_string(curves.join("equator_000.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# closed = true");
    assert_eq!(lines.next().unwrap(), "re,im");
    assert!(lines.next().unwrap().contains(','));

    let lout = dir.path().join("lemma.json");
    let code = run(CliArgs {
        command: Command::Lemma51 {
            seq: spec,
            b: 4.0,
            time: 0,
            common: common(lout.clone(), 256, Some(8)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&lout).unwrap()).unwrap();
    assert!(v["symmetric_difference_fraction"].as_f64().unwrap() <= 0.01);
}

#[test]
fn convergence_command_reports_monotone_distances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.json");
    let code = run(CliArgs {
        command: Command::Convergence {
            n: 4,
            time: 0,
            common: common(out.clone(), 512, Some(6)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["non_increasing"], true);
}

#[test]
fn render_component_report() {
    let dir = tempfile::tempdir().unwrap();
    let comps = dir.path().join("components.json");
    let code = run(CliArgs {
        command: Command::Render {
            seq: data("z2_plus_2.json"),
            time: 0,
            components_out: Some(comps.clone()),
            common: common(dir.path().join("img.pgm"), 512, Some(4)),
        },
    });
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&comps).unwrap()).unwrap();
    let list = v.as_array().unwrap();
    assert!(list.len() >= 2);
    for entry in list {
        assert!(entry["cells"].as_u64().unwrap() > 0);
        assert!(entry["diameter"].is_number());
        assert!(entry["centroid"].as_array().unwrap().len() == 2);
    }
}

#[test]
fn failed_claim_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // the limit sequence at depth 40 leaves a sub-resolution dust mask at
    // time 2, so the component count cannot match and the exit code is 1
    let code = run(CliArgs {
        command: Command::Thm72 {
            n: "limit".into(),
            j: 1,
            common: common(dir.path().join("r.json"), 512, Some(40)),
        },
    });
    assert_eq!(code, EXIT_CLAIM_FAILED);
}
