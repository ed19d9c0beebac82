use std::path::Path;
use std::process::Command;

use ordlevel::cli::{run, CliError};
use ordlevel::io::{
    BarcodeDocument, BoxSnakeDocument, FlatsDocument, MergeTreeDocument, SequenceDocument,
    SurgeryDocument,
};
use ordlevel::suite::SuiteReport;
use serde::de::DeserializeOwned;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn ranks_doc(ranks: &[u32], size: u32, domain: &str) -> String {
    format!(r#"{{"domain": "{domain}", "ranks": {ranks:?}, "universe_size": {size}}}"#)
}

fn invoke(args: &[&str]) -> Result<String, CliError> {
    invoke_with_stdin(args, "")
}

fn invoke_with_stdin(args: &[&str], stdin: &str) -> Result<String, CliError> {
    let mut out = Vec::new();
    let argv = std::iter::once("ordlevel").chain(args.iter().copied());
    run(argv, &mut stdin.as_bytes(), &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

/// Parses `text` and checks that re-serializing gives the same bytes.
fn reingest<T: DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let doc: T = serde_json::from_str(text).unwrap();
    assert_eq!(ordlevel::io::to_json(&doc), text);
    doc
}

fn bars(doc: &BarcodeDocument) -> Vec<(u32, u32, bool)> {
    doc.bars.iter().map(|b| (b.birth, b.death, b.essential)).collect()
}

#[test]
fn barcode_of_ranks() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", &ranks_doc(&[0, 2, 1, 3], 4, "linear"));
    let out = invoke(&["barcode", &f, "--rule", "elder", "--filtration", "sub"]).unwrap();
    let doc: BarcodeDocument = reingest(&out);
    assert_eq!(bars(&doc), vec![(0, 3, true), (1, 2, false)]);
    assert!(doc.bars.iter().all(|b| b.birth_label.is_none()));
}

#[test]
fn barcode_of_constant_values() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", r#"{"values": [2.5, 2.5, 2.5]}"#);
    let doc: BarcodeDocument = reingest(&invoke(&["barcode", &f]).unwrap());
    assert_eq!(bars(&doc), vec![(0, 0, true)]);
    assert_eq!(doc.bars[0].birth_label, Some(2.5));
}

#[test]
fn superlevel_on_circle_swaps_endpoints() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", &ranks_doc(&[0, 1, 0, 1], 2, "circular"));
    let sub: BarcodeDocument = reingest(&invoke(&["barcode", &f]).unwrap());
    let sup: BarcodeDocument = reingest(&invoke(&["barcode", &f, "--filtration", "super"]).unwrap());
    let mut a: Vec<_> = bars(&sub).into_iter().map(|(b, d, e)| (d, b, e)).collect();
    let mut b = bars(&sup);
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn domain_flag_overrides_document() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", &ranks_doc(&[0, 1, 0, 1], 2, "linear"));
    let lin: BarcodeDocument = reingest(&invoke(&["barcode", &f]).unwrap());
    let circ: BarcodeDocument = reingest(&invoke(&["barcode", &f, "--domain", "circular"]).unwrap());
    assert_eq!(lin.bars.len(), 2);
    assert_eq!(circ.bars.len(), 2);
    assert_eq!(format!("{:?}", circ.domain), "Circular");
}

#[test]
fn text_and_svg_formats() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", &ranks_doc(&[3, 0, 2, 1, 3], 4, "linear"));
    let text = invoke(&["barcode", &f, "--format", "text"]).unwrap();
    assert_eq!(text, "[0 ──── 3] essential\n[1 ──── 2]\n");
    let svg = invoke(&["barcode", &f, "--format", "svg"]).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<title>").count(), 2);
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn text_uses_labels() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "v.csv", "0.5\n-1\n# comment\n\n2\n");
    assert_eq!(invoke(&["barcode", &f, "--format", "text"]).unwrap(), "[-1 ──── 2] essential\n");
}

#[test]
fn csv_from_stdin() {
    let out = invoke_with_stdin(&["barcode", "-"], "1\n0\n2\n0\n1\n").unwrap();
    let doc: BarcodeDocument = reingest(&out);
    assert_eq!(doc.bars.len(), 2);
}

#[test]
fn other_documents_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", &ranks_doc(&[1, 0, 2, 0, 1], 3, "circular"));
    let tree: MergeTreeDocument = reingest(&invoke(&["mergetree", &f]).unwrap());
    assert_eq!(tree.tree.leaves().count(), 2);
    let bs: BoxSnakeDocument = reingest(&invoke(&["boxsnake", &f]).unwrap());
    assert!(bs.box_snake.alternates());
    let flats: FlatsDocument = reingest(&invoke(&["flats", &f]).unwrap());
    assert_eq!(flats.flats.len(), 4, "the 1,1 run wraps");
    let inv: SequenceDocument = reingest(&invoke(&["invert", &f]).unwrap());
    assert_eq!(inv.ranks, Some(vec![1, 2, 0, 2, 1]));
}

#[test]
fn invert_output_is_valid_input() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "v.json", r#"{"name": "w", "values": [3.0, 1.0, 2.0]}"#);
    let inv = invoke(&["invert", &f]).unwrap();
    let g = write(&dir, "inv.json", &inv);
    let twice: SequenceDocument = reingest(&invoke(&["invert", &g]).unwrap());
    assert_eq!(twice.ranks, Some(vec![2, 0, 1]));
    assert_eq!(twice.name.as_deref(), Some("w"));
}

#[test]
fn surgery_commands() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", &ranks_doc(&[0, 1, 2, 3], 4, "linear"));
    let cut: SurgeryDocument = reingest(&invoke(&["surgery", "cut", &f, "1"]).unwrap());
    assert_eq!(cut.sequences.len(), 2);
    assert_eq!(cut.sequences[0].ranks, Some(vec![0, 1]));
    let a = write(&dir, "a.json", &ordlevel::io::to_json(&cut.sequences[0]));
    let b = write(&dir, "b.json", &ordlevel::io::to_json(&cut.sequences[1]));
    let glued: SurgeryDocument = reingest(&invoke(&["surgery", "glue", &a, &b]).unwrap());
    assert_eq!(glued.sequences[0].ranks, Some(vec![0, 1, 2, 3]));
    assert_eq!(glued.box_snakes[0].boxes.len(), 3);

    let shifted: SurgeryDocument = reingest(&invoke(&["surgery", "shift", &f, "left", "2,0"]).unwrap());
    assert_eq!(shifted.sequences[0].ranks, Some(vec![2, 3, 2, 0]));
    let circle: SurgeryDocument = reingest(&invoke(&["surgery", "circularize", &f]).unwrap());
    let c = write(&dir, "c.json", &ordlevel::io::to_json(&circle.sequences[0]));
    let open: SurgeryDocument = reingest(&invoke(&["surgery", "linearize", &c, "--at", "1"]).unwrap());
    assert_eq!(open.sequences[0].ranks, Some(vec![2, 3, 0, 1]));
}

#[test]
fn shift_with_values_relabels() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "v.json", r#"{"values": [1.0, 3.0, 2.0]}"#);
    let doc: SurgeryDocument = reingest(&invoke(&["surgery", "shift", &f, "right", "-4.5"]).unwrap());
    assert_eq!(doc.sequences[0].values, Some(vec![-4.5, 1.0, 3.0]));
}

#[test]
fn input_errors_are_code_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"values": [1], "ranks": [0], "universe_size": 1}"#,
        r#"{"ranks": [0, 1]}"#,
        r#"{"ranks": [0, 5], "universe_size": 2}"#,
        r#"{"values": []}"#,
        r#"{"values": [1], "colour": "red"}"#,
        r#"{"values": [1], "domain": "toroidal"}"#,
        "1\nabc\n",
    ];
    for (k, text) in cases.iter().enumerate() {
        let f = write(&dir, &format!("bad{k}.txt"), text);
        let err = invoke(&["barcode", &f]).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text}: {err}");
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(invoke(&["barcode", missing.to_str().unwrap()]).unwrap_err().exit_code(), 2);
    assert_eq!(invoke(&["frobnicate"]).unwrap_err().exit_code(), 2);
}

#[test]
fn surgery_preconditions_are_code_2() {
    let dir = TempDir::new().unwrap();
    let lin = write(&dir, "l.json", &ranks_doc(&[0, 1], 2, "linear"));
    let circ = write(&dir, "c.json", &ranks_doc(&[0, 1], 2, "circular"));
    for args in [
        vec!["surgery", "cut", &lin, "1"],
        vec!["surgery", "cut", &circ, "0"],
        vec!["surgery", "shift", &lin, "left", "0,0,0"],
        vec!["surgery", "shift", &lin, "left", "0.5"],
        vec!["surgery", "circularize", &circ],
        vec!["surgery", "linearize", &lin],
        vec!["surgery", "linearize", &circ, "--at", "7"],
    ] {
        assert_eq!(invoke(&args).unwrap_err().exit_code(), 2, "{args:?}");
    }
}

#[test]
fn verify_reports_pass() {
    let out = invoke(&["verify", "--suite", "oracle", "--exhaustive", "5", "3"]).unwrap();
    let r: SuiteReport = reingest(&out);
    assert!(r.passed() && r.instances > 0);
    let r: SuiteReport = reingest(&invoke(&["verify", "--suite", "appendixB", "--exhaustive", "6"]).unwrap());
    assert!(r.passed());
    let a = invoke(&["verify", "--suite", "inversion", "--random", "50", "9"]).unwrap();
    let b = invoke(&["verify", "--suite", "inversion", "--random", "50", "9"]).unwrap();
    assert_eq!(a, b);
    assert!(invoke(&["verify", "--suite", "oracle"]).is_err());
    assert!(invoke(&["verify", "--suite", "oracle", "--exhaustive", "3", "--random", "3"]).is_err());
}

#[test]
fn help_goes_to_output() {
    let out = invoke(&["--help"]).unwrap();
    assert!(out.contains("barcode") && out.contains("verify"));
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ordlevel"))
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "g.json", &ranks_doc(&[0, 2, 1, 3], 4, "linear"));
    let bad = write(&dir, "b.json", r#"{"ranks": [0]}"#);
    let ok = binary().args(["barcode", &good]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let err = binary().args(["barcode", &bad]).output().unwrap();
    assert_eq!(err.status.code(), Some(2));
    assert!(!err.stderr.is_empty());
}

#[test]
fn binary_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "v.json", r#"{"name": "n", "domain": "circular", "values": [0.1, 0.9, 0.3, 0.7, 0.3]}"#);
    for cmd in [["barcode", "--rule", "local"], ["mergetree", "--filtration", "super"], ["boxsnake", "--domain", "linear"]]
    {
        let run = || binary().arg(cmd[0]).arg(&f).args(&cmd[1..]).output().unwrap().stdout;
        let first = run();
        assert!(!first.is_empty());
        assert_eq!(first, run());
    }
}

#[test]
fn seed_from_environment() {
    let with = |seed: &str| {
        binary()
            .args(["verify", "--suite", "trisection", "--random", "10"])
            .env("ORDLEVEL_SEED", seed)
            .output()
            .unwrap()
    };
    let a = with("5");
    assert_eq!(a.status.code(), Some(0));
    let r: SuiteReport = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(format!("{:?}", r.mode), "Random { trials: 10, seed: 5 }");
    assert_eq!(with("x").status.code(), Some(2));
}

#[test]
fn shipped_examples_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let p = path.to_str().unwrap();
        for rule in ["elder", "local"] {
            invoke(&["barcode", p, "--rule", rule]).unwrap();
        }
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn invariant_failures_are_code_3() {
    assert_eq!(CliError::Invariant("report".into()).exit_code(), 3);
    assert_eq!(CliError::Input("bad".into()).exit_code(), 2);
}
