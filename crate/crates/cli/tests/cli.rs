//! The binary end to end.

use std::process::{Command, Output};

use freycond::cluster::{parse_cluster_json, render_ascii, to_json};
use freycond::conductor::FactoredIdeal;
use freycond::signatures::SignatureReport;
use freycond::verify::VerifyReport;

fn freycond(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freycond"))
        .args(args.split_whitespace())
        .output()
        .expect("spawn freycond")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn conductor_text() {
    let o = freycond("conductor --r 5 --z 1 --s 3 --field Q");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("5: row R6, tame 4, wild 3, total 7"), "{}", out);
    assert!(out.contains("N_odd = 5^7"), "{}", out);

    let out = stdout(&freycond("conductor --r 5 --z 5 --s 5 --field Q"));
    assert!(out.contains("5: row R5, tame 4, wild 5, total 9"), "{}", out);
    assert!(out.contains("499: row R1, tame 2, wild 0, total 2"), "{}", out);
    assert!(out.contains("N_odd = 5^9·499^2"), "{}", out);
}

#[test]
fn singular_is_exit_2() {
    let o = freycond("conductor --r 5 --z 1 --s 2");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("singular: Δ = 0"));
}

#[test]
fn bad_args_are_exit_2() {
    assert_eq!(freycond("conductor --r 4 --z 1 --s 3").status.code(), Some(2));
    assert_eq!(freycond("conductor --r 5 --z 0 --s 3").status.code(), Some(2));
    assert_eq!(freycond("conductor --r 5 --z x --s 3").status.code(), Some(2));
}

#[test]
fn cluster_with_oracle() {
    let o = freycond("cluster --r 5 --z 1 --s 127 --q 5 --check-oracle");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(γ0 (γ1 γ4)_{1/4} (γ2 γ3)_{1/4})_{1/2}"), "{}", out);
    assert!(out.contains("oracle: MATCH"), "{}", out);

    let out = stdout(&freycond("cluster --r 5 --z 1 --s 1 --q 3"));
    assert!(out.contains("row R1"), "{}", out);
    assert_eq!(out.matches(")_{1/2}").count(), 2, "{}", out);

    let o = freycond("cluster --r 5 --z 1 --s 3 --q 7");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("q is not a bad prime"));
}

#[test]
fn signature_examples() {
    let o = freycond("signature rrp --A 1 --B 1 --C 1 --a 2 --b 1 --cp 33 --r 5");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("ε_r = 2"), "{}", out);
    assert!(out.contains("𝔯^2·𝔮_3·𝔮_11"), "{}", out);

    let out = stdout(&freycond("signature ppr --A 31 --B 1 --C 1 --a 1 --b 1 --c 2 --r 5"));
    assert!(out.contains("F over Q_5: irreducible"), "{}", out);
    assert!(out.contains("ε_r = 3"), "{}", out);

    let o = freycond("signature 2rp --A 2 --B 1 --C 1 --a 1 --b 1 --c 1 --r 5");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A ≠ 1 unsupported (condition (i) may fail)"));

    // 1 + 1 ≠ 1
    let o = freycond("signature ppr --a 1 --b 1 --c 1 --r 5 --p 3");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_examples() {
    let o = freycond("verify --seed 7 --count 100 --r 5,7");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("6 suites × 200 instances: all pass"));

    let o = freycond("verify --count 0");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("6 suites × 0 instances: all pass"));
}

#[test]
fn mutated_row_is_caught() {
    for row in ["R1", "R4", "R6", "R8"] {
        let o = freycond(&format!("--mutate-row {} verify --seed 7 --count 20 --r 5,7", row));
        assert_eq!(o.status.code(), Some(1), "row {}", row);
        assert!(stdout(&o).contains("FAILED"), "row {}", row);
    }
}

#[test]
fn deterministic() {
    for args in [
        "verify --seed 11 --count 30 --r 5,7",
        "--format json verify --seed 11 --count 30 --r 5,7",
        "conductor --r 7 --z -2 --s 11 --field both",
        "cluster --r 7 --z 7 --s 49 --q 7 --field K",
    ] {
        let (a, b) = (freycond(args), freycond(args));
        assert_eq!(a.stdout, b.stdout, "{}", args);
        assert_eq!(a.status.code(), b.status.code(), "{}", args);
    }
}

#[test]
fn json_round_trips() {
    let out = stdout(&freycond("--format json conductor --r 5 --z 5 --s 5"));
    let ideal: FactoredIdeal = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(serde_json::to_string(&ideal).unwrap(), out.trim());

    let out = stdout(&freycond("--format json conductor --r 5 --z 1 --s 3 --field both"));
    let both: Vec<FactoredIdeal> = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(both.len(), 2);
    assert_eq!(serde_json::to_string(&both).unwrap(), out.trim());

    let out = stdout(&freycond("--format json cluster --r 5 --z 1 --s 127 --q 5"));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    let pic = parse_cluster_json(&v["tree"].to_string()).unwrap();
    assert_eq!(serde_json::to_value(to_json(&pic)).unwrap(), v["tree"]);
    assert_eq!(render_ascii(&pic).unwrap(), v["picture"].as_str().unwrap());

    let out = stdout(&freycond("--format json signature rrp --a 2 --b 1 --cp 33 --r 5"));
    let rep: SignatureReport = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(rep.epsilon_r, Some(2));
    assert_eq!(serde_json::to_string(&rep).unwrap(), out.trim());

    let out = stdout(&freycond("--format json verify --count 5"));
    let rep: VerifyReport = serde_json::from_str(out.trim()).unwrap();
    assert!(rep.all_pass());
    assert_eq!(serde_json::to_string(&rep).unwrap(), out.trim());
}

#[test]
fn batch_input() {
    let dir = std::env::temp_dir().join(format!("freycond-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("requests.jsonl");
    std::fs::write(
        &path,
        concat!(
            "{\"command\":\"conductor\",\"r\":5,\"z\":1,\"s\":3}\n",
            "\n",
            "# comment\n",
            "{\"command\":\"conductor\",\"r\":5,\"z\":\"5\",\"s\":\"5\"}\n",
        ),
    )
    .unwrap();
    let arg = format!("--format json --input {}", path.display());
    let o = freycond(&arg);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    let second: FactoredIdeal = serde_json::from_str(&lines[1]).unwrap();
    assert_eq!(second.entries.len(), 2);

    std::fs::write(
        &path,
        concat!(
            "{\"command\":\"conductor\",\"r\":5,\"z\":1,\"s\":2}\n",
            "{\"command\":\"conductor\",\"r\":5,\"z\":1,\"s\":3}\n",
            "{\"command\":\"nope\"}\n",
        ),
    )
    .unwrap();
    let o = freycond(&arg);
    assert_eq!(o.status.code(), Some(2));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["exit_code"], 2);
    assert!(lines[1]["entries"].is_array());
    assert_eq!(lines[2]["exit_code"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
