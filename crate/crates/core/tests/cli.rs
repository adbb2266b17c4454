use std::process::{Command, Output};

use serde_json::Value;

fn hsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsp"))
        .args(args)
        .env_remove("HSP_SEED")
        .output()
        .expect("hsp runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn decompose_reports_the_split() {
    let v = json(&hsp(&["decompose", "--N", "45", "--p", "3", "--phi11", "31"]));
    assert_eq!(v["M0"], 5);
    assert_eq!(v["inner"]["N"], 9);
    assert_eq!(v["inner"]["p"], 3);
    assert_eq!(v["inner"]["phi11"], 4);
    assert_eq!(v["twist_index"], 1);
}

#[test]
fn enumerate_count_matches_the_lattice() {
    let v = json(&hsp(&["enumerate-subgroups", "--p", "3", "--r", "1", "--t0", "1"]));
    assert_eq!(v["count"], 12);
    assert_eq!(v["subgroups"].as_array().unwrap().len(), 12);
    let v = json(&hsp(&["enumerate-subgroups", "--p", "3", "--r", "2"]));
    assert_eq!(v["count"], 20);
}

#[test]
fn direct_products_take_the_abelian_route() {
    let v = json(&hsp(&[
        "solve-hsp", "--N", "15", "--p", "3", "--phi11", "1", "--hidden", "<(5,1)>", "--verify",
    ]));
    assert_eq!(v["solution"]["route"], "abelian");
    assert_eq!(v["correct"], true);
    assert_eq!(v["order"], 3);
}

#[test]
fn family_groups_are_solved() {
    for hidden in ["T(1,1,2)", "C(0,1)", "Y(1)", "C(1,2)"] {
        let v = json(&hsp(&[
            "solve-hsp", "--N", "18", "--p", "3", "--phi11", "7", "--hidden", hidden, "--seed", "5", "--verify",
        ]));
        assert_eq!(v["correct"], true, "{hidden}");
        assert_eq!(v["recovered"], hidden);
    }
}

#[test]
fn distribution_is_a_list_of_triples() {
    let v = json(&hsp(&[
        "distribution", "--p", "3", "--r", "2", "--t", "0", "--s", "1", "--hidden", "T(0,1,1)",
    ]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    let support: Vec<(u64, u64)> = rows
        .iter()
        .filter(|r| r[2].as_f64().unwrap() > 1e-12)
        .map(|r| (r[0].as_u64().unwrap(), r[1].as_u64().unwrap()))
        .collect();
    assert_eq!(support, vec![(0, 0), (1, 2), (2, 1)]);
}

#[test]
fn reports_repeat_bit_for_bit() {
    let args = [
        "estimate-success", "--N", "18", "--p", "3", "--phi11", "7", "--hidden", "C(1,1)", "--k", "4",
        "--trials", "300", "--seed", "11",
    ];
    let a = hsp(&args);
    let b = hsp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["trials"], 300);
    assert_eq!(v["solver"], "solve_2pr");
    assert!(v.get("wall_clock_ms").is_none());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let args = [
        "estimate-success", "--N", "18", "--p", "3", "--phi11", "7", "--hidden", "C(1,1)", "--k", "3",
        "--trials", "50",
    ];
    let with_env = Command::new(env!("CARGO_BIN_EXE_hsp"))
        .args(args)
        .env("HSP_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&with_env)["seed"], 77);
    assert_eq!(json(&hsp(&args))["seed"], 0);
}

#[test]
fn csv_export_has_header_and_row() {
    let out = hsp(&[
        "estimate-success", "--N", "18", "--p", "3", "--phi11", "7", "--hidden", "Y(0)", "--trials", "10", "--csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("N,p,phi11,hidden"));
    assert!(lines[1].starts_with("18,3,7,\"Y(0)\",solve_2pr,8,10,0,10,"));
}

#[test]
fn exit_codes() {
    assert_eq!(hsp(&["--help"]).status.code(), Some(0));
    assert_eq!(hsp(&["decompose", "--N", "45"]).status.code(), Some(64));
    assert_eq!(hsp(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(hsp(&["decompose", "--N", "45", "--p", "3", "--phi11", "x"]).status.code(), Some(64));
    // 7 - 1 is divisible by 3.
    assert_eq!(hsp(&["decompose", "--N", "63", "--p", "3", "--phi11", "43"]).status.code(), Some(1));
    // 2 is not of order dividing 3 modulo 45.
    assert_eq!(hsp(&["decompose", "--N", "45", "--p", "3", "--phi11", "2"]).status.code(), Some(1));
    assert_eq!(
        hsp(&["solve-hsp", "--N", "18", "--p", "3", "--phi11", "7", "--hidden", "T(0,0,1)"]).status.code(),
        Some(1)
    );
    assert_eq!(
        hsp(&["estimate-success", "--N", "18", "--p", "3", "--phi11", "7", "--hidden", "Y(0)", "--trials", "0"])
            .status
            .code(),
        Some(1)
    );
}
