use std::io::Write;
use std::process::{Command, Output, Stdio};

use ldilp::dp::{EtaPolicy, Mode};
use ldilp_cli::bench::{loglog_slope, parse_delta_range, parse_k_range, BenchRow, CSV_HEADER};
use ldilp_cli::generate::{bench_instance, generate, oracle_family, GenOptions};
use ldilp_cli::io::{parse_instance, InstanceFile, ResultFile};
use ldilp_cli::solve::{parse_eta, run_solve, SolveOptions};
use ldilp_cli::CliError;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ldilp(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ldilp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn result_of(out: &Output) -> ResultFile {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn gen_opts(k: usize, n: usize, max_entry: i64, seed: u64) -> GenOptions {
    GenOptions {
        k,
        n,
        max_entry,
        seed,
        feasible: false,
        bounded: false,
    }
}

#[test]
fn solve_small_optimum() {
    let out = ldilp(
        &["solve", "-"],
        r#"{"k":1,"n":2,"A":[1,1],"b":[3],"c":[1,2]}"#,
    );
    let r = result_of(&out);
    assert_eq!(r.status, "optimal");
    assert_eq!(r.objective, Some(6));
    assert_eq!(r.x, Some(vec![0, 3]));
}

#[test]
fn feasibility_parity_gap() {
    let out = ldilp(
        &["solve", "--mode", "feasibility", "-"],
        r#"{"k":1,"n":1,"A":[2],"b":[3]}"#,
    );
    let r = result_of(&out);
    assert_eq!(r.status, "infeasible");
    assert_eq!(r.objective, None);
    assert_eq!(r.x, None);
}

#[test]
fn result_schema() {
    let out = ldilp(
        &["solve", "--stats", "-"],
        r#"{"k":2,"n":3,"A":[[1,1,1],[0,1,2]],"b":[4,4],"c":[1,0,2]}"#,
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "optimal");
    assert!(v["objective"].is_i64());
    assert!(v["x"].is_array());
    let s = &v["stats"];
    for key in ["eta", "rho"] {
        assert!(s[key].is_u64(), "{key}");
    }
    assert!(s["delta"].is_string());
    assert!(s["wall_ms"].is_number());
    assert!(!s["level_sizes"].as_array().unwrap().is_empty());
    assert_eq!(s["shift_y"].as_array().unwrap().len(), 3);
}

#[test]
fn output_is_deterministic_without_stats() {
    let text = r#"{"k":2,"n":4,"A":[1,2,1,3,0,1,-1,2],"b":[9,3],"c":[2,1,3,-1]}"#;
    let a = ldilp(&["solve", "-"], text);
    let b = ldilp(&["solve", "--threads", "4", "-"], text);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let malformed = ldilp(&["solve", "-"], r#"{"k":1,"n":2,"A":[1],"b":[3]}"#);
    assert_eq!(malformed.status.code(), Some(1));
    let not_json = ldilp(&["solve", "-"], "{");
    assert_eq!(not_json.status.code(), Some(1));
    let unknown = ldilp(&["solve", "-"], r#"{"k":1,"n":1,"A":[1],"b":[1],"x":0}"#);
    assert_eq!(unknown.status.code(), Some(1));
    let usage = ldilp(&["solve", "--eta", "zero", "-"], "");
    assert_eq!(usage.status.code(), Some(1));
    let rank = ldilp(&["solve", "-"], r#"{"k":2,"n":2,"A":[1,2,2,4],"b":[1,2]}"#);
    assert_eq!(rank.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&rank.stderr).contains("rank"));
    // Too few levels to reach b from the leaves: the exhaustive search finds
    // the point the truncated program misses.
    let mismatch = ldilp(
        &["solve", "--rho", "1", "--oracle-check", "-"],
        r#"{"k":1,"n":1,"A":[1],"b":[100],"c":[1]}"#,
    );
    assert_eq!(mismatch.status.code(), Some(3));
}

#[test]
fn escalation_error_exit_code() {
    let e = CliError::from(ldilp::Error::EscalationMismatch("eta 1 vs 2".into()));
    assert_eq!(e.exit_code(), 4);
    assert_eq!(
        CliError::Solver(ldilp::Error::SingularMatrix).exit_code(),
        5
    );
}

#[test]
fn escalation_runs_for_aggressive() {
    let text = r#"{"k":2,"n":4,"A":[1,1,1,1,0,3,1,2],"b":[6,7],"c":[1,2,0,1]}"#;
    for args in [
        vec!["solve", "--eta", "aggressive", "-"],
        vec!["solve", "--eta", "2", "--escalate", "-"],
        vec!["solve", "--eta", "aggressive", "--no-escalate", "-"],
    ] {
        let r = result_of(&ldilp(&args, text));
        assert_eq!(r.status, "optimal");
    }
}

#[test]
fn oracle_check_on_generated_instances() {
    for seed in 0..50u64 {
        let s = seed.to_string();
        let mut args = vec![
            "generate",
            "--k",
            "2",
            "--n",
            "4",
            "--max-entry",
            "3",
            "--seed",
            &s,
        ];
        if seed % 2 == 0 {
            args.push("--feasible");
        }
        let inst = ldilp(&args, "");
        assert!(inst.status.success());
        let mode = if seed % 3 == 0 {
            "feasibility"
        } else {
            "optimize"
        };
        let out = ldilp(
            &["solve", "--oracle-check", "--mode", mode, "-"],
            std::str::from_utf8(&inst.stdout).unwrap(),
        );
        assert!(
            out.status.success(),
            "seed {seed}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn generate_is_byte_identical() {
    let args = [
        "generate",
        "--k",
        "2",
        "--n",
        "5",
        "--max-entry",
        "3",
        "--seed",
        "7",
    ];
    let a = ldilp(&args, "");
    let b = ldilp(&args, "");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let inst = parse_instance(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!((inst.k(), inst.n()), (2, 5));
    assert!(inst.a().iter().flatten().all(|v| v.abs() <= 3));
}

#[test]
fn generate_resamples_to_full_rank() {
    for seed in 0..40 {
        let s = seed.to_string();
        let out = ldilp(
            &[
                "generate",
                "--k",
                "3",
                "--n",
                "3",
                "--max-entry",
                "1",
                "--seed",
                &s,
            ],
            "",
        );
        assert!(parse_instance(std::str::from_utf8(&out.stdout).unwrap()).is_ok());
    }
}

#[test]
fn planted_instances_are_feasible() {
    for seed in 0..15 {
        let inst = generate(&GenOptions {
            feasible: true,
            ..gen_opts(2, 4, 3, seed)
        })
        .unwrap();
        let text = InstanceFile::from_instance(&inst, None).to_json();
        let opts = SolveOptions {
            mode: Mode::Feasibility,
            ..SolveOptions::default()
        };
        assert_eq!(run_solve(&text, &opts).unwrap().status, "feasible");
    }
}

#[test]
fn bounded_generator_has_positive_first_row() {
    let inst = generate(&GenOptions {
        bounded: true,
        ..gen_opts(3, 6, 4, 11)
    })
    .unwrap();
    assert!(inst.a()[0].iter().all(|&v| v >= 1));
    assert!(generate(&gen_opts(3, 2, 1, 0)).is_err());
    assert!(generate(&gen_opts(1, 2, 0, 0)).is_err());
}

#[test]
fn bench_rows_and_header() {
    let out = ldilp(
        &[
            "bench",
            "--k-range",
            "2..3",
            "--delta-range",
            "1,2",
            "--repetitions",
            "3",
        ],
        "",
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,delta,eta,rho,max_level,opt_ms,feas_ms");
    assert_eq!(lines.len(), 1 + 2 * 3 * 2);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 7);
    }
}

#[test]
fn range_parsing() {
    assert_eq!(parse_k_range("2..3").unwrap(), vec![2, 3]);
    assert_eq!(parse_k_range("4").unwrap(), vec![4]);
    assert!(parse_k_range("3..2").is_err());
    assert!(parse_k_range("0").is_err());
    assert_eq!(parse_delta_range("8,16,32", 5).unwrap(), vec![8, 16, 32]);
    assert_eq!(
        parse_delta_range("4..40", 5).unwrap(),
        vec![4, 7, 13, 22, 40]
    );
    assert_eq!(parse_delta_range("1..2", 5).unwrap(), vec![1, 2]);
    assert!(parse_delta_range("x", 5).is_err());
    assert_eq!(parse_eta("safe"), Ok(EtaPolicy::Safe));
    assert_eq!(parse_eta("7"), Ok(EtaPolicy::Explicit(7)));
    assert!(parse_eta("0").is_err());
    assert_eq!(CSV_HEADER.split(',').count(), 7);
}

#[test]
fn slope_of_power_law() {
    let pts: Vec<(f64, f64)> = (1..6)
        .map(|i| (i as f64, 3.0 * (i as f64).powi(2)))
        .collect();
    assert!((loglog_slope(&pts) - 2.0).abs() < 1e-9);
}

#[test]
fn bench_family_has_target_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [3, 10, 40] {
        let inst = bench_instance(2, d, &mut rng);
        let delta = ldilp::dp::delta_bound(&inst).unwrap();
        assert_eq!(delta, ldilp::BigInt::from(d));
    }
    let row = BenchRow {
        k: 1,
        delta_hat: 1.into(),
        eta: 2,
        rho: 1,
        max_level: 19,
        opt_ms: 0.0,
        feas_ms: 0.0,
        precond_delta: ldilp::Rational::from_integer(1.into()),
    };
    assert!(row.within_state_bound());
    assert!(!BenchRow {
        max_level: 20,
        ..row
    }
    .within_state_bound());
}

#[test]
fn oracle_family_shape() {
    let fam = oracle_family(30, 5);
    for (i, case) in fam.iter().enumerate() {
        let inst = &case.instance;
        assert_eq!(inst.k(), 1 + i % 3);
        assert!(inst.n() > inst.k() && inst.n() <= 7);
        assert!(inst.a().iter().flatten().all(|v| v.abs() <= 4));
        assert!(inst.a()[0].iter().all(|&v| v >= 1));
    }
}

#[test]
fn nested_matrix_and_missing_objective() {
    let inst =
        parse_instance(r#"{"k":2,"n":2,"A":[[1,0],[0,1]],"b":[1,2],"comment":"id"}"#).unwrap();
    assert_eq!(inst.c(), &[0, 0]);
    assert!(matches!(
        parse_instance(r#"{"k":2,"n":2,"A":[[1,0]],"b":[1,2]}"#),
        Err(CliError::Malformed(_))
    ));
    assert!(matches!(
        parse_instance(r#"{"k":1,"n":2,"A":[1,1],"b":[1],"c":[1]}"#),
        Err(CliError::Malformed(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_instances_round_trip(k in 1usize..4, extra in 0usize..4, m in 1i64..5, seed: u64) {
        let opts = gen_opts(k, k + extra, m, seed);
        let inst = generate(&opts).unwrap();
        prop_assert_eq!(&generate(&opts).unwrap(), &inst);
        prop_assert!(inst.a().iter().flatten().all(|v| v.abs() <= m));
        let text = InstanceFile::from_instance(&inst, Some("p".into())).to_json();
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn planted_right_hand_side_is_reachable(k in 1usize..3, extra in 1usize..3, seed: u64) {
        let inst = generate(&GenOptions { feasible: true, ..gen_opts(k, k + extra, 3, seed) }).unwrap();
        let text = InstanceFile::from_instance(&inst, None).to_json();
        let opts = SolveOptions { mode: Mode::Feasibility, oracle_check: true, ..SolveOptions::default() };
        prop_assert_eq!(run_solve(&text, &opts).unwrap().status, "feasible");
    }
}
