//! End-to-end contract tests of the `nash-align` binary: file formats,
//! exit codes, and output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nash-align")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nash_align_cli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn write_game(path: &Path, c: &[&[f64]], a: &[f64]) {
    let c_json: Vec<Vec<f64>> = c.iter().map(|r| r.to_vec()).collect();
    let body = serde_json::json!({ "d": a.len(), "c": c_json, "a": a });
    fs::write(path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
}

#[test]
fn build_writes_expected_matrix_and_reports_psd() {
    let dir = tmp_dir("build");
    let probs = dir.join("probs.csv");
    fs::write(&probs, "sample_id,subpop_0,subpop_1\ns0,1.0,0.0\n").unwrap();
    let game = dir.join("game.json");
    let out = run(&[
        "build",
        "--probs",
        probs.to_str().unwrap(),
        "--shares",
        "1,1",
        "--output",
        game.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pass"), "{stdout}");
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&game).unwrap()).unwrap();
    assert_eq!(parsed["c"], serde_json::json!([[1.0, 1.0], [1.0, 1.0]]));
    assert_eq!(parsed["a"], serde_json::json!([0.5, 0.5]));
}

#[test]
fn build_identical_columns_gives_zero_matrix() {
    let dir = tmp_dir("build_zero");
    let probs = dir.join("probs.csv");
    fs::write(
        &probs,
        "sample_id,subpop_0,subpop_1,subpop_2\ns0,0.4,0.4,0.4\ns1,0.9,0.9,0.9\n",
    )
    .unwrap();
    let game = dir.join("game.json");
    let out = run(&[
        "build",
        "--probs",
        probs.to_str().unwrap(),
        "--shares",
        "2,1,1",
        "--output",
        game.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&game).unwrap()).unwrap();
    assert_eq!(
        parsed["c"],
        serde_json::json!([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    );
    assert_eq!(parsed["a"], serde_json::json!([0.5, 0.25, 0.25]));
}

#[test]
fn build_malformed_row_exits_2_with_line_number() {
    let dir = tmp_dir("build_bad");
    let probs = dir.join("probs.csv");
    fs::write(
        &probs,
        "sample_id,subpop_0,subpop_1\ns0,0.5,0.5\ns1,0.5,not_a_number\n",
    )
    .unwrap();
    let out = run(&[
        "build",
        "--probs",
        probs.to_str().unwrap(),
        "--shares",
        "1,1",
        "--output",
        dir.join("game.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn build_alignment_route_end_to_end() {
    let dir = tmp_dir("build_align");
    let probs = dir.join("probs.csv");
    fs::write(
        &probs,
        "sample_id,subpop_0,subpop_1\ns0,1.0,0.0\ns1,0.8,0.4\n",
    )
    .unwrap();
    let gt = dir.join("gt.csv");
    fs::write(
        &gt,
        "sample_id,option_index,gt_0,gt_1\ns0,0,1.0,0.0\ns1,1,0.5,0.5\n",
    )
    .unwrap();
    let opts = dir.join("opts.csv");
    fs::write(
        &opts,
        "sample_id,subpop,opt_0,opt_1\n\
         s0,0,1.0,0.0\ns0,1,0.0,1.0\ns1,0,0.8,0.2\ns1,1,0.4,0.6\n",
    )
    .unwrap();
    let game = dir.join("game.json");
    let out = run(&[
        "build",
        "--probs",
        probs.to_str().unwrap(),
        "--ground-truth",
        gt.to_str().unwrap(),
        "--model-options",
        opts.to_str().unwrap(),
        "--output",
        game.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&game).unwrap()).unwrap();
    // Subpop 0 aligns better with the ground truth on both samples:
    // raw_0 = (1.0 + 0.5)/2, raw_1 = (0.0 + 0.5)/2, a = (0.75, 0.25).
    let a = parsed["a"].as_array().unwrap();
    assert!((a[0].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((a[1].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn solve_symmetric_fixture_is_uniform_exit_0() {
    let dir = tmp_dir("solve_sym");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.5, 0.5]);
    let out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "2",
        "--beta-a",
        "1",
        "--beta-i",
        "1",
        "--beta-d",
        "1",
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["validity"], "interior_valid");
    let w = parsed["w"].as_array().unwrap();
    assert!((w[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(parsed["exploitability"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn solve_no_interior_with_boundary_exit_3() {
    let dir = tmp_dir("solve_boundary");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.99, 0.01]);
    let out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "2",
        "--beta-a",
        "10",
        "--beta-i",
        "1",
        "--beta-d",
        "1",
        "--boundary",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["validity"], "no_interior");
    assert!(parsed["min_weight"].as_f64().unwrap() < 0.0);
    let boundary = &parsed["boundary"];
    assert!(boundary["exploitability"].as_f64().unwrap() <= 1e-4);
    let profile = boundary["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 2);
    // Stage logs stream to stderr as JSON-lines.
    let stderr = String::from_utf8(out.stderr).unwrap();
    let first_line = stderr.lines().next().unwrap();
    let stage: serde_json::Value = serde_json::from_str(first_line).unwrap();
    assert!(stage["tau"].is_number() && stage["exploitability"].is_number());
}

#[test]
fn solve_singular_after_ridge_exit_4() {
    // Eigenvalues 0.5 and 0.5 + 5e-9: the ratio beta_d/beta_i sits on the
    // first pole, and the ridge retry lands exactly on the second.
    let dir = tmp_dir("solve_singular");
    let game = dir.join("game.json");
    write_game(
        &game,
        &[&[0.0, 0.0, 0.0], &[0.0, 0.5, 0.0], &[0.0, 0.0, 0.500000005]],
        &[0.4, 0.3, 0.3],
    );
    let out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "2",
        "--beta-a",
        "1",
        "--beta-i",
        "1",
        "--beta-d",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["validity"], "singular");
    assert!(parsed["w"].is_null());
}

#[test]
fn sweep_symmetric_fixture_has_zero_metrics_and_is_deterministic() {
    let dir = tmp_dir("sweep_sym");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.5, 0.5]);
    let run_once = |tag: &str| -> (Vec<u8>, Vec<u8>) {
        let grid = dir.join(format!("grid_{tag}.csv"));
        let metrics = dir.join(format!("metrics_{tag}.json"));
        let out = run(&[
            "sweep",
            "--input",
            game.to_str().unwrap(),
            "--agents",
            "3",
            "--fixed",
            "beta-i",
            "--resolution",
            "10",
            "--jobs",
            "2",
            "--grid-out",
            grid.to_str().unwrap(),
            "--metrics-out",
            metrics.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        (fs::read(&grid).unwrap(), fs::read(&metrics).unwrap())
    };
    let (csv1, metrics1) = run_once("a");
    let (csv2, metrics2) = run_once("b");
    assert_eq!(csv1, csv2);
    assert_eq!(metrics1, metrics2);
    let parsed: serde_json::Value = serde_json::from_slice(&metrics1).unwrap();
    assert_eq!(parsed["exclusion"].as_f64().unwrap(), 0.0);
    assert_eq!(parsed["invalid"].as_f64().unwrap(), 0.0);
    assert_eq!(parsed["conditional_exclusion"].as_f64().unwrap(), 0.0);
    let text = String::from_utf8(csv1).unwrap();
    assert!(text.starts_with("beta_a,beta_d,class,w_0,w_1\n"));
    assert_eq!(text.lines().count(), 101);
    assert!(text.lines().skip(1).all(|l| l.contains(",valid,")));
}

#[test]
fn sweep_crafted_fixture_metrics_match_hand_counts() {
    // 4x4 grid over (beta_a, beta_i) at beta_d = 0.01 on the dominant-
    // diagonal instance: a known mix of valid, excluded, and invalid
    // cells, with the metrics recomputed by counting class labels out of
    // the emitted CSV.
    let dir = tmp_dir("sweep_counts");
    let game = dir.join("game.json");
    let c: Vec<Vec<f64>> = {
        let mut c = vec![vec![0.0; 5]; 5];
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    c[i][j] = if i == 0 || j == 0 { 0.09 } else { 0.05 };
                }
            }
        }
        for i in 0..5 {
            c[i][i] = (0..5).filter(|&j| j != i).map(|j| c[i][j]).sum();
        }
        c
    };
    let refs: Vec<&[f64]> = c.iter().map(|r| r.as_slice()).collect();
    write_game(&game, &refs, &[0.195, 0.225, 0.20, 0.195, 0.185]);
    let grid = dir.join("grid.csv");
    let metrics = dir.join("metrics.json");
    let out = run(&[
        "sweep",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "16",
        "--fixed",
        "beta-d",
        "--fixed-value",
        "0.01",
        "--resolution",
        "4",
        "--grid-out",
        grid.to_str().unwrap(),
        "--metrics-out",
        metrics.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // Count class labels straight out of the CSV and check the metrics
    // file against those counts.
    let text = fs::read_to_string(&grid).unwrap();
    let mut counts = (0usize, 0usize, 0usize); // valid, excluded, invalid
    for line in text.lines().skip(1) {
        let class = line.split(',').nth(2).unwrap();
        match class {
            "valid" => counts.0 += 1,
            "excluded" => counts.1 += 1,
            "invalid" => counts.2 += 1,
            other => panic!("unknown class {other:?}"),
        }
    }
    let total = (counts.0 + counts.1 + counts.2) as f64;
    assert_eq!(total, 16.0);
    assert!(counts.1 > 0 && counts.2 > 0, "corner mix lost: {counts:?}");
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&metrics).unwrap()).unwrap();
    let exclusion = parsed["exclusion"].as_f64().unwrap();
    let invalid = parsed["invalid"].as_f64().unwrap();
    let conditional = parsed["conditional_exclusion"].as_f64().unwrap();
    assert!((exclusion - counts.1 as f64 / total).abs() < 1e-12);
    assert!((invalid - counts.2 as f64 / total).abs() < 1e-12);
    assert!((conditional - counts.1 as f64 / (total - counts.2 as f64)).abs() < 1e-12);
}

#[test]
fn sweep_render_emits_p6() {
    let dir = tmp_dir("sweep_render");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.5, 0.5]);
    let image = dir.join("heat.ppm");
    let out = run(&[
        "sweep",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "2",
        "--fixed",
        "beta-d",
        "--resolution",
        "4",
        "--focal",
        "0",
        "--grid-out",
        dir.join("g.csv").to_str().unwrap(),
        "--metrics-out",
        dir.join("m.json").to_str().unwrap(),
        "--render",
        image.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let bytes = fs::read(&image).unwrap();
    assert!(bytes.starts_with(b"P6\n4 4\n255\n"));
    assert_eq!(bytes.len(), b"P6\n4 4\n255\n".len() + 3 * 16);
    // Uniform weights everywhere: constant color, neither black nor white.
    let body = &bytes[b"P6\n4 4\n255\n".len()..];
    let first = [body[0], body[1], body[2]];
    assert_ne!(first, [0, 0, 0]);
    assert_ne!(first, [255, 255, 255]);
    for px in body.chunks(3) {
        assert_eq!(px, first);
    }
}

#[test]
fn verify_command_certifies_solved_profile() {
    let dir = tmp_dir("verify");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.7, 0.3]);
    let solve_out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "2",
        "--beta-a",
        "1",
        "--beta-i",
        "1",
        "--beta-d",
        "1",
    ]);
    assert_eq!(solve_out.status.code(), Some(0));
    let solved: serde_json::Value = serde_json::from_slice(&solve_out.stdout).unwrap();
    let profile_path = dir.join("profile.json");
    fs::write(
        &profile_path,
        serde_json::to_string(&serde_json::json!({ "w": solved["w"] })).unwrap(),
    )
    .unwrap();
    let out = run(&[
        "verify",
        "--input",
        game.to_str().unwrap(),
        "--profile",
        profile_path.to_str().unwrap(),
        "--agents",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["exploitability"].as_f64().unwrap() <= 1e-8);
    assert_eq!(parsed["per_agent_gain"].as_array().unwrap().len(), 2);
}

#[test]
fn roots_command_finds_hand_root() {
    let dir = tmp_dir("roots");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 2.0]], &[0.5, 0.5]);
    let out = run(&[
        "roots",
        "--input",
        game.to_str().unwrap(),
        "--range-x",
        "0.1,3.9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let roots = parsed["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let zero = dir.join("zero.json");
    write_game(&zero, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.5, 0.5]);
    let out = run(&[
        "roots",
        "--input",
        zero.to_str().unwrap(),
        "--range-x",
        "0.1,100",
    ]);
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["roots"].as_array().unwrap().is_empty());
}

#[test]
fn build_solve_round_trip_preserves_data() {
    let dir = tmp_dir("round_trip");
    let probs = dir.join("probs.csv");
    fs::write(
        &probs,
        "sample_id,subpop_0,subpop_1,subpop_2\n\
         s0,0.91,0.13,0.52\ns1,0.27,0.64,0.08\ns2,0.55,0.95,0.33\n",
    )
    .unwrap();
    let game = dir.join("game.json");
    let out = run(&[
        "build",
        "--probs",
        probs.to_str().unwrap(),
        "--shares",
        "5,3,2",
        "--psi",
        "power:2",
        "--output",
        game.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // Re-serializing the ingested file reproduces it byte for byte, so the
    // solve sees exactly the built C and a.
    let first = fs::read_to_string(&game).unwrap();
    let parsed: nash_align::cli::GameFile = serde_json::from_str(&first).unwrap();
    let again = dir.join("game2.json");
    parsed.write(&again).unwrap();
    assert_eq!(first, fs::read_to_string(&again).unwrap());

    let out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--agents",
        "4",
        "--beta-a",
        "1",
        "--beta-i",
        "1",
        "--beta-d",
        "1",
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["exploitability"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn help_lists_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Exit codes"), "{text}");
    assert!(text.contains("NASH_ALIGN_SEED"), "{text}");
}

#[test]
fn missing_agents_flag_is_refused() {
    let dir = tmp_dir("no_agents");
    let game = dir.join("game.json");
    write_game(&game, &[&[0.0, 0.0], &[0.0, 0.0]], &[0.5, 0.5]);
    let out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--beta-a",
        "1",
        "--beta-i",
        "1",
        "--beta-d",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
