use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use permpat::oracle::{brute_force_match, is_separable};
use permpat::{
    canonical_grid, canonical_grid_decomposition, greedy_monotone_partition, parse_permutation, random_permutation,
    verify_embedding, verify_grid, verify_grid_points, verify_wide, Embedding, GridWitness, MergeSequence, Point,
    PointSet,
};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with_stdin(args: &[&str], stdin: Option<&str>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_permpat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().expect("stdin is piped");
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).expect("stdin accepts input");
        }
    }
    let Output { status, stdout, stderr } = child.wait_with_output().expect("binary exits");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(stderr).expect("utf-8 stderr"),
    }
}

fn run(args: &[&str]) -> Run {
    run_with_stdin(args, None)
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn corpus_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/instances.txt").to_str().unwrap().to_string()
}

#[test]
fn introductory_pattern_is_found() {
    let out = run(&["match", "-p", "1 3 2", "-t", "3 2 1 5 6 7 4"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "FOUND\n"));
}

#[test]
fn decreasing_pattern_is_avoided() {
    let out = run(&["match", "-p", "4 3 2 1", "-t", "3 2 1 5 6 7 4"]);
    assert_eq!((out.code, out.stdout.as_str()), (1, "NOT FOUND\n"));
}

#[test]
fn single_point_matches_itself() {
    let out = run(&["match", "-p", "1", "-t", "1"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "FOUND\n"));
}

#[test]
fn witness_is_a_verified_embedding() {
    let out = run(&["match", "-p", "1 3 2", "-t", "3 2 1 5 6 7 4", "--witness"]);
    assert_eq!(out.stdout, golden("match_witness.out"));
    let body = out.stdout.strip_prefix("FOUND\n").unwrap();
    let phi = Embedding::parse(body).unwrap();
    let sigma = parse_permutation("1 3 2").unwrap();
    let pi = parse_permutation("3 2 1 5 6 7 4").unwrap();
    assert!(verify_embedding(&sigma, &pi, &phi).unwrap());
    assert_eq!(phi.to_string(), body);
}

#[test]
fn every_backend_answers_the_same() {
    let pi = "6 3 8 1 5 2 7 4";
    for pattern in ["2 4 1 3", "3 1 4 2", "1 2 3 4", "4 3 2 1", "2 1 3"] {
        let expected = brute_force_match(&parse_permutation(pattern).unwrap(), &parse_permutation(pi).unwrap());
        for alg in ["auto", "bruteforce", "fpt", "monotone", "polyspace"] {
            let out = run(&["match", "-p", pattern, "-t", pi, "-a", alg]);
            assert_eq!(out.code, if expected.is_some() { 0 } else { 1 }, "{alg} on {pattern}");
        }
    }
}

#[test]
fn supplied_decomposition_and_partition_are_used() {
    let dir = TempDir::new().unwrap();
    let text = "3 2 7 8 4 6 1 5";
    let pi = parse_permutation(text).unwrap();
    let seq = write(&dir, "seq.txt", &run(&["decompose", "-t", text, "--r", "2"]).stdout);
    let part = write(&dir, "part.txt", &greedy_monotone_partition(&pi).to_string());
    for pattern in ["2 1 3", "3 2 1", "2 4 1 3"] {
        let expected = if brute_force_match(&parse_permutation(pattern).unwrap(), &pi).is_some() { 0 } else { 1 };
        let fpt = run(&["match", "-p", pattern, "-t", text, "-a", "fpt", "--decomposition", s(&seq)]);
        let mono = run(&["match", "-p", pattern, "-t", text, "-a", "monotone", "--partition", s(&part)]);
        assert_eq!((fpt.code, mono.code), (expected, expected), "{pattern}");
    }
    let misuse = run(&["match", "-p", "1", "-t", text, "--decomposition", s(&seq)]);
    assert_eq!(misuse.code, 2);
}

#[test]
fn inputs_come_from_files_and_stdin() {
    let dir = TempDir::new().unwrap();
    let text = write(&dir, "text.txt", "3 2 1 5 6 7 4\n");
    let out = run_with_stdin(&["match", "-p", "-", "-t", s(&text)], Some("1 3 2\n"));
    assert_eq!((out.code, out.stdout.as_str()), (0, "FOUND\n"));
}

#[test]
fn malformed_input_exits_with_two_and_no_payload() {
    for args in [
        &["match", "-p", "1 1", "-t", "1 2"][..],
        &["match", "-p", "1 2", "-t", "missing-file.txt"],
        &["width", "--text", "0 1"],
        &["gen", "--random", "0"],
        &["verify", "--text", "2 1", "--seq", "1 2 9", "--d", "2"],
    ] {
        let out = run(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(out.stderr.starts_with("error:"), "{args:?}: {}", out.stderr);
    }
}

#[test]
fn gen_grid_is_canonical() {
    assert_eq!(run(&["gen", "--grid", "2", "2"]).stdout, "3 1 4 2\n");
    let three = run(&["gen", "--grid", "3", "3"]).stdout;
    assert_eq!(three, golden("gen_grid_3_3.out"));
    assert_eq!(parse_permutation(&three).unwrap(), canonical_grid(3, 3).unwrap());
}

#[test]
fn gen_is_deterministic_and_separable() {
    let a = run(&["gen", "--random", "5", "--seed", "7"]).stdout;
    assert_eq!(a, run(&["gen", "--random", "5", "--seed", "7"]).stdout);
    assert_eq!(parse_permutation(&a).unwrap(), random_permutation(5, 7));
    for seed in ["1", "2", "3"] {
        let sep = run(&["gen", "--separable", "6", "--seed", seed]).stdout;
        assert!(is_separable(&parse_permutation(&sep).unwrap()), "{sep}");
    }
}

#[test]
fn width_of_the_two_by_two_grid() {
    let out = run(&["width", "--text", "3 1 4 2"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "2\n"));
    assert_eq!(run(&["width", "--text", "1 2 3 4 5 6 7 8 9 10"]).code, 2);
}

#[test]
fn decompose_example_round_trips() {
    let text = "3 2 7 8 4 6 1 5";
    let out = run(&["decompose", "-t", text, "--r", "2", "--verify"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, golden("decompose_example.out"));
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[7].starts_with("# width ") && lines[7].ends_with(" budget 384"));
    let seq = MergeSequence::parse(&out.stdout).unwrap();
    assert_eq!(seq.len(), 7);
    assert_eq!(seq.to_string(), lines[..7].join("\n") + "\n");
    assert!(verify_wide(&parse_permutation(text).unwrap(), &seq, 384).unwrap());
}

#[test]
fn decompose_single_point_is_empty() {
    let out = run(&["decompose", "-t", "1", "--r", "2"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "# width 1 budget 384\n"));
}

#[test]
fn decompose_with_small_budget_prints_dense_cells() {
    let grid = canonical_grid(5, 5).unwrap().to_string();
    let out = run(&["decompose", "-t", &grid, "--budget", "2"]);
    assert_eq!(out.code, 0);
    let body = out.stdout.strip_prefix("CELLS\n").unwrap();
    let cells = PointSet::parse(body).unwrap();
    assert!(cells.len() >= 2);
    assert_eq!(cells.to_string(), body);
}

#[test]
fn decompose_large_random_text_finds_a_grid() {
    let dir = TempDir::new().unwrap();
    let pi = random_permutation(200_000, 1);
    let text = write(&dir, "text.txt", &pi.to_string());
    let out = run(&["decompose", "-t", s(&text), "--r", "2", "--verify"]);
    assert_eq!(out.code, 0);
    let body = out.stdout.strip_prefix("GRID\n").unwrap();
    let w = GridWitness::parse(body).unwrap();
    assert!(verify_grid(&pi, &w, 2).unwrap());
    assert_eq!(w.to_string(), body);
}

#[test]
fn verify_reports_first_violation() {
    let dir = TempDir::new().unwrap();
    let seq = write(&dir, "seq.txt", &canonical_grid_decomposition(2).unwrap().to_string());
    let ok = run(&["verify", "--text", "3 1 4 2", "--seq", s(&seq), "--d", "2"]);
    assert_eq!((ok.code, ok.stdout.as_str()), (0, "OK\n"));
    let bad = run(&["verify", "--text", "3 1 4 2", "--seq", s(&seq), "--d", "1"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.starts_with("FAIL step 1 views "), "{}", bad.stdout);
}

#[test]
fn grid_on_the_full_square() {
    let dir = TempDir::new().unwrap();
    let points: Vec<Point> = (1..=200).flat_map(|x| (1..=200).map(move |y| Point::new(x, y))).collect();
    let set = PointSet::new(200, 200, points.clone()).unwrap();
    let file = write(&dir, "full.txt", &set.to_string());
    let out = run(&["grid", "--points", s(&file), "--r", "2"]);
    assert_eq!(out.code, 0);
    let w = GridWitness::parse(&out.stdout).unwrap();
    assert!(verify_grid_points(&points, &w, 2).unwrap());
}

#[test]
fn grid_below_density_is_searched_exhaustively() {
    let dir = TempDir::new().unwrap();
    let diagonal = write(&dir, "diag.txt", "4 4\n1 1\n2 2\n3 3\n4 4\n");
    let out = run(&["grid", "--points", s(&diagonal), "--r", "2"]);
    assert_eq!((out.code, out.stdout.as_str()), (1, "NOT FOUND\n"));
    let square = write(&dir, "square.txt", "2 2\n1 1\n1 2\n2 1\n2 2\n");
    let out = run(&["grid", "--points", s(&square), "--r", "2"]);
    assert_eq!(out.code, 0);
    assert!(GridWitness::parse(&out.stdout).is_ok());
}

#[test]
fn bruteforce_and_auto_agree_on_the_corpus() {
    let corpus = std::fs::read_to_string(corpus_path()).unwrap();
    let mut count = 0;
    for line in corpus.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (pattern, text) = line.split_once('|').unwrap();
        let brute = run(&["match", "-p", pattern.trim(), "-t", text.trim(), "-a", "bruteforce"]);
        let auto = run(&["match", "-p", pattern.trim(), "-t", text.trim(), "-a", "auto"]);
        assert_eq!(brute.code, auto.code, "{line}");
        assert!(brute.code <= 1, "{line}: {}", brute.stderr);
        count += 1;
    }
    assert!(count >= 50);
}

#[test]
fn corpus_batch_matches_golden() {
    let expected = golden("corpus.out");
    for alg in ["bruteforce", "auto", "polyspace"] {
        let out = run(&["match", "--corpus", &corpus_path(), "-a", alg]);
        assert_eq!(out.code, 0, "{alg}: {}", out.stderr);
        assert_eq!(out.stdout, expected, "{alg}");
    }
}

#[test]
fn bench_rows_grow_with_n() {
    let out = run(&["bench", "--sizes", "2000,20000,200000", "--repeats", "3"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some("n,algorithm,millis"));
    let rows: Vec<(usize, String, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].to_string(), f[2].parse().unwrap())
        })
        .collect();
    for alg in ["decompose", "auto"] {
        let series: Vec<&(usize, String, f64)> = rows.iter().filter(|r| r.1 == alg).collect();
        assert_eq!(series.len(), 3, "{alg}");
        for w in series.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].2 < w[1].2, "{alg}: {w:?}");
        }
    }
}
