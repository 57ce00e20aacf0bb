use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use mps_core::pbsolver::parse_lp;

fn mps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mps")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mps-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_k5_and_export() {
    let dir = scratch("solve");
    let file = dir.join("k5.dimacs");
    let mut text = "c K5\np edge 5 10\n".to_string();
    for u in 1..=5 {
        for v in u + 1..=5 {
            text += &format!("e {u} {v}\n");
        }
    }
    fs::write(&file, text).unwrap();
    let lp = dir.join("k5.lp");
    let opb = dir.join("k5.opb");
    for f in ["kuratowski", "facialwalks", "schnyder", "leftright"] {
        let o = mps(&[
            "solve",
            file.to_str().unwrap(),
            "--formulation",
            f,
            "--export-lp",
            lp.to_str().unwrap(),
            "--export-opb",
            opb.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{f}: {}", String::from_utf8_lossy(&o.stderr));
        let s = stdout(&o);
        assert!(s.contains("status optimal\nobjective 9\n"), "{s}");
        assert_eq!(s.lines().filter(|l| l.starts_with("deleted")).count(), 1);
        assert!(parse_lp(&fs::read_to_string(&lp).unwrap()).is_ok());
        assert!(fs::read_to_string(&opb).unwrap().contains(">="));
    }
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let bad = dir.join("bad.gml");
    fs::write(&bad, "graph [ node [ id 0 ] edge [ source 0 ").unwrap();
    assert_eq!(mps(&["solve", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(mps(&["solve", dir.join("missing.txt").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(mps(&["gen", "--n", "5", "--d", "3"]).status.code(), Some(1));
    assert_eq!(mps(&["no-such-verb"]).status.code(), Some(1));
    assert_eq!(mps(&["--help"]).status.code(), Some(0));
    let big = dir.join("k8.txt");
    let edges: String = (0..8).flat_map(|u| (u + 1..8).map(move |v| format!("{u} {v}\n"))).collect();
    fs::write(&big, edges).unwrap();
    let o = mps(&["oracle", big.to_str().unwrap(), "--max-edges", "20"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_then_oracle() {
    let dir = scratch("gen");
    let o = mps(&["gen", "--n", "10", "--d", "3", "--seed", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with('#')).count(), 15);
    assert_eq!(stdout(&o), stdout(&mps(&["gen", "--n", "10", "--d", "3", "--seed", "4"])));
    let file = dir.join("petersen_like.txt");
    fs::write(&file, stdout(&o)).unwrap();
    let o = mps(&["oracle", file.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("skewness "));
}

#[test]
fn bench_writes_csv() {
    let dir = scratch("bench");
    let corpus = dir.join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("k33.txt"), "0 3\n0 4\n0 5\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n").unwrap();
    fs::write(corpus.join("notes.md"), "ignored").unwrap();
    let cfg = dir.join("suite.cfg");
    fs::write(&cfg, "formulations = kuratowski, schnyder\nreport_wall_time = false\n").unwrap();
    let out = dir.join("runs.csv");
    let o = mps(&[
        "bench",
        corpus.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("k33.txt,kuratowski,6,9,1,optimal,8,8,"));
    assert!(rows[2].starts_with("k33.txt,schnyder,"));
    assert!(rows.iter().skip(1).all(|r| r.ends_with(",true")));
    fs::write(&cfg, "formulations = kuratowski\ntime_limit_s = soon\n").unwrap();
    let o = mps(&["bench", corpus.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
