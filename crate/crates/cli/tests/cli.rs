use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mwelect(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwelect"))
        .args(args)
        .current_dir(dir)
        .env_remove("MWELECT_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = mwelect(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_random_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--kind", "random", "--m", "20", "--n", "500", "--seed", "7", "--out", "a.txt"], d.path());
    ok(&["gen", "--kind", "random", "--m", "20", "--n", "500", "--seed", "7", "--out", "b.txt"], d.path());
    let a = fs::read(d.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(d.path().join("b.txt")).unwrap());
    assert!(String::from_utf8(a).unwrap().lines().next().unwrap().starts_with("20 500"));
    // no temporary files left behind
    assert_eq!(fs::read_dir(d.path()).unwrap().count(), 2);
}

#[test]
fn seed_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let run = |seed: &str, out: &str| {
        let st = Command::new(env!("CARGO_BIN_EXE_mwelect"))
            .args(["gen", "--kind", "random", "--m", "6", "--n", "30", "--out", out])
            .env("MWELECT_SEED", seed)
            .current_dir(d.path())
            .status()
            .unwrap();
        assert!(st.success());
        fs::read(d.path().join(out)).unwrap()
    };
    ok(&["gen", "--kind", "random", "--m", "6", "--n", "30", "--seed", "5", "--out", "flag.txt"], d.path());
    assert_eq!(run("5", "env.txt"), fs::read(d.path().join("flag.txt")).unwrap());
    assert_ne!(run("6", "env6.txt"), fs::read(d.path().join("flag.txt")).unwrap());
}

#[test]
fn gen_core_cex_is_symmetric_json() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(&["gen", "--kind", "core-cex", "--m", "16"], d.path());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["m"], 16);
    assert_eq!(v["critical"], serde_json::json!([0, 1]));
    assert_eq!(v["groups"].as_array().unwrap().len(), 3);
}

#[test]
fn gen_from_cover_size() {
    let d = tempfile::tempdir().unwrap();
    // n_u = 8, z = 4 sets of 4, budget 2
    fs::write(d.path().join("c.txt"), "8 4 2\n0 1 2 3\n4 5 6 7\n0 2 4 6\n1 3 5 7\n").unwrap();
    ok(&["gen", "--kind", "from-cover", "--cover", "c.txt", "--eps", "0.05", "--out", "p.json"], d.path());
    // m = (2 / 0.5) k z
    assert_eq!(json(&d.path().join("p.json"))["m"], 4 * 2 * 4);
}

#[test]
fn solve_allperm_greedy() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--kind", "allperm", "--m", "5", "--out", "p.txt"], d.path());
    ok(&["solve", "--in", "p.txt", "--rule", "greedy", "--k", "3", "--s", "1", "--out", "r.json"], d.path());
    let r = json(&d.path().join("r.json"));
    assert_eq!(r["rows"][0]["score"], "3/2");
    assert_eq!(r["rand"], "3/2");
}

#[test]
fn solve_banzhaf_below_rand() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--kind", "random", "--m", "9", "--n", "40", "--seed", "3", "--out", "p.txt"], d.path());
    ok(&["solve", "--in", "p.txt", "--rule", "banzhaf", "--k", "2", "--s", "1", "--out", "r.json"], d.path());
    let r = json(&d.path().join("r.json"));
    assert!(r["rows"][0]["ratio_vs_rand"].as_f64().unwrap() <= 1.0);
}

#[test]
fn solve_opt_matches_enumeration() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--kind", "random", "--m", "7", "--n", "11", "--seed", "9", "--out", "p.txt"], d.path());
    ok(&["solve", "--in", "p.txt", "--rule", "opt", "--k", "3", "--s", "1", "--out", "r.csv"], d.path());
    // independent enumeration over the written text file
    let text = fs::read_to_string(d.path().join("p.txt")).unwrap();
    let votes: Vec<Vec<usize>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    let mut best = usize::MAX;
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                let tot: usize = votes.iter().map(|v| v.iter().position(|x| [a, b, c].contains(x)).unwrap() + 1).sum();
                best = best.min(tot);
            }
        }
    }
    let csv = fs::read_to_string(d.path().join("r.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let (num, den): (usize, usize) = (row[6].parse().unwrap(), row[7].parse().unwrap());
    assert_eq!(num * votes.len(), best * den);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(mwelect(&["gen", "--kind", "nope"], d.path()).status.code(), Some(2));
    assert_eq!(mwelect(&["gen", "--kind", "random", "--m", "4"], d.path()).status.code(), Some(2));
    ok(&["gen", "--kind", "random", "--m", "20", "--n", "5", "--out", "p.txt"], d.path());
    let capped = mwelect(&["solve", "--in", "p.txt", "--rule", "opt", "--k", "10", "--opt-cap", "100"], d.path());
    assert_eq!(capped.status.code(), Some(4));
    assert_eq!(mwelect(&["solve", "--in", "p.txt", "--rule", "greedy", "--k", "30"], d.path()).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(&["verify", "--suite", "monotone", "--seeds", "5"], d.path());
    assert!(out.contains("bound 1.0151"), "{out}");
    let out = ok(&["verify", "--suite", "order-stats", "--suite", "greedy-bounds", "--seeds", "100"], d.path());
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn bench_manifest() {
    let d = tempfile::tempdir().unwrap();
    let manifest = serde_json::json!({
        "schema": 1,
        "entries": [
            {"name": "sb", "generator": {"kind": "sborda-bad", "m": 40, "k": 8, "s": 2},
             "rules": ["greedy", "banzhaf"], "seeds": [0]},
            {"generator": {"kind": "random", "m": 8, "n": 15}, "rules": ["greedy", "opt", "random"],
             "k": [2, 3], "s": [1, 2], "seeds": [1, 2, 3]}
        ]
    });
    fs::write(d.path().join("m.json"), manifest.to_string()).unwrap();
    ok(&["bench", "--manifest", "m.json", "--out", "a.csv", "--jobs", "3"], d.path());
    ok(&["bench", "--manifest", "m.json", "--out", "b.csv"], d.path());
    let a = fs::read_to_string(d.path().join("a.csv")).unwrap();
    let b = fs::read_to_string(d.path().join("b.csv")).unwrap();
    assert_eq!(
        a.lines().next().unwrap(),
        "entry,family,rule,m,n,k,s,seed,score_num,score_den,score,ratio_vs_rand,ratio_vs_opt,wall_ms"
    );
    assert_eq!(a.lines().count(), 1 + 2 + 3 * 2 * 2 * 3);
    // everything but wall time repeats
    let strip = |s: &str| s.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
    let opt_rows = a.lines().filter(|l| l.contains(",opt,")).count();
    assert_eq!(opt_rows, 12);

    fs::write(d.path().join("bad.json"), r#"{"schema": 2, "entries": []}"#).unwrap();
    assert_eq!(mwelect(&["bench", "--manifest", "bad.json"], d.path()).status.code(), Some(2));
}
