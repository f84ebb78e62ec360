use std::process::{Command, Output};

fn canonforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canonforge"))
        .args(args)
        .env_remove("CANONFORGE_WORKERS")
        .env_remove("CANONFORGE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<String> {
    stdout(o).lines().map(String::from).collect()
}

#[test]
fn digraph_counts() {
    for (n, mode, want) in [("2", "iterate", 16), ("2", "cnfs", 10), ("3", "cnfs", 104), ("1", "cnfs", 2)] {
        let o = canonforge(&["digraphs", "--nodes", n, "--mode", mode, "--warmup", "0"]);
        assert!(o.status.success());
        assert_eq!(lines(&o).len(), want, "n={n} {mode}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(&format!("count: {want}")) && err.contains("wall:"), "{err}");
    }
}

#[test]
fn cnfs_listing_starts_like_the_example() {
    let o = canonforge(&["digraphs", "--nodes", "2", "--text", "--warmup", "0"]);
    let l = lines(&o);
    assert_eq!(l[0], "{}");
    assert_eq!(l[1], "{(n0, n0)}");
    assert!(l.contains(&"{(n0, n1), (n1, n0)}".to_string()));
}

#[test]
fn json_lines_parse() {
    let o = canonforge(&["digraphs", "--nodes", "2", "--mode", "iterate", "--no-loops", "--warmup", "0"]);
    let l = lines(&o);
    assert_eq!(l.len(), 4);
    for line in l {
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert!(v.get("set").is_some());
    }
}

#[test]
fn generate_respects_seed() {
    let run = |seed: &str| stdout(&canonforge(&["digraphs", "--nodes", "3", "--mode", "generate:5", "--seed", seed]));
    assert_eq!(run("7"), run("7"));
    assert_eq!(run("7").lines().count(), 5);
    let env = Command::new(env!("CARGO_BIN_EXE_canonforge"))
        .args(["digraphs", "--nodes", "3", "--mode", "generate:5"])
        .env("CANONFORGE_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(stdout(&env), run("7"));
}

#[test]
fn out_file() {
    let path = std::env::temp_dir().join(format!("canonforge-out-{}.jsonl", std::process::id()));
    let o = canonforge(&["digraphs", "--nodes", "2", "--out", path.to_str().unwrap(), "--warmup", "0"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 10);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn reset_word_report() {
    let sentence = |n: u32, k: u32, v: u32| {
        format!("The maximal length of a minimal reset word for an automaton with {n} states and {k} symbols is {v}.")
    };
    let o = canonforge(&["resetwords", "--states", "2", "--symbols", "2"]);
    assert_eq!(lines(&o)[0], sentence(2, 2, 1));
    let serial = canonforge(&["resetwords", "--states", "3", "--symbols", "2"]);
    assert_eq!(lines(&serial)[0], sentence(3, 2, 4));
    let parallel = canonforge(&["resetwords", "--states", "3", "--symbols", "2", "--mode", "iterate", "--workers", "4"]);
    assert_eq!(lines(&parallel)[0], sentence(3, 2, 4));
}

#[test]
fn distinguish_flags_missing_words() {
    let o = canonforge(&["resetwords", "--states", "1", "--symbols", "2", "--distinguish"]);
    let out = stdout(&o);
    assert!(out.contains("without a reset word: 0"), "{out}");
    assert!(out.contains("already synchronized"), "{out}");
}

#[test]
fn spec_runner() {
    let path = std::env::temp_dir().join(format!("canonforge-spec-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"usets": [{"name": "a", "size": 3}], "domain": {"product": [{"uset": "a"}, {"uset": "a"}]}}"#,
    )
    .unwrap();
    let spec = path.to_str().unwrap();
    let o = canonforge(&["run", "--spec", spec, "--method", "cnfs", "--text"]);
    assert_eq!(lines(&o), ["(a0, a0)", "(a0, a1)"]);
    let o = canonforge(&["run", "--spec", spec, "--action", "count"]);
    assert_eq!(lines(&o), ["9"]);
    let o = canonforge(&["run", "--spec", spec, "--take", "2", "--text"]);
    assert_eq!(lines(&o), ["(a0, a0)", "(a0, a1)"]);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(canonforge(&["digraphs", "--nodes", "0"]).status.code(), Some(2));
    assert_eq!(canonforge(&["digraphs", "--nodes", "2", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(canonforge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(canonforge(&["run", "--spec", "/no/such/spec.json"]).status.code(), Some(1));
}
