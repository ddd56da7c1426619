use std::process::{Command, Output};

fn kcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcalc")).args(args).output().unwrap()
}

#[test]
fn exit_codes_follow_the_documented_table() {
    assert_eq!(kcalc(&["eval", "sphere(2)"]).status.code(), Some(0));
    assert_eq!(kcalc(&["eval", "ball(0)"]).status.code(), Some(1));
    assert_eq!(kcalc(&["eval"]).status.code(), Some(1));
    assert_eq!(kcalc(&["projrep", "--levels", "5"]).status.code(), Some(1));
    assert_eq!(kcalc(&["instantiate", "klein_open", "--k0", "Z/4", "--k1", "0", "--strict"]).status.code(), Some(2));
    assert_eq!(kcalc(&["check", "--mutate", "R3:next:+1"]).status.code(), Some(3));
}

#[test]
fn errors_go_to_stderr() {
    let out = kcalc(&["eval", "ball(0)"]);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("ball: dimension must be ≥ 1"), "{err}");
}

#[test]
fn explain_cites_the_catalogue() {
    let out = kcalc(&["eval", "sum(sphere(2),point)", "--explain"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let cites: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split_once("] ").map(|(_, rest)| rest.split(':').next().unwrap()))
        .collect();
    assert_eq!(cites, ["Pr 14.11", "Thm 17.1'c b", "Lemma 14.9' c"]);
}

#[test]
fn check_seeds_share_the_pass_set() {
    let ids = |seed: &str| -> Vec<String> {
        let out = kcalc(&["check", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter_map(|l| l.strip_prefix("pass ").map(|r| r.split(' ').next().unwrap().to_string()))
            .collect()
    };
    assert_eq!(ids("0"), ids("7"));
}
