use std::io::Write;
use std::process::{Command, Output, Stdio};

fn nilext(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nilext"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_json_has_six_brackets() {
    let o = nilext(&["gen", "--family", "n_n3", "--n", "8", "--basis", "e", "--format", "json"], "");
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 8);
    assert_eq!(v["brackets"].as_array().unwrap().len(), 6);
}

#[test]
fn series_of_example_extension() {
    let o = nilext(&["series", "--family", "s_n1_1", "--n", "8", "--param", "beta=2"], "");
    assert_eq!(stdout(&o).trim(), "DS=[9,8,5,0] CS=[9,8] US=[0]");
}

#[test]
fn gen_then_classify_recovers_family() {
    let gen = nilext(&["gen", "--family", "s_n1_8", "--n", "9", "--basis", "x", "--param", "a2=1", "--param", "a5=-3/2"], "");
    assert!(gen.status.success());
    let o = nilext(&["classify", "-"], &stdout(&gen));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("family: s_n1_8\n"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(nilext(&["series", "--family", "bogus", "--n", "8"], "").status.code(), Some(2));
    assert_eq!(nilext(&["classify", "-"], "[]").status.code(), Some(2));
    let o = nilext(&["classify", "-"], r#"{"n": 7, "b": {"1": "1"}}"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nilpotent"));
    assert_eq!(nilext(&["invariants", "--family", "s_n1_9", "--n", "7", "--verify"], "").status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["count", "--family", "s_n2", "--n", "9", "--seed", "5"];
    let a = nilext(&args, "");
    let b = nilext(&args, "");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).trim(), "3");
}
