use std::process::Command;

fn freelab(threads: &str, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_freelab")).env("FREELAB_THREADS", threads).args(args).output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let sample = ["--seed", "42", "--format", "csv", "rmt", "sample", "--potential", "quartic:g=0.25", "--n", "10", "--sweeps", "100", "--chains", "6"];
    let (c1, one) = freelab("1", &sample);
    let (c4, four) = freelab("4", &sample);
    assert_eq!((c1, c4), (0, 0));
    assert!(!one.is_empty());
    assert_eq!(one, four);

    let pressure = ["--seed", "1", "pressure", "--potential", "quartic:g=0.25", "--n", "8"];
    let (c1, one) = freelab("1", &pressure);
    let (c3, three) = freelab("3", &pressure);
    assert_eq!((c1, c3), (0, 0));
    assert_eq!(one, three);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(freelab("2", &["verify", "free_talagrand", "--mu", "semicircle"]).0, 0);
    assert_eq!(freelab("2", &["verify", "inverse_free_lsi", "--f", "abs"]).0, 1);
    assert_eq!(freelab("2", &["w2", "--mu", "semicircle:var=-1", "--nu", "semicircle"]).0, 2);
    assert_eq!(freelab("2", &["--help"]).0, 0);
}
