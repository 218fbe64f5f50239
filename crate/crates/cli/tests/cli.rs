use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE: &str = "\
# words starting with a that have a b between two a's one time unit later
floating B {
  alphabet a b
  states p r s t
  init p
  accepting t
  trans p -> p : (a,0)
  trans p -> p : (b,0)
  trans p -> r : (a,0)
  trans r -> s : (b,1)
  trans s -> t : (a,0)
  trans t -> t : (a,0)
  trans t -> t : (b,0)
}
alphabet a b
states q0 q1
init q0
accepting q1
trans q0 -> q1 : a [ [1,1] in F{B} ]
trans q1 -> q1 : a
trans q1 -> q1 : b
";

const SIGMA2: &str = "stem: a@0 a@1/2 b@1 a@3/2\nperiod: b@2 a@5/2\nshift: 2\n";
const B_FIRST: &str = "stem: b@0\nperiod: a@1\nshift: 1\n";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("ex.rida", EXAMPLE);
        f.write("sigma2.tw", SIGMA2);
        f.write("bfirst.tw", B_FIRST);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_idta"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn member_accepts_and_rejects() {
    let f = Fixture::new();
    let o = f.run(&["member", "--automaton", "ex.rida", "--word", "sigma2.tw"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "ACCEPT\n");
    let o = f.run(&["member", "--automaton", "ex.rida", "--word", "bfirst.tw"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "REJECT\n");
}

#[test]
fn eval_trivial_and_recursive_formulas() {
    let f = Fixture::new();
    f.write("true.tl", "true\n");
    let o = f.run(&["eval", "--logic", "tltl", "--formula", "true.tl", "--word", "sigma2.tw"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "TRUE\n"));
    f.write(
        "ex.rtl",
        "# a, with a b between two a's one unit later\n(and (atom a) (in [1,1] (F (and (atom b) (prev (atom a)) (next (atom a))))))\n",
    );
    let o = f.run(&["eval", "--logic", "rtltl", "--formula", "ex.rtl", "--word", "sigma2.tw"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "TRUE\n"), "{}", stderr(&o));
    let o = f.run(&["eval", "--logic", "rtltl", "--formula", "ex.rtl", "--word", "bfirst.tw"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "FALSE\n"));
    f.write("first.mso", "(exists x (and (zero x) (Q b x)))\n");
    let o = f.run(&["eval", "--logic", "tmso", "--formula", "first.mso", "--word", "bfirst.tw"]);
    assert_eq!(stdout(&o), "TRUE\n", "{}", stderr(&o));
    f.write("at.mso", "(Q a x)\n");
    let o = f.run(&["eval", "--logic", "tmso", "--formula", "at.mso", "--word", "bfirst.tw", "--position", "1"]);
    assert_eq!(stdout(&o), "TRUE\n", "{}", stderr(&o));
}

#[test]
fn metric_translation_re_evaluates_equally() {
    let f = Fixture::new();
    f.write("f.mitl", "(UI (1,2] (atom a) (atom b))\n");
    let o = f.run(&["translate", "--from", "mitl", "--to", "rtltl", "--in", "f.mitl", "--out", "f.rtl"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(Path::new(&f.path("f.rtl")).exists());
    for word in ["sigma2.tw", "bfirst.tw"] {
        for pos in ["0", "1", "2", "3"] {
            let a = f.run(&["eval", "--logic", "mitl", "--formula", "f.mitl", "--word", word, "--position", pos]);
            let b = f.run(&["eval", "--logic", "rtltl", "--formula", "f.rtl", "--word", word, "--position", pos]);
            assert_eq!(stdout(&a), stdout(&b), "{word} at {pos}: {}", stderr(&b));
        }
    }
}

#[test]
fn complement_flips_membership() {
    let f = Fixture::new();
    let o = f.run(&["complement", "--automaton", "ex.rida", "--out", "ex_c.rida"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for (word, want) in [("sigma2.tw", "REJECT\n"), ("bfirst.tw", "ACCEPT\n")] {
        let o = f.run(&["member", "--automaton", "ex_c.rida", "--word", word]);
        assert_eq!(stdout(&o), want, "{}", stderr(&o));
    }
    let o = f.run(&["combine", "--op", "union", "--left", "ex.rida", "--right", "ex_c.rida", "--out", "all.rida"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for word in ["sigma2.tw", "bfirst.tw"] {
        assert_eq!(stdout(&f.run(&["member", "--automaton", "all.rida", "--word", word])), "ACCEPT\n");
    }
}

#[test]
fn sentence_translations_round_trip() {
    let f = Fixture::new();
    let o = f.run(&["translate", "--from", "ridta", "--to", "rtmso", "--in", "ex.rida", "--out", "ex.mso"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for (word, want) in [("sigma2.tw", "TRUE\n"), ("bfirst.tw", "FALSE\n")] {
        let o = f.run(&["eval", "--logic", "rtmso", "--formula", "ex.mso", "--word", word]);
        assert_eq!(stdout(&o), want, "{}", stderr(&o));
    }
    f.write("first_b.mso", "(forall x (implies (zero x) (Q b x)))\n");
    let o = f.run(&["translate", "--from", "tmso", "--to", "idta", "--in", "first_b.mso", "--alphabet", "a,b", "--out", "fb.ida"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&f.run(&["member", "--automaton", "fb.ida", "--word", "bfirst.tw"])), "ACCEPT\n");
    assert_eq!(stdout(&f.run(&["member", "--automaton", "fb.ida", "--word", "sigma2.tw"])), "REJECT\n");
}

#[test]
fn proper_and_emptiness() {
    let f = Fixture::new();
    f.write(
        "g.ida",
        "alphabet a\nstates q\ninit q\naccepting q\ntrans q -> q : a [ [1,2] in last_a & !((0,1) in last_a) ]\n",
    );
    let o = f.run(&["proper", "--automaton", "g.ida"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("trans ").count(), 1, "{}", stdout(&o));
    let o = f.run(&["empty-symbolic", "--automaton", "g.ida"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NONEMPTY\nstem:"), "{}", stdout(&o));
    f.write("none.ida", "alphabet a\nstates q\ninit q\n");
    let o = f.run(&["empty-symbolic", "--automaton", "none.ida"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "EMPTY\n"));
}

#[test]
fn errors_are_single_prefixed_lines() {
    let f = Fixture::new();
    f.write("bad.tw", "stem: a@0\nperiod: a@x\nshift: 1\n");
    let o = f.run(&["member", "--automaton", "ex.rida", "--word", "bad.tw"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert_eq!(e.lines().count(), 1, "{e}");
    assert!(e.starts_with("parse: ") && e.contains("line 2"), "{e}");
    let o = f.run(&["member", "--automaton", "missing.rida", "--word", "sigma2.tw"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("io: "));
    let o = f.run(&["member", "--word", "sigma2.tw"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("usage: "));
    let o = f.run(&["--state-cap", "1", "complement", "--automaton", "ex.rida"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("state-cap: "), "{}", stderr(&o));
}

#[test]
fn json_reports_and_determinism() {
    let f = Fixture::new();
    let args = ["--format", "json-report", "member", "--automaton", "ex.rida", "--word", "sigma2.tw"];
    let a = f.run(&args);
    let b = f.run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "ACCEPT");
    let args = ["--seed", "5", "selftest", "--criterion", "10,11"];
    let a = f.run(&args);
    let b = f.run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
}
