use std::process::Command;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polyderive")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}.spec")
}

#[test]
fn stone_transformation() {
    let f = fixture("stone");
    let (code, out, _) = run(&["check-transformation", "--file", &f, "--xi", "L", "--from", "dcomp", "--to", "idB", "--models", "z2,z2xz2"]);
    assert_eq!((code, out.trim()), (0, "VerifiedOnModels(2)"));
    let (code, _, err) = run(&["check-transformation", "--file", &f, "--xi", "L", "--from", "d"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn strict_and_refuted_transformations() {
    let f = fixture("direct_power");
    let (code, out, _) = run(&["check-transformation", "--file", &f, "--xi", "swap"]);
    assert_eq!((code, out.trim()), (0, "Proved"));
    let g = fixture("stone");
    let (code, out, _) = run(&["check-transformation", "--file", &g, "--xi", "L", "--spec", "BRing"]);
    assert_eq!((code, out.trim()), (0, "VerifiedOnModels(0)"));
}

#[test]
fn refutation_exits_one() {
    let dir = std::env::temp_dir().join(format!("polyderive-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.spec");
    let src = std::fs::read_to_string(fixture("stone")).unwrap()
        + "\nmorphism flip : BR -> BR { sort s -> (s); op zero -> (one); op one -> (zero); op neg -> (v0); op mul -> (mul(v0, v1)); op add -> (add(v0, v1)); }\n\
           transformation T : flip => idB mod BRing { sort s -> (v0); }\n";
    std::fs::write(&path, src).unwrap();
    let (code, out, _) = run(&["check-transformation", "--file", path.to_str().unwrap(), "--xi", "T", "--models", "z2"]);
    assert_eq!((code, out.trim()), (1, "Refuted(zero, z2)"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn satisfy_defaults_to_stone() {
    assert_eq!(run(&["satisfy", "--algebra", "z2", "--equation", "comm_add"]).0, 0);
    let (code, out, _) = run(&["satisfy", "--algebra", "z2", "--equation", "neg_is_one_plus"]);
    assert_eq!((code, out.trim()), (1, "false at (0)"));
    let (code, out, _) = run(&["--seed", "3", "satisfy", "--algebra", "z2xz2", "--equation", "BRing.idem", "--sample", "20"]);
    assert_eq!((code, out.trim()), (0, "true"));
}

#[test]
fn spec_morphism_check() {
    let (code, out, _) = run(&["check", "--morphism", "d", "--from-spec", "BAlg", "--to-spec", "BRing", "--models", "z2,z2xz2"]);
    assert_eq!((code, out.trim()), (0, "VerifiedOnModels(2)"));
    let (code, _, err) = run(&["check", "--morphism", "d", "--from-spec", "BRing", "--to-spec", "BRing"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn eval_translate_reduct_compose() {
    assert_eq!(run(&["eval", "--algebra", "b4", "--term", "sym_diff", "--args", "01,11"]).1.trim(), "10");
    let (code, out, _) = run(&["translate", "--morphism", "d", "--term", "sym_diff"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("over (s s) : (s) -> "));
    let (code, out, _) = run(&["reduct", "--morphism", "e", "--algebra", "b2"]);
    assert_eq!(code, 0);
    assert!(polyderive::speclang::Workspace::parse(&format!("{}{out}", "signature BR { sort s; op zero : -> s; op one : -> s; op neg : s -> s; op mul : s s -> s; op add : s s -> s; }\n")).is_ok());
    let (code, out, _) = run(&["compose", "--outer", "e", "--inner", "d", "--name", "ed"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("morphism ed : BA -> BA {"));
}

#[test]
fn hall_benabou() {
    let (code, out, _) = run(&["hall-benabou", "--sorts", "s", "--bound", "2", "verify"]);
    assert_eq!(code, 0);
    assert!(out.contains("equivalence: holds"));
    let (code, out, _) = run(&["hall-benabou", "--sorts", "s", "--bound", "1", "benabou-spec"]);
    assert_eq!(code, 0);
    assert!(polyderive::speclang::Workspace::parse(&out).is_ok());
}

#[test]
fn errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["satisfy", "--algebra", "z2"]).0, 2);
    assert_eq!(run(&["check", "--file", "/nonexistent/file.spec"]).0, 2);
    let (code, _, err) = run(&["eval", "--algebra", "z2", "--term", "sym_diff", "--args", "0,1"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[SignatureMismatch]"), "{err}");
    let (code, _, err) = run(&["hall-benabou", "--sorts", "s", "--bound", "40", "verify"]);
    assert_eq!(code, 2);
    assert!(err.contains("BoundTooLarge"), "{err}");
}

#[test]
fn check_print_is_canonical() {
    for name in ["stone", "higman_neumann", "godel", "direct_power"] {
        let (code, out, _) = run(&["check", "--file", &fixture(name), "--print"]);
        assert_eq!(code, 0);
        let ws = polyderive::speclang::Workspace::parse(&out).unwrap();
        assert_eq!(ws.print(), out);
    }
}
