use std::ffi::OsString;

use commcalc::cli::{library_file, parse_algebra_file, run_with, serialize_file};
use commcalc::library::library;
use commcalc::Error;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<OsString> = std::iter::once("commcalc").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_temp(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("commcalc-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const Z3: &str = "\
# cyclic group of order 3
algebra Z3
size 3
op mul/2
0 1 2  1 2 0
2 0 1
op inv/1
0 2 1
subset trivial = 0
end
hom collapse : Z3 -> builtin:Z1 = 0 0 0
";

fn parse_error(text: &str) -> (usize, usize, String) {
    match parse_algebra_file(text) {
        Err(Error::Parse { line, column, message }) => (line, column, message),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn parses_wrapped_tables_comments_and_builtin_targets() {
    let f = parse_algebra_file(Z3).unwrap();
    let z3 = &f.algebras[0];
    assert_eq!(z3.algebra.size(), 3);
    assert!(z3.algebra.is_group());
    assert_eq!(z3.algebra.apply_named("mul", &[2, 2]).unwrap(), 1);
    assert_eq!(z3.subset("trivial").unwrap().members, vec![0]);
    assert_eq!(f.hom("collapse").unwrap().hom.target().size(), 1);
}

#[test]
fn entry_out_of_range_names_its_line() {
    let text = Z3.replace("0 2 1\nsubset", "0 3 1\nsubset");
    let (line, column, message) = parse_error(&text);
    assert_eq!(line, 8);
    assert_eq!(column, 3);
    assert!(message.contains("out of range"), "{message}");
}

#[test]
fn short_binary_table_is_a_count_error() {
    let text = "algebra T\nsize 3\nop mul/2\n0 1 2 1 2 0 2 0\nop inv/1\n0 2 1\nend\n";
    let (line, _, message) = parse_error(text);
    assert_eq!(line, 5);
    assert!(message.contains("expects 9 entries") && message.contains("found 8"), "{message}");
}

#[test]
fn structural_errors() {
    let (_, _, m) = parse_error("algebra A\nsize 2\nop mul/2\n0 1 1 0\n");
    assert!(m.contains("end"), "{m}");
    let dup = format!("{Z3}{}", Z3.replace("hom collapse", "hom other"));
    let (line, _, m) = parse_error(&dup);
    assert_eq!(line, 13);
    assert!(m.contains("duplicate"), "{m}");
    let (_, _, m) = parse_error("algebra A\nsize 2\nop zero/0\n1\nop mul/2\n0 1 1 0\nend\n");
    assert!(m.contains("zero"), "{m}");
    let (line, _, m) = parse_error(&Z3.replace("= 0 0 0", "= 0 0"));
    assert_eq!(line, 11);
    assert!(m.contains("3"), "{m}");
}

#[test]
fn non_homomorphism_is_rejected() {
    let text = Z3.replace("hom collapse : Z3 -> builtin:Z1 = 0 0 0", "hom bad : Z3 -> Z3 = 0 1 1");
    let (line, _, _) = parse_error(&text);
    assert_eq!(line, 11);
}

#[test]
fn unclosed_subset_is_flagged_not_rejected() {
    let f = parse_algebra_file(&Z3.replace("subset trivial = 0", "subset half = 0 1")).unwrap();
    assert!(!f.algebras[0].subset("half").unwrap().closed);
    let path = write_temp("unclosed.alg", &Z3.replace("subset trivial = 0", "subset half = 0 1"));
    let (code, _, err) = run(&["commutator", "--kind", "huq", "--algebra", &path, "--left", "half", "--right", "all"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn round_trip_is_idempotent_on_the_library() {
    for entry in &library().entries {
        let text = serialize_file(&library_file(entry));
        let once = parse_algebra_file(&text).unwrap();
        let again = parse_algebra_file(&serialize_file(&once)).unwrap();
        assert_eq!(serialize_file(&once), serialize_file(&again), "{}", entry.name);
        assert_eq!(once, again, "{}", entry.name);
        assert_eq!(once.algebras[0].algebra.tables(), entry.algebra.tables(), "{}", entry.name);
    }
}

#[test]
fn higgins_of_s3_is_a3() {
    let (code, out, _) = run(&["commutator", "--kind", "higgins", "--algebra", "builtin:S3", "--left", "all", "--right", "all"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("higgins(all,all) = {0 2 5} (3 elements)"), "{out}");
}

#[test]
fn wnh_report_on_paper_algebra_lists_huq_entries() {
    let (code, out, _) = run(&["--json", "check", "--condition", "wnh", "--algebra", "builtin:paperC"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let top: Vec<usize> = ["\"tool-version\"", "\n  \"command\"", "\n  \"algebra\"", "\n  \"results\"", "\n  \"budget\""]
        .iter()
        .map(|k| out.find(k).unwrap())
        .collect();
    assert!(top.windows(2).all(|w| w[0] < w[1]), "{out}");
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    for r in results {
        assert_eq!(r["verdict"], "pass");
        assert_eq!(r["witness"]["huq"], r["witness"]["K"]);
    }
}

#[test]
fn group_search_reports_none() {
    let (code, out, _) = run(&["search", "--goal", "sh-gap", "--variety", "groups", "--max-size", "6"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("none up to size 6"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["show", "/nonexistent/file.alg"]).0, 2);
    assert_eq!(run(&["check", "--condition", "central", "--algebra", "builtin:S3"]).0, 2);
    assert_eq!(run(&["search", "--goal", "sh-gap", "--variety", "digroups", "--max-size", "6", "--budget", "50"]).0, 3);
    assert_eq!(run(&["check", "--condition", "perfect", "--algebra", "builtin:S3"]).0, 1);
    assert_eq!(run(&["check", "--condition", "perfect", "--algebra", "builtin:A5"]).0, 0);
    assert_eq!(run(&["check", "--condition", "central", "--algebra", "builtin:SL25", "--hom", "sl25_to_a5"]).0, 0);
    assert_eq!(run(&["check", "--condition", "central", "--algebra", "builtin:S3", "--hom", "s3_sign"]).0, 1);
}

#[test]
fn json_error_report_on_usage_error() {
    let (code, out, err) = run(&["--json", "show", "builtin:Nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("no builtin algebra"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["verdict"], "fail");
}

#[test]
fn file_algebras_can_be_selected_by_name() {
    let two = format!("{}\n{}", Z3.split("hom").next().unwrap(), Z3.split("hom").next().unwrap().replace("Z3", "Y3"));
    let path = write_temp("two.alg", &two);
    let (code, out, _) = run(&["congruences", "--algebra", &format!("{path}#Y3")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with('C')).count(), 2);
}

#[test]
fn json_output_is_byte_stable() {
    let args = ["--json", "--seed", "7", "check", "--condition", "laws", "--algebra", "builtin:D4"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.0, 0);
    assert_eq!(first.1, second.1);
}
