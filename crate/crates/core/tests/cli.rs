use std::path::Path;

use mixed_magic::cli::run;

fn magic(args: &[&str], out: &Path) -> (i32, String) {
    let mut argv = vec!["magic".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend(["--out".to_string(), out.display().to_string()]);
    let code = run(argv);
    (code, std::fs::read_to_string(out).unwrap_or_default())
}

fn header(csv: &str) -> &str {
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# "), "comment line missing");
    lines.next().unwrap()
}

const CASES: &[(&[&str], &str)] = &[
    (
        &["witness", "--state", "T,zero", "--alpha", "0.5,2"],
        "n,alpha,a_alpha,a_filtered,s2,m_alpha,w,w_filtered,d,d_filtered",
    ),
    (
        &["random-circuit-scan", "--n", "3", "--depth", "3", "--p", "0.01", "--instances", "2", "--seed", "1"],
        "kind,p,depth,instance,w_filtered,w,s2,d_c,eta,eta_stderr,prefactor",
    ),
    (
        &["doped-clifford", "--n", "2", "--nt", "0..1", "--instances", "2", "--seed", "3"],
        "kind,n_t,instance,s2,w_half,w_1,w_2,w_3,wf_half,wf_1,wf_2,wf_3,two_lr",
    ),
    (
        &["bell", "--state", "T", "--epsilon", "0.2", "--seed", "1"],
        "n,alpha,epsilon,delta,l,copies,estimate,exact,abs_error,within_epsilon",
    ),
    (
        &["certify-t", "--n", "2", "--nt", "2", "--seed", "1"],
        "n,t,channel,c,l,boundary,estimate,verdict,t_bound,exact_a3",
    ),
    (
        &["tfim-scan", "--n", "8", "--h", "1", "--ell", "3"],
        "kind,n,h,chi,ell,alpha,energy,s2,a_alpha,w,w_filtered,method,ell_c,error",
    ),
];

#[test]
fn csv_headers_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    for (args, want) in CASES {
        let (code, text) = magic(args, &dir.path().join("out.csv"));
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(header(&text), *want, "{args:?}");
    }
}

#[test]
fn json_records_carry_the_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    for (args, want) in CASES {
        let mut args = args.to_vec();
        args.extend(["--format", "json"]);
        let (code, text) = magic(&args, &dir.path().join("out.json"));
        assert_eq!(code, 0, "{args:?}");
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let rows = v.as_array().expect("array of records");
        assert!(!rows.is_empty());
        let mut keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
        let mut cols: Vec<&str> = want.split(',').collect();
        keys.sort_unstable();
        cols.sort_unstable();
        assert_eq!(keys, cols, "{args:?}");
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (args, _) in CASES {
        let (_, a) = magic(args, &dir.path().join("a"));
        let (_, b) = magic(args, &dir.path().join("b"));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    assert_eq!(magic(&["witness", "--state", "Q"], &out).0, 2);
    assert_eq!(magic(&["bell", "--state", "T"], &out).0, 2);
    assert_eq!(magic(&["witness", "--state", "T", "--p", "1.5"], &out).0, 2);
    let many = vec!["T"; 14].join(",");
    assert_eq!(magic(&["witness", "--state", &many], &out).0, 3);

    let (code, text) = magic(&["tfim-scan", "--n", "10", "--h", "1", "--ell", "6", "--budget", "10"], &out);
    assert_eq!(code, 3);
    assert!(text.contains("capacity exceeded"));

    let (code, text) = magic(&["tfim-scan", "--n", "8", "--h", "1", "--ell", "3", "--max-sweeps", "1"], &out);
    assert_eq!(code, 4);
    assert!(text.contains("did not converge"));
}

#[test]
fn negative_zero_prints_as_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text) = magic(&["witness", "--state", "zero", "--alpha", "2"], &dir.path().join("z"));
    assert!(!text.contains("-0,") && !text.ends_with("-0\n"), "{text}");
}
