//! Regenerates every file in `samples/` and compares bytes. Runs from the
//! samples directory so the echoed `--op` paths match.

use std::fs;
use std::path::Path;

const CASES: &[(&str, &[&str])] = &[
    ("classify.json", &["classify", "--op", "pucci12.json", "--n", "3", "--p", "2"]),
    ("alpha-star.json", &["alpha-star", "--op", "laplacian.json", "--n", "5"]),
    (
        "sweep-classify.csv",
        &["sweep", "--op", "pucci12.json", "--command", "classify", "--p", "1.5,1.6,2,3", "--format", "csv"],
    ),
    (
        "solve-ball.csv",
        &["solve", "--op", "pucci12.json", "--domain", "ball:1", "--rhs", "1", "--cells", "16", "--format", "csv"],
    ),
    (
        "solve-rect.csv",
        &["solve", "--op", "isaacs2.json", "--domain", "rect:0:1:0:1", "--rhs", "1", "--cells", "8", "--format", "csv"],
    ),
    (
        "certificate.csv",
        &["certificate", "--op", "pucci12.json", "--p", "1.5", "--cells", "256", "--format", "csv"],
    ),
];

#[test]
fn samples_are_reproduced() {
    let samples = Path::new(env!("CARGO_MANIFEST_DIR")).join("samples");
    std::env::set_current_dir(&samples).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    for (name, args) in CASES {
        let out = tmp.path().join(name);
        let argv: Vec<String> = std::iter::once("fnel")
            .chain(args.iter().copied())
            .map(String::from)
            .chain(["--out".into(), out.display().to_string()])
            .collect();
        assert_eq!(fnel_cli::run(argv), 0, "{name}");
        let expected = fs::read_to_string(samples.join(name)).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap(), expected, "{name} differs from the golden sample");
    }
}
