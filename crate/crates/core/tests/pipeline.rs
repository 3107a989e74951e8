use muntz_lab::config::Config;
use muntz_lab::par::Exec;
use muntz_lab::verify::{run_theorem_a_check, run_typeconst_report, RunOpts, Status};

const DOC: &str = r#"
schema_version = 1

[sequence]
count = 12

[measure]
kind = "jacobi"
gamma = 1.0

[operator]
kind = "dilation"
gamma = 1.0
p = 1.5

[experiment]
p = 1.5
q = 4.0
r = 2.0
family_size = 30
"#;

#[test]
fn config_to_report_is_execution_independent() {
    let cfg = Config::from_toml(DOC).unwrap();
    let part = cfg.partition().unwrap();
    let op = cfg.operator(&part).unwrap();
    let ic = cfg.experiment.interpolation(cfg.mu().unwrap()).unwrap();
    let seq = run_theorem_a_check(&op, &part, &ic, 30, &RunOpts::new(3, Exec::Sequential)).unwrap();
    let par = run_theorem_a_check(&op, &part, &ic, 30, &RunOpts::new(3, Exec::Parallel)).unwrap();
    assert_eq!(seq.status, Status::Pass, "{:?}", seq.verdicts);
    assert_eq!(
        serde_json::to_string(&seq.deterministic()).unwrap(),
        serde_json::to_string(&par.deterministic()).unwrap()
    );
    let other = run_theorem_a_check(&op, &part, &ic, 30, &RunOpts::new(4, Exec::Parallel)).unwrap();
    assert_ne!(other.tables["family"], seq.tables["family"]);
}

#[test]
fn weak_constants_never_exceed_strong() {
    let mut cfg = Config::from_toml(DOC).unwrap();
    cfg.sequence.count = 8;
    let part = cfg.partition().unwrap();
    let op = cfg.operator(&part).unwrap();
    let ic = cfg.experiment.norms(cfg.mu().unwrap()).unwrap();
    let opts = RunOpts::new(0, Exec::Parallel);
    let get = |kind| {
        run_typeconst_report(kind, &op, &part, &ic, 2.0, 7, 0, &opts).unwrap().tables["constants"].column("C").unwrap()
    };
    use muntz_lab::typeconst::ConstantKind::{RestrictedStrong, RestrictedWeak};
    let (s, w) = (get(RestrictedStrong), get(RestrictedWeak));
    assert!(s.iter().zip(&w).all(|(s, w)| *w <= s * (1.0 + 1e-6)), "{s:?} {w:?}");
}
