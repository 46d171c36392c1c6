use std::fs;

use cuot::export::{export_run, RunDir, CONFIG};
use cuot::{run, ConfigDoc, Files, Scenario};
use cuot_core::Array;

const DOC: &str = r#"
name = "small"
delta = 0.5

[grid]
time_cells = 6
cells = [12, 8]
lengths = [1.0, 1.0]
boundary = ["neumann", "periodic"]

[rho0]
kind = "gaussian"
bumps = [{ center = [0.3, 0.5], std = 0.15, mass = 1.0 }]
floor = 0.05

[rho1]
kind = "gaussian"
bumps = [{ center = [0.7, 0.5], std = 0.15, mass = 1.0 }]
floor = 0.05

[[constraints]]
name = "mass floor"
rho = { kind = "unit" }
lower = 1.0

[solver]
iterations = 120
snapshot_stride = 10
"#;

fn scenario() -> Scenario {
    cuot::build(ConfigDoc::parse(DOC).unwrap(), &Files::default()).unwrap()
}

fn bits(a: &Array) -> Vec<u64> {
    a.as_slice().iter().map(|x| x.to_bits()).collect()
}

#[test]
fn run_directory_round_trips_exactly() {
    let scn = scenario();
    let r = run::solve(&scn, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_run(dir.path(), &scn, &r.result, r.threads, r.wall_clock_seconds).unwrap();
    let rd = RunDir::open(dir.path()).unwrap();

    let res = &r.result;
    assert_eq!(bits(&rd.array("fields/rho.bin").unwrap()), bits(&res.v.rho));
    assert_eq!(bits(&rd.array("fields/rho_bar.bin").unwrap()), bits(&res.u.rho_bar));
    assert_eq!(bits(&rd.array("fields/zeta.bin").unwrap()), bits(&res.v.zeta));
    for k in 0..2 {
        assert_eq!(bits(&rd.array(&format!("fields/omega_{k}.bin")).unwrap()), bits(&res.v.omega[k]));
        assert_eq!(
            bits(&rd.array(&format!("fields/omega_bar_{k}.bin")).unwrap()),
            bits(&res.u.omega_bar[k])
        );
    }
    for j in 0..6 {
        assert_eq!(rd.rho_slice(j).unwrap().as_slice(), res.v.rho.slab(j));
    }
    for f in 0..7 {
        assert_eq!(rd.rho_bar_face(f).unwrap().as_slice(), res.u.rho_bar.slab(f));
    }
    assert_eq!(bits(&rd.array("endpoints/rho0.bin").unwrap()), bits(&scn.problem.rho0));
    let c = &scn.problem.constraints[0];
    assert_eq!(bits(&rd.array("constraints/0_mass_floor/h_rho.bin").unwrap()), bits(c.h_rho()));

    let s = &rd.summary;
    assert_eq!(s.name.as_deref(), Some("small"));
    assert_eq!(s.solver.iterations_run, 120);
    assert_eq!(s.constraints[0].directory, "constraints/0_mass_floor");
    assert_eq!(s.constraints[0].upper, vec![None; 6]);
    for (m, v) in s.mass.iter().zip(&s.constraints[0].values) {
        assert!((m - v).abs() <= 1e-12 * m.abs().max(1.0));
    }
    assert_eq!(s.face_mass.len(), 7);

    let d = &rd.diagnostics;
    assert_eq!(d.iterations.first(), Some(&0));
    assert_eq!(d.iterations.last(), Some(&120));
    assert_eq!(d.relative_error.last(), Some(&0.0));
    assert_eq!(d.violation[0].name, "mass floor");
    assert_eq!(d.refit(), d.rate);

    let again = Scenario::from_path(&dir.path().join(CONFIG)).unwrap();
    assert_eq!(again.problem, scn.problem);
}

#[test]
fn thread_count_does_not_change_the_result() {
    let mut results = Vec::new();
    for threads in [1, 4] {
        let mut scn = scenario();
        scn.solver.thread_count = Some(threads);
        results.push(run::solve(&scn, None).unwrap().result);
    }
    assert_eq!(results[0], results[1]);
}

#[test]
fn file_inputs_resolve_beside_the_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "1 1 2 2\n").unwrap();
    fs::write(dir.path().join("b.txt"), "2, 2, 1, 1\n").unwrap();
    fs::write(dir.path().join("mass.csv"), "year,value\n1900,4.5\n1910,4.5\n").unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        r#"
delta = 1.0
[grid]
time_cells = 4
cells = [4]
lengths = [2.0]
boundary = ["neumann"]
[rho0]
kind = "file"
path = "a.txt"
[rho1]
kind = "file"
path = "b.txt"
[[constraints]]
rho = { kind = "unit" }
equal = { schedule = "mass.csv", scale = 2.0 }
"#,
    )
    .unwrap();
    let scn = Scenario::from_path(&cfg).unwrap();
    assert_eq!(scn.problem.rho0.as_slice(), &[1.0, 1.0, 2.0, 2.0]);
    assert_eq!(scn.problem.constraints[0].lower(), &[9.0; 4]);
}
