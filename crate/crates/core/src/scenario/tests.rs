use super::*;

fn shipped(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"));
    Scenario::load(path).unwrap()
}

const HEAD: &str = "name = \"t\"\nn = 1\n";

fn holder_scenario(n: usize, gamma: f64) -> String {
    let mut s = format!("name = \"g\"\nn = {n}\n");
    for i in 0..=2 * n {
        if i == n + 1 {
            s += &format!("[[coefficients]]\nkind = \"lacunary\"\ngamma = {gamma}\n");
        } else {
            s += "[[coefficients]]\nkind = \"zero\"\n";
        }
    }
    s
}

#[test]
fn shipped_scenarios_load() {
    for name in ["remark-2.1-basic", "compliant", "unforced", "dissipative", "riccati-jumps"] {
        let s = shipped(name);
        assert_eq!(s.name, name);
    }
}

#[test]
fn remark_scenario_is_area_preserving() {
    let s = shipped("remark-2.1-basic");
    let d = s.duffing().unwrap();
    assert_eq!(d.params.n(), 1);
    assert_eq!(d.times, vec![0.3, 0.7]);
    assert!(d.area_identity_values().iter().all(|&v| v == 0.0));
    assert!(s.warnings.is_empty(), "{:?}", s.warnings);
    assert!(d.time_one_map(s.map_options()).is_ok());
}

#[test]
fn dissipative_scenario_is_flagged() {
    let s = shipped("dissipative");
    let d = s.duffing().unwrap();
    assert!(d.area_identity_values().iter().all(|&v| (v + 0.5).abs() < 1e-15));
    assert!(s.warnings.iter().any(|w| w.contains("area identity")));
}

#[test]
fn unordered_times_violate_condition_h() {
    let text = format!(
        "{HEAD}[[impulses]]\ntime = 0.7\nkind = \"constant-shift\"\nalpha = 0.1\n[[impulses]]\ntime = 0.3\nkind = \"constant-shift\"\nalpha = 0.1\n"
    );
    let err = Scenario::parse(&text).unwrap_err();
    let issues = err.issues();
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].kind, IssueKind::ConditionH);
    assert_eq!(issues[0].path, "impulses[1].time");
    assert!(err.to_string().contains("condition (H)"));
    let text = format!("{HEAD}[[impulses]]\ntime = 1.0\nkind = \"constant-shift\"\n");
    assert_eq!(Scenario::parse(&text).unwrap_err().issues()[0].kind, IssueKind::ConditionH);
}

#[test]
fn holder_exponent_rule_depends_on_degree() {
    let s = Scenario::parse(&holder_scenario(1, 0.3)).unwrap();
    assert!(s.warnings.iter().any(|w| w.contains("any gamma > 0")), "{:?}", s.warnings);
    let err = Scenario::parse(&holder_scenario(2, 0.3)).unwrap_err();
    assert_eq!(err.issues()[0].path, "coefficients[3].holder");
    assert!(Scenario::parse(&holder_scenario(2, 0.6)).is_ok());
}

#[test]
fn all_problems_are_reported_together() {
    let text = "name = \"bad\"\nn = 1\namplitude = -1.0\n[tolerances]\nrtol = 0.0\n[[coefficients]]\nkind = \"zero\"\n\
                [[impulses]]\ntime = 0.5\nkind = \"warp\"\n[horizons]\ncircle = 10\n";
    let err = Scenario::parse(text).unwrap_err();
    let paths: Vec<&str> = err.issues().iter().map(|i| i.path.as_str()).collect();
    for p in ["coefficients", "impulses[0].kind", "amplitude", "tolerances.rtol", "horizons.circle"] {
        assert!(paths.contains(&p), "missing {p} in {paths:?}");
    }
    assert!(err.issues().iter().all(|i| i.kind == IssueKind::Range));
}

#[test]
fn parse_errors_are_distinct() {
    assert!(matches!(Scenario::parse("name = "), Err(ScenarioError::Parse(_))));
    assert!(matches!(Scenario::parse("name = \"x\"\nbogus = 1\n"), Err(ScenarioError::Parse(_))));
    assert!(matches!(Scenario::load("/nonexistent/x.toml"), Err(ScenarioError::Io(_))));
}

#[test]
fn missing_impulses_become_identity() {
    let s = Scenario::parse(HEAD).unwrap();
    let d = s.duffing().unwrap();
    assert_eq!(d.times, vec![0.5]);
    let map = d.time_one_map(s.map_options()).unwrap();
    let p = map.evaluate([1.0, 0.0]).unwrap();
    let e = crate::duffing::h0_energy(1, p[0], p[1]);
    assert!((e - 0.25).abs() < 1e-9);
}

#[test]
fn riccati_model_builds() {
    let s = shipped("riccati-jumps");
    let Model::Riccati(r) = &s.model else { panic!() };
    let sys = r.system().unwrap();
    let opts = crate::impulsive::IvpOptions::from(crate::ode::SegmentOptions::new(s.tolerances, 1e8));
    let traj = crate::impulsive::solve_ivp(&sys, 0.0, [0.0], (0.0, 1.0), &opts).unwrap();
    let u = traj.value_at(std::f64::consts::PI / 8.0).unwrap()[0];
    assert!((u - (2f64.sqrt() - 1.0)).abs() < 1e-10);
}

#[test]
fn grids_and_ladders() {
    let g = GridSpec {
        x: [-1.0, 1.0],
        y: [0.0, 2.0],
        points: 3,
    };
    let pts = g.points();
    assert_eq!(pts.len(), 9);
    assert_eq!(pts[0], [-1.0, 0.0]);
    assert_eq!(pts[8], [1.0, 2.0]);
    let l = SeedLadder { x: [2.0, 4.0], count: 3 }.seeds();
    assert_eq!(l, vec![[2.0, 0.0], [3.0, 0.0], [4.0, 0.0]]);
}
