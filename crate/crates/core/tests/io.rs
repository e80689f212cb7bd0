use asep_core::exact::{q, Int, Rational};
use asep_core::fixtures::{five_node, half_square, six_node_halves, six_node_thirds};
use asep_core::gap::{solve_atsp, solve_gap, CostVector};
use asep_core::io::{
    certificate_text, load_certificate, load_orbit_index, load_vertex, parse_certificate, read_tsplib, save_certificate,
    save_orbit_index, save_vertex, scale_to_integers, to_stsp, write_tsplib, IoError, Tsplib, TsplibKind, VertexFile,
};
use asep_core::pivot::enumerate;
use asep_core::polytope::SolutionPoint;
use proptest::prelude::*;

fn integer_costs(n: usize) -> impl Strategy<Value = CostVector> {
    proptest::collection::vec(0i64..30, n * (n - 1))
        .prop_map(move |v| CostVector::new(n, v.into_iter().map(Rational::from).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn doubling_identity_on_random_instances(c in (3usize..6).prop_flat_map(integer_costs)) {
        let a = scale_to_integers(&c);
        let s = to_stsp(&a);
        prop_assert_eq!(s.dimension(), 2 * a.n);
        prop_assert!(s.is_symmetric());
        let atsp = solve_atsp(&a.cost_vector()).unwrap().value;
        let stsp = solve_atsp(&s.cost_vector()).unwrap().value;
        prop_assert_eq!(atsp, &stsp - &Rational::from(s.offset()));
    }

    #[test]
    fn tsplib_round_trip(c in integer_costs(4)) {
        let t = Tsplib::from_atsp("r", &scale_to_integers(&c));
        let parsed = Tsplib::parse(&t.to_text()).unwrap();
        prop_assert_eq!(parsed, t);
    }
}

#[test]
fn vertex_files_round_trip_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut pts = vec![half_square(), six_node_thirds(), six_node_halves()];
    pts.extend("abcde".chars().map(five_node));
    for (k, x) in pts.into_iter().enumerate() {
        let path = dir.path().join(format!("v{k}.txt"));
        let mut v = VertexFile::new(x);
        v.orbit_size = Some(60);
        v.provenance = vec!["break 1,5".into(), "collapse 3".into()];
        save_vertex(&path, &v).unwrap();
        let first = std::fs::read(&path).unwrap();
        assert_eq!(load_vertex(&path).unwrap(), v);
        save_vertex(&path, &v).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }
}

#[test]
fn non_member_vertex_file_is_rejected() {
    let mut text = VertexFile::new(SolutionPoint::tour(&[0, 1, 2]).unwrap()).to_text();
    // 0->1 becomes 1/2: out-degree of node 0 drops below one.
    text = text.replacen("1 # 0->1", "1/2 # 0->1", 1);
    assert!(matches!(VertexFile::parse(&text), Err(IoError::NotMember(_))));
}

#[test]
fn malformed_vertex_files_report_lines() {
    let good = VertexFile::new(half_square()).to_text();
    let bad = good.replacen("n 4", "n four", 1);
    assert!(matches!(VertexFile::parse(&bad), Err(IoError::Parse { line: 2, .. })));
    let bad = good.replacen("1/2 # 0->1", "x/2 # 0->1", 1);
    assert!(matches!(VertexFile::parse(&bad), Err(IoError::Parse { line: 7, .. })));
    assert!(matches!(VertexFile::parse("nonsense"), Err(IoError::Parse { line: 1, .. })));
}

#[test]
fn orbit_index_of_five_nodes() {
    let out = enumerate(5, |_| {}).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_orbit_index(dir.path(), &out.records).unwrap();
    let loaded = load_orbit_index(dir.path()).unwrap();
    assert_eq!(loaded.len(), 5);
    assert_eq!(loaded, out.records);
}

#[test]
fn certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    let cert = solve_gap(&six_node_halves()).unwrap();
    save_certificate(&path, &cert).unwrap();
    assert_eq!(load_certificate(&path).unwrap(), cert);
    assert_eq!(parse_certificate(&certificate_text(&cert)).unwrap(), cert);
}

#[test]
fn scaling() {
    let c = CostVector::new(3, vec![q(1, 2), q(1, 3), q(2, 1), q(0, 1), q(5, 6), q(7, 3)]).unwrap();
    assert_eq!(scale_to_integers(&c).scale, Int::from(6));
    let ints = CostVector::new(3, (0..6).map(Rational::from).collect()).unwrap();
    let a = scale_to_integers(&ints);
    assert_eq!(a.scale, Int::ONE);
    assert_eq!(a.cost_vector(), ints);
}

#[test]
fn certificate_instance_optimum_is_the_scale() {
    let cert = solve_gap(&half_square()).unwrap();
    let a = scale_to_integers(&cert.costs);
    assert_eq!(solve_atsp(&a.cost_vector()).unwrap().value, Rational::from(a.scale.clone()));
    let text = Tsplib::from_atsp("half", &a).to_text();
    assert!(text.contains(&format!("COMMENT: optimum {}", a.scale)));
}

#[test]
fn stsp_export_file() {
    let dir = tempfile::tempdir().unwrap();
    let cert = solve_gap(&six_node_halves()).unwrap();
    let s = to_stsp(&scale_to_integers(&cert.costs));
    let path = dir.path().join("x.tsp");
    write_tsplib(&path, &Tsplib::from_stsp("x", &s)).unwrap();
    let t = read_tsplib(&path).unwrap();
    assert_eq!(t.kind, TsplibKind::Tsp);
    assert_eq!(t.weights.len(), 12);
    assert_eq!(t.weights, s.weights);
    assert!(std::fs::read_to_string(&path).unwrap().contains("DIMENSION: 12"));
    assert_eq!(s.weights.iter().flatten().min(), Some(&Int::ZERO));
}

#[test]
fn tsplib_rejects_short_matrices() {
    let text = "NAME: t\nTYPE: ATSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1\n1\nEOF\n";
    assert!(matches!(Tsplib::parse(text), Err(IoError::Parse { line: 9, .. })));
}
