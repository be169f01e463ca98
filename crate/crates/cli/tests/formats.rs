#[path = "../../core/tests/support/mod.rs"]
mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigor::assembly::{default_test_points, fit_dual, sector_problem, sector_reference};
use rigor::geom::{DistanceSpec, Mark, Model};
use rigor::graphgen::{generate, parse_script, DecoratedGraph, GeneratorConfig, CUBOCTAHEDRON_SCRIPT};
use rigor::interval::Interval;
use rigor::lp::LpProblem;
use rigor::prover::{ProofTask, Strictness};
use rigor::taylor::IntervalBox;
use rigor_cli::formats::*;
use rigor_cli::report::{self, Manifest};
use serde_json::json;

fn interval() -> impl Strategy<Value = Interval> {
    (-1e6f64..1e6, 0f64..10.0, 0u8..3).prop_map(|(a, w, kind)| match kind {
        0 => Interval::point(a),
        1 => Interval::new(a, a + w).unwrap(),
        _ => Interval::from_decimal_string(&format!("{:.3}", a)).unwrap(),
    })
}

proptest! {
    #[test]
    fn task_round_trip(seed in any::<u64>(), dims in prop::collection::vec(interval(), 1..5), margin in 0f64..1.0, strict in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arity = dims.len();
        let e = support::random_expr(&mut rng, 3, arity);
        let c = support::random_expr(&mut rng, 2, arity);
        let s = if strict { Strictness::Strict } else { Strictness::NonStrict };
        let t = ProofTask::new(e, IntervalBox::new(dims).unwrap())
            .with_margin(margin)
            .with_strictness(s)
            .with_constraints(vec![c]);
        let back = parse_task(&write_task(&t)).unwrap();
        prop_assert_eq!(&back.expr, &t.expr);
        prop_assert_eq!(&back.domain, &t.domain);
        prop_assert_eq!(&back.constraints, &t.constraints);
        prop_assert_eq!((back.margin, back.strictness), (t.margin, t.strictness));
    }

    #[test]
    fn lp_round_trip(seed in any::<u64>(), widen in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let m_eq = rng.gen_range(0..n.min(3));
        let m_ineq = rng.gen_range(1..=6);
        let (mut p, _) = support::random_lp(&mut rng, n, m_ineq, m_eq);
        if widen {
            p.c[0] = Interval::from_decimal_string("0.1").unwrap();
            p.bineq[0] = Interval::new(-0.25, 3.5).unwrap();
        }
        let back = parse_lp(&write_lp(&p)).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn dual_round_trip(y in prop::collection::vec(-1e9f64..1e9, 0..5), z in prop::collection::vec(0f64..1e9, 0..5)) {
        let (yb, zb) = parse_dual(&write_dual(&y, &z)).unwrap();
        prop_assert_eq!((yb, zb), (y, z));
    }

    #[test]
    fn assembly_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = support::random_assembly(&mut rng);
        let back = parse_asm(&write_asm(&p)).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn sector_problem_and_certificate_round_trip() {
    let p = sector_problem(5);
    let text = write_asm(&p);
    assert_eq!(parse_asm(&text).unwrap(), p);
    let (x, opt) = sector_reference(5);
    let cert = fit_dual(&p, &x, opt + 1e-6, &default_test_points(&p, 8, 3), 3).unwrap();
    let file = CertificateFile::new(&cert, report::digest(text.as_bytes()));
    let back = parse_certificate(&write_certificate(&file)).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.certificate(), cert);
}

#[test]
fn distance_spec_round_trip() {
    let mut spec = DistanceSpec::free(["a", "b", "c"].iter().map(|s| s.to_string()).collect());
    spec.set(0, 1, Interval::point(1.5), Interval::from_decimal_string("2.1").unwrap());
    spec.set(1, 2, Interval::point(0.0), Interval::point(3.0));
    let mut model = Model::default();
    model.marks.insert((0, 1), Mark::Cable);
    model.marks.insert((1, 2), Mark::Strut);
    let (s, m) = parse_dspec(&write_dspec(&spec, Some(&model))).unwrap();
    assert_eq!(s, spec);
    assert_eq!(m, Some(model));
    let (s, m) = parse_dspec(&write_dspec(&spec, None)).unwrap();
    assert_eq!((s, m), (spec, None));
}

#[test]
fn graph_files_replay() {
    for g in generate(&GeneratorConfig::new(5)).unwrap().terminals.iter().map(|(_, g)| g) {
        let back = parse_graph(&write_graph(g)).unwrap();
        assert_eq!(back.canonical_form(), g.canonical_form());
        assert_eq!(back.faces(), g.faces());
    }
    let cubo = DecoratedGraph::replay(4, &parse_script(CUBOCTAHEDRON_SCRIPT).unwrap()).unwrap();
    let text = write_graph(&cubo);
    assert_eq!(parse_graph(&text).unwrap().canonical_form(), cubo.canonical_form());
    // A tampered canonical form is caught on replay.
    let bad = text
        .lines()
        .map(|l| if l.starts_with("canonical") { "canonical n12:0".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    assert!(parse_graph(&bad).is_err());
}

#[test]
fn errors_carry_line_numbers() {
    let e = parse_task("arity 1\nexpr x0 +\ndomain 0..1\n").unwrap_err();
    assert_eq!(e.line, 2, "{e}");
    let e = parse_task("arity 2\nexpr x0\ndomain 0..1\n").unwrap_err();
    assert_eq!(e.line, 3, "{e}");
    let e = parse_task("arity 1\n\n# comment\nbogus 1\n").unwrap_err();
    assert_eq!(e.line, 4, "{e}");
    let lp = "VARS 1\nEQ_ROWS 0\nINEQ_ROWS 1\nOBJ\n0 1\nINEQ\n0 0 1\n0 0 2\nINEQ_RHS\n0 1\nBOUNDS\n0 0..1\n";
    let e = parse_lp(lp).unwrap_err();
    assert_eq!(e.line, 8, "{e}");
    let e = parse_lp(&lp.replace("0 0 2\n", "").replace("0 0..1\n", "")).unwrap_err();
    assert!(e.message.contains("BOUNDS"), "{e}");
    let e = parse_dual("y 1\nz -x\n").unwrap_err();
    assert_eq!(e.line, 2, "{e}");
    assert!(parse_certificate("{\"schema\": \"other/1\"}").is_err());
}

#[test]
fn lp_sample_file_matches_builder() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/small.lp")).unwrap();
    let p = parse_lp(&text).unwrap();
    let q = LpProblem::from_f64(&[], &[], &[vec![1.0, 2.0], vec![3.0, 1.0]], &[4.0, 6.0], &[1.0, 1.0], &[(0.0, 10.0); 2]).unwrap();
    assert_eq!(p, q);
}

#[test]
fn report_layout_and_reparse() {
    let m = Manifest {
        subcommand: "prove".into(),
        inputs: vec![("a.ineq".into(), report::digest(b"x"))],
        config: json!({"max_cells": 3}),
        seed: 9,
        threads: 2,
        wall_time_ms: 1.5,
    };
    let text = report::render(&m, json!({"bound": report::num(f64::INFINITY), "v": report::num(0.1)}));
    assert!(text.trim_start().starts_with("{\n  \"schema\""));
    let v = report::parse_report(&text).unwrap();
    assert_eq!(v["result"]["bound"], json!("inf"));
    assert_eq!(v["result"]["v"].as_f64(), Some(0.1));
    assert_eq!(v["manifest"]["inputs"][0]["sha256"], json!(report::digest(b"x")));
    let mut slower = m.clone();
    slower.wall_time_ms = 99.0;
    let other = report::render(&slower, json!({"bound": "inf", "v": 0.1}));
    assert_ne!(text, other);
    assert_eq!(report::without_wall_time(&text).unwrap(), report::without_wall_time(&other).unwrap());
    assert!(report::parse_report("{\"schema\": \"x\"}").is_err());
}
