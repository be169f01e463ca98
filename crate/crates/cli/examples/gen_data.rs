//! Regenerates the files under `data/` that are derived from library code.
//!
//! `cargo run -p rigor-cli --example gen_data`

use std::path::Path;

use rigor::assembly::{default_test_points, fit_dual, sector_problem, sector_reference, AssemblyProblem, LocalDomain};
use rigor::expr::Expr;
use rigor::geom::{DistanceSpec, Mark, Model, LINKED_PLAN};
use rigor::interval::{format_f64, Interval};
use rigor::prover::ProofTask;
use rigor::taylor::IntervalBox;
use rigor_cli::formats::{self, CertificateFile};
use rigor_cli::report::digest;

const SEED: u64 = 7;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let write = |name: &str, text: &str| {
        std::fs::write(dir.join(name), text).expect("writable data directory");
        println!("wrote {name}");
    };

    let six = Expr::parse("pow(x0,2) + pow(x1,2) + pow(x2,2) + pow(x3,2) + pow(x4,2) + pow(x5,2) - 7", 6).unwrap();
    write("six_squares.ineq", &formats::write_task(&ProofTask::new(six, IntervalBox::from_pairs(&[(0.0, 1.0); 6]))));
    let diag = Expr::parse("pow(x0,2) - 2*x0*x1 + pow(x1,2)", 2).unwrap();
    write("diagonal.ineq", &formats::write_task(&ProofTask::new(diag, IntervalBox::from_pairs(&[(0.0, 1.0); 2]))));

    let p = sector_problem(5);
    let (x, opt) = sector_reference(5);
    let m = opt + 1e-6;
    let asm = formats::write_asm(&p);
    let cert = fit_dual(&p, &x, m, &default_test_points(&p, 32, SEED), SEED).expect("fit succeeds");
    write("voronoi5.asm", &asm);
    write("voronoi5.xstar", &(x.iter().map(|v| format_f64(*v)).collect::<Vec<_>>().join("\n") + "\n"));
    write("voronoi5.cert", &formats::write_certificate(&CertificateFile::new(&cert, digest(asm.as_bytes()))));
    println!("voronoi5: M = {}", format_f64(m));

    let toy = AssemblyProblem {
        domains: vec![LocalDomain {
            id: "D".into(),
            vars: vec!["x".into()],
            bounds: IntervalBox::from_pairs(&[(0.0, 1.0)]),
            constraints: vec![Expr::parse("x0 - x0*x0", 1).unwrap()],
        }],
        mapping: vec![(0, 0)],
        a: vec![vec![Interval::ONE]],
        b: vec![Interval::ONE],
        c: vec![Interval::ONE],
    };
    write("toy.asm", &formats::write_asm(&toy));

    // o at the origin, p1..p3 on a unit circle at height 1, q on the axis.
    let pts = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 1.0],
        [-0.5, 0.75f64.sqrt(), 1.0],
        [-0.5, -(0.75f64.sqrt()), 1.0],
        [0.0, 0.0, 3.0],
    ];
    let labels = ["o", "p1", "p2", "p3", "q"].iter().map(|s| s.to_string()).collect();
    let mut spec = DistanceSpec::free(labels);
    let mut model = Model::default();
    for &(i, j) in &LINKED_PLAN {
        let d: f64 = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt();
        let round = |v: f64| Interval::from_decimal_string(&format!("{v:.4}")).unwrap();
        spec.set(i, j, round(d * 0.999), round(d * 1.001));
        model.marks.insert((i, j), Mark::Strut);
    }
    write("linked_free.dspec", &formats::write_dspec(&spec, Some(&model)));
    spec.set(3, 4, Interval::point(3.0), Interval::point(3.0));
    write("linked.dspec", &formats::write_dspec(&spec, Some(&model)));
}
