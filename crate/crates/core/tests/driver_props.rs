use proptest::prelude::*;

use polyskel::driver::{run, ProblemSpec};
use polyskel::io::{write_report_jsonl, Mesh};

/// Connectivity between two lattice points of [0,2]^2, optionally starting
/// from a polyline through a third point.
fn problem(a: [u8; 2], b: [u8; 2], via: Option<[u8; 2]>, seed: u64) -> ProblemSpec {
    let p = |q: [u8; 2]| format!("[{}, {}]", 0.5 * q[0] as f64, 0.5 * q[1] as f64);
    let polyline = match via {
        Some(v) => format!("polylines = [[{}, {}, {}]]", p(a), p(v), p(b)),
        None => String::new(),
    };
    let text = format!(
        "[domain]\nn = 2\nd = 1\nmin = [0.0, 0.0]\nmax = [2.0, 2.0]\n\
         [input]\nterminals = [{}, {}]\n{polyline}\n\
         [oracle]\nkind = \"connectivity\"\n\
         [schedule]\ninitial_stride = 0.5\nrefinements = 2\nstop_on_convergence = false\n\
         [seed]\nvalue = {seed}\n",
        p(a),
        p(b)
    );
    ProblemSpec::from_toml(&text).unwrap()
}

fn lattice() -> impl Strategy<Value = [u8; 2]> {
    prop::array::uniform2(1u8..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_monotone_valid_and_reproducible(a in lattice(), b in lattice(), via in prop::option::of(lattice()), seed in 0..i64::MAX as u64) {
        prop_assume!(a != b && via.is_none_or(|v| v != a && v != b));
        let spec = problem(a, b, via, seed);
        let r = run(&spec).unwrap();
        prop_assert_eq!(r.strides.len(), 3);
        for w in r.strides.windows(2) {
            prop_assert!(w[1].value <= w[0].value + 1e-9, "J rose from {} to {}", w[0].value, w[1].value);
        }
        prop_assert!(r.oracle_holds);
        for (s, set) in r.strides.iter().zip(&r.sequence) {
            prop_assert!((set.measure() - s.value).abs() < 1e-9 * s.value.max(1.0));
            prop_assert!(s.cascade.iter().all(|l| l.ratio.is_finite() && l.ratio >= 0.0));
            prop_assert!(s.erosion_after <= s.erosion_before + 1e-9);
        }
        let l1 = (a[0] as f64 - b[0] as f64).abs() * 0.5 + (a[1] as f64 - b[1] as f64).abs() * 0.5;
        prop_assert!((r.final_value - l1).abs() < 1e-9, "final {} vs l1 {}", r.final_value, l1);

        let again = run(&spec).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_report_jsonl(&mut x, &r).unwrap();
        write_report_jsonl(&mut y, &again).unwrap();
        prop_assert_eq!(x, y);

        let mesh = Mesh::from_set(&r.final_set);
        let back = Mesh::from_off(&mesh.to_off()).unwrap();
        prop_assert_eq!(&back, &mesh);
        prop_assert!((back.to_set().unwrap().measure() - r.final_value).abs() < 1e-9);
    }
}
