//! Runs every cargo example and checks the lines it is meant to show.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }
    };
}

example!(gf2_basics);
example!(lempel);
example!(phase_polynomials);
example!(optimal_synthesis);
example!(fast_synthesis);
example!(mu_decomposition);
example!(controlled_unitaries);
example!(subadditivity);
example!(emit_circuit);
example!(synthillation_toffoli);
example!(error_series);
example!(pipeline_comparison);

#[test]
fn gf2_basics_runs() {
    let out = gf2_basics::run_example().unwrap();
    assert!(out.contains("rank = 2"));
    assert!(out.contains("M M^-1 = I: true"));
}

#[test]
fn lempel_runs() {
    let out = lempel::run_example().unwrap();
    assert_eq!(out.matches("B B^T == Q: true").count(), 3);
}

#[test]
fn phase_polynomials_runs() {
    let out = phase_polynomials::run_example().unwrap();
    assert!(out.contains("F ~c F + 4x0x1 + 2x2: true"));
    assert!(out.contains("F ~c F + 2x0x2: false"));
}

#[test]
fn optimal_synthesis_runs() {
    let out = optimal_synthesis::run_example().unwrap();
    for line in ["CS: t-count 3", "CCZ: t-count 7", "CCZ.CS: t-count 4", "2CS: t-count 6"] {
        assert!(out.contains(line), "{line}\n{out}");
    }
}

#[test]
fn fast_synthesis_runs() {
    let out = fast_synthesis::run_example().unwrap();
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn mu_decomposition_runs() {
    let out = mu_decomposition::run_example().unwrap();
    assert!(out.contains("2CS: mu = 5"));
    assert!(out.contains("4CS: mu = 9"));
}

#[test]
fn controlled_unitaries_runs() {
    let out = controlled_unitaries::run_example().unwrap();
    assert!(out.contains("controlled 4CS: t-count 19"));
}

#[test]
fn subadditivity_runs() {
    let out = subadditivity::run_example().unwrap();
    assert!(out.contains("5 Toffolis: 31 columns"));
}

#[test]
fn emit_circuit_runs() {
    let out = emit_circuit::run_example().unwrap();
    assert!(out.contains("T gates: 7"));
    assert!(out.contains("simulated == target: true"));
}

#[test]
fn synthillation_toffoli_runs() {
    let out = synthillation_toffoli::run_example().unwrap();
    assert!(out.starts_with("G k=3 s=1 n=8 case=11 delta=1"));
    assert!(out.contains("distance = 2"));
    assert!(out.contains("flipped matrix: not quasitransversal"));
}

#[test]
fn error_series_runs() {
    let out = error_series::run_example().unwrap();
    assert!(out.contains("eps_out = 91*e^2 + 182*e^3 - 7021*e^4 - 28812*e^5 + O(e^6)"));
}

#[test]
fn pipeline_comparison_runs() {
    let out = pipeline_comparison::run_example().unwrap();
    assert!(out.contains("best synthillation: synthillation rounds=3"));
}
