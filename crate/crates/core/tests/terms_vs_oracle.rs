use stepswitch::oracle::oracle_term;
use stepswitch::transient::{all_terms, Support};
use stepswitch::Scenario;

fn check(s: &Scenario, label: &str) {
    let pts = [
        (-80.0, 3.0),
        (-30.0, 20.0),
        (-5.0, 0.7),
        (-60.0, 90.0),
        (0.0, 10.0),
        (5.0, 0.7),
        (30.0, 20.0),
        (80.0, 3.0),
        (100.0, 48.8),
        (60.0, 90.0),
    ];
    let mut worst = 0.0f64;
    for term in all_terms(s).unwrap() {
        for &(x, t) in &pts {
            let x = match term.support {
                Support::Left if x >= 0.0 => -x - 1.0,
                Support::Right if x < 0.0 => -x,
                _ => x,
            };
            let got = term.eval(x, t, 1e-12).unwrap();
            let want = oracle_term(term.j, term.alpha, s, x, t, 1e-12)
                .unwrap()
                .value;
            let err = (got - want).norm();
            worst = worst.max(err);
            assert!(
                err < 1e-8,
                "{label} {}{:?} x={x} t={t}: {got} vs {want}",
                term.j,
                term.alpha
            );
        }
    }
    println!("{label}: worst abs deviation {worst:.2e}");
}

#[test]
fn set_a_terms() {
    check(&Scenario::set_a(), "set A");
}

#[test]
fn set_b_terms() {
    check(&Scenario::set_b(), "set B");
}

#[test]
fn lowered_step_terms() {
    check(&Scenario::lowered_step(), "lowered step");
}
