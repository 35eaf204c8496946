use zetaforge::numeric::{eval_form, mc_integral};
use zetaforge::reducer::{compute_form, Family, FamilySpec};

#[test]
fn unreduced_integrals_agree_with_exact_forms() {
    for family in Family::ALL {
        for n in 0..=2 {
            let spec = FamilySpec::new(family, n);
            let exact = eval_form(&compute_form(spec).unwrap().form, 30).unwrap().to_f64();
            let est = mc_integral(spec, 1_000_000, 17).unwrap();
            let z = (est.mean - exact) / est.std_error;
            println!("{spec}: mean {:.8e} exact {exact:.8e} z {z:.2}", est.mean);
            assert!(est.covers(exact, 4.0), "{spec}: z = {z}");
        }
    }
}
