mod common;

use common::{case, polar_integral};
use qdot::energies::{energy_total, energy_virial};
use qdot::fields::compute_fields;
use qdot::model::{E_EXCITED, E_GROUND};

#[test]
fn virial_matches_direct_for_both_states() {
    for (excited, b) in [(false, 0.0), (true, 0.0), (false, 0.8), (true, 0.4)] {
        let c = case(excited, b, 801);
        let fp = compute_fields(&c.src, &c.params).unwrap();
        let rep = energy_total(&c.wf, &c.params, Some((&c.src, &fp))).unwrap();
        assert!((rep.t_virial - rep.t_direct).abs() < 1e-4, "T {} vs {}", rep.t_virial, rep.t_direct);
        assert!((rep.eee_virial - rep.eee_direct).abs() < 1e-4, "Eee {} vs {}", rep.eee_virial, rep.eee_direct);
        let reference = if excited { E_EXCITED } else { E_GROUND };
        assert!((rep.e_total - reference).abs() < 1e-4, "E = {}", rep.e_total);
        assert!((rep.e_total_virial.unwrap() - reference).abs() < 1e-4);
        assert!(rep.cross_term_max < 1e-14);
    }
}

#[test]
fn interaction_energy_matches_pair_quadrature() {
    // ⟨1/u⟩ with the |r₁ − r₂| singularity at the inner mesh origin
    let c = case(false, 0.0, 201);
    let reach = 10.0;
    let direct = polar_integral([0.0, 0.0], reach, 12, 32, |a| {
        polar_integral(a, reach + a[0].hypot(a[1]), 16, 32, |b| {
            let u = (a[0] - b[0]).hypot(a[1] - b[1]);
            c.wf.evaluate(a, b).powi(2) / u
        })
    });
    let rep = energy_total(&c.wf, &c.params, None).unwrap();
    assert!((rep.eee_direct - direct).abs() < 1e-6, "{} vs {direct}", rep.eee_direct);
}

#[test]
fn virial_integrals_are_linear_in_the_sources() {
    let c = case(true, 0.0, 401);
    let fp = compute_fields(&c.src, &c.params).unwrap();
    let (t, e) = energy_virial(&c.src, &fp).unwrap();
    let mut doubled = c.src.clone();
    for p in &mut doubled.points {
        for v in [
            &mut p.rho, &mut p.drho, &mut p.d2rho, &mut p.d3rho, &mut p.e_ee, &mut p.t_rr, &mut p.t_pp, &mut p.dt_rr,
        ] {
            *v *= 2.0;
        }
    }
    let (t2, e2) = energy_virial(&doubled, &fp).unwrap();
    assert!((t2 - 2.0 * t).abs() < 1e-13 && (e2 - 2.0 * e).abs() < 1e-13);
}

#[test]
fn excited_energy_against_five_omega() {
    let c = case(true, 0.0, 201);
    let rep = energy_total(&c.wf, &c.params, None).unwrap();
    assert!((rep.five_omega - 5.0 * c.wf.omega).abs() < 1e-15);
    assert!((rep.five_omega - 3.434080).abs() < 1e-5, "5Ω = {}", rep.five_omega);
    assert!((rep.e_total - rep.five_omega).abs() < 1e-4);
    println!("E1 = {:.7}, 5Ω = {:.7}, offset = {:.2e}", rep.e_total, rep.five_omega, rep.e_total - rep.five_omega);
}

#[test]
fn report_serialises() {
    let c = case(false, 0.0, 101);
    let json = energy_total(&c.wf, &c.params, None).unwrap().to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["e_reference"], 3.0);
    assert!(v["t_virial"].is_null());
}
