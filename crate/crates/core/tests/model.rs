use std::collections::BTreeMap;

use tailsampler::model::{builtin_model, Artificial3ObsParams, AuxKind, PotentialModel};
use tailsampler::Error;
use tailsampler_oracle::models::{sv_potential, ThreeObs};
use tailsampler_oracle::quad::integrate;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn abscissae() -> Vec<f64> {
    (1..=400).map(|i| 0.0125 * i as f64).collect()
}

#[test]
fn artificial_potential_matches_transcription() {
    let m = PotentialModel::artificial3obs(&Artificial3ObsParams::default()).unwrap();
    let o = ThreeObs::default();
    for x in abscissae() {
        let (a, b) = (m.eval_potential(x).unwrap(), o.potential(x));
        assert!(close(a, b, 1e-12), "x = {x}: {a} vs {b}");
    }
}

#[test]
fn reduced_potential_is_the_likelihood() {
    let m = PotentialModel::artificial3obs(&Artificial3ObsParams::default()).unwrap();
    let o = ThreeObs::default();
    for i in 0..100 {
        let x = 0.05 + 0.07 * i as f64;
        let a = m.eval_reduced_potential(3, x).unwrap();
        assert!(close(a, o.likelihood_potential(x), 1e-12), "x = {x}");
    }
}

#[test]
fn auxiliary_potentials_at_e() {
    let m = PotentialModel::artificial3obs(&Artificial3ObsParams::default()).unwrap();
    let x = std::f64::consts::E;
    let v = ThreeObs::default().potential(x);
    let h = m.eval_aux_potential(AuxKind::Height, 3.0, x).unwrap();
    let w = m.eval_aux_potential(AuxKind::PositiveWidth, 3.0, x).unwrap();
    assert!(close(h, v / 4.0, 1e-12));
    assert!(close(w, 0.75 * v - 1.0, 1e-12));
    assert!(matches!(
        m.eval_aux_potential(AuxKind::NegativeWidth, 3.0, x),
        Err(Error::Sign { .. })
    ));
}

#[test]
fn artificial_density_is_integrable() {
    let o = ThreeObs::default();
    let bulk = integrate(|x| o.density(x), 0.0, 50.0, 1e-12);
    let tail = integrate(|x| o.density(x), 50.0, 500.0, 1e-12);
    assert!(bulk.is_finite() && bulk > 0.0);
    assert!(tail < 1e-12 * bulk);
}

#[test]
fn sv_step_matches_transcription() {
    for &(y, alpha, sigma) in &[(-1.0, 0.3, 0.9), (2.0, -1.5, 0.5), (0.0, 0.0, 1.0)] {
        let m = PotentialModel::sv_step(y, alpha, sigma).unwrap();
        let mj = PotentialModel::sv_step_jacobian(y, alpha, sigma).unwrap();
        for x in abscissae() {
            let v = sv_potential(x, y, alpha, sigma);
            if v > 700.0 {
                continue;
            }
            assert!(close(m.eval_potential(x).unwrap(), v, 1e-12), "x = {x}");
            assert!(close(mj.eval_potential(x).unwrap(), v + x.ln(), 1e-12), "x = {x}");
        }
    }
}

#[test]
fn sv_second_moment_is_finite() {
    let m = PotentialModel::sv_step(-0.5, 0.2, 0.9).unwrap();
    let mut prev = f64::INFINITY;
    for k in 1..8 {
        let x = 10f64.powi(k);
        let w = x * x * m.density(x);
        assert!(w <= prev);
        prev = w;
    }
    assert!(prev < 1e-30);
}

#[test]
fn registry_builds_and_rejects() {
    let mut params = BTreeMap::new();
    assert!(builtin_model("artificial3obs", &params).is_ok());
    assert!(matches!(builtin_model("sv_step", &params), Err(Error::InvalidParameter { .. })));
    params.insert("y".to_string(), -1.0);
    params.insert("alpha".to_string(), 0.0);
    params.insert("sigma".to_string(), 0.0);
    assert!(builtin_model("sv_step", &params).is_err());
    params.insert("sigma".to_string(), 1.0);
    assert_eq!(builtin_model("sv_step_jacobian", &params).unwrap().len(), 3);
    assert!(matches!(builtin_model("other", &params), Err(Error::UnknownModel(_))));
}

#[test]
fn evaluation_outside_support_is_an_error() {
    let m = PotentialModel::artificial3obs(&Artificial3ObsParams::default()).unwrap();
    assert!(matches!(m.eval_potential(-1.0), Err(Error::OutsideSupport { .. })));
    assert!(matches!(m.eval_term(4, 1.0), Err(Error::TermIndex { .. })));
}
