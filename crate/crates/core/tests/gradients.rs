use std::f64::consts::PI;

use vqkge::ansatz::{AnsatzSpec, ParamVector};
use vqkge::scoring::{ScoreMode, ScoreScheme};
use vqkge::training::{
    full_gradient_parameter_shift, gradient_parameter_shift, gradient_spsa, mse_loss,
    LabeledTriple, ParamCoord, ParameterStore, Triple,
};

fn instance(n: usize, seed: u64) -> (ParameterStore, Vec<LabeledTriple>) {
    let params = ParameterStore::init_uniform(AnsatzSpec::new(n, 2).unwrap(), 3, 2, seed);
    let data = vec![
        LabeledTriple::positive(Triple::new(0, 0, 1)),
        LabeledTriple::negative(Triple::new(2, 0, 1)),
        LabeledTriple::positive(Triple::new(1, 1, 1)),
        LabeledTriple::negative(Triple::new(0, 1, 2)),
    ];
    (params, data)
}

fn central_difference(
    params: &ParameterStore,
    data: &[LabeledTriple],
    scheme: ScoreScheme,
    coord: ParamCoord,
) -> f64 {
    let h = 1e-5;
    let x = params.get(coord).unwrap();
    let mut p = params.clone();
    p.set(coord, x + h).unwrap();
    let up = mse_loss(&p, data, scheme, ScoreMode::Exact).unwrap();
    p.set(coord, x - h).unwrap();
    let down = mse_loss(&p, data, scheme, ScoreMode::Exact).unwrap();
    (up - down) / (2.0 * h)
}

#[test]
fn shift_rule_matches_finite_differences_including_repeated_entity() {
    for scheme in ScoreScheme::ALL {
        for n in 1..=2 {
            let (params, data) = instance(n, 11 + n as u64);
            // entity 1 is head and tail of the third triple
            for param in [0, params.per_vector() - 1] {
                for coord in [
                    ParamCoord::Entity { index: 1, param },
                    ParamCoord::Relation { index: 1, param },
                ] {
                    let ps = gradient_parameter_shift(&params, &data, scheme, coord).unwrap();
                    let fd = central_difference(&params, &data, scheme, coord);
                    let err = (ps - fd).abs();
                    assert!(
                        err <= 1e-7 || err <= 1e-5 * fd.abs(),
                        "{scheme} n={n} {coord:?}: {ps} vs {fd}"
                    );
                }
            }
        }
    }
}

#[test]
fn gradient_vanishes_at_a_global_minimum() {
    // |+> against RY(pi)|+> = -|->: every score is exactly 0, matching label 0
    let spec = AnsatzSpec::new(1, 1).unwrap();
    let params = ParameterStore::new(
        spec,
        vec![ParamVector(vec![0.0, 0.0]), ParamVector(vec![PI, 0.0])],
        vec![ParamVector(vec![0.0, 0.0])],
    )
    .unwrap();
    let data = [LabeledTriple::negative(Triple::new(0, 0, 1))];
    for scheme in ScoreScheme::ALL {
        assert!(mse_loss(&params, &data, scheme, ScoreMode::Exact).unwrap() < 1e-20);
        let g = full_gradient_parameter_shift(&params, &data, scheme, ScoreMode::Exact).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8), "{scheme}: {g:?}");
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn spsa_mean_points_along_the_gradient() {
    for scheme in ScoreScheme::ALL {
        let (params, data) = instance(2, 5);
        let exact =
            full_gradient_parameter_shift(&params, &data, scheme, ScoreMode::Exact).unwrap();
        let mut mean = vec![0.0; exact.len()];
        for seed in 0..100 {
            let g = gradient_spsa(&params, &data, scheme, ScoreMode::Exact, seed, 1e-3).unwrap();
            for (m, x) in mean.iter_mut().zip(g) {
                *m += x / 100.0;
            }
        }
        let cos = cosine(&mean, &exact);
        assert!(cos > 0.5, "{scheme}: cosine {cos}");
    }
}
