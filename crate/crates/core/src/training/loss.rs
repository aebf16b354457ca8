use rayon::prelude::*;

use crate::ansatz::ParamVector;
use crate::error::{Error, Result};
use crate::scoring::{derive_seed, score_prep, ScoreMode, ScoreScheme, TriplePrep};

use super::graph::{LabeledTriple, Triple};
use super::params::ParameterStore;

/// A dataset element with the stable id used to derive its sampling seeds.
pub type Tagged = (u64, LabeledTriple);

pub(crate) fn tag(data: &[LabeledTriple]) -> Vec<Tagged> {
    data.iter()
        .enumerate()
        .map(|(i, t)| (i as u64, *t))
        .collect()
}

/// Sampling seed for one triple in one epoch.
pub(crate) fn triple_mode(mode: ScoreMode, id: u64, epoch: u64) -> ScoreMode {
    match mode {
        ScoreMode::Exact => ScoreMode::Exact,
        ScoreMode::Sampled { shots, seed } => ScoreMode::Sampled {
            shots,
            seed: derive_seed(seed, id, epoch),
        },
    }
}

pub(crate) fn score_thetas(
    params: &ParameterStore,
    thetas: (&ParamVector, &ParamVector, &ParamVector),
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    let prep = TriplePrep::from_params(&params.spec, thetas.0, thetas.1, thetas.2)?;
    Ok(score_prep(scheme, &prep, mode)?.value)
}

pub fn score_triple(
    params: &ParameterStore,
    triple: &Triple,
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    let thetas = (
        params.entity(triple.head)?,
        params.relation(triple.relation)?,
        params.entity(triple.tail)?,
    );
    score_thetas(params, thetas, scheme, mode)
}

pub(crate) fn mse_tagged(
    params: &ParameterStore,
    data: &[Tagged],
    scheme: ScoreScheme,
    mode: ScoreMode,
    epoch: u64,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let errors: Vec<f64> = data
        .par_iter()
        .map(|(id, item)| {
            let delta = score_triple(params, &item.triple, scheme, triple_mode(mode, *id, epoch))?;
            Ok((delta - item.target()).powi(2))
        })
        .collect::<Result<_>>()?;
    Ok(errors.iter().sum::<f64>() / data.len() as f64)
}

/// Mean squared error between scores and labels.
pub fn mse_loss(
    params: &ParameterStore,
    data: &[LabeledTriple],
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    mse_tagged(params, &tag(data), scheme, mode, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzSpec;

    fn store() -> ParameterStore {
        ParameterStore::init_uniform(AnsatzSpec::new(1, 1).unwrap(), 2, 1, 0)
    }

    #[test]
    fn empty_data_is_an_error() {
        assert!(matches!(
            mse_loss(&store(), &[], ScoreScheme::Swap, ScoreMode::Exact),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn loss_is_zero_when_scores_match_labels() {
        // identical entity vectors and a zero relation on one qubit: score 1
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let v = ParamVector(vec![0.4, -1.0]);
        let params =
            ParameterStore::new(spec, vec![v.clone(), v], vec![ParamVector::zeros(2)]).unwrap();
        let data = [LabeledTriple::positive(Triple::new(0, 0, 1))];
        for scheme in ScoreScheme::ALL {
            assert!(mse_loss(&params, &data, scheme, ScoreMode::Exact).unwrap() < 1e-20);
        }
    }

    #[test]
    fn single_triple_arithmetic() {
        // |+> against RY(2 pi / 3)|+>: squared overlap cos^2(pi / 3) = 1/4
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let tail = ParamVector(vec![2.0 * std::f64::consts::FRAC_PI_3, 0.0]);
        let params = ParameterStore::new(
            spec,
            vec![ParamVector::zeros(2), tail],
            vec![ParamVector::zeros(2)],
        )
        .unwrap();
        let t = Triple::new(0, 0, 1);
        for scheme in [ScoreScheme::Swap, ScoreScheme::ComputeUncompute] {
            let delta = score_triple(&params, &t, scheme, ScoreMode::Exact).unwrap();
            assert!((delta - 0.25).abs() < 1e-12, "{delta}");
            let loss = mse_loss(
                &params,
                &[LabeledTriple::positive(t)],
                scheme,
                ScoreMode::Exact,
            )
            .unwrap();
            assert!((loss - 0.5625).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_ranges() {
        let params = ParameterStore::init_uniform(AnsatzSpec::new(2, 2).unwrap(), 3, 2, 5);
        let data: Vec<LabeledTriple> = (0..6)
            .map(|i| LabeledTriple {
                triple: Triple::new(i % 3, i % 2, (i + 1) % 3),
                label: i % 2 == 0,
            })
            .collect();
        for scheme in ScoreScheme::ALL {
            let l = mse_loss(&params, &data, scheme, ScoreMode::Exact).unwrap();
            let hi = if scheme == ScoreScheme::Switch {
                4.0
            } else {
                1.0
            };
            assert!((0.0..=hi).contains(&l));
        }
    }
}
