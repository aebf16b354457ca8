//! Loss gradients: analytic parameter shifts and SPSA.
//!
//! Each angle drives one Pauli rotation `exp(-i theta P / 2)`. A single
//! occurrence of an angle makes the prepared amplitudes trigonometric in
//! `theta / 2`, so the overlap scores `|<t|U_r|h>|^2` are trigonometric
//! polynomials of frequency 1 while the switch score `Re<t|U_r|h>` has
//! frequency 1/2. The matching two-point rule for frequency `w` is
//! `f'(theta) = w [f(theta + s) - f(theta - s)] / (2 sin(w s))`, evaluated
//! with `s = pi/2` for the overlap schemes and `s = pi` for the switch test.
//! An entity that is both head and tail of a triple is differentiated one
//! occurrence at a time (product rule).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::ParamVector;
use crate::error::{Error, Result};
use crate::scoring::{derive_seed, ScoreMode, ScoreScheme};

use super::graph::LabeledTriple;
use super::loss::{mse_tagged, score_thetas, tag, triple_mode, Tagged};
use super::params::{ParamCoord, ParameterStore};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRule {
    pub shift: f64,
    pub divisor: f64,
}

impl ShiftRule {
    pub fn for_scheme(scheme: ScoreScheme) -> Self {
        if scheme.is_linear_in_amplitude() {
            ShiftRule {
                shift: PI,
                divisor: 4.0,
            }
        } else {
            ShiftRule {
                shift: FRAC_PI_2,
                divisor: 2.0,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Head,
    Relation,
    Tail,
}

/// d(score)/d(angle) for the angle `param` of one slot of a triple.
fn occurrence_derivative(
    params: &ParameterStore,
    item: &LabeledTriple,
    slot: Slot,
    param: usize,
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    let rule = ShiftRule::for_scheme(scheme);
    let t = item.triple;
    let (h, r, tl) = (
        params.entity(t.head)?,
        params.relation(t.relation)?,
        params.entity(t.tail)?,
    );
    let eval = |sign: f64, salt: u64| -> Result<f64> {
        let shifted: ParamVector;
        let thetas = match slot {
            Slot::Head => {
                shifted = h.shifted(param, sign * rule.shift);
                (&shifted, r, tl)
            }
            Slot::Relation => {
                shifted = r.shifted(param, sign * rule.shift);
                (h, &shifted, tl)
            }
            Slot::Tail => {
                shifted = tl.shifted(param, sign * rule.shift);
                (h, r, &shifted)
            }
        };
        let mode = match mode {
            ScoreMode::Exact => ScoreMode::Exact,
            ScoreMode::Sampled { shots, seed } => ScoreMode::Sampled {
                shots,
                seed: derive_seed(seed, salt, param as u64),
            },
        };
        score_thetas(params, thetas, scheme, mode)
    };
    let salt = 2 * slot as u64;
    Ok((eval(1.0, salt)? - eval(-1.0, salt + 1)?) / rule.divisor)
}

fn slot_coord(item: &LabeledTriple, slot: Slot, param: usize) -> ParamCoord {
    let t = item.triple;
    match slot {
        Slot::Head => ParamCoord::Entity {
            index: t.head,
            param,
        },
        Slot::Relation => ParamCoord::Relation {
            index: t.relation,
            param,
        },
        Slot::Tail => ParamCoord::Entity {
            index: t.tail,
            param,
        },
    }
}

const SLOTS: [Slot; 3] = [Slot::Head, Slot::Relation, Slot::Tail];

/// d(loss)/d(angle) for one coordinate over `batch`, exact scores.
pub fn gradient_parameter_shift(
    params: &ParameterStore,
    batch: &[LabeledTriple],
    scheme: ScoreScheme,
    coord: ParamCoord,
) -> Result<f64> {
    params.flat_index(coord)?;
    if batch.is_empty() {
        return Err(Error::EmptyData);
    }
    let scale = 2.0 / batch.len() as f64;
    let mut grad = 0.0;
    for item in batch {
        let mut d_score = 0.0;
        let mut touched = false;
        for slot in SLOTS {
            let param = match coord {
                ParamCoord::Entity { param, .. } | ParamCoord::Relation { param, .. } => param,
            };
            if slot_coord(item, slot, param) == coord {
                d_score +=
                    occurrence_derivative(params, item, slot, param, scheme, ScoreMode::Exact)?;
                touched = true;
            }
        }
        if touched {
            let delta = score_thetas(
                params,
                (
                    params.entity(item.triple.head)?,
                    params.relation(item.triple.relation)?,
                    params.entity(item.triple.tail)?,
                ),
                scheme,
                ScoreMode::Exact,
            )?;
            grad += scale * (delta - item.target()) * d_score;
        }
    }
    Ok(grad)
}

pub(crate) fn parameter_shift_tagged(
    params: &ParameterStore,
    batch: &[Tagged],
    scheme: ScoreScheme,
    mode: ScoreMode,
    epoch: u64,
) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::EmptyData);
    }
    let p = params.per_vector();
    let scale = 2.0 / batch.len() as f64;
    let parts: Vec<Vec<(usize, f64)>> = batch
        .par_iter()
        .map(|(id, item)| {
            let mode = triple_mode(mode, *id, epoch);
            let t = item.triple;
            let delta = score_thetas(
                params,
                (
                    params.entity(t.head)?,
                    params.relation(t.relation)?,
                    params.entity(t.tail)?,
                ),
                scheme,
                mode,
            )?;
            let coeff = scale * (delta - item.target());
            let mut out = Vec::with_capacity(3 * p);
            for slot in SLOTS {
                for k in 0..p {
                    let d = occurrence_derivative(params, item, slot, k, scheme, mode)?;
                    out.push((params.flat_index(slot_coord(item, slot, k))?, coeff * d));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut grad = vec![0.0; params.len()];
    for part in parts {
        for (i, g) in part {
            grad[i] += g;
        }
    }
    Ok(grad)
}

/// Full flat gradient by parameter shifts. Per-triple contributions are
/// summed in batch order, so the result does not depend on scheduling.
pub fn full_gradient_parameter_shift(
    params: &ParameterStore,
    batch: &[LabeledTriple],
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<Vec<f64>> {
    parameter_shift_tagged(params, &tag(batch), scheme, mode, 0)
}

pub(crate) fn spsa_tagged(
    params: &ParameterStore,
    batch: &[Tagged],
    scheme: ScoreScheme,
    mode: ScoreMode,
    epoch: u64,
    seed: u64,
    perturbation: f64,
) -> Result<Vec<f64>> {
    if !(perturbation > 0.0 && perturbation.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "SPSA perturbation must be positive, got {perturbation}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs: Vec<f64> = (0..params.len())
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let base = params.to_flat();
    let mut probe = params.clone();
    let mut loss_at = |dir: f64| -> Result<f64> {
        let moved: Vec<f64> = base
            .iter()
            .zip(&signs)
            .map(|(x, s)| x + dir * perturbation * s)
            .collect();
        probe.set_flat(&moved)?;
        // same per-triple seeds on both sides
        mse_tagged(&probe, batch, scheme, mode, epoch)
    };
    let diff = loss_at(1.0)? - loss_at(-1.0)?;
    Ok(signs
        .iter()
        .map(|s| diff / (2.0 * perturbation * s))
        .collect())
}

/// Simultaneous-perturbation estimate with a symmetric Bernoulli(+-1)
/// direction scaled by `perturbation`.
pub fn gradient_spsa(
    params: &ParameterStore,
    batch: &[LabeledTriple],
    scheme: ScoreScheme,
    mode: ScoreMode,
    seed: u64,
    perturbation: f64,
) -> Result<Vec<f64>> {
    spsa_tagged(params, &tag(batch), scheme, mode, 0, seed, perturbation)
}
