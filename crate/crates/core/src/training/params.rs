use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, ParamVector};
use crate::error::{Error, Result};

/// One trainable angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamCoord {
    Entity { index: usize, param: usize },
    Relation { index: usize, param: usize },
}

/// Entity and relation angle vectors. The flat layout used by optimizers puts
/// all entity vectors first, then all relation vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterStore {
    pub spec: AnsatzSpec,
    pub entities: Vec<ParamVector>,
    pub relations: Vec<ParamVector>,
}

impl ParameterStore {
    pub fn new(
        spec: AnsatzSpec,
        entities: Vec<ParamVector>,
        relations: Vec<ParamVector>,
    ) -> Result<Self> {
        for v in entities.iter().chain(&relations) {
            spec.check(v)?;
        }
        Ok(ParameterStore {
            spec,
            entities,
            relations,
        })
    }

    /// Independent uniform draws from `[-pi, pi)`.
    pub fn init_uniform(
        spec: AnsatzSpec,
        n_entities: usize,
        n_relations: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = spec.param_count();
        let mut draw = |count: usize| -> Vec<ParamVector> {
            (0..count)
                .map(|_| ParamVector((0..p).map(|_| rng.random_range(-PI..PI)).collect()))
                .collect()
        };
        let entities = draw(n_entities);
        let relations = draw(n_relations);
        ParameterStore {
            spec,
            entities,
            relations,
        }
    }

    pub fn per_vector(&self) -> usize {
        self.spec.param_count()
    }

    pub fn len(&self) -> usize {
        (self.entities.len() + self.relations.len()) * self.per_vector()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entity(&self, index: usize) -> Result<&ParamVector> {
        self.entities.get(index).ok_or(Error::IndexOutOfRange {
            what: "entity",
            index,
            size: self.entities.len(),
        })
    }

    pub fn relation(&self, index: usize) -> Result<&ParamVector> {
        self.relations.get(index).ok_or(Error::IndexOutOfRange {
            what: "relation",
            index,
            size: self.relations.len(),
        })
    }

    pub fn flat_index(&self, coord: ParamCoord) -> Result<usize> {
        let p = self.per_vector();
        let (base, index, size, param, what) = match coord {
            ParamCoord::Entity { index, param } => (0, index, self.entities.len(), param, "entity"),
            ParamCoord::Relation { index, param } => (
                self.entities.len() * p,
                index,
                self.relations.len(),
                param,
                "relation",
            ),
        };
        if index >= size {
            return Err(Error::IndexOutOfRange { what, index, size });
        }
        if param >= p {
            return Err(Error::IndexOutOfRange {
                what: "parameter",
                index: param,
                size: p,
            });
        }
        Ok(base + index * p + param)
    }

    pub fn coord_of(&self, flat: usize) -> Result<ParamCoord> {
        let p = self.per_vector();
        let n_ent = self.entities.len() * p;
        if flat < n_ent {
            Ok(ParamCoord::Entity {
                index: flat / p,
                param: flat % p,
            })
        } else if flat < self.len() {
            Ok(ParamCoord::Relation {
                index: (flat - n_ent) / p,
                param: (flat - n_ent) % p,
            })
        } else {
            Err(Error::IndexOutOfRange {
                what: "parameter",
                index: flat,
                size: self.len(),
            })
        }
    }

    pub fn get(&self, coord: ParamCoord) -> Result<f64> {
        self.flat_index(coord)?;
        Ok(match coord {
            ParamCoord::Entity { index, param } => self.entities[index].0[param],
            ParamCoord::Relation { index, param } => self.relations[index].0[param],
        })
    }

    pub fn set(&mut self, coord: ParamCoord, value: f64) -> Result<()> {
        self.flat_index(coord)?;
        match coord {
            ParamCoord::Entity { index, param } => self.entities[index].0[param] = value,
            ParamCoord::Relation { index, param } => self.relations[index].0[param] = value,
        }
        Ok(())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.entities
            .iter()
            .chain(&self.relations)
            .flat_map(|v| v.0.iter().copied())
            .collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: flat.len(),
            });
        }
        let p = self.per_vector();
        for (v, chunk) in self
            .entities
            .iter_mut()
            .chain(self.relations.iter_mut())
            .zip(flat.chunks(p))
        {
            v.0.copy_from_slice(chunk);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_layout_round_trips() {
        let spec = AnsatzSpec::new(2, 1).unwrap();
        let mut store = ParameterStore::init_uniform(spec, 3, 2, 4);
        assert_eq!(store.len(), 20);
        let c = ParamCoord::Relation { index: 1, param: 2 };
        let flat = store.flat_index(c).unwrap();
        assert_eq!(flat, 3 * 4 + 4 + 2);
        assert_eq!(store.coord_of(flat).unwrap(), c);
        assert_eq!(store.to_flat()[flat], store.get(c).unwrap());
        let mut v = store.to_flat();
        v[flat] = 42.0;
        store.set_flat(&v).unwrap();
        assert_eq!(store.get(c).unwrap(), 42.0);
        assert!(store
            .flat_index(ParamCoord::Entity { index: 3, param: 0 })
            .is_err());
        assert!(store.coord_of(20).is_err());
    }

    #[test]
    fn init_is_seeded_and_in_range() {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        let a = ParameterStore::init_uniform(spec, 4, 2, 9);
        assert_eq!(a, ParameterStore::init_uniform(spec, 4, 2, 9));
        assert_ne!(a, ParameterStore::init_uniform(spec, 4, 2, 10));
        assert!(a.to_flat().iter().all(|x| (-PI..PI).contains(x)));
    }
}
