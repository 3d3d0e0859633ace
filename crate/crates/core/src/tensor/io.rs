//! JSON state files: `{"dims":[d1,...,dn], "amps":[[re,im],...]}`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64};
use super::state::PureState;
use crate::error::{Error, Result};

/// Wire form of a [`PureState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amps: Vec<[f64; 2]>,
}

impl From<PureState> for StateFile {
    fn from(s: PureState) -> Self {
        Self {
            dims: s.dims().to_vec(),
            amps: s.amps().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateFile> for PureState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        PureState::new(
            f.dims,
            f.amps
                .into_iter()
                .map(|[re, im]| C64::new(re, im))
                .collect(),
        )
    }
}

pub fn state_to_json(s: &PureState) -> serde_json::Value {
    serde_json::to_value(s).expect("state serializes")
}

pub fn state_from_json(text: &str) -> Result<PureState> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_state(mut reader: impl Read) -> Result<PureState> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::Parse(e.to_string()))?;
    state_from_json(&text)
}

/// Matrix as nested `[[[re,im],...],...]` rows.
pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    serde_json::to_value(rows).expect("matrix serializes")
}
