//! On-disk formats for states and constellations.

use majorana_core::majorana::Constellation;
use majorana_core::spin::{BlochPoint, Spin, SpinState};
use majorana_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub schema: u32,
    pub twice_s: u32,
    /// `[re, im]` pairs ascending in `M`.
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip_overlap: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstellationFile {
    pub schema: u32,
    pub twice_s: u32,
    pub points: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip_overlap: Option<f64>,
}

fn check_schema(schema: u32) -> Result<(), CliError> {
    if schema != SCHEMA {
        return Err(CliError::Input(format!("unsupported schema {schema} (expected {SCHEMA})")));
    }
    Ok(())
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("state file: {e}")))?;
        check_schema(f.schema)?;
        Ok(f)
    }

    pub fn from_state(s: &SpinState) -> Self {
        Self {
            schema: SCHEMA,
            twice_s: s.spin().twice(),
            amplitudes: s.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
            round_trip_overlap: None,
        }
    }

    pub fn to_state(&self) -> Result<SpinState, CliError> {
        let spin = Spin::from_twice(self.twice_s)?;
        if self.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Input("non-finite amplitude".into()));
        }
        let amps = self.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(SpinState::new(spin, amps)?)
    }
}

impl ConstellationFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("constellation file: {e}")))?;
        check_schema(f.schema)?;
        Ok(f)
    }

    pub fn from_constellation(c: &Constellation) -> Self {
        Self {
            schema: SCHEMA,
            twice_s: c.spin().twice(),
            points: c.points().iter().map(|p| PointRecord { alpha: p.alpha(), beta: p.beta() }).collect(),
            round_trip_overlap: None,
        }
    }

    /// `scale` converts the stored angles to radians.
    pub fn to_constellation(&self, scale: f64) -> Result<Constellation, CliError> {
        let spin = Spin::from_twice(self.twice_s)?;
        let points = self
            .points
            .iter()
            .map(|p| BlochPoint::new(p.alpha * scale, p.beta * scale))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Constellation::new(spin, points)?)
    }
}
