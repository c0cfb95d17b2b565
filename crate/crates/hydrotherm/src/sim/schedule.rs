//! Boundary-condition schedules: constants, the seasonal square wave,
//! monthly surface-temperature tables and spatial linear profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds in the schedule year (365 days).
pub const YEAR_SECONDS: f64 = 365.0 * 86400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    Constant {
        value: f64,
    },
    /// `mean ± amplitude`, switching every half period. With `hot_first` the
    /// high phase starts at t = 0.
    SquareWave {
        mean: f64,
        amplitude: f64,
        period_s: f64,
        hot_first: bool,
    },
    /// Twelve calendar-month values (January first); the simulation starts at
    /// `start_month` (1 = January ... 12 = December). Months are uniform
    /// twelfths of the schedule year.
    MonthlyTable {
        values: Vec<f64>,
        start_month: u32,
    },
    /// Spatial, not temporal: `surface_value + per_m_depth · depth`. Used for
    /// initial profiles and depth-dependent boundary values.
    LinearGradientProfile {
        surface_value: f64,
        per_m_depth: f64,
    },
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::SquareWave { period_s, .. } => {
                if *period_s <= 0.0 {
                    return Err(Error::config(format!(
                        "square wave period must be positive, got {period_s}"
                    )));
                }
            }
            Schedule::MonthlyTable { values, start_month } => {
                if values.len() != 12 {
                    return Err(Error::config(format!(
                        "monthly table needs exactly 12 entries, got {}",
                        values.len()
                    )));
                }
                if !(1..=12).contains(start_month) {
                    return Err(Error::config(format!(
                        "start_month must lie in 1..=12, got {start_month}"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Value at simulation time `t` and `depth` below the surface.
    pub fn value_at(&self, t: f64, depth: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::SquareWave {
                mean,
                amplitude,
                period_s,
                hot_first,
            } => {
                let phase = t.rem_euclid(*period_s);
                let high = phase < 0.5 * period_s;
                if high == *hot_first {
                    mean + amplitude
                } else {
                    mean - amplitude
                }
            }
            Schedule::MonthlyTable { values, start_month } => {
                let month_len = YEAR_SECONDS / 12.0;
                let elapsed = (t.max(0.0) / month_len).floor() as u64;
                let idx = ((*start_month as u64 - 1) + elapsed) % 12;
                values[idx as usize]
            }
            Schedule::LinearGradientProfile {
                surface_value,
                per_m_depth,
            } => surface_value + per_m_depth * depth,
        }
    }
}

/// Value of the schedule at time `t` (spatial profiles report their surface
/// value).
pub fn evaluate_schedule(schedule: &Schedule, t: f64) -> f64 {
    schedule.value_at(t, 0.0)
}

/// The pile-temperature square wave: 288.55 ± 13 K over one year, hot phase
/// first (the simulation starts in May, at the onset of the heating season).
pub fn pile_square_wave() -> Schedule {
    Schedule::SquareWave {
        mean: 288.55,
        amplitude: 13.0,
        period_s: YEAR_SECONDS,
        hot_first: true,
    }
}

/// Placeholder monthly ground-surface table: a sinusoid with annual mean
/// 287.45 K anchored so that May reads 287.65 K, peaking in late summer.
/// Replace with measured monthly means when available.
pub fn default_surface_table() -> Schedule {
    let mean = 287.45;
    let amplitude = 4.0;
    let may_anchor: f64 = 287.65;
    let phase = ((may_anchor - mean) / amplitude).asin();
    let mut values = Vec::with_capacity(12);
    for month in 0..12 {
        // Month index relative to May (month 4, zero-based January).
        let rel = month as f64 - 4.0;
        values.push(mean + amplitude * (2.0 * std::f64::consts::PI * rel / 12.0 + phase).sin());
    }
    Schedule::MonthlyTable {
        values,
        start_month: 5,
    }
}
