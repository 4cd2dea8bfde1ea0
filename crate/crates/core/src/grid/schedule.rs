use crate::error::{GridflexError, Result};
use crate::grid::{GridSpec, KnownInput};

/// Day-ahead plan: known inputs plus the scheduled generator dispatch,
/// one entry per control step.
#[derive(Debug, Clone, PartialEq)]
pub struct DayAheadSchedule {
    pub known: Vec<KnownInput>,
    /// Per-step, per-generator scheduled output (MW).
    pub p_gen: Vec<Vec<f64>>,
}

impl DayAheadSchedule {
    pub fn len(&self) -> usize {
        self.known.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known.is_empty()
    }
}

/// Builds the day-ahead dispatch so that total generation plus wind
/// forecast exactly matches total load at every step. The required total
/// is split across generators proportionally to their capacity range.
/// The day-ahead storage power is zero.
pub fn day_ahead_schedule(
    spec: &GridSpec,
    load_profile: &[Vec<f64>],
    wind_fc_profile: &[Vec<f64>],
) -> Result<DayAheadSchedule> {
    if load_profile.len() != wind_fc_profile.len() || load_profile.is_empty() {
        return Err(GridflexError::Dimension(
            "load and forecast profiles must have equal nonzero length".into(),
        ));
    }
    if spec.n_g() == 0 {
        return Err(GridflexError::InvalidSpec(
            "day-ahead scheduling requires at least one generator".into(),
        ));
    }
    let ranges: Vec<f64> = spec.gen_capacity.iter().map(|[lo, hi]| hi - lo).collect();
    let total_range: f64 = ranges.iter().sum();

    let mut known = Vec::with_capacity(load_profile.len());
    let mut p_gen = Vec::with_capacity(load_profile.len());
    for (step, (load, fc)) in load_profile.iter().zip(wind_fc_profile).enumerate() {
        if load.len() != spec.n_t() || fc.len() != spec.n_f() {
            return Err(GridflexError::Dimension(format!(
                "profile row {step} does not match grid counts"
            )));
        }
        let total_load: f64 = load.iter().sum();
        let total_fc: f64 = fc.iter().sum();
        let residual = total_load - total_fc;
        if residual < 0.0 {
            return Err(GridflexError::InfeasibleSchedule {
                step,
                reason: format!(
                    "total wind forecast {total_fc} MW exceeds total load {total_load} MW"
                ),
            });
        }
        let dispatch: Vec<f64> = ranges.iter().map(|r| residual * r / total_range).collect();
        for (i, &p) in dispatch.iter().enumerate() {
            let [min, max] = spec.gen_capacity[i];
            if p < min || p > max {
                return Err(GridflexError::InfeasibleSchedule {
                    step,
                    reason: format!(
                        "generator {i} dispatch {p:.4} MW outside capacity [{min}, {max}]"
                    ),
                });
            }
            if step > 0 {
                let prev: &Vec<f64> = &p_gen[step - 1];
                let max_change = spec.gen_ramp[i] * spec.dt;
                if (p - prev[i]).abs() > max_change {
                    return Err(GridflexError::InfeasibleSchedule {
                        step,
                        reason: format!(
                            "generator {i} ramp {:.4} MW exceeds limit {max_change:.4} MW",
                            (p - prev[i]).abs()
                        ),
                    });
                }
            }
        }
        known.push(KnownInput {
            p_load: load.clone(),
            p_wind_fc: fc.clone(),
            p_stor: vec![0.0; spec.n_s()],
        });
        p_gen.push(dispatch);
    }
    Ok(DayAheadSchedule { known, p_gen })
}
