//! Settlement of a schedule against a price panel.

use crate::data::PricePanel;
use crate::error::SimError;
use crate::fleet::Location;
use crate::sim::FleetSchedule;

/// `Σ_t Σ_n Σ_L price_L(t)·(c − d)·Δt` in dollars; negative means profit.
pub fn evaluate_cost(schedule: &FleetSchedule, panel: &PricePanel) -> Result<f64, SimError> {
    let steps = schedule.steps();
    if panel.len() != steps {
        return Err(SimError::Dimension(format!(
            "schedule covers {steps} steps but the price panel has {}",
            panel.len()
        )));
    }
    let mut total = 0.0;
    for v in &schedule.vehicles {
        for t in 0..steps {
            for loc in Location::ALL {
                let l = loc.index();
                total += panel.price(loc, t) * (v.charge_kw[t][l] - v.discharge_kw[t][l]) * schedule.dt_hours;
            }
        }
    }
    Ok(total)
}
