//! Dense column layout of the fleet MILP.
//!
//! Columns are vehicle-major. Within a vehicle block each step holds
//! `c_A d_A c_B d_B c_C d_C` followed (when locations are decision variables)
//! by `ind_A ind_B ind_C` and then `soc`; the per-window visit indicators
//! close the block.

use serde::{Deserialize, Serialize};

use crate::fleet::Location;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Charge(Location),
    Discharge(Location),
    Ind(Location),
    Visit(Location),
    Soc,
}

impl VarKind {
    pub fn is_integer(self) -> bool {
        matches!(self, VarKind::Ind(_) | VarKind::Visit(_))
    }
}

/// A model variable: `step` is a timestep, or a window index for visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarIndex {
    pub kind: VarKind,
    pub vehicle: usize,
    pub step: usize,
}

impl VarIndex {
    pub fn new(kind: VarKind, vehicle: usize, step: usize) -> Self {
        Self { kind, vehicle, step }
    }

    pub fn name(&self) -> String {
        let (n, t) = (self.vehicle, self.step);
        match self.kind {
            VarKind::Charge(l) => format!("c_{l}_n{n}_t{t}"),
            VarKind::Discharge(l) => format!("d_{l}_n{n}_t{t}"),
            VarKind::Ind(l) => format!("ind_{l}_n{n}_t{t}"),
            VarKind::Visit(l) => format!("visit_{l}_n{n}_d{t}"),
            VarKind::Soc => format!("soc_n{n}_t{t}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub vehicles: usize,
    pub steps: usize,
    pub windows: usize,
    /// False when locations are constants (stationary fleet).
    pub with_locations: bool,
}

impl ColumnMap {
    pub fn new(vehicles: usize, steps: usize, windows: usize, with_locations: bool) -> Self {
        Self { vehicles, steps, windows, with_locations }
    }

    fn per_step(&self) -> usize {
        if self.with_locations {
            10
        } else {
            7
        }
    }

    fn block(&self) -> usize {
        let visits = if self.with_locations { 3 * self.windows } else { 0 };
        self.steps * self.per_step() + visits
    }

    pub fn num_cols(&self) -> usize {
        self.vehicles * self.block()
    }

    pub fn col(&self, v: VarIndex) -> Option<usize> {
        if v.vehicle >= self.vehicles {
            return None;
        }
        let base = v.vehicle * self.block();
        let step_slot = |slot: usize| (v.step < self.steps).then(|| base + v.step * self.per_step() + slot);
        match v.kind {
            VarKind::Charge(l) => step_slot(2 * l.index()),
            VarKind::Discharge(l) => step_slot(2 * l.index() + 1),
            VarKind::Ind(l) if self.with_locations => step_slot(6 + l.index()),
            VarKind::Soc => step_slot(self.per_step() - 1),
            VarKind::Visit(l) if self.with_locations && v.step < self.windows => {
                Some(base + self.steps * self.per_step() + 3 * v.step + l.index())
            }
            _ => None,
        }
    }

    /// Column of a variable that the layout is known to contain.
    pub fn at(&self, kind: VarKind, vehicle: usize, step: usize) -> usize {
        self.col(VarIndex::new(kind, vehicle, step))
            .unwrap_or_else(|| panic!("{kind:?} n{vehicle} t{step} is not in the layout"))
    }

    pub fn var(&self, col: usize) -> Option<VarIndex> {
        if col >= self.num_cols() {
            return None;
        }
        let vehicle = col / self.block();
        let rem = col % self.block();
        let stepped = self.steps * self.per_step();
        if rem >= stepped {
            let k = rem - stepped;
            let loc = Location::from_index(k % 3)?;
            return Some(VarIndex::new(VarKind::Visit(loc), vehicle, k / 3));
        }
        let (step, slot) = (rem / self.per_step(), rem % self.per_step());
        let kind = match slot {
            s if s < 6 => {
                let loc = Location::from_index(s / 2)?;
                if s % 2 == 0 {
                    VarKind::Charge(loc)
                } else {
                    VarKind::Discharge(loc)
                }
            }
            s if s == self.per_step() - 1 => VarKind::Soc,
            s => VarKind::Ind(Location::from_index(s - 6)?),
        };
        Some(VarIndex::new(kind, vehicle, step))
    }
}
