//! Synthetic zonal price traces for tests, demos and the bundled fixture.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::prices::PricePanel;
use crate::fleet::Location;

/// A price spike added to one location for a contiguous run of steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub location: Location,
    pub start_step: usize,
    pub steps: usize,
    /// $/kWh added to the real-time price.
    pub amount: f64,
}

/// Shape of a synthetic price trace. All prices are in $/kWh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPrices {
    pub steps_per_day: usize,
    pub num_days: usize,
    pub base: f64,
    /// Half peak-to-trough swing of the daily cycle.
    pub daily_amplitude: f64,
    /// Per-location offsets added on top of the common trace.
    pub spread: [f64; 3],
    /// Per-location phase shift of the daily cycle, in steps.
    pub phase_steps: [i64; 3],
    /// Uniform noise half-width shared by all locations at a step.
    pub noise: f64,
    /// Uniform noise half-width drawn independently per location and step.
    pub zonal_noise: f64,
    pub spikes: Vec<Spike>,
    /// Probability per step and location of an extra random spike.
    pub random_spike_rate: f64,
    pub random_spike_amount: f64,
}

impl Default for SyntheticPrices {
    fn default() -> Self {
        Self {
            steps_per_day: 96,
            num_days: 14,
            base: 0.03,
            daily_amplitude: 0.015,
            spread: [0.0, 0.004, 0.008],
            phase_steps: [0, 2, 4],
            noise: 0.004,
            zonal_noise: 0.001,
            spikes: Vec::new(),
            random_spike_rate: 0.004,
            random_spike_amount: 0.15,
        }
    }
}

/// A day-ahead forecast and the real-time prices it is settled against.
#[derive(Clone, Debug, PartialEq)]
pub struct PricePair {
    pub day_ahead: PricePanel,
    pub real_time: PricePanel,
}

impl SyntheticPrices {
    /// Seed of the bundled two-week fixture.
    pub const FIXTURE_SEED: u64 = 2024;

    /// The fixture's daily pattern stretched onto `steps_per_day` x `num_days`.
    pub fn for_horizon(steps_per_day: usize, num_days: usize) -> Self {
        let at = |frac: f64| (frac * steps_per_day as f64).round() as usize;
        let len = (steps_per_day / 24).max(1);
        let spikes = (0..num_days)
            .flat_map(|d| {
                [
                    Spike { location: Location::C, start_step: d * steps_per_day + at(1.0 / 3.0), steps: len, amount: 0.10 },
                    Spike { location: Location::B, start_step: d * steps_per_day + at(0.75), steps: len, amount: 0.12 },
                ]
            })
            .collect();
        Self { steps_per_day, num_days, spikes, ..Self::default() }
    }

    /// Shape of the bundled fixture: two weeks of 15-minute prices with a
    /// morning spike at C and an evening spike at B every day.
    pub fn fixture() -> Self {
        Self::for_horizon(96, 14)
    }

    fn smooth(&self, loc: Location, step: usize) -> f64 {
        let spd = self.steps_per_day as f64;
        let shifted = step as f64 - self.phase_steps[loc.index()] as f64;
        // Trough before dawn, peak late afternoon.
        let angle = 2.0 * PI * (shifted / spd - 0.70);
        self.base + self.spread[loc.index()] + self.daily_amplitude * angle.cos()
    }

    /// Real-time panel: smooth cycle, noise, scheduled and random spikes.
    pub fn generate(&self, seed: u64) -> PricePanel {
        self.generate_pair(seed).real_time
    }

    /// Day-ahead panel is the smooth cycle with half the noise and no spikes;
    /// the real-time panel adds full noise and spikes on top.
    pub fn generate_pair(&self, seed: u64) -> PricePair {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = self.steps_per_day * self.num_days;
        let uniform = |rng: &mut ChaCha8Rng, w: f64| if w > 0.0 { rng.gen_range(-w..=w) } else { 0.0 };
        let common: Vec<f64> = (0..t).map(|_| uniform(&mut rng, self.noise)).collect();
        let mut da: [Vec<f64>; 3] = Default::default();
        let mut rt: [Vec<f64>; 3] = Default::default();
        for loc in Location::ALL {
            let (d, r) = (&mut da[loc.index()], &mut rt[loc.index()]);
            for step in 0..t {
                let smooth = self.smooth(loc, step);
                let noise = common[step] + uniform(&mut rng, self.zonal_noise);
                let mut real = smooth + noise;
                if self.random_spike_rate > 0.0 && rng.gen_bool(self.random_spike_rate.min(1.0)) {
                    real += self.random_spike_amount;
                }
                d.push(round6(smooth + 0.5 * noise));
                r.push(real);
            }
        }
        for spike in &self.spikes {
            let series = &mut rt[spike.location.index()];
            for step in spike.start_step..(spike.start_step + spike.steps).min(t) {
                series[step] += spike.amount;
            }
        }
        for v in rt.iter_mut().flatten() {
            *v = round6(*v);
        }
        PricePair {
            day_ahead: PricePanel::new(da).expect("equal lengths"),
            real_time: PricePanel::new(rt).expect("equal lengths"),
        }
    }
}

/// Round to 1e-6 $/kWh (1e-3 $/MWh) so CSV round trips are exact.
fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}
