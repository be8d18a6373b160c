//! Price panels, scenario sets and travel-time tables.

pub mod prices;
pub mod synthetic;
pub mod travel;

pub use prices::{
    load_prices, load_prices_file, mean_panel, time_only_panel, write_prices, PricePanel, PriceSeries, ScenarioSet,
};
pub use travel::{load_travel_times, load_travel_times_file, minutes_to_steps, TravelTimeTable};
pub use synthetic::{PricePair, Spike, SyntheticPrices};
