//! Built-in scenario documents.

use crate::config::ConfigDoc;
use crate::error::{Error, Result};
use crate::scenario::{build, Files, Scenario};

const PRESETS: &[(&str, &str)] = &[
    ("shk", include_str!("../presets/shk.toml")),
    ("total_mass_ineq", include_str!("../presets/total_mass_ineq.toml")),
    ("total_mass_ineq_1", include_str!("../presets/total_mass_ineq_1.toml")),
    ("total_mass_2d", include_str!("../presets/total_mass_2d.toml")),
    ("barrier_static", include_str!("../presets/barrier_static.toml")),
    ("barrier_moving", include_str!("../presets/barrier_moving.toml")),
    ("convex_curve_sym", include_str!("../presets/convex_curve_sym.toml")),
    ("convex_curve_nonsym", include_str!("../presets/convex_curve_nonsym.toml")),
    ("river", include_str!("../presets/river.toml")),
    ("budget", include_str!("../presets/budget.toml")),
    ("population", include_str!("../presets/population.toml")),
    ("hellinger", include_str!("../presets/hellinger.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// The TOML source of a preset.
pub fn source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            let known: Vec<_> = names().collect();
            Error::config("<preset>", format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })
}

pub fn doc(name: &str) -> Result<ConfigDoc> {
    ConfigDoc::parse(source(name)?)
}

pub fn scenario(name: &str) -> Result<Scenario> {
    build(doc(name)?, &Files::default())
}
