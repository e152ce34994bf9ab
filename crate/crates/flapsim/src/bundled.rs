//! Scenario files compiled into the binary.

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name)))),*]
    };
}

/// Shared blocks and runnable scenarios, by file name.
pub const FILES: &[(&str, &str)] = bundle!(
    "robot.toml",
    "water.toml",
    "hover.toml",
    "land.toml",
    "flight-line.toml",
    "ground-line.toml",
    "ground-steer.toml",
    "ground-rods.toml",
    "water-line.toml",
    "water-turn.toml",
    "water-symmetric.toml",
    "water-landing.toml",
);

/// Files that only hold shared blocks.
const INCLUDES: &[&str] = &["robot.toml", "water.toml"];

pub fn get(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Runnable scenario names without the `.toml` suffix.
pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    FILES
        .iter()
        .map(|(n, _)| *n)
        .filter(|n| !INCLUDES.contains(n))
        .map(|n| n.trim_end_matches(".toml"))
}
