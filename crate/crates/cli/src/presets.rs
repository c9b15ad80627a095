//! Built-in presets, embedded so the binary works from any directory. The
//! same files ship under `presets/` for reference and editing.

pub const PRESETS: &[(&str, &str)] = &[
    ("ilchenko", include_str!("../presets/ilchenko.json")),
    (
        "improved-device",
        include_str!("../presets/improved-device.json"),
    ),
    ("bae-demo", include_str!("../presets/bae-demo.json")),
    ("pa-demo", include_str!("../presets/pa-demo.json")),
    (
        "parasitic-demo",
        include_str!("../presets/parasitic-demo.json"),
    ),
    (
        "parasitic-floor-sweep",
        include_str!("../presets/parasitic-floor-sweep.json"),
    ),
    (
        "compare-cooling",
        include_str!("../presets/compare-cooling.json"),
    ),
    (
        "compare-parasitic",
        include_str!("../presets/compare-parasitic.json"),
    ),
    ("compare-pa", include_str!("../presets/compare-pa.json")),
];

/// Alternative names accepted by `--preset`.
pub const ALIASES: &[(&str, &str)] = &[("feasibility-baseline", "ilchenko")];

pub fn lookup(name: &str) -> Option<&'static str> {
    let canonical = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map(|(_, target)| *target)
        .unwrap_or(name);
    PRESETS
        .iter()
        .find(|(n, _)| *n == canonical)
        .map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
