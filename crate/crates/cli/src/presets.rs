//! Named scenarios shipped with the binary.

pub const PRESETS: &[(&str, &str)] = &[
    ("fig4", include_str!("../presets/fig4.conf")),
    ("fig5", include_str!("../presets/fig5.conf")),
    ("fig6_7", include_str!("../presets/fig6_7.conf")),
    ("fig9", include_str!("../presets/fig9.conf")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
