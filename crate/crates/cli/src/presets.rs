//! The figure presets as shipped TOML files.

use crate::config::{parse_config, ConfigError, RunConfig};

pub const PRESET_FILES: [(&str, &str); 5] = [
    ("fig1", include_str!("../presets/fig1.toml")),
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESET_FILES.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, text)| *text)
}

pub fn load_preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = preset_text(name).ok_or_else(|| ConfigError::General {
        origin: "--preset".into(),
        message: format!("unknown preset {name:?}; available: fig1 .. fig5"),
    })?;
    let mut runs = parse_config(text, &format!("preset {name}"))?;
    Ok(runs.remove(0))
}
