use crate::config::{parse_config, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "kl_nonpd",
        summary: "KL, plain metric, log kernel 3/2, V = 0",
        text: include_str!("../presets/kl_nonpd.cfg"),
    },
    Preset {
        name: "kl_pd",
        summary: "KL, shifted metric, tridiagonal kernel alpha = 1000, V = sin(4 pi x), periodic",
        text: include_str!("../presets/kl_pd.cfg"),
    },
    Preset {
        name: "rkl_nonpd",
        summary: "reverse KL, plain metric, log kernel 2/3, mu ~ x^4",
        text: include_str!("../presets/rkl_nonpd.cfg"),
    },
    Preset {
        name: "rkl_pd",
        summary: "reverse KL, shifted metric, tridiagonal kernel alpha = 100, uniform mu, periodic",
        text: include_str!("../presets/rkl_pd.cfg"),
    },
    Preset {
        name: "h_nonpd",
        summary: "Hellinger, plain metric, log kernel 1/3, mu ~ x^4",
        text: include_str!("../presets/h_nonpd.cfg"),
    },
    Preset {
        name: "h_pd",
        summary: "Hellinger, shifted metric, tridiagonal kernel alpha = 100, uniform mu, periodic",
        text: include_str!("../presets/h_pd.cfg"),
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn preset_config(name: &str) -> Result<ExperimentConfig, CliError> {
    let p = preset(name).ok_or_else(|| CliError::UnknownPreset(name.to_string()))?;
    Ok(parse_config(p.text)?)
}

/// One line per preset: name, then summary.
pub fn list_presets() -> String {
    PRESETS.iter().map(|p| format!("{:<10} {}\n", p.name, p.summary)).collect()
}
