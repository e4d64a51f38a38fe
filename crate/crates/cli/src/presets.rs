//! Built-in run files.

use crate::config::Command;

const PRESETS: &[(&str, Command, &str)] = &[
    (
        "table1-lmg",
        Command::Exponents,
        r#"
sizes = [500, 2000, 8000]
lambda_f = 0.7
[model]
kind = "lmg"
[detector]
kind = "density_peak"
"#,
    ),
    (
        "table1-bh",
        Command::Exponents,
        r#"
sizes = [500, 2000, 8000]
lambda_f = -7.0
[model]
kind = "bh"
[detector]
kind = "density_peak"
"#,
    ),
    (
        "table1-dicke",
        Command::Exponents,
        r#"
sizes = [16, 32, 64]
lambda_f = 0.75
[model]
kind = "dicke"
"#,
    ),
    (
        "table1-lmg-reduced",
        Command::Exponents,
        r#"
sizes = [250, 500, 1000, 2000, 4000]
lambda_f = 0.7
[model]
kind = "lmg"
[detector]
kind = "density_peak"
"#,
    ),
    (
        "table1-bh-reduced",
        Command::Exponents,
        r#"
sizes = [250, 500, 1000, 2000, 4000]
lambda_f = -7.0
[model]
kind = "bh"
[detector]
kind = "density_peak"
"#,
    ),
    (
        "table1-dicke-reduced",
        Command::Exponents,
        r#"
sizes = [8, 12, 16, 24]
lambda_f = 0.75
[model]
kind = "dicke"
"#,
    ),
    (
        "fig2-lmg-small",
        Command::Sweep,
        r#"
sizes = [200, 500]
lambda_f = 0.7
target_e_grid = [-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]
[model]
kind = "lmg"
"#,
    ),
    (
        "fig2-lmg",
        Command::Sweep,
        r#"
sizes = [500, 2000, 8000]
lambda_f = 0.7
target_e_grid = [-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]
[model]
kind = "lmg"
"#,
    ),
    (
        "fig2-bh",
        Command::Sweep,
        r#"
sizes = [500, 2000]
lambda_f = -7.0
target_e_grid = [-0.6, -0.5, -0.4, -0.3, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2]
[model]
kind = "bh"
"#,
    ),
    (
        "fig3-lmg",
        Command::Spectrum,
        r#"
sizes = [2000]
lambda_f = 0.7
[model]
kind = "lmg"
[detector]
kind = "density_peak"
"#,
    ),
    (
        "fig3-bh",
        Command::Spectrum,
        r#"
sizes = [2000]
lambda_f = -7.0
[model]
kind = "bh"
[detector]
kind = "density_peak"
"#,
    ),
    ("validate", Command::Validate, VALIDATE_DEFAULT),
];

/// Oracle run used by `validate` when no file is given. The model block is
/// required by the grammar; `validate` always covers all three models.
pub const VALIDATE_DEFAULT: &str = r#"
sizes = [1, 2, 3, 4, 5, 6]
[model]
kind = "lmg"
"#;

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.0 == name).map(|p| p.2)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

/// Command a preset was written for.
pub fn command_for(name: &str) -> Command {
    PRESETS.iter().find(|p| p.0 == name).map(|p| p.1).unwrap_or(Command::Validate)
}
