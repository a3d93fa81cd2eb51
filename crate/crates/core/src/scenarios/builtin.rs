use crate::error::{Error, Result};

use super::ScenarioConfig;

const BUILTINS: &[(&str, &str)] = &[
    ("fig1", include_str!("../../builtin/fig1.json")),
    ("fig3", include_str!("../../builtin/fig3.json")),
    ("fig4", include_str!("../../builtin/fig4.json")),
    ("fig5", include_str!("../../builtin/fig5.json")),
    ("fig6", include_str!("../../builtin/fig6.json")),
    ("fig7", include_str!("../../builtin/fig7.json")),
    ("fig8", include_str!("../../builtin/fig8.json")),
    ("fig9", include_str!("../../builtin/fig9.json")),
];

/// Names of the shipped scenario files, in sweep order.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

/// Raw JSON of a shipped scenario file.
pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parsed configs of a shipped scenario file.
pub fn builtin_configs(name: &str) -> Result<Vec<ScenarioConfig>> {
    let text = builtin(name).ok_or_else(|| {
        let known: Vec<_> = builtin_names().collect();
        Error::Config(format!(
            "unknown builtin `{name}`; available: {}",
            known.join(", ")
        ))
    })?;
    ScenarioConfig::parse_many(text)
}
