// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Built-in experiment configurations, stored as TOML under `presets/`.

use crate::config::{ConfigError, RunConfig};

const PRESETS: &[(&str, &str)] = &[
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig5-delta0", include_str!("../presets/fig5-delta0.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5g", include_str!("../presets/fig5g.toml")),
    ("pointA", include_str!("../presets/pointA.toml")),
    ("pointB", include_str!("../presets/pointB.toml")),
    ("fig6ab", include_str!("../presets/fig6ab.toml")),
    ("fig6cd", include_str!("../presets/fig6cd.toml")),
    ("fig7a", include_str!("../presets/fig7a.toml")),
    ("fig7b", include_str!("../presets/fig7b.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("figA2", include_str!("../presets/figA2.toml")),
    ("figA3", include_str!("../presets/figA3.toml")),
    ("device", include_str!("../presets/device.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Raw TOML of a preset.
pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<RunConfig, ConfigError> {
    let text = source(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?;
    RunConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pblockade::model::Coupling;
    use std::f64::consts::PI;

    #[test]
    fn every_preset_parses() {
        for name in names() {
            let cfg = load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name.as_deref(), Some(name));
        }
        assert!(matches!(load("nope"), Err(ConfigError::UnknownPreset(_))));
    }

    #[test]
    fn resonant_preset_values() {
        let p = load("fig5").unwrap().params().unwrap();
        let g = 2.0 * PI * 1.1;
        assert!((p.g_eff() / g - 2f64.cosh().powi(2)).abs() < 1e-12);
        assert!((p.gamma_m_eff - 2.0 * g).abs() < 1e-12);
        assert!((p.eps_l_eff() - p.g_eff() / 20.0).abs() < 1e-12);
        assert!((p.delta_ed - 1000.0 * p.g_eff()).abs() < 1e-6);
        assert_eq!(p.n_th, 54.0);
    }

    #[test]
    fn quality_factor_presets() {
        let a = load("pointA").unwrap().params().unwrap();
        let g = 2.0 * PI * 1.1;
        assert!((a.gamma_m_eff - 54.0 * 2.0 * PI * 3.8e6 / 8e7).abs() < 1e-9);
        assert!((a.eps_l - 0.05 * g).abs() < 1e-12);
        let b = load("pointB").unwrap().params().unwrap();
        assert!((b.eps_l - 0.2 * g).abs() < 1e-12);
        let s = load("figA2").unwrap().params().unwrap();
        assert_eq!(s.coupling, Coupling::SinglePhonon);
        assert!((s.delta - s.g_eff()).abs() < 1e-9);
        assert!((s.delta_ed - s.delta_s).abs() < 1e-6);
    }

    #[test]
    fn sweep_shapes() {
        assert_eq!(load("fig5a").unwrap().sweep[0].count, 161);
        let ab = load("fig6ab").unwrap();
        assert_eq!(ab.sweep.iter().map(|a| a.count).collect::<Vec<_>>(), [41, 41]);
        assert_eq!(load("figA3").unwrap().g2tau.unwrap().r_p, [1.0, 2.0, 3.0]);
        assert!(load("device").unwrap().sweep[0].is_device());
    }
}
