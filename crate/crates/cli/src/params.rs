//! Parameter plumbing: `--param key=value` overrides, the optional
//! config file pointed at by ULDPACK_CONFIG, and the per-suite parameter
//! presets.

use anyhow::{anyhow, bail, Context, Result};
use uldpack::{AlgoParams, CornerSupportMode, EpSortOrder, PackingParams};

/// Apply one `key=value` override to the parameter sets.
pub fn apply_param(packing: &mut PackingParams, algo: &mut AlgoParams, spec: &str) -> Result<()> {
    let (key, value) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("expected key=value, got `{spec}`"))?;
    let int = || value.parse::<i64>().context(format!("bad integer in `{spec}`"));
    let float = || value.parse::<f64>().context(format!("bad number in `{spec}`"));
    match key {
        "max_padding_height" | "padding" => packing.max_padding_height = int()?,
        "min_item_overlap" | "overlap" => packing.min_item_overlap = float()?,
        "max_cog_deviation" | "cog_max" => packing.max_cog_deviation = float()?,
        "weight_balance_importance" | "weight_importance" => {
            packing.weight_balance_importance = float()?
        }
        "corner_support_mode" | "corner_mode" => {
            packing.corner_support_mode = match value {
                "full" => CornerSupportMode::Full,
                "corners_only" | "corners" => CornerSupportMode::CornersOnly,
                other => bail!("unknown corner support mode `{other}`"),
            }
        }
        "max_ep_checks" => algo.max_ep_checks = int()? as u64,
        "min_rgs_iters" | "min_iters" => algo.min_rgs_iters = int()? as u32,
        "max_rgs_iters" | "max_iters" => algo.max_rgs_iters = int()? as u32,
        "randomization_degree" | "rho" => algo.randomization_degree = float()?,
        "hole_close_max_iters" | "hole_iters" => algo.hole_close_max_iters = int()? as u32,
        "ep_sort_order" | "ep_order" => {
            algo.ep_sort_order = match value {
                "zyx" => EpSortOrder::Zyx,
                "xyz" => EpSortOrder::Xyz,
                other => bail!("unknown extreme point order `{other}`"),
            }
        }
        other => bail!("unknown parameter `{other}`"),
    }
    Ok(())
}

/// Apply an ablation variant by name.
pub fn apply_variant(algo: &mut AlgoParams, name: &str) -> Result<()> {
    match name {
        "no-grid" => algo.variant.no_grid = true,
        "no-blocking" => algo.variant.no_blocking = true,
        "no-moving" => algo.variant.no_moving = true,
        "crainic-mimic" => algo.variant.crainic_mimic = true,
        other => bail!("unknown variant `{other}` (expected no-grid, no-blocking, no-moving, crainic-mimic)"),
    }
    Ok(())
}

/// Environment variable naming an optional JSON config file with
/// `packing` and/or `algo` objects overriding the built-in defaults.
pub const CONFIG_ENV: &str = "ULDPACK_CONFIG";

#[derive(serde::Deserialize, Default)]
struct ConfigFile {
    #[serde(default)]
    packing: Option<PackingParams>,
    #[serde(default)]
    algo: Option<AlgoParams>,
}

use serde::Deserialize as _;

pub fn load_env_config(packing: &mut PackingParams, algo: &mut AlgoParams) -> Result<()> {
    let Ok(path) = std::env::var(CONFIG_ENV) else {
        return Ok(());
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading {CONFIG_ENV} config {path}"))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let cfg = ConfigFile::deserialize(&mut de).with_context(|| format!("parsing {path}"))?;
    if let Some(p) = cfg.packing {
        *packing = p;
    }
    if let Some(a) = cfg.algo {
        *algo = a;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let mut p = PackingParams::default();
        let mut a = AlgoParams::default();
        apply_param(&mut p, &mut a, "overlap=1.0").unwrap();
        apply_param(&mut p, &mut a, "padding=0").unwrap();
        apply_param(&mut p, &mut a, "ep_order=xyz").unwrap();
        apply_param(&mut p, &mut a, "rho=0.7").unwrap();
        apply_param(&mut p, &mut a, "corner_mode=corners_only").unwrap();
        assert_eq!(p.min_item_overlap, 1.0);
        assert_eq!(p.max_padding_height, 0);
        assert_eq!(a.ep_sort_order, EpSortOrder::Xyz);
        assert_eq!(a.randomization_degree, 0.7);
        assert_eq!(p.corner_support_mode, CornerSupportMode::CornersOnly);
        assert!(apply_param(&mut p, &mut a, "bogus=1").is_err());
        assert!(apply_param(&mut p, &mut a, "noequals").is_err());
    }

    #[test]
    fn variants_parse() {
        let mut a = AlgoParams::default();
        apply_variant(&mut a, "no-grid").unwrap();
        apply_variant(&mut a, "crainic-mimic").unwrap();
        assert!(a.variant.no_grid && a.variant.crainic_mimic);
        assert!(apply_variant(&mut a, "nope").is_err());
    }
}
