//! Built-in experiment presets.
//!
//! Several parameters of the experiments these presets mirror were never reported
//! (shocks and periods for the reinforcement tables, the fixed
//! size-to-interactions ratio, run length for the tribe experiments, and the
//! network growth parameters everywhere). The values chosen here are listed
//! in [`Preset::chosen`] and printed by the CLI with every run.

use crate::generator::BBParams;
use crate::io::config::ModelConfig;
use crate::reinforcement::{Model1Config, RewardScheme};
use crate::sweep::{Axis, SweepSpec};
use crate::tribes::{Kernel, Model2Config};

pub const PRESET_SEED: u64 = 1;

pub const NAMES: [&str; 8] = [
    "table1",
    "table2",
    "fig3-alpha09",
    "fig3-alpha099",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
];

/// Shocks per period at n = 100 for the reinforcement tables. With
/// 20 periods and reward 0.05 the deterministic mean fitness at n = 100 is
/// 1 + 2·0.05·46·20/100 = 1.92.
pub const TABLE_SHOCKS: usize = 46;
pub const TABLE_PERIODS: usize = 20;
/// n / shocks for the fixed-ratio columns; keeps `shocks·periods/n = 9.2`.
pub const TABLE_RATIO: f64 = 100.0 / 46.0;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub sweep: SweepSpec,
    /// True when the preset is meant as a single run rather than a sweep.
    pub single_run: bool,
    /// Parameters picked for this artifact, with their values.
    pub chosen: Vec<(&'static str, String)>,
}

impl Preset {
    pub fn model(&self) -> &ModelConfig {
        &self.sweep.base
    }
}

fn table(name: &'static str, summary: &'static str, p: f64) -> Preset {
    let base = Model1Config {
        n: 100,
        shocks: TABLE_SHOCKS,
        periods: TABLE_PERIODS,
        scheme: RewardScheme { p, reward: 0.05 },
        initial_fitness: 1.0,
        bb: BBParams::default(),
        replications: 1000,
        master_seed: PRESET_SEED,
    };
    Preset {
        name,
        summary,
        sweep: SweepSpec {
            base: ModelConfig::Model1(base),
            axes: vec![
                Axis { key: "mode".into(), values: vec!["fixed-shocks".into(), "fixed-ratio".into()] },
                Axis { key: "n".into(), values: ["50", "100", "200", "400"].map(String::from).to_vec() },
            ],
            ratio: Some(TABLE_RATIO),
        },
        single_run: false,
        chosen: vec![
            ("shocks (fixed-shocks mode)", TABLE_SHOCKS.to_string()),
            ("periods", TABLE_PERIODS.to_string()),
            ("ratio n/shocks (fixed-ratio mode)", format!("{TABLE_RATIO:.6}")),
            ("m0", "3".into()),
            ("m", "2".into()),
            ("arrival order", "shuffled every period".into()),
        ],
    }
}

fn fig3(name: &'static str, summary: &'static str, alpha: f64) -> Preset {
    let base = Model2Config {
        n: 80,
        shocks: 10,
        periods: 200,
        alpha,
        replications: 50,
        master_seed: PRESET_SEED,
        ..Model2Config::default()
    };
    Preset {
        name,
        summary,
        sweep: SweepSpec {
            base: ModelConfig::Model2(base),
            axes: vec![Axis {
                key: "epsilon".into(),
                values: ["0.1", "0.2", "0.3", "0.5", "0.75", "1", "1.5", "2"].map(String::from).to_vec(),
            }],
            ratio: None,
        },
        single_run: false,
        chosen: vec![
            ("periods", "200".into()),
            ("epsilon grid", "0.1 0.2 0.3 0.5 0.75 1 1.5 2".into()),
            ("m0", "3".into()),
            ("m", "2".into()),
            ("group_gap", "0.001".into()),
        ],
    }
}

fn fig4(name: &'static str, summary: &'static str, epsilon: f64, kernel: Kernel) -> Preset {
    let base = Model2Config {
        n: 40,
        shocks: 20,
        periods: 300,
        alpha: 0.99,
        epsilon,
        kernel,
        out_weight: 0.01,
        replications: 1,
        master_seed: PRESET_SEED,
        ..Model2Config::default()
    };
    Preset {
        name,
        summary,
        sweep: SweepSpec::single(ModelConfig::Model2(base)),
        single_run: true,
        chosen: vec![
            ("periods", "300".into()),
            ("m0", "3".into()),
            ("m", "2".into()),
            ("group_gap", "0.001".into()),
        ],
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    Some(match name {
        "table1" => table("table1", "reinforcement, rewards always positive (p = 1, r = 0.05)", 1.0),
        "table2" => table("table2", "reinforcement, rewards of random sign (p = 0.5, r = 0.05)", 0.5),
        "fig3-alpha09" => fig3("fig3-alpha09", "tribes, group counts and deaths vs epsilon, alpha = 0.9", 0.9),
        "fig3-alpha099" => fig3("fig3-alpha099", "tribes, group counts and deaths vs epsilon, alpha = 0.99", 0.99),
        "fig4a" => fig4("fig4a", "tribes snapshot, epsilon = 0.5, reciprocal similarity", 0.5, Kernel::Reciprocal),
        "fig4b" => fig4("fig4b", "tribes snapshot, epsilon = 1.5, reciprocal similarity", 1.5, Kernel::Reciprocal),
        "fig4c" => fig4("fig4c", "tribes snapshot, epsilon = 0.5, in-group similarity (a = 0.01)", 0.5, Kernel::Ingroup),
        "fig4d" => fig4("fig4d", "tribes snapshot, epsilon = 1.5, in-group similarity (a = 0.01)", 1.5, Kernel::Ingroup),
        _ => return None,
    })
}

pub fn all() -> Vec<Preset> {
    NAMES.iter().filter_map(|n| preset(n)).collect()
}
