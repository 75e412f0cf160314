//! Monte Carlo replication over parameter grids.
//!
//! A [`SweepSpec`] is a base model configuration plus named axes. Every
//! combination of axis values is a grid point; each grid point runs
//! `replications` independent replications on streams derived from
//! `(master_seed, point, replication)`, so results do not depend on thread
//! count or completion order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::config::ModelConfig;
use crate::reinforcement::{simulate_model1, summarize};
use crate::seed::replication_rng;
use crate::tribes::simulate_model2;

/// One named parameter axis. Values are applied like `--set key=value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

/// How the per-period shock count is chosen at each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShockMode {
    /// Use the configured `shocks` for every `n`.
    FixedShocks,
    /// `shocks = round(n / ratio)`, holding the size-to-interactions ratio fixed.
    FixedRatio,
}

impl std::str::FromStr for ShockMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-shocks" => Ok(ShockMode::FixedShocks),
            "fixed-ratio" => Ok(ShockMode::FixedRatio),
            other => Err(Error::validation(
                "mode",
                format!("expected `fixed-shocks` or `fixed-ratio`, got `{other}`"),
            )),
        }
    }
}

impl ShockMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ShockMode::FixedShocks => "fixed-shocks",
            ShockMode::FixedRatio => "fixed-ratio",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ModelConfig,
    pub axes: Vec<Axis>,
    /// Size-to-interactions ratio used by grid points in `fixed-ratio` mode.
    pub ratio: Option<f64>,
}

/// `round(n / ratio)` shocks per period.
pub fn fixed_ratio_shocks(n: usize, ratio: f64) -> Result<usize> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::validation("ratio", "ratio > 0"));
    }
    let shocks = (n as f64 / ratio).round();
    if shocks < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "ratio {ratio} leaves no shocks for n = {n}"
        )));
    }
    Ok(shocks as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub index: usize,
    pub assignments: Vec<(String, String)>,
    pub config: ModelConfig,
}

impl GridPoint {
    /// `key=value` pairs joined by `;`, or `base` for an axis-free sweep.
    pub fn label(&self) -> String {
        if self.assignments.is_empty() {
            return "base".to_string();
        }
        self.assignments
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl SweepSpec {
    pub fn single(base: ModelConfig) -> Self {
        SweepSpec { base, axes: Vec::new(), ratio: None }
    }

    pub fn replications(&self) -> usize {
        self.base.replications()
    }

    pub fn master_seed(&self) -> u64 {
        self.base.master_seed()
    }

    /// Expand the cartesian product of the axes; the first axis varies slowest.
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::validation(format!("sweep.axes.{}", axis.key), "axis has no values"));
            }
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push((axis.key.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .enumerate()
            .map(|(index, assignments)| {
                let config = self.point_config(&assignments)?;
                Ok(GridPoint { index, assignments, config })
            })
            .collect()
    }

    fn point_config(&self, assignments: &[(String, String)]) -> Result<ModelConfig> {
        let mut config = self.base.clone();
        let mut mode = ShockMode::FixedShocks;
        for (key, value) in assignments {
            if key == "mode" {
                mode = value.parse()?;
            } else {
                config.set(key, value)?;
            }
        }
        if mode == ShockMode::FixedRatio {
            let ratio = self
                .ratio
                .ok_or_else(|| Error::validation("sweep.ratio", "fixed-ratio mode needs a ratio"))?;
            let shocks = fixed_ratio_shocks(config.n(), ratio)?;
            config.set("shocks", &shocks.to_string())?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Raw metric values of one replication, `None` where a metric is undefined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub point: usize,
    pub replication: usize,
    pub values: Vec<Option<f64>>,
}

/// Mean and sample standard deviation of one metric at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub point: usize,
    pub label: String,
    pub metric: String,
    pub replications: usize,
    /// Replications where the metric was defined and therefore aggregated.
    pub defined: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Replications excluded because the metric was undefined.
    pub undefined: usize,
    /// Only one defined sample; `std` is reported as 0.
    pub single_sample: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub count: usize,
    pub undefined: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

/// Mean and `n - 1` standard deviation over the defined values.
pub fn aggregate(values: &[Option<f64>]) -> Aggregate {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    let count = defined.len();
    let undefined = values.len() - count;
    if count == 0 {
        return Aggregate { count, undefined, mean: None, std: None };
    }
    let mean = defined.iter().sum::<f64>() / count as f64;
    let std = if count == 1 {
        0.0
    } else {
        (defined.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    };
    Aggregate { count, undefined, mean: Some(mean), std: Some(std) }
}

pub const MODEL1_METRICS: [&str; 3] = ["average_fit", "max_to_median", "max_to_min"];
pub const MODEL2_METRICS: [&str; 4] = [
    "final_group_count",
    "mean_deaths_per_period",
    "final_component_count",
    "collisions",
];

pub fn metric_names(config: &ModelConfig) -> &'static [&'static str] {
    match config {
        ModelConfig::Model1(_) => &MODEL1_METRICS,
        ModelConfig::Model2(_) => &MODEL2_METRICS,
    }
}

/// Run replication `replication` of grid point `point`, returning the
/// values of [`metric_names`] in order.
pub fn run_replication(config: &ModelConfig, point: usize, replication: usize) -> Result<Vec<Option<f64>>> {
    let mut rng = replication_rng(config.master_seed(), point as u64, replication as u64);
    match config {
        ModelConfig::Model1(c) => {
            let run = simulate_model1(c, &mut rng)?;
            let s = summarize(run.final_fitness());
            Ok(vec![Some(s.mean), s.max_to_median, s.max_to_min])
        }
        ModelConfig::Model2(c) => {
            let t = simulate_model2(c, &mut rng)?;
            Ok(vec![
                Some(t.final_group_count(c.group_gap) as f64),
                t.mean_deaths_per_period(),
                Some(t.final_component_count() as f64),
                Some(t.periods.iter().map(|p| p.collisions).sum::<usize>() as f64),
            ])
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub metrics: Vec<String>,
    pub points: Vec<GridPoint>,
    pub records: Vec<ReplicationRecord>,
    pub rows: Vec<AggregateRow>,
}

impl SweepResult {
    pub fn rows_for(&self, metric: &str) -> impl Iterator<Item = &AggregateRow> {
        let metric = metric.to_string();
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    /// Raw values of `metric` at grid point `point`, in replication order.
    pub fn values(&self, point: usize, metric: &str) -> Vec<Option<f64>> {
        let col = self.metrics.iter().position(|m| m == metric).expect("unknown metric");
        self.records
            .iter()
            .filter(|r| r.point == point)
            .map(|r| r.values[col])
            .collect()
    }
}

/// Build aggregate rows from persisted records.
pub fn aggregate_records(points: &[GridPoint], metrics: &[String], records: &[ReplicationRecord]) -> Vec<AggregateRow> {
    let mut rows = Vec::with_capacity(points.len() * metrics.len());
    for point in points {
        let mine: Vec<&ReplicationRecord> = records.iter().filter(|r| r.point == point.index).collect();
        for (col, metric) in metrics.iter().enumerate() {
            let values: Vec<Option<f64>> = mine.iter().map(|r| r.values[col]).collect();
            let agg = aggregate(&values);
            rows.push(AggregateRow {
                point: point.index,
                label: point.label(),
                metric: metric.clone(),
                replications: values.len(),
                defined: agg.count,
                mean: agg.mean,
                std: agg.std,
                undefined: agg.undefined,
                single_sample: agg.count == 1,
            });
        }
    }
    rows
}

/// Run every replication of every grid point. `jobs = Some(k)` uses a
/// dedicated pool of `k` threads, `None` the global rayon pool.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepResult> {
    let points = spec.grid()?;
    let replications = spec.replications();
    let metrics: Vec<String> = metric_names(&spec.base).iter().map(|s| s.to_string()).collect();

    let tasks: Vec<(usize, usize)> = points
        .iter()
        .flat_map(|p| (0..replications).map(move |r| (p.index, r)))
        .collect();
    let run = || -> Result<Vec<ReplicationRecord>> {
        tasks
            .par_iter()
            .map(|&(point, replication)| {
                let values = run_replication(&points[point].config, point, replication)?;
                Ok(ReplicationRecord { point, replication, values })
            })
            .collect()
    };
    let records = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let rows = aggregate_records(&points, &metrics, &records);
    Ok(SweepResult { metrics, points, records, rows })
}
