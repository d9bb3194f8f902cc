use std::path::PathBuf;

use clap::{Args, ValueEnum};
use monogenic::quadrature::{make_ball_rule, BallRule, DEFAULT_RULE};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Ball rule sizes written as `NRxNTxNP`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleSizes {
    pub n_r: usize,
    pub n_t: usize,
    pub n_p: usize,
}

impl Default for RuleSizes {
    fn default() -> Self {
        let (n_r, n_t, n_p) = DEFAULT_RULE;
        RuleSizes { n_r, n_t, n_p }
    }
}

impl std::fmt::Display for RuleSizes {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.n_r, self.n_t, self.n_p)
    }
}

pub fn parse_rule(s: &str) -> Result<RuleSizes, String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(format!("expected NRxNTxNP, got {s:?}"));
    }
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok(RuleSizes {
        n_r: num(parts[0])?,
        n_t: num(parts[1])?,
        n_p: num(parts[2])?,
    })
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Highest polynomial degree.
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,
    /// Base seed; series use seeds `seed..seed + series`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lattice points per sphere when estimating maxima.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Number of random series in sweeps.
    #[arg(long, default_value_t = 20)]
    pub series: u64,
    /// Random points per basis element in finite-difference checks.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Comma-separated radii for the derivative sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
    pub radii: Vec<f64>,
    /// Quadrature sizes NRxNTxNP.
    #[arg(long, value_parser = parse_rule, default_value_t = RuleSizes::default())]
    pub rule: RuleSizes,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Everything that determines a run, embedded in each report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n_max: u32,
    pub rule: RuleSizes,
    pub seed: u64,
    pub samples: usize,
    pub series: u64,
    pub points: usize,
    pub radii: Vec<f64>,
    pub format: Format,
    pub out: Option<String>,
    pub condon_shortley: bool,
}

impl RunConfig {
    pub fn new(command: &str, args: &CommonArgs, condon_shortley: bool) -> Self {
        RunConfig {
            command: command.to_string(),
            n_max: args.n_max,
            rule: args.rule,
            seed: args.seed,
            samples: args.samples,
            series: args.series,
            points: args.points,
            radii: args.radii.clone(),
            format: args.format,
            out: args.out.as_ref().map(|p| p.display().to_string()),
            condon_shortley,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_max > 30 {
            return Err(format!("n_max {} is above the supported 30", self.n_max));
        }
        if self.samples == 0 || self.series == 0 || self.points == 0 {
            return Err("sample, series and point counts must be positive".into());
        }
        if let Some(r) = self.radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(format!("radius {r} outside [0, 1)"));
        }
        Ok(())
    }

    pub fn ball_rule(&self) -> Result<BallRule, String> {
        let RuleSizes { n_r, n_t, n_p } = self.rule;
        make_ball_rule(n_r, n_t, n_p).map_err(|e| e.to_string())
    }

    pub fn seeds(&self) -> std::ops::Range<u64> {
        self.seed..self.seed + self.series
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_syntax() {
        assert_eq!(parse_rule("24x24x48").unwrap(), RuleSizes::default());
        assert_eq!(
            parse_rule("2X3x4").unwrap(),
            RuleSizes {
                n_r: 2,
                n_t: 3,
                n_p: 4
            }
        );
        assert!(parse_rule("24x24").is_err());
        assert!(parse_rule("ax1x2").is_err());
        assert_eq!(RuleSizes::default().to_string(), "24x24x48");
    }
}
