use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    /// Independent uniform coordinates.
    Indi,
    /// Points spread around lines perpendicular to the main diagonal.
    Corr,
    /// Points spread around lines perpendicular to the anti-diagonal.
    Anti,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Indi => "indi",
            Distribution::Corr => "corr",
            Distribution::Anti => "anti",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "indi" => Ok(Distribution::Indi),
            "corr" => Ok(Distribution::Corr),
            "anti" => Ok(Distribution::Anti),
            other => Err(Error::parameter(format!("unknown distribution {other:?} (expected indi, corr or anti)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: Distribution,
    pub n: usize,
    pub lines: usize,
    pub per_line: usize,
    pub seed: u64,
}

impl GenSpec {
    /// Uses the largest divisor of `n` that is at most 100 as `per_line`.
    pub fn new(kind: Distribution, n: usize, seed: u64) -> Self {
        let per_line = (1..=n.min(100)).rev().find(|&d| n.is_multiple_of(d)).unwrap_or(1);
        GenSpec { kind, n, lines: n / per_line, per_line, seed }
    }

    pub fn with_lines(mut self, lines: usize, per_line: usize) -> Self {
        self.lines = lines;
        self.per_line = per_line;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::parameter("n must be at least 1"));
        }
        if self.kind != Distribution::Indi && self.lines * self.per_line != self.n {
            return Err(Error::parameter(format!(
                "lines * per_line = {} * {} does not equal n = {}",
                self.lines, self.per_line, self.n
            )));
        }
        Ok(())
    }
}

const INTERCEPT_MEAN: f64 = 0.5;
const INTERCEPT_SD: f64 = 0.15;
const OFFSET_SD: f64 = 0.05;

/// Points on `[0, 1]²` with ids `0..n`, no two at the same location.
pub fn gen_synthetic(spec: &GenSpec) -> Result<Vec<Point>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen = HashSet::with_capacity(spec.n);
    let mut points = Vec::with_capacity(spec.n);
    let mut push = |points: &mut Vec<Point>, x: f64, y: f64| {
        let fresh = seen.insert((x.to_bits(), y.to_bits()));
        if fresh {
            points.push(Point::new(points.len() as u64, x, y));
        }
        fresh
    };
    match spec.kind {
        Distribution::Indi => {
            while points.len() < spec.n {
                let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
                push(&mut points, x, y);
            }
        }
        Distribution::Corr | Distribution::Anti => {
            let intercept = Normal::new(INTERCEPT_MEAN, INTERCEPT_SD).expect("valid normal");
            let offset = Normal::new(0.0, OFFSET_SD).expect("valid normal");
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for _ in 0..spec.lines {
                let t = intercept.sample(&mut rng).clamp(0.0, 1.0);
                let mut placed = 0;
                while placed < spec.per_line {
                    let o = offset.sample(&mut rng);
                    let (x, y) = match spec.kind {
                        Distribution::Corr => (t + o * h, t - o * h),
                        _ => (t + o * h, 1.0 - t + o * h),
                    };
                    if push(&mut points, x.clamp(0.0, 1.0), y.clamp(0.0, 1.0)) {
                        placed += 1;
                    }
                }
            }
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{skyline, validate_distinct};

    #[test]
    fn spec_defaults() {
        let s = GenSpec::new(Distribution::Anti, 100_000, 1);
        assert_eq!((s.lines, s.per_line), (1000, 100));
        let s = GenSpec::new(Distribution::Corr, 97, 1);
        assert_eq!((s.lines, s.per_line), (1, 97));
        let s = GenSpec::new(Distribution::Corr, 101, 1);
        assert_eq!((s.lines, s.per_line), (101, 1));
        assert!(GenSpec::new(Distribution::Corr, 10, 1).with_lines(3, 3).validate().is_err());
        assert!(GenSpec::new(Distribution::Indi, 0, 1).validate().is_err());
    }

    #[test]
    fn deterministic_and_distinct() {
        for kind in [Distribution::Indi, Distribution::Corr, Distribution::Anti] {
            let spec = GenSpec::new(kind, 10, 7);
            let a = gen_synthetic(&spec).unwrap();
            assert_eq!(a, gen_synthetic(&spec).unwrap());
            assert_eq!(a.len(), 10);
            validate_distinct(&a).unwrap();
            assert!(a.iter().all(|p| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)));
        }
    }

    #[test]
    fn anti_skyline_exceeds_indi() {
        for seed in 1..4 {
            let k = |kind| skyline(&gen_synthetic(&GenSpec::new(kind, 20_000, seed)).unwrap()).unwrap().len();
            let (indi, anti) = (k(Distribution::Indi), k(Distribution::Anti));
            assert!(indi < anti, "indi {indi}, anti {anti}");
        }
    }

    #[test]
    fn corr_top_line_is_an_antichain() {
        // Every corr line runs at slope -1, so a line is its own skyline.
        let pts = gen_synthetic(&GenSpec::new(Distribution::Corr, 50, 9).with_lines(1, 50)).unwrap();
        let clamped = pts.iter().any(|p| p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0);
        if !clamped {
            assert_eq!(skyline(&pts).unwrap().len(), 50);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("ANTI".parse::<Distribution>().unwrap(), Distribution::Anti);
        assert!("uniform".parse::<Distribution>().is_err());
    }
}
