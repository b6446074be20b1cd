use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::horizontal::{HorizontalInstance, PartitionKind};
use crate::point::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionScheme {
    /// Uniform random site per point.
    Random,
    /// Site chosen by a seeded hash of the point id.
    ByKey,
    /// `s` contiguous x-ranges of near-equal size.
    Sorted,
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionScheme::Random => "random",
            PartitionScheme::ByKey => "by-key",
            PartitionScheme::Sorted => "sorted",
        })
    }
}

impl FromStr for PartitionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(PartitionScheme::Random),
            "by-key" | "bykey" | "key" => Ok(PartitionScheme::ByKey),
            "sorted" => Ok(PartitionScheme::Sorted),
            other => Err(Error::parameter(format!("unknown partition scheme {other:?}"))),
        }
    }
}

/// Keeps site assignment independent of generators seeded with the same value.
const PARTITION_STREAM: u64 = 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn partition(points: &[Point], scheme: PartitionScheme, s: usize, seed: u64) -> Result<HorizontalInstance> {
    if s == 0 {
        return Err(Error::parameter("s must be at least 1"));
    }
    let mut sites = vec![Vec::new(); s];
    let kind = match scheme {
        PartitionScheme::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(PARTITION_STREAM);
            for p in points {
                sites[rng.random_range(0..s)].push(*p);
            }
            PartitionKind::Random
        }
        PartitionScheme::ByKey => {
            for p in points {
                sites[(splitmix64(p.id ^ seed) % s as u64) as usize].push(*p);
            }
            PartitionKind::ByKey
        }
        PartitionScheme::Sorted => {
            let mut order = points.to_vec();
            order.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.id.cmp(&b.id)));
            let (base, extra) = (order.len() / s, order.len() % s);
            let mut rest = order.as_slice();
            for (i, site) in sites.iter_mut().enumerate() {
                let (head, tail) = rest.split_at(base + usize::from(i < extra));
                site.extend_from_slice(head);
                rest = tail;
            }
            PartitionKind::Sorted
        }
    };
    HorizontalInstance::new(sites, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: u64) -> Vec<Point> {
        (0..n).map(|i| Point::new(i, ((i * 37) % 101) as f64, ((i * 53) % 97) as f64)).collect()
    }

    #[test]
    fn single_site_holds_everything() {
        for scheme in [PartitionScheme::Random, PartitionScheme::ByKey, PartitionScheme::Sorted] {
            let inst = partition(&pts(50), scheme, 1, 3).unwrap();
            assert_eq!(inst.sites()[0].len(), 50);
        }
    }

    #[test]
    fn sorted_runs_are_balanced_and_ordered() {
        let inst = partition(&pts(50), PartitionScheme::Sorted, 7, 0).unwrap();
        let sizes: Vec<usize> = inst.sites().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![8, 7, 7, 7, 7, 7, 7]);
        inst.check_sorted().unwrap();
        assert_eq!(inst.kind(), PartitionKind::Sorted);
    }

    #[test]
    fn deterministic_by_seed() {
        for scheme in [PartitionScheme::Random, PartitionScheme::ByKey] {
            let a = partition(&pts(200), scheme, 5, 11).unwrap();
            let b = partition(&pts(200), scheme, 5, 11).unwrap();
            assert_eq!(a.sites(), b.sites());
            assert_eq!(a.n(), 200);
        }
        assert!(partition(&pts(3), PartitionScheme::Random, 0, 0).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("by-key".parse::<PartitionScheme>().unwrap(), PartitionScheme::ByKey);
        assert_eq!(PartitionScheme::ByKey.to_string(), "by-key");
    }
}
