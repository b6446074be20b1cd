use std::collections::HashSet;

use crate::coordsim::{XHalf, YHalf};
use crate::error::Result;
use crate::horizontal::{HorizontalInstance, PartitionKind};
use crate::point::{Point, PointId};
use crate::vertical::VerticalInstance;

/// Perturbation unit that keeps set-disjointness points distinct.
pub const DISJ_DELTA: f64 = 1.0 / (1u64 << 40) as f64;

/// `0 → 01`, `1 → 10`.
pub fn expand_bits(bits: &[bool]) -> Vec<bool> {
    bits.iter().flat_map(|&b| [b, !b]).collect()
}

/// Corner points of the staircase encoding `bits` on the `m × m` grid,
/// `m = bits.len()`, with ids `first_id..`.
///
/// The walk starts at `(0, m)`; each expanded 0 moves right, each expanded
/// 1 moves down. A corner is a position entered by a right move (or the
/// start) and left by a down move (or the end).
pub fn gen_staircase(bits: &[bool], first_id: PointId) -> Vec<Point> {
    let steps = expand_bits(bits);
    let m = bits.len() as f64;
    let (mut x, mut y) = (0.0, m);
    let mut out = Vec::new();
    let mut came_right = true;
    for i in 0..=steps.len() {
        let leaves_down = steps.get(i).is_none_or(|&s| s);
        if came_right && leaves_down {
            out.push(Point::new(first_id + out.len() as u64, x, y));
        }
        if let Some(&down) = steps.get(i) {
            if down {
                y -= 1.0;
            } else {
                x += 1.0;
            }
            came_right = !down;
        }
    }
    out
}

/// One staircase per site; a location already present at an earlier site is
/// dropped.
pub fn gen_staircase_family(vectors: &[Vec<bool>]) -> Result<HorizontalInstance> {
    let mut seen = HashSet::new();
    let mut next_id = 0;
    let sites = vectors
        .iter()
        .map(|bits| {
            let site: Vec<Point> = gen_staircase(bits, 0)
                .into_iter()
                .filter(|p| seen.insert((p.x.to_bits(), p.y.to_bits())))
                .map(|p| {
                    next_id += 1;
                    Point::new(next_id - 1, p.x, p.y)
                })
                .collect();
            site
        })
        .collect();
    HorizontalInstance::new(sites, PartitionKind::Random)
}

/// Site 1 holds the staircase of `u`; site 2 holds the grid's upper-right
/// corner `(m, m)` if `v`, else the lower-left corner `(0, 0)`.
pub fn gen_one_round_hard(u: &[bool], v: bool) -> Result<HorizontalInstance> {
    let site1 = gen_staircase(u, 0);
    let m = u.len() as f64;
    let corner = if v { (m, m) } else { (0.0, 0.0) };
    let site2 = vec![Point::new(site1.len() as PointId, corner.0, corner.1)];
    HorizontalInstance::new(vec![site1, site2], PartitionKind::Random)
}

/// Two-party set-disjointness instance on ids `1..=n`: Alice's x is 2 for
/// ids in `a`, else 1; Bob's y is 2 for ids in `b`, else 1.
///
/// Coincident points are separated by `id · DISJ_DELTA`, with a direction
/// per location class chosen so that the skyline has exactly one point iff
/// `a` and `b` intersect (given both are non-empty): `(2, 2)` and `(2, 1)`
/// points move up, `(1, 2)` points move right, and `(1, 1)` points move
/// towards the origin.
pub fn gen_vertical_disj(a: &[bool], b: &[bool]) -> Result<VerticalInstance> {
    let n = a.len().max(b.len());
    let mut alice = Vec::with_capacity(n);
    let mut bob = Vec::with_capacity(n);
    for i in 0..n {
        let id = (i + 1) as PointId;
        let in_a = a.get(i).copied().unwrap_or(false);
        let in_b = b.get(i).copied().unwrap_or(false);
        let shift = id as f64 * DISJ_DELTA;
        let (dx, dy) = match (in_a, in_b) {
            (true, _) => (0.0, shift),
            (false, true) => (shift, 0.0),
            (false, false) => (-shift, -shift),
        };
        alice.push(XHalf { x: if in_a { 2.0 } else { 1.0 } + dx, id });
        bob.push(YHalf { id, y: if in_b { 2.0 } else { 1.0 } + dy });
    }
    VerticalInstance::new(alice, bob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{dominates, skyline, skyline_bruteforce};

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn xy(points: &[Point]) -> Vec<(f64, f64)> {
        points.iter().map(|p| (p.x, p.y)).collect()
    }

    #[test]
    fn expansion() {
        let e: String = expand_bits(&bits("10101")).iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(e, "1001100110");
    }

    #[test]
    fn staircase_corners() {
        assert_eq!(xy(&gen_staircase(&bits("10101"), 0)), vec![(0.0, 5.0), (2.0, 4.0), (4.0, 2.0), (5.0, 0.0)]);
        assert_eq!(xy(&gen_staircase(&bits("00"), 0)), vec![(1.0, 2.0), (2.0, 1.0)]);
        assert_eq!(xy(&gen_staircase(&bits("11"), 0)), vec![(0.0, 2.0), (1.0, 1.0), (2.0, 0.0)]);
    }

    #[test]
    fn staircase_is_its_own_skyline() {
        for v in 0u32..256 {
            let b: Vec<bool> = (0..8).map(|i| v >> i & 1 == 1).collect();
            let pts = gen_staircase(&b, 0);
            assert_eq!(skyline(&pts).unwrap().len(), pts.len());
            assert!(pts.iter().all(|p| pts.iter().all(|q| !dominates(p, q))));
        }
    }

    #[test]
    fn family_skyline_reveals_common_ones() {
        // Two sites: a column where both vectors have a 1 bends the union's
        // skyline away from the all-disjoint curve.
        let disjoint = gen_staircase_family(&[bits("1010"), bits("0101")]).unwrap();
        let meeting = gen_staircase_family(&[bits("1010"), bits("1001")]).unwrap();
        let k = |inst: &HorizontalInstance| skyline_bruteforce(&inst.union()).unwrap();
        assert_ne!(xy(k(&disjoint).points()), xy(k(&meeting).points()));
    }

    #[test]
    fn one_round_hard() {
        let u = bits("0110100111");
        let yes = gen_one_round_hard(&u, true).unwrap();
        assert_eq!(skyline(&yes.union()).unwrap().len(), 1);
        let no = gen_one_round_hard(&u, false).unwrap();
        assert_eq!(skyline(&no.union()).unwrap().ids(), no.sites()[0].iter().map(|p| p.id).collect::<Vec<_>>());
    }

    #[test]
    fn disj_examples() {
        let inst = gen_vertical_disj(&bits("010"), &bits("010")).unwrap();
        let sky = skyline(&inst.points()).unwrap();
        assert_eq!(sky.ids(), vec![2]);

        let inst = gen_vertical_disj(&bits("100"), &bits("010")).unwrap();
        let sky = skyline(&inst.points()).unwrap();
        assert_eq!(sky.len(), 2);
        let rounded: Vec<(f64, f64)> = sky.points().iter().map(|p| (p.x.round(), p.y.round())).collect();
        assert_eq!(rounded, vec![(1.0, 2.0), (2.0, 1.0)]);
    }
}
