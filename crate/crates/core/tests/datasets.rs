//! Real-dataset schemas: ingestion of the checked-in fixtures and every
//! protocol on the resulting point sets.

use std::path::PathBuf;

use skydist_core::baselines::{run_agids, run_fds, FdsParams};
use skydist_core::datagen::{ingest_csv, partition, CsvSpec, Ingested, PartitionScheme};
use skydist_core::horizontal::{run_naive, run_optimal, run_sorted, run_tradeoff, TradeoffParams};
use skydist_core::vertical::{run_prune, run_vertical_naive, PruneParams, VerticalInstance};
use skydist_core::{skyline_bruteforce, Error, Point, PointId};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn covertype() -> Ingested {
    ingest_csv(fixture("covertype.csv"), &CsvSpec::new("Elevation", "Slope")).unwrap()
}

fn airline(dedupe: bool) -> Result<Ingested, Error> {
    let mut spec = CsvSpec::new("FARE", "FARE_PER_MILE");
    spec.negate_x = true;
    spec.negate_y = true;
    spec.dedupe = dedupe;
    ingest_csv(fixture("airline.csv"), &spec)
}

fn household() -> Ingested {
    ingest_csv(fixture("household.csv"), &CsvSpec::new("Voltage", "Global_intensity")).unwrap()
}

fn truth(points: &[Point]) -> Vec<PointId> {
    skyline_bruteforce(points).unwrap().ids()
}

#[test]
fn covertype_parses_with_nonempty_skyline() {
    let data = covertype();
    assert_eq!(data.points.len(), 20);
    assert_eq!((data.skipped, data.duplicates), (0, 0));
    assert!(!truth(&data.points).is_empty());
}

#[test]
fn airline_needs_dedupe() {
    assert!(matches!(airline(false), Err(Error::DuplicatePoint { .. })));
    let data = airline(true).unwrap();
    assert_eq!(data.skipped, 1);
    assert_eq!(data.duplicates, 1);
    assert_eq!(data.points.len(), 23);
    assert!(data.points.iter().all(|p| p.x < 0.0 && p.y < 0.0));
}

#[test]
fn airline_skyline_prefers_cheap_fares() {
    let data = airline(true).unwrap();
    let cheapest = data.points.iter().max_by(|a, b| a.x.total_cmp(&b.x)).unwrap();
    let lowest_rate = data.points.iter().max_by(|a, b| a.y.total_cmp(&b.y)).unwrap();
    let ids = truth(&data.points);
    assert!(ids.contains(&cheapest.id));
    assert!(ids.contains(&lowest_rate.id));
}

#[test]
fn household_skips_missing_readings() {
    let data = household();
    assert_eq!(data.skipped, 2);
    assert_eq!(data.points.len(), 28);
}

#[test]
fn negation_matches_negated_oracle() {
    let plain = covertype();
    let mut spec = CsvSpec::new("Elevation", "Slope");
    spec.negate_x = true;
    let negated = ingest_csv(fixture("covertype.csv"), &spec).unwrap();
    let flipped: Vec<Point> = plain.points.iter().map(|p| Point::new(p.id, -p.x, p.y)).collect();
    assert_eq!(negated.points, flipped);
    assert_eq!(truth(&negated.points), truth(&flipped));
}

#[test]
fn every_protocol_matches_the_oracle_on_fixtures() {
    let sets = [covertype().points, airline(true).unwrap().points, household().points];
    for points in &sets {
        let expected = truth(points);
        for scheme in [PartitionScheme::Random, PartitionScheme::ByKey, PartitionScheme::Sorted] {
            for s in [1, 3, 7] {
                let inst = partition(points, scheme, s, 11).unwrap();
                let mut outcomes = vec![
                    run_naive(&inst).unwrap(),
                    run_optimal(&inst).unwrap(),
                    run_agids(&inst, 20).unwrap(),
                    run_fds(&inst, FdsParams::default()).unwrap(),
                ];
                for r in [3, 5] {
                    outcomes.push(run_tradeoff(&inst, TradeoffParams::new(r)).unwrap());
                }
                if scheme == PartitionScheme::Sorted {
                    outcomes.push(run_sorted(&inst).unwrap());
                }
                for out in outcomes {
                    assert_eq!(out.skyline.ids(), expected, "{scheme:?} s={s}");
                }
            }
        }
        let vertical = VerticalInstance::from_points(points).unwrap();
        assert_eq!(run_vertical_naive(&vertical).unwrap().skyline.ids(), expected);
        for rho in [1, 4, 500] {
            let out = run_prune(&vertical, PruneParams::new(rho, 8)).unwrap();
            assert_eq!(out.skyline.ids(), expected);
            assert!(out.report.rounds <= 8);
        }
    }
}
