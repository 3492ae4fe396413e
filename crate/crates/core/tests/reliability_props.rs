use gridplan::grid::{DayType, PlanningHorizon};
use gridplan::reliability::{eue, lole, lolp, Demand, SheddingRecord};
use proptest::prelude::*;

fn horizon(years: usize) -> PlanningHorizon {
    PlanningHorizon {
        num_epochs: 2,
        years_per_epoch: years,
        weekdays_per_quarter: 65,
        weekend_days_per_quarter: 26,
        intervals_per_day: 4,
        interval_hours: 6.0,
        maintenance_ratio: 0.0,
        start_year: 2021,
        load_growth: vec![],
    }
}

const BUSES: [&str; 3] = ["a", "b", "c"];

/// Demand profiles for both epochs, and shedding no larger than demand.
fn case() -> impl Strategy<Value = (Demand, Vec<SheddingRecord>)> {
    (
        prop::collection::vec(1.0f64..200.0, 2 * 4 * 2 * 3 * 4),
        prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], 2 * 4 * 2 * 3 * 4),
    )
        .prop_map(|(d, frac)| {
            let mut demand = Demand::new();
            let mut recs = Vec::new();
            let mut i = 0;
            for p in 1..=2 {
                for q in 1..=4 {
                    for day in DayType::ALL {
                        for bus in BUSES {
                            let v: Vec<f64> = d[i..i + 4].to_vec();
                            for t in 0..4 {
                                recs.push(SheddingRecord {
                                    epoch: p,
                                    quarter: q,
                                    day,
                                    bus: bus.into(),
                                    interval: t,
                                    shed_mw: v[t] * frac[i + t],
                                });
                            }
                            demand.insert((bus.to_string(), p, q, day), v);
                            i += 4;
                        }
                    }
                }
            }
            (demand, recs)
        })
}

fn scaled(recs: &[SheddingRecord], a: f64) -> Vec<SheddingRecord> {
    recs.iter().map(|r| SheddingRecord { shed_mw: r.shed_mw * a, ..r.clone() }).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn scaling_behaviour((demand, recs) in case(), alpha in 0.01f64..1.0, years in 1usize..6) {
        let h = horizon(years);
        for p in 1..=2 {
            let s = scaled(&recs, alpha);
            prop_assert!(close(eue(&s, &h, p), alpha * eue(&recs, &h, p)));
            prop_assert!(close(lolp(&s, &demand, &h, p).unwrap(), alpha * lolp(&recs, &demand, &h, p).unwrap()));
            prop_assert_eq!(lole(&s, &h, p, 3), lole(&recs, &h, p, 3));
            let z = scaled(&recs, 0.0);
            prop_assert_eq!(eue(&z, &h, p), 0.0);
            prop_assert_eq!(lole(&z, &h, p, 3), 0.0);
        }
    }

    #[test]
    fn additivity((demand, recs) in case(), split in 0usize..200) {
        let _ = demand;
        let h = horizon(5);
        let k = split.min(recs.len());
        let (a, b) = recs.split_at(k);
        for p in 1..=2 {
            prop_assert!(close(eue(a, &h, p) + eue(b, &h, p), eue(&recs, &h, p)));
        }
    }

    #[test]
    fn zero_equivalence_and_range((demand, recs) in case()) {
        let h = horizon(5);
        for p in 1..=2 {
            let e = eue(&recs, &h, p);
            let l = lolp(&recs, &demand, &h, p).unwrap();
            let d = lole(&recs, &h, p, 3);
            prop_assert!((0.0..=1.0).contains(&l));
            prop_assert!(e >= 0.0 && d >= 0.0);
            // All zero or all positive, given shedding either clears the
            // outage threshold or is exactly zero.
            let any = recs.iter().any(|r| r.epoch == p && r.shed_mw > 1e-6);
            let none = recs.iter().filter(|r| r.epoch == p).all(|r| r.shed_mw == 0.0);
            if any {
                prop_assert!(e > 0.0 && l > 0.0 && d > 0.0);
            }
            if none {
                prop_assert!(e == 0.0 && l == 0.0 && d == 0.0);
            }
        }
    }
}
