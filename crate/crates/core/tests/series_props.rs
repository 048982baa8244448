use chrono::NaiveDate;
use fxcast::series::{make_windows, split_by_count, Scaler, TimeSeries};
use proptest::prelude::*;

fn series(values: Vec<f64>) -> TimeSeries<f64> {
    let start = NaiveDate::from_ymd_opt(1989, 1, 6).unwrap();
    let dates = (0..values.len())
        .map(|i| start + chrono::Duration::weeks(i as i64))
        .collect();
    TimeSeries::new("prop", dates, values).unwrap()
}

proptest! {
    #[test]
    fn windows_are_shifted_subsequences(
        values in proptest::collection::vec(-1e3f64..1e3, 2..80),
        p in 1usize..12,
    ) {
        prop_assume!(p < values.len());
        let w = make_windows(&series(values.clone()), p).unwrap();
        prop_assert_eq!(w.len(), values.len() - p);
        for (i, (input, target)) in w.patterns().enumerate() {
            prop_assert_eq!(input, &values[i..i + p]);
            prop_assert_eq!(target, values[i + p]);
        }
    }

    #[test]
    fn split_concatenation_is_the_tail(
        values in proptest::collection::vec(-1e3f64..1e3, 2..80),
        train in 1usize..60,
        test in 1usize..30,
    ) {
        let s = series(values.clone());
        match split_by_count(&s, train, test) {
            Ok((a, b)) => {
                prop_assert_eq!(a.len(), train);
                prop_assert_eq!(b.len(), test);
                let joined: Vec<f64> = a.values().iter().chain(b.values()).copied().collect();
                prop_assert_eq!(&joined[..], &values[values.len() - train - test..]);
                prop_assert!(a.last_date() < b.first_date());
            }
            Err(_) => prop_assert!(train + test > values.len()),
        }
    }

    #[test]
    fn scaler_round_trip(lo in -1e4f64..1e4, width in 1e-3f64..1e4, seed in any::<u64>()) {
        let scaler = Scaler::fit(&series(vec![lo, lo + width])).unwrap();
        prop_assert_eq!(scaler.apply(lo), 0.0);
        prop_assert_eq!(scaler.apply(lo + width), 1.0);
        let mut state = seed;
        for _ in 0..1000 {
            // xorshift draws over [min - range, max + range]
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let x = lo - width + 3.0 * width * u;
            let back = scaler.invert(scaler.apply(x));
            let scale = x.abs().max(lo.abs()).max(width);
            prop_assert!((back - x).abs() <= 1e-12 * scale, "{} -> {}", x, back);
        }
    }
}
