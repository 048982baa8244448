use fxcast::experiment::{
    input_averages, load_partial_report, load_report, one_step_forecasts, render_hidden_effect,
    render_table, run_grid, save_report, synthesize_series, GridConfig, GridReport,
    HiddenEffectSample, SynthKind, TableView,
};
use fxcast::metrics::HorizonSpec;
use fxcast::mlp::{init_weights, Architecture, TrainConfig};
use fxcast::series::{split_by_count, Scaler, TimeSeries};
use fxcast::Error;

fn split(n: usize, train: usize, test: usize) -> (TimeSeries<f64>, TimeSeries<f64>) {
    let s = synthesize_series(
        &SynthKind::NoisyAr1 {
            phi: 0.8,
            sigma: 0.1,
            y0: 1.0,
        },
        n,
        3,
    )
    .unwrap();
    split_by_count(&s, train, test).unwrap()
}

fn grid(inputs: Vec<usize>, hidden: Vec<usize>, horizons: &str) -> GridConfig<f64> {
    GridConfig {
        input_levels: inputs,
        hidden_levels: hidden,
        train: TrainConfig {
            learning_rate: 0.2,
            max_epochs: 40,
            restarts: 2,
            master_seed: 77,
            ..Default::default()
        },
        horizons: horizons.parse().unwrap(),
        scale: true,
    }
}

fn small_report() -> GridReport<f64> {
    let (train, test) = split(90, 80, 10);
    run_grid(&train, &test, &grid(vec![1, 2, 3], vec![2, 4], "a:3,b:10")).unwrap()
}

#[test]
fn averages_match_cells() {
    let report = small_report();
    for avg in &report.per_input_averages {
        let group: Vec<_> = report
            .successful()
            .filter(|c| c.inputs == avg.inputs)
            .collect();
        let n = group.len() as f64;
        let rmse = group.iter().map(|c| c.in_sample.rmse).sum::<f64>() / n;
        let got = avg.in_sample.unwrap();
        assert!((got.rmse - rmse).abs() <= 1e-12);
        for (k, h) in avg.out_sample.iter().enumerate() {
            let mae = group
                .iter()
                .map(|c| c.out_sample[k].metrics.mae)
                .sum::<f64>()
                / n;
            assert!((h.metrics.mae - mae).abs() <= 1e-12);
        }
    }
    assert_eq!(
        input_averages(&report.meta.config, &report.cells),
        report.per_input_averages
    );
}

#[test]
fn single_cell_average_equals_the_cell() {
    let (train, test) = split(60, 50, 10);
    let report = run_grid(&train, &test, &grid(vec![1], vec![6], "all:10")).unwrap();
    assert_eq!(report.cells.len(), 1);
    let cell = report.successful().next().unwrap();
    let avg = &report.per_input_averages[0];
    assert_eq!(avg.in_sample.unwrap(), cell.in_sample);
    assert_eq!(avg.out_sample, cell.out_sample);
    let table = render_table(&report, TableView::InSample);
    assert_eq!(table.lines().count(), 1 + 1 + 1);
}

#[test]
fn report_round_trip() {
    let report = small_report();
    let mut buf = Vec::new();
    save_report(&report, &mut buf).unwrap();
    let back: GridReport<f64> = load_report(buf.as_slice()).unwrap();
    assert_eq!(back, report.clone().without_timings());
    let mut again = Vec::new();
    save_report(&back, &mut again).unwrap();
    assert_eq!(buf, again);
}

#[test]
fn truncated_and_foreign_payloads() {
    let report = small_report();
    let mut buf = Vec::new();
    save_report(&report, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();

    let cut = &text[..text.len() - 25];
    assert!(matches!(
        load_report::<f64, _>(cut.as_bytes()),
        Err(Error::Corrupt(_))
    ));
    let partial: GridReport<f64> = load_partial_report(cut.as_bytes()).unwrap();
    assert_eq!(partial.cells.len(), report.cells.len() - 1);

    let whole_lines: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
    assert!(matches!(
        load_report::<f64, _>(whole_lines.as_bytes()),
        Err(Error::Corrupt(_))
    ));

    let bumped = text.replacen("\"version\":1", "\"version\":2", 1);
    assert!(matches!(
        load_report::<f64, _>(bumped.as_bytes()),
        Err(Error::VersionMismatch { found: 2, .. })
    ));
    assert!(matches!(
        load_report::<f64, _>(&b""[..]),
        Err(Error::Corrupt(_))
    ));
    assert!(matches!(
        load_report::<f64, _>(&b"{\"a\":1}\n"[..]),
        Err(Error::Corrupt(_))
    ));

    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(1, 2);
    let shuffled = lines.join("\n");
    assert!(matches!(
        load_report::<f64, _>(shuffled.as_bytes()),
        Err(Error::Corrupt(_))
    ));
}

#[test]
fn table_shapes() {
    let report = small_report();
    let in_sample = render_table(&report, TableView::InSample);
    let lines: Vec<&str> = in_sample.lines().collect();
    assert_eq!(lines.len(), 1 + 6 + 3);
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(header, ["Input", "Hidden", "RMSE", "MAE", "MAPE"]);
    assert_eq!(lines.iter().filter(|l| l.starts_with("Avgr")).count(), 3);
    for line in &lines[1..] {
        for field in line.split_whitespace().skip_while(|f| !f.contains('.')) {
            assert_eq!(field.split('.').nth(1).unwrap().len(), 8, "{line}");
        }
    }

    let out = render_table(&report, TableView::OutSampleByInput);
    assert!(out.lines().last().unwrap().starts_with("RW "));
    assert_eq!(out.lines().filter(|l| l.starts_with("RW ")).count(), 2);
    assert!(out.lines().next().unwrap().contains("RMSE1"));

    let hidden = render_table(&report, TableView::HiddenEffect);
    assert_eq!(
        hidden
            .lines()
            .filter(|l| l.starts_with("noisy_ar1"))
            .count(),
        12
    );

    assert!(matches!(
        "sideways".parse::<TableView>(),
        Err(Error::UnknownView(_))
    ));
}

#[test]
fn hidden_effect_pairs_samples_with_chosen_inputs() {
    let large = small_report();
    let (train, test) = split(40, 30, 10);
    let small = run_grid(&train, &test, &grid(vec![1, 2, 3], vec![2, 4], "a:3,b:10")).unwrap();
    let text = render_hidden_effect(&[
        HiddenEffectSample {
            label: "Large",
            report: &large,
            inputs: Some(3),
        },
        HiddenEffectSample {
            label: "Small",
            report: &small,
            inputs: Some(1),
        },
    ]);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| l.starts_with("Large") || l.starts_with("Small"))
        .map(|l| l.split_whitespace().take(3).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0], ["Large", "3", "2"]);
    assert_eq!(rows[3], ["Small", "1", "4"]);
}

#[test]
fn test_forecasts_never_see_the_future() {
    // Changing test observation t must leave forecasts 0..=t unchanged.
    let (train, test) = split(70, 60, 10);
    let scaler = Scaler::fit(&train).unwrap();
    let net = init_weights(Architecture::new(4, 5).unwrap(), 1, 0.5);
    let base = one_step_forecasts(&net, Some(&scaler), train.values(), test.values()).unwrap();
    for t in 0..test.len() {
        let mut altered = test.values().to_vec();
        for v in &mut altered[t..] {
            *v += 1000.0;
        }
        let f = one_step_forecasts(&net, Some(&scaler), train.values(), &altered).unwrap();
        assert_eq!(f[..=t], base[..=t], "forecast leaked future data at {t}");
        if t + 1 < test.len() {
            assert_ne!(f[t + 1], base[t + 1]);
        }
    }
}

#[test]
fn first_forecasts_use_training_tail() {
    let (train, test) = split(70, 60, 10);
    let net = init_weights(Architecture::new(3, 2).unwrap(), 4, 0.5);
    let f = one_step_forecasts(&net, None, train.values(), test.values()).unwrap();
    let tail = &train.values()[57..];
    assert_eq!(f[0], net.forward(tail).unwrap());
    let second = [tail[1], tail[2], test.values()[0]];
    assert_eq!(f[1], net.forward(&second).unwrap());
}

#[test]
fn horizon_longer_than_test_is_an_error() {
    let (train, test) = split(60, 50, 10);
    let mut g = grid(vec![1], vec![2], "a:3");
    g.horizons = HorizonSpec::default();
    assert!(matches!(
        run_grid(&train, &test, &g),
        Err(Error::HorizonTooLong { .. })
    ));
}
