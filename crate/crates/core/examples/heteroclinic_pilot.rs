//! Pilot run over the heteroclinic grid: prints per-cell spread, distance of
//! the cluster measures to the hull of the vertex Dirac measures, Milnor
//! visit frequency and the largest growth rate of the vertex well.
//!
//! cargo run --release -p optstate-core --example heteroclinic_pilot

use std::time::Instant;

use optstate_core::basins::{map_cells, milnor_fractions, simplex_vertices, AttractorSpec, Grid};
use optstate_core::dynamics::Point;
use optstate_core::measures::{trace_checkpoints, Measure, Signature, WeakStarMetric};
use optstate_core::potentials::growth_report;
use optstate_core::scenarios::build_scenario;
use optstate_core::schedule::default_schedule;

fn quantiles(mut v: Vec<f64>) -> String {
    v.sort_by(f64::total_cmp);
    let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
    format!(
        "min {:.4} q10 {:.4} q50 {:.4} q90 {:.4} max {:.4}",
        q(0.0),
        q(0.1),
        q(0.5),
        q(0.9),
        q(1.0)
    )
}

fn main() -> optstate_core::Result<()> {
    let horizon: usize = std::env::args()
        .nth(1)
        .map_or(100_000, |s| s.parse().expect("horizon"));
    let s = build_scenario("heteroclinic-bowen", &[])?;
    let f = &s.system;
    let metric = WeakStarMetric::default_for(f.space());
    let schedule = default_schedule(horizon);
    let b = Point::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    let grid = Grid::uniform(f.space(), 20)?.excluding_ball(&b, 0.05)?;
    let vertex_sigs: Vec<Signature> = simplex_vertices()
        .iter()
        .map(|e| {
            metric
                .signature(&Measure::dirac(f.space(), *e).unwrap())
                .unwrap()
        })
        .collect();
    let mut mixtures = Vec::new();
    for i in 0..=20 {
        for j in 0..=20 {
            for k in 0..=20 {
                if i + j + k > 0 {
                    let t = (i + j + k) as f64;
                    mixtures.push(Signature::combine(&[
                        (i as f64 / t, &vertex_sigs[0]),
                        (j as f64 / t, &vertex_sigs[1]),
                        (k as f64 / t, &vertex_sigs[2]),
                    ]));
                }
            }
        }
    }
    let boundary = AttractorSpec::simplex_boundary();
    let phi = s.potential("birkhoff:vertices")?;
    let start = Instant::now();
    let rows = map_cells(&grid, 1, |x| {
        let trace = trace_checkpoints(f, *x, &schedule, &metric).unwrap();
        let est = trace.estimate(&metric, 0.025).unwrap();
        let hull = est
            .representatives()
            .map(|r| {
                mixtures
                    .iter()
                    .map(|m| metric.signature_distance(r, m))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        let milnor = milnor_fractions(f, *x, &boundary, &[0.05], &schedule).unwrap()[0];
        let growth = growth_report(&phi, f, *x, horizon, &schedule).unwrap();
        (est.spread, hull, milnor, growth.largest_rate)
    })?;
    println!("cells = {}", rows.len());
    println!("spread: {}", quantiles(rows.iter().map(|r| r.0).collect()));
    println!(
        "hull distance: {}",
        quantiles(rows.iter().map(|r| r.1).collect())
    );
    println!(
        "milnor fraction: {}",
        quantiles(rows.iter().map(|r| r.2).collect())
    );
    println!(
        "largest rate: {}",
        quantiles(rows.iter().map(|r| r.3).collect())
    );
    let n = rows.len() as f64;
    println!(
        "frac spread >= 0.02: {:.4}",
        rows.iter().filter(|r| r.0 >= 0.02).count() as f64 / n
    );
    println!(
        "frac hull <= 0.1: {:.4}",
        rows.iter().filter(|r| r.1 <= 0.1).count() as f64 / n
    );
    println!(
        "frac milnor >= 0.95: {:.4}",
        rows.iter().filter(|r| r.2 >= 0.95).count() as f64 / n
    );
    println!(
        "frac largest <= -0.5: {:.4}",
        rows.iter().filter(|r| r.3 <= -0.5).count() as f64 / n
    );
    eprintln!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
