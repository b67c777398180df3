//! Tunes GraphIT (log-sum) on the dedicated tuning realization of a small
//! scenario and prints the per-tuple RMSE table.

use graphit::harness::{export::export_grid_csv, grid_search, HarnessError, HyperParams, Method, MethodSpec, Scenario};
use graphit::Family;

fn main() -> Result<(), HarnessError> {
    let mut sc = Scenario::new("tuning-demo", 6, 6);
    sc.steps = 500;
    let mut grid = Vec::new();
    for gamma in [10.0, 20.0, 40.0] {
        for lambda in [0.03, 0.1, 0.3] {
            grid.push(HyperParams { gamma, shape: Some(lambda) });
        }
    }
    sc.methods = vec![MethodSpec { method: Method::Graphit, family: Some(Family::LogSum), grid: grid.clone() }];

    let result = grid_search(&sc, Method::Graphit, &grid)?;
    print!("{}", export_grid_csv(&result.entries));
    println!("selected: {}", result.best.render(Some(Family::LogSum)));
    Ok(())
}
