// quick probe: N=1,2 table with 300 samples
use ququart_mub::bounds::{monte_carlo_table, Table3Config};
fn main() {
    let cfg = Table3Config { n_values: vec![1, 2], samples: 300, seed: 7, clamp: 1e-10 };
    let report = monte_carlo_table(&cfg).unwrap();
    for c in &report.cells {
        println!(
            "{:16} {:6} mean_sqrt={:.4} (±{:.4}) sqrt_mean={:.4} ref={:.2} delta={:+.4} spread={:.2e} {}",
            c.scheme, c.ensemble, c.mean_sqrt, c.std_err, c.sqrt_mean, c.reference, c.delta,
            c.clamp_spread, c.flag.as_deref().unwrap_or("")
        );
    }
}
