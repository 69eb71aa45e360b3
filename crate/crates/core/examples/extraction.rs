// Extracting the target from the ideal realization with the Fourier/flip
// isometry, for an odd number of outcomes.

use selftest::extraction::{extract, extracted_target, EXTRACT_TOL};
use selftest::ideal::ideal_realization;
use selftest::qlinalg::inner;
use selftest::SchmidtCoefficients;

pub fn run() -> selftest::Result<()> {
    let raw = [0.5, 0.3, 0.6, 0.4, 0.2];
    let n = raw.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
    let sc = SchmidtCoefficients::new(raw.iter().map(|x| x / n).collect())?;

    let r = ideal_realization(&sc);
    let ex = extract(&r, &sc, EXTRACT_TOL)?;
    let rep = &ex.report;
    println!("fidelity        {:.15}", rep.fidelity);
    println!("product overlap {:.15}", rep.product_overlap);
    println!("cond7           {:?}", rep.criterion.projection);
    println!("cond8           {:?}", rep.criterion.flip);
    println!("max residual    {:.1e}", rep.max_residual());

    let t = extracted_target(&ex)?;
    let ov = inner(t.amplitudes(), sc.target_state().amplitudes()).norm();
    println!("|<target|extracted>| = {ov:.15}");
    assert!(rep.pass);
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
