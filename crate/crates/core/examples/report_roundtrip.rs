//! Writes a spectrum report to JSON, reads it back and confirms that every
//! number survives exactly.

use h2ion::{assemble_and_solve, RunConfig, SpectrumReport};

fn main() -> h2ion::Result<()> {
    let config = RunConfig { n_samples: 400_000, ..RunConfig::default() };
    let report = assemble_and_solve(&config)?;
    let path = std::env::temp_dir().join("h2ion_report_example.json");
    report.write(&path)?;
    let back = SpectrumReport::read(&path)?;
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());
    println!("identical after round trip: {}", back == report);
    let again = assemble_and_solve(&config)?;
    println!("rerun with the same seed identical: {}", again.without_timing() == report.without_timing());
    print!("{}", back.table());
    std::fs::remove_file(&path)?;
    Ok(())
}
