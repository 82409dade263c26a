// Driving the command-line layer from code: a small catalog analyzed and
// rendered as text.

use igusa_lab::cli::{render, run, Cli, Format};

pub fn run_example() -> igusa_lab::Result<()> {
    let dir = std::env::temp_dir().join(format!("igusa-lab-catalog-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| igusa_lab::Error::InvalidInput(e.to_string()))?;
    let path = dir.join("catalog.txt");
    let text = "# name | n | polynomial\nx2 | 1 | x1^2\ncusp | 2 | x1^2 + x2^3\n";
    std::fs::write(&path, text).map_err(|e| igusa_lab::Error::InvalidInput(e.to_string()))?;

    let args = ["igusa-lab", "analyze", "--catalog", path.to_str().unwrap(), "--primes", "5..13"];
    let cli = <Cli as clap::Parser>::try_parse_from(args).map_err(|e| igusa_lab::Error::InvalidInput(e.to_string()))?;
    let outcome = run(&cli);
    for line in render(&outcome.report, Format::Text).lines().filter(|l| l.contains("sigma") || l.contains("kappa")) {
        println!("{line}");
    }
    println!("exit code {}", outcome.exit_code);
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
