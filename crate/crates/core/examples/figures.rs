//! Writes the figure data sets: `cargo run --release --example figures -- fig4 out/`.

use std::path::PathBuf;

use sgfd::kernel::RunOptions;
use sgfd::workbench::cmd_figures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "fig1".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("sgfd_figures"));
    let options = RunOptions {
        threads: 0,
        ..Default::default()
    };
    let manifest = cmd_figures(&id, &out, &options)?;
    manifest.write(&out)?;
    print!("{}", manifest.to_text());
    Ok(())
}
