//! Builds the layered model, writes it to disk, and reads it back.

use sgfd::workbench::modelio::{layered_miniature, LAYERED_LABEL};
use sgfd::workbench::{load_model, write_model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = layered_miniature(420, 260)?;
    let dir = std::env::temp_dir().join("sgfd_layered_example");
    std::fs::create_dir_all(&dir)?;
    let header = write_model(&dir, "layered", &model, Some(10.0), Some(LAYERED_LABEL))?;
    println!("wrote {}", header.display());
    print!("{}", std::fs::read_to_string(&header)?);

    let back = load_model(&header)?;
    println!("read back {:?} cells, h={:?}, max vp {:.0} m/s", back.model.shape(), back.h, back.model.max_vp());
    for iz in [10, 60, 120, 160, 240] {
        println!("  iz={iz:3}: vp at x-centre {:.0}", back.model.vp.get(231, iz));
    }
    Ok(())
}
