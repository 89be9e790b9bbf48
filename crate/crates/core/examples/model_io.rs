//! Writes a homogeneous model as raw f32 grids with a header, then loads it.

use sgfd::model::ElasticModel;
use sgfd::workbench::{load_model, write_model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("sgfd_model_io");
    std::fs::create_dir_all(&dir)?;
    let model = ElasticModel::homogeneous(64, 48, 3000.0, 1700.0, 2200.0)?;
    let header = write_model(&dir, "block", &model, Some(5.0), None)?;
    print!("{}", std::fs::read_to_string(&header)?);
    let back = load_model(&header)?;
    println!("lambda {:.4e}  mu {:.4e}", back.model.lambda.get(0, 0), back.model.mu.get(0, 0));
    Ok(())
}
