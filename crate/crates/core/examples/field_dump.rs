//! Writes a field in the `FIELD2D` dump format and reads it back bit-exactly.
//!
//! Usage: `cargo run --example field_dump -- [path]`

use std::fs::File;
use std::io::{BufReader, BufWriter};

use gp_excited::field::{Field2D, Grid2D};

fn main() -> gp_excited::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("gp_field.f2d").display().to_string());
    let grid = Grid2D::centered([1.2, 0.0], 1.0, 63)?;
    let u = Field2D::from_fn(grid, |p| (-(p[0] - 1.2).powi(2) - 3.0 * p[1] * p[1]).exp());
    u.write_dump(BufWriter::new(File::create(&path)?))?;
    let back = Field2D::read_dump(BufReader::new(File::open(&path)?))?;
    println!("wrote {path}: {}x{} nodes, h = ({}, {})", back.grid.nx, back.grid.ny, back.grid.hx, back.grid.hy);
    println!("bit-exact round trip: {}", back == u);
    Ok(())
}
