//! Synthesize a 5x5 scan of a continuous-tone object through a dynamic
//! scattering layer and write it as a checksummed stack file.
//!
//!     cargo run --example simulate_and_save -- [out_dir]

use num_complex::Complex64;
use scatterptych::diffsim::{simulate_dataset, MediumModel};
use scatterptych::formats::{read_stack, write_stack};
use scatterptych::scangeom::{overlap_rate, ProbeSpec, ScanPlan};
use scatterptych::{phantom, ComplexField};

fn main() -> scatterptych::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/example-stack".into());
    let (n, pitch, wavelength, distance) = (256, 6.5e-6, 532e-9, 3.4e-3);

    let template = ComplexField::filled(n, n, pitch, wavelength, Complex64::new(0.0, 0.0))?;
    let object = phantom::natural_texture(&template, 7, 0.5)?;
    let spec = ProbeSpec::with_default_edge(40.0 * pitch, pitch)?;
    let plan = ScanPlan::centered(5, 5, 12.0 * pitch)?;
    let medium = MediumModel::dynamic(0.2, 1.0, 4, 42)?;

    let stack = simulate_dataset(&object, &plan, &spec, distance, &medium)?;
    let files = write_stack(&stack, out.as_ref(), "texture")?;
    println!(
        "{} patterns of {}x{}, overlap {:.3}",
        stack.len(),
        stack.width(),
        stack.height(),
        overlap_rate(spec.radius, plan.step)
    );
    println!("manifest {}", files.manifest.display());
    println!(
        "payload  {} (sha256 {})",
        files.payload.display(),
        files.checksum
    );

    let back = read_stack(&files.manifest)?;
    println!(
        "read back bit-exact: {}",
        back.patterns() == stack.patterns()
    );
    Ok(())
}
