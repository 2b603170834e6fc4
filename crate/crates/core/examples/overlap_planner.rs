//! Scan planning: overlap rate between neighbouring pinhole positions and
//! the field of view a raster scan covers.
//!
//!     cargo run --example overlap_planner

use scatterptych::commands::cmd_overlap;
use scatterptych::scangeom::{fov_extent, overlap_rate, ProbeSpec, ScanPlan, RECOMMENDED_OVERLAP};

fn main() -> scatterptych::Result<()> {
    let radius = 1e-3;
    println!(
        "pinhole radius {:.1} mm, recommended overlap {:?}",
        radius * 1e3,
        RECOMMENDED_OVERLAP
    );
    println!("{:>10} {:>8} {:>8}", "step (um)", "rate", "verdict");
    for step_um in [0.0, 100.0, 200.0, 300.0, 400.0, 600.0, 1000.0, 1500.0] {
        let report = cmd_overlap(radius, step_um * 1e-6)?;
        println!(
            "{:>10.0} {:>8.3} {:>8}",
            step_um, report.rate, report.verdict
        );
    }

    // largest step that still keeps 75% overlap, by bisection on the monotone rate
    let (lo_rate, _) = RECOMMENDED_OVERLAP;
    let (mut a, mut b) = (0.0, 2.0 * radius);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if overlap_rate(radius, mid) >= lo_rate {
            a = mid;
        } else {
            b = mid;
        }
    }
    println!(
        "largest step at {:.0}% overlap: {:.1} um",
        lo_rate * 100.0,
        a * 1e6
    );

    let spec = ProbeSpec::new(radius, 0.0)?;
    for n in [1, 3, 5, 7] {
        let plan = ScanPlan::centered(n, n, 300e-6)?;
        let (w, h) = fov_extent(&plan, &spec);
        println!(
            "{n}x{n} scan at 300 um: field of view {:.2} x {:.2} mm",
            w * 1e3,
            h * 1e3
        );
    }
    Ok(())
}
