//! Draw channels from the isotropic profile and check what the model promises.

use hmimo::channel::{default_user_distances, isotropic_channel};
use hmimo::geometry::SurfaceGeometry;

fn main() -> hmimo::Result<()> {
    let users = 3;
    let bs = SurfaceGeometry::alias_free(3.0, 3.0, 0.0)?;
    let user = SurfaceGeometry::with_count(1.0, 1.0, 16, 0.0)?;
    let channel = isotropic_channel(&bs, &user, &default_user_distances(users))?;
    let p = channel.profile();
    println!(
        "BS {}x{} ({} DoF), users {}x{} ({} DoF)",
        bs.n_h(),
        bs.n_v(),
        p.n_s(),
        user.n_h(),
        user.n_v(),
        p.n_r()
    );
    println!("largest / smallest transmit variance: {:.3} / {:.3}",
        p.sigma2_s().iter().cloned().fold(0.0, f64::max),
        p.sigma2_s().iter().cloned().fold(1.0, f64::min));

    let r = channel.sample(7, 0);
    println!("H_a is {}x{}, H is {}x{}", r.h_a.nrows(), r.h_a.ncols(), r.h.nrows(), r.h.ncols());
    println!("‖H‖ = {:.6}, ‖H_a‖ = {:.6}", r.h.norm(), r.h_a.norm());

    let trials = 2000;
    let mean_energy: f64 = (0..trials).map(|t| channel.sample_angular(7, t).norm_squared()).sum::<f64>()
        / trials as f64;
    let expected = (bs.antenna_count() * user.antenna_count()) as f64 * p.total_power_gain();
    println!("E‖H‖² over {trials} draws: {mean_energy:.1} (model {expected:.1})");

    let mut csv = Vec::new();
    p.write_csv(&mut csv)?;
    let text = String::from_utf8(csv).unwrap();
    println!("\nprofile CSV, first rows:");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
