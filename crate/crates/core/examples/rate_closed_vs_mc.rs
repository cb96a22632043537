//! Closed-form MRT rate against Monte-Carlo, and the high-SNR saturation.

use hmimo::channel::{default_user_distances, isotropic_channel};
use hmimo::geometry::SurfaceGeometry;
use hmimo::link::{closed_form_rate, closed_form_terms, mc_sinr, LinkConfig};

fn main() -> hmimo::Result<()> {
    let users = 3;
    let geom = SurfaceGeometry::with_count(2.0, 2.0, 80, 0.0)?;
    let channel = isotropic_channel(&geom, &geom, &default_user_distances(users))?;
    let n = geom.antenna_count();

    println!("L = 2, N = {n}, K = {users}, 1000 trials");
    println!("{:>6} {:>9} {:>9}", "SNR", "th", "mc");
    for snr in [-10.0, 0.0, 10.0, 20.0, 30.0] {
        let cfg = LinkConfig::from_snr_db(snr, 1.0, users, 1000)?;
        let th = closed_form_rate(channel.profile(), &cfg, n, n)?;
        let mc = mc_sinr(&channel, &cfg, 42)?;
        println!("{snr:>6} {:>9.4} {:>9.4}", th.sum_rate, mc.sum_rate);
    }

    // past the DoF only the noise term shrinks
    let cfg = LinkConfig::from_snr_db(30.0, 1.0, users, 1)?;
    println!("\n30 dB, closed form:");
    for n in [12, 25, 80, 400] {
        let t = closed_form_terms(channel.profile(), &cfg, n, n)?;
        let r = closed_form_rate(channel.profile(), &cfg, n, n)?;
        println!("N = {n:>3}: sum rate {:.4}, noise term {:.2e}, interference {:.4}", r.sum_rate, t.noise[0], t.interference);
    }
    Ok(())
}
