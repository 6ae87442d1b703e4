//! Frozen reference values from an independent high-precision evaluation.

use approx::assert_relative_eq;
use thzmec::beamforming::{fejer_kernel, BeamVector};
use thzmec::channel::{
    bs_channel_vector, named_window, noise_power, path_loss, sidelink_gain, steering_vector, watts_to_dbm,
    AntennaGains, MMWAVE_28GHZ,
};
use thzmec::emin::{
    baseline_no_offload, baseline_oma, local_compute_energy, max_offload_bits, prop1_allocate, ComputeProfile,
    TaskDemand,
};
use thzmec::linkmodel::PairLink;

fn f3() -> thzmec::channel::ThzWindow {
    named_window("f3").unwrap()
}

#[test]
fn path_loss_reference_values() {
    assert_relative_eq!(path_loss(&f3(), 1.0).unwrap(), 2.71538794522e10, max_relative = 1e-10);
    assert_relative_eq!(path_loss(&f3(), 2.0).unwrap(), 1.43712429695e11, max_relative = 1e-10);
    assert_relative_eq!(path_loss(&MMWAVE_28GHZ, 1.0).unwrap(), 1.37560352897e6, max_relative = 1e-10);
}

#[test]
fn noise_reference_values() {
    assert_relative_eq!(watts_to_dbm(noise_power(137e9, 10.0).unwrap()), -52.6327943284, max_relative = 1e-11);
    assert_relative_eq!(noise_power(137e9, 10.0).unwrap(), 5.45406823658e-9, max_relative = 1e-10);
    assert_relative_eq!(watts_to_dbm(noise_power(2e9, 10.0).unwrap()), -70.9897000434, max_relative = 1e-11);
    assert_relative_eq!(watts_to_dbm(noise_power(1.0, 0.0).unwrap()), -174.0, max_relative = 1e-12);
}

#[test]
fn channel_gain_reference_values() {
    let two = AntennaGains::new(2.0, 2.0, 398.1).unwrap();
    assert_relative_eq!(sidelink_gain(&f3(), &two, 2.0).unwrap().powi(2), 2.78333614460e-11, max_relative = 1e-10);
    assert_relative_eq!(
        sidelink_gain(&MMWAVE_28GHZ, &two, 2.0).unwrap().powi(2),
        7.26953645393e-7,
        max_relative = 1e-10
    );
    let h = bs_channel_vector(&f3(), &AntennaGains::default(), 1.0, 0.7, 4).unwrap();
    assert_relative_eq!(h.norm_sqr(), 1.17011381172e-7, max_relative = 1e-10);
}

#[test]
fn fejer_reference_values() {
    assert!(fejer_kernel(4, std::f64::consts::FRAC_PI_2) < 1e-15);
    assert_relative_eq!(fejer_kernel(4, std::f64::consts::FRAC_PI_4), 0.653281482438, max_relative = 1e-11);
}

fn default_link(d_side: f64, angle: f64) -> (PairLink, BeamVector) {
    let win = f3();
    let gains = AntennaGains::default();
    let h = bs_channel_vector(&win, &gains, 1.0, angle, 4).unwrap();
    let link = PairLink::new(
        h,
        sidelink_gain(&win, &gains, d_side).unwrap(),
        0.3,
        win.bandwidth,
        noise_power(win.bandwidth, 10.0).unwrap(),
    )
    .unwrap();
    (link, BeamVector::from(steering_vector(angle, 4).unwrap()))
}

fn gbit_demand() -> TaskDemand {
    TaskDemand {
        bits_edge: 1e9,
        bits_center: 1e9,
        block: 0.25,
        pair_count: 2,
    }
}

#[test]
fn closed_form_allocation_reference_values() {
    let (link, beam) = default_link(2.0, 0.3);
    let a = prop1_allocate(&link, &gbit_demand(), &beam).unwrap();
    assert_relative_eq!(a.t_center, 4.20231125908e-3, max_relative = 1e-10);
    assert_relative_eq!(a.t_edge, 0.120797688741, max_relative = 1e-10);
    assert_relative_eq!(a.p_edge, 8.42146925625, max_relative = 1e-9);
    // aligned steering beam: c = ||h||^2 and 2^x - 1 = beta_center / beta_edge
    assert_relative_eq!(a.p_center, 0.362533373283, max_relative = 1e-9);
}

#[test]
fn oma_reference_ratio() {
    let (link, beam) = default_link(2.0, 0.3);
    let noma = prop1_allocate(&link, &gbit_demand(), &beam).unwrap();
    let (oma, _) = baseline_oma(&link, &gbit_demand(), &beam).unwrap();
    assert_eq!(oma.t_phase2, oma.t_phase3);
    assert_eq!(oma.p_edge, noma.p_edge);
    // 0.5 (2^{4 log2(10/3)} - 1) / (7/3 / 0.3)
    let expected = 0.5 * ((10.0f64 / 3.0).powi(4) - 1.0) * 0.3 / (7.0 / 3.0);
    assert_relative_eq!(oma.p_center / noma.p_center, expected, max_relative = 1e-9);
    assert_relative_eq!(expected, 7.87222222222, max_relative = 1e-10);
}

#[test]
fn local_computing_reference_values() {
    let p = ComputeProfile::default();
    assert_relative_eq!(local_compute_energy(&p, 1e9, 0.25).unwrap(), 16.0, max_relative = 1e-12);
    assert_relative_eq!(local_compute_energy(&p, 2e8, 0.125).unwrap(), 0.512, max_relative = 1e-12);
    assert_relative_eq!(baseline_no_offload(&gbit_demand(), &p, 0.25).unwrap(), 32.0, max_relative = 1e-12);
}

#[test]
fn capacity_reference_values() {
    assert_relative_eq!(max_offload_bits(0.25, 2, 137e9, 0.3), 2.97455358001e10, max_relative = 1e-10);
    assert_relative_eq!(max_offload_bits(0.25, 10, 2e9, 0.3), 8.68482797083e7, max_relative = 1e-10);
}
