//! Property tests for the model invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use thzmec::beamforming::{
    beam_gain, cm_beamformer, cm_gain, cosine_similarity, fejer_kernel, select_beam, BeamVector, Codebook,
};
use thzmec::ceemax::{cee_value, CeeProblem};
use thzmec::channel::{
    bs_channel_vector, db_to_linear, linear_to_db, named_window, noise_power, path_loss, sidelink_gain,
    steering_vector, AntennaGains, ChannelVector, ThzWindow,
};
use thzmec::emin::{max_offload_bits, prop1_allocate, TaskDemand};
use thzmec::linkmodel::{link_rates, PairLink};
use thzmec::optim::hungarian;
use thzmec::optim::oracle::brute_force_assignment;
use thzmec::topology::{deploy_users, pair_users, CellGeometry};

fn link(d_bs: f64, angle: f64, d_side: f64, beta: f64, n: usize) -> (PairLink, BeamVector) {
    let win = named_window("f3").unwrap();
    let gains = AntennaGains::default();
    let h = bs_channel_vector(&win, &gains, d_bs, angle, n).unwrap();
    let l = PairLink::new(
        h,
        sidelink_gain(&win, &gains, d_side).unwrap(),
        beta,
        win.bandwidth,
        noise_power(win.bandwidth, 10.0).unwrap(),
    )
    .unwrap();
    (l, BeamVector::from(steering_vector(angle, n).unwrap()))
}

fn geometry() -> CellGeometry {
    CellGeometry {
        center_radius: 3.0,
        edge_radius: 5.0,
        min_radius: 0.5,
        sector_start: (-30f64).to_radians(),
        sector_end: 90f64.to_radians(),
    }
}

proptest! {
    #[test]
    fn path_loss_increases_in_distance_frequency_and_absorption(
        f in 0.1e12..10e12f64, k in 0.0..1.0f64, d in 0.1..10.0f64, s in 1.01..2.0f64,
    ) {
        let base = path_loss(&ThzWindow::new(f, 1e9, k).unwrap(), d).unwrap();
        prop_assert!(path_loss(&ThzWindow::new(f, 1e9, k).unwrap(), d * s).unwrap() > base);
        prop_assert!(path_loss(&ThzWindow::new(f * s, 1e9, k).unwrap(), d).unwrap() > base);
        prop_assert!(path_loss(&ThzWindow::new(f, 1e9, k + 0.01).unwrap(), d).unwrap() > base);
    }

    #[test]
    fn steering_vectors_have_unit_norm(n in 1usize..=64, theta in -std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2) {
        prop_assert!((steering_vector(theta, n).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn db_round_trip(db in -200.0..200.0f64) {
        let back = linear_to_db(db_to_linear(db));
        prop_assert!((back - db).abs() <= 1e-9 * db.abs().max(1.0));
    }

    #[test]
    fn cosine_similarity_is_fejer_kernel(n in 1usize..=32, a in -1.5..1.5f64, b in -1.5..1.5f64) {
        let h = steering_vector(a, n).unwrap();
        let w = BeamVector::from(steering_vector(b, n).unwrap());
        let s = cosine_similarity(&h, &w).unwrap();
        prop_assert!((s - fejer_kernel(n, std::f64::consts::PI * (a.sin() - b.sin()))).abs() < 1e-10);
        prop_assert!(s <= 1.0);
    }

    #[test]
    fn selected_beam_maximizes_similarity(n in 1usize..=16, theta in -0.5..1.5f64) {
        let cb = Codebook::build(20, ((-30f64).to_radians(), 90f64.to_radians()), n).unwrap();
        let h = steering_vector(theta, n).unwrap();
        let sel = select_beam(&h, &cb).unwrap();
        for w in &cb.beams {
            prop_assert!(cosine_similarity(&h, w).unwrap() <= sel.similarity + 1e-12);
        }
    }

    #[test]
    fn cm_beam_is_constant_modulus_and_optimal(
        parts in prop::collection::vec((0.01..1.0f64, -3.1..3.1f64), 1..=8),
        probe in prop::collection::vec(-3.1..3.1f64, 8),
    ) {
        let h = ChannelVector::new(parts.iter().map(|&(r, p)| Complex64::from_polar(r, p)).collect()).unwrap();
        let w = cm_beamformer(&h, [0.0, 0.0]).unwrap();
        prop_assert!(w.cm_violation() < 1e-12);
        let g = beam_gain(&h, &w);
        prop_assert!((g - cm_gain(&h)).abs() <= 1e-12 * g);
        prop_assert!(g <= h.norm_sqr() * (1.0 + 1e-12));
        // any other CM beam does no better
        let amp = 1.0 / (h.len() as f64).sqrt();
        let other = BeamVector::new(probe[..h.len()].iter().map(|&p| Complex64::from_polar(amp, p)).collect()).unwrap();
        prop_assert!(beam_gain(&h, &other) <= g * (1.0 + 1e-12));
    }

    #[test]
    fn hungarian_matches_brute_force(k in 1usize..=6, seed in prop::collection::vec(0.0..100.0f64, 36)) {
        let cost: Vec<Vec<f64>> = (0..k).map(|r| seed[r * 6..r * 6 + k].to_vec()).collect();
        let (_, best) = brute_force_assignment(&cost);
        prop_assert!((hungarian(&cost).unwrap().total_cost - best).abs() <= 1e-9 * best.max(1.0));
    }

    #[test]
    fn deployment_respects_geometry(seed in any::<u64>(), k in 1usize..=10) {
        let g = geometry();
        let d = deploy_users(seed, &g, k).unwrap();
        prop_assert_eq!(d.center_users.len(), k);
        prop_assert_eq!(d.edge_users.len(), k);
        for u in &d.center_users {
            prop_assert!(u.radius >= g.min_radius && u.radius <= g.center_radius);
        }
        for u in &d.edge_users {
            prop_assert!(u.radius > g.center_radius && u.radius <= g.edge_radius);
            prop_assert!(u.angle >= g.sector_start && u.angle <= g.sector_end);
        }
        let p = pair_users(&d).unwrap();
        let mut centers: Vec<usize> = p.assignments.iter().map(|a| a.1).collect();
        centers.sort_unstable();
        prop_assert_eq!(centers, (0..k).collect::<Vec<_>>());
    }

    #[test]
    fn closed_form_meets_edge_constraints_and_budget(
        d_bs in 0.5..3.0f64, angle in -0.5..1.5f64, d_side in 0.2..4.0f64,
        beta in 0.1..0.45f64, bits in 1e7..5e9f64, k in 1usize..=10,
    ) {
        let (l, w) = link(d_bs, angle, d_side, beta, 4);
        let demand = TaskDemand { bits_edge: bits, bits_center: bits, block: 0.25, pair_count: k };
        match prop1_allocate(&l, &demand, &w) {
            Ok(a) => {
                let r = link_rates(&l, &a);
                prop_assert!(((a.t_edge * r.sidelink - bits) / bits).abs() < 1e-9);
                prop_assert!(((a.t_center * r.bs_edge - bits) / bits).abs() < 1e-9);
                prop_assert!((a.t_edge + a.t_center - 0.25 / k as f64).abs() < 1e-15);
                prop_assert!(bits < max_offload_bits(0.25, k, l.bandwidth, beta));
            }
            Err(e) => {
                prop_assert!(e.is_infeasibility());
                prop_assert!(bits >= max_offload_bits(0.25, k, l.bandwidth, beta) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn energy_falls_with_more_antennas(d_bs in 0.5..3.0f64, angle in -0.5..1.5f64, d_side in 0.2..3.0f64) {
        let demand = TaskDemand { bits_edge: 1e9, bits_center: 1e9, block: 0.25, pair_count: 2 };
        let mut last = f64::INFINITY;
        for n in [2, 4, 8, 16] {
            let (l, w) = link(d_bs, angle, d_side, 0.3, n);
            let a = prop1_allocate(&l, &demand, &w).unwrap();
            let e = a.t_edge * a.p_edge + a.t_center * a.p_center;
            prop_assert!(e <= last * (1.0 + 1e-12));
            last = e;
        }
    }

    #[test]
    fn cee_is_invariant_in_block_length(
        pe in 0.1..5.0f64, pc in 0.1..5.0f64, t in 0.05..0.5f64, s in 1.1..4.0f64,
    ) {
        let (l, _) = link(1.5, 0.3, 1.0, 0.3, 4);
        let mk = |block: f64| {
            let demand = TaskDemand { bits_edge: 1e7, bits_center: 1e7, block, pair_count: 2 };
            CeeProblem::new(l.clone(), demand, 100.0, 4).unwrap()
        };
        let (a, b) = (mk(t), mk(t * s));
        let c = a.gain_cap();
        let ea = a.numerator(pe, pc, c) / a.denominator(pe, pc);
        let eb = b.numerator(pe, pc, c) / b.denominator(pe, pc);
        prop_assert!(((ea - eb) / ea).abs() < 1e-12);
        if let (Ok(x), Ok(y)) = (cee_value(&a, pe, pc, c), cee_value(&b, pe, pc, c)) {
            prop_assert!(((x - y) / x).abs() < 1e-12);
        }
    }
}
