use nlheat_web::{green_function, heat_wave, pulse_2d, pulse_2d_window};

#[test]
fn wave_profile_tracks_the_exact_solution() {
    for scheme in ["be", "ee"] {
        let p = heat_wave(64, 2e-3, scheme, 1e-2, 0.25).unwrap();
        assert_eq!(p.x().len(), 64);
        assert_eq!(p.u().len(), 64);
        assert_eq!(p.exact().len(), 64);
        let s = p.stats();
        assert_eq!(s.steps, 125);
        assert!(s.error < 5e-2, "{scheme}: {}", s.error);
        assert!(s.min_entry >= 0.0);
        assert!(p.x().windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn green_profile_is_nonnegative_and_peaks_at_the_pulse() {
    let p = green_function(64, 0.1, "ee").unwrap();
    let u = p.u();
    assert!(p.exact().is_empty());
    assert!(p.stats().error.is_nan());
    assert!(u.iter().all(|&v| v >= 0.0));
    let peak = u.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(peak, 32);
}

#[test]
fn pulse_field_is_row_major_and_symmetric() {
    let (t0, _) = pulse_2d_window();
    let f = pulse_2d(24, 1e-5, "ee", 1e-2, t0 + 2e-4).unwrap();
    let (nx, v) = (f.nx(), f.values());
    assert_eq!(v.len(), nx * f.ny());
    // The pulse sits at the origin corner and is symmetric in x and y.
    assert!(v[0] > v[nx - 1]);
    for iy in 0..nx {
        for ix in 0..nx {
            let (a, b) = (v[iy * nx + ix], v[ix * nx + iy]);
            assert!((a - b).abs() <= 1e-8 * v[0], "({ix}, {iy})");
        }
    }
    assert!(f.stats().min_entry >= 0.0);
}

#[test]
fn bad_requests_are_rejected() {
    assert!(heat_wave(1, 1e-3, "ee", 1e-2, 0.1).is_err());
    assert!(heat_wave(64, 0.0, "ee", 1e-2, 0.1).is_err());
    assert!(heat_wave(64, 1e-3, "rk4", 1e-2, 0.1).is_err());
    assert!(heat_wave(64, 1e-3, "ee", 1e-2, 0.9).is_err());
    assert!(heat_wave(64, 1e-6, "ee", 1e-2, 0.5).is_err());
    assert!(heat_wave(64, 1e-3, "be", -1.0, 0.1).is_err());
    assert!(green_function(4096, 0.1, "be").is_err());
    assert!(pulse_2d(16, 1e-5, "ee", 1e-2, 0.0).is_err());
}
