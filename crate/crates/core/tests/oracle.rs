//! Reference values computed with 40-digit arithmetic.

use landmark_core::grouping::{c_of_d, GroupingProfile};
use landmark_core::special::{erfc, ln_gamma, regularized_gamma_pair, regularized_incomplete_beta};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

// (p, x, P(p, x), Q(p, x))
const GAMMA: &[(f64, f64, f64, f64)] = &[
    (0.5, 0.1, 0.345279153981423, 0.654720846018577),
    (1.5, 2.0, 0.7385358700508894, 0.2614641299491106),
    (10.0, 5.0, 0.03182805730620481, 0.9681719426937951),
    (10.0, 15.0, 0.9301463393005902, 0.06985366069940976),
    (63.5, 50.0, 0.03680210462803347, 0.9631978953719665),
    (63.5, 70.0, 0.7969887182296657, 0.2030112817703343),
    (500.0, 480.0, 0.1862819731903246, 0.8137180268096754),
    (1e4, 10050.0, 0.6923424407025656, 0.30765755929743444),
    (3e4, 29800.0, 0.12397336132313949, 0.8760266386768605),
    (3e4, 30300.0, 0.958026828894268, 0.041973171105731934),
    (5e5, 501000.0, 0.9212813386138704, 0.07871866138612964),
    (4.95e7, 49493000.0, 0.15988364732748725, 0.8401163526725127),
    (4.95e7, 49505000.0, 0.7613625974797198, 0.23863740252028023),
];

#[test]
fn incomplete_gamma_matches_reference() {
    for &(p, x, lower, upper) in GAMMA {
        let (pl, pu) = regularized_gamma_pair(p, x).unwrap();
        assert!(close(pl, lower, 1e-10), "P({p}, {x}) = {pl}, want {lower}");
        assert!(close(pu, upper, 1e-10), "Q({p}, {x}) = {pu}, want {upper}");
    }
}

#[test]
fn ln_gamma_matches_reference() {
    for &(x, want) in &[
        (0.3, 1.0957979948180756),
        (1.0, 0.0),
        (2.5, 0.2846828704729192),
        (17.25, 31.374622313677687),
        (1234.5, 7550.550901077895),
        (1e7, 151180949.3694739),
    ] {
        assert!((ln_gamma(x) - want).abs() <= 1e-13 * want.abs().max(1.0), "ln Γ({x})");
    }
}

#[test]
fn erfc_matches_reference() {
    for &(y, want) in &[
        (-2.0, 1.9953222650189528),
        (-0.3, 1.3286267594591274),
        (0.0, 1.0),
        (0.7, 0.32219880616258156),
        (3.0, 2.209049699858544e-05),
        (6.5, 3.8421483271206475e-20),
    ] {
        assert!(close(erfc(y), want, 1e-13), "erfc({y})");
    }
}

#[test]
fn incomplete_beta_matches_reference() {
    for &(a, b, x, want) in &[
        (1.0, 0.5, 0.3, 0.16333997346592444),
        (2.5, 0.5, 0.9, 0.48958974456442755),
        (4.0, 0.5, 0.01, 2.74538135142481e-09),
        (3.0, 2.0, 0.6, 0.4752),
    ] {
        assert!(close(regularized_incomplete_beta(a, b, x).unwrap(), want, 1e-12), "I_{x}({a}, {b})");
    }
}

#[test]
fn c_of_d_matches_reference() {
    for &(dim, want) in &[
        (4, 0.4839414490382867),
        (5, 0.36787944117144233),
        (10, 0.20823954961634392),
        (128, 0.05039541231558859),
        (1000, 0.017865076666961417),
    ] {
        assert!(close(c_of_d(dim).unwrap(), want, 1e-12), "C({dim})");
    }
}

fn fig_profile() -> GroupingProfile {
    GroupingProfile::new(3.84_f64.sqrt(), 0.1, 128).unwrap()
}

#[test]
fn grouping_profile_matches_reference() {
    let g = fig_profile();
    assert!((g.s_star * g.s_star - 2.59).abs() < 1e-12);
    // (s, h(s), −ḣ(s))
    for &(s, h, nhd) in &[
        (0.0, 1.0, 0.0),
        (1.0, 0.9999999999999499, 2.82813496678201e-12),
        (1.4, 0.9996435563131095, 0.017629200799571667),
        (1.5, 0.9713743617712974, 1.0615012905443482),
        (1.609, 0.4692465126154726, 8.10841889922567),
        (1.7, 0.015237162548849712, 0.9956499362141434),
        (1.8, 6.854408722629163e-08, 1.4119246022645046e-05),
        (1.9, 1.7596399937735694e-26, 1.5180186907875502e-23),
    ] {
        assert!(close(g.h(s), h, 1e-10), "h({s}) = {}", g.h(s));
        if nhd > 0.0 {
            assert!(close(g.neg_h_dot(s), nhd, 1e-10), "−ḣ({s}) = {}", g.neg_h_dot(s));
        }
    }
}

#[test]
fn acceptance_probability_matches_reference() {
    let g = fig_profile();
    for &(t, want) in &[
        (1.0, 0.9999998988400877),
        (1.5, 0.8204003521074629),
        (1.609, 0.47827287531588675),
        (1.7, 0.19136627747134757),
        (1.85, 0.012722231531756301),
    ] {
        let got = g.phi_conv_h(t).unwrap();
        assert!((got - want).abs() < 1e-9, "φ∗h({t}) = {got}, want {want}");
    }
}
