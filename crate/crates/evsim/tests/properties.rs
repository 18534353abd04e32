//! Property-based invariants for the numeric building blocks.

use proptest::prelude::*;

use evsim::adoption::{fit_growth_rate, logistic_population, LogisticParams};
use evsim::charging::{apply_trip, charging_energy_for_hour};
use evsim::emissions::decay_factor;
use evsim::grid::{coincidence_factor, load_factor};

fn params(a: f64, p0: f64, r: f64) -> LogisticParams {
    LogisticParams {
        carrying_capacity: a,
        initial_population: p0,
        growth_rate: r,
        t0_year: 2011,
    }
}

proptest! {
    // Logistic growth is monotone in t and stays strictly inside (0, A).
    #[test]
    fn logistic_monotone_and_bounded(
        a in 1e3..1e8f64,
        frac in 1e-6..0.5f64,
        r in 0.01..2.0f64,
        t in 0.0..50.0f64,
        dt in 0.001..10.0f64,
    ) {
        let p = params(a, a * frac, r);
        let now = logistic_population(t, &p);
        let later = logistic_population(t + dt, &p);
        // <= rather than < on both: in floating point the curve saturates to
        // exactly the carrying capacity once r*t is large.
        prop_assert!(now > 0.0 && now <= a);
        prop_assert!(later >= now);
        // Strict increase is only observable while the remaining headroom
        // times the step is above double-precision resolution.
        if (1.0 - now / a) * r * dt > 1e-12 {
            prop_assert!(later > now);
        }
    }

    // Fitting a growth rate through a point reproduces that point.
    #[test]
    fn fit_roundtrips_through_target(
        a in 1e4..1e8f64,
        p0_frac in 1e-6..0.01f64,
        pt_frac in 0.02..0.99f64,
        t in 1.0..40.0f64,
    ) {
        let p0 = a * p0_frac;
        let pt = a * pt_frac;
        let r = fit_growth_rate(p0, a, t, pt).unwrap();
        let reproduced = logistic_population(t, &params(a, p0, r));
        prop_assert!((reproduced - pt).abs() <= 1e-9 * pt);
    }

    // Load and coincidence factors are dimensionless: scaling every load by
    // a constant leaves them unchanged.
    #[test]
    fn factors_are_scale_invariant(
        totals in prop::collection::vec(0.1..500.0f64, 1..50),
        scale in 0.01..100.0f64,
    ) {
        let scaled: Vec<f64> = totals.iter().map(|v| v * scale).collect();
        let a = load_factor(&totals).unwrap();
        let b = load_factor(&scaled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
        prop_assert!(a > 0.0 && a <= 1.0);

        let traces = vec![totals.clone(), scaled];
        let result = coincidence_factor(&traces).unwrap();
        prop_assert!(result.factor > 0.0 && result.factor <= 1.0);
    }

    // Exponential decay composes: f(a+b) = f(a) * f(b).
    #[test]
    fn decay_is_a_semigroup(a in 0.0..20.0f64, b in 0.0..20.0f64) {
        let lhs = decay_factor(a + b);
        let rhs = decay_factor(a) * decay_factor(b);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs).max(1e-300));
    }

    // Trips never drive the SoC negative; infeasible trips pin it to zero.
    #[test]
    fn trips_keep_soc_nonnegative(soc in 0.0..100.0f64, demand in 0.0..200.0f64) {
        let outcome = apply_trip(soc, demand);
        prop_assert!(outcome.new_soc_kwh >= 0.0);
        prop_assert!(outcome.new_soc_kwh <= soc);
        prop_assert_eq!(outcome.infeasible, demand > soc);
        if outcome.infeasible {
            prop_assert_eq!(outcome.new_soc_kwh, 0.0);
        }
    }

    // One hour of charging delivers at most the power rating and never
    // overfills the battery.
    #[test]
    fn charging_respects_power_and_capacity(
        capacity in 10.0..150.0f64,
        soc_frac in 0.0..1.0f64,
        power in 1.0..22.0f64,
    ) {
        let soc = capacity * soc_frac;
        let energy = charging_energy_for_hour(soc, capacity, power, 1.0);
        prop_assert!(energy >= 0.0);
        prop_assert!(energy <= power + 1e-12);
        prop_assert!(soc + energy <= capacity + 1e-9);
    }
}
