//! Every example compiles into this test binary and runs to completion.

mod bound_sandwich {
    include!("../examples/bound_sandwich.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod diversity_order {
    include!("../examples/diversity_order.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod hbar_coefficients {
    include!("../examples/hbar_coefficients.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod incomplete_gamma {
    include!("../examples/incomplete_gamma.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod reproducible_monte_carlo {
    include!("../examples/reproducible_monte_carlo.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod sweep_to_csv {
    include!("../examples/sweep_to_csv.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod throughput_vs_rate {
    include!("../examples/throughput_vs_rate.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod two_round_outage {
    include!("../examples/two_round_outage.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}
