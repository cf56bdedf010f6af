#![allow(dead_code)]

use radcheck_core::lang::parse_model;
use radcheck_core::model::{unfold, Bindings, GuardedModel, Pdtmc};

pub const RAD_SOURCE: &str = include_str!("../../../../models/rad_snag.pm");

pub fn rad_model() -> GuardedModel {
    parse_model(RAD_SOURCE).expect("bundled model parses")
}

/// Horizons only; every probability stays symbolic.
pub fn horizons() -> Bindings {
    Bindings::new()
        .fix_str("MAX_TIME", "2")
        .fix_str("MAX_TIME_TRAJECTORY", "2")
}

/// Tool configuration with p2 and p3 left free.
pub fn config_p2_p3() -> Bindings {
    horizons()
        .fix_str("P4", "0.88")
        .fix_str("P5", "0.7")
        .fix_str("P6", "0.05")
        .fix_str("P7", "0.8")
        .fix_str("P8", "0.05")
        .fix_str("P9", "0.1")
        .fix_str("p10", "0.8")
}

/// Tool configuration with p2, p4, p5, p7, p8 left free.
pub fn config_s7() -> Bindings {
    horizons()
        .fix_str("P3", "0.1")
        .fix_str("P6", "0.05")
        .fix_str("P9", "0.1")
        .fix_str("p10", "0.8")
}

pub fn rad(bindings: &Bindings) -> Pdtmc {
    unfold(&rad_model(), bindings).expect("bundled model unfolds")
}

pub const ESCALATION_CLOSED_FORM: &str = "(100*P3*P2 + 98*P2 - 99)/(88*P2 - 100)";

pub const MITIGATION_NUMERATOR: &str = "10000*P8^2*P5^2*P4^2*P2^2 - 20000*P8*P5^2*P4^2*P2^2 + 2000*P8^2*P5^2*P4*P2^2 + 100*P8*P7^2*P5*P4*P2^2 + 10000*P5^2*P4^2*P2^2 - 500*P8*P5*P4^2*P2^2 - 2000*P8*P5^2*P4*P2^2 - 200*P8*P7*P5*P4*P2^2 + 100*P8^2*P5^2*P4*P2 + 5*P8*P7^2*P5*P4*P2 + 500*P5*P4^2*P2^2 - 2000*P8*P5*P4*P2^2 - 100*P7^2*P4*P2^2 - 100*P8*P5^2*P4*P2 - 10*P8*P7*P5*P4*P2 + 2000*P5*P4*P2^2 + 200*P7*P4*P2^2 - 100*P8*P5*P4*P2 - 5*P7^2*P4*P2 + 100*P5*P4*P2 + 10*P7*P4*P2";

pub const MITIGATION_DENOMINATOR: &str = "10000*P8^2*P5^2*P4^2*P2^2 - 20000*P8*P5^2*P4^2*P2^2 + 4000*P8^2*P5^2*P4*P2^2 + 10000*P5^2*P4^2*P2^2 - 500*P8*P5*P4^2*P2^2 - 4000*P8*P5^2*P4*P2^2 + 400*P8^2*P5^2*P2^2 + 200*P8^2*P5^2*P4*P2 + 500*P5*P4^2*P2^2 - 4100*P8*P5*P4*P2^2 - 200*P8*P5^2*P4*P2 + 40*P8^2*P5^2*P2 + 4000*P5*P4*P2^2 - 800*P8*P5*P2^2 - 205*P8*P5*P4*P2 + P8^2*P5^2 + 100*P4*P2^2 + 200*P5*P4*P2 - 80*P8*P5*P2 + 400*P2^2 + 5*P4*P2 - 2*P8*P5 + 40*P2 + 1";
