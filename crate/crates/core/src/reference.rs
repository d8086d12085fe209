//! American call benchmark values (K = 100, τ = 0.5) used for regression.

/// Market parameters of one benchmark grouping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grouping {
    pub rate: f64,
    pub div: f64,
    pub vol: f64,
}

pub const STRIKE: f64 = 100.0;
pub const TAU: f64 = 0.5;
pub const SPOTS: [f64; 5] = [80.0, 90.0, 100.0, 110.0, 120.0];

pub const GROUPINGS: [Grouping; 3] = [
    Grouping { rate: 0.03, div: 0.07, vol: 0.2 },
    Grouping { rate: 0.03, div: 0.07, vol: 0.4 },
    Grouping { rate: 0.07, div: 0.03, vol: 0.3 },
];

/// Binomial values with 10 000 steps.
pub const TRUE_VALUES: [[f64; 5]; 3] = [
    [0.2194, 1.3864, 4.7825, 11.0978, 20.0004],
    [2.6889, 5.7223, 10.2385, 16.1812, 23.3598],
    [1.6644, 4.4947, 9.2504, 15.7977, 23.7061],
];

/// FFT inversion with N = 2¹⁴, M = 250, a = 1.
pub const FFT_VALUES: [[f64; 5]; 3] = [
    [0.2198, 1.3894, 4.7942, 11.1269, 20.0594],
    [2.6921, 5.7298, 10.2539, 16.2076, 23.4013],
    [1.6643, 4.4946, 9.2505, 15.7974, 23.706],
];

/// Series inversion with 250 terms, L = 10, a = 1, M = 250.
pub const DW_VALUES: [[f64; 5]; 3] = [
    [0.2198, 1.3895, 4.7943, 11.1270, 20.0591],
    [2.6921, 5.7297, 10.2538, 16.2074, 23.4010],
    [1.6644, 4.4947, 9.2506, 15.7975, 23.7062],
];
