//! Independent reference computations used by the test suites: adaptive
//! quadrature, Kolmogorov-Smirnov and chi-square tests, and direct
//! transcriptions of the example potentials.

pub mod models;
pub mod quad;
pub mod stats;
