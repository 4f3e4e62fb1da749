//! Acceptance suite: one test per verification criterion, each printing its
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; the `rrt verify --level full` command prints the same
//! report.

use rrt_core::exec::Parallelism;
use rrt_core::verify;

fn criterion(id: &str) {
    let report = verify::run_by_id(id, Parallelism::default());
    println!("{}", report.line());
    assert!(report.passed(), "{}", report.line());
}

#[test]
fn c01_exact_means_by_enumeration() {
    criterion("exact-means");
}

#[test]
fn c02_encoding_pushforward_image() {
    criterion("encoding-image");
}

#[test]
fn c03_joint_table_symmetry() {
    criterion("joint-table");
}

#[test]
fn c04_decomposition_law() {
    criterion("decomposition-law");
}

#[test]
fn c05_limit_mass_moments() {
    criterion("limit-mass-moments");
}

#[test]
fn c06_conditional_martingale() {
    criterion("martingale");
}

#[test]
fn c07_toll_expectations() {
    criterion("toll-expectations");
}

#[test]
fn c08_kernel_normalisation() {
    criterion("kernel-normalisation");
}

#[test]
fn c09_path_length_centering() {
    criterion("centering");
}

#[test]
fn c10_fixed_point_and_symmetry() {
    criterion("fixed-point");
}

#[test]
fn c11_wiener_centering() {
    criterion("wiener-centering");
}

#[test]
fn c12_determinism_across_thread_counts() {
    criterion("determinism");
}

#[test]
fn c13_comparison_cost_constant() {
    criterion("comparison-cost");
}
