use qss_bench::uniform_phases;

#[test]
fn phases_are_reproducible_counting_phases() {
    let a = uniform_phases(100, 5);
    assert_eq!(a, uniform_phases(100, 5));
    assert_ne!(a, uniform_phases(100, 6));
    assert!(a.iter().all(|p| (0.0..=0.5).contains(&p.value())));
}
