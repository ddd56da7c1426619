use kcalc_projrep::battery::{run_battery, DEFAULT_TOLERANCE};

#[test]
fn level_three_battery_passes_for_several_seeds() {
    for seed in [0, 1, 2] {
        let report = run_battery(3, DEFAULT_TOLERANCE, seed);
        assert!(report.all_passed(), "seed {seed}\n{}", report.render_text());
        for id in ["higman/m1", "higman/m2", "lemma82/m1", "lemma82/m2", "pr930/L2", "pr930/L3", "lemma80a/m2"] {
            assert!(report.get(id).is_some(), "{id} missing");
        }
    }
}

#[test]
#[ignore = "about 100 s of dense 256×256 products; run with --ignored"]
fn level_four_battery_passes() {
    let report = run_battery(4, DEFAULT_TOLERANCE, 0);
    assert!(report.all_passed(), "{}", report.render_text());
    assert!(report.get("pr930/L4").is_some());
}
