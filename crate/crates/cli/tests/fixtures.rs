//! The shipped weight tables are exactly the generated ones.
//!
//! `cargo test -p dqcalc-cli --test fixtures -- --ignored regenerate` rewrites
//! them in place after a deliberate change.

use dqcalc::formality::{moyal_weights, WeightCollection};
use dqcalc::graph::{wheel_family, WheelKind};
use dqcalc::rational::{factorial, Rat};
use dqcalc::series::bernoulli;
use std::path::PathBuf;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn moyal_table() -> String {
    moyal_weights(6).unwrap().to_json() + "\n"
}

/// Wheel weights of the reference morphism: the spokes-in wheels vanish, the
/// two-ground wheels carry `B_j/(2 j!)`, the spokes-out wheels and their disk
/// counterparts `-B_j/(2 j!)`, all for even `j` (odd wheel weights vanish).
/// The wedge weight 1/2 is included so the table is usable at order one.
fn reference_table() -> String {
    let mut w = WeightCollection::new(13);
    w.set_weight(&dqcalc::graph::wedge_graph(), Rat::new(1.into(), 2.into()))
        .unwrap();
    for j in (2..=10).step_by(2) {
        let c = bernoulli(j) / (Rat::from_integer(2.into()) * Rat::from_integer(factorial(j)));
        w.set_weight(&wheel_family(WheelKind::DufloII, j).unwrap(), c.clone())
            .unwrap();
        w.set_weight(&wheel_family(WheelKind::CurvIII, j).unwrap(), -c.clone())
            .unwrap();
        w.set_weight(&wheel_family(WheelKind::ChainWheel, j).unwrap(), -c)
            .unwrap();
    }
    w.to_json() + "\n"
}

#[test]
fn shipped_fixtures_match_generated() {
    for (name, expected) in [
        ("moyal.json", moyal_table()),
        ("kontsevich_fixture.json", reference_table()),
    ] {
        let path = fixture_dir().join(name);
        let shipped = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(shipped, expected, "{name} is stale; run the regenerate test");
    }
}

#[test]
fn shipped_fixtures_load() {
    for name in ["moyal.json", "kontsevich_fixture.json"] {
        let text = std::fs::read_to_string(fixture_dir().join(name)).unwrap();
        let w = WeightCollection::from_json(&text, None).unwrap();
        assert!(!w.is_empty());
    }
}

#[test]
#[ignore = "writes the fixture files in place"]
fn regenerate() {
    std::fs::create_dir_all(fixture_dir()).unwrap();
    std::fs::write(fixture_dir().join("moyal.json"), moyal_table()).unwrap();
    std::fs::write(
        fixture_dir().join("kontsevich_fixture.json"),
        reference_table(),
    )
    .unwrap();
}
