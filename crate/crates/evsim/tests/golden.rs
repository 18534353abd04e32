//! Golden-file check: the 10-household fixture must reproduce, bit for bit,
//! a summary that was computed independently (scripts/make_golden_fixture.py
//! re-simulates the fixture in Python and writes tests/golden/).
//!
//! The fixture is deliberately immune to random draws — identical households,
//! a one-model catalog, a one-bin distance distribution, deterministic
//! adoption, constant intensity with decay disabled — so the two
//! implementations must agree exactly, not just within tolerance.

use std::path::Path;

use evsim::engine::run;
use evsim::io::config::{ScenarioConfig, ScenarioInputs};

#[test]
fn fixture10_matches_golden_summary() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let config_path = root.join("../../data/fixture10/fixture10.json");
    let golden_path = root.join("tests/golden/golden_summary.json");

    let config = ScenarioConfig::from_file(&config_path).expect("fixture config");
    let inputs = ScenarioInputs::load(&config).expect("fixture inputs");
    let result = run(&inputs).expect("fixture run");

    let actual = serde_json::to_value(&result).expect("serialize result");
    let golden: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&golden_path).expect("golden file"))
            .expect("golden json");

    if actual != golden {
        let obj = actual.as_object().unwrap();
        let gold = golden.as_object().unwrap();
        for (key, value) in gold {
            assert_eq!(
                obj.get(key),
                Some(value),
                "field `{key}` diverges from the golden summary"
            );
        }
        panic!("summary has fields not present in the golden file");
    }
}
