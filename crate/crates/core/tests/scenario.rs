use std::path::Path;

use nbval::galois::{LayerKind, LayerSpec};
use nbval::lab::{FieldSection, Lab, RunSection, Scenario};
use nbval::localfield::{Characteristic, Scalar};
use nbval::Error;
use proptest::prelude::*;

fn scenarios_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    let mut count = 0;
    for entry in std::fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let sc = Scenario::load(&path).unwrap();
            assert_eq!(Scenario::parse(&sc.to_toml()).unwrap(), sc, "{}", path.display());
            count += 1;
        }
    }
    assert!(count >= 6);
}

#[test]
fn unknown_keys_are_rejected() {
    let base = "[field]\ncharacteristic = \"p\"\nprime = 2\n[extension]\nlayers = [{ kind = \"artin_schreier\", datum = \"1@-1\" }]\n";
    assert!(Scenario::parse(base).is_ok());
    for extra in ["[run]\nseeds = 3\n", "[other]\nx = 1\n", "name = \"a\"\nnote = \"b\"\n"] {
        let text = if extra.starts_with('[') { format!("{base}{extra}") } else { format!("{extra}{base}") };
        assert!(matches!(Scenario::parse(&text), Err(Error::Scenario(_))), "{extra}");
    }
    let bad_layer = base.replace("datum = \"1@-1\"", "datum = \"1@-1\", sign = 1");
    assert!(Scenario::parse(&bad_layer).is_err());
}

#[test]
fn malformed_values_are_rejected() {
    let t = |body: &str| Scenario::parse(body);
    assert!(t("[field]\ncharacteristic = \"two\"\nprime = 2\n[extension]\nlayers = [{ kind = \"kummer\", datum = \"2\" }]\n").is_err());
    assert!(t("[field]\ncharacteristic = \"zero\"\nprime = 2\n[extension]\nlayers = [{ kind = \"kummer\", datum = \"1,x@0\" }]\n").is_err());
    assert!(t("[field]\ncharacteristic = \"zero\"\nprime = 2\n[extension]\nlayers = []\n").is_err());
    assert!(t("[field]\ncharacteristic = \"zero\"\nprime = 2\nprecision = 0\n[extension]\nlayers = [{ kind = \"kummer\", datum = \"2\" }]\n").is_err());
}

#[test]
fn run_section_overrides_precision() {
    let sc = Scenario::parse(
        "[field]\ncharacteristic = \"zero\"\nprime = 2\nprecision = 20\n[extension]\nlayers = [{ kind = \"kummer\", datum = \"-1\" }]\n[run]\nprecision = 12\nprecision_cap = 48\n",
    )
    .unwrap();
    assert_eq!(sc.base_precision(), 12);
    let lab = Lab::new(sc, None).unwrap();
    assert_eq!(lab.cap(), 48);
    assert_eq!(lab.ladder(), vec![12, 24, 48]);
    assert_eq!(lab.base().precision(), 12);
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        (-50i64..50).prop_map(Scalar::Integer),
        (any::<bool>(), prop::collection::vec(0u32..3, 1..5), -5i64..5)
            .prop_map(|(negative, digits, valuation)| Scalar::Digits { negative, digits, valuation }),
    ]
}

proptest! {
    #[test]
    fn scenario_round_trip(
        name in prop::option::of("[a-z ]{0,12}"),
        p in prop::sample::select(vec![2u32, 3, 5]),
        char_p in any::<bool>(),
        layers in prop::collection::vec((any::<bool>(), scalar()), 1..4),
        seed in prop::option::of(any::<u64>()),
        trials in prop::option::of(0u64..1000),
        cap in prop::option::of(64i64..4096),
    ) {
        let sc = Scenario {
            name,
            field: FieldSection {
                characteristic: if char_p { Characteristic::P } else { Characteristic::Zero },
                prime: p,
                tower: Vec::new(),
                precision: None,
            },
            extension: nbval::lab::ExtensionSection {
                layers: layers
                    .into_iter()
                    .map(|(k, datum)| LayerSpec { kind: if k { LayerKind::Kummer } else { LayerKind::ArtinSchreier }, datum })
                    .collect(),
            },
            run: RunSection { seed, trials, precision: None, precision_cap: cap },
        };
        let text = sc.to_toml();
        prop_assert_eq!(Scenario::parse(&text).unwrap(), sc);
    }
}
