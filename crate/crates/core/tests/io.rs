mod common;

use std::path::Path;

use common::rng;
use contpay::instances::{random_base, random_map, random_multi_discounted};
use contpay::io::{base_to_json, game_to_json, multi_discounted_to_json, parse_game, parse_payoff, LoadedPayoff};
use contpay::words::Alphabet;
use proptest::prelude::*;
use rand::Rng;

fn reserialize(name: &str, body: &str) -> String {
    if name.ends_with("_game.json") {
        return game_to_json(&parse_game(body).unwrap(), true);
    }
    match parse_payoff(body).unwrap() {
        LoadedPayoff::Base(b) => base_to_json(&b, true),
        LoadedPayoff::MultiDiscounted(s) => multi_discounted_to_json(&s, true),
    }
}

#[test]
fn bundled_fixtures_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(reserialize(&name, &body), body.trim_end(), "{name}");
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn rejects_bad_files() {
    for bad in [
        r#"{"labels":["a"],"nodes":[{"id":0,"owner":"max"}],"edges":[]}"#,
        r#"{"labels":["a"],"nodes":[{"id":1,"owner":"max"}],"edges":[{"src":1,"label":"a","dst":1}]}"#,
        r#"{"labels":["a"],"nodes":[{"id":0,"owner":"max"}],"edges":[{"src":0,"label":"b","dst":0}]}"#,
        r#"{"labels":["a"],"nodes":[{"id":0,"owner":"boss"}],"edges":[{"src":0,"label":"a","dst":0}]}"#,
        r#"{"labels":["a"],"nodes":[{"id":0,"owner":"max"}],"edges":[{"src":0,"label":"a","dst":0}],"extra":1}"#,
    ] {
        assert!(parse_game(bad).is_err(), "{bad}");
    }
    for bad in [
        r#"{"kind":"multi_discounted","lambda":{"a":1.0},"w":{"a":0.0}}"#,
        r#"{"kind":"multi_discounted","lambda":{"a":0.5},"w":{"b":0.0}}"#,
        r#"{"kind":"contracting_base","domain":[0.0,1.0],"functions":{"a":{"breakpoints":[[0.0,0.0],[1.0,1.0]]}}}"#,
        r#"{"kind":"contracting_base","domain":[0.0,2.0],"functions":{"a":{"breakpoints":[[0.0,0.0],[1.0,0.5]]}}}"#,
        r#"{"kind":"contracting_base","domain":[0.0,1.0],"functions":{"a":{"breakpoints":[[0.0,0.5],[1.0,0.0]]}}}"#,
    ] {
        assert!(parse_payoff(bad).is_err(), "{bad}");
    }
}

proptest! {
    #[test]
    fn payoff_files_round_trip(seed: u64) {
        let mut r = rng(seed);
        let a = Alphabet::numbered(r.gen_range(1..=3));
        let post = r.gen_bool(0.5).then(|| random_map(&mut r, 2, 1.0));
        let base = random_base(&mut r, &a, 3, 0.9).with_post_map(post);
        let json = base_to_json(&base, false);
        let LoadedPayoff::Base(back) = parse_payoff(&json).unwrap() else { panic!("kind changed") };
        prop_assert_eq!(base_to_json(&back, false), json);

        let spec = random_multi_discounted(&mut r, &a, 0.9);
        let json = multi_discounted_to_json(&spec, true);
        let LoadedPayoff::MultiDiscounted(back) = parse_payoff(&json).unwrap() else { panic!("kind changed") };
        prop_assert_eq!(multi_discounted_to_json(&back, true), json);
    }
}
