// The bundled fixtures must be exactly what the generator writes.

#[path = "../examples/make_fixtures.rs"]
mod make_fixtures;

#[test]
fn bundled_fixtures_match_generator() {
    let root = make_fixtures::default_root();
    for (rel, body) in make_fixtures::fixtures() {
        let path = root.join(&rel);
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(on_disk == body, "{rel} differs from the generator; rerun `cargo run --example make_fixtures`");
    }
}

#[test]
fn generator_is_deterministic() {
    assert_eq!(make_fixtures::fixtures(), make_fixtures::fixtures());
}
