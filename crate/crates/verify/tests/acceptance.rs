use std::path::Path;

#[test]
fn acceptance() {
    let maass = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/maass_sl2.csv");
    let outcomes = weyl_verify::all(&maass);
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{}/{} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
