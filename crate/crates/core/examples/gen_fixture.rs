//! Regenerates the shipped fixture corpus: `cargo run -p idrkit-core --example gen_fixture -- fixtures`

use std::fs;
use std::path::PathBuf;

use idrkit_core::corpus::write_records;
use idrkit_core::synth::fixture_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    fs::create_dir_all(&dir)?;
    let corpus = fixture_corpus(42, 200);

    let mut records = Vec::new();
    write_records(&corpus.records, &mut records)?;
    // one malformed line and one duplicate id, both skipped with a warning
    records.extend_from_slice(b"{\"id\": \"broken\", \"title\": \n");
    let mut dup = corpus.records[0].clone();
    dup.title = "Duplicate entry".into();
    write_records(&[dup], &mut records)?;
    fs::write(dir.join("records.jsonl"), records)?;

    let mut catalog = corpus.catalog_csv();
    catalog.push_str("Journal of Unfiled Studies,ZZZZ\n");
    fs::write(dir.join("catalog.csv"), catalog)?;
    fs::write(dir.join("abbrev.csv"), corpus.abbrev_csv())?;
    println!("wrote fixture to {}", dir.display());
    Ok(())
}
