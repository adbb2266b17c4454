//! Regenerates `docs/traceability.md` from the claim registry.
//!
//! ```text
//! cargo run --example traceability            # print
//! cargo run --example traceability -- --write # update docs/
//! ```

use std::path::Path;

use semidirect_hsp::traceability::generate_traceability;

fn main() -> std::io::Result<()> {
    let doc = generate_traceability();
    if std::env::args().any(|a| a == "--write") {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/traceability.md");
        std::fs::write(&path, &doc)?;
        eprintln!("wrote {}", path.display());
    } else {
        print!("{doc}");
    }
    Ok(())
}
