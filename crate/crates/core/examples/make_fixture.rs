//! Regenerates the bundled synthetic fixture.
//!
//! `cargo run -p crossmedia --example make_fixture [DIR]`

use std::path::PathBuf;

fn main() {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic"));
    if let Err(e) = crossmedia::synth::write_fixture(&dir, crossmedia::synth::FIXTURE_SEED) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    println!("wrote {}", dir.display());
}
