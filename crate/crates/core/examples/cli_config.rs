//! Drives the same entry point as the binary from a JSON config.
use packetlab::run::{run, RunConfig};

fn main() {
    let text = r#"{"command":"floor","truncation":16,"grid":128,"output":"csv","seed":0,
                   "params":{"alpha":0.25}}"#;
    let cfg: RunConfig = serde_json::from_str(text).expect("valid config");
    let out = run(&cfg);
    print!("{}", out.artifact);
    eprintln!("exit code {}", out.code);
}
