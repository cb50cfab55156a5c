//! Output writers: JSON documents carry the resolved config in a `config`
//! field; CSV files carry it as a leading comment line. Floats are emitted
//! with 17 significant digits so that reloading reproduces the bits.

use crate::config::EffectiveConfig;
use crate::CliError;
use std::io::Write;

pub fn write_json(
    cfg: &EffectiveConfig,
    kind: &str,
    payload: serde_json::Value,
) -> Result<(), CliError> {
    let doc = serde_json::json!({
        "kind": kind,
        "config": serde_json::to_value(cfg).unwrap(),
        "data": payload,
    });
    let text = serde_json::to_string_pretty(&doc).unwrap();
    emit(cfg, &text)
}

pub fn write_csv(cfg: &EffectiveConfig, body: &str) -> Result<(), CliError> {
    let header = format!("# config: {}\n", serde_json::to_string(cfg).unwrap());
    emit(cfg, &format!("{header}{body}"))
}

fn emit(cfg: &EffectiveConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => {
            println!("{text}");
        }
    }
    Ok(())
}
