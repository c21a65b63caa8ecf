//! CSV and JSON emission of flat rows.

use crate::{CliError, OutputFormat, RunConfig};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};

/// Write rows to the configured destination. CSV headers follow the field
/// order of `T`; JSON is an array of objects.
pub fn emit<T: Serialize>(rows: &[T], cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.destination() {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(&path)?);
            write_rows(rows, cfg.output_format, &mut w)?;
            w.flush()?;
            log::info!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_rows(rows, cfg.output_format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: OutputFormat, w: &mut W) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            let mut c = csv::Writer::from_writer(w);
            for r in rows {
                c.serialize(r)?;
            }
            c.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        k: u32,
        value: f64,
    }

    #[test]
    fn csv_header_follows_field_order() {
        let mut buf = Vec::new();
        write_rows(&[Row { k: 12, value: 0.5 }], OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,value\n12,0.5\n");
    }

    #[test]
    fn json_is_an_array() {
        let mut buf = Vec::new();
        write_rows(&[Row { k: 12, value: 0.5 }], OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["k"], 12);
        assert!(buf.ends_with(b"\n"));
    }
}
