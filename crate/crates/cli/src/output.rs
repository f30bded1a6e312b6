use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// JSON document wrapping a command's result with provenance fields.
pub fn json_document(cfg: &RunConfig, result: &impl Serialize) -> CliResult<Vec<u8>> {
    let doc = json!({
        "schema_version": cfg.schema_version,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "command": cfg.command.name(),
        "config": cfg,
        "result": result,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// `# key: value` lines opening every CSV file.
pub fn csv_header(cfg: &RunConfig, extra: &[(String, String)]) -> Vec<String> {
    let mut lines = vec![
        format!("schema_version: {}", cfg.schema_version),
        format!("config_hash: {}", cfg.hash()),
        format!("seed: {}", cfg.seed),
        format!("command: {}", cfg.command.name()),
        format!("map: {}", cfg.map),
    ];
    lines.extend(extra.iter().map(|(k, v)| format!("{k}: {v}")));
    lines
}

/// A CSV table of serializable rows, after the comment header.
pub fn csv_table<R: Serialize>(header: &[String], rows: &[R]) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    for h in header {
        writeln!(out, "# {h}")?;
    }
    let mut w = csv::Writer::from_writer(&mut out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::io(e.to_string()))?;
    }
    w.flush()?;
    drop(w);
    Ok(out)
}

/// An 8-bit RGB raster.
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, fill: [u8; 3]) -> Self {
        let rgb = fill.repeat((width * height) as usize);
        Image { width, height, rgb }
    }

    pub fn set(&mut self, x: u32, y: u32, c: [u8; 3]) {
        if x < self.width && y < self.height {
            let i = 3 * (y * self.width + x) as usize;
            self.rgb[i..i + 3].copy_from_slice(&c);
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y * self.width + x) as usize;
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn fill_rect(&mut self, x0: u32, y0: u32, x1: u32, y1: u32, c: [u8; 3]) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.set(x, y, c);
            }
        }
    }

    /// PNG bytes with the provenance fields as text chunks.
    pub fn to_png(&self, cfg: &RunConfig) -> CliResult<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let chunks = [
                ("schema_version", cfg.schema_version.to_string()),
                ("config_hash", cfg.hash()),
                ("seed", cfg.seed.to_string()),
                ("command", cfg.command.name().to_string()),
                ("map", cfg.map.clone()),
            ];
            for (k, v) in chunks {
                enc.add_text_chunk(k.to_string(), v)
                    .map_err(|e| CliError::io(e.to_string()))?;
            }
            let mut w = enc.write_header().map_err(|e| CliError::io(e.to_string()))?;
            w.write_image_data(&self.rgb).map_err(|e| CliError::io(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Writes to `path`, or to `stdout` when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    let res: io::Result<()> = match path {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            w.write_all(bytes)?;
            w.flush()
        }),
        None => stdout.write_all(bytes).and_then(|_| stdout.flush()),
    };
    res.map_err(|e| match path {
        Some(p) => CliError::io(format!("{}: {e}", p.display())),
        None => CliError::io(e.to_string()),
    })
}
