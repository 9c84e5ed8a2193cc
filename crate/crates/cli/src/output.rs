//! JSON envelope and CSV table writers.

use std::io::Write;

use serde_json::{json, Value};

use crate::commands::{model_json, Record};
use crate::config::{Command, Format};
use crate::CliError;

pub fn envelope(
    command: Command,
    model: Value,
    runtime_ms: Option<u128>,
    record: &Record,
) -> Value {
    json!({
        "command": command.name(),
        "model": model,
        "runtime_ms": runtime_ms,
        "result": record.result,
    })
}

pub fn write<W: Write>(
    out: W,
    format: Format,
    command: Command,
    model: &cergm::ModelSpec,
    runtime_ms: Option<u128>,
    record: &Record,
) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(
            out,
            &envelope(command, model_json(model), runtime_ms, record),
        ),
        Format::Csv => write_csv(out, record),
    }
}

fn write_json<W: Write>(mut out: W, doc: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_csv<W: Write>(out: W, record: &Record) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.into());
    w.write_record(&record.header).map_err(io)?;
    for row in &record.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
