//! Line-delimited JSON trajectory logs, one frame per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::entities::Frame;
use crate::error::{Error, Result};

pub fn frame_to_line(frame: &Frame) -> String {
    serde_json::to_string(frame).expect("frames always serialize")
}

pub fn parse_line(line: &str, line_no: usize) -> Result<Frame> {
    serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })
}

/// Parses a whole log. Line numbers in errors are 1-based; blank lines are skipped.
pub fn parse_log(text: &str) -> Result<Vec<Frame>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let reader = BufReader::new(File::open(path)?);
    let mut frames = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(parse_line(&line, i + 1)?);
    }
    Ok(frames)
}

pub struct TrajectoryWriter<W: Write> {
    out: W,
    frames: u64,
}

impl TrajectoryWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::new(BufWriter::new(File::create(path)?)))
    }
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(out: W) -> Self {
        TrajectoryWriter { out, frames: 0 }
    }

    pub fn write(&mut self, frame: &Frame) -> Result<()> {
        serde_json::to_writer(&mut self.out, frame).map_err(std::io::Error::from)?;
        self.out.write_all(b"\n")?;
        self.frames += 1;
        Ok(())
    }

    pub fn frames_written(&self) -> u64 {
        self.frames
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
