use qecmetro::Execution;

use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::output::OutputDir;

pub mod codes;
pub mod optimize;
pub mod qfi;
pub mod scenario;
pub mod sweep;
pub mod verify;

/// What every command gets after config and flags are merged.
#[derive(Debug)]
pub struct Context {
    pub out: OutputDir,
    pub format: Format,
    pub exec: Execution,
    pub seed: u64,
}

impl Context {
    /// Saves the effective configuration next to the results so the run can be
    /// repeated with `--config`.
    pub fn write_config(&mut self, name: &str, config: &RunConfig) -> Result<()> {
        let text = config.to_toml()?;
        self.out.write(&format!("{name}.config.toml"), text.as_bytes())?;
        Ok(())
    }

    pub fn announce(&self) {
        for path in self.out.written() {
            println!("wrote {}", path.display());
        }
    }
}
