use std::fmt::Display;
use std::path::{Path, PathBuf};

use anyhow::Result;

use crate::config::Paths;

/// What a stage reads, writes and uses; printed by `--dry-run`.
pub struct Plan {
    stage: &'static str,
    inputs: Vec<(&'static str, PathBuf)>,
    outputs: Vec<(&'static str, PathBuf)>,
    settings: Vec<(&'static str, String)>,
}

impl Plan {
    pub fn new(stage: &'static str) -> Self {
        Plan { stage, inputs: Vec::new(), outputs: Vec::new(), settings: Vec::new() }
    }

    pub fn input(&mut self, paths: &Paths, key: &'static str) -> Result<PathBuf> {
        let p = paths.require(key)?.to_path_buf();
        self.inputs.push((key, p.clone()));
        Ok(p)
    }

    pub fn input_path(&mut self, label: &'static str, path: &Path) -> PathBuf {
        self.inputs.push((label, path.to_path_buf()));
        path.to_path_buf()
    }

    pub fn output(&mut self, paths: &Paths, key: &'static str) -> Result<PathBuf> {
        let p = paths.require(key)?.to_path_buf();
        self.outputs.push((key, p.clone()));
        Ok(p)
    }

    pub fn setting(&mut self, name: &'static str, value: impl Display) {
        self.settings.push((name, value.to_string()));
    }

    /// Fails, naming the stage to run, when an input file is missing.
    pub fn check_inputs(&self, paths: &Paths) -> Result<()> {
        for (key, path) in &self.inputs {
            if paths.get(key).is_some() {
                paths.input(key)?;
            } else if !path.exists() {
                anyhow::bail!("input {} does not exist", path.display());
            }
        }
        Ok(())
    }

    pub fn print(&self) {
        println!("plan: congen {}", self.stage);
        for (key, path) in &self.inputs {
            let state = if path.exists() { "exists" } else { "missing" };
            println!("  read   {key:<12} {} ({state})", path.display());
        }
        for (key, path) in &self.outputs {
            println!("  write  {key:<12} {}", path.display());
        }
        for (name, value) in &self.settings {
            println!("  set    {name:<12} {value}");
        }
    }
}
