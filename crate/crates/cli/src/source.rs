use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qexp::channel::{ChannelFile, ErrorDistribution, QuantumChannel};

use crate::error::{usage, CliResult};
use crate::sweep::GridPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Identity,
    Depolarizing,
    AmplitudeDamping,
    Dephasing,
}

impl Family {
    /// Parameters each family understands, besides the command's own.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Family::Identity => &["d"],
            Family::Depolarizing => &["p", "d"],
            Family::AmplitudeDamping => &["gamma"],
            Family::Dephasing => &["p"],
        }
    }

    pub fn build(self, point: &GridPoint) -> CliResult<QuantumChannel> {
        let d = point.integer("d")?.unwrap_or(2) as u32;
        Ok(match self {
            Family::Identity => QuantumChannel::identity(d)?,
            Family::Depolarizing if d == 2 => QuantumChannel::depolarizing(point.require("p")?)?,
            Family::Depolarizing => {
                let basis = qexp::channel::ErrorBasis::standard(d)?;
                QuantumChannel::pauli(
                    &basis,
                    &ErrorDistribution::depolarizing(d, point.require("p")?)?,
                )?
            }
            Family::AmplitudeDamping => QuantumChannel::amplitude_damping(point.require("gamma")?)?,
            Family::Dephasing => QuantumChannel::dephasing(point.require("p")?)?,
        })
    }
}

/// Where the channel of a run comes from.
#[derive(Debug, Clone)]
pub enum ChannelSource {
    File {
        path: PathBuf,
        channel: QuantumChannel,
    },
    Family(Family),
}

impl ChannelSource {
    pub fn resolve(file: Option<&Path>, family: Option<Family>) -> CliResult<Self> {
        match (file, family) {
            (Some(path), None) => Ok(ChannelSource::File {
                path: path.to_path_buf(),
                channel: ChannelFile::load(path)?,
            }),
            (None, Some(f)) => Ok(ChannelSource::Family(f)),
            (None, None) => Err(usage("one of --channel or --family is required")),
            (Some(_), Some(_)) => Err(usage("--channel and --family are mutually exclusive")),
        }
    }

    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            ChannelSource::File { .. } => &[],
            ChannelSource::Family(f) => f.parameters(),
        }
    }

    pub fn channel(&self, point: &GridPoint) -> CliResult<QuantumChannel> {
        match self {
            ChannelSource::File { channel, .. } => Ok(channel.clone()),
            ChannelSource::Family(f) => f.build(point),
        }
    }

    pub fn input_files(&self) -> Vec<PathBuf> {
        match self {
            ChannelSource::File { path, .. } => vec![path.clone()],
            ChannelSource::Family(_) => Vec::new(),
        }
    }
}
