//! Resolution of the state to optimize: either a JSON state file or a named
//! parametric family.

use clap::{Args, ValueEnum};
use metrogain::io::load_state;
use metrogain::states::{
    isotropic_state_from_weight, noisy_max_entangled, noisy_singlet, nonwhite_noise_singlet,
    singlet, werner_state, DensityMatrix,
};

#[derive(Args)]
pub struct StateSource {
    /// Path to a state file (JSON with dims and a dense matrix).
    #[arg(long, conflicts_with = "family")]
    pub file: Option<std::path::PathBuf>,
    /// Named state family; see the variants for required parameters.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Local dimension of each party (noisy-me, isotropic, werner).
    #[arg(long)]
    pub d: Option<usize>,
    /// Weight parameter: noise weight for noisy-me and noisy-singlet, the
    /// entangled-component weight for isotropic.
    #[arg(long)]
    pub p: Option<f64>,
    /// Flip-operator weight in [-1, 0] (werner).
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    /// (1-p)·|max entangled><...| + p·white noise on d×d; needs --d, --p.
    NoisyMe,
    /// p·|max entangled><...| + (1-p)·white noise on d×d; needs --d, --p.
    Isotropic,
    /// Flip-symmetric state on d×d; needs --d, --phi.
    Werner,
    /// The two-qubit singlet; no parameters.
    Singlet,
    /// (1-p)·singlet + p·white noise; needs --p.
    NoisySinglet,
    /// Singlet mixed with structured (non-white) noise; no parameters.
    NonwhiteSinglet,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::NoisyMe => "noisy-me",
            Family::Isotropic => "isotropic",
            Family::Werner => "werner",
            Family::Singlet => "singlet",
            Family::NoisySinglet => "noisy-singlet",
            Family::NonwhiteSinglet => "nonwhite-singlet",
        }
    }
}

impl StateSource {
    /// Builds the state and a JSON description of where it came from.
    pub fn resolve(&self) -> Result<(DensityMatrix, serde_json::Value), String> {
        match (&self.file, self.family) {
            (Some(path), None) => {
                let (state, label) = load_state(path)
                    .map_err(|e| format!("cannot load {}: {e}", path.display()))?;
                let description = serde_json::json!({
                    "file": path.display().to_string(),
                    "label": label,
                    "dims": state.dims(),
                });
                Ok((state, description))
            }
            (None, Some(family)) => {
                let state = self.build_family(family)?;
                let description = serde_json::json!({
                    "family": family.name(),
                    "d": self.d,
                    "p": self.p,
                    "phi": self.phi,
                });
                Ok((state, description))
            }
            (None, None) => Err("provide a state via --file or --family".into()),
            (Some(_), Some(_)) => unreachable!("clap rejects --file with --family"),
        }
    }

    fn build_family(&self, family: Family) -> Result<DensityMatrix, String> {
        let need_d = || {
            self.d
                .ok_or_else(|| format!("--family {} needs --d", family.name()))
        };
        let need_p = || {
            self.p
                .ok_or_else(|| format!("--family {} needs --p", family.name()))
        };
        let need_phi = || {
            self.phi
                .ok_or_else(|| format!("--family {} needs --phi", family.name()))
        };
        let state = match family {
            Family::NoisyMe => noisy_max_entangled(need_d()?, need_p()?),
            Family::Isotropic => isotropic_state_from_weight(need_d()?, need_p()?),
            Family::Werner => werner_state(need_d()?, need_phi()?),
            Family::Singlet => return Ok(singlet()),
            Family::NoisySinglet => noisy_singlet(need_p()?),
            Family::NonwhiteSinglet => return Ok(nonwhite_noise_singlet()),
        };
        state.map_err(|e| e.to_string())
    }
}
