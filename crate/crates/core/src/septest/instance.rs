use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::qcore::{haar_state_orth0, json, Ket, TOL};

/// Width of the control register for chain length `t`.
pub fn control_width(t: usize) -> usize {
    let mut m = 0;
    while (1usize << m) < t + 1 {
        m += 1;
    }
    m
}

/// The data defining one oracle `O_{Ψ,out}`.
///
/// `psi[i-1]` and `phi[i-1]` hold `|ψ_i⟩` and `|φ_i⟩` for `i = 1..=t`. Control values
/// above `t` (when `t+1` is not a power of two) act as the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleInstance {
    pub n: usize,
    pub t: usize,
    pub m: usize,
    #[serde(with = "json::kets")]
    pub psi: Vec<Ket>,
    #[serde(with = "json::kets")]
    pub phi: Vec<Ket>,
    pub out: bool,
}

impl OracleInstance {
    pub fn new(n: usize, t: usize, psi: Vec<Ket>, phi: Vec<Ket>, out: bool) -> Result<Self> {
        let inst = OracleInstance {
            n,
            t,
            m: control_width(t),
            psi,
            phi,
            out,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Haar-random states on the complement of `|0^n⟩`.
    pub fn random<R: Rng + ?Sized>(n: usize, t: usize, out: bool, rng: &mut R) -> Self {
        let psi = (0..t).map(|_| haar_state_orth0(n, rng)).collect();
        let phi = (0..t).map(|_| haar_state_orth0(n, rng)).collect();
        OracleInstance::new(n, t, psi, phi, out).expect("sampled states satisfy the invariants")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t == 0 {
            return Err(Error::InvalidState(format!(
                "instance needs n, t >= 1 (n={}, t={})",
                self.n, self.t
            )));
        }
        if self.m != control_width(self.t) {
            return Err(Error::InvalidState(format!(
                "control width {} for t={}",
                self.m, self.t
            )));
        }
        if self.psi.len() != self.t || self.phi.len() != self.t {
            return Err(Error::InvalidState(format!(
                "expected {} ψ and φ states, got {} and {}",
                self.t,
                self.psi.len(),
                self.phi.len()
            )));
        }
        for (name, k) in self
            .psi
            .iter()
            .map(|k| ("ψ", k))
            .chain(self.phi.iter().map(|k| ("φ", k)))
        {
            if k.dim() != 1 << self.n {
                return Err(Error::dims(format!(
                    "{name} state of dim {}, expected {}",
                    k.dim(),
                    1 << self.n
                )));
            }
            if k.amplitudes()[0].norm() != 0.0 {
                return Err(Error::InvalidState(format!("{name} state overlaps |0^n⟩")));
            }
            if (k.amplitudes().norm() - 1.0).abs() > TOL {
                return Err(Error::InvalidState(format!("{name} state is not normalised")));
            }
        }
        Ok(())
    }

    pub fn psi(&self, i: usize) -> &Ket {
        &self.psi[i - 1]
    }

    pub fn phi(&self, i: usize) -> &Ket {
        &self.phi[i - 1]
    }

    /// Qubits the oracle acts on.
    pub fn arity(&self) -> usize {
        self.m + 2 * self.n
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance JSON is always serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: OracleInstance = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Same states, different `out`.
    pub fn with_out(&self, out: bool) -> Self {
        OracleInstance { out, ..self.clone() }
    }
}

/// Independent instances indexed by a salt register, plus the hidden bit function `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaltedInstance {
    pub n_salt: usize,
    /// `f[x]` is the out bit of salt `x`.
    pub f: Vec<bool>,
    pub instances: Vec<OracleInstance>,
}

impl SaltedInstance {
    pub fn new(n_salt: usize, f: Vec<bool>, instances: Vec<OracleInstance>) -> Result<Self> {
        let s = SaltedInstance { n_salt, f, instances };
        s.validate()?;
        Ok(s)
    }

    /// Random `F` and one random instance per salt.
    pub fn random<R: Rng + ?Sized>(n_salt: usize, n: usize, t: usize, rng: &mut R) -> Self {
        let f: Vec<bool> = (0..1usize << n_salt).map(|_| rng.random()).collect();
        let instances = f.iter().map(|&b| OracleInstance::random(n, t, b, rng)).collect();
        SaltedInstance { n_salt, f, instances }
    }

    pub fn validate(&self) -> Result<()> {
        let k = 1usize << self.n_salt;
        if self.f.len() != k || self.instances.len() != k {
            return Err(Error::InvalidState(format!(
                "{k} salts need {k} bits and instances, got {} and {}",
                self.f.len(),
                self.instances.len()
            )));
        }
        let (n, t) = (self.instances[0].n, self.instances[0].t);
        for (x, inst) in self.instances.iter().enumerate() {
            inst.validate()?;
            if inst.n != n || inst.t != t {
                return Err(Error::InvalidState(format!(
                    "salt {x} has shape (n={}, t={})",
                    inst.n, inst.t
                )));
            }
            if inst.out != self.f[x] {
                return Err(Error::InvalidState(format!("salt {x}: out bit differs from F({x})")));
            }
        }
        Ok(())
    }
}
