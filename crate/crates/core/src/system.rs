//! The drift/diffusion representation of a set of coupled bosonic modes.
//!
//! Complex mode amplitudes are always expanded into real canonical
//! quadratures x = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2), two per
//! mode, so one real linear system
//!
//! ```text
//! du = A u dt + B dW,    B B^T = D
//! ```
//!
//! serves the Lyapunov solver, the covariance propagator, and the trajectory
//! oracle alike. Symmetrized covariances in this scaling have vacuum =
//! (1/2) I; the unnormalized quadratures X = a + a^dag (vacuum variance 1)
//! are a factor of sqrt(2) larger and are only used at the reporting layer.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered quadrature labels of a system, two per mode.
///
/// A mode named `m` owns the adjacent pair of labels `X_m`, `Y_m`; the
/// symplectic form is induced by that pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBasis {
    modes: Vec<String>,
    labels: Vec<String>,
}

impl StateBasis {
    /// Panics when mode names repeat (labels must stay unique).
    pub fn from_modes<S: AsRef<str>>(modes: &[S]) -> Self {
        let modes: Vec<String> = modes.iter().map(|m| m.as_ref().to_owned()).collect();
        for (i, m) in modes.iter().enumerate() {
            assert!(
                !modes[..i].contains(m),
                "duplicate mode name `{m}` in state basis"
            );
        }
        let labels = modes
            .iter()
            .flat_map(|m| [format!("X_{m}"), format!("Y_{m}")])
            .collect();
        Self { modes, labels }
    }

    /// System dimension (twice the number of modes).
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_owned(),
            })
    }

    /// Indices of the (X, Y) quadrature pair of a mode.
    pub fn mode_indices(&self, mode: &str) -> Result<(usize, usize)> {
        let m = self
            .modes
            .iter()
            .position(|x| x == mode)
            .ok_or_else(|| Error::UnknownMode {
                mode: mode.to_owned(),
            })?;
        Ok((2 * m, 2 * m + 1))
    }

    /// Symplectic form Omega = blkdiag([[0, 1], [-1, 0]], ...) in this basis.
    pub fn symplectic_form(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut omega = DMatrix::zeros(n, n);
        for m in 0..self.n_modes() {
            omega[(2 * m, 2 * m + 1)] = 1.0;
            omega[(2 * m + 1, 2 * m)] = -1.0;
        }
        omega
    }
}

/// One input bath: its label, thermal occupation and coupling (decay) rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseInput {
    pub label: String,
    /// Mode this bath damps.
    pub mode: String,
    pub occupation: f64,
    pub rate_rad_per_s: f64,
}

/// A linear quantum system in quadrature form: drift matrix A, diffusion
/// matrix D, and the bath bookkeeping behind D.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQuantumSystem {
    basis: StateBasis,
    drift: DMatrix<f64>,
    diffusion: DMatrix<f64>,
    noise_inputs: Vec<NoiseInput>,
}

impl LinearQuantumSystem {
    /// Assemble and validate a system. The diffusion matrix is symmetrized
    /// and must be positive semidefinite to within -1e-12 * ||D||.
    pub fn new(
        basis: StateBasis,
        drift: DMatrix<f64>,
        diffusion: DMatrix<f64>,
        noise_inputs: Vec<NoiseInput>,
    ) -> Result<Self> {
        let n = basis.dim();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                what: "basis",
                expected: 2,
                got: n,
            });
        }
        if drift.nrows() != n || drift.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "drift matrix",
                expected: n,
                got: drift.nrows().max(drift.ncols()),
            });
        }
        if diffusion.nrows() != n || diffusion.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "diffusion matrix",
                expected: n,
                got: diffusion.nrows().max(diffusion.ncols()),
            });
        }
        let diffusion = crate::linalg::symmetrize(&diffusion);
        let scale = diffusion.norm();
        if scale > 0.0 {
            let min_eig = diffusion.clone().symmetric_eigen().eigenvalues.min();
            if min_eig < -1e-12 * scale {
                return Err(Error::IndefiniteDiffusion {
                    eigenvalue: min_eig,
                });
            }
        }
        for ni in &noise_inputs {
            basis.mode_indices(&ni.mode)?;
        }
        Ok(Self {
            basis,
            drift,
            diffusion,
            noise_inputs,
        })
    }

    pub fn basis(&self) -> &StateBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    pub fn diffusion(&self) -> &DMatrix<f64> {
        &self.diffusion
    }

    pub fn noise_inputs(&self) -> &[NoiseInput] {
        &self.noise_inputs
    }

    /// Drift entry addressed by (row, column) quadrature labels.
    pub fn drift_entry(&self, row: &str, col: &str) -> Result<f64> {
        Ok(self.drift[(self.basis.index_of(row)?, self.basis.index_of(col)?)])
    }

    /// Diffusion entry addressed by (row, column) quadrature labels.
    pub fn diffusion_entry(&self, row: &str, col: &str) -> Result<f64> {
        Ok(self.diffusion[(self.basis.index_of(row)?, self.basis.index_of(col)?)])
    }

    /// Bath occupation recorded for a mode, if that mode has a noise input.
    pub fn noise_occupation(&self, mode: &str) -> Option<f64> {
        self.noise_inputs
            .iter()
            .find(|ni| ni.mode == mode)
            .map(|ni| ni.occupation)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SystemDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Serialized form: basis labels plus row-major matrices, for debugging and
/// cross-implementation comparison.
#[derive(Debug, Serialize, Deserialize)]
struct SystemDoc {
    modes: Vec<String>,
    labels: Vec<String>,
    /// Row-major n x n drift (rad/s).
    drift_rad_per_s: Vec<Vec<f64>>,
    /// Row-major n x n diffusion (rad/s).
    diffusion_rad_per_s: Vec<Vec<f64>>,
    noise_inputs: Vec<NoiseInput>,
}

/// Reject duplicate mode names before building a basis from untrusted
/// input (the constructor itself treats duplicates as a programming error).
pub(crate) fn check_unique_modes(modes: &[String]) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(Error::UnknownMode {
                mode: format!("{m} (duplicated in basis)"),
            });
        }
    }
    Ok(())
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_rows(rows: &[Vec<f64>], what: &'static str, n: usize) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            what,
            expected: n,
            got: rows.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl From<&LinearQuantumSystem> for SystemDoc {
    fn from(sys: &LinearQuantumSystem) -> Self {
        Self {
            modes: sys.basis.modes().to_vec(),
            labels: sys.basis.labels().to_vec(),
            drift_rad_per_s: to_rows(&sys.drift),
            diffusion_rad_per_s: to_rows(&sys.diffusion),
            noise_inputs: sys.noise_inputs.clone(),
        }
    }
}

impl TryFrom<SystemDoc> for LinearQuantumSystem {
    type Error = Error;

    fn try_from(doc: SystemDoc) -> Result<Self> {
        check_unique_modes(&doc.modes)?;
        let basis = StateBasis::from_modes(&doc.modes);
        if basis.labels() != doc.labels.as_slice() {
            return Err(Error::UnknownLabel {
                label: format!("{:?} (labels inconsistent with modes)", doc.labels),
            });
        }
        let n = basis.dim();
        let drift = from_rows(&doc.drift_rad_per_s, "drift matrix", n)?;
        let diffusion = from_rows(&doc.diffusion_rad_per_s, "diffusion matrix", n)?;
        LinearQuantumSystem::new(basis, drift, diffusion, doc.noise_inputs)
    }
}
