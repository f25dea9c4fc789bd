//! Cluster description, spatial correlation models and conditional loads.
//!
//! Under instantaneous decoding the base station has recovered every
//! earlier node's data before it polls the next one, so the `k`-th polled
//! node only sends its information conditioned on the nodes polled before
//! it. Two correlation models provide that conditional information:
//!
//! * [`CorrelationModel::BitDistance`]: node `i` sends `ceil(d_ij)` bits when
//!   `j` was already polled and `d_ij <= n`, `n` bits otherwise; with several
//!   polled nodes the cheapest one counts.
//! * [`CorrelationModel::GaussianField`]: readings are jointly Gaussian with
//!   `K_ij = sigma2 exp(-a d_ij^2)`. Conditional differential entropy comes
//!   from a Cholesky factor that is extended one node at a time along the
//!   polling order.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// Pivots below this fraction of the variance count as singular.
const PD_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: usize,
    pub position: [f64; 2],
    /// Initial battery `E_k`.
    pub energy: f64,
    /// Path-loss multiplier `d_k`.
    pub path_loss: f64,
}

impl NodeSpec {
    pub fn new(id: usize, x: f64, y: f64, energy: f64, path_loss: f64) -> Self {
        NodeSpec {
            id,
            position: [x, y],
            energy,
            path_loss,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationModel {
    /// At most `n` bits per reading; correlation decays with `ceil(distance)`.
    BitDistance { n: u32 },
    /// Jointly Gaussian field. `offset` (bits) is added to every differential
    /// entropy to account for the quantizer.
    GaussianField { sigma2: f64, a: f64, offset: f64 },
}

impl CorrelationModel {
    pub fn gaussian(sigma2: f64, a: f64) -> Self {
        CorrelationModel::GaussianField {
            sigma2,
            a,
            offset: 0.0,
        }
    }
}

/// A validated, immutable cluster. Slot length is one time unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    nodes: Vec<NodeSpec>,
    correlation: CorrelationModel,
}

/// A polling order together with the bits each polled node transmits.
///
/// `loads[k]` belongs to node `order[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub order: Vec<usize>,
    pub loads: Vec<f64>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn total_bits(&self) -> f64 {
        self.loads.iter().sum()
    }

    /// Loads re-indexed by node id.
    pub fn loads_by_node(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        for (&node, &h) in self.order.iter().zip(&self.loads) {
            out[node] = h;
        }
        out
    }
}

impl ClusterSpec {
    /// Validates the nodes and the correlation model.
    ///
    /// Nodes may be given in any order; they are sorted by id and the ids
    /// must then be exactly `0..N`. A Gaussian field must yield a positive
    /// definite covariance and a strictly positive load for every node even
    /// when conditioned on all other nodes (the smallest load any schedule
    /// can produce).
    pub fn new(mut nodes: Vec<NodeSpec>, correlation: CorrelationModel) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("cluster needs at least one node"));
        }
        nodes.sort_by_key(|n| n.id);
        for (k, node) in nodes.iter().enumerate() {
            if node.id != k {
                return Err(Error::InvalidParameter(
                    "node ids must be 0..N without gaps",
                ));
            }
            if !(node.energy > 0.0) || !node.energy.is_finite() {
                return Err(Error::InvalidParameter("node energy must be > 0"));
            }
            if !(node.path_loss > 0.0) || !node.path_loss.is_finite() {
                return Err(Error::InvalidParameter("node path loss must be > 0"));
            }
            if !node.position.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidParameter("node position must be finite"));
            }
        }
        match correlation {
            CorrelationModel::BitDistance { n } => {
                if n == 0 {
                    return Err(Error::InvalidParameter("bit-distance n must be >= 1"));
                }
            }
            CorrelationModel::GaussianField { sigma2, a, offset } => {
                if !(sigma2 > 0.0) || !sigma2.is_finite() {
                    return Err(Error::InvalidParameter("sigma2 must be > 0"));
                }
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::InvalidParameter("decay a must be >= 0"));
                }
                if !offset.is_finite() {
                    return Err(Error::InvalidParameter("entropy offset must be finite"));
                }
            }
        }
        let cluster = ClusterSpec { nodes, correlation };
        if let CorrelationModel::GaussianField { .. } = correlation {
            cluster.check_gaussian_loads()?;
        }
        Ok(cluster)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn correlation(&self) -> CorrelationModel {
        self.correlation
    }

    pub fn energies(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.energy).collect()
    }

    pub fn path_losses(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.path_loss).collect()
    }

    fn node(&self, id: usize) -> Result<&NodeSpec> {
        self.nodes.get(id).ok_or(Error::UnknownNode(id))
    }

    /// Euclidean distance between two nodes.
    pub fn pairwise_distance(&self, i: usize, j: usize) -> Result<f64> {
        let a = self.node(i)?.position;
        let b = self.node(j)?.position;
        if i == j {
            return Ok(0.0);
        }
        Ok(libm::hypot(a[0] - b[0], a[1] - b[1]))
    }

    fn check_prefix(&self, i: usize, prefix: &[usize]) -> Result<()> {
        self.node(i)?;
        let mut seen = vec![false; self.len()];
        for &j in prefix {
            self.node(j)?;
            if j == i {
                return Err(Error::NodeInPrefix(i));
            }
            if core::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidParameter("duplicate node in prefix"));
            }
        }
        Ok(())
    }

    fn pair_bits(&self, n: u32, i: usize, j: usize) -> u32 {
        let d = self.pairwise_distance(i, j).unwrap_or(f64::INFINITY);
        if d <= n as f64 {
            libm::ceil(d) as u32
        } else {
            n
        }
    }

    /// Bits node `i` sends under the bit-distance model once `prefix` has
    /// been polled.
    pub fn bits_bitdist(&self, i: usize, prefix: &[usize]) -> Result<u32> {
        let CorrelationModel::BitDistance { n } = self.correlation else {
            return Err(Error::WrongModel(
                "bits_bitdist needs the bit-distance model",
            ));
        };
        self.check_prefix(i, prefix)?;
        Ok(prefix
            .iter()
            .map(|&j| self.pair_bits(n, i, j))
            .fold(n, u32::min))
    }

    fn gaussian_params(&self) -> Result<(f64, f64, f64)> {
        match self.correlation {
            CorrelationModel::GaussianField { sigma2, a, offset } => Ok((sigma2, a, offset)),
            _ => Err(Error::WrongModel(
                "operation needs the Gaussian field model",
            )),
        }
    }

    fn cov_entry(&self, sigma2: f64, a: f64, i: usize, j: usize) -> f64 {
        if i == j {
            return sigma2;
        }
        let d = self.pairwise_distance(i, j).unwrap_or(f64::INFINITY);
        sigma2 * libm::exp(-a * d * d)
    }

    /// Covariance matrix of the readings of `nodes`, in the given order.
    pub fn covariance(&self, nodes: &[usize]) -> Result<Vec<Vec<f64>>> {
        let (sigma2, a, _) = self.gaussian_params()?;
        for &i in nodes {
            self.node(i)?;
        }
        let k: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&i| {
                nodes
                    .iter()
                    .map(|&j| self.cov_entry(sigma2, a, i, j))
                    .collect()
            })
            .collect();
        let mut chol = Cholesky::new(self, sigma2, a);
        for &i in nodes {
            chol.push(i)?;
        }
        Ok(k)
    }

    /// Bits node `i` sends under the Gaussian model once `prefix` has been
    /// polled: `1/2 log2(2 pi e det K[prefix + i] / det K[prefix]) + offset`.
    pub fn bits_gaussian(&self, i: usize, prefix: &[usize]) -> Result<f64> {
        let (sigma2, a, offset) = self.gaussian_params()?;
        self.check_prefix(i, prefix)?;
        let mut chol = Cholesky::new(self, sigma2, a);
        for &j in prefix {
            chol.push(j)?;
        }
        let var = chol.push(i)?;
        positive_load(i, entropy_bits(var) + offset)
    }

    /// Bits node `i` sends once `prefix` has been polled, whatever the model.
    pub fn conditional_bits(&self, i: usize, prefix: &[usize]) -> Result<f64> {
        match self.correlation {
            CorrelationModel::BitDistance { .. } => Ok(self.bits_bitdist(i, prefix)? as f64),
            CorrelationModel::GaussianField { .. } => self.bits_gaussian(i, prefix),
        }
    }

    /// Conditional loads along `order`.
    pub fn schedule(&self, order: &[usize]) -> Result<Schedule> {
        check_permutation(order, self.len())?;
        let loads = match self.correlation {
            CorrelationModel::BitDistance { n } => {
                // best[i] = bits node i would send given everything polled so far
                let mut best = vec![n; self.len()];
                let mut loads = Vec::with_capacity(order.len());
                for &i in order {
                    loads.push(best[i] as f64);
                    for (j, b) in best.iter_mut().enumerate() {
                        if j != i {
                            *b = (*b).min(self.pair_bits(n, j, i));
                        }
                    }
                }
                loads
            }
            CorrelationModel::GaussianField { sigma2, a, offset } => {
                let mut chol = Cholesky::new(self, sigma2, a);
                let mut loads = Vec::with_capacity(order.len());
                for &i in order {
                    let var = chol.push(i)?;
                    loads.push(positive_load(i, entropy_bits(var) + offset)?);
                }
                loads
            }
        };
        Ok(Schedule {
            order: order.to_vec(),
            loads,
        })
    }

    fn check_gaussian_loads(&self) -> Result<()> {
        let (sigma2, a, offset) = self.gaussian_params()?;
        let n = self.len();
        let mut chol = Cholesky::new(self, sigma2, a);
        for i in 0..n {
            chol.push(i)?;
        }
        // conditional variance of i given all others is 1 / (K^-1)_ii
        for i in 0..n {
            let mut unit = vec![0.0; n];
            unit[i] = 1.0;
            let col = chol.solve(&unit);
            let var = 1.0 / col[i];
            positive_load(i, entropy_bits(var) + offset)?;
        }
        Ok(())
    }
}

fn positive_load(node: usize, bits: f64) -> Result<f64> {
    if bits > 0.0 && bits.is_finite() {
        Ok(bits)
    } else {
        Err(Error::NonPositiveLoad { node, bits })
    }
}

/// Differential entropy in bits of a scalar Gaussian with variance `var`.
fn entropy_bits(var: f64) -> f64 {
    0.5 * libm::log2(2.0 * PI * E * var)
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::NotAPermutation);
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || core::mem::replace(&mut seen[i], true) {
            return Err(Error::NotAPermutation);
        }
    }
    Ok(())
}

/// Lower-triangular factor of a covariance, grown one node at a time.
struct Cholesky<'a> {
    cluster: &'a ClusterSpec,
    sigma2: f64,
    a: f64,
    nodes: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl<'a> Cholesky<'a> {
    fn new(cluster: &'a ClusterSpec, sigma2: f64, a: f64) -> Self {
        Cholesky {
            cluster,
            sigma2,
            a,
            nodes: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Appends node `i` and returns its variance conditioned on the nodes
    /// already in the factor, i.e. the squared new diagonal entry.
    fn push(&mut self, i: usize) -> Result<f64> {
        let m = self.nodes.len();
        let mut row = Vec::with_capacity(m + 1);
        for (r, &j) in self.nodes.iter().enumerate() {
            let kij = self.cluster.cov_entry(self.sigma2, self.a, i, j);
            let dot: f64 = row.iter().zip(&self.rows[r]).map(|(x, y)| x * y).sum();
            row.push((kij - dot) / self.rows[r][r]);
        }
        let var = self.sigma2 - row.iter().map(|x| x * x).sum::<f64>();
        if !(var > PD_REL_TOL * self.sigma2) {
            return Err(Error::DegenerateCorrelation);
        }
        row.push(libm::sqrt(var));
        self.nodes.push(i);
        self.rows.push(row);
        Ok(var)
    }

    /// Solves `L L^T x = b` in the factor's node order.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.rows.len();
        let mut y = b.to_vec();
        for r in 0..n {
            let dot: f64 = (0..r).map(|c| self.rows[r][c] * y[c]).sum();
            y[r] = (y[r] - dot) / self.rows[r][r];
        }
        for r in (0..n).rev() {
            let dot: f64 = (r + 1..n).map(|c| self.rows[c][r] * y[c]).sum();
            y[r] = (y[r] - dot) / self.rows[r][r];
        }
        y
    }
}
