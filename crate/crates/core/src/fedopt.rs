//! The three federated algorithms as deterministic in-process simulations.
//!
//! Each round the server samples `k` of the `n` clients, computes the full
//! global Riemannian gradient at the current iterate, lets every sampled
//! client run `tau` local steps from that iterate, and aggregates the
//! returned points. The variance-reduced scheme corrects each local
//! gradient with the transported difference between the client's and the
//! global gradient at the round anchor.
//!
//! Clients inside a round run on concurrent workers; every random draw
//! comes from a stream keyed by (seed, round, client), so parallel and
//! serial execution produce bitwise-identical trajectories.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consensus::{self, ConsensusConfig, ConsensusMethod};
use crate::error::{Error, Result};
use crate::manifold::{exp_map, log_map, transport, ManifoldPoint, TangentVector};
use crate::metrics;
use crate::objectives::{GlobalObjective, QuadraticObjective};
use crate::rng::{derive_rng, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RFedSvrg,
    RFedAvg,
    RFedProx,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::RFedSvrg => write!(f, "rfedsvrg"),
            Algorithm::RFedAvg => write!(f, "rfedavg"),
            Algorithm::RFedProx => write!(f, "rfedprox"),
        }
    }
}

/// Which iterate a client (or the server) reports: the last one, or one
/// sampled uniformly from the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterateChoice {
    Last,
    UniformSample,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    /// Total number of clients n.
    pub num_clients: usize,
    /// Clients sampled per round, 1 <= k <= n.
    pub clients_per_round: usize,
    /// Outer communication rounds T.
    pub rounds: usize,
    /// Local steps per sampled client.
    pub local_steps: usize,
    /// Local step size.
    pub step_size: f64,
    /// Which server iterate becomes the returned point.
    pub server_option: IterateChoice,
    /// Which local iterate a client reports (variance-reduced scheme only;
    /// the baselines always report the last iterate).
    pub client_option: IterateChoice,
    /// Proximal weight mu (used by the proximal baseline only).
    pub prox_weight: f64,
    pub consensus: ConsensusConfig,
    pub seed: u64,
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, n: usize, k: usize, rounds: usize) -> Self {
        AlgorithmConfig {
            algorithm,
            num_clients: n,
            clients_per_round: k,
            rounds,
            local_steps: 1,
            step_size: 0.1,
            server_option: IterateChoice::Last,
            client_option: IterateChoice::Last,
            prox_weight: 0.0,
            consensus: ConsensusConfig::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_clients == 0 {
            return Err(Error::InvalidConfig("need at least one client".into()));
        }
        if self.clients_per_round == 0 || self.clients_per_round > self.num_clients {
            return Err(Error::InvalidConfig(format!(
                "clients_per_round must satisfy 1 <= k <= n, got k={} n={}",
                self.clients_per_round, self.num_clients
            )));
        }
        if self.local_steps == 0 {
            return Err(Error::InvalidConfig("local_steps must be at least 1".into()));
        }
        if !(self.step_size > 0.0) {
            return Err(Error::InvalidConfig("step_size must be positive".into()));
        }
        if self.prox_weight < 0.0 {
            return Err(Error::InvalidConfig("prox_weight must be nonnegative".into()));
        }
        self.consensus.validate()
    }
}

/// One client's transient view during a round.
#[derive(Debug, Clone)]
pub struct ClientState<'a> {
    pub id: usize,
    pub objective: &'a QuadraticObjective,
    pub iterates: Vec<ManifoldPoint>,
}

/// Per-round metrics, measured at the round's starting iterate.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub round: usize,
    pub grad_norm: f64,
    pub loss: f64,
    pub principal_angle_sum: Option<f64>,
    pub sampled_clients: Vec<usize>,
    pub elapsed_seconds: f64,
}

/// Uniformly samples a k-subset of {0, ..., n-1}, returned in index order.
pub fn sample_clients(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!(
            "cannot sample {} clients out of {}",
            k, n
        )));
    }
    // partial Fisher-Yates over a scratch index array
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut chosen = indices[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// One variance-reduced local step from `x_prev` with round anchor
/// `anchor`: the local gradient minus the transported difference between
/// the client's and the global gradient at the anchor.
pub fn svrg_local_step(
    x_prev: &ManifoldPoint,
    anchor: &ManifoldPoint,
    client: &QuadraticObjective,
    global_grad_at_anchor: &TangentVector,
    step_size: f64,
) -> Result<ManifoldPoint> {
    if global_grad_at_anchor.base() != anchor {
        return Err(Error::BaseMismatch);
    }
    let grad_local = client.riemannian_grad(x_prev)?;
    let grad_at_anchor = client.riemannian_grad(anchor)?;
    let correction = grad_at_anchor.sub(global_grad_at_anchor)?;
    let moved = transport(anchor, x_prev, &correction)?;
    let direction = grad_local.sub(&moved)?.scale(-step_size);
    exp_map(x_prev, &direction)
}

fn local_trajectory(
    cfg: &AlgorithmConfig,
    client: &QuadraticObjective,
    anchor: &ManifoldPoint,
    global_grad: &TangentVector,
) -> Result<Vec<ManifoldPoint>> {
    let mut x = anchor.clone();
    let mut iterates = Vec::with_capacity(cfg.local_steps);
    for _ in 0..cfg.local_steps {
        x = match cfg.algorithm {
            Algorithm::RFedSvrg => {
                svrg_local_step(&x, anchor, client, global_grad, cfg.step_size)?
            }
            Algorithm::RFedAvg => {
                let g = client.riemannian_grad(&x)?;
                exp_map(&x, &g.scale(-cfg.step_size))?
            }
            Algorithm::RFedProx => {
                // grad of h_i(x) = f_i(x) + mu/2 d^2(x, anchor)
                let g = client.riemannian_grad(&x)?;
                let pull = log_map(&x, anchor)?;
                let grad_h = g.sub(&pull.scale(cfg.prox_weight))?;
                exp_map(&x, &grad_h.scale(-cfg.step_size))?
            }
        };
        iterates.push(x.clone());
    }
    Ok(iterates)
}

fn client_report(
    cfg: &AlgorithmConfig,
    round: usize,
    client_id: usize,
    mut iterates: Vec<ManifoldPoint>,
) -> ManifoldPoint {
    let pick_last = cfg.algorithm != Algorithm::RFedSvrg
        || cfg.client_option == IterateChoice::Last;
    if pick_last {
        iterates.pop().expect("at least one local step")
    } else {
        let mut rng = derive_rng(
            cfg.seed,
            &[stream::CLIENT_OPTION, round as u64, client_id as u64],
        );
        let pick = rng.gen_range(0..iterates.len());
        iterates.swap_remove(pick)
    }
}

/// Output of a federated run: the reported point plus per-round history.
/// The history holds one record per executed round, measured at the
/// iterate the round started from; metrics of the final point are left to
/// the caller (it owns the point).
pub type RunOutput = (ManifoldPoint, Vec<RoundRecord>);

/// Runs the configured algorithm. `reference` is an optional ground-truth
/// subspace; when present each record carries the principal-angle sum.
pub fn run(
    cfg: &AlgorithmConfig,
    global: &GlobalObjective,
    x0: &ManifoldPoint,
    reference: Option<&ManifoldPoint>,
) -> Result<RunOutput> {
    cfg.validate()?;
    if cfg.num_clients != global.num_clients() {
        return Err(Error::InvalidConfig(format!(
            "config says n={} but the objective has {} clients",
            cfg.num_clients,
            global.num_clients()
        )));
    }
    if x0.kind().d() != global.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("initial point with ambient dimension {}", global.dim()),
            found: format!("{}", x0.kind()),
        });
    }

    let mut x = x0.clone();
    let mut server_iterates: Vec<ManifoldPoint> = Vec::with_capacity(cfg.rounds);
    let mut history = Vec::with_capacity(cfg.rounds);

    for round in 0..cfg.rounds {
        let started = Instant::now();
        let global_grad = global.riemannian_grad(&x)?;
        let loss = global.value(&x)?;
        let angle = match reference {
            Some(truth) => Some(metrics::principal_angle_sum(&x, truth)?),
            None => None,
        };

        let mut sampler = derive_rng(cfg.seed, &[stream::CLIENT_SAMPLING, round as u64]);
        let sampled =
            sample_clients(cfg.num_clients, cfg.clients_per_round, &mut sampler)?;

        let reports: Vec<ManifoldPoint> = sampled
            .par_iter()
            .map(|&i| {
                let iterates = local_trajectory(cfg, global.client(i), &x, &global_grad)?;
                Ok(client_report(cfg, round, i, iterates))
            })
            .collect::<Result<Vec<_>>>()?;

        x = match cfg.consensus.method {
            ConsensusMethod::TangentSpace => {
                consensus::tangent_space_mean(&x, &reports, cfg.consensus.beta)?
            }
            ConsensusMethod::Karcher => {
                consensus::karcher_mean(&reports, &x, &cfg.consensus)?.point
            }
        };
        server_iterates.push(x.clone());

        history.push(RoundRecord {
            round,
            grad_norm: global_grad.norm(),
            loss,
            principal_angle_sum: angle,
            sampled_clients: sampled,
            elapsed_seconds: started.elapsed().as_secs_f64(),
        });
    }

    let final_point = match cfg.server_option {
        IterateChoice::Last => x,
        IterateChoice::UniformSample => {
            if server_iterates.is_empty() {
                x
            } else {
                let mut rng = derive_rng(cfg.seed, &[stream::SERVER_OPTION]);
                let pick = rng.gen_range(0..server_iterates.len());
                server_iterates.swap_remove(pick)
            }
        }
    };
    Ok((final_point, history))
}

/// Variance-reduced federated run (the tangent-space consensus scheme).
pub fn run_rfedsvrg(
    cfg: &AlgorithmConfig,
    global: &GlobalObjective,
    x0: &ManifoldPoint,
    reference: Option<&ManifoldPoint>,
) -> Result<RunOutput> {
    let cfg = AlgorithmConfig {
        algorithm: Algorithm::RFedSvrg,
        ..cfg.clone()
    };
    run(&cfg, global, x0, reference)
}

/// Plain local gradient descent baseline.
pub fn run_rfedavg(
    cfg: &AlgorithmConfig,
    global: &GlobalObjective,
    x0: &ManifoldPoint,
    reference: Option<&ManifoldPoint>,
) -> Result<RunOutput> {
    let cfg = AlgorithmConfig {
        algorithm: Algorithm::RFedAvg,
        ..cfg.clone()
    };
    run(&cfg, global, x0, reference)
}

/// Proximal local subproblem baseline.
pub fn run_rfedprox(
    cfg: &AlgorithmConfig,
    global: &GlobalObjective,
    x0: &ManifoldPoint,
    reference: Option<&ManifoldPoint>,
) -> Result<RunOutput> {
    let cfg = AlgorithmConfig {
        algorithm: Algorithm::RFedProx,
        ..cfg.clone()
    };
    run(&cfg, global, x0, reference)
}
