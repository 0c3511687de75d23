//! Experiment configuration: typed view of the flat key/value format.
//!
//! A config has three sections: `problem.*` (what to optimize), `optimizer.*`
//! (which rule and its constants), and `run.*` (iterations, repeats, seeds,
//! output). Loading fills documented defaults and rejects unknown keys;
//! serialization writes every effective field so load → serialize → load is
//! the identity.

use super::kv::{KvDoc, KvReader};
use crate::bilevel::{BilevelConfig, BilevelMethod, LowerPolicy, ResetOption};
use crate::hypergrad::HypergradMethod;
use crate::problems::{
    bilevel_quadratic, build_quadratic_pair, linear_hyperrep, logistic_problem,
    parse_sparse_text, BilevelProblem, HyperrepDims, SingleLevelProblem,
};
use crate::step_policies::{
    default_floor, Decay, EnvelopeSchedule, PolicyKind, PolicyState, SampleMode,
};
use crate::{Error, Result};
use std::path::{Path, PathBuf};

/// Problem descriptor — also the serializable reproducibility record
/// (seed + dimensions + constants) for synthetic problems.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    QuadraticPair {
        seed: u64,
        dim: usize,
    },
    Logistic {
        data: PathBuf,
    },
    BilevelQuadratic {
        seed: u64,
        dx: usize,
        dy: usize,
        noise: f64,
    },
    LinearHyperrep {
        seed: u64,
        features: usize,
        embed: usize,
        targets: usize,
        lambda: f64,
    },
}

/// An instantiated problem of either arity.
pub enum ProblemInstance {
    Single(Box<dyn SingleLevelProblem>),
    Bilevel(Box<dyn BilevelProblem>),
}

impl ProblemSpec {
    pub fn is_bilevel(&self) -> bool {
        matches!(
            self,
            ProblemSpec::BilevelQuadratic { .. } | ProblemSpec::LinearHyperrep { .. }
        )
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        Ok(match self {
            ProblemSpec::QuadraticPair { seed, dim } => {
                if *dim < 2 {
                    return Err(Error::config("problem.dim must be at least 2"));
                }
                ProblemInstance::Single(Box::new(build_quadratic_pair(*seed, *dim)?))
            }
            ProblemSpec::Logistic { data } => {
                let text = std::fs::read_to_string(data).map_err(|e| {
                    Error::config(format!("cannot read dataset '{}': {e}", data.display()))
                })?;
                ProblemInstance::Single(Box::new(logistic_problem(parse_sparse_text(&text)?)))
            }
            ProblemSpec::BilevelQuadratic {
                seed,
                dx,
                dy,
                noise,
            } => {
                if *dx < 1 || *dy < 1 {
                    return Err(Error::config("problem.dx and problem.dy must be positive"));
                }
                if *noise < 0.0 {
                    return Err(Error::config("problem.noise must be non-negative"));
                }
                ProblemInstance::Bilevel(Box::new(bilevel_quadratic(*seed, *dx, *dy, *noise)?))
            }
            ProblemSpec::LinearHyperrep {
                seed,
                features,
                embed,
                targets,
                lambda,
            } => {
                if *lambda <= 0.0 {
                    return Err(Error::config("problem.lambda must be positive"));
                }
                ProblemInstance::Bilevel(Box::new(linear_hyperrep(
                    *seed,
                    HyperrepDims {
                        features: *features,
                        embed: *embed,
                        targets: *targets,
                    },
                    *lambda,
                )))
            }
        })
    }

    fn read(reader: &mut KvReader) -> Result<ProblemSpec> {
        let kind = reader.require_str("problem.kind")?;
        Ok(match kind {
            "quadratic_pair" => ProblemSpec::QuadraticPair {
                seed: reader.u64_or("problem.seed", 0)?,
                dim: reader.usize_or("problem.dim", 2)?,
            },
            "logistic" => ProblemSpec::Logistic {
                data: PathBuf::from(reader.require_str("problem.data")?),
            },
            "bilevel_quadratic" => ProblemSpec::BilevelQuadratic {
                seed: reader.u64_or("problem.seed", 0)?,
                dx: reader.usize_or("problem.dx", 2)?,
                dy: reader.usize_or("problem.dy", 2)?,
                noise: reader.f64_or("problem.noise", 0.0)?,
            },
            "linear_hyperrep" => ProblemSpec::LinearHyperrep {
                seed: reader.u64_or("problem.seed", 0)?,
                features: reader.usize_or("problem.features", 5)?,
                embed: reader.usize_or("problem.embed", 3)?,
                targets: reader.usize_or("problem.targets", 2)?,
                lambda: reader.f64_or("problem.lambda", 0.5)?,
            },
            other => {
                return Err(Error::config(format!(
                    "key 'problem.kind': unknown problem kind '{other}'"
                )))
            }
        })
    }

    fn write(&self, doc: &mut KvDoc) {
        match self {
            ProblemSpec::QuadraticPair { seed, dim } => {
                doc.set("problem.kind", "quadratic_pair");
                doc.set("problem.seed", seed.to_string());
                doc.set("problem.dim", dim.to_string());
            }
            ProblemSpec::Logistic { data } => {
                doc.set("problem.kind", "logistic");
                doc.set("problem.data", data.display().to_string());
            }
            ProblemSpec::BilevelQuadratic {
                seed,
                dx,
                dy,
                noise,
            } => {
                doc.set("problem.kind", "bilevel_quadratic");
                doc.set("problem.seed", seed.to_string());
                doc.set("problem.dx", dx.to_string());
                doc.set("problem.dy", dy.to_string());
                doc.set("problem.noise", fmt_real(*noise));
            }
            ProblemSpec::LinearHyperrep {
                seed,
                features,
                embed,
                targets,
                lambda,
            } => {
                doc.set("problem.kind", "linear_hyperrep");
                doc.set("problem.seed", seed.to_string());
                doc.set("problem.features", features.to_string());
                doc.set("problem.embed", embed.to_string());
                doc.set("problem.targets", targets.to_string());
                doc.set("problem.lambda", fmt_real(*lambda));
            }
        }
    }

    /// Serialize this descriptor alone (the reproducibility record written
    /// next to traces on request).
    pub fn to_text(&self) -> String {
        let mut doc = KvDoc::new();
        self.write(&mut doc);
        doc.serialize()
    }

    pub fn from_text(text: &str) -> Result<ProblemSpec> {
        let doc = KvDoc::parse(text)?;
        let mut reader = KvReader::new(&doc);
        let spec = ProblemSpec::read(&mut reader)?;
        reader.finish()?;
        Ok(spec)
    }
}

/// Shortest exact decimal for config round-tripping.
fn fmt_real(x: f64) -> String {
    let short = format!("{x}");
    if short.parse::<f64>() == Ok(x) {
        short
    } else {
        format!("{x:.17e}")
    }
}

fn parse_decay(raw: &str, key: &str) -> Result<Decay> {
    Ok(match raw {
        "constant" => Decay::Constant,
        "inv_sqrt" => Decay::InvSqrt,
        "inv" => Decay::Inv,
        other => {
            return Err(Error::config(format!(
                "key '{key}': unknown decay '{other}' (constant | inv_sqrt | inv)"
            )))
        }
    })
}

fn decay_name(d: Decay) -> &'static str {
    match d {
        Decay::Constant => "constant",
        Decay::InvSqrt => "inv_sqrt",
        Decay::Inv => "inv",
    }
}

fn parse_sample_mode(raw: &str) -> Result<SampleMode> {
    Ok(match raw {
        "same" => SampleMode::SameSample,
        "two" => SampleMode::TwoSample,
        other => {
            return Err(Error::config(format!(
                "key 'optimizer.sample_mode': unknown mode '{other}' (same | two)"
            )))
        }
    })
}

fn sample_mode_name(m: SampleMode) -> &'static str {
    match m {
        SampleMode::SameSample => "same",
        SampleMode::TwoSample => "two",
    }
}

/// Single-level optimizer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleSpec {
    pub kind: PolicyKind,
    pub gamma_b0: f64,
    pub decay: Decay,
    /// Explicit envelope floor; when absent the curvature default is used.
    pub omega: Option<f64>,
    pub coeff: f64,
    pub backtrack: f64,
    pub sample_mode: SampleMode,
}

impl SingleSpec {
    /// Build the mutable policy state, deriving the floor from the
    /// problem's smoothness constant when no explicit floor was given.
    pub fn build_policy(&self, smoothness: Option<f64>) -> Result<PolicyState> {
        let floor = self
            .omega
            .unwrap_or_else(|| default_floor(self.kind, self.coeff, self.gamma_b0, smoothness));
        let schedule = EnvelopeSchedule::new(self.gamma_b0, self.decay, floor, self.coeff)?;
        Ok(PolicyState::new(self.kind, schedule)
            .with_backtrack(self.backtrack)?
            .with_sample_mode(self.sample_mode))
    }
}

/// Bi-level optimizer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct BilevelSpec {
    pub method: BilevelMethod,
    pub lower_policy: LowerPolicy,
    pub inner_steps: u64,
    pub alpha_b0: f64,
    pub alpha_l0: f64,
    pub alpha_decay: Decay,
    pub beta_b0: f64,
    pub beta_decay: Decay,
    pub sufficient_decrease: f64,
    pub slack: f64,
    pub backtrack: f64,
    pub reset: ResetOption,
    pub yhat_steps: u64,
    pub hypergrad: HypergradKind,
    pub sample_mode: SampleMode,
}

/// Hypergradient route as configured (iteration caps resolved at build).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HypergradKind {
    Cg { tol: f64, max_iter: Option<usize> },
    Neumann { n: usize },
    Identity,
}

impl BilevelSpec {
    pub fn build_config(&self, problem: &dyn BilevelProblem) -> Result<BilevelConfig> {
        let p = self.sufficient_decrease;
        let l_lower = problem.lower_smoothness();
        let lower_floor = if p < 1.0 && l_lower > 0.0 {
            2.0 * (1.0 - p) / l_lower
        } else {
            self.beta_b0
        };
        let upper = EnvelopeSchedule::new(self.alpha_b0, self.alpha_decay, self.alpha_l0, p)?;
        let lower = EnvelopeSchedule::new(
            self.beta_b0,
            self.beta_decay,
            lower_floor.min(self.beta_b0),
            p,
        )?;
        let hypergrad = match self.hypergrad {
            HypergradKind::Cg { tol, max_iter } => HypergradMethod::ConjugateGradient {
                tol,
                max_iter: max_iter.unwrap_or_else(|| problem.dim_y()),
            },
            HypergradKind::Neumann { n } => HypergradMethod::Neumann { n },
            HypergradKind::Identity => HypergradMethod::Identity,
        };
        let config = BilevelConfig {
            method: self.method,
            lower_policy: self.lower_policy,
            inner_steps: self.inner_steps,
            upper,
            lower,
            sufficient_decrease: p,
            slack: self.slack,
            backtrack: self.backtrack,
            reset: self.reset,
            yhat_steps: self.yhat_steps,
            hypergrad,
            sample_mode: self.sample_mode,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerSpec {
    Single(SingleSpec),
    Bilevel(BilevelSpec),
}

fn policy_kind_name(kind: PolicyKind) -> &'static str {
    match kind {
        PolicyKind::SpsMax => "sps_max",
        PolicyKind::DecSps => "dec_sps",
        PolicyKind::Spsb => "spsb",
        PolicyKind::Sls => "sls",
        PolicyKind::Slsb => "slsb",
        PolicyKind::DecayingSgd => "sgd_decay",
        PolicyKind::Constant => "sgd_const",
    }
}

fn bilevel_method_name(method: BilevelMethod) -> &'static str {
    match method {
        BilevelMethod::BiSps => "bisps",
        BilevelMethod::BiSlsSgd => "bisls_sgd",
        BilevelMethod::BiSlsAdam => "bisls_adam",
        BilevelMethod::ConstantSgd => "bi_sgd_const",
        BilevelMethod::ConstantAdam => "bi_adam_const",
        BilevelMethod::DecayingSgd => "bi_sgd_decay",
    }
}

fn lower_policy_name(policy: LowerPolicy) -> &'static str {
    match policy {
        LowerPolicy::Sps => "sps",
        LowerPolicy::LineSearch => "line_search",
        LowerPolicy::Constant => "constant",
        LowerPolicy::Decaying => "decaying",
    }
}

impl OptimizerSpec {
    pub fn is_bilevel(&self) -> bool {
        matches!(self, OptimizerSpec::Bilevel(_))
    }

    fn read(reader: &mut KvReader) -> Result<OptimizerSpec> {
        let kind = reader.require_str("optimizer.kind")?;
        let single_kind = match kind {
            "sps_max" => Some(PolicyKind::SpsMax),
            "dec_sps" => Some(PolicyKind::DecSps),
            "spsb" => Some(PolicyKind::Spsb),
            "sls" => Some(PolicyKind::Sls),
            "slsb" => Some(PolicyKind::Slsb),
            "sgd_decay" => Some(PolicyKind::DecayingSgd),
            "sgd_const" => Some(PolicyKind::Constant),
            _ => None,
        };
        if let Some(kind) = single_kind {
            let default_decay = match kind {
                PolicyKind::Spsb | PolicyKind::Slsb | PolicyKind::DecayingSgd => Decay::InvSqrt,
                _ => Decay::Constant,
            };
            let default_coeff = if kind.needs_line_search() { 0.5 } else { 1.0 };
            let decay = match reader.opt_str("optimizer.decay") {
                Some(raw) => parse_decay(raw, "optimizer.decay")?,
                None => default_decay,
            };
            let sample_mode = match reader.opt_str("optimizer.sample_mode") {
                Some(raw) => parse_sample_mode(raw)?,
                None => SampleMode::SameSample,
            };
            return Ok(OptimizerSpec::Single(SingleSpec {
                kind,
                gamma_b0: reader.f64_or("optimizer.gamma_b0", 1.0)?,
                decay,
                omega: reader.opt_f64("optimizer.omega")?,
                coeff: reader.f64_or("optimizer.c", default_coeff)?,
                backtrack: reader.f64_or("optimizer.backtrack", 0.5)?,
                sample_mode,
            }));
        }

        let method = match kind {
            "bisps" => BilevelMethod::BiSps,
            "bisls_sgd" => BilevelMethod::BiSlsSgd,
            "bisls_adam" => BilevelMethod::BiSlsAdam,
            "bi_sgd_const" => BilevelMethod::ConstantSgd,
            "bi_adam_const" => BilevelMethod::ConstantAdam,
            "bi_sgd_decay" => BilevelMethod::DecayingSgd,
            other => {
                return Err(Error::config(format!(
                    "key 'optimizer.kind': unknown optimizer '{other}'"
                )))
            }
        };
        let default_lower = match method {
            BilevelMethod::BiSps => LowerPolicy::Sps,
            BilevelMethod::BiSlsSgd | BilevelMethod::BiSlsAdam => LowerPolicy::LineSearch,
            BilevelMethod::ConstantSgd | BilevelMethod::ConstantAdam => LowerPolicy::Constant,
            BilevelMethod::DecayingSgd => LowerPolicy::Decaying,
        };
        let lower_policy = match reader.opt_str("optimizer.lower") {
            Some("sps") => LowerPolicy::Sps,
            Some("line_search") => LowerPolicy::LineSearch,
            Some("constant") => LowerPolicy::Constant,
            Some("decaying") => LowerPolicy::Decaying,
            Some(other) => {
                return Err(Error::config(format!(
                    "key 'optimizer.lower': unknown lower policy '{other}'"
                )))
            }
            None => default_lower,
        };
        let alpha_b0 = reader.f64_or("optimizer.alpha_b0", 1.0)?;
        let default_beta_decay = match method {
            BilevelMethod::BiSps => Decay::Inv,
            _ => Decay::Constant,
        };
        let beta_decay = match reader.opt_str("optimizer.beta_decay") {
            Some(raw) => parse_decay(raw, "optimizer.beta_decay")?,
            None => default_beta_decay,
        };
        let alpha_decay = match reader.opt_str("optimizer.alpha_decay") {
            Some(raw) => parse_decay(raw, "optimizer.alpha_decay")?,
            None => Decay::InvSqrt,
        };
        let reset = match reader.opt_str("optimizer.reset") {
            Some("from_initial") => ResetOption::FromInitial,
            Some("from_previous") => ResetOption::FromPrevious,
            Some("grow") | None => ResetOption::GrowPrevious {
                eta: reader.f64_or("optimizer.eta", 2.0)?,
            },
            Some(other) => {
                return Err(Error::config(format!(
                    "key 'optimizer.reset': unknown reset '{other}' (from_initial | from_previous | grow)"
                )))
            }
        };
        let hypergrad = match reader.opt_str("optimizer.hypergrad") {
            Some("cg") | None => HypergradKind::Cg {
                tol: reader.f64_or("optimizer.cg_tol", 1e-10)?,
                max_iter: reader.opt_u64("optimizer.cg_max_iter")?.map(|v| v as usize),
            },
            Some("neumann") => HypergradKind::Neumann {
                n: reader.usize_or("optimizer.neumann_n", 10)?,
            },
            Some("identity") => HypergradKind::Identity,
            Some(other) => {
                return Err(Error::config(format!(
                    "key 'optimizer.hypergrad': unknown method '{other}' (cg | neumann | identity)"
                )))
            }
        };
        let sample_mode = match reader.opt_str("optimizer.sample_mode") {
            Some(raw) => parse_sample_mode(raw)?,
            None => SampleMode::SameSample,
        };
        Ok(OptimizerSpec::Bilevel(BilevelSpec {
            method,
            lower_policy,
            inner_steps: reader.u64_or("optimizer.t", 1)?,
            alpha_b0,
            alpha_l0: reader.f64_or("optimizer.alpha_l0", 1e-6 * alpha_b0)?,
            alpha_decay,
            beta_b0: reader.f64_or("optimizer.beta_b0", 1.0)?,
            beta_decay,
            sufficient_decrease: reader.f64_or("optimizer.p", 0.5)?,
            slack: reader.f64_or("optimizer.delta", 0.0)?,
            backtrack: reader.f64_or("optimizer.backtrack", 0.5)?,
            reset,
            yhat_steps: reader.u64_or("optimizer.yhat_steps", 1)?,
            hypergrad,
            sample_mode,
        }))
    }

    fn write(&self, doc: &mut KvDoc) {
        match self {
            OptimizerSpec::Single(s) => {
                doc.set("optimizer.kind", policy_kind_name(s.kind));
                doc.set("optimizer.gamma_b0", fmt_real(s.gamma_b0));
                doc.set("optimizer.decay", decay_name(s.decay));
                if let Some(omega) = s.omega {
                    doc.set("optimizer.omega", fmt_real(omega));
                }
                doc.set("optimizer.c", fmt_real(s.coeff));
                doc.set("optimizer.backtrack", fmt_real(s.backtrack));
                doc.set("optimizer.sample_mode", sample_mode_name(s.sample_mode));
            }
            OptimizerSpec::Bilevel(b) => {
                doc.set("optimizer.kind", bilevel_method_name(b.method));
                doc.set("optimizer.lower", lower_policy_name(b.lower_policy));
                doc.set("optimizer.t", b.inner_steps.to_string());
                doc.set("optimizer.alpha_b0", fmt_real(b.alpha_b0));
                doc.set("optimizer.alpha_l0", fmt_real(b.alpha_l0));
                doc.set("optimizer.alpha_decay", decay_name(b.alpha_decay));
                doc.set("optimizer.beta_b0", fmt_real(b.beta_b0));
                doc.set("optimizer.beta_decay", decay_name(b.beta_decay));
                doc.set("optimizer.p", fmt_real(b.sufficient_decrease));
                doc.set("optimizer.delta", fmt_real(b.slack));
                doc.set("optimizer.backtrack", fmt_real(b.backtrack));
                match b.reset {
                    ResetOption::FromInitial => doc.set("optimizer.reset", "from_initial"),
                    ResetOption::FromPrevious => doc.set("optimizer.reset", "from_previous"),
                    ResetOption::GrowPrevious { eta } => {
                        doc.set("optimizer.reset", "grow");
                        doc.set("optimizer.eta", fmt_real(eta));
                    }
                }
                doc.set("optimizer.yhat_steps", b.yhat_steps.to_string());
                match b.hypergrad {
                    HypergradKind::Cg { tol, max_iter } => {
                        doc.set("optimizer.hypergrad", "cg");
                        doc.set("optimizer.cg_tol", fmt_real(tol));
                        if let Some(cap) = max_iter {
                            doc.set("optimizer.cg_max_iter", cap.to_string());
                        }
                    }
                    HypergradKind::Neumann { n } => {
                        doc.set("optimizer.hypergrad", "neumann");
                        doc.set("optimizer.neumann_n", n.to_string());
                    }
                    HypergradKind::Identity => doc.set("optimizer.hypergrad", "identity"),
                }
                doc.set("optimizer.sample_mode", sample_mode_name(b.sample_mode));
            }
        }
    }
}

/// Iterate initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Zeros,
    Gauss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub iters: u64,
    pub repeats: u64,
    pub seed_base: u64,
    pub out: PathBuf,
    pub init: InitKind,
}

impl RunSpec {
    fn read(reader: &mut KvReader) -> Result<RunSpec> {
        let init = match reader.opt_str("run.init") {
            Some("zeros") | None => InitKind::Zeros,
            Some("gauss") => InitKind::Gauss,
            Some(other) => {
                return Err(Error::config(format!(
                    "key 'run.init': unknown initialization '{other}' (zeros | gauss)"
                )))
            }
        };
        Ok(RunSpec {
            iters: reader.u64_or("run.iters", 100)?,
            repeats: reader.u64_or("run.repeats", 1)?,
            seed_base: reader.u64_or("run.seed_base", 0)?,
            out: PathBuf::from(reader.opt_str("run.out").unwrap_or("out")),
            init,
        })
    }

    fn write(&self, doc: &mut KvDoc) {
        doc.set("run.iters", self.iters.to_string());
        doc.set("run.repeats", self.repeats.to_string());
        doc.set("run.seed_base", self.seed_base.to_string());
        doc.set("run.out", self.out.display().to_string());
        doc.set(
            "run.init",
            match self.init {
                InitKind::Zeros => "zeros",
                InitKind::Gauss => "gauss",
            },
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub optimizer: OptimizerSpec,
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn from_doc(doc: &KvDoc) -> Result<ExperimentConfig> {
        let mut reader = KvReader::new(doc);
        let problem = ProblemSpec::read(&mut reader)?;
        let optimizer = OptimizerSpec::read(&mut reader)?;
        let run = RunSpec::read(&mut reader)?;
        reader.finish()?;
        let config = ExperimentConfig {
            problem,
            optimizer,
            run,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_text(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_doc(&KvDoc::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        ExperimentConfig::from_text(&text)
    }

    pub fn to_doc(&self) -> KvDoc {
        let mut doc = KvDoc::new();
        self.problem.write(&mut doc);
        self.optimizer.write(&mut doc);
        self.run.write(&mut doc);
        doc
    }

    pub fn to_text(&self) -> String {
        self.to_doc().serialize()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Optimizer arity must match problem arity; runs must do work.
    pub fn validate(&self) -> Result<()> {
        if self.run.iters == 0 {
            return Err(Error::config("run.iters must be at least 1"));
        }
        if self.run.repeats == 0 {
            return Err(Error::config("run.repeats must be at least 1"));
        }
        match (&self.optimizer, self.problem.is_bilevel()) {
            (OptimizerSpec::Single(_), true) => Err(Error::config(
                "single-level optimizer paired with a bi-level problem",
            )),
            (OptimizerSpec::Bilevel(_), false) => Err(Error::config(
                "bi-level optimizer paired with a single-level problem",
            )),
            _ => Ok(()),
        }
    }
}
