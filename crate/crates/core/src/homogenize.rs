//! Turning a quasi-homogeneous polynomial into a homogeneous one by torus
//! substitutions `x_i -> x_i y`, one fresh variable at a time.
//!
//! With weights `a` and weighted degree `d`, substituting into `x_i` exactly
//! `a_i - 1` times raises the total degree of every monomial `x^e` to
//! `sum a_i e_i = d`. Each substitution is a bijection of the torus that
//! leaves `sigma`, nondegeneracy and the torus sums unchanged; the
//! verifiers below check this stage by stage.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::rational_string;
use crate::error::Result;
use crate::newton::{nondegenerate_for_prime, NewtonPolyhedron};
use crate::poly::{Polynomial, QuasiWeights};
use crate::sums::{e_sum, Budget, UnitTwist};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    /// 0-based original variable substituted into.
    pub variable: usize,
    /// 1-based repetition for this variable.
    pub repetition: u32,
    /// 0-based index of the fresh variable.
    pub new_variable: usize,
    #[serde(serialize_with = "ser_display")]
    pub poly: Polynomial,
}

fn ser_display<S: serde::Serializer>(p: &Polynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogenizationChain {
    #[serde(serialize_with = "ser_display")]
    pub initial: Polynomial,
    pub weights: QuasiWeights,
    pub steps: Vec<ChainStep>,
    #[serde(rename = "final", serialize_with = "ser_display")]
    pub final_poly: Polynomial,
    pub total_new_vars: usize,
}

impl HomogenizationChain {
    /// Every polynomial of the chain, initial first.
    pub fn stages(&self) -> Vec<&Polynomial> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.poly)).collect()
    }

    /// Weighted degree, which is the total degree of the final polynomial.
    pub fn degree(&self) -> u64 {
        self.weights.degree
    }
}

/// Substitutes `a_i - 1` times into each `x_i`, variables in increasing index.
pub fn homogenization_chain(f: &Polynomial) -> Result<HomogenizationChain> {
    let weights = f.quasi_weights()?;
    let mut current = f.clone();
    let mut steps = Vec::new();
    for (i, &a) in weights.weights.iter().enumerate() {
        for rep in 1..a {
            current = current.substitute_torus(i)?;
            steps.push(ChainStep { variable: i, repetition: rep as u32, new_variable: current.num_vars() - 1, poly: current.clone() });
        }
    }
    let total_new_vars = steps.len();
    debug_assert!(current.is_homogeneous());
    Ok(HomogenizationChain { initial: f.clone(), weights, steps, final_poly: current, total_new_vars })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaInvariance {
    /// `sigma` of each stage, as `num/den`.
    pub sigmas: Vec<String>,
    pub constant: bool,
}

/// `sigma` at every stage, exactly.
pub fn verify_sigma_invariance(chain: &HomogenizationChain) -> Result<SigmaInvariance> {
    let sigmas: Vec<BigRational> = chain
        .stages()
        .par_iter()
        .map(|f| NewtonPolyhedron::new(f).map(|p| p.sigma().clone()))
        .collect::<Result<_>>()?;
    let constant = sigmas.windows(2).all(|w| w[0] == w[1]);
    Ok(SigmaInvariance { sigmas: sigmas.iter().map(rational_string).collect(), constant })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NondegTransport {
    pub prime: u64,
    /// Compact-face nondegeneracy at `p`, stage by stage.
    pub stages: Vec<bool>,
    /// Stages `k` that are nondegenerate while stage `k + 1` is not.
    pub counterexamples: Vec<usize>,
}

impl NondegTransport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// The premise fails at the start, so the transport claim says nothing.
    pub fn vacuous(&self) -> bool {
        !self.stages.first().copied().unwrap_or(true)
    }
}

/// Nondegeneracy with respect to compact faces, carried from each stage to the next.
pub fn verify_nondeg_transport(chain: &HomogenizationChain, p: u64) -> Result<NondegTransport> {
    let stages: Vec<bool> = chain
        .stages()
        .par_iter()
        .map(|f| {
            let poly = NewtonPolyhedron::new(f)?;
            Ok(nondegenerate_for_prime(f, &poly.faces, p, true)?.certified)
        })
        .collect::<Result<_>>()?;
    let counterexamples = stages.windows(2).enumerate().filter(|(_, w)| w[0] && !w[1]).map(|(k, _)| k).collect();
    Ok(NondegTransport { prime: p, stages, counterexamples })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusInvariance {
    pub prime: u64,
    pub twist: u64,
    /// Torus sum of each stage as `num/den` when rational.
    pub values: Vec<Option<String>>,
    /// Stage `k` against `k` with a dummy variable added, and that against stage `k + 1`.
    pub dummy_equal: Vec<bool>,
    pub substitution_equal: Vec<bool>,
}

impl TorusInvariance {
    pub fn holds(&self) -> bool {
        self.dummy_equal.iter().chain(&self.substitution_equal).all(|&b| b)
    }
}

/// Exact equality of the normalized torus sums across the chain.
pub fn verify_torus_sum_invariance(chain: &HomogenizationChain, p: u64, twist: UnitTwist, budget: Budget) -> Result<TorusInvariance> {
    let stages = chain.stages();
    let values = stages.par_iter().map(|f| e_sum(f, p, twist, budget)).collect::<Result<Vec<_>>>()?;
    let padded = stages[..stages.len() - 1]
        .par_iter()
        .map(|f| e_sum(&f.with_extra_vars(1), p, twist, budget))
        .collect::<Result<Vec<_>>>()?;
    let dummy_equal = values.iter().zip(&padded).map(|(a, b)| a.exactly_equals(b)).collect();
    let substitution_equal = padded.iter().zip(&values[1..]).map(|(a, b)| a.exactly_equals(b)).collect();
    Ok(TorusInvariance {
        prime: p,
        twist: twist.get(),
        values: values.iter().map(|v| v.rational_value().as_ref().map(rational_string)).collect(),
        dummy_equal,
        substitution_equal,
    })
}
