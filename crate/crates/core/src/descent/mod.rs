//! 2-descent: quartic searches, certificates, and the constructive tables.

pub mod cascade;
pub mod certificate;
pub mod quartic;

pub use cascade::{cascade_u4v4, CascadeStage, CascadeState};
pub use certificate::{
    assemble, build_certificate, build_certificate_with, certificate_for_uv, offer_from_witness,
    offers_from_seeds, rank_from_sizes, rank_lower_bound, seed_from_point, subgroup_closure,
    twist_certificate, twisted_offers, uv_offers, verify_certificate, ClassEntry, ClassProof,
    DescentCertificate, DirectSolver, Offer, QuarticSolver, SearchRecord, Seed, WitnessOrigin,
};
pub use quartic::{
    enumerate_b1, local_obstruction, solve_quartic, GcdRule, QuarticProblem, QuarticWitness, SearchOptions,
    SearchOutcome, Side,
};
