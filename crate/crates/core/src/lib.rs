//! Decides whether a finite group has a faithful irreducible unitary
//! representation, via the minisocle criterion, and cross-checks every verdict
//! against a character-table oracle.
//!
//! The decision pipeline: build a concrete group from a small spec language
//! ([`dsl`], [`group`]), decompose its socle into feet ([`socle`]), run the
//! abelian-part / minisocle orbit and character conditions ([`module`],
//! [`criterion`]), and independently confirm with a numerically computed
//! character table ([`chartab`]), optionally producing explicit unitary
//! matrices ([`rep`]). [`aut`] generalizes the whole story from inner
//! automorphisms to an arbitrary automorphism group acting on the group.

pub mod aut;
pub mod chartab;
pub mod criterion;
pub mod dsl;
pub mod fpmat;
pub mod group;
pub mod module;
pub mod perm;
pub mod rep;
pub mod socle;

pub use aut::{
    close_auto_group, decide_g_faithful, decide_g_faithful_with_table,
    g_minimal_invariant_subgroups, g_minisocle, resolve_auto_images, AutError, AutoGroup, GReport,
    DEFAULT_AUTO_CAP,
};
pub use chartab::{
    character_table, character_table_with_tolerance, has_faithful_irreducible, CharacterTable,
    OracleError,
};
pub use criterion::{
    decide_irreducibly_represented, decide_with_decomposition, CriterionConfig, CriterionError,
    CriterionReport, DualCharacter, MsCharacter,
};
pub use dsl::{parse_autos_spec, parse_group_spec, GroupSpec, ParseError};
pub use group::{build_group, FiniteGroup, GroupBuild, GroupError, Subgroup};
pub use module::{ma_fp_modules, orbit_generation_check, FpModule, ModuleError, OrbitCheck};
pub use rep::{construct_irreducible_rep, IrrepMatrices, RepError, MAX_REP_ORDER};
pub use socle::{minisocle_decomposition, Foot, MinisocleDecomposition, SocleError};
