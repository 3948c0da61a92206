//! Finitely presented spaces, group actions, orbit quotients and horizon
//! families.

mod group;
mod horizon;
mod instance;
mod quotient;

pub use group::{enumerate_group, GroupAction, Perm};
pub use horizon::{HorizonFamily, HorizonLevel};
pub use instance::{validate_instance, Bornology, Boundedness, SpaceInstance, ValidationReport};
pub use quotient::{hausdorff, hypothesis_report, orbit_quotient, regular, HypothesisReport, QuotientSpace};
