//! Capacity engine for the two-user linear deterministic interference channel
//! with intermittent feedback.

pub mod channel;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod gf2;
pub mod lp;
pub mod rational;
pub mod regions;
pub mod scheme;
pub mod sim;
pub mod verify;

pub use channel::{ChannelParams, FeedbackDist, StatePair, StateSeq};
pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, Gf2Vector};
pub use rational::Rational;
pub use regions::{RateRegion, SchemeConstants};
