pub mod binary;
pub mod envelopes;
pub mod error;
pub mod hulls;
pub mod mre;
pub mod search;
pub mod stationary;
pub mod verify;
