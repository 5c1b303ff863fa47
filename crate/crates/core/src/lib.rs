//! Pauli channels and their Pauli pseudo-Lindblad generators.
//!
//! * [`pauli`] and [`wht`]: symplectic Paulis and the Walsh-Hadamard transform.
//! * [`generator`]: channel/fidelity/generator conversions and Markovianity classes.
//! * [`random_channels`]: Monte Carlo statistics of random Pauli channels.
//! * [`twirl`]: twirled noise of three gates, closed form and numerically.
//! * [`mitigation`]: quasi-probabilistic injection, inversion and amplification.
//! * [`learning`]: synthetic cycle benchmarking and local model fitting.
//! * [`io`]: versioned JSON formats.

pub mod error;
pub mod generator;
pub mod io;
pub mod learning;
pub mod linalg;
pub mod lsq;
pub mod mitigation;
pub mod pauli;
pub mod random_channels;
pub mod rng;
pub mod twirl;
pub mod wht;

pub use error::{Error, Result};
pub use generator::{
    channel_to_fidelities, channel_to_generator, classify, generator_to_channel, is_cptp,
    Classification, MarkovClass, PauliChannel, PseudoLindblad,
};
pub use pauli::PauliOp;
pub use wht::{inverse_walsh_hadamard, walsh_hadamard, SpectrumKind, SpectrumVector};

pub use num_complex::Complex64;
