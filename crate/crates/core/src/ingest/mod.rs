//! Data acquisition: seeded generators, IDX files, instance files and the
//! corruption used for source selection.
//!
//! Every generator draws from `ChaCha8Rng`. A run seed is split into
//! independent streams with [`stream_rng`]; normals come from the ziggurat
//! sampler of `rand_distr`, a fixed transform of the uniform stream.

mod gaussian;
mod idx;
mod instance;
mod pixels;
mod synth;

pub use gaussian::{gen_gaussian_domain, GaussianDomainSpec};
pub use idx::{read_idx, read_idx_file, write_idx, IdxData, IdxTensor};
pub use instance::{read_instances, read_instances_file, write_instances, Instances};
pub use pixels::{
    corrupt_dataset, corrupt_gaussian_noise, even_odd_labels, scale_pixels, selection_bias_filter,
    PIXEL_MAX,
};
pub use synth::{DigitSample, Style, SynthDigits};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for stream `stream` of run seed `seed`. Distinct streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
