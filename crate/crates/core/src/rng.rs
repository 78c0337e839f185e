//! Named, independent random substreams derived from one episode seed.
//!
//! Every consumer of randomness owns its own ChaCha stream so that, for
//! example, changing a blue policy never perturbs drone motion or malware
//! activation draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers. Per-agent policy streams start at `POLICY_BASE`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Motion,
    Red,
    Green,
    BlueOutcome,
    Hosting,
    Sampling,
}

const POLICY_BASE: u64 = 1 << 16;
const STAND_IN_BASE: u64 = 1 << 17;

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Motion => 1,
            Stream::Red => 2,
            Stream::Green => 3,
            Stream::BlueOutcome => 4,
            Stream::Hosting => 5,
            Stream::Sampling => 6,
        }
    }
}

pub fn substream(seed: u64, stream: Stream) -> ChaCha8Rng {
    with_stream(seed, stream.id())
}

/// Private stream for the blue policy hosted on drone `host`. Keying by host
/// rather than slot keeps a policy's draws fixed under slot permutations.
pub fn policy_stream(seed: u64, host: usize) -> ChaCha8Rng {
    with_stream(seed, POLICY_BASE + host as u64)
}

/// Stream for a harness-side stand-in driving external slot `slot`.
pub fn stand_in_stream(seed: u64, slot: usize) -> ChaCha8Rng {
    with_stream(seed, STAND_IN_BASE + slot as u64)
}

fn with_stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// The world-side streams carried inside a swarm state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStreams {
    pub motion: ChaCha8Rng,
    pub red: ChaCha8Rng,
    pub green: ChaCha8Rng,
    pub blue_outcome: ChaCha8Rng,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            motion: substream(seed, Stream::Motion),
            red: substream(seed, Stream::Red),
            green: substream(seed, Stream::Green),
            blue_outcome: substream(seed, Stream::BlueOutcome),
        }
    }
}
