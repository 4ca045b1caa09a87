//! Seeded random streams.
//!
//! Every Monte Carlo routine draws from fixed-size chunks. Chunk `c` of a run
//! with master seed `s` uses `ChaCha8Rng::seed_from_u64(s)` switched to
//! stream `c`, so output does not depend on how chunks are spread over
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws per independent stream.
pub const CHUNK: usize = 1 << 14;

/// Default seed used by the command line and the demo.
pub const DEFAULT_SEED: u64 = 0x5eed_1e55_c0ff_ee00;

/// Generator for stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `-ln(U)` with `U` uniform on `(0, 1]`.
pub fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// `count` i.i.d. `Exp(rate)` draws.
pub fn exponential_samples(rate: f64, count: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; count];
    fill_chunked(&mut out, seed, |rng| unit_exponential(rng) / rate);
    out
}

/// Fills `out` chunk by chunk, calling `draw` with the stream of each chunk.
pub(crate) fn fill_chunked<F>(out: &mut [f64], seed: u64, draw: F)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let fill = |(c, chunk): (usize, &mut [f64])| {
        let mut rng = stream_rng(seed, c as u64);
        for v in chunk.iter_mut() {
            *v = draw(&mut rng);
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(CHUNK).enumerate().for_each(fill);
    }
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(CHUNK).enumerate().for_each(fill);
}
