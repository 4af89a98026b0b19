//! Kernel closed forms checked against FFT inversion of their symbols.

use interwave::decay::kernels::{k1_symbol, k2_symbol, k3_symbol, k_symbol};
use interwave::decay::{kernel_fft_oracle, kernel_k, kernel_k1, kernel_k2, kernel_k3, Normalization};
use interwave::{Depth, Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let p = ModelParams::p1().with_mu2(Depth::Finite(4.0));
    let grid = Grid::new(256.0, 1 << 18)?;
    let sigma = p.sigma()?;
    let oracles = [
        ("K", kernel_fft_oracle(&k_symbol(&p, &grid)?, Normalization::Unitary)?),
        ("K1", kernel_fft_oracle(&k1_symbol(sigma, &grid), Normalization::Plain)?),
        ("K2", kernel_fft_oracle(&k2_symbol(&p, &grid), Normalization::Unitary)?),
        ("K3", kernel_fft_oracle(&k3_symbol(&p, &grid)?, Normalization::Unitary)?),
    ];
    for x in [1.0, 2.0, 5.0] {
        let j = grid.index_of(x).expect("node");
        let closed = [kernel_k(&p, x)?, kernel_k1(sigma, x), kernel_k2(&p, x)?, kernel_k3(&p, x, 1e-12, 1 << 16)?.value];
        for ((name, fft), c) in oracles.iter().zip(closed) {
            println!("{name}({x}) = {c:+.10e}  fft = {:+.10e}  diff = {:.1e}", fft.values()[j], (c - fft.values()[j]).abs());
        }
    }
    Ok(())
}
