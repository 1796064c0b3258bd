//! Two-spin operators: the S.S spectrum and correlators of a few states.
//!
//! ```bash
//! cargo run --example spin_algebra
//! ```

use sgflux::spin::{correlators, expectation, spin_dot, NamedState};

fn main() -> sgflux::Result<()> {
    let mut ev = spin_dot().matrix().hermitian_eigenvalues()?;
    ev.sort_by(f64::total_cmp);
    println!("eigenvalues of S_p . S_l (hbar = 1): {ev:?}");

    for s in [NamedState::Parallel, NamedState::Antiparallel, NamedState::ParallelCoherent, NamedState::Singlet] {
        let state = s.state();
        let c = correlators(&state);
        println!("{s:?}: <S.S> = {:+.4}, <SzSz> = {:+.4}, <SxSx> = {:+.4}", expectation(&spin_dot(), &state)?, c[2][2], c[0][0]);
    }
    Ok(())
}
