//! Flush-to-zero for the time loop. Amplitudes ahead of a wavefront decay
//! through the subnormal range, where x86 arithmetic is orders of magnitude
//! slower; flushing them changes nothing above 1e-38.

/// Enables FTZ/DAZ on the current thread until dropped.
pub(crate) struct FlushGuard {
    #[cfg(target_arch = "x86_64")]
    saved: u32,
}

#[cfg(target_arch = "x86_64")]
#[allow(deprecated)]
mod csr {
    use std::arch::x86_64::{_mm_getcsr, _mm_setcsr};

    const FTZ: u32 = 1 << 15;
    const DAZ: u32 = 1 << 6;

    pub fn enable() -> u32 {
        // SAFETY: SSE is baseline on x86_64; only the FTZ and DAZ bits change.
        unsafe {
            let saved = _mm_getcsr();
            _mm_setcsr(saved | FTZ | DAZ);
            saved
        }
    }

    pub fn restore(saved: u32) {
        // SAFETY: restores a value previously read from the register.
        unsafe { _mm_setcsr(saved) }
    }
}

impl FlushGuard {
    pub(crate) fn new() -> Self {
        #[cfg(target_arch = "x86_64")]
        {
            FlushGuard {
                saved: csr::enable(),
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            FlushGuard {}
        }
    }
}

impl Drop for FlushGuard {
    fn drop(&mut self) {
        #[cfg(target_arch = "x86_64")]
        csr::restore(self.saved);
    }
}

/// Leaves FTZ/DAZ on for the rest of the thread's life; for pool workers owned by one run.
pub(crate) fn enable_for_thread() {
    std::mem::forget(FlushGuard::new());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[cfg(target_arch = "x86_64")]
    fn subnormals_flush_inside_guard_only() {
        let tiny = std::hint::black_box(f32::MIN_POSITIVE);
        let half = std::hint::black_box(0.5f32);
        {
            let _g = FlushGuard::new();
            assert_eq!(std::hint::black_box(tiny * half), 0.0);
        }
        assert!((std::hint::black_box(tiny) * half).is_subnormal());
    }
}
