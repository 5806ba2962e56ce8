#![no_main]

use kir_core::Rotation3;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let entries: Vec<f64> = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Ok(r) = Rotation3::from_slice(&entries) {
        let back = r.mul(&r.transpose());
        assert!(back.orthogonality_defect() < 1e-6);
    }
});
