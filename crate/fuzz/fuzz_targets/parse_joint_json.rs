#![no_main]

use kir_core::oracle::DiscreteJoint;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(joint) = DiscreteJoint::from_json(text) {
        let again = DiscreteJoint::from_json(&joint.to_json()).expect("round trip");
        assert_eq!(joint.nx(), again.nx());
        assert_eq!(joint.ny(), again.ny());
    }
});
