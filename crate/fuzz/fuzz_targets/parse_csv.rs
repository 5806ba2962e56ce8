#![no_main]

use kir_core::dataio::{parse_csv, CsvOptions, YKind};
use libfuzzer_sys::fuzz_target;

// First byte picks the option set, the rest is the file body.
fuzz_target!(|data: &[u8]| {
    let Some((&mode, body)) = data.split_first() else {
        return;
    };
    let options = CsvOptions {
        x_columns: if mode & 1 == 0 { vec![] } else { vec!["x".into(), "1".into()] },
        y_columns: if mode & 2 == 0 { vec![] } else { vec!["y".into()] },
        y_kind: if mode & 4 == 0 { YKind::Real } else { YKind::So3 },
        standardize: mode & 8 != 0,
    };
    if let Ok(sample) = parse_csv(body, &options) {
        assert_eq!(sample.x().len(), sample.y().len());
    }
});
