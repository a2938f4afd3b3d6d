#![no_main]

use std::collections::BTreeMap;

use libfuzzer_sys::fuzz_target;
use relnodes::io::{read_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(ds) = read_csv(data, &BTreeMap::new()) else {
        return;
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &ds).expect("write to memory");
    let again = read_csv(buf.as_slice(), &BTreeMap::new()).expect("written CSV parses");
    assert_eq!(again.n_rows(), ds.n_rows());
});
