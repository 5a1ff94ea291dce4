#![no_main]

//! Differential: transform counts against direct counts.

use distdoubling::dist::{sum_counts_naive, sum_counts_transform};
use distdoubling::group::{Group, GroupSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&shape, rest)) = data.split_first() else { return };
    let moduli: Vec<usize> = match shape % 4 {
        0 => vec![2 + (shape as usize >> 2) % 60],
        1 => vec![4, 2 + (shape as usize >> 2) % 14],
        2 => vec![2; 1 + (shape as usize >> 2) % 9],
        _ => vec![3, 3, 2 + (shape as usize >> 2) % 7],
    };
    let g = Group::new(&moduli).unwrap();
    let n = g.order();
    let bit = |i: usize| rest.get(i / 8).map_or(false, |b| b >> (i % 8) & 1 == 1);
    let a = GroupSet::from_flats(&g, (0..n).filter(|&i| bit(i)));
    let b = GroupSet::from_flats(&g, (0..n).filter(|&i| bit(n + i)));
    if a.is_empty() || b.is_empty() {
        return;
    }
    let (fast, residual) = sum_counts_transform(&a, &b).unwrap();
    assert!(residual < 1e-6);
    assert_eq!(fast.counts(), sum_counts_naive(&a, &b).unwrap().counts());
});
